//! Finitely-presented infinite graphs as lazy adjacency oracles.
//!
//! A graph is a set of sorts (each an integer index domain) plus guarded
//! adjacency rules between sorts. Derived graphs (complement, removal of a
//! vertex set, induced subgraphs, disjoint unions, Cartesian products) are
//! built by rewriting sorts and rules, so every oracle has the same shape and
//! can be emitted back to text.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::guard::{box_size, for_each_point, var_bounds, Atom, Guard, LinExpr, Var};
use crate::vertex::{DegreeValue, VertexId};
use crate::vertex_set::VertexSet;

const MAX_BOX: u128 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SortDecl {
    pub name: String,
    pub arity: usize,
    /// Guard over variables `0..arity`.
    pub domain: Guard,
}

/// `left(x) ~ right(y) when guard`, with `x` bound to variables
/// `0..arity(left)` and `y` to the following `arity(right)` variables.
/// Rules are read symmetrically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AdjacencyRule {
    pub left: String,
    pub right: String,
    pub guard: Guard,
}

/// Index bound for ball extraction: `max |root component| + offset + slope * radius`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IndexBound {
    pub offset: i64,
    pub slope: i64,
}

impl Default for IndexBound {
    fn default() -> Self {
        IndexBound { offset: 1, slope: 1 }
    }
}

/// How vertices are assigned to connected components, when the oracle is
/// known to be a disjoint union.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComponentKey {
    /// Sorts are prefixed `u<i>_` by [`GraphOracle::disjoint_union`].
    Factor,
    /// The first index component names the component.
    LeadingIndex,
}

#[derive(Clone, Debug)]
pub struct GraphOracle {
    name: String,
    sorts: BTreeMap<String, SortDecl>,
    rules: Vec<AdjacencyRule>,
    bound: IndexBound,
    components: Option<ComponentKey>,
    // from-sort -> to-sort -> guard over (from vars, to vars)
    adjacency: BTreeMap<String, BTreeMap<String, Guard>>,
    id: String,
}

impl PartialEq for GraphOracle {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

/// Swaps the two variable blocks of a rule guard.
fn swap_blocks(g: &Guard, a: usize, b: usize) -> Guard {
    g.rename(move |v| if v < a { v + b } else { v - a })
}

impl GraphOracle {
    pub fn new(
        name: impl Into<String>,
        sorts: Vec<SortDecl>,
        rules: Vec<AdjacencyRule>,
        bound: IndexBound,
        components: Option<ComponentKey>,
    ) -> Result<Self> {
        let mut sort_map = BTreeMap::new();
        for s in sorts {
            if s.domain.max_var().is_some_and(|v| v >= s.arity) {
                return Err(Error::Parse(format!(
                    "domain of sort `{}` mentions a variable beyond its arity",
                    s.name
                )));
            }
            sort_map.insert(s.name.clone(), s);
        }
        let mut canon = Vec::new();
        for r in rules {
            let a = sort_map
                .get(&r.left)
                .ok_or_else(|| Error::UnknownSort(r.left.clone()))?
                .arity;
            let b = sort_map
                .get(&r.right)
                .ok_or_else(|| Error::UnknownSort(r.right.clone()))?
                .arity;
            if r.guard.max_var().is_some_and(|v| v >= a + b) {
                return Err(Error::Parse(format!(
                    "rule {} ~ {} mentions a variable beyond the sort arities",
                    r.left, r.right
                )));
            }
            if r.guard.is_false() {
                continue;
            }
            if r.left > r.right {
                canon.push(AdjacencyRule {
                    guard: swap_blocks(&r.guard, a, b),
                    left: r.right,
                    right: r.left,
                });
            } else {
                canon.push(r);
            }
        }
        canon.sort();
        canon.dedup();
        let mut adjacency: BTreeMap<String, BTreeMap<String, Guard>> = BTreeMap::new();
        let mut put = |from: &str, to: &str, g: Guard| {
            let slot = adjacency
                .entry(from.to_string())
                .or_default()
                .entry(to.to_string())
                .or_insert_with(Guard::never);
            *slot = slot.or(&g);
        };
        for r in &canon {
            let a = sort_map[&r.left].arity;
            let b = sort_map[&r.right].arity;
            put(&r.left, &r.right, r.guard.clone());
            put(&r.right, &r.left, swap_blocks(&r.guard, a, b));
        }
        let mut h = DefaultHasher::new();
        sort_map.values().collect::<Vec<_>>().hash(&mut h);
        canon.hash(&mut h);
        bound.hash(&mut h);
        components.hash(&mut h);
        Ok(GraphOracle {
            name: name.into(),
            sorts: sort_map,
            rules: canon,
            bound,
            components,
            adjacency,
            id: format!("{:016x}", h.finish()),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Structural fingerprint; equal for identically constructed oracles.
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn sorts(&self) -> impl Iterator<Item = &SortDecl> {
        self.sorts.values()
    }

    pub fn sort(&self, name: &str) -> Option<&SortDecl> {
        self.sorts.get(name)
    }

    pub fn rules(&self) -> &[AdjacencyRule] {
        &self.rules
    }

    pub fn bound(&self) -> IndexBound {
        self.bound
    }

    pub fn components(&self) -> Option<ComponentKey> {
        self.components
    }

    pub fn renamed(&self, name: impl Into<String>) -> GraphOracle {
        let mut g = self.clone();
        g.name = name.into();
        g
    }

    pub fn is_vertex(&self, v: &VertexId) -> bool {
        self.sorts
            .get(&v.sort)
            .is_some_and(|s| s.arity == v.arity() && s.domain.eval(&v.index))
    }

    pub fn check_vertex(&self, v: &VertexId) -> Result<()> {
        let s = self
            .sorts
            .get(&v.sort)
            .ok_or_else(|| Error::UnknownSort(v.sort.clone()))?;
        if s.arity != v.arity() {
            return Err(Error::ArityMismatch {
                sort: v.sort.clone(),
                expected: s.arity,
                got: v.arity(),
            });
        }
        if !s.domain.eval(&v.index) {
            return Err(Error::InvalidVertex(v.clone()));
        }
        Ok(())
    }

    pub fn adjacent(&self, u: &VertexId, v: &VertexId) -> Result<bool> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.adjacent_unchecked(u, v))
    }

    /// Adjacency for vertices already known to be valid.
    pub fn adjacent_unchecked(&self, u: &VertexId, v: &VertexId) -> bool {
        if u == v {
            return false;
        }
        let Some(g) = self.adjacency.get(&u.sort).and_then(|m| m.get(&v.sort)) else {
            return false;
        };
        let mut vals = Vec::with_capacity(u.arity() + v.arity());
        vals.extend_from_slice(&u.index);
        vals.extend_from_slice(&v.index);
        g.eval(&vals)
    }

    /// Solution families for the neighbors of `v`: target sort plus a
    /// conjunction over that sort's variables (including its domain).
    fn families(&self, v: &VertexId) -> Vec<(&SortDecl, Vec<Atom>)> {
        let mut out = Vec::new();
        let Some(targets) = self.adjacency.get(&v.sort) else {
            return out;
        };
        let a = v.arity();
        for (t, g) in targets {
            let sd = &self.sorts[t];
            let subs: Vec<LinExpr> = (0..a + sd.arity)
                .map(|i| {
                    if i < a {
                        LinExpr::constant(v.index[i])
                    } else {
                        LinExpr::var(i - a)
                    }
                })
                .collect();
            let fam = g.substitute(&subs).and(&sd.domain);
            for c in fam.conjuncts() {
                out.push((sd, c.clone()));
            }
        }
        out
    }

    /// Neighbors of `v` whose index components all have absolute value at
    /// most `bound`, in vertex order.
    pub fn neighbors_bounded(&self, v: &VertexId, bound: i64) -> Result<Vec<VertexId>> {
        self.check_vertex(v)?;
        let mut out = BTreeSet::new();
        for (sd, conj) in self.families(v) {
            let Some(bounds) = var_bounds(&conj, sd.arity) else {
                continue;
            };
            let ranges: Vec<(i64, i64)> = bounds
                .iter()
                .map(|&(lo, hi)| (lo.unwrap_or(-bound).max(-bound), hi.unwrap_or(bound).min(bound)))
                .collect();
            collect_solutions(sd, &conj, &ranges, v, &mut out)?;
        }
        Ok(out.into_iter().collect())
    }

    /// All neighbors when the degree is finite, `None` when it is infinite.
    pub fn neighbors(&self, v: &VertexId) -> Result<Option<Vec<VertexId>>> {
        self.check_vertex(v)?;
        let mut out = BTreeSet::new();
        for (sd, conj) in self.families(v) {
            let Some(bounds) = var_bounds(&conj, sd.arity) else {
                continue;
            };
            if bounds.iter().all(|&(l, h)| l.is_some() && h.is_some()) {
                let ranges: Vec<(i64, i64)> = bounds.iter().map(|&(l, h)| (l.unwrap(), h.unwrap())).collect();
                collect_solutions(sd, &conj, &ranges, v, &mut out)?;
            } else if has_witness(sd, &conj, &bounds, v) {
                return Ok(None);
            }
        }
        Ok(Some(out.into_iter().collect()))
    }

    pub fn degree(&self, v: &VertexId) -> Result<DegreeValue> {
        Ok(match self.neighbors(v)? {
            Some(n) => DegreeValue::Finite(n.len() as u64),
            None => DegreeValue::Infinite,
        })
    }

    pub fn index_bound(&self, roots: &[VertexId], radius: usize) -> i64 {
        let base = roots.iter().map(|r| r.max_abs()).max().unwrap_or(0);
        base + self.bound.offset + self.bound.slope * radius as i64
    }

    /// Every vertex whose index components all lie in `[lo, hi]`.
    pub fn vertices_in_box(&self, lo: i64, hi: i64) -> Result<Vec<VertexId>> {
        let mut out = BTreeSet::new();
        for sd in self.sorts.values() {
            for conj in sd.domain.conjuncts() {
                let Some(bounds) = var_bounds(conj, sd.arity) else {
                    continue;
                };
                let ranges: Vec<(i64, i64)> = bounds
                    .iter()
                    .map(|&(l, h)| (l.unwrap_or(lo).max(lo), h.unwrap_or(hi).min(hi)))
                    .collect();
                let n = box_size(&ranges);
                if n > MAX_BOX {
                    return Err(Error::BoxTooLarge(n));
                }
                for_each_point(&ranges, |p| {
                    if conj.iter().all(|a| a.eval(p)) {
                        out.insert(VertexId::new(sd.name.clone(), p.to_vec()));
                    }
                    true
                });
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Component tag of `v` when the oracle is a declared disjoint union.
    pub fn component_of(&self, v: &VertexId) -> Option<String> {
        match self.components? {
            ComponentKey::Factor => v.sort.split_once('_').map(|(p, _)| p.to_string()),
            ComponentKey::LeadingIndex => Some(match v.index.first() {
                Some(k) => k.to_string(),
                None => v.sort.clone(),
            }),
        }
    }

    fn with_domains(&self, name: String, f: impl Fn(&SortDecl) -> Guard) -> GraphOracle {
        let sorts: Vec<SortDecl> = self
            .sorts
            .values()
            .map(|s| SortDecl {
                name: s.name.clone(),
                arity: s.arity,
                domain: f(s),
            })
            .filter(|s| !s.domain.is_false())
            .collect();
        let live: BTreeSet<&str> = sorts.iter().map(|s| s.name.as_str()).collect();
        let rules = self
            .rules
            .iter()
            .filter(|r| live.contains(r.left.as_str()) && live.contains(r.right.as_str()))
            .cloned()
            .collect();
        GraphOracle::new(name, sorts, rules, self.bound, self.components)
            .expect("rewriting domains keeps a valid oracle")
    }

    /// Induced subgraph on `V(self) \ s`.
    pub fn minus(&self, s: &VertexSet) -> Result<GraphOracle> {
        s.check_against(self)?;
        Ok(
            self.with_domains(format!("{} \\ H", self.name), |sd| match s.clause(&sd.name) {
                Some(c) => sd.domain.and(&c.guard.not()),
                None => sd.domain.clone(),
            }),
        )
    }

    /// Induced subgraph on `V(self) ∩ s`.
    pub fn induced(&self, s: &VertexSet) -> Result<GraphOracle> {
        s.check_against(self)?;
        Ok(
            self.with_domains(format!("{}[Q]", self.name), |sd| match s.clause(&sd.name) {
                Some(c) => sd.domain.and(&c.guard),
                None => Guard::never(),
            }),
        )
    }

    /// Same vertices, adjacency negated on distinct pairs.
    pub fn complement(&self) -> GraphOracle {
        let names: Vec<&String> = self.sorts.keys().collect();
        let mut rules = Vec::new();
        for (i, s) in names.iter().enumerate() {
            for t in &names[i..] {
                let (a, b) = (self.sorts[*s].arity, self.sorts[*t].arity);
                let present = self
                    .adjacency
                    .get(*s)
                    .and_then(|m| m.get(*t))
                    .cloned()
                    .unwrap_or_else(Guard::never);
                let mut g = present.not();
                if s == t {
                    let distinct = (0..a).fold(Guard::never(), |acc, k| {
                        acc.or(&Guard::from_conjuncts(vec![
                            vec![Atom::Le(LinExpr::var(k) - LinExpr::var(a + k) + LinExpr::constant(1))],
                            vec![Atom::Le(LinExpr::var(a + k) - LinExpr::var(k) + LinExpr::constant(1))],
                        ]))
                    });
                    g = g.and(&distinct);
                }
                let _ = b;
                if !g.is_false() {
                    rules.push(AdjacencyRule {
                        left: (*s).clone(),
                        right: (*t).clone(),
                        guard: g,
                    });
                }
            }
        }
        GraphOracle::new(
            format!("complement({})", self.name),
            self.sorts.values().cloned().collect(),
            rules,
            self.bound,
            None,
        )
        .expect("complement of a valid oracle is valid")
    }

    /// Disjoint union; sort `s` of factor `i` becomes `u<i>_s`.
    pub fn disjoint_union(factors: &[GraphOracle]) -> Result<GraphOracle> {
        if factors.is_empty() {
            return Err(Error::Precondition("disjoint union needs at least one factor".into()));
        }
        let mut sorts = Vec::new();
        let mut rules = Vec::new();
        let mut bound = IndexBound { offset: 0, slope: 0 };
        for (i, g) in factors.iter().enumerate() {
            let tag = |s: &str| format!("u{i}_{s}");
            for s in g.sorts.values() {
                sorts.push(SortDecl {
                    name: tag(&s.name),
                    arity: s.arity,
                    domain: s.domain.clone(),
                });
            }
            for r in &g.rules {
                rules.push(AdjacencyRule {
                    left: tag(&r.left),
                    right: tag(&r.right),
                    guard: r.guard.clone(),
                });
            }
            bound.offset = bound.offset.max(g.bound.offset);
            bound.slope = bound.slope.max(g.bound.slope);
        }
        let name = factors.iter().map(|g| g.name.as_str()).collect::<Vec<_>>().join(" + ");
        GraphOracle::new(name, sorts, rules, bound, Some(ComponentKey::Factor))
    }

    /// Product sort name for `s` of the left factor and `t` of the right.
    pub fn product_sort(s: &str, t: &str) -> String {
        format!("{s}_x_{t}")
    }

    /// Cartesian product: `(u1,u2) ~ (v1,v2)` iff one coordinate is equal and
    /// the other adjacent.
    pub fn cartesian_product(&self, other: &GraphOracle) -> GraphOracle {
        let mut sorts = Vec::new();
        for s in self.sorts.values() {
            for t in other.sorts.values() {
                let a = s.arity;
                sorts.push(SortDecl {
                    name: Self::product_sort(&s.name, &t.name),
                    arity: a + t.arity,
                    domain: s.domain.and(&t.domain.rename(move |v| v + a)),
                });
            }
        }
        let mut rules = Vec::new();
        let equal_block = |n: usize, left: usize, right: usize| -> Guard {
            Guard::from_conjuncts(vec![(0..n)
                .map(|k| Atom::Eq(LinExpr::var(left + k) - LinExpr::var(right + k)))
                .collect()])
        };
        // first coordinate moves along a rule of `self`, second stays fixed
        for r in &self.rules {
            let (a1, a2) = (self.sorts[&r.left].arity, self.sorts[&r.right].arity);
            for t in other.sorts.values() {
                let b = t.arity;
                // layout: [x (a1), y (b)] ~ [x' (a2), y' (b)]
                let g = r.guard.rename(move |v: Var| if v < a1 { v } else { v - a1 + a1 + b });
                let g = g.and(&equal_block(b, a1, a1 + b + a2));
                rules.push(AdjacencyRule {
                    left: Self::product_sort(&r.left, &t.name),
                    right: Self::product_sort(&r.right, &t.name),
                    guard: g,
                });
            }
        }
        // second coordinate moves along a rule of `other`, first stays fixed
        for r in &other.rules {
            let (b1, b2) = (other.sorts[&r.left].arity, other.sorts[&r.right].arity);
            for s in self.sorts.values() {
                let a = s.arity;
                // layout: [x (a), y (b1)] ~ [x' (a), y' (b2)]
                let g = r
                    .guard
                    .rename(move |v: Var| if v < b1 { a + v } else { v - b1 + a + b1 + a });
                let g = g.and(&equal_block(a, 0, a + b1));
                rules.push(AdjacencyRule {
                    left: Self::product_sort(&s.name, &r.left),
                    right: Self::product_sort(&s.name, &r.right),
                    guard: g,
                });
                let _ = b2;
            }
        }
        let bound = IndexBound {
            offset: self.bound.offset.max(other.bound.offset),
            slope: self.bound.slope.max(other.bound.slope),
        };
        GraphOracle::new(format!("{} x {}", self.name, other.name), sorts, rules, bound, None)
            .expect("product of valid oracles is valid")
    }
}

fn collect_solutions(
    sd: &SortDecl,
    conj: &[Atom],
    ranges: &[(i64, i64)],
    center: &VertexId,
    out: &mut BTreeSet<VertexId>,
) -> Result<()> {
    let n = box_size(ranges);
    if n > MAX_BOX {
        return Err(Error::BoxTooLarge(n));
    }
    for_each_point(ranges, |p| {
        if conj.iter().all(|a| a.eval(p)) && !(sd.name == center.sort && p == center.index.as_slice()) {
            out.insert(VertexId::new(sd.name.clone(), p.to_vec()));
        }
        true
    });
    Ok(())
}

/// Searches growing boxes for an integer point of an unbounded family.
/// Such a point proves the family infinite: the rational recession direction
/// scaled by the moduli keeps every atom satisfied.
fn has_witness(sd: &SortDecl, conj: &[Atom], bounds: &[(Option<i64>, Option<i64>)], center: &VertexId) -> bool {
    for k in [8i64, 64, 512] {
        let ranges: Vec<(i64, i64)> = bounds
            .iter()
            .map(|&(l, h)| {
                let lo = l.unwrap_or_else(|| h.map_or(-k, |h| h - 2 * k));
                let hi = h.unwrap_or_else(|| l.map_or(k, |l| l + 2 * k));
                (lo, hi.min(lo + 2 * k))
            })
            .collect();
        if box_size(&ranges) > 4_000_000 {
            break;
        }
        let mut found = false;
        for_each_point(&ranges, |p| {
            if conj.iter().all(|a| a.eval(p)) && !(sd.name == center.sort && p == center.index.as_slice()) {
                found = true;
                return false;
            }
            true
        });
        if found {
            return true;
        }
    }
    false
}
