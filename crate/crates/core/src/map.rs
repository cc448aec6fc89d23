//! Piecewise-affine vertex maps.

use std::fmt;

use crate::guard::{Guard, LinExpr};
use crate::oracle::GraphOracle;
use crate::vertex::VertexId;
use crate::vertex_set::VertexSet;

/// `source(x) -> target(exprs(x)) when guard(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Branch {
    pub source: String,
    pub source_arity: usize,
    pub guard: Guard,
    pub target: String,
    pub exprs: Vec<LinExpr>,
}

impl Branch {
    fn image_of(&self, v: &VertexId) -> Option<VertexId> {
        let mut index = Vec::with_capacity(self.exprs.len());
        for e in &self.exprs {
            index.push(i64::try_from(e.eval(&v.index)).ok()?);
        }
        Some(VertexId::new(self.target.clone(), index))
    }

    fn matches(&self, v: &VertexId) -> bool {
        self.source == v.sort && self.source_arity == v.arity() && self.guard.eval(&v.index)
    }
}

/// Ordered branches, first match wins.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PiecewiseMap {
    branches: Vec<Branch>,
}

impl PiecewiseMap {
    pub fn new(branches: Vec<Branch>) -> Self {
        PiecewiseMap { branches }
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn identity(host: &GraphOracle) -> Self {
        Self::new(
            host.sorts()
                .map(|s| Branch {
                    source: s.name.clone(),
                    source_arity: s.arity,
                    guard: Guard::always(),
                    target: s.name.clone(),
                    exprs: (0..s.arity).map(LinExpr::var).collect(),
                })
                .collect(),
        )
    }

    pub fn apply(&self, v: &VertexId) -> Option<VertexId> {
        self.branches.iter().find(|b| b.matches(v))?.image_of(v)
    }

    pub fn matching_branches(&self, v: &VertexId) -> usize {
        self.branches.iter().filter(|b| b.matches(v)).count()
    }

    /// Number of branches whose guard holds at `v` but whose image differs
    /// from the first match.
    pub fn conflicting_branches(&self, v: &VertexId) -> usize {
        let first = self.apply(v);
        self.branches
            .iter()
            .filter(|b| b.matches(v) && b.image_of(v) != first)
            .count()
    }

    /// Same map with branch guards made pairwise disjoint per source sort.
    pub fn disjoint(&self) -> PiecewiseMap {
        let mut out = Vec::new();
        for (i, b) in self.branches.iter().enumerate() {
            let mut g = b.guard.clone();
            for earlier in &self.branches[..i] {
                if earlier.source == b.source && earlier.source_arity == b.source_arity {
                    g = g.and(&earlier.guard.not());
                }
            }
            if !g.is_false() {
                out.push(Branch { guard: g, ..b.clone() });
            }
        }
        PiecewiseMap::new(out)
    }

    /// `second ∘ first`.
    pub fn compose(first: &PiecewiseMap, second: &PiecewiseMap) -> PiecewiseMap {
        let (first, second) = (first.disjoint(), second.disjoint());
        let mut out = Vec::new();
        for a in &first.branches {
            for b in &second.branches {
                if b.source != a.target || b.source_arity != a.exprs.len() {
                    continue;
                }
                let guard = a.guard.and(&b.guard.substitute(&a.exprs));
                if guard.is_false() {
                    continue;
                }
                out.push(Branch {
                    source: a.source.clone(),
                    source_arity: a.source_arity,
                    guard,
                    target: b.target.clone(),
                    exprs: b.exprs.iter().map(|e| e.substitute(&a.exprs)).collect(),
                });
            }
        }
        PiecewiseMap::new(out)
    }

    /// `{ v : self(v) ∈ s }`.
    pub fn preimage(&self, s: &VertexSet) -> VertexSet {
        let mut out = VertexSet::empty();
        for b in &self.disjoint().branches {
            let Some(c) = s.clause(&b.target) else {
                continue;
            };
            if c.arity != b.exprs.len() {
                continue;
            }
            let g = b.guard.and(&c.guard.substitute(&b.exprs));
            out.add_clause(&b.source, b.source_arity, g)
                .expect("branch arities are consistent per sort");
        }
        out
    }

    /// Acts on the first coordinate block of a product with `h`; identity on
    /// the second.
    pub fn lift_product(&self, h: &GraphOracle) -> PiecewiseMap {
        let mut out = Vec::new();
        for b in &self.branches {
            for t in h.sorts() {
                let a = b.source_arity;
                let mut exprs = b.exprs.clone();
                exprs.extend((0..t.arity).map(|k| LinExpr::var(a + k)));
                out.push(Branch {
                    source: GraphOracle::product_sort(&b.source, &t.name),
                    source_arity: a + t.arity,
                    guard: b.guard.clone(),
                    target: GraphOracle::product_sort(&b.target, &t.name),
                    exprs,
                });
            }
        }
        PiecewiseMap::new(out)
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::dsl::emit_branch(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guard::Atom;

    fn shift(by: i64, from: i64) -> PiecewiseMap {
        PiecewiseMap::new(vec![
            Branch {
                source: "v".into(),
                source_arity: 1,
                guard: Guard::atom(Atom::Le((-LinExpr::var(0)).plus(from))),
                target: "v".into(),
                exprs: vec![LinExpr::var(0).plus(by)],
            },
            Branch {
                source: "v".into(),
                source_arity: 1,
                guard: Guard::always(),
                target: "v".into(),
                exprs: vec![LinExpr::var(0)],
            },
        ])
    }

    fn v(n: i64) -> VertexId {
        VertexId::new("v", vec![n])
    }

    #[test]
    fn first_match_wins() {
        let m = shift(1, 1);
        assert_eq!(m.apply(&v(0)), Some(v(0)));
        assert_eq!(m.apply(&v(3)), Some(v(4)));
        assert_eq!(m.matching_branches(&v(3)), 2);
        assert_eq!(m.disjoint().matching_branches(&v(3)), 1);
    }

    #[test]
    fn composition_agrees_pointwise() {
        let f = shift(1, 1);
        let g = shift(3, 2);
        let gf = PiecewiseMap::compose(&f, &g);
        for n in -3..20 {
            let want = f.apply(&v(n)).and_then(|w| g.apply(&w));
            assert_eq!(gf.apply(&v(n)), want, "at {n}");
        }
    }

    #[test]
    fn preimage_of_point() {
        let f = shift(1, 1);
        let s = VertexSet::from_vertices([&v(5), &v(0)]);
        let p = f.preimage(&s);
        let members: Vec<i64> = (-2..10).filter(|&n| p.contains(&v(n))).collect();
        assert_eq!(members, vec![0, 4]);
    }
}
