//! Symbolic vertex sets: one guard per sort over that sort's index variables.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::guard::Guard;
use crate::oracle::GraphOracle;
use crate::vertex::VertexId;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetClause {
    pub arity: usize,
    pub guard: Guard,
}

/// A decidable, possibly infinite set of vertices.
///
/// Explicit finite members are stored as point clauses, so finite and
/// symbolic sets share one representation and one algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct VertexSet {
    clauses: BTreeMap<String, SetClause>,
}

impl VertexSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_vertices<'a>(vs: impl IntoIterator<Item = &'a VertexId>) -> Self {
        let mut s = Self::empty();
        for v in vs {
            s.add_clause(&v.sort, v.arity(), Guard::point(&v.index))
                .expect("arity consistent within one sort");
        }
        s
    }

    pub fn single(sort: &str, arity: usize, guard: Guard) -> Self {
        let mut s = Self::empty();
        s.add_clause(sort, arity, guard).expect("fresh set");
        s
    }

    /// ORs `guard` into the clause for `sort`.
    pub fn add_clause(&mut self, sort: &str, arity: usize, guard: Guard) -> Result<()> {
        if guard.is_false() {
            return Ok(());
        }
        match self.clauses.get_mut(sort) {
            Some(c) => {
                if c.arity != arity {
                    return Err(Error::ArityMismatch {
                        sort: sort.to_string(),
                        expected: c.arity,
                        got: arity,
                    });
                }
                c.guard = c.guard.or(&guard);
            }
            None => {
                self.clauses.insert(sort.to_string(), SetClause { arity, guard });
            }
        }
        Ok(())
    }

    pub fn clauses(&self) -> impl Iterator<Item = (&String, &SetClause)> {
        self.clauses.iter()
    }

    pub fn clause(&self, sort: &str) -> Option<&SetClause> {
        self.clauses.get(sort)
    }

    pub fn is_syntactically_empty(&self) -> bool {
        self.clauses.values().all(|c| c.guard.is_false())
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.clauses
            .get(&v.sort)
            .is_some_and(|c| c.arity == v.arity() && c.guard.eval(&v.index))
    }

    pub fn union(&self, other: &VertexSet) -> Result<VertexSet> {
        let mut out = self.clone();
        for (s, c) in &other.clauses {
            out.add_clause(s, c.arity, c.guard.clone())?;
        }
        Ok(out)
    }

    pub fn intersect(&self, other: &VertexSet) -> VertexSet {
        let mut out = VertexSet::empty();
        for (s, c) in &self.clauses {
            if let Some(d) = other.clauses.get(s) {
                if c.arity == d.arity {
                    let _ = out.add_clause(s, c.arity, c.guard.and(&d.guard));
                }
            }
        }
        out
    }

    /// `V(host) \ self`.
    pub fn complement_in(&self, host: &GraphOracle) -> VertexSet {
        let mut out = VertexSet::empty();
        for sd in host.sorts() {
            let g = match self.clauses.get(&sd.name) {
                Some(c) => sd.domain.and(&c.guard.not()),
                None => sd.domain.clone(),
            };
            let _ = out.add_clause(&sd.name, sd.arity, g);
        }
        out
    }

    /// `self ∩ V(host)`, dropping sorts the host does not declare.
    pub fn restrict_to(&self, host: &GraphOracle) -> VertexSet {
        let mut out = VertexSet::empty();
        for (s, c) in &self.clauses {
            if let Some(sd) = host.sort(s) {
                if sd.arity == c.arity {
                    let _ = out.add_clause(s, c.arity, c.guard.and(&sd.domain));
                }
            }
        }
        out
    }

    /// Checks every clause names a host sort with the right arity.
    pub fn check_against(&self, host: &GraphOracle) -> Result<()> {
        for (s, c) in &self.clauses {
            let sd = host.sort(s).ok_or_else(|| Error::UnknownSort(s.clone()))?;
            if sd.arity != c.arity {
                return Err(Error::ArityMismatch {
                    sort: s.clone(),
                    expected: sd.arity,
                    got: c.arity,
                });
            }
        }
        Ok(())
    }

    pub fn members_in<'a>(&self, vs: impl IntoIterator<Item = &'a VertexId>) -> Vec<VertexId> {
        vs.into_iter().filter(|v| self.contains(v)).cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_members() {
        let a = VertexId::new("a", vec![1]);
        let b = VertexId::new("b", vec![2, 3]);
        let s = VertexSet::from_vertices([&a, &b]);
        assert!(s.contains(&a) && s.contains(&b));
        assert!(!s.contains(&VertexId::new("a", vec![2])));
        assert!(!s.contains(&VertexId::new("b", vec![2])));
    }

    #[test]
    fn union_and_intersection() {
        let a1 = VertexId::new("a", vec![1]);
        let a2 = VertexId::new("a", vec![2]);
        let s = VertexSet::from_vertices([&a1]);
        let t = VertexSet::from_vertices([&a2]);
        let u = s.union(&t).unwrap();
        assert!(u.contains(&a1) && u.contains(&a2));
        assert!(s.intersect(&t).is_syntactically_empty());
        assert!(u.intersect(&t).contains(&a2));
    }

    #[test]
    fn arity_conflict_rejected() {
        let mut s = VertexSet::from_vertices([&VertexId::new("a", vec![1])]);
        assert!(s.add_clause("a", 2, Guard::always()).is_err());
    }
}
