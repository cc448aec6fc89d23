//! Brute-force checks on explicit windows: induced isomorphism, induced
//! embedding and host-degree censuses.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::GraphOracle;
use crate::vertex::{DegreeValue, VertexId};
use crate::window::FiniteWindow;

pub const ISO_LIMIT: usize = 12;
pub const EMBED_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mapping {
    pub pairs: Vec<(VertexId, VertexId)>,
}

impl Mapping {
    pub fn get(&self, v: &VertexId) -> Option<&VertexId> {
        self.pairs.iter().find(|(a, _)| a == v).map(|(_, b)| b)
    }
}

/// Adjacency-matrix view of a window.
struct Dense {
    adj: Vec<Vec<bool>>,
    deg: Vec<usize>,
}

impl Dense {
    fn of(w: &FiniteWindow) -> Self {
        let n = w.len();
        let mut adj = vec![vec![false; n]; n];
        for &(i, j) in w.edges() {
            adj[i][j] = true;
            adj[j][i] = true;
        }
        let deg = (0..n).map(|i| w.neighbors_of(i).len()).collect();
        Dense { adj, deg }
    }
}

struct Search<'a> {
    a: &'a Dense,
    b: &'a Dense,
    exact: bool,
    order: Vec<usize>,
    map: Vec<Option<usize>>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn feasible(&self, u: usize, t: usize) -> bool {
        if self.used[t] {
            return false;
        }
        let (du, dt) = (self.a.deg[u], self.b.deg[t]);
        if if self.exact { du != dt } else { du > dt } {
            return false;
        }
        self.order.iter().all(|&x| match self.map[x] {
            Some(y) => self.a.adj[u][x] == self.b.adj[t][y],
            None => true,
        })
    }

    fn run(&mut self, k: usize) -> bool {
        if k == self.order.len() {
            return true;
        }
        let u = self.order[k];
        if self.map[u].is_some() {
            // seeded: already placed, only consistency matters
            return self.run(k + 1);
        }
        for t in 0..self.b.adj.len() {
            if self.feasible(u, t) {
                self.map[u] = Some(t);
                self.used[t] = true;
                if self.run(k + 1) {
                    return true;
                }
                self.map[u] = None;
                self.used[t] = false;
            }
        }
        false
    }
}

/// Vertex order: seeds first, then greedily by most already-ordered
/// neighbors, ties broken by degree then position.
fn search_order(a: &Dense, seeded: &[usize]) -> Vec<usize> {
    let n = a.adj.len();
    let mut order: Vec<usize> = seeded.to_vec();
    let mut placed = vec![false; n];
    for &s in seeded {
        placed[s] = true;
    }
    while order.len() < n {
        let next = (0..n)
            .filter(|&u| !placed[u])
            .max_by_key(|&u| {
                let links = order.iter().filter(|&&x| a.adj[u][x]).count();
                (links, a.deg[u], std::cmp::Reverse(u))
            })
            .expect("unplaced vertex remains");
        placed[next] = true;
        order.push(next);
    }
    order
}

fn search(w1: &FiniteWindow, w2: &FiniteWindow, exact: bool, seed: &[(VertexId, VertexId)]) -> Option<Mapping> {
    let (a, b) = (Dense::of(w1), Dense::of(w2));
    if exact && (w1.len() != w2.len() || w1.edges().len() != w2.edges().len()) {
        return None;
    }
    if w1.len() > w2.len() {
        return None;
    }
    let mut map = vec![None; w1.len()];
    let mut used = vec![false; w2.len()];
    let mut seeded = Vec::new();
    for (s, t) in seed {
        let (i, j) = (w1.position(s)?, w2.position(t)?);
        if used[j] || map[i].is_some() {
            return None;
        }
        map[i] = Some(j);
        used[j] = true;
        seeded.push(i);
    }
    // seeds must be mutually consistent
    for &x in &seeded {
        for &y in &seeded {
            if a.adj[x][y] != b.adj[map[x]?][map[y]?] {
                return None;
            }
        }
        let (dx, dy) = (a.deg[x], b.deg[map[x]?]);
        if if exact { dx != dy } else { dx > dy } {
            return None;
        }
    }
    let order = search_order(&a, &seeded);
    let mut s = Search {
        a: &a,
        b: &b,
        exact,
        order,
        map,
        used,
    };
    if !s.run(seeded.len()) {
        return None;
    }
    Some(Mapping {
        pairs: (0..w1.len())
            .map(|i| {
                (
                    w1.vertices()[i].clone(),
                    w2.vertices()[s.map[i].expect("complete")].clone(),
                )
            })
            .collect(),
    })
}

/// Isomorphism between two windows, or `None` after exhaustive search.
pub fn induced_isomorphic(w1: &FiniteWindow, w2: &FiniteWindow) -> Result<Option<Mapping>> {
    induced_isomorphic_seeded(w1, w2, &[])
}

/// As [`induced_isomorphic`], with some pairs fixed in advance.
pub fn induced_isomorphic_seeded(
    w1: &FiniteWindow,
    w2: &FiniteWindow,
    seed: &[(VertexId, VertexId)],
) -> Result<Option<Mapping>> {
    if w1.len() > ISO_LIMIT {
        return Err(Error::SizeGuard {
            size: w1.len(),
            limit: ISO_LIMIT,
        });
    }
    Ok(search(w1, w2, true, seed))
}

/// Induced embedding of `w1` into `w2`, or `None` after exhaustive search.
pub fn embed_into(w1: &FiniteWindow, w2: &FiniteWindow) -> Result<Option<Mapping>> {
    embed_into_seeded(w1, w2, &[])
}

pub fn embed_into_seeded(
    w1: &FiniteWindow,
    w2: &FiniteWindow,
    seed: &[(VertexId, VertexId)],
) -> Result<Option<Mapping>> {
    if w1.len() > EMBED_LIMIT {
        return Err(Error::SizeGuard {
            size: w1.len(),
            limit: EMBED_LIMIT,
        });
    }
    Ok(search(w1, w2, false, seed))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusProfile {
    pub k: u64,
    /// Finite degree `d <= k` to number of window vertices with that degree.
    pub counts: BTreeMap<u64, usize>,
    pub infinite: usize,
    pub window_size: usize,
    /// Window vertices of finite degree at most `k`.
    pub low_degree: Vec<VertexId>,
    pub validity_bound: Option<i64>,
}

/// Degrees are taken from `host`, so truncation at the window boundary does
/// not change them.
pub fn degree_census(w: &FiniteWindow, host: &GraphOracle, k: u64) -> Result<CensusProfile> {
    if w.oracle_id() != host.id() {
        return Err(Error::WindowMismatch {
            expected: host.id().to_string(),
            found: w.oracle_id().to_string(),
        });
    }
    let mut counts = BTreeMap::new();
    let mut infinite = 0;
    let mut low_degree = Vec::new();
    for v in w.vertices() {
        match host.degree(v)? {
            DegreeValue::Infinite => infinite += 1,
            DegreeValue::Finite(d) if d <= k => {
                *counts.entry(d).or_insert(0) += 1;
                low_degree.push(v.clone());
            }
            DegreeValue::Finite(_) => {}
        }
    }
    Ok(CensusProfile {
        k,
        counts,
        infinite,
        window_size: w.len(),
        low_degree,
        validity_bound: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::graph_or_panic;
    use crate::window::{ball, subset};

    fn grid() -> GraphOracle {
        graph_or_panic(
            "graph grid\nsort v arity 2 where x1 >= 0 and x2 >= 0\nedge v(m, n) ~ v(p, q) when |m - p| + |n - q| = 1\n",
        )
    }

    fn gv(m: i64, n: i64) -> VertexId {
        VertexId::new("v", vec![m, n])
    }

    #[test]
    fn corner_vs_interior() {
        let g = grid();
        let a = ball(&g, &[gv(0, 0)], 1).unwrap();
        let b = ball(&g, &[gv(3, 3)], 1).unwrap();
        assert_eq!((a.len(), b.len()), (3, 5));
        assert!(induced_isomorphic(&a, &b).unwrap().is_none());
        let m = induced_isomorphic(&a, &a).unwrap().unwrap();
        assert_eq!(m.pairs.len(), 3);
        assert!(embed_into(&a, &b).unwrap().is_some());
    }

    #[test]
    fn path_embeds_triangle_does_not() {
        let g = grid();
        let p3 = subset(&g, &[gv(0, 0), gv(0, 1), gv(0, 2)]).unwrap();
        let b = ball(&g, &[gv(2, 2)], 2).unwrap();
        assert!(embed_into(&p3, &b).unwrap().is_some());
        let k = graph_or_panic("graph k\nsort v arity 1 where 0 <= x1 <= 2\nedge v(a) ~ v(b) when a != b\n");
        let tri = crate::window::index_box(&k, 0, 2).unwrap();
        assert!(embed_into(&tri, &b).unwrap().is_none());
    }

    #[test]
    fn seeds_are_respected() {
        let g = grid();
        let a = subset(&g, &[gv(0, 0), gv(0, 1)]).unwrap();
        let b = subset(&g, &[gv(5, 5), gv(5, 6)]).unwrap();
        let m = induced_isomorphic_seeded(&a, &b, &[(gv(0, 0), gv(5, 6))])
            .unwrap()
            .unwrap();
        assert_eq!(m.get(&gv(0, 1)), Some(&gv(5, 5)));
    }

    #[test]
    fn size_guard() {
        let g = grid();
        let big = ball(&g, &[gv(3, 3)], 3).unwrap();
        assert!(matches!(induced_isomorphic(&big, &big), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn census_uses_host_degrees() {
        let g = grid();
        let w = ball(&g, &[gv(0, 0)], 1).unwrap();
        let c = degree_census(&w, &g, 2).unwrap();
        // (0,0) has degree 2; (1,0) and (0,1) have 3 in the host
        assert_eq!(c.counts.get(&2), Some(&1));
        assert_eq!(c.low_degree, vec![gv(0, 0)]);
    }
}
