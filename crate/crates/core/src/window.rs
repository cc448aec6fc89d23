//! Finite induced windows cut out of an oracle.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::GraphOracle;
use crate::vertex::VertexId;
use crate::vertex_set::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Ball,
    IndexBox,
    Subset,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub oracle_id: String,
    pub oracle_name: String,
    pub kind: WindowKind,
    pub roots: Vec<VertexId>,
    pub radius: Option<usize>,
    /// Largest absolute index component that was enumerated.
    pub index_bound: i64,
    /// Set when a vertex of infinite degree was expanded: only its neighbors
    /// inside the index bound are present.
    pub truncated: bool,
}

/// Explicit finite induced subgraph. Vertices are sorted; edges are index
/// pairs `(i, j)` with `i < j`, sorted.
#[derive(Clone, Debug)]
pub struct FiniteWindow {
    provenance: Provenance,
    vertices: Vec<VertexId>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    position: BTreeMap<VertexId, usize>,
}

impl FiniteWindow {
    fn induced(g: &GraphOracle, vertices: BTreeSet<VertexId>, provenance: Provenance) -> Self {
        let vertices: Vec<VertexId> = vertices.into_iter().collect();
        let mut edges = Vec::new();
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                if g.adjacent_unchecked(&vertices[i], &vertices[j]) {
                    edges.push((i, j));
                }
            }
        }
        Self::from_parts(provenance, vertices, edges)
    }

    fn from_parts(provenance: Provenance, vertices: Vec<VertexId>, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); vertices.len()];
        for &(i, j) in &edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let position = vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        FiniteWindow {
            provenance,
            vertices,
            edges,
            adj,
            position,
        }
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn oracle_id(&self) -> &str {
        &self.provenance.oracle_id
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_pairs(&self) -> Vec<(VertexId, VertexId)> {
        self.edges
            .iter()
            .map(|&(i, j)| (self.vertices[i].clone(), self.vertices[j].clone()))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Largest absolute index over the window's vertices.
    pub fn max_abs_index(&self) -> i64 {
        self.vertices.iter().map(|v| v.max_abs()).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn position(&self, v: &VertexId) -> Option<usize> {
        self.position.get(v).copied()
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.position.contains_key(v)
    }

    pub fn neighbors_of(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    /// Induced sub-window on the vertices satisfying `keep`; no oracle queries.
    pub fn restrict(&self, keep: impl Fn(&VertexId) -> bool) -> FiniteWindow {
        let kept: Vec<usize> = (0..self.len()).filter(|&i| keep(&self.vertices[i])).collect();
        let remap: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|(i, j)| Some((*remap.get(i)?, *remap.get(j)?)))
            .collect();
        let mut provenance = self.provenance.clone();
        provenance.kind = WindowKind::Subset;
        Self::from_parts(
            provenance,
            kept.iter().map(|&i| self.vertices[i].clone()).collect(),
            edges,
        )
    }

    pub fn to_dot(&self) -> String {
        self.to_dot_highlight(&[])
    }

    /// DOT rendering; consecutive vertices of `path` are drawn bold.
    pub fn to_dot_highlight(&self, path: &[VertexId]) -> String {
        let on_path: BTreeSet<(usize, usize)> = path
            .windows(2)
            .filter_map(|w| {
                let (a, b) = (self.position(&w[0])?, self.position(&w[1])?);
                Some((a.min(b), a.max(b)))
            })
            .collect();
        let marked: BTreeSet<&VertexId> = path.iter().collect();
        let mut out = String::new();
        let _ = writeln!(out, "graph \"{}\" {{", self.provenance.oracle_name.replace('"', "'"));
        for v in &self.vertices {
            if marked.contains(v) {
                let _ = writeln!(out, "  \"{v}\" [style=filled];");
            } else {
                let _ = writeln!(out, "  \"{v}\";");
            }
        }
        for &(i, j) in &self.edges {
            let style = if on_path.contains(&(i, j)) { " [penwidth=3]" } else { "" };
            let _ = writeln!(out, "  \"{}\" -- \"{}\"{};", self.vertices[i], self.vertices[j], style);
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "provenance": self.provenance,
            "vertices": self.vertices,
            "edges": self.edge_pairs(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("serializable");
        s.push('\n');
        s
    }
}

/// Induced window on all vertices within distance `radius` of `roots`.
///
/// Neighbor enumeration is limited to the oracle's index bound for this
/// radius. Expanding an infinite-degree vertex keeps only the neighbors
/// inside the bound and marks the window truncated; vertices reached that
/// way are clipped to the bound as well. Any other neighbor beyond the bound
/// is an error.
pub fn ball(g: &GraphOracle, roots: &[VertexId], radius: usize) -> Result<FiniteWindow> {
    for r in roots {
        g.check_vertex(r)?;
    }
    let bound = g.index_bound(roots, radius);
    // distance, and whether the vertex was reached through a clipped expansion
    let mut dist: BTreeMap<VertexId, (usize, bool)> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for r in roots {
        if !dist.contains_key(r) {
            dist.insert(r.clone(), (0, false));
            queue.push_back(r.clone());
        }
    }
    let mut truncated = false;
    while let Some(v) = queue.pop_front() {
        let (d, clipped) = dist[&v];
        if d >= radius {
            continue;
        }
        let (next, child_clipped) = match g.neighbors(&v)? {
            Some(all) if all.iter().all(|u| u.max_abs() <= bound) => (all, clipped),
            Some(all) if !clipped => {
                let found = all.iter().filter(|u| u.max_abs() <= bound).count();
                return Err(Error::BoundExceeded {
                    vertex: v.clone(),
                    bound,
                    degree: all.len() as u64,
                    found,
                });
            }
            Some(all) => {
                truncated = true;
                (all.into_iter().filter(|u| u.max_abs() <= bound).collect(), true)
            }
            None => {
                truncated = true;
                (g.neighbors_bounded(&v, bound)?, true)
            }
        };
        for u in next {
            if !dist.contains_key(&u) {
                dist.insert(u.clone(), (d + 1, child_clipped));
                queue.push_back(u);
            }
        }
    }
    let provenance = Provenance {
        oracle_id: g.id().to_string(),
        oracle_name: g.name().to_string(),
        kind: WindowKind::Ball,
        roots: roots.to_vec(),
        radius: Some(radius),
        index_bound: bound,
        truncated,
    };
    Ok(FiniteWindow::induced(g, dist.into_keys().collect(), provenance))
}

/// Induced window on every vertex with all index components in `[lo, hi]`.
pub fn index_box(g: &GraphOracle, lo: i64, hi: i64) -> Result<FiniteWindow> {
    let vs = g.vertices_in_box(lo, hi)?;
    let provenance = Provenance {
        oracle_id: g.id().to_string(),
        oracle_name: g.name().to_string(),
        kind: WindowKind::IndexBox,
        roots: Vec::new(),
        radius: None,
        index_bound: lo.abs().max(hi.abs()),
        truncated: false,
    };
    Ok(FiniteWindow::induced(g, vs.into_iter().collect(), provenance))
}

/// Induced window on an explicit vertex list.
pub fn subset(g: &GraphOracle, vertices: &[VertexId]) -> Result<FiniteWindow> {
    for v in vertices {
        g.check_vertex(v)?;
    }
    let provenance = Provenance {
        oracle_id: g.id().to_string(),
        oracle_name: g.name().to_string(),
        kind: WindowKind::Subset,
        roots: Vec::new(),
        radius: None,
        index_bound: vertices.iter().map(|v| v.max_abs()).max().unwrap_or(0),
        truncated: false,
    };
    Ok(FiniteWindow::induced(g, vertices.iter().cloned().collect(), provenance))
}

/// Window edges with exactly one endpoint in `s`.
pub fn link(g: &GraphOracle, s: &VertexSet, window: &FiniteWindow) -> Result<Vec<(VertexId, VertexId)>> {
    if window.oracle_id() != g.id() {
        return Err(Error::WindowMismatch {
            expected: g.id().to_string(),
            found: window.oracle_id().to_string(),
        });
    }
    s.check_against(g)?;
    Ok(window
        .edge_pairs()
        .into_iter()
        .filter(|(a, b)| s.contains(a) != s.contains(b))
        .collect())
}
