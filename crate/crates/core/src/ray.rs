//! Ray construction for connected graphs with empty foundation.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::embedding::{compose_certificates, transport, IsoCertificate};
use crate::error::{Error, Result};
use crate::oracle::GraphOracle;
use crate::vertex::VertexId;
use crate::window::{ball, FiniteWindow};

const BFS_CAP: i64 = 1024;

/// Supplies, for a vertex, a certificate on the host whose removed set
/// contains it.
pub trait CoverOracle {
    fn host(&self) -> &Arc<GraphOracle>;
    fn cover(&self, v: &VertexId) -> Result<IsoCertificate>;
}

/// Covers `v` by the first power `f^{i+1}` of a base certificate with
/// `v ∈ f^i(H)`.
pub struct IterateCover {
    pub base: IsoCertificate,
    pub max_power: usize,
}

impl IterateCover {
    pub fn new(base: IsoCertificate) -> Self {
        IterateCover { base, max_power: 64 }
    }
}

impl CoverOracle for IterateCover {
    fn host(&self) -> &Arc<GraphOracle> {
        &self.base.host
    }

    fn cover(&self, v: &VertexId) -> Result<IsoCertificate> {
        (0..self.max_power)
            .find(|&i| self.base.in_iterate(v, i))
            .map(|i| self.base.power(i + 1))
            .ok_or_else(|| Error::CoverFailed(v.clone()))
    }
}

/// Shortest path from `u` to `v` using only vertices with indices in
/// `[-bound, bound]`. Ties go to the smaller vertex.
pub fn bfs_path(g: &GraphOracle, u: &VertexId, v: &VertexId, bound: i64) -> Result<Vec<VertexId>> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if u.max_abs() > bound || v.max_abs() > bound {
        return Err(Error::PathNotFound(bound));
    }
    let mut parent: BTreeMap<VertexId, Option<VertexId>> = BTreeMap::new();
    parent.insert(u.clone(), None);
    let mut queue = VecDeque::from([u.clone()]);
    while let Some(x) = queue.pop_front() {
        if &x == v {
            let mut path = vec![x];
            while let Some(Some(p)) = parent.get(path.last().expect("nonempty")) {
                path.push(p.clone());
            }
            path.reverse();
            return Ok(path);
        }
        let mut nb = g.neighbors_bounded(&x, bound)?;
        nb.sort();
        for y in nb {
            if !parent.contains_key(&y) {
                parent.insert(y.clone(), Some(x.clone()));
                queue.push_back(y);
            }
        }
    }
    Err(Error::PathNotFound(bound))
}

/// `bfs_path` with the bound doubled on failure, up to a fixed cap.
pub fn bfs_path_growing(g: &GraphOracle, u: &VertexId, v: &VertexId) -> Result<Vec<VertexId>> {
    let mut bound = (u.max_abs().max(v.max_abs()) + 2).max(4);
    loop {
        match bfs_path(g, u, v, bound) {
            Err(Error::PathNotFound(_)) if bound < BFS_CAP => bound = (bound * 2).min(BFS_CAP),
            other => return other,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RayStep {
    pub from: VertexId,
    pub target: VertexId,
    /// The edge leaving the cumulative removed set.
    pub crossing: (VertexId, VertexId),
    pub segment: Vec<VertexId>,
    pub certificate: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RayPrefix {
    pub graph: String,
    pub vertices: Vec<VertexId>,
    pub steps: Vec<RayStep>,
    /// Edges between non-consecutive path vertices.
    pub chords: Vec<(VertexId, VertexId)>,
    #[serde(skip)]
    pub certificates: Vec<IsoCertificate>,
}

impl RayPrefix {
    /// Re-checks consecutive adjacency and distinctness against `g`.
    pub fn verify(&self, g: &GraphOracle) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for v in &self.vertices {
            if !seen.insert(v) {
                return Err(Error::VerificationFailed(format!("{v} repeats on the path")));
            }
        }
        for pair in self.vertices.windows(2) {
            if !g.adjacent(&pair[0], &pair[1])? {
                return Err(Error::VerificationFailed(format!(
                    "{} and {} are not adjacent",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(())
    }

    /// The path highlighted inside the ball of radius 1 around it.
    pub fn to_dot(&self, g: &GraphOracle) -> Result<String> {
        let w: FiniteWindow = ball(g, &self.vertices, 1)?;
        Ok(w.to_dot_highlight(&self.vertices))
    }
}

fn chords(g: &GraphOracle, path: &[VertexId]) -> Vec<(VertexId, VertexId)> {
    let mut out = Vec::new();
    for i in 0..path.len() {
        for j in i + 2..path.len() {
            if g.adjacent_unchecked(&path[i], &path[j]) {
                out.push((path[i].clone(), path[j].clone()));
            }
        }
    }
    out
}

/// Grows a path from `start` for `steps` rounds: at round `i` a path from
/// `v_i` to `f_i(v_i)` is found in `G \ H_{i-1}`, cut at its first vertex
/// outside `H_i`, and `H_{i+1}` absorbs a removable set containing that
/// vertex.
pub fn build_ray(cover: &dyn CoverOracle, start: &VertexId, steps: usize) -> Result<RayPrefix> {
    let g = cover.host().clone();
    g.check_vertex(start)?;
    let mut current = cover.cover(start)?;
    let mut rest_prev: Arc<GraphOracle> = g.clone();
    let mut vertices = vec![start.clone()];
    let mut log = Vec::new();
    let mut certificates = vec![current.clone()];
    let mut v = start.clone();
    for _ in 0..steps {
        let target = current
            .apply(&v)
            .ok_or_else(|| Error::VerificationFailed(format!("`{}` is undefined at {v}", current.name)))?;
        let path = bfs_path_growing(&rest_prev, &v, &target)?;
        let j = path
            .iter()
            .position(|x| !current.removed.contains(x))
            .ok_or_else(|| Error::VerificationFailed("path never leaves the removed set".into()))?;
        let next = path[j].clone();
        let pre = current
            .apply_inverse(&next)
            .ok_or_else(|| Error::CoverFailed(next.clone()))?;
        let extra = transport(&current, &cover.cover(&pre)?)?;
        let segment = path[1..=j].to_vec();
        log.push(RayStep {
            from: v.clone(),
            target,
            crossing: (path[j - 1].clone(), next.clone()),
            segment: segment.clone(),
            certificate: extra.name.clone(),
        });
        vertices.extend(segment);
        rest_prev = Arc::new(g.minus(&current.removed)?);
        current = compose_certificates(&current, &extra)?;
        certificates.push(current.clone());
        v = next;
    }
    let prefix = RayPrefix {
        graph: g.name().to_string(),
        chords: chords(&g, &vertices),
        vertices,
        steps: log,
        certificates,
    };
    prefix.verify(&g)?;
    Ok(prefix)
}
