//! Removal certificates: an isomorphism `G -> G \ H` with its inverse, and the
//! algebra that builds new certificates from old ones.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite::embed_into;
use crate::map::PiecewiseMap;
use crate::oracle::GraphOracle;
use crate::vertex::VertexId;
use crate::vertex_set::VertexSet;
use crate::window::{ball, subset, FiniteWindow};

#[derive(Clone, Debug)]
pub struct IsoCertificate {
    pub name: String,
    pub host: Arc<GraphOracle>,
    pub removed: VertexSet,
    pub forward: PiecewiseMap,
    pub inverse: PiecewiseMap,
}

impl IsoCertificate {
    pub fn apply(&self, v: &VertexId) -> Option<VertexId> {
        self.forward.apply(v)
    }

    pub fn apply_inverse(&self, v: &VertexId) -> Option<VertexId> {
        self.inverse.apply(v)
    }

    /// `f(s)`, computed as the inverse-preimage of `s` inside `V \ H`.
    pub fn image_set(&self, s: &VertexSet) -> VertexSet {
        self.inverse
            .preimage(s)
            .intersect(&self.removed.complement_in(&self.host))
    }

    /// Pointwise test for `v ∈ f^i(H)`.
    pub fn in_iterate(&self, v: &VertexId, i: usize) -> bool {
        let mut cur = v.clone();
        for _ in 0..i {
            if self.removed.contains(&cur) || !self.host.is_vertex(&cur) {
                return false;
            }
            match self.inverse.apply(&cur) {
                Some(u) => cur = u,
                None => return false,
            }
        }
        self.removed.contains(&cur)
    }

    /// Same maps and removed set on another host.
    pub fn with_host(&self, host: Arc<GraphOracle>) -> IsoCertificate {
        IsoCertificate { host, ..self.clone() }
    }

    pub fn renamed(&self, name: impl Into<String>) -> IsoCertificate {
        IsoCertificate {
            name: name.into(),
            ..self.clone()
        }
    }

    /// `f^k`, removing `H ∪ f(H) ∪ … ∪ f^{k-1}(H)`.
    pub fn power(&self, k: usize) -> IsoCertificate {
        assert!(k >= 1, "power needs k >= 1");
        let mut removed = self.removed.clone();
        let mut layer = self.removed.clone();
        let mut forward = self.forward.clone();
        let mut inverse = self.inverse.clone();
        for _ in 1..k {
            layer = self.image_set(&layer);
            removed = removed.union(&layer).expect("same host sorts");
            forward = PiecewiseMap::compose(&forward, &self.forward);
            inverse = PiecewiseMap::compose(&inverse, &self.inverse);
        }
        IsoCertificate {
            name: if k == 1 {
                self.name.clone()
            } else {
                format!("{}^{k}", self.name)
            },
            host: self.host.clone(),
            removed,
            forward,
            inverse,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub kind: String,
    pub vertices: Vec<VertexId>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub certificate: String,
    pub host: String,
    pub radius: Option<usize>,
    /// Maps are evaluated against the oracle, not the window, so images
    /// outside the window are still checked; this equals `radius`.
    pub certified_radius: Option<usize>,
    pub window_vertices: usize,
    pub vertices_tested: usize,
    pub pairs_tested: usize,
    /// Largest index displacement of the forward map on the window.
    pub displacement_bound: i64,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
}

fn displacement(v: &VertexId, w: &VertexId) -> i64 {
    if v.arity() == w.arity() {
        v.index
            .iter()
            .zip(&w.index)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or(0)
    } else {
        v.max_abs().max(w.max_abs())
    }
}

/// Checks every certificate condition on the vertices and pairs of `w`.
pub fn verify_on_window(c: &IsoCertificate, w: &FiniteWindow) -> Result<VerificationReport> {
    let g = &c.host;
    if w.oracle_id() != g.id() {
        return Err(Error::WindowMismatch {
            expected: g.id().to_string(),
            found: w.oracle_id().to_string(),
        });
    }
    let mut report = VerificationReport {
        certificate: c.name.clone(),
        host: g.name().to_string(),
        radius: w.provenance().radius,
        certified_radius: w.provenance().radius,
        window_vertices: w.len(),
        vertices_tested: 0,
        pairs_tested: 0,
        displacement_bound: 0,
        passed: false,
        counterexample: None,
    };
    let fail = |mut r: VerificationReport, kind: &str, vs: Vec<VertexId>, detail: String| {
        r.counterexample = Some(Counterexample {
            kind: kind.to_string(),
            vertices: vs,
            detail,
        });
        r.certified_radius = None;
        Ok(r)
    };
    let mut images = Vec::with_capacity(w.len());
    let mut seen: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut meets_removed = false;
    for v in w.vertices() {
        report.vertices_tested += 1;
        meets_removed |= c.removed.contains(v);
        match c.forward.matching_branches(v) {
            0 => {
                return fail(
                    report,
                    "forward_not_total",
                    vec![v.clone()],
                    "no forward branch matches".into(),
                )
            }
            _ if c.forward.conflicting_branches(v) > 0 => {
                return fail(
                    report,
                    "forward_ambiguous",
                    vec![v.clone()],
                    "matching branches disagree".into(),
                )
            }
            _ => {}
        }
        let Some(fv) = c.forward.apply(v) else {
            return fail(
                report,
                "forward_overflow",
                vec![v.clone()],
                "image index overflows".into(),
            );
        };
        if !g.is_vertex(&fv) {
            return fail(
                report,
                "image_not_vertex",
                vec![v.clone(), fv],
                "image is not a host vertex".into(),
            );
        }
        if c.removed.contains(&fv) {
            return fail(
                report,
                "image_meets_removed",
                vec![v.clone(), fv],
                "image lies in the removed set".into(),
            );
        }
        if c.inverse.apply(&fv).as_ref() != Some(v) {
            return fail(
                report,
                "inverse_after_forward",
                vec![v.clone(), fv],
                "inverse(forward(v)) != v".into(),
            );
        }
        if let Some(prev) = seen.insert(fv.clone(), v.clone()) {
            return fail(
                report,
                "not_injective",
                vec![prev, v.clone(), fv],
                "two vertices share an image".into(),
            );
        }
        if !c.removed.contains(v) {
            match c.inverse.apply(v) {
                Some(u) if g.is_vertex(&u) && c.forward.apply(&u).as_ref() == Some(v) => {}
                other => {
                    let mut vs = vec![v.clone()];
                    vs.extend(other);
                    return fail(report, "forward_after_inverse", vs, "forward(inverse(v)) != v".into());
                }
            }
        }
        report.displacement_bound = report.displacement_bound.max(displacement(v, &fv));
        images.push(fv);
    }
    if !meets_removed {
        return fail(
            report,
            "removed_not_in_window",
            Vec::new(),
            "window contains no removed vertex".into(),
        );
    }
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            report.pairs_tested += 1;
            let before = w.has_edge(i, j);
            let after = g.adjacent_unchecked(&images[i], &images[j]);
            if before != after {
                let vs = vec![
                    w.vertices()[i].clone(),
                    w.vertices()[j].clone(),
                    images[i].clone(),
                    images[j].clone(),
                ];
                return fail(
                    report,
                    "adjacency",
                    vs,
                    format!("adjacent before: {before}, after: {after}"),
                );
            }
        }
    }
    report.passed = true;
    Ok(report)
}

/// Verifies `c` on the ball of the given radius around `roots`.
pub fn verify_certificate(c: &IsoCertificate, radius: usize, roots: &[VertexId]) -> Result<VerificationReport> {
    let w = ball(&c.host, roots, radius)?;
    verify_on_window(c, &w)
}

/// Certificate for `P ∪ Q` on `G` from one for `P` on `G` and one for `Q` on
/// `G \ P`.
pub fn compose_certificates(cp: &IsoCertificate, cq: &IsoCertificate) -> Result<IsoCertificate> {
    let expected = cp.host.minus(&cp.removed)?;
    if cq.host.id() != expected.id() {
        return Err(Error::HostMismatch(format!(
            "`{}` is not hosted on the graph left by removing `{}`",
            cq.name, cp.name
        )));
    }
    Ok(IsoCertificate {
        name: format!("{}+{}", cp.name, cq.name),
        host: cp.host.clone(),
        removed: cp.removed.union(&cq.removed)?,
        forward: PiecewiseMap::compose(&cp.forward, &cq.forward),
        inverse: PiecewiseMap::compose(&cq.inverse, &cp.inverse),
    })
}

/// Moves `target` across `c`: a certificate on `G \ H_c` removing `f(T)`,
/// with map `f ∘ t ∘ f⁻¹`.
pub fn transport(c: &IsoCertificate, target: &IsoCertificate) -> Result<IsoCertificate> {
    if c.host.id() != target.host.id() {
        return Err(Error::HostMismatch(format!(
            "`{}` and `{}` live on different hosts",
            c.name, target.name
        )));
    }
    let host = Arc::new(c.host.minus(&c.removed)?);
    let conj = |m: &PiecewiseMap| PiecewiseMap::compose(&PiecewiseMap::compose(&c.inverse, m), &c.forward);
    Ok(IsoCertificate {
        name: format!("{}@{}", target.name, c.name),
        removed: c.image_set(&target.removed).restrict_to(&host),
        forward: conj(&target.forward),
        inverse: conj(&target.inverse),
        host,
    })
}

/// One of the disjoint copies `f^i(H)`.
#[derive(Clone, Debug)]
pub struct Copy {
    pub set: VertexSet,
    pub members_in_window: Vec<VertexId>,
}

/// `H, f(H), …, f^{k-1}(H)`, checked pairwise disjoint on the window, with
/// each copy's window part embedding into the next one's image.
pub fn iterate_copies(c: &IsoCertificate, k: usize, window: &FiniteWindow) -> Result<Vec<Copy>> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let report = verify_on_window(c, window)?;
    if !report.passed {
        let ce = report.counterexample.expect("failed reports carry a counterexample");
        return Err(Error::VerificationFailed(format!("{}: {}", ce.kind, ce.detail)));
    }
    let mut out: Vec<Copy> = Vec::with_capacity(k);
    let mut set = c.removed.restrict_to(&c.host);
    for i in 0..k {
        if i > 0 {
            set = c.image_set(&set);
        }
        let members: Vec<VertexId> = window
            .vertices()
            .iter()
            .filter(|v| c.in_iterate(v, i))
            .cloned()
            .collect();
        for v in &members {
            if !set.contains(v) {
                return Err(Error::VerificationFailed(format!(
                    "symbolic and pointwise images disagree at {v}"
                )));
            }
        }
        out.push(Copy {
            set: set.clone(),
            members_in_window: members,
        });
    }
    let mut owner: BTreeMap<&VertexId, usize> = BTreeMap::new();
    for (i, cp) in out.iter().enumerate() {
        for v in &cp.members_in_window {
            if let Some(j) = owner.insert(v, i) {
                return Err(Error::VerificationFailed(format!("copies {j} and {i} share {v}")));
            }
        }
    }
    for cp in &out {
        check_copy_embedding(c, &cp.members_in_window)?;
    }
    Ok(out)
}

/// Embeds the induced graph on (up to ten of) `members` into the induced
/// graph on their images, via the brute-force oracle.
fn check_copy_embedding(c: &IsoCertificate, members: &[VertexId]) -> Result<()> {
    let part: Vec<VertexId> = members.iter().take(crate::finite::EMBED_LIMIT).cloned().collect();
    if part.is_empty() {
        return Ok(());
    }
    let images: Vec<VertexId> = part
        .iter()
        .map(|v| {
            c.apply(v)
                .ok_or_else(|| Error::VerificationFailed(format!("no image for {v}")))
        })
        .collect::<Result<_>>()?;
    let a = subset(&c.host, &part)?;
    let b = subset(&c.host, &images)?;
    match embed_into(&a, &b)? {
        Some(_) => Ok(()),
        None => Err(Error::VerificationFailed(format!(
            "copy starting at {} does not embed into its image",
            part[0]
        ))),
    }
}

/// The same certificate read on the complement graph.
pub fn complement_transfer(c: &IsoCertificate) -> IsoCertificate {
    IsoCertificate {
        name: format!("{}^c", c.name),
        ..c.with_host(Arc::new(c.host.complement()))
    }
}

/// Lift to `G □ h`: removes `H × V(h)`, acting on the first coordinate.
pub fn product_lift(c: &IsoCertificate, h: &GraphOracle) -> IsoCertificate {
    let host = Arc::new(c.host.cartesian_product(h));
    let mut removed = VertexSet::empty();
    for (s, clause) in c.removed.clauses() {
        for t in h.sorts() {
            let a = clause.arity;
            let g = clause.guard.and(&t.domain.rename(move |v| v + a));
            removed
                .add_clause(&GraphOracle::product_sort(s, &t.name), a + t.arity, g)
                .expect("fresh product sorts");
        }
    }
    IsoCertificate {
        name: format!("{}x{}", c.name, h.name()),
        host,
        removed,
        forward: c.forward.lift_product(h),
        inverse: c.inverse.lift_product(h),
    }
}

#[derive(Clone, Debug)]
pub enum IsoUnionOutcome {
    Certificate(IsoCertificate),
    /// `f_P` does not fix `Q` setwise; the vertex is moved into or out of `Q`.
    NotApplicable {
        moved: VertexId,
    },
}

/// Certificate for `P ∪ Q` when `f_P(Q) = Q` on the window.
pub fn iso_union(cp: &IsoCertificate, cq: &IsoCertificate, window: &FiniteWindow) -> Result<IsoUnionOutcome> {
    if cp.host.id() != cq.host.id() {
        return Err(Error::HostMismatch(format!(
            "`{}` and `{}` live on different hosts",
            cp.name, cq.name
        )));
    }
    if let Some(v) = window
        .vertices()
        .iter()
        .find(|v| cp.removed.contains(v) && cq.removed.contains(v))
    {
        return Err(Error::Overlap(v.clone()));
    }
    for v in window.vertices() {
        let Some(fv) = cp.apply(v) else { continue };
        if cq.removed.contains(v) != cq.removed.contains(&fv) {
            return Ok(IsoUnionOutcome::NotApplicable { moved: v.clone() });
        }
    }
    let moved = transport(cp, cq)?;
    Ok(IsoUnionOutcome::Certificate(compose_certificates(cp, &moved)?))
}

/// Declared removable subgraphs of one host.
#[derive(Clone, Debug)]
pub struct RemovableFamily {
    pub host: Arc<GraphOracle>,
    pub members: Vec<IsoCertificate>,
    /// Asserted: the members' closure is all of `V \ Fnd`.
    pub foundation_complete: bool,
    pub completeness_depth: CompletenessDepth,
    pub note: String,
}

/// Depth needed for exactness on a window whose largest index is `m`:
/// `base + per_radius * m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct CompletenessDepth {
    pub base: usize,
    pub per_radius: usize,
}

impl CompletenessDepth {
    pub fn at(&self, m: usize) -> usize {
        self.base + self.per_radius * m
    }
}

impl RemovableFamily {
    pub fn new(host: Arc<GraphOracle>, members: Vec<IsoCertificate>) -> Result<Self> {
        for m in &members {
            if m.host.id() != host.id() {
                return Err(Error::HostMismatch(format!("`{}` is not on `{}`", m.name, host.name())));
            }
        }
        Ok(RemovableFamily {
            host,
            members,
            foundation_complete: false,
            // index m first appears in f^m(H), which needs m + 1 iterates
            completeness_depth: CompletenessDepth { base: 1, per_radius: 1 },
            note: String::new(),
        })
    }

    pub fn asserting_complete(mut self, depth: CompletenessDepth, note: impl Into<String>) -> Self {
        self.foundation_complete = true;
        self.completeness_depth = depth;
        self.note = note.into();
        self
    }

    /// Every member moved across `c`: a family on `G \ H_c`.
    pub fn transported(&self, c: &IsoCertificate) -> Result<RemovableFamily> {
        let members = self
            .members
            .iter()
            .map(|m| transport(c, m))
            .collect::<Result<Vec<_>>>()?;
        let host = match members.first() {
            Some(m) => m.host.clone(),
            None => Arc::new(self.host.minus(&c.removed)?),
        };
        Ok(RemovableFamily {
            host,
            members,
            ..self.clone()
        })
    }
}

/// Vertices of `w` lying in removed sets of both certificates.
pub fn overlap_on(w: &FiniteWindow, a: &IsoCertificate, b: &IsoCertificate) -> BTreeSet<VertexId> {
    w.vertices()
        .iter()
        .filter(|v| a.removed.contains(v) && b.removed.contains(v))
        .cloned()
        .collect()
}
