//! Structural invariants relative to a declared family of removable
//! subgraphs: covered closure, foundation, torsion, curl, φ-closure,
//! coverings, plus instance checks and census obstructions.
//!
//! Membership tests are pointwise: `v ∈ f^i(H)` is decided by walking the
//! inverse map, so results do not depend on which other vertices happen to
//! be in the window.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::embedding::{transport, verify_on_window, IsoCertificate, RemovableFamily};
use crate::error::{Error, Result};
use crate::finite::{degree_census, induced_isomorphic, CensusProfile};
use crate::oracle::GraphOracle;
use crate::vertex::{DegreeValue, VertexId};
use crate::window::{subset, FiniteWindow};

fn same_oracle(g: &GraphOracle, w: &FiniteWindow) -> Result<()> {
    if w.oracle_id() == g.id() {
        Ok(())
    } else {
        Err(Error::WindowMismatch {
            expected: g.id().to_string(),
            found: w.oracle_id().to_string(),
        })
    }
}

/// Pointwise closure test for one family at a fixed depth.
struct Closure<'a> {
    fam: &'a RemovableFamily,
    depth: usize,
}

impl Closure<'_> {
    fn covered(&self, v: &VertexId) -> bool {
        self.fam
            .members
            .iter()
            .any(|c| (0..self.depth).any(|i| c.in_iterate(v, i)))
    }

    fn foundation(&self, v: &VertexId) -> bool {
        self.fam.host.is_vertex(v) && !self.covered(v)
    }

    /// `v ∈ f(Fnd) \ Fnd`: the image formula for torsion.
    fn twisted(&self, c: &IsoCertificate, v: &VertexId) -> bool {
        if !self.fam.host.is_vertex(v) || c.removed.contains(v) || self.foundation(v) {
            return false;
        }
        c.apply_inverse(v).is_some_and(|u| self.foundation(&u))
    }
}

/// Union of `f^i(H)` over family members and `i < depth`, within the window.
pub fn covered_closure(fam: &RemovableFamily, depth: usize, w: &FiniteWindow) -> Result<BTreeSet<VertexId>> {
    same_oracle(&fam.host, w)?;
    let cl = Closure { fam, depth };
    Ok(w.vertices().iter().filter(|v| cl.covered(v)).cloned().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoundationReport {
    pub window_size: usize,
    pub covered: Vec<VertexId>,
    pub foundation_rel: Vec<VertexId>,
    pub depth: usize,
    pub required_depth: usize,
    pub exact: bool,
}

fn required_depth(fam: &RemovableFamily, w: &FiniteWindow) -> usize {
    fam.completeness_depth.at(w.max_abs_index() as usize)
}

fn is_exact(fam: &RemovableFamily, depth: usize, w: &FiniteWindow) -> bool {
    fam.foundation_complete && depth >= required_depth(fam, w)
}

pub fn relative_foundation(fam: &RemovableFamily, depth: usize, w: &FiniteWindow) -> Result<FoundationReport> {
    same_oracle(&fam.host, w)?;
    let cl = Closure { fam, depth };
    let (covered, foundation_rel): (Vec<VertexId>, Vec<VertexId>) =
        w.vertices().iter().cloned().partition(|v| cl.covered(v));
    Ok(FoundationReport {
        window_size: w.len(),
        covered,
        foundation_rel,
        depth,
        required_depth: required_depth(fam, w),
        exact: is_exact(fam, depth, w),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionReport {
    pub certificate: String,
    pub torsion_rel: Vec<VertexId>,
    pub window_size: usize,
    pub depth: usize,
    pub exact: bool,
    /// Recomputation from the definition: covered in `G` and in the
    /// foundation of `G \ H` under the transported family.
    pub definition_agrees: bool,
}

fn torsion_points(fam: &RemovableFamily, c: &IsoCertificate, depth: usize, vs: &[VertexId]) -> Vec<VertexId> {
    let cl = Closure { fam, depth };
    vs.iter().filter(|v| cl.twisted(c, v)).cloned().collect()
}

/// Torsion by the definition, for cross-checking.
fn torsion_by_definition(
    fam: &RemovableFamily,
    c: &IsoCertificate,
    depth: usize,
    vs: &[VertexId],
) -> Result<Vec<VertexId>> {
    let moved = fam.transported(c)?;
    let inner = Closure { fam: &moved, depth };
    let outer = Closure { fam, depth };
    Ok(vs
        .iter()
        .filter(|v| outer.covered(v) && inner.foundation(v))
        .cloned()
        .collect())
}

pub fn torsion(fam: &RemovableFamily, c: &IsoCertificate, depth: usize, w: &FiniteWindow) -> Result<TorsionReport> {
    same_oracle(&fam.host, w)?;
    if c.host.id() != fam.host.id() {
        return Err(Error::HostMismatch(format!("`{}` is not on the family host", c.name)));
    }
    let t = torsion_points(fam, c, depth, w.vertices());
    let d = torsion_by_definition(fam, c, depth, w.vertices())?;
    Ok(TorsionReport {
        certificate: c.name.clone(),
        definition_agrees: t == d,
        torsion_rel: t,
        window_size: w.len(),
        depth,
        exact: is_exact(fam, depth, w),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub outcome: Outcome,
    pub witness: Vec<VertexId>,
    pub detail: String,
}

impl CheckReport {
    fn new(check: &str, outcome: Outcome, witness: Vec<VertexId>, detail: impl Into<String>) -> Self {
        CheckReport {
            check: check.to_string(),
            outcome,
            witness,
            detail: detail.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.outcome != Outcome::Fail
    }
}

/// Every relative-foundation vertex of `G` stays in the relative foundation
/// of `G \ H` (family transported across `c`).
pub fn foundation_monotonicity_check(
    fam: &RemovableFamily,
    c: &IsoCertificate,
    depth: usize,
    w: &FiniteWindow,
) -> Result<CheckReport> {
    same_oracle(&fam.host, w)?;
    let moved = fam.transported(c)?;
    let outer = Closure { fam, depth };
    let inner = Closure { fam: &moved, depth };
    let fnd: Vec<&VertexId> = w.vertices().iter().filter(|v| outer.foundation(v)).collect();
    if fnd.is_empty() {
        return Ok(CheckReport::new(
            "foundation_monotonicity",
            Outcome::Vacuous,
            Vec::new(),
            "empty foundation",
        ));
    }
    for v in &fnd {
        if !inner.foundation(v) {
            return Ok(CheckReport::new(
                "foundation_monotonicity",
                Outcome::Fail,
                vec![(*v).clone()],
                "foundation vertex of G is not in the foundation of G \\ H",
            ));
        }
    }
    Ok(CheckReport::new(
        "foundation_monotonicity",
        Outcome::Pass,
        Vec::new(),
        format!("{} foundation vertices checked", fnd.len()),
    ))
}

fn contained_on(w: &FiniteWindow, small: &IsoCertificate, big: &IsoCertificate) -> Option<VertexId> {
    w.vertices()
        .iter()
        .find(|v| small.removed.contains(v) && !big.removed.contains(v))
        .cloned()
}

/// `P ⊆ Q` implies `Tor(P) ⊆ Tor(Q)`.
pub fn torsion_monotonicity_check(
    fam: &RemovableFamily,
    cp: &IsoCertificate,
    cq: &IsoCertificate,
    depth: usize,
    w: &FiniteWindow,
) -> Result<CheckReport> {
    same_oracle(&fam.host, w)?;
    if let Some(v) = contained_on(w, cp, cq) {
        return Err(Error::Precondition(format!(
            "{v} is removed by `{}` but not by `{}`",
            cp.name, cq.name
        )));
    }
    let tp = torsion_points(fam, cp, depth, w.vertices());
    let tq: BTreeSet<VertexId> = torsion_points(fam, cq, depth, w.vertices()).into_iter().collect();
    match tp.iter().find(|v| !tq.contains(v)) {
        Some(v) => Ok(CheckReport::new(
            "torsion_monotonicity",
            Outcome::Fail,
            vec![v.clone()],
            "in Tor(P) but not in Tor(Q)",
        )),
        None => Ok(CheckReport::new(
            "torsion_monotonicity",
            Outcome::Pass,
            tp,
            format!("|Tor(Q)| = {}", tq.len()),
        )),
    }
}

/// `Q ∩ Tor(P) ≠ ∅` implies `P ∩ Tor(Q) ≠ ∅`.
pub fn torsion_symmetry_check(
    fam: &RemovableFamily,
    cp: &IsoCertificate,
    cq: &IsoCertificate,
    depth: usize,
    w: &FiniteWindow,
) -> Result<CheckReport> {
    same_oracle(&fam.host, w)?;
    let q_in_tp: Vec<VertexId> = torsion_points(fam, cp, depth, w.vertices())
        .into_iter()
        .filter(|v| cq.removed.contains(v))
        .collect();
    if q_in_tp.is_empty() {
        return Ok(CheckReport::new(
            "torsion_symmetry",
            Outcome::Vacuous,
            Vec::new(),
            "Q ∩ Tor(P) is empty",
        ));
    }
    let p_in_tq: Vec<VertexId> = torsion_points(fam, cq, depth, w.vertices())
        .into_iter()
        .filter(|v| cp.removed.contains(v))
        .collect();
    if p_in_tq.is_empty() {
        Ok(CheckReport::new(
            "torsion_symmetry",
            Outcome::Fail,
            q_in_tp,
            "P ∩ Tor(Q) is empty",
        ))
    } else {
        Ok(CheckReport::new(
            "torsion_symmetry",
            Outcome::Pass,
            p_in_tq,
            "P ∩ Tor(Q) is nonempty",
        ))
    }
}

/// A nonempty torsion is matched by a removable subgraph of the foundation
/// graph isomorphic to it. `foundation_cert` lives on the induced foundation
/// oracle; `fw` is a window of that oracle.
pub fn torsion_foundation_theorem_check(
    fam: &RemovableFamily,
    c: &IsoCertificate,
    foundation_cert: &IsoCertificate,
    depth: usize,
    w: &FiniteWindow,
    fw: &FiniteWindow,
) -> Result<CheckReport> {
    const NAME: &str = "torsion_foundation";
    same_oracle(&fam.host, w)?;
    same_oracle(&foundation_cert.host, fw)?;
    let tor = torsion_points(fam, c, depth, w.vertices());
    if tor.is_empty() {
        return Ok(CheckReport::new(NAME, Outcome::Vacuous, Vec::new(), "torsion is empty"));
    }
    let cl = Closure { fam, depth };
    let f = &foundation_cert.host;
    if let Some(v) = w.vertices().iter().find(|v| f.is_vertex(v) != cl.foundation(v)) {
        return Ok(CheckReport::new(
            NAME,
            Outcome::Fail,
            vec![v.clone()],
            "foundation oracle disagrees with the relative foundation",
        ));
    }
    let report = verify_on_window(foundation_cert, fw)?;
    if !report.passed {
        let ce = report.counterexample.expect("failed reports carry a counterexample");
        return Ok(CheckReport::new(
            NAME,
            Outcome::Fail,
            ce.vertices,
            format!("foundation certificate: {}", ce.detail),
        ));
    }
    let removed: Vec<VertexId> = fw
        .vertices()
        .iter()
        .filter(|v| foundation_cert.removed.contains(v))
        .cloned()
        .collect();
    let a = subset(&fam.host, &tor)?;
    let b = subset(f, &removed)?;
    match induced_isomorphic(&a, &b)? {
        Some(m) => Ok(CheckReport::new(
            NAME,
            Outcome::Pass,
            m.pairs.into_iter().flat_map(|(x, y)| [x, y]).collect(),
            "torsion is isomorphic to a removable subgraph of the foundation",
        )),
        None => Ok(CheckReport::new(
            NAME,
            Outcome::Fail,
            tor,
            "torsion and the foundation certificate's removed set are not isomorphic",
        )),
    }
}

/// A self-contained `Q ⊇ P` in which `P` is removable.
#[derive(Clone, Debug)]
pub struct CurlWitness {
    /// Certificate on `G` removing `Q`.
    pub cq: IsoCertificate,
    /// Family on the induced graph `G[Q]`.
    pub inner: RemovableFamily,
    /// `P`'s certificate on `G[Q]`.
    pub cp_in_q: IsoCertificate,
}

/// Union of `Tor_Q(P)` over the witnesses, computed inside each `G[Q]`.
pub fn curl(
    cp: &IsoCertificate,
    witnesses: &[CurlWitness],
    depth: usize,
    w: &FiniteWindow,
) -> Result<BTreeSet<VertexId>> {
    same_oracle(&cp.host, w)?;
    let mut out = BTreeSet::new();
    for wit in witnesses {
        if let Some(v) = contained_on(w, cp, &wit.cq) {
            return Err(Error::Precondition(format!(
                "{v} is removed by `{}` but lies outside `{}`",
                cp.name, wit.cq.name
            )));
        }
        if wit.inner.host.id() != wit.cp_in_q.host.id() {
            return Err(Error::HostMismatch(
                "inner family and certificate differ in host".into(),
            ));
        }
        let inside: Vec<VertexId> = w
            .vertices()
            .iter()
            .filter(|v| wit.inner.host.is_vertex(v))
            .cloned()
            .collect();
        out.extend(torsion_points(&wit.inner, &wit.cp_in_q, depth, &inside));
    }
    Ok(out)
}

/// `⋃_f ⋃_{i<depth} f^i(H ∪ Tor(H))` over certificates sharing `H`.
pub fn phi_closure(
    certs: &[IsoCertificate],
    fam: &RemovableFamily,
    depth: usize,
    w: &FiniteWindow,
) -> Result<BTreeSet<VertexId>> {
    same_oracle(&fam.host, w)?;
    let Some(first) = certs.first() else {
        return Ok(BTreeSet::new());
    };
    for c in &certs[1..] {
        if let Some(v) = w
            .vertices()
            .iter()
            .find(|v| c.removed.contains(v) != first.removed.contains(v))
        {
            return Err(Error::Precondition(format!(
                "`{}` and `{}` remove different sets (at {v})",
                first.name, c.name
            )));
        }
    }
    let cl = Closure { fam, depth };
    let mut out = BTreeSet::new();
    for v in w.vertices() {
        'certs: for c in certs {
            let mut cur = v.clone();
            for _ in 0..depth {
                if c.removed.contains(&cur) || cl.twisted(c, &cur) {
                    out.insert(v.clone());
                    break 'certs;
                }
                if !fam.host.is_vertex(&cur) {
                    break;
                }
                match c.apply_inverse(&cur) {
                    Some(u) => cur = u,
                    None => break,
                }
            }
        }
    }
    Ok(out)
}

/// Foundation plus the φ-closures of the classes exhaust the window.
pub fn covering_check(
    classes: &[Vec<IsoCertificate>],
    fam_all: &RemovableFamily,
    depth: usize,
    w: &FiniteWindow,
) -> Result<CheckReport> {
    let fnd: BTreeSet<VertexId> = relative_foundation(fam_all, depth, w)?
        .foundation_rel
        .into_iter()
        .collect();
    let mut covered = fnd;
    for class in classes {
        covered.extend(phi_closure(class, fam_all, depth, w)?);
    }
    let uncovered: Vec<VertexId> = w.vertices().iter().filter(|v| !covered.contains(v)).cloned().collect();
    if uncovered.is_empty() {
        Ok(CheckReport::new(
            "covering",
            Outcome::Pass,
            Vec::new(),
            format!("{} classes cover the window", classes.len()),
        ))
    } else {
        Ok(CheckReport::new(
            "covering",
            Outcome::Fail,
            uncovered.clone(),
            format!("{} window vertices uncovered", uncovered.len()),
        ))
    }
}

pub fn monomer_check(
    certs: &[IsoCertificate],
    fam_all: &RemovableFamily,
    depth: usize,
    w: &FiniteWindow,
) -> Result<CheckReport> {
    let mut r = covering_check(&[certs.to_vec()], fam_all, depth, w)?;
    r.check = "monomer".into();
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Prop14Report {
    pub outcome: Outcome,
    pub assertion: bool,
    pub finite_degree_foundation: usize,
    /// A finite-degree foundation vertex with a neighbor outside the
    /// foundation, reported when the finiteness assertion is false.
    pub hypothesis_failure_witness: Option<(VertexId, VertexId)>,
}

/// Finite-degree foundation vertices have all neighbors in the foundation,
/// provided the foundation has finitely many finite-degree vertices.
pub fn prop14_check(
    fam: &RemovableFamily,
    depth: usize,
    w: &FiniteWindow,
    fin_bound_assertion: bool,
) -> Result<Prop14Report> {
    same_oracle(&fam.host, w)?;
    let cl = Closure { fam, depth };
    let mut count = 0;
    let mut witness = None;
    for v in w.vertices().iter().filter(|v| cl.foundation(v)) {
        let Some(nb) = fam.host.neighbors(v)? else { continue };
        count += 1;
        if witness.is_none() {
            if let Some(u) = nb.into_iter().find(|u| !cl.foundation(u)) {
                witness = Some((v.clone(), u));
            }
        }
    }
    let outcome = match (count, &witness, fin_bound_assertion) {
        (0, _, _) => Outcome::Vacuous,
        (_, None, _) => Outcome::Pass,
        (_, Some(_), true) => Outcome::Fail,
        // hypothesis false: the violation is the expected behavior
        (_, Some(_), false) => Outcome::Vacuous,
    };
    Ok(Prop14Report {
        outcome,
        assertion: fin_bound_assertion,
        finite_degree_foundation: count,
        hypothesis_failure_witness: witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CensusVerdict {
    Distinguished {
        degree: u64,
        count_first: usize,
        count_second: usize,
        first: CensusProfile,
        second: CensusProfile,
    },
    Indistinguishable {
        first: CensusProfile,
        second: CensusProfile,
    },
}

fn covers_box(g: &GraphOracle, w: &FiniteWindow, bound: i64) -> Result<()> {
    for v in g.vertices_in_box(-bound, bound)? {
        if !w.contains(&v) {
            return Err(Error::Precondition(format!(
                "window misses {v}, inside the validity bound {bound}"
            )));
        }
    }
    Ok(())
}

/// Compares low-degree censuses of two graphs. `validity` is the declared
/// index bound containing every vertex of degree at most `k` in either
/// graph; both windows must contain that box.
pub fn census_obstruction(
    g1: &GraphOracle,
    w1: &FiniteWindow,
    g2: &GraphOracle,
    w2: &FiniteWindow,
    k: u64,
    validity: Option<i64>,
) -> Result<CensusVerdict> {
    let bound = validity.ok_or(Error::MissingBounds)?;
    covers_box(g1, w1, bound)?;
    covers_box(g2, w2, bound)?;
    let restrict = |mut p: CensusProfile, g: &GraphOracle| -> CensusProfile {
        p.low_degree.retain(|v| v.max_abs() <= bound);
        p.counts = BTreeMap::new();
        for v in &p.low_degree {
            if let Ok(DegreeValue::Finite(d)) = g.degree(v) {
                *p.counts.entry(d).or_insert(0) += 1;
            }
        }
        p.validity_bound = Some(bound);
        p
    };
    let first = restrict(degree_census(w1, g1, k)?, g1);
    let second = restrict(degree_census(w2, g2, k)?, g2);
    for d in 0..=k {
        let (a, b) = (
            first.counts.get(&d).copied().unwrap_or(0),
            second.counts.get(&d).copied().unwrap_or(0),
        );
        if a != b {
            return Ok(CensusVerdict::Distinguished {
                degree: d,
                count_first: a,
                count_second: b,
                first,
                second,
            });
        }
    }
    Ok(CensusVerdict::Indistinguishable { first, second })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EvidenceVerdict {
    SelfContainedComponent {
        component: String,
        certificate: String,
    },
    RemovableComponent {
        component: String,
        removed: Vec<VertexId>,
    },
    SpanningPattern {
        removed_components: Vec<String>,
        image_components: Vec<String>,
    },
    Inconclusive {
        reason: String,
    },
}

/// Evidence for which case of the disconnected-graph trichotomy a
/// certificate exhibits. `component_certs` are declared certificates acting
/// inside a single component.
pub fn classify_components_evidence(
    g: &GraphOracle,
    c: &IsoCertificate,
    component_certs: &[IsoCertificate],
    w: &FiniteWindow,
) -> Result<EvidenceVerdict> {
    if g.components().is_none() {
        return Err(Error::NotDisjointUnion);
    }
    same_oracle(g, w)?;
    let tag = |v: &VertexId| g.component_of(v).expect("component key declared");
    for cc in component_certs {
        if cc.host.id() != g.id() || !verify_on_window(cc, w)?.passed {
            continue;
        }
        let touched: BTreeSet<String> = w
            .vertices()
            .iter()
            .filter(|v| cc.removed.contains(v) || cc.apply(v).as_ref() != Some(v))
            .map(&tag)
            .collect();
        if touched.len() == 1 {
            return Ok(EvidenceVerdict::SelfContainedComponent {
                component: touched.into_iter().next().expect("one component"),
                certificate: cc.name.clone(),
            });
        }
    }
    let report = verify_on_window(c, w)?;
    if !report.passed {
        return Ok(EvidenceVerdict::Inconclusive {
            reason: "certificate fails on the window".into(),
        });
    }
    let removed: Vec<VertexId> = w.vertices().iter().filter(|v| c.removed.contains(v)).cloned().collect();
    let removed_components: BTreeSet<String> = removed.iter().map(&tag).collect();
    if removed_components.len() == 1 {
        let comp = removed_components.iter().next().expect("one component").clone();
        if w.vertices()
            .iter()
            .filter(|v| tag(v) == comp)
            .all(|v| c.removed.contains(v))
        {
            return Ok(EvidenceVerdict::RemovableComponent {
                component: comp,
                removed,
            });
        }
    }
    let image_components: BTreeSet<String> = removed.iter().filter_map(|v| c.apply(v)).map(|v| tag(&v)).collect();
    if removed_components.len() >= 3 && image_components.len() >= 3 {
        return Ok(EvidenceVerdict::SpanningPattern {
            removed_components: removed_components.into_iter().collect(),
            image_components: image_components.into_iter().collect(),
        });
    }
    Ok(EvidenceVerdict::Inconclusive {
        reason: "no case is witnessed on this window".into(),
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ProbeOutcome {
    HypothesisFails { witness: Vec<VertexId> },
    HypothesisHoldsCertificateFound { certificate: String, pairs_tested: usize },
    HypothesisHoldsNoCertificateFound { tried: Vec<String> },
}

/// If `Q` avoids `P ∪ Tor(P) ∪ Curl(P)` on the window, tries to certify
/// `Q ∈ Rem(G \ P)` from the available maps. Evidence only.
pub fn conjecture2_probe(
    fam: &RemovableFamily,
    cp: &IsoCertificate,
    cq: &IsoCertificate,
    witnesses: &[CurlWitness],
    depth: usize,
    w: &FiniteWindow,
) -> Result<ProbeOutcome> {
    same_oracle(&fam.host, w)?;
    let tor: BTreeSet<VertexId> = torsion_points(fam, cp, depth, w.vertices()).into_iter().collect();
    let cur = curl(cp, witnesses, depth, w)?;
    let hit: Vec<VertexId> = w
        .vertices()
        .iter()
        .filter(|v| cq.removed.contains(v) && (cp.removed.contains(v) || tor.contains(v) || cur.contains(v)))
        .cloned()
        .collect();
    if !hit.is_empty() {
        return Ok(ProbeOutcome::HypothesisFails { witness: hit });
    }
    let rest = Arc::new(cp.host.minus(&cp.removed)?);
    let keep: Vec<VertexId> = w.vertices().iter().filter(|v| rest.is_vertex(v)).cloned().collect();
    let rw = subset(&rest, &keep)?;
    let mut candidates = Vec::new();
    if let Ok(t) = transport(cp, cq) {
        candidates.push(t);
    }
    candidates.push(cq.with_host(rest.clone()).renamed(format!("{}|rest", cq.name)));
    let mut tried = Vec::new();
    for cand in candidates {
        tried.push(cand.name.clone());
        let same_set = rw
            .vertices()
            .iter()
            .all(|v| cand.removed.contains(v) == cq.removed.contains(v));
        if !same_set {
            continue;
        }
        let r = verify_on_window(&cand, &rw)?;
        if r.passed {
            return Ok(ProbeOutcome::HypothesisHoldsCertificateFound {
                certificate: cand.name,
                pairs_tested: r.pairs_tested,
            });
        }
    }
    Ok(ProbeOutcome::HypothesisHoldsNoCertificateFound { tried })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{graph_or_panic, parse_certificate_spec};
    use crate::embedding::CompletenessDepth;
    use crate::window::ball;

    const EX9: &str = "graph example9
sort v arity 1 where x1 >= 0
edge v(h) ~ v(n) when h = 0 and n >= 1
edge v(n) ~ v(m) when n >= 1 and m = n + 1
bound offset 0 slope 1
";
    const SHIFT: &str = "certificate shift
removed v(1)
forward
map v(n) -> v(n) when n = 0
map v(n) -> v(n + 1) when n >= 1
inverse
map v(n) -> v(n) when n = 0
map v(n) -> v(n - 1) when n >= 2
";

    fn v(n: i64) -> VertexId {
        VertexId::new("v", vec![n])
    }

    fn fam() -> RemovableFamily {
        let g = Arc::new(graph_or_panic(EX9));
        let c = parse_certificate_spec(SHIFT, g.clone()).unwrap().value;
        RemovableFamily::new(g, vec![c])
            .unwrap()
            .asserting_complete(CompletenessDepth { base: 0, per_radius: 1 }, "test")
    }

    #[test]
    fn example9_foundation_and_closure() {
        let f = fam();
        let w = ball(&f.host, &[v(0)], 10).unwrap();
        let r = relative_foundation(&f, 10, &w).unwrap();
        assert_eq!(r.foundation_rel, vec![v(0)]);
        assert!(r.exact);
        let c1 = covered_closure(&f, 1, &w).unwrap();
        assert_eq!(c1.into_iter().collect::<Vec<_>>(), vec![v(1)]);
        // closure grows with depth
        let c5 = covered_closure(&f, 5, &w).unwrap();
        assert!(covered_closure(&f, 4, &w).unwrap().is_subset(&c5));
    }

    #[test]
    fn example9_torsion_free_and_checks() {
        let f = fam();
        let c = f.members[0].clone();
        let w = ball(&f.host, &[v(0)], 8).unwrap();
        let t = torsion(&f, &c, 10, &w).unwrap();
        assert!(t.torsion_rel.is_empty());
        assert!(t.definition_agrees);
        assert_eq!(
            foundation_monotonicity_check(&f, &c, 10, &w).unwrap().outcome,
            Outcome::Pass
        );
        let p14 = prop14_check(&f, 10, &w, true).unwrap();
        assert_eq!(p14.outcome, Outcome::Vacuous);
        let phi = phi_closure(std::slice::from_ref(&c), &f, 10, &w).unwrap();
        assert_eq!(phi.len(), 8);
        assert!(phi_closure(std::slice::from_ref(&c), &f, 0, &w).unwrap().is_empty());
        assert_eq!(monomer_check(&[c], &f, 10, &w).unwrap().outcome, Outcome::Pass);
    }

    #[test]
    fn census_requires_bounds() {
        let f = fam();
        let w = ball(&f.host, &[v(0)], 3).unwrap();
        assert_eq!(
            census_obstruction(&f.host, &w, &f.host, &w, 1, None).unwrap_err(),
            Error::MissingBounds
        );
        let v = census_obstruction(&f.host, &w, &f.host, &w, 2, Some(3)).unwrap();
        assert!(matches!(v, CensusVerdict::Indistinguishable { .. }));
    }
}
