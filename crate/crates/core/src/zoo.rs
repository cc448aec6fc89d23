//! Registry of shipped example graphs with certificates, families and
//! ground truths.
//!
//! Layout of a zoo directory:
//!
//! ```text
//! <zoo>/<entry>/graph.sgr     graph specification
//! <zoo>/<entry>/*.sgc         certificates on that graph
//! <zoo>/<entry>/entry.json    roots, families, derived certificates, ground truths
//! ```
//!
//! The builtin zoo is compiled into the library; `Zoo::from_dir` reads the
//! same layout from disk.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dsl::{parse_certificate_spec, parse_graph_spec, parse_vertex_set, Diagnostic};
use crate::embedding::{
    complement_transfer, compose_certificates, iso_union, product_lift, transport, verify_certificate,
    CompletenessDepth, IsoCertificate, IsoUnionOutcome, RemovableFamily,
};
use crate::error::{Error, Result};
use crate::oracle::GraphOracle;
use crate::structure::{
    census_obstruction, conjecture2_probe, covering_check, curl, relative_foundation, torsion, CensusVerdict,
    CurlWitness, Outcome, ProbeOutcome,
};
use crate::vertex::VertexId;
use crate::vertex_set::VertexSet;
use crate::window::{ball, index_box, FiniteWindow};

/// Radius at which every shipped certificate must verify.
pub const CERT_RADIUS: usize = 6;
/// Radius of the windows used for ground-truth regression.
pub const TRUTH_RADIUS: usize = 8;

macro_rules! builtin_files {
    ($($entry:literal => [$($file:literal),* $(,)?]),* $(,)?) => {
        const BUILTIN: &[(&str, &[(&str, &str)])] = &[
            $(($entry, &[$(($file, include_str!(concat!("../zoo/", $entry, "/", $file)))),*])),*
        ];
    };
}

builtin_files! {
    "example9" => ["graph.sgr", "entry.json", "shift.sgc"],
    "example11a" => ["graph.sgr", "entry.json", "leaf2.sgc", "leaf3.sgc"],
    "grid" => ["graph.sgr", "entry.json", "row.sgc", "col.sgc"],
    "example15" => ["graph.sgr", "entry.json", "a1.sgc", "b1.sgc", "fnd_c0.sgc"],
    "rhomb_star" => ["graph.sgr", "entry.json", "p.sgc", "q.sgc", "r.sgc"],
    "roller_brush" => ["graph.sgr", "entry.json", "g1.sgc", "p1.sgc", "q1.sgc", "p2.sgc"],
    "ray" => ["graph.sgr", "entry.json", "tail.sgc"],
    "double_ray" => ["graph.sgr", "entry.json"],
    "infinite_star" => ["graph.sgr", "entry.json", "leaf.sgc"],
    "complete_inf" => ["graph.sgr", "entry.json", "drop0.sgc"],
    "empty_inf" => ["graph.sgr", "entry.json", "drop0.sgc"],
    "rado" => ["graph.sgr", "entry.json"],
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    name: String,
    description: String,
    self_contained: bool,
    roots: Vec<VertexId>,
    #[serde(default)]
    census_bound: Option<i64>,
    #[serde(default)]
    exploratory_box: Option<(i64, i64)>,
    certificates: Vec<CertFile>,
    #[serde(default)]
    derived: Vec<DerivedSpec>,
    #[serde(default)]
    family: Option<FamilySpec>,
    #[serde(default)]
    classes: Vec<Vec<String>>,
    #[serde(default)]
    foundation_graph: Option<FoundationSpec>,
    #[serde(default)]
    curl_witnesses: Vec<CurlSpec>,
    ground_truth: GroundTruth,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertFile {
    file: String,
    provenance: String,
    #[serde(default)]
    roots: Option<Vec<VertexId>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DerivedSpec {
    name: String,
    op: String,
    args: Vec<String>,
    #[serde(default)]
    factor: Option<String>,
    #[serde(default)]
    k: Option<usize>,
    #[serde(default)]
    roots: Option<Vec<VertexId>>,
    provenance: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilySpec {
    members: Vec<String>,
    foundation_complete: bool,
    completeness_depth: CompletenessDepth,
    note: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FoundationSpec {
    set: String,
    certificates: Vec<CertFile>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurlSpec {
    certificate: String,
    container: String,
    inner_family: Vec<String>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    #[serde(default)]
    pub foundation: Option<SetTruth>,
    #[serde(default)]
    pub torsion: Vec<TorsionTruth>,
    #[serde(default)]
    pub curl: Vec<CurlTruth>,
    #[serde(default)]
    pub census: Option<CensusTruth>,
    #[serde(default)]
    pub probe: Vec<ProbeTruth>,
    #[serde(default)]
    pub monomer_fails: Option<MonomerTruth>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SetTruth {
    pub set: String,
    pub provenance: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TorsionTruth {
    pub certificate: String,
    pub vertices: Vec<VertexId>,
    pub provenance: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CurlTruth {
    pub certificate: String,
    pub contains: Vec<VertexId>,
    pub provenance: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CensusTruth {
    pub k: u64,
    pub validity_bound: i64,
    pub cases: Vec<CensusCase>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CensusCase {
    pub remove: Vec<String>,
    pub degree: u64,
    pub expected: (usize, usize),
    pub provenance: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeTruth {
    pub p: String,
    pub q: String,
    pub outcome: String,
    pub provenance: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MonomerTruth {
    pub class: Vec<String>,
    pub uncovered_sort: String,
    pub provenance: String,
}

/// A shipped or derived certificate with the roots it is verified around.
#[derive(Clone, Debug)]
pub struct ZooCertificate {
    pub cert: IsoCertificate,
    pub roots: Vec<VertexId>,
    pub provenance: String,
    /// File name, or the derivation (`iso_union(R, P)` and the like).
    pub origin: String,
}

#[derive(Clone, Debug)]
pub struct FoundationGraph {
    pub host: Arc<GraphOracle>,
    pub set: VertexSet,
    pub certificates: Vec<ZooCertificate>,
}

#[derive(Clone, Debug)]
pub struct ZooEntry {
    pub name: String,
    pub description: String,
    pub self_contained: bool,
    pub graph_source: String,
    pub graph: Arc<GraphOracle>,
    pub roots: Vec<VertexId>,
    pub census_bound: Option<i64>,
    pub exploratory_box: Option<(i64, i64)>,
    pub certificates: Vec<ZooCertificate>,
    pub family: Option<RemovableFamily>,
    pub classes: Vec<Vec<String>>,
    pub foundation_graph: Option<FoundationGraph>,
    /// Curl witnesses keyed by the certificate of `P`.
    pub curl_witnesses: Vec<(String, CurlWitness)>,
    pub ground_truth: GroundTruth,
}

impl ZooEntry {
    pub fn certificate(&self, name: &str) -> Result<&IsoCertificate> {
        self.certificates
            .iter()
            .find(|c| c.cert.name == name)
            .map(|c| &c.cert)
            .ok_or_else(|| Error::UnknownEntry(format!("{}/{name}", self.name)))
    }

    /// Certificates hosted on the entry's own graph.
    pub fn native_certificates(&self) -> impl Iterator<Item = &ZooCertificate> {
        self.certificates
            .iter()
            .filter(move |c| c.cert.host.id() == self.graph.id())
    }

    pub fn class(&self, names: &[String]) -> Result<Vec<IsoCertificate>> {
        names.iter().map(|n| self.certificate(n).cloned()).collect()
    }

    pub fn classes(&self) -> Result<Vec<Vec<IsoCertificate>>> {
        self.classes.iter().map(|c| self.class(c)).collect()
    }

    pub fn family(&self) -> Result<&RemovableFamily> {
        self.family
            .as_ref()
            .ok_or_else(|| Error::Precondition(format!("`{}` declares no removable family", self.name)))
    }

    /// Shipped depth for a window: the family's completeness depth at the
    /// largest index present in the window.
    pub fn depth_for(&self, w: &FiniteWindow) -> usize {
        let b = w.max_abs_index() as usize;
        self.family.as_ref().map_or(b + 1, |f| f.completeness_depth.at(b))
    }

    pub fn window(&self, radius: usize) -> Result<FiniteWindow> {
        ball(&self.graph, &self.roots, radius)
    }

    pub fn foundation_truth(&self) -> Result<Option<VertexSet>> {
        self.ground_truth
            .foundation
            .as_ref()
            .map(|t| parse_set(&self.name, &t.set, &self.graph))
            .transpose()
    }

    pub fn curl_witnesses_for(&self, cert: &str) -> Vec<CurlWitness> {
        self.curl_witnesses
            .iter()
            .filter(|(n, _)| n == cert)
            .map(|(_, w)| w.clone())
            .collect()
    }
}

fn located(entry: &str, file: &str, diags: &[Diagnostic]) -> Error {
    let lines: Vec<String> = diags.iter().map(|d| format!("{entry}/{file}:{d}")).collect();
    Error::Parse(lines.join("\n"))
}

fn parse_set(entry: &str, src: &str, host: &GraphOracle) -> Result<VertexSet> {
    if src.trim().is_empty() {
        return Ok(VertexSet::empty());
    }
    parse_vertex_set(src, host).map_err(|d| located(entry, "entry.json", &d))
}

#[derive(Clone, Debug)]
enum Source {
    Builtin,
    Dir(PathBuf),
}

#[derive(Clone, Debug)]
pub struct Zoo {
    source: Source,
}

/// Outcome of one validation check.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationLine {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryValidation {
    pub entry: String,
    pub passed: bool,
    pub checks: Vec<ValidationLine>,
}

impl Zoo {
    pub fn builtin() -> Zoo {
        Zoo {
            source: Source::Builtin,
        }
    }

    pub fn from_dir(dir: impl AsRef<Path>) -> Zoo {
        Zoo {
            source: Source::Dir(dir.as_ref().to_path_buf()),
        }
    }

    /// `SGRAPH_ZOO_DIR` when set, the builtin zoo otherwise.
    pub fn from_env() -> Zoo {
        match std::env::var_os("SGRAPH_ZOO_DIR") {
            Some(d) => Zoo::from_dir(d),
            None => Zoo::builtin(),
        }
    }

    pub fn list(&self) -> Result<Vec<String>> {
        match &self.source {
            Source::Builtin => Ok(BUILTIN.iter().map(|(n, _)| n.to_string()).collect()),
            Source::Dir(d) => {
                let rd = std::fs::read_dir(d).map_err(|e| Error::Io(format!("{}: {e}", d.display())))?;
                let mut out: Vec<String> = rd
                    .filter_map(|e| e.ok())
                    .filter(|e| e.path().join("entry.json").is_file())
                    .filter_map(|e| e.file_name().into_string().ok())
                    .collect();
                out.sort();
                Ok(out)
            }
        }
    }

    fn read(&self, entry: &str, file: &str) -> Result<String> {
        match &self.source {
            Source::Builtin => BUILTIN
                .iter()
                .find(|(n, _)| *n == entry)
                .ok_or_else(|| Error::UnknownEntry(entry.to_string()))?
                .1
                .iter()
                .find(|(f, _)| *f == file)
                .map(|(_, s)| s.to_string())
                .ok_or_else(|| Error::Io(format!("{entry}/{file}: no such fixture"))),
            Source::Dir(d) => {
                let dir = d.join(entry);
                if !dir.join("entry.json").is_file() {
                    return Err(Error::UnknownEntry(entry.to_string()));
                }
                std::fs::read_to_string(dir.join(file)).map_err(|e| Error::Io(format!("{entry}/{file}: {e}")))
            }
        }
    }

    fn load_graph(&self, name: &str) -> Result<(String, GraphOracle)> {
        let src = self.read(name, "graph.sgr")?;
        let g = parse_graph_spec(&src)
            .map_err(|d| located(name, "graph.sgr", &d))?
            .value;
        Ok((src, g))
    }

    fn load_cert(
        &self,
        entry: &str,
        spec: &CertFile,
        host: &Arc<GraphOracle>,
        roots: &[VertexId],
    ) -> Result<ZooCertificate> {
        let src = self.read(entry, &spec.file)?;
        let cert = parse_certificate_spec(&src, host.clone())
            .map_err(|d| located(entry, &spec.file, &d))?
            .value;
        Ok(ZooCertificate {
            cert,
            roots: spec.roots.clone().unwrap_or_else(|| roots.to_vec()),
            provenance: spec.provenance.clone(),
            origin: spec.file.clone(),
        })
    }

    pub fn get(&self, name: &str) -> Result<ZooEntry> {
        let raw = self.read(name, "entry.json")?;
        let spec: EntryFile = serde_json::from_str(&raw)
            .map_err(|e| Error::Parse(format!("{name}/entry.json:{}:{}: error: {e}", e.line(), e.column())))?;
        if spec.name != name {
            return Err(Error::Parse(format!(
                "{name}/entry.json: entry is named `{}`",
                spec.name
            )));
        }
        let (graph_source, g) = self.load_graph(name)?;
        let graph = Arc::new(g);
        for r in &spec.roots {
            graph.check_vertex(r)?;
        }
        let mut certificates = Vec::new();
        for c in &spec.certificates {
            certificates.push(self.load_cert(name, c, &graph, &spec.roots)?);
        }
        for d in &spec.derived {
            let derived = self.derive(name, d, &graph, &spec.roots, &certificates)?;
            certificates.push(derived);
        }
        let mut entry = ZooEntry {
            name: name.to_string(),
            description: spec.description,
            self_contained: spec.self_contained,
            graph_source,
            graph: graph.clone(),
            roots: spec.roots.clone(),
            census_bound: spec.census_bound,
            exploratory_box: spec.exploratory_box,
            certificates,
            family: None,
            classes: spec.classes,
            foundation_graph: None,
            curl_witnesses: Vec::new(),
            ground_truth: spec.ground_truth,
        };
        if let Some(f) = &spec.family {
            let members = entry.class(&f.members)?;
            let mut fam = RemovableFamily::new(graph.clone(), members)?;
            if f.foundation_complete {
                fam = fam.asserting_complete(f.completeness_depth, f.note.clone());
            } else {
                fam.completeness_depth = f.completeness_depth;
                fam.note = f.note.clone();
            }
            entry.family = Some(fam);
        }
        entry.classes()?;
        if let Some(fs) = &spec.foundation_graph {
            let set = parse_set(name, &fs.set, &graph)?;
            let host = Arc::new(graph.induced(&set)?);
            let roots: Vec<VertexId> = spec.roots.iter().filter(|r| host.is_vertex(r)).cloned().collect();
            let certificates = fs
                .certificates
                .iter()
                .map(|c| self.load_cert(name, c, &host, &roots))
                .collect::<Result<Vec<_>>>()?;
            entry.foundation_graph = Some(FoundationGraph {
                host,
                set,
                certificates,
            });
        }
        for cw in &spec.curl_witnesses {
            let cq = entry.certificate(&cw.container)?.clone();
            let inner_host = Arc::new(graph.induced(&cq.removed)?);
            let members = entry
                .class(&cw.inner_family)?
                .into_iter()
                .map(|c| c.with_host(inner_host.clone()))
                .collect();
            let inner = RemovableFamily::new(inner_host.clone(), members)?;
            let cp_in_q = entry.certificate(&cw.certificate)?.with_host(inner_host);
            entry
                .curl_witnesses
                .push((cw.certificate.clone(), CurlWitness { cq, inner, cp_in_q }));
        }
        Ok(entry)
    }

    fn derive(
        &self,
        entry: &str,
        d: &DerivedSpec,
        graph: &Arc<GraphOracle>,
        roots: &[VertexId],
        have: &[ZooCertificate],
    ) -> Result<ZooCertificate> {
        let arg = |i: usize| -> Result<&IsoCertificate> {
            let n = d
                .args
                .get(i)
                .ok_or_else(|| Error::Parse(format!("{entry}/entry.json: `{}` needs {} arguments", d.name, i + 1)))?;
            have.iter()
                .find(|c| &c.cert.name == n)
                .map(|c| &c.cert)
                .ok_or_else(|| Error::UnknownEntry(format!("{entry}/{n}")))
        };
        let roots = d.roots.as_deref().unwrap_or(roots);
        let mut out_roots = roots.to_vec();
        let cert = match d.op.as_str() {
            "complement" => complement_transfer(arg(0)?),
            "product" => {
                let factor_name = d.factor.as_deref().unwrap_or(entry);
                let (factor, factor_roots) = if factor_name == entry {
                    ((**graph).clone(), roots.to_vec())
                } else {
                    let f = self.get(factor_name)?;
                    ((*f.graph).clone(), f.roots)
                };
                out_roots = roots
                    .iter()
                    .flat_map(|r| {
                        factor_roots.iter().map(move |s| {
                            let mut idx = r.index.clone();
                            idx.extend(s.index.iter().copied());
                            VertexId::new(GraphOracle::product_sort(&r.sort, &s.sort), idx)
                        })
                    })
                    .collect();
                product_lift(arg(0)?, &factor)
            }
            "iso_union" => {
                let w = ball(graph, roots, CERT_RADIUS)?;
                match iso_union(arg(0)?, arg(1)?, &w)? {
                    IsoUnionOutcome::Certificate(c) => c,
                    IsoUnionOutcome::NotApplicable { moved } => {
                        return Err(Error::Precondition(format!(
                            "{entry}: `{}` does not fix the second set (moves {moved})",
                            d.args[0]
                        )))
                    }
                }
            }
            "extend" => compose_certificates(arg(0)?, &transport(arg(0)?, arg(1)?)?)?,
            "power" => arg(0)?.power(d.k.unwrap_or(2)),
            other => {
                return Err(Error::Parse(format!(
                    "{entry}/entry.json: unknown derivation `{other}`"
                )));
            }
        };
        Ok(ZooCertificate {
            cert: cert.renamed(d.name.clone()),
            roots: out_roots,
            provenance: d.provenance.clone(),
            origin: format!("{}({})", d.op, d.args.join(", ")),
        })
    }

    pub fn validate(&self, name: &str) -> Result<EntryValidation> {
        let e = self.get(name)?;
        let checks = validate_entry(&e)?;
        Ok(EntryValidation {
            entry: name.to_string(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        })
    }

    /// Validates every entry; load failures become failed lines.
    pub fn validate_all(&self) -> Result<Vec<EntryValidation>> {
        let mut out = Vec::new();
        for name in self.list()? {
            out.push(match self.validate(&name) {
                Ok(v) => v,
                Err(err) => EntryValidation {
                    entry: name.clone(),
                    passed: false,
                    checks: vec![ValidationLine {
                        check: "load".into(),
                        passed: false,
                        detail: err.to_string(),
                    }],
                },
            });
        }
        Ok(out)
    }
}

fn line(check: impl Into<String>, passed: bool, detail: impl Into<String>) -> ValidationLine {
    ValidationLine {
        check: check.into(),
        passed,
        detail: detail.into(),
    }
}

fn provenance_ok(p: &str) -> bool {
    p.starts_with("stated") || p.starts_with("derived")
}

fn members(w: &FiniteWindow, s: &VertexSet) -> BTreeSet<VertexId> {
    w.vertices().iter().filter(|v| s.contains(v)).cloned().collect()
}

/// Re-verifies every certificate and ground truth of an entry.
pub fn validate_entry(e: &ZooEntry) -> Result<Vec<ValidationLine>> {
    let mut out = Vec::new();
    let gt = &e.ground_truth;
    let mut provs: Vec<&str> = e.certificates.iter().map(|c| c.provenance.as_str()).collect();
    provs.extend(gt.foundation.iter().map(|t| t.provenance.as_str()));
    provs.extend(gt.torsion.iter().map(|t| t.provenance.as_str()));
    provs.extend(gt.curl.iter().map(|t| t.provenance.as_str()));
    provs.extend(gt.probe.iter().map(|t| t.provenance.as_str()));
    provs.extend(gt.monomer_fails.iter().map(|t| t.provenance.as_str()));
    if let Some(c) = &gt.census {
        provs.extend(c.cases.iter().map(|t| t.provenance.as_str()));
    }
    let bad: Vec<&&str> = provs.iter().filter(|p| !provenance_ok(p)).collect();
    out.push(line(
        "provenance",
        bad.is_empty(),
        format!("{} notes, {} malformed", provs.len(), bad.len()),
    ));

    let fnd_certs = e.foundation_graph.iter().flat_map(|f| f.certificates.iter());
    for zc in e.certificates.iter().chain(fnd_certs) {
        let r = verify_certificate(&zc.cert, CERT_RADIUS, &zc.roots)?;
        let detail = match &r.counterexample {
            None => format!("{} pairs on {} vertices", r.pairs_tested, r.window_vertices),
            Some(ce) => format!("{}: {}", ce.kind, ce.detail),
        };
        out.push(line(format!("verify {}", zc.cert.name), r.passed, detail));
    }

    if gt.foundation.is_none() && gt.torsion.is_empty() && gt.curl.is_empty() && gt.census.is_none() {
        return Ok(out);
    }
    let w = e.window(TRUTH_RADIUS)?;
    let depth = e.depth_for(&w);
    if let Some(truth) = e.foundation_truth()? {
        let got: BTreeSet<VertexId> = relative_foundation(e.family()?, depth, &w)?
            .foundation_rel
            .into_iter()
            .collect();
        let want = members(&w, &truth);
        out.push(line(
            "foundation",
            got == want,
            format!("{} vertices, expected {}", got.len(), want.len()),
        ));
    }
    for t in &gt.torsion {
        let r = torsion(e.family()?, e.certificate(&t.certificate)?, depth, &w)?;
        let want: Vec<VertexId> = t.vertices.iter().filter(|v| w.contains(v)).cloned().collect();
        let ok = r.torsion_rel == want && r.definition_agrees;
        out.push(line(
            format!("torsion {}", t.certificate),
            ok,
            format!("{:?}", r.torsion_rel.iter().map(|v| v.to_string()).collect::<Vec<_>>()),
        ));
    }
    for t in &gt.curl {
        let got = curl(
            e.certificate(&t.certificate)?,
            &e.curl_witnesses_for(&t.certificate),
            depth,
            &w,
        )?;
        let ok = t.contains.iter().all(|v| got.contains(v));
        out.push(line(
            format!("curl {}", t.certificate),
            ok,
            format!("{} curly vertices", got.len()),
        ));
    }
    for t in &gt.probe {
        let p = e.certificate(&t.p)?;
        let q = e.certificate(&t.q)?;
        let r = conjecture2_probe(e.family()?, p, q, &e.curl_witnesses_for(&t.p), depth, &w)?;
        let got = match r {
            ProbeOutcome::HypothesisFails { .. } => "hypothesis_fails",
            ProbeOutcome::HypothesisHoldsCertificateFound { .. } => "hypothesis_holds_certificate_found",
            ProbeOutcome::HypothesisHoldsNoCertificateFound { .. } => "hypothesis_holds_no_certificate_found",
        };
        out.push(line(format!("probe {} {}", t.p, t.q), got == t.outcome, got));
    }
    if let Some(m) = &gt.monomer_fails {
        let r = covering_check(&[e.class(&m.class)?], e.family()?, depth, &w)?;
        let ok = r.outcome == Outcome::Fail && r.witness.iter().any(|v| v.sort == m.uncovered_sort);
        out.push(line("monomer fails", ok, r.detail));
    }
    if !e.classes.is_empty() && gt.foundation.is_some() && e.family.as_ref().is_some_and(|f| f.foundation_complete) {
        let r = covering_check(&e.classes()?, e.family()?, depth, &w)?;
        out.push(line("covering", r.outcome == Outcome::Pass, r.detail));
    }
    if let Some(c) = &gt.census {
        for case in &c.cases {
            let (verdict, _) = census_case(e, c, case)?;
            let got = match &verdict {
                CensusVerdict::Distinguished {
                    degree,
                    count_first,
                    count_second,
                    ..
                } if *degree == case.degree => (*count_first, *count_second),
                _ => (usize::MAX, usize::MAX),
            };
            out.push(line(
                format!("census {}", case.remove.join("+")),
                got == case.expected,
                format!("{got:?}"),
            ));
        }
    }
    Ok(out)
}

/// Builds `G` and `G` minus the union of the named removed sets on the
/// declared validity box, and runs the census.
pub fn census_case(e: &ZooEntry, c: &CensusTruth, case: &CensusCase) -> Result<(CensusVerdict, Arc<GraphOracle>)> {
    let mut set = VertexSet::empty();
    for n in &case.remove {
        set = set.union(&e.certificate(n)?.removed)?;
    }
    let rest = Arc::new(e.graph.minus(&set)?);
    let b = c.validity_bound;
    let w1 = index_box(&e.graph, -b, b)?;
    let w2 = index_box(&rest, -b, b)?;
    let v = census_obstruction(&e.graph, &w1, &rest, &w2, c.k, Some(b))?;
    Ok((v, rest))
}
