//! The `sgraph` command line.
//!
//! Exit codes: 0 success, 1 analysis failure, 2 usage or parse error.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::dsl::{parse_certificate_spec, parse_graph_spec, Diagnostic};
use crate::embedding::{verify_certificate, IsoCertificate, RemovableFamily};
use crate::error::Error;
use crate::oracle::GraphOracle;
use crate::ray::{build_ray, IterateCover};
use crate::structure::{
    census_obstruction, classify_components_evidence, conjecture2_probe, covering_check, monomer_check, phi_closure,
    relative_foundation, torsion, CurlWitness, Outcome,
};
use crate::vertex::VertexId;
use crate::vertex_set::VertexSet;
use crate::window::{ball, index_box, FiniteWindow};
use crate::zoo::{Zoo, ZooEntry};

#[derive(Parser, Debug)]
#[command(
    name = "sgraph",
    version,
    about = "Self-embeddings of finitely presented infinite graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GraphOpts {
    /// Zoo entry name or path to a graph specification.
    #[arg(long)]
    graph: String,
    /// Window root; repeatable. Defaults to the zoo entry's roots.
    #[arg(long = "root")]
    roots: Vec<String>,
    #[arg(long, default_value_t = 4)]
    radius: usize,
}

#[derive(Args, Debug, Clone)]
struct DepthOpt {
    /// Iteration depth; defaults to the family's completeness depth.
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Copy, Clone, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a graph or certificate specification.
    Validate {
        file: String,
        /// Host graph, required for certificate files.
        #[arg(long)]
        graph: Option<String>,
    },
    /// Extract a ball or index box.
    Window {
        #[command(flatten)]
        g: GraphOpts,
        /// Index box `LO,HI` instead of a ball.
        #[arg(long = "box", value_parser = parse_box)]
        index_box: Option<(i64, i64)>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Verify a certificate on a ball.
    VerifyCert {
        #[command(flatten)]
        g: GraphOpts,
        /// Certificate name in the zoo entry, or a path.
        #[arg(long)]
        cert: String,
    },
    /// Relative foundation on a ball.
    Foundation {
        #[command(flatten)]
        g: GraphOpts,
        #[command(flatten)]
        d: DepthOpt,
        /// Family members for user graphs.
        #[arg(long = "cert")]
        certs: Vec<String>,
    },
    Torsion {
        #[command(flatten)]
        g: GraphOpts,
        #[command(flatten)]
        d: DepthOpt,
        #[arg(long)]
        cert: String,
        #[arg(long = "family")]
        family: Vec<String>,
    },
    /// φ-closure of certificates sharing a removed set.
    Phi {
        #[command(flatten)]
        g: GraphOpts,
        #[command(flatten)]
        d: DepthOpt,
        #[arg(long = "cert", required = true)]
        certs: Vec<String>,
        #[arg(long = "family")]
        family: Vec<String>,
    },
    Covering {
        #[command(flatten)]
        g: GraphOpts,
        #[command(flatten)]
        d: DepthOpt,
        /// Comma-separated class; repeatable. Defaults to the entry's classes.
        #[arg(long = "class")]
        classes: Vec<String>,
        #[arg(long = "family")]
        family: Vec<String>,
    },
    Monomer {
        #[command(flatten)]
        g: GraphOpts,
        #[command(flatten)]
        d: DepthOpt,
        #[arg(long = "cert", required = true)]
        certs: Vec<String>,
        #[arg(long = "family")]
        family: Vec<String>,
    },
    /// Build a path prefix of a ray.
    Ray {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long)]
        start: Option<String>,
        /// Base certificate of the cover; defaults to the first family member.
        #[arg(long)]
        cert: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Low-degree census of G against G minus removed sets.
    Census {
        #[arg(long)]
        graph: String,
        #[arg(long = "remove", required = true)]
        remove: Vec<String>,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Evidence for the disconnected-graph trichotomy.
    Classify {
        #[command(flatten)]
        g: GraphOpts,
        #[arg(long)]
        cert: String,
        #[arg(long = "component-cert")]
        component_certs: Vec<String>,
    },
    /// Test the union conjecture's hypothesis for a pair and look for a certificate.
    ProbeC2 {
        #[command(flatten)]
        g: GraphOpts,
        #[command(flatten)]
        d: DepthOpt,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Zoo registry.
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
}

#[derive(Subcommand, Debug)]
enum ZooAction {
    List,
    Validate { name: Option<String> },
}

fn parse_box(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo = a.trim().parse::<i64>().map_err(|e| e.to_string())?;
    let hi = b.trim().parse::<i64>().map_err(|e| e.to_string())?;
    Ok((lo, hi))
}

/// Failure with its exit code.
struct Fail {
    code: i32,
    message: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::UnknownEntry(_)
            | Error::UnknownSort(_)
            | Error::ArityMismatch { .. }
            | Error::InvalidVertex(_)
            | Error::Io(_) => 2,
            _ => 1,
        };
        Fail {
            code,
            message: format!("error: {e}"),
        }
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail {
        code: 2,
        message: format!("error: {}", msg.into()),
    }
}

fn parse_fail(lines: String) -> Fail {
    Fail {
        code: 2,
        message: lines,
    }
}

type CliResult<T> = std::result::Result<T, Fail>;

/// Output of a successful run: text and whether the analysis passed.
struct Output {
    text: String,
    ok: bool,
}

fn json_out<T: Serialize>(v: &T, ok: bool) -> Output {
    let mut text = serde_json::to_string_pretty(v).expect("serializable");
    text.push('\n');
    Output { text, ok }
}

fn diag_lines(path: &str, diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("{path}:{d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn read_file(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))
}

/// A graph from the zoo or from a file.
struct Ctx {
    graph: Arc<GraphOracle>,
    entry: Option<ZooEntry>,
}

impl Ctx {
    fn load(spec: &str) -> CliResult<Ctx> {
        if Path::new(spec).is_file() {
            let src = read_file(spec)?;
            let parsed = parse_graph_spec(&src).map_err(|d| parse_fail(diag_lines(spec, &d)))?;
            Ok(Ctx {
                graph: Arc::new(parsed.value),
                entry: None,
            })
        } else {
            let entry = Zoo::from_env().get(spec)?;
            Ok(Ctx {
                graph: entry.graph.clone(),
                entry: Some(entry),
            })
        }
    }

    fn cert(&self, spec: &str) -> CliResult<IsoCertificate> {
        if Path::new(spec).is_file() {
            let src = read_file(spec)?;
            let parsed =
                parse_certificate_spec(&src, self.graph.clone()).map_err(|d| parse_fail(diag_lines(spec, &d)))?;
            return Ok(parsed.value);
        }
        match &self.entry {
            Some(e) => Ok(e.certificate(spec)?.clone()),
            None => Err(usage(format!("no certificate file `{spec}`"))),
        }
    }

    fn certs(&self, specs: &[String]) -> CliResult<Vec<IsoCertificate>> {
        specs.iter().map(|s| self.cert(s)).collect()
    }

    fn roots(&self, given: &[String]) -> CliResult<Vec<VertexId>> {
        let roots: Vec<VertexId> = if given.is_empty() {
            match &self.entry {
                Some(e) => e.roots.clone(),
                None => return Err(usage("user graphs need at least one --root")),
            }
        } else {
            given
                .iter()
                .map(|r| r.parse::<VertexId>().map_err(usage))
                .collect::<CliResult<_>>()?
        };
        for r in &roots {
            self.graph.check_vertex(r)?;
        }
        Ok(roots)
    }

    fn window(&self, g: &GraphOpts) -> CliResult<FiniteWindow> {
        Ok(ball(&self.graph, &self.roots(&g.roots)?, g.radius)?)
    }

    /// The zoo family, or one built from `--family`/`--cert` files.
    fn family(&self, extra: &[String]) -> CliResult<RemovableFamily> {
        if extra.is_empty() {
            if let Some(e) = &self.entry {
                return Ok(e.family()?.clone());
            }
            return Err(usage("user graphs need --family certificates"));
        }
        Ok(RemovableFamily::new(self.graph.clone(), self.certs(extra)?)?)
    }

    fn depth(&self, d: &DepthOpt, fam: &RemovableFamily, w: &FiniteWindow) -> usize {
        d.depth
            .unwrap_or_else(|| fam.completeness_depth.at(w.max_abs_index() as usize))
    }

    fn curl_witnesses(&self, cert: &str) -> Vec<CurlWitness> {
        self.entry
            .as_ref()
            .map(|e| e.curl_witnesses_for(cert))
            .unwrap_or_default()
    }
}

fn names(vs: impl IntoIterator<Item = VertexId>) -> Vec<String> {
    vs.into_iter().map(|v| v.to_string()).collect()
}

fn validate_file(file: &str, graph: Option<&str>) -> CliResult<Output> {
    let src = read_file(file)?;
    let first = src
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    let warn = |ws: &[Diagnostic]| -> Vec<String> { ws.iter().map(|d| format!("{file}:{d}")).collect() };
    if first.starts_with("certificate") {
        let g = graph.ok_or_else(|| usage("certificate files need --graph"))?;
        let ctx = Ctx::load(g)?;
        let p = parse_certificate_spec(&src, ctx.graph.clone()).map_err(|d| parse_fail(diag_lines(file, &d)))?;
        Ok(json_out(
            &json!({
                "kind": "certificate",
                "name": p.value.name,
                "host": ctx.graph.name(),
                "forward_branches": p.value.forward.branches().len(),
                "inverse_branches": p.value.inverse.branches().len(),
                "warnings": warn(&p.warnings),
            }),
            true,
        ))
    } else {
        let p = parse_graph_spec(&src).map_err(|d| parse_fail(diag_lines(file, &d)))?;
        let g = &p.value;
        Ok(json_out(
            &json!({
                "kind": "graph",
                "name": g.name(),
                "id": g.id(),
                "sorts": g.sorts().map(|s| json!({"name": s.name, "arity": s.arity})).collect::<Vec<_>>(),
                "rules": g.rules().len(),
                "warnings": warn(&p.warnings),
            }),
            true,
        ))
    }
}

fn execute(cmd: Command) -> CliResult<Output> {
    match cmd {
        Command::Validate { file, graph } => validate_file(&file, graph.as_deref()),
        Command::Window {
            g,
            index_box: bx,
            format,
        } => {
            let ctx = Ctx::load(&g.graph)?;
            let w = match bx {
                Some((lo, hi)) => index_box(&ctx.graph, lo, hi)?,
                None => ctx.window(&g)?,
            };
            let text = match format {
                Format::Json => w.to_json(),
                Format::Dot => w.to_dot(),
            };
            Ok(Output { text, ok: true })
        }
        Command::VerifyCert { g, cert } => {
            let ctx = Ctx::load(&g.graph)?;
            let c = ctx.cert(&cert)?;
            let roots = ctx.roots(&g.roots)?;
            let r = verify_certificate(&c, g.radius, &roots)?;
            let ok = r.passed;
            Ok(json_out(&r, ok))
        }
        Command::Foundation { g, d, certs } => {
            let ctx = Ctx::load(&g.graph)?;
            let fam = ctx.family(&certs)?;
            let w = ctx.window(&g)?;
            let depth = ctx.depth(&d, &fam, &w);
            Ok(json_out(&relative_foundation(&fam, depth, &w)?, true))
        }
        Command::Torsion { g, d, cert, family } => {
            let ctx = Ctx::load(&g.graph)?;
            let fam = ctx.family(&family)?;
            let c = ctx.cert(&cert)?;
            let w = ctx.window(&g)?;
            let depth = ctx.depth(&d, &fam, &w);
            let r = torsion(&fam, &c, depth, &w)?;
            let ok = r.definition_agrees;
            Ok(json_out(&r, ok))
        }
        Command::Phi { g, d, certs, family } => {
            let ctx = Ctx::load(&g.graph)?;
            let fam = ctx.family(&family)?;
            let cs = ctx.certs(&certs)?;
            let w = ctx.window(&g)?;
            let depth = ctx.depth(&d, &fam, &w);
            let phi = phi_closure(&cs, &fam, depth, &w)?;
            Ok(json_out(
                &json!({"certificates": certs, "depth": depth, "window_size": w.len(), "phi": names(phi)}),
                true,
            ))
        }
        Command::Covering { g, d, classes, family } => {
            let ctx = Ctx::load(&g.graph)?;
            let fam = ctx.family(&family)?;
            let cls: Vec<Vec<IsoCertificate>> = if classes.is_empty() {
                match &ctx.entry {
                    Some(e) => e.classes()?,
                    None => return Err(usage("user graphs need --class")),
                }
            } else {
                classes
                    .iter()
                    .map(|c| ctx.certs(&c.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>()))
                    .collect::<CliResult<_>>()?
            };
            let w = ctx.window(&g)?;
            let depth = ctx.depth(&d, &fam, &w);
            let r = covering_check(&cls, &fam, depth, &w)?;
            let ok = r.outcome != Outcome::Fail;
            Ok(json_out(&r, ok))
        }
        Command::Monomer { g, d, certs, family } => {
            let ctx = Ctx::load(&g.graph)?;
            let fam = ctx.family(&family)?;
            let cs = ctx.certs(&certs)?;
            let w = ctx.window(&g)?;
            let depth = ctx.depth(&d, &fam, &w);
            let r = monomer_check(&cs, &fam, depth, &w)?;
            let ok = r.outcome != Outcome::Fail;
            Ok(json_out(&r, ok))
        }
        Command::Ray {
            graph,
            steps,
            start,
            cert,
            format,
        } => {
            let ctx = Ctx::load(&graph)?;
            let base = match cert {
                Some(c) => ctx.cert(&c)?,
                None => ctx
                    .family(&[])?
                    .members
                    .first()
                    .cloned()
                    .ok_or_else(|| usage("empty family"))?,
            };
            let start = match start {
                Some(s) => s.parse::<VertexId>().map_err(usage)?,
                None => ctx
                    .roots(&[])?
                    .into_iter()
                    .next()
                    .ok_or_else(|| usage("no start vertex"))?,
            };
            let p = build_ray(&IterateCover::new(base), &start, steps)?;
            match format {
                Format::Dot => Ok(Output {
                    text: p.to_dot(&ctx.graph)?,
                    ok: true,
                }),
                Format::Json => Ok(json_out(
                    &json!({
                        "graph": p.graph,
                        "length": p.vertices.len(),
                        "vertices": p.vertices,
                        "verified": true,
                        "steps": p.steps,
                        "chords": p.chords,
                    }),
                    true,
                )),
            }
        }
        Command::Census {
            graph,
            remove,
            k,
            bound,
        } => {
            let ctx = Ctx::load(&graph)?;
            let mut set = VertexSet::empty();
            for c in ctx.certs(&remove)? {
                set = set.union(&c.removed)?;
            }
            let rest = ctx.graph.minus(&set)?;
            let bound = bound.or_else(|| ctx.entry.as_ref().and_then(|e| e.census_bound));
            let b = bound.ok_or(Error::MissingBounds)?;
            let w1 = index_box(&ctx.graph, -b, b)?;
            let w2 = index_box(&rest, -b, b)?;
            let v = census_obstruction(&ctx.graph, &w1, &rest, &w2, k, Some(b))?;
            Ok(json_out(&v, true))
        }
        Command::Classify {
            g,
            cert,
            component_certs,
        } => {
            let ctx = Ctx::load(&g.graph)?;
            let c = ctx.cert(&cert)?;
            let cc = ctx.certs(&component_certs)?;
            let w = ctx.window(&g)?;
            let v = classify_components_evidence(&ctx.graph, &c, &cc, &w)?;
            Ok(json_out(&v, true))
        }
        Command::ProbeC2 { g, d, p, q } => {
            let ctx = Ctx::load(&g.graph)?;
            let fam = ctx.family(&[])?;
            let cp = ctx.cert(&p)?;
            let cq = ctx.cert(&q)?;
            let w = ctx.window(&g)?;
            let depth = ctx.depth(&d, &fam, &w);
            let r = conjecture2_probe(&fam, &cp, &cq, &ctx.curl_witnesses(&p), depth, &w)?;
            Ok(json_out(&r, true))
        }
        Command::Zoo { action } => {
            let zoo = Zoo::from_env();
            match action {
                ZooAction::List => Ok(json_out(&zoo.list()?, true)),
                ZooAction::Validate { name } => {
                    let vs = match name {
                        Some(n) => vec![zoo.validate(&n)?],
                        None => zoo.validate_all()?,
                    };
                    let ok = vs.iter().all(|v| v.passed);
                    Ok(json_out(&vs, ok))
                }
            }
        }
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command) {
        Ok(o) => {
            let _ = write!(out, "{}", o.text);
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}
