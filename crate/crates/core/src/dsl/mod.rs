//! Line-oriented text formats for graphs (`.sgr`) and certificates (`.sgc`).
//!
//! ```text
//! graph example9
//! sort v arity 1 where x1 >= 0
//! edge v(h) ~ v(n) when h = 0 and n >= 1
//! bound offset 0 slope 1
//! ```

mod emit;
mod expr;
mod lexer;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::embedding::IsoCertificate;
use crate::guard::{for_each_point, var_bounds, Atom, Guard, LinExpr};
use crate::map::{Branch, PiecewiseMap};
use crate::oracle::{AdjacencyRule, ComponentKey, GraphOracle, IndexBound, SortDecl};
use crate::vertex::VertexId;
use crate::vertex_set::VertexSet;

pub use emit::{emit_branch, emit_certificate, emit_guard, emit_spec, emit_vertex_set};

use expr::{bind_patterns, parse_affine, parse_guard, parse_pattern, Cursor, PResult, Scope};
use lexer::{lex_line, Spanned};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn error(line: usize, col: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            line,
            col,
            message: message.into(),
        }
    }

    pub fn warning(line: usize, col: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            line,
            col,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {}: {}", self.line, self.col, sev, self.message)
    }
}

/// A parsed value with any warnings raised along the way.
#[derive(Clone, Debug)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<Diagnostic>,
}

struct Line {
    number: usize,
    text: String,
    toks: Vec<Spanned>,
}

impl Line {
    fn cursor(&self) -> Cursor<'_> {
        Cursor::new(&self.toks, self.number, self.text.chars().count() + 1)
    }
}

/// Splits source into non-blank lines, lexing each. Lex errors are collected.
fn lines(src: &str, diags: &mut Vec<Diagnostic>) -> Vec<Line> {
    let mut out = Vec::new();
    for (i, text) in src.lines().enumerate() {
        let number = i + 1;
        match lex_line(text, number) {
            Ok(toks) if toks.is_empty() => {}
            Ok(toks) => out.push(Line {
                number,
                text: text.to_string(),
                toks,
            }),
            Err(d) => diags.push(d),
        }
    }
    out
}

fn has_errors(d: &[Diagnostic]) -> bool {
    d.iter().any(|d| d.severity == Severity::Error)
}

/// Text after the leading keyword, with any comment stripped.
fn rest_of_line(text: &str, keyword: &str) -> String {
    let body = text.split('#').next().unwrap_or("");
    body.trim_start().strip_prefix(keyword).unwrap_or("").trim().to_string()
}

fn lookup_sort<'a>(
    sorts: &'a BTreeMap<String, SortDecl>,
    (name, col): &(String, usize),
    line: usize,
    npats: usize,
) -> PResult<&'a SortDecl> {
    let sd = sorts
        .get(name)
        .ok_or_else(|| Diagnostic::error(line, *col, format!("unknown sort `{name}`")))?;
    if sd.arity != npats {
        return Err(Diagnostic::error(
            line,
            *col,
            format!("sort `{name}` has arity {}, pattern has {npats}", sd.arity),
        ));
    }
    Ok(sd)
}

fn optional_guard(c: &mut Cursor, kw: &str, scope: &Scope) -> PResult<Guard> {
    if c.eat_kw(kw) {
        parse_guard(c, scope)
    } else {
        Ok(Guard::always())
    }
}

/// Conservative emptiness test: rational infeasibility, or no integer point
/// in a moderate box around the feasible region.
fn looks_empty(g: &Guard, arity: usize) -> bool {
    g.conjuncts().iter().all(|conj| {
        let Some(bounds) = var_bounds(conj, arity) else {
            return true;
        };
        let ranges: Vec<(i64, i64)> = bounds
            .iter()
            .map(|&(l, h)| {
                let lo = l.unwrap_or_else(|| h.map_or(-64, |h| h - 128));
                let hi = h.unwrap_or_else(|| l.map_or(64, |l| l + 128));
                (lo, hi.min(lo + 128))
            })
            .collect();
        if crate::guard::box_size(&ranges) > 2_000_000 {
            return false;
        }
        let mut found = false;
        for_each_point(&ranges, |p| {
            found = conj.iter().all(|a| a.eval(p));
            !found
        });
        !found
    })
}

pub fn parse_graph_spec(src: &str) -> Result<Parsed<GraphOracle>, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let ls = lines(src, &mut diags);
    if ls.is_empty() && diags.is_empty() {
        return Err(vec![Diagnostic::error(1, 1, "empty graph specification")]);
    }
    let mut name: Option<String> = None;
    let mut sorts: BTreeMap<String, SortDecl> = BTreeMap::new();
    let mut rules = Vec::new();
    let mut bound = IndexBound::default();
    let mut components = None;
    // edges are resolved after all sorts are known
    let mut edge_lines = Vec::new();
    for l in &ls {
        let mut c = l.cursor();
        let Ok((kw, _)) = c.ident("a statement keyword") else {
            diags.push(c.unexpected("a statement keyword"));
            continue;
        };
        let res: PResult<()> = match kw.as_str() {
            "graph" => {
                let n = rest_of_line(&l.text, "graph");
                if n.is_empty() {
                    Err(c.err("missing graph name"))
                } else if name.is_some() {
                    Err(Diagnostic::error(l.number, 1, "duplicate `graph` statement"))
                } else {
                    name = Some(n);
                    Ok(())
                }
            }
            "sort" => parse_sort(&mut c, l.number, &mut sorts, &mut diags),
            "edge" => {
                edge_lines.push(l);
                Ok(())
            }
            "bound" => (|| {
                c.expect_kw("offset")?;
                let offset = c.int()?;
                c.expect_kw("slope")?;
                let slope = c.int()?;
                c.finish()?;
                if offset < 0 || slope < 0 {
                    return Err(Diagnostic::error(
                        l.number,
                        1,
                        "bound offset and slope must be non-negative",
                    ));
                }
                bound = IndexBound { offset, slope };
                Ok(())
            })(),
            "components" => (|| {
                let (k, col) = c.ident("`leading` or `factor`")?;
                c.finish()?;
                components = Some(match k.as_str() {
                    "leading" => ComponentKey::LeadingIndex,
                    "factor" => ComponentKey::Factor,
                    _ => return Err(Diagnostic::error(l.number, col, format!("unknown component key `{k}`"))),
                });
                Ok(())
            })(),
            other => Err(Diagnostic::error(l.number, 1, format!("unknown statement `{other}`"))),
        };
        if let Err(d) = res {
            diags.push(d);
        }
    }
    for l in edge_lines {
        let mut c = l.cursor();
        c.bump();
        match parse_edge(&mut c, l.number, &sorts) {
            Ok(r) => rules.push(r),
            Err(d) => diags.push(d),
        }
    }
    if name.is_none() && !ls.is_empty() {
        diags.push(Diagnostic::error(ls[0].number, 1, "missing `graph <name>` statement"));
    }
    if sorts.is_empty() && !has_errors(&diags) {
        diags.push(Diagnostic::error(1, 1, "no sorts declared"));
    }
    if has_errors(&diags) {
        diags.sort_by_key(|d| (d.line, d.col));
        return Err(diags);
    }
    match GraphOracle::new(
        name.unwrap_or_default(),
        sorts.into_values().collect(),
        rules,
        bound,
        components,
    ) {
        Ok(g) => Ok(Parsed {
            value: g,
            warnings: diags,
        }),
        Err(e) => Err(vec![Diagnostic::error(1, 1, e.to_string())]),
    }
}

fn parse_sort(
    c: &mut Cursor,
    line: usize,
    sorts: &mut BTreeMap<String, SortDecl>,
    diags: &mut Vec<Diagnostic>,
) -> PResult<()> {
    let (name, col) = c.ident("a sort name")?;
    if expr::is_keyword(&name) {
        return Err(Diagnostic::error(
            line,
            col,
            format!("keyword `{name}` cannot name a sort"),
        ));
    }
    c.expect_kw("arity")?;
    let a_col = c.col();
    let arity = c.int()?;
    if !(0..=8).contains(&arity) {
        return Err(Diagnostic::error(line, a_col, "arity must be between 0 and 8"));
    }
    let arity = arity as usize;
    let scope = Scope::numbered("x", 0, arity);
    let domain = optional_guard(c, "where", &scope)?;
    c.finish()?;
    if sorts.contains_key(&name) {
        return Err(Diagnostic::error(line, col, format!("sort `{name}` declared twice")));
    }
    if looks_empty(&domain, arity) {
        diags.push(Diagnostic::warning(
            line,
            col,
            format!("domain of sort `{name}` is unsatisfiable"),
        ));
    }
    sorts.insert(name.clone(), SortDecl { name, arity, domain });
    Ok(())
}

fn parse_edge(c: &mut Cursor, line: usize, sorts: &BTreeMap<String, SortDecl>) -> PResult<AdjacencyRule> {
    let (left, lp) = parse_pattern(c)?;
    c.expect(lexer::Tok::Tilde)?;
    let (right, rp) = parse_pattern(c)?;
    let ls = lookup_sort(sorts, &left, line, lp.len())?;
    let rs = lookup_sort(sorts, &right, line, rp.len())?;
    let mut scope = Scope::default();
    let mut atoms = bind_patterns(&lp, 0, &mut scope);
    atoms.extend(bind_patterns(&rp, ls.arity, &mut scope));
    let g = optional_guard(c, "when", &scope)?;
    c.finish()?;
    Ok(AdjacencyRule {
        left: ls.name.clone(),
        right: rs.name.clone(),
        guard: Guard::from_conjuncts(vec![atoms]).and(&g),
    })
}

/// `sort(pats) [when guard]` resolved against `host`.
fn parse_set_item(c: &mut Cursor, line: usize, host: &GraphOracle, set: &mut VertexSet) -> PResult<()> {
    let (sort, pats) = parse_pattern(c)?;
    let sd = host
        .sort(&sort.0)
        .ok_or_else(|| Diagnostic::error(line, sort.1, format!("unknown sort `{}`", sort.0)))?;
    if sd.arity != pats.len() {
        return Err(Diagnostic::error(
            line,
            sort.1,
            format!("sort `{}` has arity {}, pattern has {}", sd.name, sd.arity, pats.len()),
        ));
    }
    let mut scope = Scope::default();
    let atoms = bind_patterns(&pats, 0, &mut scope);
    let g = optional_guard(c, "when", &scope)?;
    let g = Guard::from_conjuncts(vec![atoms]).and(&g);
    set.add_clause(&sd.name, sd.arity, g)
        .map_err(|e| Diagnostic::error(line, sort.1, e.to_string()))
}

/// Vertex-set text such as `z(n); c(j) when j <= 0`.
pub fn parse_vertex_set(src: &str, host: &GraphOracle) -> Result<VertexSet, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut set = VertexSet::empty();
    for l in lines(src, &mut diags) {
        let mut c = l.cursor();
        loop {
            if let Err(d) = parse_set_item(&mut c, l.number, host, &mut set) {
                diags.push(d);
                break;
            }
            if c.eat(&lexer::Tok::Semi) {
                if c.at_end() {
                    break;
                }
                continue;
            }
            if let Err(d) = c.finish() {
                diags.push(d);
            }
            break;
        }
    }
    if has_errors(&diags) {
        Err(diags)
    } else {
        Ok(set)
    }
}

fn parse_map_line(c: &mut Cursor, line: usize, host: &GraphOracle) -> PResult<Branch> {
    let (src, pats) = parse_pattern(c)?;
    let sd = host
        .sort(&src.0)
        .ok_or_else(|| Diagnostic::error(line, src.1, format!("unknown sort `{}`", src.0)))?;
    if sd.arity != pats.len() {
        return Err(Diagnostic::error(
            line,
            src.1,
            format!("sort `{}` has arity {}, pattern has {}", sd.name, sd.arity, pats.len()),
        ));
    }
    let mut scope = Scope::default();
    let atoms = bind_patterns(&pats, 0, &mut scope);
    c.expect(lexer::Tok::Arrow)?;
    let (tgt, tcol) = c.ident("a target sort")?;
    let td = host
        .sort(&tgt)
        .ok_or_else(|| Diagnostic::error(line, tcol, format!("map target `{tgt}` is not a sort of the host")))?;
    let mut exprs = Vec::new();
    if c.eat(&lexer::Tok::LParen) && !c.eat(&lexer::Tok::RParen) {
        loop {
            exprs.push(parse_affine(c, &scope)?);
            if c.eat(&lexer::Tok::Comma) {
                continue;
            }
            c.expect(lexer::Tok::RParen)?;
            break;
        }
    }
    if exprs.len() != td.arity {
        return Err(Diagnostic::error(
            line,
            tcol,
            format!("sort `{tgt}` has arity {}, image has {}", td.arity, exprs.len()),
        ));
    }
    let g = optional_guard(c, "when", &scope)?;
    c.finish()?;
    Ok(Branch {
        source: sd.name.clone(),
        source_arity: sd.arity,
        guard: Guard::from_conjuncts(vec![atoms]).and(&g),
        target: td.name.clone(),
        exprs,
    })
}

/// Searches a bounded region for a point where two overlapping branches
/// disagree.
fn conflict_witness(a: &Branch, b: &Branch, host: &GraphOracle) -> Option<VertexId> {
    if a.source != b.source || a.source_arity != b.source_arity {
        return None;
    }
    if a.target == b.target && a.exprs == b.exprs {
        return None;
    }
    let domain = host.sort(&a.source).map_or_else(Guard::always, |s| s.domain.clone());
    let both = a.guard.and(&b.guard).and(&domain);
    if both.is_false() {
        return None;
    }
    let differ = if a.target != b.target {
        Guard::always()
    } else {
        a.exprs.iter().zip(&b.exprs).fold(Guard::never(), |acc, (x, y)| {
            let d: LinExpr = x.clone() - y.clone();
            acc.or(&Guard::from_conjuncts(vec![
                vec![Atom::Le(d.plus(1))],
                vec![Atom::Le((-d).plus(1))],
            ]))
        })
    };
    let g = both.and(&differ);
    let n = a.source_arity;
    for conj in g.conjuncts() {
        let Some(bounds) = var_bounds(conj, n) else { continue };
        let ranges: Vec<(i64, i64)> = bounds
            .iter()
            .map(|&(l, h)| (l.unwrap_or(-64).max(-64), h.unwrap_or(64).min(64)))
            .collect();
        let mut hit = None;
        for_each_point(&ranges, |p| {
            if conj.iter().all(|at| at.eval(p)) {
                hit = Some(p.to_vec());
                false
            } else {
                true
            }
        });
        if let Some(p) = hit {
            return Some(VertexId::new(a.source.clone(), p));
        }
    }
    None
}

pub fn parse_certificate_spec(src: &str, host: Arc<GraphOracle>) -> Result<Parsed<IsoCertificate>, Vec<Diagnostic>> {
    #[derive(PartialEq)]
    enum Section {
        Head,
        Forward,
        Inverse,
    }
    let mut diags = Vec::new();
    let ls = lines(src, &mut diags);
    if ls.is_empty() && diags.is_empty() {
        return Err(vec![Diagnostic::error(1, 1, "empty certificate specification")]);
    }
    let mut name = None;
    let mut removed = VertexSet::empty();
    let mut saw_removed = false;
    let mut forward: Vec<(usize, Branch)> = Vec::new();
    let mut inverse: Vec<(usize, Branch)> = Vec::new();
    let mut section = Section::Head;
    let (mut saw_fwd, mut saw_inv) = (false, false);
    for l in &ls {
        let mut c = l.cursor();
        let Ok((kw, _)) = c.ident("a statement keyword") else {
            diags.push(c.unexpected("a statement keyword"));
            continue;
        };
        let res: PResult<()> = match kw.as_str() {
            "certificate" => (|| {
                let (n, _) = c.ident("a certificate name")?;
                c.finish()?;
                if name.is_some() {
                    return Err(Diagnostic::error(l.number, 1, "duplicate `certificate` statement"));
                }
                name = Some(n);
                Ok(())
            })(),
            "removed" => {
                saw_removed = true;
                parse_set_item(&mut c, l.number, &host, &mut removed).and_then(|_| c.finish())
            }
            "forward" => {
                saw_fwd = true;
                section = Section::Forward;
                c.finish()
            }
            "inverse" => {
                saw_inv = true;
                section = Section::Inverse;
                c.finish()
            }
            "map" => match section {
                Section::Head => Err(Diagnostic::error(
                    l.number,
                    1,
                    "`map` outside a `forward` or `inverse` block",
                )),
                Section::Forward => parse_map_line(&mut c, l.number, &host).map(|b| forward.push((l.number, b))),
                Section::Inverse => parse_map_line(&mut c, l.number, &host).map(|b| inverse.push((l.number, b))),
            },
            other => Err(Diagnostic::error(l.number, 1, format!("unknown statement `{other}`"))),
        };
        if let Err(d) = res {
            diags.push(d);
        }
    }
    let last = ls.last().map_or(1, |l| l.number);
    if name.is_none() {
        diags.push(Diagnostic::error(1, 1, "missing `certificate <name>` statement"));
    }
    if !saw_removed {
        diags.push(Diagnostic::error(last, 1, "missing removed set"));
    }
    if !saw_fwd {
        diags.push(Diagnostic::error(last, 1, "missing forward"));
    }
    if !saw_inv {
        diags.push(Diagnostic::error(last, 1, "missing inverse"));
    }
    for branches in [&forward, &inverse] {
        for (j, (line, b)) in branches.iter().enumerate() {
            for (_, a) in &branches[..j] {
                if let Some(p) = conflict_witness(a, b, &host) {
                    diags.push(Diagnostic::error(
                        *line,
                        1,
                        format!("overlapping guards with conflicting images at {p}"),
                    ));
                }
            }
        }
    }
    if has_errors(&diags) {
        diags.sort_by_key(|d| (d.line, d.col));
        return Err(diags);
    }
    let strip = |v: Vec<(usize, Branch)>| PiecewiseMap::new(v.into_iter().map(|(_, b)| b).collect());
    Ok(Parsed {
        value: IsoCertificate {
            name: name.unwrap_or_default(),
            host,
            removed,
            forward: strip(forward),
            inverse: strip(inverse),
        },
        warnings: diags,
    })
}

/// Convenience used by tests and fixtures: parse or panic with diagnostics.
pub fn graph_or_panic(src: &str) -> GraphOracle {
    match parse_graph_spec(src) {
        Ok(p) => p.value,
        Err(d) => panic!("{}", d.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vertex::VertexId;

    const EX9: &str = "graph example9
sort v arity 1 where x1 >= 0
edge v(h) ~ v(n) when h = 0 and n >= 1
edge v(n) ~ v(m) when n >= 1 and m = n + 1
bound offset 0 slope 1
";

    fn v(n: i64) -> VertexId {
        VertexId::new("v", vec![n])
    }

    #[test]
    fn parses_and_round_trips() {
        let g = graph_or_panic(EX9);
        assert!(g.adjacent(&v(0), &v(5)).unwrap());
        assert!(g.adjacent(&v(2), &v(1)).unwrap());
        assert!(!g.adjacent(&v(1), &v(3)).unwrap());
        let text = emit_spec(&g);
        let h = graph_or_panic(&text);
        assert_eq!(emit_spec(&h), text);
        assert!(text.ends_with("slope 1\n"));
    }

    #[test]
    fn constant_and_repeated_patterns() {
        let g =
            graph_or_panic("graph t\nsort z arity 2\nedge z(k, n) ~ z(k, m) when m = n + 1\nedge z(0, n) ~ z(1, n)\n");
        let z = |k, n| VertexId::new("z", vec![k, n]);
        assert!(g.adjacent(&z(3, 4), &z(3, 5)).unwrap());
        assert!(!g.adjacent(&z(3, 4), &z(2, 5)).unwrap());
        assert!(g.adjacent(&z(1, 7), &z(0, 7)).unwrap());
        assert!(!g.adjacent(&z(2, 7), &z(1, 7)).unwrap());
    }

    #[test]
    fn diagnostics() {
        let d = parse_graph_spec("").unwrap_err();
        assert_eq!((d[0].line, d[0].col), (1, 1));
        let d = parse_graph_spec("graph g\nsort v arity 1\nedge v(n) ~ w(m)\n").unwrap_err();
        assert!(d[0].message.contains("`w`"), "{:?}", d);
        assert_eq!((d[0].line, d[0].col), (3, 13));
        let p = parse_graph_spec("graph g\nsort v arity 1 where x1 >= 1 and x1 <= 0\n").unwrap();
        assert_eq!(p.warnings.len(), 1);
        assert_eq!(p.warnings[0].severity, Severity::Warning);
    }

    #[test]
    fn certificate_parsing() {
        let g = Arc::new(graph_or_panic(EX9));
        let src = "certificate shift
removed v(1)
forward
map v(n) -> v(n) when n = 0
map v(n) -> v(n + 1) when n >= 1
inverse
map v(n) -> v(n) when n = 0
map v(n) -> v(n - 1) when n >= 2
";
        let c = parse_certificate_spec(src, g.clone()).unwrap().value;
        assert_eq!(c.forward.branches().len(), 2);
        assert_eq!(c.forward.apply(&v(4)), Some(v(5)));
        assert!(c.removed.contains(&v(1)));
        let no_inv = src.split("inverse").next().unwrap();
        let d = parse_certificate_spec(no_inv, g.clone()).unwrap_err();
        assert!(d.iter().any(|d| d.message == "missing inverse"));
        let conflict = "certificate bad\nremoved v(1)\nforward\nmap v(n) -> v(n)\nmap v(n) -> v(n + 1) when n >= 1\ninverse\nmap v(n) -> v(n)\n";
        let d = parse_certificate_spec(conflict, g.clone()).unwrap_err();
        assert!(d[0].message.contains("conflicting"));
        assert_eq!(d[0].line, 5);
        let unknown = "certificate bad\nremoved v(1)\nforward\nmap v(n) -> w(n)\ninverse\nmap v(n) -> v(n)\n";
        assert!(parse_certificate_spec(unknown, g).is_err());
    }

    #[test]
    fn vertex_set_text() {
        let g = graph_or_panic(EX9);
        let s = parse_vertex_set("v(1); v(n) when n >= 7", &g).unwrap();
        assert!(s.contains(&v(1)) && s.contains(&v(9)) && !s.contains(&v(3)));
        assert!(parse_vertex_set("w(1)", &g).is_err());
    }
}
