use std::fmt::Write as _;

use crate::embedding::IsoCertificate;
use crate::guard::{Atom, Guard, LinExpr, Var};
use crate::map::{Branch, PiecewiseMap};
use crate::oracle::{ComponentKey, GraphOracle};
use crate::vertex_set::VertexSet;

/// Variable namer: the first `split` variables get `left`, the rest `right`.
struct Names {
    split: usize,
    left: &'static str,
    right: &'static str,
}

impl Names {
    fn single(prefix: &'static str) -> Self {
        Names {
            split: usize::MAX,
            left: prefix,
            right: prefix,
        }
    }

    fn name(&self, v: Var) -> String {
        if v < self.split {
            format!("{}{}", self.left, v + 1)
        } else {
            format!("{}{}", self.right, v - self.split + 1)
        }
    }
}

fn linear_part(e: &LinExpr, names: &Names) -> String {
    let mut s = String::new();
    for (k, &(v, c)) in e.terms().iter().enumerate() {
        let sign = if c < 0 { "-" } else { "+" };
        let mag = c.unsigned_abs();
        if k == 0 {
            if c < 0 {
                s.push('-');
            }
        } else {
            let _ = write!(s, " {sign} ");
        }
        if mag != 1 {
            let _ = write!(s, "{mag}*");
        }
        s.push_str(&names.name(v));
    }
    s
}

fn expr(e: &LinExpr, names: &Names) -> String {
    let mut s = linear_part(e, names);
    let c = e.constant_term();
    if s.is_empty() {
        return c.to_string();
    }
    if c > 0 {
        let _ = write!(s, " + {c}");
    } else if c < 0 {
        let _ = write!(s, " - {}", c.unsigned_abs());
    }
    s
}

fn atom(a: &Atom, names: &Names) -> String {
    match a {
        Atom::Eq(e) => format!("{} = {}", linear_part(e, names), -e.constant_term()),
        Atom::Le(e) => format!("{} <= {}", linear_part(e, names), -e.constant_term()),
        Atom::Mod {
            expr: e,
            modulus,
            residue,
        } => format!("{} mod {} = {}", expr(e, names), modulus, residue),
        Atom::Bit { value, position, set } => format!(
            "{}bit({}, {})",
            if *set { "" } else { "not " },
            expr(value, names),
            expr(position, names)
        ),
    }
}

fn guard(g: &Guard, names: &Names) -> String {
    if g.is_true() {
        return "true".into();
    }
    if g.is_false() {
        return "false".into();
    }
    g.conjuncts()
        .iter()
        .map(|c| c.iter().map(|a| atom(a, names)).collect::<Vec<_>>().join(" and "))
        .collect::<Vec<_>>()
        .join(" or ")
}

fn pattern(sort: &str, arity: usize, names: &Names, base: usize) -> String {
    if arity == 0 {
        return format!("{sort}()");
    }
    let vars: Vec<String> = (0..arity).map(|k| names.name(base + k)).collect();
    format!("{sort}({})", vars.join(", "))
}

fn when(keyword: &str, g: &Guard, names: &Names) -> String {
    if g.is_true() {
        String::new()
    } else {
        format!(" {keyword} {}", guard(g, names))
    }
}

pub fn emit_guard(g: &Guard, prefix: &'static str) -> String {
    guard(g, &Names::single(prefix))
}

/// Canonical text of a graph oracle.
pub fn emit_spec(g: &GraphOracle) -> String {
    let mut out = String::new();
    let name = g.name().replace(['#', '\n'], " ");
    let _ = writeln!(out, "graph {}", name.trim());
    let xs = Names::single("x");
    for s in g.sorts() {
        let _ = writeln!(
            out,
            "sort {} arity {}{}",
            s.name,
            s.arity,
            when("where", &s.domain, &xs)
        );
    }
    for r in g.rules() {
        let a = g.sort(&r.left).map_or(0, |s| s.arity);
        let b = g.sort(&r.right).map_or(0, |s| s.arity);
        let names = Names {
            split: a,
            left: "x",
            right: "y",
        };
        let _ = writeln!(
            out,
            "edge {} ~ {}{}",
            pattern(&r.left, a, &names, 0),
            pattern(&r.right, b, &names, a),
            when("when", &r.guard, &names)
        );
    }
    let b = g.bound();
    let _ = writeln!(out, "bound offset {} slope {}", b.offset, b.slope);
    match g.components() {
        Some(ComponentKey::LeadingIndex) => out.push_str("components leading\n"),
        Some(ComponentKey::Factor) => out.push_str("components factor\n"),
        None => {}
    }
    out
}

pub fn emit_branch(b: &Branch) -> String {
    let xs = Names::single("x");
    let exprs: Vec<String> = b.exprs.iter().map(|e| expr(e, &xs)).collect();
    format!(
        "map {} -> {}({}){}",
        pattern(&b.source, b.source_arity, &xs, 0),
        b.target,
        exprs.join(", "),
        when("when", &b.guard, &xs)
    )
}

fn emit_map(out: &mut String, m: &PiecewiseMap) {
    for b in m.branches() {
        let _ = writeln!(out, "{}", emit_branch(b));
    }
}

pub fn emit_vertex_set(s: &VertexSet) -> Vec<String> {
    let xs = Names::single("x");
    s.clauses()
        .map(|(sort, c)| format!("{}{}", pattern(sort, c.arity, &xs, 0), when("when", &c.guard, &xs)))
        .collect()
}

/// Canonical text of a certificate; the host is not included.
pub fn emit_certificate(c: &IsoCertificate) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "certificate {}", c.name);
    for line in emit_vertex_set(&c.removed) {
        let _ = writeln!(out, "removed {line}");
    }
    out.push_str("forward\n");
    emit_map(&mut out, &c.forward);
    out.push_str("inverse\n");
    emit_map(&mut out, &c.inverse);
    out
}
