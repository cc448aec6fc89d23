//! Guard and expression grammar shared by graph and certificate files.
//!
//! Expressions may contain `|e|`; they are kept as piecewise-linear case
//! lists and flattened into DNF when compared.

use super::lexer::{Spanned, Tok};
use super::Diagnostic;
use crate::guard::{Atom, Guard, LinExpr, Var};

pub type PResult<T> = Result<T, Diagnostic>;

const KEYWORDS: &[&str] = &["and", "or", "not", "true", "false", "bit", "mod", "when", "where"];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

pub struct Cursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(toks: &'a [Spanned], line: usize, end_col: usize) -> Self {
        Cursor {
            toks,
            pos: 0,
            line,
            end_col,
        }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    pub fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |s| s.col)
    }

    pub fn err(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(self.line, self.col(), msg)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_kw(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn peek_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    pub fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    pub fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    pub fn unexpected(&self, wanted: &str) -> Diagnostic {
        match self.peek() {
            Some(t) => self.err(format!("expected {wanted}, found {}", t.describe())),
            None => self.err(format!("expected {wanted}, found end of line")),
        }
    }

    /// Identifier with its column.
    pub fn ident(&mut self, what: &str) -> PResult<(String, usize)> {
        let col = self.col();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok((s, col))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    pub fn int(&mut self) -> PResult<i64> {
        let neg = self.eat(&Tok::Minus);
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(if neg { -n } else { n })
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    pub fn finish(&self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }
}

/// Variable names in scope, mapped to guard variables.
#[derive(Default, Clone)]
pub struct Scope {
    names: Vec<(String, Var)>,
}

impl Scope {
    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.names.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }

    pub fn bind(&mut self, name: &str, var: Var) {
        self.names.push((name.to_string(), var));
    }

    pub fn numbered(prefix: &str, base: Var, n: usize) -> Self {
        let mut s = Scope::default();
        for k in 0..n {
            s.bind(&format!("{prefix}{}", k + 1), base + k);
        }
        s
    }
}

/// Piecewise-linear expression: `(condition, value)` cases.
type Pw = Vec<(Vec<Atom>, LinExpr)>;

fn pw_const(p: &Pw) -> Option<i64> {
    match p.as_slice() {
        [(c, e)] if c.is_empty() && e.is_constant() => Some(e.constant_term()),
        _ => None,
    }
}

fn pw_combine(a: &Pw, b: &Pw, f: impl Fn(&LinExpr, &LinExpr) -> LinExpr) -> Pw {
    let mut out = Vec::new();
    for (ca, ea) in a {
        for (cb, eb) in b {
            let mut c = ca.clone();
            c.extend(cb.iter().cloned());
            out.push((c, f(ea, eb)));
        }
    }
    out
}

pub fn parse_guard(c: &mut Cursor, scope: &Scope) -> PResult<Guard> {
    let mut g = parse_and(c, scope)?;
    while c.eat_kw("or") {
        g = g.or(&parse_and(c, scope)?);
    }
    Ok(g)
}

fn parse_and(c: &mut Cursor, scope: &Scope) -> PResult<Guard> {
    let mut g = parse_unary(c, scope)?;
    while c.eat_kw("and") {
        g = g.and(&parse_unary(c, scope)?);
    }
    Ok(g)
}

fn parse_unary(c: &mut Cursor, scope: &Scope) -> PResult<Guard> {
    if c.eat_kw("not") {
        return Ok(parse_unary(c, scope)?.not());
    }
    parse_primary(c, scope)
}

fn parse_primary(c: &mut Cursor, scope: &Scope) -> PResult<Guard> {
    if c.eat_kw("true") {
        return Ok(Guard::always());
    }
    if c.eat_kw("false") {
        return Ok(Guard::never());
    }
    if c.eat_kw("bit") {
        c.expect(Tok::LParen)?;
        let value = parse_expr(c, scope)?;
        c.expect(Tok::Comma)?;
        let position = parse_expr(c, scope)?;
        c.expect(Tok::RParen)?;
        let mut conj = Vec::new();
        for (cv, ev) in &value {
            for (cp, ep) in &position {
                let mut atoms = cv.clone();
                atoms.extend(cp.iter().cloned());
                atoms.push(Atom::Bit {
                    value: ev.clone(),
                    position: ep.clone(),
                    set: true,
                });
                conj.push(atoms);
            }
        }
        return Ok(Guard::from_conjuncts(conj));
    }
    if c.peek() == Some(&Tok::LParen) {
        let save = c.pos;
        c.pos += 1;
        if let Ok(g) = parse_guard(c, scope) {
            if c.eat(&Tok::RParen) && !starts_expr_continuation(c) {
                return Ok(g);
            }
        }
        c.pos = save;
    }
    parse_comparison(c, scope)
}

fn starts_expr_continuation(c: &Cursor) -> bool {
    matches!(
        c.peek(),
        Some(Tok::Plus | Tok::Minus | Tok::Star | Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge)
    ) || c.peek_kw("mod")
}

#[derive(Clone, Copy)]
enum Rel {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

fn rel_of(t: Option<&Tok>) -> Option<Rel> {
    Some(match t? {
        Tok::Eq => Rel::Eq,
        Tok::Ne => Rel::Ne,
        Tok::Lt => Rel::Lt,
        Tok::Le => Rel::Le,
        Tok::Gt => Rel::Gt,
        Tok::Ge => Rel::Ge,
        _ => return None,
    })
}

/// Conjunct alternatives for `d rel 0`.
fn rel_atoms(rel: Rel, d: LinExpr) -> Vec<Vec<Atom>> {
    match rel {
        Rel::Eq => vec![vec![Atom::Eq(d)]],
        Rel::Ne => vec![vec![Atom::Le(d.plus(1))], vec![Atom::Le((-d).plus(1))]],
        Rel::Le => vec![vec![Atom::Le(d)]],
        Rel::Lt => vec![vec![Atom::Le(d.plus(1))]],
        Rel::Ge => vec![vec![Atom::Le(-d)]],
        Rel::Gt => vec![vec![Atom::Le((-d).plus(1))]],
    }
}

fn compare(a: &Pw, rel: Rel, b: &Pw) -> Guard {
    let mut conj = Vec::new();
    for (cond, d) in pw_combine(a, b, |x, y| x.clone() - y.clone()) {
        for alt in rel_atoms(rel, d) {
            let mut atoms = cond.clone();
            atoms.extend(alt);
            conj.push(atoms);
        }
    }
    Guard::from_conjuncts(conj)
}

fn parse_comparison(c: &mut Cursor, scope: &Scope) -> PResult<Guard> {
    let lhs = parse_expr(c, scope)?;
    if c.eat_kw("mod") {
        let m_col = c.col();
        let m = c.int()?;
        if m <= 0 {
            return Err(Diagnostic::error(c.line, m_col, "modulus must be positive"));
        }
        let rel = match rel_of(c.peek()) {
            Some(r @ (Rel::Eq | Rel::Ne)) => r,
            _ => return Err(c.unexpected("`=` or `!=` after modulus")),
        };
        c.pos += 1;
        let rhs = parse_expr(c, scope)?;
        let mut conj = Vec::new();
        for (cond, d) in pw_combine(&lhs, &rhs, |x, y| x.clone() - y.clone()) {
            let mut atoms = cond;
            atoms.push(Atom::Mod {
                expr: d,
                modulus: m,
                residue: 0,
            });
            conj.push(atoms);
        }
        let g = Guard::from_conjuncts(conj);
        return Ok(match rel {
            Rel::Eq => g,
            _ => g.not(),
        });
    }
    let Some(first) = rel_of(c.peek()) else {
        return Err(c.unexpected("a comparison operator"));
    };
    c.pos += 1;
    let mut left = lhs;
    let mut rel = first;
    let mut g = Guard::always();
    loop {
        let right = parse_expr(c, scope)?;
        g = g.and(&compare(&left, rel, &right));
        match rel_of(c.peek()) {
            Some(r) => {
                c.pos += 1;
                rel = r;
                left = right;
            }
            None => break,
        }
    }
    Ok(g)
}

fn parse_expr(c: &mut Cursor, scope: &Scope) -> PResult<Pw> {
    let mut acc = parse_term(c, scope)?;
    loop {
        if c.eat(&Tok::Plus) {
            let t = parse_term(c, scope)?;
            acc = pw_combine(&acc, &t, |a, b| a.clone() + b.clone());
        } else if c.eat(&Tok::Minus) {
            let t = parse_term(c, scope)?;
            acc = pw_combine(&acc, &t, |a, b| a.clone() - b.clone());
        } else {
            return Ok(acc);
        }
    }
}

fn scale(p: &Pw, k: i64) -> Pw {
    p.iter().map(|(c, e)| (c.clone(), e.clone() * k)).collect()
}

fn parse_term(c: &mut Cursor, scope: &Scope) -> PResult<Pw> {
    let mut acc = parse_factor(c, scope)?;
    while c.peek() == Some(&Tok::Star) {
        let col = c.col();
        c.pos += 1;
        let rhs = parse_factor(c, scope)?;
        acc = match (pw_const(&acc), pw_const(&rhs)) {
            (Some(k), _) => scale(&rhs, k),
            (_, Some(k)) => scale(&acc, k),
            _ => {
                return Err(Diagnostic::error(
                    c.line,
                    col,
                    "nonlinear product: one factor must be a constant",
                ))
            }
        };
    }
    Ok(acc)
}

fn parse_factor(c: &mut Cursor, scope: &Scope) -> PResult<Pw> {
    let col = c.col();
    match c.bump() {
        Some(Tok::Minus) => Ok(scale(&parse_factor(c, scope)?, -1)),
        Some(Tok::Int(n)) => Ok(vec![(Vec::new(), LinExpr::constant(n))]),
        Some(Tok::Ident(name)) => {
            if is_keyword(&name) {
                return Err(Diagnostic::error(c.line, col, format!("unexpected keyword `{name}`")));
            }
            match scope.lookup(&name) {
                Some(v) => Ok(vec![(Vec::new(), LinExpr::var(v))]),
                None => Err(Diagnostic::error(c.line, col, format!("unknown variable `{name}`"))),
            }
        }
        Some(Tok::LParen) => {
            let e = parse_expr(c, scope)?;
            c.expect(Tok::RParen)?;
            Ok(e)
        }
        Some(Tok::Bar) => {
            let e = parse_expr(c, scope)?;
            c.expect(Tok::Bar)?;
            let mut out = Vec::new();
            for (cond, x) in e {
                let mut pos = cond.clone();
                pos.push(Atom::Le(-x.clone()));
                out.push((pos, x.clone()));
                let mut neg = cond;
                neg.push(Atom::Le(x.plus(1)));
                out.push((neg, -x));
            }
            Ok(out)
        }
        _ => {
            c.pos -= 1;
            Err(c.unexpected("an expression"))
        }
    }
}

/// Parses an expression that must be affine (no `|.|`).
pub fn parse_affine(c: &mut Cursor, scope: &Scope) -> PResult<LinExpr> {
    let col = c.col();
    let p = parse_expr(c, scope)?;
    match <[_; 1]>::try_from(p) {
        Ok([(cond, e)]) if cond.is_empty() => Ok(e),
        _ => Err(Diagnostic::error(c.line, col, "map images must be affine expressions")),
    }
}

/// One pattern position: a variable name or an integer constant.
pub enum Pat {
    Var(String),
    Const(i64),
}

/// `sort(p1, ..., pk)`; returns the sort name with its column and the patterns.
pub fn parse_pattern(c: &mut Cursor) -> PResult<((String, usize), Vec<Pat>)> {
    let sort = c.ident("a sort name")?;
    let mut pats = Vec::new();
    if !c.eat(&Tok::LParen) {
        return Ok((sort, pats));
    }
    if c.eat(&Tok::RParen) {
        return Ok((sort, pats));
    }
    loop {
        match c.peek() {
            Some(Tok::Ident(name)) => {
                if is_keyword(name) {
                    return Err(c.err(format!("keyword `{name}` cannot be a variable")));
                }
                pats.push(Pat::Var(name.clone()));
                c.pos += 1;
            }
            Some(Tok::Int(_) | Tok::Minus) => pats.push(Pat::Const(c.int()?)),
            _ => return Err(c.unexpected("a variable or integer")),
        }
        if c.eat(&Tok::Comma) {
            continue;
        }
        c.expect(Tok::RParen)?;
        return Ok((sort, pats));
    }
}

/// Binds pattern variables starting at `base`; repeated names and constants
/// become equality atoms.
pub fn bind_patterns(pats: &[Pat], base: Var, scope: &mut Scope) -> Vec<Atom> {
    let mut atoms = Vec::new();
    for (k, p) in pats.iter().enumerate() {
        let v = base + k;
        match p {
            Pat::Var(name) => match scope.lookup(name) {
                Some(prev) => atoms.push(Atom::Eq(LinExpr::var(v) - LinExpr::var(prev))),
                None => scope.bind(name, v),
            },
            Pat::Const(n) => atoms.push(Atom::Eq(LinExpr::var(v).plus(-n))),
        }
    }
    atoms
}
