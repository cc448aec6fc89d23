//! Guarded linear arithmetic over integer index tuples.
//!
//! Guards are kept in disjunctive normal form. Atoms are linear equalities
//! and inequalities, congruences, and the `bit(i, j)` predicate. Every
//! constructor normalizes, so two guards built from equivalent pieces in the
//! same way compare equal and emit identical text.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

pub type Var = usize;

/// Highest bit position the `bit` predicate can test on 64-bit indices.
pub const MAX_BIT: i64 = 62;

/// `sum(coef * var) + constant`, terms sorted by variable with nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinExpr {
    terms: Vec<(Var, i64)>,
    constant: i64,
}

impl LinExpr {
    pub fn constant(c: i64) -> Self {
        LinExpr {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn var(v: Var) -> Self {
        Self::term(v, 1)
    }

    pub fn term(v: Var, coef: i64) -> Self {
        let terms = if coef == 0 { Vec::new() } else { vec![(v, coef)] };
        LinExpr { terms, constant: 0 }
    }

    pub fn from_parts(terms: impl IntoIterator<Item = (Var, i64)>, constant: i64) -> Self {
        let mut acc: BTreeMap<Var, i64> = BTreeMap::new();
        for (v, c) in terms {
            *acc.entry(v).or_default() += c;
        }
        LinExpr {
            terms: acc.into_iter().filter(|&(_, c)| c != 0).collect(),
            constant,
        }
    }

    pub fn terms(&self) -> &[(Var, i64)] {
        &self.terms
    }

    pub fn constant_term(&self) -> i64 {
        self.constant
    }

    pub fn coef(&self, v: Var) -> i64 {
        self.terms.iter().find(|&&(w, _)| w == v).map(|&(_, c)| c).unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.terms.iter().map(|&(v, _)| v)
    }

    pub fn plus(&self, c: i64) -> Self {
        let mut e = self.clone();
        e.constant += c;
        e
    }

    pub fn eval(&self, vals: &[i64]) -> i128 {
        self.terms
            .iter()
            .map(|&(v, c)| c as i128 * vals[v] as i128)
            .sum::<i128>()
            + self.constant as i128
    }

    /// Replaces variable `i` by `subs[i]`.
    pub fn substitute(&self, subs: &[LinExpr]) -> Self {
        let mut out = LinExpr::constant(self.constant);
        for &(v, c) in &self.terms {
            out = out + subs[v].clone() * c;
        }
        out
    }

    /// Renames variables through `f`.
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> Self {
        LinExpr::from_parts(self.terms.iter().map(|&(v, c)| (f(v), c)), self.constant)
    }

    fn gcd_of_coefs(&self) -> i64 {
        self.terms.iter().fold(0, |g, &(_, c)| gcd(g, c))
    }
}

impl Add for LinExpr {
    type Output = LinExpr;
    fn add(self, rhs: LinExpr) -> LinExpr {
        LinExpr::from_parts(self.terms.into_iter().chain(rhs.terms), self.constant + rhs.constant)
    }
}

impl Sub for LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: LinExpr) -> LinExpr {
        self + (-rhs)
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self * -1
    }
}

impl Mul<i64> for LinExpr {
    type Output = LinExpr;
    fn mul(self, k: i64) -> LinExpr {
        LinExpr::from_parts(self.terms.into_iter().map(|(v, c)| (v, c * k)), self.constant * k)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

/// `bit(value, position)`: binary digit `position` of `value` is 1.
/// Defined false for negative values and positions outside `0..=MAX_BIT`.
pub fn bit(value: i128, position: i128) -> bool {
    value >= 0 && (0..=MAX_BIT as i128).contains(&position) && (value >> position) & 1 == 1
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `expr = 0`
    Eq(LinExpr),
    /// `expr <= 0`
    Le(LinExpr),
    /// `expr ≡ residue (mod modulus)`; `expr` has no constant term.
    Mod { expr: LinExpr, modulus: i64, residue: i64 },
    /// `bit(value, position)` when `set`, its negation otherwise.
    Bit {
        value: LinExpr,
        position: LinExpr,
        set: bool,
    },
}

enum Truth {
    True,
    False,
    Atom(Atom),
}

impl Atom {
    pub fn eval(&self, vals: &[i64]) -> bool {
        match self {
            Atom::Eq(e) => e.eval(vals) == 0,
            Atom::Le(e) => e.eval(vals) <= 0,
            Atom::Mod { expr, modulus, residue } => expr.eval(vals).rem_euclid(*modulus as i128) == *residue as i128,
            Atom::Bit { value, position, set } => bit(value.eval(vals), position.eval(vals)) == *set,
        }
    }

    fn normalize(self) -> Truth {
        match self {
            Atom::Eq(e) => {
                if e.is_constant() {
                    return truth(e.constant == 0);
                }
                let g = e.gcd_of_coefs();
                if e.constant % g != 0 {
                    return Truth::False;
                }
                let mut e = LinExpr::from_parts(e.terms.iter().map(|&(v, c)| (v, c / g)), e.constant / g);
                if e.terms[0].1 < 0 {
                    e = -e;
                }
                Truth::Atom(Atom::Eq(e))
            }
            Atom::Le(e) => {
                if e.is_constant() {
                    return truth(e.constant <= 0);
                }
                let g = e.gcd_of_coefs();
                let constant = ceil_div(e.constant as i128, g as i128) as i64;
                Truth::Atom(Atom::Le(LinExpr::from_parts(
                    e.terms.iter().map(|&(v, c)| (v, c / g)),
                    constant,
                )))
            }
            Atom::Mod { expr, modulus, residue } => {
                if modulus == 1 {
                    return Truth::True;
                }
                let r = (residue - expr.constant).rem_euclid(modulus);
                let terms: Vec<_> = expr
                    .terms
                    .iter()
                    .map(|&(v, c)| (v, c.rem_euclid(modulus)))
                    .filter(|&(_, c)| c != 0)
                    .collect();
                if terms.is_empty() {
                    return truth(r == 0);
                }
                let g = terms.iter().fold(modulus, |g, &(_, c)| gcd(g, c));
                if r % g != 0 {
                    return Truth::False;
                }
                let modulus = modulus / g;
                if modulus == 1 {
                    return Truth::True;
                }
                Truth::Atom(Atom::Mod {
                    expr: LinExpr::from_parts(terms.into_iter().map(|(v, c)| (v, c / g)), 0),
                    modulus,
                    residue: r / g,
                })
            }
            Atom::Bit { value, position, set } => {
                if value.is_constant() && position.is_constant() {
                    truth(bit(value.constant as i128, position.constant as i128) == set)
                } else {
                    Truth::Atom(Atom::Bit { value, position, set })
                }
            }
        }
    }

    /// The negation as a disjunction of conjunctions.
    fn negate(&self) -> Guard {
        match self {
            Atom::Eq(e) => Guard::from_conjuncts(vec![vec![Atom::Le(e.plus(1))], vec![Atom::Le((-e.clone()).plus(1))]]),
            Atom::Le(e) => Guard::atom(Atom::Le((-e.clone()).plus(1))),
            Atom::Mod { expr, modulus, residue } => Guard::from_conjuncts(
                (0..*modulus)
                    .filter(|r| r != residue)
                    .map(|r| {
                        vec![Atom::Mod {
                            expr: expr.clone(),
                            modulus: *modulus,
                            residue: r,
                        }]
                    })
                    .collect(),
            ),
            Atom::Bit { value, position, set } => Guard::atom(Atom::Bit {
                value: value.clone(),
                position: position.clone(),
                set: !set,
            }),
        }
    }

    fn map_exprs(&self, f: impl Fn(&LinExpr) -> LinExpr) -> Atom {
        match self {
            Atom::Eq(e) => Atom::Eq(f(e)),
            Atom::Le(e) => Atom::Le(f(e)),
            Atom::Mod { expr, modulus, residue } => Atom::Mod {
                expr: f(expr),
                modulus: *modulus,
                residue: *residue,
            },
            Atom::Bit { value, position, set } => Atom::Bit {
                value: f(value),
                position: f(position),
                set: *set,
            },
        }
    }

    pub fn exprs(&self) -> Vec<&LinExpr> {
        match self {
            Atom::Eq(e) | Atom::Le(e) => vec![e],
            Atom::Mod { expr, .. } => vec![expr],
            Atom::Bit { value, position, .. } => vec![value, position],
        }
    }

    /// The single variable this atom mentions, if it mentions exactly one
    /// through a unit coefficient in a linear (in)equality.
    fn unit_var(&self) -> Option<(Var, i64)> {
        match self {
            Atom::Eq(e) | Atom::Le(e) if e.terms.len() == 1 && e.terms[0].1.abs() == 1 => Some(e.terms[0]),
            _ => None,
        }
    }
}

fn truth(b: bool) -> Truth {
    if b {
        Truth::True
    } else {
        Truth::False
    }
}

/// Simplifies a conjunction. `None` means unsatisfiable.
///
/// Single-variable constraints are merged into intervals, variables pinned to
/// a constant are substituted into the remaining atoms, and the result is
/// sorted and deduplicated.
pub fn simplify_conjunct(atoms: Vec<Atom>) -> Option<Vec<Atom>> {
    let mut atoms = atoms;
    loop {
        let mut rest = Vec::new();
        let mut lo: BTreeMap<Var, i64> = BTreeMap::new();
        let mut hi: BTreeMap<Var, i64> = BTreeMap::new();
        for a in atoms {
            let a = match a.normalize() {
                Truth::True => continue,
                Truth::False => return None,
                Truth::Atom(a) => a,
            };
            match (&a, a.unit_var()) {
                (Atom::Eq(e), Some((v, _))) => {
                    // coefficient normalized to +1
                    let c = -e.constant;
                    tighten_lo(&mut lo, v, c);
                    tighten_hi(&mut hi, v, c);
                }
                (Atom::Le(e), Some((v, 1))) => tighten_hi(&mut hi, v, -e.constant),
                (Atom::Le(e), Some((v, _))) => tighten_lo(&mut lo, v, e.constant),
                _ => rest.push(a),
            }
        }
        let mut pinned: BTreeMap<Var, i64> = BTreeMap::new();
        for (&v, &l) in &lo {
            if let Some(&h) = hi.get(&v) {
                if l > h {
                    return None;
                }
                if l == h {
                    pinned.insert(v, l);
                }
            }
        }
        let needs_subst = rest
            .iter()
            .any(|a| a.exprs().iter().any(|e| e.vars().any(|v| pinned.contains_key(&v))));
        let mut out = Vec::new();
        for (&v, &l) in &lo {
            if pinned.contains_key(&v) {
                out.push(Atom::Eq(LinExpr::var(v).plus(-l)));
            } else {
                out.push(Atom::Le((-LinExpr::var(v)).plus(l)));
            }
        }
        for (&v, &h) in &hi {
            if !pinned.contains_key(&v) {
                out.push(Atom::Le(LinExpr::var(v).plus(-h)));
            }
        }
        if needs_subst {
            let subst = |e: &LinExpr| {
                let mut r = LinExpr::constant(e.constant);
                for &(v, c) in &e.terms {
                    match pinned.get(&v) {
                        Some(&p) => r.constant += c * p,
                        None => r = r + LinExpr::term(v, c),
                    }
                }
                r
            };
            out.extend(rest.iter().map(|a| a.map_exprs(subst)));
            atoms = out;
            continue;
        }
        out.extend(rest);
        out.sort();
        out.dedup();
        return Some(out);
    }
}

fn tighten_lo(lo: &mut BTreeMap<Var, i64>, v: Var, c: i64) {
    let e = lo.entry(v).or_insert(c);
    *e = (*e).max(c);
}

fn tighten_hi(hi: &mut BTreeMap<Var, i64>, v: Var, c: i64) {
    let e = hi.entry(v).or_insert(c);
    *e = (*e).min(c);
}

/// A guard in disjunctive normal form. No conjuncts means `false`; a single
/// empty conjunct means `true`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Guard {
    conjuncts: Vec<Vec<Atom>>,
}

impl Guard {
    pub fn always() -> Self {
        Guard {
            conjuncts: vec![Vec::new()],
        }
    }

    pub fn never() -> Self {
        Guard { conjuncts: Vec::new() }
    }

    pub fn atom(a: Atom) -> Self {
        Self::from_conjuncts(vec![vec![a]])
    }

    pub fn from_conjuncts(conjuncts: Vec<Vec<Atom>>) -> Self {
        let mut cs: Vec<Vec<Atom>> = conjuncts.into_iter().filter_map(simplify_conjunct).collect();
        if cs.iter().any(|c| c.is_empty()) {
            return Self::always();
        }
        cs.sort();
        cs.dedup();
        // drop conjuncts implied by a weaker one (superset of atoms)
        let keep: Vec<bool> = (0..cs.len())
            .map(|i| {
                !(0..cs.len()).any(|j| j != i && cs[j].len() < cs[i].len() && cs[j].iter().all(|a| cs[i].contains(a)))
            })
            .collect();
        let conjuncts = cs.into_iter().zip(keep).filter_map(|(c, k)| k.then_some(c)).collect();
        Guard { conjuncts }
    }

    /// All equalities `var_i = values[i]`.
    pub fn point(values: &[i64]) -> Self {
        Self::from_conjuncts(vec![values
            .iter()
            .enumerate()
            .map(|(i, &c)| Atom::Eq(LinExpr::var(i).plus(-c)))
            .collect()])
    }

    pub fn conjuncts(&self) -> &[Vec<Atom>] {
        &self.conjuncts
    }

    pub fn is_true(&self) -> bool {
        self.conjuncts.len() == 1 && self.conjuncts[0].is_empty()
    }

    pub fn is_false(&self) -> bool {
        self.conjuncts.is_empty()
    }

    pub fn eval(&self, vals: &[i64]) -> bool {
        self.conjuncts.iter().any(|c| c.iter().all(|a| a.eval(vals)))
    }

    pub fn and(&self, other: &Guard) -> Guard {
        let mut out = Vec::new();
        for a in &self.conjuncts {
            for b in &other.conjuncts {
                let mut c = a.clone();
                c.extend(b.iter().cloned());
                out.push(c);
            }
        }
        Guard::from_conjuncts(out)
    }

    pub fn or(&self, other: &Guard) -> Guard {
        let mut out = self.conjuncts.clone();
        out.extend(other.conjuncts.iter().cloned());
        Guard::from_conjuncts(out)
    }

    pub fn not(&self) -> Guard {
        let mut acc = Guard::always();
        for c in &self.conjuncts {
            let mut neg = Guard::never();
            for a in c {
                neg = neg.or(&a.negate());
            }
            acc = acc.and(&neg);
            if acc.is_false() {
                break;
            }
        }
        acc
    }

    pub fn substitute(&self, subs: &[LinExpr]) -> Guard {
        Guard::from_conjuncts(
            self.conjuncts
                .iter()
                .map(|c| c.iter().map(|a| a.map_exprs(|e| e.substitute(subs))).collect())
                .collect(),
        )
    }

    pub fn rename(&self, f: impl Fn(Var) -> Var + Copy) -> Guard {
        Guard::from_conjuncts(
            self.conjuncts
                .iter()
                .map(|c| c.iter().map(|a| a.map_exprs(|e| e.rename(f))).collect())
                .collect(),
        )
    }

    /// Highest variable mentioned, if any.
    pub fn max_var(&self) -> Option<Var> {
        self.conjuncts
            .iter()
            .flatten()
            .flat_map(|a| a.exprs().into_iter().flat_map(|e| e.vars()).collect::<Vec<_>>())
            .max()
    }
}

/// Per-variable integer bounds implied by the linear part of a conjunction,
/// computed by Fourier–Motzkin elimination over the rationals.
///
/// Returns `None` when the linear part is infeasible. A `None` bound means
/// the variable was not shown to be bounded in that direction.
pub fn var_bounds(atoms: &[Atom], nvars: usize) -> Option<Vec<(Option<i64>, Option<i64>)>> {
    // rows: coefs . x + c <= 0
    let mut rows: Vec<(Vec<i128>, i128)> = Vec::new();
    let mut push = |e: &LinExpr, sign: i128| {
        let mut coefs = vec![0i128; nvars];
        for &(v, c) in e.terms() {
            coefs[v] = sign * c as i128;
        }
        rows.push((coefs, sign * e.constant_term() as i128));
    };
    for a in atoms {
        match a {
            Atom::Eq(e) => {
                push(e, 1);
                push(e, -1);
            }
            Atom::Le(e) => push(e, 1),
            Atom::Bit {
                value,
                position,
                set: true,
            } => {
                push(value, -1);
                push(position, -1);
                push(&position.plus(-MAX_BIT), 1);
            }
            _ => {}
        }
    }
    const CAP: usize = 4096;
    let mut out = Vec::with_capacity(nvars);
    for target in 0..nvars {
        let mut cur = rows.clone();
        let mut gave_up = false;
        for elim in (0..nvars).filter(|&v| v != target) {
            let (mut pos, mut neg, mut zero) = (Vec::new(), Vec::new(), Vec::new());
            for r in cur {
                match r.0[elim].signum() {
                    1 => pos.push(r),
                    -1 => neg.push(r),
                    _ => zero.push(r),
                }
            }
            if pos.len() * neg.len() + zero.len() > CAP {
                gave_up = true;
                cur = zero;
                break;
            }
            for p in &pos {
                for n in &neg {
                    let (a, b) = (p.0[elim], -n.0[elim]);
                    let mut coefs: Vec<i128> = p.0.iter().zip(&n.0).map(|(x, y)| b * x + a * y).collect();
                    let mut c = b * p.1 + a * n.1;
                    let g = coefs.iter().fold(0i128, |g, &x| gcd128(g, x));
                    if g > 1 {
                        coefs.iter_mut().for_each(|x| *x /= g);
                        c = ceil_div(c, g);
                    }
                    zero.push((coefs, c));
                }
            }
            cur = zero;
        }
        let (mut lo, mut hi): (Option<i128>, Option<i128>) = (None, None);
        for (coefs, c) in &cur {
            let a = coefs[target];
            if coefs.iter().enumerate().any(|(i, &x)| i != target && x != 0) {
                continue;
            }
            if a == 0 {
                if *c > 0 && !gave_up {
                    return None;
                }
            } else if a > 0 {
                let h = floor_div(-c, a);
                hi = Some(hi.map_or(h, |x| x.min(h)));
            } else {
                let l = ceil_div(*c, -a);
                lo = Some(lo.map_or(l, |x| x.max(l)));
            }
        }
        if let (Some(l), Some(h)) = (lo, hi) {
            if l > h {
                return None;
            }
        }
        let clamp = |x: i128| x.clamp(i64::MIN as i128, i64::MAX as i128) as i64;
        out.push((lo.map(clamp), hi.map(clamp)));
    }
    Some(out)
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Calls `f` on every integer point of the box `[lo_i, hi_i]`.
/// Stops early when `f` returns false.
pub fn for_each_point(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64]) -> bool) {
    if ranges.iter().any(|&(l, h)| l > h) {
        return;
    }
    let mut p: Vec<i64> = ranges.iter().map(|&(l, _)| l).collect();
    loop {
        if !f(&p) {
            return;
        }
        let mut k = ranges.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if p[k] < ranges[k].1 {
                p[k] += 1;
                break;
            }
            p[k] = ranges[k].0;
        }
    }
}

pub fn box_size(ranges: &[(i64, i64)]) -> u128 {
    ranges
        .iter()
        .map(|&(l, h)| if h < l { 0 } else { (h as i128 - l as i128 + 1) as u128 })
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(v: Var) -> LinExpr {
        LinExpr::var(v)
    }

    #[test]
    fn intervals_merge_and_pin() {
        // x0 >= 2 and x0 <= 2 and x0 + x1 = 5  ->  x0 = 2, x1 = 3
        let g = Guard::from_conjuncts(vec![vec![
            Atom::Le((-x(0)).plus(2)),
            Atom::Le(x(0).plus(-2)),
            Atom::Eq(x(0) + x(1) - LinExpr::constant(5)),
        ]]);
        assert_eq!(g, Guard::point(&[2, 3]));
    }

    #[test]
    fn empty_interval_is_false() {
        let g = Guard::from_conjuncts(vec![vec![Atom::Le((-x(0)).plus(3)), Atom::Le(x(0).plus(-2))]]);
        assert!(g.is_false());
    }

    #[test]
    fn mod_normalization() {
        // 2x ≡ 1 (mod 4) has no solution
        let a = Atom::Mod {
            expr: x(0) * 2,
            modulus: 4,
            residue: 1,
        };
        assert!(Guard::atom(a).is_false());
        // 3x ≡ 3 (mod 6)  <=>  x ≡ 1 (mod 2)
        let b = Guard::atom(Atom::Mod {
            expr: x(0) * 3,
            modulus: 6,
            residue: 3,
        });
        assert!(b.eval(&[5]) && !b.eval(&[4]));
    }

    #[test]
    fn not_of_equality() {
        let g = Guard::atom(Atom::Eq(x(0).plus(-1))).not();
        assert!(g.eval(&[0]) && !g.eval(&[1]) && g.eval(&[2]));
    }

    #[test]
    fn bounds_through_elimination() {
        // y >= x0, z >= x1, y + z = 7 with x0 = 1, x1 = 2 substituted:
        // vars 0,1: v0 >= 1, v1 >= 2, v0 + v1 = 7  ->  v0 in [1,5], v1 in [2,6]
        let atoms = vec![
            Atom::Le((-x(0)).plus(1)),
            Atom::Le((-x(1)).plus(2)),
            Atom::Eq(x(0) + x(1) - LinExpr::constant(7)),
        ];
        let b = var_bounds(&atoms, 2).unwrap();
        assert_eq!(b, vec![(Some(1), Some(5)), (Some(2), Some(6))]);
        let open = var_bounds(&[Atom::Le((-x(0)).plus(1))], 1).unwrap();
        assert_eq!(open, vec![(Some(1), None)]);
    }

    #[test]
    fn bit_predicate() {
        assert!(bit(5, 0) && !bit(5, 1) && bit(5, 2));
        assert!(!bit(-1, 0) && !bit(1, 63));
    }

    fn small_guard() -> impl Strategy<Value = Guard> {
        let atom = prop_oneof![
            (-3i64..=3, -3i64..=3, -4i64..=4).prop_map(|(a, b, c)| Atom::Le(LinExpr::from_parts([(0, a), (1, b)], c))),
            (-3i64..=3, -3i64..=3, -4i64..=4).prop_map(|(a, b, c)| Atom::Eq(LinExpr::from_parts([(0, a), (1, b)], c))),
            (1i64..=3, 2i64..=4, 0i64..4).prop_map(|(a, m, r)| Atom::Mod {
                expr: LinExpr::term(0, a),
                modulus: m,
                residue: r % m
            }),
        ];
        prop::collection::vec(prop::collection::vec(atom, 0..3), 0..3).prop_map(Guard::from_conjuncts)
    }

    fn raw_eval(conjs: &[Vec<Atom>], p: &[i64]) -> bool {
        conjs.iter().any(|c| c.iter().all(|a| a.eval(p)))
    }

    proptest! {
        #[test]
        fn negation_is_pointwise(g in small_guard()) {
            let n = g.not();
            for_each_point(&[(-6, 6), (-6, 6)], |p| {
                assert_ne!(g.eval(p), n.eval(p));
                true
            });
        }

        #[test]
        fn normalization_preserves_semantics(
            conjs in prop::collection::vec(prop::collection::vec(
                (-3i64..=3, -3i64..=3, -4i64..=4, 0u8..3).prop_map(|(a, b, c, k)| {
                    let e = LinExpr::from_parts([(0, a), (1, b)], c);
                    match k { 0 => Atom::Le(e), 1 => Atom::Eq(e), _ => Atom::Mod { expr: e, modulus: 3, residue: 1 } }
                }), 0..4), 0..3)
        ) {
            let g = Guard::from_conjuncts(conjs.clone());
            for_each_point(&[(-6, 6), (-6, 6)], |p| {
                assert_eq!(g.eval(p), raw_eval(&conjs, p));
                true
            });
        }

        #[test]
        fn bounds_contain_all_solutions(g in small_guard()) {
            for c in g.conjuncts() {
                let b = var_bounds(c, 2);
                for_each_point(&[(-8, 8), (-8, 8)], |p| {
                    if c.iter().all(|a| a.eval(p)) {
                        let b = b.as_ref().expect("feasible conjunct reported infeasible");
                        for (i, &(lo, hi)) in b.iter().enumerate() {
                            assert!(lo.is_none_or(|l| p[i] >= l));
                            assert!(hi.is_none_or(|h| p[i] <= h));
                        }
                    }
                    true
                });
            }
        }
    }
}
