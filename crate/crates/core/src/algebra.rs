//! The supercommutative algebra of differential polynomials in one even
//! dependent variable `u` and one odd dependent variable `θ`, with a central
//! even parameter `λ` adjoined.
//!
//! A [`Monomial`] is `λ^k u^a (u¹)^{b₁} (u²)^{b₂} … θ^{s₁} θ^{s₂} …` with the
//! odd factors kept in strictly increasing jet order; every sign produced by
//! reordering odd factors is folded into the coefficient of the enclosing
//! [`DiffPoly`]. Coefficients are exact rationals.
//!
//! Two gradings are carried by every monomial: the standard degree `d`
//! (jet order, `deg u^s = deg θ^s = s`) and the super degree `p` (number of
//! odd factors). A third, auxiliary grading, the polynomial weight
//! `λ-power + u-power + number of even jet factors`, is what the windowed
//! linear algebra truncates on.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::ParseError;

/// Exact scalars.
pub type Rational = num_rational::BigRational;

/// Shorthand for the rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A generator of the algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// The central parameter `λ`.
    Lambda,
    /// The even jet `u^s`; `U(0)` is `u` itself.
    U(u32),
    /// The odd jet `θ^s`; `Theta(0)` is `θ`.
    Theta(u32),
}

impl Var {
    pub fn is_odd(self) -> bool {
        matches!(self, Var::Theta(_))
    }

    /// Jet order; `λ` counts as order 0.
    pub fn order(self) -> u32 {
        match self {
            Var::Lambda => 0,
            Var::U(s) | Var::Theta(s) => s,
        }
    }
}

/// `(p, d)`: super degree and standard degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bidegree {
    pub p: u32,
    pub d: u32,
}

impl Bidegree {
    pub const fn new(p: u32, d: u32) -> Self {
        Bidegree { p, d }
    }

    /// `Â^p_d` vanishes identically below `d = p(p-1)/2`.
    pub fn is_trivially_zero(self) -> bool {
        (self.d as u64) < (self.p as u64) * (self.p as u64).saturating_sub(1) / 2
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.d)
    }
}

/// Canonical monomial. The derived ordering is the canonical term order:
/// λ-power, then u-power, then even jets by ascending order, then odd jets.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    lambda: u32,
    u: u32,
    /// `(s, e)` with `s ≥ 1`, `e ≥ 1`, strictly increasing in `s`.
    even: Vec<(u32, u32)>,
    /// Strictly increasing jet orders of the odd factors.
    odd: Vec<u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    /// Builds a monomial from raw parts. Even jets are merged, odd jets are
    /// sorted; returns the sign of the sorting permutation, or `None` when
    /// an odd jet repeats.
    pub fn from_parts(
        lambda: u32,
        u: u32,
        even: impl IntoIterator<Item = (u32, u32)>,
        odd: impl IntoIterator<Item = u32>,
    ) -> Option<(bool, Monomial)> {
        let mut m = Monomial { lambda, u, even: Vec::new(), odd: Vec::new() };
        for (s, e) in even {
            m.bump_even(s, e as i64);
        }
        let mut odd: Vec<u32> = odd.into_iter().collect();
        // bubble sort keeps the transposition count honest
        let mut negative = false;
        for i in 0..odd.len() {
            for j in 0..odd.len() - 1 - i {
                if odd[j] > odd[j + 1] {
                    odd.swap(j, j + 1);
                    negative = !negative;
                }
            }
        }
        if odd.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        m.odd = odd;
        Some((negative, m))
    }

    pub fn var(v: Var) -> Self {
        let mut m = Monomial::one();
        match v {
            Var::Lambda => m.lambda = 1,
            Var::U(0) => m.u = 1,
            Var::U(s) => m.even.push((s, 1)),
            Var::Theta(s) => m.odd.push(s),
        }
        m
    }

    pub fn lambda_exp(&self) -> u32 {
        self.lambda
    }

    pub fn u_exp(&self) -> u32 {
        self.u
    }

    pub fn even_jets(&self) -> &[(u32, u32)] {
        &self.even
    }

    pub fn odd_vars(&self) -> &[u32] {
        &self.odd
    }

    /// Exponent of `v` in this monomial (0 or 1 for odd variables).
    pub fn exponent(&self, v: Var) -> u32 {
        match v {
            Var::Lambda => self.lambda,
            Var::U(0) => self.u,
            Var::U(s) => self.even.iter().find(|(t, _)| *t == s).map_or(0, |(_, e)| *e),
            Var::Theta(s) => self.odd.contains(&s) as u32,
        }
    }

    /// Standard degree `d`.
    pub fn degree(&self) -> u32 {
        self.even.iter().map(|(s, e)| s * e).sum::<u32>() + self.odd.iter().sum::<u32>()
    }

    /// Super degree `p`.
    pub fn super_degree(&self) -> u32 {
        self.odd.len() as u32
    }

    pub fn bidegree(&self) -> Bidegree {
        Bidegree::new(self.super_degree(), self.degree())
    }

    /// `u`-power plus the number of even jet factors: the polynomial degree
    /// in the even variables `u, u¹, u², …`.
    pub fn even_weight(&self) -> u32 {
        self.u + self.even.iter().map(|(_, e)| e).sum::<u32>()
    }

    /// `λ`-power plus [`Monomial::even_weight`]. Preserved by `∂`, by `D₂`
    /// and by `D_λ`; lowered by one by `D₁`.
    pub fn weight(&self) -> u32 {
        self.lambda + self.even_weight()
    }

    /// Highest jet order present; `u`, `θ` and `λ` have order 0.
    pub fn max_order(&self) -> u32 {
        let e = self.even.last().map_or(0, |(s, _)| *s);
        let o = self.odd.last().copied().unwrap_or(0);
        e.max(o)
    }

    /// Variables present, each listed once.
    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        let l = (self.lambda > 0).then_some(Var::Lambda);
        let u = (self.u > 0).then_some(Var::U(0));
        l.into_iter()
            .chain(u)
            .chain(self.even.iter().map(|(s, _)| Var::U(*s)))
            .chain(self.odd.iter().map(|s| Var::Theta(*s)))
    }

    fn bump_even(&mut self, s: u32, delta: i64) {
        if s == 0 {
            self.u = (self.u as i64 + delta) as u32;
            return;
        }
        match self.even.binary_search_by_key(&s, |(t, _)| *t) {
            Ok(i) => {
                let e = self.even[i].1 as i64 + delta;
                if e == 0 {
                    self.even.remove(i);
                } else {
                    self.even[i].1 = e as u32;
                }
            }
            Err(i) => {
                if delta != 0 {
                    self.even.insert(i, (s, delta as u32));
                }
            }
        }
    }

    /// Product of monomials: `Some((negative, m))`, or `None` when an odd
    /// factor repeats.
    pub fn mul(&self, other: &Monomial) -> Option<(bool, Monomial)> {
        let mut m = self.clone();
        m.lambda += other.lambda;
        m.u += other.u;
        for &(s, e) in &other.even {
            m.bump_even(s, e as i64);
        }
        if other.odd.is_empty() {
            return Some((false, m));
        }
        // merge, counting pairs (a in self, b in other) with a > b
        let (a, b) = (&self.odd, &other.odd);
        let mut merged = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let mut inversions = 0usize;
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i] < b[j]) {
                merged.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j] < a[i] {
                inversions += a.len() - i;
                merged.push(b[j]);
                j += 1;
            } else {
                return None;
            }
        }
        m.odd = merged;
        Some((inversions % 2 == 1, m))
    }

    /// Left partial derivative: `Some((coefficient, monomial))`, or `None`
    /// when `v` does not occur. For odd `v` the sign is `(-1)^k` with `k`
    /// the number of odd factors to the left of `v`.
    pub fn partial(&self, v: Var) -> Option<(i64, Monomial)> {
        match v {
            Var::Lambda => {
                if self.lambda == 0 {
                    return None;
                }
                let mut m = self.clone();
                m.lambda -= 1;
                Some((self.lambda as i64, m))
            }
            Var::U(s) => {
                let e = self.exponent(v);
                if e == 0 {
                    return None;
                }
                let mut m = self.clone();
                m.bump_even(s, -1);
                Some((e as i64, m))
            }
            Var::Theta(s) => {
                let k = self.odd.iter().position(|&t| t == s)?;
                let mut m = self.clone();
                m.odd.remove(k);
                Some((if k % 2 == 0 { 1 } else { -1 }, m))
            }
        }
    }

    /// Replaces `λ` by `u`.
    pub fn lambda_to_u(&self) -> Monomial {
        let mut m = self.clone();
        m.u += m.lambda;
        m.lambda = 0;
        m
    }

    /// The monomial with the given odd jets removed, together with the sign
    /// `ε` such that `self = ε · rest · θ^{s₁}θ^{s₂}…` (factors in the given
    /// order). `None` if some `sᵢ` is absent.
    pub fn split_odd_suffix(&self, suffix: &[u32]) -> Option<(bool, Monomial)> {
        let mut rest = self.clone();
        for s in suffix {
            let k = rest.odd.iter().position(|t| t == s)?;
            rest.odd.remove(k);
        }
        let (neg_tail, tail_sorted) = Monomial::from_parts(0, 0, [], suffix.iter().copied())?;
        let (neg, prod) = rest.mul(&tail_sorted)?;
        debug_assert_eq!(&prod, self);
        Some((neg ^ neg_tail, rest))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            Ok(())
        };
        let pow = |f: &mut fmt::Formatter<'_>, e: u32| if e == 1 { Ok(()) } else { write!(f, "^{e}") };
        if self.lambda > 0 {
            sep(f)?;
            f.write_str("l")?;
            pow(f, self.lambda)?;
        }
        if self.u > 0 {
            sep(f)?;
            f.write_str("u")?;
            pow(f, self.u)?;
        }
        for &(s, e) in &self.even {
            sep(f)?;
            write!(f, "u{s}")?;
            pow(f, e)?;
        }
        for &s in &self.odd {
            sep(f)?;
            write!(f, "t{s}")?;
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Sparse exact-rational linear combination of canonical monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Rational>,
}

/// Result of [`DiffPoly::bidegree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    Zero,
    Pure(Bidegree),
    Mixed,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::monomial(Monomial::one(), Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        DiffPoly::monomial(Monomial::one(), c)
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn var(v: Var) -> Self {
        DiffPoly::monomial(Monomial::var(v), Rational::one())
    }

    /// `u^a`.
    pub fn u_pow(a: u32) -> Self {
        DiffPoly::monomial(Monomial { u: a, ..Monomial::one() }, Rational::one())
    }

    /// `λ^k`.
    pub fn lambda_pow(k: u32) -> Self {
        DiffPoly::monomial(Monomial { lambda: k, ..Monomial::one() }, Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Adds `sign · c · m`.
    fn add_signed(&mut self, negative: bool, m: Monomial, c: Rational) {
        self.add_term(m, if negative { -c } else { c });
    }

    pub fn add_assign_scaled(&mut self, other: &DiffPoly, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> DiffPoly {
        let mut out = DiffPoly::zero();
        out.add_assign_scaled(self, c);
        out
    }

    /// Graded product.
    pub fn mul(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((neg, m)) = a.mul(b) {
                    out.add_signed(neg, m, ca * cb);
                }
            }
        }
        out
    }

    /// Left partial derivative by `v`.
    pub fn partial(&self, v: Var) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            if let Some((k, dm)) = m.partial(v) {
                out.add_term(dm, c * Rational::from_integer(BigInt::from(k)));
            }
        }
        out
    }

    /// The total derivative `∂ = Σ u^{s+1}∂/∂u^s + θ^{s+1}∂/∂θ^s`.
    pub fn dtot(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            dtot_monomial(m, c, &mut out);
        }
        out
    }

    /// `∂^n`.
    pub fn dtot_pow(&self, n: u32) -> DiffPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.dtot();
        }
        p
    }

    pub fn bidegree(&self) -> Homogeneity {
        let mut it = self.terms.keys().map(Monomial::bidegree);
        match it.next() {
            None => Homogeneity::Zero,
            Some(b) => {
                if it.all(|c| c == b) {
                    Homogeneity::Pure(b)
                } else {
                    Homogeneity::Mixed
                }
            }
        }
    }

    /// Substitutes `λ ↦ u`.
    pub fn lambda_to_u(&self) -> DiffPoly {
        self.map_monomials(|m| Some(m.lambda_to_u()))
    }

    /// Keeps the terms whose monomial satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn map_monomials(&self, mut f: impl FnMut(&Monomial) -> Option<Monomial>) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            if let Some(n) = f(m) {
                out.add_term(n, c.clone());
            }
        }
        out
    }

    pub fn max_order(&self) -> u32 {
        self.terms.keys().map(Monomial::max_order).max().unwrap_or(0)
    }
}

fn dtot_monomial(m: &Monomial, c: &Rational, out: &mut DiffPoly) {
    if m.u > 0 {
        let mut n = m.clone();
        n.u -= 1;
        n.bump_even(1, 1);
        out.add_term(n, c * Rational::from_integer(BigInt::from(m.u)));
    }
    for &(s, e) in &m.even {
        let mut n = m.clone();
        n.bump_even(s, -1);
        n.bump_even(s + 1, 1);
        out.add_term(n, c * Rational::from_integer(BigInt::from(e)));
    }
    // θ^s -> θ^{s+1} in place: the slot keeps its position, so no sign.
    for (k, &s) in m.odd.iter().enumerate() {
        if m.odd.get(k + 1) == Some(&(s + 1)) {
            continue;
        }
        let mut n = m.clone();
        n.odd[k] = s + 1;
        out.add_term(n, c.clone());
    }
}

impl core::ops::Add for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &Rational::one());
        out
    }
}

impl core::ops::Sub for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &-Rational::one());
        out
    }
}

impl core::ops::Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        self.scale(&-Rational::one())
    }
}

impl core::ops::Mul for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        DiffPoly::mul(self, rhs)
    }
}

impl From<Monomial> for DiffPoly {
    fn from(m: Monomial) -> Self {
        DiffPoly::monomial(m, Rational::one())
    }
}

fn fmt_rational(c: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for DiffPoly {
    /// Terms in canonical order joined by `" + "`; a term is
    /// `<coefficient> <monomial>`, the coefficient omitted when it is 1 and
    /// the monomial is not the unit.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let unit = *m == Monomial::one();
            if unit {
                fmt_rational(c, f)?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                fmt_rational(c, f)?;
                write!(f, " {m}")?;
            }
        }
        Ok(())
    }
}

fn parse_rational(tok: &str) -> Option<Rational> {
    let (n, d) = match tok.split_once('/') {
        Some((n, d)) => (n, d),
        None => (tok, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() || d.is_negative() {
        return None;
    }
    Some(Rational::new(n, d))
}

fn parse_factor(tok: &str) -> Result<Monomial, ParseError> {
    let bad = || ParseError::BadFactor(String::from(tok));
    let (base, exp) = match tok.split_once('^') {
        Some((b, e)) => (b, e.parse::<u32>().map_err(|_| bad())?),
        None => (tok, 1),
    };
    if exp == 0 {
        return Err(bad());
    }
    let order = |s: &str| -> Result<u32, ParseError> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            Err(bad())
        } else {
            s.parse().map_err(|_| bad())
        }
    };
    let mut m = Monomial::one();
    match base.as_bytes().first() {
        Some(b'l') if base == "l" => m.lambda = exp,
        Some(b'u') if base == "u" => m.u = exp,
        Some(b'u') => {
            let s = order(&base[1..])?;
            m.bump_even(s, exp as i64);
        }
        Some(b't') => {
            if exp != 1 {
                return Err(ParseError::OddPower(String::from(tok)));
            }
            m.odd.push(order(&base[1..])?);
        }
        _ => return Err(bad()),
    }
    Ok(m)
}

impl FromStr for Monomial {
    type Err = ParseError;

    /// Parses a canonical monomial (no coefficient). Non-canonical odd
    /// orders are rejected; use [`DiffPoly::from_str`] for general products.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let p: DiffPoly = s.parse()?;
        let mut it = p.terms.into_iter();
        match (it.next(), it.next()) {
            (Some((m, c)), None) if c.is_one() => Ok(m),
            _ => Err(ParseError::NotAMonomial(String::from(s))),
        }
    }
}

impl FromStr for DiffPoly {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseError::Empty);
        }
        let mut out = DiffPoly::zero();
        for term in s.split(" + ") {
            let mut coef = Rational::one();
            let mut mono = DiffPoly::one();
            let mut toks = term.split_whitespace().peekable();
            if toks.peek().is_none() {
                return Err(ParseError::Empty);
            }
            if let Some(t) = toks.peek() {
                let lead = t.as_bytes()[0];
                if lead.is_ascii_digit() || lead == b'-' {
                    coef = parse_rational(t).ok_or_else(|| ParseError::BadCoefficient(String::from(*t)))?;
                    toks.next();
                }
            }
            for t in toks {
                let f = parse_factor(t)?;
                mono = mono.mul(&DiffPoly::from(f));
            }
            out.add_assign_scaled(&mono, &coef);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn p(s: &str) -> DiffPoly {
        s.parse().unwrap()
    }

    #[test]
    fn odd_products() {
        assert_eq!(&p("t0") * &p("t1"), p("t0 t1"));
        assert_eq!(&p("t1") * &p("t0"), p("-1 t0 t1"));
        assert!((&p("t0") * &p("t0")).is_zero());
        assert_eq!(&p("u t1") * &p("u1 t0"), p("-1 u u1 t0 t1"));
    }

    #[test]
    fn partials() {
        assert_eq!(p("t0 t1").partial(Var::Theta(1)), p("-1 t0"));
        assert_eq!(p("u^2 t0").partial(Var::U(0)), p("2 u t0"));
        assert_eq!(p("t0 t1").partial(Var::Theta(0)), p("t1"));
        assert!(p("t0 t1").partial(Var::Theta(2)).is_zero());
        assert_eq!(p("l^3 u").partial(Var::Lambda), p("3 l^2 u"));
    }

    #[test]
    fn total_derivative() {
        assert_eq!(p("u").dtot(), p("u1"));
        assert_eq!(p("u^2").dtot(), p("2 u u1"));
        assert_eq!(p("u t0 t1").dtot(), p("u1 t0 t1 + u t0 t2"));
        assert!(p("l^2").dtot().is_zero());
        assert_eq!(p("u1^2").dtot(), p("2 u1 u2"));
    }

    #[test]
    fn bidegrees() {
        assert_eq!(p("t0 t1").bidegree(), Homogeneity::Pure(Bidegree::new(2, 1)));
        assert_eq!(p("t0 t1 t2").bidegree(), Homogeneity::Pure(Bidegree::new(3, 3)));
        assert_eq!(p("1 + t0").bidegree(), Homogeneity::Mixed);
        assert_eq!(DiffPoly::zero().bidegree(), Homogeneity::Zero);
        assert!(Bidegree::new(3, 2).is_trivially_zero());
        assert!(!Bidegree::new(3, 3).is_trivially_zero());
    }

    #[test]
    fn weights_and_orders() {
        let m: Monomial = "l^2 u^3 u1^2 u4 t0 t3".parse().unwrap();
        assert_eq!(m.degree(), 2 + 4 + 3);
        assert_eq!(m.super_degree(), 2);
        assert_eq!(m.even_weight(), 6);
        assert_eq!(m.weight(), 8);
        assert_eq!(m.max_order(), 4);
    }

    #[test]
    fn printing_is_canonical() {
        assert_eq!(p("t1 t0").to_string(), "-1 t0 t1");
        assert_eq!(p("1/2 u t0 t1 + -3/4 l u^2").to_string(), "1/2 u t0 t1 + -3/4 l u^2");
        assert_eq!(p("2/4").to_string(), "1/2");
        assert_eq!(DiffPoly::zero().to_string(), "0");
        assert_eq!(p("u u").to_string(), "u^2");
    }

    #[test]
    fn parse_errors() {
        assert!("t0^2".parse::<DiffPoly>().is_err());
        assert!("x1".parse::<DiffPoly>().is_err());
        assert!("1/0 u".parse::<DiffPoly>().is_err());
        assert!("".parse::<DiffPoly>().is_err());
        assert!("t1 t0".parse::<Monomial>().is_err());
        assert!(matches!("2 u".parse::<Monomial>(), Err(ParseError::NotAMonomial(_))));
    }

    #[test]
    fn split_suffix() {
        let m: Monomial = "u1 t0 t1 t2".parse().unwrap();
        let (neg, rest) = m.split_odd_suffix(&[0, 2]).unwrap();
        // u1 θ⁰θ¹θ² = -(u1 θ¹)·θ⁰θ²
        assert!(neg);
        assert_eq!(rest.to_string(), "u1 t1");
        let back = &DiffPoly::from(rest) * &p("t0 t2");
        assert_eq!(back, p("-1 u1 t0 t1 t2"));
    }
}
