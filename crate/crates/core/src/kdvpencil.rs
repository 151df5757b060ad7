//! The dispersionless KdV pencil `P₁ = ½∫θθ¹`, `P₂ = ½∫uθθ¹`, its operators
//! `D₁`, `D₂`, `D_λ = D₂ − λD₁`, the derivative-order filtration, and the
//! closed-form page formulas (`d₀`, the first page, `d₁`, the homotopy `h`).
//!
//! The closed forms are written independently of the spectral-sequence
//! engine so that the two can referee each other.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::algebra::{rat, Bidegree, DiffPoly, Monomial, Rational, Var};
use crate::error::{Error, Result};
use crate::linwin::{OperatorMatrix, SliceBasis, Window};
use crate::specseq::FilteredSlice;
use crate::varcalc::{build_dp, integral_class, unit, FunctionalClass, OperatorSpec};

fn poly(s: &str) -> DiffPoly {
    s.parse().expect("well-formed literal")
}

/// The two bivectors and their operators.
#[derive(Clone, Debug)]
pub struct Pencil {
    pub p1: FunctionalClass,
    pub p2: FunctionalClass,
    pub d1: OperatorSpec,
    pub d2: OperatorSpec,
    pub d_lambda: OperatorSpec,
}

impl Pencil {
    pub fn new() -> Self {
        let p1 = integral_class(&poly("1/2 t0 t1"), Window::new(0, 0)).expect("P1");
        let p2 = integral_class(&poly("1/2 u t0 t1"), Window::new(1, 0)).expect("P2");
        let d1 = build_dp(&p1).expect("bivector");
        let d2 = build_dp(&p2).expect("bivector");
        Pencil { p1, p2, d1: d1.clone(), d2: d1.clone(), d_lambda: d1 }.with_d2(d2)
    }

    /// The same pencil with `D₂` replaced and `D_λ` rebuilt from it.
    pub fn with_d2(mut self, d2: OperatorSpec) -> Self {
        let lambda = DiffPoly::var(Var::Lambda);
        self.d_lambda = OperatorSpec::combine(&[(unit(), &d2), (-&lambda, &self.d1)]).expect("same shift");
        self.d2 = d2;
        self
    }
}

impl Default for Pencil {
    fn default() -> Self {
        Pencil::new()
    }
}

/// `D₂` with the `u¹θ` coefficient of its even seed doubled; not a
/// differential. Used as a negative control.
pub fn corrupted_d2() -> OperatorSpec {
    OperatorSpec::from_seeds(poly("u t1 + u1 t0"), poly("1/2 t0 t1")).expect("homogeneous seeds")
}

/// `D_λ a = D₂ a − λ D₁ a`.
pub fn d_lambda(a: &DiffPoly) -> DiffPoly {
    Pencil::new().d_lambda.apply(a)
}

/// `d − (highest jet order)`: the largest `i` with `m ∈ F^i`.
pub fn filtration_level(m: &Monomial) -> i64 {
    m.degree() as i64 - m.max_order() as i64
}

/// Bidegrees `(p, p + k)` of the subcomplex with `d − p = k`, lowest first.
pub fn subcomplex_bidegrees(k: i64) -> Result<Vec<Bidegree>> {
    if k < -1 {
        return Err(Error::SubcomplexOutOfRange(k));
    }
    let mut out = Vec::new();
    let mut p: i64 = 0;
    while p * (p - 1) / 2 <= p + k || p + k < 0 {
        if p + k >= 0 {
            out.push(Bidegree::new(p as u32, (p + k) as u32));
        }
        p += 1;
    }
    Ok(out)
}

/// The `E₀` differential
/// `((u−λ)θ^{q+1} + ½u^{q+1}θ)∂/∂u^q + ½θθ^{q+1}∂/∂θ^q`, keeping only the
/// part of highest jet order `q + 1`. Terms of `a` of order below `q` are
/// zero in `E₀` and are ignored.
pub fn d0_explicit(q: u32, a: &DiffPoly) -> Result<DiffPoly> {
    let top = a.max_order();
    if top > q {
        return Err(Error::OrderTooHigh { found: top, max: q });
    }
    let a = a.filter(|m| m.max_order() == q);
    let lam = DiffPoly::var(Var::Lambda);
    let u = DiffPoly::var(Var::U(0));
    let even = &(&(&u - &lam) * &DiffPoly::var(Var::Theta(q + 1)))
        + &(&DiffPoly::var(Var::U(q + 1)) * &DiffPoly::var(Var::Theta(0))).scale(&rat(1, 2));
    let odd = (&DiffPoly::var(Var::Theta(0)) * &DiffPoly::var(Var::Theta(q + 1))).scale(&rat(1, 2));
    let out = &(&even * &a.partial(Var::U(q))) + &(&odd * &a.partial(Var::Theta(q)));
    Ok(out.filter(|m| m.max_order() == q + 1))
}

/// Multiplies `f` on the right by `θθ^q`.
pub fn times_theta_pair(f: &DiffPoly, q: u32) -> DiffPoly {
    f * &(&DiffPoly::var(Var::Theta(0)) * &DiffPoly::var(Var::Theta(q)))
}

/// The `f` with `a = f θθ^q`, checked to lie in the first-page
/// representative space: no `λ`, no `θ`, jet order exactly `q − 1`.
pub fn e1_coefficient(a: &DiffPoly, q: u32) -> Result<DiffPoly> {
    let mut f = DiffPoly::zero();
    for (m, c) in a.terms() {
        let (neg, rest) = m.split_odd_suffix(&[0, q]).ok_or_else(|| Error::NotInPageSpace(m.clone()))?;
        check_coefficient_monomial(&rest, q)?;
        f.add_term(rest, if neg { -c } else { c.clone() });
    }
    Ok(f)
}

fn check_coefficient_monomial(m: &Monomial, q: u32) -> Result<()> {
    if m.max_order() > q - 1 {
        return Err(Error::OrderTooHigh { found: m.max_order(), max: q - 1 });
    }
    if m.lambda_exp() > 0 || m.exponent(Var::Theta(0)) > 0 || m.max_order() != q - 1 {
        return Err(Error::NotInPageSpace(m.clone()));
    }
    Ok(())
}

/// Windowed basis of the closed-form first page `E₁^{p,q}`:
/// `λ^b` at `(0,0)`; `f θθ^q` with `f` a `λ`- and `θ`-free monomial of
/// standard degree `p` and jet order exactly `q − 1` when `p ≥ 1`, `q ≥ 2`;
/// empty elsewhere. At `(0,1)` the closed form is `(C^∞/ℝ[u])θθ¹`, which
/// has no polynomial elements.
pub fn e1_basis(p: u32, q: u32, w: Window) -> Vec<DiffPoly> {
    if p == 0 && q == 0 {
        return (0..=w.l.min(w.n)).map(DiffPoly::lambda_pow).collect();
    }
    if p == 0 || q < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for sp in 0..=p {
        for f in crate::linwin::monomials(Bidegree::new(sp, p), w.n, 0) {
            if f.exponent(Var::Theta(0)) == 0 && f.max_order() == q - 1 {
                out.push(times_theta_pair(&DiffPoly::from(f), q));
            }
        }
    }
    out
}

/// `d₁(fθθ^q) = ((D_λ f)|_{λ=u} + (q−2)/2·θ¹f)θθ^q` modulo
/// `Â^{(q−2)}θθ^q`, for `f` in the first-page coefficient space at `(p,q)`.
pub fn d1_explicit(f: &DiffPoly, p: u32, q: u32) -> Result<DiffPoly> {
    if p == 0 || q < 2 {
        return Err(Error::HomotopyExcluded(p, q));
    }
    for (m, _) in f.terms() {
        check_coefficient_monomial(m, q)?;
        if m.degree() != p {
            return Err(Error::NotInPageSpace(m.clone()));
        }
    }
    let pencil = Pencil::new();
    let dl = pencil.d_lambda.apply(f).lambda_to_u();
    let shifted = (&DiffPoly::var(Var::Theta(1)) * f).scale(&rat(q as i64 - 2, 2));
    let g = &dl + &shifted;
    let out = times_theta_pair(&g, q);
    Ok(out.filter(|m| {
        let (_, rest) = m.split_odd_suffix(&[0, q]).expect("ends in θθ^q");
        rest.max_order() + 2 > q
    }))
}

/// `d₁` on a first-page element `a = fθθ^q` of bidegree `(p, q)`.
pub fn d1_on(a: &DiffPoly, p: u32, q: u32) -> Result<DiffPoly> {
    d1_explicit(&e1_coefficient(a, q)?, p, q)
}

/// Eigenvalue of `U` on a monomial: `(s+2)/2` per `u^s` with `s ≥ 1`,
/// `(s−1)/2` per `θ^s`, nothing for `u` and `λ`.
pub fn u_weight(m: &Monomial) -> Rational {
    let mut w = Rational::zero();
    for &(s, e) in m.even_jets() {
        w += rat((s as i64 + 2) * e as i64, 2);
    }
    for &s in m.odd_vars() {
        w += rat(s as i64 - 1, 2);
    }
    w
}

/// `U = Σ_{s≥1} (s+2)/2·u^s∂/∂u^s + Σ_{s≥0} (s−1)/2·θ^s∂/∂θ^s`.
pub fn u_op(a: &DiffPoly) -> DiffPoly {
    let mut out = DiffPoly::zero();
    for (m, c) in a.terms() {
        out.add_term(m.clone(), c * u_weight(m));
    }
    out
}

/// `h = U⁻¹ ∂/∂θ¹` on `E₁^{p,q}`, `p ≥ 1`, `q ≥ 2`, `(p,q) ≠ (1,2)`.
pub fn h_op(a: &DiffPoly, p: u32, q: u32) -> Result<DiffPoly> {
    if p == 0 || q < 2 {
        return Err(Error::HomotopyExcluded(p, q));
    }
    e1_coefficient(a, q)?;
    if (p, q) == (1, 2) {
        // U vanishes on g(u)θθ², the image of ∂/∂θ¹ at this spot
        let m = Monomial::from_parts(0, 0, [], [0, 2]).expect("distinct").1;
        return Err(Error::USingular(m));
    }
    let b = a.partial(Var::Theta(1));
    let mut out = DiffPoly::zero();
    for (m, c) in b.terms() {
        let w = u_weight(m);
        if w.is_zero() {
            return Err(Error::USingular(m.clone()));
        }
        out.add_term(m.clone(), c / w);
    }
    Ok(out)
}

/// The piece of weight `m` of the subcomplex `d − p = k` of
/// `(Â[λ], D_λ)`, filtered by derivative order, in standard degrees up to
/// `dmax + 1`; degrees up to `dmax` are exact.
#[derive(Clone, Debug)]
pub struct KdvSlice {
    pub k: i64,
    pub weight: u32,
    pub bases: Vec<SliceBasis>,
    pub slice: FilteredSlice,
}

impl KdvSlice {
    pub fn build(pencil: &Pencil, k: i64, weight: u32, dmax: u32) -> Result<Self> {
        let bidegrees: Vec<Bidegree> =
            subcomplex_bidegrees(k)?.into_iter().filter(|b| b.d <= dmax + 1).collect();
        if bidegrees.is_empty() {
            return Err(Error::SubcomplexOutOfRange(k));
        }
        let n0 = bidegrees[0].d as i64;
        let bases: Vec<SliceBasis> = bidegrees.iter().map(|b| SliceBasis::piece(*b, weight, weight)).collect();
        let levels = bases.iter().map(|b| b.monomials().iter().map(filtration_level).collect()).collect();
        let mut diffs = Vec::new();
        for w in bases.windows(2) {
            let m = OperatorMatrix::assemble(|a| pencil.d_lambda.apply(a), w[0].clone(), w[1].clone())?;
            diffs.push(m.matrix);
        }
        let top = n0 + bases.len() as i64 - 1;
        let slice = FilteredSlice::new(n0, levels, diffs)?.with_trusted_top(top.min(dmax as i64));
        Ok(KdvSlice { k, weight, bases, slice })
    }

    /// Basis of standard degree `n`, if stored.
    pub fn basis(&self, n: i64) -> Option<&SliceBasis> {
        let i = n - self.slice.bottom();
        (i >= 0).then(|| self.bases.get(i as usize)).flatten()
    }

    /// Coordinates that survive the window bound `λ ≤ l`.
    pub fn lambda_mask(&self, n: i64, l: u32) -> Vec<bool> {
        self.basis(n).map_or_else(Vec::new, |b| b.mask(|m| m.lambda_exp() <= l))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> DiffPoly {
        s.parse().unwrap()
    }

    #[test]
    fn pencil_operators() {
        let pen = Pencil::new();
        assert_eq!(pen.d_lambda.apply(&p("u")), p("u t1 + -1 l t1 + 1/2 u1 t0"));
        let f = p("u^3 + 2 l u");
        let expected = &p("u t1 + -1 l t1 + 1/2 u1 t0") * &f.partial(Var::U(0));
        assert_eq!(pen.d_lambda.apply(&f), expected);
        let x = p("u^2 u1 t0 t2 + l u2 t1");
        assert!(pen.d_lambda.apply(&pen.d_lambda.apply(&x)).is_zero());
        let c = corrupted_d2();
        assert!(!c.apply(&c.apply(&p("u^2 u1"))).is_zero());
    }

    #[test]
    fn levels_and_subcomplexes() {
        assert_eq!(filtration_level(&"u^2 t0 t1".parse().unwrap()), 0);
        assert_eq!(filtration_level(&"u1^2".parse().unwrap()), 1);
        assert_eq!(filtration_level(&"l^3 u".parse().unwrap()), 0);
        let b = |v: &[(u32, u32)]| v.iter().map(|&(p, d)| Bidegree::new(p, d)).collect::<Vec<_>>();
        assert_eq!(subcomplex_bidegrees(-1).unwrap(), b(&[(1, 0), (2, 1)]));
        assert_eq!(subcomplex_bidegrees(0).unwrap(), b(&[(0, 0), (1, 1), (2, 2), (3, 3)]));
        assert_eq!(subcomplex_bidegrees(2).unwrap(), b(&[(0, 2), (1, 3), (2, 4), (3, 5), (4, 6)]));
        assert_eq!(subcomplex_bidegrees(-2), Err(Error::SubcomplexOutOfRange(-2)));
    }

    #[test]
    fn closed_form_d0() {
        assert_eq!(d0_explicit(2, &p("u2")).unwrap(), p("u t3 + -1 l t3 + 1/2 u3 t0"));
        assert_eq!(d0_explicit(3, &p("t3")).unwrap(), p("1/2 t0 t4"));
        assert_eq!(
            d0_explicit(1, &p("u1 t1")).unwrap(),
            p("-1 u t1 t2 + l t1 t2 + 1/2 u2 t0 t1 + 1/2 u1 t0 t2")
        );
        assert!(matches!(d0_explicit(1, &p("u2")), Err(Error::OrderTooHigh { found: 2, max: 1 })));
    }

    #[test]
    fn first_page_basis() {
        let w = Window::new(3, 2);
        assert_eq!(e1_basis(0, 0, w), [p("1"), p("l"), p("l^2")]);
        assert!(e1_basis(1, 3, w).is_empty());
        assert!(e1_basis(2, 1, w).is_empty());
        assert!(e1_basis(0, 1, w).is_empty());
        // u^a u¹ θθ² (a ≤ 2) and u^a θ¹θθ² (a ≤ 3)
        let b = e1_basis(1, 2, w);
        assert_eq!(b.len(), 7);
        assert!(b.contains(&p("u^2 u1 t0 t2")));
        assert!(b.contains(&p("-1 u^3 t0 t1 t2")));
    }

    #[test]
    fn closed_form_d1() {
        assert!(d1_explicit(&p("u^2 t1"), 1, 2).unwrap().is_zero());
        let g = d1_explicit(&p("u^2 u1"), 1, 2).unwrap();
        assert_eq!(g, p("-3/2 u^2 u1 t0 t1 t2"));
        assert!(d1_explicit(&DiffPoly::zero(), 2, 3).unwrap().is_zero());
        assert!(d1_explicit(&p("u1"), 1, 3).is_err());
    }

    #[test]
    fn homotopy_operator() {
        assert_eq!(u_op(&p("u1 t0 t2")), p("3/2 u1 t0 t2"));
        assert!(u_op(&p("t1 t0 t2")).is_zero());
        assert_eq!(h_op(&p("u1 t1 t0 t2"), 2, 2).unwrap(), p("2/3 u1 t0 t2"));
        assert!(matches!(h_op(&p("u t1 t0 t2"), 1, 2), Err(Error::USingular(_))));
    }
}
