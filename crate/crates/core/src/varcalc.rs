//! Variational calculus: `δ_u`, `δ_θ`, local functionals `F̂ = Â/∂Â`, the
//! operator `D_P` of a bivector and the Schouten bracket `[P, Q] = ∫ D_P(Q)`.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::algebra::{Bidegree, DiffPoly, Homogeneity, Rational, Var};
use crate::error::{Error, Result};
use crate::linwin::{LinearOperator, OperatorMatrix, SliceBasis, Window};

fn euler(a: &DiffPoly, var: fn(u32) -> Var) -> DiffPoly {
    let mut out = DiffPoly::zero();
    for s in 0..=a.max_order() {
        let mut t = a.partial(var(s));
        for _ in 0..s {
            t = -&t.dtot();
        }
        out = &out + &t;
    }
    out
}

/// `δ_u = Σ_s (−∂)^s ∂/∂u^s`.
pub fn delta_u(a: &DiffPoly) -> DiffPoly {
    euler(a, Var::U)
}

/// `δ_θ = Σ_s (−∂)^s ∂/∂θ^s`.
pub fn delta_theta(a: &DiffPoly) -> DiffPoly {
    euler(a, Var::Theta)
}

/// The total derivative as a [`LinearOperator`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Dtot;

impl LinearOperator for Dtot {
    fn apply(&self, a: &DiffPoly) -> DiffPoly {
        a.dtot()
    }
    fn shift(&self) -> (i32, i32) {
        (0, 1)
    }
}

fn join(a: Window, b: Window) -> Window {
    Window::new(a.n.max(b.n), a.l.max(b.l))
}

/// Smallest window containing every monomial of `a`.
pub fn hull(a: &DiffPoly) -> Window {
    a.terms()
        .fold(Window::new(0, 0), |w, (m, _)| join(w, Window::new(m.weight(), m.lambda_exp())))
}

/// The class `∫a` of a bihomogeneous element in a finite windowed slice of
/// `F̂[λ]`. Equality is decided by linear algebra modulo `∂` at the same
/// slice, never by comparing representatives.
#[derive(Clone, Debug)]
pub struct FunctionalClass {
    representative: DiffPoly,
    bidegree: Option<Bidegree>,
    window: Window,
}

/// `∫a` inside the window `w`.
pub fn integral_class(a: &DiffPoly, w: Window) -> Result<FunctionalClass> {
    let bidegree = match a.bidegree() {
        Homogeneity::Zero => None,
        Homogeneity::Pure(b) => Some(b),
        Homogeneity::Mixed => return Err(Error::Inhomogeneous),
    };
    if let Some((m, _)) = a.terms().find(|(m, _)| !w.contains(m)) {
        return Err(Error::OutsideWindow(m.clone()));
    }
    Ok(FunctionalClass { representative: a.clone(), bidegree, window: w })
}

impl FunctionalClass {
    pub fn representative(&self) -> &DiffPoly {
        &self.representative
    }

    /// `None` for the zero representative.
    pub fn bidegree(&self) -> Option<Bidegree> {
        self.bidegree
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Whether the representative lies in `∂(Â^p_{d−1} ∩ W)`.
    pub fn is_zero(&self) -> bool {
        let Some(b) = self.bidegree else { return true };
        if b.d == 0 {
            return false;
        }
        let domain = SliceBasis::enumerate(Bidegree::new(b.p, b.d - 1), self.window);
        let codomain = SliceBasis::enumerate(b, self.window);
        let m = OperatorMatrix::assemble(|a| a.dtot(), domain, codomain).expect("∂ preserves the window");
        let v = m.codomain.coords(&self.representative).expect("representative inside its window");
        m.matrix.image().contains(&v)
    }

    /// Equality of classes, decided in the joined window.
    pub fn same_class(&self, other: &FunctionalClass) -> Result<bool> {
        let diff = &self.representative - &other.representative;
        Ok(integral_class(&diff, join(self.window, other.window))?.is_zero())
    }

    pub fn scale(&self, c: &Rational) -> FunctionalClass {
        let rep = self.representative.scale(c);
        let bidegree = if rep.is_zero() { None } else { self.bidegree };
        FunctionalClass { representative: rep, bidegree, window: self.window }
    }
}

/// The generator data of an operator
/// `Σ_s ∂^s(e)·∂/∂u^s + ∂^s(o)·∂/∂θ^s`, given by its two seeds `e` (even
/// part) and `o` (odd part).
#[derive(Clone, Debug)]
pub struct OperatorSpec {
    even_seed: DiffPoly,
    odd_seed: DiffPoly,
    shift: (i32, i32),
    even_gens: Vec<DiffPoly>,
    odd_gens: Vec<DiffPoly>,
}

const CACHED_GENERATORS: u32 = 10;

impl OperatorSpec {
    /// Both seeds must be bihomogeneous and induce the same bidegree shift.
    pub fn from_seeds(even_seed: DiffPoly, odd_seed: DiffPoly) -> Result<Self> {
        let from_even = match even_seed.bidegree() {
            Homogeneity::Zero => None,
            Homogeneity::Pure(b) => Some((b.p as i32, b.d as i32)),
            Homogeneity::Mixed => return Err(Error::Inhomogeneous),
        };
        let from_odd = match odd_seed.bidegree() {
            Homogeneity::Zero => None,
            Homogeneity::Pure(b) => Some((b.p as i32 - 1, b.d as i32)),
            Homogeneity::Mixed => return Err(Error::Inhomogeneous),
        };
        let shift = match (from_even, from_odd) {
            (Some(a), Some(b)) if a != b => return Err(Error::Inhomogeneous),
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => (1, 1),
        };
        let gens = |seed: &DiffPoly| {
            let mut g = Vec::with_capacity(CACHED_GENERATORS as usize);
            let mut cur = seed.clone();
            for _ in 0..CACHED_GENERATORS {
                let next = cur.dtot();
                g.push(cur);
                cur = next;
            }
            g
        };
        Ok(OperatorSpec {
            even_gens: gens(&even_seed),
            odd_gens: gens(&odd_seed),
            even_seed,
            odd_seed,
            shift,
        })
    }

    pub fn zero() -> Self {
        OperatorSpec::from_seeds(DiffPoly::zero(), DiffPoly::zero()).expect("zero seeds")
    }

    pub fn even_seed(&self) -> &DiffPoly {
        &self.even_seed
    }

    pub fn odd_seed(&self) -> &DiffPoly {
        &self.odd_seed
    }

    /// Coefficient of `∂/∂u^s`.
    pub fn even_gen(&self, s: u32) -> DiffPoly {
        match self.even_gens.get(s as usize) {
            Some(g) => g.clone(),
            None => self.even_seed.dtot_pow(s),
        }
    }

    /// Coefficient of `∂/∂θ^s`.
    pub fn odd_gen(&self, s: u32) -> DiffPoly {
        match self.odd_gens.get(s as usize) {
            Some(g) => g.clone(),
            None => self.odd_seed.dtot_pow(s),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.even_seed.is_zero() && self.odd_seed.is_zero()
    }

    /// `Σ cᵢ·Xᵢ` for central coefficients `cᵢ` (polynomials in `λ` only).
    pub fn combine(terms: &[(DiffPoly, &OperatorSpec)]) -> Result<Self> {
        let mut even = DiffPoly::zero();
        let mut odd = DiffPoly::zero();
        for (c, x) in terms {
            even = &even + &(c * &x.even_seed);
            odd = &odd + &(c * &x.odd_seed);
        }
        OperatorSpec::from_seeds(even, odd)
    }

    fn gen_ref(&self, v: Var) -> DiffPoly {
        match v {
            Var::U(s) => self.even_gen(s),
            Var::Theta(s) => self.odd_gen(s),
            Var::Lambda => DiffPoly::zero(),
        }
    }

    /// `Σ_s g_s · ∂a/∂x^s` with every generator multiplied from the left.
    pub fn apply(&self, a: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in a.terms() {
            for v in m.vars() {
                if v == Var::Lambda {
                    continue;
                }
                let Some((k, rest)) = m.partial(v) else { continue };
                let g = self.gen_ref(v);
                if g.is_zero() {
                    continue;
                }
                let coef = c * Rational::from_integer(k.into());
                out.add_assign_scaled(&(&g * &DiffPoly::from(rest)), &coef);
            }
        }
        out
    }
}

impl LinearOperator for OperatorSpec {
    fn apply(&self, a: &DiffPoly) -> DiffPoly {
        OperatorSpec::apply(self, a)
    }
    fn shift(&self) -> (i32, i32) {
        self.shift
    }
}

/// `D_P` with even seed `δ_θ P̃` and odd seed `δ_u P̃`.
pub fn build_dp(p: &FunctionalClass) -> Result<OperatorSpec> {
    match p.bidegree {
        None => Ok(OperatorSpec::zero()),
        Some(b) if b.p != 2 => Err(Error::NotBivector(b.p)),
        Some(_) => OperatorSpec::from_seeds(delta_theta(&p.representative), delta_u(&p.representative)),
    }
}

/// `[P, Q] = ∫ D_P(Q̃)`.
pub fn schouten(p: &FunctionalClass, q: &FunctionalClass) -> Result<FunctionalClass> {
    let dp = build_dp(p)?;
    let r = dp.apply(&q.representative);
    integral_class(&r, join(q.window, hull(&r)))
}

/// `1`, as a central coefficient for [`OperatorSpec::combine`].
pub fn unit() -> DiffPoly {
    DiffPoly::constant(Rational::one())
}

/// `c` as a central coefficient.
pub fn scalar(c: Rational) -> DiffPoly {
    if c.is_zero() {
        DiffPoly::zero()
    } else {
        DiffPoly::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use crate::algebra::rat;

    fn p(s: &str) -> DiffPoly {
        s.parse().unwrap()
    }

    fn class(s: &str) -> FunctionalClass {
        integral_class(&p(s), Window::new(4, 2)).unwrap()
    }

    #[test]
    fn variational_derivatives() {
        assert_eq!(delta_theta(&p("1/2 t0 t1")), p("t1"));
        assert!(delta_u(&p("1/2 t0 t1")).is_zero());
        assert_eq!(delta_theta(&p("1/2 u t0 t1")), p("u t1 + 1/2 u1 t0"));
        assert_eq!(delta_u(&p("1/2 u t0 t1")), p("1/2 t0 t1"));
        let x = p("u^2 u1 t0 t2 + 3 u2^2 t1 t3 + l u t0");
        assert!(delta_u(&x.dtot()).is_zero());
        assert!(delta_theta(&x.dtot()).is_zero());
    }

    #[test]
    fn operators_of_the_pencil() {
        let d1 = build_dp(&class("1/2 t0 t1")).unwrap();
        for s in 0..6 {
            assert_eq!(d1.even_gen(s), DiffPoly::var(Var::Theta(s + 1)));
            assert!(d1.odd_gen(s).is_zero());
        }
        let d2 = build_dp(&class("1/2 u t0 t1")).unwrap();
        assert_eq!(d2.even_seed(), &p("u t1 + 1/2 u1 t0"));
        assert_eq!(d2.odd_seed(), &p("1/2 t0 t1"));
        assert!(build_dp(&class("0")).unwrap().is_zero());
        assert_eq!(build_dp(&class("u t0")).unwrap_err(), Error::NotBivector(1));

        assert_eq!(d1.apply(&p("u^3")), p("3 u^2 t1"));
        assert_eq!(d1.apply(&p("u1")), p("t2"));
        assert_eq!(d2.apply(&p("u")), p("u t1 + 1/2 u1 t0"));
    }

    #[test]
    fn functional_classes() {
        let x = p("u^2 t0");
        assert!(class(&x.dtot().to_string()).is_zero());
        let a = class("u t1");
        let b = class("u1 t0").scale(&rat(-1, 1));
        assert!(a.same_class(&b).unwrap());
        assert!(!class("u").is_zero());
        assert!(!class("t0 t1").is_zero());
        assert_eq!(integral_class(&p("1 + t0"), Window::new(2, 2)).unwrap_err(), Error::Inhomogeneous);
        assert!(matches!(integral_class(&p("u^3"), Window::new(2, 2)), Err(Error::OutsideWindow(_))));
    }

    #[test]
    fn pencil_brackets_vanish() {
        let p1 = class("1/2 t0 t1");
        let p2 = class("1/2 u t0 t1");
        for (a, b) in [(&p1, &p1), (&p2, &p2), (&p1, &p2), (&p2, &p1)] {
            assert!(schouten(a, b).unwrap().is_zero());
        }
        let q = class("u t0 t3");
        assert!(!schouten(&q, &q).unwrap().is_zero());
    }
}
