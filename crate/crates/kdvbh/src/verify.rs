//! Identity suites: every identity is checked monomial by monomial on the
//! full basis of each slice.

use kdvbh_core::algebra::{Bidegree, DiffPoly};
use kdvbh_core::kdvpencil::{d1_on, e1_basis, h_op, Pencil};
use kdvbh_core::linwin::{SliceBasis, Window};
use kdvbh_core::varcalc::{delta_theta, delta_u, schouten};
use kdvbh_core::Error;

use crate::config::all_bidegrees;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    /// Number of individual identities evaluated.
    pub checks: usize,
    /// The slices the suite ran on.
    pub slices: Vec<String>,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult { name, checks: 0, slices: Vec::new(), failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

pub const SUITES: [&str; 7] =
    ["D1_squared", "D2_squared", "D1D2_anticommute", "schouten_pencil", "dtot_commute", "variational_exact", "homotopy"];

fn slices(max_d: u32, w: Window) -> Vec<SliceBasis> {
    all_bidegrees(max_d).into_iter().map(|b| SliceBasis::enumerate(b, w)).filter(|s| !s.is_empty()).collect()
}

fn label(b: Bidegree, w: Window) -> String {
    format!("({},{})@{w}", b.p, b.d)
}

/// Runs `check(a)` on every basis monomial of every slice.
fn on_slices(
    name: &'static str,
    max_d: u32,
    w: Window,
    mut check: impl FnMut(&DiffPoly) -> Option<&'static str>,
) -> SuiteResult {
    let mut out = SuiteResult::new(name);
    for s in slices(max_d, w) {
        out.slices.push(label(s.bidegree(), w));
        for m in s.monomials() {
            let a = DiffPoly::from(m.clone());
            let bad = check(&a);
            out.check(bad.is_none(), || format!("{} fails on {a} in {}", bad.unwrap_or(""), label(s.bidegree(), w)));
        }
    }
    out
}

pub fn d1_squared(pencil: &Pencil, max_d: u32, w: Window) -> SuiteResult {
    on_slices("D1_squared", max_d, w, |a| (!pencil.d1.apply(&pencil.d1.apply(a)).is_zero()).then_some("D1^2 = 0"))
}

pub fn d2_squared(pencil: &Pencil, max_d: u32, w: Window) -> SuiteResult {
    on_slices("D2_squared", max_d, w, |a| (!pencil.d2.apply(&pencil.d2.apply(a)).is_zero()).then_some("D2^2 = 0"))
}

/// `D₁D₂ + D₂D₁ = 0` and `D_λ² = 0`.
pub fn d1d2_anticommute(pencil: &Pencil, max_d: u32, w: Window) -> SuiteResult {
    let (d1, d2, dl) = (&pencil.d1, &pencil.d2, &pencil.d_lambda);
    on_slices("D1D2_anticommute", max_d, w, |a| {
        if !(&d1.apply(&d2.apply(a)) + &d2.apply(&d1.apply(a))).is_zero() {
            Some("D1 D2 + D2 D1 = 0")
        } else if !dl.apply(&dl.apply(a)).is_zero() {
            Some("D_lambda^2 = 0")
        } else {
            None
        }
    })
}

/// `[P₁,P₁] = [P₂,P₂] = [P₁,P₂] = 0`.
pub fn schouten_pencil(pencil: &Pencil) -> SuiteResult {
    let mut out = SuiteResult::new("schouten_pencil");
    let pairs = [("[P1,P1]", &pencil.p1, &pencil.p1), ("[P2,P2]", &pencil.p2, &pencil.p2), ("[P1,P2]", &pencil.p1, &pencil.p2)];
    out.slices.push("(3,3)".into());
    for (name, p, q) in pairs {
        match schouten(p, q) {
            Ok(c) => out.check(c.is_zero(), || format!("{name} = {} is not zero", c.representative())),
            Err(e) => out.check(false, || format!("{name}: {e}")),
        }
    }
    out
}

/// `D_i ∂ = ∂ D_i` for `i = 1, 2`.
pub fn dtot_commute(pencil: &Pencil, max_d: u32, w: Window) -> SuiteResult {
    on_slices("dtot_commute", max_d, w, |a| {
        if pencil.d1.apply(&a.dtot()) != pencil.d1.apply(a).dtot() {
            Some("D1 d = d D1")
        } else if pencil.d2.apply(&a.dtot()) != pencil.d2.apply(a).dtot() {
            Some("D2 d = d D2")
        } else {
            None
        }
    })
}

/// `δ_u ∂ = δ_θ ∂ = 0`.
pub fn variational_exact(max_d: u32, w: Window) -> SuiteResult {
    on_slices("variational_exact", max_d, w, |a| {
        let b = a.dtot();
        (!(delta_u(&b).is_zero() && delta_theta(&b).is_zero())).then_some("delta d = 0")
    })
}

/// `h d₁ + d₁ h = 1` on the first page for `p ≥ 1`, `q ≥ 2`, `p + q ≤ max_d`
/// away from `(1,2)`, and the refusal of `h` at `(1,2)`.
pub fn homotopy(max_d: u32, w: Window) -> SuiteResult {
    let mut out = SuiteResult::new("homotopy");
    for p in 1..=max_d {
        for q in 2..=max_d.saturating_sub(p) {
            let basis = e1_basis(p, q, w);
            out.slices.push(format!("E1({p},{q})@{w}"));
            for a in &basis {
                if (p, q) == (1, 2) {
                    let r = h_op(a, p, q);
                    out.check(matches!(r, Err(Error::USingular(_))), || format!("h at (1,2) accepted {a}: {r:?}"));
                    continue;
                }
                let r = homotopy_defect(a, p, q);
                out.check(matches!(&r, Ok(x) if x.is_zero()), || match r {
                    Ok(x) => format!("h d1 + d1 h - 1 = {x} on {a} at ({p},{q})"),
                    Err(e) => format!("{e} on {a} at ({p},{q})"),
                });
            }
        }
    }
    out
}

/// `h d₁ a + d₁ h a − a`; the `d₁ h` term is absent at `p = 1`, where `h`
/// leaves the first page.
pub fn homotopy_defect(a: &DiffPoly, p: u32, q: u32) -> kdvbh_core::Result<DiffPoly> {
    let da = d1_on(a, p, q)?;
    let hda = if da.is_zero() { da } else { h_op(&da, p + 1, q)? };
    let ha = h_op(a, p, q)?;
    let dha = if ha.is_zero() || p == 1 { DiffPoly::zero() } else { d1_on(&ha, p - 1, q)? };
    Ok(&(&hda + &dha) - a)
}

/// All seven suites.
pub fn run_all(pencil: &Pencil, max_d: u32, w: Window) -> Vec<SuiteResult> {
    vec![
        d1_squared(pencil, max_d, w),
        d2_squared(pencil, max_d, w),
        d1d2_anticommute(pencil, max_d, w),
        schouten_pencil(pencil),
        dtot_commute(pencil, max_d, w),
        variational_exact(max_d, w),
        homotopy(max_d, w),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use kdvbh_core::kdvpencil::corrupted_d2;

    #[test]
    fn suites_pass_on_the_pencil() {
        let r = run_all(&Pencil::new(), 4, Window::new(2, 1));
        assert_eq!(r.iter().map(|s| s.name).collect::<Vec<_>>(), SUITES);
        for s in &r {
            assert!(s.passed(), "{}: {:?}", s.name, s.failures);
            assert!(s.checks > 0, "{}", s.name);
        }
    }

    #[test]
    fn corrupted_d2_is_caught() {
        let pencil = Pencil::new().with_d2(corrupted_d2());
        let s = d2_squared(&pencil, 3, Window::new(2, 0));
        assert!(!s.passed());
        assert!(s.failures[0].contains("D2^2"));
    }

    #[test]
    fn degree_zero_is_trivial() {
        for s in run_all(&Pencil::new(), 0, Window::new(1, 1)) {
            assert!(s.passed(), "{}", s.name);
        }
    }
}
