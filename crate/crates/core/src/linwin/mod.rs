//! Windowed finite-dimensional slices of the algebra and exact linear algebra
//! on them.
//!
//! A [`Window`] `(N, L)` keeps the monomials of polynomial weight at most `N`
//! (weight = `λ`-power + `u`-power + number of even jet factors) whose
//! `λ`-power is at most `L`. Weight is preserved by `∂`, `D₂` and `D_λ` and
//! lowered by `D₁`, so the slice of a fixed weight is a finite complex on its
//! own; the window is then a coordinate mask on such pieces.

pub mod sparse;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

pub use sparse::{Echelon, Matrix, SparseVec, Subquotient, Subspace};

use crate::algebra::{Bidegree, DiffPoly, Monomial, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Window {
    pub n: u32,
    pub l: u32,
}

impl Window {
    pub const fn new(n: u32, l: u32) -> Self {
        Window { n, l }
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        m.weight() <= self.n && m.lambda_exp() <= self.l
    }

    /// Componentwise `self ≤ other`.
    pub fn within(&self, other: &Window) -> bool {
        self.n <= other.n && self.l <= other.l
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.n, self.l)
    }
}

/// All monomials of bidegree `b`, weight at most `n` and `λ`-power at most
/// `l`, in canonical order.
pub fn monomials(b: Bidegree, n: u32, l: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    if b.is_trivially_zero() {
        return out;
    }
    for odd in odd_sets(b.p, b.d) {
        let rest = b.d - odd.iter().sum::<u32>();
        for jets in partitions(rest, n) {
            let j: u32 = jets.iter().map(|(_, e)| e).sum();
            for lam in 0..=l.min(n - j) {
                for a in 0..=(n - j - lam) {
                    let (neg, m) = Monomial::from_parts(lam, a, jets.iter().copied(), odd.iter().copied())
                        .expect("distinct odd jets");
                    debug_assert!(!neg);
                    out.push(m);
                }
            }
        }
    }
    out.sort();
    out
}

/// Strictly increasing sequences of `p` jet orders with sum at most `max`.
fn odd_sets(p: u32, max: u32) -> Vec<Vec<u32>> {
    fn go(p: u32, start: u32, budget: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if p == 0 {
            out.push(cur.clone());
            return;
        }
        // the remaining p factors need at least start + (start+1) + …
        let mut s = start;
        while p * s + p * (p - 1) / 2 <= budget {
            cur.push(s);
            go(p - 1, s + 1, budget - s, cur, out);
            cur.pop();
            s += 1;
        }
    }
    let mut out = Vec::new();
    go(p, 0, max, &mut Vec::new(), &mut out);
    out
}

/// Multisets of jet orders `≥ 1` summing to `total` with at most
/// `max_parts` elements, as `(order, multiplicity)` lists.
fn partitions(total: u32, max_parts: u32) -> Vec<Vec<(u32, u32)>> {
    fn go(rest: u32, smallest: u32, parts: u32, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for s in smallest..=rest {
            let mut e = 1;
            while e * s <= rest && e <= parts {
                cur.push((s, e));
                go(rest - e * s, s + 1, parts - e, cur, out);
                cur.pop();
                e += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(total, 1, max_parts, &mut Vec::new(), &mut out);
    out
}

/// An ordered monomial basis of a finite slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceBasis {
    bidegree: Bidegree,
    window: Window,
    weight: Option<u32>,
    monomials: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
}

impl SliceBasis {
    fn from_sorted(bidegree: Bidegree, window: Window, weight: Option<u32>, monomials: Vec<Monomial>) -> Self {
        let index = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        SliceBasis { bidegree, window, weight, monomials, index }
    }

    /// A slice with an explicitly given set of monomials, sorted here.
    pub fn from_monomials(bidegree: Bidegree, window: Window, weight: Option<u32>, mut monomials: Vec<Monomial>) -> Self {
        monomials.sort();
        monomials.dedup();
        SliceBasis::from_sorted(bidegree, window, weight, monomials)
    }

    /// A slice with no monomials.
    pub fn empty(bidegree: Bidegree) -> Self {
        SliceBasis::from_sorted(bidegree, Window::new(0, 0), None, Vec::new())
    }

    /// The slice `Â^p_d[λ] ∩ W`.
    pub fn enumerate(b: Bidegree, w: Window) -> Self {
        SliceBasis::from_sorted(b, w, None, monomials(b, w.n, w.l))
    }

    /// The monomials of bidegree `b` and weight exactly `m` with `λ`-power
    /// at most `l`.
    pub fn piece(b: Bidegree, m: u32, l: u32) -> Self {
        let ms = monomials(b, m, l).into_iter().filter(|x| x.weight() == m).collect();
        SliceBasis::from_sorted(b, Window::new(m, l), Some(m), ms)
    }

    pub fn bidegree(&self) -> Bidegree {
        self.bidegree
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn weight(&self) -> Option<u32> {
        self.weight
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinates of `a`; fails on the first monomial outside the slice.
    pub fn coords(&self, a: &DiffPoly) -> Result<SparseVec> {
        let mut v: SparseVec = Vec::with_capacity(a.len());
        for (m, c) in a.terms() {
            let i = self.position(m).ok_or_else(|| Error::WindowOverflow(m.clone()))?;
            v.push((i, c.clone()));
        }
        v.sort_by_key(|(i, _)| *i);
        Ok(v)
    }

    pub fn poly(&self, v: &[(usize, Rational)]) -> DiffPoly {
        let mut p = DiffPoly::zero();
        for (i, c) in v {
            p.add_term(self.monomials[*i].clone(), c.clone());
        }
        p
    }

    pub fn mask(&self, keep: impl FnMut(&Monomial) -> bool) -> Vec<bool> {
        self.monomials.iter().map(keep).collect()
    }
}

/// A linear operator on the algebra with a fixed bidegree shift `(Δp, Δd)`.
pub trait LinearOperator {
    fn apply(&self, a: &DiffPoly) -> DiffPoly;
    fn shift(&self) -> (i32, i32);
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn apply(&self, a: &DiffPoly) -> DiffPoly {
        (**self).apply(a)
    }
    fn shift(&self) -> (i32, i32) {
        (**self).shift()
    }
}

/// A closure viewed as an operator.
pub struct FnOperator<F> {
    pub f: F,
    pub shift: (i32, i32),
}

impl<F: Fn(&DiffPoly) -> DiffPoly> LinearOperator for FnOperator<F> {
    fn apply(&self, a: &DiffPoly) -> DiffPoly {
        (self.f)(a)
    }
    fn shift(&self) -> (i32, i32) {
        self.shift
    }
}

pub fn shifted(b: Bidegree, shift: (i32, i32)) -> Option<Bidegree> {
    let p = b.p as i64 + shift.0 as i64;
    let d = b.d as i64 + shift.1 as i64;
    (p >= 0 && d >= 0).then(|| Bidegree::new(p as u32, d as u32))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub domain: SliceBasis,
    pub codomain: SliceBasis,
    pub matrix: Matrix,
}

impl OperatorMatrix {
    /// Matrix of `op` between two given slices; an image monomial outside
    /// the codomain is an error, never silently dropped.
    pub fn assemble(op: impl Fn(&DiffPoly) -> DiffPoly, domain: SliceBasis, codomain: SliceBasis) -> Result<Self> {
        let mut cols = Vec::with_capacity(domain.len());
        for m in domain.monomials() {
            let img = op(&DiffPoly::from(m.clone()));
            cols.push(codomain.coords(&img)?);
        }
        let matrix = Matrix::new(codomain.len(), cols);
        Ok(OperatorMatrix { domain, codomain, matrix })
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// `(row, col, value)` for every nonzero entry, column-major.
    pub fn triplets(&self) -> Vec<(usize, usize, Rational)> {
        let mut out = Vec::new();
        for (j, c) in self.matrix.cols().iter().enumerate() {
            for (i, x) in c {
                out.push((*i, j, x.clone()));
            }
        }
        out
    }

    /// One `row col value` line per nonzero entry, preceded by a
    /// `# rows cols` header.
    pub fn triplet_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} {}", self.matrix.nrows(), self.matrix.ncols());
        for (i, j, x) in self.triplets() {
            let _ = writeln!(s, "{i} {j} {x}");
        }
        s
    }
}

/// Matrix of `op` from the slice `(b, w)` to the slice `(b + shift, w′)`.
pub fn operator_matrix(op: &dyn LinearOperator, b: Bidegree, w: Window, w2: Window) -> Result<OperatorMatrix> {
    let domain = SliceBasis::enumerate(b, w);
    let codomain = match shifted(b, op.shift()) {
        Some(b2) => SliceBasis::enumerate(b2, w2),
        None => SliceBasis::from_sorted(b, w2, None, Vec::new()),
    };
    OperatorMatrix::assemble(|a| op.apply(a), domain, codomain)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomologyDims {
    pub kernel: usize,
    pub image: usize,
    pub homology: usize,
}

/// Kernel of `d_out`, image of `d_in` and their quotient at the middle slice.
pub fn homology_dims(d_in: &OperatorMatrix, d_out: &OperatorMatrix) -> Result<HomologyDims> {
    if d_in.codomain.monomials() != d_out.domain.monomials() {
        return Err(Error::NotComposable(d_in.codomain.bidegree(), d_out.domain.bidegree()));
    }
    if !d_out.matrix.compose(&d_in.matrix).is_zero() {
        return Err(Error::NotADifferential);
    }
    let kernel = d_out.domain.len() - d_out.rank();
    let image = d_in.rank();
    Ok(HomologyDims { kernel, image, homology: kernel - image })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stabilization {
    Constant(usize),
    LinearInN { slope: i64 },
    LinearInL { slope: i64 },
    Unstable,
    Inconclusive,
}

impl fmt::Display for Stabilization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stabilization::Constant(c) => write!(f, "constant {c}"),
            Stabilization::LinearInN { slope } => write!(f, "linear-in-N slope {slope}"),
            Stabilization::LinearInL { slope } => write!(f, "linear-in-L slope {slope}"),
            Stabilization::Unstable => f.write_str("unstable"),
            Stabilization::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Axis {
    N,
    L,
}

enum Trend {
    Slope(i64),
    Unstable,
}

fn trend(run: &[(Window, usize)], axis: Axis) -> Trend {
    let tail = &run[run.len() - 3..];
    let mut slopes = Vec::new();
    for w in tail.windows(2) {
        let dx = match axis {
            Axis::N => w[1].0.n - w[0].0.n,
            Axis::L => w[1].0.l - w[0].0.l,
        } as i64;
        let dy = w[1].1 as i64 - w[0].1 as i64;
        if dy % dx != 0 {
            return Trend::Unstable;
        }
        slopes.push(dy / dx);
    }
    if slopes[0] == slopes[1] {
        Trend::Slope(slopes[0])
    } else {
        Trend::Unstable
    }
}

/// Classifies a dimension sequence over a strictly increasing window ladder.
///
/// The ladder is cut into maximal runs along which only `N` or only `L`
/// moves; each run with at least three points is judged on its last three.
/// Growth in `N` takes precedence over growth in `L`.
pub fn stabilized_dims(seq: &[(Window, usize)]) -> Result<Stabilization> {
    for w in seq.windows(2) {
        if !w[0].0.within(&w[1].0) || w[0].0 == w[1].0 {
            return Err(Error::LadderNotIncreasing);
        }
    }
    if seq.len() < 3 {
        return Ok(Stabilization::Inconclusive);
    }
    let axis_of = |a: &Window, b: &Window| {
        if a.l == b.l {
            Some(Axis::N)
        } else if a.n == b.n {
            Some(Axis::L)
        } else {
            None
        }
    };
    let mut runs: Vec<(Axis, &[(Window, usize)])> = Vec::new();
    let mut start = 0;
    while start + 1 < seq.len() {
        let Some(axis) = axis_of(&seq[start].0, &seq[start + 1].0) else {
            start += 1;
            continue;
        };
        let mut end = start + 1;
        while end + 1 < seq.len() && axis_of(&seq[end].0, &seq[end + 1].0) == Some(axis) {
            end += 1;
        }
        runs.push((axis, &seq[start..=end]));
        start = end;
    }
    let mut n_slope: Option<i64> = None;
    let mut l_slope: Option<i64> = None;
    let mut judged = false;
    for (axis, run) in runs {
        if run.len() < 3 {
            continue;
        }
        judged = true;
        let slope = match trend(run, axis) {
            Trend::Slope(s) => s,
            Trend::Unstable => return Ok(Stabilization::Unstable),
        };
        let slot = match axis {
            Axis::N => &mut n_slope,
            Axis::L => &mut l_slope,
        };
        match slot {
            Some(s) if *s != slope => return Ok(Stabilization::Unstable),
            _ => *slot = Some(slope),
        }
    }
    if !judged {
        return Ok(Stabilization::Inconclusive);
    }
    Ok(match (n_slope.unwrap_or(0), l_slope.unwrap_or(0)) {
        (0, 0) => Stabilization::Constant(seq[seq.len() - 1].1),
        (0, s) => Stabilization::LinearInL { slope: s },
        (s, _) => Stabilization::LinearInN { slope: s },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::algebra::{rat, Var};

    fn mono(s: &str) -> Monomial {
        s.parse().unwrap()
    }

    #[test]
    fn small_slices() {
        let b = SliceBasis::enumerate(Bidegree::new(2, 1), Window::new(1, 0));
        assert_eq!(b.monomials(), &[mono("t0 t1"), mono("u t0 t1")]);
        let b = SliceBasis::enumerate(Bidegree::new(3, 3), Window::new(0, 0));
        assert_eq!(b.monomials(), &[mono("t0 t1 t2")]);
        for n in 0..4 {
            assert!(SliceBasis::enumerate(Bidegree::new(3, 2), Window::new(n, n)).is_empty());
        }
    }

    #[test]
    fn pieces_partition_the_window() {
        let b = Bidegree::new(1, 3);
        let w = Window::new(3, 2);
        let whole = SliceBasis::enumerate(b, w).len();
        let parts: usize = (0..=3).map(|m| SliceBasis::piece(b, m, 2).len()).sum();
        assert_eq!(whole, parts);
    }

    #[test]
    fn d1_on_functions_of_u() {
        // ∂/∂u scaled into θ¹
        let op = FnOperator {
            f: |a: &DiffPoly| &a.partial(Var::U(0)) * &DiffPoly::var(Var::Theta(1)),
            shift: (1, 1),
        };
        let m = operator_matrix(&op, Bidegree::new(0, 0), Window::new(3, 0), Window::new(3, 0)).unwrap();
        assert_eq!(m.rank(), 3);
        let u3 = m.domain.position(&mono("u^3")).unwrap();
        let u2t1 = m.codomain.position(&mono("u^2 t1")).unwrap();
        assert_eq!(m.matrix.col(u3), &vec![(u2t1, rat(3, 1))]);
    }

    #[test]
    fn overflow_is_reported() {
        let op = FnOperator { f: |a: &DiffPoly| a.mul(&DiffPoly::u_pow(1)), shift: (0, 0) };
        let r = operator_matrix(&op, Bidegree::new(0, 0), Window::new(2, 0), Window::new(2, 0));
        assert!(matches!(r, Err(Error::WindowOverflow(_))));
    }

    #[test]
    fn trivial_homology() {
        let b = SliceBasis::enumerate(Bidegree::new(2, 1), Window::new(2, 0));
        let n = b.len();
        let zero = |d: SliceBasis, c: SliceBasis| OperatorMatrix { matrix: Matrix::zero(c.len(), d.len()), domain: d, codomain: c };
        let h = homology_dims(&zero(b.clone(), b.clone()), &zero(b.clone(), b.clone())).unwrap();
        assert_eq!(h.homology, n);
        let id = OperatorMatrix::assemble(|a| a.clone(), b.clone(), b.clone()).unwrap();
        assert_eq!(homology_dims(&id, &zero(b.clone(), b.clone())).unwrap().homology, 0);
        assert_eq!(homology_dims(&id, &id), Err(Error::NotADifferential));
    }

    #[test]
    fn stabilization_classes() {
        let w = |n, l| Window::new(n, l);
        assert_eq!(
            stabilized_dims(&[(w(2, 2), 3), (w(3, 2), 4), (w(4, 2), 5)]).unwrap(),
            Stabilization::LinearInN { slope: 1 }
        );
        assert_eq!(
            stabilized_dims(&[(w(4, 2), 3), (w(4, 3), 4), (w(4, 4), 5)]).unwrap(),
            Stabilization::LinearInL { slope: 1 }
        );
        assert_eq!(
            stabilized_dims(&[(w(2, 2), 0), (w(3, 2), 0), (w(4, 2), 0)]).unwrap(),
            Stabilization::Constant(0)
        );
        assert_eq!(stabilized_dims(&[(w(2, 2), 0), (w(3, 2), 0)]).unwrap(), Stabilization::Inconclusive);
        assert_eq!(
            stabilized_dims(&[(w(2, 2), 0), (w(3, 2), 1), (w(4, 2), 5)]).unwrap(),
            Stabilization::Unstable
        );
        assert_eq!(stabilized_dims(&[(w(3, 2), 0), (w(2, 2), 0)]), Err(Error::LadderNotIncreasing));
    }
}
