//! Sparse exact-rational vectors, echelon bases, subspaces and subquotients.
//!
//! Elimination always pivots on the lowest nonzero coordinate, so every
//! result (bases, chosen representatives, coordinates) is a deterministic
//! function of the input order.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::algebra::Rational;

/// Sorted `(index, nonzero value)` pairs.
pub type SparseVec = Vec<(usize, Rational)>;

pub fn unit(i: usize) -> SparseVec {
    vec![(i, Rational::one())]
}

/// `acc += c · v`, dropping cancelled entries.
pub fn axpy(acc: &mut BTreeMap<usize, Rational>, c: &Rational, v: &[(usize, Rational)]) {
    if c.is_zero() {
        return;
    }
    for (i, x) in v {
        let e = acc.entry(*i).or_insert_with(Rational::zero);
        *e += c * x;
        if e.is_zero() {
            acc.remove(i);
        }
    }
}

pub fn linear_combination<'a>(
    terms: impl IntoIterator<Item = (&'a Rational, &'a SparseVec)>,
) -> SparseVec {
    let mut acc = BTreeMap::new();
    for (c, v) in terms {
        axpy(&mut acc, c, v);
    }
    acc.into_iter().collect()
}

pub fn scale(v: &[(usize, Rational)], c: &Rational) -> SparseVec {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, x * c)).collect()
}

pub fn to_dense(v: &[(usize, Rational)], n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

pub fn from_dense(v: &[Rational]) -> SparseVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

/// Row echelon basis keyed by pivot; every row starts with `(pivot, 1)`.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec> {
        self.rows.values()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Normal form of `v`: zero at every pivot, congruent to `v` modulo the
    /// row space. Linear in `v`.
    pub fn reduce(&self, v: &[(usize, Rational)]) -> SparseVec {
        let mut acc: BTreeMap<usize, Rational> = v.iter().cloned().collect();
        let mut out = Vec::new();
        while let Some((i, c)) = acc.pop_first() {
            match self.rows.get(&i) {
                Some(row) => axpy(&mut acc, &-c, &row[1..]),
                None => out.push((i, c)),
            }
        }
        out
    }

    /// Adds `v` to the row space; returns whether the rank grew.
    pub fn insert(&mut self, v: &[(usize, Rational)]) -> bool {
        let r = self.reduce(v);
        self.insert_reduced(r)
    }

    fn insert_reduced(&mut self, r: SparseVec) -> bool {
        match r.first() {
            None => false,
            Some((p, c)) => {
                let inv = c.recip();
                let p = *p;
                self.rows.insert(p, scale(&r, &inv));
                true
            }
        }
    }
}

/// Echelon basis whose rows remember which combination of the inserted
/// vectors produced them.
#[derive(Clone, Debug, Default)]
struct TrackedEchelon {
    rows: BTreeMap<usize, (SparseVec, SparseVec)>,
}

impl TrackedEchelon {
    /// Reduces `(v, combo)`; returns the remainder and the updated combination.
    fn reduce(&self, v: &[(usize, Rational)], combo: SparseVec) -> (SparseVec, SparseVec) {
        let mut acc: BTreeMap<usize, Rational> = v.iter().cloned().collect();
        let mut comb: BTreeMap<usize, Rational> = combo.into_iter().collect();
        let mut out = Vec::new();
        while let Some((i, c)) = acc.pop_first() {
            match self.rows.get(&i) {
                Some((row, rc)) => {
                    let m = -c;
                    axpy(&mut acc, &m, &row[1..]);
                    axpy(&mut comb, &m, rc);
                }
                None => out.push((i, c)),
            }
        }
        (out, comb.into_iter().collect())
    }

    fn insert_reduced(&mut self, r: SparseVec, combo: SparseVec) {
        let (p, c) = r[0].clone();
        let inv = c.recip();
        self.rows.insert(p, (scale(&r, &inv), scale(&combo, &inv)));
    }
}

/// Basis of all relations `Σ cᵢ vᵢ = 0`, as coefficient vectors `c`.
pub fn kernel(vectors: &[SparseVec]) -> Vec<SparseVec> {
    let mut ech = TrackedEchelon::default();
    let mut ker = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let (r, combo) = ech.reduce(v, unit(i));
        if r.is_empty() {
            ker.push(combo);
        } else {
            ech.insert_reduced(r, combo);
        }
    }
    ker
}

/// A subspace of `Q^ambient`.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    ech: Echelon,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, ech: Echelon::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace::coordinate(ambient, (0..ambient).map(|_| true))
    }

    /// Span of the unit vectors whose mask entry is `true`.
    pub fn coordinate(ambient: usize, mask: impl IntoIterator<Item = bool>) -> Self {
        let mut s = Subspace::zero(ambient);
        for (i, keep) in mask.into_iter().enumerate() {
            if keep {
                s.ech.rows.insert(i, unit(i));
            }
        }
        s
    }

    pub fn span<'a>(ambient: usize, vectors: impl IntoIterator<Item = &'a SparseVec>) -> Self {
        let mut s = Subspace::zero(ambient);
        for v in vectors {
            s.ech.insert(v);
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.ech.rank()
    }

    pub fn basis(&self) -> Vec<SparseVec> {
        self.ech.rows().cloned().collect()
    }

    pub fn reduce(&self, v: &[(usize, Rational)]) -> SparseVec {
        self.ech.reduce(v)
    }

    pub fn contains(&self, v: &[(usize, Rational)]) -> bool {
        self.ech.reduce(v).is_empty()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.ech.rows().all(|v| self.contains(v))
    }

    pub fn insert(&mut self, v: &[(usize, Rational)]) -> bool {
        self.ech.insert(v)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for v in other.ech.rows() {
            s.ech.insert(v);
        }
        s
    }

    /// `self ∩ other`.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        let basis = self.basis();
        let residues: Vec<SparseVec> = basis.iter().map(|v| other.reduce(v)).collect();
        Subspace::span(
            self.ambient,
            kernel(&residues)
                .iter()
                .map(|c| linear_combination(c.iter().map(|(i, x)| (x, &basis[*i]))))
                .collect::<Vec<_>>()
                .iter(),
        )
    }

    /// Vectors of `self` supported on the coordinates where `mask` holds.
    pub fn intersect_coords(&self, mask: &[bool]) -> Subspace {
        let basis = self.basis();
        let outside: Vec<SparseVec> = basis
            .iter()
            .map(|v| v.iter().filter(|(i, _)| !mask[*i]).cloned().collect())
            .collect();
        let combos = kernel(&outside);
        let vecs: Vec<SparseVec> = combos
            .iter()
            .map(|c| linear_combination(c.iter().map(|(i, x)| (x, &basis[*i]))))
            .collect();
        Subspace::span(self.ambient, vecs.iter())
    }

    /// `dim(self ∩ coordinate(mask))`.
    pub fn dim_within(&self, mask: &[bool]) -> usize {
        let outside: Vec<SparseVec> = self
            .ech
            .rows()
            .map(|v| v.iter().filter(|(i, _)| !mask[*i]).cloned().collect())
            .collect();
        self.dim() - Subspace::span(self.ambient, outside.iter()).dim()
    }
}

/// A linear map given by the images of the domain's unit vectors.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Matrix {
    nrows: usize,
    cols: Vec<SparseVec>,
}

impl Matrix {
    pub fn new(nrows: usize, cols: Vec<SparseVec>) -> Self {
        debug_assert!(cols.iter().all(|c| c.iter().all(|(i, _)| *i < nrows)));
        Matrix { nrows, cols }
    }

    pub fn zero(nrows: usize, ncols: usize) -> Self {
        Matrix { nrows, cols: vec![Vec::new(); ncols] }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &SparseVec {
        &self.cols[j]
    }

    pub fn cols(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn apply(&self, x: &[(usize, Rational)]) -> SparseVec {
        linear_combination(x.iter().map(|(j, c)| (c, &self.cols[*j])))
    }

    /// The map `x ↦ (self·x, lower·x)` into the direct sum of the codomains.
    pub fn stack(&self, lower: &Matrix) -> Matrix {
        assert_eq!(self.ncols(), lower.ncols());
        let cols = self
            .cols
            .iter()
            .zip(&lower.cols)
            .map(|(a, b)| a.iter().cloned().chain(b.iter().map(|(i, x)| (i + self.nrows, x.clone()))).collect())
            .collect();
        Matrix { nrows: self.nrows + lower.nrows, cols }
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &Matrix) -> Matrix {
        Matrix { nrows: self.nrows, cols: rhs.cols.iter().map(|c| self.apply(c)).collect() }
    }

    pub fn image(&self) -> Subspace {
        Subspace::span(self.nrows, self.cols.iter())
    }

    pub fn rank(&self) -> usize {
        self.image().dim()
    }

    pub fn kernel(&self) -> Subspace {
        Subspace::span(self.cols.len(), kernel(&self.cols).iter())
    }

    /// Image of a subspace of the domain.
    pub fn image_of(&self, s: &Subspace) -> Subspace {
        let imgs: Vec<SparseVec> = s.ech.rows().map(|v| self.apply(v)).collect();
        Subspace::span(self.nrows, imgs.iter())
    }

    /// `{x ∈ within : Ax ∈ target}`.
    pub fn preimage(&self, within: &Subspace, target: &Subspace) -> Subspace {
        let basis = within.basis();
        let residues: Vec<SparseVec> = basis.iter().map(|v| target.reduce(&self.apply(v))).collect();
        let vecs: Vec<SparseVec> = kernel(&residues)
            .iter()
            .map(|c| linear_combination(c.iter().map(|(i, x)| (x, &basis[*i]))))
            .collect();
        Subspace::span(self.cols.len(), vecs.iter())
    }

    /// Some `x` with `Ax = b`, if one exists.
    pub fn solve(&self, b: &[(usize, Rational)]) -> Option<SparseVec> {
        let mut ech = TrackedEchelon::default();
        for (j, c) in self.cols.iter().enumerate() {
            let (r, combo) = ech.reduce(c, unit(j));
            if !r.is_empty() {
                ech.insert_reduced(r, combo);
            }
        }
        let (r, combo) = ech.reduce(b, Vec::new());
        // reduce(b) = b - A·(-combo)
        r.is_empty().then(|| scale(&combo, &-Rational::one()))
    }

    pub fn transpose_rows(&self) -> Vec<SparseVec> {
        let mut rows = vec![Vec::new(); self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c {
                rows[*i].push((j, x.clone()));
            }
        }
        rows
    }

    /// Scalar `c` with `self = c · other`, when one exists. Two zero maps
    /// are proportional with `c = 1`.
    pub fn proportionality(&self, other: &Matrix) -> Option<Rational> {
        if self.nrows != other.nrows || self.ncols() != other.ncols() {
            return None;
        }
        let mut factor: Option<Rational> = None;
        for (a, b) in self.cols.iter().zip(&other.cols) {
            if a.len() != b.len() {
                return None;
            }
            for ((i, x), (j, y)) in a.iter().zip(b) {
                if i != j {
                    return None;
                }
                let c = x / y;
                match &factor {
                    None => factor = Some(c),
                    Some(f) if *f == c => {}
                    Some(_) => return None,
                }
            }
        }
        Some(factor.unwrap_or_else(Rational::one))
    }
}

/// `num / den` for subspaces `den ⊆ num`, presented by representatives of a
/// basis of the quotient and a coordinate map.
#[derive(Clone, Debug)]
pub struct Subquotient {
    num: Subspace,
    den: Subspace,
    reps: Vec<SparseVec>,
    coords: TrackedEchelon,
}

impl Subquotient {
    /// Representatives are the basis vectors of `num`, in pivot order, that
    /// are independent modulo `den` and the earlier ones.
    pub fn new(num: Subspace, den: Subspace) -> Self {
        let mut span = den.ech.clone();
        let mut reps = Vec::new();
        for z in num.ech.rows() {
            if span.insert(z) {
                reps.push(z.clone());
            }
        }
        let mut coords = TrackedEchelon::default();
        for (i, r) in reps.iter().enumerate() {
            let (red, combo) = coords.reduce(&den.reduce(r), unit(i));
            debug_assert!(!red.is_empty());
            coords.insert_reduced(red, combo);
        }
        Subquotient { num, den, reps, coords }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn numerator(&self) -> &Subspace {
        &self.num
    }

    pub fn denominator(&self) -> &Subspace {
        &self.den
    }

    pub fn representatives(&self) -> &[SparseVec] {
        &self.reps
    }

    /// Coordinates of the class of `x` in the representative basis;
    /// `None` when `x ∉ num`.
    pub fn coords(&self, x: &[(usize, Rational)]) -> Option<SparseVec> {
        if !self.num.contains(x) {
            return None;
        }
        let (r, combo) = self.coords.reduce(&self.den.reduce(x), Vec::new());
        debug_assert!(r.is_empty());
        Some(scale(&combo, &-Rational::one()))
    }

    /// Number of classes having a representative supported on `mask`.
    pub fn dim_within(&self, mask: &[bool]) -> usize {
        self.num.dim_within(mask) - self.den.dim_within(mask)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn v(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|(i, x)| (*i, rat(*x, 1))).collect()
    }

    #[test]
    fn kernel_of_dependent_columns() {
        let cols = vec![v(&[(0, 1), (1, 2)]), v(&[(0, 2), (1, 4)]), v(&[(2, 1)])];
        let k = kernel(&cols);
        assert_eq!(k.len(), 1);
        let m = Matrix::new(3, cols);
        assert!(m.apply(&k[0]).is_empty());
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn intersections() {
        let a = Subspace::span(3, [v(&[(0, 1), (1, 1)]), v(&[(2, 1)])].iter());
        let b = Subspace::span(3, [v(&[(0, 1)]), v(&[(1, 1), (2, 1)])].iter());
        let c = a.intersect(&b);
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&v(&[(0, 1), (1, 1), (2, 1)])));
        assert_eq!(a.dim_within(&[true, true, false]), 1);
        assert_eq!(a.intersect_coords(&[true, true, false]).dim(), 1);
    }

    #[test]
    fn subquotient_coordinates() {
        let num = Subspace::full(3);
        let den = Subspace::span(3, [v(&[(0, 1), (1, -1)])].iter());
        let q = Subquotient::new(num, den);
        assert_eq!(q.dim(), 2);
        // e1 ≡ e0 modulo den
        assert_eq!(q.coords(&v(&[(1, 1)])), q.coords(&v(&[(0, 1)])));
        assert!(q.coords(&v(&[(0, 1), (1, -1)])).unwrap().is_empty());
    }

    #[test]
    fn solve_and_preimage() {
        let m = Matrix::new(2, vec![v(&[(0, 1)]), v(&[(0, 1)]), v(&[(1, 2)])]);
        let x = m.solve(&v(&[(0, 3), (1, 4)])).unwrap();
        assert_eq!(m.apply(&x), v(&[(0, 3), (1, 4)]));
        assert!(Matrix::new(2, vec![v(&[(0, 1)])]).solve(&v(&[(1, 1)])).is_none());
        let pre = m.preimage(&Subspace::full(3), &Subspace::zero(2));
        assert_eq!(pre.dim(), 1);
    }

    #[test]
    fn proportional_maps() {
        let a = Matrix::new(2, vec![v(&[(0, 2)]), v(&[(1, -4)])]);
        let b = Matrix::new(2, vec![v(&[(0, 1)]), v(&[(1, -2)])]);
        assert_eq!(a.proportionality(&b), Some(rat(2, 1)));
        let c = Matrix::new(2, vec![v(&[(0, 1)]), v(&[(1, 2)])]);
        assert_eq!(a.proportionality(&c), None);
    }
}
