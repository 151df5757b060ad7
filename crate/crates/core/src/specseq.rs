//! Spectral sequence of a finite filtered cochain complex.
//!
//! The engine sees only matrices and per-basis-vector filtration levels.
//! With `F^p C^n` the span of the basis vectors of level `≥ p`,
//!
//! ```text
//! Z_r^{p,q} = d⁻¹(F^{p+r} C^{n+1}) ∩ F^p C^n
//! B_r^{p,q} = d(F^{p−r} C^{n−1}) ∩ F^p C^n
//! E_r^{p,q} = Z_r^{p,q} / (B_{r−1}^{p,q} + Z_{r−1}^{p+1,q−1})        n = p + q
//! ```
//!
//! for `r ≥ −1`, and `d_r : E_r^{p,q} → E_r^{p+r,q−r+1}` is induced by `d`.
//!
//! The complex is taken to vanish outside its stored degrees. A slice cut
//! out of a longer complex can declare a *trusted top*: entries in degrees
//! up to it coincide with those of the untruncated complex (they only see
//! `d` into and out of that degree).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linwin::{Matrix, SparseVec, Subquotient, Subspace};

#[derive(Clone, Debug)]
pub struct FilteredSlice {
    n0: i64,
    levels: Vec<Vec<i64>>,
    diffs: Vec<Matrix>,
    trusted_top: i64,
}

impl FilteredSlice {
    /// `levels[i]` are the levels of the basis of `C^{n0+i}`; `diffs[i]`
    /// is `d : C^{n0+i} → C^{n0+i+1}`. Checks shapes, `d² = 0` and that `d`
    /// does not lower the filtration.
    pub fn new(n0: i64, levels: Vec<Vec<i64>>, diffs: Vec<Matrix>) -> Result<Self> {
        if levels.is_empty() || diffs.len() + 1 != levels.len() {
            return Err(Error::BadFiltration(format!(
                "{} degrees need {} differentials, got {}",
                levels.len(),
                levels.len().saturating_sub(1),
                diffs.len()
            )));
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.ncols() != levels[i].len() || d.nrows() != levels[i + 1].len() {
                return Err(Error::BadFiltration(format!("differential out of degree {} has the wrong shape", n0 + i as i64)));
            }
            for (j, col) in d.cols().iter().enumerate() {
                if let Some((row, _)) = col.iter().find(|(row, _)| levels[i + 1][*row] < levels[i][j]) {
                    return Err(Error::BadFiltration(format!(
                        "d lowers the level of basis vector {j} in degree {} (to row {row})",
                        n0 + i as i64
                    )));
                }
            }
        }
        for (i, w) in diffs.windows(2).enumerate() {
            if !w[1].compose(&w[0]).is_zero() {
                return Err(Error::BadFiltration(format!("d² ≠ 0 out of degree {}", n0 + i as i64)));
            }
        }
        let trusted_top = n0 + levels.len() as i64 - 1;
        Ok(FilteredSlice { n0, levels, diffs, trusted_top })
    }

    /// Marks degrees above `top` as truncation artefacts.
    pub fn with_trusted_top(mut self, top: i64) -> Self {
        self.trusted_top = top.min(self.top());
        self
    }

    pub fn bottom(&self) -> i64 {
        self.n0
    }

    pub fn top(&self) -> i64 {
        self.n0 + self.levels.len() as i64 - 1
    }

    pub fn trusted_top(&self) -> i64 {
        self.trusted_top
    }

    pub fn dim(&self, n: i64) -> usize {
        self.levels_of(n).len()
    }

    pub fn levels_of(&self, n: i64) -> &[i64] {
        if n < self.n0 || n > self.top() {
            return &[];
        }
        &self.levels[(n - self.n0) as usize]
    }

    /// `(min level, max level)` in degree `n`, if `C^n ≠ 0`.
    pub fn level_range(&self, n: i64) -> Option<(i64, i64)> {
        let l = self.levels_of(n);
        Some((*l.iter().min()?, *l.iter().max()?))
    }

    /// Largest difference of levels over all degrees.
    pub fn level_span(&self) -> i64 {
        let all = self.levels.iter().flatten();
        match (all.clone().min(), all.max()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    /// `d` out of degree `n`; the zero map outside the stored range.
    pub fn differential(&self, n: i64) -> Matrix {
        if n >= self.n0 && n < self.top() {
            self.diffs[(n - self.n0) as usize].clone()
        } else {
            Matrix::zero(self.dim(n + 1), self.dim(n))
        }
    }

    fn diff_ref(&self, n: i64) -> Option<&Matrix> {
        (n >= self.n0 && n < self.top()).then(|| &self.diffs[(n - self.n0) as usize])
    }

    pub fn filtration_mask(&self, n: i64, p: i64) -> Vec<bool> {
        self.levels_of(n).iter().map(|l| *l >= p).collect()
    }

    pub fn filtration(&self, n: i64, p: i64) -> Subspace {
        Subspace::coordinate(self.dim(n), self.filtration_mask(n, p))
    }

    /// Positions `(p, n)` with `C^n ≠ 0` and `p` within the level range of
    /// degree `n`.
    pub fn positions(&self) -> Vec<(i64, i64)> {
        self.positions_upto(self.top())
    }

    /// [`FilteredSlice::positions`] restricted to trusted degrees.
    pub fn trusted_positions(&self) -> Vec<(i64, i64)> {
        self.positions_upto(self.trusted_top)
    }

    fn positions_upto(&self, top: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for n in self.n0..=top {
            if let Some((lo, hi)) = self.level_range(n) {
                out.extend((lo..=hi).map(|p| (p, n)));
            }
        }
        out
    }
}

/// One entry `E_r^{p,q}` with its induced differential.
#[derive(Clone, Debug)]
pub struct PageEntry {
    pub r: i64,
    pub p: i64,
    pub q: i64,
    pub quotient: Subquotient,
    /// `d_r` in representative coordinates, to `E_r^{p+r,q−r+1}`.
    pub d_r: Matrix,
}

impl PageEntry {
    pub fn n(&self) -> i64 {
        self.p + self.q
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    pub fn representatives(&self) -> &[SparseVec] {
        self.quotient.representatives()
    }

    /// Basis of the relation space `B_{r−1}^{p,q} + Z_{r−1}^{p+1,q−1}`.
    pub fn relations(&self) -> Vec<SparseVec> {
        self.quotient.denominator().basis()
    }
}

#[derive(Clone, Debug)]
pub struct Page {
    pub r: i64,
    pub entries: BTreeMap<(i64, i64), PageEntry>,
}

impl Page {
    pub fn get(&self, p: i64, q: i64) -> Option<&PageEntry> {
        self.entries.get(&(p, q))
    }

    pub fn dim(&self, p: i64, q: i64) -> usize {
        self.get(p, q).map_or(0, PageEntry::dim)
    }

    pub fn differentials_vanish(&self) -> bool {
        self.entries.values().all(|e| e.d_r.is_zero())
    }
}

/// Lazily materialised `Z_r`, `B_r` towers of a [`FilteredSlice`].
pub struct SpectralSequence<'a> {
    slice: &'a FilteredSlice,
    z: BTreeMap<(i64, i64, i64), Subspace>,
    b: BTreeMap<(i64, i64, i64), Subspace>,
}

impl<'a> SpectralSequence<'a> {
    pub fn new(slice: &'a FilteredSlice) -> Self {
        SpectralSequence { slice, z: BTreeMap::new(), b: BTreeMap::new() }
    }

    pub fn slice(&self) -> &FilteredSlice {
        self.slice
    }

    /// `Z_r` at filtration `p`, degree `n`.
    pub fn z(&mut self, r: i64, n: i64, p: i64) -> Subspace {
        if let Some(s) = self.z.get(&(r, n, p)) {
            return s.clone();
        }
        let c = self.slice;
        let f = c.filtration(n, p);
        let s = match c.diff_ref(n) {
            None => f,
            Some(d) => d.preimage(&f, &c.filtration(n + 1, p + r)),
        };
        self.z.insert((r, n, p), s.clone());
        s
    }

    /// `B_r` at filtration `p`, degree `n`.
    pub fn b(&mut self, r: i64, n: i64, p: i64) -> Subspace {
        if let Some(s) = self.b.get(&(r, n, p)) {
            return s.clone();
        }
        let c = self.slice;
        let s = match c.diff_ref(n - 1) {
            None => Subspace::zero(c.dim(n)),
            Some(d) => d.image_of(&c.filtration(n - 1, p - r)).intersect_coords(&c.filtration_mask(n, p)),
        };
        self.b.insert((r, n, p), s.clone());
        s
    }

    fn quotient(&mut self, r: i64, n: i64, p: i64) -> Subquotient {
        let num = self.z(r, n, p);
        let den = self.b(r - 1, n, p).sum(&self.z(r - 1, n, p + 1));
        Subquotient::new(num, den)
    }

    /// Page `E_r` at every position of the slice, with `d_r`. Entries above
    /// the trusted top belong to the truncated complex.
    pub fn page(&mut self, r: i64) -> Page {
        let c = self.slice;
        let mut quotients = BTreeMap::new();
        for (p, n) in c.positions() {
            quotients.insert((p, n), self.quotient(r, n, p));
        }
        let mut entries = BTreeMap::new();
        for (&(p, n), quo) in &quotients {
            let d = c.differential(n);
            let target = quotients
                .get(&(p + r, n + 1))
                .cloned()
                .or_else(|| (n < c.top()).then(|| self.quotient(r, n + 1, p + r)));
            let cols = quo
                .representatives()
                .iter()
                .map(|x| match &target {
                    Some(t) => t.coords(&d.apply(x)).expect("d(Z_r) lies in Z_r"),
                    None => Vec::new(),
                })
                .collect();
            let nrows = target.as_ref().map_or(0, Subquotient::dim);
            let entry = PageEntry { r, p, q: n - p, quotient: quo.clone(), d_r: Matrix::new(nrows, cols) };
            entries.insert((p, n - p), entry);
        }
        Page { r, entries }
    }

    /// `Z_r^{p,q}` and `B_r^{p,q}`.
    pub fn zb_spaces(&mut self, r: i64, p: i64, q: i64) -> (Subspace, Subspace) {
        (self.z(r, p + q, p), self.b(r, p + q, p))
    }

    /// Smallest `N ≤ maxr` such that `d_r = 0` for every `N ≤ r ≤ maxr`.
    pub fn collapse_at(&mut self, maxr: i64) -> Option<i64> {
        let mut first = None;
        for r in (0..=maxr).rev() {
            if self.page(r).differentials_vanish() {
                first = Some(r);
            } else {
                break;
            }
        }
        first
    }

    /// A page index past which nothing changes.
    pub fn stable_page(&self) -> i64 {
        self.slice.level_span() + 2
    }

    /// Compares `E_∞` with the graded pieces of the directly computed
    /// cohomology, position by position.
    pub fn converge_check(&mut self) -> ConvergenceReport {
        let c = self.slice;
        let e_inf = self.page(self.stable_page());
        let mut rows = Vec::new();
        for (p, n) in c.trusted_positions() {
            let z = c.differential(n).kernel();
            let b = match c.diff_ref(n - 1) {
                Some(d) => d.image(),
                None => Subspace::zero(c.dim(n)),
            };
            let graded = |p: i64| z.intersect_coords(&c.filtration_mask(n, p)).sum(&b).dim();
            let direct = graded(p) - graded(p + 1);
            rows.push(ConvergenceRow { p, q: n - p, e_infinity: e_inf.dim(p, n - p), graded: direct });
        }
        let mut totals = BTreeMap::new();
        for n in c.bottom()..=c.trusted_top() {
            let h = match c.diff_ref(n - 1) {
                Some(d) => c.differential(n).kernel().dim() - d.rank(),
                None => c.differential(n).kernel().dim(),
            };
            totals.insert(n, h);
        }
        ConvergenceReport { rows, cohomology: totals }
    }

    /// Tower containments, `d(Z_r) ⊆ Z_r`, and `E_{r+1} ≅ H(E_r, d_r)`, for
    /// `−1 ≤ r ≤ maxr`. Returns one message per violation.
    pub fn check_invariants(&mut self, maxr: i64) -> Vec<String> {
        let c = self.slice;
        let mut bad = Vec::new();
        for r in 0..=maxr {
            for (p, n) in c.trusted_positions() {
                let (zr, br) = (self.z(r, n, p), self.b(r, n, p));
                let (zp, bp) = (self.z(r - 1, n, p), self.b(r - 1, n, p));
                if !(br.contains_subspace(&bp) && zr.contains_subspace(&br) && zp.contains_subspace(&zr)) {
                    bad.push(format!("tower fails at r={r} (p,n)=({p},{n})"));
                }
                if n < c.top() {
                    let target = self.z(r, n + 1, p + r);
                    let d = c.differential(n);
                    if !zr.basis().iter().all(|x| target.contains(&d.apply(x))) {
                        bad.push(format!("d(Z_r) ⊄ Z_r at r={r} (p,n)=({p},{n})"));
                    }
                }
            }
        }
        let mut prev = self.page(0);
        for r in 1..=maxr + 1 {
            let next = self.page(r);
            for (&(p, q), e) in &prev.entries {
                if p + q > c.trusted_top() {
                    continue;
                }
                let incoming = prev.get(p - (r - 1), q + r - 2).map_or(0, |x| x.d_r.rank());
                let h = e.dim() - e.d_r.rank() - incoming;
                if h != next.dim(p, q) {
                    bad.push(format!("E_{r}^({p},{q}) has dim {} but H(E_{}) = {h}", next.dim(p, q), r - 1));
                }
            }
            prev = next;
        }
        bad
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvergenceRow {
    pub p: i64,
    pub q: i64,
    pub e_infinity: usize,
    pub graded: usize,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// `dim H^n` of the unfiltered complex.
    pub cohomology: BTreeMap<i64, usize>,
}

impl ConvergenceReport {
    pub fn mismatches(&self) -> Vec<ConvergenceRow> {
        let mut out: Vec<ConvergenceRow> = self.rows.iter().copied().filter(|r| r.e_infinity != r.graded).collect();
        for (&n, &h) in &self.cohomology {
            let sum: usize = self.rows.iter().filter(|r| r.p + r.q == n).map(|r| r.e_infinity).sum();
            if sum != h {
                out.push(ConvergenceRow { p: i64::MIN, q: n, e_infinity: sum, graded: h });
            }
        }
        out
    }

    pub fn converges(&self) -> bool {
        self.mismatches().is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::linwin::sparse::unit;
    use alloc::vec;

    fn identity(n: usize) -> Matrix {
        Matrix::new(n, (0..n).map(unit).collect())
    }

    #[test]
    fn acyclic_two_term() {
        let c = FilteredSlice::new(0, vec![vec![0], vec![0]], vec![identity(1)]).unwrap();
        let mut ss = SpectralSequence::new(&c);
        assert_eq!(ss.page(0).dim(0, 0), 1);
        assert_eq!(ss.page(1).dim(0, 0), 0);
        assert_eq!(ss.page(1).dim(0, 1), 0);
        assert_eq!(ss.collapse_at(4), Some(1));
        assert!(ss.converge_check().converges());
        assert!(ss.check_invariants(3).is_empty());
    }

    #[test]
    fn zero_differential() {
        let c = FilteredSlice::new(0, vec![vec![0, 1], vec![2]], vec![Matrix::zero(1, 2)]).unwrap();
        let mut ss = SpectralSequence::new(&c);
        assert_eq!(ss.collapse_at(4), Some(0));
        let (z0, b0) = ss.zb_spaces(0, 1, -1);
        assert_eq!((z0.dim(), b0.dim()), (1, 0));
    }

    #[test]
    fn differential_across_levels() {
        // x (level 0) ↦ y (level 2): killed on page 2, not before
        let d = Matrix::new(1, vec![vec![(0, rat(3, 1))]]);
        let c = FilteredSlice::new(0, vec![vec![0], vec![2]], vec![d]).unwrap();
        let mut ss = SpectralSequence::new(&c);
        assert_eq!(ss.page(1).dim(0, 0), 1);
        assert_eq!(ss.page(2).get(0, 0).unwrap().d_r.rank(), 1);
        assert_eq!(ss.page(3).dim(0, 0), 0);
        assert_eq!(ss.page(3).dim(2, -1), 0);
        assert_eq!(ss.collapse_at(5), Some(3));
        assert!(ss.converge_check().converges());
        assert!(ss.check_invariants(4).is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        let down = Matrix::new(1, vec![vec![(0, rat(1, 1))]]);
        assert!(FilteredSlice::new(0, vec![vec![1], vec![0]], vec![down]).is_err());
        assert!(FilteredSlice::new(0, vec![vec![0], vec![0]], vec![]).is_err());
        let c = FilteredSlice::new(0, vec![vec![0], vec![0], vec![0]], vec![identity(1), identity(1)]);
        assert!(matches!(c, Err(Error::BadFiltration(_))));
    }
}
