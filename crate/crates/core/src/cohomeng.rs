//! The cohomology groups of the pencil, computed from their definitions on
//! windowed slices, and the audits that tie them to the spectral sequence.
//!
//! Every operator involved preserves the polynomial weight except `D₁`,
//! which lowers it by one. Each group is therefore computed exactly on the
//! finite piece of a fixed weight `m`; the windowed dimension at `(N, L)`
//! counts, over the pieces `m ≤ N`, the classes that have a representative
//! with `λ`-power at most `L`.
//!
//! Polynomial coefficients stand in for `C^∞(ℝ)`. A `C^∞` factor shows up
//! as one class per weight (growth linear in `N`), `ℝ[λ]` as one class per
//! `λ`-power (growth linear in `L`), `ℝ` as a constant `1`, and
//! `C^∞/ℝ[u]` has no polynomial elements at all.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::algebra::{Bidegree, DiffPoly, Monomial, Rational};
use crate::error::{Error, Result};
use crate::kdvpencil::{d1_on, e1_basis, KdvSlice, Pencil};
use crate::linwin::{stabilized_dims, Matrix, OperatorMatrix, SliceBasis, SparseVec, Stabilization, Subquotient, Subspace, Window};
use crate::specseq::{ConvergenceReport, Page, SpectralSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    /// `H(Â[λ], D_λ)`
    LambdaA,
    /// `H(F̂[λ], d_λ)`
    LambdaF,
    /// `BH(Â, D₁, D₂)`
    BhA,
    /// `BH(F̂, d₁, d₂)`
    BhF,
    /// `H(Â, D₁)`
    PoissonA,
}

impl Target {
    pub const ALL: [Target; 5] = [Target::LambdaA, Target::LambdaF, Target::BhA, Target::BhF, Target::PoissonA];

    pub fn name(self) -> &'static str {
        match self {
            Target::LambdaA => "H_lambda_A",
            Target::LambdaF => "H_lambda_F",
            Target::BhA => "BH_A",
            Target::BhF => "BH_F",
            Target::PoissonA => "H_D1_A",
        }
    }

    pub fn from_name(s: &str) -> Option<Target> {
        Target::ALL.into_iter().find(|t| t.name() == s)
    }

    pub fn uses_lambda(self) -> bool {
        matches!(self, Target::LambdaA | Target::LambdaF)
    }
}

/// A group on one weight piece: cycles modulo boundaries inside the span of
/// `basis`.
#[derive(Clone, Debug)]
pub struct PieceHomology {
    pub weight: u32,
    pub basis: SliceBasis,
    pub quotient: Subquotient,
}

impl PieceHomology {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    /// Classes represented by an element of `λ`-power at most `l`.
    pub fn dim_within(&self, l: u32) -> usize {
        self.quotient.dim_within(&self.basis.mask(|m| m.lambda_exp() <= l))
    }

    /// Whether the given elements are cycles whose classes span the group.
    pub fn spanned_by(&self, elements: &[DiffPoly]) -> Result<bool> {
        let mut span = self.quotient.denominator().clone();
        for e in elements {
            let v = self.basis.coords(e)?;
            if !self.quotient.numerator().contains(&v) {
                return Ok(false);
            }
            span.insert(&v);
        }
        Ok(span.contains_subspace(self.quotient.numerator()))
    }
}

/// Bidegrees where the bihamiltonian groups are not computed by the
/// `λ`-complex.
pub const EXCEPTIONAL: [Bidegree; 4] =
    [Bidegree::new(0, 0), Bidegree::new(1, 0), Bidegree::new(1, 1), Bidegree::new(2, 1)];

#[derive(Clone, Debug)]
pub struct Engine {
    pencil: Pencil,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new()
    }
}

fn basis(p: i64, d: i64, m: i64, lambda: bool) -> SliceBasis {
    if p < 0 || d < 0 || m < 0 {
        return SliceBasis::empty(Bidegree::new(0, 0));
    }
    let (p, d, m) = (p as u32, d as u32, m as u32);
    SliceBasis::piece(Bidegree::new(p, d), m, if lambda { m } else { 0 })
}

fn matrix(op: impl Fn(&DiffPoly) -> DiffPoly, from: &SliceBasis, to: &SliceBasis) -> Result<Matrix> {
    Ok(OperatorMatrix::assemble(op, from.clone(), to.clone())?.matrix)
}

impl Engine {
    pub fn new() -> Self {
        Engine { pencil: Pencil::new() }
    }

    pub fn pencil(&self) -> &Pencil {
        &self.pencil
    }

    /// The group `target` at bidegree `b` on the piece of weight `m`.
    pub fn piece(&self, target: Target, b: Bidegree, m: u32) -> Result<PieceHomology> {
        let (p, d, w) = (b.p as i64, b.d as i64, m as i64);
        let pen = &self.pencil;
        let dl = |a: &DiffPoly| pen.d_lambda.apply(a);
        let d1 = |a: &DiffPoly| pen.d1.apply(a);
        let d2 = |a: &DiffPoly| pen.d2.apply(a);
        let dt = |a: &DiffPoly| a.dtot();
        let lam = target.uses_lambda();
        let here = basis(p, d, w, lam);
        let full = Subspace::full(here.len());
        let (cycles, boundaries) = match target {
            Target::LambdaA => {
                let out = matrix(dl, &here, &basis(p + 1, d + 1, w, true))?;
                let inc = matrix(dl, &basis(p - 1, d - 1, w, true), &here)?;
                (out.kernel(), inc.image())
            }
            Target::LambdaF => {
                let next = basis(p + 1, d + 1, w, true);
                let out = matrix(dl, &here, &next)?;
                let exact_next = matrix(dt, &basis(p + 1, d, w, true), &next)?.image();
                let inc = matrix(dl, &basis(p - 1, d - 1, w, true), &here)?;
                let exact = matrix(dt, &basis(p, d - 1, w, true), &here)?.image();
                (out.preimage(&full, &exact_next), inc.image().sum(&exact))
            }
            Target::BhA => {
                let o1 = matrix(d1, &here, &basis(p + 1, d + 1, w - 1, false))?;
                let o2 = matrix(d2, &here, &basis(p + 1, d + 1, w, false))?;
                let inc = matrix(|a| d1(&d2(a)), &basis(p - 2, d - 2, w + 1, false), &here)?;
                (o1.stack(&o2).kernel(), inc.image())
            }
            Target::BhF => {
                let n1 = basis(p + 1, d + 1, w - 1, false);
                let n2 = basis(p + 1, d + 1, w, false);
                let o1 = matrix(d1, &here, &n1)?;
                let o2 = matrix(d2, &here, &n2)?;
                let e1 = matrix(dt, &basis(p + 1, d, w - 1, false), &n1)?.image();
                let e2 = matrix(dt, &basis(p + 1, d, w, false), &n2)?.image();
                let inc = matrix(|a| d1(&d2(a)), &basis(p - 2, d - 2, w + 1, false), &here)?;
                let exact = matrix(dt, &basis(p, d - 1, w, false), &here)?.image();
                (o1.preimage(&full, &e1).intersect(&o2.preimage(&full, &e2)), inc.image().sum(&exact))
            }
            Target::PoissonA => {
                let out = matrix(d1, &here, &basis(p + 1, d + 1, w - 1, false))?;
                let inc = matrix(d1, &basis(p - 1, d - 1, w + 1, false), &here)?;
                (out.kernel(), inc.image())
            }
        };
        Ok(PieceHomology { weight: m, basis: here, quotient: Subquotient::new(cycles, boundaries) })
    }

    /// Pieces `0..=nmax` of a group.
    pub fn pieces(&self, target: Target, b: Bidegree, nmax: u32) -> Result<Vec<PieceHomology>> {
        (0..=nmax).map(|m| self.piece(target, b, m)).collect()
    }

    /// Windowed dimensions of a group along a ladder.
    pub fn windowed_dims(&self, target: Target, b: Bidegree, ladder: &[Window]) -> Result<Vec<WindowDim>> {
        let nmax = ladder.iter().map(|w| w.n).max().unwrap_or(0);
        let pieces = self.pieces(target, b, nmax)?;
        Ok(ladder.iter().map(|&w| WindowDim { window: w, dim: windowed(&pieces, w) }).collect())
    }

    /// The full report for one group.
    pub fn report(&self, target: Target, b: Bidegree, ladder: &[Window]) -> Result<CohomReport> {
        let windows = self.windowed_dims(target, b, ladder)?;
        let seq: Vec<(Window, usize)> = windows.iter().map(|x| (x.window, x.dim)).collect();
        let stabilization = stabilized_dims(&seq)?;
        let mut report = CohomReport {
            target,
            bidegree: b,
            windows,
            stabilization,
            model_notes: model_notes(target, b),
            oracle_crosschecks: Vec::new(),
        };
        if target == Target::BhF && b == Bidegree::new(1, 1) {
            let nmax = ladder.iter().map(|w| w.n).max().unwrap_or(0);
            let ok = self.bh_f_11_representatives(nmax)?;
            report.oracle_crosschecks.push(Crosscheck { name: "represented_by_h(u)u1t0".to_string(), passed: ok });
        }
        Ok(report)
    }

    pub fn h_dlambda_a(&self, b: Bidegree, ladder: &[Window]) -> Result<CohomReport> {
        self.report(Target::LambdaA, b, ladder)
    }

    pub fn h_dlambda_f(&self, b: Bidegree, ladder: &[Window]) -> Result<CohomReport> {
        self.report(Target::LambdaF, b, ladder)
    }

    pub fn bh_a(&self, b: Bidegree, ladder: &[Window]) -> Result<CohomReport> {
        self.report(Target::BhA, b, ladder)
    }

    pub fn bh_f(&self, b: Bidegree, ladder: &[Window]) -> Result<CohomReport> {
        self.report(Target::BhF, b, ladder)
    }

    pub fn h_poisson_scalar(&self, b: Bidegree, ladder: &[Window]) -> Result<CohomReport> {
        self.report(Target::PoissonA, b, ladder)
    }

    /// Whether every class of `BH¹₁(F̂)` on the pieces up to `nmax` is
    /// represented by some `∫h(u)u¹θ`.
    pub fn bh_f_11_representatives(&self, nmax: u32) -> Result<bool> {
        for m in 0..=nmax {
            let piece = self.piece(Target::BhF, Bidegree::new(1, 1), m)?;
            let reps: Vec<DiffPoly> = if m == 0 {
                Vec::new()
            } else {
                let tail: DiffPoly = "u1 t0".parse().expect("literal");
                Vec::from([DiffPoly::u_pow(m - 1).mul(&tail)])
            };
            if !piece.spanned_by(&reps)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `BH` against the `λ`-complex, for `Â` and for `F̂`, window by
    /// window. Refuses the exceptional bidegrees.
    pub fn compare_bh_vs_lambda(&self, b: Bidegree, ladder: &[Window]) -> Result<Comparison> {
        if EXCEPTIONAL.contains(&b) {
            return Err(Error::ExceptionalBidegree(b));
        }
        self.comparison_rows(b, ladder)
    }

    /// The same table without the refusal, to exhibit the exceptions.
    pub fn comparison_rows(&self, b: Bidegree, ladder: &[Window]) -> Result<Comparison> {
        let get = |t| self.windowed_dims(t, b, ladder);
        let (ba, ha, bf, hf) = (get(Target::BhA)?, get(Target::LambdaA)?, get(Target::BhF)?, get(Target::LambdaF)?);
        let rows = (0..ladder.len())
            .map(|i| ComparisonRow { window: ladder[i], bh_a: ba[i].dim, h_a: ha[i].dim, bh_f: bf[i].dim, h_f: hf[i].dim })
            .collect();
        Ok(Comparison { bidegree: b, rows })
    }

    /// Rank audit of the long exact sequence of
    /// `0 → Â[λ]/ℝ[λ] →∂ Â[λ] →∫ F̂[λ] → 0` around standard degree `d`,
    /// on every weight piece up to `nmax`.
    pub fn les_rank_audit(&self, d: u32, nmax: u32) -> Result<LesAudit> {
        let mut nodes = Vec::new();
        let mut quotient_rows = Vec::new();
        for m in 0..=nmax {
            let mut les = Les::new(self, m);
            let d = d as i64;
            let pmax = d + 2;
            for p in 0..=pmax {
                nodes.push(les.node(Node::A(p, d))?);
                nodes.push(les.node(Node::F(p, d))?);
                nodes.push(les.node(Node::AR(p, d))?);
                let a = les.group(Node::A(p, d))?.dim();
                let ar = les.group(Node::AR(p, d))?.dim();
                quotient_rows.push(QuotientRow { p: p as u32, d: d as u32, weight: m, dim_a: a, dim_ar: ar });
            }
        }
        Ok(LesAudit { d: d as i64, nodes, quotient_rows })
    }
}

fn windowed(pieces: &[PieceHomology], w: Window) -> usize {
    pieces.iter().filter(|x| x.weight <= w.n).map(|x| x.dim_within(w.l)).sum()
}

fn model_notes(target: Target, b: Bidegree) -> Vec<String> {
    let pb = (b.p, b.d);
    let mut notes = Vec::new();
    let quotient_note = "(C^inf/R[u]) t0 t1 has no polynomial elements; the group vanishes in the polynomial model";
    match (target, pb) {
        (Target::LambdaA, (2, 1)) | (Target::LambdaF, (1, 1)) | (Target::LambdaF, (2, 1)) => {
            notes.push(quotient_note.to_string())
        }
        (Target::LambdaA | Target::LambdaF, (0, 0)) => {
            notes.push("R[lambda] is seen through lambda-powers up to min(N, L)".to_string())
        }
        (Target::LambdaA | Target::BhA, (3, 3))
        | (Target::LambdaF | Target::BhF, (2, 3) | (3, 3))
        | (Target::BhA, (2, 1))
        | (Target::BhF, (1, 1) | (2, 1)) => {
            notes.push("a C^inf(R) factor appears as one class per weight, growing linearly in N".to_string())
        }
        _ => {}
    }
    notes
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowDim {
    pub window: Window,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crosscheck {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct CohomReport {
    pub target: Target,
    pub bidegree: Bidegree,
    pub windows: Vec<WindowDim>,
    pub stabilization: Stabilization,
    pub model_notes: Vec<String>,
    pub oracle_crosschecks: Vec<Crosscheck>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComparisonRow {
    pub window: Window,
    pub bh_a: usize,
    pub h_a: usize,
    pub bh_f: usize,
    pub h_f: usize,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub bidegree: Bidegree,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn agrees(&self) -> bool {
        self.rows.iter().all(|r| r.bh_a == r.h_a && r.bh_f == r.h_f)
    }
}

/// A node of the long exact sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Node {
    /// `H^p_d(Â[λ]/ℝ[λ])`
    AR(i64, i64),
    /// `H^p_d(Â[λ])`
    A(i64, i64),
    /// `H^p_d(F̂[λ])`
    F(i64, i64),
}

impl core::fmt::Display for Node {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Node::AR(p, d) => write!(f, "H^{p}_{d}(A/R)"),
            Node::A(p, d) => write!(f, "H^{p}_{d}(A)"),
            Node::F(p, d) => write!(f, "H^{p}_{d}(F)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LesNode {
    pub node: String,
    pub weight: u32,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub composite_zero: bool,
}

impl LesNode {
    pub fn exact(&self) -> bool {
        self.composite_zero && self.rank_in + self.rank_out == self.dim
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuotientRow {
    pub p: u32,
    pub d: u32,
    pub weight: u32,
    pub dim_a: usize,
    pub dim_ar: usize,
}

#[derive(Clone, Debug)]
pub struct LesAudit {
    pub d: i64,
    pub nodes: Vec<LesNode>,
    /// `H(Â[λ]/ℝ[λ])` against `H(Â[λ])`; they differ only at `(0,0)`.
    pub quotient_rows: Vec<QuotientRow>,
}

impl LesAudit {
    pub fn failures(&self) -> Vec<&LesNode> {
        self.nodes.iter().filter(|n| !n.exact()).collect()
    }

    pub fn quotient_mismatches(&self) -> Vec<QuotientRow> {
        self.quotient_rows
            .iter()
            .copied()
            .filter(|r| (r.dim_a == r.dim_ar) == (r.p == 0 && r.d == 0))
            .filter(|r| !(r.p == 0 && r.d == 0 && r.dim_a == r.dim_ar + 1))
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty() && self.quotient_mismatches().is_empty()
    }
}

/// Groups and connecting maps of the long exact sequence on one piece.
struct Les<'a> {
    engine: &'a Engine,
    weight: u32,
    groups: BTreeMap<Node, PieceHomology>,
}

impl<'a> Les<'a> {
    fn new(engine: &'a Engine, weight: u32) -> Self {
        Les { engine, weight, groups: BTreeMap::new() }
    }

    fn lambda_basis(&self, p: i64, d: i64, drop_constants: bool) -> SliceBasis {
        let b = basis(p, d, self.weight as i64, true);
        if !drop_constants || !(p == 0 && d == 0) {
            return b;
        }
        let keep: Vec<Monomial> = b.monomials().iter().filter(|m| m.weight() != m.lambda_exp()).cloned().collect();
        SliceBasis::from_monomials(b.bidegree(), b.window(), b.weight(), keep)
    }

    fn group(&mut self, node: Node) -> Result<&PieceHomology> {
        if !self.groups.contains_key(&node) {
            let g = match node {
                Node::A(p, d) | Node::F(p, d) if p < 0 || d < 0 => self.zero_group(),
                Node::AR(p, d) if p < 0 || d < 0 => self.zero_group(),
                Node::A(p, d) => self.engine.piece(Target::LambdaA, Bidegree::new(p as u32, d as u32), self.weight)?,
                Node::F(p, d) => self.engine.piece(Target::LambdaF, Bidegree::new(p as u32, d as u32), self.weight)?,
                Node::AR(p, d) => {
                    let dl = |a: &DiffPoly| self.engine.pencil.d_lambda.apply(a);
                    let here = self.lambda_basis(p, d, true);
                    let out = matrix(dl, &here, &self.lambda_basis(p + 1, d + 1, true))?;
                    let inc = matrix(dl, &self.lambda_basis(p - 1, d - 1, true), &here)?;
                    PieceHomology { weight: self.weight, basis: here, quotient: Subquotient::new(out.kernel(), inc.image()) }
                }
            };
            self.groups.insert(node, g);
        }
        Ok(&self.groups[&node])
    }

    fn zero_group(&self) -> PieceHomology {
        PieceHomology {
            weight: self.weight,
            basis: SliceBasis::empty(Bidegree::new(0, 0)),
            quotient: Subquotient::new(Subspace::zero(0), Subspace::zero(0)),
        }
    }

    /// The map out of `node` in class coordinates, and its target.
    fn out_map(&mut self, node: Node) -> Result<(Matrix, Node)> {
        let target = match node {
            Node::AR(p, d) => Node::A(p, d + 1),
            Node::A(p, d) => Node::F(p, d),
            Node::F(p, d) => Node::AR(p + 1, d),
        };
        let src = self.group(node)?.clone();
        let tgt = self.group(target)?.clone();
        let mut cols = Vec::new();
        for x in src.quotient.representatives() {
            let a = src.basis.poly(x);
            let image: SparseVec = match node {
                Node::AR(..) => tgt.basis.coords(&a.dtot())?,
                Node::A(..) => tgt.basis.coords(&a)?,
                Node::F(p, d) => {
                    // δ[a] = [b] with ∂b = D_λ a
                    let y = self.engine.pencil.d_lambda.apply(&a);
                    let ambient = self.lambda_basis(p + 1, d + 1, false);
                    let dt = matrix(|v| v.dtot(), &tgt.basis, &ambient)?;
                    dt.solve(&ambient.coords(&y)?)
                        .ok_or_else(|| Error::BadFiltration(format!("D_lambda a is not exact at {node}")))?
                }
            };
            let c = tgt
                .quotient
                .coords(&image)
                .ok_or_else(|| Error::BadFiltration(format!("image of a class of {node} is not a cycle")))?;
            cols.push(c);
        }
        Ok((Matrix::new(tgt.dim(), cols), target))
    }

    fn in_map(&mut self, node: Node) -> Result<Matrix> {
        let source = match node {
            Node::A(p, d) => Node::AR(p, d - 1),
            Node::F(p, d) => Node::A(p, d),
            Node::AR(p, d) => Node::F(p - 1, d),
        };
        Ok(self.out_map(source)?.0)
    }

    fn node(&mut self, node: Node) -> Result<LesNode> {
        let dim = self.group(node)?.dim();
        let inc = self.in_map(node)?;
        let (out, _) = self.out_map(node)?;
        Ok(LesNode {
            node: node.to_string(),
            weight: self.weight,
            dim,
            rank_in: inc.rank(),
            rank_out: out.rank(),
            composite_zero: out.compose(&inc).is_zero(),
        })
    }
}

/// One subcomplex piece with its pages.
pub struct SliceRun {
    pub slice: KdvSlice,
    /// `E_0 … E_R` for the requested `R`.
    pub pages: Vec<Page>,
    pub infinity: Page,
    pub collapse: Option<i64>,
    pub convergence: ConvergenceReport,
}

/// The spectral sequence of `(Â[λ], D_λ)` on all subcomplexes `d − p = k`
/// and weight pieces `m ≤ nmax`, in standard degrees up to `dmax`.
pub struct KdvSpectral {
    pub dmax: u32,
    pub nmax: u32,
    pub runs: Vec<SliceRun>,
}

/// Outcome of comparing the engine's `d₁` with the closed form at `(p,q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D1Check {
    pub p: u32,
    pub q: u32,
    /// Whether the closed-form basis spans the engine's `E₁^{p,q}`.
    pub spans: bool,
    pub engine_rank: usize,
    pub closed_form_rank: usize,
    /// `c` with `closed form = c · engine` on every piece, when it exists;
    /// `None` when both maps vanish.
    pub scalar: Option<Rational>,
    pub proportional: bool,
}

impl D1Check {
    pub fn passed(&self) -> bool {
        self.spans && self.proportional && self.engine_rank == self.closed_form_rank
    }
}

impl KdvSpectral {
    pub fn compute(pencil: &Pencil, dmax: u32, nmax: u32, pages: i64) -> Result<Self> {
        let runs = Self::cells(dmax, nmax)
            .into_iter()
            .map(|(k, m)| Self::run(pencil, k, m, dmax, pages))
            .collect::<Result<Vec<_>>>()?;
        Ok(KdvSpectral { dmax, nmax, runs })
    }

    /// The `(k, m)` pairs of all subcomplex pieces, in order.
    pub fn cells(dmax: u32, nmax: u32) -> Vec<(i64, u32)> {
        (-1..=dmax as i64).flat_map(|k| (0..=nmax).map(move |m| (k, m))).collect()
    }

    /// Assembles runs computed elsewhere, sorting them by `(k, m)`.
    pub fn from_runs(dmax: u32, nmax: u32, mut runs: Vec<SliceRun>) -> Self {
        runs.sort_by_key(|r| (r.slice.k, r.slice.weight));
        KdvSpectral { dmax, nmax, runs }
    }

    /// A single subcomplex piece.
    pub fn run(pencil: &Pencil, k: i64, m: u32, dmax: u32, pages: i64) -> Result<SliceRun> {
        let slice = KdvSlice::build(pencil, k, m, dmax)?;
        let mut ss = SpectralSequence::new(&slice.slice);
        let pg: Vec<Page> = (0..=pages).map(|r| ss.page(r)).collect();
        let stable = ss.stable_page();
        let infinity = ss.page(stable);
        let collapse = ss.collapse_at(stable);
        let convergence = ss.converge_check();
        drop(ss);
        Ok(SliceRun { slice, pages: pg, infinity, collapse, convergence })
    }

    fn page_of(run: &SliceRun, r: Option<i64>) -> &Page {
        match r {
            Some(r) if (r as usize) < run.pages.len() => &run.pages[r as usize],
            _ => &run.infinity,
        }
    }

    /// Windowed dimension of `E_r^{p,q}` (`E_∞` for `None`), summed over
    /// subcomplexes and over pieces `m ≤ N`.
    pub fn page_dim(&self, r: Option<i64>, p: i64, q: i64, w: Window) -> usize {
        let n = p + q;
        self.runs
            .iter()
            .filter(|run| run.slice.weight <= w.n && n <= run.slice.slice.trusted_top())
            .map(|run| match Self::page_of(run, r).get(p, q) {
                Some(e) => e.quotient.dim_within(&run.slice.lambda_mask(n, w.l)),
                None => 0,
            })
            .sum()
    }

    /// Every trusted position with a nonzero windowed entry on page `r`.
    pub fn nonzero_positions(&self, r: Option<i64>, w: Window) -> BTreeMap<(i64, i64), usize> {
        let mut out = BTreeMap::new();
        for run in self.runs.iter().filter(|run| run.slice.weight <= w.n) {
            for (&(p, q), e) in &Self::page_of(run, r).entries {
                let n = p + q;
                if n > run.slice.slice.trusted_top() {
                    continue;
                }
                let dim = e.quotient.dim_within(&run.slice.lambda_mask(n, w.l));
                if dim > 0 {
                    *out.entry((p, q)).or_insert(0) += dim;
                }
            }
        }
        out
    }

    /// Windowed `dim H^n` of the subcomplex `k`, summed over pieces.
    pub fn cohomology_dim(&self, k: i64, n: i64, w: Window) -> Result<usize> {
        let mut total = 0;
        for run in self.runs.iter().filter(|r| r.slice.k == k && r.slice.weight <= w.n) {
            let c = &run.slice.slice;
            let z = c.differential(n).kernel();
            let b = c.differential(n - 1).image();
            let mask = run.slice.lambda_mask(n, w.l);
            total += z.dim_within(&mask) - b.dim_within(&mask);
        }
        Ok(total)
    }

    /// Largest collapse index over all runs, and whether every run collapsed.
    pub fn collapse(&self) -> (Option<i64>, bool) {
        let all = self.runs.iter().all(|r| r.collapse.is_some());
        (self.runs.iter().filter_map(|r| r.collapse).max(), all)
    }

    /// Largest `r ≥ 2` with a nonzero `d_r` on some stored page, if any.
    pub fn nonzero_higher_differential(&self) -> Option<(i64, i64, u32)> {
        for run in &self.runs {
            for page in run.pages.iter().skip(2) {
                if !page.differentials_vanish() {
                    return Some((page.r, run.slice.k, run.slice.weight));
                }
            }
        }
        None
    }

    /// Runs whose `E_∞` disagrees with the graded cohomology.
    pub fn convergence_failures(&self) -> Vec<(i64, u32)> {
        self.runs.iter().filter(|r| !r.convergence.converges()).map(|r| (r.slice.k, r.slice.weight)).collect()
    }

    /// Windowed `E₁^{p,q}` against the closed-form basis count.
    pub fn e1_crosscheck(&self, p: u32, q: u32, w: Window) -> (usize, usize) {
        (self.page_dim(Some(1), p as i64, q as i64, w), e1_basis(p, q, w).len())
    }

    /// Maps the closed-form basis of `E₁^{p,q}` into the engine's first page
    /// and compares the engine's `d₁` with the closed-form `d₁`.
    pub fn d1_crosscheck(&self, p: u32, q: u32) -> Result<D1Check> {
        let n = (p + q) as i64;
        let oracle = e1_basis(p, q, Window::new(self.nmax, 0));
        let mut spans = true;
        let (mut er, mut cr) = (0, 0);
        let mut scalar: Option<Rational> = None;
        let mut proportional = true;
        for run in &self.runs {
            let sl = &run.slice;
            let Some(src_basis) = sl.basis(n) else { continue };
            let mine: Vec<&DiffPoly> = oracle
                .iter()
                .filter(|a| {
                    let (m, _) = a.terms().next().expect("nonzero");
                    m.weight() == sl.weight && (m.degree() as i64 - m.super_degree() as i64) == sl.k
                })
                .collect();
            let page = &run.pages[1];
            let Some(entry) = page.get(p as i64, q as i64) else {
                spans &= mine.is_empty();
                continue;
            };
            let mut src = Vec::new();
            for a in &mine {
                let v = src_basis.coords(a)?;
                src.push(entry.quotient.coords(&v).ok_or_else(|| Error::NotInPageSpace(a.terms().next().expect("nonzero").0.clone()))?);
            }
            spans &= Matrix::new(entry.dim(), src.clone()).rank() == entry.dim();
            if mine.is_empty() {
                continue;
            }
            let target = page.get(p as i64 + 1, q as i64);
            let tgt_dim = target.map_or(0, |t| t.dim());
            let engine = Matrix::new(tgt_dim, src.iter().map(|c| entry.d_r.apply(c)).collect());
            let mut closed = Vec::new();
            for a in &mine {
                let img = d1_on(a, p, q)?;
                let col = match target {
                    Some(t) => {
                        let tb = sl.basis(n + 1).expect("target degree stored");
                        let v = tb.coords(&img)?;
                        t.quotient.coords(&v).ok_or_else(|| Error::NotInPageSpace(img.terms().next().expect("nonzero").0.clone()))?
                    }
                    None if img.is_zero() => Vec::new(),
                    None => return Err(Error::NotInPageSpace(img.terms().next().expect("nonzero").0.clone())),
                };
                closed.push(col);
            }
            let closed = Matrix::new(tgt_dim, closed);
            er += engine.rank();
            cr += closed.rank();
            if engine.is_zero() && closed.is_zero() {
                continue;
            }
            match closed.proportionality(&engine) {
                Some(c) if !engine.is_zero() => match &scalar {
                    Some(s) if *s != c => proportional = false,
                    _ => scalar = Some(c),
                },
                _ => proportional = false,
            }
        }
        Ok(D1Check { p, q, spans, engine_rank: er, closed_form_rank: cr, scalar, proportional })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder() -> Vec<Window> {
        Vec::from([Window::new(1, 1), Window::new(2, 1), Window::new(3, 1)])
    }

    #[test]
    fn small_groups() {
        let e = Engine::new();
        let dims = |t, p, d| -> Vec<usize> {
            e.windowed_dims(t, Bidegree::new(p, d), &ladder()).unwrap().iter().map(|x| x.dim).collect()
        };
        assert_eq!(dims(Target::LambdaA, 0, 0), [2, 2, 2]);
        assert_eq!(dims(Target::LambdaA, 2, 1), [0, 0, 0]);
        assert_eq!(dims(Target::LambdaA, 3, 3), [2, 3, 4]);
        assert_eq!(dims(Target::BhA, 2, 1), [2, 3, 4]);
        assert_eq!(dims(Target::BhA, 0, 0), [1, 1, 1]);
        assert_eq!(dims(Target::PoissonA, 1, 0), [1, 1, 1]);
        assert_eq!(dims(Target::PoissonA, 1, 1), [0, 0, 0]);
    }

    #[test]
    fn exceptional_refusal() {
        let e = Engine::new();
        for b in EXCEPTIONAL {
            assert_eq!(e.compare_bh_vs_lambda(b, &ladder()).unwrap_err(), Error::ExceptionalBidegree(b));
        }
        assert!(e.compare_bh_vs_lambda(Bidegree::new(2, 2), &ladder()).unwrap().agrees());
    }

    #[test]
    fn les_low_degree() {
        let e = Engine::new();
        let audit = e.les_rank_audit(1, 2).unwrap();
        assert!(audit.failures().is_empty(), "{:?}", audit.failures());
        assert!(audit.quotient_mismatches().is_empty());
    }

    #[test]
    fn d1_against_engine() {
        let ks = KdvSpectral::compute(&Pencil::new(), 4, 2, 2).unwrap();
        let c = ks.d1_crosscheck(1, 2).unwrap();
        assert!(c.passed(), "{c:?}");
        assert_eq!(ks.e1_crosscheck(1, 2, Window::new(2, 1)), (5, 5));
    }
}
