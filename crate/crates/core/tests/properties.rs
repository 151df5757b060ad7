use proptest::prelude::*;

use kdvbh_core::algebra::{rat, Bidegree, DiffPoly, Monomial, Rational, Var};
use kdvbh_core::cohomeng::{Engine, Target};
use kdvbh_core::kdvpencil::Pencil;
use kdvbh_core::linwin::{monomials, stabilized_dims, Matrix, SliceBasis, SparseVec, Stabilization, Subquotient, Subspace, Window};
use kdvbh_core::specseq::{FilteredSlice, SpectralSequence};
use kdvbh_core::varcalc::{delta_theta, delta_u};

fn monomial() -> impl Strategy<Value = Monomial> {
    (0..2u32, 0..3u32, prop::collection::vec((1..4u32, 0..3u32), 0..2), prop::collection::btree_set(0..4u32, 0..3))
        .prop_map(|(l, u, even, odd)| Monomial::from_parts(l, u, even, odd).expect("distinct odd jets").1)
}

fn poly() -> impl Strategy<Value = DiffPoly> {
    prop::collection::vec((monomial(), -3..4i64), 0..4).prop_map(|terms| {
        let mut a = DiffPoly::zero();
        for (m, c) in terms {
            a.add_term(m, rat(c, 1));
        }
        a
    })
}

fn sign(odd: bool) -> Rational {
    rat(if odd { -1 } else { 1 }, 1)
}

/// A polynomial whose monomials all have the parity of `m`.
fn parity(m: &Monomial) -> bool {
    m.super_degree() % 2 == 1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn supercommutative(a in monomial(), b in monomial()) {
        let (pa, pb) = (DiffPoly::from(a.clone()), DiffPoly::from(b.clone()));
        let s = sign(parity(&a) && parity(&b));
        prop_assert_eq!(&pa * &pb, (&pb * &pa).scale(&s));
    }

    #[test]
    fn associative(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn odd_left_derivation(a in monomial(), b in poly(), s in 0..4u32) {
        let t = Var::Theta(s);
        let pa = DiffPoly::from(a.clone());
        let lhs = (&pa * &b).partial(t);
        let rhs = &(&pa.partial(t) * &b) + &(&pa * &b.partial(t)).scale(&sign(parity(&a)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn even_derivations(a in poly(), b in poly()) {
        prop_assert_eq!((&a * &b).dtot(), &(&a.dtot() * &b) + &(&a * &b.dtot()));
        let u = Var::U(1);
        prop_assert_eq!((&a * &b).partial(u), &(&a.partial(u) * &b) + &(&a * &b.partial(u)));
    }

    #[test]
    fn dtot_shifts_bidegree(m in monomial()) {
        let da = DiffPoly::from(m.clone()).dtot();
        for (n, _) in da.terms() {
            prop_assert_eq!(n.bidegree(), Bidegree::new(m.super_degree(), m.degree() + 1));
            prop_assert_eq!(n.weight(), m.weight());
        }
    }

    #[test]
    fn variational_derivative_kills_total_derivatives(a in poly()) {
        let b = a.dtot();
        prop_assert!(delta_u(&b).is_zero());
        prop_assert!(delta_theta(&b).is_zero());
    }

    #[test]
    fn pencil_relations(a in poly()) {
        let p = Pencil::new();
        prop_assert!(p.d1.apply(&p.d1.apply(&a)).is_zero());
        prop_assert!(p.d2.apply(&p.d2.apply(&a)).is_zero());
        prop_assert!((&p.d1.apply(&p.d2.apply(&a)) + &p.d2.apply(&p.d1.apply(&a))).is_zero());
        prop_assert!(p.d_lambda.apply(&p.d_lambda.apply(&a)).is_zero());
        prop_assert_eq!(p.d1.apply(&a.dtot()), p.d1.apply(&a).dtot());
        prop_assert_eq!(p.d2.apply(&a.dtot()), p.d2.apply(&a).dtot());
    }

    #[test]
    fn parse_print_roundtrip(a in poly()) {
        let text = a.to_string();
        let back: DiffPoly = text.parse().unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn slice_coordinates_roundtrip(a in poly()) {
        for (m, _) in a.terms() {
            let b = SliceBasis::enumerate(m.bidegree(), Window::new(m.weight(), m.lambda_exp()));
            let one = DiffPoly::from(m.clone());
            prop_assert_eq!(b.poly(&b.coords(&one).unwrap()), one);
        }
    }
}

fn matrix(rows: usize, entries: &[i64]) -> Matrix {
    let cols = entries
        .chunks(rows)
        .map(|c| c.iter().enumerate().filter(|(_, x)| **x != 0).map(|(i, x)| (i, rat(*x, 1))).collect())
        .collect();
    Matrix::new(rows, cols)
}

fn random_matrix() -> impl Strategy<Value = Matrix> {
    (1..5usize, 1..5usize).prop_flat_map(|(r, c)| prop::collection::vec(-2..3i64, r * c).prop_map(move |e| matrix(r, &e)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn rank_nullity(m in random_matrix()) {
        let k = m.kernel();
        prop_assert_eq!(m.rank() + k.dim(), m.ncols());
        for v in k.basis() {
            prop_assert!(m.apply(&v).is_empty());
        }
    }

    #[test]
    fn column_permutation_keeps_rank(m in random_matrix(), shift in 0..4usize) {
        let mut cols = m.cols().to_vec();
        let len = cols.len();
        cols.rotate_left(shift % len);
        let p = Matrix::new(m.nrows(), cols);
        prop_assert_eq!(p.rank(), m.rank());
        prop_assert_eq!(p.image().dim(), m.image().dim());
        prop_assert!(p.image().contains_subspace(&m.image()));
    }

    #[test]
    fn subquotient_is_independent_of_generators(m in random_matrix(), n in random_matrix()) {
        let amb = m.nrows();
        let den_cols: Vec<SparseVec> = n.cols().iter().map(|c| c.iter().filter(|(i, _)| *i < amb).cloned().collect()).collect();
        let num = m.image().sum(&Subspace::span(amb, den_cols.iter()));
        let den = Subspace::span(amb, den_cols.iter());
        let rev: Vec<SparseVec> = den_cols.iter().rev().cloned().collect();
        let a = Subquotient::new(num.clone(), den);
        let b = Subquotient::new(num.clone(), Subspace::span(amb, rev.iter()));
        prop_assert_eq!(a.dim(), b.dim());
        prop_assert_eq!(a.dim(), num.dim() - a.denominator().dim());
    }
}

/// A direct sum of elementary filtered complexes (`x ↦ y` with a level jump,
/// or a lone vector) in a filtration-preserving random basis.
#[derive(Clone, Debug)]
struct Elementary {
    degree: usize,
    from: i64,
    jump: Option<i64>,
}

fn elementary() -> impl Strategy<Value = Elementary> {
    (0..2usize, 0..3i64, prop::option::of(0..3i64)).prop_map(|(degree, from, jump)| Elementary { degree, from, jump })
}

fn assemble(parts: &[Elementary], mix: &[i64]) -> FilteredSlice {
    let mut levels = vec![Vec::new(); 3];
    let mut pairs = Vec::new();
    for e in parts {
        let x = levels[e.degree].len();
        levels[e.degree].push(e.from);
        if let Some(j) = e.jump {
            let y = levels[e.degree + 1].len();
            levels[e.degree + 1].push(e.from + j);
            pairs.push((e.degree, x, y));
        }
    }
    // T_n: e_i ↦ e_i + Σ_{j > i, level_j ≥ level_i} c e_j
    let mut mixes = mix.iter().cycle();
    let t: Vec<Matrix> = levels
        .iter()
        .map(|lv| {
            let cols = (0..lv.len())
                .map(|i| {
                    let mut col = vec![(i, rat(1, 1))];
                    for j in i + 1..lv.len() {
                        let c = *mixes.next().unwrap();
                        if lv[j] >= lv[i] && c != 0 {
                            col.push((j, rat(c, 1)));
                        }
                    }
                    col
                })
                .collect();
            Matrix::new(lv.len(), cols)
        })
        .collect();
    let diffs = (0..2)
        .map(|n| {
            let mut d = vec![Vec::new(); levels[n].len()];
            for &(deg, x, y) in &pairs {
                if deg == n {
                    d[x] = vec![(y, rat(1, 1))];
                }
            }
            let d = Matrix::new(levels[n + 1].len(), d);
            // T⁻¹ d T, column by column
            let cols = (0..levels[n].len())
                .map(|j| t[n + 1].solve(&d.apply(t[n].col(j))).expect("T is invertible"))
                .collect();
            Matrix::new(levels[n + 1].len(), cols)
        })
        .collect();
    FilteredSlice::new(0, levels, diffs).expect("filtered complex")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectral_sequence_of_elementary_sums(parts in prop::collection::vec(elementary(), 1..6), mix in prop::collection::vec(-1..2i64, 1..8)) {
        let c = assemble(&parts, &mix);
        let mut ss = SpectralSequence::new(&c);
        let expected = parts.iter().filter_map(|e| e.jump).max().map_or(0, |j| j + 1);
        prop_assert_eq!(ss.collapse_at(ss.stable_page()), Some(expected));
        let conv = ss.converge_check();
        prop_assert!(conv.converges());
        for row in &conv.rows {
            let lone = parts.iter().filter(|e| e.jump.is_none() && e.from == row.p && e.degree as i64 == row.p + row.q).count();
            prop_assert_eq!(row.e_infinity, lone);
        }
        prop_assert!(ss.check_invariants(4).is_empty());
    }
}

#[test]
fn enumeration_matches_brute_force() {
    for d in 0..=5u32 {
        for p in 0..=4u32 {
            for (n, l) in [(0, 0), (2, 1), (3, 2)] {
                let got = monomials(Bidegree::new(p, d), n, l);
                let mut want = Vec::new();
                // every exponent of λ, u, u¹..u^d and every subset of θ⁰..θ^d
                let jets = d as usize;
                let mut exps = vec![0u32; jets + 2];
                loop {
                    for set in 0u32..(1 << (jets + 1)) {
                        let odd: Vec<u32> = (0..=d).filter(|s| set & (1 << s) != 0).collect();
                        let even: Vec<(u32, u32)> = (1..=d).map(|s| (s, exps[s as usize + 1])).collect();
                        let m = Monomial::from_parts(exps[0], exps[1], even, odd).unwrap().1;
                        if m.bidegree() == Bidegree::new(p, d) && m.weight() <= n && m.lambda_exp() <= l {
                            want.push(m);
                        }
                    }
                    let mut i = 0;
                    while i < exps.len() {
                        exps[i] += 1;
                        if exps[i] <= n {
                            break;
                        }
                        exps[i] = 0;
                        i += 1;
                    }
                    if i == exps.len() {
                        break;
                    }
                }
                want.sort();
                want.dedup();
                let mut got_sorted = got.clone();
                got_sorted.sort();
                assert_eq!(got_sorted, want, "({p},{d}) at {n}:{l}");
                assert_eq!(got, got_sorted, "enumeration is in canonical order");
            }
        }
    }
}

#[test]
fn bh_boundaries_either_order() {
    let p = Pencil::new();
    for (b, m) in [(Bidegree::new(2, 2), 2), (Bidegree::new(3, 3), 2), (Bidegree::new(4, 4), 1), (Bidegree::new(3, 2), 3)] {
        let from = SliceBasis::piece(Bidegree::new(b.p - 2, b.d - 2), m + 1, 0);
        let here = SliceBasis::piece(b, m, 0);
        let image = |f: &dyn Fn(&DiffPoly) -> DiffPoly| {
            let cols: Vec<SparseVec> = from.monomials().iter().map(|x| here.coords(&f(&DiffPoly::from(x.clone()))).unwrap()).collect();
            Matrix::new(here.len(), cols).image()
        };
        let a = image(&|x| p.d1.apply(&p.d2.apply(x)));
        let c = image(&|x| p.d2.apply(&p.d1.apply(x)));
        assert!(a.contains_subspace(&c) && c.contains_subspace(&a), "({},{})", b.p, b.d);
    }
}

#[test]
fn windowed_dims_are_monotone() {
    let e = Engine::new();
    let ladder: Vec<Window> = [(1, 1), (2, 1), (2, 2), (3, 2)].into_iter().map(|(n, l)| Window::new(n, l)).collect();
    for t in Target::ALL {
        for b in [Bidegree::new(0, 0), Bidegree::new(2, 1), Bidegree::new(3, 3)] {
            let dims = e.windowed_dims(t, b, &ladder).unwrap();
            assert!(dims.windows(2).all(|w| w[0].dim <= w[1].dim), "{} ({},{})", t.name(), b.p, b.d);
        }
    }
}

#[test]
fn stabilization_of_exact_sequences() {
    let w = |n, l| Window::new(n, l);
    let seq = |v: &[(u32, u32, usize)]| v.iter().map(|&(n, l, d)| (w(n, l), d)).collect::<Vec<_>>();
    assert_eq!(stabilized_dims(&seq(&[(2, 0, 5), (3, 0, 5), (4, 0, 5)])).unwrap(), Stabilization::Constant(5));
    assert_eq!(stabilized_dims(&seq(&[(2, 0, 3), (3, 0, 4), (4, 0, 5)])).unwrap(), Stabilization::LinearInN { slope: 1 });
    assert_eq!(
        stabilized_dims(&seq(&[(2, 2, 3), (3, 2, 3), (4, 2, 3), (4, 3, 4), (4, 4, 5)])).unwrap(),
        Stabilization::LinearInL { slope: 1 }
    );
    assert_eq!(stabilized_dims(&seq(&[(2, 0, 1), (3, 0, 4), (4, 0, 5)])).unwrap(), Stabilization::Unstable);
    assert_eq!(stabilized_dims(&seq(&[(2, 0, 1), (3, 0, 4)])).unwrap(), Stabilization::Inconclusive);
    assert!(stabilized_dims(&seq(&[(3, 0, 1), (2, 0, 4)])).is_err());
}
