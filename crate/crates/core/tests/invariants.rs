//! Property tests for the structural invariants: isometry conditions, the
//! symmetry actions, field embeddings, constructions and samplers.

#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use vecstoch::sample::{random_unitary, rng_for, sinkhorn_with, symmetric_sinkhorn_with, unit_scalar};
use vecstoch::*;

fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::R), Just(Field::C), Just(Field::H)]
}

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut rng_for(seed, 0));
    p
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        prop_assert!((x - y).abs() <= tol, "{} vs {}", x, y);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// For square unitaries `V*V − I` and `VV* − I` share their spectral
    /// norm, so either residual bounds the other up to a factor `n`.
    #[test]
    fn column_and_row_conditions_agree_at_d_1(
        field in field_strategy(),
        n in 1usize..=6,
        seed in any::<u64>(),
        eps in prop_oneof![Just(0.0), 1e-13f64..1e-6],
    ) {
        let v = sample_isometry(field, n, 1, seed).unwrap();
        let mut rows = v.rows();
        let mut rng = rng_for(seed, 1);
        for row in rows.iter_mut() {
            for entry in row.iter_mut() {
                entry[0] += sample::normal_scalar(field, &mut rng).scale(eps);
            }
        }
        let w = VectorEntryMatrix::from_rows(field, 1, rows).unwrap();
        let rep = is_isometry(&w, 1e-9);
        let bound = n as f64 * 1.0001;
        prop_assert!(rep.residual_rows <= bound * rep.residual_cols + 1e-13);
        prop_assert!(rep.residual_cols <= bound * rep.residual_rows + 1e-13);
        let tol = 1e-10;
        prop_assert_eq!(is_isometry(&v, tol).ok, is_isometry(&v, tol).residual_rows <= 10.0 * tol);
    }

    #[test]
    fn diagonal_action_preserves_nu(
        field in field_strategy(),
        n in 1usize..=5,
        d in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let v = sample_isometry(field, n, d, seed).unwrap();
        let mut rng = rng_for(seed, 7);
        let blocks: Vec<SquareMatrix> = (0..n).map(|_| random_unitary(field, d, &mut rng)).collect();
        let phases: Vec<Scalar> = (0..n).map(|_| unit_scalar(field, &mut rng)).collect();
        let w = act_diag(&v, &blocks, &phases, 1e-10).unwrap();
        prop_assert!(is_isometry(&w, 1e-10).ok);
        assert_close(&w.squared_norms(), &v.squared_norms(), 1e-12)?;
    }

    #[test]
    fn permutation_action_permutes_nu_exactly(
        field in field_strategy(),
        n in 1usize..=6,
        d in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let v = sample_isometry(field, n, d, seed).unwrap();
        let (sigma, tau) = (permutation(n, seed ^ 1), permutation(n, seed ^ 2));
        let w = act_perm(&v, &sigma, &tau).unwrap();
        let expected = nu(&v, 1e-10).unwrap().permuted(&sigma, &tau).unwrap();
        let got = nu(&w, 1e-10).unwrap();
        prop_assert_eq!(got.as_slice(), expected.as_slice());
    }

    #[test]
    fn embeddings_preserve_nu_and_verdicts(
        field in field_strategy(),
        n in 1usize..=5,
        d in 1usize..=3,
        extra in 0usize..=2,
        seed in any::<u64>(),
    ) {
        let v = sample_isometry(field, n, d, seed).unwrap();
        let p = v.squared_norms();
        let mut images = vec![pad_dimension(&v, d + extra).unwrap()];
        match field {
            Field::C => images.push(realify(&v).unwrap()),
            Field::H => {
                let c = complexify_from_quaternion(&v).unwrap();
                images.push(realify(&c).unwrap());
                images.push(c);
            }
            Field::R => images.push(lift_field(&v, Field::H).unwrap()),
        }
        for w in &images {
            assert_close(&w.squared_norms(), &p, 1e-12)?;
            prop_assert!(is_isometry(w, 1e-10).ok);
        }

        // a broken input stays broken after embedding
        let mut rows = v.rows();
        rows[0][0][0] += Scalar::real(0.1);
        let bad = VectorEntryMatrix::from_rows(field, d, rows).unwrap();
        prop_assert!(!is_isometry(&pad_dimension(&bad, d + 1).unwrap(), 1e-10).ok);
        if field == Field::H {
            prop_assert!(!is_isometry(&complexify_from_quaternion(&bad).unwrap(), 1e-10).ok);
        }
    }

    #[test]
    fn sampled_isometries_are_balanced(
        field in field_strategy(),
        n in 1usize..=5,
        d in 1usize..=4,
        seed in any::<u64>(),
    ) {
        let v = sample_isometry(field, n, d, seed).unwrap();
        let rep = is_isometry(&v, 1e-10);
        prop_assert!(rep.ok && rep.residual_row_norms <= 1e-10);
        prop_assert!(nu(&v, 1e-10).is_ok());
        prop_assert_eq!(v, sample_isometry(field, n, d, seed).unwrap());
    }

    #[test]
    fn samplers_meet_their_invariants(n in 1usize..=8, k in 1usize..=6, seed in any::<u64>()) {
        let p = sample_sinkhorn(n, seed).unwrap();
        prop_assert!(BistochasticMatrix::with_tol(p.rows(), 1e-10).is_ok());
        prop_assert_eq!(&p, &sample_sinkhorn(n, seed).unwrap());
        let q = sample_birkhoff(n, k, seed).unwrap();
        prop_assert!(BistochasticMatrix::with_tol(q.rows(), 1e-12).is_ok());
        prop_assert!(q.as_slice().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn full_construction_round_trips(field in field_strategy(), n in 1usize..=8, seed in any::<u64>()) {
        let p = sample_sinkhorn(n, seed).unwrap();
        let v = construct_full(&p, field, n).unwrap();
        prop_assert!(is_isometry(&v, 1e-12).ok);
        prop_assert!(nu(&v, 1e-12).unwrap().max_abs_diff(p.as_slice()) <= 1e-11);
    }

    #[test]
    fn skew_matrix_properties(half in 1usize..=10, seed in any::<u64>()) {
        let n = 2 * half + 1;
        // a feasible diagonal: column square sums of a random nonnegative
        // edge assignment
        let mut rng = rng_for(seed, 0);
        let x: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut rng, 0.0..1.0)).collect();
        let xi: Vec<f64> = (0..n).map(|i| x[(i + n - 2) % n] + x[(i + n - 1) % n]).collect();
        let a = build_skew(&xi).unwrap();
        for r in 0..n {
            for c in 0..n {
                prop_assert_eq!(a[r][c] + a[c][r], 0.0);
            }
        }
        for (j, &target) in xi.iter().enumerate() {
            let s: f64 = (0..n).map(|i| a[i][j] * a[i][j]).sum();
            prop_assert!((s - target).abs() <= 1e-12);
        }
    }

    #[test]
    fn weighted_success_is_a_certificate(half in 1usize..=4, seed in any::<u64>()) {
        let n = 2 * half + 1;
        let p = sinkhorn_with(n, &mut rng_for(seed, 0)).unwrap();
        if let Ok(res) = construct_nminus1(&p, Mode::Weighted) {
            prop_assert!(res.certified);
            prop_assert!(nu(&res.v, 1e-9).unwrap().max_abs_diff(p.as_slice()) <= 1e-9);
        }
    }

    #[test]
    fn triangle_verdicts_for_three_by_three(seed in any::<u64>(), mix in 1usize..=4, birkhoff in any::<bool>()) {
        let p = if birkhoff {
            sample_birkhoff(3, mix, seed).unwrap()
        } else {
            sample_sinkhorn(3, seed).unwrap()
        };
        let rep = check_feasibility(&p).unwrap();
        prop_assert_eq!(rep.verdict, triangle_verdict(&p));
    }
}

/// Symmetric Sinkhorn samples, rejected until the diagonal is strictly
/// inside the feasible region.
fn strictly_feasible_symmetric(n: usize, seed: u64) -> BistochasticMatrix {
    let mut rng = rng_for(seed, 0);
    loop {
        let p = symmetric_sinkhorn_with(n, &mut rng).unwrap();
        if check_feasibility(&p).unwrap().verdict == Verdict::StrictInterior {
            return p;
        }
    }
}

/// The n = 3 condition written directly: each diagonal entry is at most the
/// sum of the other two.
fn triangle_verdict(p: &BistochasticMatrix) -> Verdict {
    let q = p.diagonal();
    let excess = (0..3).map(|i| q[i] - q[(i + 1) % 3] - q[(i + 2) % 3]).fold(f64::NEG_INFINITY, f64::max);
    let zero_offdiag = (0..3).any(|r| (0..3).any(|c| r != c && p.get(r, c) <= 1e-12));
    if excess > 1e-12 {
        Verdict::Infeasible
    } else if excess < -1e-12 && !zero_offdiag {
        Verdict::StrictInterior
    } else {
        Verdict::Boundary
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// On symmetric input both coefficient choices certify, and they agree.
    #[test]
    fn symmetric_input_both_modes(half in 1usize..=3, seed in any::<u64>()) {
        let n = 2 * half + 1;
        let p = strictly_feasible_symmetric(n, seed);
        let lit = construct_nminus1(&p, Mode::PaperLiteral).unwrap();
        let wtd = construct_nminus1(&p, Mode::Weighted).unwrap();
        prop_assert!(lit.certified && wtd.certified);
        for r in 0..n {
            for c in 0..n {
                prop_assert!((lit.a[r][c].powi(2) - wtd.a[r][c].powi(2)).abs() <= 1e-12);
            }
        }
    }
}
