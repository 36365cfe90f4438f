use dashu_float::FBig;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lp_equiv::matgen::{
    build_augmented_0, build_vandermonde, sample_instance, NodeRange, VandermondeSpec,
};
use lp_equiv::solvers::pnorm::lp_margin;
use lp_equiv::solvers::{
    plant_sparse, sample_null, solve_l0, solve_lp_basic, verify_strict_inequality, KernelSample,
    SparseProblem,
};
use lp_equiv::spark::{
    check_submatrix_invertibility, compute_spark, numerical_rank, SPARK_RANK_TOL,
};
use lp_equiv::spectral::{lemma1_constants, restricted_extremes};
use lp_equiv::{Budget, DenseMatrix};

fn range() -> NodeRange {
    NodeRange::default()
}

fn instance(m: usize, n: usize, seed: u64) -> (VandermondeSpec, DenseMatrix) {
    let spec = sample_instance(m, n, seed, &range()).unwrap();
    let a = build_vandermonde(&spec).unwrap();
    (spec, a)
}

#[test]
fn positive_nodes_give_totally_positive_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for m in 1..=4 {
        for n in m..=7 {
            let mut nodes: Vec<f64> = Vec::new();
            while nodes.len() < n {
                let v: f64 = rng.random_range(0.5..2.0);
                if nodes.iter().all(|u| (u - v).abs() > 0.05) {
                    nodes.push(v);
                }
            }
            nodes.sort_by(f64::total_cmp);
            let spec = VandermondeSpec::new(m, nodes).unwrap();
            let r = check_submatrix_invertibility(&spec, m, &Budget::default()).unwrap();
            assert!(
                r.all_positive,
                "m = {m}, n = {n}: min det {:e}",
                r.min_abs_det
            );
        }
    }
}

#[test]
fn gram_condition_stays_moderate() {
    for seed in 0..100 {
        let m = 1 + (seed % 6) as usize;
        let (_, a) = instance(m, m + 3, seed);
        let g = a.to_nalgebra() * a.to_nalgebra().transpose();
        let ev = g.symmetric_eigenvalues();
        let (lo, hi) = ev
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(l, h), v| (l.min(*v), h.max(*v)));
        assert!(hi / lo < 1e10, "seed {seed}: condition {:e}", hi / lo);
    }
}

#[test]
fn lemma1_conclusion_on_sparse_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..5 {
        let (_, a) = instance(3, 7, 100 + seed);
        let c = lemma1_constants(&a, None, &Budget::default()).unwrap();
        for _ in 0..1000 {
            let s = rng.random_range(1..c.spark);
            let idx = rand::seq::index::sample(&mut rng, a.cols(), s);
            let mut x = vec![0.0; a.cols()];
            for i in idx {
                x[i] = rng.random_range(-1.0..1.0);
            }
            let nx: f64 = x.iter().map(|v| v * v).sum();
            let ax: f64 = a.mul_vec(&x).unwrap().iter().map(|v| v * v).sum();
            assert!(
                c.u_sq * nx <= ax * (1.0 + 1e-9),
                "lower: {} > {}",
                c.u_sq * nx,
                ax
            );
            assert!(
                ax <= c.w_sq * nx * (1.0 + 1e-9),
                "upper: {} > {}",
                ax,
                c.w_sq * nx
            );
        }
    }
}

#[test]
fn restricted_extremes_are_monotone_in_k() {
    for seed in 0..5 {
        let (_, a) = instance(4, 7, 200 + seed);
        let mut prev: Option<(f64, f64)> = None;
        for k in 1..=5 {
            let r = restricted_extremes(&a, k, &Budget::default()).unwrap();
            if let Some((lo, hi)) = prev {
                assert!(r.min_eig <= lo * (1.0 + 1e-12) && r.max_eig >= hi * (1.0 - 1e-12));
            }
            prev = Some((r.min_eig, r.max_eig));
        }
    }
}

#[test]
fn spark_is_bounded_by_rank_plus_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let (r, c) = (rng.random_range(2..5), rng.random_range(5..8));
        // Random low-rank product so the bound is not always attained.
        let rank = rng.random_range(1..=r);
        let u = DMatrix::from_fn(r, rank, |_, _| rng.random_range(-1.0..1.0));
        let v = DMatrix::from_fn(rank, c, |_, _| rng.random_range(-1.0..1.0));
        let a = DenseMatrix::from_nalgebra(&(u * v)).unwrap();
        let s = compute_spark(&a, &Budget::default()).unwrap().spark;
        assert!(s <= numerical_rank(&a, SPARK_RANK_TOL) + 1);
    }
}

/// The limit matrix is block diagonal, so its dependent sets live in the
/// Vandermonde block; only the scaled family reaches `2m + 3`.
#[test]
fn limit_matrix_keeps_the_base_spark() {
    for (m, seed) in [(1, 0), (2, 1), (2, 2), (3, 3)] {
        let (spec, _) = instance(m, 2 * m + 2, 300 + seed);
        let c = compute_spark(&build_augmented_0(&spec).unwrap(), &Budget::default()).unwrap();
        assert_eq!(c.spark, m + 1);
        assert!(c.witness.iter().all(|&j| j < spec.n()));
    }
}

#[test]
fn small_p_argmin_matches_l0_level() {
    for seed in 0..20 {
        let m = 2 + (seed % 3) as usize;
        let (_, a) = instance(m, m + 3, 400 + seed);
        let x = plant_sparse(a.cols(), 1 + (seed as usize) % m, 500 + seed).unwrap();
        let prob = SparseProblem::new(a.clone(), a.mul_vec(&x).unwrap()).unwrap();
        let l0 = solve_l0(&prob, &Budget::default()).unwrap();
        let lp = solve_lp_basic(&prob, 1e-3, &Budget::default()).unwrap();
        let sizes: Vec<usize> = lp.minimizers.iter().map(|s| s.support.len()).collect();
        assert_eq!(sizes.iter().min(), Some(&l0.level), "seed {seed}");
        let l0_supports: Vec<&Vec<usize>> = l0.solutions.iter().map(|s| &s.support).collect();
        assert!(lp
            .minimizers
            .iter()
            .any(|s| l0_supports.contains(&&s.support)));
    }
}

const PREC: usize = 400;

fn big(v: f64) -> FBig {
    FBig::try_from(v).unwrap().with_precision(PREC).value()
}

/// `Σ (|x + h|^p − |x|^p)` at 400 bits.
fn extended_margin(x: &[f64], h: &[f64], p: f64) -> f64 {
    let pb = big(p);
    let zero = big(0.0);
    let pow = |v: FBig| {
        if v == zero {
            zero.clone()
        } else {
            let a = if v < zero { -v } else { v };
            a.powf(&pb)
        }
    };
    let mut acc = zero.clone();
    for (&xi, &hi) in x.iter().zip(h) {
        acc = acc + pow(big(xi) + big(hi)) - pow(big(xi));
    }
    acc.to_f64().value()
}

#[test]
fn compensated_margins_match_extended_precision() {
    let cases: [(Vec<f64>, Vec<f64>, f64); 10] = [
        (vec![1.0, 0.0, -0.7], vec![1e-9, 2e-9, -1e-9], 1e-3),
        (
            vec![1.5, -0.5, 0.0, 0.0],
            vec![-1e-6, 1e-6, 3e-7, -3e-7],
            0.01,
        ),
        (vec![0.8, 0.0], vec![-0.8, 0.5], 0.5),
        (vec![2.0, 1.0, 0.0], vec![1e-12, -1e-12, 1e-12], 1e-3),
        (vec![1.0; 5], vec![0.1, -0.1, 0.1, -0.1, 1e-15], 0.25),
        (
            vec![0.5, -1.25, 1.75, 0.0],
            vec![1e3, -1e3, 5e2, 1e3],
            0.002,
        ),
        (
            vec![1.1, 0.0, 0.0, -0.6],
            vec![-1e-4, 1e-8, 1e-8, 1e-4],
            1.0,
        ),
        (vec![0.9, 0.9], vec![-0.9, 0.9], 0.7),
        (vec![1.0, -1.0, 0.0], vec![1e-3, 1e-3, -2e-3], 1e-4),
        (vec![1.9, 0.51, -1.3], vec![3e-10, -7e-10, 1e-10], 0.05),
    ];
    for (i, (x, h, p)) in cases.iter().enumerate() {
        let ours = lp_margin(x, h, *p);
        let reference = extended_margin(x, h, *p);
        let rel = (ours - reference).abs() / reference.abs();
        assert!(
            rel <= 1e-12,
            "case {i}: {ours:e} vs {reference:e} (relative {rel:e})"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn spark_invariant_under_permutation_and_scaling(
        seed in 0u64..1000,
        scales in proptest::collection::vec(prop_oneof![0.01f64..100.0, -100.0f64..-0.01], 7),
        perm in Just((0..7usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let (_, a) = instance(3, 7, seed);
        let mut rows = Vec::new();
        for i in 0..a.rows() {
            rows.push(perm.iter().zip(&scales).map(|(&j, s)| a.get(i, j) * s).collect::<Vec<_>>());
        }
        let b = DenseMatrix::from_rows(&rows).unwrap();
        let sa = compute_spark(&a, &Budget::default()).unwrap().spark;
        let sb = compute_spark(&b, &Budget::default()).unwrap().spark;
        prop_assert_eq!(sa, sb);
    }

    #[test]
    fn margins_invariant_under_coordinate_permutation(
        seed in 0u64..1000,
        perm in Just((0..7usize).collect::<Vec<_>>()).prop_shuffle(),
        p in 0.001f64..1.0,
    ) {
        let (_, a) = instance(3, 7, seed);
        let x = plant_sparse(7, 1, seed).unwrap();
        let hs = sample_null(&a, 6, seed, &[1e-3, 1.0], None, &Budget::default()).unwrap();
        let permute = |v: &[f64]| perm.iter().map(|&j| v[j]).collect::<Vec<f64>>();
        let hp: Vec<KernelSample> = hs
            .iter()
            .map(|s| KernelSample { h: permute(&s.h), ..s.clone() })
            .collect();
        let r1 = verify_strict_inequality(&x, &hs, p, 0).unwrap();
        let r2 = verify_strict_inequality(&permute(&x), &hp, p, 0).unwrap();
        prop_assert!((r1.margin_min - r2.margin_min).abs() <= 1e-12 * r1.margin_min.abs().max(1.0));
        prop_assert_eq!(r1.violation_count, r2.violation_count);
    }
}
