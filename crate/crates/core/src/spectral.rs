//! Gram spectra, the threshold `p*(A)`, restricted spectra and RIC.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{column_gram, sym_eigenvalues};
use crate::matrix::DenseMatrix;
use crate::spark::compute_spark;
use crate::subsets::{binomial, extremes, Budget, Exec};

/// `(√2 + 1)²`
pub(crate) const SQRT2_PLUS_1_SQ: f64 = 5.828_427_124_746_19;

/// Extremes of the nonzero spectrum of `AᵀA` and the derived threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub lambda_min_plus: f64,
    pub lambda_max: f64,
    pub rank: usize,
    pub p_star: f64,
}

/// `min{1, 16 λ₋² / ((√2+1)² (λ₊ − λ₋)²)}`, with `1` when the extremes coincide.
pub fn p_star_from_extremes(lambda_min_plus: f64, lambda_max: f64) -> f64 {
    let gap = lambda_max - lambda_min_plus;
    if gap <= 0.0 {
        return 1.0;
    }
    let raw = 16.0 * lambda_min_plus * lambda_min_plus / (SQRT2_PLUS_1_SQ * gap * gap);
    raw.min(1.0)
}

/// Spectral summary of `AᵀA`.
///
/// The eigensolve runs on the smaller of `AᵀA` and `AAᵀ` (same nonzero
/// spectrum). Eigenvalues below `A.tol() · λ_max` count as zero.
pub fn gram_spectrum(a: &DenseMatrix) -> Result<SpectralSummary> {
    if a.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let m = a.to_nalgebra();
    let g = if a.rows() < a.cols() {
        &m * m.transpose()
    } else {
        m.transpose() * &m
    };
    let ev = sym_eigenvalues(g)?;
    let lambda_max = *ev.last().expect("nonempty spectrum");
    let cutoff = a.tol() * lambda_max;
    let nonzero: Vec<f64> = ev.into_iter().filter(|&v| v > cutoff).collect();
    let lambda_min_plus = nonzero[0];
    Ok(SpectralSummary {
        lambda_min_plus,
        lambda_max,
        rank: nonzero.len(),
        p_star: p_star_from_extremes(lambda_min_plus, lambda_max),
    })
}

/// Exact extremes of `λ_min(A_SᵀA_S)` and `λ_max(A_SᵀA_S)` over `|S| = k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictedSpectrum {
    pub k: usize,
    pub min_eig: f64,
    pub max_eig: f64,
    pub argmin_support: Vec<usize>,
    pub argmax_support: Vec<usize>,
}

fn check_support_size(a: &DenseMatrix, k: usize, budget: &Budget) -> Result<()> {
    if k == 0 || k > a.cols() {
        return Err(Error::InvalidInput(format!(
            "support size must lie in 1..={}, got {k}",
            a.cols()
        )));
    }
    budget.check(binomial(a.cols(), k))?;
    Ok(())
}

fn subset_eig_extremes(a: &DenseMatrix, s: &[usize]) -> Result<(f64, f64)> {
    let ev = sym_eigenvalues(column_gram(a, s))?;
    Ok((ev[0].max(0.0), ev[ev.len() - 1].max(0.0)))
}

pub fn restricted_extremes(
    a: &DenseMatrix,
    k: usize,
    budget: &Budget,
) -> Result<RestrictedSpectrum> {
    check_support_size(a, k, budget)?;
    let e = extremes(Exec::default(), a.cols(), k, |s| subset_eig_extremes(a, s))?
        .expect("at least one subset");
    Ok(RestrictedSpectrum {
        k,
        min_eig: e.min,
        max_eig: e.max,
        argmin_support: e.argmin,
        argmax_support: e.argmax,
    })
}

/// Restricted-spectrum constants `u² ≤ w²` at support size `spark − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Constants {
    pub spark: usize,
    pub u_sq: f64,
    pub w_sq: f64,
    pub lambda_min_plus: f64,
    pub lambda_max: f64,
    pub argmin_support: Vec<usize>,
    pub argmax_support: Vec<usize>,
    /// `λ_min⁺(AᵀA) ≤ u²`
    pub lower_holds: bool,
    /// `w² ≤ λ_max(AᵀA)`
    pub upper_holds: bool,
    /// Both of the above.
    pub sandwich_holds: bool,
}

/// Computes `u²`, `w²` and reports whether `λ_min⁺ ≤ u² ≤ w² ≤ λ_max` holds.
///
/// The lower arm of the sandwich is a claim under audit, not an invariant;
/// a single column pair `[1, 1]` already violates it.
pub fn lemma1_constants(
    a: &DenseMatrix,
    spark: Option<usize>,
    budget: &Budget,
) -> Result<Lemma1Constants> {
    let spark = match spark {
        Some(s) => s,
        None => compute_spark(a, budget)?.spark,
    };
    if spark < 2 {
        return Err(Error::Precondition(
            "spark 1 (zero column) leaves no nonempty sparse support".into(),
        ));
    }
    let rs = restricted_extremes(a, spark - 1, budget)?;
    let summary = gram_spectrum(a)?;
    let slack = 1e-12 * summary.lambda_max;
    let lower_holds = summary.lambda_min_plus <= rs.min_eig + slack;
    let upper_holds = rs.max_eig <= summary.lambda_max + slack;
    Ok(Lemma1Constants {
        spark,
        u_sq: rs.min_eig,
        w_sq: rs.max_eig,
        lambda_min_plus: summary.lambda_min_plus,
        lambda_max: summary.lambda_max,
        argmin_support: rs.argmin_support,
        argmax_support: rs.argmax_support,
        lower_holds,
        upper_holds,
        sandwich_holds: lower_holds && upper_holds,
    })
}

/// Scales every column to unit ℓ2 norm; zero columns are an error.
pub fn normalize_columns(a: &DenseMatrix) -> Result<DenseMatrix> {
    let mut out = a.clone();
    for j in 0..a.cols() {
        let norm = a.column_norm(j);
        if norm == 0.0 {
            return Err(Error::InvalidInput(format!("column {j} is zero")));
        }
        for i in 0..a.rows() {
            out.set(i, j, a.get(i, j) / norm);
        }
    }
    Ok(out)
}

const UNIT_COLUMN_TOL: f64 = 1e-9;

/// Restricted isometry constant `δ_k` (squared-norm convention) of a matrix
/// with unit-norm columns.
pub fn ric(a: &DenseMatrix, k: usize, budget: &Budget) -> Result<f64> {
    if let Some(j) = (0..a.cols()).find(|&j| (a.column_norm(j) - 1.0).abs() > UNIT_COLUMN_TOL) {
        return Err(Error::Precondition(format!(
            "column {j} has norm {}; normalize columns first",
            a.column_norm(j)
        )));
    }
    check_support_size(a, k, budget)?;
    let e = extremes(Exec::default(), a.cols(), k, |s| {
        let (lo, hi) = subset_eig_extremes(a, s)?;
        let d = (hi - 1.0).max(1.0 - lo);
        Ok((d, d))
    })?
    .expect("at least one subset");
    Ok(e.max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> DenseMatrix {
        DenseMatrix::from_rows(&[vec![1.0, 1.0, 1.0], vec![1.0, 2.0, 3.0]]).unwrap()
    }

    #[test]
    fn identity_has_unit_threshold() {
        let s = gram_spectrum(&DenseMatrix::identity(2).unwrap()).unwrap();
        assert_eq!(
            (s.lambda_min_plus, s.lambda_max, s.rank, s.p_star),
            (1.0, 1.0, 2, 1.0)
        );
    }

    #[test]
    fn worked_example_matches_characteristic_polynomial() {
        // AAᵀ = [[3, 6], [6, 14]]: trace 17, det 6.
        let disc = 265f64.sqrt();
        let (lo, hi) = ((17.0 - disc) / 2.0, (17.0 + disc) / 2.0);
        let s = gram_spectrum(&example()).unwrap();
        assert!((s.lambda_max - hi).abs() < 1e-12 * hi);
        assert!((s.lambda_min_plus - lo).abs() < 1e-12);
        assert_eq!(s.rank, 2);
        let p = 16.0 * lo * lo / ((2f64.sqrt() + 1.0).powi(2) * (hi - lo).powi(2));
        assert!((s.p_star - p).abs() < 1e-12 * p);
        assert!((s.p_star - 1.35e-3).abs() < 1e-2 * 1.35e-3);
    }

    #[test]
    fn orthogonal_columns_scaled() {
        let a = DenseMatrix::from_rows(&[vec![3.0, 0.0], vec![0.0, 3.0]]).unwrap();
        assert_eq!(gram_spectrum(&a).unwrap().p_star, 1.0);
    }

    #[test]
    fn zero_matrix_is_an_error() {
        assert!(matches!(
            gram_spectrum(&DenseMatrix::zeros(2, 3).unwrap()),
            Err(Error::ZeroMatrix)
        ));
    }

    #[test]
    fn p_star_is_scale_free() {
        let a = example();
        let base = gram_spectrum(&a).unwrap().p_star;
        for c in [0.5, 2.0, 10.0] {
            let p = gram_spectrum(&a.scaled(c)).unwrap().p_star;
            assert!((p - base).abs() < 1e-9 * base, "c = {c}");
        }
    }

    #[test]
    fn single_column_supports_give_column_norms() {
        let a = example();
        let r = restricted_extremes(&a, 1, &Budget::default()).unwrap();
        assert!((r.min_eig - 2.0).abs() < 1e-12 && (r.max_eig - 10.0).abs() < 1e-12);
        assert_eq!((r.argmin_support, r.argmax_support), (vec![0], vec![2]));
    }

    #[test]
    fn pairs_match_hand_eigensolves() {
        // 2×2 Gram [[a, b], [b, c]] has λ_min = (a + c − √((a − c)² + 4b²)) / 2.
        let a = example();
        let cols = [[1.0, 1.0], [1.0, 2.0], [1.0, 3.0]];
        let mut best = f64::INFINITY;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let g = |x: [f64; 2], y: [f64; 2]| x[0] * y[0] + x[1] * y[1];
            let (p, q, r) = (
                g(cols[i], cols[i]),
                g(cols[i], cols[j]),
                g(cols[j], cols[j]),
            );
            let lo = (p + r - ((p - r).powi(2) + 4.0 * q * q).sqrt()) / 2.0;
            best = best.min(lo);
        }
        let rs = restricted_extremes(&a, 2, &Budget::default()).unwrap();
        assert!((rs.min_eig - best).abs() < 1e-12);
        assert_eq!(rs.argmin_support, vec![1, 2]);
    }

    #[test]
    fn identity_restricted_spectrum_is_flat() {
        let a = DenseMatrix::identity(4).unwrap();
        for k in 1..=4 {
            let r = restricted_extremes(&a, k, &Budget::default()).unwrap();
            assert!((r.min_eig - 1.0).abs() < 1e-14 && (r.max_eig - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn budget_and_size_guards() {
        let a = example();
        assert!(matches!(
            restricted_extremes(&a, 2, &Budget::new(2)),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(restricted_extremes(&a, 0, &Budget::default()).is_err());
        assert!(restricted_extremes(&a, 4, &Budget::default()).is_err());
    }

    #[test]
    fn lemma1_on_identity_columns() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]]).unwrap();
        let c =
            lemma1_constants(&normalize_columns(&a).unwrap(), None, &Budget::default()).unwrap();
        assert_eq!(c.spark, 3);
        assert!(c.u_sq > 0.0 && c.u_sq <= c.w_sq);
    }

    #[test]
    fn lemma1_lower_arm_fails_on_ones_row() {
        // λ_min⁺(AᵀA) = 2 while every single column has squared norm 1.
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let c = lemma1_constants(&a, None, &Budget::default()).unwrap();
        assert_eq!(c.spark, 2);
        assert_eq!((c.u_sq, c.w_sq), (1.0, 1.0));
        assert!(!c.lower_holds && c.upper_holds && !c.sandwich_holds);
    }

    #[test]
    fn ric_basic_cases() {
        let b = Budget::default();
        let id = DenseMatrix::identity(3).unwrap();
        assert!(ric(&id, 2, &b).unwrap().abs() < 1e-14);
        let dup = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!((ric(&dup, 2, &b).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(
            ric(&example(), 1, &b),
            Err(Error::Precondition(_))
        ));
    }
}
