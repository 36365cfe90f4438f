//! Exact spark by ascending subset search, submatrix invertibility checks,
//! and the spark of the augmented family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{columns_dependent, equilibrate_rows, singular_values};
use crate::matgen::{build_augmented_t, build_vandermonde, AugmentedSpec, VandermondeSpec};
use crate::matrix::DenseMatrix;
use crate::subsets::{binomial, find_first, Budget, Combinations, Exec};

/// Relative singular-value threshold for column dependence, measured after
/// row equilibration and column normalization.
pub const SPARK_RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparkCertificate {
    pub spark: usize,
    /// Lexicographically smallest dependent column set of size `spark`.
    pub witness: Vec<usize>,
    pub tol: f64,
}

/// Numerical rank of `a` under the same scaling as the dependence test.
pub fn numerical_rank(a: &DenseMatrix, tol: f64) -> usize {
    let eq = equilibrate_rows(a);
    let s = singular_values(&eq.to_nalgebra());
    let max = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&v| max > 0.0 && v > tol * max).count()
}

pub fn compute_spark(a: &DenseMatrix, budget: &Budget) -> Result<SparkCertificate> {
    compute_spark_with_tol(a, SPARK_RANK_TOL, budget)
}

/// Smallest number of linearly dependent columns, searched by ascending size
/// and lexicographic order within a size.
pub fn compute_spark_with_tol(
    a: &DenseMatrix,
    tol: f64,
    budget: &Budget,
) -> Result<SparkCertificate> {
    let eq = equilibrate_rows(a);
    let rank = numerical_rank(a, tol);
    if rank == a.cols() {
        return Err(Error::Precondition(format!(
            "all {} columns are independent; spark is undefined for full column rank",
            a.cols()
        )));
    }
    for k in 1..=a.cols().min(a.rows() + 1) {
        budget.check(binomial(a.cols(), k))?;
        if let Some(witness) = find_first(Exec::default(), a.cols(), k, |s| {
            columns_dependent(&eq, s, tol)
        }) {
            return Ok(SparkCertificate {
                spark: k,
                witness,
                tol,
            });
        }
    }
    Err(Error::Precondition(format!(
        "no dependent column set found although the numerical rank is {rank}; \
         the tolerance {tol} is inconsistent with this matrix"
    )))
}

/// Result of the exhaustive square-submatrix determinant scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvertibilityReport {
    pub max_size: usize,
    pub checked: u64,
    pub distinct_abs: bool,
    /// Smallest `|det A_{I,J}|`.
    pub min_abs_det: f64,
    /// Smallest `|det A_{I,J}| / ∏ ‖columns of A_{I,J}‖`, a scale-free value in `[0, 1]`.
    pub min_scaled_det: f64,
    pub worst_rows: Vec<usize>,
    pub worst_cols: Vec<usize>,
    /// Every determinant was strictly positive (total positivity).
    pub all_positive: bool,
    pub tol: f64,
    pub passes: bool,
}

/// Scans every square submatrix `A_{I,J}` of `A(m, n, λ)` with `|I| = |J| ≤ max_size`.
pub fn check_submatrix_invertibility(
    spec: &VandermondeSpec,
    max_size: usize,
    budget: &Budget,
) -> Result<InvertibilityReport> {
    let a = build_vandermonde(spec)?;
    let (m, n) = (spec.m(), spec.n());
    let max_size = max_size.min(m);
    if max_size == 0 {
        return Err(Error::InvalidInput("max_size must be positive".into()));
    }
    let needed: u128 = (1..=max_size)
        .map(|s| binomial(m, s) * binomial(n, s))
        .sum();
    let checked = budget.check(needed)?;
    let tol = SPARK_RANK_TOL;
    let mut min_abs_det = f64::INFINITY;
    let mut min_scaled_det = f64::INFINITY;
    let mut worst = (Vec::new(), Vec::new());
    let mut all_positive = true;
    for s in 1..=max_size {
        for rows in Combinations::new(m, s) {
            for cols in Combinations::new(n, s) {
                let mut sub = nalgebra::DMatrix::zeros(s, s);
                let mut hadamard = 1.0;
                for (q, &c) in cols.iter().enumerate() {
                    let mut norm = 0.0;
                    for (p, &r) in rows.iter().enumerate() {
                        sub[(p, q)] = a.get(r, c);
                        norm += a.get(r, c).powi(2);
                    }
                    hadamard *= norm.sqrt();
                }
                let det = sub.determinant();
                all_positive &= det > 0.0;
                let scaled = det.abs() / hadamard;
                min_abs_det = min_abs_det.min(det.abs());
                if scaled < min_scaled_det {
                    min_scaled_det = scaled;
                    worst = (rows.clone(), cols.clone());
                }
            }
        }
    }
    Ok(InvertibilityReport {
        max_size,
        checked,
        distinct_abs: spec.distinct_abs(),
        min_abs_det,
        min_scaled_det,
        worst_rows: worst.0,
        worst_cols: worst.1,
        all_positive,
        tol,
        passes: min_scaled_det > tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop1Report {
    pub m: usize,
    pub n: usize,
    pub x_t: f64,
    pub y_t: f64,
    pub expected: usize,
    pub certificate: SparkCertificate,
    pub passes: bool,
}

/// Checks `spark(A⁽ᵗ⁾) = 2m + 3` for an augmented spec with `n ≥ 2m + 2`.
pub fn verify_prop1(aug: &AugmentedSpec, budget: &Budget) -> Result<Prop1Report> {
    let spec = aug.base();
    let (m, n) = (spec.m(), spec.n());
    if n < 2 * m + 2 {
        return Err(Error::Precondition(format!(
            "needs n >= 2m + 2 = {}, got n = {n}",
            2 * m + 2
        )));
    }
    if !spec.distinct_abs() {
        return Err(Error::Precondition(
            "nodes must have distinct absolute values".into(),
        ));
    }
    let certificate = compute_spark(&build_augmented_t(aug)?, budget)?;
    let expected = 2 * m + 3;
    Ok(Prop1Report {
        m,
        n,
        x_t: aug.x_t(),
        y_t: aug.y_t(),
        expected,
        passes: certificate.spark == expected,
        certificate,
    })
}
