//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Returns `a / ‖a‖₂`, or `None` for the zero vector.
pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm2(a);
    (n > 0.0).then(|| a.iter().map(|v| v / n).collect())
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(g: DMatrix<f64>) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(g, f64::EPSILON, 0).ok_or(Error::Eigensolve)?;
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if ev.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolve);
    }
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// `AᵀA` for the columns in `cols`.
pub fn column_gram(a: &DenseMatrix, cols: &[usize]) -> DMatrix<f64> {
    let k = cols.len();
    let mut g = DMatrix::zeros(k, k);
    for (p, &ci) in cols.iter().enumerate() {
        for (q, &cj) in cols.iter().enumerate().skip(p) {
            let v: f64 = (0..a.rows()).map(|r| a.get(r, ci) * a.get(r, cj)).sum();
            g[(p, q)] = v;
            g[(q, p)] = v;
        }
    }
    g
}

/// Copy of `a` with every nonzero row scaled to unit max-norm. Row scaling
/// leaves column dependence unchanged.
pub fn equilibrate_rows(a: &DenseMatrix) -> DenseMatrix {
    let mut out = a.clone();
    for i in 0..a.rows() {
        let m = a.row(i).iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if m > 0.0 {
            for j in 0..a.cols() {
                out.set(i, j, a.get(i, j) / m);
            }
        }
    }
    out
}

/// Scale-free dependence test for the columns `cols` of `a`.
///
/// Nonzero columns are normalized to unit length; the set is dependent when
/// it has more columns than rows or its smallest singular value falls below
/// `tol · σ_max`.
pub fn columns_dependent(a: &DenseMatrix, cols: &[usize], tol: f64) -> bool {
    if cols.len() > a.rows() {
        return true;
    }
    let mut m = DMatrix::zeros(a.rows(), cols.len());
    for (q, &c) in cols.iter().enumerate() {
        let norm = a.column_norm(c);
        if norm == 0.0 {
            return true;
        }
        for r in 0..a.rows() {
            m[(r, q)] = a.get(r, c) / norm;
        }
    }
    let s = singular_values(&m);
    let (max, min) = (s[0], *s.last().unwrap_or(&0.0));
    max == 0.0 || min <= tol * max
}

/// Least-squares solution of `A_S x = b`; `None` if the SVD fails.
pub fn least_squares(a: &DenseMatrix, cols: &[usize], b: &[f64]) -> Option<Vec<f64>> {
    let sub = a.select_columns(cols).to_nalgebra();
    let svd = sub.svd(true, true);
    let rhs = DVector::from_column_slice(b);
    let x = svd.solve(&rhs, f64::EPSILON).ok()?;
    Some(x.iter().copied().collect())
}

/// Orthonormal basis of `{x : Ax = 0}` from the right singular vectors whose
/// singular value is at most `tol_rel · σ_max`.
///
/// Each basis vector is sign-normalized so its largest-magnitude entry is
/// positive.
pub fn null_space(a: &DenseMatrix, tol_rel: f64) -> Vec<Vec<f64>> {
    let n = a.cols();
    // Pad with zero rows so the SVD returns a full n×n V.
    let rows = a.rows().max(n);
    let mut m = DMatrix::zeros(rows, n);
    for i in 0..a.rows() {
        for j in 0..n {
            m[(i, j)] = a.get(i, j);
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let sigma = &svd.singular_values;
    let smax = sigma.iter().fold(0.0_f64, |acc, v| acc.max(*v));
    let mut basis = Vec::new();
    for (idx, &s) in sigma.iter().enumerate() {
        if s <= tol_rel * smax || smax == 0.0 {
            let mut v: Vec<f64> = v_t.row(idx).iter().copied().collect();
            let pivot = v
                .iter()
                .enumerate()
                .fold((0, 0.0_f64), |best, (i, x)| {
                    if x.abs() > best.1 {
                        (i, x.abs())
                    } else {
                        best
                    }
                })
                .0;
            if v[pivot] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            basis.push(v);
        }
    }
    basis
}

/// Right singular vector for the smallest singular value of `a`, with the
/// same sign convention as [`null_space`].
pub fn smallest_right_singular_vector(a: &DenseMatrix) -> Vec<f64> {
    let n = a.cols();
    let rows = a.rows().max(n);
    let mut m = DMatrix::zeros(rows, n);
    for i in 0..a.rows() {
        for j in 0..n {
            m[(i, j)] = a.get(i, j);
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let idx = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut v: Vec<f64> = v_t.row(idx).iter().copied().collect();
    let pivot = v
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if v.get(pivot).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

/// Componentwise relative residual `maxᵢ |(Ah)ᵢ| / Σⱼ |aᵢⱼ hⱼ|`, the
/// scale-free measure of how well `h` solves `Ah = 0` in floating point.
pub fn componentwise_residual(a: &DenseMatrix, h: &[f64]) -> f64 {
    (0..a.rows())
        .map(|i| {
            let row = a.row(i);
            let r: f64 = row.iter().zip(h).map(|(x, y)| x * y).sum();
            let s: f64 = row.iter().zip(h).map(|(x, y)| (x * y).abs()).sum();
            if s == 0.0 {
                0.0
            } else {
                r.abs() / s
            }
        })
        .fold(0.0, f64::max)
}
