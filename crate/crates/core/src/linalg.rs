//! Thin nalgebra-backed helpers: numerical rank, Gram spectra, least squares.

use nalgebra::{DMatrix, DVector};

use crate::matrix::DenseMatrix;

/// Relative cutoff below which a singular value counts as zero.
pub const RANK_TOL: f64 = 1e-9;

pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = a.to_nalgebra().singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Number of singular values above `rel_tol · σ_max`.
pub fn rank_with_tol(a: &DenseMatrix, rel_tol: f64) -> usize {
    let sv = singular_values(a);
    let Some(&top) = sv.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

pub fn rank(a: &DenseMatrix) -> usize {
    rank_with_tol(a, RANK_TOL)
}

/// Smallest and largest eigenvalue of `SᵀS` for the given columns of `a`.
pub(crate) fn gram_extremes(a: &DenseMatrix, cols: &[usize]) -> (f64, f64) {
    let k = cols.len();
    let m = a.rows();
    let g = DMatrix::from_fn(k, k, |p, q| {
        (0..m).map(|i| a.get(i, cols[p]) * a.get(i, cols[q])).sum::<f64>()
    });
    let eig = g.symmetric_eigenvalues();
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Least-squares coefficients of `y` on the given columns of `a`, and the
/// Euclidean residual `‖y − A_S c‖₂`.
pub(crate) fn lstsq_columns(a: &DenseMatrix, cols: &[usize], y: &[f64]) -> (Vec<f64>, f64) {
    let m = a.rows();
    if cols.is_empty() {
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        return (Vec::new(), r);
    }
    let sub = DMatrix::from_fn(m, cols.len(), |i, j| a.get(i, cols[j]));
    let rhs = DVector::from_column_slice(y);
    let svd = sub.clone().svd(true, true);
    let top = svd.singular_values.max();
    let coef = svd
        .solve(&rhs, RANK_TOL * top.max(f64::MIN_POSITIVE))
        .expect("both factors were computed");
    let resid = (&rhs - &sub * &coef).norm();
    (coef.iter().copied().collect(), resid)
}
