//! Column standardization and covariate residualization.
//!
//! The intended pipeline is `residualize` then `standardize`: the association
//! statistics assume unit-variance columns, so scaling comes last.

use faer::Mat;

use crate::error::{DevarError, Result};
use crate::matrix::{CovariateMatrix, DataMatrix};

/// Sample mean and standard deviation (divisor `n - 1`) of one column.
pub fn mean_sd(col: &[f64]) -> (f64, f64) {
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    let ss = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Centres each column and scales it to unit sample standard deviation.
///
/// A column whose spread is at roundoff level relative to its magnitude is
/// reported as zero-variance.
pub fn standardize(x: &DataMatrix) -> Result<DataMatrix> {
    let (n, m) = (x.nrows(), x.ncols());
    let mut out = Mat::<f64>::zeros(n, m);
    for j in 0..m {
        let col = x.column(j);
        let (mean, sd) = mean_sd(col);
        let scale = col.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
        if !(sd > 16.0 * f64::EPSILON * scale) {
            return Err(DevarError::ZeroVariance {
                column: x.column_label(j),
            });
        }
        let dst = out.col_as_slice_mut(j);
        for (d, v) in dst.iter_mut().zip(col) {
            *d = (v - mean) / sd;
        }
    }
    Ok(DataMatrix::from_parts(out, x.labels().map(<[String]>::to_vec), true))
}

/// Projects the columns of `x` onto the orthogonal complement of `span(C)`,
/// i.e. returns `(I - C (C^T C)^{-1} C^T) X`.
pub fn residualize(x: &DataMatrix, c: &CovariateMatrix) -> Result<DataMatrix> {
    if x.nrows() != c.nrows() {
        return Err(DevarError::RowMismatch {
            left: x.nrows(),
            right: c.nrows(),
        });
    }
    // Thin Q spans the same column space as C and is better conditioned than
    // the normal equations.
    let q = c.values().qr().compute_thin_Q();
    let coef = q.transpose() * x.values();
    let fitted = &q * &coef;
    let res = x.values() - &fitted;
    Ok(x.derive(res))
}
