use faer::MatRef;

use crate::error::{DevarError, Result};
use crate::matrix::DataMatrix;

pub(crate) fn check_rows(x: &DataMatrix, y: &DataMatrix) -> Result<()> {
    if x.nrows() != y.nrows() {
        return Err(DevarError::RowMismatch {
            left: x.nrows(),
            right: y.nrows(),
        });
    }
    Ok(())
}

/// `||A^T B||_F^2`.
pub(crate) fn cross_frobenius_sq(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> f64 {
    let c = a.transpose() * b;
    c.squared_norm_l2()
}

/// `T_RV(X, Y) = tr(X X^T Y Y^T)`, evaluated as `||X^T Y||_F^2` so that no
/// `n x n` matrix is formed.
pub fn rv_statistic(x: &DataMatrix, y: &DataMatrix) -> Result<f64> {
    check_rows(x, y)?;
    Ok(cross_frobenius_sq(x.values(), y.values()))
}

/// RV coefficient `tr(XX^T YY^T) / sqrt(tr((XX^T)^2) tr((YY^T)^2))`, in `[0, 1]`.
pub fn rv_coefficient(x: &DataMatrix, y: &DataMatrix) -> Result<f64> {
    check_rows(x, y)?;
    let xx = cross_frobenius_sq(x.values(), x.values());
    let yy = cross_frobenius_sq(y.values(), y.values());
    if !(xx > 0.0 && yy > 0.0) {
        return Err(DevarError::InvalidParameter(
            "RV coefficient undefined for a zero matrix".into(),
        ));
    }
    let num = cross_frobenius_sq(x.values(), y.values());
    Ok((num / (xx.sqrt() * yy.sqrt())).clamp(0.0, 1.0))
}
