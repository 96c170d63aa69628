//! Working correlation structures for GEE-style whitening `A Sigma^{-1}`.

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Side};
use serde::{Deserialize, Serialize};

use crate::error::{DevarError, Result};
use crate::matrix::DataMatrix;
use crate::preprocess::mean_sd;

/// Margin kept between a fitted parameter and the edge of its valid range.
pub const CLAMP_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CorrelationKind {
    Exchangeable,
    Ar1,
    Identity,
    Explicit,
}

#[derive(Debug, Clone)]
pub enum WorkingCorrelation {
    /// `(1 - rho) I + rho 11^T`.
    Exchangeable { rho: f64 },
    /// Entries `phi^{|j - k|}`. Columns are taken in their stored order.
    Ar1 { phi: f64 },
    Identity,
    /// Any symmetric positive definite `m x m` matrix.
    Explicit(Mat<f64>),
}

impl WorkingCorrelation {
    pub fn kind(&self) -> CorrelationKind {
        match self {
            WorkingCorrelation::Exchangeable { .. } => CorrelationKind::Exchangeable,
            WorkingCorrelation::Ar1 { .. } => CorrelationKind::Ar1,
            WorkingCorrelation::Identity => CorrelationKind::Identity,
            WorkingCorrelation::Explicit(_) => CorrelationKind::Explicit,
        }
    }

    pub fn param(&self) -> Option<f64> {
        match self {
            WorkingCorrelation::Exchangeable { rho } => Some(*rho),
            WorkingCorrelation::Ar1 { phi } => Some(*phi),
            _ => None,
        }
    }

    /// Checks the structure is a valid correlation for `m` features.
    pub fn validate(&self, m: usize) -> Result<()> {
        match self {
            WorkingCorrelation::Exchangeable { rho } => {
                let lower = if m > 1 { -1.0 / (m as f64 - 1.0) } else { f64::NEG_INFINITY };
                if !(*rho > lower && *rho < 1.0) {
                    return Err(DevarError::InvalidParameter(format!(
                        "exchangeable rho {rho} outside ({lower}, 1) for m = {m}"
                    )));
                }
            }
            WorkingCorrelation::Ar1 { phi } => {
                if !(phi.abs() < 1.0) {
                    return Err(DevarError::InvalidParameter(format!(
                        "AR(1) phi {phi} outside (-1, 1)"
                    )));
                }
            }
            WorkingCorrelation::Identity => {}
            WorkingCorrelation::Explicit(s) => {
                if s.nrows() != m || s.ncols() != m {
                    return Err(DevarError::DimensionMismatch(format!(
                        "explicit covariance is {}x{}, data has {m} columns",
                        s.nrows(),
                        s.ncols()
                    )));
                }
                check_symmetric(s.as_ref())?;
                s.llt(Side::Lower).map_err(|_| DevarError::NotPositiveDefinite)?;
            }
        }
        Ok(())
    }

    /// Dense `m x m` matrix of the structure.
    pub fn to_dense(&self, m: usize) -> Mat<f64> {
        match self {
            WorkingCorrelation::Exchangeable { rho } => {
                Mat::from_fn(m, m, |i, j| if i == j { 1.0 } else { *rho })
            }
            WorkingCorrelation::Ar1 { phi } => {
                Mat::from_fn(m, m, |i, j| phi.powi((i as i32 - j as i32).abs()))
            }
            WorkingCorrelation::Identity => Mat::identity(m, m),
            WorkingCorrelation::Explicit(s) => s.clone(),
        }
    }
}

fn check_symmetric(s: MatRef<'_, f64>) -> Result<()> {
    let m = s.nrows();
    let mut scale = 0.0_f64;
    let mut asym = 0.0_f64;
    for j in 0..m {
        for i in 0..m {
            scale = scale.max(s[(i, j)].abs());
            asym = asym.max((s[(i, j)] - s[(j, i)]).abs());
        }
    }
    if asym > 1e-10 * scale.max(1.0) {
        return Err(DevarError::InvalidParameter(format!(
            "explicit covariance is not symmetric (max asymmetry {asym:.3e})"
        )));
    }
    Ok(())
}

fn standardized_columns(a: &DataMatrix) -> Result<Vec<Vec<f64>>> {
    (0..a.ncols())
        .map(|j| {
            let col = a.column(j);
            let (mean, sd) = mean_sd(col);
            if !(sd > 0.0) {
                return Err(DevarError::ZeroVariance {
                    column: a.column_label(j),
                });
            }
            Ok(col.iter().map(|v| (v - mean) / sd).collect())
        })
        .collect()
}

/// Moment estimate of a working correlation from the sample correlations.
///
/// Exchangeable: mean of all off-diagonal correlations. AR(1): mean of the
/// lag-one correlations between adjacent columns. Both are clamped strictly
/// inside the valid range.
pub fn fit_working_correlation(a: &DataMatrix, kind: CorrelationKind) -> Result<WorkingCorrelation> {
    let m = a.ncols();
    if m < 2 {
        return Err(DevarError::InvalidParameter(format!(
            "working correlation needs at least 2 columns, got {m}"
        )));
    }
    let denom = a.nrows() as f64 - 1.0;
    match kind {
        CorrelationKind::Exchangeable => {
            let z = standardized_columns(a)?;
            let n = a.nrows();
            // 1^T R 1 = ||Z 1||^2 / (n - 1); the diagonal contributes m.
            let row_sums = (0..n).map(|i| z.iter().map(|c| c[i]).sum::<f64>());
            let total = row_sums.map(|s| s * s).sum::<f64>() / denom;
            let mf = m as f64;
            let rho = (total - mf) / (mf * (mf - 1.0));
            let lower = -1.0 / (mf - 1.0) + CLAMP_MARGIN;
            Ok(WorkingCorrelation::Exchangeable {
                rho: rho.clamp(lower, 1.0 - CLAMP_MARGIN),
            })
        }
        CorrelationKind::Ar1 => {
            let z = standardized_columns(a)?;
            let lag1: f64 = z
                .windows(2)
                .map(|w| w[0].iter().zip(&w[1]).map(|(u, v)| u * v).sum::<f64>() / denom)
                .sum();
            let phi = lag1 / (m as f64 - 1.0);
            Ok(WorkingCorrelation::Ar1 {
                phi: phi.clamp(-1.0 + CLAMP_MARGIN, 1.0 - CLAMP_MARGIN),
            })
        }
        CorrelationKind::Identity => Ok(WorkingCorrelation::Identity),
        CorrelationKind::Explicit => Err(DevarError::InvalidParameter(
            "an explicit correlation is supplied, not fitted".into(),
        )),
    }
}

/// Right-multiplies by the inverse working correlation: `A Sigma^{-1}`.
///
/// Exchangeable uses Sherman–Morrison, AR(1) its tridiagonal inverse, and an
/// explicit matrix a Cholesky solve.
pub fn whiten(a: &DataMatrix, w: &WorkingCorrelation) -> Result<DataMatrix> {
    let (n, m) = (a.nrows(), a.ncols());
    w.validate(m)?;
    let out = match w {
        WorkingCorrelation::Identity => return Ok(a.derive(a.values().to_owned())),
        WorkingCorrelation::Exchangeable { rho } => {
            let rho = *rho;
            let inv_diag = 1.0 / (1.0 - rho);
            let coupling = rho / (1.0 + (m as f64 - 1.0) * rho);
            let row_sums: Vec<f64> = (0..n)
                .map(|i| (0..m).map(|j| a.get(i, j)).sum())
                .collect();
            Mat::from_fn(n, m, |i, j| inv_diag * (a.get(i, j) - coupling * row_sums[i]))
        }
        WorkingCorrelation::Ar1 { phi } => {
            let phi = *phi;
            let scale = 1.0 / (1.0 - phi * phi);
            let mut out = Mat::<f64>::zeros(n, m);
            for j in 0..m {
                let d = if m == 1 || j == 0 || j == m - 1 { 1.0 } else { 1.0 + phi * phi };
                let dst = out.col_as_slice_mut(j);
                let cur = a.column(j);
                for i in 0..n {
                    let mut v = d * cur[i];
                    if j > 0 {
                        v -= phi * a.get(i, j - 1);
                    }
                    if j + 1 < m {
                        v -= phi * a.get(i, j + 1);
                    }
                    dst[i] = scale * v;
                }
            }
            out
        }
        WorkingCorrelation::Explicit(s) => {
            let llt = s.llt(Side::Lower).map_err(|_| DevarError::NotPositiveDefinite)?;
            // A S^{-1} = (S^{-1} A^T)^T since S is symmetric.
            let mut rhs = a.values().transpose().to_owned();
            llt.solve_in_place(rhs.as_mut());
            rhs.transpose().to_owned()
        }
    };
    Ok(a.derive(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, m: usize) -> DataMatrix {
        DataMatrix::from_fn(n, m, |i, j| (((i * 31 + j * 17) % 13) as f64 - 6.0) * (1.0 + 0.1 * j as f64)).unwrap()
    }

    #[test]
    fn identity_is_noop() {
        let a = sample(5, 3);
        let w = whiten(&a, &WorkingCorrelation::Identity).unwrap();
        assert_eq!(w.values(), a.values());
    }

    #[test]
    fn exchangeable_two_by_two_inverse() {
        // rows e1, e2 of A give the rows of Sigma^{-1}
        let a = DataMatrix::from_fn(2, 2, |i, j| if i == j { 1.0 } else { 0.0 }).unwrap();
        let w = whiten(&a, &WorkingCorrelation::Exchangeable { rho: 0.5 }).unwrap();
        let expected = [[4.0 / 3.0, -2.0 / 3.0], [-2.0 / 3.0, 4.0 / 3.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((w.get(i, j) - expected[i][j]).abs() < 1e-14);
            }
        }
    }

    fn dense_oracle(a: &DataMatrix, sigma: &Mat<f64>) -> Mat<f64> {
        // Solve via partial-pivot LU, independent of the Cholesky path.
        let lu = sigma.partial_piv_lu();
        let mut rhs = a.values().transpose().to_owned();
        lu.solve_in_place(rhs.as_mut());
        rhs.transpose().to_owned()
    }

    #[test]
    fn ar1_matches_dense_solve() {
        let a = sample(6, 3);
        let w = WorkingCorrelation::Ar1 { phi: 0.5 };
        let dense = w.to_dense(3);
        assert_eq!(dense[(0, 2)], 0.25);
        let got = whiten(&a, &w).unwrap();
        let want = dense_oracle(&a, &dense);
        for i in 0..6 {
            for j in 0..3 {
                assert!((got.get(i, j) - want[(i, j)]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn exchangeable_matches_dense_solve() {
        let a = sample(7, 5);
        let w = WorkingCorrelation::Exchangeable { rho: -0.2 };
        let got = whiten(&a, &w).unwrap();
        let want = dense_oracle(&a, &w.to_dense(5));
        for i in 0..7 {
            for j in 0..5 {
                assert!((got.get(i, j) - want[(i, j)]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn explicit_must_be_positive_definite() {
        let a = sample(4, 2);
        let bad = Mat::from_fn(2, 2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert!(matches!(
            whiten(&a, &WorkingCorrelation::Explicit(bad)),
            Err(DevarError::NotPositiveDefinite)
        ));
    }

    #[test]
    fn perfectly_correlated_columns_clamp() {
        let a = DataMatrix::from_fn(5, 2, |i, _| i as f64).unwrap();
        match fit_working_correlation(&a, CorrelationKind::Exchangeable).unwrap() {
            WorkingCorrelation::Exchangeable { rho } => assert_eq!(rho, 1.0 - CLAMP_MARGIN),
            other => panic!("{other:?}"),
        }
        assert!(fit_working_correlation(&DataMatrix::from_fn(5, 1, |i, _| i as f64).unwrap(), CorrelationKind::Ar1).is_err());
    }
}
