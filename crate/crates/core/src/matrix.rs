//! Matrix carriers for the two data views and for nuisance covariates.

use faer::{Mat, MatRef};

use crate::error::{DevarError, Result};

/// An `n x m` real matrix (rows are samples, columns are features).
///
/// Always finite and at least `2 x 1`. `standardized` records whether every
/// column has been centred and scaled to unit sample variance.
#[derive(Debug, Clone)]
pub struct DataMatrix {
    values: Mat<f64>,
    labels: Option<Vec<String>>,
    standardized: bool,
}

impl DataMatrix {
    pub fn new(values: Mat<f64>) -> Result<Self> {
        let (n, m) = (values.nrows(), values.ncols());
        if n < 2 || m < 1 {
            return Err(DevarError::TooSmall {
                rows: n,
                cols: m,
                min_rows: 2,
            });
        }
        for j in 0..m {
            if let Some(i) = values.col_as_slice(j).iter().position(|v| !v.is_finite()) {
                return Err(DevarError::NonFinite { row: i, col: j });
            }
        }
        Ok(Self {
            values,
            labels: None,
            standardized: false,
        })
    }

    /// Builds a matrix from row vectors. All rows must share one length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
            return Err(DevarError::DimensionMismatch(format!(
                "row {i} has {} fields, expected {m}",
                r.len()
            )));
        }
        Self::new(Mat::from_fn(n, m, |i, j| rows[i][j]))
    }

    pub fn from_fn(n: usize, m: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::new(Mat::from_fn(n, m, f))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.ncols() {
            return Err(DevarError::DimensionMismatch(format!(
                "{} labels for {} columns",
                labels.len(),
                self.ncols()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Internal constructor for values produced by the library itself.
    pub(crate) fn from_parts(values: Mat<f64>, labels: Option<Vec<String>>, standardized: bool) -> Self {
        debug_assert!(labels.as_ref().is_none_or(|l| l.len() == values.ncols()));
        Self {
            values,
            labels,
            standardized,
        }
    }

    /// Same labels, new values (e.g. after a transform), flag cleared.
    pub(crate) fn derive(&self, values: Mat<f64>) -> Self {
        let labels = self.labels.clone().filter(|l| l.len() == values.ncols());
        Self::from_parts(values, labels, false)
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> MatRef<'_, f64> {
        self.values.as_ref()
    }

    pub fn into_values(self) -> Mat<f64> {
        self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn column_label(&self, j: usize) -> String {
        match &self.labels {
            Some(l) => l[j].clone(),
            None => format!("column {}", j + 1),
        }
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn column(&self, j: usize) -> &[f64] {
        self.values.col_as_slice(j)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        (0..self.ncols())
            .flat_map(|j| self.column(j).iter())
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Multiplies every entry by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let values = Mat::from_fn(self.nrows(), self.ncols(), |i, j| c * self.values[(i, j)]);
        Self::from_parts(values, self.labels.clone(), false)
    }

    /// Rows selected (and reordered) by `rows`.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.nrows()) {
            return Err(DevarError::DimensionMismatch(format!(
                "row index {bad} out of range for {} rows",
                self.nrows()
            )));
        }
        let values = Mat::from_fn(rows.len(), self.ncols(), |i, j| self.values[(rows[i], j)]);
        let mut out = Self::new(values)?;
        out.labels = self.labels.clone();
        Ok(out)
    }
}

/// Nuisance design matrix `C` (`n x k`), full column rank.
#[derive(Debug, Clone)]
pub struct CovariateMatrix {
    values: Mat<f64>,
}

/// Smallest-to-largest singular value ratio below which `C` counts as collinear.
pub const COVARIATE_RANK_TOL: f64 = 1e-8;

impl CovariateMatrix {
    pub fn new(values: Mat<f64>) -> Result<Self> {
        let (n, k) = (values.nrows(), values.ncols());
        if n == 0 || k == 0 || k > n {
            return Err(DevarError::DimensionMismatch(format!(
                "covariate matrix is {n}x{k}; need 1 <= k <= n"
            )));
        }
        for j in 0..k {
            if let Some(i) = values.col_as_slice(j).iter().position(|v| !v.is_finite()) {
                return Err(DevarError::NonFinite { row: i, col: j });
            }
        }
        let sv = values
            .singular_values()
            .map_err(|e| DevarError::NoConvergence(format!("{e:?}")))?;
        let largest = sv.first().copied().unwrap_or(0.0);
        let smallest = sv.last().copied().unwrap_or(0.0);
        let ratio = if largest > 0.0 { smallest / largest } else { 0.0 };
        if ratio < COVARIATE_RANK_TOL {
            return Err(DevarError::RankDeficient { ratio });
        }
        Ok(Self { values })
    }

    /// Appends a column of ones unless one of the columns is already constant
    /// and equal to one.
    pub fn with_intercept(values: Mat<f64>) -> Result<Self> {
        let has_intercept =
            (0..values.ncols()).any(|j| values.col_as_slice(j).iter().all(|&v| v == 1.0));
        if has_intercept {
            return Self::new(values);
        }
        let (n, k) = (values.nrows(), values.ncols());
        let mut extended = Mat::<f64>::zeros(n, k + 1);
        for i in 0..n {
            extended[(i, 0)] = 1.0;
            for j in 0..k {
                extended[(i, j + 1)] = values[(i, j)];
            }
        }
        Self::new(extended)
    }

    /// Intercept-only design for `n` samples.
    pub fn intercept(n: usize) -> Result<Self> {
        Self::new(Mat::from_fn(n, 1, |_, _| 1.0))
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> MatRef<'_, f64> {
        self.values.as_ref()
    }
}

/// Row-major copy of `m`.
pub fn to_rows(m: MatRef<'_, f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}
