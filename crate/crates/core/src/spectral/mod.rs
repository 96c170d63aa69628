//! Thin SVD, singular value soft-thresholding, noise-level estimation and the
//! devariation adjustment `A - S_lambda(A)`.

mod mp;

pub use mp::{mp_cdf, mp_density, mp_median, mp_support};

use faer::{Mat, MatRef};
use serde::Serialize;

use crate::error::{DevarError, Result};
use crate::matrix::DataMatrix;

/// Thin singular value decomposition `A = U diag(d) V^T`, `r = min(n, m)`.
///
/// Sign convention: the first nonzero entry of every column of `U` is
/// nonnegative (the matching column of `V` is flipped with it).
#[derive(Debug, Clone)]
pub struct SvdTriple {
    pub u: Mat<f64>,
    pub d: Vec<f64>,
    pub v: Mat<f64>,
}

impl SvdTriple {
    pub fn rank(&self) -> usize {
        self.d.len()
    }

    /// `U diag(w) V^T` restricted to the leading `k` components.
    fn recombine(&self, k: usize, weights: impl Fn(usize) -> f64) -> Mat<f64> {
        let (n, m) = (self.u.nrows(), self.v.nrows());
        let scaled_u = Mat::from_fn(n, k, |i, c| self.u[(i, c)] * weights(c));
        if k == 0 {
            return Mat::zeros(n, m);
        }
        &scaled_u * self.v.subcols(0, k).transpose()
    }

    pub fn reconstruct(&self) -> Mat<f64> {
        self.recombine(self.rank(), |c| self.d[c])
    }
}

fn svd_of(a: MatRef<'_, f64>) -> Result<SvdTriple> {
    let dec = a
        .thin_svd()
        .map_err(|e| DevarError::NoConvergence(format!("thin SVD of {}x{}: {e:?}", a.nrows(), a.ncols())))?;
    let mut u = dec.U().to_owned();
    let mut v = dec.V().to_owned();
    let s = dec.S().column_vector();
    let d: Vec<f64> = (0..s.nrows()).map(|i| s[i].max(0.0)).collect();
    for c in 0..d.len() {
        let flip = u
            .col_as_slice(c)
            .iter()
            .find(|x| **x != 0.0)
            .is_some_and(|x| *x < 0.0);
        if flip {
            u.col_as_slice_mut(c).iter_mut().for_each(|x| *x = -*x);
            v.col_as_slice_mut(c).iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(SvdTriple { u, d, v })
}

pub fn svd(a: &DataMatrix) -> Result<SvdTriple> {
    svd_of(a.values())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(DevarError::InvalidParameter(format!(
            "threshold must be a finite nonnegative number, got {lambda}"
        )))
    }
}

/// Number of leading singular values strictly above `lambda`.
fn count_above(d: &[f64], lambda: f64) -> usize {
    d.iter().take_while(|&&x| x > lambda).count()
}

/// `S_lambda(A) = U diag((d_i - lambda)_+) V^T`, the minimiser of
/// `||A - Z||_F^2 + 2 lambda ||Z||_*`.
pub fn soft_threshold(a: &DataMatrix, lambda: f64) -> Result<DataMatrix> {
    check_lambda(lambda)?;
    let t = svd(a)?;
    let k = count_above(&t.d, lambda);
    Ok(a.derive(t.recombine(k, |c| t.d[c] - lambda)))
}

fn median_sorted_desc(d: &[f64]) -> f64 {
    let r = d.len();
    if r % 2 == 1 {
        d[r / 2]
    } else {
        0.5 * (d[r / 2 - 1] + d[r / 2])
    }
}

/// Noise level from the median singular value, matched to the median of the
/// Marchenko–Pastur law: `tau = d_med / sqrt(max(n, m) * mu_beta)`.
pub fn tau_from_singulars(d: &[f64], n: usize, m: usize) -> Result<f64> {
    if n < 2 || m < 2 {
        return Err(DevarError::TooSmall {
            rows: n,
            cols: m,
            min_rows: 2,
        });
    }
    let (small, large) = (n.min(m) as f64, n.max(m) as f64);
    let d_med = median_sorted_desc(d);
    if !(d_med > 0.0) {
        return Err(DevarError::ZeroSpectrum);
    }
    let mu = mp_median(small / large)?;
    Ok(d_med / (large * mu).sqrt())
}

pub fn estimate_tau(a: &DataMatrix) -> Result<f64> {
    if a.ncols() < 2 {
        return Err(DevarError::TooSmall {
            rows: a.nrows(),
            cols: a.ncols(),
            min_rows: 2,
        });
    }
    let d = a
        .values()
        .singular_values()
        .map_err(|e| DevarError::NoConvergence(format!("{e:?}")))?;
    tau_from_singulars(&d, a.nrows(), a.ncols())
}

/// Threshold `tau (sqrt(n) + sqrt(m))`.
pub fn noise_threshold(tau: f64, n: usize, m: usize) -> f64 {
    tau * ((n as f64).sqrt() + (m as f64).sqrt())
}

/// Output of [`devariate`]. The adjusted matrix is skipped when serialized.
#[derive(Debug, Clone, Serialize)]
pub struct DevariationResult {
    #[serde(skip)]
    pub adjusted: DataMatrix,
    pub lambda: f64,
    pub tau_hat: f64,
    pub original_singulars: Vec<f64>,
    pub shrunk_singulars: Vec<f64>,
}

/// `A - S_lambda(A)` with `lambda = tau (sqrt(n) + sqrt(m))`; `tau` defaults to
/// [`estimate_tau`]. Singular values of the result are `min(d_i, lambda)`.
pub fn devariate(a: &DataMatrix, tau: Option<f64>) -> Result<DevariationResult> {
    if let Some(t) = tau {
        if !(t > 0.0 && t.is_finite()) {
            return Err(DevarError::InvalidParameter(format!(
                "noise level must be positive, got {t}"
            )));
        }
    }
    let (n, m) = (a.nrows(), a.ncols());
    let t = svd(a)?;
    let tau_hat = match tau {
        Some(v) => v,
        None => tau_from_singulars(&t.d, n, m)?,
    };
    let lambda = noise_threshold(tau_hat, n, m);
    let k = count_above(&t.d, lambda);
    let shrink = t.recombine(k, |c| t.d[c] - lambda);
    let adjusted = a.derive(a.values() - &shrink);
    Ok(DevariationResult {
        adjusted,
        lambda,
        tau_hat,
        shrunk_singulars: t.d.iter().map(|&d| d.min(lambda)).collect(),
        original_singulars: t.d,
    })
}
