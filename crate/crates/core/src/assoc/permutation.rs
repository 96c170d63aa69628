//! Row-permutation inference for `T_RV`.
//!
//! Permutation `b` is drawn from its own ChaCha stream keyed by `(seed, b)`,
//! so the exceedance count does not depend on evaluation order or on the
//! number of worker threads.

use faer::{Mat, MatRef};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::statistic::{check_rows, cross_frobenius_sq};
use crate::error::{DevarError, Result};
use crate::matrix::DataMatrix;

/// Relative slack under which a permuted statistic counts as a tie with the
/// observed one. Ties count as exceedances.
pub const TIE_RELATIVE_TOL: f64 = 1e-12;

/// Above this many rows the `n x n` Gram route is never used.
const MAX_GRAM_ROWS: usize = 8192;

/// Uniform permutation of `0..n` for index `b` under `seed`.
pub fn draw_permutation(n: usize, seed: u64, b: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(b);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    perm
}

enum Route {
    /// `T(pi) = sum_ij Gx[pi_i, pi_j] Gy[i, j]` with `G = A A^T`.
    Gram { gx: Mat<f64>, gy: Mat<f64> },
    /// `T(pi) = ||X_pi^T Y||_F^2`.
    Direct { x: Mat<f64>, y: Mat<f64> },
}

/// Evaluates `T_RV(pi(X), Y)` for arbitrary row permutations `pi`.
///
/// Two equivalent evaluation routes; the cheaper one for the given shape and
/// permutation count is selected at construction.
pub struct PermutationEngine {
    route: Route,
    n: usize,
}

impl PermutationEngine {
    pub fn new(x: MatRef<'_, f64>, y: MatRef<'_, f64>, n_perms: usize) -> Self {
        let (n, p, q) = (x.nrows(), x.ncols(), y.ncols());
        let b = n_perms.max(1) as f64;
        let (nf, pf, qf) = (n as f64, p as f64, q as f64);
        // Per-row work: Gram build n(p+q) + b*n/2 lookups, versus b*p*q for direct.
        let gram_cost = nf * (pf + qf) + b * nf / 2.0;
        let direct_cost = b * pf * qf;
        let route = if n <= MAX_GRAM_ROWS && gram_cost < direct_cost {
            Route::Gram {
                gx: x * x.transpose(),
                gy: y * y.transpose(),
            }
        } else {
            Route::Direct {
                x: x.to_owned(),
                y: y.to_owned(),
            }
        };
        Self { route, n }
    }

    pub fn uses_gram(&self) -> bool {
        matches!(self.route, Route::Gram { .. })
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    /// Statistic with rows of `X` reordered by `perm` (`None` = identity).
    pub fn statistic(&self, perm: Option<&[usize]>) -> f64 {
        let n = self.n;
        let idx = |i: usize| perm.map_or(i, |p| p[i]);
        match &self.route {
            Route::Gram { gx, gy } => {
                let mut off = 0.0;
                let mut diag = 0.0;
                for i in 0..n {
                    let pi = idx(i);
                    let gx_col = gx.col_as_slice(pi);
                    let gy_col = gy.col_as_slice(i);
                    let mut acc = 0.0;
                    for j in 0..i {
                        acc += gx_col[idx(j)] * gy_col[j];
                    }
                    off += acc;
                    diag += gx_col[pi] * gy_col[i];
                }
                2.0 * off + diag
            }
            Route::Direct { x, y } => match perm {
                None => cross_frobenius_sq(x.as_ref(), y.as_ref()),
                Some(p) => {
                    let xp = Mat::from_fn(n, x.ncols(), |i, j| x[(p[i], j)]);
                    cross_frobenius_sq(xp.as_ref(), y.as_ref())
                }
            },
        }
    }
}

/// Observed statistic together with its permutation tail count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermutationOutcome {
    pub observed: f64,
    pub exceedances: usize,
    pub n_perms: usize,
    pub p_value: f64,
}

/// Runs `n_perms` row permutations of `x_t` against fixed `y_t`.
///
/// `p = (1 + #{b : T_b >= T_obs}) / (1 + B)`. The transformed inputs are
/// never recomputed under permutation.
pub fn permutation_test(x_t: &DataMatrix, y_t: &DataMatrix, n_perms: usize, seed: u64) -> Result<PermutationOutcome> {
    check_rows(x_t, y_t)?;
    if n_perms == 0 {
        return Err(DevarError::InvalidParameter("n_perms must be at least 1".into()));
    }
    let engine = PermutationEngine::new(x_t.values(), y_t.values(), n_perms);
    let observed = engine.statistic(None);
    let threshold = observed - TIE_RELATIVE_TOL * observed.abs();
    let n = engine.nrows();
    let exceedances = (0..n_perms as u64)
        .into_par_iter()
        .filter(|&b| {
            let perm = draw_permutation(n, seed, b);
            engine.statistic(Some(&perm)) >= threshold
        })
        .count();
    Ok(PermutationOutcome {
        observed,
        exceedances,
        n_perms,
        p_value: (1 + exceedances) as f64 / (1 + n_perms) as f64,
    })
}

pub fn permutation_pvalue(x_t: &DataMatrix, y_t: &DataMatrix, n_perms: usize, seed: u64) -> Result<f64> {
    Ok(permutation_test(x_t, y_t, n_perms, seed)?.p_value)
}
