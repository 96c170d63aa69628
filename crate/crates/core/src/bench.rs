//! Monte Carlo rejection-rate sweeps over simulated and subsampled data.
//!
//! Replicate `r` of every grid point uses the same pair seed, so grid points
//! are compared under common random numbers. Within a replicate all methods
//! see the same pair and the same permutations.

use faer::Mat;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assoc::{permutation_test, rv_statistic, transform_pair, Method};
use crate::error::{DevarError, Result};
use crate::matrix::DataMatrix;
use crate::seeding::derive_seed;
use crate::simgen::{generate_pair, JiveConfig};

pub const POWER_REPLICATE_FLOOR: usize = 100;
pub const TYPE_I_REPLICATE_FLOOR: usize = 1000;
pub const DEFAULT_SWEEP_PERMS: usize = 199;

const PERM_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Power,
    /// Every grid point is run with `sigma_j = 0`.
    TypeI,
}

impl SweepKind {
    pub fn replicate_floor(self) -> usize {
        match self {
            SweepKind::Power => POWER_REPLICATE_FLOOR,
            SweepKind::TypeI => TYPE_I_REPLICATE_FLOOR,
        }
    }
}

/// One named axis of a sweep grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub base: JiveConfig,
    /// Cartesian product, first axis varying slowest.
    pub vary: Vec<GridAxis>,
    pub methods: Vec<Method>,
    pub replicates: usize,
    pub n_perms: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Permits replicate counts below the floor of `kind`.
    pub allow_low_replicates: bool,
}

impl SweepSpec {
    pub fn new(kind: SweepKind, base: JiveConfig, methods: Vec<Method>, replicates: usize, seed: u64) -> Self {
        Self {
            kind,
            base,
            vary: Vec::new(),
            methods,
            replicates,
            n_perms: DEFAULT_SWEEP_PERMS,
            alpha: 0.05,
            seed,
            allow_low_replicates: false,
        }
    }

    pub fn with_axis(mut self, name: &str, values: &[f64]) -> Self {
        self.vary.push(GridAxis {
            name: name.to_string(),
            values: values.to_vec(),
        });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(DevarError::InvalidParameter("sweep needs at least one method".into()));
        }
        if self.replicates == 0 {
            return Err(DevarError::InvalidParameter("replicates must be positive".into()));
        }
        let floor = self.kind.replicate_floor();
        if self.replicates < floor && !self.allow_low_replicates {
            return Err(DevarError::InvalidParameter(format!(
                "{} replicates is below the floor of {floor} for this sweep kind",
                self.replicates
            )));
        }
        if self.n_perms == 0 {
            return Err(DevarError::InvalidParameter("n_perms must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(DevarError::InvalidParameter(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        for axis in &self.vary {
            if axis.values.is_empty() {
                return Err(DevarError::InvalidParameter(format!("grid axis '{}' is empty", axis.name)));
            }
            JiveConfig::default().set_param(&axis.name, axis.values[0])?;
        }
        Ok(())
    }

    /// All grid points in order; a sweep with no axes has one empty point.
    pub fn grid(&self) -> Vec<Vec<(String, f64)>> {
        let mut points = vec![Vec::new()];
        for axis in &self.vary {
            let mut next = Vec::with_capacity(points.len() * axis.values.len());
            for p in &points {
                for &v in &axis.values {
                    let mut q: Vec<(String, f64)> = p.clone();
                    q.push((axis.name.clone(), v));
                    next.push(q);
                }
            }
            points = next;
        }
        points
    }

    fn config_at(&self, point: &[(String, f64)]) -> Result<JiveConfig> {
        let mut cfg = self.base.clone();
        for (name, v) in point {
            cfg.set_param(name, *v)?;
        }
        if self.kind == SweepKind::TypeI {
            cfg.sigma_j = 0.0;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Rejection summary for one grid point, method and level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: Vec<(String, f64)>,
    pub method: Method,
    pub alpha: f64,
    pub rejections: usize,
    /// Replicates that completed; failed ones are counted in `failures`.
    pub replicates: usize,
    pub failures: usize,
    pub rejection_rate: f64,
    pub monte_carlo_se: f64,
    pub mean_statistic: f64,
}

impl SweepRow {
    fn from_outcomes(point: Vec<(String, f64)>, method: Method, alpha: f64, outcomes: &[Option<(f64, f64)>]) -> Self {
        let mut rejections = 0;
        let mut done = 0;
        let mut stat_sum = 0.0;
        for (stat, p) in outcomes.iter().flatten() {
            done += 1;
            stat_sum += stat;
            if *p <= alpha {
                rejections += 1;
            }
        }
        let rate = if done > 0 { rejections as f64 / done as f64 } else { f64::NAN };
        Self {
            point,
            method,
            alpha,
            rejections,
            replicates: done,
            failures: outcomes.len() - done,
            rejection_rate: rate,
            monte_carlo_se: binomial_se(rate, done),
            mean_statistic: if done > 0 { stat_sum / done as f64 } else { f64::NAN },
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.point.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

/// `sqrt(r (1 - r) / replicates)`.
pub fn binomial_se(rate: f64, replicates: usize) -> f64 {
    if replicates == 0 {
        return f64::NAN;
    }
    (rate * (1.0 - rate) / replicates as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub point: Vec<(String, f64)>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<SkippedPoint>,
}

impl SweepResult {
    /// First row matching `method` whose point contains all of `at`.
    pub fn find(&self, method: Method, at: &[(&str, f64)]) -> Option<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.method == method)
            .find(|r| at.iter().all(|(k, v)| r.param(k) == Some(*v)))
    }
}

/// Statistic and p-value of every method on one pair; `None` where a method
/// failed numerically.
fn evaluate_methods(
    x: &DataMatrix,
    y: &DataMatrix,
    methods: &[Method],
    sigmas: Option<&(Mat<f64>, Mat<f64>)>,
    n_perms: usize,
    perm_seed: u64,
) -> Result<Vec<Option<(f64, f64)>>> {
    methods
        .iter()
        .map(|&m| {
            let (sx, sy) = match (m, sigmas) {
                (Method::Gold, Some((a, b))) => (Some(a), Some(b)),
                _ => (None, None),
            };
            let run = || -> Result<(f64, f64)> {
                let t = transform_pair(x, y, m, sx, sy)?;
                let stat = rv_statistic(&t.x, &t.y)?;
                let out = permutation_test(&t.x, &t.y, n_perms, perm_seed)?;
                Ok((stat, out.p_value))
            };
            match run() {
                Ok(v) => Ok(Some(v)),
                Err(e) if e.is_numerical() => {
                    log::warn!("{m} failed on a replicate: {e}");
                    Ok(None)
                }
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Runs every method on `replicates` simulated pairs at each grid point.
/// Grid points whose configuration is infeasible are skipped and listed.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut result = SweepResult::default();
    for point in spec.grid() {
        let cfg = match spec.config_at(&point) {
            Ok(c) => c,
            Err(e @ (DevarError::RankConstraint(_) | DevarError::InvalidParameter(_))) => {
                log::warn!("skipping grid point {point:?}: {e}");
                result.skipped.push(SkippedPoint {
                    point,
                    reason: e.to_string(),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let needs_truth = spec.methods.contains(&Method::Gold);
        let per_rep: Vec<Vec<Option<(f64, f64)>>> = (0..spec.replicates as u64)
            .into_par_iter()
            .map(|r| {
                let rep_seed = derive_seed(spec.seed, r);
                let pair = generate_pair(&JiveConfig {
                    seed: rep_seed,
                    ..cfg.clone()
                })?;
                let sigmas = if needs_truth {
                    Some((pair.truth.null_covariance_x()?, pair.truth.null_covariance_y()?))
                } else {
                    None
                };
                evaluate_methods(
                    &pair.x,
                    &pair.y,
                    &spec.methods,
                    sigmas.as_ref(),
                    spec.n_perms,
                    derive_seed(rep_seed, PERM_STREAM),
                )
            })
            .collect::<Result<_>>()?;
        for (k, &m) in spec.methods.iter().enumerate() {
            let column: Vec<Option<(f64, f64)>> = per_rep.iter().map(|v| v[k]).collect();
            result.rows.push(SweepRow::from_outcomes(point.clone(), m, spec.alpha, &column));
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsampleProtocol {
    /// Same subjects in both views (power).
    Matched,
    /// Non-overlapping subject sets across views (Type I error).
    Disjoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleConfig {
    pub protocol: SubsampleProtocol,
    pub methods: Vec<Method>,
    pub alphas: Vec<f64>,
    pub n_perms: usize,
    pub seed: u64,
}

/// Rejection rates on row subsamples of a fixed dataset, one row per size,
/// method and level. GOLD is not available here.
pub fn run_subsample_study(
    x_full: &DataMatrix,
    y_full: &DataMatrix,
    sizes: &[usize],
    replicates: usize,
    config: &SubsampleConfig,
) -> Result<SweepResult> {
    if x_full.nrows() != y_full.nrows() {
        return Err(DevarError::RowMismatch {
            left: x_full.nrows(),
            right: y_full.nrows(),
        });
    }
    if replicates == 0 || config.n_perms == 0 {
        return Err(DevarError::InvalidParameter("replicates and n_perms must be positive".into()));
    }
    if config.methods.contains(&Method::Gold) {
        return Err(DevarError::MissingInput("GOLD needs population covariances, unavailable for subsamples".into()));
    }
    if config.alphas.is_empty() || config.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return Err(DevarError::InvalidParameter("alphas must be nonempty and inside (0, 1)".into()));
    }
    let n = x_full.nrows();
    let need = |s: usize| match config.protocol {
        SubsampleProtocol::Matched => s,
        SubsampleProtocol::Disjoint => 2 * s,
    };
    if let Some(&bad) = sizes.iter().find(|&&s| need(s) > n || s < 2) {
        return Err(DevarError::InvalidParameter(format!(
            "subsample size {bad} needs {} rows, {n} available",
            need(bad)
        )));
    }

    let mut result = SweepResult::default();
    for (si, &size) in sizes.iter().enumerate() {
        let size_seed = derive_seed(config.seed, si as u64);
        let per_rep: Vec<Vec<Option<(f64, f64)>>> = (0..replicates as u64)
            .into_par_iter()
            .map(|r| {
                let rep_seed = derive_seed(size_seed, r);
                let mut rng = ChaCha8Rng::seed_from_u64(rep_seed);
                let rows = sample(&mut rng, n, need(size)).into_vec();
                let (rx, ry) = match config.protocol {
                    SubsampleProtocol::Matched => (&rows[..], &rows[..]),
                    SubsampleProtocol::Disjoint => rows.split_at(size),
                };
                let x = x_full.select_rows(rx)?;
                let y = y_full.select_rows(ry)?;
                evaluate_methods(&x, &y, &config.methods, None, config.n_perms, derive_seed(rep_seed, PERM_STREAM))
            })
            .collect::<Result<_>>()?;
        for (k, &m) in config.methods.iter().enumerate() {
            let column: Vec<Option<(f64, f64)>> = per_rep.iter().map(|v| v[k]).collect();
            for &alpha in &config.alphas {
                result
                    .rows
                    .push(SweepRow::from_outcomes(vec![("n".into(), size as f64)], m, alpha, &column));
            }
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_base() -> JiveConfig {
        JiveConfig {
            n: 30,
            p: 10,
            q: 12,
            r_j: 1,
            r_ix: 1,
            r_iy: 1,
            ..JiveConfig::default()
        }
    }

    #[test]
    fn grid_is_cartesian_in_order() {
        let spec = SweepSpec::new(SweepKind::Power, small_base(), vec![Method::Rv], 100, 1)
            .with_axis("r_j", &[1.0, 2.0])
            .with_axis("sigma_i", &[1.0, 2.0, 3.0]);
        let g = spec.grid();
        assert_eq!(g.len(), 6);
        assert_eq!(g[1], vec![("r_j".to_string(), 1.0), ("sigma_i".to_string(), 2.0)]);
        assert_eq!(g[3][0].1, 2.0);
    }

    #[test]
    fn floors_enforced_unless_overridden() {
        let mut spec = SweepSpec::new(SweepKind::TypeI, small_base(), vec![Method::Rv], 999, 1);
        assert!(spec.validate().is_err());
        spec.allow_low_replicates = true;
        assert!(spec.validate().is_ok());
        spec.kind = SweepKind::Power;
        spec.allow_low_replicates = false;
        spec.replicates = 99;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn infeasible_points_are_skipped() {
        let mut spec = SweepSpec::new(SweepKind::Power, small_base(), vec![Method::Rv], 3, 5).with_axis("r_j", &[1.0, 20.0]);
        spec.allow_low_replicates = true;
        spec.n_perms = 9;
        let res = run_sweep(&spec).unwrap();
        assert_eq!(res.rows.len(), 1);
        assert_eq!(res.skipped.len(), 1);
        assert_eq!(res.skipped[0].point[0].1, 20.0);
    }

    #[test]
    fn rows_use_binomial_se() {
        let mut spec = SweepSpec::new(
            SweepKind::Power,
            small_base(),
            vec![Method::Rv, Method::DevRv, Method::Gold],
            6,
            2,
        );
        spec.allow_low_replicates = true;
        spec.n_perms = 19;
        let res = run_sweep(&spec).unwrap();
        assert_eq!(res.rows.len(), 3);
        for row in &res.rows {
            assert_eq!(row.replicates + row.failures, 6);
            assert_eq!(row.rejection_rate, row.rejections as f64 / row.replicates as f64);
            assert_eq!(row.monte_carlo_se, binomial_se(row.rejection_rate, row.replicates));
        }
        assert_eq!(run_sweep(&spec).unwrap(), res);
    }

    #[test]
    fn subsample_size_checks() {
        let x = DataMatrix::from_fn(10, 3, |i, j| ((i * 7 + j * 3) % 5) as f64).unwrap();
        let cfg = SubsampleConfig {
            protocol: SubsampleProtocol::Disjoint,
            methods: vec![Method::Rv],
            alphas: vec![0.05],
            n_perms: 9,
            seed: 1,
        };
        assert!(run_subsample_study(&x, &x, &[6], 2, &cfg).is_err());
        let res = run_subsample_study(&x, &x, &[5], 2, &cfg).unwrap();
        assert_eq!(res.rows.len(), 1);
        let gold = SubsampleConfig {
            methods: vec![Method::Gold],
            ..cfg
        };
        assert!(run_subsample_study(&x, &x, &[3], 2, &gold).is_err());
    }
}
