//! Two-view data from the JIVE latent factor model
//! `X = S_J L_JX^T + S_IX L_IX^T + E_X`, `Y = S_J L_JY^T + S_IY L_IY^T + E_Y`,
//! with exchangeable and AR(1) variants of the within-view part.

use std::fmt;
use std::str::FromStr;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{DevarError, Result};
use crate::matrix::DataMatrix;

/// Largest view width for which dense covariance matrices are materialized.
pub const DENSE_COVARIANCE_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NoiseFamily {
    /// Standard normal.
    Gaussian,
    /// `sqrt(3/5) t_5`.
    HeavyTail,
    /// `sqrt(3/10) t_5 + sqrt(1/2) (Exp(1) - 1)`.
    RightSkew,
}

impl NoiseFamily {
    pub const ALL: [NoiseFamily; 3] = [NoiseFamily::Gaussian, NoiseFamily::HeavyTail, NoiseFamily::RightSkew];

    pub fn tag(self) -> &'static str {
        match self {
            NoiseFamily::Gaussian => "GAUSSIAN",
            NoiseFamily::HeavyTail => "HEAVY_TAIL",
            NoiseFamily::RightSkew => "RIGHT_SKEW",
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            NoiseFamily::Gaussian => rng.sample(StandardNormal),
            NoiseFamily::HeavyTail => (0.6_f64).sqrt() * rng.sample(t5()),
            NoiseFamily::RightSkew => {
                let t: f64 = rng.sample(t5());
                let e: f64 = rng.sample(Exp1);
                (0.3_f64).sqrt() * t + (0.5_f64).sqrt() * (e - 1.0)
            }
        }
    }
}

fn t5() -> StudentT<f64> {
    StudentT::new(5.0).expect("5 degrees of freedom is valid")
}

impl fmt::Display for NoiseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for NoiseFamily {
    type Err = DevarError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        NoiseFamily::ALL
            .into_iter()
            .find(|f| f.tag() == norm)
            .ok_or_else(|| DevarError::InvalidParameter(format!("unknown noise family '{s}'")))
    }
}

/// Noise family together with the fourth moment of its unit-variance entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub family: NoiseFamily,
    pub fourth_moment: f64,
}

impl From<NoiseFamily> for NoiseSpec {
    fn from(family: NoiseFamily) -> Self {
        Self {
            family,
            fourth_moment: noise_fourth_moment(family),
        }
    }
}

/// Fourth moment `E[e^4]` of a unit-variance noise entry.
///
/// Heavy tail: `(3/5)^2 E[t_5^4] = (9/25) 25 = 9`. Right skew: with
/// `A = sqrt(3/10) t_5`, `B = sqrt(1/2)(Exp(1) - 1)` independent and both of
/// variance 1/2, `E[(A+B)^4] = E[A^4] + 6 E[A^2] E[B^2] + E[B^4]
/// = 9/4 + 3/2 + 9/4 = 6`.
///
/// `E[t_5^8]` is infinite, so sample fourth moments of the t-based families
/// converge erratically: five 10^7-draw runs of RIGHT_SKEW gave 5.80 to 7.37.
pub fn noise_fourth_moment(family: NoiseFamily) -> f64 {
    match family {
        NoiseFamily::Gaussian => 3.0,
        NoiseFamily::HeavyTail => 9.0,
        NoiseFamily::RightSkew => 6.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Structure {
    /// Random orthonormal individual loadings of rank `r_ix`, `r_iy`.
    LowRank,
    /// Rank-one individual loadings `1/sqrt(p)`, i.e. exchangeable correlation.
    Exchangeable,
    /// Individual-plus-noise rows follow a stationary AR(1) across columns.
    Ar1,
}

impl Structure {
    pub fn tag(self) -> &'static str {
        match self {
            Structure::LowRank => "LOW_RANK",
            Structure::Exchangeable => "EXCHANGEABLE",
            Structure::Ar1 => "AR1",
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Structure {
    type Err = DevarError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace('-', "_").as_str() {
            "LOW_RANK" | "LOWRANK" => Ok(Structure::LowRank),
            "EXCHANGEABLE" => Ok(Structure::Exchangeable),
            "AR1" | "AR_1" => Ok(Structure::Ar1),
            _ => Err(DevarError::InvalidParameter(format!("unknown structure '{s}'"))),
        }
    }
}

/// Generative parameters. Missing fields in a config file take the values of
/// the baseline low-rank design (`n = 300, p = 200, q = 250`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JiveConfig {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub r_j: usize,
    pub r_ix: usize,
    pub r_iy: usize,
    pub sigma_j: f64,
    pub sigma_ix: f64,
    pub sigma_iy: f64,
    pub tau_x: f64,
    pub tau_y: f64,
    pub noise: NoiseFamily,
    pub structure: Structure,
    pub phi: f64,
    pub seed: u64,
}

impl Default for JiveConfig {
    fn default() -> Self {
        Self {
            n: 300,
            p: 200,
            q: 250,
            r_j: 5,
            r_ix: 5,
            r_iy: 5,
            sigma_j: 0.7_f64.sqrt(),
            sigma_ix: 1.0,
            sigma_iy: 1.0,
            tau_x: 1.0,
            tau_y: 1.0,
            noise: NoiseFamily::Gaussian,
            structure: Structure::LowRank,
            phi: 0.5,
            seed: 0,
        }
    }
}

impl JiveConfig {
    /// Individual ranks actually used by the structure: exchangeable fixes
    /// them at one, AR(1) has no low-rank individual part.
    pub fn effective_ranks(&self) -> (usize, usize) {
        match self.structure {
            Structure::LowRank => (self.r_ix, self.r_iy),
            Structure::Exchangeable => (1, 1),
            Structure::Ar1 => (0, 0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.p < 2 || self.q < 2 {
            return Err(DevarError::InvalidParameter(format!(
                "need n, p, q >= 2 (got n={}, p={}, q={})",
                self.n, self.p, self.q
            )));
        }
        let (rix, riy) = self.effective_ranks();
        if self.r_j + rix > self.n.min(self.p) {
            return Err(DevarError::RankConstraint(format!(
                "r_j + r_ix = {} exceeds min(n, p) = {}",
                self.r_j + rix,
                self.n.min(self.p)
            )));
        }
        if self.r_j + riy > self.n.min(self.q) {
            return Err(DevarError::RankConstraint(format!(
                "r_j + r_iy = {} exceeds min(n, q) = {}",
                self.r_j + riy,
                self.n.min(self.q)
            )));
        }
        for (name, v) in [
            ("sigma_j", self.sigma_j),
            ("sigma_ix", self.sigma_ix),
            ("sigma_iy", self.sigma_iy),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(DevarError::InvalidParameter(format!("{name} must be >= 0, got {v}")));
            }
        }
        for (name, v) in [("tau_x", self.tau_x), ("tau_y", self.tau_y)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(DevarError::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.structure == Structure::Ar1 && !(self.phi.abs() < 1.0) {
            return Err(DevarError::InvalidParameter(format!(
                "phi must lie in (-1, 1), got {}",
                self.phi
            )));
        }
        Ok(())
    }

    /// Sets a parameter by name. `sigma_i` and `r_i` set both views at once.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        let as_count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(DevarError::InvalidParameter(format!("{name} must be a nonnegative integer, got {v}")))
            }
        };
        match name {
            "n" => self.n = as_count(value)?,
            "p" => self.p = as_count(value)?,
            "q" => self.q = as_count(value)?,
            "r_j" => self.r_j = as_count(value)?,
            "r_ix" => self.r_ix = as_count(value)?,
            "r_iy" => self.r_iy = as_count(value)?,
            "r_i" => {
                self.r_ix = as_count(value)?;
                self.r_iy = self.r_ix;
            }
            "sigma_j" => self.sigma_j = value,
            "sigma_j2" => self.sigma_j = value.max(0.0).sqrt(),
            "sigma_ix" => self.sigma_ix = value,
            "sigma_iy" => self.sigma_iy = value,
            "sigma_i" => {
                self.sigma_ix = value;
                self.sigma_iy = value;
            }
            "tau_x" => self.tau_x = value,
            "tau_y" => self.tau_y = value,
            "tau" => {
                self.tau_x = value;
                self.tau_y = value;
            }
            "phi" => self.phi = value,
            _ => return Err(DevarError::InvalidParameter(format!("unknown parameter '{name}'"))),
        }
        Ok(())
    }
}

/// Realized latent components.
#[derive(Debug, Clone)]
pub struct JiveTruth {
    pub config: JiveConfig,
    pub l_jx: Mat<f64>,
    pub l_jy: Mat<f64>,
    /// Empty (`p x 0`) for the AR(1) structure.
    pub l_ix: Mat<f64>,
    pub l_iy: Mat<f64>,
    pub s_j: Mat<f64>,
    pub s_ix: Mat<f64>,
    pub s_iy: Mat<f64>,
}

#[derive(Debug, Clone)]
pub struct SimulatedPair {
    pub x: DataMatrix,
    pub y: DataMatrix,
    pub truth: JiveTruth,
}

fn dense_guard(m: usize) -> Result<()> {
    if m > DENSE_COVARIANCE_LIMIT {
        return Err(DevarError::InvalidParameter(format!(
            "dense covariance requested for {m} features (limit {DENSE_COVARIANCE_LIMIT})"
        )));
    }
    Ok(())
}

/// `a L L^T + b I`.
fn spiked(l: &Mat<f64>, a: f64, b: f64) -> Mat<f64> {
    let m = l.nrows();
    let mut out = if l.ncols() == 0 {
        Mat::zeros(m, m)
    } else {
        l * l.transpose()
    };
    for j in 0..m {
        for i in 0..m {
            out[(i, j)] *= a;
        }
        out[(j, j)] += b;
    }
    out
}

fn ar1_covariance(m: usize, phi: f64, tau: f64) -> Mat<f64> {
    let v = tau * tau / (1.0 - phi * phi);
    Mat::from_fn(m, m, |i, j| v * phi.powi((i as i32 - j as i32).abs()))
}

impl JiveTruth {
    fn within(&self, l_i: &Mat<f64>, sigma_i: f64, tau: f64, m: usize) -> Mat<f64> {
        match self.config.structure {
            Structure::Ar1 => ar1_covariance(m, self.config.phi, tau),
            _ => spiked(l_i, sigma_i * sigma_i, tau * tau),
        }
    }

    /// Within-view covariance without the joint term (the covariance of X under
    /// the null `sigma_j = 0`).
    pub fn null_covariance_x(&self) -> Result<Mat<f64>> {
        let c = &self.config;
        dense_guard(c.p)?;
        Ok(self.within(&self.l_ix, c.sigma_ix, c.tau_x, c.p))
    }

    pub fn null_covariance_y(&self) -> Result<Mat<f64>> {
        let c = &self.config;
        dense_guard(c.q)?;
        Ok(self.within(&self.l_iy, c.sigma_iy, c.tau_y, c.q))
    }

    /// Population covariance of X including the joint term.
    pub fn covariance_x(&self) -> Result<Mat<f64>> {
        let s2 = self.config.sigma_j * self.config.sigma_j;
        let mut out = self.null_covariance_x()?;
        out += spiked(&self.l_jx, s2, 0.0);
        Ok(out)
    }

    pub fn covariance_y(&self) -> Result<Mat<f64>> {
        let s2 = self.config.sigma_j * self.config.sigma_j;
        let mut out = self.null_covariance_y()?;
        out += spiked(&self.l_jy, s2, 0.0);
        Ok(out)
    }

    /// `Cov(X, Y) = sigma_j^2 L_JX L_JY^T`.
    pub fn cross_covariance(&self) -> Mat<f64> {
        let s2 = self.config.sigma_j * self.config.sigma_j;
        let (p, q) = (self.l_jx.nrows(), self.l_jy.nrows());
        if self.l_jx.ncols() == 0 {
            return Mat::zeros(p, q);
        }
        let mut out = &self.l_jx * self.l_jy.transpose();
        for j in 0..q {
            for i in 0..p {
                out[(i, j)] *= s2;
            }
        }
        out
    }
}

// Independent ChaCha streams per component so that one draw does not shift
// another when ranks or scales change.
const STREAM_LOAD_X: u64 = 0;
const STREAM_LOAD_Y: u64 = 1;
const STREAM_SJ: u64 = 2;
const STREAM_SIX: u64 = 3;
const STREAM_SIY: u64 = 4;
const STREAM_EX: u64 = 5;
const STREAM_EY: u64 = 6;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Column-major fill from a sampler.
fn fill(rows: usize, cols: usize, mut draw: impl FnMut() -> f64) -> Mat<f64> {
    let mut m = Mat::<f64>::zeros(rows, cols);
    for j in 0..cols {
        for v in m.col_as_slice_mut(j) {
            *v = draw();
        }
    }
    m
}

fn gaussian(rows: usize, cols: usize, scale: f64, rng: &mut ChaCha8Rng) -> Mat<f64> {
    fill(rows, cols, || scale * rng.sample::<f64, _>(StandardNormal))
}

/// Orthonormal `(joint, individual)` loadings with `r_j` and `r_i` columns.
/// With `fixed_individual`, the individual block is the given unit vector and
/// the joint block is drawn orthogonal to it.
fn loadings(m: usize, r_j: usize, r_i: usize, fixed_individual: Option<&[f64]>, rng: &mut ChaCha8Rng) -> (Mat<f64>, Mat<f64>) {
    match fixed_individual {
        Some(u) => {
            let g = gaussian(m, r_j, 1.0, rng);
            let block = Mat::from_fn(m, r_j + 1, |i, j| if j == 0 { u[i] } else { g[(i, j - 1)] });
            let q = block.qr().compute_thin_Q();
            let l_j = q.subcols(1, r_j).to_owned();
            let l_i = Mat::from_fn(m, 1, |i, _| u[i]);
            (l_j, l_i)
        }
        None => {
            let total = r_j + r_i;
            if total == 0 {
                return (Mat::zeros(m, 0), Mat::zeros(m, 0));
            }
            let g = gaussian(m, total, 1.0, rng);
            let q = g.qr().compute_thin_Q();
            (q.subcols(0, r_j).to_owned(), q.subcols(r_j, r_i).to_owned())
        }
    }
}

fn noise_matrix(n: usize, m: usize, tau: f64, family: NoiseFamily, rng: &mut ChaCha8Rng) -> Mat<f64> {
    fill(n, m, || tau * family.sample(rng))
}

/// Stationary AR(1) across columns within each row:
/// `r_k = phi r_{k-1} + eps_k`, `Var(eps) = tau^2`, `Var(r_1) = tau^2 / (1 - phi^2)`.
fn ar1_rows(n: usize, m: usize, phi: f64, tau: f64, family: NoiseFamily, rng: &mut ChaCha8Rng) -> Mat<f64> {
    let eps = noise_matrix(n, m, tau, family, rng);
    let mut out = Mat::<f64>::zeros(n, m);
    let lead = 1.0 / (1.0 - phi * phi).sqrt();
    for i in 0..n {
        out[(i, 0)] = lead * eps[(i, 0)];
    }
    for k in 1..m {
        for i in 0..n {
            out[(i, k)] = phi * out[(i, k - 1)] + eps[(i, k)];
        }
    }
    out
}

fn assemble(
    s_j: &Mat<f64>,
    l_j: &Mat<f64>,
    s_i: &Mat<f64>,
    l_i: &Mat<f64>,
    mut base: Mat<f64>,
) -> Mat<f64> {
    if l_j.ncols() > 0 {
        base += s_j * l_j.transpose();
    }
    if l_i.ncols() > 0 {
        base += s_i * l_i.transpose();
    }
    base
}

/// Draws one `(X, Y)` pair. Deterministic given `config` (including its seed).
pub fn generate_pair(config: &JiveConfig) -> Result<SimulatedPair> {
    config.validate()?;
    let c = config;
    let (n, p, q) = (c.n, c.p, c.q);
    let (rix, riy) = c.effective_ranks();

    let (ux, uy);
    let (fixed_x, fixed_y) = if c.structure == Structure::Exchangeable {
        ux = vec![1.0 / (p as f64).sqrt(); p];
        uy = vec![1.0 / (q as f64).sqrt(); q];
        (Some(ux.as_slice()), Some(uy.as_slice()))
    } else {
        (None, None)
    };
    let (l_jx, l_ix) = loadings(p, c.r_j, rix, fixed_x, &mut stream(c.seed, STREAM_LOAD_X));
    let (l_jy, l_iy) = loadings(q, c.r_j, riy, fixed_y, &mut stream(c.seed, STREAM_LOAD_Y));

    let s_j = gaussian(n, c.r_j, c.sigma_j, &mut stream(c.seed, STREAM_SJ));
    let s_ix = gaussian(n, rix, c.sigma_ix, &mut stream(c.seed, STREAM_SIX));
    let s_iy = gaussian(n, riy, c.sigma_iy, &mut stream(c.seed, STREAM_SIY));

    let (base_x, base_y) = match c.structure {
        Structure::Ar1 => (
            ar1_rows(n, p, c.phi, c.tau_x, c.noise, &mut stream(c.seed, STREAM_EX)),
            ar1_rows(n, q, c.phi, c.tau_y, c.noise, &mut stream(c.seed, STREAM_EY)),
        ),
        _ => (
            noise_matrix(n, p, c.tau_x, c.noise, &mut stream(c.seed, STREAM_EX)),
            noise_matrix(n, q, c.tau_y, c.noise, &mut stream(c.seed, STREAM_EY)),
        ),
    };
    let x = assemble(&s_j, &l_jx, &s_ix, &l_ix, base_x);
    let y = assemble(&s_j, &l_jy, &s_iy, &l_iy, base_y);

    let mut effective = c.clone();
    effective.r_ix = rix;
    effective.r_iy = riy;
    Ok(SimulatedPair {
        x: DataMatrix::new(x)?,
        y: DataMatrix::new(y)?,
        truth: JiveTruth {
            config: effective,
            l_jx,
            l_jy,
            l_ix,
            l_iy,
            s_j,
            s_ix,
            s_iy,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_dev_from_identity(a: &Mat<f64>) -> f64 {
        let g = a.transpose() * a;
        let mut worst = 0.0_f64;
        for j in 0..g.ncols() {
            for i in 0..g.nrows() {
                let t = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - t).abs());
            }
        }
        worst
    }

    fn max_abs(a: &Mat<f64>) -> f64 {
        let mut worst = 0.0_f64;
        for j in 0..a.ncols() {
            for i in 0..a.nrows() {
                worst = worst.max(a[(i, j)].abs());
            }
        }
        worst
    }

    #[test]
    fn loadings_are_orthonormal_and_orthogonal() {
        for structure in [Structure::LowRank, Structure::Exchangeable] {
            let cfg = JiveConfig {
                n: 40,
                p: 30,
                q: 25,
                r_j: 3,
                r_ix: 4,
                r_iy: 2,
                structure,
                seed: 11,
                ..JiveConfig::default()
            };
            let t = generate_pair(&cfg).unwrap().truth;
            for l in [&t.l_jx, &t.l_ix, &t.l_jy, &t.l_iy] {
                assert!(max_dev_from_identity(l) < 1e-10);
            }
            assert!(max_abs(&(t.l_jx.transpose() * &t.l_ix)) < 1e-10);
            assert!(max_abs(&(t.l_jy.transpose() * &t.l_iy)) < 1e-10);
        }
    }

    #[test]
    fn exchangeable_individual_loading_is_flat() {
        let cfg = JiveConfig {
            n: 20,
            p: 16,
            q: 9,
            r_j: 2,
            structure: Structure::Exchangeable,
            ..JiveConfig::default()
        };
        let t = generate_pair(&cfg).unwrap().truth;
        assert_eq!(t.l_ix.ncols(), 1);
        assert!((0..16).all(|i| (t.l_ix[(i, 0)] - 0.25).abs() < 1e-15));
        assert_eq!(t.config.r_ix, 1);
    }

    #[test]
    fn zero_joint_variance_gives_zero_cross_covariance() {
        let cfg = JiveConfig {
            n: 20,
            p: 10,
            q: 12,
            r_j: 2,
            r_ix: 2,
            r_iy: 2,
            sigma_j: 0.0,
            ..JiveConfig::default()
        };
        let t = generate_pair(&cfg).unwrap().truth;
        assert_eq!(max_abs(&t.cross_covariance()), 0.0);
        assert_eq!(max_abs(&t.s_j), 0.0);
    }

    #[test]
    fn rank_constraint_rejected() {
        let cfg = JiveConfig {
            n: 10,
            p: 8,
            r_j: 5,
            r_ix: 4,
            ..JiveConfig::default()
        };
        assert!(matches!(generate_pair(&cfg), Err(DevarError::RankConstraint(_))));
    }

    #[test]
    fn same_seed_same_pair() {
        let cfg = JiveConfig {
            n: 15,
            p: 6,
            q: 7,
            r_j: 1,
            r_ix: 1,
            r_iy: 1,
            noise: NoiseFamily::RightSkew,
            seed: 99,
            ..JiveConfig::default()
        };
        let a = generate_pair(&cfg).unwrap();
        let b = generate_pair(&cfg).unwrap();
        assert_eq!(a.x.values(), b.x.values());
        assert_eq!(a.y.values(), b.y.values());
        let other = generate_pair(&JiveConfig { seed: 100, ..cfg }).unwrap();
        assert_ne!(a.x.values(), other.x.values());
    }

    #[test]
    fn ar1_null_covariance_shape() {
        let cfg = JiveConfig {
            n: 10,
            p: 4,
            q: 3,
            r_j: 1,
            structure: Structure::Ar1,
            phi: 0.5,
            ..JiveConfig::default()
        };
        let t = generate_pair(&cfg).unwrap().truth;
        let s = t.null_covariance_x().unwrap();
        let v = 1.0 / 0.75;
        assert!((s[(0, 0)] - v).abs() < 1e-14);
        assert!((s[(0, 2)] - 0.25 * v).abs() < 1e-14);
        assert_eq!(t.l_ix.ncols(), 0);
    }

    #[test]
    fn set_param_names() {
        let mut c = JiveConfig::default();
        c.set_param("sigma_i", 3.0).unwrap();
        assert_eq!((c.sigma_ix, c.sigma_iy), (3.0, 3.0));
        c.set_param("r_i", 10.0).unwrap();
        assert_eq!((c.r_ix, c.r_iy), (10, 10));
        assert!(c.set_param("r_j", 2.5).is_err());
        assert!(c.set_param("bogus", 1.0).is_err());
    }

    #[test]
    fn fourth_moments() {
        assert_eq!(noise_fourth_moment(NoiseFamily::Gaussian), 3.0);
        assert_eq!(noise_fourth_moment(NoiseFamily::HeavyTail), 9.0);
        assert_eq!(NoiseSpec::from(NoiseFamily::RightSkew).fourth_moment, 6.0);
    }
}
