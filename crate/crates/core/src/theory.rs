//! Asymptotic power of the devariated RV test and the RV critical value.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc_inv;
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{DevarError, Result};

/// Parameters of an asymptotic regime. `c_x = p/n`, `c_y = q/n`; `mu4_*` are
/// fourth moments of the unit-variance noise entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegimeProfile {
    pub c_x: f64,
    pub c_y: f64,
    pub r_j: usize,
    pub r_ix: usize,
    pub r_iy: usize,
    pub sigma_j: f64,
    pub sigma_ix: f64,
    pub sigma_iy: f64,
    pub tau_x: f64,
    pub tau_y: f64,
    pub mu4_x: f64,
    pub mu4_y: f64,
    pub alpha: f64,
    pub n: usize,
}

impl Default for RegimeProfile {
    fn default() -> Self {
        Self {
            c_x: 1.0,
            c_y: 1.0,
            r_j: 1,
            r_ix: 1,
            r_iy: 1,
            sigma_j: 1.0,
            sigma_ix: 1.0,
            sigma_iy: 1.0,
            tau_x: 1.0,
            tau_y: 1.0,
            mu4_x: 3.0,
            mu4_y: 3.0,
            alpha: 0.05,
            n: 100,
        }
    }
}

impl RegimeProfile {
    fn check_ratios(&self) -> Result<()> {
        for (name, c) in [("c_x", self.c_x), ("c_y", self.c_y)] {
            if !(c > 0.0 && c <= 1.0) {
                return Err(DevarError::DegenerateAspectRatio(format!("{name} = {c} outside (0, 1]")));
            }
        }
        Ok(())
    }

    fn check_common(&self) -> Result<()> {
        self.check_ratios()?;
        check_alpha(self.alpha)?;
        for (name, m) in [("mu4_x", self.mu4_x), ("mu4_y", self.mu4_y)] {
            if !(m >= 1.0 && m.is_finite()) {
                return Err(DevarError::InvalidParameter(format!("{name} = {m} must be >= 1")));
            }
        }
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DevarError::InvalidParameter(format!("alpha {alpha} outside (0, 1)")));
    }
    Ok(())
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
}

/// `1 - Phi(z_{1-alpha} - delta)`, evaluated as `Phi(delta - z_{1-alpha})`.
/// Exactly `alpha` when `delta == 0`.
fn shifted_power(alpha: f64, delta: f64) -> f64 {
    if delta == 0.0 {
        return alpha;
    }
    normal_cdf(delta - normal_quantile(1.0 - alpha))
}

/// Limiting DEV_RV power when individual structure dominates and `sigma_j`
/// is fixed.
pub fn power_dev_scenario1(profile: &RegimeProfile) -> Result<f64> {
    let p = profile;
    p.check_common()?;
    if !(p.tau_x > 0.0 && p.tau_y > 0.0) {
        return Err(DevarError::DegenerateAspectRatio(format!(
            "noise scales must be positive (tau_x = {}, tau_y = {})",
            p.tau_x, p.tau_y
        )));
    }
    if !(p.sigma_j >= 0.0) {
        return Err(DevarError::InvalidParameter(format!("sigma_j = {} must be >= 0", p.sigma_j)));
    }
    let (cx, cy) = (p.c_x, p.c_y);
    let s2 = p.sigma_j * p.sigma_j;
    let (tx2, ty2) = (p.tau_x * p.tau_x, p.tau_y * p.tau_y);
    let num = p.r_j as f64 * (s2 * s2 + cy * s2 * ty2 + cx * s2 * tx2);
    let den = tx2 * ty2 * (2.0 * cx * cy + cx * cy * cy * (p.mu4_x - 1.0) + cy * cx * cx * (p.mu4_y - 1.0)).sqrt();
    Ok(shifted_power(p.alpha, num / den))
}

/// Limiting DEV_RV power when the joint structure dominates and there is no
/// individual variation.
pub fn power_dev_scenario3(profile: &RegimeProfile) -> Result<f64> {
    let p = profile;
    p.check_common()?;
    let (cx, cy) = (p.c_x, p.c_y);
    let (sx, sy) = ((2.0 * cx).sqrt(), (2.0 * cy).sqrt());
    let num = 1.0 + sy + sx + cy * sx + cx * sy + 2.0 * (cx * cy).sqrt();
    let den = (cx * cy).sqrt() * (2.0 + cy * (p.mu4_x - 1.0) + cx * (p.mu4_y - 1.0)).sqrt();
    Ok(shifted_power(p.alpha, p.r_j as f64 * num / den))
}

/// Gaussian-noise lower bound on the joint-dominant power:
/// `1 - Phi(z_{1-alpha} - r_j (3 + 4 sqrt 2) / sqrt 6)`.
pub fn power_lower_bound(alpha: f64, r_j: usize) -> Result<f64> {
    check_alpha(alpha)?;
    let k = (3.0 + 4.0 * std::f64::consts::SQRT_2) / 6.0_f64.sqrt();
    Ok(shifted_power(alpha, r_j as f64 * k))
}

/// Analytic RV critical value `q_{1-alpha}(chi^2_{r_ix r_iy}) n sigma_ix^2 sigma_iy^2`.
pub fn critical_value_rv(profile: &RegimeProfile) -> Result<f64> {
    let p = profile;
    check_alpha(p.alpha)?;
    let df = p.r_ix * p.r_iy;
    if df == 0 {
        return Err(DevarError::InvalidParameter("r_ix * r_iy must be at least 1".into()));
    }
    if !(p.sigma_ix > 0.0 && p.sigma_iy > 0.0) {
        return Err(DevarError::InvalidParameter("sigma_ix and sigma_iy must be positive".into()));
    }
    let q = chi2_quantile(df as f64, 1.0 - p.alpha)?;
    Ok(q * p.n as f64 * p.sigma_ix.powi(2) * p.sigma_iy.powi(2))
}

/// Quantile of the chi-square distribution with `df` degrees of freedom.
/// Wilson-Hilferty start, then safeguarded Newton on the regularized gamma.
pub fn chi2_quantile(df: f64, prob: f64) -> Result<f64> {
    if !(df > 0.0 && df.is_finite()) {
        return Err(DevarError::InvalidParameter(format!("df = {df} must be positive")));
    }
    if !(prob > 0.0 && prob < 1.0) {
        return Err(DevarError::InvalidParameter(format!("probability {prob} outside (0, 1)")));
    }
    let k = df / 2.0;
    let cdf = |x: f64| gamma_lr(k, x / 2.0);
    let ln_norm = ln_gamma(k) + k * std::f64::consts::LN_2;
    let pdf = |x: f64| ((k - 1.0) * x.ln() - x / 2.0 - ln_norm).exp();

    let z = normal_quantile(prob);
    let h = 2.0 / (9.0 * df);
    let mut x = df * (1.0 - h + z * h.sqrt()).powi(3);
    if !(x > 0.0) {
        x = df.min(1.0) * 1e-3;
    }

    let (mut lo, mut hi) = (0.0_f64, f64::INFINITY);
    for _ in 0..200 {
        let f = cdf(x) - prob;
        if f == 0.0 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = pdf(x);
        let mut next = x - f / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * x.max(1.0) };
        }
        if (next - x).abs() <= 1e-15 * x {
            return Ok(next);
        }
        x = next;
    }
    Err(DevarError::NoConvergence(format!("chi-square quantile df={df} p={prob}")))
}
