//! RV-type association tests between two views.

mod permutation;
mod statistic;
mod working;

pub use permutation::{
    draw_permutation, permutation_pvalue, permutation_test, PermutationEngine, PermutationOutcome,
    TIE_RELATIVE_TOL,
};
pub use statistic::{rv_coefficient, rv_statistic};
pub use working::{fit_working_correlation, whiten, CorrelationKind, WorkingCorrelation, CLAMP_MARGIN};

use std::fmt;
use std::str::FromStr;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{DevarError, Result};
use crate::matrix::DataMatrix;
use crate::spectral::{devariate, DevariationResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "RV")]
    Rv,
    #[serde(rename = "DEV_RV")]
    DevRv,
    #[serde(rename = "GEE_EX")]
    GeeEx,
    #[serde(rename = "GEE_AR1")]
    GeeAr1,
    #[serde(rename = "GOLD")]
    Gold,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Rv, Method::DevRv, Method::GeeEx, Method::GeeAr1, Method::Gold];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Rv => "RV",
            Method::DevRv => "DEV_RV",
            Method::GeeEx => "GEE_EX",
            Method::GeeAr1 => "GEE_AR1",
            Method::Gold => "GOLD",
        }
    }

    /// Short lower-case name used on the command line.
    pub fn cli_name(self) -> &'static str {
        match self {
            Method::Rv => "rv",
            Method::DevRv => "devrv",
            Method::GeeEx => "gee-ex",
            Method::GeeAr1 => "gee-ar1",
            Method::Gold => "gold",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = DevarError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Method::ALL
            .into_iter()
            .find(|m| m.cli_name() == norm || m.tag().to_ascii_lowercase().replace('_', "-") == norm)
            .ok_or_else(|| DevarError::InvalidParameter(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub method: Method,
    pub n_perms: usize,
    pub seed: u64,
    pub alpha: f64,
}

impl TestConfig {
    pub fn new(method: Method, n_perms: usize, seed: u64) -> Self {
        Self {
            method,
            n_perms,
            seed,
            alpha: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_perms < 1 {
            return Err(DevarError::InvalidParameter("n_perms must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(DevarError::InvalidParameter(format!(
                "alpha {} outside (0, 1)",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n_perms: usize,
    pub method: Method,
    pub seed: u64,
    /// Devariation details for X and Y (DEV_RV only).
    pub diagnostics: Option<(DevariationResult, DevariationResult)>,
}

/// Flat JSON form of a [`TestResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub method: Method,
    pub statistic: f64,
    pub p_value: f64,
    pub n_perms: usize,
    pub seed: u64,
    pub lambda_x: Option<f64>,
    pub lambda_y: Option<f64>,
    pub tau_x: Option<f64>,
    pub tau_y: Option<f64>,
}

impl TestResult {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value <= alpha
    }

    pub fn report(&self) -> TestReport {
        let d = self.diagnostics.as_ref();
        TestReport {
            method: self.method,
            statistic: self.statistic,
            p_value: self.p_value,
            n_perms: self.n_perms,
            seed: self.seed,
            lambda_x: d.map(|(x, _)| x.lambda),
            lambda_y: d.map(|(_, y)| y.lambda),
            tau_x: d.map(|(x, _)| x.tau_hat),
            tau_y: d.map(|(_, y)| y.tau_hat),
        }
    }
}

/// Transformed pair on which the statistic and the permutations are computed.
pub struct TransformedPair {
    pub x: DataMatrix,
    pub y: DataMatrix,
    pub diagnostics: Option<(DevariationResult, DevariationResult)>,
}

/// Applies the method-specific transform to both views.
///
/// RV: none. DEV_RV: devariation of each view. GEE_EX / GEE_AR1: fitted
/// working correlation then whitening. GOLD: whitening with the supplied
/// covariances.
pub fn transform_pair(
    x: &DataMatrix,
    y: &DataMatrix,
    method: Method,
    sigma_x: Option<&Mat<f64>>,
    sigma_y: Option<&Mat<f64>>,
) -> Result<TransformedPair> {
    statistic::check_rows(x, y)?;
    let gee = |kind| -> Result<TransformedPair> {
        let wx = fit_working_correlation(x, kind)?;
        let wy = fit_working_correlation(y, kind)?;
        Ok(TransformedPair {
            x: whiten(x, &wx)?,
            y: whiten(y, &wy)?,
            diagnostics: None,
        })
    };
    match method {
        Method::Rv => Ok(TransformedPair {
            x: x.clone(),
            y: y.clone(),
            diagnostics: None,
        }),
        Method::DevRv => {
            let dx = devariate(x, None)?;
            let dy = devariate(y, None)?;
            Ok(TransformedPair {
                x: dx.adjusted.clone(),
                y: dy.adjusted.clone(),
                diagnostics: Some((dx, dy)),
            })
        }
        Method::GeeEx => gee(CorrelationKind::Exchangeable),
        Method::GeeAr1 => gee(CorrelationKind::Ar1),
        Method::Gold => {
            let (Some(sx), Some(sy)) = (sigma_x, sigma_y) else {
                return Err(DevarError::MissingInput(
                    "GOLD requires explicit covariance matrices for both views".into(),
                ));
            };
            Ok(TransformedPair {
                x: whiten(x, &WorkingCorrelation::Explicit(sx.clone()))?,
                y: whiten(y, &WorkingCorrelation::Explicit(sy.clone()))?,
                diagnostics: None,
            })
        }
    }
}

/// Transforms the pair per `config.method`, then computes `T_RV` and its
/// row-permutation p-value.
pub fn run_test(
    x: &DataMatrix,
    y: &DataMatrix,
    config: &TestConfig,
    sigma_x: Option<&Mat<f64>>,
    sigma_y: Option<&Mat<f64>>,
) -> Result<TestResult> {
    config.validate()?;
    let t = transform_pair(x, y, config.method, sigma_x, sigma_y)?;
    let outcome = permutation_test(&t.x, &t.y, config.n_perms, config.seed)?;
    Ok(TestResult {
        statistic: rv_statistic(&t.x, &t.y)?,
        p_value: outcome.p_value,
        n_perms: config.n_perms,
        method: config.method,
        seed: config.seed,
        diagnostics: t.diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.cli_name().parse::<Method>().unwrap(), m);
            assert_eq!(m.tag().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn gold_without_covariances_fails() {
        let x = DataMatrix::from_fn(6, 2, |i, j| (i * (j + 1)) as f64).unwrap();
        let cfg = TestConfig::new(Method::Gold, 9, 1);
        assert!(matches!(
            run_test(&x, &x, &cfg, None, None),
            Err(DevarError::MissingInput(_))
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = TestConfig::new(Method::Rv, 0, 1);
        assert!(cfg.validate().is_err());
        cfg.n_perms = 10;
        cfg.alpha = 1.0;
        assert!(cfg.validate().is_err());
    }
}
