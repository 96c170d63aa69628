//! Marchenko–Pastur law: density, CDF and median.

use crate::error::{DevarError, Result};

/// Support `[(1 - sqrt(beta))^2, (1 + sqrt(beta))^2]` of the law with aspect
/// ratio `beta` and unit variance.
pub fn mp_support(beta: f64) -> (f64, f64) {
    let s = beta.sqrt();
    ((1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s))
}

/// Density `sqrt((b - x)(x - a)) / (2 pi beta x)` on the support, zero outside.
pub fn mp_density(beta: f64, x: f64) -> f64 {
    let (a, b) = mp_support(beta);
    if x <= a || x >= b || x <= 0.0 {
        return 0.0;
    }
    ((b - x) * (x - a)).sqrt() / (2.0 * std::f64::consts::PI * beta * x)
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= 1.0 {
        Ok(())
    } else {
        Err(DevarError::InvalidParameter(format!(
            "aspect ratio {beta} outside (0, 1]"
        )))
    }
}

/// The law after the substitution `x = a + (b - a)(1 - cos t) / 2`, which
/// removes the square-root endpoint behaviour of the density.
struct AngularLaw {
    a: f64,
    b: f64,
    beta: f64,
}

impl AngularLaw {
    fn new(beta: f64) -> Self {
        let (a, b) = mp_support(beta);
        Self { a, b, beta }
    }

    fn x_at(&self, t: f64) -> f64 {
        self.a + (self.b - self.a) * (1.0 - t.cos()) / 2.0
    }

    /// `f(x(t)) dx/dt`.
    fn integrand(&self, t: f64) -> f64 {
        let w = self.b - self.a;
        let pi = std::f64::consts::PI;
        if self.a == 0.0 {
            // sin^2 t / x(t) has the finite form 2(1 + cos t) / b here.
            return self.b * (1.0 + t.cos()) / (4.0 * pi * self.beta);
        }
        let s = t.sin();
        w * w * s * s / (8.0 * pi * self.beta * self.x_at(t))
    }

    fn cdf_angle(&self, t: f64) -> f64 {
        adaptive_simpson(&|u| self.integrand(u), 0.0, t, 1e-14, 40)
    }
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        // Halving tol below the rounding floor would recurse to full depth.
        let floor = 8.0 * f64::EPSILON * (left.abs() + right.abs());
        if depth == 0 || delta.abs() <= 15.0 * tol.max(floor) {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, depth)
}

/// CDF of the Marchenko–Pastur law at `x`.
pub fn mp_cdf(beta: f64, x: f64) -> Result<f64> {
    check_beta(beta)?;
    let law = AngularLaw::new(beta);
    if x <= law.a {
        return Ok(0.0);
    }
    if x >= law.b {
        return Ok(1.0);
    }
    let c = 1.0 - 2.0 * (x - law.a) / (law.b - law.a);
    Ok(law.cdf_angle(c.clamp(-1.0, 1.0).acos()))
}

/// Median of the Marchenko–Pastur law with aspect ratio `beta`, found by
/// bisection on the quadrature CDF.
pub fn mp_median(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let law = AngularLaw::new(beta);
    let (mut lo, mut hi) = (0.0_f64, std::f64::consts::PI);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if law.cdf_angle(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(law.x_at(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Plain midpoint rule directly in x, for cross-checking the angular form.
    fn midpoint_cdf(beta: f64, x: f64, steps: usize) -> f64 {
        let (a, _) = mp_support(beta);
        let h = (x - a) / steps as f64;
        (0..steps).map(|k| mp_density(beta, a + (k as f64 + 0.5) * h) * h).sum()
    }

    #[test]
    fn total_mass_is_one() {
        for beta in [0.05, 0.3, 0.5, 0.8, 1.0] {
            let (_, b) = mp_support(beta);
            let law = AngularLaw::new(beta);
            let total = law.cdf_angle(std::f64::consts::PI);
            assert!((total - 1.0).abs() < 1e-10, "beta={beta} total={total}");
            assert_eq!(mp_cdf(beta, b + 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn median_halves_the_mass() {
        for beta in [0.1, 0.25, 0.5, 0.75, 0.99, 1.0] {
            let med = mp_median(beta).unwrap();
            let (a, b) = mp_support(beta);
            assert!(a < med && med < b);
            assert!((mp_cdf(beta, med).unwrap() - 0.5).abs() < 1e-8);
        }
    }

    #[test]
    fn angular_cdf_matches_midpoint_rule() {
        for beta in [0.2, 0.5] {
            let med = mp_median(beta).unwrap();
            let brute = midpoint_cdf(beta, med, 2_000_000);
            assert!((brute - 0.5).abs() < 1e-6, "beta={beta} brute={brute}");
        }
    }

    #[test]
    fn beta_out_of_range() {
        assert!(mp_median(0.0).is_err());
        assert!(mp_median(1.5).is_err());
        assert!(mp_median(f64::NAN).is_err());
    }
}
