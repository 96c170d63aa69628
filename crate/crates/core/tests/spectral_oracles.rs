mod common;

use common::*;
use devar_core::spectral::{
    devariate, estimate_tau, mp_median, mp_support, noise_threshold, soft_threshold, svd,
};
use devar_core::DataMatrix;
use faer::Mat;
use proptest::prelude::*;

/// Random matrix with a few planted spikes so that some singular values
/// exceed the noise threshold.
fn spiked(n: usize, m: usize, spikes: &[f64], seed: u64) -> DataMatrix {
    let mut r = rng(seed);
    let mut a = gaussian(n, m, 1.0, &mut r);
    let k = spikes.len().min(n.min(m));
    if k > 0 {
        let u = gaussian(n, k, 1.0, &mut r).qr().compute_thin_Q();
        let v = gaussian(m, k, 1.0, &mut r).qr().compute_thin_Q();
        for c in 0..k {
            for j in 0..m {
                for i in 0..n {
                    a[(i, j)] += spikes[c] * u[(i, c)] * v[(j, c)];
                }
            }
        }
    }
    DataMatrix::new(a).unwrap()
}

fn nuclear_norm(z: faer::MatRef<'_, f64>) -> f64 {
    singular_values(z).iter().sum()
}

fn objective(y: faer::MatRef<'_, f64>, z: faer::MatRef<'_, f64>, lambda: f64) -> f64 {
    (y - z).squared_norm_l2() + 2.0 * lambda * nuclear_norm(z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shrinkage_identity(n in 3usize..14, m in 2usize..11, s1 in 0.0f64..60.0, s2 in 0.0f64..30.0, seed in any::<u64>()) {
        let a = spiked(n, m, &[s1, s2], seed);
        let res = devariate(&a, None).unwrap();
        let got = singular_values(res.adjusted.values());
        let want = sorted_desc(res.original_singulars.iter().map(|&d| d.min(res.lambda)).collect());
        let scale = res.original_singulars[0].max(1.0);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-8 * scale, "{got:?} vs {want:?}");
        }
        for (s, d) in res.shrunk_singulars.iter().zip(&res.original_singulars) {
            prop_assert!((s - d.min(res.lambda)).abs() < 1e-12 * scale);
        }
        prop_assert_eq!((res.adjusted.nrows(), res.adjusted.ncols()), (n, m));
    }

    #[test]
    fn svd_contract(n in 1usize..12, m in 1usize..12, seed in any::<u64>()) {
        let a = DataMatrix::new(gaussian(n.max(2), m, 1.0, &mut rng(seed))).unwrap();
        let t = svd(&a).unwrap();
        let r = t.d.len();
        prop_assert!(t.d.windows(2).all(|w| w[0] >= w[1]) && t.d.iter().all(|&d| d >= 0.0));
        let eye = Mat::<f64>::identity(r, r);
        prop_assert!(max_abs_diff((t.u.transpose() * &t.u).as_ref(), eye.as_ref()) < 1e-8);
        prop_assert!(max_abs_diff((t.v.transpose() * &t.v).as_ref(), eye.as_ref()) < 1e-8);
        let rel = (t.reconstruct() - a.values()).norm_l2() / a.values().norm_l2();
        prop_assert!(rel < 1e-8);
    }

    #[test]
    fn mp_median_inside_support(beta in 1e-3f64..=1.0) {
        let (lo, hi) = mp_support(beta);
        let med = mp_median(beta).unwrap();
        prop_assert!(lo < med && med < hi);
    }

    #[test]
    fn soft_threshold_orthogonal_equivariance(lambda_frac in 0.0f64..1.2, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = gaussian(6, 4, 1.0, &mut r);
        let q = orthogonal(6, &mut r);
        let rr = orthogonal(4, &mut r);
        let d1 = singular_values(a.as_ref())[0];
        let lambda = lambda_frac * d1;
        let lhs = soft_threshold(&DataMatrix::new(&q * &a * &rr).unwrap(), lambda).unwrap();
        let rhs = &q * soft_threshold(&DataMatrix::new(a).unwrap(), lambda).unwrap().values() * &rr;
        prop_assert!(max_abs_diff(lhs.values(), rhs.as_ref()) < 1e-8);
    }

    #[test]
    fn tau_is_homogeneous(c in 1e-3f64..1e3, seed in any::<u64>()) {
        let a = gaussian_data(20, 15, 1.0, seed);
        let t1 = estimate_tau(&a).unwrap();
        let t2 = estimate_tau(&a.scaled(c)).unwrap();
        prop_assert!((t2 - c * t1).abs() <= 1e-10 * c * t1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    /// The soft-threshold is the minimiser of the nuclear-norm penalised
    /// least-squares objective: small perturbations never decrease it.
    #[test]
    fn soft_threshold_is_penalised_minimiser(lambda_frac in 0.01f64..0.99, seed in any::<u64>()) {
        let mut r = rng(seed);
        let y = gaussian(6, 4, 1.0, &mut r);
        let lambda = lambda_frac * singular_values(y.as_ref())[0];
        let z = soft_threshold(&DataMatrix::new(y.clone()).unwrap(), lambda).unwrap().into_values();
        let f0 = objective(y.as_ref(), z.as_ref(), lambda);
        for _ in 0..100 {
            let mut delta = gaussian(6, 4, 1.0, &mut r);
            let norm = delta.norm_l2();
            delta /= faer::Scale(norm);
            let zp = &z + &delta * faer::Scale(1e-3);
            let f1 = objective(y.as_ref(), zp.as_ref(), lambda);
            prop_assert!(f0 <= f1 + 1e-12 * f0.abs().max(1.0), "f0={f0} f1={f1}");
        }
    }
}

#[test]
fn soft_threshold_extremes() {
    let a = gaussian_data(7, 5, 1.0, 3);
    let d1 = singular_values(a.values())[0];
    let z = soft_threshold(&a, d1 * 1.0001).unwrap();
    assert_eq!(z.max_abs(), 0.0);
    let same = soft_threshold(&a, 0.0).unwrap();
    assert!(max_abs_diff(same.values(), a.values()) < 1e-10);
}

#[test]
fn no_shrinkage_below_threshold() {
    let a = gaussian_data(30, 20, 1.0, 4);
    let d1 = singular_values(a.values())[0];
    let tau = 1.01 * d1 / ((30f64).sqrt() + (20f64).sqrt());
    let res = devariate(&a, Some(tau)).unwrap();
    assert!(res.lambda > d1);
    assert!(max_abs_diff(res.adjusted.values(), a.values()) < 1e-10);
}

#[test]
fn threshold_arithmetic() {
    assert_eq!(noise_threshold(1.0, 100, 25), 15.0);
}

/// Median eigenvalue of `E^T E / n` for Gaussian `E`, `n x m`, `n >= m`.
fn wishart_median(n: usize, m: usize, seed: u64) -> f64 {
    let e = gaussian(n, m, 1.0, &mut rng(seed));
    median(singular_values(e.as_ref()).iter().map(|d| d * d / n as f64).collect())
}

#[test]
fn mp_median_matches_wishart_half() {
    let mc = wishart_median(2000, 1000, 5);
    let mp = mp_median(0.5).unwrap();
    assert!((mc / mp - 1.0).abs() < 0.01, "mc={mc} mp={mp}");
}

#[test]
fn mp_median_matches_wishart_square() {
    let mc = wishart_median(2000, 2000, 6);
    let mp = mp_median(1.0).unwrap();
    assert!((mc / mp - 1.0).abs() < 0.01, "mc={mc} mp={mp}");
}

#[test]
fn tau_recovers_noise_scale() {
    let mut sum = 0.0;
    for rep in 0..20 {
        let t = estimate_tau(&gaussian_data(500, 500, 2.0, 100 + rep)).unwrap();
        assert!((1.9..=2.1).contains(&t), "replicate {rep}: {t}");
        sum += t;
    }
    assert!((sum / 20.0 - 2.0).abs() < 0.02);
}

#[test]
fn tau_robust_to_one_spike() {
    for rep in 0..20 {
        let a = spiked(300, 200, &[50.0], 200 + rep);
        let t = estimate_tau(&a).unwrap();
        assert!((0.95..=1.05).contains(&t), "replicate {rep}: {t}");
    }
}
