#![allow(dead_code)]

use devar_core::DataMatrix;
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(n: usize, m: usize, scale: f64, rng: &mut ChaCha8Rng) -> Mat<f64> {
    let mut a = Mat::<f64>::zeros(n, m);
    for j in 0..m {
        for i in 0..n {
            a[(i, j)] = scale * rng.sample::<f64, _>(StandardNormal);
        }
    }
    a
}

pub fn gaussian_data(n: usize, m: usize, scale: f64, seed: u64) -> DataMatrix {
    DataMatrix::new(gaussian(n, m, scale, &mut rng(seed))).unwrap()
}

/// Haar-ish random orthogonal matrix from the QR of a Gaussian block.
pub fn orthogonal(m: usize, rng: &mut ChaCha8Rng) -> Mat<f64> {
    gaussian(m, m, 1.0, rng).qr().compute_thin_Q()
}

pub fn max_abs_diff(a: faer::MatRef<'_, f64>, b: faer::MatRef<'_, f64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut worst = 0.0_f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).abs());
        }
    }
    worst
}

pub fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

pub fn singular_values(a: faer::MatRef<'_, f64>) -> Vec<f64> {
    sorted_desc(a.singular_values().unwrap())
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Composite Simpson rule on `[a, b]` with `steps` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    let h = (b - a) / steps as f64;
    let mut s = f(a) + f(b);
    for k in 1..steps {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}
