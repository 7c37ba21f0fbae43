#![allow(dead_code)]

use graff::{make_flat, AffineFlat, RandomStream};
use nalgebra::{DMatrix, DVector, QR};

/// Uniform integer in `lo..=hi`.
pub fn index(rng: &mut RandomStream, lo: usize, hi: usize) -> usize {
    lo + ((rng.uniform() * (hi - lo + 1) as f64) as usize).min(hi - lo)
}

/// Gaussian basis and offset, the offset scaled by `spread`.
pub fn random_flat(rng: &mut RandomStream, k: usize, n: usize, spread: f64) -> AffineFlat {
    loop {
        let a = rng.normal_matrix(n, k);
        let b = rng.normal_vector(n) * spread;
        if let Ok(f) = make_flat(&a, &b) {
            return f;
        }
    }
}

pub fn random_orthogonal(rng: &mut RandomStream, n: usize) -> DMatrix<f64> {
    QR::new(rng.normal_matrix(n, n)).q()
}

pub fn line(dir: &[f64], offset: &[f64]) -> AffineFlat {
    make_flat(
        &DMatrix::from_column_slice(dir.len(), 1, dir),
        &DVector::from_column_slice(offset),
    )
    .unwrap()
}

pub fn point(x: &[f64]) -> AffineFlat {
    AffineFlat::point(DVector::from_column_slice(x))
}

/// `Γ(m/2)` by the half-integer recursion from `Γ(1/2) = √π`, `Γ(1) = 1`.
pub fn gamma_half(m: usize) -> f64 {
    assert!(m > 0);
    let mut x = if m.is_multiple_of(2) {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut arg = if m.is_multiple_of(2) { 1.0 } else { 0.5 };
    while arg < m as f64 / 2.0 {
        x *= arg;
        arg += 1.0;
    }
    x
}

/// Number of partitions of `i` with at most `k` parts, by listing them.
pub fn brute_force_partitions(k: usize, i: usize) -> u128 {
    fn count(remaining: usize, max_part: usize, parts_left: usize) -> u128 {
        if remaining == 0 {
            return 1;
        }
        if parts_left == 0 {
            return 0;
        }
        (1..=max_part.min(remaining))
            .map(|p| count(remaining - p, p, parts_left - 1))
            .sum()
    }
    count(i, i, k)
}

/// Kolmogorov–Smirnov statistic `sup |F_n − F|` of the sample against `cdf`.
pub fn ks_statistic(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of `√n · D_n`.
pub const KS_CRITICAL_1PCT: f64 = 1.628;

/// Mean and batch-means standard error of a correlated series.
pub fn batch_means(series: &[f64], batches: usize) -> (f64, f64) {
    let size = series.len() / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| series[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let mean = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (mean, (var / batches as f64).sqrt())
}
