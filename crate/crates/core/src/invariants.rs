//! Closed-form invariants: dimensions, volumes, Betti numbers and homotopy
//! groups of affine Grassmannians and their special Schubert varieties.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{dim_err, GraffError, Result};

/// `dim Graff(k, n) = (n − k)(k + 1)`.
pub fn dim_graff(k: usize, n: usize) -> Result<usize> {
    if k >= n {
        return Err(dim_err(format!(
            "Graff(k, n) needs k < n, got k = {k}, n = {n}"
        )));
    }
    Ok((n - k) * (k + 1))
}

/// `dim Gr(k, n) = k(n − k)`.
pub fn dim_gr(k: usize, n: usize) -> Result<usize> {
    if k > n {
        return Err(dim_err(format!(
            "Gr(k, n) needs k ≤ n, got k = {k}, n = {n}"
        )));
    }
    Ok(k * (n - k))
}

/// Dimensions of the compact and noncompact affine Stiefel manifolds,
/// `k(2n − k + 1)/2` and `n(k + 1)`.
pub fn dim_stiefel_affine(k: usize, n: usize) -> Result<(usize, usize)> {
    if k == 0 || k > n {
        return Err(dim_err(format!(
            "affine Stiefel manifold needs 0 < k ≤ n, got k = {k}, n = {n}"
        )));
    }
    Ok((k * (2 * n - k + 1) / 2, n * (k + 1)))
}

/// Dimension of the affine Schubert variety of a flag with dimensions
/// `d_1 < … < d_k`: `Σ d_j − k(k+1)/2 + (d_1 − 1)`.
pub fn dim_schubert_affine(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(GraffError::InvalidFlag(
            "flag must have at least one subspace".into(),
        ));
    }
    for (j, &d) in dims.iter().enumerate() {
        if d < j + 1 {
            return Err(GraffError::InvalidFlag(format!(
                "d_{} = {d} is smaller than {}",
                j + 1,
                j + 1
            )));
        }
        if j > 0 && d <= dims[j - 1] {
            return Err(GraffError::InvalidFlag(format!(
                "dimensions must increase strictly, but d_{} = {} ≥ d_{} = {d}",
                j,
                dims[j - 1],
                j + 1
            )));
        }
    }
    let k = dims.len();
    let sum: usize = dims.iter().sum();
    Ok(sum - k * (k + 1) / 2 + (dims[0] - 1))
}

fn check_psi(k: usize, l: usize, n: usize) -> Result<()> {
    if !(k <= l && l <= n) {
        return Err(dim_err(format!("need k ≤ l ≤ n, got ({k}, {l}, {n})")));
    }
    Ok(())
}

/// Dimension of the l-flats containing a fixed k-flat: `(n − l)(l − k)`.
pub fn dim_psi_plus(k: usize, l: usize, n: usize) -> Result<usize> {
    check_psi(k, l, n)?;
    Ok((n - l) * (l - k))
}

/// Dimension of the k-flats contained in a fixed l-flat: `(k + 1)(l − k)`.
pub fn dim_psi_minus(k: usize, l: usize, n: usize) -> Result<usize> {
    check_psi(k, l, n)?;
    Ok((k + 1) * (l - k))
}

/// `ln ω_m` for the unit ball in R^m, via `ω_m = ω_{m−2} · 2π/m`.
pub fn ln_unit_ball_volume(m: usize) -> f64 {
    let mut acc = if m.is_multiple_of(2) { 0.0 } else { 2f64.ln() };
    let mut j = if m.is_multiple_of(2) { 2 } else { 3 };
    while j <= m {
        acc += (2.0 * PI / j as f64).ln();
        j += 2;
    }
    acc
}

/// `ω_m = π^{m/2} / Γ(1 + m/2)`.
pub fn unit_ball_volume(m: usize) -> f64 {
    ln_unit_ball_volume(m).exp()
}

fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|j| (j as f64).ln()).sum()
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn ln_omega_product(from: usize, to: usize) -> f64 {
    (from..=to).map(ln_unit_ball_volume).sum()
}

/// `ln Vol Gr(k, n)`.
pub fn ln_volume_gr(k: usize, n: usize) -> Result<f64> {
    if k > n {
        return Err(dim_err(format!(
            "Gr(k, n) needs k ≤ n, got k = {k}, n = {n}"
        )));
    }
    Ok(ln_binomial(n, k) + ln_omega_product(1, n)
        - ln_omega_product(1, k)
        - ln_omega_product(1, n - k))
}

/// `Vol Gr(k, n) = C(n, k) Π_{j≤n} ω_j / (Π_{j≤k} ω_j Π_{j≤n−k} ω_j)`.
pub fn volume_gr(k: usize, n: usize) -> Result<f64> {
    Ok(ln_volume_gr(k, n)?.exp())
}

/// `ln Vol Graff(k, n) = ln Vol Gr(k + 1, n + 1)`.
pub fn ln_volume_graff(k: usize, n: usize) -> Result<f64> {
    if k >= n {
        return Err(dim_err(format!(
            "Graff(k, n) needs k < n, got k = {k}, n = {n}"
        )));
    }
    ln_volume_gr(k + 1, n + 1)
}

pub fn volume_graff(k: usize, n: usize) -> Result<f64> {
    Ok(ln_volume_graff(k, n)?.exp())
}

fn check_relative(k: usize, l: usize, n: usize) -> Result<()> {
    if !(k <= l && l <= n && k + l >= n) {
        return Err(dim_err(format!(
            "relative volume needs k ≤ l ≤ n and k + l ≥ n, got ({k}, {l}, {n})"
        )));
    }
    Ok(())
}

/// Log of the common relative volume of the l-flats containing a k-flat and
/// of the k-flats contained in an l-flat.
pub fn ln_relative_volume(k: usize, l: usize, n: usize) -> Result<f64> {
    check_relative(k, l, n)?;
    Ok(
        ln_factorial(l + 1) + ln_factorial(n - k) + ln_omega_product(l - k + 1, l + 1)
            - ln_factorial(n + 1)
            - ln_factorial(l - k)
            - ln_omega_product(n - k + 1, n + 1),
    )
}

/// `(l+1)!(n−k)! Π_{j=l−k+1}^{l+1} ω_j / ((n+1)!(l−k)! Π_{j=n−k+1}^{n+1} ω_j)`.
pub fn relative_volume(k: usize, l: usize, n: usize) -> Result<f64> {
    Ok(ln_relative_volume(k, l, n)?.exp())
}

/// Number of partitions of `i` into at most `k` parts.
pub fn betti(k: usize, i: usize) -> u128 {
    // Conjugation: at most k parts ⇔ all parts ≤ k.
    let mut ways = vec![0u128; i + 1];
    ways[0] = 1;
    for part in 1..=k.min(i) {
        for total in part..=i {
            ways[total] += ways[total - part];
        }
    }
    ways[i]
}

/// A homotopy group as far as it is known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupDescriptor {
    Z,
    Z2,
    Trivial,
    Unknown,
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupDescriptor::Z => "Z",
            GroupDescriptor::Z2 => "Z2",
            GroupDescriptor::Trivial => "0",
            GroupDescriptor::Unknown => "unknown",
        })
    }
}

/// Ambient dimension for [`homotopy_group`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambient {
    Finite(usize),
    Infinite,
}

fn bott(r: usize) -> GroupDescriptor {
    match r % 8 {
        0 | 4 => GroupDescriptor::Z,
        1 | 2 => GroupDescriptor::Z2,
        _ => GroupDescriptor::Trivial,
    }
}

/// `π_r(Graff(k, n))`, which equals `π_r(Gr(k, n))`. Outside the stable
/// ranges where a closed form is known this returns `Unknown`.
pub fn homotopy_group(k: usize, n: Ambient, r: usize) -> GroupDescriptor {
    match (n, r) {
        (_, 0) => GroupDescriptor::Unknown,
        (Ambient::Infinite, 1) => GroupDescriptor::Z2,
        (Ambient::Infinite, r) => bott(r),
        (Ambient::Finite(n), 1) => {
            if k == 1 && n == 2 {
                GroupDescriptor::Z
            } else if n >= k + 2 && k > 0 && 2 * k < n {
                GroupDescriptor::Z2
            } else {
                GroupDescriptor::Unknown
            }
        }
        (Ambient::Finite(n), r) => {
            if 2 * k < n && r < n - 2 * k {
                bott(r)
            } else {
                GroupDescriptor::Unknown
            }
        }
    }
}
