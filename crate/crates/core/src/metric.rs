//! Affine principal angles and everything built on them.
//!
//! The angles between a k-flat `F` and an l-flat `G` are the arccosines of
//! the singular values of `Y_Fᵀ Y_G`, where `Y` are Stiefel coordinates.
//! There are `min(k, l) + 1` of them. Every distance here is a function of
//! those angles alone.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::coords::{stiefel_coords, unembed, AffineFlat};
use crate::error::{dim_err, GraffError, Result};
use crate::linalg::{complete_orthonormal, full_svd, singular_values};

/// Singular values this far above 1 indicate a broken input, not rounding.
const SIGMA_OVERSHOOT: f64 = 1e-8;

/// Smallest admissible singular value for a geodesic between two flats.
pub const GEODESIC_SINGULAR_TOL: f64 = 1e-10;

/// Affine principal angles, singular values, rotations and principal vectors.
#[derive(Debug, Clone)]
pub struct PrincipalDecomposition {
    /// Nondecreasing, in `[0, π/2]`.
    pub thetas: Vec<f64>,
    /// Nonincreasing, in `[0, 1]`.
    pub sigmas: Vec<f64>,
    /// `sin θ_i`, computed independently of the cosines.
    pub sines: Vec<f64>,
    /// (k+1)×(k+1) orthogonal.
    pub u: DMatrix<f64>,
    /// (l+1)×(l+1) orthogonal.
    pub v: DMatrix<f64>,
    /// `Y_F U`; columns are the principal vectors on `F`.
    pub p_vecs: DMatrix<f64>,
    /// `Y_G V`; columns are the principal vectors on `G`.
    pub q_vecs: DMatrix<f64>,
}

/// The distances between equidimensional flats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    Grassmann,
    Asimov,
    BinetCauchy,
    Chordal,
    FubiniStudy,
    Martin,
    Procrustes,
    Projection,
    Spectral,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 9] = [
        DistanceKind::Grassmann,
        DistanceKind::Asimov,
        DistanceKind::BinetCauchy,
        DistanceKind::Chordal,
        DistanceKind::FubiniStudy,
        DistanceKind::Martin,
        DistanceKind::Procrustes,
        DistanceKind::Projection,
        DistanceKind::Spectral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistanceKind::Grassmann => "grassmann",
            DistanceKind::Asimov => "asimov",
            DistanceKind::BinetCauchy => "binet_cauchy",
            DistanceKind::Chordal => "chordal",
            DistanceKind::FubiniStudy => "fubini_study",
            DistanceKind::Martin => "martin",
            DistanceKind::Procrustes => "procrustes",
            DistanceKind::Projection => "projection",
            DistanceKind::Spectral => "spectral",
        }
    }

    /// Whether the kind extends to a metric on flats of all dimensions.
    pub fn has_infinite_metric(self) -> bool {
        matches!(
            self,
            DistanceKind::Grassmann | DistanceKind::Chordal | DistanceKind::Procrustes
        )
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistanceKind {
    type Err = GraffError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        DistanceKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == norm)
            .ok_or_else(|| GraffError::InvalidParameter(format!("unknown distance kind '{s}'")))
    }
}

fn check_ambient(f: &AffineFlat, g: &AffineFlat) -> Result<()> {
    if f.ambient_dim() != g.ambient_dim() {
        return Err(dim_err(format!(
            "flats live in R^{} and R^{}; pad one of them first",
            f.ambient_dim(),
            g.ambient_dim()
        )));
    }
    Ok(())
}

/// Full SVD of `Y_Fᵀ Y_G` and the affine principal angles it determines.
///
/// Each angle is `atan2(sin θ, cos θ)` with the sines taken from the part of
/// the smaller frame orthogonal to the larger one, so small and nearly
/// right angles both keep full relative accuracy.
pub fn principal_decomposition(f: &AffineFlat, g: &AffineFlat) -> Result<PrincipalDecomposition> {
    check_ambient(f, g)?;
    let yf = stiefel_coords(f).into_inner();
    let yg = stiefel_coords(g).into_inner();
    let m = yf.transpose() * &yg;
    let svd = full_svd(&m);

    let mut sigmas = Vec::with_capacity(svd.singular_values.len());
    for &s in &svd.singular_values {
        if s > 1.0 + SIGMA_OVERSHOOT {
            return Err(GraffError::Internal(format!(
                "singular value {s} of a product of orthonormal frames exceeds 1"
            )));
        }
        sigmas.push(s.clamp(0.0, 1.0));
    }

    let (small, large) = if yf.ncols() <= yg.ncols() {
        (&yf, &yg)
    } else {
        (&yg, &yf)
    };
    let residual = small - large * (large.transpose() * small);
    let mut sines: Vec<f64> = singular_values(&residual)
        .iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    sines.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));

    let mut thetas: Vec<f64> = sigmas
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| s.atan2(c))
        .collect();
    thetas.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));

    let p_vecs = &yf * &svd.u;
    let q_vecs = &yg * &svd.v;
    Ok(PrincipalDecomposition {
        thetas,
        sigmas,
        sines,
        u: svd.u,
        v: svd.v,
        p_vecs,
        q_vecs,
    })
}

/// Evaluate a distance formula on a list of affine principal angles.
///
/// Martin distance is `+∞` once some cosine vanishes (to machine precision).
pub fn distance_from_angles(kind: DistanceKind, thetas: &[f64]) -> f64 {
    let largest = thetas.iter().cloned().fold(0.0_f64, f64::max);
    // Σ log cos²θ, written to stay accurate for tiny angles.
    let log_cos2_sum = || -> f64 { thetas.iter().map(|t| (-t.sin().powi(2)).ln_1p()).sum() };
    match kind {
        DistanceKind::Grassmann => thetas.iter().map(|t| t * t).sum::<f64>().sqrt(),
        DistanceKind::Asimov => largest,
        DistanceKind::BinetCauchy => (-log_cos2_sum().exp_m1()).max(0.0).sqrt(),
        DistanceKind::Chordal => thetas.iter().map(|t| t.sin().powi(2)).sum::<f64>().sqrt(),
        DistanceKind::FubiniStudy => {
            let sine = (-log_cos2_sum().exp_m1()).max(0.0).sqrt();
            let cosine = thetas.iter().map(|t| t.cos()).product::<f64>().max(0.0);
            sine.atan2(cosine)
        }
        DistanceKind::Martin => {
            if thetas.iter().any(|t| t.cos() <= f64::EPSILON) {
                f64::INFINITY
            } else {
                (-log_cos2_sum()).max(0.0).sqrt()
            }
        }
        DistanceKind::Procrustes => {
            2.0 * thetas
                .iter()
                .map(|t| (t / 2.0).sin().powi(2))
                .sum::<f64>()
                .sqrt()
        }
        DistanceKind::Projection => largest.sin(),
        DistanceKind::Spectral => 2.0 * (largest / 2.0).sin(),
    }
}

/// Distance between two k-flats in the same R^n.
pub fn distance(f: &AffineFlat, g: &AffineFlat, kind: DistanceKind) -> Result<f64> {
    if f.dim() != g.dim() {
        return Err(dim_err(format!(
            "distance needs flats of equal dimension (got {} and {}); use delta_distance",
            f.dim(),
            g.dim()
        )));
    }
    angle_distance(f, g, kind)
}

/// Distance from the lower-dimensional flat to the set of flats of its
/// dimension contained in the other one (equivalently, from the
/// higher-dimensional flat to the flats containing the lower one). Agrees
/// with [`distance`] bit for bit when the dimensions match.
pub fn delta_distance(f: &AffineFlat, g: &AffineFlat, kind: DistanceKind) -> Result<f64> {
    angle_distance(f, g, kind)
}

fn angle_distance(f: &AffineFlat, g: &AffineFlat, kind: DistanceKind) -> Result<f64> {
    let pd = principal_decomposition(f, g)?;
    Ok(distance_from_angles(kind, &pd.thetas))
}

/// Metric between flats of arbitrary dimensions in the same ambient space.
///
/// Each missing dimension counts as an extra principal angle of π/2, which
/// adds `|k − l| π²/4` (Grassmann), `|k − l|` (chordal) or `2|k − l|`
/// (Procrustes, at the same scale as [`DistanceKind::Procrustes`]) under
/// the square root.
pub fn infinite_metric(f: &AffineFlat, g: &AffineFlat, kind: DistanceKind) -> Result<f64> {
    let gap = f.dim().abs_diff(g.dim()) as f64;
    let per_missing = match kind {
        DistanceKind::Grassmann => std::f64::consts::FRAC_PI_2.powi(2),
        DistanceKind::Chordal => 1.0,
        DistanceKind::Procrustes => 2.0,
        other => return Err(GraffError::UnsupportedKind(other.name().to_string())),
    };
    let within = angle_distance(f, g, kind)?;
    if gap == 0.0 {
        return Ok(within);
    }
    Ok((gap * per_missing + within * within).sqrt())
}

/// Minimizing geodesic `γ(t) = span(Y U cos tΘ + Q sin tΘ)` between two k-flats.
#[derive(Debug, Clone)]
pub struct GeodesicCurve {
    start: DMatrix<f64>,
    u: DMatrix<f64>,
    thetas: Vec<f64>,
    q: DMatrix<f64>,
}

impl GeodesicCurve {
    /// Stiefel coordinates of `γ(0)`.
    pub fn start(&self) -> &DMatrix<f64> {
        &self.start
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// Diagonal of Θ.
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn ambient_dim(&self) -> usize {
        self.start.nrows() - 1
    }

    pub fn flat_dim(&self) -> usize {
        self.start.ncols() - 1
    }

    /// Orthonormal (n+1)×(k+1) frame of `γ(t)` in R^{n+1}.
    pub fn frame_at(&self, t: f64) -> DMatrix<f64> {
        let cos = DVector::from_iterator(
            self.thetas.len(),
            self.thetas.iter().map(|th| (t * th).cos()),
        );
        let sin = DVector::from_iterator(
            self.thetas.len(),
            self.thetas.iter().map(|th| (t * th).sin()),
        );
        let yu = &self.start * &self.u;
        let mut frame = yu;
        for (j, mut col) in frame.column_iter_mut().enumerate() {
            col *= cos[j];
            col.axpy(sin[j], &self.q.column(j), 1.0);
        }
        frame
    }

    /// `γ'(0) = Q Θ Uᵀ`, an (n+1)×(k+1) horizontal tangent at the start frame.
    pub fn velocity(&self) -> DMatrix<f64> {
        let mut q_theta = self.q.clone();
        for (j, mut col) in q_theta.column_iter_mut().enumerate() {
            col *= self.thetas[j];
        }
        q_theta * self.u.transpose()
    }

    /// `‖Θ‖_F`, the constant speed of the curve.
    pub fn speed(&self) -> f64 {
        self.thetas.iter().map(|t| t * t).sum::<f64>().sqrt()
    }

    /// The parameter in `[0, 1]` where the curve leaves the image of the
    /// embedding, if it does. There is at most one such point.
    pub fn exit_parameter(&self) -> Option<f64> {
        let n = self.ambient_dim();
        let a: Vec<f64> = (&self.start * &self.u).row(n).iter().copied().collect();
        let c: Vec<f64> = self.q.row(n).iter().copied().collect();
        let last_row_norm = |t: f64| -> f64 {
            self.thetas
                .iter()
                .enumerate()
                .map(|(i, th)| (a[i] * (t * th).cos() + c[i] * (t * th).sin()).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        if last_row_norm(0.0) < 1e-12 {
            return Some(0.0);
        }
        for (i, &th) in self.thetas.iter().enumerate() {
            if th <= 0.0 || (a[i].abs() < 1e-14 && c[i].abs() < 1e-14) {
                continue;
            }
            let x = (-a[i]).atan2(c[i]).rem_euclid(std::f64::consts::PI);
            if x <= th * (1.0 + 1e-12) {
                let t = (x / th).min(1.0);
                return (last_row_norm(t) < 1e-8).then_some(t);
            }
            return None;
        }
        None
    }
}

/// Geodesic from `f` to `g`; both must be k-flats in R^n with `Y_fᵀ Y_g`
/// invertible.
pub fn geodesic(f: &AffineFlat, g: &AffineFlat) -> Result<GeodesicCurve> {
    check_ambient(f, g)?;
    if f.dim() != g.dim() {
        return Err(dim_err(format!(
            "geodesics join flats of equal dimension (got {} and {})",
            f.dim(),
            g.dim()
        )));
    }
    let pd = principal_decomposition(f, g)?;
    let sigma_min = pd.sigmas.last().copied().unwrap_or(0.0);
    if sigma_min < GEODESIC_SINGULAR_TOL {
        return Err(GraffError::SingularPair { sigma_min });
    }
    let y = stiefel_coords(f).into_inner();
    let rows = y.nrows();
    let cols = y.ncols();

    // Q = (I − YYᵀ) Y' V diag(1/sin θ): column i is q_i − σ_i p_i normalized.
    let mut q = DMatrix::<f64>::zeros(rows, cols);
    let mut degenerate = Vec::new();
    for i in 0..cols {
        let mut w: DVector<f64> = pd.q_vecs.column(i) - pd.p_vecs.column(i) * pd.sigmas[i];
        if w.norm() <= 1e-12 {
            degenerate.push(i);
            continue;
        }
        // Re-orthogonalize against Y and the columns already accepted.
        for _ in 0..2 {
            w -= &y * (y.transpose() * &w);
            for j in 0..i {
                let qj = q.column(j);
                let proj = qj.dot(&w);
                w.axpy(-proj, &qj, 1.0);
            }
        }
        let norm = w.norm();
        if norm <= 1e-12 {
            degenerate.push(i);
            continue;
        }
        q.set_column(i, &(w / norm));
    }
    if !degenerate.is_empty() {
        // Zero angles: any orthonormal completion gives the same curve.
        let filled: Vec<usize> = (0..cols).filter(|i| !degenerate.contains(i)).collect();
        let mut known = DMatrix::zeros(rows, cols + filled.len());
        known.columns_mut(0, cols).copy_from(&y);
        for (slot, &i) in filled.iter().enumerate() {
            known.set_column(cols + slot, &q.column(i));
        }
        // Without room the column stays zero; it only ever meets sin 0.
        let extra_start = cols + filled.len();
        let room = rows.saturating_sub(extra_start);
        if room > 0 {
            let full = complete_orthonormal(&known);
            for (slot, &i) in degenerate.iter().take(room).enumerate() {
                q.set_column(i, &full.column(extra_start + slot));
            }
        }
    }
    Ok(GeodesicCurve {
        start: y,
        u: pd.u,
        thetas: pd.thetas,
        q,
    })
}

/// `γ(t)` as a flat. Parameters outside `[0, 1]` extrapolate along the same
/// great circle. Fails with `NotAFlat` at the (isolated) exit parameter.
pub fn evaluate_geodesic(curve: &GeodesicCurve, t: f64) -> Result<AffineFlat> {
    unembed(&curve.frame_at(t))
}
