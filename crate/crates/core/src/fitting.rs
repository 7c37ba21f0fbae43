//! Estimators whose answer is an affine flat.

use nalgebra::{DMatrix, DVector};

use crate::coords::{make_flat, residual, AffineFlat};
use crate::error::{dim_err, GraffError, Result};
use crate::linalg::{complete_orthonormal, fix_column_signs, numerical_rank, thin_svd};
use crate::tolerance::default_tolerance;

/// Points in R^d, one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: DMatrix<f64>,
}

impl PointCloud {
    pub fn new(points: DMatrix<f64>) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(dim_err(
                "point cloud needs at least one point of positive dimension",
            ));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(GraffError::InvalidParameter(
                "point cloud has non-finite entries".into(),
            ));
        }
        Ok(PointCloud { points })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(dim_err("rows of the point cloud have different lengths"));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        PointCloud::new(DMatrix::from_row_slice(rows.len(), d, &flat))
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn point(&self, i: usize) -> DVector<f64> {
        self.points.row(i).transpose()
    }
}

/// Points with labels in {−1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCloud {
    cloud: PointCloud,
    labels: Vec<f64>,
}

impl LabeledCloud {
    pub fn new(cloud: PointCloud, labels: Vec<i8>) -> Result<Self> {
        if labels.len() != cloud.len() {
            return Err(dim_err(format!(
                "{} points but {} labels",
                cloud.len(),
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&y| y != 1 && y != -1) {
            return Err(GraffError::InvalidParameter(format!(
                "labels must be ±1, found {bad}"
            )));
        }
        if !labels.contains(&1) || !labels.contains(&-1) {
            return Err(GraffError::InvalidParameter(
                "both classes must be present".into(),
            ));
        }
        Ok(LabeledCloud {
            cloud,
            labels: labels.into_iter().map(f64::from).collect(),
        })
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }
}

/// Euclidean distance from `x` to the flat.
pub fn point_to_flat_distance(x: &DVector<f64>, flat: &AffineFlat) -> Result<f64> {
    if x.len() != flat.ambient_dim() {
        return Err(dim_err(format!(
            "point in R^{} but flat in R^{}",
            x.len(),
            flat.ambient_dim()
        )));
    }
    Ok(residual(flat, x).norm())
}

/// Sum of squared point-to-flat distances.
pub fn squared_loss(cloud: &PointCloud, flat: &AffineFlat) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..cloud.len() {
        total += point_to_flat_distance(&cloud.point(i), flat)?.powi(2);
    }
    Ok(total)
}

/// A least-squares flat with the spectrum that produced it.
#[derive(Debug, Clone)]
pub struct FlatFit {
    pub flat: AffineFlat,
    /// Singular values of the centered data, nonincreasing.
    pub singular_values: Vec<f64>,
    /// The k-th and (k+1)-th singular values coincide to tolerance, so the
    /// minimizer is not unique; the lower-index direction was kept.
    pub degenerate_spectrum: bool,
}

/// The k-flat minimizing the sum of squared distances to the cloud.
pub fn fit_flat(cloud: &PointCloud, k: usize) -> Result<AffineFlat> {
    Ok(fit_flat_with_spectrum(cloud, k)?.flat)
}

pub fn fit_flat_with_spectrum(cloud: &PointCloud, k: usize) -> Result<FlatFit> {
    let d = cloud.dim();
    if k >= d {
        return Err(dim_err(format!("cannot fit a {k}-flat in R^{d}")));
    }
    if cloud.len() < k + 1 {
        return Err(dim_err(format!(
            "a {k}-flat needs at least {} points, got {}",
            k + 1,
            cloud.len()
        )));
    }
    let mean: DVector<f64> = cloud.points.row_mean().transpose();
    let mut centered = cloud.points.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let svd = thin_svd(&centered);
    let sigmas = svd.singular_values;
    let mut basis = DMatrix::zeros(d, k);
    for j in 0..k.min(svd.v.ncols()) {
        basis.set_column(j, &svd.v.column(j));
    }
    fix_column_signs(&mut basis, 1e-12);

    let scale = sigmas
        .first()
        .copied()
        .unwrap_or(0.0)
        .max(f64::MIN_POSITIVE);
    let degenerate_spectrum = k > 0
        && k < sigmas.len()
        && (sigmas[k - 1] - sigmas[k]).abs() <= default_tolerance() * scale
        && sigmas[k - 1] > default_tolerance() * scale;

    let flat = make_flat(&basis, &mean)?;
    Ok(FlatFit {
        flat,
        singular_values: sigmas,
        degenerate_spectrum,
    })
}

/// Total least squares line; the same minimizer as `fit_flat(cloud, 1)`.
pub fn eiv_line(cloud: &PointCloud) -> Result<AffineFlat> {
    fit_flat(cloud, 1)
}

/// Ordinary least squares as a p-flat in the graph space R^{p+1}.
#[derive(Debug, Clone)]
pub struct Regression {
    /// `span([I_p; βᵀ]) + β_{p+1} e_{p+1}`.
    pub flat: AffineFlat,
    pub coefficients: DVector<f64>,
    pub intercept: f64,
}

impl Regression {
    pub fn predict(&self, x: &DVector<f64>) -> f64 {
        self.coefficients.dot(x) + self.intercept
    }
}

/// Least squares fit of `y ≈ Xβ + β_{p+1}`.
pub fn linear_regression(design: &DMatrix<f64>, response: &DVector<f64>) -> Result<Regression> {
    let (rows, p) = design.shape();
    if rows != response.len() {
        return Err(dim_err(format!(
            "design has {rows} rows but response has {}",
            response.len()
        )));
    }
    if p == 0 {
        return Err(dim_err("design needs at least one column"));
    }
    let mut augmented = DMatrix::from_element(rows, p + 1, 1.0);
    augmented.columns_mut(0, p).copy_from(design);
    if rows < p + 1 {
        return Err(GraffError::RankDeficient {
            expected: p + 1,
            found: rows,
        });
    }
    let svd = thin_svd(&augmented);
    let rank = numerical_rank(
        &DVector::from_column_slice(&svd.singular_values),
        default_tolerance(),
    );
    if rank < p + 1 {
        return Err(GraffError::RankDeficient {
            expected: p + 1,
            found: rank,
        });
    }
    let mut projected = svd.u.transpose() * response;
    for (x, s) in projected.iter_mut().zip(&svd.singular_values) {
        *x /= s;
    }
    let beta = &svd.v * projected;
    let coefficients = beta.rows(0, p).into_owned();
    let intercept = beta[p];

    let mut graph = DMatrix::zeros(p + 1, p);
    graph.view_mut((0, 0), (p, p)).fill_with_identity();
    graph.row_mut(p).copy_from(&coefficients.transpose());
    let mut offset = DVector::zeros(p + 1);
    offset[p] = intercept;
    let flat = make_flat(&graph, &offset)?;
    Ok(Regression {
        flat,
        coefficients,
        intercept,
    })
}

/// Hard-margin separating hyperplane `{x : wᵀx = β}`.
#[derive(Debug, Clone)]
pub struct SvmFit {
    /// `ker(wᵀ) + β w / ‖w‖²`, a (d−1)-flat.
    pub flat: AffineFlat,
    pub w: DVector<f64>,
    pub beta: f64,
    /// Dual variables, one per point; nonzero exactly on support vectors.
    pub alphas: Vec<f64>,
    pub iterations: usize,
}

/// KKT tolerance of the dual solver.
pub const SVM_KKT_TOL: f64 = 1e-8;
/// Iteration cap of the dual solver.
pub const SVM_MAX_ITER: usize = 100_000;
const SVM_DUAL_BLOWUP: f64 = 1e14;
const SVM_POLISH_EVERY: usize = 200;

/// Largest KKT violation `max_up(−y∇) − min_low(−y∇)` of a dual point.
fn svm_violation(y: &[f64], alpha: &[f64], grad: &[f64]) -> f64 {
    let mut m_up = f64::NEG_INFINITY;
    let mut m_low = f64::INFINITY;
    for t in 0..y.len() {
        let score = -y[t] * grad[t];
        if y[t] > 0.0 || alpha[t] > 0.0 {
            m_up = m_up.max(score);
        }
        if y[t] < 0.0 || alpha[t] > 0.0 {
            m_low = m_low.min(score);
        }
    }
    m_up - m_low
}

/// Solve `Q_SS α_S + λ y_S = 1`, `y_Sᵀα_S = 0` on the support set and on each
/// support set with one point dropped; keep the first KKT point found.
fn svm_polish(gram: &DMatrix<f64>, y: &[f64], alpha: &[f64]) -> Option<Vec<f64>> {
    let count = y.len();
    let alpha_max = alpha.iter().cloned().fold(0.0, f64::max);
    let support: Vec<usize> = (0..count)
        .filter(|&t| alpha[t] > 1e-12 * alpha_max)
        .collect();
    let candidates = std::iter::once(support.clone()).chain((0..support.len()).map(|drop| {
        support
            .iter()
            .enumerate()
            .filter(|&(p, _)| p != drop)
            .map(|(_, &t)| t)
            .collect()
    }));
    for set in candidates {
        let set: Vec<usize> = set;
        if !set.iter().any(|&t| y[t] > 0.0) || !set.iter().any(|&t| y[t] < 0.0) {
            continue;
        }
        let m = set.len();
        let mut system = DMatrix::zeros(m + 1, m + 1);
        for (p, &a) in set.iter().enumerate() {
            for (q, &b) in set.iter().enumerate() {
                system[(p, q)] = y[a] * y[b] * gram[(a, b)];
            }
            system[(p, m)] = y[a];
            system[(m, p)] = y[a];
        }
        let mut rhs = DVector::from_element(m + 1, 1.0);
        rhs[m] = 0.0;
        let svd = thin_svd(&system);
        let top = svd.singular_values.first().copied().unwrap_or(0.0);
        let mut projected = svd.u.transpose() * &rhs;
        for (c, s) in projected.iter_mut().zip(&svd.singular_values) {
            *c = if *s > 1e-12 * top { *c / s } else { 0.0 };
        }
        let solution = &svd.v * projected;
        if (&system * &solution - &rhs).amax() > 1e-9 {
            continue;
        }
        let scale = solution.rows(0, m).amax();
        if solution.rows(0, m).iter().any(|&a| a < -1e-12 * scale) {
            continue;
        }
        let mut candidate = vec![0.0; count];
        for (p, &t) in set.iter().enumerate() {
            candidate[t] = solution[p].max(0.0);
        }
        let grad: Vec<f64> = (0..count)
            .map(|t| {
                set.iter()
                    .map(|&s| y[t] * y[s] * gram[(t, s)] * candidate[s])
                    .sum::<f64>()
                    - 1.0
            })
            .collect();
        if svm_violation(y, &candidate, &grad) <= SVM_KKT_TOL {
            return Some(candidate);
        }
    }
    None
}

/// Minimize `‖w‖` subject to `y_i (wᵀx_i − β) ≥ 1` by SMO on the dual
/// `max Σα − ½ Σ α_i α_j y_i y_j x_iᵀx_j`, `α ≥ 0`, `Σ α_i y_i = 0`.
///
/// Each iteration updates a pair chosen by second-order working-set
/// selection; there is no upper bound on α in the hard-margin problem. Every
/// `SVM_POLISH_EVERY` iterations the equality-constrained problem on the
/// current support set is solved directly, which finishes off the slow tail
/// when a point sits just outside the margin.
pub fn svm_hyperplane(data: &LabeledCloud) -> Result<SvmFit> {
    let x = data.cloud.points();
    let y = &data.labels;
    let count = x.nrows();
    let d = x.ncols();
    let gram = x * x.transpose();

    let mut alpha = vec![0.0_f64; count];
    // Gradient of ½αᵀQα − Σα with Q_ij = y_i y_j K_ij.
    let mut grad = vec![-1.0_f64; count];
    let mut iterations = 0;
    loop {
        let mut up = None;
        let mut m_up = f64::NEG_INFINITY;
        let mut m_low = f64::INFINITY;
        for t in 0..count {
            let score = -y[t] * grad[t];
            if (y[t] > 0.0 || alpha[t] > 0.0) && score > m_up {
                m_up = score;
                up = Some(t);
            }
            if (y[t] < 0.0 || alpha[t] > 0.0) && score < m_low {
                m_low = score;
            }
        }
        let Some(i) = up else {
            return Err(GraffError::Internal("empty working set".into()));
        };
        if m_up - m_low <= SVM_KKT_TOL {
            break;
        }
        if iterations > 0 && (iterations % SVM_POLISH_EVERY == 0 || iterations >= SVM_MAX_ITER) {
            if let Some(polished) = svm_polish(&gram, y, &alpha) {
                alpha = polished;
                break;
            }
        }
        if iterations >= SVM_MAX_ITER {
            return Err(GraffError::NotSeparable(format!(
                "no KKT point within {SVM_MAX_ITER} iterations (violation {:e})",
                m_up - m_low
            )));
        }
        iterations += 1;

        // Second-order choice of j: largest decrease of the dual objective.
        let floor = 1e-14 * gram[(i, i)].max(1.0);
        let mut low = None;
        let mut best_gain = 0.0;
        let mut coincident = None;
        for t in 0..count {
            let score = -y[t] * grad[t];
            if !(y[t] < 0.0 || alpha[t] > 0.0) || score >= m_up {
                continue;
            }
            let curvature = gram[(i, i)] + gram[(t, t)] - 2.0 * gram[(i, t)];
            if curvature <= floor {
                coincident = Some(t);
                continue;
            }
            let gain = (m_up - score).powi(2) / curvature;
            if gain > best_gain {
                best_gain = gain;
                low = Some(t);
            }
        }
        let Some(j) = low else {
            let t = coincident.unwrap_or(i);
            return Err(GraffError::NotSeparable(format!(
                "points {i} and {t} coincide but carry opposite labels"
            )));
        };
        let curvature = gram[(i, i)] + gram[(j, j)] - 2.0 * gram[(i, j)];
        let gap = -y[i] * grad[i] + y[j] * grad[j];
        // Move α_i by y_i·step and α_j by −y_j·step, keeping Σαy fixed.
        let mut step = gap / curvature;
        if y[i] < 0.0 {
            step = step.min(alpha[i]);
        }
        if y[j] > 0.0 {
            step = step.min(alpha[j]);
        }
        alpha[i] += y[i] * step;
        alpha[j] -= y[j] * step;
        for t in 0..count {
            grad[t] += y[t] * step * (gram[(t, i)] - gram[(t, j)]);
        }
        let dual: f64 = alpha.iter().sum::<f64>()
            - 0.5
                * alpha
                    .iter()
                    .zip(&grad)
                    .map(|(a, g)| a * (g + 1.0))
                    .sum::<f64>();
        if !dual.is_finite() || dual > SVM_DUAL_BLOWUP {
            return Err(GraffError::NotSeparable("dual objective diverges".into()));
        }
    }

    let mut w = DVector::zeros(d);
    for t in 0..count {
        if alpha[t] > 0.0 {
            w.axpy(alpha[t] * y[t], &x.row(t).transpose(), 1.0);
        }
    }
    let w_norm = w.norm();
    if w_norm == 0.0 || !w_norm.is_finite() {
        return Err(GraffError::NotSeparable("degenerate normal vector".into()));
    }
    // β from the support vectors: wᵀx_s − y_s, averaged.
    let alpha_max = alpha.iter().cloned().fold(0.0, f64::max);
    let mut beta_sum = 0.0;
    let mut beta_count = 0usize;
    for t in 0..count {
        if alpha[t] > 1e-10 * alpha_max {
            beta_sum += w.dot(&x.row(t).transpose()) - y[t];
            beta_count += 1;
        }
    }
    let beta = beta_sum / beta_count as f64;

    let worst = (0..count)
        .map(|t| y[t] * (w.dot(&x.row(t).transpose()) - beta))
        .fold(f64::INFINITY, f64::min);
    if worst < 1.0 - 1e-6 {
        return Err(GraffError::NotSeparable(format!(
            "margin constraint violated: min y(wᵀx − β) = {worst}"
        )));
    }

    let unit = &w / w_norm;
    let frame = complete_orthonormal(&DMatrix::from_column_slice(d, 1, unit.as_slice()));
    let mut kernel = frame.columns(1, d - 1).into_owned();
    fix_column_signs(&mut kernel, 1e-12);
    let offset = &w * (beta / (w_norm * w_norm));
    let flat = make_flat(&kernel, &offset)?;
    Ok(SvmFit {
        flat,
        w,
        beta,
        alphas: alpha,
        iterations,
    })
}
