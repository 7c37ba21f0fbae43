//! Coordinate systems for affine flats.
//!
//! A k-flat `A + b` in R^n is stored in orthogonal affine coordinates
//! `[A, b0]`: `A` is an n×k matrix with orthonormal columns and `b0` is the
//! unique displacement orthogonal to them. From there we build
//!
//! * Stiefel coordinates `Y`, an (n+1)×(k+1) orthonormal frame of the
//!   (k+1)-plane `span(A ∪ {b + e_{n+1}})` of R^{n+1};
//! * projection coordinates `P = Y Yᵀ`, unique per flat;
//! * projection affine coordinates `[AAᵀ, b0]`.
//!
//! [`unembed`] inverts the embedding for any (k+1)-plane that is not
//! contained in the hyperplane `x_{n+1} = 0`.

use nalgebra::{DMatrix, DVector};

use crate::error::{dim_err, GraffError, Result};
use crate::linalg::orthonormal_columns;
use crate::tolerance::default_tolerance;

/// A k-flat in R^n, held in orthogonal affine coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFlat {
    basis: DMatrix<f64>,
    offset: DVector<f64>,
}

/// (n+1)×(k+1) Stiefel coordinates of a flat.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelMatrix(DMatrix<f64>);

/// (n+1)×(n+1) projection coordinates of a flat.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix(DMatrix<f64>);

/// Projection affine coordinates `[P, b]` with `P = AAᵀ` and `Pb = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionAffinePair {
    pub projection: DMatrix<f64>,
    pub offset: DVector<f64>,
}

impl AffineFlat {
    /// Canonicalize raw affine coordinates `(A_raw, b_raw)` into `[A, b0]`.
    pub fn new(basis_raw: DMatrix<f64>, offset_raw: DVector<f64>) -> Result<Self> {
        make_flat(&basis_raw, &offset_raw)
    }

    /// Accept coordinates that are already orthogonal affine coordinates,
    /// checking the invariants instead of recomputing them.
    pub fn from_orthogonal(basis: DMatrix<f64>, offset: DVector<f64>) -> Result<Self> {
        let (n, k) = basis.shape();
        check_shape(n, k, offset.len())?;
        let tol = default_tolerance().max(1e-12) * 100.0;
        let gram_err = (basis.transpose() * &basis - DMatrix::<f64>::identity(k, k)).norm();
        if gram_err > tol {
            return Err(GraffError::InvalidParameter(format!(
                "basis columns are not orthonormal (‖AᵀA − I‖ = {gram_err:e})"
            )));
        }
        let cross = (basis.transpose() * &offset).norm();
        if cross > tol * offset.norm().max(1.0) {
            return Err(GraffError::InvalidParameter(format!(
                "offset is not orthogonal to the basis (‖Aᵀb0‖ = {cross:e})"
            )));
        }
        Ok(AffineFlat { basis, offset })
    }

    /// The 0-flat `{point}`.
    pub fn point(point: DVector<f64>) -> Self {
        AffineFlat {
            basis: DMatrix::zeros(point.len(), 0),
            offset: point,
        }
    }

    /// Ambient dimension n.
    pub fn ambient_dim(&self) -> usize {
        self.offset.len()
    }

    /// Flat dimension k.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthonormal basis `A` of the linear part.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Displacement `b0`, orthogonal to `A`.
    pub fn offset(&self) -> &DVector<f64> {
        &self.offset
    }

    pub fn stiefel_coords(&self) -> StiefelMatrix {
        stiefel_coords(self)
    }

    pub fn projection_coords(&self) -> ProjectionMatrix {
        projection_coords(self)
    }

    pub fn projection_affine_coords(&self) -> ProjectionAffinePair {
        projection_affine_coords(self)
    }

    /// Image of the flat under the rigid motion `x ↦ Rx + v`; `R` must be
    /// orthogonal for the result to be congruent to `self`.
    pub fn transformed(&self, rotation: &DMatrix<f64>, translation: &DVector<f64>) -> Result<Self> {
        let n = self.ambient_dim();
        if rotation.shape() != (n, n) || translation.len() != n {
            return Err(dim_err(format!(
                "rigid motion must act on R^{n}, got {:?} and {}",
                rotation.shape(),
                translation.len()
            )));
        }
        make_flat(
            &(rotation * &self.basis),
            &(rotation * &self.offset + translation),
        )
    }

    /// Whether `x` lies on the flat, up to `tol` in Euclidean distance.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        x.len() == self.ambient_dim() && residual(self, x).norm() <= tol
    }
}

/// `(I − AAᵀ)(x − b0)`; assumes matching dimensions.
pub(crate) fn residual(flat: &AffineFlat, x: &DVector<f64>) -> DVector<f64> {
    let d = x - &flat.offset;
    let along = &flat.basis * (flat.basis.transpose() * &d);
    d - along
}

fn check_shape(n: usize, k: usize, offset_len: usize) -> Result<()> {
    if n == 0 {
        return Err(dim_err("ambient dimension must be positive"));
    }
    if offset_len != n {
        return Err(dim_err(format!(
            "basis has {n} rows but displacement has length {offset_len}"
        )));
    }
    if k >= n {
        return Err(dim_err(format!(
            "flat dimension k = {k} must be smaller than n = {n}"
        )));
    }
    Ok(())
}

impl StiefelMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// `Y Yᵀ`.
    pub fn projection(&self) -> DMatrix<f64> {
        &self.0 * self.0.transpose()
    }
}

impl ProjectionMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

/// Canonicalize raw affine coordinates: orthonormalize `A_raw` and project
/// `b_raw` onto the orthogonal complement of its span.
pub fn make_flat(basis_raw: &DMatrix<f64>, offset_raw: &DVector<f64>) -> Result<AffineFlat> {
    let (n, k) = basis_raw.shape();
    check_shape(n, k, offset_raw.len())?;
    let basis = orthonormal_columns(basis_raw, default_tolerance())?;
    let mut offset = offset_raw.clone();
    // Two passes keep Aᵀb0 at rounding level even for large in-span components.
    for _ in 0..2 {
        let along = &basis * (basis.transpose() * &offset);
        offset -= along;
    }
    Ok(AffineFlat { basis, offset })
}

/// Stiefel coordinates `[[A, b0/√(1+‖b0‖²)], [0, 1/√(1+‖b0‖²)]]`.
pub fn stiefel_coords(flat: &AffineFlat) -> StiefelMatrix {
    let n = flat.ambient_dim();
    let k = flat.dim();
    let scale = (1.0 + flat.offset.norm_squared()).recip().sqrt();
    let mut y = DMatrix::zeros(n + 1, k + 1);
    y.view_mut((0, 0), (n, k)).copy_from(&flat.basis);
    y.view_mut((0, k), (n, 1))
        .copy_from(&(&flat.offset * scale));
    y[(n, k)] = scale;
    StiefelMatrix(y)
}

/// Projection coordinates, evaluated blockwise from `[A, b0]`.
pub fn projection_coords(flat: &AffineFlat) -> ProjectionMatrix {
    let n = flat.ambient_dim();
    let b = &flat.offset;
    let denom = 1.0 + b.norm_squared();
    let mut p = DMatrix::zeros(n + 1, n + 1);
    let top_left = &flat.basis * flat.basis.transpose() + (b * b.transpose()) / denom;
    p.view_mut((0, 0), (n, n)).copy_from(&top_left);
    let edge = b / denom;
    p.view_mut((0, n), (n, 1)).copy_from(&edge);
    p.view_mut((n, 0), (1, n)).copy_from(&edge.transpose());
    p[(n, n)] = 1.0 / denom;
    ProjectionMatrix(p)
}

/// `[AAᵀ, b0]`.
pub fn projection_affine_coords(flat: &AffineFlat) -> ProjectionAffinePair {
    ProjectionAffinePair {
        projection: &flat.basis * flat.basis.transpose(),
        offset: flat.offset.clone(),
    }
}

/// Orthonormal frame of the (k+1)-plane the flat is sent to in R^{n+1}.
/// Identical to [`stiefel_coords`].
pub fn embed(flat: &AffineFlat) -> DMatrix<f64> {
    stiefel_coords(flat).into_inner()
}

/// Recover the flat whose embedding spans the columns of `frame`.
///
/// Fails with `NotAFlat` when the plane lies inside `x_{n+1} = 0`, which
/// happens exactly for the points of `Gr(k+1, n)` that the embedding misses.
pub fn unembed(frame: &DMatrix<f64>) -> Result<AffineFlat> {
    unembed_with_tolerance(frame, default_tolerance())
}

pub fn unembed_with_tolerance(frame: &DMatrix<f64>, tol: f64) -> Result<AffineFlat> {
    let (rows, cols) = frame.shape();
    if rows < 2 || cols == 0 || cols > rows - 1 {
        return Err(dim_err(format!(
            "expected an (n+1)×(k+1) frame with k < n, got {rows}×{cols}"
        )));
    }
    let n = rows - 1;
    let k = cols - 1;
    let mut q = orthonormal_columns(frame, tol)?;
    let last: DVector<f64> = q.row(n).transpose();
    let r = last.norm();
    if r < tol {
        return Err(GraffError::NotAFlat { last_row_norm: r });
    }
    // Householder reflection H with Hℓ = ∓r e_{k+1}; then QH has last row
    // ±r e_{k+1}ᵀ. The sign is fixed afterwards.
    let sign = if last[k] >= 0.0 { 1.0 } else { -1.0 };
    let mut u = last.clone();
    u[k] += sign * r;
    let u_norm2 = u.norm_squared();
    if u_norm2 > 0.0 {
        let qu = &q * &u;
        q -= (qu * u.transpose()) * (2.0 / u_norm2);
    }
    if q[(n, k)] < 0.0 {
        q.column_mut(k).neg_mut();
    }
    let basis = q.view((0, 0), (n, k)).into_owned();
    let height = q[(n, k)];
    let mut offset: DVector<f64> = q.view((0, k), (n, 1)).column(0) / height;
    let along = &basis * (basis.transpose() * &offset);
    offset -= along;
    Ok(AffineFlat { basis, offset })
}

/// Compare two flats through their (unique) projection coordinates.
pub fn equal_flats(f: &AffineFlat, g: &AffineFlat, tol: f64) -> Result<bool> {
    if f.ambient_dim() != g.ambient_dim() {
        return Err(dim_err(format!(
            "ambient dimensions differ: {} vs {}",
            f.ambient_dim(),
            g.ambient_dim()
        )));
    }
    if f.dim() != g.dim() {
        return Ok(false);
    }
    let diff = projection_coords(f).0 - projection_coords(g).0;
    Ok(diff.norm() <= tol)
}

/// Zero-pad the flat into R^m, m ≥ n, along the natural inclusion.
pub fn pad_ambient(flat: &AffineFlat, m: usize) -> Result<AffineFlat> {
    let n = flat.ambient_dim();
    if m < n {
        return Err(dim_err(format!("cannot pad a flat in R^{n} into R^{m}")));
    }
    let k = flat.dim();
    let mut basis = DMatrix::zeros(m, k);
    basis.view_mut((0, 0), (n, k)).copy_from(&flat.basis);
    let mut offset = DVector::zeros(m);
    offset.rows_mut(0, n).copy_from(&flat.offset);
    Ok(AffineFlat { basis, offset })
}
