//! Small dense helpers on top of nalgebra that the rest of the crate shares.
//! Singular value decompositions go through faer.

use faer::Mat;
use nalgebra::{DMatrix, DVector, QR};

use crate::error::{GraffError, Result};

/// Numerical rank relative to the largest singular value.
pub(crate) fn numerical_rank(singular_values: &DVector<f64>, rel_tol: f64) -> usize {
    let max = singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    singular_values
        .iter()
        .filter(|&&s| s > rel_tol * max)
        .count()
}

/// Orthonormal basis (thin Q factor) for the column span of `m`, which must
/// have full column rank.
pub(crate) fn orthonormal_columns(m: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(DMatrix::zeros(rows, 0));
    }
    if cols > rows {
        return Err(GraffError::RankDeficient {
            expected: cols,
            found: rows,
        });
    }
    let sv = DVector::from_vec(singular_values(m));
    let rank = numerical_rank(&sv, rel_tol);
    if rank < cols {
        return Err(GraffError::RankDeficient {
            expected: cols,
            found: rank,
        });
    }
    Ok(QR::new(m.clone()).q())
}

/// Extend orthonormal columns `q` (m×r) to an orthonormal basis of R^m. The
/// first r columns of the result are exactly `q`.
pub(crate) fn complete_orthonormal(q: &DMatrix<f64>) -> DMatrix<f64> {
    let (m, r) = q.shape();
    if r >= m {
        return q.clone();
    }
    let mut stacked = DMatrix::zeros(m, r + m);
    stacked.columns_mut(0, r).copy_from(q);
    stacked.columns_mut(r, m).fill_with_identity();
    let full = QR::new(stacked).q();
    let mut out = DMatrix::zeros(m, m);
    out.columns_mut(0, r).copy_from(q);
    out.columns_mut(r, m - r).copy_from(&full.columns(r, m - r));
    out
}

/// SVD `m = U Σ Vᵀ` with singular values in nonincreasing order.
pub(crate) struct FullSvd {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
}

fn to_faer(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn svd_impl(m: &DMatrix<f64>, thin: bool) -> FullSvd {
    let (rows, cols) = m.shape();
    let r = rows.min(cols);
    if r == 0 {
        let (ur, vr) = if thin { (0, 0) } else { (rows, cols) };
        return FullSvd {
            u: DMatrix::identity(rows, ur),
            singular_values: Vec::new(),
            v: DMatrix::identity(cols, vr),
        };
    }
    let a = to_faer(m);
    let svd = if thin { a.thin_svd() } else { a.svd() }.expect("SVD of a finite matrix converges");
    let s = svd.S().column_vector();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&x, &y| s[y].partial_cmp(&s[x]).unwrap_or(std::cmp::Ordering::Equal));
    let mut u = from_faer(svd.U());
    let mut v = from_faer(svd.V());
    let u_src = u.clone();
    let v_src = v.clone();
    for (dst, &src) in order.iter().enumerate() {
        u.set_column(dst, &u_src.column(src));
        v.set_column(dst, &v_src.column(src));
    }
    FullSvd {
        u,
        singular_values: order.iter().map(|&i| s[i]).collect(),
        v,
    }
}

/// Full SVD with square orthogonal `U` and `V`.
pub(crate) fn full_svd(m: &DMatrix<f64>) -> FullSvd {
    svd_impl(m, false)
}

/// Thin SVD: `U` is m×r and `V` is n×r with r = min(m, n).
pub(crate) fn thin_svd(m: &DMatrix<f64>) -> FullSvd {
    svd_impl(m, true)
}

/// Singular values in nonincreasing order.
pub(crate) fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s = to_faer(m)
        .singular_values()
        .expect("SVD of a finite matrix converges");
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Flip column signs so the first entry that is not numerically zero is positive.
pub(crate) fn fix_column_signs(m: &mut DMatrix<f64>, zero_tol: f64) {
    for mut col in m.column_iter_mut() {
        if let Some(first) = col.iter().find(|x| x.abs() > zero_tol).copied() {
            if first < 0.0 {
                col.neg_mut();
            }
        }
    }
}
