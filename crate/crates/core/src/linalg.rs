//! Thin linear-algebra helpers over nalgebra: numerical rank, orthonormal
//! bases, nullspaces and principal angles between sampled subspaces.

use nalgebra::DMatrix;

/// Relative singular-value threshold for rank decisions.
pub const RANK_RTOL: f64 = 1e-8;

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Numerical rank: singular values above `RANK_RTOL`·σ_max count.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        None => 0,
        Some(&smax) => {
            if smax == 0.0 {
                0
            } else {
                sv.iter().filter(|&&s| s > RANK_RTOL * smax).count()
            }
        }
    }
}

/// Orthonormal basis of the column span (columns below the rank threshold
/// are dropped).
pub fn orthonormal_span(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return m.clone();
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd requested u");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..u.ncols().min(svd.singular_values.len()))
        .filter(|&c| smax > 0.0 && svd.singular_values[c] > RANK_RTOL * smax)
        .collect();
    let mut out = DMatrix::zeros(m.nrows(), keep.len());
    for (j, &c) in keep.iter().enumerate() {
        out.column_mut(j).copy_from(&u.column(c));
    }
    out
}

/// Orthonormal basis of the kernel of `m` (acting on column vectors).
pub fn nullspace(m: &DMatrix<f64>) -> DMatrix<f64> {
    let ncols = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(ncols, ncols);
    }
    // Pad with zero rows so the thin SVD carries a full V^T.
    let work = if m.nrows() < ncols {
        let mut padded = DMatrix::zeros(ncols, ncols);
        padded.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let vt = svd.v_t.expect("svd requested v_t");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let kernel_rows: Vec<usize> = (0..vt.nrows())
        .filter(|&r| smax == 0.0 || svd.singular_values[r] <= RANK_RTOL * smax)
        .collect();
    let mut out = DMatrix::zeros(ncols, kernel_rows.len());
    for (j, &row) in kernel_rows.iter().enumerate() {
        for i in 0..ncols {
            out[(i, j)] = vt[(row, i)];
        }
    }
    out
}

/// Principal angles (radians, ascending) between the column spans of `a` and
/// `b`; the Euclidean metric is used for the subspace geometry.  Returns
/// min(dim a, dim b) angles.
pub fn principal_angles(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    let qa = orthonormal_span(a);
    let qb = orthonormal_span(b);
    if qa.ncols() == 0 || qb.ncols() == 0 {
        return Vec::new();
    }
    let m = qa.transpose() * qb;
    let mut cosines = singular_values(&m);
    for c in cosines.iter_mut() {
        *c = c.clamp(-1.0, 1.0);
    }
    cosines.iter().map(|c| c.acos()).collect()
}

/// Fraction of the span of `a` not captured by the span of `b`:
/// (dim a − Σ cos²θ_i) / dim a ∈ [0, 1].  Monotonically non-increasing as
/// `b` grows.
pub fn coverage_residual(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let qa = orthonormal_span(a);
    let qb = orthonormal_span(b);
    let da = qa.ncols();
    if da == 0 {
        return 0.0;
    }
    if qb.ncols() == 0 {
        return 1.0;
    }
    let m = qa.transpose() * qb;
    let captured: f64 = singular_values(&m)
        .iter()
        .map(|s| (s.clamp(-1.0, 1.0)).powi(2))
        .sum();
    ((da as f64 - captured) / da as f64).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_rank_deficient_matrix() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0]);
        assert_eq!(numerical_rank(&m), 2);
    }

    #[test]
    fn nullspace_dimensions() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let k = nullspace(&m);
        assert_eq!(k.ncols(), 2);
        // Kernel vectors are orthogonal to (1,1,1).
        for j in 0..2 {
            let s: f64 = (0..3).map(|i| k[(i, j)]).sum();
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn principal_angles_orthogonal_planes() {
        let a = DMatrix::from_row_slice(3, 1, &[1.0, 0.0, 0.0]);
        let b = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 0.0]);
        let ang = principal_angles(&a, &b);
        assert_eq!(ang.len(), 1);
        assert!((ang[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn coverage_monotone_under_enrichment() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let b1 = DMatrix::from_row_slice(3, 1, &[1.0, 0.0, 0.0]);
        let b2 = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let r1 = coverage_residual(&a, &b1);
        let r2 = coverage_residual(&a, &b2);
        assert!(r1 > r2);
        assert!(r2 < 1e-12);
    }
}
