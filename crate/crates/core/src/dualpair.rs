//! Finite-dimensional numerical probes of the dual-pair structure.
//!
//! A direction battery spans sampled orbit directions at a base point:
//! reparametrization lifts of low Fourier modes (the right action) and
//! cotangent lifts of a Hamiltonian family (the left action).  The lab
//! checks the Hamiltonian property of the moment maps by finite
//! differences, and probes mutual symplectic orthogonality by comparing
//! the ω-orthogonal of the sampled right-orbit span against the sampled
//! left-orbit span.  Exact orthogonality is an infinite-dimensional
//! statement and is not asserted; the lab records residual decay under
//! battery enrichment.

use crate::fields::HamiltonianSpec;
use crate::foliation::{codim_rank, FoliationError};
use crate::linalg;
use crate::moment::{moment_left, moment_right};
use crate::phase::{
    lift_ambient, lift_reparam, omega_eval, project_tangent, theta_eval, CotangentPoint, LeafKind,
    PhaseError, PhaseTangent,
};
use crate::rng::SplitMix64;
use crate::vec2;
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DualPairError {
    #[error("battery is rank deficient: {0} columns span rank {1}")]
    RankDeficientBattery(usize, usize),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Foliation(#[from] FoliationError),
}

/// Sampled generator directions at a base point.
#[derive(Debug, Clone)]
pub struct DirectionBattery {
    /// Per generator: one scalar field per component (Fourier modes,
    /// applied to one component at a time).
    pub reparam_fields: Vec<Vec<Vec<f64>>>,
    pub hamiltonians: Vec<HamiltonianSpec>,
}

impl DirectionBattery {
    /// Fourier modes {1, sin 2πjs, cos 2πjs : j ≤ modes} per component and
    /// a (grid × grid) Gaussian family over the padded bounding box with
    /// σ = diameter/4, plus two cutoff translations and one cutoff
    /// rotation.  Grids refine nestedly (3 ⊂ 5 ⊂ 9) so enriched batteries
    /// contain the coarser ones.
    pub fn standard(p: &CotangentPoint, modes: usize, grid: usize) -> Self {
        use std::f64::consts::TAU;
        let mut reparam_fields = Vec::new();
        let k = p.family().len();
        for comp in 0..k {
            let n = p.family().curves()[comp].n();
            let mut push_field = |f: &dyn Fn(f64) -> f64| {
                let field: Vec<Vec<f64>> = (0..k)
                    .map(|j| {
                        let nj = p.family().curves()[j].n();
                        if j == comp {
                            (0..nj).map(|i| f(i as f64 / nj as f64)).collect()
                        } else {
                            vec![0.0; nj]
                        }
                    })
                    .collect();
                reparam_fields.push(field);
            };
            let _ = n;
            push_field(&|_s| 1.0);
            for j in 1..=modes {
                push_field(&move |s: f64| (TAU * j as f64 * s).sin());
                push_field(&move |s: f64| (TAU * j as f64 * s).cos());
            }
        }

        let (lo, hi) = family_bbox(p);
        let diam = vec2::dist(lo, hi).max(1e-6);
        let sigma = diam / 4.0;
        let pad = 0.25 * diam;
        let mut hamiltonians = Vec::new();
        for ix in 0..grid {
            for iy in 0..grid {
                let fx = ix as f64 / (grid - 1) as f64;
                let fy = iy as f64 / (grid - 1) as f64;
                let c = [
                    lo[0] - pad + fx * (hi[0] - lo[0] + 2.0 * pad),
                    lo[1] - pad + fy * (hi[1] - lo[1] + 2.0 * pad),
                ];
                hamiltonians.push(HamiltonianSpec::gaussian(c, 1.0, sigma, 2.0 * diam));
            }
        }
        let center = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
        hamiltonians.push(HamiltonianSpec::translation(center, [1.0, 0.0], 2.0 * diam));
        hamiltonians.push(HamiltonianSpec::translation(center, [0.0, 1.0], 2.0 * diam));
        hamiltonians.push(HamiltonianSpec::rotation(center, 1.0, 2.0 * diam));
        Self {
            reparam_fields,
            hamiltonians,
        }
    }

    pub fn reparam_lifts(&self, p: &CotangentPoint) -> Result<Vec<PhaseTangent>, PhaseError> {
        self.reparam_fields
            .iter()
            .map(|y| lift_reparam(y, p))
            .collect()
    }

    pub fn ambient_lifts(
        &self,
        p: &CotangentPoint,
        kind: Option<LeafKind>,
    ) -> Result<Vec<PhaseTangent>, PhaseError> {
        self.hamiltonians
            .iter()
            .map(|h| {
                let xi = lift_ambient(&h.field(), p);
                match kind {
                    None => Ok(xi),
                    Some(k) => project_tangent(p.family(), k, &xi),
                }
            })
            .collect()
    }
}

fn family_bbox(p: &CotangentPoint) -> (vec2::Vec2, vec2::Vec2) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for c in p.family().curves() {
        let (clo, chi) = c.bbox();
        for d in 0..2 {
            lo[d] = lo[d].min(clo[d]);
            hi[d] = hi[d].max(chi[d]);
        }
    }
    (lo, hi)
}

fn columns_matrix(tangents: &[PhaseTangent]) -> DMatrix<f64> {
    if tangents.is_empty() {
        return DMatrix::zeros(0, 0);
    }
    let cols: Vec<Vec<f64>> = tangents.iter().map(|t| t.to_column()).collect();
    let rows = cols[0].len();
    DMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r])
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianCheck {
    /// max |θ(ζ) − ⟨J, gen⟩| over all generators.
    pub max_identity_residual: f64,
    /// max |FD d⟨J,gen⟩(ξ) − ω(ζ, ξ)| over generators and probes.
    pub max_fd_residual: f64,
    pub fd_step: f64,
}

/// Verify ⟨J, gen⟩ = θ(ζ_gen) and the Hamilton identity
/// d⟨J, gen⟩ = ω(ζ_gen, ·) by central finite differences.
pub fn hamiltonian_property_check(
    p: &CotangentPoint,
    battery: &DirectionBattery,
    fd_step: f64,
    probes: usize,
    seed: u64,
) -> Result<HamiltonianCheck, DualPairError> {
    let mut rng = SplitMix64::new(seed);
    let mut probe_tangents = Vec::with_capacity(probes);
    for _ in 0..probes {
        let mut xi = PhaseTangent::zero_like(p);
        for j in 0..p.family().len() {
            for i in 0..p.family().curves()[j].n() {
                xi.dphi[j][i] = [rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)];
                xi.dmom[j][i] = [rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)];
            }
        }
        probe_tangents.push(xi);
    }

    let mut max_identity = 0.0_f64;
    let mut max_fd = 0.0_f64;
    let mut check = |zeta: &PhaseTangent,
                     moment: &dyn Fn(&CotangentPoint) -> f64|
     -> Result<(), DualPairError> {
        let identity = (theta_eval(p, zeta)? - moment(p)).abs();
        max_identity = max_identity.max(identity);
        for xi in &probe_tangents {
            let plus = moment(&p.displaced(xi, fd_step)?);
            let minus = moment(&p.displaced(xi, -fd_step)?);
            let fd = (plus - minus) / (2.0 * fd_step);
            let om = omega_eval(p, zeta, xi)?;
            max_fd = max_fd.max((fd - om).abs());
        }
        Ok(())
    };

    for y in &battery.reparam_fields {
        let zeta = lift_reparam(y, p)?;
        let yc = y.clone();
        check(&zeta, &move |q: &CotangentPoint| {
            let rho = moment_right(q).expect("attached");
            rho.components()
                .iter()
                .zip(&yc)
                .zip(q.family().curves())
                .map(|((r, yj), c)| {
                    r.iter().zip(yj).map(|(ri, yi)| ri * yi).sum::<f64>() * c.delta_s()
                })
                .sum()
        })?;
    }
    for h in &battery.hamiltonians {
        let zeta = lift_ambient(&h.field(), p);
        check(&zeta, &move |q: &CotangentPoint| moment_left(q, &h.field()))?;
    }
    Ok(HamiltonianCheck {
        max_identity_residual: max_identity,
        max_fd_residual: max_fd,
        fd_step,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplementReport {
    /// Principal angles between the ω-orthogonal of W_R (within the
    /// sampled space) and W_L, ascending.
    pub principal_angles: Vec<f64>,
    pub max_angle: f64,
    /// Fraction of the ω-orthogonal not captured by W_L.
    pub coverage_residual: f64,
    /// Flux-constraint rank of the scene (the closed-form codimension).
    pub rank_deficit: usize,
    pub dim_wr: usize,
    pub dim_wl: usize,
    pub dim_orthogonal: usize,
}

/// Within the sampled space V = span(W_R ∪ W_L), compute
/// U = {v ∈ V : ω(v, W_R) = 0} and compare it against W_L.
pub fn complement_residual(
    p: &CotangentPoint,
    battery: &DirectionBattery,
    kind: LeafKind,
) -> Result<ComplementReport, DualPairError> {
    let wr = battery.reparam_lifts(p)?;
    let wl = battery.ambient_lifts(p, Some(kind))?;
    let u = omega_orthogonal_within(p, &wr, &[wr.clone(), wl.clone()].concat())?;
    let wl_mat = linalg::orthonormal_span(&columns_matrix(&wl));
    let wr_mat = linalg::orthonormal_span(&columns_matrix(&wr));
    let angles = linalg::principal_angles(&u, &wl_mat);
    let coverage = linalg::coverage_residual(&u, &wl_mat);
    let rank_deficit = codim_rank(p.family(), kind, 4 * p.family().len() + 4, 0x5eed_c0de)?;
    Ok(ComplementReport {
        max_angle: angles.iter().cloned().fold(0.0, f64::max),
        principal_angles: angles,
        coverage_residual: coverage,
        rank_deficit,
        dim_wr: wr_mat.ncols(),
        dim_wl: wl_mat.ncols(),
        dim_orthogonal: u.ncols(),
    })
}

/// Orthonormal basis of {v ∈ span(candidates) : ω(v, w) = 0 ∀ w ∈ wr}.
fn omega_orthogonal_within(
    p: &CotangentPoint,
    wr: &[PhaseTangent],
    candidates: &[PhaseTangent],
) -> Result<DMatrix<f64>, DualPairError> {
    let nv = candidates.len();
    let mut constraints = DMatrix::zeros(wr.len(), nv);
    for (j, w) in wr.iter().enumerate() {
        for (i, v) in candidates.iter().enumerate() {
            constraints[(j, i)] = omega_eval(p, v, w)?;
        }
    }
    let null = linalg::nullspace(&constraints);
    let vmat = columns_matrix(candidates);
    Ok(linalg::orthonormal_span(&(vmat * null)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnrichmentPoint {
    pub grid: usize,
    pub coverage_residual: f64,
    pub max_angle: f64,
}

/// Enrichment experiment: fix the ω-orthogonal U* computed from the finest
/// battery and record how much of it the growing left battery captures.
/// With nested grids the coverage residual is monotonically non-increasing.
pub fn enrichment_residuals(
    p: &CotangentPoint,
    kind: LeafKind,
    modes: usize,
    grids: &[usize],
) -> Result<Vec<EnrichmentPoint>, DualPairError> {
    assert!(!grids.is_empty());
    let finest = *grids.iter().max().unwrap();
    let batt_fine = DirectionBattery::standard(p, modes, finest);
    let wr = batt_fine.reparam_lifts(p)?;
    let wl_fine = batt_fine.ambient_lifts(p, Some(kind))?;
    let u_star = omega_orthogonal_within(p, &wr, &[wr.clone(), wl_fine].concat())?;
    let mut out = Vec::new();
    for &grid in grids {
        let batt = DirectionBattery::standard(p, modes, grid);
        let wl = batt.ambient_lifts(p, Some(kind))?;
        let wl_mat = linalg::orthonormal_span(&columns_matrix(&wl));
        let angles = linalg::principal_angles(&u_star, &wl_mat);
        out.push(EnrichmentPoint {
            grid,
            coverage_residual: linalg::coverage_residual(&u_star, &wl_mat),
            max_angle: angles.iter().cloned().fold(0.0, f64::max),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::DiscreteCurve;
    use crate::density::Augmentation;
    use crate::diff::DiffScheme;
    use std::f64::consts::TAU;

    fn base_point(n: usize) -> CotangentPoint {
        let curve = DiscreteCurve::circle([0.0, 0.0], 1.0, n).with_scheme(DiffScheme::Trig);
        // Tangential momentum with a mild modulation: nowhere zero pullback.
        let m: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let s = TAU * i as f64 / n as f64;
                let t = [-s.sin(), s.cos()];
                let scale = 1.0 + 0.2 * (2.0 * s).cos();
                [t[0] * scale + 0.1, t[1] * scale - 0.05]
            })
            .collect();
        CotangentPoint::single(curve, Augmentation::from_momentum(m)).unwrap()
    }

    #[test]
    fn identity_residual_is_tiny() {
        let p = base_point(64);
        let batt = DirectionBattery::standard(&p, 3, 3);
        let check = hamiltonian_property_check(&p, &batt, 1e-4, 2, 42).unwrap();
        assert!(
            check.max_identity_residual < 1e-12,
            "{}",
            check.max_identity_residual
        );
        assert!(check.max_fd_residual < 1e-6, "{}", check.max_fd_residual);
    }

    #[test]
    fn fd_residual_is_second_order() {
        let p = base_point(64);
        let batt = DirectionBattery::standard(&p, 2, 3);
        let r1 = hamiltonian_property_check(&p, &batt, 1e-3, 2, 7).unwrap();
        let r2 = hamiltonian_property_check(&p, &batt, 5e-4, 2, 7).unwrap();
        let ratio = r1.max_fd_residual / r2.max_fd_residual;
        assert!(
            (2.5..6.0).contains(&ratio),
            "expected ≈4× decrease, got {ratio} ({} → {})",
            r1.max_fd_residual,
            r2.max_fd_residual
        );
    }

    #[test]
    fn complement_report_shapes() {
        let p = base_point(64);
        let batt = DirectionBattery::standard(&p, 4, 3);
        let rep = complement_residual(&p, &batt, LeafKind::Isodrastic).unwrap();
        assert_eq!(rep.rank_deficit, 1);
        assert!(rep.dim_wr >= 8);
        assert!(rep.dim_wl >= 10);
        assert!(rep.dim_orthogonal >= rep.dim_wl.saturating_sub(1));
        // Mutual orthogonality holds on the sampled space up to
        // discretization: W_L lies inside the ω-orthogonal of W_R, so
        // every W_L direction is close to U.
        let wl_in_u = linalg::coverage_residual(
            &linalg::orthonormal_span(&columns_matrix(
                &batt.ambient_lifts(&p, Some(LeafKind::Isodrastic)).unwrap(),
            )),
            &omega_orthogonal_within(
                &p,
                &batt.reparam_lifts(&p).unwrap(),
                &[
                    batt.reparam_lifts(&p).unwrap(),
                    batt.ambient_lifts(&p, Some(LeafKind::Isodrastic)).unwrap(),
                ]
                .concat(),
            )
            .unwrap(),
        );
        assert!(wl_in_u < 1e-8, "{wl_in_u}");
    }

    #[test]
    fn enrichment_is_monotone() {
        let p = base_point(48);
        let pts = enrichment_residuals(&p, LeafKind::Isodrastic, 4, &[3, 5, 9]).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(
            pts[0].coverage_residual >= pts[1].coverage_residual - 1e-12,
            "{pts:?}"
        );
        assert!(
            pts[1].coverage_residual >= pts[2].coverage_residual - 1e-12,
            "{pts:?}"
        );
        // The finest level fully explains its own orthogonal complement up
        // to the reparametrization remainder.
        assert!(pts[2].coverage_residual < 0.35, "{pts:?}");
    }
}
