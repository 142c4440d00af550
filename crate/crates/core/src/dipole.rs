//! Vortex dipole loops: a closed plane curve C carrying an ambient vector
//! field u nowhere tangent to C, paired with Hamiltonians through the
//! induced density |ι_C* i_u μ|.
//!
//! The cached scalar is r(s) = (i_u μ)(φ′) = u_x y′ − u_y x′; the class [u]
//! is taken modulo constants times t_C, the tangent field normalized by
//! μ(u, t_C) = 1, i.e. t_C = φ′/r.
//!
//! Under a Hamiltonian flow the curve advects and u transports by the
//! tangent map (u̇ = DX_h(φ)·u): because X_h is divergence free this is
//! exactly the push-forward action on i_u μ, so no density correction term
//! appears.

use crate::curve::{Ambient, CurveError, DiscreteCurve};
use crate::density::Augmentation;
use crate::diff::integrate_periodic;
use crate::fields::HamiltonianSpec;
use crate::flow::rk4_step_point_vec;
use crate::moment::moment_dipole;
use crate::vec2::{self, Vec2};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DipoleError {
    #[error("tangency violation: |r| too small at node {0}")]
    TangencyViolation(usize),
    #[error("not in the open set: pullback of γ vanishes at node {0}")]
    NotInOpenSet(usize),
    #[error("tangency developing at t = {t}: min|r| fell below threshold")]
    TangencyDeveloped { t: f64 },
    #[error("side classification corrupt: sign of ⟨u, normal⟩ changes along the curve")]
    MixedSides,
    #[error("dipole loops require plane curves")]
    PlaneOnly,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Inward,
    Outward,
}

/// (C, u) with u nowhere tangent to C.
#[derive(Debug, Clone)]
pub struct DipoleLoop {
    curve: DiscreteCurve,
    u: Vec<Vec2>,
    /// r(s) = (i_u μ)(φ′), cached at construction.
    r: Vec<f64>,
}

impl DipoleLoop {
    pub fn new(curve: DiscreteCurve, u: Vec<Vec2>) -> Result<Self, DipoleError> {
        if !curve.ambient().is_plane() {
            return Err(DipoleError::PlaneOnly);
        }
        assert_eq!(u.len(), curve.n(), "u field must match the node count");
        let tangents = curve.tangents();
        let mut r = Vec::with_capacity(curve.n());
        for (i, (ui, ti)) in u.iter().zip(&tangents).enumerate() {
            let ri = vec2::cross(*ui, *ti);
            if ri.abs() < 1e-10 * vec2::norm(*ui) * vec2::norm(*ti) {
                return Err(DipoleError::TangencyViolation(i));
            }
            r.push(ri);
        }
        Ok(Self { curve, u, r })
    }

    pub fn curve(&self) -> &DiscreteCurve {
        &self.curve
    }

    pub fn u(&self) -> &[Vec2] {
        &self.u
    }

    /// The density scalar r(s) = u_x y′ − u_y x′.
    pub fn density_scalar(&self) -> &[f64] {
        &self.r
    }

    pub fn enclosed_area(&self) -> f64 {
        self.curve.enclosed_area().expect("plane curve").abs()
    }

    /// Length of the 1-form density ι_C*γ = |ν_C|⊗ν_C with ν_C = ι*i_uμ:
    /// its scalar is r|r|, so the length is ∫ |r| ds.
    pub fn induced_length(&self) -> f64 {
        let abs_r: Vec<f64> = self.r.iter().map(|r| r.abs()).collect();
        integrate_periodic(&abs_r)
    }

    /// γ = |ν_C| ⊗ i_u μ as an augmentation (weight |r|, covector rot90(u)).
    pub fn gamma(&self) -> Augmentation {
        let weights: Vec<f64> = self.r.iter().map(|r| r.abs()).collect();
        let covectors: Vec<Vec2> = self.u.iter().map(|u| vec2::rot90(*u)).collect();
        Augmentation::new(weights, covectors)
    }

    /// The normalized tangent field t_C with μ(u, t_C) = 1.
    pub fn t_field(&self) -> Vec<Vec2> {
        self.curve
            .tangents()
            .iter()
            .zip(&self.r)
            .map(|(t, r)| vec2::scale(*t, 1.0 / r))
            .collect()
    }

    /// Representative shift u ↦ u + c·t_C (same class).
    pub fn shifted(&self, c: f64) -> Result<Self, DipoleError> {
        let t = self.t_field();
        let u = self
            .u
            .iter()
            .zip(&t)
            .map(|(ui, ti)| vec2::add(*ui, vec2::scale(*ti, c)))
            .collect();
        Self::new(self.curve.clone(), u)
    }
}

/// Extract the dipole vector field from an augmentation:
/// ι*γ = |ν_C|⊗ν_C fixes the metric and orientation (ν_C = v ds with
/// v = sign(q)√|q|, q the pullback scalar) and γ = |ν_C| ⊗ i_u μ then
/// determines u uniquely.
pub fn u_from_gamma(
    curve: &DiscreteCurve,
    gamma: &Augmentation,
) -> Result<DipoleLoop, DipoleError> {
    if !curve.ambient().is_plane() {
        return Err(DipoleError::PlaneOnly);
    }
    assert_eq!(gamma.n(), curve.n(), "γ must be attached to the curve");
    let tangents = curve.tangents();
    let m = gamma.momentum();
    let mut u = Vec::with_capacity(curve.n());
    for (i, (mi, ti)) in m.iter().zip(&tangents).enumerate() {
        let q = vec2::dot(*mi, *ti);
        if q.abs() < 1e-12 * vec2::norm(*mi) * vec2::norm(*ti) {
            return Err(DipoleError::NotInOpenSet(i));
        }
        let speed = q.abs().sqrt(); // |v| with q = v|v|
        u.push([mi[1] / speed, -mi[0] / speed]);
    }
    DipoleLoop::new(curve.clone(), u)
}

/// Whether u points inward or outward (constant along the curve for a valid
/// dipole loop).
pub fn side_classify(d: &DipoleLoop) -> Result<Side, DipoleError> {
    let orientation = if d.curve.enclosed_area().expect("plane curve") > 0.0 {
        1.0
    } else {
        -1.0
    };
    let mut side: Option<Side> = None;
    for r in d.density_scalar() {
        let s = if r * orientation > 0.0 {
            Side::Outward
        } else {
            Side::Inward
        };
        match side {
            None => side = Some(s),
            Some(prev) if prev != s => return Err(DipoleError::MixedSides),
            _ => {}
        }
    }
    Ok(side.expect("curves have at least 8 nodes"))
}

/// One sampled state with its conserved quantities.
#[derive(Debug, Clone)]
pub struct TrajectorySample {
    pub t: f64,
    pub curve: DiscreteCurve,
    pub u: Vec<Vec2>,
    pub area: f64,
    pub length: f64,
    pub moment: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub samples: Vec<TrajectorySample>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftSummary {
    pub area: f64,
    pub length: f64,
    pub moment: f64,
}

impl TrajectoryRecord {
    /// Max absolute drift of each invariant relative to its t = 0 value.
    pub fn invariant_report(&self) -> DriftSummary {
        let first = &self.samples[0];
        let mut out = DriftSummary {
            area: 0.0,
            length: 0.0,
            moment: 0.0,
        };
        for s in &self.samples {
            out.area = out.area.max((s.area - first.area).abs());
            out.length = out.length.max((s.length - first.length).abs());
            out.moment = out.moment.max((s.moment - first.moment).abs());
        }
        out
    }
}

/// RK4 evolution of the coupled system φ̇ = X_h(φ), u̇ = DX_h(φ)·u,
/// recording invariants at the sampled times.  `sample_stride` of `None`
/// uses one sample per ⌈steps/100⌉ steps.
pub fn evolve(
    d: &DipoleLoop,
    h: &HamiltonianSpec,
    t_final: f64,
    dt: f64,
    sample_stride: Option<usize>,
) -> Result<TrajectoryRecord, DipoleError> {
    assert!(dt > 0.0 && t_final >= dt, "need dt ≤ T");
    let steps = (t_final / dt).round().max(1.0) as usize;
    let hstep = t_final / steps as f64;
    let stride = sample_stride.unwrap_or_else(|| steps.div_ceil(100)).max(1);
    let field = h.field();
    let scheme = d.curve.scheme();
    let mut nodes: Vec<Vec2> = d.curve.nodes().to_vec();
    let mut u = d.u.clone();

    let mut record = TrajectoryRecord {
        samples: Vec::new(),
    };
    let sample = |t: f64,
                  nodes: &[Vec2],
                  u: &[Vec2],
                  rec: &mut TrajectoryRecord|
     -> Result<(), DipoleError> {
        let curve = DiscreteCurve::new_unchecked(nodes.to_vec(), Ambient::Plane, scheme)?;
        let tangents = curve.tangents();
        let r: Vec<f64> = u
            .iter()
            .zip(&tangents)
            .map(|(ui, ti)| vec2::cross(*ui, *ti))
            .collect();
        let max_u = u.iter().map(|v| vec2::norm(*v)).fold(0.0, f64::max);
        let max_t = tangents.iter().map(|v| vec2::norm(*v)).fold(0.0, f64::max);
        let min_r = r.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        if min_r < 1e-8 * max_u * max_t {
            return Err(DipoleError::TangencyDeveloped { t });
        }
        // Line-integral area: the recorded drift then reflects the
        // integrator rather than the polygon deficit.
        let area = curve.line_integral_area().expect("plane curve").abs();
        let loop_t = DipoleLoop {
            curve: curve.clone(),
            u: u.to_vec(),
            r,
        };
        rec.samples.push(TrajectorySample {
            t,
            area,
            length: loop_t.induced_length(),
            moment: moment_dipole(&loop_t, h),
            curve,
            u: u.to_vec(),
        });
        Ok(())
    };

    sample(0.0, &nodes, &u, &mut record)?;
    for step in 1..=steps {
        for i in 0..nodes.len() {
            let (p, v) = rk4_step_point_vec(nodes[i], u[i], &field, hstep);
            nodes[i] = p;
            u[i] = v;
        }
        if step % stride == 0 || step == steps {
            sample(step as f64 * hstep, &nodes, &u, &mut record)?;
        }
    }
    Ok(record)
}
