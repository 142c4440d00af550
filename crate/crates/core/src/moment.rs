//! Moment-map evaluations.
//!
//! * Left (ambient diffeomorphisms): ⟨J_L(φ,α), X⟩ = ∫_S α(X∘φ).
//! * Right (reparametrizations): J_R(φ,α) = φ*α, a 1-form density.
//! * Reduced orbit pairing with its tangential/normal split:
//!   ⟨J(N,γ,ρ_N), X⟩ = ∫ γ(X) split along the Euclidean tangent/normal
//!   decomposition of the curve.
//! * Dipole loops: ⟨(C,[u]), X_h⟩ = ∫_C dh(u) |ι_C* i_u μ|.
//!
//! Note the dipole pairing is written directly against h; with the crate's
//! sign convention X_h = (h_y, −h_x) it differs from moment_left(·, X_h)
//! on γ = |ν_C|⊗i_uμ by an overall sign.  The identification between h and
//! X_h is a convention; this crate pins the formulas above.

use crate::curve::DiscreteCurve;
use crate::density::{pullback_density, Augmentation, DensityError, OneFormDensity};
use crate::dipole::DipoleLoop;
use crate::fields::{AmbientField, HamiltonianSpec};
use crate::phase::CotangentPoint;
use crate::vec2;

/// ⟨J_L(φ,α), X⟩ = Σ_i w_i ⟨c_i, X(φ_i)⟩ Δs, summed over components.
pub fn moment_left(p: &CotangentPoint, field: &dyn AmbientField) -> f64 {
    let mut acc = 0.0;
    for (curve, aug) in p.family().curves().iter().zip(p.augs()) {
        let ds = curve.delta_s();
        for (node, m) in curve.nodes().iter().zip(aug.momentum()) {
            acc += vec2::dot(m, field.value(*node)) * ds;
        }
    }
    acc
}

/// J_R(φ,α) = φ*α, one density component per curve.
pub fn moment_right(p: &CotangentPoint) -> Result<OneFormDensity, DensityError> {
    let mut components = Vec::new();
    for (curve, aug) in p.family().curves().iter().zip(p.augs()) {
        let rho = pullback_density(curve, aug)?;
        components.push(rho.components()[0].clone());
    }
    Ok(OneFormDensity::new(components))
}

/// The reduced-orbit pairing with its tangential/normal split report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedMoment {
    pub total: f64,
    pub tangential: f64,
    pub normal: f64,
}

impl ReducedMoment {
    pub fn split_defect(&self) -> f64 {
        (self.total - (self.tangential + self.normal)).abs()
    }
}

/// ⟨J(N,γ,ρ_N), X⟩ = ∫ γ(X), reported together with the two summands
/// ∫ γ(X^⊤) (the decorated part ρ_N acting on the tangential component)
/// and ∫ γ(X^⊥) (the conormal part).
pub fn moment_reduced_level(
    curve: &DiscreteCurve,
    gamma: &Augmentation,
    field: &dyn AmbientField,
) -> Result<ReducedMoment, DensityError> {
    gamma.check_attached(curve)?;
    let ds = curve.delta_s();
    let tangents = curve.tangents();
    let mut total = 0.0;
    let mut tangential = 0.0;
    let mut normal = 0.0;
    for (i, ((node, t), m)) in curve
        .nodes()
        .iter()
        .zip(&tangents)
        .zip(gamma.momentum())
        .enumerate()
    {
        let speed = vec2::norm(*t);
        if speed < 1e-12 {
            return Err(DensityError::DegenerateSpacing(i));
        }
        let that = vec2::scale(*t, 1.0 / speed);
        let x = field.value(*node);
        let x_tan = vec2::dot(x, that);
        let m_tan = vec2::dot(m, that);
        total += vec2::dot(m, x) * ds;
        tangential += m_tan * x_tan * ds;
        normal += (vec2::dot(m, x) - m_tan * x_tan) * ds;
    }
    Ok(ReducedMoment {
        total,
        tangential,
        normal,
    })
}

/// ⟨(C,[u]), X_h⟩ = Σ_i ⟨∇h(φ_i), u_i⟩ |r_i| Δs.
pub fn moment_dipole(d: &DipoleLoop, h: &HamiltonianSpec) -> f64 {
    let ds = d.curve().delta_s();
    d.curve()
        .nodes()
        .iter()
        .zip(d.u())
        .zip(d.density_scalar())
        .map(|((node, u), r)| vec2::dot(h.grad(*node), *u) * r.abs())
        .sum::<f64>()
        * ds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::DiffScheme;
    use crate::dipole::DipoleLoop;
    use crate::fields::{Cutoff, ZeroField};
    use crate::vec2::Vec2;
    use std::f64::consts::{PI, TAU};

    struct RadialField {
        cutoff: Cutoff,
    }

    impl AmbientField for RadialField {
        fn value(&self, p: Vec2) -> Vec2 {
            let chi = self.cutoff.value(vec2::norm(p));
            vec2::scale(p, chi)
        }
        fn jacobian(&self, p: Vec2) -> [[f64; 2]; 2] {
            let rho = vec2::norm(p);
            let chi = self.cutoff.value(rho);
            let dchi = self.cutoff.d1(rho);
            if rho < 1e-12 {
                return [[chi, 0.0], [0.0, chi]];
            }
            let xh = vec2::scale(p, 1.0 / rho);
            [
                [chi + dchi * rho * xh[0] * xh[0], dchi * rho * xh[0] * xh[1]],
                [dchi * rho * xh[1] * xh[0], chi + dchi * rho * xh[1] * xh[1]],
            ]
        }
    }

    fn conormal_point(n: usize) -> CotangentPoint {
        let curve = DiscreteCurve::circle([0.0, 0.0], 1.0, n).with_scheme(DiffScheme::Trig);
        let speeds = curve.speeds();
        let covectors: Vec<Vec2> = (0..n)
            .map(|i| {
                let s = TAU * i as f64 / n as f64;
                [s.cos(), s.sin()]
            })
            .collect();
        let aug = Augmentation::new(speeds, covectors);
        CotangentPoint::single(curve, aug).unwrap()
    }

    #[test]
    fn zero_field_gives_zero_moment() {
        let p = conormal_point(64);
        assert_eq!(moment_left(&p, &ZeroField), 0.0);
    }

    #[test]
    fn radial_field_against_outward_conormal_is_circumference() {
        let p = conormal_point(512);
        let field = RadialField {
            cutoff: Cutoff::new(2.0, 1.0),
        };
        let val = moment_left(&p, &field);
        assert!((val - TAU).abs() < 1e-6, "{val}");
    }

    #[test]
    fn moment_right_of_normal_covector_vanishes() {
        let n = 64;
        let curve = DiscreteCurve::circle([0.0, 0.0], 1.0, n);
        let eps = crate::density::epsilon_section(&curve).unwrap();
        let p = CotangentPoint::single(curve, eps).unwrap();
        let rho = moment_right(&p).unwrap();
        for v in &rho.components()[0] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_split_is_consistent() {
        let n = 128;
        let curve = DiscreteCurve::ellipse([0.2, 0.4], 1.1, 0.7, n).with_scheme(DiffScheme::Trig);
        let m: Vec<Vec2> = (0..n)
            .map(|i| {
                let s = TAU * i as f64 / n as f64;
                [0.3 * s.cos() - 0.1, 0.8 * (2.0 * s).sin() + 0.2]
            })
            .collect();
        let gamma = Augmentation::from_momentum(m);
        let spec = HamiltonianSpec::gaussian([0.5, -0.3], 1.3, 0.9, 4.0);
        let rm = moment_reduced_level(&curve, &gamma, &spec.field()).unwrap();
        assert!(rm.split_defect() < 1e-10, "{}", rm.split_defect());
    }

    #[test]
    fn reduced_split_orthogonal_case_vanishes() {
        // γ purely tangential, X purely normal → every term is zero.
        let n = 128;
        let curve = DiscreteCurve::circle([0.0, 0.0], 1.0, n).with_scheme(DiffScheme::Trig);
        let tangential = Augmentation::from_momentum(curve.unit_tangents());
        let field = RadialField {
            cutoff: Cutoff::new(2.0, 1.0),
        };
        let rm = moment_reduced_level(&curve, &tangential, &field).unwrap();
        assert!(rm.total.abs() < 1e-9, "{}", rm.total);
        assert!(rm.tangential.abs() < 1e-9);
        assert!(rm.normal.abs() < 1e-9);
    }

    #[test]
    fn reduced_rotation_closed_form() {
        // Rotation field X = ω(−y, x) on a centered circle with
        // rotation-invariant γ = ρ_t t̂ + ρ_n n̂: ⟨J, X⟩ = ω R ρ_t.
        let n = 256;
        let radius = 1.0;
        let curve = DiscreteCurve::circle([0.0, 0.0], radius, n).with_scheme(DiffScheme::Trig);
        let (rho_t, rho_n) = (0.7, -0.4);
        let m: Vec<Vec2> = (0..n)
            .map(|i| {
                let s = TAU * i as f64 / n as f64;
                let that = [-s.sin(), s.cos()];
                let nhat = [s.cos(), s.sin()];
                vec2::add(vec2::scale(that, rho_t), vec2::scale(nhat, rho_n))
            })
            .collect();
        let gamma = Augmentation::from_momentum(m);
        let omega = TAU;
        // X = ω(−y, x) is X_h for h = −ω|x|²/2 under X_h = (h_y, −h_x).
        let spec = HamiltonianSpec::PolynomialWithCutoff {
            center: [0.0, 0.0],
            amp: -omega,
            coeffs: [0.0, 0.0, 0.0, 0.5, 0.0, 0.5],
            cutoff: Cutoff::new(3.0, 1.0),
        };
        let rm = moment_reduced_level(&curve, &gamma, &spec.field()).unwrap();
        let expect = omega * radius * rho_t;
        assert!((rm.total - expect).abs() < 1e-9, "{} vs {expect}", rm.total);
        assert!((rm.tangential - expect).abs() < 1e-9);
        assert!(rm.normal.abs() < 1e-9);
    }

    #[test]
    fn dipole_moment_of_locally_constant_h_vanishes() {
        let n = 128;
        let curve = DiscreteCurve::circle([0.0, 0.0], 1.0, n).with_scheme(DiffScheme::Trig);
        let u: Vec<Vec2> = (0..n)
            .map(|i| {
                let s = TAU * i as f64 / n as f64;
                [s.cos(), s.sin()]
            })
            .collect();
        let d = DipoleLoop::new(curve, u).unwrap();
        // h ≡ amp on a plateau of radius 2 ⊃ C: dh = 0 along C.
        let h = HamiltonianSpec::PolynomialWithCutoff {
            center: [0.0, 0.0],
            amp: 3.7,
            coeffs: [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            cutoff: Cutoff::new(2.0, 1.0),
        };
        assert_eq!(moment_dipole(&d, &h), 0.0);
    }

    #[test]
    fn dipole_moment_quadratic_h_on_unit_circle() {
        // h = |x|²/2 with wide cutoff: dh(n̂) = 1 on the unit circle, so
        // the pairing is the circumference 2π.
        let n = 256;
        let curve = DiscreteCurve::circle([0.0, 0.0], 1.0, n).with_scheme(DiffScheme::Trig);
        let u: Vec<Vec2> = (0..n)
            .map(|i| {
                let s = TAU * i as f64 / n as f64;
                [s.cos(), s.sin()]
            })
            .collect();
        let d = DipoleLoop::new(curve, u).unwrap();
        let h = HamiltonianSpec::PolynomialWithCutoff {
            center: [0.0, 0.0],
            amp: 1.0,
            coeffs: [0.0, 0.0, 0.0, 0.5, 0.0, 0.5],
            cutoff: Cutoff::new(3.0, 1.0),
        };
        let val = moment_dipole(&d, &h);
        assert!((val - 2.0 * PI).abs() < 1e-6, "{val}");
    }

    #[test]
    fn dipole_class_invariance_under_tangential_shift() {
        let n = 256;
        let curve = DiscreteCurve::ellipse([0.1, -0.2], 1.3, 0.8, n).with_scheme(DiffScheme::Trig);
        let u: Vec<Vec2> = (0..n)
            .map(|i| {
                let s = TAU * i as f64 / n as f64;
                [1.3 * s.cos(), 0.8 * s.sin()]
            })
            .collect();
        let d = DipoleLoop::new(curve, u).unwrap();
        let h = HamiltonianSpec::gaussian([0.6, 0.4], 1.5, 0.8, 4.0);
        let base = moment_dipole(&d, &h);
        for c in [-1.0, 0.35, 2.0] {
            let shifted = d.shifted(c).unwrap();
            let val = moment_dipole(&shifted, &h);
            assert!((val - base).abs() < 1e-9, "c={c}: {val} vs {base}");
        }
    }
}
