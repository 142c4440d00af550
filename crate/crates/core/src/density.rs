//! 1-form densities on circles and augmentations along curves.
//!
//! A 1-form density on a parametrized circle is stored as the per-node
//! scalar r(s) with ρ = r(s)|ds|⊗ds relative to the uniform parameter.
//! A nowhere zero ρ factors as ρ = |ν|⊗ν for a unique 1-form ν = v(s)ds,
//! so r = v|v| and the length of ρ is ∫√|r| ds.
//!
//! An augmentation along a curve is a density-weighted ambient covector
//! field, γ = w(s)|ds| ⊗ (a(s), b(s)); all pairings depend on it only
//! through the momentum m = w·(a, b).  Densities are stored relative to the
//! parameter (not arc length) so that reparametrization actions stay exact
//! on the data.

use crate::curve::DiscreteCurve;
use crate::diff::integrate_periodic;
use crate::vec2::{self, Vec2};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("vanishing density: component {component} node {node} has r = 0")]
    VanishingDensity { component: usize, node: usize },
    #[error("augmentation has {got} nodes but the curve has {expected}")]
    AttachmentMismatch { expected: usize, got: usize },
    #[error("degenerate node spacing at node {0}: |φ'| below 1e-12")]
    DegenerateSpacing(usize),
}

/// ρ = r(s)|ds|⊗ds per connected component.
#[derive(Debug, Clone, PartialEq)]
pub struct OneFormDensity {
    components: Vec<Vec<f64>>,
}

impl OneFormDensity {
    pub fn new(components: Vec<Vec<f64>>) -> Self {
        assert!(!components.is_empty());
        Self { components }
    }

    pub fn single(values: Vec<f64>) -> Self {
        Self::new(vec![values])
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn check_nowhere_zero(&self) -> Result<(), DensityError> {
        for (component, vals) in self.components.iter().enumerate() {
            for (node, v) in vals.iter().enumerate() {
                if *v == 0.0 {
                    return Err(DensityError::VanishingDensity { component, node });
                }
            }
        }
        Ok(())
    }
}

/// Per-component positive lengths ℓ = (l_1, …, l_k).
#[derive(Debug, Clone, PartialEq)]
pub struct LengthSpectrum {
    pub lengths: Vec<f64>,
}

impl LengthSpectrum {
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.lengths.clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }
}

/// l_i = ∫₀¹ √|r_i(s)| ds per component.
pub fn length_spectrum(rho: &OneFormDensity) -> Result<LengthSpectrum, DensityError> {
    rho.check_nowhere_zero()?;
    let lengths = rho
        .components()
        .iter()
        .map(|vals| {
            let sq: Vec<f64> = vals.iter().map(|r| r.abs().sqrt()).collect();
            integrate_periodic(&sq)
        })
        .collect();
    Ok(LengthSpectrum { lengths })
}

/// Default absolute tolerance for length-spectrum multiset comparison.
pub const ORBIT_TOL: f64 = 1e-9;

/// Orbit equality: all components here are circles, so two nowhere zero
/// densities have the same orbit type iff their length spectra agree as
/// multisets (component labels are immaterial).  [`ORBIT_TOL`] is the
/// standard tolerance.
pub fn orbit_type_equal(
    rho1: &OneFormDensity,
    rho2: &OneFormDensity,
    tol: f64,
) -> Result<bool, DensityError> {
    let l1 = length_spectrum(rho1)?;
    let l2 = length_spectrum(rho2)?;
    if l1.lengths.len() != l2.lengths.len() {
        return Ok(false);
    }
    Ok(l1
        .sorted()
        .iter()
        .zip(l2.sorted())
        .all(|(a, b)| (a - b).abs() <= tol))
}

/// γ = w(s)|ds| ⊗ c(s) along a curve.  The split into weight and covector
/// is a bookkeeping choice; the section itself is the momentum w·c.
#[derive(Debug, Clone, PartialEq)]
pub struct Augmentation {
    weights: Vec<f64>,
    covectors: Vec<Vec2>,
}

impl Augmentation {
    pub fn new(weights: Vec<f64>, covectors: Vec<Vec2>) -> Self {
        assert_eq!(weights.len(), covectors.len());
        Self { weights, covectors }
    }

    /// Weight-one augmentation from momentum samples.
    pub fn from_momentum(momentum: Vec<Vec2>) -> Self {
        let weights = vec![1.0; momentum.len()];
        Self {
            weights,
            covectors: momentum,
        }
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn covectors(&self) -> &[Vec2] {
        &self.covectors
    }

    /// m_i = w_i · c_i, the coordinate-free content of the section.
    pub fn momentum(&self) -> Vec<Vec2> {
        self.weights
            .iter()
            .zip(&self.covectors)
            .map(|(w, c)| vec2::scale(*c, *w))
            .collect()
    }

    /// a·γ₁ + b·γ₂ as sections (result carries weight one).
    pub fn combine(a: f64, g1: &Augmentation, b: f64, g2: &Augmentation) -> Self {
        assert_eq!(g1.n(), g2.n());
        let m = g1
            .momentum()
            .iter()
            .zip(g2.momentum())
            .map(|(m1, m2)| vec2::add(vec2::scale(*m1, a), vec2::scale(m2, b)))
            .collect();
        Self::from_momentum(m)
    }

    /// Replace the momentum, keeping the stored weights.
    pub fn with_momentum(&self, momentum: &[Vec2]) -> Self {
        assert_eq!(momentum.len(), self.n());
        let covectors = momentum
            .iter()
            .zip(&self.weights)
            .map(|(m, w)| vec2::scale(*m, 1.0 / w))
            .collect();
        Self {
            weights: self.weights.clone(),
            covectors,
        }
    }

    pub fn check_attached(&self, curve: &DiscreteCurve) -> Result<(), DensityError> {
        if self.n() != curve.n() {
            return Err(DensityError::AttachmentMismatch {
                expected: curve.n(),
                got: self.n(),
            });
        }
        Ok(())
    }
}

/// Pullback φ*γ as a 1-form density on the parameter circle:
/// r(s) = w(s)·(a(s)·x′(s) + b(s)·y′(s)).
pub fn pullback_density(
    curve: &DiscreteCurve,
    gamma: &Augmentation,
) -> Result<OneFormDensity, DensityError> {
    gamma.check_attached(curve)?;
    let tangents = curve.tangents();
    let values = gamma
        .momentum()
        .iter()
        .zip(&tangents)
        .map(|(m, t)| vec2::dot(*m, *t))
        .collect();
    Ok(OneFormDensity::single(values))
}

/// The canonical section ε_C = |ν_C| ⊗ i_{t_C}μ (μ = dx∧dy), computed with
/// the arc-length volume form; the result is independent of the choice of
/// ν_C.  For a positively oriented curve the covector points inward.
pub fn epsilon_section(curve: &DiscreteCurve) -> Result<Augmentation, DensityError> {
    let speeds = curve.speeds();
    epsilon_section_with_volume(curve, &speeds)
}

/// ε_C computed from an explicit volume form ν_C = v(s) ds with v > 0
/// (or any nowhere zero v); exposed so scale invariance can be exercised.
pub fn epsilon_section_with_volume(
    curve: &DiscreteCurve,
    v: &[f64],
) -> Result<Augmentation, DensityError> {
    assert_eq!(v.len(), curve.n());
    let tangents = curve.tangents();
    let mut weights = Vec::with_capacity(curve.n());
    let mut covectors = Vec::with_capacity(curve.n());
    for (i, t) in tangents.iter().enumerate() {
        if vec2::norm(*t) < 1e-12 {
            return Err(DensityError::DegenerateSpacing(i));
        }
        // t_C = φ′/v so that ν_C(t_C) = 1; i_{t_C}μ = rot90(φ′)/v.
        weights.push(v[i].abs());
        covectors.push(vec2::scale(vec2::rot90(*t), 1.0 / v[i]));
    }
    Ok(Augmentation::new(weights, covectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::DiscreteCurve;
    use crate::diff::DiffScheme;
    use std::f64::consts::TAU;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 / n as f64).collect()
    }

    #[test]
    fn constant_density_lengths() {
        let rho = OneFormDensity::single(vec![1.0; 64]);
        let l = length_spectrum(&rho).unwrap();
        assert!((l.lengths[0] - 1.0).abs() < 1e-14);
        let rho4 = OneFormDensity::single(vec![4.0; 64]);
        assert!((length_spectrum(&rho4).unwrap().lengths[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn modulated_density_has_unit_length() {
        // r = (1 + 0.5 sin 2πs)²; √r integrates to 1 analytically.
        let vals: Vec<f64> = grid(256)
            .iter()
            .map(|s| (1.0 + 0.5 * (TAU * s).sin()).powi(2))
            .collect();
        let l = length_spectrum(&OneFormDensity::single(vals)).unwrap();
        assert!((l.lengths[0] - 1.0).abs() < 1e-10, "{}", l.lengths[0]);
    }

    #[test]
    fn vanishing_density_rejected() {
        let mut vals = vec![1.0; 32];
        vals[7] = 0.0;
        let err = length_spectrum(&OneFormDensity::single(vals)).unwrap_err();
        assert_eq!(
            err,
            DensityError::VanishingDensity {
                component: 0,
                node: 7
            }
        );
    }

    #[test]
    fn orbit_type_ignores_component_order() {
        let a = OneFormDensity::new(vec![vec![1.0; 32], vec![16.0; 32]]);
        let b = OneFormDensity::new(vec![vec![16.0; 32], vec![1.0; 32]]);
        assert!(orbit_type_equal(&a, &b, 1e-9).unwrap());
        let c = OneFormDensity::new(vec![vec![1.0; 32], vec![9.0; 32]]);
        assert!(!orbit_type_equal(&a, &c, 1e-9).unwrap());
        assert!(orbit_type_equal(&a, &a, 1e-9).unwrap());
    }

    #[test]
    fn orbit_type_component_count_mismatch_is_not_equal() {
        let a = OneFormDensity::new(vec![vec![1.0; 32]]);
        let b = OneFormDensity::new(vec![vec![1.0; 32], vec![1.0; 32]]);
        assert!(!orbit_type_equal(&a, &b, 1e-9).unwrap());
    }

    #[test]
    fn pullback_of_normal_covector_vanishes() {
        let c = DiscreteCurve::circle([0.0, 0.0], 1.0, 64);
        let eps = epsilon_section(&c).unwrap();
        let rho = pullback_density(&c, &eps).unwrap();
        for v in &rho.components()[0] {
            assert!(v.abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn pullback_of_tangent_covector_on_circle() {
        let n = 128;
        let c = DiscreteCurve::circle([0.0, 0.0], 1.0, n).with_scheme(DiffScheme::Trig);
        let amp = 0.7;
        let covectors: Vec<[f64; 2]> = grid(n)
            .iter()
            .map(|s| [-amp * (TAU * s).sin(), amp * (TAU * s).cos()])
            .collect();
        let gamma = Augmentation::new(vec![1.0; n], covectors);
        let rho = pullback_density(&c, &gamma).unwrap();
        for v in &rho.components()[0] {
            assert!((v - TAU * amp).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn pullback_is_linear_in_gamma() {
        let n = 64;
        let c = DiscreteCurve::circle([0.0, 0.0], 1.0, n);
        let g1 =
            Augmentation::from_momentum(grid(n).iter().map(|s| [(TAU * s).cos(), 0.3]).collect());
        let g2 = Augmentation::from_momentum(
            grid(n)
                .iter()
                .map(|s| [0.1, (2.0 * TAU * s).sin()])
                .collect(),
        );
        let lhs = pullback_density(&c, &Augmentation::combine(2.0, &g1, -0.5, &g2)).unwrap();
        let p1 = pullback_density(&c, &g1).unwrap();
        let p2 = pullback_density(&c, &g2).unwrap();
        for i in 0..n {
            let want = 2.0 * p1.components()[0][i] - 0.5 * p2.components()[0][i];
            assert!((lhs.components()[0][i] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn epsilon_section_scale_invariant() {
        let n = 128;
        let c = DiscreteCurve::circle([0.2, -0.1], 1.3, n);
        let speeds = c.speeds();
        let scaled: Vec<f64> = speeds
            .iter()
            .zip(grid(n))
            .map(|(v, s)| v * (1.0 + 0.3 * (TAU * s).cos()))
            .collect();
        let e1 = epsilon_section(&c).unwrap();
        let e2 = epsilon_section_with_volume(&c, &scaled).unwrap();
        for (m1, m2) in e1.momentum().iter().zip(e2.momentum()) {
            assert!(vec2::dist(*m1, m2) < 1e-12);
        }
    }

    #[test]
    fn attachment_mismatch_detected() {
        let c = DiscreteCurve::circle([0.0, 0.0], 1.0, 64);
        let gamma = Augmentation::from_momentum(vec![[1.0, 0.0]; 32]);
        assert!(matches!(
            pullback_density(&c, &gamma),
            Err(DensityError::AttachmentMismatch { .. })
        ));
    }
}
