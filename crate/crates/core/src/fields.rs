//! Analytic ambient vector fields and Hamiltonian families.
//!
//! Hamiltonian fields follow the convention pinned by i_{X_h}μ = dh with
//! μ = dx∧dy, i.e. X_h = (∂h/∂y, −∂h/∂x).  All families carry closed-form
//! gradients and Hessians; no automatic differentiation is involved.

use crate::rng::SplitMix64;
use crate::vec2::{self, Vec2};
use serde::{Deserialize, Serialize};

/// An ambient vector field with an analytic Jacobian.
pub trait AmbientField {
    fn value(&self, p: Vec2) -> Vec2;
    /// jacobian(p)[i][j] = ∂ value_i / ∂ x_j.
    fn jacobian(&self, p: Vec2) -> [[f64; 2]; 2];
}

/// Radial cutoff: 1 inside `plateau`, transition over `width`, 0 beyond
/// plateau + width.  The transition is the two-sided exp(−1/x) step, so the
/// profile is C^∞ at both edges and Hessians stay valid inside the band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub plateau: f64,
    pub width: f64,
}

fn g(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

fn dg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        g(x) / (x * x)
    }
}

fn ddg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        g(x) * (1.0 / (x * x * x * x) - 2.0 / (x * x * x))
    }
}

impl Cutoff {
    pub fn new(plateau: f64, width: f64) -> Self {
        assert!(plateau >= 0.0 && width > 0.0);
        Self { plateau, width }
    }

    pub fn support_radius(&self) -> f64 {
        self.plateau + self.width
    }

    fn band(&self, r: f64) -> Option<f64> {
        if r <= self.plateau || r >= self.plateau + self.width {
            None
        } else {
            Some((r - self.plateau) / self.width)
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match self.band(r) {
            None => {
                if r <= self.plateau {
                    1.0
                } else {
                    0.0
                }
            }
            Some(u) => {
                let (a, b) = (g(u), g(1.0 - u));
                b / (a + b)
            }
        }
    }

    pub fn d1(&self, r: f64) -> f64 {
        match self.band(r) {
            None => 0.0,
            Some(u) => {
                let (a, b) = (g(u), g(1.0 - u));
                let (da, db) = (dg(u), -dg(1.0 - u));
                let den = a + b;
                (db * a - da * b) / (den * den) / self.width
            }
        }
    }

    pub fn d2(&self, r: f64) -> f64 {
        match self.band(r) {
            None => 0.0,
            Some(u) => {
                let (a, b) = (g(u), g(1.0 - u));
                let (da, db) = (dg(u), -dg(1.0 - u));
                let (dda, ddb) = (ddg(u), ddg(1.0 - u));
                let den = a + b;
                let num = db * a - da * b;
                let dnum = ddb * a - dda * b;
                (dnum / (den * den) - 2.0 * num * (da + db) / (den * den * den))
                    / (self.width * self.width)
            }
        }
    }
}

/// Closed-form Hamiltonian families on the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum HamiltonianSpec {
    /// h = amp · exp(−|x−c|²/2σ²) · χ(|x−c|)
    Gaussian {
        center: Vec2,
        amp: f64,
        sigma: f64,
        cutoff: Cutoff,
    },
    /// h = amp · (k·(x−c)) · χ(|x−c|)
    LinearWithCutoff {
        center: Vec2,
        amp: f64,
        k: Vec2,
        cutoff: Cutoff,
    },
    /// h = amp · P(x−c) · χ(|x−c|) with P of total degree ≤ 2,
    /// coeffs = [c00, c10, c01, c20, c11, c02].
    PolynomialWithCutoff {
        center: Vec2,
        amp: f64,
        coeffs: [f64; 6],
        cutoff: Cutoff,
    },
}

impl HamiltonianSpec {
    pub fn gaussian(center: Vec2, amp: f64, sigma: f64, cutoff_radius: f64) -> Self {
        HamiltonianSpec::Gaussian {
            center,
            amp,
            sigma,
            cutoff: Cutoff::new(cutoff_radius, cutoff_radius / 2.0),
        }
    }

    /// Rigid rotation rate ω inside the plateau: h = ω/2 · |x−c|².
    pub fn rotation(center: Vec2, omega: f64, cutoff_radius: f64) -> Self {
        HamiltonianSpec::PolynomialWithCutoff {
            center,
            amp: omega,
            coeffs: [0.0, 0.0, 0.0, 0.5, 0.0, 0.5],
            cutoff: Cutoff::new(cutoff_radius, cutoff_radius / 2.0),
        }
    }

    /// Rigid translation by `v` inside the plateau: h = v_x y − v_y x.
    pub fn translation(center: Vec2, v: Vec2, cutoff_radius: f64) -> Self {
        HamiltonianSpec::LinearWithCutoff {
            center,
            amp: 1.0,
            k: [-v[1], v[0]],
            cutoff: Cutoff::new(cutoff_radius, cutoff_radius / 2.0),
        }
    }

    fn parts(&self) -> (Vec2, f64, Cutoff) {
        match self {
            HamiltonianSpec::Gaussian {
                center,
                amp,
                cutoff,
                ..
            }
            | HamiltonianSpec::LinearWithCutoff {
                center,
                amp,
                cutoff,
                ..
            }
            | HamiltonianSpec::PolynomialWithCutoff {
                center,
                amp,
                cutoff,
                ..
            } => (*center, *amp, *cutoff),
        }
    }

    pub fn h(&self, p: Vec2) -> f64 {
        let (center, amp, cutoff) = self.parts();
        let d = vec2::sub(p, center);
        let rho = vec2::norm(d);
        amp * self.profile(d) * cutoff.value(rho)
    }

    pub fn grad(&self, p: Vec2) -> Vec2 {
        let (center, amp, cutoff) = self.parts();
        let d = vec2::sub(p, center);
        let rho = vec2::norm(d);
        let chi = cutoff.value(rho);
        let dchi = cutoff.d1(rho);
        let gp = self.profile_grad(d);
        if rho < 1e-12 {
            return vec2::scale(gp, amp * chi);
        }
        let xhat = vec2::scale(d, 1.0 / rho);
        [
            amp * (gp[0] * chi + self.profile(d) * dchi * xhat[0]),
            amp * (gp[1] * chi + self.profile(d) * dchi * xhat[1]),
        ]
    }

    /// hessian(p)[i][j] = ∂²h/∂x_i∂x_j.
    pub fn hessian(&self, p: Vec2) -> [[f64; 2]; 2] {
        let (center, amp, cutoff) = self.parts();
        let d = vec2::sub(p, center);
        let rho = vec2::norm(d);
        let chi = cutoff.value(rho);
        let dchi = cutoff.d1(rho);
        let ddchi = cutoff.d2(rho);
        let val = self.profile(d);
        let gp = self.profile_grad(d);
        let hp = self.profile_hessian(d);
        if rho < 1e-12 {
            // Inside the plateau near the center: dchi = ddchi = 0.
            return [
                [amp * hp[0][0] * chi, amp * hp[0][1] * chi],
                [amp * hp[1][0] * chi, amp * hp[1][1] * chi],
            ];
        }
        let xh = vec2::scale(d, 1.0 / rho);
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let delta = if i == j { 1.0 } else { 0.0 };
                let radial = ddchi * xh[i] * xh[j] + dchi / rho * (delta - xh[i] * xh[j]);
                out[i][j] = amp
                    * (hp[i][j] * chi + gp[i] * dchi * xh[j] + gp[j] * dchi * xh[i] + val * radial);
            }
        }
        out
    }

    fn profile(&self, d: Vec2) -> f64 {
        match self {
            HamiltonianSpec::Gaussian { sigma, .. } => {
                (-vec2::dot(d, d) / (2.0 * sigma * sigma)).exp()
            }
            HamiltonianSpec::LinearWithCutoff { k, .. } => vec2::dot(*k, d),
            HamiltonianSpec::PolynomialWithCutoff { coeffs, .. } => {
                let [c00, c10, c01, c20, c11, c02] = *coeffs;
                c00 + c10 * d[0]
                    + c01 * d[1]
                    + c20 * d[0] * d[0]
                    + c11 * d[0] * d[1]
                    + c02 * d[1] * d[1]
            }
        }
    }

    fn profile_grad(&self, d: Vec2) -> Vec2 {
        match self {
            HamiltonianSpec::Gaussian { sigma, .. } => {
                let f = self.profile(d);
                let s2 = sigma * sigma;
                [-d[0] / s2 * f, -d[1] / s2 * f]
            }
            HamiltonianSpec::LinearWithCutoff { k, .. } => *k,
            HamiltonianSpec::PolynomialWithCutoff { coeffs, .. } => {
                let [_, c10, c01, c20, c11, c02] = *coeffs;
                [
                    c10 + 2.0 * c20 * d[0] + c11 * d[1],
                    c01 + c11 * d[0] + 2.0 * c02 * d[1],
                ]
            }
        }
    }

    fn profile_hessian(&self, d: Vec2) -> [[f64; 2]; 2] {
        match self {
            HamiltonianSpec::Gaussian { sigma, .. } => {
                let f = self.profile(d);
                let s2 = sigma * sigma;
                [
                    [
                        (d[0] * d[0] / s2 - 1.0) / s2 * f,
                        d[0] * d[1] / (s2 * s2) * f,
                    ],
                    [
                        d[0] * d[1] / (s2 * s2) * f,
                        (d[1] * d[1] / s2 - 1.0) / s2 * f,
                    ],
                ]
            }
            HamiltonianSpec::LinearWithCutoff { .. } => [[0.0; 2]; 2],
            HamiltonianSpec::PolynomialWithCutoff { coeffs, .. } => {
                let [_, _, _, c20, c11, c02] = *coeffs;
                [[2.0 * c20, c11], [c11, 2.0 * c02]]
            }
        }
    }

    /// The Hamiltonian vector field X_h = (∂h/∂y, −∂h/∂x).
    pub fn field(&self) -> HamiltonianField<'_> {
        HamiltonianField { spec: self }
    }
}

pub struct HamiltonianField<'a> {
    spec: &'a HamiltonianSpec,
}

impl AmbientField for HamiltonianField<'_> {
    fn value(&self, p: Vec2) -> Vec2 {
        let g = self.spec.grad(p);
        [g[1], -g[0]]
    }

    fn jacobian(&self, p: Vec2) -> [[f64; 2]; 2] {
        let h = self.spec.hessian(p);
        [[h[1][0], h[1][1]], [-h[0][0], -h[0][1]]]
    }
}

/// The zero field.
pub struct ZeroField;

impl AmbientField for ZeroField {
    fn value(&self, _p: Vec2) -> Vec2 {
        [0.0, 0.0]
    }
    fn jacobian(&self, _p: Vec2) -> [[f64; 2]; 2] {
        [[0.0; 2]; 2]
    }
}

/// A trigonometric polynomial field, periodic with the given periods.
/// Smooth but generally neither divergence free nor Hamiltonian; used as a
/// generic deformation battery for flux-rank experiments.
#[derive(Debug, Clone)]
pub struct FourierField2 {
    periods: Vec2,
    /// (amplitude, wave numbers, phase) per term and output component.
    terms: [Vec<(f64, [i32; 2], f64)>; 2],
}

impl FourierField2 {
    /// Seeded random field with wave numbers up to `max_mode`.
    pub fn random(periods: Vec2, max_mode: i32, n_terms: usize, rng: &mut SplitMix64) -> Self {
        let mut terms = [Vec::new(), Vec::new()];
        for comp in &mut terms {
            for _ in 0..n_terms {
                let amp = rng.range(-1.0, 1.0);
                let kx = rng.next_usize((2 * max_mode + 1) as usize) as i32 - max_mode;
                let ky = rng.next_usize((2 * max_mode + 1) as usize) as i32 - max_mode;
                let phase = rng.range(0.0, std::f64::consts::TAU);
                comp.push((amp, [kx, ky], phase));
            }
        }
        Self { periods, terms }
    }

    pub fn value(&self, p: Vec2) -> Vec2 {
        use std::f64::consts::TAU;
        let mut out = [0.0, 0.0];
        for (c, comp) in self.terms.iter().enumerate() {
            for (amp, [kx, ky], phase) in comp {
                let arg = TAU
                    * (*kx as f64 * p[0] / self.periods[0] + *ky as f64 * p[1] / self.periods[1])
                    + phase;
                out[c] += amp * arg.sin();
            }
        }
        out
    }
}

/// The reproducible test battery: 40 Gaussian bumps on an 8×5 grid over the
/// padded bounding box, σ = diameter/4, centers jittered by the seed.
pub fn standard_battery(lo: Vec2, hi: Vec2, seed: u64) -> Vec<HamiltonianSpec> {
    let mut rng = SplitMix64::new(seed);
    let diam = vec2::dist(lo, hi).max(1e-6);
    let sigma = diam / 4.0;
    let pad = 0.25 * diam;
    let (nx, ny) = (8, 5);
    let mut out = Vec::with_capacity(nx * ny);
    for ix in 0..nx {
        for iy in 0..ny {
            let fx = ix as f64 / (nx - 1) as f64;
            let fy = iy as f64 / (ny - 1) as f64;
            let jx = rng.range(-0.02, 0.02) * diam;
            let jy = rng.range(-0.02, 0.02) * diam;
            let cx = lo[0] - pad + fx * (hi[0] - lo[0] + 2.0 * pad) + jx;
            let cy = lo[1] - pad + fy * (hi[1] - lo[1] + 2.0 * pad) + jy;
            out.push(HamiltonianSpec::gaussian([cx, cy], 1.0, sigma, 2.0 * diam));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_grad(spec: &HamiltonianSpec, p: Vec2) -> Vec2 {
        let h = 1e-6;
        [
            (spec.h([p[0] + h, p[1]]) - spec.h([p[0] - h, p[1]])) / (2.0 * h),
            (spec.h([p[0], p[1] + h]) - spec.h([p[0], p[1] - h])) / (2.0 * h),
        ]
    }

    fn fd_hessian(spec: &HamiltonianSpec, p: Vec2) -> [[f64; 2]; 2] {
        let h = 1e-5;
        let gx1 = spec.grad([p[0] + h, p[1]]);
        let gx0 = spec.grad([p[0] - h, p[1]]);
        let gy1 = spec.grad([p[0], p[1] + h]);
        let gy0 = spec.grad([p[0], p[1] - h]);
        [
            [(gx1[0] - gx0[0]) / (2.0 * h), (gy1[0] - gy0[0]) / (2.0 * h)],
            [(gx1[1] - gx0[1]) / (2.0 * h), (gy1[1] - gy0[1]) / (2.0 * h)],
        ]
    }

    #[test]
    fn gradients_and_hessians_match_finite_differences() {
        let specs = vec![
            HamiltonianSpec::gaussian([0.3, -0.2], 1.5, 0.6, 2.0),
            HamiltonianSpec::translation([0.0, 0.0], [1.0, -0.5], 2.0),
            HamiltonianSpec::rotation([0.1, 0.1], 0.8, 2.0),
            HamiltonianSpec::PolynomialWithCutoff {
                center: [0.0, 0.0],
                amp: 0.7,
                coeffs: [0.1, -0.3, 0.25, 0.4, 0.2, -0.5],
                cutoff: Cutoff::new(1.5, 1.0),
            },
        ];
        let points = [[0.0, 0.0], [0.4, 0.3], [1.2, -0.9], [2.1, 0.2], [-1.7, 1.1]];
        for spec in &specs {
            for p in points {
                let g = spec.grad(p);
                let fg = fd_grad(spec, p);
                assert!(
                    vec2::dist(g, fg) < 1e-6 * (1.0 + vec2::norm(fg)),
                    "{spec:?} at {p:?}: {g:?} vs {fg:?}"
                );
                let hs = spec.hessian(p);
                let fh = fd_hessian(spec, p);
                for i in 0..2 {
                    for j in 0..2 {
                        assert!(
                            (hs[i][j] - fh[i][j]).abs() < 1e-5 * (1.0 + fh[i][j].abs()),
                            "{spec:?} at {p:?} [{i}{j}]: {} vs {}",
                            hs[i][j],
                            fh[i][j]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn hamiltonian_field_is_divergence_free() {
        let spec = HamiltonianSpec::gaussian([0.0, 0.0], 2.0, 0.5, 1.5);
        let f = spec.field();
        for p in [[0.2, 0.1], [0.8, -0.6], [1.6, 0.9]] {
            let j = f.jacobian(p);
            assert!((j[0][0] + j[1][1]).abs() < 1e-12, "div at {p:?}");
        }
    }

    #[test]
    fn rotation_field_inside_plateau() {
        let spec = HamiltonianSpec::rotation([0.0, 0.0], 1.0, 2.0);
        let f = spec.field();
        // h = |x|²/2 → X_h = (y, −x): clockwise rotation.
        let v = f.value([1.0, 0.0]);
        assert!(vec2::dist(v, [0.0, -1.0]) < 1e-12);
        let v = f.value([0.0, 1.0]);
        assert!(vec2::dist(v, [1.0, 0.0]) < 1e-12);
    }

    #[test]
    fn translation_field_inside_plateau() {
        let spec = HamiltonianSpec::translation([0.0, 0.0], [0.7, -0.2], 3.0);
        let f = spec.field();
        for p in [[0.0, 0.0], [1.0, 1.0], [-2.0, 0.5]] {
            assert!(vec2::dist(f.value(p), [0.7, -0.2]) < 1e-12);
            let j = f.jacobian(p);
            for row in j {
                for e in row {
                    assert_eq!(e, 0.0);
                }
            }
        }
    }

    #[test]
    fn compact_support() {
        let spec = HamiltonianSpec::gaussian([0.0, 0.0], 1.0, 0.5, 1.0);
        // cutoff plateau 1.0, width 0.5 → support radius 1.5
        assert_eq!(spec.h([2.0, 0.0]), 0.0);
        assert_eq!(spec.grad([0.0, 2.0]), [0.0, 0.0]);
    }

    #[test]
    fn standard_battery_is_seed_deterministic() {
        let a = standard_battery([-1.0, -1.0], [1.0, 1.0], 5);
        let b = standard_battery([-1.0, -1.0], [1.0, 1.0], 5);
        assert_eq!(a.len(), 40);
        assert_eq!(a, b);
        let c = standard_battery([-1.0, -1.0], [1.0, 1.0], 6);
        assert_ne!(a, c);
    }
}
