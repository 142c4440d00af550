//! Deterministic synthetic scene generators: analytic Fourier loops,
//! reparametrization maps, torus meridian graphs.  Everything here has a
//! closed form, so tests and batteries can sample curves, momenta and
//! their derivatives at arbitrary parameters.

use crate::curve::{Ambient, CurveError, DiscreteCurve};
use crate::rng::SplitMix64;
use crate::vec2::{self, Vec2};
use std::f64::consts::TAU;

/// An ℝ²-valued trigonometric polynomial
/// γ(s) = center + Σ_k cos_k·cos(2πks) + sin_k·sin(2πks).
/// Doubles as a closed curve and as an analytic momentum field.
#[derive(Debug, Clone)]
pub struct FourierPath {
    pub center: Vec2,
    pub cos_coeffs: Vec<Vec2>,
    pub sin_coeffs: Vec<Vec2>,
}

impl FourierPath {
    pub fn circle(center: Vec2, radius: f64) -> Self {
        Self {
            center,
            cos_coeffs: vec![[radius, 0.0]],
            sin_coeffs: vec![[0.0, radius]],
        }
    }

    pub fn ellipse(center: Vec2, a: f64, b: f64) -> Self {
        Self {
            center,
            cos_coeffs: vec![[a, 0.0]],
            sin_coeffs: vec![[0.0, b]],
        }
    }

    /// A gently perturbed circle: base radius plus seeded low-mode
    /// perturbations small enough to stay embedded.
    pub fn random_loop(
        center: Vec2,
        radius: f64,
        modes: usize,
        amp: f64,
        rng: &mut SplitMix64,
    ) -> Self {
        let mut path = Self::circle(center, radius);
        for _ in 2..=modes.max(2) {
            path.cos_coeffs.push([
                amp * radius * rng.range(-1.0, 1.0),
                amp * radius * rng.range(-1.0, 1.0),
            ]);
            path.sin_coeffs.push([
                amp * radius * rng.range(-1.0, 1.0),
                amp * radius * rng.range(-1.0, 1.0),
            ]);
        }
        path
    }

    /// A random momentum field (no embedding constraint).
    pub fn random_field(scale: f64, modes: usize, rng: &mut SplitMix64) -> Self {
        let mut cos_coeffs = Vec::new();
        let mut sin_coeffs = Vec::new();
        for _ in 1..=modes {
            cos_coeffs.push([scale * rng.range(-1.0, 1.0), scale * rng.range(-1.0, 1.0)]);
            sin_coeffs.push([scale * rng.range(-1.0, 1.0), scale * rng.range(-1.0, 1.0)]);
        }
        Self {
            center: [scale * rng.range(-1.0, 1.0), scale * rng.range(-1.0, 1.0)],
            cos_coeffs,
            sin_coeffs,
        }
    }

    /// The derivative as a Fourier path of its own (center zero).
    pub fn derivative_path(&self) -> Self {
        let mut cos_coeffs = Vec::new();
        let mut sin_coeffs = Vec::new();
        for (k, (c, d)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let om = TAU * (k + 1) as f64;
            cos_coeffs.push(vec2::scale(*d, om));
            sin_coeffs.push(vec2::scale(*c, -om));
        }
        Self {
            center: [0.0, 0.0],
            cos_coeffs,
            sin_coeffs,
        }
    }

    pub fn eval(&self, s: f64) -> Vec2 {
        let mut p = self.center;
        for (k, (c, d)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let arg = TAU * (k + 1) as f64 * s;
            p = vec2::add(
                p,
                vec2::add(vec2::scale(*c, arg.cos()), vec2::scale(*d, arg.sin())),
            );
        }
        p
    }

    pub fn deriv(&self, s: f64) -> Vec2 {
        let mut v = [0.0, 0.0];
        for (k, (c, d)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let om = TAU * (k + 1) as f64;
            let arg = om * s;
            v = vec2::add(
                v,
                vec2::add(
                    vec2::scale(*c, -om * arg.sin()),
                    vec2::scale(*d, om * arg.cos()),
                ),
            );
        }
        v
    }

    pub fn sample(&self, n: usize) -> Vec<Vec2> {
        (0..n).map(|i| self.eval(i as f64 / n as f64)).collect()
    }

    pub fn curve(&self, n: usize) -> Result<DiscreteCurve, CurveError> {
        DiscreteCurve::new(self.sample(n), Ambient::Plane)
    }
}

/// An orientation-preserving circle diffeomorphism
/// ψ(s) = s + Σ_j amp_j sin(2πj·s + phase_j), with Σ 2πj·|amp_j| < 1.
#[derive(Debug, Clone)]
pub struct ReparamMap {
    pub terms: Vec<(f64, usize, f64)>,
}

impl ReparamMap {
    pub fn random(modes: usize, strength: f64, rng: &mut SplitMix64) -> Self {
        // Scale amplitudes so ψ′ stays safely positive.
        let budget = strength.min(0.8);
        let mut terms = Vec::new();
        for j in 1..=modes {
            let amp = budget / (modes as f64) / (TAU * j as f64) * rng.range(-1.0, 1.0);
            terms.push((amp, j, rng.range(0.0, TAU)));
        }
        Self { terms }
    }

    pub fn eval(&self, s: f64) -> f64 {
        let mut out = s;
        for (amp, j, phase) in &self.terms {
            out += amp * (TAU * *j as f64 * s + phase).sin();
        }
        out
    }

    pub fn deriv(&self, s: f64) -> f64 {
        let mut out = 1.0;
        for (amp, j, phase) in &self.terms {
            out += amp * TAU * *j as f64 * (TAU * *j as f64 * s + phase).cos();
        }
        out
    }
}

/// Meridian-type torus curve y = height + wiggle(x) as a graph over the
/// x-modulus, sampled at n nodes; the wiggle must be mean-zero for the
/// mean height to equal `height`.
pub fn meridian_graph(
    moduli: [f64; 2],
    height: f64,
    wiggle: &[(f64, usize, f64)],
    n: usize,
) -> Result<DiscreteCurve, CurveError> {
    let [lx, ly] = moduli;
    let nodes: Vec<Vec2> = (0..n)
        .map(|i| {
            let s = i as f64 / n as f64;
            let mut y = height;
            for (amp, j, phase) in wiggle {
                y += amp * (TAU * *j as f64 * s + phase).sin();
            }
            [s * lx, y.rem_euclid(ly)]
        })
        .collect();
    // Re-lift: the rem_euclid above may wrap y across the modulus; undo
    // wraps so consecutive displacements stay short.
    let mut lifted = nodes.clone();
    for i in 1..n {
        let mut y = lifted[i][1];
        while y - lifted[i - 1][1] > ly / 2.0 {
            y -= ly;
        }
        while y - lifted[i - 1][1] < -ly / 2.0 {
            y += ly;
        }
        lifted[i][1] = y;
    }
    DiscreteCurve::new(lifted, Ambient::Torus { moduli })
}
