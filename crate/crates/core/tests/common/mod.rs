//! Shared analytic scenes for the integration suites: closed-form curves,
//! momenta and reparametrizations that can be sampled at any resolution,
//! so both sides of an equivariance identity come from exact data.

use isodrast_core::density::Augmentation;
use isodrast_core::diff::DiffScheme;
use isodrast_core::phase::CotangentPoint;
use isodrast_core::rng::SplitMix64;
use isodrast_core::synth::{FourierPath, ReparamMap};
use isodrast_core::vec2::{self, Vec2};

pub struct AnalyticPoint {
    pub path: FourierPath,
    pub momentum: FourierPath,
}

impl AnalyticPoint {
    pub fn random(rng: &mut SplitMix64) -> Self {
        let path = FourierPath::random_loop(
            [rng.range(-0.3, 0.3), rng.range(-0.3, 0.3)],
            1.0,
            4,
            0.04,
            rng,
        );
        let momentum = FourierPath::random_field(0.8, 3, rng);
        Self { path, momentum }
    }

    /// Sample (φ, α) on the uniform grid with the requested scheme.
    pub fn sample(&self, n: usize, scheme: DiffScheme) -> CotangentPoint {
        let curve = self
            .path
            .curve(n)
            .expect("analytic loop embeds")
            .with_scheme(scheme);
        let m = self.momentum.sample(n);
        CotangentPoint::single(curve, Augmentation::from_momentum(m)).unwrap()
    }

    /// Sample the reparametrized point ψ·(φ, α) = (φ∘ψ, ψ*α):
    /// nodes φ(ψ(s_i)) and momentum ψ′(s_i)·m(ψ(s_i)).
    pub fn sample_reparam(&self, psi: &ReparamMap, n: usize, scheme: DiffScheme) -> CotangentPoint {
        let nodes: Vec<Vec2> = (0..n)
            .map(|i| self.path.eval(psi.eval(i as f64 / n as f64)))
            .collect();
        let m: Vec<Vec2> = (0..n)
            .map(|i| {
                let s = i as f64 / n as f64;
                vec2::scale(self.momentum.eval(psi.eval(s)), psi.deriv(s))
            })
            .collect();
        let curve = isodrast_core::DiscreteCurve::new(nodes, isodrast_core::Ambient::Plane)
            .expect("reparametrized loop embeds")
            .with_scheme(scheme);
        CotangentPoint::single(curve, Augmentation::from_momentum(m)).unwrap()
    }

    /// Exact pullback density r(s) = ⟨m(s), φ′(s)⟩.
    pub fn exact_pullback(&self, s: f64) -> f64 {
        vec2::dot(self.momentum.eval(s), self.path.deriv(s))
    }

    /// Exact pullback of the reparametrized point:
    /// (ψ*ρ)(s) = ψ′(s)²·r(ψ(s)).
    pub fn exact_pullback_reparam(&self, psi: &ReparamMap, s: f64) -> f64 {
        let d = psi.deriv(s);
        d * d * self.exact_pullback(psi.eval(s))
    }
}
