//! Periodic differentiation, quadrature and trigonometric interpolation on
//! the uniform parameter grid s_i = i/N of the circle.
//!
//! Two differentiation schemes are provided:
//!
//! * [`DiffScheme::Central4`] — 4th-order central differences, the default.
//!   Its convergence order is measured by the acceptance suite.
//! * [`DiffScheme::Trig`] — trigonometric (spectral) differentiation via the
//!   dense circulant matrix, exact for band-limited samples.  Used wherever
//!   an identity has to hold to near machine precision.
//!
//! Both schemes are antisymmetric with respect to the uniform-grid inner
//! product Σ f_i g_i Δs, which several moment-map identities rely on.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffScheme {
    #[default]
    Central4,
    Trig,
}

/// Derivative d/ds of periodic samples on s_i = i/N.
pub fn derivative_periodic(values: &[f64], scheme: DiffScheme) -> Vec<f64> {
    match scheme {
        DiffScheme::Central4 => central4(values),
        DiffScheme::Trig => trig_derivative(values),
    }
}

fn central4(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "need at least 5 samples for central differences");
    let scale = n as f64 / 12.0; // 1/(12 Δs)
    (0..n)
        .map(|i| {
            let p1 = f[(i + 1) % n];
            let m1 = f[(i + n - 1) % n];
            let p2 = f[(i + 2) % n];
            let m2 = f[(i + n - 2) % n];
            (8.0 * (p1 - m1) - (p2 - m2)) * scale
        })
        .collect()
}

fn trig_derivative(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 2);
    let kernel = trig_kernel(n);
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for (k, w) in kernel.iter().enumerate().skip(1) {
                acc += w * f[(i + n - k) % n];
            }
            acc
        })
        .collect()
}

/// Row kernel of the spectral differentiation matrix for period 1:
/// (f')_i = Σ_k kernel[k] · f_{i−k}.
fn trig_kernel(n: usize) -> Vec<f64> {
    use std::f64::consts::PI;
    let mut w = vec![0.0; n];
    for (k, wk) in w.iter_mut().enumerate().skip(1) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let x = PI * k as f64 / n as f64;
        *wk = if n.is_multiple_of(2) {
            PI * sign * x.cos() / x.sin()
        } else {
            PI * sign / x.sin()
        };
    }
    w
}

/// Periodic rectangle rule ∫₀¹ f ds ≈ Σ f_i / N (spectrally accurate for
/// smooth periodic integrands).
pub fn integrate_periodic(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Real trigonometric interpolant of periodic samples,
/// f(s) = a₀/2 + Σ_k a_k cos 2πks + b_k sin 2πks,
/// built by a direct O(N²) discrete Fourier transform.
#[derive(Debug, Clone)]
pub struct TrigSeries {
    /// a[0] is twice the mean; cosine coefficients a[k] for k ≥ 1.
    a: Vec<f64>,
    b: Vec<f64>,
    even: bool,
}

impl TrigSeries {
    pub fn from_samples(f: &[f64]) -> Self {
        use std::f64::consts::TAU;
        let n = f.len();
        let kmax = n / 2;
        let mut a = vec![0.0; kmax + 1];
        let mut b = vec![0.0; kmax + 1];
        for k in 0..=kmax {
            let mut ca = 0.0;
            let mut cb = 0.0;
            for (j, fj) in f.iter().enumerate() {
                let t = TAU * (k * j % n) as f64 / n as f64;
                ca += fj * t.cos();
                cb += fj * t.sin();
            }
            a[k] = 2.0 * ca / n as f64;
            b[k] = 2.0 * cb / n as f64;
        }
        let even = n.is_multiple_of(2);
        if even {
            // Nyquist mode is represented by a[kmax]/2 · cos.
            b[kmax] = 0.0;
        }
        Self { a, b, even }
    }

    pub fn mean(&self) -> f64 {
        self.a[0] / 2.0
    }

    pub fn eval(&self, s: f64) -> f64 {
        use std::f64::consts::TAU;
        let kmax = self.a.len() - 1;
        let mut acc = self.a[0] / 2.0;
        for k in 1..=kmax {
            let w = if self.even && k == kmax { 0.5 } else { 1.0 };
            let t = TAU * k as f64 * s;
            acc += w * (self.a[k] * t.cos() + self.b[k] * t.sin());
        }
        acc
    }

    pub fn eval_derivative(&self, s: f64) -> f64 {
        use std::f64::consts::TAU;
        let kmax = self.a.len() - 1;
        let mut acc = 0.0;
        for k in 1..=kmax {
            let w = if self.even && k == kmax { 0.5 } else { 1.0 };
            let om = TAU * k as f64;
            let t = om * s;
            acc += w * om * (-self.a[k] * t.sin() + self.b[k] * t.cos());
        }
        acc
    }

    /// Mean-zero periodic antiderivative; requires the samples to have
    /// (numerically) zero mean for the result to be periodic.
    pub fn antiderivative(&self) -> TrigSeries {
        use std::f64::consts::TAU;
        let kmax = self.a.len() - 1;
        let mut a = vec![0.0; kmax + 1];
        let mut b = vec![0.0; kmax + 1];
        for k in 1..=kmax {
            let om = TAU * k as f64;
            // ∫ a cos + b sin = (a sin − b cos)/ω
            a[k] = -self.b[k] / om;
            b[k] = self.a[k] / om;
        }
        TrigSeries {
            a,
            b,
            even: self.even,
        }
    }

    pub fn sample(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.eval(i as f64 / n as f64)).collect()
    }
}
