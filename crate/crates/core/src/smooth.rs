//! The standard C^∞ plateau bump used for cutoffs:
//! 1 on [−a, a], exp(1 − 1/(1 − u²)) with u = (|t| − a)/w on the transition
//! band, 0 beyond a + w.

#[derive(Debug, Clone, Copy)]
pub struct PlateauBump {
    /// Plateau half-width a ≥ 0.
    pub plateau: f64,
    /// Transition band width w > 0.
    pub width: f64,
}

impl PlateauBump {
    pub fn new(plateau: f64, width: f64) -> Self {
        assert!(plateau >= 0.0 && width > 0.0);
        Self { plateau, width }
    }

    pub fn support_radius(&self) -> f64 {
        self.plateau + self.width
    }

    pub fn value(&self, t: f64) -> f64 {
        let r = t.abs();
        if r <= self.plateau {
            1.0
        } else if r >= self.plateau + self.width {
            0.0
        } else {
            let u = (r - self.plateau) / self.width;
            (1.0 - 1.0 / (1.0 - u * u)).exp()
        }
    }

    /// dλ/dt (odd in t).
    pub fn d1(&self, t: f64) -> f64 {
        let r = t.abs();
        if r <= self.plateau || r >= self.plateau + self.width {
            return 0.0;
        }
        let u = (r - self.plateau) / self.width;
        let q = 1.0 - u * u;
        let v = (1.0 - 1.0 / q).exp();
        let du = -2.0 * u / (q * q); // d/du of (1 − 1/q)
        v * du / self.width * t.signum()
    }

    /// d²λ/dt².
    pub fn d2(&self, t: f64) -> f64 {
        let r = t.abs();
        if r <= self.plateau || r >= self.plateau + self.width {
            return 0.0;
        }
        let u = (r - self.plateau) / self.width;
        let q = 1.0 - u * u;
        let v = (1.0 - 1.0 / q).exp();
        let g = -2.0 * u / (q * q);
        let dg = -2.0 / (q * q) - 8.0 * u * u / (q * q * q);
        (v * g * g + v * dg) / (self.width * self.width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        let b = PlateauBump::new(0.3, 0.5);
        assert_eq!(b.value(0.0), 1.0);
        assert_eq!(b.value(0.3), 1.0);
        assert_eq!(b.value(-0.2), 1.0);
        assert_eq!(b.value(0.8), 0.0);
        assert_eq!(b.value(5.0), 0.0);
        let mid = b.value(0.55);
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let b = PlateauBump::new(0.3, 0.5);
        for t in [0.35, 0.5, 0.62, 0.75, -0.45] {
            let h = 1e-6;
            let fd1 = (b.value(t + h) - b.value(t - h)) / (2.0 * h);
            let tol1 = 1e-5 * (1.0 + fd1.abs());
            assert!((b.d1(t) - fd1).abs() < tol1, "t={t}: {} vs {fd1}", b.d1(t));
            let h = 1e-4;
            let fd2 = (b.value(t + h) - 2.0 * b.value(t) + b.value(t - h)) / (h * h);
            let tol2 = 1e-3 * (1.0 + fd2.abs());
            assert!((b.d2(t) - fd2).abs() < tol2, "t={t}: {} vs {fd2}", b.d2(t));
        }
    }
}
