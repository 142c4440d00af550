//! Prequantization certificates: exact gcd/Bézout arithmetic on the
//! squared component lengths, and numerical verification of the lattice
//! generator pairings ∫ i_{Y_i}ρ = l_i².
//!
//! The generator Y_i is the positively oriented field of constant length
//! l_i for the metric and orientation carried by ρ_i; with ν = v(s)ds and
//! r = v|v| this is Y_i(s) = l_i/v(s), and
//! ∫ i_{Y_i}ρ = ∫ |v|·v·Y_i ds = l_i ∫ |v| ds = l_i².

use crate::density::{length_spectrum, DensityError, OneFormDensity};
use crate::diff::integrate_periodic;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrequantError {
    #[error("certificate entries must be positive integers; entry {index} is {value}")]
    NonPositiveEntry { index: usize, value: i64 },
    #[error(
        "component {component} has l² = {l_squared} further than 1e-6 from an integer; \
         certificate refused"
    )]
    NonIntegerLength { component: usize, l_squared: f64 },
    #[error(transparent)]
    Density(#[from] DensityError),
}

/// n·m_i = l_i² with gcd(m) = 1 and Σ m_i·bezout_i = 1, all exact.
#[derive(Debug, Clone, PartialEq)]
pub struct PrequantCertificate {
    pub l_squared: Vec<i64>,
    /// n = gcd(l_1², …, l_k²).
    pub n: i64,
    /// m_i = l_i²/n, coprime.
    pub m: Vec<i64>,
    pub bezout: Vec<i64>,
}

impl PrequantCertificate {
    /// Exact check of all certificate identities.
    pub fn verify(&self) -> bool {
        let k = self.l_squared.len();
        if self.m.len() != k || self.bezout.len() != k {
            return false;
        }
        let gcd_all = self.m.iter().fold(0i64, |g, &m| gcd(g, m));
        let bezout_sum: i128 = self
            .m
            .iter()
            .zip(&self.bezout)
            .map(|(&m, &b)| m as i128 * b as i128)
            .sum();
        self.l_squared
            .iter()
            .zip(&self.m)
            .all(|(&l2, &m)| self.n as i128 * m as i128 == l2 as i128)
            && gcd_all == 1
            && bezout_sum == 1
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended Euclid: returns (g, x, y) with a·x + b·y = g = gcd(a, b).
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_r, old_s, old_t)
}

/// Certificate of the squared lengths: n, the coprime quotients, and a
/// Bézout vector, computed by a left fold of extended Euclid with
/// coefficient reduction at every step so the coefficients stay small.
pub fn certificate(lsq: &[i64]) -> Result<PrequantCertificate, PrequantError> {
    assert!(!lsq.is_empty());
    for (index, &value) in lsq.iter().enumerate() {
        if value < 1 {
            return Err(PrequantError::NonPositiveEntry { index, value });
        }
    }
    let n = lsq.iter().fold(0i64, |g, &v| gcd(g, v));
    let m: Vec<i64> = lsq.iter().map(|&v| v / n).collect();

    // Fold over m, maintaining Σ coeffs_j · m_j = g exactly.
    let mut g = m[0] as i128;
    let mut coeffs: Vec<i128> = vec![1];
    for (i, &mi) in m.iter().enumerate().skip(1) {
        let mi = mi as i128;
        let (g_new, x, y) = ext_gcd(g, mi);
        for c in coeffs.iter_mut() {
            *c *= x;
        }
        coeffs.push(y);
        // Reduce earlier coefficients modulo m_i/g_new, compensating on the
        // last coefficient; keeps every entry well inside i64 range.
        let modulus = mi / g_new;
        if modulus > 1 {
            let mut carry: i128 = 0;
            for (j, c) in coeffs.iter_mut().take(i).enumerate() {
                let t = c.div_euclid(modulus);
                *c -= t * modulus;
                carry += t * (m[j] as i128 / g_new);
            }
            let last = coeffs.len() - 1;
            coeffs[last] += carry;
        }
        g = g_new;
    }
    debug_assert_eq!(g, 1);
    let bezout: Vec<i64> = coeffs
        .iter()
        .map(|&c| i64::try_from(c).expect("reduced Bézout coefficient fits i64"))
        .collect();
    let cert = PrequantCertificate {
        l_squared: lsq.to_vec(),
        n,
        m,
        bezout,
    };
    debug_assert!(cert.verify());
    Ok(cert)
}

/// Round the squared lengths of a density to exact integers, refusing
/// anything further than 1e-6 from an integer.
pub fn certificate_from_density(
    rho: &OneFormDensity,
) -> Result<PrequantCertificate, PrequantError> {
    let spectrum = length_spectrum(rho)?;
    let mut lsq = Vec::with_capacity(spectrum.lengths.len());
    for (component, l) in spectrum.lengths.iter().enumerate() {
        let l2 = l * l;
        let rounded = l2.round();
        if (l2 - rounded).abs() > 1e-6 {
            return Err(PrequantError::NonIntegerLength {
                component,
                l_squared: l2,
            });
        }
        lsq.push(rounded as i64);
    }
    certificate(&lsq)
}

/// Per-component verification of the generator pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingReport {
    pub lengths: Vec<f64>,
    /// ∫ i_{Y_i}ρ per component.
    pub pairings: Vec<f64>,
    /// |pairing_i − l_i²|.
    pub defects: Vec<f64>,
    /// Present when every l² is within 1e-6 of an integer.
    pub certificate: Option<PrequantCertificate>,
    /// |(1/n)·pairing(Y_i/m_i) − 1| per component, when certified.
    pub reconstruction_defects: Option<Vec<f64>>,
}

impl PairingReport {
    pub fn max_defect(&self) -> f64 {
        self.defects.iter().cloned().fold(0.0, f64::max)
    }
}

/// Build Y_i = l_i/v(s) per component and evaluate ∫ |v|·v·Y_i ds, which
/// must reproduce l_i²; when the squared lengths are integers, also check
/// the unit reconstruction (1/n)·pairing(Y_i/m_i) = 1.
pub fn verify_generator_pairing(rho: &OneFormDensity) -> Result<PairingReport, PrequantError> {
    rho.check_nowhere_zero()?;
    let spectrum = length_spectrum(rho)?;
    let mut pairings = Vec::new();
    let mut defects = Vec::new();
    for (vals, l) in rho.components().iter().zip(&spectrum.lengths) {
        let integrand: Vec<f64> = vals
            .iter()
            .map(|&r| {
                let v = r.signum() * r.abs().sqrt();
                // |v| · v · (l/v) = |v| · l
                v.abs() * v * (l / v)
            })
            .collect();
        let pairing = integrate_periodic(&integrand);
        pairings.push(pairing);
        defects.push((pairing - l * l).abs());
    }
    let certificate = certificate_from_density(rho).ok();
    let reconstruction_defects = certificate.as_ref().map(|cert| {
        pairings
            .iter()
            .zip(&cert.m)
            .map(|(p, &mi)| (p / (cert.n as f64 * mi as f64) - 1.0).abs())
            .collect()
    });
    Ok(PairingReport {
        lengths: spectrum.lengths,
        pairings,
        defects,
        certificate,
        reconstruction_defects,
    })
}
