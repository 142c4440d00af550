//! Discretized regular cotangent bundle of the space of embeddings:
//! tautological and symplectic pairings, lifted group actions, and quotient
//! classes over foliation leaves.
//!
//! A point is a disjoint family of curves φ together with one augmentation
//! per component.  All pairings see the augmentation only through the
//! per-node momentum m = w·c.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * θ(ξ) = Σ ⟨m_i, δφ_i⟩ Δs — the tautological form.
//! * ω(ξ₁, ξ₂) = Σ [⟨δm₂, δφ₁⟩ − ⟨δm₁, δφ₂⟩] Δs — the canonical dq∧dp
//!   pairing, so the Hamilton identity reads d⟨J, X⟩ = ω(ζ_X, ·).
//! * Hamiltonian fields are X_h = (∂h/∂y, −∂h/∂x), i.e. i_{X_h}μ = dh for
//!   μ = dx∧dy.
//! * For a positively oriented curve, the ε_C covector points inward, so
//!   θ(ε_C against the outward normal) = −(arc length).

use crate::curve::{CurveError, CurveFamily, DiscreteCurve};
use crate::density::{epsilon_section, Augmentation, DensityError};
use crate::diff::derivative_periodic;
use crate::fields::AmbientField;
use crate::flow::flow_point_with_jacobian;
use crate::linalg;
use crate::vec2::{self, Vec2};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhaseError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Which foliation a quotient class lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeafKind {
    Isodrastic,
    Isovolume,
}

/// (φ, α): a curve family with one augmentation per component.
#[derive(Debug, Clone)]
pub struct CotangentPoint {
    family: CurveFamily,
    augs: Vec<Augmentation>,
}

impl CotangentPoint {
    pub fn new(family: CurveFamily, augs: Vec<Augmentation>) -> Result<Self, PhaseError> {
        if family.len() != augs.len() {
            return Err(PhaseError::ShapeMismatch(format!(
                "{} curves but {} augmentations",
                family.len(),
                augs.len()
            )));
        }
        for (curve, aug) in family.curves().iter().zip(&augs) {
            aug.check_attached(curve)?;
        }
        Ok(Self { family, augs })
    }

    pub fn single(curve: DiscreteCurve, aug: Augmentation) -> Result<Self, PhaseError> {
        Self::new(CurveFamily::single(curve), vec![aug])
    }

    pub fn family(&self) -> &CurveFamily {
        &self.family
    }

    pub fn augs(&self) -> &[Augmentation] {
        &self.augs
    }

    pub fn momenta(&self) -> Vec<Vec<Vec2>> {
        self.augs.iter().map(|a| a.momentum()).collect()
    }

    /// p + h·ξ in the flat per-node coordinates (φ, m).  Skips the
    /// simplicity sweep; meant for finite differencing.
    pub fn displaced(&self, xi: &PhaseTangent, h: f64) -> Result<CotangentPoint, PhaseError> {
        xi.check_shape(self)?;
        let mut curves = Vec::with_capacity(self.family.len());
        let mut augs = Vec::with_capacity(self.family.len());
        for (j, curve) in self.family.curves().iter().enumerate() {
            let nodes: Vec<Vec2> = curve
                .nodes()
                .iter()
                .zip(&xi.dphi[j])
                .map(|(p, d)| vec2::add(*p, vec2::scale(*d, h)))
                .collect();
            curves.push(DiscreteCurve::new_unchecked(
                nodes,
                curve.ambient(),
                curve.scheme(),
            )?);
            let m: Vec<Vec2> = self.augs[j]
                .momentum()
                .iter()
                .zip(&xi.dmom[j])
                .map(|(m, d)| vec2::add(*m, vec2::scale(*d, h)))
                .collect();
            augs.push(self.augs[j].with_momentum(&m));
        }
        Ok(CotangentPoint {
            family: self.family.with_replaced_curves(curves),
            augs,
        })
    }
}

/// Tangent vector at a cotangent point: per-component node displacements
/// δφ and momentum variations δ(wc).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTangent {
    pub dphi: Vec<Vec<Vec2>>,
    pub dmom: Vec<Vec<Vec2>>,
}

impl PhaseTangent {
    pub fn zero_like(p: &CotangentPoint) -> Self {
        let dphi = p
            .family()
            .curves()
            .iter()
            .map(|c| vec![[0.0, 0.0]; c.n()])
            .collect::<Vec<_>>();
        Self {
            dphi: dphi.clone(),
            dmom: dphi,
        }
    }

    pub fn check_shape(&self, p: &CotangentPoint) -> Result<(), PhaseError> {
        if self.dphi.len() != p.family().len() || self.dmom.len() != p.family().len() {
            return Err(PhaseError::ShapeMismatch(
                "component count differs from base point".into(),
            ));
        }
        for (j, curve) in p.family().curves().iter().enumerate() {
            if self.dphi[j].len() != curve.n() || self.dmom[j].len() != curve.n() {
                return Err(PhaseError::ShapeMismatch(format!(
                    "component {j}: {} nodes vs tangent {}",
                    curve.n(),
                    self.dphi[j].len()
                )));
            }
        }
        Ok(())
    }

    pub fn scaled(&self, t: f64) -> Self {
        let sc = |v: &Vec<Vec<Vec2>>| {
            v.iter()
                .map(|c| c.iter().map(|x| vec2::scale(*x, t)).collect())
                .collect()
        };
        Self {
            dphi: sc(&self.dphi),
            dmom: sc(&self.dmom),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let ad = |a: &Vec<Vec<Vec2>>, b: &Vec<Vec<Vec2>>| {
            a.iter()
                .zip(b)
                .map(|(ca, cb)| ca.iter().zip(cb).map(|(x, y)| vec2::add(*x, *y)).collect())
                .collect()
        };
        Self {
            dphi: ad(&self.dphi, &other.dphi),
            dmom: ad(&self.dmom, &other.dmom),
        }
    }

    /// Stacked column vector [δφ; δ(wc)] over all components (4N entries).
    pub fn to_column(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for comp in &self.dphi {
            for v in comp {
                out.extend_from_slice(v);
            }
        }
        for comp in &self.dmom {
            for v in comp {
                out.extend_from_slice(v);
            }
        }
        out
    }
}

/// θ(ξ) = Σ_i ⟨m_i, δφ_i⟩ Δs.
pub fn theta_eval(p: &CotangentPoint, xi: &PhaseTangent) -> Result<f64, PhaseError> {
    xi.check_shape(p)?;
    let mut acc = 0.0;
    for (j, curve) in p.family().curves().iter().enumerate() {
        let ds = curve.delta_s();
        let m = p.augs()[j].momentum();
        for (mi, di) in m.iter().zip(&xi.dphi[j]) {
            acc += vec2::dot(*mi, *di) * ds;
        }
    }
    Ok(acc)
}

/// ω(ξ₁, ξ₂) = Σ_i [⟨δm₂, δφ₁⟩ − ⟨δm₁, δφ₂⟩] Δs.
pub fn omega_eval(
    p: &CotangentPoint,
    xi1: &PhaseTangent,
    xi2: &PhaseTangent,
) -> Result<f64, PhaseError> {
    xi1.check_shape(p)?;
    xi2.check_shape(p)?;
    let mut acc = 0.0;
    for (j, curve) in p.family().curves().iter().enumerate() {
        let ds = curve.delta_s();
        for i in 0..curve.n() {
            acc += (vec2::dot(xi2.dmom[j][i], xi1.dphi[j][i])
                - vec2::dot(xi1.dmom[j][i], xi2.dphi[j][i]))
                * ds;
        }
    }
    Ok(acc)
}

/// Infinitesimal reparametrization action of Y ∈ 𝔛(S):
/// δφ = Y·φ′ and δ(wc) = d/ds(Y·w·c) per covector component.
pub fn lift_reparam(y: &[Vec<f64>], p: &CotangentPoint) -> Result<PhaseTangent, PhaseError> {
    if y.len() != p.family().len() {
        return Err(PhaseError::ShapeMismatch(
            "one reparametrization field per component required".into(),
        ));
    }
    let mut dphi = Vec::new();
    let mut dmom = Vec::new();
    for (j, curve) in p.family().curves().iter().enumerate() {
        if y[j].len() != curve.n() {
            return Err(PhaseError::ShapeMismatch(format!(
                "component {j}: field has {} samples, curve {} nodes",
                y[j].len(),
                curve.n()
            )));
        }
        let tangents = curve.tangents();
        let m = p.augs()[j].momentum();
        dphi.push(
            tangents
                .iter()
                .zip(&y[j])
                .map(|(t, yi)| vec2::scale(*t, *yi))
                .collect::<Vec<_>>(),
        );
        let prod_x: Vec<f64> = m.iter().zip(&y[j]).map(|(mi, yi)| mi[0] * yi).collect();
        let prod_y: Vec<f64> = m.iter().zip(&y[j]).map(|(mi, yi)| mi[1] * yi).collect();
        let dx = derivative_periodic(&prod_x, curve.scheme());
        let dy = derivative_periodic(&prod_y, curve.scheme());
        dmom.push(dx.into_iter().zip(dy).map(|(a, b)| [a, b]).collect());
    }
    Ok(PhaseTangent { dphi, dmom })
}

/// Infinitesimal ambient action of X ∈ 𝔛(M) under the cotangent lift:
/// δφ = X(φ), δc = −DX(φ)ᵀ c, δw = 0 (so δm = −DXᵀ m).
pub fn lift_ambient(field: &dyn AmbientField, p: &CotangentPoint) -> PhaseTangent {
    let mut dphi = Vec::new();
    let mut dmom = Vec::new();
    for (j, curve) in p.family().curves().iter().enumerate() {
        let m = p.augs()[j].momentum();
        let mut dp = Vec::with_capacity(curve.n());
        let mut dm = Vec::with_capacity(curve.n());
        for (node, mi) in curve.nodes().iter().zip(&m) {
            dp.push(field.value(*node));
            let jac = field.jacobian(*node);
            dm.push(vec2::scale(vec2::mat_transpose_vec(jac, *mi), -1.0));
        }
        dphi.push(dp);
        dmom.push(dm);
    }
    PhaseTangent { dphi, dmom }
}

/// Transport p by the time-t flow of an ambient field: nodes advect, the
/// covector part is carried by the inverse-transpose flow Jacobian (the
/// cotangent lift); weights are untouched.
pub fn flow_transport(
    p: &CotangentPoint,
    field: &dyn AmbientField,
    t: f64,
    dt: f64,
) -> Result<CotangentPoint, PhaseError> {
    let mut curves = Vec::new();
    let mut augs = Vec::new();
    for (j, curve) in p.family().curves().iter().enumerate() {
        let m = p.augs()[j].momentum();
        let mut nodes = Vec::with_capacity(curve.n());
        let mut mom = Vec::with_capacity(curve.n());
        for (node, mi) in curve.nodes().iter().zip(&m) {
            let (q, jac) = flow_point_with_jacobian(*node, field, t, dt);
            nodes.push(q);
            mom.push(vec2::mat_transpose_solve(jac, *mi));
        }
        curves.push(DiscreteCurve::new_unchecked(
            nodes,
            curve.ambient(),
            curve.scheme(),
        )?);
        augs.push(p.augs()[j].with_momentum(&mom));
    }
    Ok(CotangentPoint {
        family: p.family().with_replaced_curves(curves),
        augs,
    })
}

/// A cotangent point regarded modulo the annihilator of the leaf:
/// α ~ α + Σ_j c_j ε_{C_j}, with (c_j) restricted to the allowed span for
/// the isovolume kind.
#[derive(Debug, Clone)]
pub struct QuotientClass {
    point: CotangentPoint,
    kind: LeafKind,
}

impl QuotientClass {
    pub fn new(point: CotangentPoint, kind: LeafKind) -> Self {
        Self { point, kind }
    }

    pub fn point(&self) -> &CotangentPoint {
        &self.point
    }

    pub fn kind(&self) -> LeafKind {
        self.kind
    }
}

/// L²-orthogonal projector onto the complement of the allowed ε_C span.
pub struct LeafProjector {
    /// ε momentum block per component.
    eps: Vec<Vec<Vec2>>,
    /// Allowed combinations: each basis vector is a coefficient per component.
    comb: Vec<Vec<f64>>,
    /// Gram matrix inverse of the (block-diagonal-weighted) basis.
    gram_inv: DMatrix<f64>,
    /// ⟨ε_j, ε_j⟩ per component.
    eps_norms: Vec<f64>,
}

impl LeafProjector {
    pub fn new(family: &CurveFamily, kind: LeafKind) -> Result<Self, PhaseError> {
        let k = family.len();
        let eps: Vec<Vec<Vec2>> = family
            .curves()
            .iter()
            .map(|c| epsilon_section(c).map(|e| e.momentum()))
            .collect::<Result<_, _>>()?;
        let eps_norms: Vec<f64> = eps
            .iter()
            .zip(family.curves())
            .map(|(e, c)| e.iter().map(|m| vec2::dot(*m, *m)).sum::<f64>() * c.delta_s())
            .collect();
        let comb: Vec<Vec<f64>> = match kind {
            LeafKind::Isodrastic => (0..k)
                .map(|j| (0..k).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
            LeafKind::Isovolume => {
                // Allowed constants annihilate the pullbacks of the
                // compactly supported degree-one generators.  In the plane
                // there are none; on the torus the rows are the
                // per-component generator fluxes (∮dx, ∮dy).
                let fluxes = family.generator_fluxes();
                let mut rows: Vec<Vec<f64>> = Vec::new();
                for d in 0..2 {
                    let row: Vec<f64> = fluxes.iter().map(|f| f[d]).collect();
                    if row.iter().any(|v| v.abs() > 1e-12) {
                        rows.push(row);
                    }
                }
                if rows.is_empty() {
                    (0..k)
                        .map(|j| (0..k).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
                        .collect()
                } else {
                    let g = DMatrix::from_fn(rows.len(), k, |r, c| rows[r][c]);
                    let null = linalg::nullspace(&g);
                    (0..null.ncols())
                        .map(|b| (0..k).map(|j| null[(j, b)]).collect())
                        .collect()
                }
            }
        };
        let nb = comb.len();
        let mut gram = DMatrix::zeros(nb, nb);
        for a in 0..nb {
            for b in 0..nb {
                gram[(a, b)] = (0..k).map(|j| comb[a][j] * comb[b][j] * eps_norms[j]).sum();
            }
        }
        let gram_inv = gram
            .try_inverse()
            .expect("leaf basis Gram matrix is positive definite");
        Ok(Self {
            eps,
            comb,
            gram_inv,
            eps_norms,
        })
    }

    pub fn basis_dim(&self) -> usize {
        self.comb.len()
    }

    /// Remove the allowed-span component from per-component momentum blocks.
    pub fn project_momenta(&self, family: &CurveFamily, momenta: &mut [Vec<Vec2>]) {
        let k = momenta.len();
        let nb = self.comb.len();
        if nb == 0 {
            return;
        }
        let mut rhs = vec![0.0; nb];
        for (b, cb) in self.comb.iter().enumerate() {
            for j in 0..k {
                let ds = family.curves()[j].delta_s();
                let inner: f64 = momenta[j]
                    .iter()
                    .zip(&self.eps[j])
                    .map(|(m, e)| vec2::dot(*m, *e))
                    .sum::<f64>()
                    * ds;
                rhs[b] += cb[j] * inner;
            }
        }
        let mut coef = vec![0.0; nb];
        for (a, ca) in coef.iter_mut().enumerate() {
            for (b, rb) in rhs.iter().enumerate() {
                *ca += self.gram_inv[(a, b)] * rb;
            }
        }
        for (j, mj) in momenta.iter_mut().enumerate() {
            let total: f64 = coef
                .iter()
                .zip(&self.comb)
                .map(|(cb, comb)| cb * comb[j])
                .sum();
            if total != 0.0 {
                for (m, e) in mj.iter_mut().zip(&self.eps[j]) {
                    *m = vec2::sub(*m, vec2::scale(*e, total));
                }
            }
        }
    }

    /// ⟨ε_j, ε_j⟩ norms (exposed for diagnostics).
    pub fn eps_norms(&self) -> &[f64] {
        &self.eps_norms
    }
}

/// Canonical representative of the class: the unique member whose momentum
/// has zero discrete L² pairing with every allowed ε_{C_j} combination.
pub fn quotient_project(q: &QuotientClass) -> Result<CotangentPoint, PhaseError> {
    let projector = LeafProjector::new(q.point().family(), q.kind())?;
    let mut momenta = q.point().momenta();
    projector.project_momenta(q.point().family(), &mut momenta);
    let augs = q
        .point()
        .augs()
        .iter()
        .zip(&momenta)
        .map(|(a, m)| a.with_momentum(m))
        .collect();
    CotangentPoint::new(q.point().family().clone(), augs)
}

/// Project the vertical (δm) part of a tangent onto the leaf model.
pub fn project_tangent(
    family: &CurveFamily,
    kind: LeafKind,
    xi: &PhaseTangent,
) -> Result<PhaseTangent, PhaseError> {
    let projector = LeafProjector::new(family, kind)?;
    let mut dmom = xi.dmom.clone();
    projector.project_momenta(family, &mut dmom);
    Ok(PhaseTangent {
        dphi: xi.dphi.clone(),
        dmom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::DiscreteCurve;
    use crate::density::pullback_density;
    use crate::diff::{integrate_periodic, DiffScheme};
    use crate::fields::{HamiltonianSpec, ZeroField};
    use std::f64::consts::TAU;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 / n as f64).collect()
    }

    fn circle_point(n: usize) -> CotangentPoint {
        let c = DiscreteCurve::circle([0.0, 0.0], 1.0, n).with_scheme(DiffScheme::Trig);
        let m: Vec<Vec2> = grid(n)
            .iter()
            .map(|s| {
                [
                    0.4 + 0.3 * (TAU * s).cos(),
                    -0.2 + 0.5 * (2.0 * TAU * s).sin(),
                ]
            })
            .collect();
        CotangentPoint::single(c, Augmentation::from_momentum(m)).unwrap()
    }

    fn random_tangent(p: &CotangentPoint, seed: u64) -> PhaseTangent {
        let mut rng = crate::rng::SplitMix64::new(seed);
        let mut xi = PhaseTangent::zero_like(p);
        for j in 0..p.family().len() {
            for i in 0..p.family().curves()[j].n() {
                xi.dphi[j][i] = [rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)];
                xi.dmom[j][i] = [rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)];
            }
        }
        xi
    }

    #[test]
    fn theta_of_vertical_vector_vanishes() {
        let p = circle_point(64);
        let mut xi = PhaseTangent::zero_like(&p);
        for m in xi.dmom[0].iter_mut() {
            *m = [1.3, -0.4];
        }
        assert_eq!(theta_eval(&p, &xi).unwrap(), 0.0);
    }

    #[test]
    fn theta_of_epsilon_against_outward_normal_is_minus_arclength() {
        let n = 256;
        let curve = DiscreteCurve::circle([0.0, 0.0], 1.0, n).with_scheme(DiffScheme::Trig);
        let eps = epsilon_section(&curve).unwrap();
        let p = CotangentPoint::single(curve.clone(), eps).unwrap();
        let mut xi = PhaseTangent::zero_like(&p);
        for (i, s) in grid(n).iter().enumerate() {
            xi.dphi[0][i] = [(TAU * s).cos(), (TAU * s).sin()]; // outward unit normal
        }
        let theta = theta_eval(&p, &xi).unwrap();
        let arclength = integrate_periodic(&curve.speeds());
        // Sign convention: ε_C points inward on a positively oriented curve.
        assert!((theta + arclength).abs() < 1e-9, "{theta} vs −{arclength}");
    }

    #[test]
    fn theta_of_reparam_lift_equals_right_moment() {
        let n = 128;
        let p = circle_point(n);
        let y: Vec<f64> = grid(n)
            .iter()
            .map(|s| 0.7 + 0.2 * (TAU * s).sin())
            .collect();
        let xi = lift_reparam(std::slice::from_ref(&y), &p).unwrap();
        let theta = theta_eval(&p, &xi).unwrap();
        let rho = pullback_density(p.family().curves().first().unwrap(), &p.augs()[0]).unwrap();
        let pairing: f64 = rho.components()[0]
            .iter()
            .zip(&y)
            .map(|(r, yi)| r * yi)
            .sum::<f64>()
            / n as f64;
        assert!((theta - pairing).abs() < 1e-12, "{theta} vs {pairing}");
    }

    #[test]
    fn omega_antisymmetric_and_bilinear() {
        let p = circle_point(64);
        let a = random_tangent(&p, 1);
        let b = random_tangent(&p, 2);
        let ab = omega_eval(&p, &a, &b).unwrap();
        let ba = omega_eval(&p, &b, &a).unwrap();
        assert_eq!(ab, -ba);
        assert_eq!(omega_eval(&p, &a, &a).unwrap(), 0.0);
        let combo = a.scaled(2.0).plus(&b.scaled(-3.0));
        let lhs = omega_eval(&p, &combo, &b).unwrap();
        let rhs = 2.0 * ab - 3.0 * omega_eval(&p, &b, &b).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn omega_of_two_vertical_vectors_vanishes() {
        let p = circle_point(64);
        let mut a = PhaseTangent::zero_like(&p);
        let mut b = PhaseTangent::zero_like(&p);
        for i in 0..64 {
            a.dmom[0][i] = [1.0, 2.0];
            b.dmom[0][i] = [-0.3, 0.8];
        }
        assert_eq!(omega_eval(&p, &a, &b).unwrap(), 0.0);
    }

    #[test]
    fn omega_matches_theta_finite_differences() {
        // ω(ξ₁, ξ₂) = D_{ξ₂}θ(ξ₁) − D_{ξ₁}θ(ξ₂) in the flat coordinates.
        let p = circle_point(64);
        let xi1 = random_tangent(&p, 3);
        let xi2 = random_tangent(&p, 4);
        let h = 1e-4;
        let d2 = (theta_eval(&p.displaced(&xi2, h).unwrap(), &xi1).unwrap()
            - theta_eval(&p.displaced(&xi2, -h).unwrap(), &xi1).unwrap())
            / (2.0 * h);
        let d1 = (theta_eval(&p.displaced(&xi1, h).unwrap(), &xi2).unwrap()
            - theta_eval(&p.displaced(&xi1, -h).unwrap(), &xi2).unwrap())
            / (2.0 * h);
        let fd = d2 - d1;
        let om = omega_eval(&p, &xi1, &xi2).unwrap();
        assert!((fd - om).abs() < 1e-9, "{fd} vs {om}");
    }

    #[test]
    fn lift_reparam_zero_and_constant() {
        let n = 64;
        let curve = DiscreteCurve::circle([0.0, 0.0], 1.0, n).with_scheme(DiffScheme::Trig);
        let m = vec![[0.3, -0.8]; n];
        let p = CotangentPoint::single(curve, Augmentation::from_momentum(m)).unwrap();
        let zero = lift_reparam(&[vec![0.0; n]], &p).unwrap();
        assert_eq!(theta_eval(&p, &zero).unwrap(), 0.0);
        for i in 0..n {
            assert_eq!(zero.dphi[0][i], [0.0, 0.0]);
            assert_eq!(zero.dmom[0][i], [0.0, 0.0]);
        }
        // Constant Y with constant momentum: δ(wc) = d/ds(const) = 0.
        let xi = lift_reparam(&[vec![0.5; n]], &p).unwrap();
        for i in 0..n {
            assert!(vec2::norm(xi.dmom[0][i]) < 1e-10);
            let t = p.family().curves()[0].tangents()[i];
            assert!(vec2::dist(xi.dphi[0][i], vec2::scale(t, 0.5)) < 1e-12);
        }
    }

    #[test]
    fn lift_ambient_zero_field_and_translation() {
        let p = circle_point(64);
        let zero = lift_ambient(&ZeroField, &p);
        assert_eq!(theta_eval(&p, &zero).unwrap(), 0.0);
        let spec = HamiltonianSpec::translation([0.0, 0.0], [0.4, -0.9], 4.0);
        let xi = lift_ambient(&spec.field(), &p);
        for i in 0..64 {
            assert!(vec2::dist(xi.dphi[0][i], [0.4, -0.9]) < 1e-14);
            assert_eq!(xi.dmom[0][i], [0.0, 0.0]); // zero Jacobian
        }
    }

    #[test]
    fn lift_ambient_matches_flow_transport_derivative() {
        let p = circle_point(64);
        let spec = HamiltonianSpec::gaussian([0.5, 0.3], 1.2, 0.7, 4.0);
        let field = spec.field();
        let xi = lift_ambient(&field, &p);
        let h = 1e-4;
        let plus = flow_transport(&p, &field, h, h).unwrap();
        let minus = {
            // Flow backwards: negate the field by negating the Hamiltonian.
            let neg = HamiltonianSpec::gaussian([0.5, 0.3], -1.2, 0.7, 4.0);
            flow_transport(&p, &neg.field(), h, h).unwrap()
        };
        let mp = plus.momenta();
        let mm = minus.momenta();
        let np = plus.family().curves()[0].nodes();
        let nm = minus.family().curves()[0].nodes();
        let n0 = p.family().curves()[0].nodes();
        for i in 0..64 {
            let fd_phi = vec2::scale(vec2::sub(np[i], nm[i]), 1.0 / (2.0 * h));
            assert!(
                vec2::dist(fd_phi, xi.dphi[0][i]) < 1e-7 * (1.0 + vec2::norm(xi.dphi[0][i])),
                "node {i}: {fd_phi:?} vs {:?}",
                xi.dphi[0][i]
            );
            let fd_m = vec2::scale(vec2::sub(mp[0][i], mm[0][i]), 1.0 / (2.0 * h));
            assert!(
                vec2::dist(fd_m, xi.dmom[0][i]) < 1e-7 * (1.0 + vec2::norm(xi.dmom[0][i])),
                "momentum {i}: {fd_m:?} vs {:?} (node {:?})",
                xi.dmom[0][i],
                n0[i]
            );
        }
    }

    #[test]
    fn quotient_projector_fixed_point_and_idempotent() {
        let n = 128;
        let curve = DiscreteCurve::circle([0.0, 0.0], 1.0, n).with_scheme(DiffScheme::Trig);
        let eps = epsilon_section(&curve).unwrap();
        // Tangential momentum is orthogonal to ε (pointwise, hence in L²).
        let tang: Vec<Vec2> = curve.tangents();
        let p = CotangentPoint::single(curve.clone(), Augmentation::from_momentum(tang)).unwrap();
        let q = QuotientClass::new(p.clone(), LeafKind::Isodrastic);
        let proj = quotient_project(&q).unwrap();
        for (a, b) in p.momenta()[0].iter().zip(&proj.momenta()[0]) {
            assert!(vec2::dist(*a, *b) < 1e-12);
        }
        // Adding 3ε projects back to the same representative.
        let shifted = Augmentation::combine(1.0, &p.augs()[0], 3.0, &eps);
        let p2 = CotangentPoint::single(curve, shifted).unwrap();
        let proj2 = quotient_project(&QuotientClass::new(p2, LeafKind::Isodrastic)).unwrap();
        for (a, b) in proj.momenta()[0].iter().zip(&proj2.momenta()[0]) {
            assert!(vec2::dist(*a, *b) < 1e-10, "{a:?} vs {b:?}");
        }
        // Idempotence.
        let proj3 =
            quotient_project(&QuotientClass::new(proj2.clone(), LeafKind::Isodrastic)).unwrap();
        for (a, b) in proj2.momenta()[0].iter().zip(&proj3.momenta()[0]) {
            assert!(vec2::dist(*a, *b) < 1e-12);
        }
    }
}
