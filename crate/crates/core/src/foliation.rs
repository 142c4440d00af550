//! Isodrastic and isovolume leaf machinery: flux functionals, leaf
//! invariants and same-leaf classification, the explicit volume-preserving
//! cylinder flow, and numerical codimension ranks.
//!
//! Classification semantics: `same_leaf` compares the computable leaf
//! invariants (region areas keyed by the nesting forest, or meridian
//! heights up to the allowed shifts).  Matching invariants along paths with
//! matched combinatorics characterize the leaf; verdicts therefore read
//! "invariants match", not a general ambient-isotopy claim.

use crate::curve::{CurveError, CurveFamily};
use crate::diff::{integrate_periodic, TrigSeries};
use crate::fields::FourierField2;
use crate::linalg;
use crate::phase::LeafKind;
use crate::rng::SplitMix64;
use crate::smooth::PlateauBump;
use crate::vec2::{self, Vec2};
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FoliationError {
    #[error("leaf kinds differ")]
    KindMismatch,
    #[error("not isodrastic: field has nonzero mean {0:e}")]
    NotIsodrastic(f64),
    #[error("battery too small to certify rank: {got} fields for {need} components")]
    BatteryTooSmall { need: usize, got: usize },
    #[error("deformation shape mismatch on component {0}")]
    ShapeMismatch(usize),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Per-component fluxes F_j = ∮_{C_j} i_ξ μ = Σ_i (ξ×φ′)_i Δs.
/// A deformation is tangent to the isodrastic distribution iff every
/// component flux vanishes.
pub fn isodrast_flux(
    family: &CurveFamily,
    deformation: &[Vec<Vec2>],
) -> Result<Vec<f64>, FoliationError> {
    if deformation.len() != family.len() {
        return Err(FoliationError::ShapeMismatch(deformation.len()));
    }
    let mut out = Vec::with_capacity(family.len());
    for (j, curve) in family.curves().iter().enumerate() {
        if deformation[j].len() != curve.n() {
            return Err(FoliationError::ShapeMismatch(j));
        }
        let tangents = curve.tangents();
        let flux: f64 = deformation[j]
            .iter()
            .zip(&tangents)
            .map(|(xi, t)| vec2::cross(*xi, *t))
            .sum::<f64>()
            * curve.delta_s();
        out.push(flux);
    }
    Ok(out)
}

/// One curve of the nesting forest with its immediate interior region area.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestNode {
    pub region_area: f64,
    pub children: Vec<ForestNode>,
}

impl ForestNode {
    /// Shape of the subtree, ignoring areas.
    fn shape(&self) -> String {
        let mut child_shapes: Vec<String> = self.children.iter().map(|c| c.shape()).collect();
        child_shapes.sort();
        format!("({})", child_shapes.join(""))
    }

    fn canonical_sort(&mut self) {
        for c in &mut self.children {
            c.canonical_sort();
        }
        self.children.sort_by(cmp_nodes);
    }
}

fn cmp_nodes(a: &ForestNode, b: &ForestNode) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match a.shape().cmp(&b.shape()) {
        Ordering::Equal => {}
        o => return o,
    }
    match a.region_area.partial_cmp(&b.region_area).unwrap() {
        Ordering::Equal => {}
        o => return o,
    }
    for (ca, cb) in a.children.iter().zip(&b.children) {
        match cmp_nodes(ca, cb) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

#[derive(Debug, Clone, PartialEq)]
pub enum LeafData {
    /// Plane scenes: nesting forest with region areas.
    Plane { roots: Vec<ForestNode> },
    /// Null-homotopic torus scenes: forest plus the remaining torus area.
    TorusNested { roots: Vec<ForestNode>, rest: f64 },
    /// Meridian-type torus scenes: sorted mean heights along the
    /// transverse modulus, plus the per-component generator fluxes
    /// (the allowed common-shift direction).
    TorusMeridians {
        heights: Vec<f64>,
        l_across: f64,
        generator_flux: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafInvariant {
    pub kind: LeafKind,
    pub data: LeafData,
    /// Set when equal-shape siblings have region areas within tolerance of
    /// one another, so region correspondence is not unique.
    pub ambiguous: bool,
}

/// Correspondence tolerance used when flagging ambiguous forests.
const AMBIGUITY_TOL: f64 = 1e-9;

fn build_forest_nodes(family: &CurveFamily, idx: usize) -> Result<ForestNode, CurveError> {
    // Region areas by the scheme-accurate line integral, so invariants are
    // stable under smooth area-preserving deformations.
    let own = family.curves()[idx].line_integral_area()?.abs();
    let inner: f64 = family
        .children(idx)
        .iter()
        .map(|&c| family.curves()[c].line_integral_area().map(|a| a.abs()))
        .sum::<Result<f64, _>>()?;
    let children = family
        .children(idx)
        .iter()
        .map(|&c| build_forest_nodes(family, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ForestNode {
        region_area: own - inner,
        children,
    })
}

fn has_ambiguous_siblings(nodes: &[ForestNode]) -> bool {
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if nodes[i].shape() == nodes[j].shape()
                && (nodes[i].region_area - nodes[j].region_area).abs() <= AMBIGUITY_TOL
                && nodes[i] != nodes[j]
            {
                return true;
            }
        }
    }
    nodes.iter().any(|n| has_ambiguous_siblings(&n.children))
}

pub fn leaf_invariants(
    family: &CurveFamily,
    kind: LeafKind,
) -> Result<LeafInvariant, FoliationError> {
    let windings = family.windings();
    let data = if family.ambient().is_plane() || windings.iter().all(|w| *w == (0, 0)) {
        let mut roots = family
            .roots()
            .into_iter()
            .map(|r| build_forest_nodes(family, r))
            .collect::<Result<Vec<_>, _>>()?;
        for r in &mut roots {
            r.canonical_sort();
        }
        roots.sort_by(cmp_nodes);
        match family.ambient().moduli() {
            None => LeafData::Plane { roots },
            Some([lx, ly]) => {
                let outer: f64 = family
                    .roots()
                    .iter()
                    .map(|&r| family.curves()[r].line_integral_area().map(|a| a.abs()))
                    .sum::<Result<f64, _>>()?;
                LeafData::TorusNested {
                    roots,
                    rest: lx * ly - outer,
                }
            }
        }
    } else {
        let [lx, ly] = family.ambient().moduli().expect("torus ambient");
        let axis_x = windings.iter().all(|w| w.0.abs() == 1 && w.1 == 0);
        let l_across = if axis_x { ly } else { lx };
        let mut heights = family.meridian_heights()?;
        heights.sort_by(|a, b| a.partial_cmp(b).unwrap());
        LeafData::TorusMeridians {
            heights,
            l_across,
            generator_flux: family.generator_fluxes(),
        }
    };
    let ambiguous = match &data {
        LeafData::Plane { roots } | LeafData::TorusNested { roots, .. } => {
            has_ambiguous_siblings(roots)
        }
        LeafData::TorusMeridians { .. } => false,
    };
    Ok(LeafInvariant {
        kind,
        data,
        ambiguous,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Invariants match.
    Same,
    /// Comparable configurations with differing invariants.
    Different,
    /// Combinatorics differ (component counts, nesting shapes, winding).
    Incomparable,
}

fn compare_forests(a: &[ForestNode], b: &[ForestNode], tol: f64) -> Verdict {
    let shapes_a: Vec<String> = a.iter().map(|n| n.shape()).collect();
    let shapes_b: Vec<String> = b.iter().map(|n| n.shape()).collect();
    let mut sa = shapes_a.clone();
    let mut sb = shapes_b.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return Verdict::Incomparable;
    }
    // Nodes arrive canonically sorted; equal-shape siblings are ordered by
    // area so comparison within tolerance is a multiset comparison.
    for (na, nb) in a.iter().zip(b) {
        if na.shape() != nb.shape() {
            return Verdict::Incomparable;
        }
        if (na.region_area - nb.region_area).abs() > tol {
            return Verdict::Different;
        }
        match compare_forests(&na.children, &nb.children, tol) {
            Verdict::Same => {}
            v => return v,
        }
    }
    Verdict::Same
}

/// Circular alignment of sorted height vectors mod L: the rotation and
/// common shift minimizing the worst residual.
fn best_shift(h1: &[f64], h2: &[f64], l: f64) -> (f64, f64) {
    use std::f64::consts::TAU;
    let k = h1.len();
    let mut best = (0.0, f64::INFINITY);
    for r in 0..k {
        // Circular mean of the offsets under rotation r.
        let (mut sx, mut sy) = (0.0, 0.0);
        for j in 0..k {
            let d = (h2[(j + r) % k] - h1[j]).rem_euclid(l);
            sx += (TAU * d / l).cos();
            sy += (TAU * d / l).sin();
        }
        let t = (sy.atan2(sx) / TAU * l).rem_euclid(l);
        let resid = (0..k)
            .map(|j| {
                let d = (h2[(j + r) % k] - h1[j]).rem_euclid(l);
                let e = (d - t).rem_euclid(l);
                e.min(l - e)
            })
            .fold(0.0, f64::max);
        if resid < best.1 {
            best = (t, resid);
        }
    }
    best
}

pub fn same_leaf(
    a: &LeafInvariant,
    b: &LeafInvariant,
    tol: f64,
) -> Result<Verdict, FoliationError> {
    if a.kind != b.kind {
        return Err(FoliationError::KindMismatch);
    }
    let verdict = match (&a.data, &b.data) {
        (LeafData::Plane { roots: ra }, LeafData::Plane { roots: rb }) => {
            compare_forests(ra, rb, tol)
        }
        (
            LeafData::TorusNested {
                roots: ra,
                rest: qa,
            },
            LeafData::TorusNested {
                roots: rb,
                rest: qb,
            },
        ) => {
            if (qa - qb).abs() > tol {
                match compare_forests(ra, rb, tol) {
                    Verdict::Incomparable => Verdict::Incomparable,
                    _ => Verdict::Different,
                }
            } else {
                compare_forests(ra, rb, tol)
            }
        }
        (
            LeafData::TorusMeridians {
                heights: ha,
                l_across: la,
                generator_flux: ga,
            },
            LeafData::TorusMeridians {
                heights: hb,
                l_across: lb,
                generator_flux: gb,
            },
        ) => {
            if ha.len() != hb.len() || (la - lb).abs() > tol {
                Verdict::Incomparable
            } else {
                let mut sga = ga.clone();
                let mut sgb = gb.clone();
                let key = |v: &[f64; 2]| (v[0].abs(), v[1].abs());
                sga.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
                sgb.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
                let flux_match = sga.iter().zip(&sgb).all(|(x, y)| {
                    (x[0].abs() - y[0].abs()).abs() <= tol && (x[1].abs() - y[1].abs()).abs() <= tol
                });
                if !flux_match {
                    Verdict::Incomparable
                } else {
                    let (t, resid) = best_shift(ha, hb, *la);
                    let shift_ok = match a.kind {
                        // The isovolume leaf allows one common shift; the
                        // isodrastic leaf constrains each component, so the
                        // shift must vanish.
                        LeafKind::Isovolume => true,
                        LeafKind::Isodrastic => t.min(*la - t) <= tol,
                    };
                    if resid <= tol && shift_ok {
                        Verdict::Same
                    } else {
                        Verdict::Different
                    }
                }
            }
        }
        _ => Verdict::Incomparable,
    };
    Ok(verdict)
}

/// The explicit volume-preserving cylinder field
/// Z(x, t) = (−λ′(t)·α(x), λ(t)·f(x)) with α the mean-zero periodic
/// antiderivative of f and λ a plateau bump with λ ≡ 1 on [−a, a],
/// a = max|f|.  On the plateau Z = f(x)∂_t, so the time-one flow maps
/// (x, 0) to (x, f(x)); div Z = λ′·(f − α′) vanishes identically.
#[derive(Debug, Clone)]
pub struct MoserField {
    pub f: Vec<f64>,
    pub lambda: PlateauBump,
    f_series: TrigSeries,
    alpha_series: TrigSeries,
}

impl MoserField {
    pub fn value(&self, x: f64, t: f64) -> [f64; 2] {
        [
            -self.lambda.d1(t) * self.alpha_series.eval(x),
            self.lambda.value(t) * self.f_series.eval(x),
        ]
    }

    pub fn divergence(&self, x: f64, t: f64) -> f64 {
        self.lambda.d1(t) * (self.f_series.eval(x) - self.alpha_series.eval_derivative(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserReport {
    pub max_divergence: f64,
    pub max_endpoint_error: f64,
    pub plateau: f64,
    pub width: f64,
}

/// Build the cylinder field for a mean-zero f and verify it: divergence on
/// a `grid`×`grid` sample of the support and RK4 time-one endpoints
/// against (x, f(x)).
pub fn moser_cylinder_flow(
    f: &[f64],
    grid: usize,
    dt: f64,
) -> Result<(MoserField, MoserReport), FoliationError> {
    let mean = integrate_periodic(f);
    if mean.abs() > 1e-10 {
        return Err(FoliationError::NotIsodrastic(mean));
    }
    let a = f.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let width = a.max(0.5);
    let lambda = PlateauBump::new(a, width);
    let f_series = TrigSeries::from_samples(f);
    let alpha_series = f_series.antiderivative();
    let field = MoserField {
        f: f.to_vec(),
        lambda,
        f_series,
        alpha_series,
    };

    let mut max_div = 0.0_f64;
    let support = a + width;
    for i in 0..grid {
        let x = i as f64 / grid as f64;
        for j in 0..grid {
            let t = -support + 2.0 * support * j as f64 / (grid - 1) as f64;
            max_div = max_div.max(field.divergence(x, t).abs());
        }
    }

    let n = f.len();
    let steps = (1.0 / dt).round() as usize;
    let h = 1.0 / steps as f64;
    let mut max_err = 0.0_f64;
    for (i, fi) in f.iter().enumerate() {
        let x0 = i as f64 / n as f64;
        let mut z = [x0, 0.0];
        for _ in 0..steps {
            let k1 = field.value(z[0], z[1]);
            let k2 = field.value(z[0] + h / 2.0 * k1[0], z[1] + h / 2.0 * k1[1]);
            let k3 = field.value(z[0] + h / 2.0 * k2[0], z[1] + h / 2.0 * k2[1]);
            let k4 = field.value(z[0] + h * k3[0], z[1] + h * k3[1]);
            z[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            z[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        }
        let err = ((z[0] - x0).powi(2) + (z[1] - fi).powi(2)).sqrt();
        max_err = max_err.max(err);
    }

    let report = MoserReport {
        max_divergence: max_div,
        max_endpoint_error: max_err,
        plateau: a,
        width,
    };
    Ok((field, report))
}

/// Closed-form codimension of the leaf distribution: the isodrastic kind
/// constrains every (orientable) component, the isovolume kind relaxes by
/// the rank of the generator flux vectors (zero in the plane, one for
/// meridian families).
pub fn expected_codim(family: &CurveFamily, kind: LeafKind) -> usize {
    let k = family.len();
    match kind {
        LeafKind::Isodrastic => k,
        LeafKind::Isovolume => {
            let gen = family.generator_fluxes();
            let mat = DMatrix::from_fn(2, k, |r, c| gen[c][r]);
            k - linalg::numerical_rank(&mat)
        }
    }
}

/// Numerical codimension of the leaf distribution at the family: the rank
/// of the per-component flux constraint over a battery of `n_fields`
/// seeded trigonometric deformation fields, with the isovolume kind
/// quotienting the fluxes by the span of the generator flux vectors.
pub fn codim_rank(
    family: &CurveFamily,
    kind: LeafKind,
    n_fields: usize,
    seed: u64,
) -> Result<usize, FoliationError> {
    let k = family.len();
    if n_fields < k {
        return Err(FoliationError::BatteryTooSmall {
            need: k,
            got: n_fields,
        });
    }
    let periods = match family.ambient().moduli() {
        Some([lx, ly]) => [lx, ly],
        None => {
            let mut lo = [f64::INFINITY; 2];
            let mut hi = [f64::NEG_INFINITY; 2];
            for c in family.curves() {
                let (clo, chi) = c.bbox();
                for d in 0..2 {
                    lo[d] = lo[d].min(clo[d]);
                    hi[d] = hi[d].max(chi[d]);
                }
            }
            [
                2.0 * (hi[0] - lo[0]).max(1.0),
                2.0 * (hi[1] - lo[1]).max(1.0),
            ]
        }
    };
    let mut rng = SplitMix64::new(seed);
    let mut fluxes = DMatrix::zeros(k, n_fields);
    for b in 0..n_fields {
        let field = FourierField2::random(periods, 3, 6, &mut rng);
        let deformation: Vec<Vec<Vec2>> = family
            .curves()
            .iter()
            .map(|c| c.nodes().iter().map(|p| field.value(*p)).collect())
            .collect();
        let f = isodrast_flux(family, &deformation)?;
        for j in 0..k {
            fluxes[(j, b)] = f[j];
        }
    }
    if kind == LeafKind::Isovolume {
        // Quotient by the allowed flux directions (∮dx, ∮dy pullbacks).
        let gen = family.generator_fluxes();
        let mut dirs: Vec<Vec<f64>> = Vec::new();
        for d in 0..2 {
            let v: Vec<f64> = gen.iter().map(|g| g[d]).collect();
            if v.iter().any(|x| x.abs() > 1e-12) {
                dirs.push(v);
            }
        }
        if !dirs.is_empty() {
            let basis = DMatrix::from_fn(k, dirs.len(), |r, c| dirs[c][r]);
            let q = linalg::orthonormal_span(&basis);
            let projected = &fluxes - &q * (q.transpose() * &fluxes);
            return Ok(linalg::numerical_rank(&projected));
        }
    }
    Ok(linalg::numerical_rank(&fluxes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{Ambient, DiscreteCurve};
    use crate::diff::DiffScheme;
    use crate::fields::{AmbientField, HamiltonianSpec};
    use crate::phase::LeafKind;
    use std::f64::consts::{PI, TAU};

    fn meridian(y: f64, n: usize) -> DiscreteCurve {
        let nodes: Vec<Vec2> = (0..n).map(|i| [i as f64 / n as f64, y]).collect();
        DiscreteCurve::new(nodes, Ambient::Torus { moduli: [1.0, 1.0] })
            .unwrap()
            .with_scheme(DiffScheme::Trig)
    }

    fn circles(radii_centers: &[(f64, Vec2)], n: usize) -> CurveFamily {
        CurveFamily::new(
            radii_centers
                .iter()
                .map(|(r, c)| DiscreteCurve::circle(*c, *r, n).with_scheme(DiffScheme::Trig))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn translation_deformation_has_zero_flux() {
        let fam = circles(&[(1.0, [0.0, 0.0]), (0.5, [3.0, 0.0])], 64);
        let def: Vec<Vec<Vec2>> = fam
            .curves()
            .iter()
            .map(|c| vec![[0.7, -1.3]; c.n()])
            .collect();
        for f in isodrast_flux(&fam, &def).unwrap() {
            assert!(f.abs() < 1e-12, "{f}");
        }
    }

    #[test]
    fn dilation_flux_is_twice_the_area() {
        let fam = CurveFamily::single(
            DiscreteCurve::circle([0.0, 0.0], 1.0, 128).with_scheme(DiffScheme::Trig),
        );
        let def: Vec<Vec<Vec2>> = fam.curves().iter().map(|c| c.nodes().to_vec()).collect();
        let f = isodrast_flux(&fam, &def).unwrap();
        assert!((f[0] - 2.0 * PI).abs() < 1e-6, "{}", f[0]);
    }

    #[test]
    fn hamiltonian_deformation_has_zero_flux() {
        let fam = circles(&[(1.0, [0.0, 0.0]), (0.6, [3.0, 0.5])], 128);
        let spec = HamiltonianSpec::gaussian([0.8, 0.2], 1.4, 0.9, 6.0);
        let field = spec.field();
        let def: Vec<Vec<Vec2>> = fam
            .curves()
            .iter()
            .map(|c| c.nodes().iter().map(|p| field.value(*p)).collect())
            .collect();
        for f in isodrast_flux(&fam, &def).unwrap() {
            assert!(f.abs() < 1e-8, "{f}");
        }
    }

    #[test]
    fn figure_one_invariants_and_classification() {
        let n = 256;
        let r = |a: f64| (a / PI).sqrt();
        // Left: areas 1 inside 9, separate 4 → regions (1, 8, 4).
        let left = circles(
            &[
                (r(9.0), [0.0, 0.0]),
                (r(1.0), [0.0, 0.0]),
                (r(4.0), [5.0, 0.0]),
            ],
            n,
        );
        // Middle: 4 inside 9, separate 1 → regions (4, 5, 1).
        let middle = circles(
            &[
                (r(9.0), [0.0, 0.0]),
                (r(4.0), [0.0, 0.0]),
                (r(1.0), [5.0, 0.0]),
            ],
            n,
        );
        // Right: ellipse variant of left with the same areas.
        let ell = |a: f64, center: Vec2, aspect: f64| {
            let b = (a / PI / aspect).sqrt();
            DiscreteCurve::ellipse(center, aspect * b, b, n).with_scheme(DiffScheme::Trig)
        };
        let right = CurveFamily::new(vec![
            ell(9.0, [0.0, 0.0], 1.4),
            ell(1.0, [0.0, 0.0], 1.3),
            ell(4.0, [5.0, 0.0], 1.2),
        ])
        .unwrap();

        let il = leaf_invariants(&left, LeafKind::Isodrastic).unwrap();
        let im = leaf_invariants(&middle, LeafKind::Isodrastic).unwrap();
        let ir = leaf_invariants(&right, LeafKind::Isodrastic).unwrap();

        assert_eq!(same_leaf(&il, &ir, 1e-9).unwrap(), Verdict::Same);
        assert_eq!(same_leaf(&il, &im, 1e-9).unwrap(), Verdict::Different);

        if let LeafData::Plane { roots } = &il.data {
            assert_eq!(roots.len(), 2);
            let mut areas: Vec<f64> = vec![];
            for root in roots {
                areas.push(root.region_area);
                for c in &root.children {
                    areas.push(c.region_area);
                }
            }
            areas.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (got, want) in areas.iter().zip([1.0, 4.0, 8.0]) {
                assert!((got - want).abs() < 1e-9, "{got} vs {want}");
            }
        } else {
            panic!("expected plane data");
        }
    }

    #[test]
    fn incomparable_forest_shapes() {
        let n = 64;
        let nested = circles(&[(2.0, [0.0, 0.0]), (1.0, [0.0, 0.0])], n);
        let separate = circles(&[(2.0, [0.0, 0.0]), (1.0, [4.0, 0.0])], n);
        let a = leaf_invariants(&nested, LeafKind::Isodrastic).unwrap();
        let b = leaf_invariants(&separate, LeafKind::Isodrastic).unwrap();
        assert_eq!(same_leaf(&a, &b, 1e-9).unwrap(), Verdict::Incomparable);
    }

    #[test]
    fn meridian_shift_law() {
        let n = 64;
        let fam =
            |hs: &[f64]| CurveFamily::new(hs.iter().map(|y| meridian(*y, n)).collect()).unwrap();
        let a = leaf_invariants(&fam(&[0.1, 0.4, 0.7]), LeafKind::Isovolume).unwrap();
        let b = leaf_invariants(&fam(&[0.3, 0.6, 0.9]), LeafKind::Isovolume).unwrap();
        let c = leaf_invariants(&fam(&[0.1, 0.45, 0.7]), LeafKind::Isovolume).unwrap();
        assert_eq!(same_leaf(&a, &b, 1e-9).unwrap(), Verdict::Same);
        assert_eq!(same_leaf(&a, &c, 1e-9).unwrap(), Verdict::Different);

        // Isodrastic: the common shift is not allowed.
        let ai = leaf_invariants(&fam(&[0.1, 0.4, 0.7]), LeafKind::Isodrastic).unwrap();
        let bi = leaf_invariants(&fam(&[0.3, 0.6, 0.9]), LeafKind::Isodrastic).unwrap();
        assert_eq!(same_leaf(&ai, &bi, 1e-9).unwrap(), Verdict::Different);
        let ci = leaf_invariants(&fam(&[0.7, 0.1, 0.4]), LeafKind::Isodrastic).unwrap();
        assert_eq!(same_leaf(&ai, &ci, 1e-9).unwrap(), Verdict::Same);
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let n = 64;
        let fam = CurveFamily::single(DiscreteCurve::circle([0.0, 0.0], 1.0, n));
        let a = leaf_invariants(&fam, LeafKind::Isodrastic).unwrap();
        let b = leaf_invariants(&fam, LeafKind::Isovolume).unwrap();
        assert!(matches!(
            same_leaf(&a, &b, 1e-9),
            Err(FoliationError::KindMismatch)
        ));
    }

    #[test]
    fn moser_zero_field() {
        let f = vec![0.0; 64];
        let (field, report) = moser_cylinder_flow(&f, 16, 1e-2).unwrap();
        assert_eq!(field.value(0.3, 0.1), [0.0, 0.0]);
        assert_eq!(report.max_divergence, 0.0);
        assert!(report.max_endpoint_error < 1e-14);
    }

    #[test]
    fn moser_sine_field() {
        let n = 128;
        let f: Vec<f64> = (0..n)
            .map(|i| 0.3 * (TAU * i as f64 / n as f64).sin())
            .collect();
        let (_, report) = moser_cylinder_flow(&f, 64, 1e-3).unwrap();
        assert!(report.max_divergence <= 1e-10, "{}", report.max_divergence);
        assert!(
            report.max_endpoint_error <= 1e-8,
            "{}",
            report.max_endpoint_error
        );
        assert!((report.plateau - 0.3).abs() < 1e-12);
    }

    #[test]
    fn moser_two_mode_field() {
        let n = 128;
        let f: Vec<f64> = (0..n)
            .map(|i| {
                let x = i as f64 / n as f64;
                0.2 * ((TAU * x).sin() + (2.0 * TAU * x).cos())
            })
            .collect();
        let (_, report) = moser_cylinder_flow(&f, 64, 1e-3).unwrap();
        assert!(report.max_divergence <= 1e-10);
        assert!(report.max_endpoint_error <= 1e-8);
    }

    #[test]
    fn moser_rejects_nonzero_mean() {
        let f = vec![0.1; 64];
        assert!(matches!(
            moser_cylinder_flow(&f, 16, 1e-2),
            Err(FoliationError::NotIsodrastic(_))
        ));
    }

    #[test]
    fn codim_ranks() {
        let n = 64;
        // Plane: both kinds give k.
        for k in 1..=3 {
            let fam = circles(
                &(0..k)
                    .map(|i| (0.8, [3.0 * i as f64, 0.0]))
                    .collect::<Vec<_>>(),
                n,
            );
            assert_eq!(
                codim_rank(&fam, LeafKind::Isodrastic, 4 * k + 4, 11).unwrap(),
                k
            );
            assert_eq!(
                codim_rank(&fam, LeafKind::Isovolume, 4 * k + 4, 11).unwrap(),
                k
            );
        }
        // Torus meridians: isovolume loses one rank to the common shift.
        let fam =
            CurveFamily::new(vec![meridian(0.1, n), meridian(0.5, n), meridian(0.8, n)]).unwrap();
        assert_eq!(codim_rank(&fam, LeafKind::Isodrastic, 16, 7).unwrap(), 3);
        assert_eq!(codim_rank(&fam, LeafKind::Isovolume, 16, 7).unwrap(), 2);
    }

    #[test]
    fn codim_rank_battery_too_small() {
        let fam = circles(&[(1.0, [0.0, 0.0]), (1.0, [3.0, 0.0])], 64);
        assert!(matches!(
            codim_rank(&fam, LeafKind::Isodrastic, 1, 3),
            Err(FoliationError::BatteryTooSmall { need: 2, got: 1 })
        ));
    }

    #[test]
    fn codim_rank_seed_independent() {
        let fam = circles(&[(1.0, [0.0, 0.0]), (0.7, [3.0, 0.0])], 64);
        let a = codim_rank(&fam, LeafKind::Isodrastic, 12, 1).unwrap();
        let b = codim_rank(&fam, LeafKind::Isodrastic, 12, 999).unwrap();
        assert_eq!(a, b);
    }
}
