//! Discrete closed-curve primitives: sampled embeddings of circles into the
//! plane or the flat 2-torus, with areas, tangents, nesting and
//! complement-region decompositions.
//!
//! A curve is a closed polyline over the uniform parameter grid s_i = i/N.
//! On the torus, nodes are stored as *lifted* coordinates in the plane; the
//! lift is validated (every edge shorter than half the fundamental domain)
//! and the homology class is recovered from the closing displacement.

use crate::diff::{derivative_periodic, DiffScheme};
use crate::vec2::{self, Vec2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on crossing parameters in the segment sweep.
const PARAM_TOL: f64 = 1e-12;
/// Minimum admissible distance between distinct curves of a family.
const MIN_CURVE_DIST: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Ambient {
    Plane,
    Torus { moduli: [f64; 2] },
}

impl Ambient {
    pub fn is_plane(&self) -> bool {
        matches!(self, Ambient::Plane)
    }

    pub fn moduli(&self) -> Option<[f64; 2]> {
        match self {
            Ambient::Plane => None,
            Ambient::Torus { moduli } => Some(*moduli),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("curve needs at least 8 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("non-finite coordinate at node {0}")]
    NonFinite(usize),
    #[error("consecutive nodes {0} and {1} coincide")]
    DuplicateNode(usize, usize),
    #[error("polygon is not simple: segments {0} and {1} intersect")]
    SelfIntersection(usize, usize),
    #[error("torus lift inconsistent: edge {0} longer than half the fundamental domain")]
    InconsistentLift(usize),
    #[error("operation requires plane ambient")]
    PlaneOnly,
    #[error("enclosed area undefined for winding class ({0},{1})")]
    NonContractible(i64, i64),
    #[error("curves {0} and {1} intersect")]
    IntersectingCurves(usize, usize),
    #[error("curves {0} and {1} are closer than the admissible minimum distance")]
    CurvesTooClose(usize, usize),
    #[error("curves live in different ambients")]
    AmbientMismatch,
    #[error("unsupported torus configuration: {0}")]
    UnsupportedTorusFamily(String),
    #[error("resampling needs at least 8 nodes, got {0}")]
    ResampleTooCoarse(usize),
}

/// Closed polyline sampling of an embedding S¹ → M on the uniform grid
/// s_i = i/N.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve {
    nodes: Vec<Vec2>,
    ambient: Ambient,
    scheme: DiffScheme,
    /// Homology class of the lift; (0, 0) in the plane.
    winding: (i64, i64),
}

impl DiscreteCurve {
    pub fn new(nodes: Vec<Vec2>, ambient: Ambient) -> Result<Self, CurveError> {
        let n = nodes.len();
        if n < 8 {
            return Err(CurveError::TooFewNodes(n));
        }
        for (i, p) in nodes.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(CurveError::NonFinite(i));
            }
        }
        let winding = match ambient {
            Ambient::Plane => {
                for i in 0..n {
                    let j = (i + 1) % n;
                    if vec2::dist(nodes[i], nodes[j]) == 0.0 {
                        return Err(CurveError::DuplicateNode(i, j));
                    }
                }
                (0, 0)
            }
            Ambient::Torus { moduli: [lx, ly] } => {
                let first = nodes[0];
                let last = nodes[n - 1];
                let p = ((last[0] - first[0]) / lx).round() as i64;
                let q = ((last[1] - first[1]) / ly).round() as i64;
                for i in 0..n {
                    let j = (i + 1) % n;
                    let mut d = vec2::sub(nodes[j], nodes[i]);
                    if j == 0 {
                        d[0] += p as f64 * lx;
                        d[1] += q as f64 * ly;
                    }
                    if vec2::norm(d) == 0.0 {
                        return Err(CurveError::DuplicateNode(i, j));
                    }
                    if d[0].abs() >= lx / 2.0 || d[1].abs() >= ly / 2.0 {
                        return Err(CurveError::InconsistentLift(i));
                    }
                }
                (p, q)
            }
        };
        let curve = Self {
            nodes,
            ambient,
            scheme: DiffScheme::default(),
            winding,
        };
        curve.check_simple()?;
        Ok(curve)
    }

    /// Construct without the O(N²) simplicity sweep; lift consistency is
    /// still validated.  For trusted intermediate states (flows, finite
    /// differences) only.
    pub(crate) fn new_unchecked(
        nodes: Vec<Vec2>,
        ambient: Ambient,
        scheme: DiffScheme,
    ) -> Result<Self, CurveError> {
        let n = nodes.len();
        if n < 8 {
            return Err(CurveError::TooFewNodes(n));
        }
        let winding = match ambient {
            Ambient::Plane => (0, 0),
            Ambient::Torus { moduli: [lx, ly] } => {
                let first = nodes[0];
                let last = nodes[n - 1];
                let p = ((last[0] - first[0]) / lx).round() as i64;
                let q = ((last[1] - first[1]) / ly).round() as i64;
                (p, q)
            }
        };
        Ok(Self {
            nodes,
            ambient,
            scheme,
            winding,
        })
    }

    pub fn with_scheme(mut self, scheme: DiffScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn scheme(&self) -> DiffScheme {
        self.scheme
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn delta_s(&self) -> f64 {
        1.0 / self.nodes.len() as f64
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    /// Homology class (p, q) of the lift; (0, 0) for plane curves.
    pub fn winding(&self) -> (i64, i64) {
        self.winding
    }

    /// Counterclockwise circle, sampled uniformly.
    pub fn circle(center: Vec2, radius: f64, n: usize) -> Self {
        use std::f64::consts::TAU;
        let nodes = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
            })
            .collect();
        Self::new(nodes, Ambient::Plane).expect("circle is simple")
    }

    /// Axis-aligned counterclockwise ellipse with semi-axes (a, b), sampled
    /// uniformly in the standard parameter.
    pub fn ellipse(center: Vec2, a: f64, b: f64, n: usize) -> Self {
        use std::f64::consts::TAU;
        let nodes = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                [center[0] + a * t.cos(), center[1] + b * t.sin()]
            })
            .collect();
        Self::new(nodes, Ambient::Plane).expect("ellipse is simple")
    }

    /// Apply a rigid motion (or any sampling-compatible map) to the nodes.
    pub fn map_nodes(&self, f: impl Fn(Vec2) -> Vec2) -> Result<Self, CurveError> {
        let nodes = self.nodes.iter().map(|&p| f(p)).collect();
        let mut c = Self::new(nodes, self.ambient)?;
        c.scheme = self.scheme;
        Ok(c)
    }

    /// Reverse orientation, keeping the first node first.
    pub fn reversed(&self) -> Self {
        let mut nodes = self.nodes.clone();
        nodes[1..].reverse();
        let mut c = Self::new(nodes, self.ambient).expect("reversal preserves simplicity");
        c.scheme = self.scheme;
        c
    }

    /// Cyclic rotation of the node list (same geometric curve, shifted
    /// parameter origin).
    pub fn rotated_start(&self, k: usize) -> Self {
        let n = self.n();
        let nodes = (0..n).map(|i| self.nodes[(i + k) % n]).collect();
        let mut c = Self::new(nodes, self.ambient).expect("rotation preserves simplicity");
        c.scheme = self.scheme;
        c
    }

    /// φ′(s) on the grid, by the curve's periodic differentiation scheme.
    /// On the torus the winding drift is removed before differentiating.
    pub fn tangents(&self) -> Vec<Vec2> {
        let n = self.n() as f64;
        let (drift_x, drift_y) = match self.ambient {
            Ambient::Plane => (0.0, 0.0),
            Ambient::Torus { moduli: [lx, ly] } => {
                (self.winding.0 as f64 * lx, self.winding.1 as f64 * ly)
            }
        };
        let xs: Vec<f64> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, p)| p[0] - drift_x * i as f64 / n)
            .collect();
        let ys: Vec<f64> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, p)| p[1] - drift_y * i as f64 / n)
            .collect();
        let dx = derivative_periodic(&xs, self.scheme);
        let dy = derivative_periodic(&ys, self.scheme);
        dx.into_iter()
            .zip(dy)
            .map(|(x, y)| [x + drift_x, y + drift_y])
            .collect()
    }

    pub fn speeds(&self) -> Vec<f64> {
        self.tangents().iter().map(|t| vec2::norm(*t)).collect()
    }

    pub fn unit_tangents(&self) -> Vec<Vec2> {
        self.tangents()
            .iter()
            .map(|t| {
                let n = vec2::norm(*t);
                [t[0] / n, t[1] / n]
            })
            .collect()
    }

    /// Polyline length (sum of chords, including the closing edge).
    pub fn polyline_length(&self) -> f64 {
        self.chord_lengths().iter().sum()
    }

    /// Signed enclosed area by the shoelace formula.  Requires a plane
    /// curve, or a null-homotopic torus curve (computed on the lift).
    pub fn enclosed_area(&self) -> Result<f64, CurveError> {
        if let Ambient::Torus { .. } = self.ambient {
            if self.winding != (0, 0) {
                return Err(CurveError::NonContractible(self.winding.0, self.winding.1));
            }
        }
        // Anchored shoelace: exactly translation invariant and free of
        // cancellation for curves far from the origin.
        let n = self.n();
        let anchor = self.nodes[0];
        let mut acc = 0.0;
        for i in 0..n {
            let j = (i + 1) % n;
            acc += vec2::cross(
                vec2::sub(self.nodes[i], anchor),
                vec2::sub(self.nodes[j], anchor),
            );
        }
        Ok(acc / 2.0)
    }

    pub fn is_ccw(&self) -> Result<bool, CurveError> {
        Ok(self.enclosed_area()? > 0.0)
    }

    /// Signed enclosed area as the line integral ½∮(x y′ − y x′) ds with
    /// the curve's differentiation scheme.  Agrees with the shoelace up to
    /// the polygon deficit but converges at the scheme's order, so leaf
    /// invariants computed from it are stable under smooth deformations.
    pub fn line_integral_area(&self) -> Result<f64, CurveError> {
        if let Ambient::Torus { .. } = self.ambient {
            if self.winding != (0, 0) {
                return Err(CurveError::NonContractible(self.winding.0, self.winding.1));
            }
        }
        let anchor = self.nodes[0];
        let acc: f64 = self
            .nodes
            .iter()
            .zip(self.tangents())
            .map(|(p, t)| vec2::cross(vec2::sub(*p, anchor), t))
            .sum();
        Ok(acc * self.delta_s() / 2.0)
    }

    /// Axis-aligned bounding box of the (lifted) nodes.
    pub fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.nodes {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (lo, hi)
    }

    /// Winding number of the polygon around `p` (plane / lifted
    /// coordinates).  Robust for points away from the boundary.
    pub fn winding_number(&self, p: Vec2) -> i64 {
        let mut angle = 0.0;
        let n = self.n();
        for i in 0..n {
            let a = vec2::sub(self.nodes[i], p);
            let b = vec2::sub(self.nodes[(i + 1) % n], p);
            angle += vec2::cross(a, b).atan2(vec2::dot(a, b));
        }
        (angle / std::f64::consts::TAU).round() as i64
    }

    pub fn contains_point(&self, p: Vec2) -> bool {
        self.winding_number(p) != 0
    }

    fn chord_lengths(&self) -> Vec<f64> {
        let n = self.n();
        let (lx, ly) = match self.ambient {
            Ambient::Plane => (0.0, 0.0),
            Ambient::Torus { moduli: [lx, ly] } => (lx, ly),
        };
        (0..n)
            .map(|i| {
                let j = (i + 1) % n;
                let mut d = vec2::sub(self.nodes[j], self.nodes[i]);
                if j == 0 {
                    d[0] += self.winding.0 as f64 * lx;
                    d[1] += self.winding.1 as f64 * ly;
                }
                vec2::norm(d)
            })
            .collect()
    }

    /// Arc-length-proportional resampling through a periodic cubic spline in
    /// the chord-length parameter.  Orientation is preserved; the first node
    /// stays put.
    pub fn resample(&self, n_new: usize) -> Result<Self, CurveError> {
        if n_new < 8 {
            return Err(CurveError::ResampleTooCoarse(n_new));
        }
        let n = self.n();
        let chords = self.chord_lengths();
        let total: f64 = chords.iter().sum();
        let mut knots = Vec::with_capacity(n + 1);
        knots.push(0.0);
        for c in &chords {
            knots.push(knots.last().unwrap() + c);
        }
        // Lifted node list with the periodic closure appended.
        let (lx, ly) = match self.ambient {
            Ambient::Plane => (0.0, 0.0),
            Ambient::Torus { moduli: [lx, ly] } => (lx, ly),
        };
        let closure = [
            self.nodes[0][0] + self.winding.0 as f64 * lx,
            self.nodes[0][1] + self.winding.1 as f64 * ly,
        ];
        let xs: Vec<f64> = self.nodes.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = self.nodes.iter().map(|p| p[1]).collect();
        let sx = PeriodicSpline::fit(&knots, &xs, closure[0] - self.nodes[0][0]);
        let sy = PeriodicSpline::fit(&knots, &ys, closure[1] - self.nodes[0][1]);
        let nodes: Vec<Vec2> = (0..n_new)
            .map(|j| {
                let t = total * j as f64 / n_new as f64;
                [sx.eval(t), sy.eval(t)]
            })
            .collect();
        let mut c = Self::new(nodes, self.ambient)?;
        c.scheme = self.scheme;
        Ok(c)
    }

    fn check_simple(&self) -> Result<(), CurveError> {
        let n = self.n();
        let offsets = self.self_check_offsets();
        // The wrap pair (0, n−1) is geometrically adjacent at the offset
        // that undoes the winding of the lift.
        let wrap_offset = match self.ambient {
            Ambient::Plane => [0.0, 0.0],
            Ambient::Torus { moduli: [lx, ly] } => {
                [-(self.winding.0 as f64) * lx, -(self.winding.1 as f64) * ly]
            }
        };
        let near = |a: Vec2, b: Vec2| (a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9;
        for i in 0..n {
            let a0 = self.nodes[i];
            let a1 = self.lifted_next(i);
            for j in i..n {
                let b0 = self.nodes[j];
                let b1 = self.lifted_next(j);
                for &off in &offsets {
                    let skip = if i == j || j == i + 1 {
                        near(off, [0.0, 0.0])
                    } else if i == 0 && j == n - 1 {
                        near(off, wrap_offset)
                    } else {
                        false
                    };
                    if skip {
                        continue;
                    }
                    let q0 = vec2::add(b0, off);
                    let q1 = vec2::add(b1, off);
                    if segments_intersect(a0, a1, q0, q1) {
                        return Err(CurveError::SelfIntersection(i, j));
                    }
                }
            }
        }
        Ok(())
    }

    fn lifted_next(&self, i: usize) -> Vec2 {
        let n = self.n();
        let j = (i + 1) % n;
        let mut p = self.nodes[j];
        if j == 0 {
            if let Ambient::Torus { moduli: [lx, ly] } = self.ambient {
                p[0] += self.winding.0 as f64 * lx;
                p[1] += self.winding.1 as f64 * ly;
            }
        }
        p
    }

    fn self_check_offsets(&self) -> Vec<Vec2> {
        match self.ambient {
            Ambient::Plane => vec![[0.0, 0.0]],
            Ambient::Torus { moduli: [lx, ly] } => {
                let (lo, hi) = self.bbox();
                lattice_offsets(lo, hi, lo, hi, lx, ly)
            }
        }
    }
}

/// Integer lattice offsets (k·Lx, l·Ly) that can bring box b onto box a.
fn lattice_offsets(a_lo: Vec2, a_hi: Vec2, b_lo: Vec2, b_hi: Vec2, lx: f64, ly: f64) -> Vec<Vec2> {
    let range = |alo: f64, ahi: f64, blo: f64, bhi: f64, l: f64| -> (i64, i64) {
        let klo = ((alo - bhi) / l).floor() as i64;
        let khi = ((ahi - blo) / l).ceil() as i64;
        (klo, khi)
    };
    let (kxlo, kxhi) = range(a_lo[0], a_hi[0], b_lo[0], b_hi[0], lx);
    let (kylo, kyhi) = range(a_lo[1], a_hi[1], b_lo[1], b_hi[1], ly);
    let mut out = Vec::new();
    for kx in kxlo..=kxhi {
        for ky in kylo..=kyhi {
            out.push([kx as f64 * lx, ky as f64 * ly]);
        }
    }
    if out.is_empty() {
        out.push([0.0, 0.0]);
    }
    out
}

fn segments_intersect(p0: Vec2, p1: Vec2, q0: Vec2, q1: Vec2) -> bool {
    let r = vec2::sub(p1, p0);
    let s = vec2::sub(q1, q0);
    let qp = vec2::sub(q0, p0);
    let denom = vec2::cross(r, s);
    let scale = vec2::norm(r) * vec2::norm(s);
    if denom.abs() > 1e-14 * scale {
        let t = vec2::cross(qp, s) / denom;
        let u = vec2::cross(qp, r) / denom;
        (-PARAM_TOL..=1.0 + PARAM_TOL).contains(&t) && (-PARAM_TOL..=1.0 + PARAM_TOL).contains(&u)
    } else {
        // Parallel: intersect only if collinear with overlapping projections.
        if vec2::cross(qp, r).abs() > 1e-12 * scale.max(vec2::norm(r)) {
            return false;
        }
        let rr = vec2::dot(r, r);
        let t0 = vec2::dot(qp, r) / rr;
        let t1 = t0 + vec2::dot(s, r) / rr;
        let (lo, hi) = (t0.min(t1), t0.max(t1));
        lo <= 1.0 + PARAM_TOL && hi >= -PARAM_TOL
    }
}

/// Disjoint family of closed curves with nesting forest (plane and
/// null-homotopic torus curves) and homology classes (torus).
#[derive(Debug, Clone)]
pub struct CurveFamily {
    curves: Vec<DiscreteCurve>,
    ambient: Ambient,
    /// parent[i] = index of the smallest curve strictly containing curve i.
    parent: Vec<Option<usize>>,
    /// children sorted by |enclosed area| descending.
    children: Vec<Vec<usize>>,
}

impl CurveFamily {
    pub fn new(curves: Vec<DiscreteCurve>) -> Result<Self, CurveError> {
        assert!(!curves.is_empty(), "family needs at least one curve");
        let ambient = curves[0].ambient();
        for c in &curves {
            if c.ambient() != ambient {
                return Err(CurveError::AmbientMismatch);
            }
        }
        // Pairwise disjointness: no crossings and positive minimum distance.
        for i in 0..curves.len() {
            for j in i + 1..curves.len() {
                check_disjoint(&curves[i], &curves[j], i, j)?;
            }
        }
        let (parent, children) = build_forest(&curves)?;
        Ok(Self {
            curves,
            ambient,
            parent,
            children,
        })
    }

    pub fn single(curve: DiscreteCurve) -> Self {
        Self::new(vec![curve]).expect("single curve is a valid family")
    }

    /// Swap in new curve geometry while keeping the containment forest
    /// (for small displacements that cannot change the topology).
    pub(crate) fn with_replaced_curves(&self, curves: Vec<DiscreteCurve>) -> Self {
        debug_assert_eq!(curves.len(), self.curves.len());
        Self {
            curves,
            ambient: self.ambient,
            parent: self.parent.clone(),
            children: self.children.clone(),
        }
    }

    pub fn curves(&self) -> &[DiscreteCurve] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.parent[i].is_none())
            .collect()
    }

    pub fn total_nodes(&self) -> usize {
        self.curves.iter().map(|c| c.n()).sum()
    }

    /// Per-curve winding classes; all (0,0) in the plane.
    pub fn windings(&self) -> Vec<(i64, i64)> {
        self.curves.iter().map(|c| c.winding()).collect()
    }

    /// Per-component integrals of the torus generator 1-forms (∮ dx, ∮ dy),
    /// i.e. (p·Lx, q·Ly).  Zero vectors in the plane.
    pub fn generator_fluxes(&self) -> Vec<[f64; 2]> {
        match self.ambient {
            Ambient::Plane => vec![[0.0, 0.0]; self.len()],
            Ambient::Torus { moduli: [lx, ly] } => self
                .curves
                .iter()
                .map(|c| [c.winding().0 as f64 * lx, c.winding().1 as f64 * ly])
                .collect(),
        }
    }

    /// Complement-region decomposition of M ∖ N.
    pub fn region_areas(&self) -> Result<RegionDecomposition, CurveError> {
        match self.ambient {
            Ambient::Plane => self.regions_nested(None),
            Ambient::Torus { moduli } => {
                let windings = self.windings();
                if windings.iter().all(|w| *w == (0, 0)) {
                    self.regions_nested(Some(moduli))
                } else if windings.iter().all(|w| w.0.abs() == 1 && w.1 == 0)
                    || windings.iter().all(|w| w.0 == 0 && w.1.abs() == 1)
                {
                    self.regions_meridian(moduli)
                } else {
                    Err(CurveError::UnsupportedTorusFamily(format!(
                        "mixed winding classes {windings:?}"
                    )))
                }
            }
        }
    }

    fn regions_nested(&self, moduli: Option<[f64; 2]>) -> Result<RegionDecomposition, CurveError> {
        let mut regions = Vec::new();
        for i in 0..self.len() {
            let own = self.curves[i].enclosed_area()?.abs();
            let inner: f64 = self.children[i]
                .iter()
                .map(|&c| self.curves[c].enclosed_area().map(|a| a.abs()))
                .sum::<Result<f64, _>>()?;
            let mut boundary = vec![i];
            boundary.extend_from_slice(&self.children[i]);
            regions.push(Region {
                area: Some(own - inner),
                unbounded: false,
                boundary,
            });
        }
        let roots = self.roots();
        let outer_sum: f64 = roots
            .iter()
            .map(|&r| self.curves[r].enclosed_area().map(|a| a.abs()))
            .sum::<Result<f64, _>>()?;
        match moduli {
            None => regions.push(Region {
                area: None,
                unbounded: true,
                boundary: roots,
            }),
            Some([lx, ly]) => regions.push(Region {
                area: Some(lx * ly - outer_sum),
                unbounded: false,
                boundary: roots,
            }),
        }
        Ok(RegionDecomposition { regions })
    }

    fn regions_meridian(&self, [lx, ly]: [f64; 2]) -> Result<RegionDecomposition, CurveError> {
        // Bands between consecutive parallel curves, sorted by mean height
        // along the transverse modulus.
        let axis_x = self.windings()[0].1 == 0; // winding along the x axis
        let (l_along, l_across) = if axis_x { (lx, ly) } else { (ly, lx) };
        let heights = self.meridian_heights()?;
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| heights[a].partial_cmp(&heights[b]).unwrap());
        let k = order.len();
        let mut regions = Vec::new();
        for idx in 0..k {
            let lo = order[idx];
            let hi = order[(idx + 1) % k];
            let gap = if idx + 1 < k {
                heights[hi] - heights[lo]
            } else {
                heights[hi] + l_across - heights[lo]
            };
            regions.push(Region {
                area: Some(gap * l_along),
                unbounded: false,
                boundary: if k == 1 { vec![lo] } else { vec![lo, hi] },
            });
        }
        Ok(RegionDecomposition { regions })
    }

    /// Mean heights of meridian-type curves along the transverse modulus,
    /// reduced to [0, L).  For a graph y = f(x) this is the mean of f.
    pub fn meridian_heights(&self) -> Result<Vec<f64>, CurveError> {
        let [lx, ly] = match self.ambient {
            Ambient::Torus { moduli } => moduli,
            Ambient::Plane => return Err(CurveError::PlaneOnly),
        };
        let windings = self.windings();
        let axis_x = windings.iter().all(|w| w.0.abs() == 1 && w.1 == 0);
        let axis_y = windings.iter().all(|w| w.0 == 0 && w.1.abs() == 1);
        if !(axis_x || axis_y) {
            return Err(CurveError::UnsupportedTorusFamily(
                "meridian heights need winding class (±1,0) or (0,±1)".into(),
            ));
        }
        let (l_along, l_across) = if axis_x { (lx, ly) } else { (ly, lx) };
        let mut out = Vec::with_capacity(self.len());
        for c in &self.curves {
            let tangents = c.tangents();
            let p = if axis_x { c.winding().0 } else { c.winding().1 } as f64;
            let mut acc = 0.0;
            for (node, t) in c.nodes().iter().zip(&tangents) {
                // ∮ (height) d(along) — invariant of the submanifold.
                let (h, dalong) = if axis_x {
                    (node[1], t[0])
                } else {
                    (node[0], t[1])
                };
                acc += h * dalong;
            }
            let mean = acc * c.delta_s() / (p * l_along);
            out.push(mean.rem_euclid(l_across));
        }
        Ok(out)
    }
}

fn check_disjoint(
    a: &DiscreteCurve,
    b: &DiscreteCurve,
    ia: usize,
    ib: usize,
) -> Result<(), CurveError> {
    let offsets = match a.ambient() {
        Ambient::Plane => vec![[0.0, 0.0]],
        Ambient::Torus { moduli: [lx, ly] } => {
            let (alo, ahi) = a.bbox();
            let (blo, bhi) = b.bbox();
            // Pad so near-touching translates are still compared.
            let pad = 1.0;
            lattice_offsets(
                [alo[0] - pad, alo[1] - pad],
                [ahi[0] + pad, ahi[1] + pad],
                blo,
                bhi,
                lx,
                ly,
            )
        }
    };
    let na = a.n();
    let nb = b.n();
    let mut min_dist = f64::INFINITY;
    for &off in &offsets {
        for i in 0..na {
            let a0 = a.nodes()[i];
            let a1 = a.lifted_next(i);
            for j in 0..nb {
                let b0 = vec2::add(b.nodes()[j], off);
                let b1 = vec2::add(b.lifted_next(j), off);
                if segments_intersect(a0, a1, b0, b1) {
                    return Err(CurveError::IntersectingCurves(ia, ib));
                }
                min_dist = min_dist
                    .min(vec2::point_segment_dist(a0, b0, b1))
                    .min(vec2::point_segment_dist(b0, a0, a1));
            }
        }
    }
    if min_dist < MIN_CURVE_DIST {
        return Err(CurveError::CurvesTooClose(ia, ib));
    }
    Ok(())
}

type Forest = (Vec<Option<usize>>, Vec<Vec<usize>>);

fn build_forest(curves: &[DiscreteCurve]) -> Result<Forest, CurveError> {
    let k = curves.len();
    let nestable: Vec<bool> = curves.iter().map(|c| c.winding() == (0, 0)).collect();
    let mut parent: Vec<Option<usize>> = vec![None; k];
    for i in 0..k {
        if !nestable[i] {
            continue;
        }
        let probe = curves[i].nodes()[0];
        let mut best: Option<(usize, f64)> = None;
        for j in 0..k {
            if i == j || !nestable[j] {
                continue;
            }
            if curves[j].contains_point(probe) {
                let area = curves[j].enclosed_area()?.abs();
                if best.is_none_or(|(_, a)| area < a) {
                    best = Some((j, area));
                }
            }
        }
        parent[i] = best.map(|(j, _)| j);
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(i);
        }
    }
    for ch in children.iter_mut() {
        let mut keyed: Vec<(f64, usize)> = ch
            .iter()
            .map(|&c| {
                (
                    curves[c].enclosed_area().map(|a| -a.abs()).unwrap_or(0.0),
                    c,
                )
            })
            .collect();
        keyed.sort_by(|a, b| a.partial_cmp(b).unwrap());
        *ch = keyed.into_iter().map(|(_, c)| c).collect();
    }
    Ok((parent, children))
}

/// A connected component of the curve complement.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    /// Area of the component; `None` for the unbounded plane component.
    pub area: Option<f64>,
    pub unbounded: bool,
    /// Indices of the curves bounding this component.
    pub boundary: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionDecomposition {
    pub regions: Vec<Region>,
}

impl RegionDecomposition {
    pub fn finite_areas(&self) -> Vec<f64> {
        self.regions.iter().filter_map(|r| r.area).collect()
    }

    pub fn finite_area_sum(&self) -> f64 {
        self.finite_areas().iter().sum()
    }
}

/// Periodic cubic spline through (knots_i, values_i) with period
/// knots.last(); `closure_jump` is added to values[0] at the wrapped knot
/// (nonzero for torus lifts with winding).
struct PeriodicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
    closure_jump: f64,
}

impl PeriodicSpline {
    fn fit(knots: &[f64], values: &[f64], closure_jump: f64) -> Self {
        let n = values.len();
        debug_assert_eq!(knots.len(), n + 1);
        let h = |i: usize| knots[i + 1] - knots[i];
        let val = |i: usize| {
            if i < n {
                values[i]
            } else {
                values[0] + closure_jump
            }
        };
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let hm = if i == 0 { h(n - 1) } else { h(i - 1) };
            let hp = h(i);
            sub[i] = hm / 6.0;
            diag[i] = (hm + hp) / 3.0;
            sup[i] = hp / 6.0;
            let prev = if i == 0 {
                val(n - 1) - closure_jump
            } else {
                val(i - 1)
            };
            rhs[i] = (val(i + 1) - val(i)) / hp - (val(i) - prev) / hm;
        }
        let second = solve_cyclic_tridiagonal(&sub, &diag, &sup, &rhs);
        Self {
            knots: knots.to_vec(),
            values: values.to_vec(),
            second,
            closure_jump,
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.values.len();
        let period = *self.knots.last().unwrap();
        let t = t.rem_euclid(period);
        // Knots are sorted; binary search for the interval.
        let mut i = match self.knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
            Ok(idx) => idx,
            Err(idx) => idx.saturating_sub(1),
        };
        if i >= n {
            i = n - 1;
        }
        let h = self.knots[i + 1] - self.knots[i];
        let theta = t - self.knots[i];
        let (vi, vj) = (
            self.values[i],
            if i + 1 < n {
                self.values[i + 1]
            } else {
                self.values[0] + self.closure_jump
            },
        );
        let (mi, mj) = (self.second[i], self.second[(i + 1) % n]);
        let a = h - theta;
        mi * a * a * a / (6.0 * h)
            + mj * theta * theta * theta / (6.0 * h)
            + (vi / h - mi * h / 6.0) * a
            + (vj / h - mj * h / 6.0) * theta
    }
}

/// Cyclic tridiagonal solve by Sherman–Morrison around the Thomas algorithm.
/// Corner entries are A[0][n−1] = sub[0] and A[n−1][0] = sup[n−1].
fn solve_cyclic_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert!(n >= 3);
    let beta = sub[0]; // A[0][n-1]
    let alpha = sup[n - 1]; // A[n-1][0]
    let gamma = -diag[0];
    let mut bmod = diag.to_vec();
    bmod[0] = diag[0] - gamma;
    bmod[n - 1] = diag[n - 1] - alpha * beta / gamma;
    let solve_tri = |b: &[f64], d: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut denom = b[0];
        c[0] = sup[0] / denom;
        x[0] = d[0] / denom;
        for i in 1..n {
            denom = b[i] - sub[i] * c[i - 1];
            if i < n - 1 {
                c[i] = sup[i] / denom;
            }
            x[i] = (d[i] - sub[i] * x[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    };
    let y = solve_tri(&bmod, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tri(&bmod, &u);
    let vy = y[0] + beta / gamma * y[n - 1];
    let vz = z[0] + beta / gamma * z[n - 1];
    let factor = vy / (1.0 + vz);
    (0..n).map(|i| y[i] - factor * z[i]).collect()
}
