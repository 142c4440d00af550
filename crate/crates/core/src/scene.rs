//! Scene ingestion and report serialization.
//!
//! Scenes are UTF-8 JSON with top-level keys `ambient`, `curves`,
//! `densities`, `augmentations`, `dipoles`, `hamiltonians`, `run`.
//! Numbers are decimal text with shortest-round-trip formatting, so
//! parse → serialize → parse reproduces an identical scene bit for bit.
//! All module invariants (simplicity, disjointness, declared nowhere-zero
//! conditions, dipole tangency) are checked at load time.

use crate::curve::{Ambient, CurveFamily, DiscreteCurve};
use crate::density::{Augmentation, OneFormDensity};
use crate::diff::DiffScheme;
use crate::dipole::{DipoleLoop, TrajectoryRecord};
use crate::fields::HamiltonianSpec;
use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("invariant `{name}` violated: {detail}")]
    Invariant { name: String, detail: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

fn invariant(name: &str, detail: impl std::fmt::Display) -> SceneError {
    SceneError::Invariant {
        name: name.into(),
        detail: detail.to_string(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
struct CurveJson {
    nodes: Vec<Vec2>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
struct DensityJson {
    components: Vec<Vec<f64>>,
    #[serde(default)]
    nowhere_zero: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
struct AugmentationJson {
    curve: usize,
    weights: Vec<f64>,
    covectors: Vec<Vec2>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
struct DipoleJson {
    curve: usize,
    vectors: Vec<Vec2>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct RunParams {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(rename = "T", default = "default_t")]
    pub t_final: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub scheme: DiffScheme,
}

fn default_dt() -> f64 {
    1e-3
}
fn default_t() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    1e-9
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            seed: 0,
            dt: default_dt(),
            t_final: default_t(),
            tol: default_tol(),
            scheme: DiffScheme::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
struct SceneJson {
    ambient: Ambient,
    curves: Vec<CurveJson>,
    #[serde(default)]
    densities: Vec<DensityJson>,
    #[serde(default)]
    augmentations: Vec<AugmentationJson>,
    #[serde(default)]
    dipoles: Vec<DipoleJson>,
    #[serde(default)]
    hamiltonians: Vec<HamiltonianSpec>,
    #[serde(default)]
    run: Option<RunParams>,
}

/// A fully validated scene.
#[derive(Debug, Clone)]
pub struct Scene {
    pub family: CurveFamily,
    pub densities: Vec<OneFormDensity>,
    pub density_nowhere_zero: Vec<bool>,
    /// (curve index, augmentation) pairs.
    pub augmentations: Vec<(usize, Augmentation)>,
    /// (curve index, dipole loop) pairs.
    pub dipoles: Vec<(usize, DipoleLoop)>,
    pub hamiltonians: Vec<HamiltonianSpec>,
    pub run: RunParams,
}

impl PartialEq for Scene {
    fn eq(&self, other: &Self) -> bool {
        self.to_json() == other.to_json()
    }
}

impl Scene {
    pub fn curves(&self) -> &[DiscreteCurve] {
        self.family.curves()
    }

    pub fn ambient(&self) -> Ambient {
        self.family.ambient()
    }

    fn to_json(&self) -> SceneJson {
        SceneJson {
            ambient: self.family.ambient(),
            curves: self
                .curves()
                .iter()
                .map(|c| CurveJson {
                    nodes: c.nodes().to_vec(),
                })
                .collect(),
            densities: self
                .densities
                .iter()
                .zip(&self.density_nowhere_zero)
                .map(|(d, nz)| DensityJson {
                    components: d.components().to_vec(),
                    nowhere_zero: *nz,
                })
                .collect(),
            augmentations: self
                .augmentations
                .iter()
                .map(|(curve, a)| AugmentationJson {
                    curve: *curve,
                    weights: a.weights().to_vec(),
                    covectors: a.covectors().to_vec(),
                })
                .collect(),
            dipoles: self
                .dipoles
                .iter()
                .map(|(curve, d)| DipoleJson {
                    curve: *curve,
                    vectors: d.u().to_vec(),
                })
                .collect(),
            hamiltonians: self.hamiltonians.clone(),
            run: Some(self.run),
        }
    }
}

/// Build a scene from parts, running the same validation as `parse_scene`.
pub struct SceneBuilder {
    pub ambient: Ambient,
    pub curves: Vec<Vec<Vec2>>,
    pub densities: Vec<(Vec<Vec<f64>>, bool)>,
    pub augmentations: Vec<(usize, Vec<f64>, Vec<Vec2>)>,
    pub dipoles: Vec<(usize, Vec<Vec2>)>,
    pub hamiltonians: Vec<HamiltonianSpec>,
    pub run: RunParams,
}

impl SceneBuilder {
    pub fn new(ambient: Ambient) -> Self {
        Self {
            ambient,
            curves: Vec::new(),
            densities: Vec::new(),
            augmentations: Vec::new(),
            dipoles: Vec::new(),
            hamiltonians: Vec::new(),
            run: RunParams::default(),
        }
    }

    pub fn build(self) -> Result<Scene, SceneError> {
        let json = SceneJson {
            ambient: self.ambient,
            curves: self
                .curves
                .into_iter()
                .map(|nodes| CurveJson { nodes })
                .collect(),
            densities: self
                .densities
                .into_iter()
                .map(|(components, nowhere_zero)| DensityJson {
                    components,
                    nowhere_zero,
                })
                .collect(),
            augmentations: self
                .augmentations
                .into_iter()
                .map(|(curve, weights, covectors)| AugmentationJson {
                    curve,
                    weights,
                    covectors,
                })
                .collect(),
            dipoles: self
                .dipoles
                .into_iter()
                .map(|(curve, vectors)| DipoleJson { curve, vectors })
                .collect(),
            hamiltonians: self.hamiltonians,
            run: Some(self.run),
        };
        validate(json)
    }
}

pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    let json: SceneJson = serde_json::from_str(text)?;
    validate(json)
}

pub fn serialize_scene(scene: &Scene) -> String {
    serde_json::to_string_pretty(&scene.to_json()).expect("scene serializes")
}

fn validate(json: SceneJson) -> Result<Scene, SceneError> {
    if json.curves.is_empty() {
        return Err(SceneError::Schema {
            path: "curves".into(),
            message: "at least one curve required".into(),
        });
    }
    let run = json.run.unwrap_or_default();
    for field in [
        ("run.dt", run.dt),
        ("run.T", run.t_final),
        ("run.tol", run.tol),
    ] {
        if !field.1.is_finite() || field.1 <= 0.0 {
            return Err(SceneError::Schema {
                path: field.0.into(),
                message: format!("must be finite and positive, got {}", field.1),
            });
        }
    }
    let mut curves = Vec::with_capacity(json.curves.len());
    for (i, cj) in json.curves.iter().enumerate() {
        let curve = DiscreteCurve::new(cj.nodes.clone(), json.ambient)
            .map_err(|e| invariant(&format!("curves[{i}] simple"), e))?
            .with_scheme(run.scheme);
        curves.push(curve);
    }
    let family = CurveFamily::new(curves).map_err(|e| invariant("curves disjoint", e))?;

    let mut densities = Vec::new();
    let mut density_nowhere_zero = Vec::new();
    for (i, dj) in json.densities.iter().enumerate() {
        if dj.components.is_empty() {
            return Err(SceneError::Schema {
                path: format!("densities[{i}].components"),
                message: "at least one component required".into(),
            });
        }
        let rho = OneFormDensity::new(dj.components.clone());
        if dj.nowhere_zero {
            rho.check_nowhere_zero()
                .map_err(|e| invariant(&format!("densities[{i}] nowhere zero"), e))?;
        }
        densities.push(rho);
        density_nowhere_zero.push(dj.nowhere_zero);
    }

    let mut augmentations = Vec::new();
    for (i, aj) in json.augmentations.iter().enumerate() {
        let curve = family.curves().get(aj.curve).ok_or(SceneError::Schema {
            path: format!("augmentations[{i}].curve"),
            message: format!("curve index {} out of range", aj.curve),
        })?;
        if aj.weights.len() != aj.covectors.len() {
            return Err(SceneError::Schema {
                path: format!("augmentations[{i}]"),
                message: "weights and covectors must have equal length".into(),
            });
        }
        let aug = Augmentation::new(aj.weights.clone(), aj.covectors.clone());
        aug.check_attached(curve)
            .map_err(|e| invariant(&format!("augmentations[{i}] attached"), e))?;
        augmentations.push((aj.curve, aug));
    }

    let mut dipoles = Vec::new();
    for (i, dj) in json.dipoles.iter().enumerate() {
        let curve = family.curves().get(dj.curve).ok_or(SceneError::Schema {
            path: format!("dipoles[{i}].curve"),
            message: format!("curve index {} out of range", dj.curve),
        })?;
        if dj.vectors.len() != curve.n() {
            return Err(SceneError::Schema {
                path: format!("dipoles[{i}].vectors"),
                message: format!("{} vectors for {} nodes", dj.vectors.len(), curve.n()),
            });
        }
        let d = DipoleLoop::new(curve.clone(), dj.vectors.clone())
            .map_err(|e| invariant(&format!("dipoles[{i}] nowhere tangent"), e))?;
        dipoles.push((dj.curve, d));
    }

    for (i, h) in json.hamiltonians.iter().enumerate() {
        let finite = match h {
            HamiltonianSpec::Gaussian {
                center,
                amp,
                sigma,
                cutoff,
            } => {
                center.iter().all(|v| v.is_finite())
                    && amp.is_finite()
                    && sigma.is_finite()
                    && *sigma > 0.0
                    && cutoff.width > 0.0
            }
            HamiltonianSpec::LinearWithCutoff {
                center,
                amp,
                k,
                cutoff,
            } => {
                center.iter().chain(k.iter()).all(|v| v.is_finite())
                    && amp.is_finite()
                    && cutoff.width > 0.0
            }
            HamiltonianSpec::PolynomialWithCutoff {
                center,
                amp,
                coeffs,
                cutoff,
            } => {
                center.iter().chain(coeffs.iter()).all(|v| v.is_finite())
                    && amp.is_finite()
                    && cutoff.width > 0.0
            }
        };
        if !finite {
            return Err(SceneError::Schema {
                path: format!("hamiltonians[{i}]"),
                message: "parameters must be finite (σ and cutoff width positive)".into(),
            });
        }
    }

    Ok(Scene {
        family,
        densities,
        density_nowhere_zero,
        augmentations,
        dipoles,
        hamiltonians: json.hamiltonians,
        run,
    })
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub metric: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ReportRow {
    pub fn checked(metric: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            metric: metric.into(),
            value,
            tolerance,
            pass: value.abs() <= tolerance,
        }
    }

    pub fn info(metric: impl Into<String>, value: f64) -> Self {
        Self {
            metric: metric.into(),
            value,
            tolerance: f64::INFINITY,
            pass: true,
        }
    }
}

/// Deterministic CSV with columns metric,value,tolerance,pass.
pub fn emit_report(rows: &[ReportRow]) -> String {
    let mut out = String::from("metric,value,tolerance,pass\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.metric, r.value, r.tolerance, r.pass
        ));
    }
    out
}

/// Trajectory CSV: one row per sample with the conserved quantities first,
/// then node coordinates and u components.
pub fn trajectory_csv(rec: &TrajectoryRecord) -> String {
    let mut out = String::from("t,area,length,moment");
    if let Some(first) = rec.samples.first() {
        for i in 0..first.curve.n() {
            out.push_str(&format!(",x{i},y{i}"));
        }
        for i in 0..first.curve.n() {
            out.push_str(&format!(",ux{i},uy{i}"));
        }
    }
    out.push('\n');
    for s in &rec.samples {
        out.push_str(&format!("{},{},{},{}", s.t, s.area, s.length, s.moment));
        for p in s.curve.nodes() {
            out.push_str(&format!(",{},{}", p[0], p[1]));
        }
        for u in &s.u {
            out.push_str(&format!(",{},{}", u[0], u[1]));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_nodes(center: Vec2, r: f64, n: usize) -> Vec<Vec2> {
        use std::f64::consts::TAU;
        (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                [center[0] + r * t.cos(), center[1] + r * t.sin()]
            })
            .collect()
    }

    #[test]
    fn minimal_scene_parses() {
        let mut b = SceneBuilder::new(Ambient::Plane);
        b.curves.push(circle_nodes([0.0, 0.0], 1.0, 64));
        let scene = b.build().unwrap();
        let area = scene.curves()[0].enclosed_area().unwrap();
        assert!((area - std::f64::consts::PI).abs() < 1e-2);
    }

    #[test]
    fn intersecting_curves_rejected() {
        let mut b = SceneBuilder::new(Ambient::Plane);
        b.curves.push(circle_nodes([0.0, 0.0], 1.0, 32));
        b.curves.push(circle_nodes([1.0, 0.0], 1.0, 32));
        let err = b.build().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("curves disjoint"), "{msg}");
        assert!(msg.contains("0 and 1"), "{msg}");
    }

    #[test]
    fn declared_nowhere_zero_density_with_zero_node_rejected() {
        let mut b = SceneBuilder::new(Ambient::Plane);
        b.curves.push(circle_nodes([0.0, 0.0], 1.0, 32));
        let mut vals = vec![1.0; 32];
        vals[5] = 0.0;
        b.densities.push((vec![vals], true));
        let err = b.build().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("densities[0] nowhere zero"), "{msg}");
        assert!(msg.contains("node 5"), "{msg}");
    }

    #[test]
    fn roundtrip_is_identical() {
        let mut b = SceneBuilder::new(Ambient::Torus { moduli: [1.0, 2.0] });
        let n = 16;
        b.curves
            .push((0..n).map(|i| [i as f64 / n as f64, 0.371]).collect());
        b.densities
            .push((vec![[1.0, 2.0, 0.5, std::f64::consts::PI].repeat(4)], true));
        b.hamiltonians
            .push(HamiltonianSpec::gaussian([0.1, 0.9], 1.5, 0.25, 0.4));
        b.run.seed = 42;
        b.run.dt = 1.0 / 3.0;
        let scene = b.build().unwrap();
        let text = serialize_scene(&scene);
        let scene2 = parse_scene(&text).unwrap();
        assert_eq!(scene, scene2);
        // Bit-exact numeric text on a second serialize.
        assert_eq!(text, serialize_scene(&scene2));
    }

    #[test]
    fn empty_report_is_header_only() {
        assert_eq!(emit_report(&[]), "metric,value,tolerance,pass\n");
    }

    #[test]
    fn report_rows_format() {
        let rows = vec![
            ReportRow::checked("drift", 1e-9, 1e-6),
            ReportRow::checked("defect", 0.5, 1e-3),
        ];
        let csv = emit_report(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "metric,value,tolerance,pass");
        assert!(lines[1].ends_with("true"));
        assert!(lines[2].ends_with("false"));
    }

    #[test]
    fn bad_index_is_schema_error() {
        let mut b = SceneBuilder::new(Ambient::Plane);
        b.curves.push(circle_nodes([0.0, 0.0], 1.0, 32));
        b.augmentations
            .push((3, vec![1.0; 32], vec![[0.0, 1.0]; 32]));
        let err = b.build().unwrap_err();
        assert!(matches!(err, SceneError::Schema { .. }), "{err}");
    }
}
