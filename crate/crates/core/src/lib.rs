//! Discrete coadjoint-orbit machinery for closed curves in the plane and
//! the flat 2-torus: moment maps on a discretized cotangent bundle of
//! embeddings, isodrastic/isovolume leaf classification, Moser-type
//! cylinder flows, vortex dipole loop dynamics, prequantization
//! certificates, and finite-dimensional dual-pair probes.
//!
//! Curves are closed polylines over the uniform parameter grid s_i = i/N;
//! quadrature is the periodic rectangle rule and differentiation is
//! 4th-order central by default with a spectral option ([`DiffScheme`]).
//! All values are immutable after construction and every operation is a
//! pure function, so concurrent use needs no synchronization.  Sign
//! conventions are documented in [`phase`].
//!
//! ```
//! use isodrast_core::foliation::{leaf_invariants, same_leaf, Verdict};
//! use isodrast_core::{CurveFamily, DiscreteCurve, LeafKind};
//!
//! // Two nested circles and an ellipse pair enclosing the same areas lie
//! // on the same isodrastic leaf: the region areas match.
//! let circles = CurveFamily::new(vec![
//!     DiscreteCurve::circle([0.0, 0.0], 1.0, 256),
//!     DiscreteCurve::circle([0.0, 0.0], 0.5, 256),
//! ])?;
//! let ellipses = CurveFamily::new(vec![
//!     DiscreteCurve::ellipse([4.0, 0.0], 1.25, 0.8, 256),
//!     DiscreteCurve::ellipse([4.0, 0.0], 0.625, 0.4, 256),
//! ])?;
//! let a = leaf_invariants(&circles, LeafKind::Isodrastic)?;
//! let b = leaf_invariants(&ellipses, LeafKind::Isodrastic)?;
//! assert_eq!(same_leaf(&a, &b, 1e-6)?, Verdict::Same);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod curve;
pub mod density;
pub mod diff;
pub mod dipole;
pub mod dualpair;
pub mod fields;
pub mod flow;
pub mod foliation;
pub mod linalg;
pub mod moment;
pub mod phase;
pub mod prequant;
pub mod rng;
pub mod scene;
pub mod smooth;
pub mod svg;
pub mod synth;
pub mod vec2;

pub use curve::{Ambient, CurveError, CurveFamily, DiscreteCurve, Region, RegionDecomposition};
pub use density::{Augmentation, DensityError, LengthSpectrum, OneFormDensity};
pub use diff::DiffScheme;
pub use dipole::{DipoleError, DipoleLoop, DriftSummary, Side, TrajectoryRecord};
pub use dualpair::{ComplementReport, DirectionBattery, DualPairError, HamiltonianCheck};
pub use fields::{AmbientField, HamiltonianSpec};
pub use foliation::{FoliationError, LeafInvariant, MoserField, MoserReport, Verdict};
pub use moment::{moment_dipole, moment_left, moment_reduced_level, moment_right, ReducedMoment};
pub use phase::{CotangentPoint, LeafKind, PhaseError, PhaseTangent, QuotientClass};
pub use prequant::{PairingReport, PrequantCertificate, PrequantError};
pub use scene::{parse_scene, serialize_scene, ReportRow, RunParams, Scene, SceneError};
