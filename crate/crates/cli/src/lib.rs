//! Command line driver: classification, moment evaluation, Moser flow
//! verification, dipole evolution, prequantization, and dual-pair lab
//! runs over JSON scenes.
//!
//! Exit codes: 0 on pass, 2 on validation errors, 3 when a numerical
//! tolerance check fails.

use clap::{Parser, Subcommand, ValueEnum};
use isodrast_core::density::pullback_density;
use isodrast_core::dipole::{evolve, side_classify, Side};
use isodrast_core::dualpair::{
    complement_residual, enrichment_residuals, hamiltonian_property_check, DirectionBattery,
};
use isodrast_core::fields::standard_battery;
use isodrast_core::foliation::{
    codim_rank, expected_codim, leaf_invariants, moser_cylinder_flow, same_leaf, Verdict,
};
use isodrast_core::moment::{moment_dipole, moment_left, moment_reduced_level};
use isodrast_core::prequant::verify_generator_pairing;
use isodrast_core::scene::{emit_report, parse_scene, trajectory_csv, ReportRow, Scene};
use isodrast_core::svg::{render_scene, render_trajectory};
use isodrast_core::{density, Augmentation, CotangentPoint, CurveFamily, LeafKind};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "isodrast",
    version,
    about = "Moment maps, leaf classification and vortex dipole loops for closed curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Both,
}

impl Format {
    fn wants_csv(self) -> bool {
        self != Format::Svg
    }
    fn wants_svg(self) -> bool {
        self != Format::Csv
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Isodrastic,
    Isovolume,
}

impl From<KindArg> for LeafKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Isodrastic => LeafKind::Isodrastic,
            KindArg::Isovolume => LeafKind::Isovolume,
        }
    }
}

#[derive(clap::Args, Clone)]
pub struct CommonArgs {
    /// Output directory for reports and figures.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Report format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Override the scene's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Leaf invariants, codimension ranks and same-leaf verdicts over
    /// scene pairs.
    Classify {
        /// Scene files; verdicts are emitted for every pair.
        #[arg(long = "scene", required = true)]
        scenes: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "isodrastic")]
        kind: KindArg,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// All moment maps against the standard Hamiltonian battery.
    Moment {
        #[arg(long)]
        scene: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Volume-preserving cylinder flow built from the scene's first
    /// density component (which must be mean zero).
    Moser {
        #[arg(long)]
        scene: PathBuf,
        /// Verification grid resolution per axis.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evolve the scene's first dipole loop under its first Hamiltonian.
    Evolve {
        #[arg(long)]
        scene: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Prequantization certificate and generator pairings for the scene's
    /// first density.
    Prequant {
        #[arg(long)]
        scene: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Dual-pair probes at a base point built from the scene.
    Lab {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, value_enum, default_value = "isodrastic")]
        kind: KindArg,
        /// Fourier modes in the reparametrization battery.
        #[arg(long, default_value_t = 8)]
        modes: usize,
        /// Gaussian grid per axis (3, 5 or 9 nest).
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
}

pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(all_pass) => {
            if all_pass {
                0
            } else {
                3
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

type AnyError = Box<dyn std::error::Error>;

fn load(path: &Path, seed: Option<u64>) -> Result<Scene, AnyError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    let mut scene = parse_scene(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(seed) = seed {
        scene.run.seed = seed;
    }
    Ok(scene)
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<(), AnyError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

fn finish(
    common: &CommonArgs,
    csv_name: &str,
    rows: &[ReportRow],
    svgs: &[(String, String)],
) -> Result<bool, AnyError> {
    let all_pass = rows.iter().all(|r| r.pass);
    if common.format.wants_csv() {
        write_out(&common.out, csv_name, &emit_report(rows))?;
    }
    if common.format.wants_svg() {
        for (name, svg) in svgs {
            write_out(&common.out, name, svg)?;
        }
    }
    for r in rows {
        println!(
            "[{}] {} = {:.6e} (tol {:.1e})",
            if r.pass { "pass" } else { "FAIL" },
            r.metric,
            r.value,
            r.tolerance
        );
    }
    Ok(all_pass)
}

fn dispatch(cli: Cli) -> Result<bool, AnyError> {
    match cli.command {
        Command::Classify {
            scenes,
            kind,
            common,
        } => classify(&scenes, kind.into(), &common),
        Command::Moment { scene, common } => moment(&scene, &common),
        Command::Moser {
            scene,
            grid,
            common,
        } => moser(&scene, grid, &common),
        Command::Evolve { scene, common } => evolve_cmd(&scene, &common),
        Command::Prequant { scene, common } => prequant(&scene, &common),
        Command::Lab {
            scene,
            kind,
            modes,
            grid,
            common,
        } => lab(&scene, kind.into(), modes, grid, &common),
    }
}

fn classify(paths: &[PathBuf], kind: LeafKind, common: &CommonArgs) -> Result<bool, AnyError> {
    let mut rows = Vec::new();
    let mut svgs = Vec::new();
    let mut scenes = Vec::new();
    for (i, path) in paths.iter().enumerate() {
        let scene = load(path, common.seed)?;
        let decomposition = scene.family.region_areas()?;
        for (j, region) in decomposition.regions.iter().enumerate() {
            if let Some(area) = region.area {
                rows.push(ReportRow::info(format!("scene{i}.region{j}.area"), area));
            }
        }
        let rank = codim_rank(
            &scene.family,
            kind,
            4 * scene.family.len() + 4,
            scene.run.seed,
        )?;
        let expected = expected_codim(&scene.family, kind);
        rows.push(ReportRow {
            metric: format!("scene{i}.codim_rank"),
            value: rank as f64,
            tolerance: expected as f64,
            pass: rank == expected,
        });
        let inv = leaf_invariants(&scene.family, kind)?;
        if inv.ambiguous {
            rows.push(ReportRow::info(format!("scene{i}.ambiguous_forest"), 1.0));
        }
        if common.format.wants_svg() {
            svgs.push((
                format!("scene{i}.svg"),
                render_scene(&scene.family, &[], true),
            ));
        }
        scenes.push((scene, inv));
    }
    for i in 0..scenes.len() {
        for j in i + 1..scenes.len() {
            let verdict = same_leaf(&scenes[i].1, &scenes[j].1, scenes[i].0.run.tol)?;
            let value = match verdict {
                Verdict::Same => 1.0,
                Verdict::Different => 0.0,
                Verdict::Incomparable => -1.0,
            };
            rows.push(ReportRow::info(
                format!(
                    "same_leaf(scene{i},scene{j}) [1=invariants match, 0=differ, -1=incomparable]"
                ),
                value,
            ));
        }
    }
    finish(common, "classify.csv", &rows, &svgs)
}

fn scene_bbox(family: &CurveFamily) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for c in family.curves() {
        let (clo, chi) = c.bbox();
        for d in 0..2 {
            lo[d] = lo[d].min(clo[d]);
            hi[d] = hi[d].max(chi[d]);
        }
    }
    (lo, hi)
}

fn moment(path: &Path, common: &CommonArgs) -> Result<bool, AnyError> {
    let scene = load(path, common.seed)?;
    let (lo, hi) = scene_bbox(&scene.family);
    let battery = standard_battery(lo, hi, scene.run.seed);
    let mut rows = Vec::new();
    for (a, (curve_idx, aug)) in scene.augmentations.iter().enumerate() {
        let curve = &scene.curves()[*curve_idx];
        let p = CotangentPoint::single(curve.clone(), aug.clone())?;
        for (b, h) in battery.iter().enumerate() {
            rows.push(ReportRow::info(
                format!("aug{a}.moment_left.battery{b}"),
                moment_left(&p, &h.field()),
            ));
        }
        let rho = pullback_density(curve, aug)?;
        match density::length_spectrum(&rho) {
            Ok(spectrum) => {
                for (c, l) in spectrum.lengths.iter().enumerate() {
                    rows.push(ReportRow::info(format!("aug{a}.length_spectrum{c}"), *l));
                }
            }
            Err(e) => rows.push(ReportRow::info(
                format!("aug{a}.length_spectrum_error[{e}]"),
                -1.0,
            )),
        }
        if let Some(h) = battery.first() {
            let rm = moment_reduced_level(curve, aug, &h.field())?;
            rows.push(ReportRow::checked(
                format!("aug{a}.reduced_split_defect"),
                rm.split_defect(),
                1e-10,
            ));
        }
    }
    let mut svgs = Vec::new();
    for (d, (curve_idx, dipole)) in scene.dipoles.iter().enumerate() {
        for (k, h) in scene.hamiltonians.iter().enumerate() {
            rows.push(ReportRow::info(
                format!("dipole{d}.moment.h{k}"),
                moment_dipole(dipole, h),
            ));
        }
        if let Some(h) = scene.hamiltonians.first() {
            let base = moment_dipole(dipole, h);
            let shifted = dipole.shifted(0.75)?;
            rows.push(ReportRow::checked(
                format!("dipole{d}.class_invariance"),
                moment_dipole(&shifted, h) - base,
                1e-9,
            ));
        }
        let side = match side_classify(dipole)? {
            Side::Outward => 1.0,
            Side::Inward => -1.0,
        };
        rows.push(ReportRow::info(
            format!("dipole{d}.side [1=outward,-1=inward]"),
            side,
        ));
        if common.format.wants_svg() {
            svgs.push((
                format!("dipole{d}.svg"),
                render_scene(&scene.family, &[(*curve_idx, dipole.u().to_vec())], false),
            ));
        }
    }
    finish(common, "moment.csv", &rows, &svgs)
}

fn moser(path: &Path, grid: usize, common: &CommonArgs) -> Result<bool, AnyError> {
    let scene = load(path, common.seed)?;
    let density = scene
        .densities
        .first()
        .ok_or("moser needs a density (its first component is the graph function f)")?;
    let f = &density.components()[0];
    let (_, report) = moser_cylinder_flow(f, grid, scene.run.dt)?;
    let rows = vec![
        ReportRow::checked("moser.max_divergence", report.max_divergence, 1e-10),
        ReportRow::checked("moser.endpoint_error", report.max_endpoint_error, 1e-8),
        ReportRow::info("moser.plateau", report.plateau),
        ReportRow::info("moser.width", report.width),
    ];
    finish(common, "moser.csv", &rows, &[])
}

fn evolve_cmd(path: &Path, common: &CommonArgs) -> Result<bool, AnyError> {
    let scene = load(path, common.seed)?;
    let (_, dipole) = scene
        .dipoles
        .first()
        .ok_or("evolve needs a dipole in the scene")?;
    let h = scene
        .hamiltonians
        .first()
        .ok_or("evolve needs a hamiltonian in the scene")?;
    let record = evolve(dipole, h, scene.run.t_final, scene.run.dt, None)?;
    let drift = record.invariant_report();
    let rows = vec![
        ReportRow::checked("evolve.area_drift", drift.area, 1e-6),
        ReportRow::checked("evolve.length_drift", drift.length, 1e-6),
        ReportRow::checked("evolve.moment_drift", drift.moment, 1e-6),
    ];
    if common.format.wants_csv() {
        write_out(&common.out, "trajectory.csv", &trajectory_csv(&record))?;
    }
    let svgs = if common.format.wants_svg() {
        vec![("trajectory.svg".to_string(), render_trajectory(&record, 24))]
    } else {
        vec![]
    };
    finish(common, "evolve.csv", &rows, &svgs)
}

fn prequant(path: &Path, common: &CommonArgs) -> Result<bool, AnyError> {
    let scene = load(path, common.seed)?;
    let density = scene.densities.first().ok_or("prequant needs a density")?;
    let report = verify_generator_pairing(density)?;
    let mut rows = Vec::new();
    for (i, (l, defect)) in report.lengths.iter().zip(&report.defects).enumerate() {
        rows.push(ReportRow::info(format!("component{i}.length"), *l));
        rows.push(ReportRow::checked(
            format!("component{i}.pairing_defect"),
            *defect,
            1e-10,
        ));
    }
    match &report.certificate {
        Some(cert) => {
            rows.push(ReportRow {
                metric: "certificate.identities_exact".into(),
                value: if cert.verify() { 1.0 } else { 0.0 },
                tolerance: 0.0,
                pass: cert.verify(),
            });
            rows.push(ReportRow::info("certificate.n", cert.n as f64));
            for (i, m) in cert.m.iter().enumerate() {
                rows.push(ReportRow::info(format!("certificate.m{i}"), *m as f64));
            }
            if let Some(recon) = &report.reconstruction_defects {
                for (i, r) in recon.iter().enumerate() {
                    rows.push(ReportRow::checked(
                        format!("component{i}.reconstruction_defect"),
                        *r,
                        1e-9,
                    ));
                }
            }
        }
        None => rows.push(ReportRow::info(
            "certificate.hypothesis_not_satisfied [l² not integers]",
            0.0,
        )),
    }
    finish(common, "prequant.csv", &rows, &[])
}

fn lab(
    path: &Path,
    kind: LeafKind,
    modes: usize,
    grid: usize,
    common: &CommonArgs,
) -> Result<bool, AnyError> {
    let scene = load(path, common.seed)?;
    let point = match scene.augmentations.first() {
        Some((curve_idx, aug)) => {
            CotangentPoint::single(scene.curves()[*curve_idx].clone(), aug.clone())?
        }
        None => {
            // Tangential momentum keeps the pullback nowhere zero.
            let curve = scene.curves()[0].clone();
            let m = curve.tangents();
            CotangentPoint::single(curve, Augmentation::from_momentum(m))?
        }
    };
    let battery = DirectionBattery::standard(&point, modes, grid);
    let check = hamiltonian_property_check(&point, &battery, 1e-4, 3, scene.run.seed)?;
    let complement = complement_residual(&point, &battery, kind)?;
    let expected = expected_codim(point.family(), kind);
    let mut rows = vec![
        ReportRow::checked("lab.identity_residual", check.max_identity_residual, 1e-9),
        ReportRow::checked("lab.fd_residual", check.max_fd_residual, 1e-6),
        ReportRow::info("lab.coverage_residual", complement.coverage_residual),
        ReportRow::info("lab.max_principal_angle", complement.max_angle),
        ReportRow {
            metric: "lab.rank_deficit".into(),
            value: complement.rank_deficit as f64,
            tolerance: expected as f64,
            pass: complement.rank_deficit == expected,
        },
    ];
    let enrichment = enrichment_residuals(&point, kind, modes.min(6), &[3, 5, 9])?;
    let mut monotone = true;
    for pair in enrichment.windows(2) {
        if pair[1].coverage_residual > pair[0].coverage_residual * 1.05 + 1e-12 {
            monotone = false;
        }
    }
    for pt in &enrichment {
        rows.push(ReportRow::info(
            format!("lab.enrichment.grid{}.coverage_residual", pt.grid),
            pt.coverage_residual,
        ));
    }
    rows.push(ReportRow {
        metric: "lab.enrichment_monotone".into(),
        value: if monotone { 1.0 } else { 0.0 },
        tolerance: 0.0,
        pass: monotone,
    });
    finish(common, "lab.csv", &rows, &[])
}
