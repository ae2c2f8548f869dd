//! Study dispatch, the deterministic worker pool, and the run manifest.
//!
//! Sweep points are distributed over a rayon pool by grid index and the
//! outcomes collected back into their pre-assigned slots, so the assembled
//! results (and every emitted byte) are identical for any worker count.

use std::path::{Path, PathBuf};
use std::time::Instant;

use monotrack_core::balance::{
    default_pitch_grid, dof_comparison, find_static_configs, psi_star, PsiSweep, WheelieModel,
};
use monotrack_core::jump::{
    default_gear_grids, default_mass_grid, jump_metrics, simulate_jump, ExtensionPolicy, GearSweep,
    MassSweep, ScaleSweep,
};
use monotrack_core::sweep::{linspace, GridStudy, SweepPoint};
use monotrack_core::SweepResult;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, StudySpec};
use crate::emit;

#[derive(Debug)]
pub struct RunError {
    pub message: String,
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "run error: {}", self.message)
    }
}

impl std::error::Error for RunError {}

fn fail(message: impl Into<String>) -> RunError {
    RunError {
        message: message.into(),
    }
}

/// Record of one completed run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_sha256: String,
    pub toolkit_version: String,
    pub study: String,
    pub duration_seconds: f64,
    pub points_total: usize,
    pub points_failed: usize,
    pub failures: Vec<String>,
    pub outputs: Vec<String>,
    pub seed: u64,
}

/// Evaluates a grid study over the worker pool, preserving grid order.
pub fn run_parallel<S: GridStudy>(study: &S, workers: usize) -> SweepResult {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("worker pool");
    let points: Vec<SweepPoint> = pool.install(|| {
        use rayon::prelude::*;
        (0..study.num_points())
            .into_par_iter()
            .map(|i| study.eval_point(i))
            .collect()
    });
    study.assemble(points)
}

fn sweep_failures(result: &SweepResult) -> Vec<String> {
    result
        .points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| match p {
            SweepPoint::Failed(f) => Some(format!("point {i}: {f:?}")),
            SweepPoint::Metrics(_) => None,
        })
        .collect()
}

/// Executes the configured study and writes its outputs plus the manifest.
pub fn run(
    config: &ExperimentConfig,
    out_dir: &Path,
    workers: usize,
    strict: bool,
) -> Result<RunManifest, RunError> {
    let start = Instant::now();
    std::fs::create_dir_all(out_dir)
        .map_err(|e| fail(format!("cannot create {}: {e}", out_dir.display())))?;
    // Probe writability before any compute.
    let probe = out_dir.join(".write-probe");
    std::fs::write(&probe, b"ok")
        .and_then(|_| std::fs::remove_file(&probe))
        .map_err(|e| fail(format!("output directory not writable: {e}")))?;

    let mut outputs: Vec<PathBuf> = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    let points_total;

    // Canonical copy of the config; its hash identifies the run.
    let config_path = out_dir.join("config.json");
    emit::write_atomic(&config_path, config.canonical_json().as_bytes())
        .map_err(|e| fail(format!("writing config copy: {e}")))?;
    outputs.push(config_path);

    let m = &config.morphology;
    let cfg = &config.simulation;
    let formats = &config.output.formats;

    match &config.study {
        StudySpec::Jump { ramp_duration } => {
            let mut policy = ExtensionPolicy::nominal(m);
            if let Some(ramp) = ramp_duration {
                policy.ramp_duration = *ramp;
            }
            let trace = simulate_jump(m, &policy, cfg).map_err(|e| fail(format!("{e}")))?;
            let metrics = jump_metrics(&trace).map_err(|e| fail(format!("{e}")))?;
            points_total = 1;
            if formats.iter().any(|f| f == "csv") {
                let path = out_dir.join("results.csv");
                emit::write_atomic(&path, emit::jump_csv(&metrics).as_bytes())
                    .map_err(|e| fail(format!("{e}")))?;
                outputs.push(path);
            }
            if formats.iter().any(|f| f == "json") {
                let path = out_dir.join("trace.json");
                emit::write_atomic(&path, emit::trace_json(&trace).as_bytes())
                    .map_err(|e| fail(format!("{e}")))?;
                outputs.push(path);
            }
            if formats.iter().any(|f| f == "svg") {
                let path = out_dir.join("plot.svg");
                emit::write_atomic(&path, emit::trace_svg(&trace).as_bytes())
                    .map_err(|e| fail(format!("{e}")))?;
                outputs.push(path);
            }
        }
        StudySpec::SweepMass { link, masses } => {
            let grid = masses
                .map(|g| g.values())
                .unwrap_or_else(|| default_mass_grid(m, *link));
            let sweep = MassSweep::new(m.clone(), *link, grid, *cfg);
            let result = run_parallel(&sweep, workers);
            points_total = result.points.len();
            failures = sweep_failures(&result);
            outputs.extend(
                emit::emit_sweep(&result, out_dir, formats).map_err(|e| fail(format!("{e}")))?,
            );
        }
        StudySpec::SweepGear { gr_alpha, gr_beta } => {
            let (default_a, default_b) = default_gear_grids();
            let grid_a = gr_alpha.map(|g| g.values()).unwrap_or(default_a);
            let grid_b = gr_beta.map(|g| g.values()).unwrap_or(default_b);
            let sweep = GearSweep::new(m.clone(), grid_a, grid_b, *cfg);
            let result = run_parallel(&sweep, workers);
            points_total = result.points.len();
            failures = sweep_failures(&result);
            outputs.extend(
                emit::emit_sweep(&result, out_dir, formats).map_err(|e| fail(format!("{e}")))?,
            );
        }
        StudySpec::SweepScale { scales, coupling } => {
            let grid = ExperimentConfig::scale_grid(scales);
            let sweep = ScaleSweep::new(m.clone(), grid, *coupling, *cfg);
            let result = run_parallel(&sweep, workers);
            points_total = result.points.len();
            failures = sweep_failures(&result);
            outputs.extend(
                emit::emit_sweep(&result, out_dir, formats).map_err(|e| fail(format!("{e}")))?,
            );
        }
        StudySpec::BalancePsi { psi, horizon } => {
            let model =
                WheelieModel::new(m.clone(), psi_star_clamped(m)).map_err(|e| fail(format!("{e}")))?;
            let configs = find_static_configs(&model, &default_pitch_grid(), &[1.3])
                .map_err(|e| fail(format!("{e}")))?;
            let grid = psi
                .map(|g| g.values())
                .unwrap_or_else(|| linspace(-1.4, 1.4, 29));
            let sweep = PsiSweep {
                model,
                psi_grid: grid,
                configs,
                horizon: *horizon,
            };
            let result = run_parallel(&sweep, workers);
            points_total = result.points.len();
            failures = sweep_failures(&result);
            outputs.extend(
                emit::emit_sweep(&result, out_dir, formats).map_err(|e| fail(format!("{e}")))?,
            );
        }
        StudySpec::BalanceDof { zeta_hat, horizon } => {
            let model = WheelieModel::new(m.clone(), psi_star_clamped(m))
                .map_err(|e| fail(format!("{e}")))?
                .with_extra_dof(*zeta_hat);
            let configs = find_static_configs(&model, &default_pitch_grid(), &[1.3])
                .map_err(|e| fail(format!("{e}")))?;
            let cmp =
                dof_comparison(&model, &configs, *horizon).map_err(|e| fail(format!("{e}")))?;
            points_total = 2;
            if formats.iter().any(|f| f == "csv") {
                let csv = format!(
                    "variant,xi_aggregate\n5dof,{}\n6dof,{}\nratio,{}\n",
                    emit::format_g9(cmp.xi_5dof),
                    emit::format_g9(cmp.xi_6dof),
                    emit::format_g9(cmp.ratio),
                );
                let path = out_dir.join("results.csv");
                emit::write_atomic(&path, csv.as_bytes()).map_err(|e| fail(format!("{e}")))?;
                outputs.push(path);
            }
        }
    }

    let manifest = RunManifest {
        config_sha256: config.config_hash(),
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        study: config.study.name().to_string(),
        duration_seconds: start.elapsed().as_secs_f64(),
        points_total,
        points_failed: failures.len(),
        failures: failures.clone(),
        outputs: outputs
            .iter()
            .map(|p| {
                p.file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default()
            })
            .chain(std::iter::once("manifest.json".to_string()))
            .collect(),
        seed: config.seed,
    };
    let manifest_path = out_dir.join("manifest.json");
    let manifest_json =
        serde_json::to_string_pretty(&manifest).map_err(|e| fail(format!("{e}")))?;
    emit::write_atomic(&manifest_path, manifest_json.as_bytes())
        .map_err(|e| fail(format!("{e}")))?;

    if strict && !failures.is_empty() {
        return Err(fail(format!(
            "{} of {} points failed (strict mode)",
            failures.len(),
            points_total
        )));
    }
    Ok(manifest)
}

/// The geometric rear-axle angle makes a sensible default axis for the
/// balance model when none is being swept.
fn psi_star_clamped(m: &monotrack_core::MorphologySpec) -> f64 {
    let probe = WheelieModel {
        morphology: m.clone(),
        psi_hat: 0.0,
        extra_dof: None,
    };
    psi_star(&probe)
        .clamp(-std::f64::consts::FRAC_PI_2 + 1e-6, std::f64::consts::FRAC_PI_2 - 1e-6)
}
