//! Runs parsed configs and writes their artifacts.
//!
//! Every run directory gets `manifest.json`. Gate runs add `trace.csv`,
//! `report.json` and `schedule.csv`; holonomy runs add `report.json` and
//! `schedule.csv`; scans add one subdirectory per entry plus `summary.csv`.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::{Path, PathBuf};

use hqc_core::dynamics::{max_time_step, EvolveOptions, RunOptions};
use hqc_core::holonomy::{holonomy, relative_phase, rotation_angle, sigma_y_angle};
use hqc_core::loops::{gate1_wedge, gate2_wedge, two_qubit_adiabaticity};
use hqc_core::output::{fmt_float, to_json};
use hqc_core::{
    controlled_phase_wedge, predicted_gate, predicted_two_qubit, run_gate1, run_gate2, run_two_qubit,
    solid_angle, wedge_path, BiexcitonShift, ControlMap, FidelityReport, GateKind, GateRun, HolonomyResult,
    LoopSchedule, Model, PredictedKind, WedgeLoopSpec,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{Experiment, ExperimentConfig, LoopConfig, LoopMap};
use crate::error::CliError;

pub const TOOL_NAME: &str = "hqc";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Holonomy,
    Scan,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Holonomy => "holonomy",
            Command::Scan => "scan",
        }
    }
}

/// A finished gate simulation with its config fully resolved.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: ExperimentConfig,
    pub spec: WedgeLoopSpec,
    pub run: GateRun,
}

#[derive(Debug, Clone, Serialize)]
pub struct HolonomyReport {
    pub map: LoopMap,
    pub wilson_line: HolonomyResult,
    /// Signed, from the sampled path.
    pub solid_angle: f64,
    /// Signed, `Φ(1 − cos θ_max)`.
    pub solid_angle_formula: f64,
    /// Gate 1: `arg(W₁₁/W₀₀)`. Gate 2: signed `σ_y` angle. Two dots:
    /// `arg⟨E⁺E⁺|W|E⁺E⁺⟩`.
    pub phase: f64,
    /// Gate 2 only: `acos(Re tr W / 2)`.
    pub rotation_angle: Option<f64>,
    pub predicted_phase: f64,
    /// `max|W − W_predicted|`.
    pub predicted_distance: f64,
}

#[derive(Debug, Clone)]
pub struct HolonomyOutcome {
    pub config: ExperimentConfig,
    pub spec: WedgeLoopSpec,
    pub schedule: LoopSchedule,
    pub report: HolonomyReport,
}

fn config_error(path: &str, message: &str) -> CliError {
    CliError::Config {
        path: path.into(),
        message: message.into(),
    }
}

fn resolved_loop(spec: &WedgeLoopSpec) -> LoopConfig {
    LoopConfig {
        theta_max: Some(spec.theta_max),
        phi_sweep: Some(spec.phi_sweep),
        ramp: spec.ramp,
        n_samples: spec.n_samples,
        reversed: Some(spec.reversed),
    }
}

/// The two-dot wedge: explicit when `phi_sweep` is given, otherwise the
/// controlled-phase loop at `theta_max` (default π/2).
pub fn two_qubit_spec(wedge: &LoopConfig) -> Result<WedgeLoopSpec, CliError> {
    if let Some(spec) = wedge.explicit(false) {
        spec.validate()?;
        return Ok(spec);
    }
    let mut spec = controlled_phase_wedge(wedge.theta_max.unwrap_or(FRAC_PI_2), wedge.ramp, wedge.n_samples)?;
    spec.reversed = wedge.reversed.unwrap_or(false);
    Ok(spec)
}

fn shift(config: &ExperimentConfig) -> Result<BiexcitonShift, CliError> {
    let delta = config.delta.ok_or_else(|| config_error("delta", "missing required field"))?;
    Ok(BiexcitonShift::new(delta)?)
}

/// Runs a gate1, gate2 or twoqubit config.
pub fn simulate(config: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    let psi0 = config.initial_state.to_state()?;
    let options = RunOptions {
        evolve: EvolveOptions {
            dt: config.dt,
            ..Default::default()
        },
        wedge: config.wedge.overrides(),
        compare_holonomy: config.compare_holonomy,
    };
    let phase = || config.phase_target.ok_or_else(|| config_error("phase_target", "missing required field"));
    let (spec, run) = match config.gate {
        Experiment::Gate1 => {
            let phi = phase()?;
            let spec = gate1_wedge(phi, &options.wedge)?;
            (spec, run_gate1(phi, config.omega, config.t_ad, &psi0, &options)?)
        }
        Experiment::Gate2 => {
            let phi = phase()?;
            let spec = gate2_wedge(phi, &options.wedge)?;
            (spec, run_gate2(phi, config.omega, config.t_ad, &psi0, &options)?)
        }
        Experiment::TwoQubit => {
            let spec = two_qubit_spec(&config.wedge)?;
            let run = run_two_qubit(&spec, config.omega, &shift(config)?, config.t_ad, &psi0, &options)?;
            (spec, run)
        }
        Experiment::Holonomy | Experiment::Scan => {
            return Err(config_error("gate", "expected gate1, gate2 or twoqubit"));
        }
    };
    let mut resolved = config.clone();
    resolved.dt = Some(config.dt.unwrap_or_else(|| max_time_step(&run.schedule)));
    resolved.wedge = resolved_loop(&spec);
    Ok(RunOutcome {
        config: resolved,
        spec,
        run,
    })
}

/// Wilson line of the config's loop, with no dynamics.
pub fn holonomy_only(config: &ExperimentConfig) -> Result<HolonomyOutcome, CliError> {
    let config = config.as_holonomy()?;
    let map = config.map.ok_or_else(|| config_error("map", "missing required field"))?;
    let overrides = config.wedge.overrides();
    let spec = match map {
        LoopMap::Gate1 => match config.wedge.explicit(false) {
            Some(spec) => spec,
            None => gate1_wedge(phase_target(&config)?, &overrides)?,
        },
        LoopMap::Gate2 => match config.wedge.explicit(true) {
            Some(spec) => spec,
            None => gate2_wedge(phase_target(&config)?, &overrides)?,
        },
        LoopMap::TwoQubit => two_qubit_spec(&config.wedge)?,
    };
    let (control, kind, model) = match map {
        LoopMap::Gate1 => (ControlMap::Gate1, GateKind::Gate1, Model::Single),
        LoopMap::Gate2 => (ControlMap::Gate2, GateKind::Gate2, Model::Single),
        LoopMap::TwoQubit => (ControlMap::Gate1, GateKind::TwoQubit, Model::TwoExciton(shift(&config)?)),
    };
    let schedule = LoopSchedule::from_path(&wedge_path(&spec, config.t_ad)?, control, config.omega, kind)?;
    let wilson = holonomy(&schedule, &model)?;
    let numeric = solid_angle(&schedule.angles())?;
    let w = &wilson.unitary;
    let (phase, rotation, predicted_phase, predicted) = match map {
        // Forward gate-1 loops give diag(1, e^{+iΩ/2}); reversed gate-2
        // loops (negative signed area) give exp(+i|Ω|σ_y).
        LoopMap::Gate1 => {
            let p = numeric / 2.0;
            (relative_phase(w), None, p, predicted_gate(PredictedKind::Gate1, p))
        }
        LoopMap::Gate2 => {
            let p = -numeric;
            (sigma_y_angle(w), Some(rotation_angle(w)), p, predicted_gate(PredictedKind::Gate2, p))
        }
        LoopMap::TwoQubit => {
            let predicted = predicted_two_qubit(&spec);
            let p = predicted.matrix()[(2, 2)].arg();
            (w.matrix()[(2, 2)].arg(), None, p, predicted)
        }
    };
    let report = HolonomyReport {
        map,
        solid_angle: numeric,
        solid_angle_formula: spec.solid_angle(),
        phase,
        rotation_angle: rotation,
        predicted_phase,
        predicted_distance: w.distance(&predicted),
        wilson_line: wilson,
    };
    let mut resolved = config;
    resolved.wedge = resolved_loop(&spec);
    Ok(HolonomyOutcome {
        config: resolved,
        spec,
        schedule,
        report,
    })
}

fn phase_target(config: &ExperimentConfig) -> Result<f64, CliError> {
    config.phase_target.ok_or_else(|| config_error("phase_target", "missing required field"))
}

/// Runs every scan entry, concurrently, in entry order.
pub fn scan(config: &ExperimentConfig) -> Result<Vec<RunOutcome>, CliError> {
    let scan = config
        .scan
        .as_ref()
        .ok_or_else(|| config_error("scan", "missing required field"))?;
    scan.entries.par_iter().map(simulate).collect()
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

// The manifest lives inside output_dir, so the directory itself is left out;
// that keeps manifests of identical configs identical.
fn manifest(command: Command, config: &ExperimentConfig, extra: serde_json::Value) -> Result<String, CliError> {
    let mut value = json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": command.name(),
        "config": config,
    });
    if let (Some(obj), serde_json::Value::Object(more)) = (value.as_object_mut(), extra) {
        obj.extend(more);
    }
    Ok(to_json(&value)?)
}

#[derive(Serialize)]
struct RunReport<'a> {
    #[serde(flatten)]
    report: &'a FidelityReport,
    wilson_line: Option<&'a HolonomyResult>,
}

pub fn write_run(outcome: &RunOutcome, dir: &Path, command: Command) -> Result<Vec<PathBuf>, CliError> {
    create_dir(dir)?;
    let run = &outcome.run;
    let report = RunReport {
        report: &run.report,
        wilson_line: run.holonomy.as_ref().map(|h| &h.geometric),
    };
    let mut extra = json!({ "solid_angle": outcome.spec.solid_angle() });
    if let (Experiment::TwoQubit, Some(delta)) = (outcome.config.gate, outcome.config.delta) {
        let ratio = two_qubit_adiabaticity(outcome.config.omega, &BiexcitonShift::new(delta)?, outcome.config.t_ad);
        extra["adiabaticity"] = json!(ratio);
    }
    Ok(vec![
        write(dir, "trace.csv", &run.trace.to_csv())?,
        write(dir, "report.json", &to_json(&report)?)?,
        write(dir, "schedule.csv", &run.schedule.to_csv())?,
        write(dir, "manifest.json", &manifest(command, &outcome.config, extra)?)?,
    ])
}

pub fn write_holonomy(outcome: &HolonomyOutcome, dir: &Path, command: Command) -> Result<Vec<PathBuf>, CliError> {
    create_dir(dir)?;
    Ok(vec![
        write(dir, "report.json", &to_json(&outcome.report)?)?,
        write(dir, "schedule.csv", &outcome.schedule.to_csv())?,
        write(dir, "manifest.json", &manifest(command, &outcome.config, json!({}))?)?,
    ])
}

fn optional(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// One row per entry: the scanned value in internal units and the headline
/// numbers of its report.
pub fn summary_csv(config: &ExperimentConfig, outcomes: &[RunOutcome]) -> String {
    let parameter = config.scan.as_ref().map(|s| s.parameter.as_str()).unwrap_or("value");
    let mut out = format!("index,{parameter},fidelity,final_phase,leakage_max,norm_drift,holonomy_distance\n");
    for (k, o) in outcomes.iter().enumerate() {
        let r = &o.run.report;
        out.push_str(&format!(
            "{k},{},{},{},{},{},{}\n",
            optional(o.config.parameter_value(parameter)),
            fmt_float(r.fidelity),
            optional(r.final_phase),
            fmt_float(r.leakage_max),
            fmt_float(r.norm_drift),
            optional(r.holonomy_distance),
        ));
    }
    out
}

pub fn entry_dir(root: &Path, index: usize) -> PathBuf {
    root.join(format!("entry_{index:03}"))
}

pub fn write_scan(config: &ExperimentConfig, outcomes: &[RunOutcome]) -> Result<Vec<PathBuf>, CliError> {
    let root = &config.output_dir;
    create_dir(root)?;
    let mut files = Vec::new();
    for (k, o) in outcomes.iter().enumerate() {
        files.extend(write_run(o, &entry_dir(root, k), Command::Scan)?);
    }
    let scan = config.scan.as_ref().expect("scan config");
    let entries: Vec<&ExperimentConfig> = outcomes.iter().map(|o| &o.config).collect();
    let extra = json!({
        "parameter": scan.parameter,
        "values": scan.values,
        "entries": entries,
    });
    files.push(write(root, "summary.csv", &summary_csv(config, outcomes))?);
    files.push(write(root, "manifest.json", &manifest(Command::Scan, config, extra)?)?);
    Ok(files)
}

/// Runs `command` on `config` and writes its artifacts under
/// `config.output_dir`.
pub fn execute(command: Command, config: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let dir = &config.output_dir;
    match (command, config.gate) {
        (Command::Scan, Experiment::Scan) | (Command::Run, Experiment::Scan) => write_scan(config, &scan(config)?),
        (Command::Scan, _) => Err(config_error("gate", "`hqc scan` needs gate \"scan\" and a scan block")),
        (Command::Holonomy, _) | (Command::Run, Experiment::Holonomy) => {
            write_holonomy(&holonomy_only(config)?, dir, command)
        }
        (Command::Run, _) => write_run(&simulate(config)?, dir, command),
    }
}
