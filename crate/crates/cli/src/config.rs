//! Experiment configuration: strict JSON parsing, unit conversion and
//! defaults.
//!
//! A config is one JSON object. Unknown keys are rejected, and every error
//! names the offending key path (`loop.ramp`, `scan.values[2]`, ...).
//!
//! ```json
//! {
//!   "gate": "gate1",
//!   "phase_target": 0.7853981633974483,
//!   "omega": "50 fs",
//!   "t_ad": "7.5 ps",
//!   "initial_state": "Eplus",
//!   "output_dir": "out/gate1"
//! }
//! ```

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use hqc_core::loops::DEFAULT_SAMPLES;
use hqc_core::{units, Level, Ramp, StateVector, System, WedgeLoopSpec, WedgeOverrides, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::quantity::{self, Quantity};

pub const DEFAULT_OUTPUT_DIR: &str = "hqc-output";
/// Drive used by holonomy-only runs when `omega` is omitted. The holonomy
/// does not depend on it.
pub const HOLONOMY_OMEGA: f64 = 0.02;
pub const HOLONOMY_T_AD: f64 = 7500.0;
pub const HOLONOMY_DELTA_MEV: f64 = 5.0;

/// Parameters a scan may vary.
pub const SCAN_PARAMETERS: &[&str] = &[
    "t_ad",
    "omega",
    "delta",
    "dt",
    "phase_target",
    "loop.theta_max",
    "loop.phi_sweep",
    "loop.n_samples",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Gate1,
    Gate2,
    TwoQubit,
    Holonomy,
    Scan,
}

/// Which loop a holonomy-only run transports around.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopMap {
    Gate1,
    Gate2,
    TwoQubit,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    gate: Experiment,
    phase_target: Option<f64>,
    omega: Option<Quantity>,
    delta: Option<Quantity>,
    t_ad: Option<Quantity>,
    dt: Option<Quantity>,
    #[serde(rename = "loop")]
    wedge: Option<RawLoop>,
    initial_state: Option<RawState>,
    output_dir: Option<PathBuf>,
    map: Option<LoopMap>,
    compare_holonomy: Option<bool>,
    scan: Option<RawScan>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLoop {
    theta_max: Option<f64>,
    phi_sweep: Option<f64>,
    ramp: Option<Ramp>,
    n_samples: Option<usize>,
    reversed: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawState {
    Label(String),
    Real(Vec<f64>),
    Complex(Vec<[f64; 2]>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    gate: Experiment,
    parameter: String,
    values: Vec<Value>,
}

/// Loop settings after defaults. `theta_max`, `phi_sweep` and `reversed`
/// stay optional because gate runs solve them from the phase target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoopConfig {
    pub theta_max: Option<f64>,
    pub phi_sweep: Option<f64>,
    pub ramp: Ramp,
    pub n_samples: usize,
    pub reversed: Option<bool>,
}

impl LoopConfig {
    pub fn overrides(&self) -> WedgeOverrides {
        WedgeOverrides {
            theta_max: self.theta_max,
            ramp: Some(self.ramp),
            n_samples: Some(self.n_samples),
            reversed: self.reversed,
        }
    }

    /// The wedge written out in full, when `phi_sweep` is given.
    pub fn explicit(&self, reversed_default: bool) -> Option<WedgeLoopSpec> {
        self.phi_sweep.map(|phi_sweep| WedgeLoopSpec {
            theta_max: self.theta_max.unwrap_or(FRAC_PI_2),
            phi_sweep,
            ramp: self.ramp,
            n_samples: self.n_samples,
            reversed: self.reversed.unwrap_or(reversed_default),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum InitialState {
    Label(Level),
    Amplitudes(Vec<[f64; 2]>),
}

impl InitialState {
    pub fn to_state(&self) -> hqc_core::Result<StateVector> {
        match self {
            InitialState::Label(level) => Ok(StateVector::basis(*level)),
            InitialState::Amplitudes(amps) => {
                let system = if amps.len() == System::SingleExciton.dim() {
                    System::SingleExciton
                } else {
                    System::TwoExciton
                };
                let amps = amps.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                StateVector::from_amplitudes(system, amps)
            }
        }
    }
}

/// A fully converted config. Frequencies in rad/fs, times in fs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub gate: Experiment,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<LoopMap>,
    pub phase_target: Option<f64>,
    pub omega: f64,
    pub delta: Option<f64>,
    pub t_ad: f64,
    /// `None` until resolved from the step-size rule.
    pub dt: Option<f64>,
    #[serde(rename = "loop")]
    pub wedge: LoopConfig,
    pub initial_state: InitialState,
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub compare_holonomy: bool,
    #[serde(skip)]
    pub scan: Option<ScanConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub parameter: String,
    pub values: Vec<Value>,
    pub entries: Vec<ExperimentConfig>,
}

/// Command-line replacements applied after parsing.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub dt: Option<f64>,
    pub samples: Option<usize>,
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config {
        path: path.into(),
        message: message.into(),
    }
}

fn forbid<T>(value: &Option<T>, path: &str, gate: Experiment) -> Result<(), CliError> {
    match value {
        Some(_) => Err(config_error(path, format!("not used by gate {}", gate_name(gate)))),
        None => Ok(()),
    }
}

fn require<T>(value: Option<T>, path: &str) -> Result<T, CliError> {
    value.ok_or_else(|| config_error(path, "missing required field"))
}

fn gate_name(gate: Experiment) -> &'static str {
    match gate {
        Experiment::Gate1 => "gate1",
        Experiment::Gate2 => "gate2",
        Experiment::TwoQubit => "twoqubit",
        Experiment::Holonomy => "holonomy",
        Experiment::Scan => "scan",
    }
}

fn convert(q: Option<&Quantity>, path: &str, f: fn(&Quantity) -> Result<f64, String>) -> Result<Option<f64>, CliError> {
    q.map(|q| f(q).map_err(|m| config_error(path, m))).transpose()
}

fn parse_level(label: &str) -> Result<Level, CliError> {
    let name = label.replace('+', "plus").replace('-', "minus");
    name.parse()
        .map_err(|_| config_error("initial_state", format!("unknown basis label `{label}`")))
}

fn parse_state(raw: RawState) -> Result<InitialState, CliError> {
    let amps: Vec<[f64; 2]> = match raw {
        RawState::Label(label) => return parse_level(&label).map(InitialState::Label),
        RawState::Real(xs) => xs.into_iter().map(|x| [x, 0.0]).collect(),
        RawState::Complex(zs) => zs,
    };
    let dims = [System::SingleExciton.dim(), System::TwoExciton.dim()];
    if !dims.contains(&amps.len()) {
        return Err(config_error(
            "initial_state",
            format!("expected {} or {} amplitudes, got {}", dims[0], dims[1], amps.len()),
        ));
    }
    Ok(InitialState::Amplitudes(amps))
}

/// Parses a JSON config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| config_error("", e.to_string()))?;
    parse_value(value)
}

/// Parses an already decoded JSON document.
pub fn parse_value(value: Value) -> Result<ExperimentConfig, CliError> {
    let raw: RawConfig = serde_path_to_error::deserialize(value.clone()).map_err(|e| {
        let path = e.path().to_string();
        config_error(if path == "." { String::new() } else { path }, e.into_inner().to_string())
    })?;
    resolve(raw, &value)
}

fn resolve(raw: RawConfig, document: &Value) -> Result<ExperimentConfig, CliError> {
    let gate = raw.gate;
    let wedge_raw = raw.wedge.unwrap_or_default();
    let wedge = LoopConfig {
        theta_max: wedge_raw.theta_max,
        phi_sweep: wedge_raw.phi_sweep,
        ramp: wedge_raw.ramp.unwrap_or_default(),
        n_samples: wedge_raw.n_samples.unwrap_or(DEFAULT_SAMPLES),
        reversed: wedge_raw.reversed,
    };
    let omega = convert(raw.omega.as_ref(), "omega", quantity::rabi_frequency)?;
    let delta = convert(raw.delta.as_ref(), "delta", quantity::energy)?;
    let t_ad = convert(raw.t_ad.as_ref(), "t_ad", quantity::duration)?;
    let dt = convert(raw.dt.as_ref(), "dt", quantity::duration)?;
    let initial_state = raw.initial_state.map(parse_state).transpose()?;
    if let Some(p) = raw.phase_target {
        if !p.is_finite() {
            return Err(config_error("phase_target", "must be finite"));
        }
    }
    if gate != Experiment::Scan {
        forbid(&raw.scan, "scan", gate)?;
    }
    if gate != Experiment::Holonomy {
        forbid(&raw.map, "map", gate)?;
    }

    let mut config = ExperimentConfig {
        gate,
        map: None,
        phase_target: raw.phase_target,
        omega: 0.0,
        delta,
        t_ad: 0.0,
        dt,
        wedge,
        initial_state: InitialState::Label(Level::Eplus),
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        compare_holonomy: raw.compare_holonomy.unwrap_or(true),
        scan: None,
    };

    match gate {
        Experiment::Gate1 | Experiment::Gate2 => {
            require(raw.phase_target, "phase_target")?;
            forbid(&delta, "delta", gate)?;
            forbid(&wedge_raw.phi_sweep, "loop.phi_sweep", gate)?;
            config.omega = require(omega, "omega")?;
            config.t_ad = require(t_ad, "t_ad")?;
            config.initial_state = initial_state.unwrap_or(InitialState::Label(Level::Eplus));
        }
        Experiment::TwoQubit => {
            forbid(&raw.phase_target, "phase_target", gate)?;
            config.omega = require(omega, "omega")?;
            config.t_ad = require(t_ad, "t_ad")?;
            config.delta = Some(require(delta, "delta")?);
            config.initial_state = initial_state.unwrap_or(InitialState::Label(Level::EplusEplus));
        }
        Experiment::Holonomy => {
            let map = require(raw.map, "map")?;
            forbid(&initial_state, "initial_state", gate)?;
            forbid(&dt, "dt", gate)?;
            match (raw.phase_target, wedge_raw.phi_sweep, map) {
                (Some(_), Some(_), _) => {
                    return Err(config_error("loop.phi_sweep", "give either phase_target or loop.phi_sweep"))
                }
                (Some(_), None, LoopMap::TwoQubit) => {
                    return Err(config_error("phase_target", "the two-qubit loop is set by loop.theta_max"))
                }
                (None, None, LoopMap::Gate1 | LoopMap::Gate2) => {
                    return Err(config_error("phase_target", "missing required field (or give loop.phi_sweep)"))
                }
                _ => {}
            }
            config.map = Some(map);
            config.omega = omega.unwrap_or(HOLONOMY_OMEGA);
            config.t_ad = t_ad.unwrap_or(HOLONOMY_T_AD);
            if map == LoopMap::TwoQubit {
                config.delta = Some(delta.unwrap_or_else(|| units::mev_to_rad_per_fs(HOLONOMY_DELTA_MEV)));
            } else {
                forbid(&delta, "delta", gate)?;
            }
            config.compare_holonomy = false;
        }
        Experiment::Scan => {
            let scan = require(raw.scan, "scan")?;
            config.scan = Some(resolve_scan(scan, document)?);
        }
    }
    Ok(config)
}

fn resolve_scan(scan: RawScan, document: &Value) -> Result<ScanConfig, CliError> {
    if !matches!(scan.gate, Experiment::Gate1 | Experiment::Gate2 | Experiment::TwoQubit) {
        return Err(config_error("scan.gate", "scans run gate1, gate2 or twoqubit"));
    }
    if !SCAN_PARAMETERS.contains(&scan.parameter.as_str()) {
        return Err(config_error(
            "scan.parameter",
            format!("cannot scan `{}`; choose one of {}", scan.parameter, SCAN_PARAMETERS.join(", ")),
        ));
    }
    if scan.values.is_empty() {
        return Err(config_error("scan.values", "at least one value required"));
    }
    let mut base = document.clone();
    let object = base.as_object_mut().expect("config parsed as an object");
    object.remove("scan");
    object.insert("gate".into(), serde_json::to_value(scan.gate).expect("gate serializes"));

    let entries = scan
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let mut doc = base.clone();
            set_path(&mut doc, &scan.parameter, v.clone());
            parse_value(doc).map_err(|e| match e {
                CliError::Config { path, message } => {
                    config_error(format!("scan.values[{k}]"), format!("{path}: {message}"))
                }
                other => other,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScanConfig {
        parameter: scan.parameter,
        values: scan.values,
        entries,
    })
}

fn set_path(doc: &mut Value, path: &str, value: Value) {
    let mut node = doc;
    let mut keys = path.split('.').peekable();
    while let Some(key) = keys.next() {
        let object = node.as_object_mut().expect("scan target is an object");
        if keys.peek().is_none() {
            object.insert(key.into(), value);
            return;
        }
        node = object.entry(key).or_insert_with(|| Value::Object(Default::default()));
    }
}

impl ExperimentConfig {
    pub fn apply_overrides(&mut self, overrides: &Overrides) {
        if let Some(dir) = &overrides.output_dir {
            self.output_dir = dir.clone();
        }
        if let Some(dt) = overrides.dt {
            self.dt = Some(dt);
        }
        if let Some(n) = overrides.samples {
            self.wedge.n_samples = n;
        }
        if let Some(scan) = &mut self.scan {
            let entry_overrides = Overrides {
                output_dir: None,
                ..overrides.clone()
            };
            for entry in &mut scan.entries {
                entry.apply_overrides(&entry_overrides);
            }
        }
    }

    /// Rewrites a gate config as a holonomy-only config over the same loop.
    pub fn as_holonomy(&self) -> Result<ExperimentConfig, CliError> {
        let map = match self.gate {
            Experiment::Holonomy => return Ok(self.clone()),
            Experiment::Gate1 => LoopMap::Gate1,
            Experiment::Gate2 => LoopMap::Gate2,
            Experiment::TwoQubit => LoopMap::TwoQubit,
            Experiment::Scan => return Err(config_error("gate", "holonomy runs a single loop, not a scan")),
        };
        Ok(ExperimentConfig {
            gate: Experiment::Holonomy,
            map: Some(map),
            dt: None,
            compare_holonomy: false,
            ..self.clone()
        })
    }

    /// Value of a scannable parameter in internal units.
    pub fn parameter_value(&self, name: &str) -> Option<f64> {
        match name {
            "t_ad" => Some(self.t_ad),
            "omega" => Some(self.omega),
            "delta" => self.delta,
            "dt" => self.dt,
            "phase_target" => self.phase_target,
            "loop.theta_max" => self.wedge.theta_max,
            "loop.phi_sweep" => self.wedge.phi_sweep,
            "loop.n_samples" => Some(self.wedge.n_samples as f64),
            _ => None,
        }
    }
}
