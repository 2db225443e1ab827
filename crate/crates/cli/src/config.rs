//! Run configuration: a TOML document with one table per concern.
//!
//! ```toml
//! [grid]
//! dim = 2
//! points = 128
//! box_length = 6.283185307179586
//!
//! [data]
//! kind = "rough_random"
//! s = 0.7
//! target_hs_norm = 1.0
//! seed = 7
//!
//! [physics]
//! s = 0.7
//! n_list = [4, 8, 16, 32]
//! delta = 0.1
//!
//! [experiment]
//! slope_threshold = -1.0
//! ```
//!
//! Flags `--set section.key=value` override the file; values use TOML
//! syntax and fall back to bare strings. Defaults are resolved into the
//! config, so the echo written to the manifest parses back to the same
//! value.

use std::fmt;

use clap::ValueEnum;
use imethod_core::data_gen::DataSpec;
use imethod_core::dynamics::{default_dt, Dealias};
use imethod_core::experiments::s_threshold;
use imethod_core::spectral::{Grid, DEFAULT_GRID_CAP};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Evolve,
    Sweep,
    Growth,
    Bilinear,
    Scaling,
    Localnorm,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Evolve => "evolve",
            Self::Sweep => "sweep",
            Self::Growth => "growth",
            Self::Bilinear => "bilinear",
            Self::Scaling => "scaling",
            Self::Localnorm => "localnorm",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_length: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dealias: Option<Dealias>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observer_stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonlinearity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abort_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_cycles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2_list: Option<Vec<i32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2_threshold: Option<f64>,
}

/// The document as written: every key optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<DataSpec>,
    #[serde(default)]
    pub physics: PhysicsSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

/// A validated configuration with defaults filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub file: FileConfig,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(key: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.into(),
        message: message.into(),
    }
}

/// Parses `text` (may be empty), applies `--set` overrides, resolves
/// defaults for `command` and validates every referenced key.
pub fn parse_config(command: Command, text: &str, sets: &[String]) -> Result<RunConfig, ConfigError> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| err("<file>", e.message().to_string()))?;
    for s in sets {
        apply_set(&mut table, s)?;
    }
    let file: FileConfig = serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner().to_string();
        let key = match unknown_key(&inner) {
            Some(k) if path == "." => k,
            _ => path,
        };
        err(key, inner)
    })?;
    resolve(command, file)
}

fn unknown_key(message: &str) -> Option<String> {
    let rest = message.strip_prefix("unknown field `")?;
    Some(rest.split('`').next()?.to_string())
}

fn apply_set(table: &mut toml::Table, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| err(assignment, "expected key=value"))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(err(key, "empty path segment"));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| err(key, format!("`{p}` is not a section")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn resolve(command: Command, mut f: FileConfig) -> Result<RunConfig, ConfigError> {
    let mut missing = Vec::new();
    let mut need = |present: bool, key: &str| {
        if !present {
            missing.push(key.to_string());
        }
    };
    need(f.grid.dim.is_some(), "grid.dim");
    need(f.grid.points.is_some(), "grid.points");
    let needs_data = command != Command::Bilinear;
    if needs_data {
        need(f.data.is_some(), "data.kind");
    }
    let p = &f.physics;
    let x = &f.experiment;
    match command {
        Command::Evolve => need(p.t_end.is_some(), "physics.t_end"),
        Command::Sweep => {
            need(p.s.is_some(), "physics.s");
            need(p.n_list.is_some(), "physics.n_list");
            need(p.delta.is_some(), "physics.delta");
        }
        Command::Growth => {
            need(p.s.is_some(), "physics.s");
            need(x.t0.is_some(), "experiment.t0");
        }
        Command::Bilinear => {
            need(x.k1.is_some(), "experiment.k1");
            need(x.k2_list.is_some(), "experiment.k2_list");
            need(p.delta.is_some(), "physics.delta");
            need(x.trials.is_some(), "experiment.trials");
            need(x.seed.is_some(), "experiment.seed");
        }
        Command::Scaling => {
            need(p.s.is_some(), "physics.s");
            need(p.n.is_some(), "physics.n");
        }
        Command::Localnorm => {
            need(p.s.is_some(), "physics.s");
            need(p.n.is_some(), "physics.n");
            need(p.delta.is_some(), "physics.delta");
        }
    }
    if !missing.is_empty() {
        return Err(err(
            missing.join(", "),
            format!("missing required keys for `{}`", command.name()),
        ));
    }

    let dim = f.grid.dim.expect("checked");
    if dim != 2 && dim != 3 {
        return Err(err("grid.dim", format!("must be 2 or 3, got {dim}")));
    }
    let points = f.grid.points.expect("checked");
    let box_length = *f.grid.box_length.get_or_insert(2.0 * std::f64::consts::PI);
    let grid = Grid::new(dim, points, box_length).map_err(|e| {
        let key = if box_length.is_finite() && box_length > 0.0 {
            "grid.points"
        } else {
            "grid.box_length"
        };
        err(key, e.to_string())
    })?;

    let p = &mut f.physics;
    if let Some(s) = p.s {
        let ok = match command {
            Command::Growth => {
                let lo = s_threshold(dim).expect("dim checked");
                s > lo && s <= 1.0
            }
            _ => s > 0.0 && s < 1.0,
        };
        if !ok {
            return Err(err("physics.s", format!("{s} is out of range for `{}`", command.name())));
        }
    }
    positive_opt("physics.n", p.n)?;
    positive_opt("physics.delta", p.delta)?;
    if let Some(t) = p.t_end {
        if !(t.is_finite() && t >= 0.0) {
            return Err(err("physics.t_end", "must be nonnegative"));
        }
    }
    if let Some(list) = &p.n_list {
        if list.len() < 3 {
            return Err(err("physics.n_list", "needs at least 3 values"));
        }
        let limit = imethod_core::experiments::sweep_n_limit(&grid);
        if let Some(bad) = list.iter().find(|&&v| !(4.0..=limit).contains(&v)) {
            return Err(err("physics.n_list", format!("{bad} outside [4, {limit}]")));
        }
    }
    let dealias = *p.dealias.get_or_insert(Dealias::TwoThirds);
    if command != Command::Growth {
        p.dt.get_or_insert(default_dt(&grid, dealias));
    }
    positive_opt("physics.dt", p.dt)?;
    if *p.observer_stride.get_or_insert(1) == 0 {
        return Err(err("physics.observer_stride", "must be at least 1"));
    }
    p.snapshot_stride.get_or_insert(0);
    let g = *p.nonlinearity.get_or_insert(1.0);
    if !g.is_finite() {
        return Err(err("physics.nonlinearity", "must be finite"));
    }
    if command == Command::Localnorm {
        let b = *p.b.get_or_insert(0.55);
        if !(b > 0.0 && b.is_finite()) {
            return Err(err("physics.b", "must be positive"));
        }
        let ramp = *p.ramp.get_or_insert(0.05);
        if !(ramp > 0.0 && ramp.is_finite()) {
            return Err(err("physics.ramp", "must be positive"));
        }
    }
    if command == Command::Growth {
        positive_opt("physics.delta", Some(*p.delta.get_or_insert(0.1)))?;
    }

    let x = &mut f.experiment;
    match command {
        Command::Sweep => {
            x.refine.get_or_insert(true);
            positive_opt("experiment.refine_tolerance", Some(*x.refine_tolerance.get_or_insert(0.1)))?;
            x.slope_threshold.get_or_insert(if dim == 2 { -1.0 } else { -0.5 });
            x.r2_threshold.get_or_insert(0.9);
        }
        Command::Growth => {
            let t0 = x.t0.expect("checked");
            if !(t0.is_finite() && t0 >= 1.0) {
                return Err(err("experiment.t0", "must be at least 1"));
            }
            positive_opt("experiment.abort_threshold", Some(*x.abort_threshold.get_or_insert(1.0)))?;
            positive_opt("experiment.c1", Some(*x.c1.get_or_insert(1.0)))?;
            if *x.grid_cap.get_or_insert(DEFAULT_GRID_CAP) == 0 {
                return Err(err("experiment.grid_cap", "must be positive"));
            }
        }
        Command::Bilinear => {
            if dim != 2 {
                return Err(err("grid.dim", "the bilinear experiment runs on 2D grids"));
            }
            if x.trials == Some(0) {
                return Err(err("experiment.trials", "must be at least 1"));
            }
            let k1 = x.k1.expect("checked");
            if k1 < 0 {
                return Err(err("experiment.k1", "must be nonnegative"));
            }
            let list = x.k2_list.as_ref().expect("checked");
            if list.len() < 2 || list.iter().any(|&k| k < k1) {
                return Err(err("experiment.k2_list", "needs at least 2 shells, each >= k1"));
            }
            positive_opt("experiment.theta", Some(*x.theta.get_or_insert(1.0)))?;
            if x.samples.is_some_and(|n| n < 2) {
                return Err(err("experiment.samples", "must be at least 2"));
            }
            x.slope_threshold.get_or_insert(-0.25);
        }
        Command::Scaling => {
            let l = x.lambdas.get_or_insert_with(|| vec![1, 2, 4]);
            if l.is_empty() || l.contains(&0) {
                return Err(err("experiment.lambdas", "needs positive integers"));
            }
            if *x.grid_cap.get_or_insert(DEFAULT_GRID_CAP) == 0 {
                return Err(err("experiment.grid_cap", "must be positive"));
            }
        }
        Command::Evolve | Command::Localnorm => {}
    }
    if let Some(d) = &f.data {
        validate_data(d, dim)?;
    }
    Ok(RunConfig { command, file: f })
}

fn positive_opt(key: &str, v: Option<f64>) -> Result<(), ConfigError> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(err(key, format!("must be positive, got {x}"))),
        _ => Ok(()),
    }
}

fn validate_data(d: &DataSpec, dim: usize) -> Result<(), ConfigError> {
    match d {
        DataSpec::RoughRandom { s, target_hs_norm, .. } => {
            if !(*s > 0.0 && *s < 1.0) {
                return Err(err("data.s", format!("must lie in (0, 1), got {s}")));
            }
            positive_opt("data.target_hs_norm", Some(*target_hs_norm))
        }
        DataSpec::GaussianBump { width, amplitude, center } => {
            positive_opt("data.width", Some(*width))?;
            positive_opt("data.amplitude", Some(*amplitude))?;
            if center.len() != dim {
                return Err(err("data.center", format!("needs {dim} coordinates")));
            }
            Ok(())
        }
        DataSpec::PlaneWave { k, .. } => {
            if k.len() != dim {
                return Err(err("data.k", format!("needs {dim} components")));
            }
            Ok(())
        }
        DataSpec::ShellPacket { shell_k, target_l2, .. } => {
            if *shell_k < 0 {
                return Err(err("data.shell_k", "must be nonnegative"));
            }
            positive_opt("data.target_l2", Some(*target_l2))
        }
    }
}

impl RunConfig {
    /// TOML form of the resolved configuration.
    pub fn echo(&self) -> String {
        toml::to_string(&self.file).expect("config serializes")
    }

    pub fn grid(&self) -> Grid {
        let g = &self.file.grid;
        Grid::new(
            g.dim.expect("resolved"),
            g.points.expect("resolved"),
            g.box_length.expect("resolved"),
        )
        .expect("validated")
    }
}
