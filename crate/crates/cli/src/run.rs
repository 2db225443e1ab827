use std::fmt;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use imethod_core::data_gen::generate;
use imethod_core::dynamics::{evolve_with, fmt17, Observer, StepperConfig};
use imethod_core::experiments::{
    almost_conservation_sweep, bilinear_csv, bilinear_strichartz, global_growth, local_norm_check,
    plot_script, scaling_check, scaling_csv, sweep_csv, BilinearConfig, GrowthConfig,
    LocalNormConfig, SweepOptions,
};
use imethod_core::spectral::snapshot::write_snapshot;
use imethod_core::spectral::DEFAULT_GRID_CAP;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::output::{Manifest, OutputDir};
use crate::SOURCE_REVISION;

#[derive(Debug)]
pub enum RunError {
    Io(std::io::Error),
    Experiment(imethod_core::Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io(e) => write!(f, "i/o error: {e}"),
            Self::Experiment(e) => write!(f, "experiment failed: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl From<imethod_core::Error> for RunError {
    fn from(e: imethod_core::Error) -> Self {
        Self::Experiment(e)
    }
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub manifest: Manifest,
    /// Contents of `report.json`.
    pub report: Value,
}

struct Outcome {
    files: Vec<(String, Vec<u8>)>,
    results: Value,
}

/// Runs `cfg`, writing outputs and the manifest under `out`.
pub fn execute(cfg: &RunConfig, out: &Path) -> Result<RunSummary, RunError> {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    let clock = Instant::now();
    let mut dir = OutputDir::acquire(out)?;
    let outcome = match cfg.command {
        Command::Evolve => run_evolve(cfg)?,
        Command::Sweep => run_sweep(cfg)?,
        Command::Growth => run_growth(cfg)?,
        Command::Bilinear => run_bilinear(cfg)?,
        Command::Scaling => run_scaling(cfg)?,
        Command::Localnorm => run_localnorm(cfg)?,
    };
    let seeds = seeds(cfg);
    let echo = cfg.echo();
    let report = json!({
        "command": cfg.command.name(),
        "source_revision": SOURCE_REVISION,
        "seeds": seeds,
        "config_echo": echo,
        "results": outcome.results,
    });
    for (name, bytes) in outcome.files {
        dir.add(name, bytes);
    }
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    dir.add("report.json", text);
    let measured = measured(&report["results"]);
    let manifest = dir.commit(|outputs| Manifest {
        tool: "imethod".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cfg.command.name().into(),
        config_echo: echo.clone(),
        source_revision: SOURCE_REVISION.into(),
        seeds: seeds.clone(),
        parallel: imethod_core::is_parallel(),
        started_unix_seconds: started,
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
        outputs,
        measured,
    })?;
    Ok(RunSummary { manifest, report })
}

fn seeds(cfg: &RunConfig) -> Vec<u64> {
    let mut out = Vec::new();
    if let Some(s) = cfg.file.data.as_ref().and_then(|d| d.seed()) {
        out.push(s);
    }
    if let Some(s) = cfg.file.experiment.seed {
        out.push(s);
    }
    out
}

/// Constants and slopes lifted into the manifest.
fn measured(results: &Value) -> Value {
    let mut m = serde_json::Map::new();
    for key in ["c0", "slope", "conj_slope", "r_squared", "max_rel_err", "ratio"] {
        if let Some(v) = results.get(key) {
            m.insert(key.to_string(), v.clone());
        }
    }
    Value::Object(m)
}

fn stepper(cfg: &RunConfig) -> StepperConfig {
    let p = &cfg.file.physics;
    StepperConfig {
        dt: p.dt.expect("resolved"),
        dealias: p.dealias.expect("resolved"),
        observer_stride: p.observer_stride.expect("resolved"),
        snapshot_stride: p.snapshot_stride.expect("resolved"),
        nonlinearity: p.nonlinearity.expect("resolved"),
    }
}

fn run_evolve(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let grid = cfg.grid();
    let data = cfg.file.data.as_ref().expect("resolved");
    let p = &cfg.file.physics;
    let phi0 = generate(&grid, data)?;
    let mut observers = vec![Observer::mass(), Observer::energy(grid)];
    if let Some(s) = p.s {
        observers.push(Observer::sobolev(s));
        if let Some(n) = p.n {
            observers.push(Observer::modified_energy(grid, n, s)?);
        }
    }
    let st = stepper(cfg);
    let mut files = Vec::new();
    let traj = evolve_with(&phi0, p.t_end.expect("resolved"), &st, &observers, |step, _, f| {
        let mut buf = Vec::new();
        write_snapshot(f, &mut buf)?;
        files.push((format!("snapshots/step_{step:09}.nlsf"), buf));
        Ok(())
    })?;
    let mut fin = Vec::new();
    write_snapshot(&traj.final_state, &mut fin)?;
    files.push(("final_state.nlsf".into(), fin));
    let mass = traj.column("mass").expect("mass observer");
    let mass_drift = (mass[mass.len() - 1] - mass[0]).abs() / mass[0].max(f64::MIN_POSITIVE);
    let m0 = mass[0] * mass[0];
    let accounting = mass
        .iter()
        .zip(&traj.removed_mass_sq)
        .map(|(m, r)| (m * m + r - m0).abs() / m0.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    files.push(("trajectory.csv".into(), traj.to_csv().into_bytes()));
    files.push((
        "plot.gp".into(),
        plot_script("trajectory.csv", "trajectory.png", "time", "energy", false, None).into_bytes(),
    ));
    let results = json!({
        "steps": traj.steps,
        "dt": traj.dt,
        "mass_rel_drift": mass_drift,
        "mass_accounting_error": accounting,
        "removed_mass_sq": traj.removed_mass_sq.last(),
        "energy_sup_increment": traj.sup_increment("energy"),
    });
    Ok(Outcome { files, results })
}

fn run_sweep(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let grid = cfg.grid();
    let p = &cfg.file.physics;
    let x = &cfg.file.experiment;
    let opts = SweepOptions {
        refine: x.refine.expect("resolved"),
        refine_tolerance: x.refine_tolerance.expect("resolved"),
    };
    let out = almost_conservation_sweep(
        &grid,
        cfg.file.data.as_ref().expect("resolved"),
        p.s.expect("resolved"),
        p.delta.expect("resolved"),
        p.n_list.as_ref().expect("resolved"),
        &stepper(cfg),
        &opts,
    )?;
    let slope_threshold = x.slope_threshold.expect("resolved");
    let r2_threshold = x.r2_threshold.expect("resolved");
    let gate = out.refinement.as_ref().map(|g| g.passed);
    let pass = out.strictly_decreasing
        && out.fit.slope <= slope_threshold
        && out.fit.r_squared >= r2_threshold
        && gate.unwrap_or(true);
    let files = vec![
        ("sweep.csv".to_string(), sweep_csv(&out.rows).into_bytes()),
        (
            "plot.gp".to_string(),
            plot_script(
                "sweep.csv",
                "sweep.png",
                "N",
                "increment",
                true,
                Some((out.fit.slope, out.fit.intercept)),
            )
            .into_bytes(),
        ),
    ];
    let results = json!({
        "fit": out.fit,
        "slope": out.fit.slope,
        "r_squared": out.fit.r_squared,
        "slope_threshold": slope_threshold,
        "r2_threshold": r2_threshold,
        "strictly_decreasing": out.strictly_decreasing,
        "refinement": out.refinement,
        "energy_increment": out.energy_increment,
        "mass_drift": out.mass_drift,
        "dt": out.dt,
        "steps": out.steps,
        "pass": pass,
    });
    Ok(Outcome { files, results })
}

fn run_growth(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let grid = cfg.grid();
    let p = &cfg.file.physics;
    let x = &cfg.file.experiment;
    let gc = GrowthConfig {
        abort_threshold: x.abort_threshold.expect("resolved"),
        max_cycles: x.max_cycles,
        c1: x.c1.expect("resolved"),
        dt: p.dt,
        dealias: p.dealias.expect("resolved"),
        observer_stride: p.observer_stride.expect("resolved"),
        grid_cap: x.grid_cap.unwrap_or(DEFAULT_GRID_CAP),
        ..GrowthConfig::default()
    };
    let rec = global_growth(
        &grid,
        cfg.file.data.as_ref().expect("resolved"),
        p.s.expect("resolved"),
        x.t0.expect("resolved"),
        p.delta.expect("resolved"),
        &gc,
    )?;
    let files = vec![
        ("growth.csv".to_string(), rec.to_csv().into_bytes()),
        (
            "plot.gp".to_string(),
            plot_script("growth.csv", "growth.png", "time", "modified_energy", false, None).into_bytes(),
        ),
    ];
    let mut summary = serde_json::to_value(&rec).expect("record serializes");
    if let Value::Object(m) = &mut summary {
        m.remove("samples");
    }
    let results = json!({
        "c0": rec.c0,
        "record": summary,
        "max_modified_energy": rec.samples.iter().map(|r| r.modified_energy_max).fold(0.0, f64::max),
    });
    Ok(Outcome { files, results })
}

fn run_bilinear(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let grid = cfg.grid();
    let p = &cfg.file.physics;
    let x = &cfg.file.experiment;
    let mut bc = BilinearConfig::new(
        x.k1.expect("resolved"),
        x.k2_list.clone().expect("resolved"),
        p.delta.expect("resolved"),
        x.trials.expect("resolved"),
        x.seed.expect("resolved"),
    );
    bc.samples = x.samples;
    bc.theta = x.theta.expect("resolved");
    let out = bilinear_strichartz(&grid, &bc)?;
    let threshold = x.slope_threshold.expect("resolved");
    let gap = (out.fit.slope - out.conj_fit.slope).abs();
    let files = vec![
        ("bilinear.csv".to_string(), bilinear_csv(&out.rows).into_bytes()),
        (
            "plot.gp".to_string(),
            plot_script(
                "bilinear.csv",
                "bilinear.png",
                "frequency_ratio",
                "ratio",
                true,
                Some((out.fit.slope, out.fit.intercept)),
            )
            .into_bytes(),
        ),
    ];
    let results = json!({
        "fit": out.fit,
        "conj_fit": out.conj_fit,
        "slope": out.fit.slope,
        "conj_slope": out.conj_fit.slope,
        "r_squared": out.fit.r_squared,
        "slope_threshold": threshold,
        "samples": out.samples,
        "pass": out.fit.slope <= threshold && gap <= 0.1,
    });
    Ok(Outcome { files, results })
}

fn run_scaling(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let grid = cfg.grid();
    let p = &cfg.file.physics;
    let x = &cfg.file.experiment;
    let phi = generate(&grid, cfg.file.data.as_ref().expect("resolved"))?;
    let cap = x.grid_cap.expect("resolved");
    let rows = x
        .lambdas
        .as_ref()
        .expect("resolved")
        .iter()
        .map(|&l| scaling_check(&phi, l, p.n.expect("resolved"), p.s.expect("resolved"), cap))
        .collect::<Result<Vec<_>, _>>()?;
    let max_rel_err = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    let files = vec![("scaling.csv".to_string(), scaling_csv(&rows).into_bytes())];
    let results = json!({ "rows": rows, "max_rel_err": max_rel_err });
    Ok(Outcome { files, results })
}

fn run_localnorm(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let grid = cfg.grid();
    let p = &cfg.file.physics;
    let lc = LocalNormConfig {
        b: p.b.expect("resolved"),
        dt: p.dt,
        dealias: p.dealias.expect("resolved"),
        nonlinearity: p.nonlinearity.expect("resolved"),
        snapshot_stride: p.snapshot_stride.filter(|&k| k > 0),
        ramp: p.ramp.expect("resolved"),
    };
    let n = p.n.expect("resolved");
    let delta = p.delta.expect("resolved");
    let r = local_norm_check(
        &grid,
        cfg.file.data.as_ref().expect("resolved"),
        p.s.expect("resolved"),
        n,
        delta,
        &lc,
    )?;
    let csv = format!(
        "N,delta,value,modified_energy_0,ratio\n{},{},{},{},{}\n",
        fmt17(n),
        fmt17(delta),
        fmt17(r.value),
        fmt17(r.modified_energy_0),
        fmt17(r.ratio)
    );
    let results = json!({
        "value": r.value,
        "modified_energy_0": r.modified_energy_0,
        "ratio": r.ratio,
        "sidecar": r.sidecar,
    });
    Ok(Outcome {
        files: vec![("localnorm.csv".into(), csv.into_bytes())],
        results,
    })
}
