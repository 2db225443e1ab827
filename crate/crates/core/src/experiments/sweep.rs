use serde::{Deserialize, Serialize};

use crate::data_gen::{generate, DataSpec};
use crate::dynamics::{evolve, two_thirds_project, Dealias, Observer, StepperConfig, Trajectory};
use crate::error::{invalid, Result};
use crate::fit::{fit_loglog, FitResult};
use crate::par;
use crate::spectral::{Field, Grid};

/// One `N` of an almost-conservation sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: f64,
    pub delta: f64,
    /// `sup_t |E(I_N phi)(t) - E(I_N phi)(0)|` over observed times.
    pub increment: f64,
    pub modified_energy_0: f64,
    pub seed: Option<u64>,
    pub grid: String,
}

/// Increments of the dt/2 rerun against the main run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementGate {
    pub dt_half: f64,
    pub increments: Vec<f64>,
    pub relative_changes: Vec<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub fit: FitResult,
    pub strictly_decreasing: bool,
    /// Same supremum for the plain energy (integrator error).
    pub energy_increment: f64,
    /// Relative change of the mass over the run.
    pub mass_drift: f64,
    pub dt: f64,
    pub steps: usize,
    pub refinement: Option<RefinementGate>,
}

/// Options of [`almost_conservation_sweep`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Rerun with half the step and compare increments.
    pub refine: bool,
    pub refine_tolerance: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            refine: true,
            refine_tolerance: 0.1,
        }
    }
}

/// Largest `N` a sweep accepts on `grid`: half the axis Nyquist wavenumber.
pub fn sweep_n_limit(grid: &Grid) -> f64 {
    grid.axis_nyquist() / 2.0
}

/// Measures `sup_{t <= delta} |E(I_N phi)(t) - E(I_N phi)(0)|` for each `N`
/// and fits it against `N` on log-log axes.
///
/// One evolution serves every `N`: the flow does not depend on `N`, only the
/// observers do. With two-thirds truncation the datum is first restricted to
/// the retained band, so the truncation never acts on the initial state.
pub fn almost_conservation_sweep(
    grid: &Grid,
    data: &DataSpec,
    s: f64,
    delta: f64,
    n_list: &[f64],
    stepper: &StepperConfig,
    options: &SweepOptions,
) -> Result<SweepOutput> {
    if n_list.len() < 3 {
        return Err(invalid("N_list", format!("needs at least 3 values, got {}", n_list.len())));
    }
    let limit = sweep_n_limit(grid);
    for &n in n_list {
        if !(4.0..=limit).contains(&n) {
            return Err(invalid("N_list", format!("{n} outside [4, {limit}]")));
        }
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid("delta", "must be positive"));
    }
    stepper.validate()?;

    let mut phi0 = generate(grid, data)?;
    if stepper.dealias == Dealias::TwoThirds {
        phi0 = two_thirds_project(&phi0);
    }
    let observers = sweep_observers(grid, s, n_list)?;

    let mut half = *stepper;
    half.dt = stepper.dt / 2.0;
    half.observer_stride = stepper.observer_stride * 2;
    let configs: Vec<StepperConfig> = if options.refine {
        vec![*stepper, half]
    } else {
        vec![*stepper]
    };
    let runs: Vec<Result<Trajectory>> =
        par::map(&configs, |cfg| evolve_no_snapshots(&phi0, delta, cfg, &observers));
    let mut runs = runs.into_iter();
    let main = runs.next().expect("main run")?;
    let refined = runs.next().transpose()?;

    let increments = increments(&main, n_list);
    let e0 = main.records[0][3..].to_vec();
    let rows: Vec<SweepRow> = n_list
        .iter()
        .zip(&increments)
        .zip(e0)
        .map(|((&n, &inc), e)| SweepRow {
            n,
            delta,
            increment: inc,
            modified_energy_0: e,
            seed: data.seed(),
            grid: grid.label(),
        })
        .collect();
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n, r.increment)).collect();
    let fit = fit_loglog(&pts)?;
    let strictly_decreasing = increments.windows(2).all(|w| w[1] < w[0]);
    let mass = main.column("mass").expect("mass observer");
    let mass_drift = (mass[mass.len() - 1] - mass[0]).abs() / mass[0].max(f64::MIN_POSITIVE);

    let refinement = refined.map(|r| {
        let inc_half = self::increments(&r, n_list);
        let rel: Vec<f64> = increments
            .iter()
            .zip(&inc_half)
            .map(|(a, b)| (a - b).abs() / a.abs().max(f64::MIN_POSITIVE))
            .collect();
        let passed = rel.iter().all(|&x| x < options.refine_tolerance);
        RefinementGate {
            dt_half: r.dt,
            increments: inc_half,
            relative_changes: rel,
            tolerance: options.refine_tolerance,
            passed,
        }
    });

    Ok(SweepOutput {
        rows,
        fit,
        strictly_decreasing,
        energy_increment: main.sup_increment("energy").expect("energy observer"),
        mass_drift,
        dt: main.dt,
        steps: main.steps,
        refinement,
    })
}

fn sweep_observers(grid: &Grid, s: f64, n_list: &[f64]) -> Result<Vec<Observer>> {
    let mut obs = vec![
        Observer::mass(),
        Observer::energy(*grid),
        Observer::sobolev(s),
    ];
    for &n in n_list {
        obs.push(Observer::modified_energy(*grid, n, s)?);
    }
    Ok(obs)
}

fn increments(traj: &Trajectory, n_list: &[f64]) -> Vec<f64> {
    (0..n_list.len())
        .map(|j| {
            let name = &traj.names[3 + j];
            traj.sup_increment(name).expect("observer present")
        })
        .collect()
}

fn evolve_no_snapshots(
    phi0: &Field,
    delta: f64,
    cfg: &StepperConfig,
    observers: &[Observer],
) -> Result<Trajectory> {
    let mut cfg = *cfg;
    cfg.snapshot_stride = 0;
    evolve(phi0, delta, &cfg, observers)
}

/// `N,delta,increment,modified_energy_0,seed,grid`, floats at 17 digits.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    use crate::dynamics::fmt17;
    let mut out = String::from("N,delta,increment,modified_energy_0,seed,grid\n");
    for r in rows {
        let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt17(r.n),
            fmt17(r.delta),
            fmt17(r.increment),
            fmt17(r.modified_energy_0),
            seed,
            r.grid
        ));
    }
    out
}
