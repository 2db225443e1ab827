use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data_gen::{generate, DataSpec};
use crate::dynamics::{
    default_dt, evolve, fmt17, two_thirds_project, Dealias, Observer, StepperConfig,
};
use crate::error::{invalid, Result};
use crate::functionals::{sobolev_norm, ModifiedEnergy};
use crate::spectral::{rescale, unscale, Field, Grid, DEFAULT_GRID_CAP};

use super::selection::{lambda_for, n_for, NChoice};

/// Knobs of [`global_growth`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub abort_threshold: f64,
    /// Overrides the cycle budget of the selection formulas.
    pub max_cycles: Option<usize>,
    pub c1: f64,
    /// Defaults to the stable step of the rescaled grid.
    pub dt: Option<f64>,
    pub dealias: Dealias,
    pub observer_stride: usize,
    pub grid_cap: usize,
    /// Extra integer increments of `lambda` tried when the smallness check
    /// fails.
    pub max_lambda_bumps: u32,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self {
            abort_threshold: 1.0,
            max_cycles: None,
            c1: 1.0,
            dt: None,
            dealias: Dealias::TwoThirds,
            observer_stride: 1,
            grid_cap: DEFAULT_GRID_CAP,
            max_lambda_bumps: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    EnergyThreshold,
    CycleBudget,
    TimeHorizon,
}

/// One completed window of the iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    pub cycle: usize,
    pub time_rescaled: f64,
    /// Unscaled time `time_rescaled / lambda^2`.
    pub time: f64,
    /// `E(I_N phi^(lambda))` at the end of the window.
    pub modified_energy: f64,
    /// Largest observed `E(I_N phi^(lambda))` within the window.
    pub modified_energy_max: f64,
    /// `||phi||_{H^s}` of the unscaled solution.
    pub hs_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRecord {
    /// Unscaled time reached by the completed cycles.
    pub wall_time_t: f64,
    pub t0: f64,
    pub s: f64,
    pub delta: f64,
    pub n_used: f64,
    pub n_choice: NChoice,
    /// Measured comparison constant.
    pub c0: f64,
    /// `lambda_for` before rounding.
    pub lambda_formula: f64,
    pub lambda_used: u32,
    pub lambda_bumps: u32,
    pub initial_modified_energy: f64,
    pub cycles_completed: usize,
    pub cycle_limit: usize,
    pub stop_reason: StopReason,
    pub dt: f64,
    pub steps_per_cycle: usize,
    pub base_grid: String,
    pub rescaled_grid: String,
    /// Index 0 holds the initial state.
    pub samples: Vec<GrowthSample>,
}

impl GrowthRecord {
    pub fn hs_norm_series(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|r| (r.time, r.hs_norm)).collect()
    }

    pub fn energy_series(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|r| (r.time, r.modified_energy)).collect()
    }

    /// `cycle,time_rescaled,time,modified_energy,modified_energy_max,hs_norm`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cycle,time_rescaled,time,modified_energy,modified_energy_max,hs_norm\n");
        for r in &self.samples {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.cycle,
                fmt17(r.time_rescaled),
                fmt17(r.time),
                fmt17(r.modified_energy),
                fmt17(r.modified_energy_max),
                fmt17(r.hs_norm)
            )
            .unwrap();
        }
        out
    }
}

/// `E(I_N phi^(lambda)) / (N^{2-2s} lambda^{e} (1 + h)^4)` maximized over
/// integer `lambda`, with `e = -2s` in 2D and `1 - 2s` in 3D.
///
/// Evaluated on the base grid through `E(I_N phi^(lambda)) =
/// lambda^{dim-4} E(I_{lambda N} phi)`; `lambda` runs until `lambda N`
/// passes the largest wavenumber of the grid, after which the ratio decays.
pub fn measure_c0(field: &Field, n: f64, s: f64) -> Result<f64> {
    let grid = *field.grid();
    let dim = grid.dim() as i32;
    let h = sobolev_norm(field, s, false);
    let e = if dim == 2 { -2.0 * s } else { 1.0 - 2.0 * s };
    let last = ((grid.max_wavenumber() / n).ceil() as u32).max(1) * 2;
    let mut best: f64 = 0.0;
    for lambda in 1..=last {
        let l = lambda as f64;
        let energy = l.powi(dim - 4) * ModifiedEnergy::new(grid, l * n, s)?.eval(field);
        let ratio = energy / (n.powf(2.0 - 2.0 * s) * l.powf(e) * (1.0 + h).powi(4));
        best = best.max(ratio);
    }
    Ok(best)
}

/// Runs the rescale-and-iterate scheme: picks `N` from `T0`, `lambda` from
/// the measured `C0`, then evolves the rescaled datum window by window.
/// With two-thirds truncation the datum is restricted to the retained band
/// of the base grid first.
pub fn global_growth(
    grid: &Grid,
    data: &DataSpec,
    s: f64,
    t0: f64,
    delta: f64,
    cfg: &GrowthConfig,
) -> Result<GrowthRecord> {
    let dim = grid.dim();
    if !(cfg.abort_threshold > 0.0) {
        return Err(invalid("abort_threshold", "must be positive"));
    }
    if cfg.observer_stride == 0 {
        return Err(invalid("observer_stride", "must be at least 1"));
    }
    let choice = n_for(t0, s, dim, delta, cfg.c1)?;
    let n = choice.n;
    let mut phi0 = generate(grid, data)?;
    if cfg.dealias == Dealias::TwoThirds {
        phi0 = two_thirds_project(&phi0);
    }
    let h = sobolev_norm(&phi0, s, false);
    let c0 = measure_c0(&phi0, n, s)?;
    let lambda_formula = lambda_for(n, s, dim, h, c0)?;
    if lambda_formula > u32::MAX as f64 / 2.0 {
        return Err(invalid("lambda", format!("{lambda_formula} is out of range")));
    }
    let mut lambda = (lambda_formula.ceil() as u32).max(1);

    let mut bumps = 0;
    let (mut state, e0) = loop {
        let scaled = rescale(&phi0, lambda, cfg.grid_cap)?;
        let e = ModifiedEnergy::new(*scaled.grid(), n, s)?.eval(&scaled);
        if e <= 0.5 {
            break (scaled, e);
        }
        if bumps == cfg.max_lambda_bumps {
            return Err(invalid(
                "lambda",
                format!("E(I_N phi^(lambda)) = {e} > 1/2 at lambda = {lambda} after {bumps} increments"),
            ));
        }
        lambda += 1;
        bumps += 1;
    };
    let big = *state.grid();
    let l2 = (lambda as f64).powi(2);
    let dt = cfg.dt.unwrap_or_else(|| default_dt(&big, cfg.dealias));
    let stepper = StepperConfig {
        dt,
        dealias: cfg.dealias,
        observer_stride: cfg.observer_stride,
        snapshot_stride: 0,
        nonlinearity: 1.0,
    };
    stepper.validate()?;
    let observers = [Observer::modified_energy(big, n, s)?];
    let horizon = l2 * t0;
    let by_time = (horizon / delta * (1.0 - 1e-12)).ceil() as usize;
    let budget = cfg.max_cycles.unwrap_or(choice.cycle_budget.ceil() as usize);
    let cycle_limit = budget.min(by_time).max(1);

    let hs = |f: &Field| -> Result<f64> { Ok(sobolev_norm(&unscale(f, lambda)?, s, false)) };
    let mut samples = vec![GrowthSample {
        cycle: 0,
        time_rescaled: 0.0,
        time: 0.0,
        modified_energy: e0,
        modified_energy_max: e0,
        hs_norm: hs(&state)?,
    }];
    let mut stop = if budget < by_time {
        StopReason::CycleBudget
    } else {
        StopReason::TimeHorizon
    };
    let mut steps_per_cycle = 0;
    for cycle in 1..=cycle_limit {
        let traj = evolve(&state, delta, &stepper, &observers)?;
        steps_per_cycle = traj.steps;
        let col = &traj.records;
        let end = col[col.len() - 1][0];
        let peak = col.iter().map(|r| r[0]).fold(f64::MIN, f64::max);
        if peak > cfg.abort_threshold {
            stop = StopReason::EnergyThreshold;
            break;
        }
        state = traj.final_state;
        let tr = cycle as f64 * delta;
        samples.push(GrowthSample {
            cycle,
            time_rescaled: tr,
            time: tr / l2,
            modified_energy: end,
            modified_energy_max: peak,
            hs_norm: hs(&state)?,
        });
    }
    let last = samples[samples.len() - 1];
    Ok(GrowthRecord {
        wall_time_t: last.time,
        t0,
        s,
        delta,
        n_used: n,
        n_choice: choice,
        c0,
        lambda_formula,
        lambda_used: lambda,
        lambda_bumps: bumps,
        initial_modified_energy: e0,
        cycles_completed: last.cycle,
        cycle_limit,
        stop_reason: stop,
        dt,
        steps_per_cycle,
        base_grid: grid.label(),
        rescaled_grid: big.label(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn small() -> (Grid, DataSpec) {
        (
            Grid::new(2, 16, 2.0 * PI).unwrap(),
            DataSpec::RoughRandom {
                s: 0.7,
                target_hs_norm: 0.5,
                seed: 2,
            },
        )
    }

    #[test]
    fn c0_makes_the_formula_hold() {
        let (g, data) = small();
        let phi = generate(&g, &data).unwrap();
        let n = 6.0;
        let c0 = measure_c0(&phi, n, 0.7).unwrap();
        assert!(c0 > 0.0);
        let h = sobolev_norm(&phi, 0.7, false);
        let lambda = lambda_for(n, 0.7, 2, h, c0).unwrap().ceil() as u32;
        let scaled = rescale(&phi, lambda, DEFAULT_GRID_CAP).unwrap();
        let e = ModifiedEnergy::new(*scaled.grid(), n, 0.7).unwrap().eval(&scaled);
        assert!(e <= 0.5, "E = {e} at lambda = {lambda}");
    }

    #[test]
    fn infinite_threshold_runs_to_the_limit() {
        let (g, data) = small();
        let cfg = GrowthConfig {
            abort_threshold: f64::INFINITY,
            max_cycles: Some(3),
            ..GrowthConfig::default()
        };
        let rec = global_growth(&g, &data, 0.7, 4.0, 0.1, &cfg).unwrap();
        assert_eq!(rec.cycles_completed, 3);
        assert_eq!(rec.samples.len(), 4);
        assert!(rec.initial_modified_energy <= 0.5);
        assert!(rec.samples.windows(2).all(|w| w[1].time > w[0].time));
        let h0 = rec.samples[0].hs_norm;
        assert!(rec.samples.iter().all(|r| r.hs_norm < 2.0 * h0));
        assert!(rec.samples[0].hs_norm <= 0.5 + 1e-12);
    }

    #[test]
    fn tiny_threshold_stops_immediately() {
        let (g, data) = small();
        let cfg = GrowthConfig {
            abort_threshold: 1e-12,
            max_cycles: Some(3),
            ..GrowthConfig::default()
        };
        let rec = global_growth(&g, &data, 0.7, 4.0, 0.1, &cfg).unwrap();
        assert_eq!(rec.cycles_completed, 0);
        assert_eq!(rec.stop_reason, StopReason::EnergyThreshold);
    }

    #[test]
    fn csv_layout() {
        let (g, data) = small();
        let cfg = GrowthConfig {
            max_cycles: Some(1),
            ..GrowthConfig::default()
        };
        let rec = global_growth(&g, &data, 0.7, 4.0, 0.1, &cfg).unwrap();
        let csv = rec.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "cycle,time_rescaled,time,modified_energy,modified_energy_max,hs_norm");
        assert_eq!(lines.len(), 2 + rec.cycles_completed);
    }
}
