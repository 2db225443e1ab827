use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::functionals::{mass, sobolev_norm, ModifiedEnergy};
use crate::par;
use crate::spectral::{Field, Grid, Space};

use super::stepper::{norm_sq, steps_for, Stepper, StepperConfig};

/// Functionals above this magnitude abort the run.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;

/// Upper bound on the number of steps one call to [`evolve`] may take.
pub const MAX_STEPS: usize = 50_000_000;

type ObserverFn = dyn Fn(&Field) -> f64 + Send + Sync;

/// Named scalar functional evaluated on the spectral state.
#[derive(Clone)]
pub struct Observer {
    name: String,
    f: Arc<ObserverFn>,
}

impl std::fmt::Debug for Observer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Observer").field("name", &self.name).finish()
    }
}

impl Observer {
    pub fn new(name: impl Into<String>, f: impl Fn(&Field) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, field: &Field) -> f64 {
        (self.f)(field)
    }

    pub fn mass() -> Self {
        Self::new("mass", mass)
    }

    pub fn energy(grid: Grid) -> Self {
        let e = ModifiedEnergy::plain(grid);
        Self::new("energy", move |f| e.eval(f))
    }

    /// `E(I_N phi)`, named `modified_energy_N<n>`.
    pub fn modified_energy(grid: Grid, n: f64, s: f64) -> Result<Self> {
        let e = ModifiedEnergy::new(grid, n, s)?;
        Ok(Self::new(format!("modified_energy_N{n}"), move |f| e.eval(f)))
    }

    /// Kinetic part of `E(I_N phi)`, named `modified_kinetic_N<n>`.
    pub fn modified_kinetic(grid: Grid, n: f64, s: f64) -> Result<Self> {
        let e = ModifiedEnergy::new(grid, n, s)?;
        Ok(Self::new(format!("modified_kinetic_N{n}"), move |f| e.kinetic(f)))
    }

    /// Inhomogeneous `H^s` norm, named `hs_norm`.
    pub fn sobolev(s: f64) -> Self {
        Self::new("hs_norm", move |f| sobolev_norm(f, s, false))
    }
}

/// Observed functionals along one evolution.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub names: Vec<String>,
    /// One row per entry of `times`, one column per name.
    pub records: Vec<Vec<f64>>,
    pub snapshots: Vec<(f64, Field)>,
    /// Cumulative squared mass removed by the truncation, per observed time.
    pub removed_mass_sq: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
    pub final_state: Field,
}

impl Trajectory {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.names.iter().position(|n| n == name)?;
        Some(self.records.iter().map(|r| r[j]).collect())
    }

    /// Largest `|f(t) - f(0)|` of one column over observed times.
    pub fn sup_increment(&self, name: &str) -> Option<f64> {
        let col = self.column(name)?;
        let f0 = col[0];
        Some(col.iter().map(|v| (v - f0).abs()).fold(0.0, f64::max))
    }

    /// `time,<names...>` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (t, row) in self.times.iter().zip(&self.records) {
            write!(out, "{}", fmt17(*t)).unwrap();
            for v in row {
                write!(out, ",{}", fmt17(*v)).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Evolves to `t_end` storing snapshots in the trajectory.
pub fn evolve(
    field: &Field,
    t_end: f64,
    config: &StepperConfig,
    observers: &[Observer],
) -> Result<Trajectory> {
    let mut snaps = Vec::new();
    let mut traj = evolve_with(field, t_end, config, observers, |_, t, f| {
        snaps.push((t, f.clone()));
        Ok(())
    })?;
    traj.snapshots = snaps;
    Ok(traj)
}

/// Evolves to `t_end`, handing every `snapshot_stride`-th state (including
/// the initial one) to `sink` instead of storing it.
///
/// The step is shortened, if needed, so that an integer number of steps
/// lands on `t_end`. Observers run at step 0, every `observer_stride` steps,
/// and at the final step.
pub fn evolve_with(
    field: &Field,
    t_end: f64,
    config: &StepperConfig,
    observers: &[Observer],
    mut sink: impl FnMut(usize, f64, &Field) -> Result<()>,
) -> Result<Trajectory> {
    config.validate()?;
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(invalid("t_end", format!("must be nonnegative, got {t_end}")));
    }
    let names: Vec<String> = observers.iter().map(|o| o.name().to_string()).collect();
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(invalid("observers", format!("duplicate name `{n}`")));
        }
    }
    let (steps, dt) = steps_for(t_end, config.dt);
    if steps > MAX_STEPS {
        return Err(invalid(
            "t_end",
            format!("{steps} steps exceed the budget of {MAX_STEPS}"),
        ));
    }
    let grid = *field.grid();
    let stepper = Stepper::new(grid, dt, config.dealias, config.nonlinearity);
    let mut state = field.to_space(Space::Spectral);

    let mut traj = Trajectory {
        times: Vec::new(),
        names,
        records: Vec::new(),
        snapshots: Vec::new(),
        removed_mass_sq: Vec::new(),
        dt,
        steps,
        final_state: Field::zeros(grid, Space::Spectral),
    };
    let mut removed = 0.0;
    observe(&mut traj, observers, &state, 0.0, removed)?;
    if config.snapshot_stride > 0 {
        sink(0, 0.0, &state)?;
    }
    let initial = norm_sq(state.values());
    for n in 1..=steps {
        removed += stepper.step(state.values_mut());
        stepper.snap_mass(state.values_mut(), initial - removed);
        let t = if n == steps { t_end } else { n as f64 * dt };
        if n % config.observer_stride == 0 || n == steps {
            observe(&mut traj, observers, &state, t, removed)?;
        }
        if config.snapshot_stride > 0 && n % config.snapshot_stride == 0 {
            sink(n, t, &state)?;
        }
    }
    traj.final_state = state;
    Ok(traj)
}

fn observe(
    traj: &mut Trajectory,
    observers: &[Observer],
    state: &Field,
    t: f64,
    removed: f64,
) -> Result<()> {
    let row = par::map(observers, |o| o.eval(state));
    for (o, v) in observers.iter().zip(&row) {
        if !v.is_finite() || v.abs() > BLOW_UP_THRESHOLD {
            return Err(Error::BlowUp {
                time: t,
                name: o.name().to_string(),
                value: *v,
            });
        }
    }
    traj.times.push(t);
    traj.records.push(row);
    traj.removed_mass_sq.push(removed);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{linear_step, Dealias};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn smooth(grid: Grid) -> Field {
        Field::from_fn(grid, |x| {
            Complex64::new(0.8 * x[0].cos() + 0.3 * (2.0 * x[1]).sin(), 0.5 * (x[0] - x[1]).sin())
        })
    }

    #[test]
    fn zero_time_gives_single_record() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let t = evolve(&smooth(g), 0.0, &StepperConfig::new(0.01), &[Observer::mass()]).unwrap();
        assert_eq!(t.times, vec![0.0]);
        assert_eq!(t.records.len(), 1);
    }

    #[test]
    fn observers_hit_start_stride_and_end() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let mut cfg = StepperConfig::new(0.01);
        cfg.observer_stride = 4;
        cfg.snapshot_stride = 5;
        let t = evolve(&smooth(g), 0.1, &cfg, &[Observer::mass()]).unwrap();
        assert_eq!(t.steps, 10);
        assert_eq!(t.times.len(), 4);
        assert!((t.times[1] - 0.04).abs() < 1e-15);
        assert_eq!(*t.times.last().unwrap(), 0.1);
        assert!(t.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(t.snapshots.len(), 3);
    }

    #[test]
    fn mass_is_constant_without_dealias() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let mut cfg = StepperConfig::new(0.005);
        cfg.dealias = Dealias::None;
        let t = evolve(&smooth(g), 0.5, &cfg, &[Observer::mass(), Observer::energy(g)]).unwrap();
        let m = t.column("mass").unwrap();
        for v in &m {
            assert!((v - m[0]).abs() / m[0] < 1e-12);
        }
    }

    #[test]
    fn dealias_accounting_identity() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let f = smooth(g).scaled(Complex64::new(3.0, 0.0));
        let t = evolve(&f, 0.3, &StepperConfig::new(0.002), &[Observer::mass()]).unwrap();
        let m = t.column("mass").unwrap();
        let m0 = m[0] * m[0];
        assert!(*t.removed_mass_sq.last().unwrap() > 0.0);
        for (v, r) in m.iter().zip(&t.removed_mass_sq) {
            assert!((v * v + r - m0).abs() / m0 < 1e-12);
        }
    }

    #[test]
    fn free_flow_matches_propagator() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let f = smooth(g);
        let mut cfg = StepperConfig::new(0.01);
        cfg.nonlinearity = 0.0;
        cfg.dealias = Dealias::None;
        let t = evolve(&f, 1.0, &cfg, &[]).unwrap();
        let exact = linear_step(&f, 1.0);
        assert!(t.final_state.max_abs_diff(&exact).unwrap() < 1e-12);
    }

    #[test]
    fn blow_up_guard_trips() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let obs = Observer::new("bad", |_| f64::NAN);
        assert!(matches!(
            evolve(&smooth(g), 0.05, &StepperConfig::new(0.01), &[obs]),
            Err(Error::BlowUp { .. })
        ));
        let big = Observer::new("big", |_| 2e12);
        assert!(evolve(&smooth(g), 0.05, &StepperConfig::new(0.01), &[big]).is_err());
    }

    #[test]
    fn csv_layout() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let t = evolve(&smooth(g), 0.02, &StepperConfig::new(0.01), &[Observer::mass()]).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "time,mass");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1].split(',').next().unwrap(), "0.0000000000000000e0");
        let m: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(m.to_bits(), t.records[1][0].to_bits());
    }
}
