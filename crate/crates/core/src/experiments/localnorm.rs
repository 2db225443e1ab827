use serde::{Deserialize, Serialize};

use crate::data_gen::{generate, DataSpec};
use crate::dynamics::{
    default_dt, evolve, max_resolved_k2, steps_for, two_thirds_project, Dealias, StepperConfig,
};
use crate::error::{invalid, Result};
use crate::functionals::{xsb_norm_weighted, ModifiedEnergy, SpatialWeight, TimeWindow, XsbSidecar};
use crate::spectral::{apply_symbol, Field, Grid, RadialSymbol, Space};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalNormConfig {
    pub b: f64,
    pub dt: Option<f64>,
    pub dealias: Dealias,
    /// 1 for the equation, 0 for the free flow.
    pub nonlinearity: f64,
    /// Steps between snapshots; `None` keeps the phase per sample below `pi/2`.
    pub snapshot_stride: Option<usize>,
    /// Width of the cutoff ramps placed outside `[0, delta]`.
    pub ramp: f64,
}

impl Default for LocalNormConfig {
    fn default() -> Self {
        Self {
            b: 0.55,
            dt: None,
            dealias: Dealias::TwoThirds,
            nonlinearity: 1.0,
            snapshot_stride: None,
            ramp: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalNormResult {
    /// `||I phi||_{X_{1,b}}` in 2D, `||grad I phi||_{X_{0,b}}` in 3D, on `[0, delta]`.
    pub value: f64,
    pub modified_energy_0: f64,
    /// `value / E(I phi_0)^{1/2}`; zero for zero data.
    pub ratio: f64,
    pub sidecar: XsbSidecar,
}

/// Local-in-time bound diagnostic: measures the `X_{s,b}` size of the
/// smoothed solution relative to `E(I phi_0)^{1/2}`.
///
/// The restriction to `[0, delta]` is estimated by the solution itself times
/// a cutoff that is one on `[0, delta]` and ramps down over `ramp` on either
/// side, so the estimate for a shorter interval uses the same ramps.
pub fn local_norm_check(
    grid: &Grid,
    data: &DataSpec,
    s: f64,
    n: f64,
    delta: f64,
    cfg: &LocalNormConfig,
) -> Result<LocalNormResult> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid("delta", "must be positive"));
    }
    let mut phi0 = generate(grid, data)?;
    if cfg.dealias == Dealias::TwoThirds {
        phi0 = two_thirds_project(&phi0);
    }
    local_norm_of(&phi0, s, n, delta, cfg)
}

/// [`local_norm_check`] on a given datum.
pub fn local_norm_of(
    phi0: &Field,
    s: f64,
    n: f64,
    delta: f64,
    cfg: &LocalNormConfig,
) -> Result<LocalNormResult> {
    let grid = *phi0.grid();
    let e0 = ModifiedEnergy::new(grid, n, s)?.eval(phi0);
    if e0 > 1.0 {
        return Err(invalid(
            "data",
            format!("E(I phi_0) = {e0} exceeds 1; rescale the datum first"),
        ));
    }
    let dt = cfg.dt.unwrap_or_else(|| default_dt(&grid, cfg.dealias));
    let phase = max_resolved_k2(&grid, cfg.dealias) * dt;
    let stride = match cfg.snapshot_stride {
        Some(0) => return Err(invalid("snapshot_stride", "must be at least 1")),
        Some(k) => k,
        None => ((std::f64::consts::FRAC_PI_2 / phase).floor() as usize).max(1),
    };
    if !(cfg.ramp > 0.0 && cfg.ramp.is_finite()) {
        return Err(invalid("ramp", "must be positive"));
    }
    let (n_steps, dt) = steps_for(delta, dt);
    let ramp_steps = (cfg.ramp / dt).ceil() as usize;
    let ramp_steps = ramp_steps.div_ceil(stride) * stride;
    let forward_steps = (n_steps + ramp_steps).div_ceil(stride) * stride;
    let stepper = StepperConfig {
        dt,
        dealias: cfg.dealias,
        observer_stride: usize::MAX,
        snapshot_stride: stride,
        nonlinearity: cfg.nonlinearity,
    };
    // u(-t) = conj(v(t)) with v started from conj(phi_0).
    let back = evolve(&phi0.conj(), ramp_steps as f64 * dt, &stepper, &[])?;
    let forward = evolve(phi0, forward_steps as f64 * dt, &stepper, &[])?;
    let states = back
        .snapshots
        .iter()
        .skip(1)
        .rev()
        .map(|(_, f)| f.conj())
        .chain(forward.snapshots.iter().map(|(_, f)| f.clone()));
    let symbol = RadialSymbol::i_multiplier(n, s)?;
    let smoothed: Vec<Field> = states
        .map(|f| apply_symbol(&f, &symbol, Space::Spectral))
        .collect();
    let weight = if grid.dim() == 2 {
        SpatialWeight::Bracket { s: 1.0 }
    } else {
        SpatialWeight::Gradient { s: 0.0 }
    };
    let rho = ramp_steps as f64 * dt;
    let window = TimeWindow {
        start: -rho,
        end: delta + rho,
        flat_fraction: delta / (delta + 2.0 * rho),
    };
    let res = xsb_norm_weighted(&smoothed, -rho, dt * stride as f64, weight, cfg.b, Some(window))?;
    let ratio = if res.value == 0.0 { 0.0 } else { res.value / e0.sqrt() };
    Ok(LocalNormResult {
        value: res.value,
        modified_energy_0: e0,
        ratio,
        sidecar: res.sidecar,
    })
}
