//! Experiment drivers: almost-conservation sweeps, parameter selection,
//! the scaling identity, global growth, bilinear estimates and local norms.

mod bilinear;
mod growth;
mod localnorm;
mod report;
mod scaling;
mod selection;
mod sweep;

pub use bilinear::{
    bilinear_samples, bilinear_strichartz, BilinearConfig, BilinearOutput, BilinearRow,
};
pub use growth::{
    global_growth, measure_c0, GrowthConfig, GrowthRecord, GrowthSample, StopReason,
};
pub use localnorm::{local_norm_check, local_norm_of, LocalNormConfig, LocalNormResult};
pub use crate::fit::{fit_loglog, FitResult};
pub use report::{bilinear_csv, plot_script, scaling_csv};
pub use scaling::{scaling_check, ScalingCheck};
pub use selection::{
    horizon_exponent, horizon_for, lambda_for, lambda_n_exponent, n_for, s_threshold, NChoice,
};
pub use sweep::{
    almost_conservation_sweep, sweep_csv, sweep_n_limit, RefinementGate, SweepOptions,
    SweepOutput, SweepRow,
};
