//! Strang-split spectral integration of `i d_t phi + Lap phi = |phi|^2 phi`.

mod evolve;
mod stepper;

pub use evolve::{
    evolve, evolve_with, fmt17, Observer, Trajectory, BLOW_UP_THRESHOLD, MAX_STEPS,
};
pub use stepper::{
    default_dt, linear_step, max_resolved_k2, nonlinear_step, nonlinear_step_with, steps_for,
    strang_step, two_thirds_project, Dealias, Stepper, StepperConfig, MASS_SNAP,
};
