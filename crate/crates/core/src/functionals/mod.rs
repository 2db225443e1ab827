//! Scalar functionals of fields and trajectories.

mod basic;
mod compare;
mod spacetime;
mod xsb;

pub use basic::{
    energy, kinetic_energy, lp_norm, mass, modified_energy, potential_energy, sobolev_norm,
    ModifiedEnergy,
};
pub use compare::{
    energy_upper_bound, hs_energy_comparison, Comparison, HS_COMPARISON_CONSTANT, L4_CONSTANT,
};
pub use spacetime::{check_admissible, mixed_norm, AdmissiblePair, MixedNormAccumulator};
pub use xsb::{
    xsb_norm, xsb_norm_weighted, SpatialWeight, TimeWindow, XsbResult, XsbSidecar, TIME_PADDING,
};
