//! Grids, fields, transforms and Fourier multipliers.

pub mod fft;
mod field;
mod grid;
mod rescale;
pub mod snapshot;
mod symbol;

pub use field::{transform, Field, Space};
pub(crate) use field::physical_scale;
pub use grid::{make_grid, Grid};
pub use rescale::{rescale, resample, unscale, DEFAULT_GRID_CAP};
pub use symbol::{
    apply_by_k2, apply_radial, apply_symbol, bracket, dyadic_project, dyadic_range, smoothstep,
    symbol_value, RadialSymbol,
};
