//! Pseudo-spectral solver for the cubic defocusing Schrödinger equation
//! `i d_t phi + Lap phi = |phi|^2 phi` on 2D and 3D tori, together with the
//! smoothing operator `I_N`, modified energies, norm calculators and the
//! experiment drivers built on them.

pub mod data_gen;
pub mod dynamics;
pub mod error;
pub mod experiments;
mod fit;
pub mod functionals;
mod par;
pub mod spectral;

pub use error::{Error, Result};
pub use fit::{fit_linear, fit_loglog, FitResult};
pub use par::is_parallel;
