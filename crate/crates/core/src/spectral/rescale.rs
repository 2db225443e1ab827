use num_complex::Complex64;

use super::field::{Field, Space};
use super::grid::Grid;
use crate::error::{invalid, Error, Result};

/// Default cap on the number of points a rescaled grid may hold.
pub const DEFAULT_GRID_CAP: usize = 1 << 24;

/// Moves spectral coefficients onto a grid with the same box and a different
/// resolution. Modes outside the target lattice are dropped; new modes are
/// zero. Coefficients are box-normalized, so a band-limited field keeps its
/// values exactly.
pub fn resample(field: &Field, points_per_axis: usize) -> Result<Field> {
    let grid = field.grid().with_points(points_per_axis)?;
    relocate(field, grid, 1.0)
}

/// `phi^(lambda)(x) = phi(x / lambda) / lambda` for integer `lambda`.
///
/// The output box is `lambda` times longer and holds `lambda M` points per
/// axis, rounded up to a power of two, so the spacing never grows. Frequency
/// `xi` maps to `xi / lambda` with coefficient factor `lambda^{dim/2 - 1}`;
/// lattice indices are unchanged. Returned in spectral form.
pub fn rescale(field: &Field, lambda: u32, cap: usize) -> Result<Field> {
    if lambda == 0 {
        return Err(invalid("lambda", "must be a positive integer"));
    }
    let g = field.grid();
    let points = (g.points_per_axis() * lambda as usize).next_power_of_two();
    let total = points.checked_pow(g.dim() as u32).unwrap_or(usize::MAX);
    if total > cap {
        return Err(Error::GridCapExceeded { points: total, cap });
    }
    let grid = Grid::new(g.dim(), points, g.box_length() * lambda as f64)?;
    let factor = (lambda as f64).powf(g.dim() as f64 / 2.0 - 1.0);
    relocate(field, grid, factor)
}

/// Inverse of [`rescale`]: recovers `phi(y) = lambda phi^(lambda)(lambda y)`
/// on the box shrunk by `lambda`, keeping every mode of the input.
pub fn unscale(field: &Field, lambda: u32) -> Result<Field> {
    if lambda == 0 {
        return Err(invalid("lambda", "must be a positive integer"));
    }
    let g = field.grid();
    let grid = g.with_box_length(g.box_length() / lambda as f64)?;
    let factor = (lambda as f64).powf(1.0 - g.dim() as f64 / 2.0);
    relocate(field, grid, factor)
}

/// Copies coefficient `k` of `field` to coefficient `k` of `grid`, times `factor`.
fn relocate(field: &Field, grid: Grid, factor: f64) -> Result<Field> {
    let src = field.spectral();
    let sg = *src.grid();
    let (m_src, m_dst) = (sg.points_per_axis() as i64, grid.points_per_axis() as i64);
    let in_range = |k: i64, m: i64| k >= -m / 2 && k < m / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (flat, c) in src.values().iter().enumerate() {
        let k = sg.mode_vector(flat);
        if k[..sg.dim()].iter().all(|&ki| in_range(ki, m_dst) && in_range(ki, m_src)) {
            out[grid.flat_index(&k[..sg.dim()])] = c * factor;
        }
    }
    Field::new(grid, out, Space::Spectral)
}
