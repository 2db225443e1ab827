use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on the torus `[0, L)^dim`.
///
/// Flat storage is row-major with axis order `(x1, ..., x_dim)`: the last
/// axis varies fastest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points_per_axis: usize,
    box_length: f64,
}

impl Grid {
    pub fn new(dim: usize, points_per_axis: usize, box_length: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dim must be 2 or 3, got {dim}")));
        }
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points_per_axis must be a power of two >= 8, got {points_per_axis}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box_length must be positive and finite, got {box_length}"
            )));
        }
        Ok(Self {
            dim,
            points_per_axis,
            box_length,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical grid spacing `L / M`.
    pub fn spacing(&self) -> f64 {
        self.box_length / self.points_per_axis as f64
    }

    /// Quadrature weight `(L / M)^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Torus volume `L^dim`.
    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    /// Lattice spacing in frequency space, `2 pi / L`.
    pub fn frequency_spacing(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Signed frequency index of storage position `i` along one axis,
    /// in `[-M/2, M/2)`.
    pub fn mode_index(&self, i: usize) -> i64 {
        let m = self.points_per_axis;
        if i < m / 2 {
            i as i64
        } else {
            i as i64 - m as i64
        }
    }

    /// Storage position of a signed frequency index along one axis.
    pub fn axis_position(&self, k: i64) -> usize {
        k.rem_euclid(self.points_per_axis as i64) as usize
    }

    /// Signed frequency multi-index of a flat position (unused axes are 0).
    pub fn mode_vector(&self, flat: usize) -> [i64; 3] {
        let m = self.points_per_axis;
        let mut out = [0i64; 3];
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = self.mode_index(rem % m);
            rem /= m;
        }
        out
    }

    /// Flat position of a signed frequency multi-index (wrapping).
    pub fn flat_index(&self, k: &[i64]) -> usize {
        k.iter()
            .take(self.dim)
            .fold(0usize, |acc, &ki| acc * self.points_per_axis + self.axis_position(ki))
    }

    /// Physical coordinates of a flat position.
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let m = self.points_per_axis;
        let h = self.spacing();
        let mut out = [0.0; 3];
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = (rem % m) as f64 * h;
            rem /= m;
        }
        out
    }

    /// Wavenumbers `(2 pi / L) k` along one axis, in storage order.
    pub fn axis_wavenumbers(&self) -> Vec<f64> {
        let dk = self.frequency_spacing();
        (0..self.points_per_axis)
            .map(|i| dk * self.mode_index(i) as f64)
            .collect()
    }

    /// `|xi|^2` for every lattice frequency, in storage order.
    pub fn wavenumbers_sq(&self) -> Vec<f64> {
        let axis: Vec<f64> = self.axis_wavenumbers().iter().map(|k| k * k).collect();
        let m = self.points_per_axis;
        let mut out = Vec::with_capacity(self.len());
        match self.dim {
            2 => {
                for a in &axis {
                    for b in &axis {
                        out.push(a + b);
                    }
                }
            }
            _ => {
                for a in &axis {
                    for b in &axis {
                        let ab = a + b;
                        out.extend(axis.iter().map(|c| ab + c));
                    }
                }
            }
        }
        assert_eq!(out.len(), m.pow(self.dim as u32));
        out
    }

    /// `|xi|` for every lattice frequency, in storage order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        self.wavenumbers_sq().into_iter().map(f64::sqrt).collect()
    }

    /// Largest `|xi|` along a coordinate axis, `(M/2)(2 pi / L)`.
    pub fn axis_nyquist(&self) -> f64 {
        (self.points_per_axis / 2) as f64 * self.frequency_spacing()
    }

    /// Largest `|xi|` anywhere on the lattice (the corner mode).
    pub fn max_wavenumber(&self) -> f64 {
        self.axis_nyquist() * (self.dim as f64).sqrt()
    }

    /// Two-thirds truncation mask: keeps modes with `3 |k_i| < M` on every axis.
    pub fn two_thirds_mask(&self) -> Vec<bool> {
        let m = self.points_per_axis as i64;
        let axis: Vec<bool> = (0..self.points_per_axis)
            .map(|i| 3 * self.mode_index(i).abs() < m)
            .collect();
        let mut out = Vec::with_capacity(self.len());
        match self.dim {
            2 => {
                for a in &axis {
                    for b in &axis {
                        out.push(*a && *b);
                    }
                }
            }
            _ => {
                for a in &axis {
                    for b in &axis {
                        let ab = *a && *b;
                        out.extend(axis.iter().map(|c| ab && *c));
                    }
                }
            }
        }
        out
    }

    /// Largest `|xi|` among modes kept by the two-thirds truncation.
    pub fn dealiased_max_wavenumber(&self) -> f64 {
        let kmax = (self.points_per_axis as i64 - 1) / 3;
        kmax as f64 * self.frequency_spacing() * (self.dim as f64).sqrt()
    }

    /// Same grid with a different box length.
    pub fn with_box_length(&self, box_length: f64) -> Result<Self> {
        Self::new(self.dim, self.points_per_axis, box_length)
    }

    /// Same box with a different resolution.
    pub fn with_points(&self, points_per_axis: usize) -> Result<Self> {
        Self::new(self.dim, points_per_axis, self.box_length)
    }

    /// Short identifier used in CSV rows, e.g. `2d-256-6.2831853071795862`.
    pub fn label(&self) -> String {
        format!("{}d-{}-{:.16e}", self.dim, self.points_per_axis, self.box_length)
    }
}

/// Constructs a grid; see [`Grid::new`].
pub fn make_grid(dim: usize, points_per_axis: usize, box_length: f64) -> Result<Grid> {
    Grid::new(dim, points_per_axis, box_length)
}
