use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft::FftNd;
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::par;

/// Which representation a [`Field`] currently holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Physical,
    Spectral,
}

/// Complex state on a [`Grid`].
///
/// Spectral coefficients are normalized so that
/// `phi(x) = V^{-1/2} sum_k c_k exp(i xi_k . x)`. With this convention the
/// transform is unitary between the quadrature inner product
/// `h^dim sum_j u_j conj(v_j)` and the plain coefficient inner product, and a
/// plane wave `A exp(i xi . x)` has the single coefficient `A V^{1/2}`.
///
/// Values are genuinely complex: no Hermitian symmetry is assumed.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
    space: Space,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self {
            grid,
            values,
            space,
        })
    }

    pub fn zeros(grid: Grid, space: Space) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            space,
        }
    }

    /// Samples `f` at every grid point (physical tag).
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> Complex64 + Sync + Send) -> Self {
        let values = par::map_range(grid.len(), |i| f(grid.position(i)));
        Self {
            grid,
            values,
            space: Space::Physical,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Returns the field in `target` representation.
    pub fn to_space(&self, target: Space) -> Field {
        self.clone().into_space(target)
    }

    /// Consumes the field and returns it in `target` representation.
    pub fn into_space(mut self, target: Space) -> Field {
        if self.space == target {
            return self;
        }
        let plan = FftNd::new(self.grid.points_per_axis(), self.grid.dim());
        match target {
            Space::Spectral => {
                plan.forward(&mut self.values);
                scale(&mut self.values, spectral_scale(&self.grid));
            }
            Space::Physical => {
                plan.inverse(&mut self.values);
                scale(&mut self.values, physical_scale(&self.grid));
            }
        }
        self.space = target;
        self
    }

    /// Spectral coefficients (transforming if needed).
    pub fn spectral(&self) -> std::borrow::Cow<'_, Field> {
        match self.space {
            Space::Spectral => std::borrow::Cow::Borrowed(self),
            Space::Physical => std::borrow::Cow::Owned(self.to_space(Space::Spectral)),
        }
    }

    /// Physical samples (transforming if needed).
    pub fn physical(&self) -> std::borrow::Cow<'_, Field> {
        match self.space {
            Space::Physical => std::borrow::Cow::Borrowed(self),
            Space::Spectral => std::borrow::Cow::Owned(self.to_space(Space::Physical)),
        }
    }

    /// Discrete L^2 norm, computed in whichever representation is held.
    pub fn l2_norm(&self) -> f64 {
        let sq = par::chunked_sum(&self.values, |_, c| c.iter().map(|z| z.norm_sqr()).sum());
        match self.space {
            Space::Spectral => sq.sqrt(),
            Space::Physical => (sq * self.grid.cell_volume()).sqrt(),
        }
    }

    /// Pointwise `self + other`; both must share grid and tag.
    pub fn add(&self, other: &Field) -> Result<Field> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Field::new(self.grid, values, self.space)
    }

    /// Pointwise `scale * self`.
    pub fn scaled(&self, factor: Complex64) -> Field {
        let values = self.values.iter().map(|z| z * factor).collect();
        Field {
            grid: self.grid,
            values,
            space: self.space,
        }
    }

    /// Pointwise complex conjugate, returned in this field's tag. On
    /// coefficients this is `c(xi) -> conj(c(-xi))`, so the support is
    /// reflected exactly.
    pub fn conj(&self) -> Field {
        let g = self.grid;
        let values = match self.space {
            Space::Physical => self.values.iter().map(|z| z.conj()).collect(),
            Space::Spectral => (0..g.len())
                .map(|i| {
                    let k = g.mode_vector(i);
                    self.values[g.flat_index(&[-k[0], -k[1], -k[2]])].conj()
                })
                .collect(),
        };
        Field {
            grid: g,
            values,
            space: self.space,
        }
    }

    /// Largest pointwise difference against `other` after bringing it into
    /// this field's tag.
    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("grids differ".into()));
        }
        let other = other.to_space(self.space);
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub(crate) fn check_compatible(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("grids differ".into()));
        }
        if self.space != other.space {
            return Err(Error::InvalidParameter {
                name: "space",
                reason: "fields hold different representations".into(),
            });
        }
        Ok(())
    }
}

/// Transforms `field` into `target` representation (idempotent).
pub fn transform(field: &Field, target: Space) -> Field {
    field.to_space(target)
}

/// Factor taking an unnormalized forward DFT to spectral coefficients.
pub(crate) fn spectral_scale(grid: &Grid) -> f64 {
    grid.volume().sqrt() / grid.len() as f64
}

/// Factor taking an unnormalized inverse DFT of coefficients to samples.
pub(crate) fn physical_scale(grid: &Grid) -> f64 {
    1.0 / grid.volume().sqrt()
}

pub(crate) fn scale(values: &mut [Complex64], factor: f64) {
    par::for_each_chunk_mut(values, par::REDUCE_CHUNK, |_, c| {
        for z in c {
            *z *= factor;
        }
    });
}
