use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{Field, Space};
use super::grid::Grid;
use crate::error::{invalid, Result};
use crate::par;

/// Radial Fourier multiplier, evaluated at `r = |xi|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialSymbol {
    /// The smoothing multiplier `m_N`: 1 below `N`, `(N/r)^{1-s}` above `2N`.
    IMultiplier { n: f64, s: f64 },
    /// Smooth Littlewood-Paley piece supported on `<xi> in [2^{k-1}, 2^{k+1}]`.
    DyadicShell { k: i32 },
    /// `<xi>^p`.
    BracketPower { p: f64 },
    /// `|xi|`.
    GradientWeight,
    /// Piecewise-linear profile through `(radius, value)` knots, held
    /// constant outside the tabulated range.
    Custom { radii: Vec<f64>, values: Vec<f64> },
}

impl RadialSymbol {
    pub fn i_multiplier(n: f64, s: f64) -> Result<Self> {
        if !(n.is_finite() && n > 0.0) {
            return Err(invalid("N", format!("must be positive, got {n}")));
        }
        if !(s > 0.0 && s <= 1.0) {
            return Err(invalid("s", format!("must lie in (0, 1], got {s}")));
        }
        Ok(Self::IMultiplier { n, s })
    }

    pub fn custom(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.is_empty() || radii.len() != values.len() {
            return Err(invalid("custom", "need equally many radii and values (at least one)"));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("custom", "radii must be strictly increasing"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("custom", "values must be finite and nonnegative"));
        }
        Ok(Self::Custom { radii, values })
    }

    /// Value at radius `r >= 0`.
    pub fn value(&self, r: f64) -> f64 {
        match self {
            Self::IMultiplier { n, s } => i_multiplier_value(*n, *s, r),
            Self::DyadicShell { k } => shell_bump(bracket(r).log2() - *k as f64),
            Self::BracketPower { p } => bracket(r).powf(*p),
            Self::GradientWeight => r,
            Self::Custom { radii, values } => interpolate(radii, values, r),
        }
    }
}

/// Quintic smoothstep `6u^5 - 15u^4 + 10u^3`, clamped to `[0, 1]`.
pub fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * u * (u * (6.0 * u - 15.0) + 10.0)
}

/// `<r> = (1 + r^2)^{1/2}`.
pub fn bracket(r: f64) -> f64 {
    (1.0 + r * r).sqrt()
}

fn i_multiplier_value(n: f64, s: f64, r: f64) -> f64 {
    if r <= n {
        1.0
    } else if r >= 2.0 * n {
        (n / r).powf(1.0 - s)
    } else {
        let u = (r / n).log2();
        ((s - 1.0) * LN_2 * smoothstep(u)).exp()
    }
}

/// Bump on `[-1, 1]` whose integer translates sum to one.
fn shell_bump(y: f64) -> f64 {
    if y <= -1.0 || y >= 1.0 {
        0.0
    } else if y <= 0.0 {
        smoothstep(1.0 + y)
    } else {
        1.0 - smoothstep(y)
    }
}

fn interpolate(radii: &[f64], values: &[f64], r: f64) -> f64 {
    let last = radii.len() - 1;
    if r <= radii[0] {
        return values[0];
    }
    if r >= radii[last] {
        return values[last];
    }
    let j = radii.partition_point(|&x| x <= r);
    let (r0, r1) = (radii[j - 1], radii[j]);
    let t = (r - r0) / (r1 - r0);
    values[j - 1] * (1.0 - t) + values[j] * t
}

/// See [`RadialSymbol::value`].
pub fn symbol_value(symbol: &RadialSymbol, radius: f64) -> f64 {
    symbol.value(radius)
}

/// Multiplies spectral coefficients by `symbol(|xi|)`; the result is returned
/// in `target` representation.
pub fn apply_symbol(field: &Field, symbol: &RadialSymbol, target: Space) -> Field {
    apply_radial(field, |r| symbol.value(r)).into_space(target)
}

/// Multiplies spectral coefficients by `f(|xi|)`; the result is spectral.
pub fn apply_radial(field: &Field, f: impl Fn(f64) -> f64 + Sync + Send) -> Field {
    apply_by_k2(field, |k2| Complex64::new(f(k2.sqrt()), 0.0))
}

/// Multiplies spectral coefficients by `f(|xi|^2)`; the result is spectral.
pub fn apply_by_k2(field: &Field, f: impl Fn(f64) -> Complex64 + Sync + Send) -> Field {
    let mut out = field.to_space(Space::Spectral);
    let k2 = out.grid().wavenumbers_sq();
    par::for_each_chunk_mut(out.values_mut(), par::REDUCE_CHUNK, |ci, chunk| {
        let off = ci * par::REDUCE_CHUNK;
        for (j, z) in chunk.iter_mut().enumerate() {
            *z *= f(k2[off + j]);
        }
    });
    out
}

/// Shell indices `k` whose pieces can be nonzero on `grid`.
pub fn dyadic_range(grid: &Grid) -> std::ops::RangeInclusive<i32> {
    let top = bracket(grid.max_wavenumber()).log2().floor() as i32 + 1;
    0..=top
}

/// `k`-th Littlewood-Paley piece of `field`, in the field's own representation.
pub fn dyadic_project(field: &Field, k: i32) -> Result<Field> {
    let range = dyadic_range(field.grid());
    if !range.contains(&k) {
        return Err(invalid(
            "k",
            format!("shell {k} outside {}..={}", range.start(), range.end()),
        ));
    }
    Ok(apply_symbol(field, &RadialSymbol::DyadicShell { k }, field.space()))
}
