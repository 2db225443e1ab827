use serde::{Deserialize, Serialize};

use super::basic::lp_norm;
use crate::error::{invalid, Error, Result};
use crate::spectral::Field;

/// Strichartz pair `(q, r)` with `1/q + dim/(2r) = dim/4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    q: f64,
    r: f64,
    dim: usize,
}

impl AdmissiblePair {
    pub fn new(q: f64, r: f64, dim: usize) -> Result<Self> {
        if check_admissible(q, r, dim) {
            Ok(Self { q, r, dim })
        } else {
            Err(invalid(
                "q, r",
                format!("({q}, {r}) is not admissible in dimension {dim}"),
            ))
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// True iff `q, r >= 2`, `1/q + dim/(2r) = dim/4` to `1e-12`, and
/// `(dim, q) != (2, 2)`. Infinite exponents are allowed.
pub fn check_admissible(q: f64, r: f64, dim: usize) -> bool {
    if q.is_nan() || r.is_nan() || q < 2.0 || r < 2.0 || dim == 0 {
        return false;
    }
    if dim == 2 && q == 2.0 {
        return false;
    }
    let d = dim as f64;
    (1.0 / q + d / (2.0 * r) - d / 4.0).abs() <= 1e-12
}

/// Streaming `L^q_t L^r_x` norm over uniformly spaced samples.
///
/// Feed one spatial norm per time sample; the composite trapezoid rule is
/// applied to their `q`-th powers.
#[derive(Clone, Debug)]
pub struct MixedNormAccumulator {
    q: f64,
    dt: f64,
    count: usize,
    total: f64,
    first: f64,
    last: f64,
    max: f64,
}

impl MixedNormAccumulator {
    pub fn new(q: f64, dt: f64) -> Result<Self> {
        if q.is_nan() || q < 1.0 {
            return Err(invalid("q", format!("must lie in [1, inf], got {q}")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", format!("must be positive, got {dt}")));
        }
        Ok(Self {
            q,
            dt,
            count: 0,
            total: 0.0,
            first: 0.0,
            last: 0.0,
            max: 0.0,
        })
    }

    /// Adds the spatial norm of the next sample.
    pub fn push(&mut self, spatial_norm: f64) {
        self.max = if spatial_norm.is_nan() || self.max.is_nan() {
            f64::NAN
        } else {
            self.max.max(spatial_norm)
        };
        if self.q.is_infinite() {
            self.count += 1;
            return;
        }
        let v = spatial_norm.powf(self.q);
        if self.count == 0 {
            self.first = v;
        }
        self.total += v;
        self.last = v;
        self.count += 1;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn finish(&self) -> Result<f64> {
        if self.count < 2 {
            return Err(Error::InsufficientData(format!(
                "mixed norm needs at least 2 samples, got {}",
                self.count
            )));
        }
        if self.q.is_infinite() {
            return Ok(self.max);
        }
        let sum = self.total - 0.5 * (self.first + self.last);
        Ok((sum * self.dt).powf(1.0 / self.q))
    }
}

/// `||F||_{L^q_t L^r_x}` over snapshots spaced `dt` apart.
pub fn mixed_norm(snapshots: &[Field], dt: f64, q: f64, r: f64) -> Result<f64> {
    let mut acc = MixedNormAccumulator::new(q, dt)?;
    for f in snapshots {
        acc.push(lp_norm(f, r)?);
    }
    acc.finish()
}
