//! Windowed approximation of the restricted `X^{s,b}` norm.
//!
//! Temporal transform: `u~(tau) = sum_j dt w(t_j) u(t_j) exp(+i tau t_j)`.
//! With this sign a free solution `c exp(-i |xi|^2 t)` peaks at
//! `tau = |xi|^2`, where the modulation weight `<tau - |xi|^2>` is smallest.
//! Each mode is sampled on the zero-padded grid `tau = |xi|^2 + sigma_m`,
//! `sigma_m = 2 pi m / (P dt)`, so the quadrature is centred on its own
//! dispersion curve.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::par;
use crate::spectral::{bracket, smoothstep, Field};

/// Zero-padding factor of the temporal DFT.
pub const TIME_PADDING: usize = 4;

/// Smooth bump on `[start, end]`: quintic-smoothstep ramps on each side,
/// identically one on the middle `flat_fraction` of the interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: f64,
    pub end: f64,
    pub flat_fraction: f64,
}

impl TimeWindow {
    pub const DEFAULT_FLAT: f64 = 0.6;

    pub fn new(start: f64, end: f64) -> Self {
        Self {
            start,
            end,
            flat_fraction: Self::DEFAULT_FLAT,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= self.start || t >= self.end {
            return 0.0;
        }
        let u = (t - self.start) / (self.end - self.start);
        let ramp = 0.5 * (1.0 - self.flat_fraction);
        if ramp <= 0.0 {
            return 1.0;
        }
        smoothstep(u.min(1.0 - u) / ramp)
    }
}

/// Spatial weight of the norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpatialWeight {
    /// `<xi>^s`.
    Bracket { s: f64 },
    /// `|xi| <xi>^s`, i.e. the norm of the gradient.
    Gradient { s: f64 },
}

impl SpatialWeight {
    fn eval(&self, k2: f64) -> f64 {
        match *self {
            Self::Bracket { s } => (1.0 + k2).powf(s / 2.0),
            Self::Gradient { s } => k2.sqrt() * (1.0 + k2).powf(s / 2.0),
        }
    }
}

/// Metadata recorded next to every value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XsbSidecar {
    pub transform: String,
    pub modulation_weight: String,
    pub window: TimeWindow,
    pub window_shape: String,
    pub snapshot_spacing: f64,
    pub snapshots: usize,
    pub time_padding: usize,
    pub spatial_weight: SpatialWeight,
    pub b: f64,
    pub max_phase_per_sample: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XsbResult {
    pub value: f64,
    pub sidecar: XsbSidecar,
}

/// `X^{s,b}` norm with spatial weight `<xi>^s`; see [`xsb_norm_weighted`].
pub fn xsb_norm(
    snapshots: &[Field],
    t0: f64,
    dt: f64,
    s: f64,
    b: f64,
    window: Option<TimeWindow>,
) -> Result<XsbResult> {
    xsb_norm_weighted(snapshots, t0, dt, SpatialWeight::Bracket { s }, b, window)
}

/// Snapshots are taken at `t0 + j dt`. The window defaults to the whole
/// sampled interval.
pub fn xsb_norm_weighted(
    snapshots: &[Field],
    t0: f64,
    dt: f64,
    weight: SpatialWeight,
    b: f64,
    window: Option<TimeWindow>,
) -> Result<XsbResult> {
    if snapshots.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 snapshots, got {}",
            snapshots.len()
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    let n_t = snapshots.len();
    let t_last = t0 + (n_t - 1) as f64 * dt;
    let window = window.unwrap_or(TimeWindow::new(t0, t_last));
    let tol = 1e-12 * (t_last - t0).abs().max(1.0);
    if window.start < t0 - tol || window.end > t_last + tol || window.end <= window.start {
        return Err(invalid(
            "time_window",
            format!(
                "[{}, {}] is not inside the sampled interval [{t0}, {t_last}]",
                window.start, window.end
            ),
        ));
    }
    if !(0.0..=1.0).contains(&window.flat_fraction) {
        return Err(invalid("time_window", "flat_fraction must lie in [0, 1]"));
    }
    let grid = *snapshots[0].grid();
    let spec: Vec<Field> = snapshots
        .iter()
        .map(|f| {
            if *f.grid() != grid {
                Err(Error::InvalidGrid("snapshots live on different grids".into()))
            } else {
                Ok(f.spectral().into_owned())
            }
        })
        .collect::<Result<_>>()?;

    let k2 = grid.wavenumbers_sq();
    let active = |i: usize| spec.iter().any(|f| f.values()[i] != Complex64::new(0.0, 0.0));
    let max_k2 = (0..grid.len())
        .filter(|&i| active(i))
        .map(|i| k2[i])
        .fold(0.0, f64::max);
    let phase = max_k2 * dt;
    if phase > std::f64::consts::PI {
        return Err(Error::TemporalAliasing { product: phase });
    }

    let w: Vec<f64> = (0..n_t)
        .map(|j| window.value(t0 + j as f64 * dt))
        .collect();
    let p = TIME_PADDING * n_t;
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_inverse(p);
    let sigmas: Vec<f64> = (0..p)
        .map(|m| {
            let mi = if m < p / 2 { m as i64 } else { m as i64 - p as i64 };
            2.0 * std::f64::consts::PI * mi as f64 / (p as f64 * dt)
        })
        .collect();

    let per_mode = par::map_range(grid.len(), |i| {
        let sw = weight.eval(k2[i]);
        if sw == 0.0 {
            return 0.0;
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); p];
        let mut any = false;
        for j in 0..n_t {
            let v = spec[j].values()[i];
            if v != Complex64::new(0.0, 0.0) {
                any = true;
            }
            let demod = Complex64::from_polar(w[j], k2[i] * j as f64 * dt);
            buf[j] = v * demod;
        }
        if !any {
            return 0.0;
        }
        // Inverse DFT gives sum_j a_j exp(+2 pi i j m / p); the phase of
        // t0 is a unimodular factor and drops out of |.|^2.
        fft.process(&mut buf);
        let sum: f64 = buf
            .iter()
            .zip(&sigmas)
            .map(|(z, sigma)| bracket(*sigma).powf(2.0 * b) * z.norm_sqr())
            .sum();
        sw * sw * sum * dt / p as f64
    });
    let value = par::chunked_sum(&per_mode, |_, c| c.iter().sum()).sqrt();

    Ok(XsbResult {
        value,
        sidecar: XsbSidecar {
            transform: "u~(tau) = sum_j dt w(t_j) u(t_j) exp(+i tau t_j), tau = |xi|^2 + 2 pi m / (P dt)".into(),
            modulation_weight: "<tau - |xi|^2>^(2b); free flow exp(-i |xi|^2 t) sits at the minimum".into(),
            window,
            window_shape: "quintic smoothstep ramps, flat on the middle fraction".into(),
            snapshot_spacing: dt,
            snapshots: n_t,
            time_padding: TIME_PADDING,
            spatial_weight: weight,
            b,
            max_phase_per_sample: phase,
        },
    })
}
