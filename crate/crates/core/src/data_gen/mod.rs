//! Reproducible initial data.
//!
//! Generated fields are genuinely complex: no Hermitian symmetry is imposed
//! on the spectral coefficients, so physical values are complex by design.

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fit::{fit_loglog, FitResult};
use crate::functionals::sobolev_norm;
use crate::spectral::{bracket, Field, Grid, RadialSymbol, Space};

/// Recipe for an initial datum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    /// `c_xi = <xi>^{-(s + dim/2)} g_xi`, normalized to `||phi||_{H^s} = target_hs_norm`.
    RoughRandom {
        s: f64,
        target_hs_norm: f64,
        seed: u64,
    },
    /// `amplitude * exp(-|x - center|^2 / (2 width^2))`, sampled without
    /// periodization.
    GaussianBump {
        width: f64,
        amplitude: f64,
        center: Vec<f64>,
    },
    /// `amplitude * exp(i xi_k . x)` for an integer lattice vector `k`.
    PlaneWave { k: Vec<i64>, amplitude: [f64; 2] },
    /// Gaussian coefficients weighted by the smooth dyadic shell `shell_k`,
    /// normalized to `||phi||_{L^2} = target_l2`. When `focused`, the
    /// coefficients keep Rayleigh amplitudes `|g_xi|` and share the phase
    /// `exp(-i xi . x0)` with `x0` the box centre, so the packet is a
    /// localized bump rather than spread over the torus.
    ShellPacket {
        shell_k: i32,
        target_l2: f64,
        seed: u64,
        #[serde(default)]
        focused: bool,
    },
}

impl DataSpec {
    /// Seed carried by the spec, if any.
    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::RoughRandom { seed, .. } | Self::ShellPacket { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

/// Builds the datum described by `spec` on `grid` (returned spectral).
pub fn generate(grid: &Grid, spec: &DataSpec) -> Result<Field> {
    match spec {
        DataSpec::RoughRandom {
            s,
            target_hs_norm,
            seed,
        } => {
            if !(*s > 0.0 && *s < 1.0) {
                return Err(invalid("s", format!("must lie in (0, 1), got {s}")));
            }
            if !(target_hs_norm.is_finite() && *target_hs_norm > 0.0) {
                return Err(invalid("target_hs_norm", "must be positive"));
            }
            let exponent = s + grid.dim() as f64 / 2.0;
            let f = gaussian_power_law(grid, exponent, *seed);
            let norm = sobolev_norm(&f, *s, false);
            Ok(f.scaled(Complex64::new(target_hs_norm / norm, 0.0)))
        }
        DataSpec::GaussianBump {
            width,
            amplitude,
            center,
        } => {
            if !(width.is_finite() && *width > 0.0) {
                return Err(invalid("width", "must be positive"));
            }
            if !(amplitude.is_finite() && *amplitude > 0.0) {
                return Err(invalid("amplitude", "must be positive"));
            }
            if center.len() != grid.dim() {
                return Err(invalid(
                    "center",
                    format!("needs {} coordinates, got {}", grid.dim(), center.len()),
                ));
            }
            let c = center.clone();
            let (w, a, dim) = (*width, *amplitude, grid.dim());
            let f = Field::from_fn(*grid, move |x| {
                let r2: f64 = (0..dim).map(|i| (x[i] - c[i]).powi(2)).sum();
                Complex64::new(a * (-r2 / (2.0 * w * w)).exp(), 0.0)
            });
            Ok(f.into_space(Space::Spectral))
        }
        DataSpec::PlaneWave { k, amplitude } => {
            if k.len() != grid.dim() {
                return Err(invalid(
                    "k",
                    format!("needs {} components, got {}", grid.dim(), k.len()),
                ));
            }
            let half = grid.points_per_axis() as i64 / 2;
            if k.iter().any(|&ki| ki < -half || ki >= half) {
                return Err(invalid("k", format!("components must lie in [{}, {})", -half, half)));
            }
            let mut f = Field::zeros(*grid, Space::Spectral);
            let a = Complex64::new(amplitude[0], amplitude[1]);
            f.values_mut()[grid.flat_index(k)] = a * grid.volume().sqrt();
            Ok(f)
        }
        DataSpec::ShellPacket {
            shell_k,
            target_l2,
            seed,
            focused,
        } => shell_packet(grid, *shell_k, *target_l2, *seed, *focused),
    }
}

/// `c_xi = <xi>^{-exponent} g_xi` with `g_xi` independent complex standard
/// Gaussians (`E|g|^2 = 1`), drawn in storage order. `exponent = 0` gives
/// white noise.
pub fn gaussian_power_law(grid: &Grid, exponent: f64, seed: u64) -> Field {
    let g = complex_gaussians(grid.len(), seed);
    let k2 = grid.wavenumbers_sq();
    let values = g
        .into_iter()
        .zip(k2)
        .map(|(z, q)| z * (1.0 + q).powf(-exponent / 2.0))
        .collect();
    Field::new(*grid, values, Space::Spectral).expect("length matches grid")
}

fn complex_gaussians(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re * scale, im * scale)
        })
        .collect()
}

fn shell_packet(grid: &Grid, k: i32, target: f64, seed: u64, focused: bool) -> Result<Field> {
    if !(target.is_finite() && target > 0.0) {
        return Err(invalid("target_l2", "must be positive"));
    }
    let shell = RadialSymbol::DyadicShell { k };
    let g = complex_gaussians(grid.len(), seed);
    let center = grid.box_length() / 2.0;
    let dk = grid.frequency_spacing();
    let values: Vec<Complex64> = g
        .into_iter()
        .enumerate()
        .map(|(i, z)| {
            let kv = grid.mode_vector(i);
            let r = kv.iter().map(|&c| (c as f64 * dk).powi(2)).sum::<f64>().sqrt();
            let w = shell.value(r);
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if focused {
                let phase: f64 = kv.iter().take(grid.dim()).map(|&c| -(c as f64) * dk * center).sum();
                Complex64::from_polar(z.norm() * w, phase)
            } else {
                z * w
            }
        })
        .collect();
    let f = Field::new(*grid, values, Space::Spectral)?;
    let norm = f.l2_norm();
    if norm == 0.0 {
        return Err(invalid("shell_k", format!("shell {k} is empty on this grid")));
    }
    Ok(f.scaled(Complex64::new(target / norm, 0.0)))
}

/// Slope of `ln(shell-averaged |c_xi|)` against `ln <xi>` over radii in
/// `[r_min, r_max]`. Shells have unit width in lattice units.
pub fn spectral_slope(field: &Field, fit_range: (f64, f64)) -> Result<FitResult> {
    let (lo, hi) = fit_range;
    if !(lo >= 0.0 && hi > lo) {
        return Err(invalid("fit_range", format!("empty range [{lo}, {hi}]")));
    }
    let spec = field.spectral();
    let grid = spec.grid();
    let dk = grid.frequency_spacing();
    let k2 = grid.wavenumbers_sq();
    let nbins = (grid.max_wavenumber() / dk).ceil() as usize + 2;
    let mut sum = vec![0.0; nbins];
    let mut rsum = vec![0.0; nbins];
    let mut count = vec![0usize; nbins];
    for (z, q) in spec.values().iter().zip(&k2) {
        let r = q.sqrt();
        if r < lo || r > hi {
            continue;
        }
        let b = (r / dk).round() as usize;
        sum[b] += z.norm();
        rsum[b] += r;
        count[b] += 1;
    }
    let pts: Vec<(f64, f64)> = (0..nbins)
        .filter(|&b| count[b] > 0 && sum[b] > 0.0)
        .map(|b| {
            let c = count[b] as f64;
            (bracket(rsum[b] / c), sum[b] / c)
        })
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} populated shell(s) in [{lo}, {hi}]",
            pts.len()
        )));
    }
    fit_loglog(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::dyadic_project;
    use std::f64::consts::PI;

    #[test]
    fn rough_random_hits_target_and_is_deterministic() {
        let g = Grid::new(2, 64, 2.0 * PI).unwrap();
        let spec = DataSpec::RoughRandom {
            s: 0.7,
            target_hs_norm: 2.5,
            seed: 11,
        };
        let a = generate(&g, &spec).unwrap();
        let b = generate(&g, &spec).unwrap();
        assert!((sobolev_norm(&a, 0.7, false) - 2.5).abs() < 1e-12);
        assert_eq!(a, b);
        let other = generate(
            &g,
            &DataSpec::RoughRandom {
                s: 0.7,
                target_hs_norm: 2.5,
                seed: 12,
            },
        )
        .unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn rough_random_slope() {
        let g = Grid::new(2, 256, 2.0 * PI).unwrap();
        let f = generate(
            &g,
            &DataSpec::RoughRandom {
                s: 0.7,
                target_hs_norm: 1.0,
                seed: 3,
            },
        )
        .unwrap();
        let fit = spectral_slope(&f, (8.0, 100.0)).unwrap();
        assert!((fit.slope + 1.7).abs() < 0.15, "slope {}", fit.slope);
        let white = gaussian_power_law(&g, 0.0, 3);
        assert!(spectral_slope(&white, (8.0, 100.0)).unwrap().slope.abs() < 0.15);
    }

    #[test]
    fn plane_wave_has_one_shell() {
        let g = Grid::new(2, 32, 2.0 * PI).unwrap();
        let f = generate(
            &g,
            &DataSpec::PlaneWave {
                k: vec![3, -4],
                amplitude: [0.5, 0.0],
            },
        )
        .unwrap();
        let expect = Field::from_fn(g, |x| Complex64::from_polar(0.5, 3.0 * x[0] - 4.0 * x[1]));
        assert!(f.max_abs_diff(&expect).unwrap() < 1e-13);
        assert!(spectral_slope(&f, (1.0, 20.0)).is_err());
        assert!(generate(
            &g,
            &DataSpec::PlaneWave {
                k: vec![16, 0],
                amplitude: [1.0, 0.0]
            }
        )
        .is_err());
    }

    #[test]
    fn shell_packet_support_and_norm() {
        let g = Grid::new(2, 64, 2.0 * PI).unwrap();
        for focused in [false, true] {
            let f = generate(
                &g,
                &DataSpec::ShellPacket {
                    shell_k: 3,
                    target_l2: 0.7,
                    seed: 5,
                    focused,
                },
            )
            .unwrap();
            assert!((f.l2_norm() - 0.7).abs() < 1e-13);
            for j in [0, 1, 5, 6] {
                assert_eq!(dyadic_project(&f, j).unwrap().l2_norm(), 0.0);
            }
        }
        let tiny = Grid::new(2, 8, 2.0 * PI).unwrap();
        assert!(generate(
            &tiny,
            &DataSpec::ShellPacket {
                shell_k: 9,
                target_l2: 1.0,
                seed: 1,
                focused: false
            }
        )
        .is_err());
    }

    #[test]
    fn focused_packet_peaks_at_centre() {
        let g = Grid::new(2, 64, 8.0).unwrap();
        let f = generate(
            &g,
            &DataSpec::ShellPacket {
                shell_k: 3,
                target_l2: 1.0,
                seed: 2,
                focused: true,
            },
        )
        .unwrap()
        .into_space(Space::Physical);
        let centre = g.flat_index(&[32, 32]);
        let peak = f
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap()
            .0;
        assert_eq!(peak, centre);
    }

    #[test]
    fn rejects_bad_specs() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let bad = [
            DataSpec::RoughRandom {
                s: 1.2,
                target_hs_norm: 1.0,
                seed: 0,
            },
            DataSpec::RoughRandom {
                s: 0.5,
                target_hs_norm: 0.0,
                seed: 0,
            },
            DataSpec::GaussianBump {
                width: 0.1,
                amplitude: 1.0,
                center: vec![0.5],
            },
        ];
        for spec in &bad {
            assert!(generate(&g, spec).is_err());
        }
    }
}
