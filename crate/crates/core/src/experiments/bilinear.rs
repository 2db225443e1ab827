use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data_gen::{generate, DataSpec};
use crate::error::{invalid, Result};
use crate::fit::{fit_loglog, FitResult};
use crate::functionals::MixedNormAccumulator;
use crate::par;
use crate::spectral::{fft::FftNd, physical_scale, Field, Grid, Space};

/// Parameters of [`bilinear_strichartz`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearConfig {
    pub k1: i32,
    pub k2_list: Vec<i32>,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    /// Time samples on `[0, delta]`; `None` picks the count from `theta`.
    pub samples: Option<usize>,
    /// Largest phase advance per sample of the fastest oscillation of
    /// `|psi_1 psi_2|^2` integrated over the torus.
    pub theta: f64,
}

impl BilinearConfig {
    pub fn new(k1: i32, k2_list: Vec<i32>, delta: f64, trials: usize, seed: u64) -> Self {
        Self {
            k1,
            k2_list,
            delta,
            trials,
            seed,
            samples: None,
            theta: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearRow {
    pub k1: i32,
    pub k2: i32,
    /// `N2 / N1 = 2^{k2 - k1}`.
    pub frequency_ratio: f64,
    /// Trial mean of `||psi_1 psi_2||_{L^2([0,delta] x T)} / (||phi_1|| ||phi_2||)`.
    pub ratio: f64,
    pub ratio_std: f64,
    /// Same with the second factor evolved from the conjugated datum.
    pub conj_ratio: f64,
    pub conj_ratio_std: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearOutput {
    pub rows: Vec<BilinearRow>,
    pub fit: FitResult,
    pub conj_fit: FitResult,
    pub samples: usize,
    pub grid: String,
}

/// Time samples needed to resolve the fastest oscillation
/// `4 R1 (R1 + R2)` of the integrated product, `R = 2^{k+1}`.
pub fn bilinear_samples(k1: i32, k2: i32, delta: f64, theta: f64) -> usize {
    let r1 = 2f64.powi(k1 + 1);
    let r2 = 2f64.powi(k2 + 1);
    let omega = 4.0 * r1 * (r1 + r2);
    ((delta * omega / theta).ceil() as usize).max(8)
}

/// Measures the bilinear refinement `||psi_1 psi_2|| ~ (N1/N2)^{1/2}` for
/// free solutions with data on dyadic shells `k1` and `k2`.
///
/// Data are focused shell packets of unit mass. Trials run independently
/// and are folded in trial order.
pub fn bilinear_strichartz(grid: &Grid, cfg: &BilinearConfig) -> Result<BilinearOutput> {
    if grid.dim() != 2 {
        return Err(invalid("dim", "the bilinear experiment runs on 2D grids"));
    }
    if cfg.k2_list.len() < 2 {
        return Err(invalid("k2_list", "needs at least 2 shells"));
    }
    if cfg.k1 < 0 {
        return Err(invalid("k1", "must be nonnegative"));
    }
    let cutoff = grid.dealiased_max_wavenumber() / 2f64.sqrt();
    for &k2 in &cfg.k2_list {
        if k2 < cfg.k1 {
            return Err(invalid("k2_list", format!("shell {k2} below k1 = {}", cfg.k1)));
        }
        let top = 2f64.powi(k2 + 1);
        if top > cutoff {
            return Err(invalid(
                "k2_list",
                format!("shell {k2} reaches |xi| = {top}, beyond the dealiased band {cutoff:.1}"),
            ));
        }
    }
    if !(cfg.delta > 0.0 && cfg.delta.is_finite()) {
        return Err(invalid("delta", "must be positive"));
    }
    if cfg.trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    if !(cfg.theta > 0.0 && cfg.theta.is_finite()) {
        return Err(invalid("theta", "must be positive"));
    }
    let kmax = *cfg.k2_list.iter().max().expect("nonempty");
    let samples = match cfg.samples {
        Some(n) if n < 2 => return Err(invalid("samples", "must be at least 2")),
        Some(n) => n,
        None => bilinear_samples(cfg.k1, kmax, cfg.delta, cfg.theta),
    };

    let seeds = trial_seeds(cfg.seed, cfg.trials, cfg.k2_list.len());
    let per_trial: Vec<Result<Vec<(f64, f64)>>> =
        par::map(&seeds, |ts| run_trial(grid, cfg, ts, samples));
    let mut sums = vec![(Vec::new(), Vec::new()); cfg.k2_list.len()];
    for t in per_trial {
        for (j, (a, b)) in t?.into_iter().enumerate() {
            sums[j].0.push(a);
            sums[j].1.push(b);
        }
    }
    let rows: Vec<BilinearRow> = cfg
        .k2_list
        .iter()
        .zip(sums)
        .map(|(&k2, (a, b))| {
            let (m, sd) = mean_std(&a);
            let (cm, csd) = mean_std(&b);
            BilinearRow {
                k1: cfg.k1,
                k2,
                frequency_ratio: 2f64.powi(k2 - cfg.k1),
                ratio: m,
                ratio_std: sd,
                conj_ratio: cm,
                conj_ratio_std: csd,
                trials: cfg.trials,
            }
        })
        .collect();
    let fit = fit_loglog(&rows.iter().map(|r| (r.frequency_ratio, r.ratio)).collect::<Vec<_>>())?;
    let conj_fit =
        fit_loglog(&rows.iter().map(|r| (r.frequency_ratio, r.conj_ratio)).collect::<Vec<_>>())?;
    Ok(BilinearOutput {
        rows,
        fit,
        conj_fit,
        samples,
        grid: grid.label(),
    })
}

struct TrialSeeds {
    first: u64,
    second: Vec<u64>,
}

fn trial_seeds(seed: u64, trials: usize, shells: usize) -> Vec<TrialSeeds> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| TrialSeeds {
            first: rng.next_u64(),
            second: (0..shells).map(|_| rng.next_u64()).collect(),
        })
        .collect()
}

fn packet(grid: &Grid, k: i32, seed: u64) -> Result<Field> {
    generate(
        grid,
        &DataSpec::ShellPacket {
            shell_k: k,
            target_l2: 1.0,
            seed,
            focused: true,
        },
    )
}

/// Returns `(ratio, conj_ratio)` per second shell.
fn run_trial(grid: &Grid, cfg: &BilinearConfig, seeds: &TrialSeeds, samples: usize) -> Result<Vec<(f64, f64)>> {
    let dt = cfg.delta / samples as f64;
    let k2: Vec<f64> = grid.wavenumbers_sq();
    let step: Vec<Complex64> = k2.iter().map(|q| Complex64::from_polar(1.0, -q * dt)).collect();

    let p1 = packet(grid, cfg.k1, seeds.first)?;
    let mut first = p1.into_values();
    let mut second: Vec<Vec<Complex64>> = Vec::new();
    let mut norms = Vec::new();
    for (&k, &sd) in cfg.k2_list.iter().zip(&seeds.second) {
        let p = packet(grid, k, sd)?;
        let c = p.conj().into_space(Space::Spectral);
        norms.push(p.l2_norm() * c.l2_norm());
        second.push(p.into_values());
        second.push(c.into_values());
    }
    let n1 = {
        let f = Field::new(*grid, first.clone(), Space::Spectral)?;
        f.l2_norm()
    };

    let fft = FftNd::new(grid.points_per_axis(), grid.dim());
    let scale = physical_scale(grid);
    let cell = grid.cell_volume();
    let mut acc: Vec<MixedNormAccumulator> = (0..second.len())
        .map(|_| MixedNormAccumulator::new(2.0, dt))
        .collect::<Result<_>>()?;
    let mut u1 = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut u2 = vec![Complex64::new(0.0, 0.0); grid.len()];
    for j in 0..=samples {
        if j > 0 {
            advance(&mut first, &step);
            for c in &mut second {
                advance(c, &step);
            }
        }
        u1.copy_from_slice(&first);
        fft.inverse(&mut u1);
        for (c, a) in second.iter().zip(acc.iter_mut()) {
            u2.copy_from_slice(c);
            fft.inverse(&mut u2);
            let sq = par::chunked_sum(&u2, |off, chunk| {
                chunk
                    .iter()
                    .zip(&u1[off..off + chunk.len()])
                    .map(|(b, a)| a.norm_sqr() * b.norm_sqr())
                    .sum()
            });
            a.push((sq * scale.powi(4) * cell).sqrt());
        }
    }
    let mut out = Vec::with_capacity(cfg.k2_list.len());
    for (j, pair) in acc.chunks(2).enumerate() {
        let d = n1 * norms[j].sqrt();
        out.push((pair[0].finish()? / d, pair[1].finish()? / d));
    }
    Ok(out)
}

fn advance(c: &mut [Complex64], step: &[Complex64]) {
    par::for_each_chunk_mut(c, par::REDUCE_CHUNK, |ci, chunk| {
        let off = ci * par::REDUCE_CHUNK;
        for (j, z) in chunk.iter_mut().enumerate() {
            *z *= step[off + j];
        }
    });
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (m, 0.0);
    }
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, var.sqrt())
}
