//! Spectral kernels against direct sums on tiny grids.

use std::f64::consts::PI;

use imethod_core::data_gen::gaussian_power_law;
use imethod_core::dynamics::{evolve, Dealias, StepperConfig};
use imethod_core::functionals::{mixed_norm, potential_energy, ModifiedEnergy};
use imethod_core::spectral::{Field, Grid, RadialSymbol, Space};
use num_complex::Complex64;

type C = Complex64;

/// `u(x) = V^{-1/2} sum_xi c_xi exp(i xi . x)` by explicit summation.
fn synthesize(grid: &Grid, c: &[C]) -> Vec<C> {
    let norm = grid.volume().sqrt().recip();
    let dk = grid.frequency_spacing();
    (0..grid.len())
        .map(|p| {
            let x = grid.position(p);
            let mut acc = C::new(0.0, 0.0);
            for (i, ci) in c.iter().enumerate() {
                let k = grid.mode_vector(i);
                let phase = dk * (k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2]);
                acc += ci * C::from_polar(1.0, phase);
            }
            acc * norm
        })
        .collect()
}

/// `1/4 int |u|^4` as the full four-wave sum over `xi1 - xi2 + xi3 - xi4 = 0`.
fn quartic_bruteforce(grid: &Grid, c: &[C]) -> f64 {
    let d = grid.dim();
    let half = grid.points_per_axis() as i64 / 2;
    let modes: Vec<[i64; 3]> = (0..grid.len()).map(|i| grid.mode_vector(i)).collect();
    let lookup = |k: [i64; 3]| -> Option<usize> {
        k[..d]
            .iter()
            .all(|v| (-half..half).contains(v))
            .then(|| grid.flat_index(&k))
    };
    let mut total = C::new(0.0, 0.0);
    for (a, ka) in modes.iter().enumerate() {
        for (b, kb) in modes.iter().enumerate() {
            for (e, ke) in modes.iter().enumerate() {
                let mut k = [0i64; 3];
                for ax in 0..d {
                    k[ax] = ka[ax] - kb[ax] + ke[ax];
                }
                if let Some(f) = lookup(k) {
                    total += c[a] * c[b].conj() * c[e] * c[f].conj();
                }
            }
        }
    }
    0.25 * total.re / grid.volume()
}

fn small_field(grid: Grid, seed: u64) -> Field {
    gaussian_power_law(&grid, 1.0, seed)
}

#[test]
fn fft_matches_explicit_fourier_sum() {
    for (dim, m) in [(2, 8), (3, 8)] {
        let g = Grid::new(dim, m, 3.0).unwrap();
        let f = small_field(g, 9);
        let direct = synthesize(&g, f.values());
        let fast = f.to_space(Space::Physical);
        let err = direct
            .iter()
            .zip(fast.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-12, "dim {dim}: {err}");
    }
}

#[test]
fn padded_quartic_matches_four_wave_sum() {
    let g = Grid::new(2, 8, 2.5).unwrap();
    let f = small_field(g, 2);
    let direct = quartic_bruteforce(&g, f.values());
    let fast = potential_energy(&f);
    assert!((direct - fast).abs() <= 1e-12 * direct, "{direct} vs {fast}");

    let me = ModifiedEnergy::new(g, 2.0, 0.6).unwrap();
    let symbol = RadialSymbol::i_multiplier(2.0, 0.6).unwrap();
    let k = g.wavenumbers();
    let ic: Vec<C> = f
        .values()
        .iter()
        .zip(&k)
        .map(|(c, r)| c * symbol.value(*r))
        .collect();
    let direct = quartic_bruteforce(&g, &ic);
    assert!((me.potential(&f) - direct).abs() <= 1e-12 * direct);
}

/// Right-hand side of `i u_t = -Delta u + |u|^2 u` on grid values, with the
/// Laplacian applied by explicit DFT matrices.
fn rhs(grid: &Grid, u: &[C]) -> Vec<C> {
    let n = grid.len();
    let cell = grid.cell_volume();
    let norm = grid.volume().sqrt().recip();
    let dk = grid.frequency_spacing();
    let modes: Vec<[i64; 3]> = (0..n).map(|i| grid.mode_vector(i)).collect();
    let pos: Vec<[f64; 3]> = (0..n).map(|p| grid.position(p)).collect();
    let phase = |k: &[i64; 3], x: &[f64; 3]| {
        dk * (k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2])
    };
    let coeffs: Vec<C> = modes
        .iter()
        .map(|k| {
            pos.iter()
                .zip(u)
                .map(|(x, v)| v * C::from_polar(1.0, -phase(k, x)))
                .sum::<C>()
                * cell
                * norm
        })
        .collect();
    let k2: Vec<f64> = modes
        .iter()
        .map(|k| dk * dk * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64)
        .collect();
    pos.iter()
        .zip(u)
        .map(|(x, v)| {
            let lap: C = modes
                .iter()
                .zip(&coeffs)
                .zip(&k2)
                .map(|((k, c), q)| c * *q * C::from_polar(1.0, phase(k, x)))
                .sum::<C>()
                * norm;
            -C::i() * (lap + v * v.norm_sqr())
        })
        .collect()
}

fn rk4(grid: &Grid, u0: &[C], t: f64, steps: usize) -> Vec<C> {
    let h = t / steps as f64;
    let mut u = u0.to_vec();
    let axpy = |a: &[C], b: &[C], s: f64| -> Vec<C> { a.iter().zip(b).map(|(x, y)| x + y * s).collect() };
    for _ in 0..steps {
        let k1 = rhs(grid, &u);
        let k2 = rhs(grid, &axpy(&u, &k1, h / 2.0));
        let k3 = rhs(grid, &axpy(&u, &k2, h / 2.0));
        let k4 = rhs(grid, &axpy(&u, &k3, h));
        for i in 0..u.len() {
            u[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
    }
    u
}

#[test]
fn strang_splitting_tracks_a_direct_integration() {
    let g = Grid::new(2, 8, 2.0 * PI).unwrap();
    let f = small_field(g, 5).scaled(C::new(0.8, 0.0));
    let t = 0.02;
    let reference = rk4(&g, f.to_space(Space::Physical).values(), t, 200);
    let mut errs = Vec::new();
    for dt in [2e-3, 1e-3] {
        let mut cfg = StepperConfig::new(dt);
        cfg.dealias = Dealias::None;
        let out = evolve(&f, t, &cfg, &[]).unwrap().final_state.to_space(Space::Physical);
        let err = out
            .values()
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        errs.push(err);
    }
    assert!(errs[1] <= 1e-5, "{errs:?}");
    let ratio = errs[0] / errs[1];
    assert!((3.0..5.0).contains(&ratio), "second order: {errs:?}");
}

#[test]
fn mixed_norm_matches_trapezoid_by_hand() {
    let g = Grid::new(2, 8, 3.0).unwrap();
    let snaps: Vec<Field> = (0..5).map(|j| small_field(g, j)).collect();
    let dt = 0.1;
    let l3: Vec<f64> = snaps
        .iter()
        .map(|f| {
            let u = synthesize(&g, f.values());
            (u.iter().map(|z| z.norm().powi(3)).sum::<f64>() * g.cell_volume()).cbrt()
        })
        .collect();
    let q = 4.0;
    let mut sum = 0.0;
    for (j, v) in l3.iter().enumerate() {
        let w = if j == 0 || j == l3.len() - 1 { 0.5 } else { 1.0 };
        sum += w * v.powf(q);
    }
    let direct = (sum * dt).powf(1.0 / q);
    let fast = mixed_norm(&snaps, dt, q, 3.0).unwrap();
    assert!((direct - fast).abs() <= 1e-12 * direct);
}
