//! Prints the growth record summary for a base grid and datum size.
//!
//! ```text
//! cargo run --release -p imethod-core --example calibrate_growth -- 16 0.5 0.7 4
//! ```

use std::f64::consts::PI;
use std::time::Instant;

use imethod_core::data_gen::DataSpec;
use imethod_core::experiments::{global_growth, GrowthConfig};
use imethod_core::spectral::Grid;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let get = |i: usize, d: &str| args.get(i).cloned().unwrap_or_else(|| d.to_string());
    let m: usize = get(0, "16").parse().unwrap();
    let h: f64 = get(1, "0.5").parse().unwrap();
    let s: f64 = get(2, "0.7").parse().unwrap();
    let t0: f64 = get(3, "4").parse().unwrap();
    let seed: u64 = get(4, "7").parse().unwrap();

    let grid = Grid::new(2, m, 2.0 * PI).unwrap();
    let data = DataSpec::RoughRandom {
        s,
        target_hs_norm: h,
        seed,
    };
    let t = Instant::now();
    let rec = global_growth(&grid, &data, s, t0, 0.1, &GrowthConfig::default()).unwrap();
    println!(
        "N={:.3} C0={:.4} lambda={} (formula {:.3}, bumps {}) grid={} E0={:.4} cycles={}/{} stop={:?} T={:.4} steps/cycle={} {:.1}s",
        rec.n_used,
        rec.c0,
        rec.lambda_used,
        rec.lambda_formula,
        rec.lambda_bumps,
        rec.rescaled_grid,
        rec.initial_modified_energy,
        rec.cycles_completed,
        rec.cycle_limit,
        rec.stop_reason,
        rec.wall_time_t,
        rec.steps_per_cycle,
        t.elapsed().as_secs_f64()
    );
    let last = rec.samples.last().unwrap();
    let peak = rec.samples.iter().map(|r| r.modified_energy_max).fold(0.0, f64::max);
    println!("E_end={:.4} E_peak={peak:.4} hs0={:.4} hs_end={:.4}", last.modified_energy, rec.samples[0].hs_norm, last.hs_norm);
}
