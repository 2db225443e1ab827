//! Oracle calibration for the almost-conservation sweep thresholds.
//!
//! Runs the sweep at the default step and at a finer step (factor 4 unless
//! given; 1 skips it) for a range of seeds and prints the fitted slopes, so
//! the acceptance thresholds can be set against the fine-step figures.
//!
//! ```text
//! cargo run --release -p imethod-core --example calibrate_sweep -- 2 256 0.7 4,8,16,32 1..5
//! ```

use std::f64::consts::PI;
use std::time::Instant;

use imethod_core::data_gen::DataSpec;
use imethod_core::dynamics::{default_dt, Dealias, StepperConfig};
use imethod_core::experiments::{almost_conservation_sweep, SweepOptions};
use imethod_core::spectral::Grid;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let dim: usize = args.first().map_or(2, |a| a.parse().unwrap());
    let m: usize = args.get(1).map_or(256, |a| a.parse().unwrap());
    let s: f64 = args.get(2).map_or(0.7, |a| a.parse().unwrap());
    let ns: Vec<f64> = args
        .get(3)
        .map_or("4,8,16,32", String::as_str)
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    let seeds = args.get(4).map_or("7..8", String::as_str);
    let (a, b) = seeds.split_once("..").unwrap();
    let seeds = a.parse::<u64>().unwrap()..b.parse::<u64>().unwrap();
    let fine: f64 = args.get(5).map_or(4.0, |a| a.parse().unwrap());

    let grid = Grid::new(dim, m, 2.0 * PI).unwrap();
    let dt = default_dt(&grid, Dealias::TwoThirds);
    for seed in seeds {
        let data = DataSpec::RoughRandom {
            s,
            target_hs_norm: 1.0,
            seed,
        };
        let factors: Vec<f64> = if fine > 1.0 { vec![1.0, fine] } else { vec![1.0] };
        for factor in factors {
            let cfg = StepperConfig::new(dt / factor);
            let opts = SweepOptions {
                refine: factor == 1.0,
                ..SweepOptions::default()
            };
            let t = Instant::now();
            let out = almost_conservation_sweep(&grid, &data, s, 0.1, &ns, &cfg, &opts).unwrap();
            let inc: Vec<String> = out.rows.iter().map(|r| format!("{:.3e}", r.increment)).collect();
            let gate = out.refinement.map(|g| {
                let worst = g.relative_changes.iter().cloned().fold(0.0, f64::max);
                format!(" gate={} worst={worst:.3}", g.passed)
            });
            println!(
                "seed={seed} dt/{factor} slope={:.3} r2={:.3} decreasing={} energy_inc={:.2e} [{}]{} {:.1}s",
                out.fit.slope,
                out.fit.r_squared,
                out.strictly_decreasing,
                out.energy_increment,
                inc.join(" "),
                gate.unwrap_or_default(),
                t.elapsed().as_secs_f64()
            );
        }
    }
}
