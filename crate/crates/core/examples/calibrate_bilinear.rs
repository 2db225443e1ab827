//! Calibration of the bilinear experiment: fitted slopes against the time
//! sampling density, so the sampling rule can be checked against a dense
//! quadrature before thresholds are frozen.
//!
//! ```text
//! cargo run --release -p imethod-core --example calibrate_bilinear -- 1024 8 0.03 20 1 1.0,0.25
//! ```

use std::time::Instant;

use imethod_core::experiments::{bilinear_strichartz, BilinearConfig};
use imethod_core::spectral::Grid;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let get = |i: usize, d: &str| args.get(i).cloned().unwrap_or_else(|| d.to_string());
    let m: usize = get(0, "1024").parse().unwrap();
    let l: f64 = get(1, "8").parse().unwrap();
    let delta: f64 = get(2, "0.03").parse().unwrap();
    let trials: usize = get(3, "20").parse().unwrap();
    let k1: i32 = get(4, "1").parse().unwrap();
    let thetas: Vec<f64> = get(5, "1.0").split(',').map(|x| x.parse().unwrap()).collect();
    let seed: u64 = get(6, "1").parse().unwrap();

    let grid = Grid::new(2, m, l).unwrap();
    for theta in thetas {
        let mut cfg = BilinearConfig::new(k1, vec![k1 + 2, k1 + 4, k1 + 6], delta, trials, seed);
        cfg.theta = theta;
        let t = Instant::now();
        let out = bilinear_strichartz(&grid, &cfg).unwrap();
        let r: Vec<String> = out
            .rows
            .iter()
            .map(|r| format!("{:.4e}/{:.4e}", r.ratio, r.conj_ratio))
            .collect();
        println!(
            "theta={theta} samples={} slope={:.3} conj={:.3} r2={:.3} [{}] {:.1}s",
            out.samples,
            out.fit.slope,
            out.conj_fit.slope,
            out.fit.r_squared,
            r.join(" "),
            t.elapsed().as_secs_f64()
        );
    }
}
