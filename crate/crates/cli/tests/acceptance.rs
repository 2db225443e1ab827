//! Acceptance run: one pass/fail line per criterion.
//!
//! `IMETHOD_ACCEPTANCE_SKIP=6,7` skips criteria by number. The process exits
//! non-zero when any criterion that ran failed.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use imethod_core::data_gen::{generate, DataSpec};
use imethod_core::dynamics::{
    evolve, linear_step, nonlinear_step, Dealias, Observer, StepperConfig,
};
use imethod_core::experiments::{
    fit_loglog, horizon_for, lambda_for, lambda_n_exponent, n_for, scaling_check,
};
use imethod_core::functionals::hs_energy_comparison;
use imethod_core::spectral::{
    apply_symbol, symbol_value, Field, Grid, RadialSymbol, Space, DEFAULT_GRID_CAP,
};
use num_complex::Complex64;
use serde_json::Value;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

type Check = fn(&Path) -> Verdict;

fn main() {
    let skip: Vec<u32> = std::env::var("IMETHOD_ACCEPTANCE_SKIP")
        .unwrap_or_default()
        .split(',')
        .filter_map(|s| s.trim().parse().ok())
        .collect();
    let checks: [(u32, &str, f64, Check); 12] = [
        (1, "conservation suite", 120.0, conservation),
        (2, "integrator order", 120.0, integrator_order),
        (3, "exact sub-flows", 60.0, sub_flows),
        (4, "multiplier correctness", 60.0, multiplier),
        (5, "scaling identity", 60.0, scaling),
        (6, "almost conservation 2D", 900.0, sweep_2d),
        (7, "almost conservation 3D", 1800.0, sweep_3d),
        (8, "bilinear refinement", 600.0, bilinear),
        (9, "selection formulas", 60.0, selection),
        (10, "comparison inequality", 120.0, comparison),
        (11, "global growth", 1200.0, growth),
        (12, "log-log fit", 10.0, fit),
    ];
    let tmp = tempfile::tempdir().expect("temporary directory");
    let mut failed = Vec::new();
    for (id, name, budget, check) in checks {
        if skip.contains(&id) {
            println!("[SKIP] {id:>2} {name}");
            continue;
        }
        let start = Instant::now();
        let v = check(tmp.path());
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs <= budget;
        let ok = v.pass && in_time;
        if !ok {
            failed.push(id);
        }
        println!(
            "[{}] {id:>2} {name}: {} ({secs:.1} s of {budget:.0} s{})",
            if ok { "PASS" } else { "FAIL" },
            v.detail,
            if in_time { "" } else { ", over budget" }
        );
    }
    if failed.is_empty() {
        println!("acceptance: all criteria that ran passed");
    } else {
        println!("acceptance: failed {failed:?}");
        std::process::exit(1);
    }
}

fn rough(grid: &Grid, s: f64, norm: f64, seed: u64) -> Field {
    generate(
        grid,
        &DataSpec::RoughRandom {
            s,
            target_hs_norm: norm,
            seed,
        },
    )
    .expect("rough datum")
}

fn smooth(grid: Grid) -> Field {
    Field::from_fn(grid, |x| {
        Complex64::new(0.8 * x[0].cos() + 0.3 * (2.0 * x[1]).sin(), 0.5 * (x[0] - x[1]).sin())
    })
}

fn conservation(_: &Path) -> Verdict {
    let g = Grid::new(2, 128, 2.0 * PI).unwrap();
    let phi = rough(&g, 0.7, 1.0, 7);
    let mut drift = 0.0;
    let mut accounting = 0.0;
    let mut removed = 0.0;
    for dealias in [Dealias::None, Dealias::TwoThirds] {
        let mut cfg = StepperConfig::new(imethod_core::dynamics::default_dt(&g, dealias));
        cfg.dealias = dealias;
        cfg.observer_stride = 100;
        let t_end = 1e4 * cfg.dt;
        let t = evolve_stored(&phi, t_end, &cfg, &[Observer::mass()]);
        assert_eq!(t.steps, 10_000);
        let m = t.column("mass").unwrap();
        let m0 = m[0] * m[0];
        match dealias {
            Dealias::None => {
                drift = m.iter().map(|v| (v - m[0]).abs() / m[0]).fold(0.0, f64::max);
            }
            Dealias::TwoThirds => {
                removed = *t.removed_mass_sq.last().unwrap();
                accounting = m
                    .iter()
                    .zip(&t.removed_mass_sq)
                    .map(|(v, r)| (v * v + r - m0).abs() / m0)
                    .fold(0.0, f64::max);
            }
        }
    }
    verdict(
        drift <= 1e-10 && accounting <= 1e-12 && removed > 0.0,
        format!(
            "10^4 steps on 128^2: mass drift {drift:.2e} <= 1e-10, accounting {accounting:.2e} <= 1e-12 (removed {removed:.2e})"
        ),
    )
}

fn evolve_stored(
    phi: &Field,
    t_end: f64,
    cfg: &StepperConfig,
    obs: &[Observer],
) -> imethod_core::dynamics::Trajectory {
    let mut cfg = *cfg;
    cfg.snapshot_stride = 0;
    evolve(phi, t_end, &cfg, obs).expect("evolution")
}

fn integrator_order(_: &Path) -> Verdict {
    let g = Grid::new(2, 32, 2.0 * PI).unwrap();
    let phi = smooth(g);
    let drift = |dt: f64| {
        let mut cfg = StepperConfig::new(dt);
        cfg.dealias = Dealias::None;
        let t = evolve_stored(&phi, 1.0, &cfg, &[Observer::energy(g)]);
        t.sup_increment("energy").unwrap()
    };
    let (a, b) = (drift(0.02), drift(0.01));
    let ratio = a / b;
    verdict(
        (3.4..=4.6).contains(&ratio),
        format!("energy drift {a:.3e} -> {b:.3e} when dt 0.02 -> 0.01, ratio {ratio:.3} in [3.4, 4.6]"),
    )
}

fn sub_flows(_: &Path) -> Verdict {
    let g = Grid::new(2, 64, 2.0 * PI).unwrap();
    let phi = rough(&g, 0.7, 1.0, 3);
    let mut cfg = StepperConfig::new(1e-3);
    cfg.nonlinearity = 0.0;
    cfg.dealias = Dealias::None;
    let t = evolve_stored(&phi, 0.5, &cfg, &[]);
    let linear = t.final_state.max_abs_diff(&linear_step(&phi, 0.5)).unwrap();
    let before = phi.to_space(Space::Physical);
    let after = nonlinear_step(&phi, 0.7);
    let modulus = before
        .values()
        .iter()
        .zip(after.values())
        .map(|(a, b)| (a.norm() - b.norm()).abs())
        .fold(0.0, f64::max);
    verdict(
        linear <= 1e-12 && modulus <= 1e-14,
        format!("free flow vs propagator {linear:.2e} <= 1e-12, |phi| change {modulus:.2e} <= 1e-14"),
    )
}

fn multiplier(_: &Path) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    for n in [1.0, 4.0, 7.5, 32.0] {
        for s in [0.3, 0.6, 0.7, 0.9] {
            let m = RadialSymbol::i_multiplier(n, s).unwrap();
            let mut prev = f64::INFINITY;
            for i in 0..=20_000 {
                let r = 8.0 * n * i as f64 / 20_000.0;
                let v = symbol_value(&m, r);
                if r <= n {
                    worst = worst.max((v - 1.0).abs());
                } else if r >= 2.0 * n {
                    worst = worst.max((v - (n / r).powf(1.0 - s)).abs());
                }
                monotone &= v <= prev;
                prev = v;
            }
        }
    }
    let g = Grid::new(2, 64, 2.0 * PI).unwrap();
    let phi = rough(&g, 0.7, 1.0, 5);
    let m = RadialSymbol::i_multiplier(6.0, 0.7).unwrap();
    let commute = [0.1, 0.77, 2.5]
        .iter()
        .map(|&t| {
            let a = linear_step(&apply_symbol(&phi, &m, Space::Spectral), t);
            let b = apply_symbol(&linear_step(&phi, t), &m, Space::Spectral);
            a.max_abs_diff(&b).unwrap()
        })
        .fold(0.0, f64::max);
    verdict(
        worst <= 1e-14 && monotone && commute <= 1e-12,
        format!("closed-form deviation {worst:.2e} <= 1e-14, monotone {monotone}, commutator {commute:.2e} <= 1e-12"),
    )
}

fn scaling(_: &Path) -> Verdict {
    let mut worst: f64 = 0.0;
    for (dim, m, width) in [(2, 64, 0.6), (3, 32, 0.8)] {
        let g = Grid::new(dim, m, 10.0).unwrap();
        let phi = generate(
            &g,
            &DataSpec::GaussianBump {
                width,
                amplitude: 1.0,
                center: vec![5.0; dim],
            },
        )
        .unwrap();
        for lambda in [1, 2, 4] {
            let c = scaling_check(&phi, lambda, 3.0, 0.7, DEFAULT_GRID_CAP).unwrap();
            worst = worst.max(c.rel_err);
        }
    }
    verdict(
        worst <= 1e-9,
        format!("max rel_err {worst:.2e} <= 1e-9 over lambda in {{1,2,4}}, 64^2 and 32^3"),
    )
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_imethod"));
    c.env_remove("IMETHOD_OUT");
    c
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

/// Runs one command with a shipped config; returns the report's `results`.
fn run_cli(cmd: &str, cfg: &str, out: &Path) -> Result<Value, String> {
    let o = bin()
        .args([cmd, "--config"])
        .arg(config(cfg))
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            o.status.code(),
            String::from_utf8_lossy(&o.stderr).trim()
        ));
    }
    let text = std::fs::read_to_string(out.join("report.json")).map_err(|e| e.to_string())?;
    let v: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Ok(v["results"].clone())
}

fn sweep_verdict(r: &Value) -> Verdict {
    let slope = r["slope"].as_f64().unwrap_or(f64::NAN);
    let r2 = r["r_squared"].as_f64().unwrap_or(f64::NAN);
    let dec = r["strictly_decreasing"].as_bool().unwrap_or(false);
    let gate = &r["refinement"];
    let worst = gate["relative_changes"]
        .as_array()
        .map(|a| a.iter().filter_map(Value::as_f64).fold(0.0, f64::max))
        .unwrap_or(f64::NAN);
    verdict(
        r["pass"].as_bool().unwrap_or(false),
        format!(
            "slope {slope:.3} <= {}, r^2 {r2:.3} >= {}, strictly decreasing {dec}, dt/2 gate {} (worst change {:.4})",
            r["slope_threshold"],
            r["r2_threshold"],
            gate["passed"],
            worst
        ),
    )
}

fn sweep_2d(tmp: &Path) -> Verdict {
    match run_cli("sweep", "sweep2d.toml", &tmp.join("sweep2d")) {
        Ok(r) => sweep_verdict(&r),
        Err(e) => verdict(false, e),
    }
}

fn sweep_3d(tmp: &Path) -> Verdict {
    match run_cli("sweep", "sweep3d.toml", &tmp.join("sweep3d")) {
        Ok(r) => sweep_verdict(&r),
        Err(e) => verdict(false, e),
    }
}

fn bilinear(tmp: &Path) -> Verdict {
    match run_cli("bilinear", "bilinear.toml", &tmp.join("bilinear")) {
        Ok(r) => {
            let a = r["slope"].as_f64().unwrap_or(f64::NAN);
            let b = r["conj_slope"].as_f64().unwrap_or(f64::NAN);
            verdict(
                a <= -0.25 && (a - b).abs() <= 0.1,
                format!("slope {a:.3} <= -0.25, conjugate slope {b:.3}, gap {:.3} <= 0.1", (a - b).abs()),
            )
        }
        Err(e) => verdict(false, e),
    }
}

fn selection(_: &Path) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut note = |x: f64| worst = worst.max(x.abs());
    for s in [0.6, 0.7, 0.9] {
        let a = lambda_for(10.0, s, 2, 1.0, 0.3).unwrap();
        let b = lambda_for(20.0, s, 2, 1.0, 0.3).unwrap();
        note(b / a - 2f64.powf((1.0 - s) / s));
    }
    note(lambda_for(10.0, 1.0, 2, 1.0, 0.3).unwrap() - lambda_for(1e3, 1.0, 2, 1.0, 0.3).unwrap());
    note(lambda_n_exponent(5.0 / 6.0, 3).unwrap() - 0.5);
    for t0 in [2.0, 8.0, 100.0] {
        let c = n_for(t0, 1.0, 2, 0.1, 1.0).unwrap();
        note(c.n - t0.powf(2.0 / 3.0));
    }
    note(n_for(1.0, 0.8, 2, 0.1, 1.0).unwrap().n - 1.0);
    let mut roundtrip: f64 = 0.0;
    for (t0, s, dim) in [(4.0, 0.7, 2), (100.0, 0.9, 2), (50.0, 0.9, 3), (7.0, 0.95, 3)] {
        let c = n_for(t0, s, dim, 0.1, 1.0).unwrap();
        roundtrip = roundtrip.max((horizon_for(c.n, s, dim).unwrap() - t0).abs() / t0);
    }
    let rejects = n_for(4.0, 4.0 / 7.0, 2, 0.1, 1.0).is_err()
        && n_for(4.0, 0.5, 2, 0.1, 1.0).is_err()
        && n_for(4.0, 5.0 / 6.0, 3, 0.1, 1.0).is_err()
        && n_for(4.0, 0.8, 3, 0.1, 1.0).is_err();
    verdict(
        worst <= 1e-12 && roundtrip <= 1e-10 && rejects,
        format!("exponent cases {worst:.2e} <= 1e-12, T0 round trip {roundtrip:.2e} <= 1e-10, thresholds rejected {rejects}"),
    )
}

fn comparison(_: &Path) -> Verdict {
    let g = Grid::new(2, 128, 2.0 * PI).unwrap();
    let ss = [0.6, 0.7, 0.9];
    let ns = [4.0, 8.0, 16.0, 32.0, 64.0];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for i in 0..1000u64 {
        let s = ss[i as usize % 3];
        let n = ns[(i as usize / 3) % 5];
        let norm = 10f64.powf((i % 7) as f64 / 3.0 - 1.0);
        let data_s = 0.3 + 0.1 * (i % 6) as f64;
        let phi = rough(&g, data_s, norm, 1000 + i);
        let c = hs_energy_comparison(&phi, n, s).unwrap();
        worst = worst.max(c.ratio);
        count += 1;
    }
    verdict(
        worst <= 1.0,
        format!("{count} fields, s in {{0.6,0.7,0.9}}, N in 4..64: max ratio {worst:.3} <= 1"),
    )
}

fn growth(tmp: &Path) -> Verdict {
    let a = tmp.join("growth_a");
    let b = tmp.join("growth_b");
    let (ra, rb) = match (
        run_cli("growth", "growth.toml", &a),
        run_cli("growth", "growth.toml", &b),
    ) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return verdict(false, e),
    };
    let same = ["growth.csv", "report.json"]
        .iter()
        .all(|f| std::fs::read(a.join(f)).ok() == std::fs::read(b.join(f)).ok());
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    let c0 = manifest["measured"]["c0"].as_f64().unwrap_or(f64::NAN);
    let record = &ra["record"];
    let cycles = record["cycles_completed"].as_u64().unwrap_or(0);
    let threshold = 1.0;
    let csv = std::fs::read_to_string(a.join("growth.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    let bounded = rows
        .iter()
        .filter(|r| r[0] as u64 <= cycles)
        .all(|r| r[4] <= threshold);
    let monotone = rows.windows(2).all(|w| w[1][2] > w[0][2]);
    let same = same && ra == rb;
    verdict(
        cycles >= 1 && bounded && monotone && c0 > 0.0 && same,
        format!(
            "{cycles} cycles ({}), E(I phi) <= 1 {bounded}, monotone times {monotone}, C0 {c0:.4} in manifest, rerun identical {same}",
            record["stop_reason"]
        ),
    )
}

fn fit(_: &Path) -> Verdict {
    let pts = |f: &dyn Fn(f64) -> f64| -> Vec<(f64, f64)> {
        [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|&x| (x, f(x))).collect()
    };
    let a = fit_loglog(&pts(&|x: f64| x.powf(-1.5))).unwrap();
    let b = fit_loglog(&pts(&|_| 3.0)).unwrap();
    let c = fit_loglog(&[(1.0, 1.0), (2.0, 0.5)]).unwrap();
    let err = (a.slope + 1.5)
        .abs()
        .max((a.r_squared - 1.0).abs())
        .max(b.slope.abs())
        .max((c.slope + 1.0).abs());
    verdict(
        err <= 1e-12,
        format!("slopes {:.15} / {:.1e} / {:.15}, worst error {err:.1e} <= 1e-12", a.slope, b.slope, c.slope),
    )
}
