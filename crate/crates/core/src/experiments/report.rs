use std::fmt::Write as _;

use crate::dynamics::fmt17;

use super::bilinear::BilinearRow;
use super::scaling::ScalingCheck;

/// `k1,k2,frequency_ratio,ratio,ratio_std,conj_ratio,conj_ratio_std,trials`.
pub fn bilinear_csv(rows: &[BilinearRow]) -> String {
    let mut out =
        String::from("k1,k2,frequency_ratio,ratio,ratio_std,conj_ratio,conj_ratio_std,trials\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.k1,
            r.k2,
            fmt17(r.frequency_ratio),
            fmt17(r.ratio),
            fmt17(r.ratio_std),
            fmt17(r.conj_ratio),
            fmt17(r.conj_ratio_std),
            r.trials
        )
        .unwrap();
    }
    out
}

/// `lambda,N,factor,lhs,rhs,rel_err,same_n_rhs,same_n_rel_err`.
pub fn scaling_csv(rows: &[ScalingCheck]) -> String {
    let mut out = String::from("lambda,N,factor,lhs,rhs,rel_err,same_n_rhs,same_n_rel_err\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.lambda,
            fmt17(r.n),
            fmt17(r.factor),
            fmt17(r.lhs),
            fmt17(r.rhs),
            fmt17(r.rel_err),
            fmt17(r.same_n_rhs),
            fmt17(r.same_n_rel_err)
        )
        .unwrap();
    }
    out
}

/// Gnuplot commands drawing one column of a CSV against another.
///
/// `log` puts both axes on a log scale and overlays the fitted power law
/// `exp(intercept) x^slope` when a fit is given.
pub fn plot_script(
    csv: &str,
    output: &str,
    x: &str,
    y: &str,
    log: bool,
    fit: Option<(f64, f64)>,
) -> String {
    let mut out = String::new();
    writeln!(out, "set datafile separator ','").unwrap();
    writeln!(out, "set key autotitle columnhead").unwrap();
    writeln!(out, "set terminal pngcairo size 800,600").unwrap();
    writeln!(out, "set output '{output}'").unwrap();
    writeln!(out, "set xlabel '{x}'").unwrap();
    writeln!(out, "set ylabel '{y}'").unwrap();
    if log {
        writeln!(out, "set logscale xy").unwrap();
    }
    match fit {
        Some((slope, intercept)) => {
            writeln!(out, "f(x) = exp({}) * x**({})", fmt17(intercept), fmt17(slope)).unwrap();
            writeln!(
                out,
                "plot '{csv}' using '{x}':'{y}' with linespoints, f(x) title 'fit slope {slope:.3}'"
            )
            .unwrap();
        }
        None => writeln!(out, "plot '{csv}' using '{x}':'{y}' with linespoints").unwrap(),
    }
    out
}
