use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(invalid("dim", format!("must be 2 or 3, got {dim}")))
    }
}

/// Exponent `a` in `lambda ~ N^a`: `(1-s)/s` in 2D, `(2s-2)/(1-2s)` in 3D.
pub fn lambda_n_exponent(s: f64, dim: usize) -> Result<f64> {
    check_dim(dim)?;
    Ok(if dim == 2 {
        (1.0 - s) / s
    } else {
        (2.0 * s - 2.0) / (1.0 - 2.0 * s)
    })
}

/// Exponent `e` in `T0 ~ N^e`: `(7s-4)/(2s)` in 2D, `(5/2-3s)/(1/2-s)` in 3D.
pub fn horizon_exponent(s: f64, dim: usize) -> Result<f64> {
    check_dim(dim)?;
    Ok(if dim == 2 {
        (7.0 * s - 4.0) / (2.0 * s)
    } else {
        (2.5 - 3.0 * s) / (0.5 - s)
    })
}

/// Lower end (exclusive) of the regularity range where the construction works.
pub fn s_threshold(dim: usize) -> Result<f64> {
    check_dim(dim)?;
    Ok(if dim == 2 { 4.0 / 7.0 } else { 5.0 / 6.0 })
}

fn check_s(s: f64, dim: usize) -> Result<()> {
    let lo = s_threshold(dim)?;
    if !(s > lo && s <= 1.0) {
        return Err(invalid(
            "s",
            format!("must lie in ({lo:.6}, 1] for dim {dim}, got {s}"),
        ));
    }
    Ok(())
}

/// Rescaling parameter making `E(I_N phi_0^(lambda)) <= 1/2` when `c0`
/// bounds the comparison constant:
///
/// * 2D: `lambda = N^{(1-s)/s} (2 C0)^{1/(2s)} (1 + h)^{2/s}`
/// * 3D: `lambda = (2 C0)^{-1/(1-2s)} N^{(2s-2)/(1-2s)} (1 + h)^{-4/(1-2s)}`
///
/// with `h = ||phi_0||_{H^s}`.
pub fn lambda_for(n: f64, s: f64, dim: usize, hs_norm: f64, c0: f64) -> Result<f64> {
    check_s(s, dim)?;
    if !(n >= 1.0 && n.is_finite()) {
        return Err(invalid("N", format!("must be at least 1, got {n}")));
    }
    if !(hs_norm >= 0.0 && hs_norm.is_finite()) {
        return Err(invalid("hs_norm", "must be nonnegative"));
    }
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(invalid("C0", "must be positive"));
    }
    let a = lambda_n_exponent(s, dim)?;
    Ok(if dim == 2 {
        n.powf(a) * (2.0 * c0).powf(1.0 / (2.0 * s)) * (1.0 + hs_norm).powf(2.0 / s)
    } else {
        let d = 1.0 - 2.0 * s;
        (2.0 * c0).powf(-1.0 / d) * n.powf(a) * (1.0 + hs_norm).powf(-4.0 / d)
    })
}

/// Output of [`n_for`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NChoice {
    /// `N = T0^{1/e}`.
    pub n: f64,
    /// `e` with `T0 = N^e`.
    pub exponent: f64,
    /// Windows of length `delta` the modified energy can absorb before
    /// doubling: `C1 N^{3/2}` in 2D, `C1 N` in 3D.
    pub cycle_budget: f64,
    pub delta: f64,
    pub c1: f64,
}

/// Inverts `T0 = N^e` (epsilon losses set to zero). The factor `C1 delta /
/// lambda^2` relating cycles to unscaled time is carried in the result, not
/// folded into `N`.
pub fn n_for(t0: f64, s: f64, dim: usize, delta: f64, c1: f64) -> Result<NChoice> {
    check_s(s, dim)?;
    if !(t0 >= 1.0 && t0.is_finite()) {
        return Err(invalid("T0", format!("must be at least 1, got {t0}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid("delta", "must be positive"));
    }
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(invalid("C1", "must be positive"));
    }
    let e = horizon_exponent(s, dim)?;
    let n = t0.powf(1.0 / e);
    let cycle_budget = if dim == 2 { c1 * n.powf(1.5) } else { c1 * n };
    Ok(NChoice {
        n,
        exponent: e,
        cycle_budget,
        delta,
        c1,
    })
}

/// `T0 = N^e`, the horizon reached with parameter `N`.
pub fn horizon_for(n: f64, s: f64, dim: usize) -> Result<f64> {
    Ok(n.powf(horizon_exponent(s, dim)?))
}
