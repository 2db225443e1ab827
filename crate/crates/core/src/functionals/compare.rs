use serde::{Deserialize, Serialize};

use super::basic::{lp_norm, mass, sobolev_norm, ModifiedEnergy};
use crate::error::{invalid, Result};
use crate::spectral::Field;

/// Constant in `||phi||_{H^s}^2 <= C (E(I_N phi) + ||phi||_{L^2}^2)`.
///
/// Sixteen suffices mode by mode: below `N` the bracket weight is at most
/// `1 + |xi|^2`, on the transition band `m_N >= 1/2`, and above `2N` the
/// kinetic term dominates `<xi>^{2s}` once `N >= 1`.
pub const HS_COMPARISON_CONSTANT: f64 = 16.0;

/// Constant in `E(I_N phi) <= 2 (N^{1-s} ||phi||_{H^s_hom})^2 + C4 ||phi||_{L^4}^4`.
pub const L4_CONSTANT: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl Comparison {
    fn new(lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs == 0.0 {
            if lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            lhs / rhs
        };
        Self { lhs, rhs, ratio }
    }
}

fn check(n: f64, s: f64) -> Result<()> {
    if !(0.5..1.0).contains(&s) {
        return Err(invalid("s", format!("must lie in [1/2, 1), got {s}")));
    }
    if !(n >= 4.0 && n.is_finite()) {
        return Err(invalid("N", format!("must be at least 4, got {n}")));
    }
    Ok(())
}

/// `lhs = ||phi||_{H^s}^2`, `rhs = 16 (E(I_N phi) + ||phi||_{L^2}^2)`.
pub fn hs_energy_comparison(field: &Field, n: f64, s: f64) -> Result<Comparison> {
    check(n, s)?;
    let lhs = sobolev_norm(field, s, false).powi(2);
    let e = ModifiedEnergy::new(*field.grid(), n, s)?.eval(field);
    let rhs = HS_COMPARISON_CONSTANT * (e + mass(field).powi(2));
    Ok(Comparison::new(lhs, rhs))
}

/// `lhs = E(I_N phi)`, `rhs = 2 N^{2-2s} ||phi||_{H^s_hom}^2 + C4 ||phi||_{L^4}^4`.
pub fn energy_upper_bound(field: &Field, n: f64, s: f64) -> Result<Comparison> {
    check(n, s)?;
    let lhs = ModifiedEnergy::new(*field.grid(), n, s)?.eval(field);
    let hom = sobolev_norm(field, s, true);
    let rhs = 2.0 * n.powf(2.0 - 2.0 * s) * hom * hom + L4_CONSTANT * lp_norm(field, 4.0)?.powi(4);
    Ok(Comparison::new(lhs, rhs))
}
