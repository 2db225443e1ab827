use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::functionals::ModifiedEnergy;
use crate::spectral::{rescale, Field};

/// Both sides of `lambda^{4-dim} E(I_N phi^(lambda)) = E(I_{lambda N} phi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub lambda: u32,
    pub n: f64,
    /// `lambda^{4-dim}`: `lambda^2` in 2D, `lambda` in 3D.
    pub factor: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    /// `E(I_N phi)` with the multiplier parameter left at `N`.
    pub same_n_rhs: f64,
    /// Relative gap between `lhs` and `same_n_rhs`; zero only when both
    /// multipliers act as the identity on the support of `phi`.
    pub same_n_rel_err: f64,
}

/// Evaluates the exact scaling identity of the modified energy on `field`.
pub fn scaling_check(field: &Field, lambda: u32, n: f64, s: f64, cap: usize) -> Result<ScalingCheck> {
    if lambda == 0 {
        return Err(invalid("lambda", "must be a positive integer"));
    }
    let grid = *field.grid();
    let dim = grid.dim() as i32;
    let scaled = rescale(field, lambda, cap)?;
    let factor = (lambda as f64).powi(4 - dim);
    let lhs = factor * ModifiedEnergy::new(*scaled.grid(), n, s)?.eval(&scaled);
    let rhs = ModifiedEnergy::new(grid, lambda as f64 * n, s)?.eval(field);
    let same_n_rhs = ModifiedEnergy::new(grid, n, s)?.eval(field);
    Ok(ScalingCheck {
        lambda,
        n,
        factor,
        lhs,
        rhs,
        rel_err: rel(lhs, rhs),
        same_n_rhs,
        same_n_rel_err: rel(lhs, same_n_rhs),
    })
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_gen::{generate, DataSpec};
    use crate::spectral::{Grid, DEFAULT_GRID_CAP};

    #[test]
    fn lambda_one_is_identity() {
        let g = Grid::new(2, 32, 8.0).unwrap();
        let f = generate(
            &g,
            &DataSpec::RoughRandom {
                s: 0.7,
                target_hs_norm: 1.0,
                seed: 3,
            },
        )
        .unwrap();
        let c = scaling_check(&f, 1, 4.0, 0.7, DEFAULT_GRID_CAP).unwrap();
        assert!(c.rel_err <= 1e-14);
        assert_eq!(c.factor, 1.0);
    }

    #[test]
    fn zero_field_has_zero_error() {
        let g = Grid::new(2, 16, 8.0).unwrap();
        let f = Field::zeros(g, crate::spectral::Space::Spectral);
        let c = scaling_check(&f, 2, 4.0, 0.7, DEFAULT_GRID_CAP).unwrap();
        assert_eq!(c.rel_err, 0.0);
    }

    #[test]
    fn cap_is_enforced() {
        let g = Grid::new(3, 32, 8.0).unwrap();
        let f = Field::zeros(g, crate::spectral::Space::Spectral);
        assert!(scaling_check(&f, 4, 4.0, 0.9, 1 << 15).is_err());
    }
}
