use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::par;
use crate::spectral::{fft::FftNd, physical_scale, Field, Grid, RadialSymbol};

/// Discrete `L^2` norm (identical in either representation).
pub fn mass(field: &Field) -> f64 {
    field.l2_norm()
}

/// `1/2 sum |xi|^2 |c_xi|^2`.
pub fn kinetic_energy(field: &Field) -> f64 {
    let spec = field.spectral();
    weighted_kinetic(spec.values(), &spec.grid().wavenumbers_sq(), None)
}

/// `1/4 int |phi|^4`, evaluated on a grid refined twice per axis so the
/// quadrature is exact for the band-limited integrand.
pub fn potential_energy(field: &Field) -> f64 {
    let spec = field.spectral();
    0.25 * padded_quartic(spec.grid(), spec.values(), None)
}

/// `E(phi) = int 1/2 |grad phi|^2 + 1/4 |phi|^4`.
pub fn energy(field: &Field) -> f64 {
    kinetic_energy(field) + potential_energy(field)
}

/// `E(I_N phi)`.
pub fn modified_energy(field: &Field, n: f64, s: f64) -> Result<f64> {
    let eval = ModifiedEnergy::new(*field.grid(), n, s)?;
    Ok(eval.eval(field))
}

/// Precomputed evaluator for `E(I_N phi)` on a fixed grid.
#[derive(Clone, Debug)]
pub struct ModifiedEnergy {
    grid: Grid,
    k2: Vec<f64>,
    m: Vec<f64>,
}

impl ModifiedEnergy {
    pub fn new(grid: Grid, n: f64, s: f64) -> Result<Self> {
        let symbol = RadialSymbol::i_multiplier(n, s)?;
        let k2 = grid.wavenumbers_sq();
        let m = k2.iter().map(|k| symbol.value(k.sqrt())).collect();
        Ok(Self { grid, k2, m })
    }

    /// Plain energy (multiplier identically one).
    pub fn plain(grid: Grid) -> Self {
        let k2 = grid.wavenumbers_sq();
        let m = vec![1.0; k2.len()];
        Self { grid, k2, m }
    }

    pub fn kinetic(&self, field: &Field) -> f64 {
        let spec = field.spectral();
        weighted_kinetic(spec.values(), &self.k2, Some(&self.m))
    }

    pub fn potential(&self, field: &Field) -> f64 {
        let spec = field.spectral();
        0.25 * padded_quartic(&self.grid, spec.values(), Some(&self.m))
    }

    pub fn eval(&self, field: &Field) -> f64 {
        self.kinetic(field) + self.potential(field)
    }
}

fn weighted_kinetic(c: &[Complex64], k2: &[f64], m: Option<&[f64]>) -> f64 {
    0.5 * par::chunked_sum(c, |off, chunk| {
        chunk
            .iter()
            .enumerate()
            .map(|(j, z)| {
                let w = m.map_or(1.0, |m| m[off + j]);
                k2[off + j] * (w * w) * z.norm_sqr()
            })
            .sum()
    })
}

/// `int |u|^4` for the trigonometric polynomial with coefficients `c * m`.
pub(crate) fn padded_quartic(grid: &Grid, c: &[Complex64], m: Option<&[f64]>) -> f64 {
    let dim = grid.dim();
    let mm = grid.points_per_axis();
    let p = 2 * mm;
    let fine = Grid::new(dim, p, grid.box_length()).expect("refined grid is valid");
    let mut buf = vec![Complex64::new(0.0, 0.0); fine.len()];
    let map_axis: Vec<usize> = (0..mm).map(|i| fine.axis_position(grid.mode_index(i))).collect();
    for (flat, z) in c.iter().enumerate() {
        let mut rem = flat;
        let mut dst = 0usize;
        let mut stride = 1usize;
        for _ in 0..dim {
            dst += map_axis[rem % mm] * stride;
            rem /= mm;
            stride *= p;
        }
        let w = m.map_or(1.0, |m| m[flat]);
        buf[dst] = z * w;
    }
    FftNd::new(p, dim).inverse(&mut buf);
    let sc = physical_scale(&fine);
    let sc4 = sc.powi(4);
    par::chunked_sum(&buf, |_, chunk| chunk.iter().map(|z| z.norm_sqr().powi(2)).sum())
        * sc4
        * fine.cell_volume()
}

/// `(sum w(xi)^{2s} |c_xi|^2)^{1/2}` with `w = <xi>`, or `|xi|` when
/// `homogeneous` (the zero mode then drops out).
pub fn sobolev_norm(field: &Field, s: f64, homogeneous: bool) -> f64 {
    let spec = field.spectral();
    let k2 = spec.grid().wavenumbers_sq();
    par::chunked_sum(spec.values(), |off, chunk| {
        chunk
            .iter()
            .enumerate()
            .map(|(j, z)| {
                let q = k2[off + j];
                let w2 = if homogeneous {
                    if q == 0.0 {
                        return 0.0;
                    }
                    q.powf(s)
                } else {
                    (1.0 + q).powf(s)
                };
                w2 * z.norm_sqr()
            })
            .sum()
    })
    .sqrt()
}

/// Physical-space quadrature `(h^dim sum |u|^p)^{1/p}`; `p = inf` gives the
/// largest modulus.
pub fn lp_norm(field: &Field, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid("p", format!("must lie in [1, inf], got {p}")));
    }
    let phys = field.physical();
    if p.is_infinite() {
        return Ok(par::chunked_max(phys.values(), |z| z.norm()));
    }
    let sum = par::chunked_sum(phys.values(), |_, chunk| {
        chunk.iter().map(|z| z.norm().powf(p)).sum()
    });
    Ok((sum * phys.grid().cell_volume()).powf(1.0 / p))
}
