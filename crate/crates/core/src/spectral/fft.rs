//! Multi-dimensional complex FFT on cubic grids, built on rustfft.
//!
//! Axis transforms run over contiguous rows. Non-final axes are handled by
//! swapping the axis with the last one (an involution), transforming rows,
//! and swapping back.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::par;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        cell.borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                let dir = if inverse {
                    FftDirection::Inverse
                } else {
                    FftDirection::Forward
                };
                planner.plan_fft(n, dir)
            })
            .clone()
    })
}

/// Unnormalized n-dimensional DFT on an `n^dim` cube.
#[derive(Clone)]
pub struct FftNd {
    n: usize,
    dim: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftNd")
            .field("n", &self.n)
            .field("dim", &self.dim)
            .finish()
    }
}

/// Rows handed to one task in row transforms.
const ROWS_PER_TASK: usize = 32;

impl FftNd {
    pub fn new(n: usize, dim: usize) -> Self {
        Self {
            n,
            dim,
            forward: plan(n, false),
            inverse: plan(n, true),
        }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `X_k = sum_j x_j exp(-2 pi i j.k / n)`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// `x_j = sum_k X_k exp(+2 pi i j.k / n)` (no `1/n^dim` factor).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.len(), "FFT buffer length mismatch");
        rows(data, self.n, fft);
        if self.dim == 1 {
            return;
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); data.len()];
        for axis in 0..self.dim - 1 {
            swap_with_last(data, &mut buf, self.n, self.dim, axis);
            rows(&mut buf, self.n, fft);
            swap_with_last(&buf, data, self.n, self.dim, axis);
        }
    }
}

fn rows(data: &mut [Complex64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    let scratch_len = fft.get_inplace_scratch_len();
    par::for_each_chunk_mut(data, n * ROWS_PER_TASK, |_, chunk| {
        let mut scratch = vec![Complex64::new(0.0, 0.0); scratch_len];
        fft.process_with_scratch(chunk, &mut scratch);
    });
}

/// Writes `dst[.., o_axis, .., o_last] = src[.., o_last, .., o_axis]`.
fn swap_with_last(src: &[Complex64], dst: &mut [Complex64], n: usize, dim: usize, axis: usize) {
    let stride_axis = n.pow((dim - 1 - axis) as u32);
    par::for_each_chunk_mut(dst, n, |row, out| {
        // Digits of the output row (all axes except the last).
        let start = row * n;
        let o_axis = (start / stride_axis) % n;
        // Input base: output index with digit `axis` cleared and the last
        // digit set to o_axis.
        let base = start - o_axis * stride_axis + o_axis;
        for (j, o) in out.iter_mut().enumerate() {
            *o = src[base + j * stride_axis];
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_dft(data: &[Complex64], n: usize, dim: usize, sign: f64) -> Vec<Complex64> {
        let len = n.pow(dim as u32);
        let digits = |mut i: usize| {
            let mut d = vec![0usize; dim];
            for a in (0..dim).rev() {
                d[a] = i % n;
                i /= n;
            }
            d
        };
        (0..len)
            .map(|k| {
                let kd = digits(k);
                (0..len)
                    .map(|j| {
                        let jd = digits(j);
                        let phase: f64 = kd.iter().zip(&jd).map(|(a, b)| (a * b) as f64).sum();
                        data[j] * Complex64::from_polar(1.0, sign * 2.0 * PI * phase / n as f64)
                    })
                    .sum()
            })
            .collect()
    }

    fn sample(len: usize) -> Vec<Complex64> {
        (0..len)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos() * 0.5))
            .collect()
    }

    #[test]
    fn matches_naive_dft_2d_and_3d() {
        for (n, dim) in [(8usize, 2usize), (4, 3), (8, 3)] {
            let x = sample(n.pow(dim as u32));
            let plan = FftNd::new(n, dim);
            let mut fwd = x.clone();
            plan.forward(&mut fwd);
            let expect = naive_dft(&x, n, dim, -1.0);
            for (a, b) in fwd.iter().zip(&expect) {
                assert!((a - b).norm() < 1e-10);
            }
            let mut inv = x.clone();
            plan.inverse(&mut inv);
            let expect = naive_dft(&x, n, dim, 1.0);
            for (a, b) in inv.iter().zip(&expect) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn round_trip_scales_by_len() {
        let n = 16;
        let x = sample(n * n * n);
        let plan = FftNd::new(n, 3);
        let mut y = x.clone();
        plan.forward(&mut y);
        plan.inverse(&mut y);
        let scale = 1.0 / plan.len() as f64;
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b * scale).norm() < 1e-13);
        }
    }
}
