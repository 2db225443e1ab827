//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) these dispatch to rayon; without it
//! they run the same closures sequentially. Reductions always combine
//! fixed-size chunk partials in index order, so results are bit-identical
//! across thread counts and across the two builds.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length used for reductions. Changing it changes rounding.
pub(crate) const REDUCE_CHUNK: usize = 4096;

/// Applies `f` to consecutive mutable chunks of `data`, passing the chunk index.
pub(crate) fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(chunk)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Maps `f` over `items`, preserving order.
pub(crate) fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    items.iter().map(f).collect()
}

/// Maps `f` over `0..n`, preserving order.
pub(crate) fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return (0..n).into_par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    (0..n).map(f).collect()
}

/// Deterministic chunked sum: `f` maps (offset, chunk) to a partial sum.
pub(crate) fn chunked_sum<T, F>(data: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(usize, &[T]) -> f64 + Sync + Send,
{
    let n_chunks = data.len().div_ceil(REDUCE_CHUNK);
    let partials = map_range(n_chunks, |i| {
        let lo = i * REDUCE_CHUNK;
        let hi = (lo + REDUCE_CHUNK).min(data.len());
        f(lo, &data[lo..hi])
    });
    partials.into_iter().sum()
}

/// Deterministic chunked maximum (NaN-propagating).
pub(crate) fn chunked_max<T, F>(data: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    let n_chunks = data.len().div_ceil(REDUCE_CHUNK);
    let partials = map_range(n_chunks, |i| {
        let lo = i * REDUCE_CHUNK;
        let hi = (lo + REDUCE_CHUNK).min(data.len());
        data[lo..hi].iter().map(&f).fold(0.0_f64, nan_max)
    });
    partials.into_iter().fold(0.0_f64, nan_max)
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// True when this build dispatches to rayon.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
