//! Execution helpers for per-point field kernels.
//!
//! Every slot of the output is written by exactly one kernel call, so results
//! are bitwise independent of scheduling. The `_parallel` variants use rayon
//! when the `parallel` feature is enabled and fall back to the sequential
//! implementation otherwise.

/// Fills `out[k] = kernel(k)` sequentially.
pub fn fill_indexed<T, F>(out: &mut [T], kernel: F)
where
    F: Fn(usize) -> T,
{
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = kernel(k);
    }
}

/// Fills `out[k] = kernel(k)` with rayon.
#[cfg(feature = "parallel")]
pub fn fill_indexed_parallel<T, F>(out: &mut [T], kernel: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    use rayon::prelude::*;
    out.par_iter_mut()
        .enumerate()
        .for_each(|(k, slot)| *slot = kernel(k));
}

/// Sequential fallback used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn fill_indexed_parallel<T, F>(out: &mut [T], kernel: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    fill_indexed(out, kernel);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_matches_sequential_bitwise() {
        let kernel = |k: usize| (k as f64).sqrt() * 0.1 + 1.0 / (k as f64 + 1.0);
        let mut a = vec![0.0; 10_000];
        let mut b = vec![0.0; 10_000];
        fill_indexed(&mut a, kernel);
        fill_indexed_parallel(&mut b, kernel);
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
