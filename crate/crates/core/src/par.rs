//! Thin switch between rayon and plain iterators.
//!
//! Every helper returns results in input order. Reductions go through
//! [`chunked_sum`], which sums fixed-size chunks and then folds the chunk
//! partials left to right, so the floating-point result does not depend on
//! the thread count or on whether the `parallel` feature is enabled.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rows per partial sum in [`chunked_sum`].
pub const REDUCTION_CHUNK: usize = 256;

/// `true` when compiled with the `parallel` feature.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Map `f` over `0..n`, collecting in index order.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Map `f` over a slice, collecting in order.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Deterministic sum of `width`-wide vector terms over `0..n`.
///
/// `term(i, acc)` adds row `i`'s contribution into `acc`. Rows are grouped
/// into chunks of [`REDUCTION_CHUNK`]; each chunk is summed sequentially and
/// the chunk totals are added in chunk order.
pub fn chunked_sum<F>(n: usize, width: usize, term: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    let n_chunks = n.div_ceil(REDUCTION_CHUNK);
    let partials = map_range(n_chunks, |c| {
        let mut acc = vec![0.0; width];
        let start = c * REDUCTION_CHUNK;
        let end = (start + REDUCTION_CHUNK).min(n);
        for i in start..end {
            term(i, &mut acc);
        }
        acc
    });
    let mut total = vec![0.0; width];
    for partial in partials {
        for (t, p) in total.iter_mut().zip(partial) {
            *t += p;
        }
    }
    total
}
