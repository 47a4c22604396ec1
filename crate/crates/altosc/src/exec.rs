//! Data-parallel sweep helpers.
//!
//! Grid sweeps (Gram matrices, coefficient tables, residual scans) are
//! embarrassingly parallel: every element is a pure function of its index.
//! With the default `parallel` feature these fan out over rayon; without it
//! they run sequentially with identical results. Reductions over the
//! collected vectors are always performed sequentially in index order, so
//! output bytes do not depend on thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, preserving index order in the output.
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
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

/// Map `f` over a slice, preserving order.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
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

/// Run `f` inside a dedicated single-threaded rayon pool. Used by the bench
/// suite to compare the parallel core against a sequential baseline without
/// rebuilding the crate.
#[cfg(feature = "parallel")]
pub fn run_single_threaded<R, F>(f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("single-thread pool")
        .install(f)
}

#[cfg(not(feature = "parallel"))]
pub fn run_single_threaded<R, F>(f: F) -> R
where
    F: FnOnce() -> R,
{
    f()
}
