//! Ordered parallel map on a pool of a chosen size.

use rayon::prelude::*;

/// Run `f` inside a rayon pool with `threads` workers (`0` = rayon's
/// default).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(f)
}

/// `items.map(f)` computed in parallel, results in input order.
pub fn map_ordered<T, R, F>(threads: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    with_threads(threads, || items.par_iter().map(&f).collect())
}
