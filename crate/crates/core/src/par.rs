//! Batch evaluation. With the `parallel` feature the work is spread over the
//! rayon pool; without it everything runs on the calling thread.

use crate::error::Result;

#[cfg(feature = "parallel")]
pub fn map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    map_seq(items, f)
}

pub fn map_seq<T, U>(items: &[T], f: impl Fn(&T) -> U) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Like [`map`], stopping at the first error in input order.
pub fn try_map<T: Sync, U: Send>(
    items: &[T],
    f: impl Fn(&T) -> Result<U> + Sync + Send,
) -> Result<Vec<U>> {
    map(items, f).into_iter().collect()
}

pub fn try_map_seq<T, U>(items: &[T], f: impl Fn(&T) -> Result<U>) -> Result<Vec<U>> {
    items.iter().map(f).collect()
}

/// Whether batch helpers use more than one thread.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Sizes the global pool; returns false if it was already initialised or
/// the crate is built without the `parallel` feature.
pub fn init_threads(n: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        false
    }
}
