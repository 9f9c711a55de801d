//! Thin indexed map/reduce helpers. With the `parallel` feature (default)
//! these fan out over rayon; without it they run sequentially, which keeps a
//! pure-sequential build available for benchmarking and debugging.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn map_collect<U, F>(count: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<U, F>(count: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..count).map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn map_reduce<T, M, R>(count: usize, map: M, reduce: R) -> Option<T>
where
    T: Send,
    M: Fn(usize) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    (0..count).into_par_iter().map(map).reduce_with(reduce)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_reduce<T, M, R>(count: usize, map: M, reduce: R) -> Option<T>
where
    M: Fn(usize) -> T,
    R: Fn(T, T) -> T,
{
    (0..count).map(map).reduce(reduce)
}
