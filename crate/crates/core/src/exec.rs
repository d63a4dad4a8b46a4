//! Execution strategy for data-parallel loops. The core crate only runs
//! sequentially; the std crate supplies a thread-pool implementation.

use alloc::vec::Vec;

pub trait ParMap: Sync {
    /// `(0..n).map(f).collect()`, possibly in parallel; order is preserved.
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl ParMap for Sequential {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}
