use rayon::prelude::*;
use topoband_core::exec::ParMap;

/// Thread pool for k-grid and sweep loops. `TOPOBAND_THREADS` caps its size.
pub struct Rayon {
    pool: rayon::ThreadPool,
}

impl Rayon {
    pub fn new(threads: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
        Rayon { pool }
    }

    pub fn from_env() -> Self {
        let threads = std::env::var("TOPOBAND_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok());
        Self::new(threads.unwrap_or(0))
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl ParMap for Rayon {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}
