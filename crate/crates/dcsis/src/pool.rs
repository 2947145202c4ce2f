use std::time::Instant;

use dcsis_core::Runtime;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Fixed-size rayon pool with a wall clock. Results come back in index
/// order whatever the worker count.
pub struct Pool {
    pool: rayon::ThreadPool,
    origin: Instant,
}

impl Pool {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::Pool("worker count must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("dcsis-{i}"))
            .build()
            .map_err(|e| Error::Pool(e.to_string()))?;
        Ok(Self {
            pool,
            origin: Instant::now(),
        })
    }
}

pub fn available_workers() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

impl Runtime for Pool {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        if self.pool.current_num_threads() == 1 {
            return (0..len).map(f).collect();
        }
        self.pool.install(|| (0..len).into_par_iter().map(f).collect())
    }

    fn now(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }

    fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}
