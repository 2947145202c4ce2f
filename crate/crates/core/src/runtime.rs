//! Execution environment hooks.
//!
//! Every parallel region in the crate goes through [`Runtime::map`], which
//! must return results in index order. That ordering is what makes rankings
//! and reports identical for any worker count.

use alloc::vec::Vec;

pub trait Runtime: Sync {
    /// Evaluates `f(0), f(1), .., f(len - 1)` and returns the results in
    /// index order. Implementations may run the calls concurrently.
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;

    /// Monotonic clock in seconds. Only differences are meaningful.
    fn now(&self) -> f64 {
        0.0
    }

    fn workers(&self) -> usize {
        1
    }
}

/// Single-threaded runtime without a clock (all timings read as zero).
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Runtime for Sequential {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..len).map(f).collect()
    }
}

impl<R: Runtime> Runtime for &R {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (**self).map(len, f)
    }

    fn now(&self) -> f64 {
        (**self).now()
    }

    fn workers(&self) -> usize {
        (**self).workers()
    }
}

/// Seconds elapsed since `start` on the runtime clock, never negative.
pub(crate) fn elapsed<R: Runtime + ?Sized>(rt: &R, start: f64) -> f64 {
    let d = rt.now() - start;
    if d > 0.0 {
        d
    } else {
        0.0
    }
}
