//! Execution strategy for embarrassingly parallel fan-out (grid scans,
//! trajectory ensembles, parameter sweeps).
//!
//! With the `parallel` feature (default) the `Parallel` mode runs on rayon;
//! without it the crate has no rayon dependency and `Parallel` degrades to
//! the sequential path. Results are collected in index order either way, so
//! output bytes do not depend on the mode or thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How fan-out loops execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Rayon work-stealing; sequential fallback when the `parallel` feature
    /// is disabled.
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Pin the global worker-pool size. Returns false when the pool was already
/// initialized or the `parallel` feature is off.
pub fn configure_threads(n: usize) -> bool {
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

/// Map `f` over `0..n`, collecting results in index order.
pub fn map_indexed<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..n).map(f).collect(),
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                (0..n).into_par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..n).map(f).collect()
            }
        }
    }
}

/// True if any index in `0..n` satisfies `f`. Parallel mode may evaluate
/// more indices than strictly needed but returns the same answer.
pub fn any_indexed<F>(mode: ExecMode, n: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..n).any(f),
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                (0..n).into_par_iter().any(f)
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..n).any(f)
            }
        }
    }
}
