//! Execution strategy switch. With the `parallel` feature off every
//! strategy runs on the calling thread.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    Parallel,
}

impl Default for Strategy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Strategy::Parallel
        } else {
            Strategy::Sequential
        }
    }
}

impl Strategy {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Strategy::Parallel
    }
}

/// `(0..len).map(f).collect()`, in index order regardless of strategy.
pub fn map_indexed<T, F>(strategy: Strategy, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if strategy.is_parallel() {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
    }
    let _ = strategy;
    (0..len).map(f).collect()
}

/// Number of worker threads the parallel strategy would use.
pub fn threads(strategy: Strategy) -> usize {
    #[cfg(feature = "parallel")]
    {
        if strategy.is_parallel() {
            return rayon::current_num_threads();
        }
    }
    let _ = strategy;
    1
}
