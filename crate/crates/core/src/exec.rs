//! Row-level dispatch for the per-pixel kernels.
//!
//! With the `parallel` feature rows are distributed over the rayon pool;
//! without it `Execution::Parallel` degrades to the sequential path. Every
//! kernel is a pure function of its row, so results do not depend on the
//! thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Whether this build can actually run rows concurrently.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Call `f(row_index, row)` for every `width`-sized chunk of `data`.
pub(crate) fn for_each_row<T, F>(data: &mut [T], width: usize, exec: Execution, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Send + Sync,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => data
            .par_chunks_mut(width)
            .enumerate()
            .for_each(|(row, chunk)| f(row, chunk)),
        _ => data
            .chunks_mut(width)
            .enumerate()
            .for_each(|(row, chunk)| f(row, chunk)),
    }
}

/// Evaluate `f` for each row index in `0..height`, in row order.
pub(crate) fn map_rows<R, F>(height: usize, exec: Execution, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Send + Sync,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..height).into_par_iter().map(f).collect(),
        _ => (0..height).map(f).collect(),
    }
}
