//! Execution strategy for data-parallel loops.
//!
//! Every loop routed through [`Execution`] produces its outputs in index
//! order, so results never depend on the strategy or the worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon global pool.
    #[default]
    Parallel,
    /// Dedicated pool with this many threads; `0` means the global pool.
    Workers(usize),
}

impl Execution {
    pub fn with_workers(workers: usize) -> Self {
        match workers {
            1 => Execution::Sequential,
            w => Execution::Workers(w),
        }
    }

    /// Whether this build can actually run work concurrently.
    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Maps `f` over `0..len`, returning results in index order.
    pub fn map_range<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..len).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..len).into_par_iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Workers(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
                Ok(pool) => pool.install(|| (0..len).into_par_iter().map(f).collect()),
                Err(e) => {
                    log::warn!("could not build a {w}-thread pool ({e}); running sequentially");
                    (0..len).map(f).collect()
                }
            },
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel | Execution::Workers(_) => (0..len).map(f).collect(),
        }
    }

    /// Maps `f` over a slice, returning results in slice order.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        self.map_range(items.len(), |i| f(&items[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let f = |i: usize| (i as f64).sqrt().sin();
        let seq = Execution::Sequential.map_range(1000, f);
        assert_eq!(seq, Execution::Parallel.map_range(1000, f));
        assert_eq!(seq, Execution::with_workers(3).map_range(1000, f));
    }

    #[test]
    fn one_worker_is_sequential() {
        assert_eq!(Execution::with_workers(1), Execution::Sequential);
    }
}
