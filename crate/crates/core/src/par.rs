//! Index-ordered parallel map with a sequential fallback.
//!
//! With the `parallel` feature the work runs on rayon; `jobs` caps the worker
//! count (`Some(1)` forces the sequential path). Output order always follows
//! the index, so reductions are identical for any thread count.

/// Worker-count policy for replication loops.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Jobs(pub Option<usize>);

impl Jobs {
    pub const SEQUENTIAL: Jobs = Jobs(Some(1));

    pub fn is_sequential(self) -> bool {
        !cfg!(feature = "parallel") || self.0 == Some(1)
    }
}

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_indexed<T, F>(n: usize, jobs: Jobs, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if jobs.is_sequential() || n < 2 {
        return (0..n).map(f).collect();
    }
    parallel::map(n, jobs, f)
}

#[cfg(feature = "parallel")]
mod parallel {
    use super::Jobs;
    use rayon::prelude::*;

    pub(super) fn map<T, F>(n: usize, jobs: Jobs, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        let run = || (0..n).into_par_iter().map(&f).collect::<Vec<T>>();
        match jobs.0 {
            Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
                Ok(pool) => pool.install(run),
                Err(_) => run(),
            },
            None => run(),
        }
    }
}

#[cfg(not(feature = "parallel"))]
mod parallel {
    use super::Jobs;

    pub(super) fn map<T, F>(n: usize, _jobs: Jobs, f: F) -> Vec<T>
    where
        F: Fn(usize) -> T,
    {
        (0..n).map(f).collect()
    }
}
