//! Execution backend shared by every data-parallel loop in the crate.
//!
//! With the `parallel` feature (default) these helpers run on the current
//! rayon pool; without it they are plain sequential loops with identical
//! results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Environment variable consulted for the worker count (0 or unset: all cores).
pub const THREADS_ENV: &str = "REMESHX_THREADS";

pub(crate) fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

pub(crate) fn try_map_range<U, E, F>(n: usize, f: F) -> Result<Vec<U>, E>
where
    U: Send,
    E: Send,
    F: Fn(usize) -> Result<U, E> + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Keeps the `Some` results in index order.
pub(crate) fn filter_map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> Option<U> + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().filter_map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).filter_map(f).collect()
    }
}

/// Calls `f(chunk_index, chunk)` for every `chunk`-sized piece of `dst`.
pub(crate) fn for_each_chunk_mut<T, F>(dst: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Send + Sync,
{
    if chunk == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    {
        dst.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c))
    }
    #[cfg(not(feature = "parallel"))]
    {
        dst.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c))
    }
}

pub(crate) fn sort_by_key_stable<T, K, F>(data: &mut [T], key: F)
where
    T: Send,
    K: Ord,
    F: Fn(&T) -> &K + Sync,
{
    #[cfg(feature = "parallel")]
    {
        data.par_sort_by(|a, b| key(a).cmp(key(b)))
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.sort_by(|a, b| key(a).cmp(key(b)))
    }
}

pub(crate) fn unzip<A, B>(pairs: Vec<(A, B)>) -> (Vec<A>, Vec<B>)
where
    A: Send,
    B: Send,
{
    #[cfg(feature = "parallel")]
    {
        pairs.into_par_iter().unzip()
    }
    #[cfg(not(feature = "parallel"))]
    {
        pairs.into_iter().unzip()
    }
}

/// Number of workers the primitives will use when called from here.
pub fn current_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Hardware parallelism reported by the OS (at least 1).
pub fn available_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Reads `REMESHX_THREADS`; `None` when unset, empty, zero or unparsable.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Configures the process-wide pool. An explicit count wins over
/// `REMESHX_THREADS`; with neither, all available cores are used. Only the
/// first call has an effect; the returned value is the pool size in force.
pub fn init_global_pool(threads: Option<usize>) -> usize {
    let wanted = threads.filter(|&n| n > 0).or_else(workers_from_env);
    #[cfg(feature = "parallel")]
    {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = wanted {
            builder = builder.num_threads(n);
        }
        // Fails only if the global pool already exists, which is fine.
        let _ = builder.build_global();
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = wanted;
        1
    }
}

/// Runs `f` with exactly `workers` workers (cached pool per size).
#[cfg(feature = "parallel")]
pub fn with_workers<R, F>(workers: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};

    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let workers = workers.max(1);
    let pool = {
        let mut pools = POOLS
            .get_or_init(Default::default)
            .lock()
            .unwrap_or_else(|e| e.into_inner());
        pools
            .entry(workers)
            .or_insert_with(|| {
                Arc::new(
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(workers)
                        .thread_name(move |i| format!("remeshx-{workers}-{i}"))
                        .build()
                        .expect("failed to spawn worker pool"),
                )
            })
            .clone()
    };
    pool.install(f)
}

#[cfg(not(feature = "parallel"))]
pub fn with_workers<R, F>(_workers: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helpers_preserve_order() {
        let v = with_workers(4, || map_range(1000, |i| i * 2));
        assert_eq!(v, (0..1000).map(|i| i * 2).collect::<Vec<_>>());
        let odd = with_workers(3, || filter_map_range(20, |i| (i % 2 == 1).then_some(i)));
        assert_eq!(odd, vec![1, 3, 5, 7, 9, 11, 13, 15, 17, 19]);
    }

    #[test]
    fn with_workers_sets_pool_size() {
        #[cfg(feature = "parallel")]
        assert_eq!(with_workers(3, current_workers), 3);
        assert!(available_workers() >= 1);
    }
}
