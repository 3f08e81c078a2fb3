//! Trial-level execution. Results always come back in input order, so the
//! output never depends on the worker count.

use crate::error::Result;

/// Applies `f` to every item on the calling thread.
pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    F: Fn(&T) -> Result<R>,
{
    items.iter().map(f).collect()
}

/// Applies `f` to every item on a dedicated pool of `workers` threads.
#[cfg(feature = "parallel")]
pub fn map_parallel<T, R, F>(items: &[T], workers: usize, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    use rayon::prelude::*;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| crate::error::Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| items.par_iter().map(&f).collect())
}

/// Parallel when built with the `parallel` feature and `workers > 1`,
/// sequential otherwise.
pub fn map_trials<T, R, F>(items: &[T], workers: usize, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if workers > 1 {
        return map_parallel(items, workers, f);
    }
    let _ = workers;
    map_sequential(items, f)
}

/// Worker count used when none is configured.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..100).collect();
        let square = |v: &u64| Ok(v * v);
        let seq = map_sequential(&items, square).unwrap();
        for workers in [1, 2, 4] {
            assert_eq!(map_trials(&items, workers, square).unwrap(), seq);
        }
    }

    #[test]
    fn errors_propagate() {
        let items = [1, 2, 3];
        let r: Result<Vec<i32>> = map_trials(&items, 2, |&v| {
            if v == 2 {
                Err(Error::Config("boom".into()))
            } else {
                Ok(v)
            }
        });
        assert!(r.is_err());
    }
}
