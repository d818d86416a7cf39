//! Order-preserving map over independent work items.
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`] runs on
//! the rayon pool; without it every execution mode is sequential.

use crate::error::{Error, Result};

/// Environment variable that fixes the number of worker threads.
pub const THREADS_ENV: &str = "DQD_THREADS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run work concurrently.
    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Maps `f` over `items`, returning results in input order.
pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Like [`map`] but stops at (and returns) the first error in input order.
pub fn try_map<T, R, F>(items: &[T], exec: Execution, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    map(items, exec, f).into_iter().collect()
}

/// Sizes the global rayon pool from [`THREADS_ENV`] if it is set.
///
/// Returns the configured thread count, or `None` when the variable is unset.
pub fn configure_from_env() -> Result<Option<usize>> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::invalid("DQD_THREADS", format!("expected a positive integer, got {raw:?}")))?;
    #[cfg(feature = "parallel")]
    {
        // A second initialization (e.g. from tests) keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(Some(threads))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_preserve_order() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map(&items, Execution::Sequential, |x| x * x);
        let par = map(&items, Execution::Parallel, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[999], 998_001);
    }

    #[test]
    fn try_map_reports_first_error() {
        let items: Vec<i32> = (0..100).collect();
        let r = try_map(&items, Execution::Parallel, |&x| {
            if x >= 40 {
                Err(Error::Consistency(format!("item {x}")))
            } else {
                Ok(x)
            }
        });
        match r {
            Err(Error::Consistency(msg)) => assert_eq!(msg, "item 40"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
