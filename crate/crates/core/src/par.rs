//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper collects results in index order, so reductions performed by
//! callers are independent of the number of worker threads. Without the
//! `parallel` feature, [`Execution::Parallel`] runs sequentially.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// True when work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// `items.iter().map(f).collect()`, possibly in parallel.
pub fn map_slice<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Seed for the `index`-th independent stream derived from a base seed.
pub fn stream_seed(base: u64, index: u64) -> u64 {
    base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let par = map_range(Execution::Parallel, 1000, |i| i * i);
        let seq = map_range(Execution::Sequential, 1000, |i| i * i);
        assert_eq!(par, seq);
        let items: Vec<f64> = (0..100).map(f64::from).collect();
        assert_eq!(
            map_slice(Execution::Parallel, &items, |x| x.sqrt()),
            map_slice(Execution::Sequential, &items, |x| x.sqrt())
        );
    }

    #[test]
    fn stream_seeds_differ() {
        assert_ne!(stream_seed(7, 0), stream_seed(7, 1));
        assert_eq!(stream_seed(7, 3), stream_seed(7, 3));
    }
}
