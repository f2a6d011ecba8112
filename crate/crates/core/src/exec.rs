//! Replica loops with a rayon backend and a sequential fallback.
//!
//! Replica indices are split into fixed-size chunks; each chunk is folded
//! sequentially and the chunk results are combined in index order. The
//! result is therefore identical whatever the thread count, including for
//! floating-point accumulators.

use serde::{Deserialize, Serialize};

/// Replicas per work item.
pub const CHUNK: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs sequentially.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Folds `f(i)` for `i in 0..n` into per-chunk accumulators, then merges
/// the chunk accumulators in order.
pub fn fold_replicas<A, F, M>(n: u64, exec: Execution, init: impl Fn() -> A + Sync + Send, f: F, merge: M) -> A
where
    A: Send,
    F: Fn(&mut A, u64) + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    let run_chunk = |c: u64| {
        let mut acc = init();
        for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
            f(&mut acc, i);
        }
        acc
    };
    let parts: Vec<A> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..chunks).into_par_iter().map(run_chunk).collect()
        }
        _ => (0..chunks).map(run_chunk).collect(),
    };
    parts.into_iter().fold(init(), merge)
}

/// Collects `f(i)` for `i in 0..n`, in index order.
pub fn map_replicas<T, F>(n: u64, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n as usize)
                .into_par_iter()
                .with_min_len(CHUNK as usize)
                .map(|i| f(i as u64))
                .collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_is_order_stable() {
        let sum = |exec| {
            fold_replicas(
                1000,
                exec,
                || 0.0f64,
                |acc, i| *acc += 1.0 / (i as f64 + 1.0),
                |a, b| a + b,
            )
        };
        assert_eq!(sum(Execution::Sequential).to_bits(), sum(Execution::Parallel).to_bits());
    }

    #[test]
    fn map_keeps_order() {
        let v = map_replicas(100, Execution::Parallel, |i| i * 2);
        assert_eq!(v, (0..100).map(|i| i * 2).collect::<Vec<_>>());
    }
}
