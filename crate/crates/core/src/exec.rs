//! Trial dispatch. Work is split into fixed-size blocks that are folded
//! sequentially and then combined in block order, so results never depend on
//! the number of worker threads.

/// Trials per block. Part of the reduction order, so changing it changes
/// floating-point sums.
pub const BLOCK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Rayon when the `parallel` feature is enabled, otherwise sequential.
    #[default]
    Parallel,
    Sequential,
}

/// Runs `fold(acc, i)` over `0..count` in blocks and merges the block
/// accumulators left to right.
pub fn fold_blocks<A, I, F, M>(exec: Execution, count: usize, init: I, fold: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, usize) + Sync + Send,
    M: Fn(&mut A, A),
{
    let blocks = count.div_ceil(BLOCK);
    let run_block = |b: usize| {
        let mut acc = init();
        for i in b * BLOCK..((b + 1) * BLOCK).min(count) {
            fold(&mut acc, i);
        }
        acc
    };
    let partials = map_indexed(exec, blocks, run_block);
    let mut out = init();
    for part in partials {
        merge(&mut out, part);
    }
    out
}

/// Maps `f` over `0..count`, returning results in index order.
pub fn map_indexed<T, F>(exec: Execution, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(f).collect()
        }
        _ => (0..count).map(f).collect(),
    }
}

/// Runs `op` on a dedicated pool of `workers` threads. With `None`, or
/// without the `parallel` feature, runs on the caller's thread/global pool.
pub fn with_workers<R: Send>(workers: Option<usize>, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(w) = workers {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("failed to build worker pool");
        return pool.install(op);
    }
    let _ = workers;
    op()
}
