//! Data-parallel map with a sequential fallback.
//!
//! Replicate loops are embarrassingly parallel once every iteration derives
//! its randomness from its own index, so the only primitive needed is an
//! order-preserving indexed map. With the `parallel` feature disabled,
//! `ExecMode::Parallel` silently degrades to the sequential path — results
//! are identical either way, which the determinism tests pin down.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl ExecMode {
    pub fn parse(s: &str) -> Option<ExecMode> {
        match s {
            "sequential" => Some(ExecMode::Sequential),
            "parallel" => Some(ExecMode::Parallel),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ExecMode::Sequential => "sequential",
            ExecMode::Parallel => "parallel",
        }
    }
}

/// `(0..n).map(f)` collected in index order.
pub fn map_indexed<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..n).map(f).collect(),
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..n).map(f).collect()
            }
        }
    }
}

/// Run `body` on a pool with the requested worker count (0 = library
/// default). Without the `parallel` feature the count is ignored.
pub fn with_workers<T: Send>(workers: usize, body: impl FnOnce() -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    {
        if workers == 0 {
            body()
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .expect("thread pool");
            pool.install(body)
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        body()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let seq = map_indexed(ExecMode::Sequential, 1000, |i| i * i);
        let par = map_indexed(ExecMode::Parallel, 1000, |i| i * i);
        assert_eq!(seq, par);
    }

    #[test]
    fn worker_pool_agrees() {
        let base = map_indexed(ExecMode::Parallel, 500, |i| crate::rng::mix64(i as u64));
        for workers in [1usize, 2, 8] {
            let got = with_workers(workers, || {
                map_indexed(ExecMode::Parallel, 500, |i| crate::rng::mix64(i as u64))
            });
            assert_eq!(got, base, "workers = {workers}");
        }
    }
}
