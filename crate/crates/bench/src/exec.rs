// SPDX-License-Identifier: Apache-2.0

use std::ops::Range;

use lpa_core::Executor;
use rayon::prelude::*;

/// [`Executor`] over a dedicated rayon pool. Nested calls from inside a
/// range body run on the same pool and are work-stolen like any other task.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    /// Pool of `workers` threads; zero picks the available parallelism.
    pub fn new(workers: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("lpa-worker-{i}"))
            .build()?;
        Ok(RayonExecutor { pool })
    }
}

impl Executor for RayonExecutor {
    fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    fn for_each<F>(&self, len: usize, grain: usize, body: F)
    where
        F: Fn(Range<usize>) + Sync + Send,
    {
        let grain = grain.max(1);
        if len <= grain {
            if len > 0 {
                body(0..len);
            }
            return;
        }
        self.pool.install(|| {
            (0..len.div_ceil(grain))
                .into_par_iter()
                .for_each(|c| body(c * grain..((c + 1) * grain).min(len)))
        });
    }

    fn map_reduce<T, M, R>(&self, len: usize, grain: usize, identity: T, map: M, reduce: R) -> T
    where
        T: Send + Sync + Clone,
        M: Fn(Range<usize>) -> T + Sync + Send,
        R: Fn(T, T) -> T + Sync + Send,
    {
        let grain = grain.max(1);
        if len <= grain {
            return if len > 0 {
                reduce(identity, map(0..len))
            } else {
                identity
            };
        }
        self.pool.install(|| {
            (0..len.div_ceil(grain))
                .into_par_iter()
                .map(|c| map(c * grain..((c + 1) * grain).min(len)))
                .reduce(|| identity.clone(), &reduce)
        })
    }
}
