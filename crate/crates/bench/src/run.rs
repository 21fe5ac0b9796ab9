// SPDX-License-Identifier: Apache-2.0

use std::time::Instant;

use lpa_core::{
    community_stats, modularity, CsrGraph, ExecMode, Labels, LpaConfig, Prepared, RunStats,
    SequentialExecutor,
};

use crate::error::BenchError;
use crate::exec::RayonExecutor;

/// Outcome of one timed detection.
#[derive(Debug, Clone)]
pub struct Detection {
    pub labels: Labels,
    /// `elapsed` covers the propagation only, not graph loading, arena
    /// allocation or pool start-up.
    pub stats: RunStats,
    /// `None` for graphs without edges.
    pub modularity: Option<f64>,
    pub communities: usize,
}

impl Detection {
    /// Stored edges processed per second, `m2 * iterations / elapsed`.
    pub fn throughput(&self, graph: &CsrGraph) -> f64 {
        if self.stats.elapsed > 0.0 {
            graph.m2() as f64 * self.stats.iterations as f64 / self.stats.elapsed
        } else {
            0.0
        }
    }
}

enum Backend {
    Inline,
    Pool(RayonExecutor),
}

impl Backend {
    fn for_config(config: &LpaConfig) -> Result<Self, BenchError> {
        Ok(match config.exec_mode {
            ExecMode::Parallel => Backend::Pool(RayonExecutor::new(config.workers)?),
            _ => Backend::Inline,
        })
    }

    fn run(&self, prepared: &mut Prepared<'_>) -> Result<(Labels, RunStats), BenchError> {
        Ok(match self {
            Backend::Inline => prepared.run(&SequentialExecutor)?,
            Backend::Pool(exec) => prepared.run(exec)?,
        })
    }
}

/// Runs detection `reps` times on the same prepared state.
pub fn detect_repeated(
    graph: &CsrGraph,
    config: &LpaConfig,
    reps: usize,
) -> Result<Vec<Detection>, BenchError> {
    let mut prepared = Prepared::new(graph, config.clone())?;
    let backend = Backend::for_config(config)?;
    (0..reps)
        .map(|_| {
            let start = Instant::now();
            let (labels, mut stats) = backend.run(&mut prepared)?;
            stats.elapsed = start.elapsed().as_secs_f64();
            let modularity = if graph.total_weight_2m() > 0.0 {
                Some(modularity(graph, &labels)?)
            } else {
                None
            };
            let communities = community_stats(graph, &labels)?.count;
            Ok(Detection {
                labels,
                stats,
                modularity,
                communities,
            })
        })
        .collect()
}

pub fn detect(graph: &CsrGraph, config: &LpaConfig) -> Result<Detection, BenchError> {
    Ok(detect_repeated(graph, config, 1)?
        .pop()
        .expect("one repetition"))
}
