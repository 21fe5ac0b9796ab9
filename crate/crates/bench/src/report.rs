// SPDX-License-Identifier: Apache-2.0

//! JSON reports.
//!
//! `detect` writes one [`RunReport`]:
//!
//! ```json
//! {
//!   "graph":  { "path": "g.el", "format": "edge-list", "vertices": 6,
//!               "edges": 6, "stored_edges": 12, "total_weight": 6.0 },
//!   "config": { "tolerance": 0.05, "max_iterations": 20, "pl_period": 4,
//!               "cc_period": 0, "probing": "quadratic-double",
//!               "switch_degree": 32, "precision": "32", "exec": "parallel",
//!               "workers": 0, "seed": 0 },
//!   "stats":  { "iterations": 2, "delta_n_per_iter": [4, 0],
//!               "converged": true, "elapsed_s": 1.2e-5, "pl_iterations": 1,
//!               "cc_iterations": 0, "cc_reverts": 0 },
//!   "modularity": 0.5,
//!   "communities": 2,
//!   "throughput_edges_per_s": 2.0e6,
//!   "rerun_args": ["--tolerance", "0.05", "..."]
//! }
//! ```
//!
//! `edges` counts undirected edges (self-loops once), `stored_edges` both
//! directions, `total_weight` is m. `modularity` is `null` for edgeless
//! graphs. `rerun_args` are the configuration flags that reproduce the run.

use serde::{Deserialize, Serialize};

use lpa_core::{CsrGraph, LpaConfig, RunStats};

use crate::run::Detection;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphInfo {
    pub path: Option<String>,
    pub format: Option<String>,
    pub vertices: usize,
    pub edges: usize,
    pub stored_edges: usize,
    pub total_weight: f64,
}

impl GraphInfo {
    pub fn new(graph: &CsrGraph, path: Option<String>, format: Option<String>) -> Self {
        GraphInfo {
            path,
            format,
            vertices: graph.n(),
            edges: graph.arcs().filter(|&(i, j, _)| i <= j).count(),
            stored_edges: graph.m2(),
            total_weight: graph.total_weight_2m() / 2.0,
        }
    }
}

/// Complete, re-runnable copy of an [`LpaConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub pl_period: usize,
    pub cc_period: usize,
    pub probing: String,
    pub switch_degree: usize,
    pub precision: String,
    pub exec: String,
    pub workers: usize,
    pub seed: u64,
}

impl From<&LpaConfig> for ConfigEcho {
    fn from(c: &LpaConfig) -> Self {
        ConfigEcho {
            tolerance: c.tolerance,
            max_iterations: c.max_iterations,
            pl_period: c.pl_period,
            cc_period: c.cc_period,
            probing: c.strategy.name().into(),
            switch_degree: c.switch_degree,
            precision: c.precision.name().into(),
            exec: c.exec_mode.name().into(),
            workers: c.workers,
            seed: c.seed,
        }
    }
}

impl ConfigEcho {
    pub fn to_config(&self) -> Result<LpaConfig, String> {
        Ok(LpaConfig {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            pl_period: self.pl_period,
            cc_period: self.cc_period,
            strategy: self.probing.parse().map_err(|e| format!("{e}"))?,
            switch_degree: self.switch_degree,
            precision: self.precision.parse()?,
            exec_mode: self.exec.parse()?,
            workers: self.workers,
            seed: self.seed,
            pruning: true,
        })
    }

    /// Command-line flags selecting this configuration.
    pub fn to_args(&self) -> Vec<String> {
        let pairs: [(&str, String); 10] = [
            ("--tolerance", self.tolerance.to_string()),
            ("--max-iterations", self.max_iterations.to_string()),
            ("--pl-period", self.pl_period.to_string()),
            ("--cc-period", self.cc_period.to_string()),
            ("--probing", self.probing.clone()),
            ("--switch-degree", self.switch_degree.to_string()),
            ("--precision", self.precision.clone()),
            ("--exec", self.exec.clone()),
            ("--workers", self.workers.to_string()),
            ("--seed", self.seed.to_string()),
        ];
        pairs
            .into_iter()
            .flat_map(|(flag, value)| [flag.to_string(), value])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsEcho {
    pub iterations: usize,
    pub delta_n_per_iter: Vec<usize>,
    pub converged: bool,
    pub elapsed_s: f64,
    pub pl_iterations: usize,
    pub cc_iterations: usize,
    pub cc_reverts: usize,
}

impl From<&RunStats> for StatsEcho {
    fn from(s: &RunStats) -> Self {
        StatsEcho {
            iterations: s.iterations,
            delta_n_per_iter: s.delta_n_per_iter.clone(),
            converged: s.converged,
            elapsed_s: s.elapsed,
            pl_iterations: s.pl_iterations,
            cc_iterations: s.cc_iterations,
            cc_reverts: s.cc_reverts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub graph: GraphInfo,
    pub config: ConfigEcho,
    pub stats: StatsEcho,
    pub modularity: Option<f64>,
    pub communities: usize,
    pub throughput_edges_per_s: f64,
    pub rerun_args: Vec<String>,
}

impl RunReport {
    pub fn new(graph: GraphInfo, csr: &CsrGraph, config: &LpaConfig, det: &Detection) -> Self {
        let config = ConfigEcho::from(config);
        RunReport {
            graph,
            rerun_args: config.to_args(),
            config,
            stats: StatsEcho::from(&det.stats),
            modularity: det.modularity,
            communities: det.communities,
            throughput_edges_per_s: det.throughput(csr),
        }
    }
}
