// SPDX-License-Identifier: Apache-2.0

//! Design-space sweeps.
//!
//! A sweep varies one configuration dimension over a grid and runs every
//! graph at every grid point `reps` times, one detection at a time. The CSV
//! has one row per repetition (`rep` = 0, 1, ...) followed by a row with
//! `rep` = `mean` averaging runtime, modularity, iterations and community
//! count; its `converged` is true only if every repetition converged.
//!
//! Columns: `graph, dimension, point, rep, exec, workers, pl_period,
//! cc_period, probing, switch_degree, precision, runtime_s, modularity,
//! iterations, converged, communities, error`. A failed cell yields a
//! single row with `rep` = `error` and the message in `error`.

use std::fmt;
use std::io::Write;

use lpa_core::{CsrGraph, LpaConfig, Precision, ProbeStrategy};
use serde::Serialize;

use crate::error::BenchError;
use crate::run::detect_repeated;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Dimension {
    Mitigation,
    Probing,
    SwitchDegree,
    Precision,
}

impl Dimension {
    pub fn name(self) -> &'static str {
        match self {
            Dimension::Mitigation => "mitigation",
            Dimension::Probing => "probing",
            Dimension::SwitchDegree => "switch-degree",
            Dimension::Precision => "precision",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridPoint {
    /// Pick-less and cross-check periods; zero disables either.
    Mitigation {
        pl: usize,
        cc: usize,
    },
    Probing(ProbeStrategy),
    SwitchDegree(usize),
    Precision(Precision),
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GridPoint::Mitigation { pl: 0, cc: 0 } => f.write_str("none"),
            GridPoint::Mitigation { pl, cc: 0 } => write!(f, "pl{pl}"),
            GridPoint::Mitigation { pl: 0, cc } => write!(f, "cc{cc}"),
            GridPoint::Mitigation { pl, cc } => write!(f, "pl{pl}+cc{cc}"),
            GridPoint::Probing(s) => f.write_str(s.name()),
            GridPoint::SwitchDegree(d) => write!(f, "{d}"),
            GridPoint::Precision(p) => f.write_str(p.name()),
        }
    }
}

impl GridPoint {
    pub fn parse(dimension: Dimension, token: &str) -> Result<Self, String> {
        let token = token.trim();
        let bad = || format!("bad {} grid point `{token}`", dimension.name());
        match dimension {
            Dimension::Mitigation => {
                if token == "none" {
                    return Ok(GridPoint::Mitigation { pl: 0, cc: 0 });
                }
                let (mut pl, mut cc) = (0, 0);
                for part in token.split('+') {
                    let (slot, digits) = if let Some(d) = part.strip_prefix("pl") {
                        (&mut pl, d)
                    } else if let Some(d) = part.strip_prefix("cc") {
                        (&mut cc, d)
                    } else {
                        return Err(bad());
                    };
                    *slot = digits.parse().map_err(|_| bad())?;
                }
                Ok(GridPoint::Mitigation { pl, cc })
            }
            Dimension::Probing => token.parse().map(GridPoint::Probing).map_err(|_| bad()),
            Dimension::SwitchDegree => match token.parse() {
                Ok(d) if d >= 2 => Ok(GridPoint::SwitchDegree(d)),
                _ => Err(bad()),
            },
            Dimension::Precision => token.parse().map(GridPoint::Precision).map_err(|_| bad()),
        }
    }

    pub fn default_grid(dimension: Dimension) -> Vec<GridPoint> {
        match dimension {
            Dimension::Mitigation => {
                let mut grid = vec![GridPoint::Mitigation { pl: 0, cc: 0 }];
                grid.extend((1..=4).map(|pl| GridPoint::Mitigation { pl, cc: 0 }));
                grid.extend((1..=4).map(|cc| GridPoint::Mitigation { pl: 0, cc }));
                for pl in 1..=4 {
                    grid.extend((1..=4).map(|cc| GridPoint::Mitigation { pl, cc }));
                }
                grid
            }
            Dimension::Probing => ProbeStrategy::ALL.map(GridPoint::Probing).to_vec(),
            Dimension::SwitchDegree => (1..=8).map(|k| GridPoint::SwitchDegree(1 << k)).collect(),
            Dimension::Precision => Precision::ALL.map(GridPoint::Precision).to_vec(),
        }
    }

    pub fn apply(&self, base: &LpaConfig) -> LpaConfig {
        let mut c = base.clone();
        match *self {
            GridPoint::Mitigation { pl, cc } => {
                c.pl_period = pl;
                c.cc_period = cc;
            }
            GridPoint::Probing(s) => c.strategy = s,
            GridPoint::SwitchDegree(d) => c.switch_degree = d,
            GridPoint::Precision(p) => c.precision = p,
        }
        c
    }
}

/// Parses a comma-separated grid, or returns the default grid for `None`.
pub fn parse_grid(dimension: Dimension, points: Option<&str>) -> Result<Vec<GridPoint>, String> {
    let Some(points) = points else {
        return Ok(GridPoint::default_grid(dimension));
    };
    let grid = points
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| GridPoint::parse(dimension, t))
        .collect::<Result<Vec<_>, _>>()?;
    if grid.is_empty() {
        return Err("empty grid".into());
    }
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub graph: String,
    pub dimension: String,
    pub point: String,
    pub rep: String,
    pub exec: String,
    pub workers: usize,
    pub pl_period: usize,
    pub cc_period: usize,
    pub probing: String,
    pub switch_degree: usize,
    pub precision: String,
    pub runtime_s: Option<f64>,
    pub modularity: Option<f64>,
    pub iterations: Option<f64>,
    pub converged: Option<bool>,
    pub communities: Option<f64>,
    pub error: String,
}

impl SweepRow {
    fn coordinates(
        graph: &str,
        dimension: Dimension,
        point: &GridPoint,
        cfg: &LpaConfig,
        rep: String,
    ) -> Self {
        SweepRow {
            graph: graph.to_string(),
            dimension: dimension.name().to_string(),
            point: point.to_string(),
            rep,
            exec: cfg.exec_mode.name().to_string(),
            workers: cfg.workers,
            pl_period: cfg.pl_period,
            cc_period: cfg.cc_period,
            probing: cfg.strategy.name().to_string(),
            switch_degree: cfg.switch_degree,
            precision: cfg.precision.name().to_string(),
            runtime_s: None,
            modularity: None,
            iterations: None,
            converged: None,
            communities: None,
            error: String::new(),
        }
    }
}

pub struct Sweep<'a> {
    pub graphs: &'a [(String, CsrGraph)],
    pub dimension: Dimension,
    pub grid: &'a [GridPoint],
    pub base: &'a LpaConfig,
    pub reps: usize,
}

impl Sweep<'_> {
    /// Runs every cell, handing rows to `sink` as they are produced.
    pub fn run(
        &self,
        mut sink: impl FnMut(SweepRow) -> Result<(), BenchError>,
    ) -> Result<(), BenchError> {
        let reps = self.reps.max(1);
        for (name, graph) in self.graphs {
            for point in self.grid {
                let cfg = point.apply(self.base);
                let row =
                    |rep: String| SweepRow::coordinates(name, self.dimension, point, &cfg, rep);
                let runs = match detect_repeated(graph, &cfg, reps) {
                    Ok(runs) => runs,
                    Err(e) => {
                        sink(SweepRow {
                            error: e.to_string(),
                            ..row("error".into())
                        })?;
                        continue;
                    }
                };
                for (k, d) in runs.iter().enumerate() {
                    sink(SweepRow {
                        runtime_s: Some(d.stats.elapsed),
                        modularity: d.modularity,
                        iterations: Some(d.stats.iterations as f64),
                        converged: Some(d.stats.converged),
                        communities: Some(d.communities as f64),
                        ..row(k.to_string())
                    })?;
                }
                let mean = |f: &dyn Fn(&crate::run::Detection) -> f64| {
                    runs.iter().map(f).sum::<f64>() / runs.len() as f64
                };
                let modularity = runs
                    .iter()
                    .map(|d| d.modularity)
                    .sum::<Option<f64>>()
                    .map(|q| q / runs.len() as f64);
                sink(SweepRow {
                    runtime_s: Some(mean(&|d| d.stats.elapsed)),
                    modularity,
                    iterations: Some(mean(&|d| d.stats.iterations as f64)),
                    converged: Some(runs.iter().all(|d| d.stats.converged)),
                    communities: Some(mean(&|d| d.communities as f64)),
                    ..row("mean".into())
                })?;
            }
        }
        Ok(())
    }

    pub fn collect(&self) -> Result<Vec<SweepRow>, BenchError> {
        let mut rows = Vec::new();
        self.run(|r| {
            rows.push(r);
            Ok(())
        })?;
        Ok(rows)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<(), BenchError> {
        let mut w = csv::Writer::from_writer(out);
        self.run(|r| Ok(w.serialize(r)?))?;
        w.flush().map_err(|e| BenchError::io("<sweep output>", e))?;
        Ok(())
    }
}
