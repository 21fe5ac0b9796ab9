// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.
//!
//! Exit status: 0 success, 1 usage error, 2 input error (missing file,
//! parse or validation failure, allocation failure), 3 internal invariant
//! violation.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use lpa_core::{
    build_csr, community_stats, modularity, CsrGraph, ExecMode, LpaConfig, Precision, ProbeStrategy,
};
use serde::Serialize;

use crate::error::BenchError;
use crate::generate::{ring_of_cliques, star, Generated, PlantedPartition};
use crate::io::{load_graph, read_membership, write_graph, write_membership, GraphFormat};
use crate::report::{GraphInfo, RunReport};
use crate::run::detect;
use crate::sweep::{parse_grid, Dimension, Sweep};

#[derive(Debug, Parser)]
#[command(
    name = "lpa-bench",
    version,
    about = "Label propagation community detection and sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect communities and write a membership file and a JSON report.
    Detect(DetectArgs),
    /// Run a design-space sweep and write CSV.
    Sweep(SweepArgs),
    /// Score a membership file against a graph.
    Quality(QualityArgs),
    /// Write a synthetic graph.
    #[command(subcommand)]
    Generate(GenerateCommand),
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Stop once a non-pick-less pass changes fewer than this fraction of vertices.
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 20)]
    pub max_iterations: usize,
    /// Pick-less pass every N iterations (0 disables).
    #[arg(long, default_value_t = 4)]
    pub pl_period: usize,
    /// Cross-check every N iterations (0 disables).
    #[arg(long, default_value_t = 0)]
    pub cc_period: usize,
    /// linear | quadratic | double | quadratic-double
    #[arg(long, default_value = "quadratic-double")]
    pub probing: ProbeStrategy,
    /// Degree at which vertices move from the scalar to the team path.
    #[arg(long, default_value_t = 32)]
    pub switch_degree: usize,
    /// Hashtable value width: 32 | 64
    #[arg(long, default_value = "32")]
    pub precision: Precision,
    /// parallel | sequential | synchronous
    #[arg(long, default_value = "parallel")]
    pub exec: ExecMode,
    /// Worker threads for parallel mode (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl ConfigArgs {
    pub fn to_config(&self) -> LpaConfig {
        LpaConfig {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            pl_period: self.pl_period,
            cc_period: self.cc_period,
            strategy: self.probing,
            switch_degree: self.switch_degree,
            precision: self.precision,
            exec_mode: self.exec,
            workers: self.workers,
            seed: self.seed,
            pruning: true,
        }
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to mtx for `.mtx` files, edge-list otherwise.
    #[arg(long, value_enum)]
    pub format: Option<GraphFormat>,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub out_membership: Option<PathBuf>,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    pub out_report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Graph files; repeat for several.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<GraphFormat>,
    #[arg(long, value_enum)]
    pub dimension: Dimension,
    /// Comma-separated grid points, e.g. `none,pl4,cc2,pl4+cc2`,
    /// `linear,double`, `2,32,256` or `32,64`. Defaults to the full grid.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QualityArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<GraphFormat>,
    #[arg(long)]
    pub membership: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateOut {
    /// `.mtx` writes MatrixMarket, anything else an edge list.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the planted membership.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenerateCommand {
    /// Planted partition with equal-size communities.
    Planted {
        #[arg(long, default_value_t = 100)]
        communities: usize,
        #[arg(long, default_value_t = 100)]
        size: usize,
        #[arg(long, default_value_t = 0.3)]
        p_in: f64,
        #[arg(long, default_value_t = 0.001)]
        p_out: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: GenerateOut,
    },
    /// Cliques joined in a ring by single edges.
    RingOfCliques {
        #[arg(long)]
        cliques: usize,
        #[arg(long)]
        clique_size: usize,
        #[command(flatten)]
        out: GenerateOut,
    },
    /// One hub joined to every leaf.
    Star {
        #[arg(long)]
        leaves: usize,
        #[command(flatten)]
        out: GenerateOut,
    },
}

fn load_csr(path: &Path, format: Option<GraphFormat>) -> Result<CsrGraph, BenchError> {
    let el = load_graph(path, format)?;
    Ok(build_csr(&el, true)?)
}

fn output<'a>(
    path: Option<&Path>,
    stdout: &'a mut dyn Write,
) -> Result<Box<dyn Write + 'a>, BenchError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| BenchError::io(p, e))?,
        )),
        None => Box::new(stdout),
    })
}

fn write_json(
    value: &impl Serialize,
    path: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), BenchError> {
    let label = path.unwrap_or(Path::new("<stdout>")).to_path_buf();
    let mut out = output(path, stdout)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
        .and_then(|_| out.flush())
        .map_err(|e| BenchError::io(label, e))
}

fn cmd_detect(args: &DetectArgs, stdout: &mut dyn Write) -> Result<(), BenchError> {
    let graph = load_csr(&args.input, args.format)?;
    let config = args.config.to_config();
    let det = detect(&graph, &config)?;
    if let Some(path) = &args.out_membership {
        write_membership(path, &det.labels)?;
    }
    let format = args
        .format
        .unwrap_or_else(|| GraphFormat::from_path(&args.input));
    let info = GraphInfo::new(
        &graph,
        Some(args.input.display().to_string()),
        Some(format.name().to_string()),
    );
    let report = RunReport::new(info, &graph, &config, &det);
    write_json(&report, args.out_report.as_deref(), stdout)
}

fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<(), BenchError> {
    let grid = parse_grid(args.dimension, args.grid.as_deref()).map_err(BenchError::Usage)?;
    let graphs = args
        .input
        .iter()
        .map(|p| Ok((p.display().to_string(), load_csr(p, args.format)?)))
        .collect::<Result<Vec<_>, BenchError>>()?;
    let base = args.config.to_config();
    let out = output(args.out.as_deref(), stdout)?;
    Sweep {
        graphs: &graphs,
        dimension: args.dimension,
        grid: &grid,
        base: &base,
        reps: args.reps,
    }
    .write_csv(out)
}

#[derive(Serialize)]
struct QualityReport {
    modularity: f64,
    communities: usize,
    size_histogram: std::collections::BTreeMap<usize, usize>,
    community_weights: Vec<CommunityRow>,
}

#[derive(Serialize)]
struct CommunityRow {
    label: u32,
    size: usize,
    internal_weight: f64,
    total_weight: f64,
}

fn cmd_quality(args: &QualityArgs, stdout: &mut dyn Write) -> Result<(), BenchError> {
    let graph = load_csr(&args.input, args.format)?;
    let labels = read_membership(&args.membership, graph.n())?;
    let q = modularity(&graph, &labels)?;
    let stats = community_stats(&graph, &labels)?;
    let report = QualityReport {
        modularity: q,
        communities: stats.count,
        size_histogram: stats.size_histogram,
        community_weights: stats
            .communities
            .into_iter()
            .map(|c| CommunityRow {
                label: c.label,
                size: c.size,
                internal_weight: c.internal_weight,
                total_weight: c.total_weight,
            })
            .collect(),
    };
    write_json(&report, None, stdout)
}

fn cmd_generate(cmd: &GenerateCommand) -> Result<(), BenchError> {
    let (generated, out): (Generated, &GenerateOut) = match cmd {
        GenerateCommand::Planted {
            communities,
            size,
            p_in,
            p_out,
            seed,
            out,
        } => {
            for p in [p_in, p_out] {
                if !(0.0..=1.0).contains(p) {
                    return Err(BenchError::Usage(format!("probability {p} outside [0, 1]")));
                }
            }
            let pp = PlantedPartition {
                communities: *communities,
                size: *size,
                p_in: *p_in,
                p_out: *p_out,
            };
            (pp.generate(*seed), out)
        }
        GenerateCommand::RingOfCliques {
            cliques,
            clique_size,
            out,
        } => (ring_of_cliques(*cliques, *clique_size), out),
        GenerateCommand::Star { leaves, out } => (star(*leaves), out),
    };
    write_graph(&out.out, &generated.edges)?;
    if let Some(path) = &out.truth {
        write_membership(path, &generated.truth)?;
    }
    Ok(())
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), BenchError> {
    match &cli.command {
        Command::Detect(a) => cmd_detect(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Quality(a) => cmd_quality(a, stdout),
        Command::Generate(g) => cmd_generate(g),
    }
}

/// Parses `args` and runs the command. Returns the process exit status.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
