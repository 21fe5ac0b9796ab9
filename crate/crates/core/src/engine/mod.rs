// SPDX-License-Identifier: Apache-2.0

//! Asynchronous label propagation.
//!
//! Every vertex starts in its own community. Each pass visits the
//! unprocessed vertices, tallies neighbour labels by edge weight in the
//! vertex's hashtable and adopts the heaviest label. A vertex that changes
//! re-arms its neighbours; everyone else stays asleep (vertex pruning).
//!
//! Two mitigations break label swaps between symmetric vertices:
//!
//! * pick-less passes only accept a strictly smaller label;
//! * cross-check reverts a change to `c` unless vertex `c` itself carries
//!   `c`, and only on the larger-id side of a swap.

mod config;
mod cross_check;
mod schedule;

pub use config::{ExecMode, LpaConfig, Precision};
pub use cross_check::cross_check;
pub use schedule::partition_by_degree;

use alloc::vec::Vec;
use core::ops::Deref;
use core::sync::atomic::{fence, AtomicBool, AtomicU32, AtomicU8, AtomicUsize, Ordering};

use crate::exec::{Executor, SequentialExecutor};
use crate::graph::CsrGraph;
use crate::hashtable::{
    better_entry, geometry_for, ArenaAllocError, HtArena, HtGeometry, HtValue, ProbeFailed,
};
use crate::VertexId;

const UNPROCESSED: u8 = 0;
const PROCESSED: u8 = 1;
const NO_LABEL: VertexId = VertexId::MAX;

/// Vertices per task on the scalar path.
const VERTEX_GRAIN: usize = 256;
/// Neighbours or slots per team member on the team path.
const TEAM_GRAIN: usize = 128;

/// Community membership: `labels[i]` is the community of vertex `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels(Vec<VertexId>);

impl Labels {
    pub fn identity(n: usize) -> Self {
        Labels((0..n as VertexId).collect())
    }

    pub fn into_inner(self) -> Vec<VertexId> {
        self.0
    }

    /// Number of distinct labels.
    pub fn community_count(&self) -> usize {
        let mut seen = alloc::vec![false; self.0.len()];
        let mut extra: Vec<VertexId> = Vec::new();
        let mut count = 0;
        for &c in &self.0 {
            match seen.get_mut(c as usize) {
                Some(s) if !*s => {
                    *s = true;
                    count += 1;
                }
                Some(_) => {}
                None => extra.push(c),
            }
        }
        extra.sort_unstable();
        extra.dedup();
        count + extra.len()
    }
}

impl From<Vec<VertexId>> for Labels {
    fn from(v: Vec<VertexId>) -> Self {
        Labels(v)
    }
}

impl Deref for Labels {
    type Target = [VertexId];

    fn deref(&self) -> &[VertexId] {
        &self.0
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    /// Passes performed.
    pub iterations: usize,
    /// Vertices that moved in each pass, cross-check reverts included.
    pub delta_n_per_iter: Vec<usize>,
    pub converged: bool,
    /// Wall time of the detection in seconds. The engine has no clock; the
    /// caller fills this in.
    pub elapsed: f64,
    pub pl_iterations: usize,
    pub cc_iterations: usize,
    pub cc_reverts: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpaError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error(transparent)]
    Alloc(#[from] ArenaAllocError),
    #[error("internal invariant violated: {0}")]
    Probe(#[from] ProbeFailed),
}

/// First probe failure seen by any worker.
#[derive(Default)]
struct FailureSlot {
    set: AtomicBool,
    key: AtomicU32,
    p1: AtomicUsize,
}

impl FailureSlot {
    fn record(&self, e: ProbeFailed) {
        if !self.set.swap(true, Ordering::AcqRel) {
            self.key.store(e.key, Ordering::Relaxed);
            self.p1.store(e.p1, Ordering::Relaxed);
        }
    }

    fn take(&self) -> Result<(), ProbeFailed> {
        if self.set.load(Ordering::Acquire) {
            return Err(ProbeFailed {
                key: self.key.load(Ordering::Relaxed),
                p1: self.p1.load(Ordering::Relaxed),
            });
        }
        Ok(())
    }
}

/// Working state for repeated detection on one graph: labels, processed
/// flags, the hashtable arena and the degree partition.
pub struct Detector<'g, V: HtValue> {
    graph: &'g CsrGraph,
    config: LpaConfig,
    arena: HtArena<V>,
    labels: Vec<AtomicU32>,
    flags: Vec<AtomicU8>,
    low: Vec<VertexId>,
    high: Vec<VertexId>,
    prev: Vec<VertexId>,
    proposals: Vec<VertexId>,
}

impl<'g, V: HtValue> Detector<'g, V> {
    /// Validates the configuration and allocates everything a run needs.
    pub fn new(graph: &'g CsrGraph, config: LpaConfig) -> Result<Self, LpaError> {
        config.validate().map_err(LpaError::InvalidConfig)?;
        if graph.n() == 0 {
            return Err(LpaError::EmptyGraph);
        }
        let arena = HtArena::for_graph(graph)?;
        let n = graph.n();
        let (low, high) = partition_by_degree(graph, config.switch_degree);
        let proposals = match config.exec_mode {
            ExecMode::Synchronous => alloc::vec![NO_LABEL; n],
            _ => Vec::new(),
        };
        let mut det = Detector {
            graph,
            config,
            arena,
            labels: (0..n as VertexId).map(AtomicU32::new).collect(),
            flags: (0..n).map(|_| AtomicU8::new(UNPROCESSED)).collect(),
            low,
            high,
            prev: Vec::new(),
            proposals,
        };
        det.reset();
        Ok(det)
    }

    pub fn config(&self) -> &LpaConfig {
        &self.config
    }

    pub fn graph(&self) -> &'g CsrGraph {
        self.graph
    }

    /// Back to identity labels with every non-isolated vertex unprocessed.
    pub fn reset(&mut self) {
        for (i, c) in self.labels.iter().enumerate() {
            c.store(i as VertexId, Ordering::Relaxed);
        }
        self.mark_all_unprocessed();
    }

    /// Marks every vertex with at least one edge as unprocessed. Isolated
    /// vertices stay processed; they have nothing to scan.
    pub fn mark_all_unprocessed(&mut self) {
        for (i, f) in self.flags.iter().enumerate() {
            let state = if self.graph.degree(i as VertexId) == 0 {
                PROCESSED
            } else {
                UNPROCESSED
            };
            f.store(state, Ordering::Relaxed);
        }
    }

    /// Replaces the current labels. Every label must be below `n`.
    pub fn set_labels(&mut self, labels: &[VertexId]) {
        assert_eq!(labels.len(), self.labels.len());
        for (dst, &c) in self.labels.iter().zip(labels) {
            assert!((c as usize) < labels.len(), "label {c} out of range");
            dst.store(c, Ordering::Relaxed);
        }
    }

    pub fn labels(&self) -> Labels {
        Labels(
            self.labels
                .iter()
                .map(|c| c.load(Ordering::Relaxed))
                .collect(),
        )
    }

    /// Number of vertices currently marked unprocessed.
    pub fn pending(&self) -> usize {
        self.flags
            .iter()
            .filter(|f| f.load(Ordering::Relaxed) == UNPROCESSED)
            .count()
    }

    /// Runs label propagation from identity labels.
    pub fn run<E: Executor>(&mut self, exec: &E) -> Result<(Labels, RunStats), LpaError> {
        self.reset();
        self.resume(exec)
    }

    /// Runs label propagation from the current labels and flags.
    pub fn resume<E: Executor>(&mut self, exec: &E) -> Result<(Labels, RunStats), LpaError> {
        let n = self.graph.n();
        let mut stats = RunStats::default();
        for l in 0..self.config.max_iterations {
            let pick_less = self.config.is_pick_less(l);
            let check = self.config.is_cross_check(l);
            if check {
                self.snapshot_prev();
            }
            // Reverted moves still count: a vertex the cross-check keeps
            // sending back has not settled.
            let delta_n = self.step(exec, pick_less)?;
            if check {
                let reverted = self.cross_check_prev(exec);
                stats.cc_iterations += 1;
                stats.cc_reverts += reverted;
            }
            stats.iterations = l + 1;
            stats.pl_iterations += pick_less as usize;
            stats.delta_n_per_iter.push(delta_n);
            // With no change nothing was re-armed, so every later pass is
            // empty. This also ends runs where every pass is pick-less.
            if delta_n == 0 || (!pick_less && (delta_n as f64) / (n as f64) < self.config.tolerance)
            {
                stats.converged = true;
                break;
            }
        }
        Ok((self.labels(), stats))
    }

    /// One propagation pass over the unprocessed vertices. Returns the number
    /// of vertices whose label changed.
    pub fn step<E: Executor>(&mut self, exec: &E, pick_less: bool) -> Result<usize, LpaError> {
        if !self.config.pruning {
            self.mark_all_unprocessed();
        }
        let changed = match self.config.exec_mode {
            ExecMode::Sequential => self.step_in_order(pick_less)?,
            ExecMode::Parallel => self.step_parallel(exec, pick_less)?,
            ExecMode::Synchronous => self.step_synchronous(pick_less)?,
        };
        Ok(changed)
    }

    fn step_in_order(&self, pick_less: bool) -> Result<usize, ProbeFailed> {
        let seq = SequentialExecutor;
        let mut changed = 0;
        for i in 0..self.graph.n() as VertexId {
            if !self.claim(i) {
                continue;
            }
            let best = if self.is_high(i) {
                self.best_label_team(&seq, i)?
            } else {
                self.best_label_scalar(i)?
            };
            if let Some(c) = best {
                changed += self.apply(&seq, i, c, pick_less) as usize;
            }
        }
        Ok(changed)
    }

    fn step_parallel<E: Executor>(&self, exec: &E, pick_less: bool) -> Result<usize, ProbeFailed> {
        let delta_n = AtomicUsize::new(0);
        let failure = FailureSlot::default();
        let seq = SequentialExecutor;

        exec.for_each(self.low.len(), VERTEX_GRAIN, |range| {
            let mut local = 0;
            for &i in &self.low[range] {
                if !self.claim(i) {
                    continue;
                }
                match self.best_label_scalar(i) {
                    Ok(Some(c)) => local += self.apply(&seq, i, c, pick_less) as usize,
                    Ok(None) => {}
                    Err(e) => failure.record(e),
                }
            }
            delta_n.fetch_add(local, Ordering::Relaxed);
        });
        failure.take()?;

        exec.for_each(self.high.len(), 1, |range| {
            let mut local = 0;
            for &i in &self.high[range] {
                if !self.claim(i) {
                    continue;
                }
                match self.best_label_team(exec, i) {
                    Ok(Some(c)) => local += self.apply(exec, i, c, pick_less) as usize,
                    Ok(None) => {}
                    Err(e) => failure.record(e),
                }
            }
            delta_n.fetch_add(local, Ordering::Relaxed);
        });
        failure.take()?;

        Ok(delta_n.into_inner())
    }

    fn step_synchronous(&mut self, pick_less: bool) -> Result<usize, ProbeFailed> {
        let seq = SequentialExecutor;
        let mut proposals = core::mem::take(&mut self.proposals);
        proposals.resize(self.graph.n(), NO_LABEL);
        for i in 0..self.graph.n() as VertexId {
            proposals[i as usize] = NO_LABEL;
            if !self.claim(i) {
                continue;
            }
            let best = if self.is_high(i) {
                self.best_label_team(&seq, i)?
            } else {
                self.best_label_scalar(i)?
            };
            if let Some(c) = best {
                proposals[i as usize] = c;
            }
        }
        let mut changed = 0;
        for (i, &c) in proposals.iter().enumerate() {
            if c != NO_LABEL {
                changed += self.apply(&seq, i as VertexId, c, pick_less) as usize;
            }
        }
        self.proposals = proposals;
        Ok(changed)
    }

    #[inline]
    fn is_high(&self, i: VertexId) -> bool {
        self.graph.degree(i) >= self.config.switch_degree
    }

    /// Marks `i` processed; true if it was unprocessed.
    #[inline]
    fn claim(&self, i: VertexId) -> bool {
        let was = self.flags[i as usize].swap(PROCESSED, Ordering::Relaxed);
        if was != UNPROCESSED {
            return false;
        }
        // Pairs with the fence in `apply`: either this scan sees a
        // neighbour's new label or the neighbour's re-arm lands after the
        // swap above.
        fence(Ordering::SeqCst);
        true
    }

    fn geometry(&self, i: VertexId) -> HtGeometry {
        geometry_for(self.graph, i).expect("claimed vertices have edges")
    }

    /// Heaviest neighbour label of `i`, with one worker owning the table.
    fn best_label_scalar(&self, i: VertexId) -> Result<Option<VertexId>, ProbeFailed> {
        let geo = self.geometry(i);
        self.arena.clear(&geo);
        let (targets, weights) = self.graph.neighbors(i);
        for (&j, &w) in targets.iter().zip(weights) {
            if j == i {
                continue;
            }
            let c = self.labels[j as usize].load(Ordering::Relaxed);
            self.arena
                .accumulate(&geo, self.config.strategy, c, V::from_weight(w), false)?;
        }
        Ok(self.arena.max_key(&geo).map(|(c, _)| c))
    }

    /// Heaviest neighbour label of `i`, with the clear, the neighbour scan
    /// and the max-reduce each split over `exec`.
    fn best_label_team<E: Executor>(
        &self,
        exec: &E,
        i: VertexId,
    ) -> Result<Option<VertexId>, ProbeFailed> {
        let geo = self.geometry(i);
        exec.for_each(geo.p1, TEAM_GRAIN, |slots| {
            self.arena.clear_range(&geo, slots)
        });
        let (targets, weights) = self.graph.neighbors(i);
        let strategy = self.config.strategy;
        exec.map_reduce(
            targets.len(),
            TEAM_GRAIN,
            Ok(()),
            |range| {
                for (&j, &w) in targets[range.clone()].iter().zip(&weights[range]) {
                    if j == i {
                        continue;
                    }
                    let c = self.labels[j as usize].load(Ordering::Relaxed);
                    self.arena
                        .accumulate(&geo, strategy, c, V::from_weight(w), true)?;
                }
                Ok(())
            },
            |a, b| a.and(b),
        )?;
        let best = exec.map_reduce(
            geo.p1,
            TEAM_GRAIN,
            None,
            |slots| self.arena.max_key_in(&geo, slots),
            better_entry,
        );
        Ok(best.map(|(c, _)| c))
    }

    /// Moves `i` to `c` if allowed and re-arms its neighbours.
    fn apply<E: Executor>(&self, exec: &E, i: VertexId, c: VertexId, pick_less: bool) -> bool {
        let cur = self.labels[i as usize].load(Ordering::Relaxed);
        if c == cur || (pick_less && c > cur) {
            return false;
        }
        self.labels[i as usize].store(c, Ordering::Relaxed);
        fence(Ordering::SeqCst);
        let targets = self.graph.neighbors(i).0;
        if targets.len() < TEAM_GRAIN {
            self.rearm(targets);
        } else {
            exec.for_each(targets.len(), TEAM_GRAIN, |r| self.rearm(&targets[r]));
        }
        true
    }

    #[inline]
    fn rearm(&self, targets: &[VertexId]) {
        for &j in targets {
            self.flags[j as usize].store(UNPROCESSED, Ordering::Relaxed);
        }
    }

    fn snapshot_prev(&mut self) {
        self.prev.clear();
        self.prev
            .extend(self.labels.iter().map(|c| c.load(Ordering::Relaxed)));
    }

    fn cross_check_prev<E: Executor>(&self, exec: &E) -> usize {
        let reverted = |i: VertexId| {
            // Re-examine the reverted vertex; its neighbours may have moved.
            self.flags[i as usize].store(UNPROCESSED, Ordering::Relaxed);
        };
        match self.config.exec_mode {
            ExecMode::Parallel => {
                cross_check::revert_bad_moves(exec, &self.labels, &self.prev, reverted)
            }
            _ => cross_check::revert_bad_moves(
                &SequentialExecutor,
                &self.labels,
                &self.prev,
                reverted,
            ),
        }
    }
}

/// A [`Detector`] of either value precision.
pub enum Prepared<'g> {
    F32(Detector<'g, f32>),
    F64(Detector<'g, f64>),
}

impl<'g> Prepared<'g> {
    pub fn new(graph: &'g CsrGraph, config: LpaConfig) -> Result<Self, LpaError> {
        Ok(match config.precision {
            Precision::F32 => Prepared::F32(Detector::new(graph, config)?),
            Precision::F64 => Prepared::F64(Detector::new(graph, config)?),
        })
    }

    pub fn run<E: Executor>(&mut self, exec: &E) -> Result<(Labels, RunStats), LpaError> {
        match self {
            Prepared::F32(d) => d.run(exec),
            Prepared::F64(d) => d.run(exec),
        }
    }

    pub fn config(&self) -> &LpaConfig {
        match self {
            Prepared::F32(d) => d.config(),
            Prepared::F64(d) => d.config(),
        }
    }
}

/// Label propagation on `exec`.
pub fn lpa_with<E: Executor>(
    graph: &CsrGraph,
    config: &LpaConfig,
    exec: &E,
) -> Result<(Labels, RunStats), LpaError> {
    Prepared::new(graph, config.clone())?.run(exec)
}

/// Label propagation on the calling thread.
pub fn lpa(graph: &CsrGraph, config: &LpaConfig) -> Result<(Labels, RunStats), LpaError> {
    lpa_with(graph, config, &SequentialExecutor)
}
