// SPDX-License-Identifier: Apache-2.0

//! Label propagation community detection over CSR graphs.
//!
//! The crate is `no_std` (it needs `alloc`). It holds the algorithmic parts:
//!
//! * [`graph`]: edge lists and the immutable [`CsrGraph`].
//! * [`hashtable`]: per-vertex open-addressing tables carved out of one
//!   flat arena, addressed by CSR offsets.
//! * [`engine`]: the asynchronous LPA loop with pick-less and cross-check
//!   swap mitigation and degree-partitioned scheduling.
//! * [`quality`]: modularity, delta-modularity and community statistics.
//!
//! Parallelism is pluggable through [`Executor`]; this crate only ships the
//! single-threaded [`SequentialExecutor`]. IO, thread pools and the CLI live
//! in the `lpa-bench` companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod engine;
pub mod exec;
pub mod graph;
pub mod hashtable;
pub mod quality;

pub use engine::{
    cross_check, lpa, lpa_with, partition_by_degree, Detector, ExecMode, Labels, LpaConfig,
    LpaError, Precision, Prepared, RunStats,
};
pub use exec::{Executor, SequentialExecutor};
pub use graph::{build_csr, CsrGraph, Edge, EdgeList, GraphError};
pub use hashtable::{HtArena, HtGeometry, HtValue, ProbeStrategy};
pub use quality::{community_stats, delta_modularity, modularity, CommunityStats, QualityError};

/// Vertex identifier. Labels share this type: a label is always the id of
/// some vertex.
pub type VertexId = u32;
