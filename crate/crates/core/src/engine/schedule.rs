// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;

use crate::graph::CsrGraph;
use crate::VertexId;

/// Splits vertices into those with degree below `switch_degree` (scalar
/// path) and the rest (team path). Both lists are in ascending id order.
pub fn partition_by_degree(
    graph: &CsrGraph,
    switch_degree: usize,
) -> (Vec<VertexId>, Vec<VertexId>) {
    (0..graph.n() as VertexId).partition(|&i| graph.degree(i) < switch_degree)
}
