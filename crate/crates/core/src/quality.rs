// SPDX-License-Identifier: Apache-2.0

//! Partition quality: modularity, delta-modularity and per-community totals.
//!
//! All sums run in `f64` whatever the hashtable precision was. With `2m` the
//! sum of stored arc weights, `σ_c` the weight of arcs with both ends in `c`
//! and `Σ_c` the weight of arcs leaving members of `c`:
//!
//! ```text
//! Q = Σ_c [ σ_c / 2m - (Σ_c / 2m)² ]
//! ```
//!
//! A self-loop is stored once, so it contributes its weight once to both
//! `σ_c` and `Σ_c`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::CsrGraph;
use crate::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum QualityError {
    #[error("membership has {got} entries but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("modularity is undefined for a graph without edge weight")]
    NoEdges,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Community {
    pub label: VertexId,
    pub size: usize,
    /// σ_c
    pub internal_weight: f64,
    /// Σ_c
    pub total_weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommunityStats {
    /// |Γ|
    pub count: usize,
    /// community size -> number of communities of that size
    pub size_histogram: BTreeMap<usize, usize>,
    /// One entry per community, ordered by label.
    pub communities: Vec<Community>,
}

/// Dense community index per vertex, plus the label of each index in
/// ascending label order.
fn compact(labels: &[VertexId]) -> (Vec<usize>, Vec<VertexId>) {
    let mut distinct: Vec<VertexId> = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let index = if distinct
        .last()
        .is_some_and(|&c| (c as usize) < labels.len())
    {
        let mut slot = vec![usize::MAX; labels.len()];
        for (k, &c) in distinct.iter().enumerate() {
            slot[c as usize] = k;
        }
        labels.iter().map(|&c| slot[c as usize]).collect()
    } else {
        labels
            .iter()
            .map(|c| distinct.binary_search(c).expect("label present"))
            .collect()
    };
    (index, distinct)
}

fn check_len(graph: &CsrGraph, labels: &[VertexId]) -> Result<(), QualityError> {
    if labels.len() != graph.n() {
        return Err(QualityError::LengthMismatch {
            expected: graph.n(),
            got: labels.len(),
        });
    }
    Ok(())
}

fn community_weights(graph: &CsrGraph, index: &[usize], count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut internal = vec![0.0; count];
    let mut total = vec![0.0; count];
    for (i, j, w) in graph.arcs() {
        let ci = index[i as usize];
        let w = w as f64;
        total[ci] += w;
        if ci == index[j as usize] {
            internal[ci] += w;
        }
    }
    (internal, total)
}

/// Modularity of `labels` on `graph`, in [-0.5, 1].
pub fn modularity(graph: &CsrGraph, labels: &[VertexId]) -> Result<f64, QualityError> {
    check_len(graph, labels)?;
    let two_m = graph.total_weight_2m();
    if two_m <= 0.0 {
        return Err(QualityError::NoEdges);
    }
    let (index, distinct) = compact(labels);
    let (internal, total) = community_weights(graph, &index, distinct.len());
    Ok(internal
        .iter()
        .zip(&total)
        .map(|(&s, &t)| s / two_m - (t / two_m) * (t / two_m))
        .sum())
}

/// Modularity change from moving a vertex out of community `d` into `c`.
///
/// `m` is the undirected total weight (half of [`CsrGraph::total_weight_2m`]),
/// `k_i` the vertex's weighted degree, `k_i_to_c` / `k_i_to_d` its edge
/// weight into each community (itself excluded), and `sigma_c` / `sigma_d`
/// the community totals Σ with the vertex still counted in `d`. To score
/// staying put, pass `d`'s figures for `c` with `sigma_c = sigma_d - k_i`.
pub fn delta_modularity(
    m: f64,
    k_i: f64,
    k_i_to_c: f64,
    k_i_to_d: f64,
    sigma_c: f64,
    sigma_d: f64,
) -> f64 {
    (k_i_to_c - k_i_to_d) / m - k_i / (2.0 * m * m) * (k_i + sigma_c - sigma_d)
}

pub fn community_stats(
    graph: &CsrGraph,
    labels: &[VertexId],
) -> Result<CommunityStats, QualityError> {
    check_len(graph, labels)?;
    let (index, distinct) = compact(labels);
    let (internal, total) = community_weights(graph, &index, distinct.len());
    let mut sizes = vec![0usize; distinct.len()];
    for &k in &index {
        sizes[k] += 1;
    }
    let mut size_histogram = BTreeMap::new();
    for &s in &sizes {
        *size_histogram.entry(s).or_insert(0) += 1;
    }
    let communities = distinct
        .iter()
        .enumerate()
        .map(|(k, &label)| Community {
            label,
            size: sizes[k],
            internal_weight: internal[k],
            total_weight: total[k],
        })
        .collect();
    Ok(CommunityStats {
        count: distinct.len(),
        size_histogram,
        communities,
    })
}
