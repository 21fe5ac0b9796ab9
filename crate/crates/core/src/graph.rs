// SPDX-License-Identifier: Apache-2.0

//! Edge lists and the compressed sparse row graph.

use alloc::vec;
use alloc::vec::Vec;

use crate::VertexId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub w: f64,
}

impl Edge {
    pub const fn new(u: VertexId, v: VertexId, w: f64) -> Self {
        Edge { u, v, w }
    }

    pub const fn unit(u: VertexId, v: VertexId) -> Self {
        Edge { u, v, w: 1.0 }
    }
}

/// Raw edges as read from a file or produced by a generator.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeList {
    pub edges: Vec<Edge>,
    /// Vertex count stated by the source, if any. When absent the count is
    /// one past the largest id seen.
    pub n_declared: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("edge {index} ({u}, {v}) has weight {w}; weights must be finite and positive")]
    InvalidWeight {
        index: usize,
        u: VertexId,
        v: VertexId,
        w: f64,
    },
    #[error("vertex id {id} is out of range for {n} vertices")]
    VertexOutOfRange { id: VertexId, n: usize },
    #[error("{n} vertices do not fit in 32-bit vertex ids")]
    TooManyVertices { n: usize },
    #[error("edge ({u}, {v}) has no reverse edge of equal weight")]
    NotSymmetric { u: VertexId, v: VertexId },
}

impl EdgeList {
    pub fn new(edges: Vec<Edge>, n_declared: Option<usize>) -> Self {
        EdgeList { edges, n_declared }
    }

    /// Builds an unweighted edge list.
    pub fn from_pairs(pairs: &[(VertexId, VertexId)], n_declared: Option<usize>) -> Self {
        let edges = pairs.iter().map(|&(u, v)| Edge::unit(u, v)).collect();
        EdgeList { edges, n_declared }
    }

    /// Vertex count: the declared one, else one past the largest id.
    pub fn vertex_count(&self) -> usize {
        self.n_declared.unwrap_or_else(|| {
            self.edges
                .iter()
                .map(|e| e.u.max(e.v) as usize + 1)
                .max()
                .unwrap_or(0)
        })
    }

    /// Checks weights and id ranges.
    pub fn validate(&self) -> Result<usize, GraphError> {
        let n = self.vertex_count();
        if n > VertexId::MAX as usize {
            return Err(GraphError::TooManyVertices { n });
        }
        for (index, e) in self.edges.iter().enumerate() {
            if !(e.w.is_finite() && e.w > 0.0 && (e.w as f32) > 0.0) {
                return Err(GraphError::InvalidWeight {
                    index,
                    u: e.u,
                    v: e.v,
                    w: e.w,
                });
            }
            for id in [e.u, e.v] {
                if id as usize >= n {
                    return Err(GraphError::VertexOutOfRange { id, n });
                }
            }
        }
        Ok(n)
    }
}

/// Immutable weighted undirected graph. Every undirected edge `{i, j}` with
/// `i != j` is stored in both rows; a self-loop is stored once. Rows are
/// sorted by target.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrGraph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    weights: Vec<f32>,
    total_weight_2m: f64,
}

impl CsrGraph {
    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        CsrGraph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            weights: Vec::new(),
            total_weight_2m: 0.0,
        }
    }

    fn from_sorted_arcs(n: usize, arcs: &[(VertexId, VertexId, f32)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(u, _, _) in arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0; arcs.len()];
        let mut weights = vec![0.0; arcs.len()];
        for &(u, v, w) in arcs {
            let slot = &mut cursor[u as usize];
            targets[*slot] = v;
            weights[*slot] = w;
            *slot += 1;
        }
        let total_weight_2m = weights.iter().map(|&w| w as f64).sum();
        CsrGraph {
            offsets,
            targets,
            weights,
            total_weight_2m,
        }
    }

    /// Number of vertices, N.
    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of stored (directed) edges.
    #[inline]
    pub fn m2(&self) -> usize {
        self.targets.len()
    }

    /// Sum of all stored edge weights, i.e. 2m.
    #[inline]
    pub fn total_weight_2m(&self) -> f64 {
        self.total_weight_2m
    }

    #[inline]
    pub fn offset(&self, i: VertexId) -> usize {
        self.offsets[i as usize]
    }

    #[inline]
    pub fn degree(&self, i: VertexId) -> usize {
        let i = i as usize;
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Weighted degree K_i.
    pub fn weighted_degree(&self, i: VertexId) -> f64 {
        self.neighbors(i).1.iter().map(|&w| w as f64).sum()
    }

    /// Targets and weights of row `i`.
    #[inline]
    pub fn neighbors(&self, i: VertexId) -> (&[VertexId], &[f32]) {
        let i = i as usize;
        let range = self.offsets[i]..self.offsets[i + 1];
        (&self.targets[range.clone()], &self.weights[range])
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn targets(&self) -> &[VertexId] {
        &self.targets
    }

    pub fn weights(&self) -> &[f32] {
        &self.weights
    }

    /// Iterates stored arcs `(i, j, w)` row by row.
    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId, f32)> + '_ {
        (0..self.n() as VertexId).flat_map(move |i| {
            let (t, w) = self.neighbors(i);
            t.iter().zip(w).map(move |(&j, &w)| (i, j, w))
        })
    }

    /// Each undirected edge once, as `u <= v`.
    pub fn to_edge_list(&self) -> EdgeList {
        let edges = self
            .arcs()
            .filter(|&(i, j, _)| i <= j)
            .map(|(i, j, w)| Edge::new(i, j, w as f64))
            .collect();
        EdgeList::new(edges, Some(self.n()))
    }
}

/// Builds a CSR graph.
///
/// With `symmetrize`, every input edge is treated as undirected: for each
/// unordered pair the weights of same-direction duplicates are summed, and
/// when both directions were given the `u < v` direction is kept. Without
/// `symmetrize` the input must already list both directions with equal
/// weights (same-direction duplicates are still summed).
pub fn build_csr(el: &EdgeList, symmetrize: bool) -> Result<CsrGraph, GraphError> {
    let n = el.validate()?;
    let arcs = if symmetrize {
        symmetric_arcs(el)
    } else {
        directed_arcs(el)?
    };
    Ok(CsrGraph::from_sorted_arcs(n, &arcs))
}

fn symmetric_arcs(el: &EdgeList) -> Vec<(VertexId, VertexId, f32)> {
    // (lo, hi, given as lo -> hi, w)
    let mut pairs: Vec<(VertexId, VertexId, bool, f64)> = el
        .edges
        .iter()
        .map(|e| (e.u.min(e.v), e.u.max(e.v), e.u <= e.v, e.w))
        .collect();
    pairs.sort_unstable_by_key(|&(a, b, fwd, _)| (a, b, !fwd));

    let mut arcs = Vec::with_capacity(pairs.len() * 2);
    let mut rest = pairs.as_slice();
    while let Some(&(a, b, _, _)) = rest.first() {
        let run = rest.iter().take_while(|p| p.0 == a && p.1 == b).count();
        let (group, tail) = rest.split_at(run);
        rest = tail;
        let forward: f64 = group.iter().filter(|p| p.2).map(|p| p.3).sum();
        let w = if forward > 0.0 {
            forward
        } else {
            group.iter().map(|p| p.3).sum()
        } as f32;
        arcs.push((a, b, w));
        if a != b {
            arcs.push((b, a, w));
        }
    }
    arcs.sort_unstable_by_key(|&(u, v, _)| (u, v));
    arcs
}

fn directed_arcs(el: &EdgeList) -> Result<Vec<(VertexId, VertexId, f32)>, GraphError> {
    let mut sorted: Vec<(VertexId, VertexId, f64)> =
        el.edges.iter().map(|e| (e.u, e.v, e.w)).collect();
    sorted.sort_unstable_by_key(|&(u, v, _)| (u, v));
    let mut arcs: Vec<(VertexId, VertexId, f32)> = Vec::with_capacity(sorted.len());
    let mut acc: Option<(VertexId, VertexId, f64)> = None;
    for (u, v, w) in sorted {
        match acc {
            Some((au, av, aw)) if au == u && av == v => acc = Some((u, v, aw + w)),
            _ => {
                if let Some((au, av, aw)) = acc {
                    arcs.push((au, av, aw as f32));
                }
                acc = Some((u, v, w));
            }
        }
    }
    if let Some((au, av, aw)) = acc {
        arcs.push((au, av, aw as f32));
    }
    for &(u, v, w) in &arcs {
        let reverse = arcs.binary_search_by_key(&(v, u), |&(x, y, _)| (x, y));
        match reverse {
            Ok(k) if arcs[k].2 == w => {}
            _ => return Err(GraphError::NotSymmetric { u, v }),
        }
    }
    Ok(arcs)
}
