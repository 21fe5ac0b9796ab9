// SPDX-License-Identifier: Apache-2.0

//! Synthetic graphs with known community structure.

use lpa_core::{Edge, EdgeList, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Planted partition: `communities` blocks of `size` vertices. Each pair
/// inside a block is an edge with probability `p_in`, each pair across
/// blocks with probability `p_out`. Vertex ids are a seeded random
/// permutation, so an id carries no information about its block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedPartition {
    pub communities: usize,
    pub size: usize,
    pub p_in: f64,
    pub p_out: f64,
}

/// A generated graph and the community each vertex was planted in.
#[derive(Debug, Clone)]
pub struct Generated {
    pub edges: EdgeList,
    pub truth: Vec<VertexId>,
}

/// Calls `f` with the indices in `0..count` that succeed a Bernoulli(`p`)
/// trial, skipping ahead geometrically instead of drawing per index.
fn bernoulli_hits(count: u64, p: f64, rng: &mut impl Rng, mut f: impl FnMut(u64)) {
    if count == 0 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        (0..count).for_each(f);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut idx: u64 = 0;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
        let skip = (u.ln() / log_q).floor();
        if skip >= (count - idx) as f64 {
            return;
        }
        idx += skip as u64;
        f(idx);
        idx += 1;
        if idx >= count {
            return;
        }
    }
}

impl PlantedPartition {
    pub fn vertices(&self) -> usize {
        self.communities * self.size
    }

    pub fn generate(&self, seed: u64) -> Generated {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = self.size as u64;
        let mut edges = Vec::new();
        for b in 0..self.communities as u64 {
            let base = b * s;
            for i in 0..s {
                bernoulli_hits(s - i - 1, self.p_in, &mut rng, |k| {
                    edges.push(Edge::unit(
                        (base + i) as VertexId,
                        (base + i + 1 + k) as VertexId,
                    ));
                });
            }
        }
        for a in 0..self.communities as u64 {
            for b in a + 1..self.communities as u64 {
                bernoulli_hits(s * s, self.p_out, &mut rng, |k| {
                    let u = a * s + k / s;
                    let v = b * s + k % s;
                    edges.push(Edge::unit(u as VertexId, v as VertexId));
                });
            }
        }
        let mut perm: Vec<VertexId> = (0..self.vertices() as VertexId).collect();
        perm.shuffle(&mut rng);
        for e in &mut edges {
            e.u = perm[e.u as usize];
            e.v = perm[e.v as usize];
        }
        // each block is labelled by its smallest relabelled member
        let mut truth = vec![0; self.vertices()];
        for block in perm.chunks(self.size.max(1)) {
            let label = block.iter().copied().min().unwrap_or(0);
            for &v in block {
                truth[v as usize] = label;
            }
        }
        Generated {
            edges: EdgeList::new(edges, Some(self.vertices())),
            truth,
        }
    }
}

/// `cliques` complete graphs of `clique_size` vertices, each joined to the
/// next by one edge, the last back to the first.
pub fn ring_of_cliques(cliques: usize, clique_size: usize) -> Generated {
    let mut edges = Vec::new();
    let s = clique_size as VertexId;
    for c in 0..cliques as VertexId {
        let base = c * s;
        for i in 0..s {
            for j in i + 1..s {
                edges.push(Edge::unit(base + i, base + j));
            }
        }
        if cliques > 1 && clique_size > 0 {
            let next = (c + 1) % cliques as VertexId;
            edges.push(Edge::unit(base + s - 1, next * s));
        }
    }
    let n = cliques * clique_size;
    Generated {
        edges: EdgeList::new(edges, Some(n)),
        truth: (0..n)
            .map(|v| (v / clique_size * clique_size) as VertexId)
            .collect(),
    }
}

/// Vertex 0 joined to `leaves` leaves.
pub fn star(leaves: usize) -> Generated {
    let edges = (1..=leaves as VertexId).map(|v| Edge::unit(0, v)).collect();
    Generated {
        edges: EdgeList::new(edges, Some(leaves + 1)),
        truth: vec![0; leaves + 1],
    }
}
