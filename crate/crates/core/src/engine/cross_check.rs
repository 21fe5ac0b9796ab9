// SPDX-License-Identifier: Apache-2.0

use core::sync::atomic::{AtomicU32, Ordering};

use alloc::vec::Vec;

use crate::exec::{Executor, SequentialExecutor};
use crate::VertexId;

const GRAIN: usize = 1024;

/// Reverts bad label changes made since `prev` was taken.
///
/// A change of vertex `i` to `c = labels[i]` is good when `labels[c] == c`.
/// A bad change is reverted only when `i > c`, so of two vertices that
/// swapped labels exactly one goes back. The revert is a compare-and-swap
/// expecting `c`. Returns the number of reverted vertices.
pub fn cross_check(labels: &mut [VertexId], prev: &[VertexId]) -> usize {
    let shared: Vec<AtomicU32> = labels.iter().map(|&c| AtomicU32::new(c)).collect();
    let reverted = revert_bad_moves(&SequentialExecutor, &shared, prev, |_| {});
    for (dst, src) in labels.iter_mut().zip(shared) {
        *dst = src.into_inner();
    }
    reverted
}

pub(super) fn revert_bad_moves<E, F>(
    exec: &E,
    labels: &[AtomicU32],
    prev: &[VertexId],
    on_revert: F,
) -> usize
where
    E: Executor,
    F: Fn(VertexId) + Sync + Send,
{
    assert_eq!(labels.len(), prev.len());
    exec.map_reduce(
        labels.len(),
        GRAIN,
        0usize,
        |range| {
            let mut reverted = 0;
            for i in range {
                let c = labels[i].load(Ordering::Relaxed);
                let before = prev[i];
                if c == before || (i as VertexId) <= c {
                    continue;
                }
                if labels[c as usize].load(Ordering::Relaxed) == c {
                    continue;
                }
                if labels[i]
                    .compare_exchange(c, before, Ordering::AcqRel, Ordering::Relaxed)
                    .is_ok()
                {
                    on_revert(i as VertexId);
                    reverted += 1;
                }
            }
            reverted
        },
        |a, b| a + b,
    )
}
