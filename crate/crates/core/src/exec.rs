// SPDX-License-Identifier: Apache-2.0

//! Work distribution.
//!
//! The engine never spawns threads itself. It hands index ranges to an
//! [`Executor`], which may run them on any number of workers. Calls may nest:
//! a range body is allowed to call back into the same executor (the team
//! path does this for high-degree vertices).

use core::ops::Range;

pub trait Executor: Sync {
    /// Number of workers ranges may be spread over.
    fn workers(&self) -> usize;

    /// Calls `body` on disjoint ranges covering `0..len`. Each range holds at
    /// most `grain` indices. Returns once every range has completed.
    fn for_each<F>(&self, len: usize, grain: usize, body: F)
    where
        F: Fn(Range<usize>) + Sync + Send;

    /// Maps disjoint ranges covering `0..len` and folds the results with
    /// `reduce`, which must be associative and commutative.
    fn map_reduce<T, M, R>(&self, len: usize, grain: usize, identity: T, map: M, reduce: R) -> T
    where
        T: Send + Sync + Clone,
        M: Fn(Range<usize>) -> T + Sync + Send,
        R: Fn(T, T) -> T + Sync + Send;
}

/// Runs every range inline, in ascending order, on the calling thread.
#[derive(Debug, Default, Clone, Copy)]
pub struct SequentialExecutor;

impl Executor for SequentialExecutor {
    fn workers(&self) -> usize {
        1
    }

    fn for_each<F>(&self, len: usize, grain: usize, body: F)
    where
        F: Fn(Range<usize>) + Sync + Send,
    {
        for range in chunks(len, grain) {
            body(range);
        }
    }

    fn map_reduce<T, M, R>(&self, len: usize, grain: usize, identity: T, map: M, reduce: R) -> T
    where
        T: Send + Sync + Clone,
        M: Fn(Range<usize>) -> T + Sync + Send,
        R: Fn(T, T) -> T + Sync + Send,
    {
        chunks(len, grain).fold(identity, |acc, range| reduce(acc, map(range)))
    }
}

/// Splits `0..len` into consecutive ranges of at most `grain` indices.
pub fn chunks(len: usize, grain: usize) -> impl Iterator<Item = Range<usize>> {
    let grain = grain.max(1);
    (0..len.div_ceil(grain)).map(move |c| c * grain..((c + 1) * grain).min(len))
}
