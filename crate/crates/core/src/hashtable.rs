// SPDX-License-Identifier: Apache-2.0

//! Per-vertex open-addressing hashtables.
//!
//! All tables live in one [`HtArena`]: a keys buffer and a values buffer,
//! each `2 * m2` slots long. Vertex `i` owns slots `[2 * O_i, 2 * O_i + 2 * D_i)`
//! where `O_i` is its CSR offset and `D_i` its degree; of those, the first
//! `p1 = nextPow2(D_i) - 1` slots form its table. Keys are labels and values
//! are accumulated edge weights.
//!
//! A table is driven either by a single owner (`shared = false`, plain loads
//! and stores) or by a team of workers (`shared = true`, compare-and-swap on
//! key slots and atomic addition on value slots).

use alloc::collections::TryReserveError;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Range};
use core::str::FromStr;
use core::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use crate::graph::CsrGraph;
use crate::VertexId;

/// Key-slot sentinel for an empty slot.
pub const EMPTY: VertexId = VertexId::MAX;

/// Accumulator type stored in value slots.
pub trait HtValue:
    Copy + PartialOrd + Default + Add<Output = Self> + Send + Sync + fmt::Debug + 'static
{
    type Atomic: Send + Sync;
    const ZERO: Self;
    const BITS: u32;

    fn from_weight(w: f32) -> Self;
    fn to_f64(self) -> f64;
    fn new_atomic(v: Self) -> Self::Atomic;
    fn load(slot: &Self::Atomic) -> Self;
    fn store(slot: &Self::Atomic, v: Self);
    fn fetch_add(slot: &Self::Atomic, v: Self);
}

macro_rules! float_value {
    ($float:ty, $atomic:ty, $bits:expr) => {
        impl HtValue for $float {
            type Atomic = $atomic;
            const ZERO: Self = 0.0;
            const BITS: u32 = $bits;

            #[inline]
            fn from_weight(w: f32) -> Self {
                w as $float
            }

            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }

            #[inline]
            fn new_atomic(v: Self) -> Self::Atomic {
                <$atomic>::new(v.to_bits())
            }

            #[inline]
            fn load(slot: &Self::Atomic) -> Self {
                <$float>::from_bits(slot.load(Ordering::Relaxed))
            }

            #[inline]
            fn store(slot: &Self::Atomic, v: Self) {
                slot.store(v.to_bits(), Ordering::Relaxed)
            }

            #[inline]
            fn fetch_add(slot: &Self::Atomic, v: Self) {
                let mut cur = slot.load(Ordering::Relaxed);
                loop {
                    let next = (<$float>::from_bits(cur) + v).to_bits();
                    match slot.compare_exchange_weak(
                        cur,
                        next,
                        Ordering::Relaxed,
                        Ordering::Relaxed,
                    ) {
                        Ok(_) => return,
                        Err(seen) => cur = seen,
                    }
                }
            }
        }
    };
}

float_value!(f32, AtomicU32, 32);
float_value!(f64, AtomicU64, 64);

/// Collision resolution strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ProbeStrategy {
    /// Step 1.
    Linear,
    /// Step starts at 1 and doubles after each collision.
    Quadratic,
    /// Fixed step `max(1, k mod p2)`.
    Double,
    /// Step `δ ← 2δ + (k mod p2)`, starting from 1.
    #[default]
    QuadraticDouble,
}

impl ProbeStrategy {
    pub const ALL: [ProbeStrategy; 4] = [
        ProbeStrategy::Linear,
        ProbeStrategy::Quadratic,
        ProbeStrategy::Double,
        ProbeStrategy::QuadraticDouble,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProbeStrategy::Linear => "linear",
            ProbeStrategy::Quadratic => "quadratic",
            ProbeStrategy::Double => "double",
            ProbeStrategy::QuadraticDouble => "quadratic-double",
        }
    }
}

impl fmt::Display for ProbeStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown probing strategy `{0}`")]
pub struct UnknownStrategy(pub alloc::string::String);

impl FromStr for ProbeStrategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProbeStrategy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownStrategy(s.into()))
    }
}

/// Location and moduli of one vertex's table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HtGeometry {
    /// First slot in the arena, `2 * O_i`.
    pub offset: usize,
    /// Capacity and primary modulus.
    pub p1: usize,
    /// Secondary modulus, `2 * (p1 + 1) - 1`.
    pub p2: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("vertex {0} has degree 0 and no hashtable")]
pub struct NoTable(pub VertexId);

/// Smallest power of two strictly greater than `x`.
#[inline]
pub fn next_pow2_above(x: usize) -> usize {
    (x + 1).next_power_of_two()
}

impl HtGeometry {
    pub fn for_degree(offset: usize, degree: usize) -> Self {
        let p1 = next_pow2_above(degree) - 1;
        HtGeometry {
            offset,
            p1,
            p2: 2 * (p1 + 1) - 1,
        }
    }

    /// Upper bound on probes before [`ProbeFailed`].
    #[inline]
    pub fn max_retries(&self) -> usize {
        4 * self.p1
    }

    #[inline]
    pub fn slots(&self) -> Range<usize> {
        self.offset..self.offset + self.p1
    }
}

/// Table geometry of vertex `i`.
pub fn geometry_for(graph: &CsrGraph, i: VertexId) -> Result<HtGeometry, NoTable> {
    match graph.degree(i) {
        0 => Err(NoTable(i)),
        d => Ok(HtGeometry::for_degree(2 * graph.offset(i), d)),
    }
}

/// Probe sequence over `[0, p1)`.
///
/// The first `p1` probes follow the strategy. Quadratic and double steps do
/// not necessarily visit every slot when `p1` is composite, so the remaining
/// probes continue linearly from the last position, which reaches every slot
/// within `p1` further steps.
#[derive(Debug, Clone)]
pub struct Probe {
    strategy: ProbeStrategy,
    pos: u64,
    step: u64,
    key_mod_p2: u64,
    p1: u64,
    taken: u64,
}

impl Probe {
    pub fn new(strategy: ProbeStrategy, key: VertexId, geo: &HtGeometry) -> Self {
        let p1 = geo.p1 as u64;
        let key = key as u64;
        let key_mod_p2 = key % geo.p2 as u64;
        let step = match strategy {
            ProbeStrategy::Double => key_mod_p2.max(1),
            _ => 1,
        };
        Probe {
            strategy,
            pos: key % p1,
            step: step % p1,
            key_mod_p2,
            p1,
            taken: 0,
        }
    }

    /// Current slot, relative to the table start.
    #[inline]
    pub fn slot(&self) -> usize {
        self.pos as usize
    }

    /// Moves to the next slot after a collision.
    #[inline]
    pub fn advance(&mut self) {
        let p1 = self.p1;
        self.taken += 1;
        if self.taken > p1 {
            self.pos = (self.pos + 1) % p1;
            return;
        }
        self.pos = (self.pos + self.step) % p1;
        self.step = match self.strategy {
            ProbeStrategy::Linear | ProbeStrategy::Double => self.step,
            ProbeStrategy::Quadratic => (2 * self.step) % p1,
            ProbeStrategy::QuadraticDouble => (2 * self.step + self.key_mod_p2) % p1,
        };
    }
}

/// No free or matching slot was found within `4 * p1` probes. This means the
/// table received more distinct keys than it can hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("hashtable probe exhausted inserting key {key} (capacity {p1})")]
pub struct ProbeFailed {
    pub key: VertexId,
    pub p1: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot allocate hashtable arena of {slots} slots")]
pub struct ArenaAllocError {
    pub slots: usize,
}

/// Keys and values for every vertex's table.
pub struct HtArena<V: HtValue> {
    keys: Vec<AtomicU32>,
    values: Vec<V::Atomic>,
}

impl<V: HtValue> fmt::Debug for HtArena<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HtArena")
            .field("slots", &self.keys.len())
            .field("value_bits", &V::BITS)
            .finish()
    }
}

fn try_filled<T>(len: usize, make: impl Fn() -> T) -> Result<Vec<T>, TryReserveError> {
    let mut v = Vec::new();
    v.try_reserve_exact(len)?;
    v.extend((0..len).map(|_| make()));
    Ok(v)
}

impl<V: HtValue> HtArena<V> {
    /// Arena with `slots` empty slots in each buffer.
    pub fn with_slots(slots: usize) -> Result<Self, ArenaAllocError> {
        let err = |_| ArenaAllocError { slots };
        Ok(HtArena {
            keys: try_filled(slots, || AtomicU32::new(EMPTY)).map_err(err)?,
            values: try_filled(slots, || V::new_atomic(V::ZERO)).map_err(err)?,
        })
    }

    /// Arena of `2 * m2` slots for `graph`.
    pub fn for_graph(graph: &CsrGraph) -> Result<Self, ArenaAllocError> {
        Self::with_slots(2 * graph.m2())
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn clear(&self, geo: &HtGeometry) {
        self.clear_range(geo, 0..geo.p1);
    }

    /// Clears slots `range` (relative to the table start). Team members clear
    /// disjoint ranges.
    pub fn clear_range(&self, geo: &HtGeometry, range: Range<usize>) {
        let abs = geo.offset + range.start..geo.offset + range.end;
        for (k, v) in self.keys[abs.clone()].iter().zip(&self.values[abs]) {
            k.store(EMPTY, Ordering::Relaxed);
            V::store(v, V::ZERO);
        }
    }

    /// Adds `value` to the slot holding `key`, claiming an empty slot if the
    /// key is absent. Returns the slot used, relative to the table start.
    #[inline]
    pub fn accumulate(
        &self,
        geo: &HtGeometry,
        strategy: ProbeStrategy,
        key: VertexId,
        value: V,
        shared: bool,
    ) -> Result<usize, ProbeFailed> {
        let keys = &self.keys[geo.slots()];
        let values = &self.values[geo.slots()];
        let mut probe = Probe::new(strategy, key, geo);
        for _ in 0..geo.max_retries() {
            let s = probe.slot();
            let cur = keys[s].load(Ordering::Relaxed);
            if cur == key || cur == EMPTY {
                if !shared {
                    if cur == EMPTY {
                        keys[s].store(key, Ordering::Relaxed);
                    }
                    V::store(&values[s], V::load(&values[s]) + value);
                    return Ok(s);
                }
                match keys[s].compare_exchange(EMPTY, key, Ordering::AcqRel, Ordering::Acquire) {
                    Ok(_) => {
                        V::fetch_add(&values[s], value);
                        return Ok(s);
                    }
                    Err(old) if old == key => {
                        V::fetch_add(&values[s], value);
                        return Ok(s);
                    }
                    Err(_) => {}
                }
            }
            probe.advance();
        }
        Err(ProbeFailed { key, p1: geo.p1 })
    }

    /// Key with the largest accumulated value; ties go to the smaller key.
    pub fn max_key(&self, geo: &HtGeometry) -> Option<(VertexId, V)> {
        self.max_key_in(geo, 0..geo.p1)
    }

    /// [`max_key`](Self::max_key) restricted to slots `range`. Partial results
    /// combine with [`better_entry`].
    pub fn max_key_in(&self, geo: &HtGeometry, range: Range<usize>) -> Option<(VertexId, V)> {
        let abs = geo.offset + range.start..geo.offset + range.end;
        self.keys[abs.clone()]
            .iter()
            .zip(&self.values[abs])
            .filter_map(|(k, v)| {
                let k = k.load(Ordering::Relaxed);
                (k != EMPTY).then(|| (k, V::load(v)))
            })
            .fold(None, |best, e| better_entry(best, Some(e)))
    }

    /// Occupied `(key, value)` pairs of a table, in slot order.
    pub fn entries(&self, geo: &HtGeometry) -> Vec<(VertexId, V)> {
        geo.slots()
            .filter_map(|s| {
                let k = self.keys[s].load(Ordering::Relaxed);
                (k != EMPTY).then(|| (k, V::load(&self.values[s])))
            })
            .collect()
    }

    /// Raw key of an absolute arena slot.
    pub fn key_at(&self, slot: usize) -> VertexId {
        self.keys[slot].load(Ordering::Relaxed)
    }

    /// Raw value of an absolute arena slot.
    pub fn value_at(&self, slot: usize) -> V {
        V::load(&self.values[slot])
    }
}

/// Larger value wins; equal values go to the smaller key.
#[inline]
pub fn better_entry<V: HtValue>(
    a: Option<(VertexId, V)>,
    b: Option<(VertexId, V)>,
) -> Option<(VertexId, V)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.1 > x.1 || (y.1 == x.1 && y.0 < x.0) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_csr, EdgeList};
    use alloc::collections::BTreeMap;
    use alloc::vec;
    use proptest::prelude::*;

    fn geo(p1: usize) -> HtGeometry {
        HtGeometry {
            offset: 0,
            p1,
            p2: 2 * (p1 + 1) - 1,
        }
    }

    #[test]
    fn geometry_uses_strict_next_power() {
        assert_eq!(HtGeometry::for_degree(0, 1).p1, 1);
        let g7 = HtGeometry::for_degree(0, 7);
        assert_eq!((g7.p1, g7.p2), (7, 15));
        let g8 = HtGeometry::for_degree(0, 8);
        assert_eq!((g8.p1, g8.p2), (15, 31));
        for d in 1..5000 {
            let g = HtGeometry::for_degree(0, d);
            assert!(g.p1 >= d && g.p1 < 2 * d && g.p2 > g.p1, "degree {d}");
        }
    }

    #[test]
    fn geometry_from_graph() {
        let g = build_csr(&EdgeList::from_pairs(&[(0, 1), (1, 2)], Some(4)), true).unwrap();
        assert_eq!(
            geometry_for(&g, 0),
            Ok(HtGeometry {
                offset: 0,
                p1: 1,
                p2: 3
            })
        );
        assert_eq!(
            geometry_for(&g, 1),
            Ok(HtGeometry {
                offset: 2,
                p1: 3,
                p2: 7
            })
        );
        assert_eq!(geometry_for(&g, 3), Err(NoTable(3)));
    }

    #[test]
    fn accumulate_without_collision() {
        let arena = HtArena::<f32>::with_slots(14).unwrap();
        let g = geo(7);
        for shared in [false, true] {
            arena.clear(&g);
            assert_eq!(
                arena.accumulate(&g, ProbeStrategy::QuadraticDouble, 5, 1.0, shared),
                Ok(5)
            );
            assert_eq!((arena.key_at(5), arena.value_at(5)), (5, 1.0));
            arena
                .accumulate(&g, ProbeStrategy::QuadraticDouble, 5, 1.0, shared)
                .unwrap();
            assert_eq!(arena.value_at(5), 2.0);
        }
    }

    #[test]
    fn quadratic_double_collision_trace() {
        let arena = HtArena::<f64>::with_slots(14).unwrap();
        let g = geo(7);
        let qd = ProbeStrategy::QuadraticDouble;
        assert_eq!(arena.accumulate(&g, qd, 3, 1.0, false), Ok(3));
        assert_eq!(arena.accumulate(&g, qd, 10, 1.0, false), Ok(4));
        // 17 collides at 3 and 4: i = 17, 18, 18 + (2 + 17 mod 15) = 22.
        assert_eq!(arena.accumulate(&g, qd, 17, 1.0, false), Ok(22 % 7));
    }

    #[test]
    fn probe_steps_per_strategy() {
        let g = geo(15);
        let trace = |s| {
            let mut p = Probe::new(s, 4, &g);
            let mut out = vec![p.slot()];
            for _ in 0..4 {
                p.advance();
                out.push(p.slot());
            }
            out
        };
        assert_eq!(trace(ProbeStrategy::Linear), [4, 5, 6, 7, 8]);
        assert_eq!(trace(ProbeStrategy::Quadratic), [4, 5, 7, 11, 19 % 15]);
        assert_eq!(trace(ProbeStrategy::Double), [4, 8, 12, 16 % 15, 20 % 15]);
        // steps 1, 6, 16, 36
        assert_eq!(
            trace(ProbeStrategy::QuadraticDouble),
            [4, 5, 11, 27 % 15, 63 % 15]
        );
    }

    #[test]
    fn clear_is_idempotent_and_isolated() {
        let arena = HtArena::<f32>::with_slots(16).unwrap();
        let a = HtGeometry {
            offset: 0,
            p1: 7,
            p2: 15,
        };
        let b = HtGeometry {
            offset: 8,
            p1: 7,
            p2: 15,
        };
        arena
            .accumulate(&a, ProbeStrategy::Linear, 3, 2.0, false)
            .unwrap();
        arena
            .accumulate(&b, ProbeStrategy::Linear, 3, 4.0, false)
            .unwrap();
        arena.clear(&a);
        assert!(arena.entries(&a).is_empty());
        assert!(a.slots().all(|s| arena.value_at(s) == 0.0));
        arena.clear(&a);
        assert!(arena.entries(&a).is_empty());
        assert_eq!(arena.entries(&b), [(3, 4.0)]);
    }

    #[test]
    fn max_key_ties_prefer_smaller_key() {
        let arena = HtArena::<f32>::with_slots(8).unwrap();
        let g = geo(7);
        assert_eq!(arena.max_key(&g), None);
        arena
            .accumulate(&g, ProbeStrategy::Linear, 7, 2.0, false)
            .unwrap();
        arena
            .accumulate(&g, ProbeStrategy::Linear, 2, 5.0, false)
            .unwrap();
        assert_eq!(arena.max_key(&g), Some((2, 5.0)));
        arena.clear(&g);
        arena
            .accumulate(&g, ProbeStrategy::Linear, 7, 3.0, false)
            .unwrap();
        arena
            .accumulate(&g, ProbeStrategy::Linear, 2, 3.0, false)
            .unwrap();
        assert_eq!(arena.max_key(&g), Some((2, 3.0)));
    }

    #[test]
    fn overfull_table_fails_loudly() {
        let arena = HtArena::<f32>::with_slots(3).unwrap();
        let g = geo(3);
        for k in 0..3 {
            arena
                .accumulate(&g, ProbeStrategy::Double, k, 1.0, false)
                .unwrap();
        }
        assert_eq!(
            arena.accumulate(&g, ProbeStrategy::Double, 9, 1.0, false),
            Err(ProbeFailed { key: 9, p1: 3 })
        );
    }

    #[test]
    fn strategy_parse_round_trip() {
        for s in ProbeStrategy::ALL {
            assert_eq!(s.name().parse::<ProbeStrategy>(), Ok(s));
        }
        assert!("cuckoo".parse::<ProbeStrategy>().is_err());
    }

    fn workload() -> impl Strategy<Value = (usize, Vec<(VertexId, u8)>)> {
        (1usize..200).prop_flat_map(|degree| {
            let p1 = next_pow2_above(degree) - 1;
            prop::collection::vec(0u32..1_000_000, 1..=p1).prop_flat_map(move |keys| {
                let n = keys.len();
                (
                    Just(degree),
                    prop::collection::vec((0..n, 1u8..8), 1..=2 * degree)
                        .prop_map(move |ins| ins.into_iter().map(|(k, v)| (keys[k], v)).collect()),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn matches_map_oracle((degree, inserts) in workload()) {
            let g = HtGeometry::for_degree(0, degree);
            let arena = HtArena::<f64>::with_slots(2 * degree).unwrap();
            let mut oracle = BTreeMap::new();
            for &(k, v) in &inserts {
                *oracle.entry(k).or_insert(0.0) += v as f64;
            }
            for strategy in ProbeStrategy::ALL {
                for shared in [false, true] {
                    arena.clear(&g);
                    for &(k, v) in &inserts {
                        prop_assert!(arena.accumulate(&g, strategy, k, v as f64, shared).is_ok());
                    }
                    let got: BTreeMap<_, _> = arena.entries(&g).into_iter().collect();
                    prop_assert_eq!(&got, &oracle);
                }
            }
        }
    }
}
