// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria. Each criterion prints one `PASS` or `FAIL` line; the
//! process exits non-zero if any fails. Positional numeric arguments select
//! a subset, e.g. `cargo test --test acceptance -- 3 5`.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use lpa_bench::generate::PlantedPartition;
use lpa_bench::{detect, RayonExecutor};
use lpa_core::{
    build_csr, delta_modularity, lpa_with, modularity, CsrGraph, Edge, EdgeList, ExecMode,
    Executor, HtArena, HtGeometry, HtValue, LpaConfig, Precision, ProbeStrategy,
    SequentialExecutor, VertexId,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sequential() -> LpaConfig {
    LpaConfig {
        exec_mode: ExecMode::Sequential,
        ..LpaConfig::default()
    }
}

// ---------------------------------------------------------------- graphs

/// n = 10^4 with expected degree 20: 100 blocks of 100, 16 expected
/// neighbours inside the block and 4 outside.
fn parity_graphs() -> Vec<CsrGraph> {
    (0..5)
        .map(|seed| {
            let pp = PlantedPartition {
                communities: 100,
                size: 100,
                p_in: 16.0 / 99.0,
                p_out: 4.0 / 9900.0,
            };
            build_csr(&pp.generate(1000 + seed).edges, true).unwrap()
        })
        .collect()
}

const QUALITY_GRAPH: PlantedPartition = PlantedPartition {
    communities: 100,
    size: 100,
    p_in: 0.3,
    p_out: 0.001,
};

fn quality_graphs() -> Vec<(CsrGraph, Vec<VertexId>)> {
    (0..20)
        .map(|seed| {
            let g = QUALITY_GRAPH.generate(seed);
            (build_csr(&g.edges, true).unwrap(), g.truth)
        })
        .collect()
}

// ------------------------------------------------------------ criterion 1

fn fill<V: HtValue, E: Executor>(
    arena: &HtArena<V>,
    geo: &HtGeometry,
    strategy: ProbeStrategy,
    ops: &[(VertexId, f32)],
    shared: Option<&E>,
) -> usize {
    arena.clear(geo);
    let failed = std::sync::atomic::AtomicUsize::new(0);
    let run = |range: std::ops::Range<usize>| {
        for &(k, w) in &ops[range] {
            if arena
                .accumulate(geo, strategy, k, V::from_weight(w), shared.is_some())
                .is_err()
            {
                failed.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            }
        }
    };
    match shared {
        Some(exec) => {
            let grain = (ops.len() / (4 * exec.workers())).max(1);
            exec.for_each(ops.len(), grain, run);
        }
        None => run(0..ops.len()),
    }
    failed.into_inner()
}

fn same_as_oracle<V: HtValue>(
    arena: &HtArena<V>,
    geo: &HtGeometry,
    want: &BTreeMap<VertexId, f64>,
) -> bool {
    let got: BTreeMap<VertexId, f64> = arena
        .entries(geo)
        .into_iter()
        .map(|(k, v)| (k, v.to_f64()))
        .collect();
    &got == want
}

fn criterion_1() -> Outcome {
    const WORKLOADS: usize = 10_000;
    let start = Instant::now();
    let pools: Vec<RayonExecutor> = [1, 2, 8].map(|w| RayonExecutor::new(w).unwrap()).into();
    let arena32 = HtArena::<f32>::with_slots(400).unwrap();
    let arena64 = HtArena::<f64>::with_slots(400).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    let (mut mismatches, mut failed, mut fills) = (0usize, 0usize, 0usize);
    for w in 0..WORKLOADS {
        let degree = rng.random_range(1..=200usize);
        let geo = HtGeometry::for_degree(0, degree);
        let distinct = rng.random_range(1..=geo.p1);
        let mut keys = Vec::with_capacity(distinct);
        while keys.len() < distinct {
            let k = rng.random_range(0..1_000_000u32);
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        // every key at least once, then repeats; small integer weights keep
        // sums exact in both precisions regardless of addition order
        let mut ops: Vec<(VertexId, f32)> = keys
            .iter()
            .map(|&k| (k, rng.random_range(1..=8) as f32))
            .collect();
        for _ in 0..rng.random_range(0..=2 * distinct) {
            ops.push((
                keys[rng.random_range(0..distinct)],
                rng.random_range(1..=8) as f32,
            ));
        }
        let mut want = BTreeMap::new();
        for &(k, v) in &ops {
            *want.entry(k).or_insert(0.0) += v as f64;
        }
        for strategy in ProbeStrategy::ALL {
            let mut run = |shared: Option<&RayonExecutor>| {
                let (f, ok) = if w % 2 == 0 {
                    let f = fill(&arena32, &geo, strategy, &ops, shared);
                    (f, same_as_oracle(&arena32, &geo, &want))
                } else {
                    let f = fill(&arena64, &geo, strategy, &ops, shared);
                    (f, same_as_oracle(&arena64, &geo, &want))
                };
                failed += f;
                mismatches += usize::from(!ok);
                fills += 1;
            };
            run(None);
            for pool in &pools {
                run(Some(pool));
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        mismatches == 0 && failed == 0 && elapsed < Duration::from_secs(30),
        format!("{fills} fills, {mismatches} oracle mismatches, {failed} failed inserts, {elapsed:.2?} (limit 30s)"),
    )
}

// ------------------------------------------------------------ criterion 2

fn criterion_2() -> Outcome {
    let mut differing = 0;
    for g in parity_graphs() {
        let runs: Vec<_> = ProbeStrategy::ALL
            .iter()
            .map(|&strategy| {
                let cfg = LpaConfig {
                    strategy,
                    ..sequential()
                };
                lpa_with(&g, &cfg, &SequentialExecutor)
                    .unwrap()
                    .0
                    .into_inner()
            })
            .collect();
        differing += runs.iter().filter(|r| **r != runs[0]).count();
    }
    check(
        differing == 0,
        format!("5 graphs x 4 strategies, {differing} label vectors differ from linear probing"),
    )
}

// ------------------------------------------------------------ criterion 3

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let single = build_csr(&EdgeList::from_pairs(&[(0, 1)], None), true).unwrap();
    let k22 = build_csr(
        &EdgeList::from_pairs(&[(0, 2), (0, 3), (1, 2), (1, 3)], None),
        true,
    )
    .unwrap();
    let mut problems = Vec::new();
    let mut runs = 0;
    for (name, g) in [("single-edge", &single), ("K2,2", &k22)] {
        for pl in 0..=4 {
            for cc in 0..=4 {
                let cfg = LpaConfig {
                    pl_period: pl,
                    cc_period: cc,
                    exec_mode: ExecMode::Synchronous,
                    ..LpaConfig::default()
                };
                let (_, stats) = lpa_with(g, &cfg, &SequentialExecutor).unwrap();
                runs += 1;
                let ok = if pl == 0 && cc == 0 {
                    !stats.converged && stats.iterations == 20
                } else {
                    stats.converged && stats.iterations <= 20
                };
                if !ok {
                    problems.push(format!(
                        "{name} pl{pl} cc{cc}: converged={} after {}",
                        stats.converged, stats.iterations
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        problems.is_empty() && elapsed < Duration::from_secs(5),
        format!(
            "{runs} runs, {elapsed:.2?} (limit 5s) {}",
            problems.join("; ")
        ),
    )
}

// ------------------------------------------------------------ criterion 4

fn random_graph(rng: &mut ChaCha8Rng) -> CsrGraph {
    let n = rng.random_range(2..=1000u32);
    let avg = rng.random_range(1.0..12.0);
    let m = (n as f64 * avg / 2.0) as usize;
    let edges = (0..m)
        .map(|_| Edge {
            u: rng.random_range(0..n),
            v: rng.random_range(0..n),
            w: rng.random_range(1..=4) as f64,
        })
        .collect();
    build_csr(&EdgeList::new(edges, Some(n as usize)), true).unwrap()
}

/// Label weights around `i`, self-loops excluded.
fn tally(g: &CsrGraph, labels: &[VertexId], i: VertexId) -> BTreeMap<VertexId, f64> {
    let mut t = BTreeMap::new();
    let (targets, weights) = g.neighbors(i);
    for (&j, &w) in targets.iter().zip(weights) {
        if j != i {
            *t.entry(labels[j as usize]).or_insert(0.0) += w as f64;
        }
    }
    t
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pool = RayonExecutor::new(4).unwrap();
    let modes = [
        ExecMode::Sequential,
        ExecMode::Parallel,
        ExecMode::Synchronous,
    ];
    let (mut checked_runs, mut checked_vertices, mut bad) = (0, 0, Vec::new());
    for case in 0..50 {
        let g = random_graph(&mut rng);
        let cfg = LpaConfig {
            exec_mode: modes[case % 3],
            pl_period: case % 5,
            cc_period: (case / 5) % 3,
            switch_degree: [4, 32][case % 2],
            precision: [Precision::F32, Precision::F64][(case / 2) % 2],
            // a tiny tolerance keeps most runs going until nothing moves
            tolerance: [0.05, 1e-9][(case / 3) % 2],
            max_iterations: 100,
            ..LpaConfig::default()
        };
        let (labels, stats) = match cfg.exec_mode {
            ExecMode::Parallel => lpa_with(&g, &cfg, &pool),
            _ => lpa_with(&g, &cfg, &SequentialExecutor),
        }
        .unwrap();
        if !(stats.converged && stats.delta_n_per_iter.last() == Some(&0)) {
            continue;
        }
        checked_runs += 1;
        for i in 0..g.n() as VertexId {
            let t = tally(&g, &labels, i);
            let Some(top) = t.values().copied().reduce(f64::max) else {
                continue;
            };
            checked_vertices += 1;
            let own = labels[i as usize];
            let best = *t.iter().find(|(_, &w)| w == top).unwrap().0;
            let argmax = t.get(&own) == Some(&top);
            let pl_blocked = cfg.pl_period > 0 && best >= own;
            if !argmax && !pl_blocked {
                bad.push(format!("graph {case}: vertex {i} label {own}, best {best}"));
            }
        }
    }
    check(
        bad.is_empty() && checked_runs > 0,
        format!(
            "{checked_runs}/50 runs converged with final dN=0, {checked_vertices} vertices checked, {} violations {}",
            bad.len(),
            bad.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
        ),
    )
}

// ------------------------------------------------------------ criterion 5

/// Q by enumerating every ordered vertex pair of the dense adjacency.
fn pairwise_q(a: &[Vec<f64>], labels: &[usize]) -> f64 {
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let m2: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..a.len() {
        for j in 0..a.len() {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / m2;
            }
        }
    }
    q / m2
}

#[allow(clippy::needless_range_loop)] // dense symmetric matrix
fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut q_err, mut dq_err, mut moves) = (0.0f64, 0.0f64, 0usize);
    for _ in 0..1000 {
        let n = rng.random_range(1..=8usize);
        let mut a = vec![vec![0.0f64; n]; n];
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(0.5) {
                    // weights exactly representable in the f32 CSR
                    let w = rng.random_range(1..=4096) as f64 / 256.0;
                    a[u][v] = w;
                    a[v][u] = w;
                    edges.push(Edge {
                        u: u as u32,
                        v: v as u32,
                        w,
                    });
                }
            }
        }
        if edges.is_empty() {
            continue;
        }
        let g = build_csr(&EdgeList::new(edges, Some(n)), true).unwrap();
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let as_ids: Vec<VertexId> = labels.iter().map(|&c| c as VertexId).collect();
        let q = modularity(&g, &as_ids).unwrap();
        let q0 = pairwise_q(&a, &labels);
        q_err = q_err.max((q - q0).abs());

        let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
        let m = k.iter().sum::<f64>() / 2.0;
        let sigma =
            |c: usize, l: &[usize]| (0..n).filter(|&j| l[j] == c).map(|j| k[j]).sum::<f64>();
        for i in 0..n {
            let d = labels[i];
            // every existing community plus an empty one
            for c in 0..n {
                if c == d {
                    continue;
                }
                let to = |c: usize| {
                    (0..n)
                        .filter(|&j| j != i && labels[j] == c)
                        .map(|j| a[i][j])
                        .sum::<f64>()
                };
                let dq =
                    delta_modularity(m, k[i], to(c), to(d), sigma(c, &labels), sigma(d, &labels));
                let mut moved = labels.clone();
                moved[i] = c;
                dq_err = dq_err.max((dq - (pairwise_q(&a, &moved) - q0)).abs());
                moves += 1;
            }
        }
    }
    check(
        q_err < 1e-9 && dq_err < 1e-9,
        format!("1000 trials, max |Q - oracle| = {q_err:.2e}, {moves} moves with max |dQ - oracle| = {dq_err:.2e} (limit 1e-9)"),
    )
}

// ------------------------------------------------------------ criterion 6

fn criterion_6() -> Outcome {
    let mut passed = 0;
    let mut worst = f64::INFINITY;
    for (g, truth) in quality_graphs() {
        let planted = modularity(&g, &truth).unwrap();
        let q = detect(&g, &LpaConfig::default())
            .unwrap()
            .modularity
            .unwrap();
        worst = worst.min(q / planted);
        passed += usize::from(q >= 0.9 * planted);
    }
    check(
        passed * 100 >= 95 * 20,
        format!("parallel mode: {passed}/20 instances reach Q >= 0.9 Q_planted (need 19), worst ratio {worst:.3}"),
    )
}

// ------------------------------------------------------------ criterion 7

fn criterion_7() -> Outcome {
    let graphs: Vec<(CsrGraph, LpaConfig)> = parity_graphs()
        .into_iter()
        .map(|g| (g, sequential()))
        .chain(
            quality_graphs()
                .into_iter()
                .map(|(g, _)| (g, LpaConfig::default())),
        )
        .collect();
    let mut worst = 0.0f64;
    for (g, cfg) in &graphs {
        let q = |precision| {
            let cfg = LpaConfig {
                precision,
                ..cfg.clone()
            };
            detect(g, &cfg).unwrap().modularity.unwrap()
        };
        worst = worst.max((q(Precision::F32) - q(Precision::F64)).abs());
    }
    check(
        worst < 1e-4,
        format!(
            "{} graphs, max |Q32 - Q64| = {worst:.2e} (limit 1e-4)",
            graphs.len()
        ),
    )
}

// ------------------------------------------------------------ criterion 8

fn criterion_8() -> Outcome {
    let start = Instant::now();
    // 100 blocks of 1000: about 1.0e6 edges inside blocks and 0.25e6 across
    let pp = PlantedPartition {
        communities: 100,
        size: 1000,
        p_in: 0.02,
        p_out: 0.00005,
    };
    let g = build_csr(&pp.generate(8).edges, true).unwrap();
    let edges = g.m2() / 2;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let workers = cores.max(4);
    let seq = detect(&g, &sequential()).unwrap();
    let par_cfg = LpaConfig {
        workers,
        ..LpaConfig::default()
    };
    let par = detect(&g, &par_cfg).unwrap();
    let speedup = seq.stats.elapsed / par.stats.elapsed;
    let total = start.elapsed();
    check(
        edges >= 1_000_000 && speedup >= 2.0 && total < Duration::from_secs(60),
        format!(
            "{edges} edges, {cores} cores, sequential {:.3}s ({:.3e} edges/s), parallel x{workers} {:.3}s ({:.3e} edges/s), speedup {speedup:.2} (need 2.0), total {total:.2?}",
            seq.stats.elapsed,
            seq.throughput(&g),
            par.stats.elapsed,
            par.throughput(&g),
        ),
    )
}

// ------------------------------------------------------------ criterion 9

fn criterion_9() -> Outcome {
    let graphs: Vec<CsrGraph> = parity_graphs()
        .into_iter()
        .chain(quality_graphs().into_iter().take(5).map(|(g, _)| g))
        .collect();
    let mut differing = 0;
    for g in &graphs {
        let qs: Vec<u64> = [2, 8, 32, 256]
            .iter()
            .map(|&switch_degree| {
                let cfg = LpaConfig {
                    switch_degree,
                    ..sequential()
                };
                detect(g, &cfg).unwrap().modularity.unwrap().to_bits()
            })
            .collect();
        differing += qs.iter().filter(|&&q| q != qs[0]).count();
    }
    check(
        differing == 0,
        format!(
            "{} graphs x 4 switch degrees, {differing} results differ",
            graphs.len()
        ),
    )
}

// ------------------------------------------------------------------ main

fn main() {
    let criteria: [Criterion; 9] = [
        ("hashtable oracle equivalence", criterion_1),
        ("strategy parity", criterion_2),
        ("oscillation and mitigation", criterion_3),
        ("fixpoint stability", criterion_4),
        ("modularity correctness", criterion_5),
        ("quality at desk scale", criterion_6),
        ("precision parity", criterion_7),
        ("performance sanity", criterion_8),
        ("switch-degree invariance", criterion_9),
    ];
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (idx, (name, run)) in criteria.iter().enumerate() {
        let number = idx + 1;
        if !selected.is_empty() && !selected.contains(&number) {
            continue;
        }
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {number} ({name}): {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {number} ({name}): {detail}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
