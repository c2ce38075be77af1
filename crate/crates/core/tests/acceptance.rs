//! Acceptance gate: one test per release criterion, each printing a
//! single PASS/FAIL line with the measured value before asserting.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see every
//! line even when all criteria pass.

use std::collections::HashSet;
use std::sync::Arc;

use rand::Rng;
use rumorq::bounds::{budget_bound_batch, budget_bound_interactive, g_d, majority_success_prob};
use rumorq::centrality::rumor_centrality_all;
use rumorq::diffusion::DiffusionSnapshot;
use rumorq::experiment::{
    emit_csv, run_experiment, EstimatorKind, EstimatorSpec, ExperimentConfig, RPolicy, ResultRow,
    SweepAxis,
};
use rumorq::graph::{Graph, GraphKind};
use rumorq::{seed, NodeId};

fn verdict(criterion: u32, ok: bool, detail: &str) -> bool {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {tag} — {detail}");
    ok
}

/// Builds a snapshot in which every node of the tree is infected, with
/// infection order given by a BFS from `source`.
fn full_tree_snapshot(n: usize, edges: &[(u32, u32)], source: u32) -> DiffusionSnapshot {
    let g = Arc::new(Graph::from_edges(n, edges, GraphKind::Imported));
    let mut order = vec![NodeId(source)];
    let mut seen = vec![false; n];
    seen[source as usize] = true;
    let mut dump = format!("source {source}\nn {n}\n");
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &w in g.neighbors(v) {
            if !seen[w.index()] {
                seen[w.index()] = true;
                dump.push_str(&format!("{w} {v} {}\n", order.len()));
                order.push(w);
            }
        }
    }
    DiffusionSnapshot::restore(g, dump.as_bytes()).unwrap()
}

/// Counts, by exhaustive enumeration, the infection orderings of the
/// whole tree that start at `root`: each subsequent node must already
/// have an infected neighbor.
fn count_orderings(n: usize, adj: &[Vec<usize>], root: usize) -> u64 {
    fn go(n: usize, adj: &[Vec<usize>], infected: u64, frontier: &[usize]) -> u64 {
        if infected.count_ones() as usize == n {
            return 1;
        }
        let mut total = 0;
        for (i, &v) in frontier.iter().enumerate() {
            let mut next: Vec<usize> = frontier[..i]
                .iter()
                .chain(&frontier[i + 1..])
                .copied()
                .collect();
            for &w in &adj[v] {
                if infected & (1 << w) == 0 && !next.contains(&w) {
                    next.push(w);
                }
            }
            // Drop nodes already infected (v itself is being added now).
            total += go(n, adj, infected | (1 << v), &next);
        }
        total
    }
    let frontier: Vec<usize> = adj[root].clone();
    go(n, adj, 1 << root, &frontier)
}

/// Decodes a Prüfer sequence over n labels into the edge list of the
/// corresponding labeled tree.
fn prufer_to_edges(seq: &[u32], n: u32) -> Vec<(u32, u32)> {
    let mut degree = vec![1u32; n as usize];
    for &s in seq {
        degree[s as usize] += 1;
    }
    let mut edges = Vec::with_capacity(n as usize - 1);
    let mut leaves: std::collections::BinaryHeap<std::cmp::Reverse<u32>> = (0..n)
        .filter(|&v| degree[v as usize] == 1)
        .map(std::cmp::Reverse)
        .collect();
    for &s in seq {
        let std::cmp::Reverse(leaf) = leaves.pop().unwrap();
        edges.push((leaf, s));
        degree[s as usize] -= 1;
        if degree[s as usize] == 1 {
            leaves.push(std::cmp::Reverse(s));
        }
    }
    let std::cmp::Reverse(a) = leaves.pop().unwrap();
    let std::cmp::Reverse(b) = leaves.pop().unwrap();
    edges.push((a, b));
    edges
}

#[test]
fn criterion_01_centrality_matches_exhaustive_ordering_counts() {
    let started = std::time::Instant::now();
    let mut corpus: HashSet<Vec<(u32, u32)>> = HashSet::new();
    // n = 2 and every labeled tree on 3 nodes.
    corpus.insert(vec![(0, 1)]);
    for c in 0..3u32 {
        let others: Vec<u32> = (0..3).filter(|&v| v != c).collect();
        corpus.insert(normalize(&[(c, others[0]), (c, others[1])]));
    }
    // Random Prüfer trees for 4 <= n <= 8 until the corpus is big enough.
    let mut rng = seed::rng(2024, &[0xacce]);
    while corpus.len() < 220 {
        let n = rng.random_range(4..=8u32);
        let seq: Vec<u32> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
        corpus.insert(normalize(&prufer_to_edges(&seq, n)));
    }

    let mut checked_nodes = 0usize;
    let mut worst = 0.0f64;
    for edges in &corpus {
        let n = edges.iter().flat_map(|&(a, b)| [a, b]).max().unwrap() as usize + 1;
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a as usize].push(b as usize);
            adj[b as usize].push(a as usize);
        }
        let snap = full_tree_snapshot(n, edges, 0);
        let table = rumor_centrality_all(&snap).unwrap();
        for v in 0..n {
            let expect = count_orderings(n, &adj, v);
            let got = table.log_r(NodeId(v as u32)).unwrap().exp();
            let err = (got - expect as f64).abs() / expect as f64;
            worst = worst.max(err);
            assert_eq!(got.round() as u64, expect, "tree {edges:?}, root {v}");
            assert!(err < 1e-9, "tree {edges:?}, root {v}: {got} vs {expect}");
            checked_nodes += 1;
        }
    }
    let ok = started.elapsed().as_secs() < 60;
    assert!(verdict(
        1,
        ok,
        &format!(
            "{} trees, {} (tree, root) pairs exact vs exhaustive counts, worst rel err {:.1e}, {:?}",
            corpus.len(),
            checked_nodes,
            worst,
            started.elapsed()
        ),
    ));

    fn normalize(edges: &[(u32, u32)]) -> Vec<(u32, u32)> {
        let mut e: Vec<(u32, u32)> = edges
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        e.sort_unstable();
        e
    }
}

fn single_point_config(estimators: Vec<EstimatorSpec>, sweep: SweepAxis, value: f64) -> ExperimentConfig {
    ExperimentConfig {
        estimators,
        sweep,
        grid: vec![value],
        ..ExperimentConfig::default()
    }
}

fn detection(rows: &[ResultRow], estimator: &str) -> f64 {
    rows.iter()
        .find(|r| r.estimator == estimator)
        .unwrap_or_else(|| panic!("no row for {estimator}"))
        .detection_prob
}

#[test]
fn criterion_02_no_query_detection_stays_below_ceiling() {
    let cfg = single_point_config(
        vec![EstimatorSpec {
            kind: EstimatorKind::NoQuery,
            r_policy: RPolicy::Fixed(1),
        }],
        SweepAxis::P,
        0.7,
    );
    let out = run_experiment(&cfg).unwrap();
    assert!(out.errors.is_empty(), "{:?}", out.errors);
    let p_hat = detection(&out.rows, "no-query");
    assert!(verdict(
        2,
        p_hat < 0.40,
        &format!("no-query detection {p_hat:.3} < 0.40 (3-regular tree, N=400, 200 trials)"),
    ));
}

#[test]
fn criterion_03_batch_budget_bound_value() {
    let k = budget_bound_batch(0.05, 0.7, 3).unwrap();
    let rel = (k - 6156.0).abs() / 6156.0;
    assert!(verdict(
        3,
        rel <= 0.01,
        &format!("budget-batch(delta=0.05, p=0.7, d=3) = {k:.1}, target 6156 ±1% (off by {:.2}%)", rel * 100.0),
    ));
}

#[test]
fn criterion_04_interactive_budget_bound_value() {
    let k = budget_bound_interactive(0.05, 0.6, 3).unwrap();
    let rel = (k - 166.0).abs() / 166.0;
    assert!(verdict(
        4,
        rel <= 0.03,
        &format!("budget-interactive(delta=0.05, q=0.6, d=3) = {k:.1}, target 166 ±3% (off by {:.2}%)", rel * 100.0),
    ));
}

#[test]
fn criterion_05_batch_querying_beats_single_query_baseline() {
    let cfg = single_point_config(
        vec![
            EstimatorSpec {
                kind: EstimatorKind::Sbq,
                r_policy: RPolicy::RStar,
            },
            EstimatorSpec {
                kind: EstimatorKind::SbqMle,
                r_policy: RPolicy::Fixed(1),
            },
        ],
        SweepAxis::P,
        0.7,
    );
    let out = run_experiment(&cfg).unwrap();
    assert!(out.errors.is_empty(), "{:?}", out.errors);
    let sbq = detection(&out.rows, "sbq");
    let mle = detection(&out.rows, "sbq-mle");
    let r_used = out
        .rows
        .iter()
        .find(|r| r.estimator == "sbq")
        .unwrap()
        .r;
    let ok = sbq >= 0.80 && mle <= 0.55;
    assert!(verdict(
        5,
        ok,
        &format!(
            "sbq(r*={r_used}) detection {sbq:.3} (need >= 0.80), sbq-mle(r=1) {mle:.3} (need <= 0.55); d=3, N=400, K=766, p=0.7, 200 trials"
        ),
    ));
}

#[test]
fn criterion_06_interactive_querying_detection() {
    let cfg = ExperimentConfig {
        estimators: vec![EstimatorSpec {
            kind: EstimatorKind::Idq,
            r_policy: RPolicy::RStar,
        }],
        sweep: SweepAxis::Q,
        grid: vec![0.9],
        k_budget: 200,
        ..ExperimentConfig::default()
    };
    let out = run_experiment(&cfg).unwrap();
    assert!(out.errors.is_empty(), "{:?}", out.errors);
    let idq = detection(&out.rows, "idq");
    assert!(verdict(
        6,
        idq >= 0.95,
        &format!("idq detection {idq:.3} >= 0.95 (d=3, N=400, K=200, q=0.9, 200 trials)"),
    ));
}

#[test]
fn criterion_07_majority_filter_formula_matches_simulation() {
    let samples = 10_000u32;
    let mut detail = String::new();
    let mut ok = true;
    for (pi, &p) in [0.6f64, 0.8].iter().enumerate() {
        for (ri, &r) in [1u32, 3, 7].iter().enumerate() {
            let mut rng = seed::rng(7, &[pi as u64, ri as u64]);
            let mut survive = 0u32;
            for _ in 0..samples {
                let yes = (0..r).filter(|_| rng.random_bool(p)).count() as u32;
                if 2 * yes >= r {
                    survive += 1;
                }
            }
            let p_hat = survive as f64 / samples as f64;
            let p0 = majority_success_prob(p, r);
            let se = (p0 * (1.0 - p0) / samples as f64).sqrt();
            let pass = (p_hat - p0).abs() <= 3.0 * se;
            ok &= pass;
            detail.push_str(&format!("(p={p},r={r}): |{p_hat:.4}-{p0:.4}|<=3se "));
        }
    }
    assert!(verdict(7, ok, detail.trim()));
}

#[test]
fn criterion_08_parent_wins_designation_majority_at_least_bound() {
    let d = 3u32;
    let samples = 10_000u32;
    let mut detail = String::new();
    let mut ok = true;
    for (qi, &q) in [0.5f64, 0.7].iter().enumerate() {
        for (ri, &r) in [3u32, 9].iter().enumerate() {
            let mut rng = seed::rng(8, &[qi as u64, ri as u64]);
            let mut wins = 0u32;
            for _ in 0..samples {
                // Category 0 is the true parent; 1..d are the decoys.
                let mut counts = vec![0u32; d as usize];
                for _ in 0..r {
                    if rng.random_bool(q) {
                        counts[0] += 1;
                    } else {
                        counts[rng.random_range(1..d) as usize] += 1;
                    }
                }
                let best = *counts.iter().max().unwrap();
                let ties = counts.iter().filter(|&&c| c == best).count() as u32;
                if counts[0] == best && rng.random_range(0..ties) == 0 {
                    wins += 1;
                }
            }
            let w_hat = wins as f64 / samples as f64;
            let bound = g_d(r, q, d);
            let se = (w_hat * (1.0 - w_hat) / samples as f64).sqrt();
            let pass = w_hat >= bound - 3.0 * se;
            ok &= pass;
            detail.push_str(&format!("(q={q},r={r}): {w_hat:.4}>={bound:.4}-3se "));
        }
    }
    assert!(verdict(8, ok, detail.trim()));
}

#[test]
fn criterion_09_rerun_csv_is_byte_identical_across_worker_counts() {
    let cfg = ExperimentConfig {
        estimators: vec![
            EstimatorSpec {
                kind: EstimatorKind::Sbq,
                r_policy: RPolicy::RStar,
            },
            EstimatorSpec {
                kind: EstimatorKind::Idq,
                r_policy: RPolicy::Fixed(3),
            },
        ],
        n_infected: 200,
        trials: 50,
        grid: vec![0.6, 0.9],
        k_budget: 400,
        ..ExperimentConfig::default()
    };
    let run = |threads: usize| -> Vec<u8> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let out = pool.install(|| run_experiment(&cfg)).unwrap();
        let mut csv = Vec::new();
        emit_csv(&out.rows, &mut csv).unwrap();
        csv
    };
    let one = run(1);
    let four = run(4);
    let four_again = run(4);
    let ok = one == four && four == four_again;
    assert!(verdict(
        9,
        ok,
        &format!(
            "CSV identical across 1/4/4 worker threads ({} bytes, {} rows)",
            one.len(),
            cfg.grid.len() * cfg.estimators.len()
        ),
    ));
}

#[test]
fn criterion_10_detection_is_monotone_across_recipe_grids() {
    let configs_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let mut detail = String::new();
    let mut ok = true;
    // (recipe, estimator whose curve must be non-decreasing, swept axis)
    let cases = [
        ("fig2a.cfg", "sbq", "p"),
        ("fig2b.cfg", "sbq", "K"),
        ("fig2c.cfg", "idq", "q"),
        ("fig2d.cfg", "idq", "K"),
    ];
    for (file, estimator, axis) in cases {
        let text = std::fs::read_to_string(format!("{configs_dir}/{file}")).unwrap();
        let cfg = ExperimentConfig::parse(&text).unwrap();
        let out = run_experiment(&cfg).unwrap();
        assert!(out.errors.is_empty(), "{file}: {:?}", out.errors);
        // run_experiment returns rows sorted by estimator then grid value.
        let curve: Vec<&ResultRow> = out
            .rows
            .iter()
            .filter(|r| r.estimator == estimator)
            .collect();
        assert_eq!(curve.len(), cfg.grid.len(), "{file}");
        let mut worst: f64 = 0.0;
        for w in curve.windows(2) {
            let slack = 2.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
            let drop = w[0].detection_prob - w[1].detection_prob;
            worst = worst.max(drop - slack);
            if drop > slack {
                ok = false;
            }
        }
        detail.push_str(&format!(
            "{estimator} vs {axis}: [{}] max excess drop {worst:.3}; ",
            curve
                .iter()
                .map(|r| format!("{:.2}", r.detection_prob))
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    assert!(verdict(10, ok, detail.trim().trim_end_matches(';')));
}
