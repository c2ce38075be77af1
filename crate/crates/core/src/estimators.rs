//! Source estimators: the batch scheme SB-Q(r), the interactive scheme
//! ID-Q(r), their MLE baselines, and the query-free baseline.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;

use crate::centrality::{
    argmax_tie_break, bfs_heuristic_scores, hop_distances_infected, rumor_center,
    rumor_centrality_all, subtree_centrality_mass,
};
use crate::diffusion::DiffusionSnapshot;
use crate::error::Error;
use crate::graph::NodeId;
use crate::querying::{ask_direction, ask_identity, TruthModel};
use crate::seed;
use crate::Result;

/// Question budget with a hard `spent <= total` invariant.
#[derive(Debug, Clone, Copy)]
pub struct BudgetLedger {
    total: u64,
    spent: u64,
}

impl BudgetLedger {
    pub fn new(total: u64) -> Self {
        BudgetLedger { total, spent: 0 }
    }

    pub fn remaining(&self) -> u64 {
        self.total - self.spent
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }

    /// Charges `n` units; false (and no charge) if that would overdraw.
    pub fn try_spend(&mut self, n: u64) -> bool {
        if n > self.remaining() {
            return false;
        }
        self.spent += n;
        true
    }
}

/// Answer summary recorded in the per-trial trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Identity { yes: u32, r: u32 },
    /// Full designation tally, sorted by neighbor id.
    Direction { counts: Vec<(NodeId, u32)> },
    /// Movement decision after a direction round; `infected_only` marks a
    /// retake because the vote winner was susceptible.
    Move { to: NodeId, infected_only: bool },
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Identity { yes, r } => write!(f, "yes={yes}/{r}"),
            Answer::Direction { counts } => {
                let parts: Vec<String> =
                    counts.iter().map(|(w, c)| format!("{w}:{c}")).collect();
                write!(f, "{}", parts.join(","))
            }
            Answer::Move { to, infected_only } => {
                write!(f, "to={to}{}", if *infected_only { " infected-only" } else { "" })
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub step: usize,
    pub kind: &'static str,
    pub queriee: NodeId,
    pub answer: Answer,
    pub remaining_budget: u64,
}

impl fmt::Display for TraceEntry {
    /// One line per question: `step kind queriee answer_summary remaining`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.step, self.kind, self.queriee, self.answer, self.remaining_budget
        )
    }
}

#[derive(Debug, Clone)]
pub struct EstimationResult {
    pub estimate: NodeId,
    pub budget_spent: u64,
    pub trace: Vec<TraceEntry>,
    /// Filled by the harness: estimate == true source.
    pub hit: bool,
}

impl EstimationResult {
    fn new(estimate: NodeId, ledger: &BudgetLedger, trace: Vec<TraceEntry>) -> Self {
        EstimationResult {
            estimate,
            budget_spent: ledger.spent(),
            trace,
            hit: false,
        }
    }
}

/// Per-node log scores used for centers and rankings: exact rumor
/// centrality on tree snapshots, the BFS-tree heuristic otherwise.
pub fn centrality_scores(snap: &DiffusionSnapshot) -> Vec<(NodeId, f64)> {
    match rumor_centrality_all(snap) {
        Ok(table) => snap
            .infected()
            .iter()
            .map(|&v| (v, table.log_r(v).expect("infected node scored")))
            .collect(),
        Err(Error::NotATree) => bfs_heuristic_scores(snap),
        Err(e) => unreachable!("unexpected centrality failure: {e}"),
    }
}

/// Optimal repetition count for batch querying:
/// floor(1 + (1-p) ln K / (2e ln(d-1))), at least 1, at most K.
pub fn r_star_batch(k_budget: u64, p: f64, d: u32) -> u32 {
    let k = (k_budget.max(1)) as f64;
    let raw = 1.0 + (1.0 - p) * k.ln() / (2.0 * std::f64::consts::E * (d as f64 - 1.0).ln());
    (raw.floor() as u64).clamp(1, k_budget.max(1)) as u32
}

/// Optimal repetition count for interactive querying:
/// floor(1 + 2d(1-q)^2 ln ln K / (3(d-1))), at least 1, at most K.
/// For K < 3 the inner log-log is undefined and the result is 1.
pub fn r_star_interactive(k_budget: u64, q: f64, d: u32) -> u32 {
    if k_budget < 3 {
        return 1;
    }
    let k = k_budget as f64;
    let d = d as f64;
    let raw = 1.0 + 2.0 * d * (1.0 - q).powi(2) * k.ln().ln() / (3.0 * (d - 1.0));
    (raw.floor() as u64).clamp(1, k_budget) as u32
}

/// Candidate-ball radius for SB-Q: floor of ln(K(d-2)/(rd) + 2)/ln(d-1).
fn candidate_radius(k_budget: u64, r: u32, d: u32) -> u32 {
    let k = k_budget as f64;
    let d = d as f64;
    let inner = k * (d - 2.0) / (r as f64 * d) + 2.0;
    (inner.ln() / (d - 1.0).ln()).floor().max(0.0) as u32
}

/// Batch estimator SB-Q(r): query the hop-l ball around the rumor center
/// r times per node, keep the majority-"yes" nodes, spend leftover budget
/// on the next shell, and return the max-centrality survivor.
pub fn sbq(
    snap: &DiffusionSnapshot,
    model: &TruthModel,
    k_budget: u64,
    r: Option<u32>,
    rng_seed: u64,
) -> Result<EstimationResult> {
    if let Some(r) = r {
        if (r as u64) > k_budget {
            return Err(Error::BudgetTooSmall {
                budget: k_budget,
                repetition: r as u64,
            });
        }
    }
    let r = r
        .unwrap_or_else(|| r_star_batch(k_budget, model.p, model.d))
        .clamp(1, k_budget.min(u32::MAX as u64).max(1) as u32);

    let scores: HashMap<NodeId, f64> = centrality_scores(snap).into_iter().collect();
    let center = argmax_tie_break(
        scores.iter().map(|(&v, &s)| (v, s)),
        seed::derive(rng_seed, &[1]),
    )
    .expect("nonempty snapshot");

    let l = candidate_radius(k_budget, r, model.d);
    let dist = hop_distances_infected(snap, center);
    let mut candidates: Vec<NodeId> = snap
        .infected()
        .iter()
        .copied()
        .filter(|&v| dist[v.index()].is_some_and(|h| h <= l))
        .collect();
    candidates.sort_by_key(|&v| (dist[v.index()].unwrap(), v));

    let mut ledger = BudgetLedger::new(k_budget);
    let mut trace = Vec::new();
    let mut survivors: Vec<NodeId> = Vec::new();
    let mut step = 0usize;
    let query = |v: NodeId,
                     ledger: &mut BudgetLedger,
                     trace: &mut Vec<TraceEntry>,
                     survivors: &mut Vec<NodeId>,
                     step: &mut usize| {
        let yes = ask_identity(snap, model, v, r, seed::derive(rng_seed, &[2, v.0 as u64]));
        trace.push(TraceEntry {
            step: *step,
            kind: "identity",
            queriee: v,
            answer: Answer::Identity { yes, r },
            remaining_budget: ledger.remaining(),
        });
        *step += 1;
        if 2 * yes >= r {
            survivors.push(v);
        }
    };

    for &v in &candidates {
        if !ledger.try_spend(r as u64) {
            break;
        }
        query(v, &mut ledger, &mut trace, &mut survivors, &mut step);
    }

    // Leftover budget probes the next shell, sampled without replacement.
    let mut shell: Vec<NodeId> = snap
        .infected()
        .iter()
        .copied()
        .filter(|&v| dist[v.index()] == Some(l + 1))
        .collect();
    shell.sort();
    let mut rng = seed::rng(rng_seed, &[3]);
    while !shell.is_empty() && ledger.try_spend(r as u64) {
        let v = shell.swap_remove(rng.random_range(0..shell.len()));
        query(v, &mut ledger, &mut trace, &mut survivors, &mut step);
    }

    let pool = if survivors.is_empty() {
        &candidates
    } else {
        &survivors
    };
    let estimate = argmax_tie_break(
        pool.iter().map(|&v| (v, scores[&v])),
        seed::derive(rng_seed, &[4]),
    )
    .expect("nonempty candidate pool");
    Ok(EstimationResult::new(estimate, &ledger, trace))
}

/// Weighted-centrality MLE baseline for batch querying: query the top
/// K/r nodes by centrality and maximize log R(v) + 2 x_v ln(p/(1-p)).
pub fn sbq_mle_baseline(
    snap: &DiffusionSnapshot,
    model: &TruthModel,
    k_budget: u64,
    r: u32,
    rng_seed: u64,
) -> Result<EstimationResult> {
    if (r as u64) > k_budget {
        return Err(Error::BudgetTooSmall {
            budget: k_budget,
            repetition: r as u64,
        });
    }
    let r = r.max(1);
    let scores: HashMap<NodeId, f64> = centrality_scores(snap).into_iter().collect();
    let mut ranked: Vec<NodeId> = scores.keys().copied().collect();
    ranked.sort_by(|a, b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("finite scores")
            .then(a.cmp(b))
    });
    let n_candidates = ((k_budget / r as u64) as usize).min(ranked.len()).max(1);
    let candidates = &ranked[..n_candidates];

    let mut ledger = BudgetLedger::new(k_budget);
    let mut trace = Vec::new();
    let mut weighted: Vec<(NodeId, f64)> = Vec::new();
    for (step, &v) in candidates.iter().enumerate() {
        if !ledger.try_spend(r as u64) {
            break;
        }
        let yes = ask_identity(snap, model, v, r, seed::derive(rng_seed, &[2, v.0 as u64]));
        trace.push(TraceEntry {
            step,
            kind: "identity",
            queriee: v,
            answer: Answer::Identity { yes, r },
            remaining_budget: ledger.remaining(),
        });
        let weight = if model.p == 1.0 {
            // log(p/(1-p)) diverges; the likelihood is an indicator that
            // every answer matched, which only the source can satisfy.
            if yes == r {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            2.0 * yes as f64 * (model.p / (1.0 - model.p)).ln()
        };
        weighted.push((v, scores[&v] + weight));
    }
    let estimate = if weighted.iter().all(|&(_, s)| s == f64::NEG_INFINITY) {
        // p = 1 and the source was outside the candidate list: fall back
        // to the centrality ranking.
        candidates[0]
    } else {
        argmax_tie_break(weighted.iter().copied(), seed::derive(rng_seed, &[4]))
            .expect("nonempty candidates")
    };
    Ok(EstimationResult::new(estimate, &ledger, trace))
}

/// Shared driver for the two interactive estimators. `pick_next` maps the
/// current node and its designation tally to the movement target.
fn interactive_loop<F>(
    snap: &DiffusionSnapshot,
    model: &TruthModel,
    k_budget: u64,
    r: u32,
    rng_seed: u64,
    start: NodeId,
    mut pick_next: F,
) -> EstimationResult
where
    F: FnMut(NodeId, &[(NodeId, u32)], u64) -> (NodeId, bool),
{
    let mut ledger = BudgetLedger::new(k_budget);
    let mut trace = Vec::new();
    let mut current = start;
    let mut step = 0usize;
    let mut round = 0u64;
    loop {
        if !ledger.try_spend(1) {
            break;
        }
        let is_source = current == snap.source();
        trace.push(TraceEntry {
            step,
            kind: "identity",
            queriee: current,
            answer: Answer::Identity {
                yes: is_source as u32,
                r: 1,
            },
            remaining_budget: ledger.remaining(),
        });
        step += 1;
        if is_source {
            break;
        }
        if !ledger.try_spend(r as u64) {
            break;
        }
        let answers = ask_direction(
            snap,
            model,
            current,
            r,
            seed::derive(rng_seed, &[5, round, current.0 as u64]),
        )
        .expect("non-source queriee");
        trace.push(TraceEntry {
            step,
            kind: "direction",
            queriee: current,
            answer: Answer::Direction {
                counts: answers.designation_count.clone(),
            },
            remaining_budget: ledger.remaining(),
        });
        step += 1;
        let (next, infected_only) = pick_next(current, &answers.designation_count, round);
        trace.push(TraceEntry {
            step,
            kind: "move",
            queriee: current,
            answer: Answer::Move {
                to: next,
                infected_only,
            },
            remaining_budget: ledger.remaining(),
        });
        step += 1;
        current = next;
        round += 1;
    }
    EstimationResult::new(current, &ledger, trace)
}

/// Interactive estimator ID-Q(r): walk from the rumor center, asking a
/// truthful identity question (cost 1) and, on "no", r direction
/// questions (cost r); move to the most-designated neighbor.
pub fn idq(
    snap: &DiffusionSnapshot,
    model: &TruthModel,
    k_budget: u64,
    r: Option<u32>,
    rng_seed: u64,
) -> Result<EstimationResult> {
    let r = r
        .unwrap_or_else(|| r_star_interactive(k_budget, model.q, model.d))
        .clamp(1, k_budget.min(u32::MAX as u64).max(1) as u32);
    let scores = centrality_scores(snap);
    let start =
        argmax_tie_break(scores.iter().copied(), seed::derive(rng_seed, &[1]))
            .expect("nonempty snapshot");
    Ok(interactive_loop(
        snap,
        model,
        k_budget,
        r,
        rng_seed,
        start,
        |current, counts, round| {
            let tally = |v: NodeId| {
                counts
                    .iter()
                    .find(|&&(w, _)| w == v)
                    .map(|&(_, c)| c)
                    .unwrap_or(0)
            };
            let vote_seed = seed::derive(rng_seed, &[6, round]);
            let winner = argmax_tie_break(
                counts.iter().map(|&(w, c)| (w, c as f64)),
                vote_seed,
            )
            .expect("counts sum to r >= 1");
            if snap.is_infected(winner) {
                return (winner, false);
            }
            // The vote winner never received the rumor; only infected
            // neighbors can be interrogated, so retake the argmax there.
            let infected_winner = argmax_tie_break(
                snap.infected_neighbors(current)
                    .map(|w| (w, tally(w) as f64)),
                seed::derive(rng_seed, &[7, round]),
            )
            .expect("non-source infected node has an infected neighbor");
            (infected_winner, true)
        },
    ))
}

/// Per-step MLE baseline for interactive querying: movement maximizes the
/// subtree-centrality prior plus the multinomial designation likelihood.
/// Tree snapshots only.
pub fn idq_mle_baseline(
    snap: &DiffusionSnapshot,
    model: &TruthModel,
    k_budget: u64,
    r: u32,
    rng_seed: u64,
) -> Result<EstimationResult> {
    let table = rumor_centrality_all(snap).map_err(|e| match e {
        Error::NotATree => Error::LoopySnapshot,
        other => other,
    })?;
    let r = r.clamp(1, k_budget.min(u32::MAX as u64).max(1) as u32);
    let start = rumor_center(&table, seed::derive(rng_seed, &[1]));
    let ln_q = model.q.ln();
    let ln_lie = ((1.0 - model.q) / (model.d as f64 - 1.0)).ln();
    Ok(interactive_loop(
        snap,
        model,
        k_budget,
        r,
        rng_seed,
        start,
        |current, counts, round| {
            let tally = |v: NodeId| {
                counts
                    .iter()
                    .find(|&&(w, _)| w == v)
                    .map(|&(_, c)| c)
                    .unwrap_or(0)
            };
            let scored = snap.infected_neighbors(current).map(|v| {
                let y = tally(v) as f64;
                let miss = (r as f64) - y;
                // Skip zero-count terms so q = 1 never produces 0 * -inf.
                let mut score = subtree_centrality_mass(snap, &table, current, v);
                if y > 0.0 {
                    score += y * ln_q;
                }
                if miss > 0.0 {
                    score += miss * ln_lie;
                }
                (v, score)
            });
            let next = argmax_tie_break(scored, seed::derive(rng_seed, &[6, round]))
                .expect("non-source infected node has an infected neighbor");
            (next, false)
        },
    ))
}

/// Query-free baseline: the plain centrality (or BFS-heuristic) estimate.
pub fn no_query_baseline(snap: &DiffusionSnapshot, rng_seed: u64) -> EstimationResult {
    let scores = centrality_scores(snap);
    let estimate = argmax_tie_break(scores.into_iter(), seed::derive(rng_seed, &[1]))
        .expect("nonempty snapshot");
    EstimationResult::new(estimate, &BudgetLedger::new(0), Vec::new())
}
