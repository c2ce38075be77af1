//! Untruthful-answer oracles: the stochastic environment the estimators
//! interrogate.

use std::collections::HashMap;

use rand::Rng;

use crate::diffusion::DiffusionSnapshot;
use crate::error::Error;
use crate::graph::NodeId;
use crate::seed;
use crate::Result;

/// Homogeneous answer model: identity questions are answered truthfully
/// with probability `p`, direction questions designate the true spreader
/// with probability `q`; `d` is the reference degree for the `q` bound.
#[derive(Debug, Clone, Copy)]
pub struct TruthModel {
    pub p: f64,
    pub q: f64,
    pub d: u32,
}

impl TruthModel {
    /// Requires p in (1/2, 1] (all users biased toward the truth) and
    /// q in (1/d, 1].
    pub fn new(p: f64, q: f64, d: u32) -> Result<Self> {
        if !(p > 0.5 && p <= 1.0) {
            return Err(Error::TruthProbability(format!(
                "p = {p} outside (1/2, 1]"
            )));
        }
        if !(q > 1.0 / d as f64 && q <= 1.0) {
            return Err(Error::TruthProbability(format!(
                "q = {q} outside (1/{d}, 1]"
            )));
        }
        Ok(TruthModel { p, q, d })
    }
}

/// Yes-counts from batch identity querying.
#[derive(Debug, Clone)]
pub struct BatchAnswers {
    pub yes_count: HashMap<NodeId, u32>,
    pub r: u32,
}

/// Designation counts from one direction-question round at one queriee.
#[derive(Debug, Clone)]
pub struct DirectionAnswers {
    /// (neighbor, designations) sorted by node id; counts sum to `r`.
    pub designation_count: Vec<(NodeId, u32)>,
    pub r: u32,
}

impl DirectionAnswers {
    pub fn count_for(&self, v: NodeId) -> u32 {
        self.designation_count
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, c)| c)
            .unwrap_or(0)
    }
}

/// Asks `v` "are you the source?" `r` times; returns the yes-count.
/// The source answers "yes" with probability p, everyone else with 1-p.
pub fn ask_identity(
    snap: &DiffusionSnapshot,
    model: &TruthModel,
    v: NodeId,
    r: u32,
    rng_seed: u64,
) -> u32 {
    let mut rng = seed::rng(rng_seed, &[0x1d, v.0 as u64]);
    let p_yes = if v == snap.source() {
        model.p
    } else {
        1.0 - model.p
    };
    (0..r).filter(|_| rng.random_bool(p_yes)).count() as u32
}

/// Asks `v` "who spread the rumor to you?" `r` times. Each answer names
/// the true spreader with probability q, otherwise a uniformly random
/// other neighbor (infected or not).
pub fn ask_direction(
    snap: &DiffusionSnapshot,
    model: &TruthModel,
    v: NodeId,
    r: u32,
    rng_seed: u64,
) -> Result<DirectionAnswers> {
    let parent = snap.parent(v).ok_or(Error::DirectionAtSource)?;
    let decoys: Vec<NodeId> = snap
        .graph()
        .neighbors(v)
        .iter()
        .copied()
        .filter(|&w| w != parent)
        .collect();
    let mut rng = seed::rng(rng_seed, &[0xd12, v.0 as u64]);
    let mut counts: HashMap<NodeId, u32> = HashMap::new();
    for _ in 0..r {
        let named = if decoys.is_empty() || rng.random_bool(model.q) {
            parent
        } else {
            decoys[rng.random_range(0..decoys.len())]
        };
        *counts.entry(named).or_insert(0) += 1;
    }
    let mut designation_count: Vec<(NodeId, u32)> = counts.into_iter().collect();
    designation_count.sort_by_key(|&(w, _)| w);
    Ok(DirectionAnswers {
        designation_count,
        r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::simulate_si;
    use crate::graph::LazyRegularTree;

    fn snap3(seed: u64) -> DiffusionSnapshot {
        simulate_si(LazyRegularTree::new(3).unwrap(), NodeId(0), 50, seed).unwrap()
    }

    #[test]
    fn model_bounds_enforced() {
        assert!(TruthModel::new(0.5, 0.9, 3).is_err());
        assert!(TruthModel::new(1.1, 0.9, 3).is_err());
        assert!(TruthModel::new(0.7, 1.0 / 3.0, 3).is_err());
        assert!(TruthModel::new(0.7, 0.34, 3).is_ok());
        assert!(TruthModel::new(1.0, 1.0, 3).is_ok());
    }

    #[test]
    fn truthful_identity_is_deterministic() {
        let snap = snap3(1);
        let m = TruthModel::new(1.0, 1.0, 3).unwrap();
        assert_eq!(ask_identity(&snap, &m, snap.source(), 5, 9), 5);
        let non_source = snap.infected()[1];
        assert_eq!(ask_identity(&snap, &m, non_source, 5, 9), 0);
    }

    #[test]
    fn identity_marginal_matches_p() {
        let snap = snap3(2);
        let m = TruthModel::new(0.7, 0.9, 3).unwrap();
        let runs = 10_000;
        let yes: u32 = (0..runs)
            .map(|s| ask_identity(&snap, &m, snap.source(), 1, s))
            .sum();
        let freq = yes as f64 / runs as f64;
        assert!((freq - 0.7).abs() < 0.015, "yes frequency {freq}");
        // Non-source marginal is 1 - p.
        let w = snap.infected()[3];
        let yes: u32 = (0..runs).map(|s| ask_identity(&snap, &m, w, 1, s)).sum();
        let freq = yes as f64 / runs as f64;
        let se = (0.3f64 * 0.7 / runs as f64).sqrt();
        assert!((freq - 0.3).abs() < 3.0 * se, "yes frequency {freq}");
    }

    #[test]
    fn truthful_direction_names_parent() {
        let snap = snap3(3);
        let m = TruthModel::new(0.9, 1.0, 3).unwrap();
        let v = snap.infected()[5];
        let ans = ask_direction(&snap, &m, v, 3, 7).unwrap();
        assert_eq!(ans.count_for(snap.parent(v).unwrap()), 3);
        let total: u32 = ans.designation_count.iter().map(|&(_, c)| c).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn direction_at_source_rejected() {
        let snap = snap3(4);
        let m = TruthModel::new(0.9, 0.9, 3).unwrap();
        assert!(matches!(
            ask_direction(&snap, &m, snap.source(), 1, 0),
            Err(Error::DirectionAtSource)
        ));
    }

    #[test]
    fn direction_marginals_match_q() {
        // q = 0.7 on a degree-3 node: parent 0.7, each decoy 0.15.
        let snap = snap3(5);
        let m = TruthModel::new(0.9, 0.7, 3).unwrap();
        let v = snap.infected()[5];
        let parent = snap.parent(v).unwrap();
        let runs = 10_000;
        let mut counts: HashMap<NodeId, u32> = HashMap::new();
        for s in 0..runs {
            let ans = ask_direction(&snap, &m, v, 1, s).unwrap();
            for (w, c) in ans.designation_count {
                *counts.entry(w).or_insert(0) += c;
            }
        }
        for &w in snap.graph().neighbors(v) {
            let expect = if w == parent { 0.7 } else { 0.15 };
            let freq = *counts.get(&w).unwrap_or(&0) as f64 / runs as f64;
            let se = (expect * (1.0 - expect) / runs as f64).sqrt();
            assert!(
                (freq - expect).abs() < 3.0 * se,
                "neighbor {w}: {freq} vs {expect}"
            );
        }
    }

    #[test]
    fn uniform_direction_at_q_one_over_d() {
        // q slightly above 1/3 passes validation; at q = 1/3 exactly the
        // answer distribution would be uniform, so check near-uniformity.
        let snap = snap3(6);
        let m = TruthModel {
            p: 0.9,
            q: 1.0 / 3.0,
            d: 3,
        };
        let v = snap.infected()[4];
        let runs = 10_000;
        let mut counts: HashMap<NodeId, u32> = HashMap::new();
        for s in 0..runs {
            let ans = ask_direction(&snap, &m, v, 1, s).unwrap();
            for (w, c) in ans.designation_count {
                *counts.entry(w).or_insert(0) += c;
            }
        }
        for &w in snap.graph().neighbors(v) {
            let freq = *counts.get(&w).unwrap_or(&0) as f64 / runs as f64;
            assert!((freq - 1.0 / 3.0).abs() < 0.02, "neighbor {w}: {freq}");
        }
    }

    #[test]
    fn q_zero_never_names_parent() {
        let snap = snap3(7);
        let m = TruthModel {
            p: 0.9,
            q: 0.0,
            d: 3,
        };
        let v = snap.infected()[5];
        let parent = snap.parent(v).unwrap();
        for s in 0..200 {
            let ans = ask_direction(&snap, &m, v, 4, s).unwrap();
            assert_eq!(ans.count_for(parent), 0);
        }
    }

    #[test]
    fn repetitions_are_independent_streams() {
        // Different seeds give different answer patterns on the same node.
        let snap = snap3(8);
        let m = TruthModel::new(0.7, 0.7, 3).unwrap();
        let v = snap.source();
        let a: Vec<u32> = (0..50).map(|s| ask_identity(&snap, &m, v, 10, s)).collect();
        let distinct: std::collections::HashSet<u32> = a.iter().copied().collect();
        assert!(distinct.len() > 2);
    }
}
