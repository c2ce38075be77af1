//! Rumor centrality, rumor-center selection, and the BFS-tree heuristic
//! for loopy graphs.
//!
//! All centrality arithmetic stays in the natural-log domain; N! is never
//! materialized (N = 400 overflows any linear-domain representation).

use std::collections::HashMap;

use rand::Rng;

use crate::diffusion::DiffusionSnapshot;
use crate::error::Error;
use crate::graph::{Graph, NodeId};
use crate::seed;
use crate::Result;

/// Log-domain tolerance below which two centralities count as tied.
const TIE_EPS: f64 = 1e-9;

/// Log rumor centralities of every infected node, for one snapshot whose
/// infected subgraph is a tree.
#[derive(Debug, Clone)]
pub struct CentralityTable {
    /// Infected nodes in snapshot infection order (stable iteration).
    nodes: Vec<NodeId>,
    log_r: HashMap<NodeId, f64>,
    n: usize,
}

impl CentralityTable {
    pub fn log_r(&self, v: NodeId) -> Option<f64> {
        self.log_r.get(&v).copied()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Nodes sorted by decreasing centrality (stable on ties).
    pub fn ranked(&self) -> Vec<NodeId> {
        let mut v = self.nodes.clone();
        v.sort_by(|a, b| {
            self.log_r[b]
                .partial_cmp(&self.log_r[a])
                .expect("finite centralities")
        });
        v
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Argmax over (node, score), breaking near-ties uniformly at random.
pub(crate) fn argmax_tie_break<I>(items: I, rng_seed: u64) -> Option<NodeId>
where
    I: IntoIterator<Item = (NodeId, f64)>,
{
    // Scan in node-id order so the result never depends on the caller's
    // container iteration order (hash maps would break reproducibility).
    let mut items: Vec<(NodeId, f64)> = items.into_iter().collect();
    items.sort_by_key(|&(v, _)| v);
    let mut best: Vec<NodeId> = Vec::new();
    let mut best_score = f64::NEG_INFINITY;
    for (v, score) in items {
        if score > best_score + TIE_EPS {
            best_score = score;
            best.clear();
            best.push(v);
        } else if score >= best_score - TIE_EPS {
            if score > best_score {
                best_score = score;
            }
            best.push(v);
        }
    }
    match best.len() {
        0 => None,
        1 => Some(best[0]),
        k => {
            let mut rng = seed::rng(rng_seed, &[0x71e]);
            Some(best[rng.random_range(0..k)])
        }
    }
}

/// Adjacency of the infected-induced subgraph, indexed by infection order.
struct InfectedTree<'a> {
    snap: &'a DiffusionSnapshot,
    adj: Vec<Vec<usize>>,
}

impl<'a> InfectedTree<'a> {
    fn new(snap: &'a DiffusionSnapshot) -> Self {
        let nodes = snap.infected();
        let mut pos = vec![usize::MAX; snap.graph().node_count()];
        for (i, &v) in nodes.iter().enumerate() {
            pos[v.index()] = i;
        }
        let adj = nodes
            .iter()
            .map(|&v| {
                snap.infected_neighbors(v)
                    .map(|w| pos[w.index()])
                    .collect()
            })
            .collect();
        InfectedTree { snap, adj }
    }

    fn node(&self, i: usize) -> NodeId {
        self.snap.infected()[i]
    }

    fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Log rumor centrality of every infected node in O(N): root once at the
/// source position, compute subtree sizes, then push the recurrence
/// `log R(child) = log R(parent) + log T_child - log(N - T_child)`
/// across every edge.
pub fn rumor_centrality_all(snap: &DiffusionSnapshot) -> Result<CentralityTable> {
    let tree = InfectedTree::new(snap);
    let n = snap.infected_count();
    if tree.edge_count() != n - 1 {
        return Err(Error::NotATree);
    }

    // Iterative DFS from the source position for order and parents.
    let root = 0usize;
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![root];
    let mut seen = vec![false; n];
    seen[root] = true;
    while let Some(u) = stack.pop() {
        order.push(u);
        for &w in &tree.adj[u] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                stack.push(w);
            }
        }
    }
    if order.len() != n {
        return Err(Error::NotATree);
    }

    let mut subtree = vec![1u64; n];
    for &u in order.iter().rev() {
        if u != root {
            subtree[parent[u]] += subtree[u];
        }
    }

    let mut log_r = vec![0.0f64; n];
    log_r[root] = ln_factorial(n) - subtree.iter().map(|&t| (t as f64).ln()).sum::<f64>();
    for &u in &order {
        if u != root {
            let t = subtree[u] as f64;
            log_r[u] = log_r[parent[u]] + t.ln() - (n as f64 - t).ln();
        }
    }

    let nodes = snap.infected().to_vec();
    let map = nodes
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, log_r[i]))
        .collect();
    Ok(CentralityTable {
        nodes,
        log_r: map,
        n,
    })
}

/// The infected node of maximum rumor centrality; ties break uniformly.
pub fn rumor_center(table: &CentralityTable, rng_seed: u64) -> NodeId {
    argmax_tie_break(
        table.nodes.iter().map(|&v| (v, table.log_r[&v])),
        rng_seed,
    )
    .expect("nonempty table")
}

/// BFS hop distances over the full graph.
pub fn hop_distances(graph: &Graph, from: NodeId) -> Vec<Option<u32>> {
    let mut dist = vec![None; graph.node_count()];
    dist[from.index()] = Some(0);
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u.index()].unwrap();
        for &w in graph.neighbors(u) {
            if dist[w.index()].is_none() {
                dist[w.index()] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// BFS hop distances restricted to the infected subgraph.
pub fn hop_distances_infected(snap: &DiffusionSnapshot, from: NodeId) -> Vec<Option<u32>> {
    let mut dist = vec![None; snap.graph().node_count()];
    dist[from.index()] = Some(0);
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u.index()].unwrap();
        for w in snap.infected_neighbors(u) {
            if dist[w.index()].is_none() {
                dist[w.index()] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Per-node score of the general-graph heuristic: rumor centrality of the
/// BFS tree rooted at `v`, weighted by the spreading-sequence likelihood
/// of the BFS order. Works on tree snapshots too, where it reproduces the
/// exact centrality ranking.
pub fn bfs_heuristic_scores(snap: &DiffusionSnapshot) -> Vec<(NodeId, f64)> {
    let tree = InfectedTree::new(snap);
    let n = snap.infected_count();
    let ln_nf = ln_factorial(n);
    let mut scores = Vec::with_capacity(n);
    for root in 0..n {
        scores.push((tree.node(root), bfs_score(snap, &tree, root, ln_nf)));
    }
    scores
}

fn bfs_score(snap: &DiffusionSnapshot, tree: &InfectedTree, root: usize, ln_nf: f64) -> f64 {
    let n = tree.adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &w in &tree.adj[u] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }

    // Rumor centrality of the BFS tree.
    let mut subtree = vec![1u64; n];
    for &u in order.iter().rev() {
        if u != root {
            subtree[parent[u]] += subtree[u];
        }
    }
    let log_r = ln_nf - subtree.iter().map(|&t| (t as f64).ln()).sum::<f64>();

    // Sequence likelihood of the BFS order: each step picks one of the
    // prefix's boundary edges (counted in the full graph) uniformly.
    let mut in_prefix = vec![false; snap.graph().node_count()];
    let mut log_p = 0.0f64;
    let mut boundary = 0i64;
    for (k, &u) in order.iter().enumerate() {
        let v = tree.node(u);
        let back_edges = snap
            .graph()
            .neighbors(v)
            .iter()
            .filter(|w| in_prefix[w.index()])
            .count() as i64;
        boundary += snap.graph().degree(v) as i64 - 2 * back_edges;
        in_prefix[v.index()] = true;
        if k + 1 < n {
            log_p -= (boundary as f64).ln();
        }
    }
    log_r + log_p
}

/// Source estimate for general-graph snapshots.
pub fn bfs_heuristic_estimate(snap: &DiffusionSnapshot, rng_seed: u64) -> NodeId {
    argmax_tie_break(bfs_heuristic_scores(snap), rng_seed).expect("nonempty snapshot")
}

/// Log of the summed rumor centrality mass of the component containing
/// `v` once the edge `(w, v)` is removed from the infected tree. Returns
/// -inf when `v` is not infected.
pub fn subtree_centrality_mass(
    snap: &DiffusionSnapshot,
    table: &CentralityTable,
    w: NodeId,
    v: NodeId,
) -> f64 {
    if !snap.is_infected(v) {
        return f64::NEG_INFINITY;
    }
    let mut members = vec![v];
    let mut seen = std::collections::HashSet::from([v, w]);
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        for x in snap.infected_neighbors(u) {
            if seen.insert(x) {
                members.push(x);
                stack.push(x);
            }
        }
    }
    log_sum_exp(members.iter().map(|u| table.log_r[u]))
}

fn log_sum_exp<I: IntoIterator<Item = f64>>(vals: I) -> f64 {
    let vals: Vec<f64> = vals.into_iter().collect();
    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + vals.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}
