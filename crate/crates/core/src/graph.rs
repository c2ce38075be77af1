//! Graph representation, synthetic generators, and edge-list ingestion.

use std::collections::HashMap;
use std::io::BufRead;
use std::sync::Arc;

use rand::Rng;

use crate::error::Error;
use crate::seed;
use crate::Result;

/// Dense node identifier, contiguous in `[0, node_count)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    RegularTree { degree: u32 },
    ErdosRenyi,
    ScaleFree,
    Imported,
}

/// Undirected graph as per-node neighbor lists.
///
/// Invariants: adjacency is symmetric, no self-loops, no duplicate edges.
#[derive(Debug, Clone)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    kind: GraphKind,
}

/// What an edge-list import dropped on the way in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadSummary {
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

impl Graph {
    fn with_nodes(n: usize, kind: GraphKind) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            kind,
        }
    }

    /// Builds an undirected graph from an edge list over nodes `0..n`.
    /// Self-loops and duplicate edges are dropped.
    pub fn from_edges(n: usize, edges: &[(u32, u32)], kind: GraphKind) -> Self {
        let mut g = Graph::with_nodes(n, kind);
        for &(u, v) in edges {
            g.add_edge(NodeId(u), NodeId(v));
        }
        g
    }

    fn add_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        if u == v || self.adj[u.index()].contains(&v) {
            return false;
        }
        self.adj[u.index()].push(v);
        self.adj[v.index()].push(u);
        true
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v.index()]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v.index()].len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.adj.len() as u32).map(NodeId)
    }

    /// Restricts the graph to its largest connected component, compacting
    /// node ids in ascending original order.
    pub fn largest_component(&self) -> Graph {
        let n = self.node_count();
        let mut comp = vec![u32::MAX; n];
        let mut best = (0usize, 0u32); // (size, component label)
        let mut label = 0u32;
        let mut queue = Vec::new();
        for start in 0..n {
            if comp[start] != u32::MAX {
                continue;
            }
            comp[start] = label;
            queue.push(start);
            let mut size = 0usize;
            while let Some(u) = queue.pop() {
                size += 1;
                for &w in &self.adj[u] {
                    if comp[w.index()] == u32::MAX {
                        comp[w.index()] = label;
                        queue.push(w.index());
                    }
                }
            }
            if size > best.0 {
                best = (size, label);
            }
            label += 1;
        }
        let mut remap = vec![u32::MAX; n];
        let mut next = 0u32;
        for (old, &c) in comp.iter().enumerate() {
            if c == best.1 {
                remap[old] = next;
                next += 1;
            }
        }
        let mut g = Graph::with_nodes(best.0, self.kind);
        for old in 0..n {
            if remap[old] == u32::MAX {
                continue;
            }
            for &w in &self.adj[old] {
                if old < w.index() && remap[w.index()] != u32::MAX {
                    g.add_edge(NodeId(remap[old]), NodeId(remap[w.index()]));
                }
            }
        }
        g
    }

    /// Writes the edge list as "u v" lines.
    pub fn write_edge_list<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for u in self.nodes() {
            for &v in self.neighbors(u) {
                if u < v {
                    writeln!(out, "{} {}", u, v)?;
                }
            }
        }
        Ok(())
    }
}

/// Erdős–Rényi G(n, p) with p = avg_degree/(n-1), restricted to the
/// largest connected component.
pub fn gen_er(n: usize, avg_degree: f64, rng_seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("er: n={n} < 2")));
    }
    if avg_degree <= 0.0 || avg_degree > (n - 1) as f64 {
        return Err(Error::InvalidParameter(format!(
            "er: avg_degree={avg_degree} outside (0, n-1]"
        )));
    }
    let p = avg_degree / (n - 1) as f64;
    let mut rng = seed::rng(rng_seed, &[0x45]);
    let mut g = Graph::with_nodes(n, GraphKind::ErdosRenyi);
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if rng.random_bool(p) {
                g.add_edge(NodeId(u), NodeId(v));
            }
        }
    }
    Ok(g.largest_component())
}

/// Scale-free graph by preferential attachment. Each new node attaches
/// m edges to existing nodes with probability proportional to degree;
/// m alternates around `edge_node_ratio` so the final edge/node ratio
/// lands within 5% of the target.
pub fn gen_scale_free(n: usize, edge_node_ratio: f64, rng_seed: u64) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("scale-free: n={n} < 3")));
    }
    if edge_node_ratio < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "scale-free: edge_node_ratio={edge_node_ratio} < 1"
        )));
    }
    let mut rng = seed::rng(rng_seed, &[0x5f]);
    let m_low = edge_node_ratio.floor() as usize;
    let m_high = edge_node_ratio.ceil() as usize;
    let frac_high = edge_node_ratio - edge_node_ratio.floor();

    // Seed clique large enough that every attachment count is satisfiable.
    let seed_n = (m_high + 1).min(n);
    let mut g = Graph::with_nodes(n, GraphKind::ScaleFree);
    // Degree-weighted sampling pool: every node appears once per incident edge.
    let mut pool: Vec<NodeId> = Vec::with_capacity(2 * (edge_node_ratio * n as f64) as usize);
    for u in 0..seed_n as u32 {
        for v in (u + 1)..seed_n as u32 {
            g.add_edge(NodeId(u), NodeId(v));
            pool.push(NodeId(u));
            pool.push(NodeId(v));
        }
    }
    // Deterministic m schedule: accumulate the fractional part.
    let mut acc = 0.0f64;
    for new in seed_n..n {
        acc += frac_high;
        let m = if acc >= 1.0 {
            acc -= 1.0;
            m_high
        } else {
            m_low
        };
        let m = m.min(new);
        let node = NodeId(new as u32);
        let mut attached = 0;
        while attached < m {
            let target = pool[rng.random_range(0..pool.len())];
            if g.add_edge(node, target) {
                pool.push(node);
                pool.push(target);
                attached += 1;
            }
        }
    }
    Ok(g.largest_component())
}

/// Parses a whitespace-separated edge list ('#' lines are comments).
/// Node ids are compacted preserving first-seen order; self-loops and
/// duplicate edges are dropped and counted in the summary.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<(Graph, LoadSummary)> {
    let mut remap: HashMap<u64, u32> = HashMap::new();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut summary = LoadSummary::default();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u64> {
            tok.ok_or_else(|| Error::EdgeListParse {
                line: lineno + 1,
                reason: "expected two integers".into(),
            })?
            .parse::<u64>()
            .map_err(|e| Error::EdgeListParse {
                line: lineno + 1,
                reason: e.to_string(),
            })
        };
        let u = parse(it.next())?;
        let v = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::EdgeListParse {
                line: lineno + 1,
                reason: "trailing tokens".into(),
            });
        }
        let mut intern = |raw: u64| -> u32 {
            let next = remap.len() as u32;
            *remap.entry(raw).or_insert(next)
        };
        let (u, v) = (intern(u), intern(v));
        if u == v {
            summary.self_loops_dropped += 1;
        } else {
            edges.push((u, v));
        }
    }
    if remap.is_empty() {
        return Err(Error::EmptyEdgeList);
    }
    let mut g = Graph::with_nodes(remap.len(), GraphKind::Imported);
    for (u, v) in edges {
        if !g.add_edge(NodeId(u), NodeId(v)) {
            summary.duplicates_dropped += 1;
        }
    }
    Ok((g, summary))
}

/// Infinite d-regular tree, materialized lazily as diffusion touches it.
///
/// Node 0 is the root. Asking for a node's neighbors materializes its
/// missing children, so every queried node ends up with exactly `degree`
/// neighbors and the structure stays a tree.
#[derive(Debug, Clone)]
pub struct LazyRegularTree {
    degree: u32,
    adj: Vec<Vec<NodeId>>,
    expanded: Vec<bool>,
}

impl LazyRegularTree {
    pub fn new(degree: u32) -> Result<Self> {
        if degree < 3 {
            return Err(Error::DegreeTooSmall(degree));
        }
        Ok(LazyRegularTree {
            degree,
            adj: vec![Vec::new()],
            expanded: vec![false],
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    /// Count of materialized nodes.
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Neighbors of `v`, materializing its children on first access.
    pub fn neighbors(&mut self, v: NodeId) -> &[NodeId] {
        if !self.expanded[v.index()] {
            let missing = self.degree as usize - self.adj[v.index()].len();
            for _ in 0..missing {
                let child = NodeId(self.adj.len() as u32);
                self.adj.push(vec![v]);
                self.expanded.push(false);
                self.adj[v.index()].push(child);
            }
            self.expanded[v.index()] = true;
        }
        &self.adj[v.index()]
    }

    /// Materializes every node within `hops` of the root.
    pub fn materialize_ball(&mut self, hops: u32) {
        let mut frontier = vec![self.root()];
        for _ in 0..hops {
            let mut next = Vec::new();
            for v in frontier {
                let known: Vec<NodeId> = self.adj[v.index()].clone();
                next.extend(
                    self.neighbors(v)
                        .iter()
                        .filter(|c| !known.contains(c))
                        .copied(),
                );
            }
            frontier = next;
        }
    }

    /// Freezes the materialized portion into an immutable graph.
    pub fn freeze(&self) -> Graph {
        Graph {
            adj: self.adj.clone(),
            kind: GraphKind::RegularTree {
                degree: self.degree,
            },
        }
    }
}

/// Neighbor access used by the SI simulator; lazy trees grow on demand,
/// static graphs just borrow.
pub trait Topology {
    fn neighbors_of(&mut self, v: NodeId) -> &[NodeId];
    /// Immutable adjacency once simulation is done.
    fn freeze(self) -> Arc<Graph>;
}

impl Topology for LazyRegularTree {
    fn neighbors_of(&mut self, v: NodeId) -> &[NodeId] {
        self.neighbors(v)
    }

    fn freeze(self) -> Arc<Graph> {
        Arc::new(LazyRegularTree::freeze(&self))
    }
}

impl Topology for Arc<Graph> {
    fn neighbors_of(&mut self, v: NodeId) -> &[NodeId] {
        &self.adj[v.index()]
    }

    fn freeze(self) -> Arc<Graph> {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_symmetric(g: &Graph) {
        for u in g.nodes() {
            for &v in g.neighbors(u) {
                assert!(g.neighbors(v).contains(&u), "asymmetric edge {u}-{v}");
                assert_ne!(u, v, "self loop at {u}");
            }
        }
    }

    /// Nodes within L hops of the root of a d-regular tree.
    fn ball_size(d: u64, hops: u32) -> u64 {
        (d * (d - 1).pow(hops) - 2) / (d - 2)
    }

    #[test]
    fn rejects_degree_below_three() {
        assert!(LazyRegularTree::new(2).is_err());
    }

    #[test]
    fn root_expands_to_full_degree() {
        let mut t = LazyRegularTree::new(3).unwrap();
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.neighbors(NodeId(0)).len(), 3);
        assert_eq!(t.node_count(), 4);
        assert_eq!(t.edge_count(), t.node_count() - 1);
    }

    #[test]
    fn ball_of_eight_hops_has_766_nodes() {
        let mut t = LazyRegularTree::new(3).unwrap();
        t.materialize_ball(8);
        assert_eq!(t.node_count(), 766);
        assert_eq!(ball_size(3, 8), 766);
        assert_eq!(t.edge_count(), t.node_count() - 1);
    }

    #[test]
    fn degree_four_two_hop_ball_has_17_nodes() {
        let mut t = LazyRegularTree::new(4).unwrap();
        t.materialize_ball(2);
        assert_eq!(t.node_count(), 17);
        assert_eq!(ball_size(4, 2), 17);
    }

    #[test]
    fn tree_edge_count_tracks_materialization() {
        let mut t = LazyRegularTree::new(5).unwrap();
        for step in 0..20u32 {
            t.neighbors(NodeId(step % t.node_count() as u32));
            assert_eq!(t.edge_count(), t.node_count() - 1);
        }
    }

    #[test]
    fn er_mean_degree_matches_target() {
        let mut total = 0.0;
        let seeds = 20;
        for s in 0..seeds {
            let g = gen_er(2000, 4.0, s).unwrap();
            total += 2.0 * g.edge_count() as f64 / g.node_count() as f64;
        }
        let mean = total / seeds as f64;
        assert!((mean - 4.0).abs() < 0.3, "mean degree {mean}");
    }

    #[test]
    fn er_two_nodes_prob_one_is_an_edge() {
        let g = gen_er(2, 1.0, 9).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn er_is_deterministic_per_seed() {
        let a = gen_er(300, 4.0, 11).unwrap();
        let b = gen_er(300, 4.0, 11).unwrap();
        assert_eq!(a.adj, b.adj);
        let c = gen_er(300, 4.0, 12).unwrap();
        assert_ne!(a.adj, c.adj);
    }

    #[test]
    fn er_is_symmetric() {
        assert_symmetric(&gen_er(500, 4.0, 3).unwrap());
    }

    #[test]
    fn scale_free_edge_count_near_ratio() {
        let g = gen_scale_free(2000, 1.5, 5).unwrap();
        assert!(
            (2850..=3150).contains(&g.edge_count()),
            "edge count {}",
            g.edge_count()
        );
        assert_symmetric(&g);
    }

    #[test]
    fn scale_free_smallest_case() {
        let g = gen_scale_free(3, 1.0, 1).unwrap();
        assert!(g.edge_count() == 2 || g.edge_count() == 3);
    }

    #[test]
    fn scale_free_tail_heavier_than_er() {
        let mut wins = 0;
        let pairs = 20;
        for s in 0..pairs {
            let sf = gen_scale_free(1000, 1.5, s).unwrap();
            let er = gen_er(1000, 3.0, s + 1000).unwrap();
            let max_sf = sf.nodes().map(|v| sf.degree(v)).max().unwrap();
            let max_er = er.nodes().map(|v| er.degree(v)).max().unwrap();
            if max_sf > max_er {
                wins += 1;
            }
        }
        assert!(wins >= 18, "scale-free max degree won only {wins}/{pairs}");
    }

    #[test]
    fn edge_list_collapses_duplicates() {
        let (g, s) = load_edge_list("0 1\n1 0\n".as_bytes()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(s.duplicates_dropped, 1);
    }

    #[test]
    fn edge_list_drops_self_loops() {
        let (g, s) = load_edge_list("0 0\n0 1\n".as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(s.self_loops_dropped, 1);
    }

    #[test]
    fn edge_list_rejects_malformed_line() {
        let err = load_edge_list("0 1\nnope\n".as_bytes()).unwrap_err();
        match err {
            Error::EdgeListParse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn edge_list_rejects_empty_input() {
        assert!(matches!(
            load_edge_list("# only a comment\n".as_bytes()),
            Err(Error::EmptyEdgeList)
        ));
    }

    #[test]
    fn edge_list_compacts_first_seen_order() {
        let (g, _) = load_edge_list("10 7\n7 3\n".as_bytes()).unwrap();
        // 10 -> 0, 7 -> 1, 3 -> 2
        assert_eq!(g.node_count(), 3);
        assert!(g.neighbors(NodeId(0)).contains(&NodeId(1)));
        assert!(g.neighbors(NodeId(1)).contains(&NodeId(2)));
    }
}
