//! SI rumor diffusion producing the observed snapshot with ground truth.

use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::Rng;

use crate::error::Error;
use crate::graph::{Graph, NodeId, Topology};
use crate::seed;
use crate::Result;

/// One observed diffusion: the infected set in infection order, the true
/// source, and the true spreader (parent) of every infected non-source
/// node. The parent edges form a tree rooted at the source.
#[derive(Debug, Clone)]
pub struct DiffusionSnapshot {
    graph: Arc<Graph>,
    source: NodeId,
    infected: Vec<NodeId>,
    parent: Vec<Option<NodeId>>, // indexed by graph node id
    is_infected: Vec<bool>,      // indexed by graph node id
}

impl DiffusionSnapshot {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn shared_graph(&self) -> Arc<Graph> {
        Arc::clone(&self.graph)
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    /// Infected nodes in infection order; index 0 is the source.
    pub fn infected(&self) -> &[NodeId] {
        &self.infected
    }

    pub fn infected_count(&self) -> usize {
        self.infected.len()
    }

    pub fn is_infected(&self, v: NodeId) -> bool {
        self.is_infected
            .get(v.index())
            .copied()
            .unwrap_or(false)
    }

    /// True spreader of `v`; `None` for the source (and uninfected nodes).
    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent.get(v.index()).copied().flatten()
    }

    /// Infected neighbors of an infected node.
    pub fn infected_neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| self.is_infected(w))
    }

    /// Line-oriented dump used for failure reproduction.
    pub fn dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "source {}", self.source)?;
        writeln!(out, "n {}", self.infected.len())?;
        for (order, &w) in self.infected.iter().enumerate().skip(1) {
            let p = self.parent(w).expect("non-source infected node has a parent");
            writeln!(out, "{} {} {}", w, p, order)?;
        }
        Ok(())
    }

    /// Restores a snapshot dumped by [`DiffusionSnapshot::dump`] on top of
    /// the graph it was produced from.
    pub fn restore<R: BufRead>(graph: Arc<Graph>, reader: R) -> Result<Self> {
        let parse_err = |line: usize, reason: &str| Error::SnapshotParse {
            line,
            reason: reason.into(),
        };
        let mut lines = reader.lines().enumerate();
        let mut header = |prefix: &str| -> Result<u64> {
            let (i, line) = lines
                .next()
                .ok_or_else(|| parse_err(0, "missing header"))?;
            let line = line?;
            let rest = line
                .strip_prefix(prefix)
                .ok_or_else(|| parse_err(i + 1, "bad header"))?;
            rest.trim()
                .parse::<u64>()
                .map_err(|_| parse_err(i + 1, "bad header value"))
        };
        let source = NodeId(header("source ")? as u32);
        let n = header("n ")? as usize;
        let mut infected = vec![source];
        let mut parent = vec![None; graph.node_count()];
        let mut entries: Vec<(NodeId, NodeId, usize)> = Vec::new();
        for (i, line) in lines {
            let line = line?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(parse_err(i + 1, "expected `node parent order`"));
            }
            let num = |s: &str| -> Result<u64> {
                s.parse::<u64>().map_err(|_| parse_err(i + 1, "bad integer"))
            };
            entries.push((
                NodeId(num(toks[0])? as u32),
                NodeId(num(toks[1])? as u32),
                num(toks[2])? as usize,
            ));
        }
        entries.sort_by_key(|&(_, _, order)| order);
        for &(w, p, _) in &entries {
            parent[w.index()] = Some(p);
            infected.push(w);
        }
        if infected.len() != n {
            return Err(parse_err(0, "infected count does not match header"));
        }
        let mut is_infected = vec![false; graph.node_count()];
        for &w in &infected {
            is_infected[w.index()] = true;
        }
        Ok(DiffusionSnapshot {
            graph,
            source,
            infected,
            parent,
            is_infected,
        })
    }
}

/// Exact SI simulation with i.i.d. Exp(1) edge delays: by memorylessness
/// the next infection crosses a uniformly random susceptible-infected
/// boundary edge, so no event queue is needed.
pub fn simulate_si<T: Topology>(
    mut topology: T,
    source: NodeId,
    n_infected: usize,
    rng_seed: u64,
) -> Result<DiffusionSnapshot> {
    let mut rng = seed::rng(rng_seed, &[0xd1]);
    let mut infected = vec![source];
    let mut infected_set = std::collections::HashSet::new();
    infected_set.insert(source);
    let mut parent: std::collections::HashMap<NodeId, NodeId> = std::collections::HashMap::new();
    // (spreader, target) pairs; stale entries are dropped lazily on draw.
    let mut boundary: Vec<(NodeId, NodeId)> = topology
        .neighbors_of(source)
        .iter()
        .map(|&w| (source, w))
        .collect();

    while infected.len() < n_infected {
        let (spreader, target) = loop {
            if boundary.is_empty() {
                return Err(Error::ComponentExhausted {
                    achieved: infected.len(),
                    requested: n_infected,
                });
            }
            let i = rng.random_range(0..boundary.len());
            let (s, t) = boundary[i];
            if infected_set.contains(&t) {
                boundary.swap_remove(i);
            } else {
                break (s, t);
            }
        };
        infected_set.insert(target);
        infected.push(target);
        parent.insert(target, spreader);
        for &w in topology.neighbors_of(target) {
            if !infected_set.contains(&w) {
                boundary.push((target, w));
            }
        }
    }

    let graph = topology.freeze();
    let mut parent_vec = vec![None; graph.node_count()];
    for (w, p) in parent {
        parent_vec[w.index()] = Some(p);
    }
    let mut is_infected = vec![false; graph.node_count()];
    for &w in &infected {
        is_infected[w.index()] = true;
    }
    Ok(DiffusionSnapshot {
        graph,
        source,
        infected,
        parent: parent_vec,
        is_infected,
    })
}

/// Uniformly random source for a static graph. On the (vertex-transitive)
/// lazy regular tree the root plays this role instead.
pub fn pick_random_source(graph: &Graph, rng_seed: u64) -> NodeId {
    let mut rng = seed::rng(rng_seed, &[0x50]);
    NodeId(rng.random_range(0..graph.node_count() as u32))
}
