//! Graph class recognition used for solver dispatch.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{GcsgError, Result};
use crate::graph::{biconnected_components, Graph, NodeSet};

/// Most specific class of a connected graph. Every acyclic graph is also
/// K4-minor-free, and every K4-minor-free graph passes the K2,3 test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphClass {
    Acyclic,
    /// every biconnected block is series-parallel
    K4MinorFree,
    /// every biconnected block is series-parallel or a K4
    K23MinorFree,
    General,
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphClass::Acyclic => "acyclic",
            GraphClass::K4MinorFree => "k4-minor-free",
            GraphClass::K23MinorFree => "k23-minor-free",
            GraphClass::General => "general",
        })
    }
}

/// Whether the subgraph induced by `block` reduces to a single edge by
/// suppressing degree-2 nodes and merging parallel edges.
pub fn is_series_parallel_block(graph: &Graph, block: &NodeSet) -> bool {
    let n = graph.node_count();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(u, v) in graph.edges() {
        if block.contains(u) && block.contains(v) {
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    let mut alive = block.len();
    if alive <= 2 {
        return true;
    }
    let mut queue: Vec<usize> = block.iter().filter(|&v| adj[v].len() == 2).collect();
    let mut removed = vec![false; n];
    while let Some(v) = queue.pop() {
        if removed[v] || adj[v].len() != 2 || alive == 2 {
            continue;
        }
        let mut it = adj[v].iter().copied();
        let (a, b) = (it.next().unwrap(), it.next().unwrap());
        removed[v] = true;
        alive -= 1;
        adj[v].clear();
        adj[a].remove(&v);
        adj[b].remove(&v);
        adj[a].insert(b);
        adj[b].insert(a);
        for w in [a, b] {
            if adj[w].len() == 2 {
                queue.push(w);
            }
        }
    }
    alive == 2
}

fn is_k4(graph: &Graph, block: &NodeSet) -> bool {
    block.len() == 4
        && graph.edges().iter().filter(|&&(u, v)| block.contains(u) && block.contains(v)).count() == 6
}

/// Classifies a connected graph.
pub fn classify_graph(graph: &Graph) -> Result<GraphClass> {
    if !graph.is_connected() {
        return Err(GcsgError::Disconnected);
    }
    let n = graph.node_count();
    if n == 0 || graph.edge_count() + 1 == n {
        return Ok(GraphClass::Acyclic);
    }
    let mut class = GraphClass::K4MinorFree;
    for block in biconnected_components(graph)? {
        if is_series_parallel_block(graph, &block) {
            continue;
        }
        if is_k4(graph, &block) {
            class = GraphClass::K23MinorFree;
        } else {
            return Ok(GraphClass::General);
        }
    }
    Ok(class)
}
