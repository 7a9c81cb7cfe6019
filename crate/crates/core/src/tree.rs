//! Leaf-peeling solver for trees.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use petgraph::unionfind::UnionFind;

use crate::enumeration::Solution;
use crate::error::{GcsgError, Result};
use crate::graph::{CoalitionStructure, Graph};
use crate::valuation::{structure_value, Valuation};

/// Which leaf is removed next when several are available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LeafOrder {
    #[default]
    SmallestFirst,
    LargestFirst,
}

enum Leaves {
    Min(BinaryHeap<Reverse<usize>>),
    Max(BinaryHeap<usize>),
}

impl Leaves {
    fn push(&mut self, v: usize) {
        match self {
            Leaves::Min(h) => h.push(Reverse(v)),
            Leaves::Max(h) => h.push(v),
        }
    }

    fn pop(&mut self) -> Option<usize> {
        match self {
            Leaves::Min(h) => h.pop().map(|Reverse(v)| v),
            Leaves::Max(h) => h.pop(),
        }
    }
}

pub fn solve_tree(graph: &Graph, valuation: &dyn Valuation) -> Result<Solution> {
    solve_tree_with_order(graph, valuation, LeafOrder::default())
}

/// Peels leaves in the given order. A leaf joins its neighbour's block iff
/// the pair is worth strictly more together than apart.
pub fn solve_tree_with_order(graph: &Graph, valuation: &dyn Valuation, order: LeafOrder) -> Result<Solution> {
    let n = graph.node_count();
    if !graph.is_connected() || graph.edge_count() + 1 != n.max(1) {
        return Err(GcsgError::ClassMismatch("graph is not a tree".into()));
    }
    let singles: Vec<_> = (0..n).map(|i| valuation.evaluate(&[i])).collect();

    let mut degree: Vec<usize> = (0..n).map(|v| graph.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut leaves = match order {
        LeafOrder::SmallestFirst => Leaves::Min(BinaryHeap::new()),
        LeafOrder::LargestFirst => Leaves::Max(BinaryHeap::new()),
    };
    for v in 0..n {
        if degree[v] == 1 {
            leaves.push(v);
        }
    }
    let mut decisions = Vec::with_capacity(n.saturating_sub(1));
    let mut left = n;
    while left > 1 {
        let i = leaves.pop().expect("a tree with two or more nodes has a leaf");
        if removed[i] || degree[i] != 1 {
            continue;
        }
        let j = graph.neighbors(i).iter().copied().find(|&w| !removed[w]).unwrap();
        let (a, b) = (i.min(j), i.max(j));
        let marginal = valuation.evaluate(&[a, b]) - singles[a] - singles[b];
        decisions.push((i, j, marginal > 0));
        removed[i] = true;
        left -= 1;
        degree[j] -= 1;
        if degree[j] == 1 {
            leaves.push(j);
        }
    }

    let mut uf = UnionFind::new(n);
    for &(i, j, join) in decisions.iter().rev() {
        if join {
            uf.union(i, j);
        }
    }
    let labels: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
    let structure = CoalitionStructure::from_labels(0..n, &labels);
    let value = structure_value(valuation, &structure);
    Ok(Solution { structure, value })
}
