//! Coalition valuations: the evaluation contract, edge-sum and table-backed
//! instances, and the wrapper valuations the solvers build on top of them.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{GcsgError, Result};
use crate::graph::{CoalitionStructure, Graph, NodeSet};

/// Exact coalition value. All arithmetic in the crate is integer arithmetic.
pub type Value = i64;

/// A valuation `v: 2^N -> Z` with `v(empty) = 0`.
///
/// `coalition` is always passed sorted ascending without duplicates.
pub trait Valuation: Send + Sync {
    fn evaluate(&self, coalition: &[usize]) -> Value;
}

impl<T: Valuation + ?Sized> Valuation for &T {
    fn evaluate(&self, coalition: &[usize]) -> Value {
        (**self).evaluate(coalition)
    }
}

impl<T: Valuation + ?Sized> Valuation for Box<T> {
    fn evaluate(&self, coalition: &[usize]) -> Value {
        (**self).evaluate(coalition)
    }
}

impl<T: Valuation + ?Sized> Valuation for Arc<T> {
    fn evaluate(&self, coalition: &[usize]) -> Value {
        (**self).evaluate(coalition)
    }
}

pub fn evaluate(valuation: &dyn Valuation, coalition: &NodeSet) -> Value {
    valuation.evaluate(coalition.as_slice())
}

/// Sum of block values.
pub fn structure_value(valuation: &dyn Valuation, cs: &CoalitionStructure) -> Value {
    cs.blocks().iter().map(|b| valuation.evaluate(b.as_slice())).sum()
}

/// `v(C)` is the total weight of the edges with both endpoints in `C`.
#[derive(Debug, Clone)]
pub struct EdgeSumValuation {
    // sorted by neighbour id
    adj: Vec<Vec<(usize, Value)>>,
}

impl EdgeSumValuation {
    /// `weights[k]` is the weight of `graph.edges()[k]`.
    pub fn new(graph: &Graph, weights: &[Value]) -> Result<Self> {
        if weights.len() != graph.edge_count() {
            return Err(GcsgError::InvalidArgument(format!(
                "{} weights for {} edges",
                weights.len(),
                graph.edge_count()
            )));
        }
        let mut adj = vec![Vec::new(); graph.node_count()];
        for (&(u, v), &w) in graph.edges().iter().zip(weights) {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        Ok(EdgeSumValuation { adj })
    }

    /// Weights keyed by unordered node pair; the keys must be exactly the graph's edges.
    pub fn from_map(graph: &Graph, weights: &HashMap<(usize, usize), Value>) -> Result<Self> {
        if weights.len() != graph.edge_count() {
            return Err(GcsgError::InvalidArgument("weight map does not match edge set".into()));
        }
        let mut list = Vec::with_capacity(graph.edge_count());
        for &(u, v) in graph.edges() {
            let w = weights
                .get(&(u, v))
                .or_else(|| weights.get(&(v, u)))
                .ok_or_else(|| GcsgError::InvalidArgument(format!("no weight for edge ({u},{v})")))?;
            list.push(*w);
        }
        Self::new(graph, &list)
    }

    pub fn uniform(graph: &Graph, w: Value) -> Self {
        Self::new(graph, &vec![w; graph.edge_count()]).expect("lengths match")
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<Value> {
        let nb = self.adj.get(u)?;
        nb.binary_search_by_key(&v, |&(x, _)| x).ok().map(|i| nb[i].1)
    }

    /// Weights in the order of `graph.edges()`.
    pub fn weights_for(&self, graph: &Graph) -> Vec<Value> {
        graph
            .edges()
            .iter()
            .map(|&(u, v)| self.weight(u, v).unwrap_or(0))
            .collect()
    }

    pub fn total_weight(&self) -> Value {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&(v, _)| v > u).map(|&(_, w)| w))
            .sum()
    }
}

impl Valuation for EdgeSumValuation {
    fn evaluate(&self, c: &[usize]) -> Value {
        if c.len() < 2 {
            return 0;
        }
        let degree_sum: usize = c.iter().map(|&u| self.adj[u].len()).sum();
        let pairs = c.len() * (c.len() - 1) / 2;
        let mut total = 0;
        if pairs <= degree_sum {
            for (i, &u) in c.iter().enumerate() {
                for &v in &c[i + 1..] {
                    if let Some(w) = self.weight(u, v) {
                        total += w;
                    }
                }
            }
        } else {
            for &u in c {
                for &(v, w) in &self.adj[u] {
                    if v > u && c.binary_search(&v).is_ok() {
                        total += w;
                    }
                }
            }
        }
        total
    }
}

/// Explicit value table over all subsets of `0..n`, indexed by bitmask.
#[derive(Debug, Clone)]
pub struct TableValuation {
    n: usize,
    values: Vec<Value>,
}

impl TableValuation {
    pub const MAX_NODES: usize = 20;

    /// Tabulates `f` over every subset; `f(empty)` must be 0.
    pub fn from_fn(n: usize, f: impl Fn(&[usize]) -> Value) -> Result<Self> {
        if n > Self::MAX_NODES {
            return Err(GcsgError::CapExceeded { what: "table valuation", n, cap: Self::MAX_NODES });
        }
        let values: Vec<Value> = (0..1u64 << n)
            .map(|m| f(NodeSet::from_mask(m).as_slice()))
            .collect();
        if values[0] != 0 {
            return Err(GcsgError::InvalidArgument("table valuation must map the empty set to 0".into()));
        }
        Ok(TableValuation { n, values })
    }

    /// Listed subsets take the given value, every other subset is 0.
    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (NodeSet, Value)>) -> Result<Self> {
        if n > Self::MAX_NODES {
            return Err(GcsgError::CapExceeded { what: "table valuation", n, cap: Self::MAX_NODES });
        }
        let mut values = vec![0; 1 << n];
        for (set, value) in entries {
            if set.is_empty() {
                if value != 0 {
                    return Err(GcsgError::InvalidArgument("v(empty) must be 0".into()));
                }
                continue;
            }
            if set.iter().any(|v| v >= n) {
                return Err(GcsgError::InvalidArgument(format!("subset {set} out of range")));
            }
            values[set.to_mask() as usize] = value;
        }
        Ok(TableValuation { n, values })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, mask: u64) -> Value {
        self.values[mask as usize]
    }
}

impl Valuation for TableValuation {
    fn evaluate(&self, c: &[usize]) -> Value {
        let mask = c.iter().fold(0usize, |m, &v| m | (1 << v));
        self.values[mask]
    }
}

/// `v(C) - sum of v({i}) over i in C`.
#[derive(Clone)]
pub struct NormalizedValuation<'a> {
    base: &'a dyn Valuation,
    singles: Vec<Value>,
}

impl Valuation for NormalizedValuation<'_> {
    fn evaluate(&self, c: &[usize]) -> Value {
        if c.is_empty() {
            return 0;
        }
        self.base.evaluate(c) - c.iter().map(|&v| self.singles[v]).sum::<Value>()
    }
}

impl NormalizedValuation<'_> {
    pub fn singleton_values(&self) -> &[Value] {
        &self.singles
    }
}

/// Subtracts singleton values so every singleton is worth 0.
///
/// Returns the shifted valuation and `offset = sum of v({i})`; for every
/// partition of the `n` nodes the structure value shifts by exactly `offset`.
pub fn normalize_singletons(valuation: &dyn Valuation, n: usize) -> (NormalizedValuation<'_>, Value) {
    let singles: Vec<Value> = (0..n).map(|v| valuation.evaluate(&[v])).collect();
    let offset = singles.iter().sum();
    (NormalizedValuation { base: valuation, singles }, offset)
}

/// Valuation on a relabelled subgraph: local id `i` stands for `map[i]` of the base.
#[derive(Clone)]
pub struct RelabeledValuation<'a> {
    base: &'a dyn Valuation,
    map: Vec<usize>,
}

impl<'a> RelabeledValuation<'a> {
    pub fn new(base: &'a dyn Valuation, map: Vec<usize>) -> Self {
        RelabeledValuation { base, map }
    }
}

impl Valuation for RelabeledValuation<'_> {
    fn evaluate(&self, c: &[usize]) -> Value {
        let mut global: Vec<usize> = c.iter().map(|&v| self.map[v]).collect();
        global.sort_unstable();
        self.base.evaluate(&global)
    }
}

/// Residual valuation on one side of a cover, given a structure on the other.
///
/// With `a_blocks` a coalition structure over the A side and `F` a subset of
/// the B side,
/// `v'(F) = v(F + union of A-blocks meeting F) - sum of v(A-blocks meeting F)`.
#[derive(Clone)]
pub struct InducedValuation<'a> {
    base: &'a dyn Valuation,
    blocks: Vec<NodeSet>,
    block_values: Vec<Value>,
    // block index per node, `usize::MAX` outside every block
    owner: Vec<usize>,
    b_side: NodeSet,
}

impl<'a> InducedValuation<'a> {
    /// `a_structure` partitions the A side; `b_side` is the node set the
    /// induced valuation is defined on.
    pub fn new(base: &'a dyn Valuation, a_structure: &CoalitionStructure, b_side: NodeSet) -> Self {
        let blocks: Vec<NodeSet> = a_structure.blocks().to_vec();
        let block_values = blocks.iter().map(|b| base.evaluate(b.as_slice())).collect();
        let len = blocks.iter().filter_map(NodeSet::max).max().map_or(0, |m| m + 1);
        let mut owner = vec![usize::MAX; len];
        for (i, b) in blocks.iter().enumerate() {
            for v in b.iter() {
                owner[v] = i;
            }
        }
        InducedValuation { base, blocks, block_values, owner, b_side }
    }

    /// The overlap of the two sides.
    pub fn overlap(&self) -> NodeSet {
        self.b_side.iter().filter(|&v| self.owner_of(v).is_some()).collect()
    }

    pub fn b_side(&self) -> &NodeSet {
        &self.b_side
    }

    fn owner_of(&self, v: usize) -> Option<usize> {
        self.owner.get(v).copied().filter(|&i| i != usize::MAX)
    }

    /// Like [`Valuation::evaluate`] but rejects sets leaving the B side.
    pub fn checked_evaluate(&self, f: &NodeSet) -> Result<Value> {
        if !f.is_subset(&self.b_side) {
            return Err(GcsgError::InvalidArgument(format!(
                "{f} is not contained in the B side {}",
                self.b_side
            )));
        }
        Ok(self.evaluate(f.as_slice()))
    }
}

impl Valuation for InducedValuation<'_> {
    fn evaluate(&self, f: &[usize]) -> Value {
        if f.is_empty() {
            return 0;
        }
        let mut touched = 0u128;
        let mut overflow: Vec<usize> = Vec::new();
        for &v in f {
            match self.owner_of(v) {
                Some(b) if b < 128 => touched |= 1 << b,
                Some(b) => overflow.push(b),
                None => {}
            }
        }
        if touched == 0 && overflow.is_empty() {
            return self.base.evaluate(f);
        }
        overflow.sort_unstable();
        overflow.dedup();
        let mut union: Vec<usize> = f.to_vec();
        let mut subtract = 0;
        let low = (0..128).filter(|&b| touched >> b & 1 == 1);
        for b in low.chain(overflow) {
            union.extend(self.blocks[b].iter());
            subtract += self.block_values[b];
        }
        union.sort_unstable();
        union.dedup();
        self.base.evaluate(&union) - subtract
    }
}

/// Outcome of [`check_idm`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdmCheck {
    Holds,
    /// `v(C+i) - v(C) != v(C+i+j) - v(C+j)` although `C` separates `i` and `j`.
    Violation { i: usize, j: usize, separator: NodeSet },
}

impl IdmCheck {
    pub fn holds(&self) -> bool {
        matches!(self, IdmCheck::Holds)
    }
}

pub const DEFAULT_IDM_CAP: usize = 10;

/// Exhaustively tests independence of disconnected members on `graph`.
///
/// Pairs `i < j` are visited in ascending order and, for each, candidate sets
/// `C` in ascending bitmask order; the first violation found is reported.
pub fn check_idm(valuation: &dyn Valuation, graph: &Graph, cap: usize) -> Result<IdmCheck> {
    let n = graph.node_count();
    if n > cap || n > 20 {
        return Err(GcsgError::CapExceeded { what: "IDM check", n, cap: cap.min(20) });
    }
    let adj = graph.adjacency_masks();
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let eval = |m: u64| valuation.evaluate(NodeSet::from_mask(m).as_slice());
    for i in 0..n {
        for j in i + 1..n {
            if adj[i] >> j & 1 == 1 {
                continue;
            }
            let rest = full & !(1 << i) & !(1 << j);
            // ascending submasks of `rest`
            let mut c: u64 = 0;
            loop {
                if !reaches(&adj, full & !c, i, j) {
                    let lhs = eval(c | 1 << i) - eval(c);
                    let rhs = eval(c | 1 << i | 1 << j) - eval(c | 1 << j);
                    if lhs != rhs {
                        return Ok(IdmCheck::Violation { i, j, separator: NodeSet::from_mask(c) });
                    }
                }
                if c == rest {
                    break;
                }
                c = (c.wrapping_sub(rest)) & rest;
            }
        }
    }
    Ok(IdmCheck::Holds)
}

fn reaches(adj: &[u64], allowed: u64, from: usize, to: usize) -> bool {
    let mut seen = 1u64 << from;
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let next = adj[v] & allowed & !seen;
        seen |= next;
        frontier |= next;
    }
    seen >> to & 1 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> (Graph, EdgeSumValuation) {
        let g = Graph::complete(3);
        // edges (0,1), (0,2), (1,2)
        let v = EdgeSumValuation::new(&g, &[1, 2, -5]).unwrap();
        (g, v)
    }

    #[test]
    fn edge_sum_examples() {
        let (_, v) = triangle();
        assert_eq!(v.evaluate(&[]), 0);
        assert_eq!(v.evaluate(&[2]), 0);
        assert_eq!(v.evaluate(&[0, 1, 2]), -2);
        assert_eq!(v.total_weight(), -2);
    }

    #[test]
    fn edge_sum_large_coalition_uses_adjacency_scan() {
        let g = Graph::path(50);
        let v = EdgeSumValuation::uniform(&g, 3);
        let all: Vec<usize> = (0..50).collect();
        assert_eq!(v.evaluate(&all), 3 * 49);
    }

    #[test]
    fn structure_value_examples() {
        let g = Graph::path(3);
        let v = EdgeSumValuation::new(&g, &[1, -1]).unwrap();
        let singles = CoalitionStructure::singletons(&g.nodes());
        assert_eq!(structure_value(&v, &singles), 0);
        let cs = CoalitionStructure::new(vec![NodeSet::from([0, 1]), NodeSet::from([2])]).unwrap();
        assert_eq!(structure_value(&v, &cs), 1);
        assert_eq!(structure_value(&v, &CoalitionStructure::grand(&g.nodes())), 0);
    }

    #[test]
    fn idm_examples() {
        let g = Graph::path(3);
        let square = TableValuation::from_fn(3, |c| (c.len() * c.len()) as Value).unwrap();
        assert_eq!(
            check_idm(&square, &g, DEFAULT_IDM_CAP).unwrap(),
            IdmCheck::Violation { i: 0, j: 2, separator: NodeSet::from([1]) }
        );
        let additive = TableValuation::from_fn(3, |c| c.len() as Value).unwrap();
        assert!(check_idm(&additive, &g, DEFAULT_IDM_CAP).unwrap().holds());
        let (t, v) = triangle();
        assert!(check_idm(&v, &t, DEFAULT_IDM_CAP).unwrap().holds());
        assert!(check_idm(&v, &Graph::path(11), DEFAULT_IDM_CAP).is_err());
    }

    #[test]
    fn table_requires_zero_on_empty() {
        assert!(TableValuation::from_fn(2, |_| 1).is_err());
        let t = TableValuation::from_entries(2, [(NodeSet::from([0, 1]), 4)]).unwrap();
        assert_eq!(t.evaluate(&[0, 1]), 4);
        assert_eq!(t.evaluate(&[1]), 0);
    }

    #[test]
    fn normalization_examples() {
        let (g, v) = triangle();
        let (norm, offset) = normalize_singletons(&v, g.node_count());
        assert_eq!(offset, 0);
        assert_eq!(norm.evaluate(&[0, 1, 2]), -2);

        let single = TableValuation::from_entries(1, [(NodeSet::from([0]), 5)]).unwrap();
        let (norm, offset) = normalize_singletons(&single, 1);
        assert_eq!(offset, 5);
        assert_eq!(norm.evaluate(&[0]), 0);
    }

    #[test]
    fn induced_valuation_path_example() {
        // a=0, d=1, b=2
        let g = Graph::path(3);
        let v = EdgeSumValuation::new(&g, &[3, 7]).unwrap();
        let a_side = CoalitionStructure::new(vec![NodeSet::from([0, 1])]).unwrap();
        let induced = InducedValuation::new(&v, &a_side, NodeSet::from([1, 2]));
        assert_eq!(induced.overlap(), NodeSet::from([1]));
        assert_eq!(induced.checked_evaluate(&NodeSet::from([1, 2])).unwrap(), 7);
        assert_eq!(induced.checked_evaluate(&NodeSet::from([2])).unwrap(), 0);
        assert!(induced.checked_evaluate(&NodeSet::from([0])).is_err());
    }

    #[test]
    fn relabeled_valuation_maps_ids() {
        let g = Graph::path(4);
        let v = EdgeSumValuation::new(&g, &[1, 10, 100]).unwrap();
        let sub = RelabeledValuation::new(&v, vec![2, 3]);
        assert_eq!(sub.evaluate(&[0, 1]), 100);
    }
}
