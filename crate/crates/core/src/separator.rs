//! Balanced vertex separators.
//!
//! Small graphs are searched exhaustively for a minimum separator; larger
//! ones use BFS level cuts.

use crate::error::{GcsgError, Result};
use crate::graph::{Graph, NodeSet};

pub const DEFAULT_BALANCE: f64 = 2.0 / 3.0;

/// Graphs up to this size are searched exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 16;

/// A cover `(A, B)` of the nodes with `A ∩ B` the separator.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatorDecomposition {
    pub part_a: NodeSet,
    pub part_b: NodeSet,
    pub separator: NodeSet,
    pub balance: f64,
}

impl SeparatorDecomposition {
    /// Nodes only in `A`.
    pub fn only_a(&self) -> NodeSet {
        self.part_a.difference(&self.separator)
    }

    /// Nodes only in `B`.
    pub fn only_b(&self) -> NodeSet {
        self.part_b.difference(&self.separator)
    }

    /// Whether both sides have nodes outside the separator.
    pub fn is_proper(&self) -> bool {
        !self.only_a().is_empty() && !self.only_b().is_empty()
    }

    /// Checks cover, intersection, separation and balance against `graph`.
    pub fn validate(&self, graph: &Graph) -> Result<()> {
        let n = graph.node_count();
        let bad = |msg: &str| Err(GcsgError::InvalidArgument(format!("separator: {msg}")));
        if self.part_a.union(&self.part_b) != graph.nodes() {
            return bad("parts do not cover the graph");
        }
        if self.part_a.intersection(&self.part_b) != self.separator {
            return bad("separator is not the intersection of the parts");
        }
        let (a, b) = (self.only_a(), self.only_b());
        if graph.edges().iter().any(|&(u, v)| {
            (a.contains(u) && b.contains(v)) || (a.contains(v) && b.contains(u))
        }) {
            return bad("an edge crosses the separator");
        }
        let limit = self.balance * n as f64 + 1e-9;
        if a.len() as f64 > limit || b.len() as f64 > limit {
            return bad("unbalanced parts");
        }
        Ok(())
    }
}

fn check_balance(balance: f64) -> Result<()> {
    if !(balance > 0.0 && balance < 1.0) {
        return Err(GcsgError::InvalidArgument(format!("balance {balance} not in (0,1)")));
    }
    Ok(())
}

/// Balanced separator of a connected graph with at least two nodes.
pub fn find_separator(graph: &Graph, balance: f64) -> Result<SeparatorDecomposition> {
    check_balance(balance)?;
    if graph.node_count() < 2 {
        return Err(GcsgError::InvalidGraph("separator needs at least two nodes".into()));
    }
    if !graph.is_connected() {
        return Err(GcsgError::Disconnected);
    }
    Ok(separate(graph, balance))
}

/// Like [`find_separator`] but also accepts disconnected graphs, where the
/// separator may be empty.
pub(crate) fn separate(graph: &Graph, balance: f64) -> SeparatorDecomposition {
    let n = graph.node_count();
    let all = graph.nodes();
    if n <= 2 {
        return SeparatorDecomposition { part_a: all.clone(), part_b: all.clone(), separator: all, balance };
    }
    let found = if n <= EXHAUSTIVE_LIMIT { exhaustive(graph, balance) } else { level_cut(graph, balance) };
    found.unwrap_or_else(|| degenerate(graph, balance))
}

fn limit(balance: f64, n: usize) -> usize {
    (balance * n as f64 + 1e-9).floor() as usize
}

fn build(n: usize, sep: &NodeSet, side_a: &[usize], balance: f64) -> SeparatorDecomposition {
    let mut in_a = vec![false; n];
    for &v in side_a {
        in_a[v] = true;
    }
    let mut part_a = sep.clone();
    let mut part_b = sep.clone();
    for v in 0..n {
        if sep.contains(v) {
            continue;
        }
        if in_a[v] {
            part_a.insert(v);
        } else {
            part_b.insert(v);
        }
    }
    SeparatorDecomposition { part_a, part_b, separator: sep.clone(), balance }
}

/// Groups component sizes into two nonempty sides, each of total at most
/// `cap`, as evenly as possible. Returns the component indices of side A.
fn group(sizes: &[usize], cap: usize) -> Option<Vec<usize>> {
    let total: usize = sizes.iter().sum();
    if sizes.len() < 2 {
        return None;
    }
    // reach[i][s]: some subset of the first i components sums to s
    let mut reach = vec![vec![false; total + 1]; sizes.len() + 1];
    reach[0][0] = true;
    for (i, &sz) in sizes.iter().enumerate() {
        for s in 0..=total {
            if reach[i][s] {
                reach[i + 1][s] = true;
                reach[i + 1][s + sz] = true;
            }
        }
    }
    let best = (1..total)
        .filter(|&s| reach[sizes.len()][s] && s <= cap && total - s <= cap)
        .min_by_key(|&s| (s.max(total - s), s))?;
    let mut side = Vec::new();
    let mut s = best;
    for i in (0..sizes.len()).rev() {
        if !reach[i][s] {
            side.push(i);
            s -= sizes[i];
        }
    }
    side.reverse();
    Some(side)
}

fn components_without(graph: &Graph, removed: &[bool]) -> Vec<Vec<usize>> {
    let n = graph.node_count();
    let mut seen = removed.to_vec();
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            for &w in graph.neighbors(comp[i]) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
            i += 1;
        }
        out.push(comp);
    }
    out
}

fn split_by(graph: &Graph, sep: &NodeSet, balance: f64) -> Option<SeparatorDecomposition> {
    let n = graph.node_count();
    let mut removed = vec![false; n];
    for v in sep.iter() {
        removed[v] = true;
    }
    let comps = components_without(graph, &removed);
    let sizes: Vec<usize> = comps.iter().map(Vec::len).collect();
    let side = group(&sizes, limit(balance, n))?;
    let side_a: Vec<usize> = side.iter().flat_map(|&i| comps[i].iter().copied()).collect();
    Some(build(n, sep, &side_a, balance))
}

fn exhaustive(graph: &Graph, balance: f64) -> Option<SeparatorDecomposition> {
    let n = graph.node_count();
    for k in 0..n - 1 {
        // subsets of size k in increasing numeric order
        let mut s: u64 = if k == 0 { 0 } else { (1u64 << k) - 1 };
        loop {
            if let Some(d) = split_by(graph, &NodeSet::from_mask(s), balance) {
                return Some(d);
            }
            if k == 0 {
                break;
            }
            let c = s & s.wrapping_neg();
            let r = s + c;
            s = (((r ^ s) >> 2) / c) | r;
            if s >> n != 0 {
                break;
            }
        }
    }
    None
}

fn bfs_levels(graph: &Graph, root: usize) -> Vec<Option<usize>> {
    let mut level = vec![None; graph.node_count()];
    level[root] = Some(0);
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let d = level[v].unwrap();
        for &w in graph.neighbors(v) {
            if level[w].is_none() {
                level[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    level
}

fn level_cut(graph: &Graph, balance: f64) -> Option<SeparatorDecomposition> {
    let n = graph.node_count();
    let roots: Vec<usize> = if n <= 512 { (0..n).collect() } else { (0..64).map(|i| i * n / 64).collect() };
    let mut best: Option<(usize, SeparatorDecomposition)> = None;
    for root in roots {
        let level = bfs_levels(graph, root);
        let depth = level.iter().flatten().copied().max().unwrap_or(0);
        for cut in 1..depth {
            let sep: NodeSet = (0..n).filter(|&v| level[v] == Some(cut)).collect();
            if best.as_ref().is_some_and(|(size, _)| sep.len() >= *size) {
                continue;
            }
            if let Some(d) = split_by(graph, &sep, balance) {
                best = Some((sep.len(), d));
            }
        }
    }
    best.map(|(_, d)| d).or_else(|| {
        // all nodes but one non-adjacent pair
        let (u, v) = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .find(|&(u, v)| !graph.has_edge(u, v))?;
        if limit(balance, n) == 0 {
            return None;
        }
        let sep: NodeSet = (0..n).filter(|&w| w != u && w != v).collect();
        Some(build(n, &sep, &[u], balance))
    })
}

/// Used when no split leaves nodes on both sides: `B` is the separator alone.
fn degenerate(graph: &Graph, balance: f64) -> SeparatorDecomposition {
    let n = graph.node_count();
    let keep = limit(balance, n).min(n - 1);
    let sep: NodeSet = (keep..n).collect();
    let side_a: Vec<usize> = (0..keep).collect();
    let mut d = build(n, &sep, &side_a, balance);
    d.part_b = sep;
    d
}
