//! Exhaustive enumeration of connected coalition structures, the exact
//! brute-force solver, and non-crossing boundary structures.

use std::collections::HashMap;

use crate::error::{GcsgError, Result};
use crate::graph::{BoundaryConstraint, CoalitionStructure, Graph, NodeSet};
use crate::valuation::{Valuation, Value};

pub const DEFAULT_STRUCTURE_CAP: usize = 12;
pub const DEFAULT_NONCROSSING_CAP: usize = 16;

/// An optimal structure together with its value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub structure: CoalitionStructure,
    pub value: Value,
}

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap || n > 64 {
        return Err(GcsgError::CapExceeded { what, n, cap: cap.min(64) });
    }
    Ok(())
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Calls `f` once for every connected set `S` with `root` in `S` and `S`
/// contained in `allowed`, in a fixed order. `root` must be in `allowed`.
pub(crate) fn for_each_connected_set(adj: &[u64], root: usize, allowed: u64, f: &mut impl FnMut(u64)) {
    fn grow(adj: &[u64], set: u64, frontier: u64, banned: u64, allowed: u64, f: &mut impl FnMut(u64)) {
        if frontier == 0 {
            f(set);
            return;
        }
        let v = frontier.trailing_zeros() as usize;
        let bit = 1u64 << v;
        // with v
        let with_set = set | bit;
        let with_frontier = (frontier & !bit) | (adj[v] & allowed & !with_set & !banned);
        grow(adj, with_set, with_frontier, banned, allowed, f);
        // without v
        grow(adj, set, frontier & !bit, banned | bit, allowed, f);
    }
    let set = 1u64 << root;
    grow(adj, set, adj[root] & allowed & !set, 0, allowed, f);
}

pub(crate) fn connected_sets(adj: &[u64], root: usize, allowed: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_connected_set(adj, root, allowed, &mut |s| out.push(s));
    out
}

fn structure_from_masks(masks: &[u64]) -> CoalitionStructure {
    CoalitionStructure::from_blocks_unchecked(masks.iter().map(|&m| NodeSet::from_mask(m)).collect())
}

struct Frame {
    remaining: u64,
    options: Vec<u64>,
    next: usize,
}

/// Lazy stream over all connected coalition structures of a graph.
///
/// The block holding the smallest unassigned node is chosen among all
/// connected sets of unassigned nodes containing it, then the rest is
/// enumerated recursively; every structure appears exactly once.
pub struct ConnectedStructures {
    adj: Vec<u64>,
    stack: Vec<Frame>,
    chosen: Vec<u64>,
    started: bool,
    n: usize,
}

impl ConnectedStructures {
    fn push_frame(&mut self, remaining: u64) {
        let root = remaining.trailing_zeros() as usize;
        let options = connected_sets(&self.adj, root, remaining);
        self.stack.push(Frame { remaining, options, next: 0 });
    }
}

impl Iterator for ConnectedStructures {
    type Item = CoalitionStructure;

    fn next(&mut self) -> Option<CoalitionStructure> {
        if !self.started {
            self.started = true;
            if self.n == 0 {
                return Some(CoalitionStructure::empty());
            }
            self.push_frame(full_mask(self.n));
        }
        loop {
            let depth = self.stack.len();
            let top = self.stack.last_mut()?;
            if top.next < top.options.len() {
                let set = top.options[top.next];
                top.next += 1;
                let rest = top.remaining & !set;
                self.chosen.truncate(depth - 1);
                self.chosen.push(set);
                if rest == 0 {
                    return Some(structure_from_masks(&self.chosen));
                }
                self.push_frame(rest);
            } else {
                self.stack.pop();
            }
        }
    }
}

/// Every connected coalition structure of `graph`, each exactly once.
pub fn enumerate_connected_structures(graph: &Graph, cap: usize) -> Result<ConnectedStructures> {
    check_cap("structure enumeration", graph.node_count(), cap)?;
    Ok(ConnectedStructures {
        adj: graph.adjacency_masks(),
        stack: Vec::new(),
        chosen: Vec::new(),
        started: false,
        n: graph.node_count(),
    })
}

/// Number of connected coalition structures.
pub fn count_connected_structures(graph: &Graph, cap: usize) -> Result<u128> {
    check_cap("structure enumeration", graph.node_count(), cap)?;
    let adj = graph.adjacency_masks();
    let mut memo: HashMap<u64, u128> = HashMap::new();
    fn count(adj: &[u64], rem: u64, memo: &mut HashMap<u64, u128>) -> u128 {
        if rem == 0 {
            return 1;
        }
        if let Some(&c) = memo.get(&rem) {
            return c;
        }
        let root = rem.trailing_zeros() as usize;
        let mut total = 0;
        for s in connected_sets(adj, root, rem) {
            total += count(adj, rem & !s, memo);
        }
        memo.insert(rem, total);
        total
    }
    Ok(count(&adj, full_mask(graph.node_count()), &mut memo))
}

/// Checks that the constraint is over the graph's nodes and returns, for
/// each node, the bitmask of its required class (0 outside the domain).
pub(crate) fn constraint_masks(n: usize, constraint: &BoundaryConstraint) -> Result<Vec<u64>> {
    constraint.check_range(n)?;
    let mut class = vec![0u64; n];
    for b in constraint.structure().blocks() {
        let m = b.to_mask();
        for v in b.iter() {
            class[v] = m;
        }
    }
    Ok(class)
}

/// Exact optimum by exhaustion over connected structures.
///
/// With a constraint, only structures inducing the required partition on its
/// domain are considered; `Ok(None)` means no connected structure does.
/// Among optimal structures the first in enumeration order is returned. The
/// search is the block-construction recursion of
/// [`enumerate_connected_structures`], memoized on the set of unassigned nodes.
pub fn solve_bruteforce(
    graph: &Graph,
    valuation: &dyn Valuation,
    constraint: Option<&BoundaryConstraint>,
    cap: usize,
) -> Result<Option<Solution>> {
    let n = graph.node_count();
    check_cap("brute-force solver", n, cap)?;
    let class = match constraint {
        Some(c) => constraint_masks(n, c)?,
        None => vec![0; n],
    };
    let domain: u64 = class.iter().fold(0, |m, &c| m | c);
    let adj = graph.adjacency_masks();
    let mut memo: HashMap<u64, Option<(Value, u64)>> = HashMap::new();

    fn best(
        adj: &[u64],
        class: &[u64],
        domain: u64,
        valuation: &dyn Valuation,
        rem: u64,
        memo: &mut HashMap<u64, Option<(Value, u64)>>,
    ) -> Option<Value> {
        if rem == 0 {
            return Some(0);
        }
        if let Some(entry) = memo.get(&rem) {
            return entry.map(|(v, _)| v);
        }
        let root = rem.trailing_zeros() as usize;
        let mut top: Option<(Value, u64)> = None;
        for s in connected_sets(adj, root, rem) {
            let hit = s & domain;
            if hit != 0 {
                let first = hit.trailing_zeros() as usize;
                if hit != class[first] {
                    continue;
                }
            }
            let Some(rest) = best(adj, class, domain, valuation, rem & !s, memo) else {
                continue;
            };
            let total = valuation.evaluate(NodeSet::from_mask(s).as_slice()) + rest;
            if top.is_none_or(|(v, _)| total > v) {
                top = Some((total, s));
            }
        }
        memo.insert(rem, top);
        top.map(|(v, _)| v)
    }

    let full = full_mask(n);
    let Some(value) = best(&adj, &class, domain, valuation, full, &mut memo) else {
        return Ok(None);
    };
    let mut blocks = Vec::new();
    let mut rem = full;
    while rem != 0 {
        let (_, s) = memo[&rem].expect("feasible path recorded");
        blocks.push(s);
        rem &= !s;
    }
    Ok(Some(Solution { structure: structure_from_masks(&blocks), value }))
}

/// Position label of a node in a non-crossing structure over an ordered set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryLabel {
    /// first member of a block with at least two members
    First,
    /// last member of such a block
    Last,
    /// neither first nor last
    Middle,
    /// singleton block
    Sole,
}

/// Labels each of `0..r` by its position in its block.
pub fn encode_labelling(cs: &CoalitionStructure, r: usize) -> Vec<BoundaryLabel> {
    let mut out = vec![BoundaryLabel::Sole; r];
    for b in cs.blocks() {
        let members = b.as_slice();
        if members.len() == 1 {
            continue;
        }
        for (i, &v) in members.iter().enumerate() {
            out[v] = if i == 0 {
                BoundaryLabel::First
            } else if i + 1 == members.len() {
                BoundaryLabel::Last
            } else {
                BoundaryLabel::Middle
            };
        }
    }
    out
}

/// Inverse of [`encode_labelling`] on non-crossing structures: middle and last
/// nodes join the innermost open block, like matching nested brackets.
/// Returns `None` for labellings that do not describe a partition.
pub fn decode_labelling(labels: &[BoundaryLabel]) -> Option<CoalitionStructure> {
    let mut open: Vec<Vec<usize>> = Vec::new();
    let mut blocks = Vec::new();
    for (v, l) in labels.iter().enumerate() {
        match l {
            BoundaryLabel::Sole => blocks.push(NodeSet::singleton(v)),
            BoundaryLabel::First => open.push(vec![v]),
            BoundaryLabel::Middle => open.last_mut()?.push(v),
            BoundaryLabel::Last => {
                let mut b = open.pop()?;
                b.push(v);
                blocks.push(NodeSet::from(b));
            }
        }
    }
    if !open.is_empty() {
        return None;
    }
    Some(CoalitionStructure::from_blocks_unchecked(blocks))
}

/// Whether `cs` is non-crossing with respect to the order of `order`.
/// Nodes of `cs` missing from `order` are ignored.
pub fn is_noncrossing(cs: &CoalitionStructure, order: &[usize]) -> bool {
    let labels: HashMap<usize, usize> = cs
        .blocks()
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.iter().map(move |v| (v, i)))
        .collect();
    let seq: Vec<usize> = order.iter().filter_map(|v| labels.get(v).copied()).collect();
    let mut last = HashMap::new();
    for (p, &b) in seq.iter().enumerate() {
        last.insert(b, p);
    }
    let mut seen = std::collections::HashSet::new();
    let mut stack: Vec<usize> = Vec::new();
    for (p, &b) in seq.iter().enumerate() {
        if seen.insert(b) {
            if last[&b] > p {
                stack.push(b);
            }
        } else {
            if stack.last() != Some(&b) {
                return false;
            }
            if last[&b] == p {
                stack.pop();
            }
        }
    }
    true
}

/// Lazy stream of the non-crossing partitions of `0..r`, generated from
/// their first/last/middle/sole labellings.
pub struct NoncrossingPartitions {
    r: usize,
    labels: Vec<BoundaryLabel>,
    // per position: index of the next label to try
    cursor: Vec<u8>,
    depth: Vec<usize>,
    done: bool,
}

const LABEL_ORDER: [BoundaryLabel; 4] =
    [BoundaryLabel::First, BoundaryLabel::Middle, BoundaryLabel::Last, BoundaryLabel::Sole];

impl Iterator for NoncrossingPartitions {
    type Item = CoalitionStructure;

    fn next(&mut self) -> Option<CoalitionStructure> {
        if self.done {
            return None;
        }
        loop {
            let pos = self.labels.len();
            if pos == self.r {
                let out = decode_labelling(&self.labels);
                self.labels.pop();
                self.depth.pop();
                if out.is_some() {
                    return out;
                }
                continue;
            }
            if self.cursor[pos] as usize >= LABEL_ORDER.len() {
                self.cursor[pos] = 0;
                if pos == 0 {
                    self.done = true;
                    return None;
                }
                self.labels.pop();
                self.depth.pop();
                continue;
            }
            let label = LABEL_ORDER[self.cursor[pos] as usize];
            self.cursor[pos] += 1;
            let open = *self.depth.last().unwrap_or(&0);
            let remaining = self.r - pos - 1;
            let next_open = match label {
                BoundaryLabel::First => open + 1,
                BoundaryLabel::Middle => {
                    if open == 0 {
                        continue;
                    }
                    open
                }
                BoundaryLabel::Last => {
                    if open == 0 {
                        continue;
                    }
                    open - 1
                }
                BoundaryLabel::Sole => open,
            };
            // every open block still needs its last node
            if next_open > remaining {
                continue;
            }
            self.labels.push(label);
            self.depth.push(next_open);
        }
    }
}

/// Non-crossing partitions of the ordered set `0..r`; empty for `r = 0`.
pub fn enumerate_noncrossing(r: usize, cap: usize) -> Result<NoncrossingPartitions> {
    if r > cap {
        return Err(GcsgError::CapExceeded { what: "non-crossing enumeration", n: r, cap });
    }
    Ok(NoncrossingPartitions {
        r,
        labels: Vec::with_capacity(r),
        cursor: vec![0; r],
        depth: Vec::with_capacity(r),
        done: r == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::EdgeSumValuation;

    #[test]
    fn structure_counts() {
        let one = Graph::empty(1);
        assert_eq!(enumerate_connected_structures(&one, 12).unwrap().count(), 1);
        let p3 = Graph::path(3);
        let all: Vec<_> = enumerate_connected_structures(&p3, 12).unwrap().collect();
        assert_eq!(all.len(), 4);
        assert!(!all.iter().any(|cs| cs.blocks().contains(&NodeSet::from([0, 2]))));
        assert_eq!(enumerate_connected_structures(&Graph::complete(4), 12).unwrap().count(), 15);
        assert_eq!(count_connected_structures(&Graph::path(4), 12).unwrap(), 8);
        assert_eq!(count_connected_structures(&Graph::complete(3), 12).unwrap(), 5);
        assert!(enumerate_connected_structures(&Graph::path(13), 12).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        let p3 = Graph::path(3);
        let up = EdgeSumValuation::new(&p3, &[1, 1]).unwrap();
        let sol = solve_bruteforce(&p3, &up, None, 12).unwrap().unwrap();
        assert_eq!(sol.value, 2);
        assert_eq!(sol.structure, CoalitionStructure::grand(&p3.nodes()));

        let mixed = EdgeSumValuation::new(&p3, &[1, -1]).unwrap();
        let sol = solve_bruteforce(&p3, &mixed, None, 12).unwrap().unwrap();
        assert_eq!(sol.value, 1);
        assert_eq!(
            sol.structure,
            CoalitionStructure::new(vec![NodeSet::from([0, 1]), NodeSet::from([2])]).unwrap()
        );

        let k4 = Graph::complete(4);
        let neg = EdgeSumValuation::uniform(&k4, -2);
        let sol = solve_bruteforce(&k4, &neg, None, 12).unwrap().unwrap();
        assert_eq!(sol.value, 0);
        assert_eq!(sol.structure, CoalitionStructure::singletons(&k4.nodes()));
    }

    #[test]
    fn bruteforce_constraints() {
        let p3 = Graph::path(3);
        let v = EdgeSumValuation::new(&p3, &[1, -1]).unwrap();
        let together =
            BoundaryConstraint::new(CoalitionStructure::new(vec![NodeSet::from([0, 2])]).unwrap());
        let sol = solve_bruteforce(&p3, &v, Some(&together), 12).unwrap().unwrap();
        assert_eq!(sol.value, 0);
        assert_eq!(sol.structure, CoalitionStructure::grand(&p3.nodes()));

        let apart = BoundaryConstraint::new(
            CoalitionStructure::new(vec![NodeSet::from([0]), NodeSet::from([1])]).unwrap(),
        );
        let sol = solve_bruteforce(&p3, &v, Some(&apart), 12).unwrap().unwrap();
        assert_eq!(sol.value, 0);

        let impossible = BoundaryConstraint::new(
            CoalitionStructure::new(vec![NodeSet::from([0, 2]), NodeSet::from([1])]).unwrap(),
        );
        assert_eq!(solve_bruteforce(&p3, &v, Some(&impossible), 12).unwrap(), None);
    }

    #[test]
    fn noncrossing_counts() {
        let counts: Vec<usize> =
            (0..=6).map(|r| enumerate_noncrossing(r, 16).unwrap().count()).collect();
        assert_eq!(counts, vec![0, 1, 2, 5, 14, 42, 132]);
        let two: Vec<_> = enumerate_noncrossing(2, 16).unwrap().collect();
        assert!(two.contains(&CoalitionStructure::grand(&NodeSet::from([0, 1]))));
        assert!(two.contains(&CoalitionStructure::singletons(&NodeSet::from([0, 1]))));
        assert!(enumerate_noncrossing(17, 16).is_err());
    }

    #[test]
    fn crossing_predicate() {
        let crossing =
            CoalitionStructure::new(vec![NodeSet::from([0, 2]), NodeSet::from([1, 3])]).unwrap();
        assert!(!is_noncrossing(&crossing, &[0, 1, 2, 3]));
        assert!(is_noncrossing(&crossing, &[0, 2, 1, 3]));
        let nested =
            CoalitionStructure::new(vec![NodeSet::from([0, 3]), NodeSet::from([1, 2])]).unwrap();
        assert!(is_noncrossing(&nested, &[0, 1, 2, 3]));
    }
}
