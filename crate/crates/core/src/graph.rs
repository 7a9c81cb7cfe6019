//! Simple undirected graphs, node sets and coalition structures.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{GcsgError, Result};

/// A set of node ids, kept sorted and free of duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeSet(Vec<usize>);

impl NodeSet {
    pub fn new() -> Self {
        NodeSet(Vec::new())
    }

    pub fn singleton(v: usize) -> Self {
        NodeSet(vec![v])
    }

    /// Builds the set of bit positions of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        let mut out = Vec::with_capacity(mask.count_ones() as usize);
        let mut m = mask;
        while m != 0 {
            out.push(m.trailing_zeros() as usize);
            m &= m - 1;
        }
        NodeSet(out)
    }

    /// Bitmask of the members. Panics if a member is 64 or larger.
    pub fn to_mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &v| {
            assert!(v < 64, "node {v} does not fit in a 64-bit mask");
            m | (1u64 << v)
        })
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn min(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn insert(&mut self, v: usize) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, v);
                true
            }
        }
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        self.iter().filter(|&v| other.contains(v)).collect()
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        self.iter().filter(|&v| !other.contains(v)).collect()
    }

    pub fn intersects(&self, other: &NodeSet) -> bool {
        self.iter().any(|v| other.contains(v))
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        NodeSet(v)
    }
}

impl From<Vec<usize>> for NodeSet {
    fn from(v: Vec<usize>) -> Self {
        v.into_iter().collect()
    }
}

impl<const N: usize> From<[usize; N]> for NodeSet {
    fn from(v: [usize; N]) -> Self {
        v.into_iter().collect()
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// A partition of a ground set into nonempty, pairwise disjoint blocks.
///
/// Blocks are stored sorted by their minimum node id, which makes equality
/// of structures independent of the order blocks were supplied in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoalitionStructure {
    blocks: Vec<NodeSet>,
}

impl CoalitionStructure {
    /// Validates disjointness and non-emptiness, then canonicalizes the block order.
    pub fn new(blocks: Vec<NodeSet>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for b in &blocks {
            if b.is_empty() {
                return Err(GcsgError::InvalidStructure("empty block".into()));
            }
            for v in b.iter() {
                if !seen.insert(v) {
                    return Err(GcsgError::InvalidStructure(format!(
                        "node {v} appears in more than one block"
                    )));
                }
            }
        }
        Ok(Self::from_blocks_unchecked(blocks))
    }

    pub(crate) fn from_blocks_unchecked(mut blocks: Vec<NodeSet>) -> Self {
        blocks.sort_by_key(|b| b.min());
        CoalitionStructure { blocks }
    }

    /// Structure whose blocks are the classes of `labels` restricted to `nodes`.
    pub fn from_labels(nodes: impl IntoIterator<Item = usize>, labels: &[usize]) -> Self {
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in nodes {
            groups.entry(labels[v]).or_default().push(v);
        }
        Self::from_blocks_unchecked(groups.into_values().map(NodeSet::from).collect())
    }

    pub fn empty() -> Self {
        CoalitionStructure { blocks: Vec::new() }
    }

    /// Every node of `ground` in its own block.
    pub fn singletons(ground: &NodeSet) -> Self {
        Self::from_blocks_unchecked(ground.iter().map(NodeSet::singleton).collect())
    }

    pub fn grand(ground: &NodeSet) -> Self {
        if ground.is_empty() {
            Self::empty()
        } else {
            Self::from_blocks_unchecked(vec![ground.clone()])
        }
    }

    pub fn blocks(&self) -> &[NodeSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Union of all blocks.
    pub fn ground(&self) -> NodeSet {
        self.blocks.iter().flat_map(|b| b.iter()).collect()
    }

    /// Checks that the blocks cover exactly `0..n`.
    pub fn check_covers(&self, n: usize) -> Result<()> {
        let ground = self.ground();
        if ground.len() != n || ground.as_slice().iter().enumerate().any(|(i, &v)| i != v) {
            let missing: Vec<usize> = (0..n).filter(|&v| !ground.contains(v)).collect();
            let extra: Vec<usize> = ground.iter().filter(|&v| v >= n).collect();
            return Err(GcsgError::InvalidStructure(format!(
                "structure does not partition 0..{n} (missing {missing:?}, out of range {extra:?})"
            )));
        }
        Ok(())
    }

    /// The block containing `v`, if any.
    pub fn block_of(&self, v: usize) -> Option<&NodeSet> {
        self.blocks.iter().find(|b| b.contains(v))
    }

    /// Structure induced on `subset`: nonempty intersections of the blocks.
    pub fn restrict(&self, subset: &NodeSet) -> CoalitionStructure {
        Self::from_blocks_unchecked(
            self.blocks
                .iter()
                .map(|b| b.intersection(subset))
                .filter(|b| !b.is_empty())
                .collect(),
        )
    }

    /// Label vector of length `n`; nodes outside the structure get `usize::MAX`.
    pub fn labels(&self, n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for (i, b) in self.blocks.iter().enumerate() {
            for v in b.iter() {
                out[v] = i;
            }
        }
        out
    }
}

impl fmt::Display for CoalitionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            let line: Vec<String> = b.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Simple undirected graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range ids.
    /// Edges are stored as `(min, max)` in the order given.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GcsgError::InvalidGraph(format!(
                    "edge ({u},{v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                return Err(GcsgError::InvalidGraph(format!("self-loop at {u}")));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            adj[a].push(b);
            adj[b].push(a);
            list.push((a, b));
        }
        for (v, nb) in adj.iter_mut().enumerate() {
            nb.sort_unstable();
            if nb.windows(2).any(|w| w[0] == w[1]) {
                return Err(GcsgError::InvalidGraph(format!("duplicate edge at node {v}")));
            }
        }
        Ok(Graph { n, edges: list, adj })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new(), adj: vec![Vec::new(); n] }
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, edges).expect("complete graph is simple")
    }

    /// `rows x cols` grid, node `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        Graph::new(rows * cols, edges).expect("grid is simple")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn nodes(&self) -> NodeSet {
        NodeSet((0..self.n).collect())
    }

    /// Neighbourhood bitmasks; only valid for graphs with at most 64 nodes.
    pub fn adjacency_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64, "mask representation needs at most 64 nodes");
        self.adj
            .iter()
            .map(|nb| nb.iter().fold(0u64, |m, &u| m | (1 << u)))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || connected_components(self, &self.nodes()).len() == 1
    }

    /// Subgraph induced on `nodes`, relabelled to `0..k` in ascending order.
    /// Returns the subgraph and the local-to-global id map.
    pub fn induced_subgraph(&self, nodes: &NodeSet) -> (Graph, Vec<usize>) {
        let map: Vec<usize> = nodes.as_slice().to_vec();
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in map.iter().enumerate() {
            local[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| local[u] != usize::MAX && local[v] != usize::MAX)
            .map(|&(u, v)| (local[u], local[v]));
        (Graph::new(map.len(), edges).expect("induced subgraph is simple"), map)
    }
}

/// Connected components of the subgraph induced by `subset`, ordered by
/// ascending minimum node id.
pub fn connected_components(graph: &Graph, subset: &NodeSet) -> Vec<NodeSet> {
    let mut inside = vec![false; graph.node_count()];
    for v in subset.iter() {
        inside[v] = true;
    }
    let mut seen = vec![false; graph.node_count()];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in subset.iter() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut comp = Vec::new();
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for &u in graph.neighbors(v) {
                if inside[u] && !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        out.push(NodeSet::from(comp));
    }
    out
}

/// True iff every block of `cs` induces a connected subgraph.
///
/// The structure must partition the graph's node set exactly.
pub fn is_connected_structure(graph: &Graph, cs: &CoalitionStructure) -> Result<bool> {
    cs.check_covers(graph.node_count())?;
    Ok(cs.blocks().iter().all(|b| connected_components(graph, b).len() == 1))
}

/// Maximal 2-connected blocks of a connected graph; bridges are two-node blocks.
///
/// Blocks are returned sorted by their sorted member lists, so blocks sharing a
/// minimum articulation point keep a deterministic order.
pub fn biconnected_components(graph: &Graph) -> Result<Vec<NodeSet>> {
    let n = graph.node_count();
    if !graph.is_connected() {
        return Err(GcsgError::Disconnected);
    }
    if n <= 1 {
        return Ok(if n == 1 { vec![NodeSet::singleton(0)] } else { Vec::new() });
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut blocks = Vec::new();
    // (node, parent, next neighbour index)
    let mut stack: Vec<(usize, usize, usize)> = vec![(0, usize::MAX, 0)];
    disc[0] = 0;
    low[0] = 0;
    timer += 1;
    while let Some(&mut (v, parent, ref mut idx)) = stack.last_mut() {
        if *idx < graph.degree(v) {
            let u = graph.neighbors(v)[*idx];
            *idx += 1;
            if u == parent {
                continue;
            }
            if disc[u] == usize::MAX {
                disc[u] = timer;
                low[u] = timer;
                timer += 1;
                edge_stack.push((v, u));
                stack.push((u, v, 0));
            } else if disc[u] < disc[v] {
                low[v] = low[v].min(disc[u]);
                edge_stack.push((v, u));
            }
        } else {
            stack.pop();
            if parent != usize::MAX {
                low[parent] = low[parent].min(low[v]);
                if low[v] >= disc[parent] {
                    let mut block = Vec::new();
                    while let Some((a, b)) = edge_stack.pop() {
                        block.push(a);
                        block.push(b);
                        if (a, b) == (parent, v) {
                            break;
                        }
                    }
                    blocks.push(NodeSet::from(block));
                }
            }
        }
    }
    blocks.sort();
    Ok(blocks)
}

/// Articulation points, ascending.
pub fn articulation_points(graph: &Graph) -> Result<NodeSet> {
    let blocks = biconnected_components(graph)?;
    let mut count = vec![0usize; graph.node_count()];
    for b in &blocks {
        for v in b.iter() {
            count[v] += 1;
        }
    }
    Ok((0..graph.node_count()).filter(|&v| count[v] > 1).collect())
}

/// A node subset `D` together with the partition of `D` a solution must induce.
///
/// The blocks of the required partition need not be connected.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BoundaryConstraint {
    domain: NodeSet,
    structure: CoalitionStructure,
}

impl Default for CoalitionStructure {
    fn default() -> Self {
        Self::empty()
    }
}

impl BoundaryConstraint {
    pub fn new(structure: CoalitionStructure) -> Self {
        BoundaryConstraint { domain: structure.ground(), structure }
    }

    /// Constraint over the empty set; satisfied by every structure.
    pub fn none() -> Self {
        Self::default()
    }

    pub fn domain(&self) -> &NodeSet {
        &self.domain
    }

    pub fn structure(&self) -> &CoalitionStructure {
        &self.structure
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    /// Whether `cs` induces exactly the required partition on the domain.
    pub fn is_satisfied_by(&self, cs: &CoalitionStructure) -> bool {
        cs.restrict(&self.domain) == self.structure
    }

    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.domain.iter().find(|&v| v >= n) {
            Some(v) => Err(GcsgError::InvalidArgument(format!("constraint node {v} out of range"))),
            None => Ok(()),
        }
    }
}
