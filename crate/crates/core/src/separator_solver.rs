//! Divide-and-conquer solver over balanced separators.
//!
//! A subproblem is a node set `H` with boundary `T ⊆ H` and two partitions
//! of `T`: `conn`, the classes that must end up in one connected piece, and
//! `blk`, a coarsening of `conn` saying which pieces are later glued into the
//! same coalition through nodes outside `H`. A solution partitions `H` into
//! connected pieces inducing `conn` on `T`; its value sums the valuation over
//! pieces grouped by `blk` (pieces away from `T` stand alone).
//!
//! At a split with separator `S`, the solver guesses how the nodes of
//! `T ∪ S` are grouped into coalitions (`psi`), then how each side's pieces
//! connect the boundary nodes on that side, solves the `A` side with the
//! current valuation and the `B` side with the valuation induced by the `A`
//! side's coalitions, and keeps the best combination.
//!
//! The value bookkeeping is exact when the valuation is independent of
//! disconnected members and additive over unions of sets with no edge
//! between them, which covers edge sums with per-node constants.

use std::time::{Duration, Instant};

use rustc_hash::FxHashMap as HashMap;

use crate::enumeration::{connected_sets, constraint_masks, for_each_connected_set, Solution};
use crate::error::{GcsgError, Result};
use crate::graph::{BoundaryConstraint, CoalitionStructure, Graph, NodeSet};
use crate::separator::{separate, SeparatorDecomposition, DEFAULT_BALANCE};
use crate::valuation::{structure_value, InducedValuation, Valuation, Value};

/// How boundary structures are generated at each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryEnumeration {
    #[default]
    AllPartitions,
    /// Only non-crossing structures with respect to ascending node ids.
    /// Sound only when the ids follow the outer face of a planar embedding
    /// (every node on that face), as for cycles and outerplanar graphs.
    NonCrossing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// subproblems with at most this many nodes are solved by exhaustion
    pub base_threshold: usize,
    pub balance: f64,
    pub boundary_enumeration: BoundaryEnumeration,
    /// generate coalition guesses for the separator by filtering every
    /// partition of the boundary instead of extending the given one
    pub naive_boundary: bool,
    /// largest subproblem solved by exhaustion when no proper split exists
    pub max_exhaustive: usize,
    pub max_subproblems: usize,
    pub time_limit: Option<Duration>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            base_threshold: 8,
            balance: DEFAULT_BALANCE,
            boundary_enumeration: BoundaryEnumeration::AllPartitions,
            naive_boundary: false,
            max_exhaustive: 16,
            max_subproblems: 20_000_000,
            time_limit: None,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if self.base_threshold < 2 {
            return Err(GcsgError::InvalidArgument("base threshold must be at least 2".into()));
        }
        if !(self.balance > 0.0 && self.balance < 1.0) {
            return Err(GcsgError::InvalidArgument(format!("balance {} not in (0,1)", self.balance)));
        }
        Ok(())
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(v)
    })
}

fn canonical(mut classes: Vec<u64>) -> Vec<u64> {
    classes.retain(|&c| c != 0);
    classes.sort_unstable_by_key(|c| c.trailing_zeros());
    classes
}

fn restrict(classes: &[u64], mask: u64) -> Vec<u64> {
    canonical(classes.iter().map(|&c| c & mask).collect())
}

/// Whether no two classes interleave along ascending node ids.
fn noncrossing(classes: &[u64]) -> bool {
    let mut owner = [usize::MAX; 64];
    let mut last = vec![0usize; classes.len()];
    let mut all = 0u64;
    for (i, &c) in classes.iter().enumerate() {
        for v in bits(c) {
            owner[v] = i;
        }
        last[i] = 63 - c.leading_zeros() as usize;
        all |= c;
    }
    let mut stack: Vec<usize> = Vec::new();
    let mut seen = 0u64;
    for v in bits(all) {
        let c = owner[v];
        if seen >> c & 1 == 0 {
            seen |= 1 << c;
        } else if stack.last() != Some(&c) {
            return false;
        } else {
            stack.pop();
        }
        if last[c] != v {
            stack.push(c);
        }
    }
    true
}

/// Every partition of the nodes of `mask`, as class masks.
fn partitions_of(mask: u64, out: &mut Vec<Vec<u64>>) {
    fn go(rest: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 0 {
            out.push(canonical(cur.clone()));
            return;
        }
        let v = rest.trailing_zeros();
        let bit = 1u64 << v;
        for i in 0..cur.len() {
            cur[i] |= bit;
            go(rest & !bit, cur, out);
            cur[i] &= !bit;
        }
        cur.push(bit);
        go(rest & !bit, cur, out);
        cur.pop();
    }
    go(mask, &mut Vec::new(), out);
}

/// Coalition guesses on `t ∪ s` that agree with `blk` on `t`: each node of
/// `s` outside `t` joins a class of `blk` or a class of its own.
fn extend_blocks(blk: &[u64], t: u64, s: u64, naive: bool) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    if naive {
        let mut all = Vec::new();
        partitions_of(t | s, &mut all);
        let want = canonical(blk.to_vec());
        out.extend(all.into_iter().filter(|p| restrict(p, t) == want));
        return out;
    }
    fn go(new: &[usize], cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        let Some((&x, rest)) = new.split_first() else {
            out.push(canonical(cur.clone()));
            return;
        };
        let bit = 1u64 << x;
        for i in 0..cur.len() {
            cur[i] |= bit;
            go(rest, cur, out);
            cur[i] &= !bit;
        }
        cur.push(bit);
        go(rest, cur, out);
        cur.pop();
    }
    let new: Vec<usize> = bits(s & !t).collect();
    go(&new, &mut blk.to_vec(), &mut out);
    out
}

/// Refinements of `psi` (restricted to one side) in which no class holds
/// nodes of two different `conn` classes.
fn refinements(psi: &[u64], conn: &[u64]) -> Vec<Vec<u64>> {
    let conn_of = |v: usize| conn.iter().position(|&c| c >> v & 1 == 1);
    let mut per_class: Vec<Vec<Vec<u64>>> = Vec::new();
    for &k in psi {
        let mut parts = Vec::new();
        partitions_of(k, &mut parts);
        parts.retain(|p| {
            p.iter().all(|&c| {
                let mut seen = None;
                bits(c).filter_map(conn_of).all(|x| *seen.get_or_insert(x) == x)
            })
        });
        per_class.push(parts);
    }
    let mut out = vec![Vec::new()];
    for options in per_class {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for o in &options {
                let mut p: Vec<u64> = prefix.clone();
                p.extend_from_slice(o);
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(canonical).collect()
}

/// Small union-find over node ids below 64.
struct Dsu([u8; 64]);

impl Dsu {
    fn new() -> Self {
        let mut p = [0u8; 64];
        for (i, x) in p.iter_mut().enumerate() {
            *x = i as u8;
        }
        Dsu(p)
    }

    fn find(&mut self, v: usize) -> usize {
        let mut r = v;
        while self.0[r] as usize != r {
            r = self.0[r] as usize;
        }
        let mut x = v;
        while self.0[x] as usize != r {
            let next = self.0[x] as usize;
            self.0[x] = r as u8;
            x = next;
        }
        r
    }

    fn union_mask(&mut self, m: u64) {
        let mut it = bits(m);
        if let Some(first) = it.next() {
            let r = self.find(first);
            for v in it {
                let s = self.find(v);
                self.0[s] = r as u8;
            }
        }
    }
}

/// Whether the two sides' connection patterns glue into pieces that induce
/// `conn` on `t` and fit the coalition guess `psi`.
fn compatible(t: u64, conn: &[u64], psi: &[u64], a: &[u64], b: &[u64]) -> bool {
    let mut dsu = Dsu::new();
    for &c in a.iter().chain(b) {
        dsu.union_mask(c);
    }
    // every conn class glued, distinct classes kept apart
    let mut roots = Vec::with_capacity(conn.len());
    for &c in conn {
        let mut it = bits(c);
        let r = dsu.find(it.next().unwrap());
        if it.any(|v| dsu.find(v) != r) || roots.contains(&r) {
            return false;
        }
        roots.push(r);
    }
    for &k in psi {
        let mut comps: Vec<usize> = bits(k).map(|v| dsu.find(v)).collect();
        comps.sort_unstable();
        comps.dedup();
        if k & t == 0 {
            if comps.len() != 1 {
                return false;
            }
        } else {
            let touching: Vec<usize> = bits(k & t).map(|v| dsu.find(v)).collect();
            if comps.iter().any(|r| !touching.contains(r)) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone)]
struct Sub {
    h: u64,
    t: u64,
    conn: Vec<u64>,
    blk: Vec<u64>,
}

#[derive(Debug, Clone)]
struct Partial {
    value: Value,
    pieces: Vec<u64>,
}

/// Groups pieces into coalitions: pieces meeting `t` by the `blk` class of
/// their boundary nodes, the others on their own.
fn group_pieces(pieces: &[u64], t: u64, blk: &[u64]) -> Vec<u64> {
    let mut grouped = vec![0u64; blk.len()];
    let mut out = Vec::new();
    for &p in pieces {
        match blk.iter().position(|&k| k & p & t != 0) {
            Some(i) => grouped[i] |= p,
            None => out.push(p),
        }
    }
    out.extend(grouped.into_iter().filter(|&g| g != 0));
    out
}

fn merge_pieces(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = a.to_vec();
    for &p in b {
        let mut merged = p;
        out.retain(|&q| {
            if q & merged != 0 {
                merged |= q;
                false
            } else {
                true
            }
        });
        out.push(merged);
    }
    canonical(out)
}

/// Subproblem `(h, t, conn, blk)`. Cached pieces are reused under other
/// induced valuations of the same subproblem and re-evaluated: for additive
/// valuations those differ by a constant per `blk` class, so the argmax holds.
type MemoKey = (u64, u64, Vec<u64>, Vec<u64>);

struct Ctx<'g> {
    graph: &'g Graph,
    memo: HashMap<MemoKey, Option<Partial>>,
    adj: Vec<u64>,
    root: &'g dyn Valuation,
    config: &'g SolverConfig,
    /// best value of a node set split into connected pieces, and the piece
    /// holding its lowest node
    rest_memo: HashMap<u64, (Value, u64)>,
    splits: HashMap<u64, Option<(u64, u64, u64)>>,
    subproblems: usize,
    deadline: Option<Instant>,
}

fn eval(valuation: &dyn Valuation, mask: u64) -> Value {
    let mut buf = [0usize; 64];
    let mut k = 0;
    for v in bits(mask) {
        buf[k] = v;
        k += 1;
    }
    valuation.evaluate(&buf[..k])
}

impl<'g> Ctx<'g> {
    fn tick(&mut self) -> Result<()> {
        self.subproblems += 1;
        if self.subproblems > self.config.max_subproblems {
            return Err(GcsgError::BudgetExceeded(format!(
                "more than {} subproblems",
                self.config.max_subproblems
            )));
        }
        if self.deadline.is_some_and(|d| Instant::now() > d) {
            return Err(GcsgError::BudgetExceeded("time limit reached".into()));
        }
        Ok(())
    }

    /// Proper split `(A, B, S)` of `h`, as root-id masks.
    fn split(&mut self, h: u64) -> Option<(u64, u64, u64)> {
        if let Some(&s) = self.splits.get(&h) {
            return s;
        }
        let (local, map) = self.graph.induced_subgraph(&NodeSet::from_mask(h));
        let d = separate(&local, self.config.balance);
        let to_mask = |set: &NodeSet| set.iter().fold(0u64, |m, v| m | 1 << map[v]);
        let out = d.is_proper().then(|| (to_mask(&d.part_a), to_mask(&d.part_b), to_mask(&d.separator)));
        self.splits.insert(h, out);
        out
    }

    /// Best partition of `rest` into connected pieces under the root valuation.
    fn best_rest(&mut self, rest: u64) -> Value {
        if rest == 0 {
            return 0;
        }
        if let Some(&(v, _)) = self.rest_memo.get(&rest) {
            return v;
        }
        let root = rest.trailing_zeros() as usize;
        let mut best = (Value::MIN, 0);
        for s in connected_sets(&self.adj, root, rest) {
            let value = eval(self.root, s) + self.best_rest(rest & !s);
            if value > best.0 {
                best = (value, s);
            }
        }
        self.rest_memo.insert(rest, best);
        best.0
    }

    fn rest_pieces(&mut self, mut rest: u64, out: &mut Vec<u64>) {
        while rest != 0 {
            self.best_rest(rest);
            let piece = self.rest_memo[&rest].1;
            out.push(piece);
            rest &= !piece;
        }
    }

    /// Exhaustive search: a connected piece around each `conn` class, then
    /// the best partition of what is left.
    fn base(&mut self, sub: &Sub, valuation: &dyn Valuation) -> Result<Option<Partial>> {
        let free = sub.h & !sub.t;
        let mut best: Option<(Value, Vec<u64>)> = None;
        let mut chosen = Vec::with_capacity(sub.conn.len());
        self.place(sub, valuation, free, &mut chosen, &mut best);
        Ok(best.map(|(value, mut pieces)| {
            let rest = sub.h & !pieces.iter().fold(0, |m, &p| m | p);
            self.rest_pieces(rest, &mut pieces);
            Partial { value, pieces: canonical(pieces) }
        }))
    }

    fn place(
        &mut self,
        sub: &Sub,
        valuation: &dyn Valuation,
        free: u64,
        chosen: &mut Vec<u64>,
        best: &mut Option<(Value, Vec<u64>)>,
    ) {
        let i = chosen.len();
        if i == sub.conn.len() {
            let mut value = self.best_rest(free);
            let mut grouped = [0u64; 64];
            for &p in chosen.iter() {
                let k = sub.blk.iter().position(|&k| k & p & sub.t != 0).expect("piece meets its class");
                grouped[k] |= p;
            }
            value += grouped[..sub.blk.len()].iter().map(|&b| eval(valuation, b)).sum::<Value>();
            if best.as_ref().is_none_or(|b| value > b.0) {
                *best = Some((value, chosen.clone()));
            }
            return;
        }
        let class = sub.conn[i];
        let root = class.trailing_zeros() as usize;
        let mut pieces = Vec::new();
        for_each_connected_set(&self.adj, root, free | class, &mut |p| {
            if p & class == class {
                pieces.push(p);
            }
        });
        for piece in pieces {
            chosen.push(piece);
            self.place(sub, valuation, free & !piece, chosen, best);
            chosen.pop();
        }
    }

    fn solve_memo(&mut self, sub: Sub, valuation: &dyn Valuation) -> Result<Option<Partial>> {
        let key = (sub.h, sub.t, sub.conn, sub.blk);
        if let Some(x) = self.memo.get(&key) {
            return Ok(x.as_ref().map(|p| {
                let value = group_pieces(&p.pieces, key.1, &key.3).into_iter().map(|g| eval(valuation, g)).sum();
                Partial { value, pieces: p.pieces.clone() }
            }));
        }
        let sub = Sub { h: key.0, t: key.1, conn: key.2.clone(), blk: key.3.clone() };
        let x = self.solve(&sub, valuation)?;
        self.memo.insert(key, x.clone());
        Ok(x)
    }

    fn solve(&mut self, sub: &Sub, valuation: &dyn Valuation) -> Result<Option<Partial>> {
        self.tick()?;
        let size = sub.h.count_ones() as usize;
        if size <= self.config.base_threshold {
            return self.base(sub, valuation);
        }
        let Some((a, b, s)) = self.split(sub.h) else {
            if size <= self.config.max_exhaustive {
                return self.base(sub, valuation);
            }
            return Err(GcsgError::BudgetExceeded(format!(
                "no proper separator for a {size}-node subproblem"
            )));
        };
        let noncrossing_only = self.config.boundary_enumeration == BoundaryEnumeration::NonCrossing;
        let (ta, tb) = ((sub.t & a) | s, (sub.t & b) | s);
        let b_side = NodeSet::from_mask(b);
        let mut best: Option<Partial> = None;

        for psi in extend_blocks(&sub.blk, sub.t, s, self.config.naive_boundary) {
            if noncrossing_only && !noncrossing(&psi) {
                continue;
            }
            let (psi_a, psi_b) = (restrict(&psi, ta), restrict(&psi, tb));
            let conn_a = restrict(&sub.conn, ta);
            let conn_b = restrict(&sub.conn, tb);
            let keep = |p: &Vec<u64>| !noncrossing_only || noncrossing(p);
            let a_options: Vec<Vec<u64>> = refinements(&psi_a, &conn_a).into_iter().filter(keep).collect();
            let b_options: Vec<Vec<u64>> = refinements(&psi_b, &conn_b).into_iter().filter(keep).collect();
            for a_conn in &a_options {
                let pairs: Vec<&Vec<u64>> =
                    b_options.iter().filter(|b_conn| compatible(sub.t, &sub.conn, &psi, a_conn, b_conn)).collect();
                if pairs.is_empty() {
                    continue;
                }
                let child = Sub { h: a, t: ta, conn: a_conn.clone(), blk: psi_a.clone() };
                let Some(a_sol) = self.solve_memo(child, valuation)? else { continue };
                let a_blocks: Vec<u64> =
                    canonical(group_pieces(&a_sol.pieces, ta, &psi_a).into_iter().filter(|&g| g & s != 0).collect());
                let a_structure = CoalitionStructure::from_blocks_unchecked(
                    a_blocks.iter().map(|&m| NodeSet::from_mask(m)).collect(),
                );
                let induced = InducedValuation::new(valuation, &a_structure, b_side.clone());
                for b_conn in pairs {
                    let child = Sub { h: b, t: tb, conn: b_conn.clone(), blk: psi_b.clone() };
                    let Some(b_sol) = self.solve_memo(child, &induced)? else { continue };
                    let value = a_sol.value + b_sol.value;
                    if best.as_ref().is_none_or(|cur| value > cur.value) {
                        best = Some(Partial { value, pieces: merge_pieces(&a_sol.pieces, &b_sol.pieces) });
                    }
                }
            }
        }
        Ok(best)
    }
}

/// Optimal connected structure inducing the constraint, or `None` when no
/// connected structure does.
pub fn solve_separator(
    graph: &Graph,
    valuation: &dyn Valuation,
    constraint: &BoundaryConstraint,
    config: &SolverConfig,
) -> Result<Option<Solution>> {
    config.validate()?;
    let n = graph.node_count();
    if n > 64 {
        return Err(GcsgError::CapExceeded { what: "separator solver", n, cap: 64 });
    }
    if !graph.is_connected() {
        return Err(GcsgError::Disconnected);
    }
    if n == 0 {
        return Ok(Some(Solution { structure: CoalitionStructure::empty(), value: 0 }));
    }
    constraint_masks(n, constraint)?;
    let classes: Vec<u64> = canonical(constraint.structure().blocks().iter().map(NodeSet::to_mask).collect());
    let mut ctx = Ctx {
        graph,
        memo: HashMap::default(),
        adj: graph.adjacency_masks(),
        root: valuation,
        config,
        rest_memo: HashMap::default(),
        splits: HashMap::default(),
        subproblems: 0,
        deadline: config.time_limit.map(|d| Instant::now() + d),
    };
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let top = Sub { h: full, t: constraint.domain().to_mask(), conn: classes.clone(), blk: classes };
    let Some(found) = ctx.solve(&top, valuation)? else {
        return Ok(None);
    };
    let structure =
        CoalitionStructure::new(found.pieces.iter().map(|&m| NodeSet::from_mask(m)).collect())?;
    let value = structure_value(valuation, &structure);
    Ok(Some(Solution { structure, value }))
}

/// One boundary guess at the top split: the coalition pattern on the
/// constraint domain plus separator, and the connection patterns each side
/// must realize.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryPair {
    pub blocks: CoalitionStructure,
    pub a_side: CoalitionStructure,
    pub b_side: CoalitionStructure,
}

fn to_structure(classes: &[u64]) -> CoalitionStructure {
    CoalitionStructure::from_blocks_unchecked(classes.iter().map(|&m| NodeSet::from_mask(m)).collect())
}

/// The separator the solver uses at the top level and every compatible
/// boundary guess it enumerates there.
pub fn top_level_pairs(
    graph: &Graph,
    constraint: &BoundaryConstraint,
    config: &SolverConfig,
) -> Result<(SeparatorDecomposition, Vec<BoundaryPair>)> {
    config.validate()?;
    let n = graph.node_count();
    if n > 64 {
        return Err(GcsgError::CapExceeded { what: "separator solver", n, cap: 64 });
    }
    constraint_masks(n, constraint)?;
    let d = separate(graph, config.balance);
    let (a, b, s) = (d.part_a.to_mask(), d.part_b.to_mask(), d.separator.to_mask());
    let t = constraint.domain().to_mask();
    let classes: Vec<u64> = canonical(constraint.structure().blocks().iter().map(NodeSet::to_mask).collect());
    let (ta, tb) = ((t & a) | s, (t & b) | s);
    let noncrossing_only = config.boundary_enumeration == BoundaryEnumeration::NonCrossing;
    let mut out = Vec::new();
    for psi in extend_blocks(&classes, t, s, config.naive_boundary) {
        if noncrossing_only && !noncrossing(&psi) {
            continue;
        }
        let (psi_a, psi_b) = (restrict(&psi, ta), restrict(&psi, tb));
        let a_opts = refinements(&psi_a, &restrict(&classes, ta));
        let b_opts = refinements(&psi_b, &restrict(&classes, tb));
        for x in &a_opts {
            for y in &b_opts {
                if (!noncrossing_only || (noncrossing(x) && noncrossing(y))) && compatible(t, &classes, &psi, x, y) {
                    out.push(BoundaryPair { blocks: to_structure(&psi), a_side: to_structure(x), b_side: to_structure(y) });
                }
            }
        }
    }
    Ok((d, out))
}
