//! Text formats shared by the CLI and the tests.
//!
//! Graphs: a `n e` header, then `e` lines `u v` (or `u v w` when weighted).
//! Structures: one block per line, ids space separated. Lines starting with
//! `#` and blank lines are skipped everywhere.

use std::fmt::Write as _;

use crate::error::{parse_err, Result};
use crate::graph::{BoundaryConstraint, CoalitionStructure, Graph, NodeSet};
use crate::valuation::{EdgeSumValuation, TableValuation, Value};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn numbers<T: std::str::FromStr>(line_no: usize, line: &str) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(line_no, format!("bad number `{t}`"))))
        .collect()
}

fn read_edges(text: &str, weighted: bool) -> Result<(Graph, Vec<Value>)> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(0, "missing `n e` header"))?;
    let header: Vec<usize> = numbers(hl, header)?;
    let [n, e] = header[..] else {
        return Err(parse_err(hl, "header must be `n e`"));
    };
    let width = if weighted { 3 } else { 2 };
    let mut edges = Vec::with_capacity(e);
    let mut weights = Vec::with_capacity(e);
    for (ln, line) in lines {
        let row: Vec<i64> = numbers(ln, line)?;
        if row.len() != width {
            return Err(parse_err(ln, format!("expected {width} fields")));
        }
        if row[0] < 0 || row[1] < 0 {
            return Err(parse_err(ln, "negative node id"));
        }
        let (u, v) = (row[0] as usize, row[1] as usize);
        if u >= v || v >= n {
            return Err(parse_err(ln, format!("edge {u} {v} needs u < v < {n}")));
        }
        edges.push((u, v));
        weights.push(if weighted { row[2] } else { 1 });
    }
    if edges.len() != e {
        return Err(parse_err(0, format!("header promises {e} edges, found {}", edges.len())));
    }
    let graph = Graph::new(n, edges).map_err(|err| parse_err(0, err.to_string()))?;
    Ok((graph, weights))
}

pub fn read_graph(text: &str) -> Result<Graph> {
    read_edges(text, false).map(|(g, _)| g)
}

pub fn read_weighted_graph(text: &str) -> Result<(Graph, EdgeSumValuation)> {
    let (graph, weights) = read_edges(text, true)?;
    let v = EdgeSumValuation::new(&graph, &weights)?;
    Ok((graph, v))
}

pub fn write_graph(graph: &Graph) -> String {
    let mut out = format!("{} {}\n", graph.node_count(), graph.edge_count());
    for &(u, v) in graph.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn write_weighted_graph(graph: &Graph, weights: &EdgeSumValuation) -> String {
    let mut out = format!("{} {}\n", graph.node_count(), graph.edge_count());
    for (&(u, v), w) in graph.edges().iter().zip(weights.weights_for(graph)) {
        let _ = writeln!(out, "{u} {v} {w}");
    }
    out
}

/// Blocks sorted by minimum id; each block's ids ascending.
pub fn write_structure(cs: &CoalitionStructure) -> String {
    let mut out = String::new();
    for b in cs.blocks() {
        let ids: Vec<String> = b.iter().map(|v| v.to_string()).collect();
        out.push_str(&ids.join(" "));
        out.push('\n');
    }
    out
}

/// Parses blocks without checking which nodes they cover. Overlapping
/// blocks give `InvalidStructure`.
pub fn read_structure(text: &str) -> Result<CoalitionStructure> {
    let mut blocks = Vec::new();
    for (ln, line) in content_lines(text) {
        let ids: Vec<usize> = numbers(ln, line)?;
        let block: NodeSet = ids.iter().copied().collect();
        if block.len() != ids.len() {
            return Err(parse_err(ln, "repeated node in block"));
        }
        blocks.push(block);
    }
    CoalitionStructure::new(blocks)
}

/// A constraint file lists the required blocks over its domain, in the
/// structure format.
pub fn read_constraint(text: &str, n: usize) -> Result<BoundaryConstraint> {
    let c = BoundaryConstraint::new(read_structure(text)?);
    c.check_range(n).map_err(|e| parse_err(0, e.to_string()))?;
    Ok(c)
}

/// Lines `id id ... value`; subsets not listed are worth 0.
pub fn read_table_valuation(text: &str, n: usize) -> Result<TableValuation> {
    let mut entries = Vec::new();
    for (ln, line) in content_lines(text) {
        let row: Vec<i64> = numbers(ln, line)?;
        let Some((&value, ids)) = row.split_last() else { continue };
        if ids.is_empty() {
            return Err(parse_err(ln, "entry needs at least one node"));
        }
        if ids.iter().any(|&i| i < 0 || i as usize >= n) {
            return Err(parse_err(ln, format!("node outside 0..{n}")));
        }
        let set: NodeSet = ids.iter().map(|&i| i as usize).collect();
        if set.len() != ids.len() {
            return Err(parse_err(ln, "repeated node in subset"));
        }
        entries.push((set, value));
    }
    TableValuation::from_entries(n, entries)
}
