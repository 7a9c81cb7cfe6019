//! Edge-sum instances built from 3-CNF formulas, and the maps between
//! optimal structures and satisfying assignments.
//!
//! A hub node is joined with weight 1 to one node per literal occurrence.
//! Occurrences in the same clause, and complementary occurrences anywhere,
//! are joined with weight `-(3m+1)`. The optimum is `m` exactly when the
//! formula is satisfiable.

use std::collections::HashMap;
use std::fmt;

use crate::error::{parse_err, GcsgError, Result};
use crate::graph::{CoalitionStructure, Graph, NodeSet};
use crate::valuation::{structure_value, EdgeSumValuation, Value};

/// Literal over variables `1..=variable_count`; negative means negated.
pub type Literal = i32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf3 {
    variable_count: usize,
    clauses: Vec<[Literal; 3]>,
}

impl Cnf3 {
    pub fn new(variable_count: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        for (i, c) in clauses.iter().enumerate() {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > variable_count {
                    return Err(GcsgError::InvalidArgument(format!(
                        "clause {i}: literal {l} outside 1..={variable_count}"
                    )));
                }
            }
        }
        Ok(Cnf3 { variable_count, clauses })
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    /// `assignment[k]` is the value of variable `k + 1`.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.first_unsatisfied(assignment).is_none()
    }

    fn first_unsatisfied(&self, assignment: &[bool]) -> Option<usize> {
        let holds = |l: Literal| assignment[l.unsigned_abs() as usize - 1] == (l > 0);
        self.clauses.iter().position(|c| !c.iter().any(|&l| holds(l)))
    }

    /// DIMACS CNF: `c` comments, a `p cnf <vars> <clauses>` header, then
    /// 0-terminated clauses of exactly three literals.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut pending: Vec<Literal> = Vec::new();
        let mut pending_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if header.is_some() || parts.len() != 4 || parts[1] != "cnf" {
                    return Err(parse_err(line_no, "expected one `p cnf <vars> <clauses>` header"));
                }
                let vars = parts[2].parse().map_err(|_| parse_err(line_no, "bad variable count"))?;
                let count = parts[3].parse().map_err(|_| parse_err(line_no, "bad clause count"))?;
                header = Some((vars, count));
                continue;
            }
            if header.is_none() {
                return Err(parse_err(line_no, "clause before header"));
            }
            for tok in line.split_whitespace() {
                let l: Literal = tok.parse().map_err(|_| parse_err(line_no, format!("bad literal `{tok}`")))?;
                if pending.is_empty() {
                    pending_line = line_no;
                }
                if l != 0 {
                    pending.push(l);
                    continue;
                }
                if pending.len() != 3 {
                    return Err(parse_err(pending_line, format!("clause has {} literals, expected 3", pending.len())));
                }
                clauses.push([pending[0], pending[1], pending[2]]);
                pending.clear();
            }
        }
        let (vars, count) = header.ok_or_else(|| parse_err(0, "missing header"))?;
        if !pending.is_empty() {
            return Err(parse_err(pending_line, "clause not terminated by 0"));
        }
        if clauses.len() != count {
            return Err(parse_err(0, format!("header promises {count} clauses, found {}", clauses.len())));
        }
        Cnf3::new(vars, clauses).map_err(|e| parse_err(0, e.to_string()))
    }
}

impl fmt::Display for Cnf3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.variable_count, self.clauses.len())?;
        for c in &self.clauses {
            writeln!(f, "{} {} {} 0", c[0], c[1], c[2])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ReductionArtifact {
    pub cnf: Cnf3,
    pub graph: Graph,
    pub weights: EdgeSumValuation,
    pub hub: usize,
    /// `(clause, position) -> node`
    pub literal_nodes: HashMap<(usize, usize), usize>,
}

impl ReductionArtifact {
    pub fn clause_count(&self) -> usize {
        self.cnf.clauses.len()
    }

    pub fn node_of(&self, clause: usize, position: usize) -> usize {
        1 + 3 * clause + position
    }

    /// Sidecar lines `clause position node`, 0-based, in clause order.
    pub fn mapping_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.clause_count() {
            for j in 0..3 {
                out.push_str(&format!("{i} {j} {}\n", self.node_of(i, j)));
            }
        }
        out
    }
}

pub fn reduce_3sat(cnf: &Cnf3) -> Result<ReductionArtifact> {
    let m = cnf.clauses.len();
    if m == 0 {
        return Err(GcsgError::InvalidArgument("empty formula".into()));
    }
    let penalty = -(3 * m as Value + 1);
    let node = |i: usize, j: usize| 1 + 3 * i + j;
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for i in 0..m {
        for j in 0..3 {
            edges.push((0, node(i, j)));
            weights.push(1);
        }
    }
    let occurrences: Vec<(usize, Literal)> =
        (0..m).flat_map(|i| (0..3).map(move |j| (node(i, j), cnf.clauses[i][j]))).collect();
    for (x, &(u, lu)) in occurrences.iter().enumerate() {
        for &(v, lv) in &occurrences[x + 1..] {
            let same_clause = (u - 1) / 3 == (v - 1) / 3;
            if same_clause || lu == -lv {
                edges.push((u, v));
                weights.push(penalty);
            }
        }
    }
    let graph = Graph::new(3 * m + 1, edges)?;
    let weights = EdgeSumValuation::new(&graph, &weights)?;
    let literal_nodes = (0..m).flat_map(|i| (0..3).map(move |j| ((i, j), node(i, j)))).collect();
    Ok(ReductionArtifact { cnf: cnf.clone(), graph, weights, hub: 0, literal_nodes })
}

/// Assignment read off a structure of value `m`: a variable is true iff one
/// of its positive occurrences shares the hub's block. `None` below `m`.
pub fn decode_assignment(artifact: &ReductionArtifact, cs: &CoalitionStructure) -> Result<Option<Vec<bool>>> {
    cs.check_covers(artifact.graph.node_count())?;
    if structure_value(&artifact.weights, cs) != artifact.clause_count() as Value {
        return Ok(None);
    }
    let hub_block = cs.block_of(artifact.hub).expect("structure covers the hub");
    let mut assignment = vec![false; artifact.cnf.variable_count];
    for (&(i, j), &v) in &artifact.literal_nodes {
        let l = artifact.cnf.clauses[i][j];
        if l > 0 && hub_block.contains(v) {
            assignment[l as usize - 1] = true;
        }
    }
    Ok(Some(assignment))
}

/// Hub block holding the first true occurrence of every clause; all other
/// nodes alone. Its value is `m`.
pub fn encode_assignment(artifact: &ReductionArtifact, assignment: &[bool]) -> Result<CoalitionStructure> {
    if assignment.len() != artifact.cnf.variable_count {
        return Err(GcsgError::InvalidArgument(format!(
            "{} values for {} variables",
            assignment.len(),
            artifact.cnf.variable_count
        )));
    }
    if let Some(i) = artifact.cnf.first_unsatisfied(assignment) {
        return Err(GcsgError::Unsatisfied(i));
    }
    let holds = |l: Literal| assignment[l.unsigned_abs() as usize - 1] == (l > 0);
    let mut hub = NodeSet::singleton(artifact.hub);
    for (i, c) in artifact.cnf.clauses.iter().enumerate() {
        let j = c.iter().position(|&l| holds(l)).unwrap();
        hub.insert(artifact.node_of(i, j));
    }
    let mut blocks = vec![hub.clone()];
    blocks.extend((0..artifact.graph.node_count()).filter(|&v| !hub.contains(v)).map(NodeSet::singleton));
    CoalitionStructure::new(blocks)
}

/// Exhaustive satisfiability check; the witness is the first satisfying
/// assignment in binary counting order.
pub fn sat_bruteforce(cnf: &Cnf3) -> Result<Option<Vec<bool>>> {
    let k = cnf.variable_count;
    if k > 20 {
        return Err(GcsgError::CapExceeded { what: "SAT brute force", n: k, cap: 20 });
    }
    for bits in 0u32..1 << k {
        let assignment: Vec<bool> = (0..k).map(|i| bits >> i & 1 == 1).collect();
        if cnf.is_satisfied_by(&assignment) {
            return Ok(Some(assignment));
        }
    }
    Ok(None)
}

/// Random formula with `clauses` clauses over `variables` variables.
pub fn random_3cnf(variables: usize, clauses: usize, rng: &mut impl rand::Rng) -> Cnf3 {
    let lit = |rng: &mut dyn rand::RngCore| {
        let v = rand::Rng::gen_range(rng, 1..=variables as Literal);
        if rand::Rng::gen_bool(rng, 0.5) {
            v
        } else {
            -v
        }
    };
    let cs = (0..clauses).map(|_| [lit(rng), lit(rng), lit(rng)]).collect();
    Cnf3::new(variables, cs).expect("literals in range")
}
