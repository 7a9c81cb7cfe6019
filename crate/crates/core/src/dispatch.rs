//! Solver selection, with disconnected inputs solved one component at a time.

use std::fmt;
use std::str::FromStr;

use crate::classify::{classify_graph, GraphClass};
use crate::enumeration::{solve_bruteforce, Solution, DEFAULT_STRUCTURE_CAP};
use crate::error::{GcsgError, Result};
use crate::graph::{connected_components, BoundaryConstraint, CoalitionStructure, Graph, NodeSet};
use crate::minor_free::solve_minor_free;
use crate::separator_solver::{solve_separator, SolverConfig};
use crate::tree::solve_tree;
use crate::valuation::{RelabeledValuation, Valuation, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Algorithm {
    #[default]
    Auto,
    Bruteforce,
    Tree,
    MinorFree,
    Separator,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::Bruteforce => "bruteforce",
            Algorithm::Tree => "tree",
            Algorithm::MinorFree => "minorfree",
            Algorithm::Separator => "separator",
        }
    }

    /// Concrete solver `Auto` picks for a graph of this class.
    pub fn for_class(cls: GraphClass) -> Algorithm {
        match cls {
            GraphClass::Acyclic => Algorithm::Tree,
            GraphClass::K4MinorFree | GraphClass::K23MinorFree => Algorithm::MinorFree,
            GraphClass::General => Algorithm::Separator,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = GcsgError;

    fn from_str(s: &str) -> Result<Self> {
        [Algorithm::Auto, Algorithm::Bruteforce, Algorithm::Tree, Algorithm::MinorFree, Algorithm::Separator]
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| GcsgError::InvalidArgument(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    /// Node cap for brute force; `None` uses the library default.
    pub cap: Option<usize>,
    pub config: SolverConfig,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    /// `None` when the constraint admits no connected structure.
    pub solution: Option<Solution>,
    /// Solvers used, one per component in order of first use, joined by `+`.
    pub algorithm: String,
}

/// The tree and minor-free solvers take no boundary constraint, so `Auto`
/// sends constrained components to the separator solver.
pub fn solve(
    graph: &Graph,
    valuation: &dyn Valuation,
    constraint: &BoundaryConstraint,
    options: &SolveOptions,
) -> Result<SolveReport> {
    constraint.check_range(graph.node_count())?;
    let mut used: Vec<Algorithm> = Vec::new();
    let mut blocks: Vec<NodeSet> = Vec::new();
    let mut value: Value = 0;
    let mut feasible = true;
    for comp in connected_components(graph, &graph.nodes()) {
        let (sub, map) = graph.induced_subgraph(&comp);
        let local_v = RelabeledValuation::new(valuation, map.clone());
        let local_c = localize(constraint, &comp, &map)?;
        let (alg, sol) = solve_component(&sub, &local_v, &local_c, options)?;
        if !used.contains(&alg) {
            used.push(alg);
        }
        match sol {
            Some(s) => {
                value += s.value;
                blocks.extend(s.structure.blocks().iter().map(|b| b.iter().map(|v| map[v]).collect()));
            }
            None => feasible = false,
        }
    }
    let algorithm = used.iter().map(|a| a.name()).collect::<Vec<_>>().join("+");
    let solution = if feasible {
        Some(Solution { structure: CoalitionStructure::new(blocks)?, value })
    } else {
        None
    };
    Ok(SolveReport { solution, algorithm })
}

fn localize(constraint: &BoundaryConstraint, comp: &NodeSet, map: &[usize]) -> Result<BoundaryConstraint> {
    if constraint.is_empty() {
        return Ok(BoundaryConstraint::none());
    }
    let local_id = |g: usize| map.iter().position(|&m| m == g).expect("node in component");
    let blocks: Vec<NodeSet> = constraint
        .structure()
        .restrict(comp)
        .blocks()
        .iter()
        .map(|b| b.iter().map(local_id).collect())
        .collect();
    Ok(BoundaryConstraint::new(CoalitionStructure::new(blocks)?))
}

fn solve_component(
    graph: &Graph,
    valuation: &dyn Valuation,
    constraint: &BoundaryConstraint,
    options: &SolveOptions,
) -> Result<(Algorithm, Option<Solution>)> {
    let constrained = !constraint.is_empty();
    let alg = match options.algorithm {
        Algorithm::Auto if constrained => Algorithm::Separator,
        Algorithm::Auto => Algorithm::for_class(classify_graph(graph)?),
        a @ (Algorithm::Tree | Algorithm::MinorFree) if constrained => {
            return Err(GcsgError::ClassMismatch(format!("{a} solver takes no boundary constraint")))
        }
        a => a,
    };
    let sol = match alg {
        Algorithm::Bruteforce => {
            let c = constrained.then_some(constraint);
            solve_bruteforce(graph, valuation, c, options.cap.unwrap_or(DEFAULT_STRUCTURE_CAP))?
        }
        Algorithm::Tree => Some(solve_tree(graph, valuation)?),
        Algorithm::MinorFree => Some(solve_minor_free(graph, valuation, GraphClass::K23MinorFree)?),
        Algorithm::Separator => solve_separator(graph, valuation, constraint, &options.config)?,
        Algorithm::Auto => unreachable!("resolved above"),
    };
    Ok((alg, sol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::{structure_value, EdgeSumValuation};

    #[test]
    fn names_round_trip() {
        for a in ["auto", "bruteforce", "tree", "minorfree", "separator"] {
            assert_eq!(a.parse::<Algorithm>().unwrap().name(), a);
        }
        assert!("dp".parse::<Algorithm>().is_err());
    }

    #[test]
    fn components_merge() {
        // path 0-1-2 and triangle 3-4-5 plus isolated 6
        let g = Graph::new(7, [(0, 1), (1, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let v = EdgeSumValuation::new(&g, &[2, -1, 1, 1, 1]).unwrap();
        let r = solve(&g, &v, &BoundaryConstraint::none(), &SolveOptions::default()).unwrap();
        let s = r.solution.unwrap();
        assert_eq!(s.value, 5);
        assert_eq!(structure_value(&v, &s.structure), 5);
        assert_eq!(r.algorithm, "tree+minorfree");
        let bf = SolveOptions { algorithm: Algorithm::Bruteforce, ..Default::default() };
        assert_eq!(solve(&g, &v, &BoundaryConstraint::none(), &bf).unwrap().solution.unwrap().value, 5);
    }

    #[test]
    fn constraints_route_to_separator() {
        let g = Graph::path(4);
        let v = EdgeSumValuation::uniform(&g, 1);
        let c = BoundaryConstraint::new(CoalitionStructure::new(vec![NodeSet::from([0]), NodeSet::from([1])]).unwrap());
        let r = solve(&g, &v, &c, &SolveOptions::default()).unwrap();
        assert_eq!(r.algorithm, "separator");
        assert_eq!(r.solution.unwrap().value, 2);
        let tree = SolveOptions { algorithm: Algorithm::Tree, ..Default::default() };
        assert!(matches!(solve(&g, &v, &c, &tree), Err(GcsgError::ClassMismatch(_))));
        let apart = BoundaryConstraint::new(CoalitionStructure::new(vec![NodeSet::from([0, 2]), NodeSet::from([1])]).unwrap());
        assert!(solve(&g, &v, &apart, &SolveOptions::default()).unwrap().solution.is_none());
    }
}
