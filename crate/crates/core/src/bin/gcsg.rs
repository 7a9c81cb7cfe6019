use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gcsg_core::classify::{classify_graph, GraphClass};
use gcsg_core::dispatch::{solve, Algorithm, SolveOptions};
use gcsg_core::enumeration::{count_connected_structures, solve_bruteforce, DEFAULT_STRUCTURE_CAP};
use gcsg_core::graph::{is_connected_structure, BoundaryConstraint, Graph};
use gcsg_core::harness::{random_grid_subgraph, random_sp_graph, random_tree, random_weights};
use gcsg_core::io;
use gcsg_core::sat::{random_3cnf, reduce_3sat, sat_bruteforce, Cnf3};
use gcsg_core::separator_solver::SolverConfig;
use gcsg_core::valuation::{structure_value, EdgeSumValuation, Valuation};
use gcsg_core::GcsgError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "gcsg", version, about = "Optimal connected coalition structures on graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a weighted graph and print `value=... algorithm=... nodes=... edges=...`.
    Solve(SolveArgs),
    /// Validate a structure file against a graph and print its value.
    Check { graph: PathBuf, structure: PathBuf },
    /// Count connected structures of a graph.
    Count {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STRUCTURE_CAP)]
        cap: usize,
    },
    /// Build the edge-sum instance of a DIMACS 3-CNF file.
    Reduce { cnf: PathBuf, graph_out: PathBuf, map_out: PathBuf },
    /// Seeded random instances, cross-checked against brute force, as CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolverFlags {
    #[arg(long, default_value_t = 2.0 / 3.0)]
    balance: f64,
    #[arg(long, default_value_t = 8)]
    base_threshold: usize,
    /// Node cap for brute force.
    #[arg(long, default_value_t = DEFAULT_STRUCTURE_CAP)]
    cap: usize,
}

impl SolverFlags {
    fn config(&self) -> SolverConfig {
        SolverConfig { balance: self.balance, base_threshold: self.base_threshold, ..Default::default() }
    }
}

#[derive(Args)]
struct SolveArgs {
    graph: PathBuf,
    #[arg(long, default_value = "auto")]
    algorithm: Algorithm,
    /// Required blocks over a subset of nodes, in the structure format.
    #[arg(long)]
    constraint: Option<PathBuf>,
    /// Table valuation replacing the edge weights (`ids... value` lines).
    #[arg(long)]
    table: Option<PathBuf>,
    /// Structure file; printed after the report when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    flags: SolverFlags,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Trees,
    Sp,
    PlanarLike,
    Reductions,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Smallest size (nodes; clauses for `reductions`).
    #[arg(long, default_value_t = 3)]
    min_n: usize,
    #[arg(long, default_value_t = 8)]
    max_n: usize,
    #[arg(long, default_value_t = 3)]
    per_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    flags: SolverFlags,
}

#[derive(Debug)]
enum Failure {
    Error(GcsgError),
    Io(String),
    Invalid(String),
}

impl From<GcsgError> for Failure {
    fn from(e: GcsgError) -> Self {
        Failure::Error(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Io(_) => 2,
            Failure::Error(e) => match e {
                GcsgError::ClassMismatch(_) => 3,
                GcsgError::BudgetExceeded(_) | GcsgError::CapExceeded { .. } => 4,
                GcsgError::Unsatisfied(_) => 1,
                _ => 2,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Error(e) => e.to_string(),
            Failure::Io(m) | Failure::Invalid(m) => m.clone(),
        }
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => run_solve(&args),
        Command::Check { graph, structure } => run_check(&graph, &structure),
        Command::Count { graph, cap } => run_count(&graph, cap),
        Command::Reduce { cnf, graph_out, map_out } => run_reduce(&cnf, &graph_out, &map_out),
        Command::Bench(args) => run_bench(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("gcsg: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run_solve(args: &SolveArgs) -> CliResult {
    let (graph, weights) = io::read_weighted_graph(&read(&args.graph)?)?;
    let table = match &args.table {
        Some(p) => Some(io::read_table_valuation(&read(p)?, graph.node_count())?),
        None => None,
    };
    let valuation: &dyn Valuation = match &table {
        Some(t) => t,
        None => &weights,
    };
    let constraint = match &args.constraint {
        Some(p) => io::read_constraint(&read(p)?, graph.node_count())?,
        None => BoundaryConstraint::none(),
    };
    let options = SolveOptions { algorithm: args.algorithm, cap: Some(args.flags.cap), config: args.flags.config() };
    let report = solve(&graph, valuation, &constraint, &options)?;
    let Some(sol) = report.solution else {
        println!("value=infeasible algorithm={} nodes={} edges={}", report.algorithm, graph.node_count(), graph.edge_count());
        return Err(Failure::Invalid("constraint admits no connected structure".into()));
    };
    println!("value={} algorithm={} nodes={} edges={}", sol.value, report.algorithm, graph.node_count(), graph.edge_count());
    let text = io::write_structure(&sol.structure);
    match &args.output {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_check(graph_path: &Path, structure_path: &Path) -> CliResult {
    let (graph, weights) = io::read_weighted_graph(&read(graph_path)?)?;
    let cs = match io::read_structure(&read(structure_path)?) {
        Err(GcsgError::InvalidStructure(m)) => return Err(Failure::Invalid(m)),
        other => other?,
    };
    if let Err(e) = cs.check_covers(graph.node_count()) {
        return Err(Failure::Invalid(e.to_string()));
    }
    if !is_connected_structure(&graph, &cs)? {
        return Err(Failure::Invalid("a block is not connected".into()));
    }
    println!("valid value={}", structure_value(&weights, &cs));
    Ok(())
}

fn run_count(path: &Path, cap: usize) -> CliResult {
    let text = read(path)?;
    let graph = match io::read_weighted_graph(&text) {
        Ok((g, _)) => g,
        Err(_) => io::read_graph(&text)?,
    };
    println!("{}", count_connected_structures(&graph, cap)?);
    Ok(())
}

fn run_reduce(cnf: &Path, graph_out: &Path, map_out: &Path) -> CliResult {
    let cnf = Cnf3::parse_dimacs(&read(cnf)?)?;
    let art = reduce_3sat(&cnf)?;
    write(graph_out, &io::write_weighted_graph(&art.graph, &art.weights))?;
    write(map_out, &art.mapping_text())?;
    println!("m={} nodes={}", art.clause_count(), art.graph.node_count());
    Ok(())
}

struct Row {
    instance: String,
    graph: Graph,
    weights: EdgeSumValuation,
    /// Value the optimum must equal, when known without brute force.
    expected: Option<i64>,
}

fn bench_rows(args: &BenchArgs, rng: &mut ChaCha8Rng) -> Vec<Row> {
    let mut rows = Vec::new();
    for n in args.min_n..=args.max_n {
        for k in 0..args.per_size {
            let (graph, expected) = match args.suite {
                Suite::Trees => (random_tree(n, rng), None),
                Suite::Sp => (random_sp_graph(n, 0.2, rng), None),
                Suite::PlanarLike => {
                    let rows = (n as f64).sqrt().ceil() as usize;
                    (random_grid_subgraph(rows, n.div_ceil(rows), 0.8, rng), None)
                }
                Suite::Reductions => {
                    let cnf = random_3cnf(3, n, rng);
                    let art = reduce_3sat(&cnf).expect("nonempty formula");
                    let sat = sat_bruteforce(&cnf).expect("3 variables").is_some();
                    let m = n as i64;
                    rows.push(Row {
                        instance: format!("reductions-{n}-{k}"),
                        graph: art.graph,
                        weights: art.weights,
                        expected: sat.then_some(m),
                    });
                    continue;
                }
            };
            let w = random_weights(&graph, rng, -5, 5);
            let weights = EdgeSumValuation::new(&graph, &w).expect("weights match edges");
            let name = match args.suite {
                Suite::Trees => "trees",
                Suite::Sp => "sp",
                Suite::PlanarLike => "planar-like",
                Suite::Reductions => unreachable!(),
            };
            rows.push(Row { instance: format!("{name}-{n}-{k}"), graph, weights, expected });
        }
    }
    rows
}

fn run_bench(args: &BenchArgs) -> CliResult {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let options = SolveOptions { cap: Some(args.flags.cap), config: args.flags.config(), ..Default::default() };
    let mut out = String::from("instance,n,e,algorithm,value,wall_ms,ratio,check\n");
    let mut mismatches = 0;
    for row in bench_rows(args, &mut rng) {
        let n = row.graph.node_count();
        if let (Suite::Trees, Ok(cls)) = (args.suite, classify_graph(&row.graph)) {
            assert_eq!(cls, GraphClass::Acyclic, "tree generator produced a cycle");
        }
        let start = Instant::now();
        let report = solve(&row.graph, &row.weights, &BoundaryConstraint::none(), &options)?;
        let wall = start.elapsed();
        let sol = report.solution.expect("unconstrained instances are feasible");
        let mut check = if n <= args.flags.cap {
            let bf = solve_bruteforce(&row.graph, &row.weights, None, args.flags.cap)?.expect("feasible");
            if bf.value == sol.value { "ok" } else { "mismatch" }
        } else {
            "skip"
        };
        let connected = is_connected_structure(&row.graph, &sol.structure)?;
        if !connected || structure_value(&row.weights, &sol.structure) != sol.value {
            check = "mismatch";
        }
        if let Suite::Reductions = args.suite {
            let m = (n as i64 - 1) / 3;
            if (sol.value == m) != row.expected.is_some() || sol.value > m {
                check = "mismatch";
            }
        }
        if check == "mismatch" {
            mismatches += 1;
        }
        let ms = wall.as_secs_f64() * 1e3;
        let ratio = wall.as_secs_f64() * 1e9 / (n as f64).powi(3);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{ms:.3},{ratio:.4},{check}",
            row.instance,
            n,
            row.graph.edge_count(),
            report.algorithm,
            sol.value
        );
    }
    match &args.output {
        Some(p) => write(p, &out)?,
        None => print!("{out}"),
    }
    if mismatches > 0 {
        return Err(Failure::Invalid(format!("{mismatches} mismatches against brute force")));
    }
    Ok(())
}
