mod bench;
mod report;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use priority_steiner::format::{
    parse_edge_solution, parse_instance, parse_rate_tree, parse_vertex_solution,
    write_edge_solution, write_instance, write_vertex_solution,
};
use priority_steiner::generators::{EdgeBudget, GeneratorSpec, RandomSpec, TerminalBudget};
use priority_steiner::oracle::{exact_pnwst, exact_pst};
use priority_steiner::pnwst::{alg3_pnwst, Alg3Config, CostMode};
use priority_steiner::pst::{alg1_qosmt, alg2_parallel, best_of, k_rho_solver};
use priority_steiner::spider::{decompose_rate_spiders, m_optimize};
use priority_steiner::{AnyInstance, PriorityProblem, SolveError};

use report::{Outcome, RunReport};

#[derive(Parser)]
#[command(
    name = "pst",
    version,
    about = "Priority Steiner tree solvers, oracles and generators"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a solver on an instance file.
    Solve(SolveArgs),
    /// Write a generated instance.
    Gen(GenArgs),
    /// Compute the exact optimum of a small instance.
    Exact(ExactArgs),
    /// Check a solution file against an instance.
    Check(CheckArgs),
    /// Split an M-optimized rate tree into rate spiders.
    Decompose(DecomposeArgs),
    /// Run solvers over a generated family and print CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    Alg1,
    Alg2,
    Krho,
    Best,
    Pnwst,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Alg1 => "alg1",
            Solver::Alg2 => "alg2",
            Solver::Krho => "krho",
            Solver::Best => "best",
            Solver::Pnwst => "pnwst",
        }
    }

    fn fits(self, inst: &AnyInstance) -> bool {
        matches!(
            (self, inst),
            (Solver::Pnwst, AnyInstance::Pnwst(_))
                | (
                    Solver::Alg1 | Solver::Alg2 | Solver::Krho | Solver::Best,
                    AnyInstance::Pst(_)
                )
        )
    }

    fn default_for(inst: &AnyInstance) -> Self {
        match inst {
            AnyInstance::Pst(_) => Solver::Best,
            AnyInstance::Pnwst(_) => Solver::Pnwst,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum CostModeArg {
    #[default]
    Residual,
    Faithful,
}

#[derive(Args)]
struct Alg3Args {
    /// Vertex charging rule for the node-weighted solver.
    #[arg(long, value_enum, default_value_t)]
    cost_mode: CostModeArg,
    /// Break γ ties toward merging more trees.
    #[arg(long)]
    prefer_larger_h: bool,
}

impl Alg3Args {
    fn config(&self) -> Alg3Config {
        Alg3Config {
            cost_mode: match self.cost_mode {
                CostModeArg::Residual => CostMode::Residual,
                CostModeArg::Faithful => CostMode::Faithful,
            },
            prefer_larger_h: self.prefer_larger_h,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Defaults to best for PST and pnwst for PNWST instances.
    #[arg(long, value_enum)]
    solver: Option<Solver>,
    /// Also compute the exact optimum and the ratio.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    json: bool,
    /// Include wall time in the report.
    #[arg(long)]
    timing: bool,
    /// Write the solution in solution-file format.
    #[arg(long)]
    out_solution: Option<PathBuf>,
    #[command(flatten)]
    alg3: Alg3Args,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Tightness,
    RandomPst,
    RandomPnwst,
    ProportionalPst,
}

#[derive(Args, Clone)]
pub struct FamilyParams {
    /// Vertex count of random families.
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Edge probability; ignored when --edges is given.
    #[arg(long, default_value_t = 0.4)]
    density: f64,
    /// Exact edge count.
    #[arg(long)]
    edges: Option<usize>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Terminal count (tightness: |T|; random: overrides --terminal-fraction).
    #[arg(long)]
    terminals: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    terminal_fraction: f64,
    #[arg(long, default_value_t = 10)]
    max_weight: u32,
}

impl FamilyParams {
    pub fn spec(&self, family: Family, n: usize, seed: u64) -> GeneratorSpec {
        let random = RandomSpec {
            n,
            edges: self
                .edges
                .map_or(EdgeBudget::Density(self.density), EdgeBudget::Count),
            k: self.k,
            terminals: self.terminals.map_or(
                TerminalBudget::Fraction(self.terminal_fraction),
                TerminalBudget::Count,
            ),
            max_weight: self.max_weight,
            seed,
        };
        match family {
            Family::Tightness => GeneratorSpec::Tightness {
                terminals: self.terminals.unwrap_or(n),
            },
            Family::RandomPst => GeneratorSpec::RandomPst(random),
            Family::RandomPnwst => GeneratorSpec::RandomPnwst(random),
            Family::ProportionalPst => GeneratorSpec::ProportionalPst(random),
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    family: Family,
    #[command(flatten)]
    params: FamilyParams,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    instance: PathBuf,
    #[arg(long)]
    json: bool,
    /// Write an optimal solution in solution-file format.
    #[arg(long)]
    out_solution: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    instance: PathBuf,
    solution: PathBuf,
}

#[derive(Args)]
struct DecomposeArgs {
    tree: PathBuf,
    /// Marked vertices, comma separated, 1-based; must include the root.
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<usize>,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub family: Family,
    /// Inclusive size range `a..b` (tightness: |T|, otherwise n).
    #[arg(long, default_value = "2..8")]
    pub sizes: String,
    /// Inclusive seed range `a..b`; tightness ignores seeds.
    #[arg(long, default_value = "0..0")]
    pub seeds: String,
    /// Solvers to run; defaults to every solver fitting the family.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub solvers: Vec<Solver>,
    /// Fill the opt and ratio columns where the oracle allows.
    #[arg(long)]
    pub exact: bool,
    #[command(flatten)]
    pub params: FamilyParams,
    #[command(flatten)]
    alg3: Alg3Args,
    /// CSV output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failed command and its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Usage, parse or kind-mismatch errors.
    Usage(String),
    Infeasible(String),
    Guard(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Infeasible(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Guard(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Infeasible(m) | Failure::Guard(m) => m,
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::TooLarge { .. } => Failure::Guard(e.to_string()),
            _ => Failure::Infeasible(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<AnyInstance, Failure> {
    let inst = parse_instance(&read(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let problems = inst.validate();
    if let Some(v) = problems.first() {
        return Err(Failure::Usage(format!("{}: {v}", path.display())));
    }
    Ok(inst)
}

fn solution_text(inst: &AnyInstance, outcome: &Outcome) -> String {
    match (inst, outcome) {
        (_, Outcome::Pst(_, r)) => write_edge_solution(&r.solution),
        (AnyInstance::Pnwst(p), Outcome::Pnwst(_, r)) => write_vertex_solution(p, &r.solution),
        (AnyInstance::Pst(_), Outcome::Pnwst(..)) => unreachable!("kind checked before solving"),
    }
}

fn cmd_solve(a: SolveArgs) -> Result<u8, Failure> {
    let inst = load(&a.instance)?;
    let solver = a.solver.unwrap_or_else(|| Solver::default_for(&inst));
    if !solver.fits(&inst) {
        return Err(Failure::Usage(format!(
            "solver {} does not apply to a {} instance",
            solver.name(),
            inst.kind()
        )));
    }
    let start = Instant::now();
    let (pst_run, pnwst_run) = match (&inst, solver) {
        (AnyInstance::Pst(p), s) => {
            let r = match s {
                Solver::Alg1 => alg1_qosmt(p),
                Solver::Alg2 => alg2_parallel(p),
                Solver::Krho => k_rho_solver(p),
                _ => best_of(p),
            }?;
            (Some(r), None)
        }
        (AnyInstance::Pnwst(p), _) => (None, Some(alg3_pnwst(p, a.alg3.config())?)),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let (outcome, feasible) = match (&inst, &pst_run, &pnwst_run) {
        (AnyInstance::Pst(p), Some(r), _) => (Outcome::Pst(p, r), p.check_feasible(&r.solution)),
        (AnyInstance::Pnwst(p), _, Some(r)) => {
            (Outcome::Pnwst(p, r), p.check_feasible(&r.solution))
        }
        _ => unreachable!("solver ran for the instance kind"),
    };
    let opt = if a.exact {
        Some(match &inst {
            AnyInstance::Pst(p) => exact_pst(p)?.opt_weight,
            AnyInstance::Pnwst(p) => exact_pnwst(p)?.opt_weight,
        })
    } else {
        None
    };
    if let Some(path) = &a.out_solution {
        write(path, &solution_text(&inst, &outcome))?;
    }
    let rep = RunReport {
        instance: &inst,
        solver: solver.name(),
        outcome,
        feasible: feasible.map_err(|e| e.to_string()),
        opt,
        wall_time: a.timing.then_some(elapsed),
    };
    if a.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&rep.to_json()).expect("report serializes")
        );
    } else {
        print!("{}", rep.to_text());
    }
    Ok(if rep.feasible.is_ok() { 0 } else { 1 })
}

fn cmd_gen(a: GenArgs) -> Result<u8, Failure> {
    let spec = a.params.spec(a.family, a.params.n, a.seed);
    let inst = spec.generate().map_err(|e| Failure::Usage(e.to_string()))?;
    let text = write_instance(&inst, &[format!("generated by pst gen {spec}")]);
    match &a.out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_exact(a: ExactArgs) -> Result<u8, Failure> {
    let inst = load(&a.instance)?;
    let (opt, count, witness) = match &inst {
        AnyInstance::Pst(p) => {
            let r = exact_pst(p)?;
            (
                r.opt_weight,
                r.enumerated_count,
                write_edge_solution(&r.witness),
            )
        }
        AnyInstance::Pnwst(p) => {
            let r = exact_pnwst(p)?;
            (
                r.opt_weight,
                r.enumerated_count,
                write_vertex_solution(p, &r.witness),
            )
        }
    };
    if let Some(path) = &a.out_solution {
        write(path, &witness)?;
    }
    if a.json {
        let doc = serde_json::json!({
            "schema": report::SCHEMA,
            "kind": inst.kind(),
            "opt": report::num(opt),
            "enumerated": count,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("report serializes")
        );
    } else {
        println!("opt {}", report::sig12(opt));
        println!("enumerated {count}");
    }
    Ok(0)
}

fn cmd_check(a: CheckArgs) -> Result<u8, Failure> {
    let inst = load(&a.instance)?;
    let text = read(&a.solution)?;
    let bad = |e: priority_steiner::format::ParseError| {
        Failure::Usage(format!("{}: {e}", a.solution.display()))
    };
    let (weight, verdict) = match &inst {
        AnyInstance::Pst(p) => {
            let sol = parse_edge_solution(&text, p).map_err(bad)?;
            (p.solution_weight(&sol), p.check_feasible(&sol))
        }
        AnyInstance::Pnwst(p) => {
            let sol = parse_vertex_solution(&text, p).map_err(bad)?;
            (p.solution_weight(&sol), p.check_feasible(&sol))
        }
    };
    match verdict {
        Ok(()) => {
            let w = weight.map_err(|e| Failure::Usage(e.to_string()))?;
            println!("ok weight {}", report::sig12(w));
            Ok(0)
        }
        Err(why) => {
            println!("infeasible: {why}");
            Ok(1)
        }
    }
}

fn cmd_decompose(a: DecomposeArgs) -> Result<u8, Failure> {
    let text = read(&a.tree)?;
    let tree =
        parse_rate_tree(&text).map_err(|e| Failure::Usage(format!("{}: {e}", a.tree.display())))?;
    let mut m = BTreeSet::new();
    for &v in &a.m {
        if v == 0 || !tree.contains(v - 1) {
            return Err(Failure::Usage(format!(
                "marked vertex {v} is not in the tree"
            )));
        }
        m.insert(v - 1);
    }
    let opt = m_optimize(&tree, &m).map_err(|e| Failure::Usage(e.to_string()))?;
    let dec = decompose_rate_spiders(&opt, &m).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut out = String::new();
    let changed = tree
        .vertices()
        .filter(|&v| opt.rate(v) != tree.rate(v))
        .count();
    if changed > 0 || opt.len() != tree.len() {
        let _ = writeln!(
            out,
            "M-optimized: {} vertices kept, {changed} rates changed",
            opt.len()
        );
    }
    let _ = writeln!(
        out,
        "spiders {} covering {} of {} marked vertices",
        dec.spiders.len(),
        dec.covered_count(),
        m.len()
    );
    let tag = |v: usize| format!("{}:{}", v + 1, opt.rate(v).map_or(0, |l| l.0));
    for (i, s) in dec.spiders.iter().enumerate() {
        let _ = writeln!(
            out,
            "spider {} root {} center {}",
            i + 1,
            tag(s.root),
            tag(s.center)
        );
        for leg in &s.legs {
            let path: Vec<String> = leg.iter().map(|&v| tag(v)).collect();
            let _ = writeln!(out, "  leg {}", path.join(" "));
        }
    }
    print!("{out}");
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Exact(a) => cmd_exact(a),
        Cmd::Check(a) => cmd_check(a),
        Cmd::Decompose(a) => cmd_decompose(a),
        Cmd::Bench(a) => {
            let config = a.alg3.config();
            bench::run(&a, config)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
