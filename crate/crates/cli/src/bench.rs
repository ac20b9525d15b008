//! Ensemble runs over a generated family, one CSV row per instance and solver.

use std::ops::RangeInclusive;
use std::time::Instant;

use priority_steiner::oracle::{exact_pnwst, exact_pst};
use priority_steiner::pnwst::{alg3_pnwst, Alg3Config};
use priority_steiner::pst::{alg1_qosmt, alg2_parallel, best_of, k_rho_solver};
use priority_steiner::{log2_ratio_bound, AnyInstance, PriorityProblem, PstInstance, SolveError};

use crate::report::{ratio, sig12};
use crate::{BenchArgs, Failure, Family, Solver};

pub const HEADER: [&str; 7] = [
    "instance", "solver", "weight", "opt", "ratio", "bound", "time_s",
];

/// `a..b` (inclusive) or a single number.
pub fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let num = |x: &str| {
        x.trim()
            .parse::<u64>()
            .map_err(|_| format!("bad range '{s}'"))
    };
    let r = match s.split_once("..") {
        Some((a, b)) => num(a)?..=num(b.trim_start_matches('='))?,
        None => num(s)?..=num(s)?,
    };
    if r.is_empty() {
        return Err(format!("empty range '{s}'"));
    }
    Ok(r)
}

fn default_solvers(family: Family) -> Vec<Solver> {
    match family {
        Family::Tightness | Family::RandomPnwst => vec![Solver::Pnwst],
        Family::RandomPst | Family::ProportionalPst => {
            vec![Solver::Alg1, Solver::Alg2, Solver::Krho, Solver::Best]
        }
    }
}

/// Proven approximation factor of `solver` on `inst`.
pub fn bound(solver: Solver, inst: &AnyInstance) -> f64 {
    let t = inst.demands().terminals().len();
    let two_k = 2.0 * inst.demands().distinct_priorities().len() as f64;
    match solver {
        Solver::Alg1 | Solver::Alg2 => log2_ratio_bound(t),
        Solver::Krho => two_k,
        Solver::Best => log2_ratio_bound(t).min(two_k),
        Solver::Pnwst => 2.0 * ((t + 1) as f64).ln() + 2.0,
    }
}

fn run_pst(solver: Solver, p: &PstInstance) -> Result<f64, SolveError> {
    let r = match solver {
        Solver::Alg1 => alg1_qosmt(p)?,
        Solver::Alg2 => alg2_parallel(p)?,
        Solver::Krho => k_rho_solver(p)?,
        _ => best_of(p)?,
    };
    p.check_feasible(&r.solution)
        .map_err(|e| SolveError::Invariant(format!("infeasible output: {e}")))?;
    Ok(r.weight)
}

fn cell(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| sig12(v).to_string())
}

pub fn run(a: &BenchArgs, config: Alg3Config) -> Result<u8, Failure> {
    let sizes = parse_range(&a.sizes).map_err(Failure::Usage)?;
    let seeds = match a.family {
        Family::Tightness => 0..=0,
        _ => parse_range(&a.seeds).map_err(Failure::Usage)?,
    };
    let solvers = if a.solvers.is_empty() {
        default_solvers(a.family)
    } else {
        a.solvers.clone()
    };
    let csv_err = |e: csv::Error| Failure::Usage(e.to_string());
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(HEADER).map_err(csv_err)?;
    for size in sizes {
        for seed in seeds.clone() {
            let spec = a.params.spec(a.family, size as usize, seed);
            let inst = spec.generate().map_err(|e| Failure::Usage(e.to_string()))?;
            if let Some(s) = solvers.iter().find(|s| !s.fits(&inst)) {
                return Err(Failure::Usage(format!(
                    "solver {} does not apply to {} instances",
                    s.name(),
                    inst.kind()
                )));
            }
            let opt = if a.exact {
                let r = match &inst {
                    AnyInstance::Pst(p) => exact_pst(p).map(|r| r.opt_weight),
                    AnyInstance::Pnwst(p) => exact_pnwst(p).map(|r| r.opt_weight),
                };
                match r {
                    Ok(w) => Some(w),
                    Err(SolveError::TooLarge { .. }) => None,
                    Err(e) => return Err(e.into()),
                }
            } else {
                None
            };
            for &solver in &solvers {
                let start = Instant::now();
                let weight = match &inst {
                    AnyInstance::Pst(p) => run_pst(solver, p)?,
                    AnyInstance::Pnwst(p) => {
                        let r = alg3_pnwst(p, config)?;
                        p.check_feasible(&r.solution)
                            .map_err(|e| Failure::Infeasible(format!("{spec}: {e}")))?;
                        r.weight
                    }
                };
                let time = start.elapsed().as_secs_f64();
                out.write_record([
                    spec.to_string(),
                    solver.name().to_string(),
                    sig12(weight).to_string(),
                    cell(opt),
                    cell(opt.and_then(|o| ratio(weight, o))),
                    sig12(bound(solver, &inst)).to_string(),
                    format!("{time:.6}"),
                ])
                .map_err(csv_err)?;
            }
        }
    }
    let out = out
        .into_inner()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    match &a.out {
        Some(path) => std::fs::write(path, out)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => print!("{}", String::from_utf8_lossy(&out)),
    }
    Ok(0)
}
