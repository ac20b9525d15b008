//! Solvers for the edge-weighted problem.

use std::cmp::Reverse;
use std::fmt;

use rayon::prelude::*;

use crate::error::SolveError;
use crate::instance::{Level, PstInstance};
use crate::paths::edge_rate_search_until;
use crate::solution::{EdgeRateSolution, ForcedRatesError, PriorityProblem};
use crate::steiner::steiner_2approx;
use crate::unionfind::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PstSolverTag {
    Alg1,
    Alg2,
    KRho,
}

impl PstSolverTag {
    pub fn name(self) -> &'static str {
        match self {
            PstSolverTag::Alg1 => "alg1",
            PstSolverTag::Alg2 => "alg2",
            PstSolverTag::KRho => "krho",
        }
    }
}

impl fmt::Display for PstSolverTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How one terminal was joined: the vertex its path ended at and the path
/// weight at the terminal's priority.
#[derive(Clone, Debug, PartialEq)]
pub struct Attachment {
    pub terminal: usize,
    pub target: usize,
    pub cost: f64,
    pub path_edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PstRunReport {
    pub solution: EdgeRateSolution,
    pub weight: f64,
    /// Attachment order for the sequential solver; terminal order for the
    /// parallel one; empty for the per-level solver.
    pub attachments: Vec<Attachment>,
    pub tag: PstSolverTag,
    /// Every solver's weight, filled only by [`best_of`].
    pub candidates: Vec<(PstSolverTag, f64)>,
}

impl PstRunReport {
    fn new(
        inst: &PstInstance,
        solution: EdgeRateSolution,
        attachments: Vec<Attachment>,
        tag: PstSolverTag,
    ) -> Self {
        let weight = inst
            .solution_weight(&solution)
            .expect("solver output matches the instance");
        Self {
            solution,
            weight,
            attachments,
            tag,
            candidates: Vec::new(),
        }
    }

    /// Connection costs in attachment order.
    pub fn connection_costs(&self) -> Vec<f64> {
        self.attachments.iter().map(|a| a.cost).collect()
    }
}

fn max_into(rates: &mut [Level], edges: &[usize], level: Level) {
    for &e in edges {
        rates[e] = rates[e].max(level);
    }
}

/// Terminals by priority descending, then id ascending.
fn priority_order(inst: &PstInstance) -> Vec<usize> {
    let mut order = inst.terminals().to_vec();
    order.sort_by_key(|&t| (Reverse(inst.priority(t)), t));
    order
}

/// Attach terminals one at a time, highest priority first, each by a
/// cheapest path at its own priority to the tree built so far.
pub fn alg1_qosmt(inst: &PstInstance) -> Result<PstRunReport, SolveError> {
    let g = inst.graph();
    let mut in_tree = vec![false; g.n()];
    in_tree[inst.source()] = true;
    let mut rates = vec![Level::ABSENT; g.m()];
    let mut attachments = Vec::with_capacity(inst.terminals().len());
    for t in priority_order(inst) {
        let p = inst.priority(t);
        if in_tree[t] {
            attachments.push(Attachment {
                terminal: t,
                target: t,
                cost: 0.0,
                path_edges: Vec::new(),
            });
            continue;
        }
        let search = edge_rate_search_until(inst, &[t], p, |x| in_tree[x]);
        let target = search
            .reached()
            .ok_or(SolveError::Unreachable { terminal: t })?;
        let path = search.path_vertices(target).expect("target was reached");
        let edges = search.path_edges(target).expect("target was reached");
        for v in path {
            in_tree[v] = true;
        }
        max_into(&mut rates, &edges, p);
        attachments.push(Attachment {
            terminal: t,
            target,
            cost: search.dist(target),
            path_edges: edges,
        });
    }
    let solution = remove_cycles(inst, &rates)?;
    Ok(PstRunReport::new(
        inst,
        solution,
        attachments,
        PstSolverTag::Alg1,
    ))
}

/// Ranking used by the parallel solver: priority, then smaller id; the
/// source outranks everything.
fn rank(inst: &PstInstance, v: usize) -> (u32, Reverse<usize>) {
    if v == inst.source() {
        (u32::MAX, Reverse(0))
    } else {
        (inst.priority(v).0, Reverse(v))
    }
}

/// Every terminal independently connects, at its own priority, to the
/// nearest terminal (or the source) that outranks it.
pub fn alg2_parallel(inst: &PstInstance) -> Result<PstRunReport, SolveError> {
    let attachments: Vec<Attachment> = inst
        .terminals()
        .par_iter()
        .map(|&t| attach_upward(inst, t))
        .collect::<Result<_, _>>()?;
    let mut rates = vec![Level::ABSENT; inst.graph().m()];
    for a in &attachments {
        max_into(&mut rates, &a.path_edges, inst.priority(a.terminal));
    }
    let solution = remove_cycles(inst, &rates)?;
    Ok(PstRunReport::new(
        inst,
        solution,
        attachments,
        PstSolverTag::Alg2,
    ))
}

fn attach_upward(inst: &PstInstance, t: usize) -> Result<Attachment, SolveError> {
    let own = rank(inst, t);
    let search = edge_rate_search_until(inst, &[t], inst.priority(t), |x| {
        (x == inst.source() || inst.demands().is_terminal(x)) && rank(inst, x) > own
    });
    let target = search
        .reached()
        .ok_or(SolveError::Unreachable { terminal: t })?;
    Ok(Attachment {
        terminal: t,
        target,
        cost: search.dist(target),
        path_edges: search.path_edges(target).expect("target was reached"),
    })
}

/// Turn a rate map whose positive edges connect every terminal to the
/// source into a tree with forced rates.
///
/// Keeps a maximum-rate spanning forest (ties: cheaper at its rate first,
/// then smaller id), which is what repeatedly deleting a lowest-rate edge
/// from each cycle produces. Then drops the parts not reaching a terminal.
pub fn remove_cycles(inst: &PstInstance, rates: &[Level]) -> Result<EdgeRateSolution, SolveError> {
    let g = inst.graph();
    let mut order: Vec<usize> = (0..g.m()).filter(|&e| !rates[e].is_absent()).collect();
    order.sort_by(|&a, &b| {
        rates[b]
            .cmp(&rates[a])
            .then(
                inst.weight(a, rates[a])
                    .total_cmp(&inst.weight(b, rates[b])),
            )
            .then(a.cmp(&b))
    });
    let mut uf = UnionFind::new(g.n());
    let forest: Vec<usize> = order
        .into_iter()
        .filter(|&e| {
            let (u, v) = g.edge(e);
            uf.union(u, v)
        })
        .collect();
    let root = uf.find(inst.source());
    let kept: Vec<usize> = forest
        .into_iter()
        .filter(|&e| uf.find(g.edge(e).0) == root)
        .collect();
    inst.forced_rates(&kept).map_err(|e| match e {
        ForcedRatesError::TerminalMissing(t) => SolveError::Unreachable { terminal: t },
        other => SolveError::Invariant(other.to_string()),
    })
}

/// One Steiner 2-approximation per present priority level, unioned with
/// the per-edge maximum level.
pub fn k_rho_solver(inst: &PstInstance) -> Result<PstRunReport, SolveError> {
    let levels = inst.demands().distinct_priorities();
    let trees: Vec<(Level, Vec<usize>)> = levels
        .par_iter()
        .map(|&level| {
            let mut terms: Vec<usize> = inst
                .terminals()
                .iter()
                .copied()
                .filter(|&t| inst.priority(t) == level)
                .collect();
            terms.push(inst.source());
            steiner_2approx(inst.graph(), &terms, |e| inst.weight(e, level))
                .map(|tree| (level, tree.edges))
        })
        .collect::<Result<_, _>>()?;
    let mut rates = vec![Level::ABSENT; inst.graph().m()];
    for (level, edges) in &trees {
        max_into(&mut rates, edges, *level);
    }
    let solution = remove_cycles(inst, &rates)?;
    Ok(PstRunReport::new(
        inst,
        solution,
        Vec::new(),
        PstSolverTag::KRho,
    ))
}

/// The lightest of the three solvers; ties go to the earlier of
/// alg1, alg2, krho.
pub fn best_of(inst: &PstInstance) -> Result<PstRunReport, SolveError> {
    let runs = [alg1_qosmt(inst)?, alg2_parallel(inst)?, k_rho_solver(inst)?];
    let candidates: Vec<(PstSolverTag, f64)> = runs.iter().map(|r| (r.tag, r.weight)).collect();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.weight < runs[best].weight {
            best = i;
        }
    }
    let mut report = runs.into_iter().nth(best).expect("index in range");
    report.candidates = candidates;
    Ok(report)
}
