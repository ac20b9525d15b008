//! Greedy merging of rooted rate trees for the node-weighted problem.
//!
//! Every iteration picks a root tree `r`, a center `v`, a rate `b <= P(r)`
//! and a set `S` of other trees whose roots have priority at most `b`,
//! minimizing
//!
//! ```text
//! γ = (σ_b(r, v) + w(v, b) + Σ_{j ∈ S} σ_{P(r_j)}(v, r_j)) / (|S| + 1)
//! ```
//!
//! and merges them into one tree rooted at `r`.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::SolveError;
use crate::instance::{Level, PnwstInstance};
use crate::paths::{node_rate_search, NodeCost, PathResult};
use crate::solution::{ForcedRatesError, PriorityProblem, VertexRateSolution};
use crate::tree::RootedTree;
use crate::unionfind::UnionFind;

/// How vertices already bought at some rate are charged again.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CostMode {
    /// Charge `w(y, b)` in full every time.
    Faithful,
    /// Charge only the upgrade `w(y, b) - w(y, R(y))`.
    #[default]
    Residual,
}

impl CostMode {
    pub fn name(self) -> &'static str {
        match self {
            CostMode::Faithful => "faithful",
            CostMode::Residual => "residual",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Alg3Config {
    pub cost_mode: CostMode,
    /// On equal γ, prefer the candidate merging more trees.
    pub prefer_larger_h: bool,
}

/// One rooted tree of the working set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestTree {
    pub root: usize,
    /// Roots of every tree merged into this one, including `root`.
    pub members: Vec<usize>,
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

/// The working set of trees plus the current vertex rates.
#[derive(Clone, Debug, PartialEq)]
pub struct RateForest {
    /// Sorted by root id.
    pub trees: Vec<ForestTree>,
    pub rates: Vec<Level>,
    pub iteration: usize,
}

impl RateForest {
    /// One singleton tree per terminal and one for the source.
    pub fn new(inst: &PnwstInstance) -> Self {
        let mut roots: Vec<usize> = inst.terminals().to_vec();
        roots.push(inst.source());
        roots.sort_unstable();
        let mut rates = vec![Level::ABSENT; inst.graph().n()];
        for &r in &roots {
            rates[r] = inst.root_priority(r);
        }
        let trees = roots
            .into_iter()
            .map(|r| ForestTree {
                root: r,
                members: vec![r],
                vertices: vec![r],
                edges: Vec::new(),
            })
            .collect();
        Self {
            trees,
            rates,
            iteration: 0,
        }
    }

    /// `Σ_u w(u, R(u))` over the current rates.
    pub fn rate_weight(&self, inst: &PnwstInstance) -> f64 {
        self.rates
            .iter()
            .enumerate()
            .map(|(v, &r)| inst.weight(v, r))
            .sum()
    }
}

/// A chosen merge together with the paths realizing its cost.
#[derive(Clone, Debug, PartialEq)]
pub struct MergeCandidate {
    /// Index of the root tree in the forest.
    pub root_tree: usize,
    pub root: usize,
    pub center: usize,
    pub rate: Level,
    /// Indices of the other merged trees, nearest first.
    pub subset: Vec<usize>,
    pub cost: f64,
    pub gamma: f64,
    /// `|S| + 1`.
    pub h: usize,
    /// Vertices from the root to the center.
    pub root_path: Vec<usize>,
    pub root_path_edges: Vec<usize>,
    /// Per subset tree: vertices from the center to its root, and edges.
    pub legs: Vec<(Vec<usize>, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub gamma: f64,
    pub h: usize,
    /// Trees before the merge.
    pub forest_size: usize,
    pub delta_c: f64,
    pub root: usize,
    pub center: usize,
    pub rate: Level,
    pub merged_roots: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PnwstRunReport {
    pub solution: VertexRateSolution,
    pub weight: f64,
    /// `Σ_u w(u, R(u))` over the rates the merges bought, before the final
    /// canonicalization.
    pub raw_weight: f64,
    pub iterations: Vec<IterationRecord>,
    pub config: Alg3Config,
}

impl PnwstRunReport {
    pub fn total_delta_c(&self) -> f64 {
        self.iterations.iter().map(|it| it.delta_c).sum()
    }
}

/// Node-weighted searches from every root at every rate up to its
/// priority, against one snapshot of the rates.
struct SearchTable {
    /// `by_tree[i][b - 1]` for `b <= P(r_i)`.
    by_tree: Vec<Vec<PathResult>>,
    priority: Vec<Level>,
}

impl SearchTable {
    fn build(inst: &PnwstInstance, forest: &RateForest, mode: CostMode) -> Self {
        let cost = match mode {
            CostMode::Faithful => NodeCost::Faithful,
            CostMode::Residual => NodeCost::Residual(&forest.rates),
        };
        let jobs: Vec<(usize, Level)> = forest
            .trees
            .iter()
            .enumerate()
            .flat_map(|(i, t)| (1..=inst.root_priority(t.root).0).map(move |b| (i, Level(b))))
            .collect();
        let results: Vec<PathResult> = jobs
            .par_iter()
            .map(|&(i, b)| node_rate_search(inst, forest.trees[i].root, b, cost))
            .collect();
        let mut by_tree: Vec<Vec<PathResult>> = vec![Vec::new(); forest.trees.len()];
        for ((i, _), r) in jobs.into_iter().zip(results) {
            by_tree[i].push(r);
        }
        let priority = forest
            .trees
            .iter()
            .map(|t| inst.root_priority(t.root))
            .collect();
        Self { by_tree, priority }
    }

    fn at(&self, tree: usize, b: Level) -> &PathResult {
        &self.by_tree[tree][b.row()]
    }

    /// `σ_{P(r_j)}(v, r_j)`.
    fn own(&self, tree: usize) -> &PathResult {
        self.at(tree, self.priority[tree])
    }
}

fn center_cost(
    inst: &PnwstInstance,
    forest: &RateForest,
    mode: CostMode,
    v: usize,
    b: Level,
) -> f64 {
    let cost = match mode {
        CostMode::Faithful => NodeCost::Faithful,
        CostMode::Residual => NodeCost::Residual(&forest.rates),
    };
    cost.cost(inst, v, b)
}

/// Trees eligible to join at rate `b` around center `v`, nearest first,
/// ties by root id.
fn eligible(forest: &RateForest, table: &SearchTable, v: usize, b: Level) -> Vec<(f64, usize)> {
    let mut list: Vec<(f64, usize)> = (0..forest.trees.len())
        .filter(|&j| table.priority[j] <= b)
        .map(|j| (table.own(j).dist(v), j))
        .filter(|(d, _)| d.is_finite())
        .collect();
    list.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(forest.trees[a.1].root.cmp(&forest.trees[b.1].root))
    });
    list
}

#[derive(Clone, Copy, Debug)]
struct Choice {
    gamma: f64,
    h: usize,
    center: usize,
    root: usize,
    rate: Level,
    root_tree: usize,
    cost: f64,
}

fn compare(a: &Choice, b: &Choice, prefer_larger_h: bool) -> Ordering {
    let h = if prefer_larger_h {
        b.h.cmp(&a.h)
    } else {
        a.h.cmp(&b.h)
    };
    a.gamma
        .total_cmp(&b.gamma)
        .then(h)
        .then(a.center.cmp(&b.center))
        .then(a.root.cmp(&b.root))
        .then(a.rate.cmp(&b.rate))
}

fn best_at_center(
    inst: &PnwstInstance,
    forest: &RateForest,
    table: &SearchTable,
    config: Alg3Config,
    v: usize,
) -> Option<Choice> {
    let mut best: Option<Choice> = None;
    for b in inst.graph().levels() {
        let list = eligible(forest, table, v, b);
        if list.is_empty() {
            continue;
        }
        let center = center_cost(inst, forest, config.cost_mode, v, b);
        for (i, tree) in forest.trees.iter().enumerate() {
            if table.priority[i] < b {
                continue;
            }
            let base = table.at(i, b).dist(v) + center;
            if !base.is_finite() {
                continue;
            }
            let mut sum = base;
            let mut h = 1;
            for &(d, j) in &list {
                if j == i {
                    continue;
                }
                sum += d;
                h += 1;
                let choice = Choice {
                    gamma: sum / h as f64,
                    h,
                    center: v,
                    root: tree.root,
                    rate: b,
                    root_tree: i,
                    cost: sum,
                };
                if best.as_ref().is_none_or(|cur| {
                    compare(&choice, cur, config.prefer_larger_h) == Ordering::Less
                }) {
                    best = Some(choice);
                }
            }
        }
    }
    best
}

/// The candidate with the least γ. Ties: smaller `h` (or larger, per the
/// config), then smaller center, root and rate.
///
/// For a fixed root, center and rate the best subset is a prefix of the
/// eligible trees sorted by distance, so only prefixes are scanned.
pub fn minimize_gamma(
    inst: &PnwstInstance,
    forest: &RateForest,
    config: Alg3Config,
) -> Option<MergeCandidate> {
    if forest.trees.len() < 2 {
        return None;
    }
    let table = SearchTable::build(inst, forest, config.cost_mode);
    let choice = (0..inst.graph().n())
        .into_par_iter()
        .filter_map(|v| best_at_center(inst, forest, &table, config, v))
        .collect::<Vec<_>>()
        .into_iter()
        .min_by(|a, b| compare(a, b, config.prefer_larger_h))?;

    let v = choice.center;
    let subset: Vec<usize> = eligible(forest, &table, v, choice.rate)
        .into_iter()
        .map(|(_, j)| j)
        .filter(|&j| j != choice.root_tree)
        .take(choice.h - 1)
        .collect();
    let root_search = table.at(choice.root_tree, choice.rate);
    let root_path = root_search.path_vertices(v).expect("finite candidate");
    let root_path_edges = root_search.path_edges(v).expect("finite candidate");
    let legs = subset
        .iter()
        .map(|&j| {
            let s = table.own(j);
            let mut vs = s.path_vertices(v).expect("finite candidate");
            let mut es = s.path_edges(v).expect("finite candidate");
            vs.reverse();
            es.reverse();
            (vs, es)
        })
        .collect();
    Some(MergeCandidate {
        root_tree: choice.root_tree,
        root: choice.root,
        center: v,
        rate: choice.rate,
        subset,
        cost: choice.cost,
        gamma: choice.gamma,
        h: choice.h,
        root_path,
        root_path_edges,
        legs,
    })
}

/// Cost of an arbitrary candidate under the current rates. Exposed for
/// brute-force comparison; `None` when some path does not exist.
pub fn candidate_cost(
    inst: &PnwstInstance,
    forest: &RateForest,
    mode: CostMode,
    root_tree: usize,
    center: usize,
    rate: Level,
    subset: &[usize],
) -> Option<f64> {
    let cost = match mode {
        CostMode::Faithful => NodeCost::Faithful,
        CostMode::Residual => NodeCost::Residual(&forest.rates),
    };
    let root = forest.trees[root_tree].root;
    let mut total =
        node_rate_search(inst, root, rate, cost).dist(center) + cost.cost(inst, center, rate);
    for &j in subset {
        let rj = forest.trees[j].root;
        total += node_rate_search(inst, rj, inst.root_priority(rj), cost).dist(center);
    }
    total.is_finite().then_some(total)
}

/// Buy the candidate's rates and replace its trees by one tree rooted at
/// the candidate's root. Returns the weight increase.
pub fn apply_merge(inst: &PnwstInstance, forest: &mut RateForest, cand: &MergeCandidate) -> f64 {
    let old = forest.rates.clone();
    let rates = &mut forest.rates;
    for &u in &cand.root_path {
        rates[u] = rates[u].max(cand.rate);
    }
    rates[cand.center] = rates[cand.center].max(cand.rate);
    for (&j, (vs, _)) in cand.subset.iter().zip(&cand.legs) {
        let p = inst.root_priority(forest.trees[j].root);
        for &u in vs {
            rates[u] = rates[u].max(p);
        }
    }
    let delta: f64 = (0..rates.len())
        .filter(|&u| rates[u] != old[u])
        .map(|u| inst.weight(u, rates[u]) - inst.weight(u, old[u]))
        .sum();

    let merged: Vec<usize> = std::iter::once(cand.root_tree)
        .chain(cand.subset.iter().copied())
        .collect();
    let mut members = Vec::new();
    let mut vertices = BTreeSet::new();
    let mut existing = BTreeSet::new();
    for &i in &merged {
        let t = &forest.trees[i];
        members.extend_from_slice(&t.members);
        vertices.extend(t.vertices.iter().copied());
        existing.extend(t.edges.iter().copied());
    }
    let mut added: BTreeSet<usize> = cand.root_path_edges.iter().copied().collect();
    vertices.extend(cand.root_path.iter().copied());
    for (vs, es) in &cand.legs {
        vertices.extend(vs.iter().copied());
        added.extend(es.iter().copied());
    }
    let edges = bottleneck_tree(inst, &forest.rates, &existing, &added);
    members.sort_unstable();

    let tree = ForestTree {
        root: cand.root,
        members,
        vertices: vertices.into_iter().collect(),
        edges,
    };
    let mut keep: Vec<ForestTree> = forest
        .trees
        .iter()
        .enumerate()
        .filter(|(i, _)| !merged.contains(i))
        .map(|(_, t)| t.clone())
        .collect();
    keep.push(tree);
    keep.sort_by_key(|t| t.root);
    forest.trees = keep;
    forest.iteration += 1;
    delta
}

/// Spanning tree over `existing ∪ added` maximizing every path's minimum
/// endpoint rate. Ties keep existing edges, then smaller ids.
fn bottleneck_tree(
    inst: &PnwstInstance,
    rates: &[Level],
    existing: &BTreeSet<usize>,
    added: &BTreeSet<usize>,
) -> Vec<usize> {
    let g = inst.graph();
    let key = |e: usize| {
        let (a, b) = g.edge(e);
        rates[a].min(rates[b])
    };
    let mut order: Vec<usize> = existing.union(added).copied().collect();
    order.sort_by(|&a, &b| {
        key(b)
            .cmp(&key(a))
            .then(existing.contains(&b).cmp(&existing.contains(&a)))
            .then(a.cmp(&b))
    });
    let mut uf = UnionFind::new(g.n());
    let mut edges: Vec<usize> = order
        .into_iter()
        .filter(|&e| {
            let (a, b) = g.edge(e);
            uf.union(a, b)
        })
        .collect();
    edges.sort_unstable();
    edges
}

/// Every tree is a tree on its vertex set, contains its merged roots, and
/// the path from its root to each merged root `m` runs at rate `>= P(m)`.
pub fn check_forest(inst: &PnwstInstance, forest: &RateForest) -> Result<(), String> {
    for t in &forest.trees {
        let rooted = RootedTree::build(inst.graph(), t.root, &t.edges)
            .map_err(|e| format!("tree at {}: {e:?}", t.root + 1))?;
        let spanned: Vec<usize> = (0..inst.graph().n())
            .filter(|&v| rooted.member[v])
            .collect();
        if spanned != t.vertices {
            return Err(format!(
                "tree at {}: edges do not span its vertices",
                t.root + 1
            ));
        }
        for &m in &t.members {
            if !rooted.member[m] {
                return Err(format!(
                    "tree at {}: merged root {} missing",
                    t.root + 1,
                    m + 1
                ));
            }
            let need = inst.root_priority(m);
            if let Some(&u) = rooted
                .path_from_root(m)
                .iter()
                .find(|&&u| forest.rates[u] < need)
            {
                return Err(format!(
                    "tree at {}: vertex {} rate {} below {} needed by {}",
                    t.root + 1,
                    u + 1,
                    forest.rates[u],
                    need,
                    m + 1
                ));
            }
        }
    }
    Ok(())
}

/// Merge until one tree remains, then canonicalize its rates.
pub fn alg3_pnwst(inst: &PnwstInstance, config: Alg3Config) -> Result<PnwstRunReport, SolveError> {
    let mut forest = RateForest::new(inst);
    let mut iterations = Vec::new();
    while forest.trees.len() > 1 {
        let size = forest.trees.len();
        let cand = minimize_gamma(inst, &forest, config).ok_or(SolveError::NoFeasibleTree)?;
        let merged_roots = std::iter::once(cand.root)
            .chain(cand.subset.iter().map(|&j| forest.trees[j].root))
            .collect();
        let delta_c = apply_merge(inst, &mut forest, &cand);
        if forest.trees.len() != size + 1 - cand.h {
            return Err(SolveError::Invariant(format!(
                "forest went from {size} to {} trees with h = {}",
                forest.trees.len(),
                cand.h
            )));
        }
        check_forest(inst, &forest).map_err(SolveError::Invariant)?;
        iterations.push(IterationRecord {
            gamma: cand.gamma,
            h: cand.h,
            forest_size: size,
            delta_c,
            root: cand.root,
            center: cand.center,
            rate: cand.rate,
            merged_roots,
        });
    }
    let last = &forest.trees[0];
    let solution = inst.forced_rates(&last.edges).map_err(|e| match e {
        ForcedRatesError::TerminalMissing(t) => SolveError::Unreachable { terminal: t },
        other => SolveError::Invariant(other.to_string()),
    })?;
    let weight = inst
        .solution_weight(&solution)
        .map_err(|e| SolveError::Invariant(e.to_string()))?;
    Ok(PnwstRunReport {
        solution,
        weight,
        raw_weight: forest.rate_weight(inst),
        iterations,
        config,
    })
}
