//! Seeded instance generators.
//!
//! All randomness comes from ChaCha8 seeded with a `u64`, and every draw is
//! a fixed-width integer, so a spec produces the same instance on every
//! platform.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::error::InstanceError;
use crate::instance::{
    AnyInstance, CombinedInstance, Level, PnwstInstance, PriorityGraph, PstInstance,
};
use crate::spider::RateTree;

/// Connectivity retries for density-based graphs.
pub const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("{0}")]
    BadParameter(String),
    #[error("no connected graph after {0} attempts")]
    NotConnected(usize),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// The lower-bound family for the greedy node-weighted solver.
///
/// Bottom row `s, t_1, ..., t_T` (vertices `0..=T`), a hub of weight 1
/// adjacent to the whole row (vertex `T + 1`), and top vertices `u_j`
/// (vertex `T + 1 + j`) adjacent to bottom vertices `j - 1` and `j` with
/// weight `2 / (T + 2 - j)`. One level. The hub star costs 1; the greedy
/// solver buys every top vertex, `2 (H_{T+1} - 1)` in total.
pub fn gen_tightness_pnwst(t_count: usize) -> Result<PnwstInstance, GenError> {
    if t_count < 2 {
        return Err(GenError::BadParameter(format!(
            "tightness family needs at least 2 terminals, got {t_count}"
        )));
    }
    let t = t_count;
    let hub = t + 1;
    let n = 2 * t + 2;
    let mut edges: Vec<(usize, usize)> = (0..=t).map(|b| (b, hub)).collect();
    for j in 1..=t {
        edges.push((j - 1, hub + j));
        edges.push((j, hub + j));
    }
    let graph = PriorityGraph::new(n, edges, 1)?;
    let mut weights = vec![vec![0.0]; n];
    weights[hub] = vec![1.0];
    for j in 1..=t {
        weights[hub + j] = vec![2.0 / (t + 2 - j) as f64];
    }
    let terminals: Vec<(usize, Level)> = (1..=t).map(|v| (v, Level(1))).collect();
    Ok(PnwstInstance::new(graph, 0, &terminals, weights)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeBudget {
    /// Each vertex pair independently with this probability; redrawn until
    /// connected.
    Density(f64),
    /// A random spanning tree plus uniformly chosen extra edges.
    Count(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TerminalBudget {
    /// Rounded share of the non-source vertices, at least one.
    Fraction(f64),
    Count(usize),
}

/// Parameters shared by the random families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomSpec {
    pub n: usize,
    pub edges: EdgeBudget,
    pub k: usize,
    pub terminals: TerminalBudget,
    /// Weights are drawn from `1..=max_weight`.
    pub max_weight: u32,
    pub seed: u64,
}

impl RandomSpec {
    pub fn new(n: usize, density: f64, k: usize, terminal_fraction: f64, seed: u64) -> Self {
        Self {
            n,
            edges: EdgeBudget::Density(density),
            k,
            terminals: TerminalBudget::Fraction(terminal_fraction),
            max_weight: 10,
            seed,
        }
    }

    pub fn with_counts(n: usize, m: usize, k: usize, terminals: usize, seed: u64) -> Self {
        Self {
            n,
            edges: EdgeBudget::Count(m),
            k,
            terminals: TerminalBudget::Count(terminals),
            max_weight: 10,
            seed,
        }
    }

    fn check(&self) -> Result<(), GenError> {
        let bad = |msg: String| Err(GenError::BadParameter(msg));
        if self.n < 2 {
            return bad(format!("need at least 2 vertices, got {}", self.n));
        }
        if self.k == 0 {
            return bad("need at least one level".into());
        }
        if self.max_weight == 0 {
            return bad("max weight must be positive".into());
        }
        let pairs = self.n * (self.n - 1) / 2;
        match self.edges {
            EdgeBudget::Density(d) if !(d > 0.0 && d <= 1.0) => {
                return bad(format!("density {d} outside (0, 1]"));
            }
            EdgeBudget::Count(m) if m < self.n - 1 || m > pairs => {
                return bad(format!(
                    "edge count {m} outside {}..={pairs} for {} vertices",
                    self.n - 1,
                    self.n
                ));
            }
            _ => {}
        }
        match self.terminals {
            TerminalBudget::Fraction(f) if !(0.0..=1.0).contains(&f) => {
                bad(format!("terminal fraction {f} outside [0, 1]"))
            }
            TerminalBudget::Count(c) if c == 0 || c >= self.n => {
                bad(format!("terminal count {c} outside 1..{}", self.n))
            }
            _ => Ok(()),
        }
    }
}

fn draw_index(rng: &mut ChaCha8Rng, bound: usize) -> usize {
    rng.gen_range(0..bound as u64) as usize
}

fn draw_graph(spec: &RandomSpec, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>, GenError> {
    let n = spec.n;
    match spec.edges {
        EdgeBudget::Density(d) => {
            for _ in 0..MAX_ATTEMPTS {
                let mut edges = Vec::new();
                for u in 0..n {
                    for v in u + 1..n {
                        if d >= 1.0 || rng.gen::<f64>() < d {
                            edges.push((u, v));
                        }
                    }
                }
                let g = PriorityGraph::new(n, edges.clone(), 1)?;
                if g.is_connected() {
                    return Ok(edges);
                }
            }
            Err(GenError::NotConnected(MAX_ATTEMPTS))
        }
        EdgeBudget::Count(m) => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            let mut set = BTreeSet::new();
            for i in 1..n {
                let p = perm[draw_index(rng, i)];
                let c = perm[i];
                set.insert((p.min(c), p.max(c)));
            }
            let pairs = n * (n - 1) / 2;
            if m * 2 > pairs {
                // Dense: sample the missing pairs from the full list.
                let mut rest: Vec<(usize, usize)> = (0..n)
                    .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                    .filter(|e| !set.contains(e))
                    .collect();
                rest.shuffle(rng);
                set.extend(rest.into_iter().take(m - (n - 1)));
            } else {
                while set.len() < m {
                    let u = draw_index(rng, n);
                    let v = draw_index(rng, n);
                    if u != v {
                        set.insert((u.min(v), u.max(v)));
                    }
                }
            }
            Ok(set.into_iter().collect())
        }
    }
}

fn draw_demands(spec: &RandomSpec, rng: &mut ChaCha8Rng) -> (usize, Vec<(usize, Level)>) {
    let n = spec.n;
    let source = draw_index(rng, n);
    let count = match spec.terminals {
        TerminalBudget::Fraction(f) => ((f * (n - 1) as f64).round() as usize).clamp(1, n - 1),
        TerminalBudget::Count(c) => c,
    };
    let mut others: Vec<usize> = (0..n).filter(|&v| v != source).collect();
    others.shuffle(rng);
    let mut chosen: Vec<usize> = others.into_iter().take(count).collect();
    chosen.sort_unstable();
    let terminals = chosen
        .into_iter()
        .map(|v| (v, Level(rng.gen_range(1..=spec.k as u32))))
        .collect();
    (source, terminals)
}

/// `k` draws from `1..=max`, made nondecreasing by prefix maxima.
fn monotone_row(rng: &mut ChaCha8Rng, k: usize, max: u32) -> Vec<f64> {
    let mut row = Vec::with_capacity(k);
    let mut hi = 0;
    for _ in 0..k {
        hi = hi.max(rng.gen_range(1..=max));
        row.push(f64::from(hi));
    }
    row
}

/// Zero the source row, and a terminal's row up to its priority.
fn zero_demand_rows(weights: &mut [Vec<f64>], source: usize, terminals: &[(usize, Level)]) {
    weights[source].iter_mut().for_each(|w| *w = 0.0);
    for &(t, p) in terminals {
        weights[t][..p.0 as usize].iter_mut().for_each(|w| *w = 0.0);
    }
}

struct Skeleton {
    graph: PriorityGraph,
    source: usize,
    terminals: Vec<(usize, Level)>,
    rng: ChaCha8Rng,
}

fn skeleton(spec: &RandomSpec) -> Result<Skeleton, GenError> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let edges = draw_graph(spec, &mut rng)?;
    let graph = PriorityGraph::new(spec.n, edges, spec.k)?;
    let (source, terminals) = draw_demands(spec, &mut rng);
    Ok(Skeleton {
        graph,
        source,
        terminals,
        rng,
    })
}

pub fn gen_random_pst(spec: &RandomSpec) -> Result<PstInstance, GenError> {
    let mut s = skeleton(spec)?;
    let weights = (0..s.graph.m())
        .map(|_| monotone_row(&mut s.rng, spec.k, spec.max_weight))
        .collect();
    Ok(PstInstance::new(s.graph, s.source, &s.terminals, weights)?)
}

pub fn gen_random_pnwst(spec: &RandomSpec) -> Result<PnwstInstance, GenError> {
    let mut s = skeleton(spec)?;
    let mut weights: Vec<Vec<f64>> = (0..s.graph.n())
        .map(|_| monotone_row(&mut s.rng, spec.k, spec.max_weight))
        .collect();
    zero_demand_rows(&mut weights, s.source, &s.terminals);
    Ok(PnwstInstance::new(
        s.graph,
        s.source,
        &s.terminals,
        weights,
    )?)
}

/// Edge weights as in [`gen_random_pst`] and vertex weights as in
/// [`gen_random_pnwst`], drawn in that order.
pub fn gen_random_combined(spec: &RandomSpec) -> Result<CombinedInstance, GenError> {
    let mut s = skeleton(spec)?;
    let edge_weights = (0..s.graph.m())
        .map(|_| monotone_row(&mut s.rng, spec.k, spec.max_weight))
        .collect();
    let mut vertex_weights: Vec<Vec<f64>> = (0..s.graph.n())
        .map(|_| monotone_row(&mut s.rng, spec.k, spec.max_weight))
        .collect();
    zero_demand_rows(&mut vertex_weights, s.source, &s.terminals);
    Ok(CombinedInstance::new(
        s.graph,
        s.source,
        &s.terminals,
        edge_weights,
        vertex_weights,
    )?)
}

/// `w(e, p_i) = p_i * base(e)` with one base draw per edge, so at `k = 1`
/// this is exactly [`gen_random_pst`].
pub fn gen_proportional_pst(spec: &RandomSpec) -> Result<PstInstance, GenError> {
    let mut s = skeleton(spec)?;
    let values = s.graph.level_values().to_vec();
    let weights = (0..s.graph.m())
        .map(|_| {
            let base = f64::from(s.rng.gen_range(1..=spec.max_weight));
            values.iter().map(|p| p * base).collect()
        })
        .collect();
    Ok(PstInstance::new(s.graph, s.source, &s.terminals, weights)?)
}

/// A random rate tree on `0..n` rooted at 0, and a random marked set
/// containing the root and at least one other vertex. Not M-optimized.
pub fn gen_random_rate_tree(
    n: usize,
    k: usize,
    marked_fraction: f64,
    seed: u64,
) -> Result<(RateTree, BTreeSet<usize>), GenError> {
    if n < 2 || k == 0 {
        return Err(GenError::BadParameter(format!(
            "rate tree needs n >= 2 and k >= 1, got n = {n}, k = {k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rates = vec![Level(k as u32)];
    let mut edges = Vec::with_capacity(n - 1);
    for v in 1..n {
        let p = draw_index(&mut rng, v);
        edges.push((p, v));
        rates.push(Level(rng.gen_range(1..=rates[p].0)));
    }
    let mut marked: BTreeSet<usize> = (1..n)
        .filter(|_| rng.gen::<f64>() < marked_fraction)
        .collect();
    if marked.is_empty() {
        marked.insert(1 + draw_index(&mut rng, n - 1));
    }
    marked.insert(0);
    let tree = RateTree::new(0, rates.into_iter().enumerate(), edges)
        .map_err(|e| GenError::BadParameter(e.to_string()))?;
    Ok((tree, marked))
}

/// A named generator family with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeneratorSpec {
    Tightness { terminals: usize },
    RandomPst(RandomSpec),
    RandomPnwst(RandomSpec),
    ProportionalPst(RandomSpec),
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<AnyInstance, GenError> {
        Ok(match self {
            GeneratorSpec::Tightness { terminals } => {
                AnyInstance::Pnwst(gen_tightness_pnwst(*terminals)?)
            }
            GeneratorSpec::RandomPst(s) => AnyInstance::Pst(gen_random_pst(s)?),
            GeneratorSpec::RandomPnwst(s) => AnyInstance::Pnwst(gen_random_pnwst(s)?),
            GeneratorSpec::ProportionalPst(s) => AnyInstance::Pst(gen_proportional_pst(s)?),
        })
    }

    pub fn family(&self) -> &'static str {
        match self {
            GeneratorSpec::Tightness { .. } => "tightness",
            GeneratorSpec::RandomPst(_) => "random-pst",
            GeneratorSpec::RandomPnwst(_) => "random-pnwst",
            GeneratorSpec::ProportionalPst(_) => "proportional-pst",
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Tightness { terminals } => write!(f, "tightness terminals={terminals}"),
            GeneratorSpec::RandomPst(s)
            | GeneratorSpec::RandomPnwst(s)
            | GeneratorSpec::ProportionalPst(s) => {
                write!(f, "{} n={} ", self.family(), s.n)?;
                match s.edges {
                    EdgeBudget::Density(d) => write!(f, "density={d} ")?,
                    EdgeBudget::Count(m) => write!(f, "m={m} ")?,
                }
                write!(f, "k={} ", s.k)?;
                match s.terminals {
                    TerminalBudget::Fraction(x) => write!(f, "terminal-fraction={x} ")?,
                    TerminalBudget::Count(c) => write!(f, "terminals={c} ")?,
                }
                write!(f, "max-weight={} seed={}", s.max_weight, s.seed)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tightness_shape() {
        let inst = gen_tightness_pnwst(3).unwrap();
        assert_eq!(inst.graph().n(), 8);
        assert_eq!(inst.graph().m(), 10);
        assert_eq!(inst.weight(4, Level(1)), 1.0);
        let tops: Vec<f64> = (5..8).map(|v| inst.weight(v, Level(1))).collect();
        assert_eq!(tops, vec![0.5, 2.0 / 3.0, 1.0]);
        assert!(inst.validate().is_empty());
        assert!(gen_tightness_pnwst(1).is_err());
    }

    #[test]
    fn same_seed_same_instance() {
        let spec = RandomSpec::new(8, 0.4, 3, 0.5, 7);
        assert_eq!(
            gen_random_pst(&spec).unwrap(),
            gen_random_pst(&spec).unwrap()
        );
        assert_eq!(
            gen_random_pnwst(&spec).unwrap(),
            gen_random_pnwst(&spec).unwrap()
        );
    }

    #[test]
    fn full_density_is_complete() {
        let inst = gen_random_pst(&RandomSpec::new(6, 1.0, 2, 0.5, 1)).unwrap();
        assert_eq!(inst.graph().m(), 15);
    }

    #[test]
    fn proportional_matches_random_at_one_level() {
        for seed in 0..20 {
            let spec = RandomSpec::new(7, 0.5, 1, 0.5, seed);
            assert_eq!(
                gen_proportional_pst(&spec).unwrap(),
                gen_random_pst(&spec).unwrap()
            );
        }
    }

    #[test]
    fn proportional_rows_are_multiples() {
        let inst = gen_proportional_pst(&RandomSpec::new(7, 0.5, 3, 0.5, 3)).unwrap();
        for row in inst.edge_weights() {
            assert_eq!(row[1], 2.0 * row[0]);
            assert_eq!(row[2], 3.0 * row[0]);
        }
    }

    #[test]
    fn counted_edges_are_exact() {
        let spec = RandomSpec::with_counts(30, 80, 2, 10, 5);
        let inst = gen_random_pst(&spec).unwrap();
        assert_eq!(inst.graph().m(), 80);
        assert_eq!(inst.terminals().len(), 10);
        assert!(inst.validate().is_empty());
        let dense = gen_random_pst(&RandomSpec::with_counts(6, 14, 1, 2, 5)).unwrap();
        assert_eq!(dense.graph().m(), 14);
        assert!(dense.validate().is_empty());
    }

    #[test]
    fn generated_instances_validate() {
        for seed in 0..30 {
            let spec = RandomSpec::new(9, 0.35, 3, 0.4, seed);
            assert!(gen_random_pst(&spec).unwrap().validate().is_empty());
            assert!(gen_random_pnwst(&spec).unwrap().validate().is_empty());
            let c = gen_random_combined(&spec).unwrap();
            assert!(c.validate().is_empty());
            assert!(c.subdivide_to_node_weighted().validate().is_empty());
        }
    }

    #[test]
    fn random_rate_trees_are_rate_trees() {
        for seed in 0..20 {
            let (tree, m) = gen_random_rate_tree(25, 3, 0.3, seed).unwrap();
            assert_eq!(tree.len(), 25);
            assert!(m.contains(&0) && m.len() >= 2);
        }
    }
}
