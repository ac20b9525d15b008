//! Exhaustive optima for small instances.
//!
//! Every tree containing the root is generated exactly once by repeatedly
//! branching on the lowest-id edge leaving the current tree: take it, or
//! forbid it. A tree is scored only when it spans every terminal and all
//! its leaves other than the root are terminals, since any other tree has a
//! pruned subtree at least as light. Branches whose partial lower bound
//! already reaches the incumbent are cut.
//!
//! The node-weighted oracle can instead enumerate a rate for every vertex.
//! A rate vector is feasible when each terminal reaches the source through
//! vertices rated at least its priority; a spanning tree that maximizes the
//! smallest endpoint rate on every edge then realizes it. It takes whichever
//! of the two searches is smaller.

use crate::error::SolveError;
use crate::instance::{CombinedInstance, Level, PnwstInstance, PriorityGraph, PstInstance};
use crate::solution::{EdgeRateSolution, PriorityProblem, VertexRateSolution};
use crate::unionfind::UnionFind;

/// Largest edge count the tree enumeration accepts.
pub const MAX_EDGES: usize = 24;

/// Largest number of rate vectors the vertex-rate enumeration accepts.
pub const MAX_RATE_VECTORS: f64 = (1u64 << 24) as f64;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult<W> {
    pub opt_weight: f64,
    pub witness: W,
    /// Complete trees examined.
    pub enumerated_count: u64,
}

struct Search<'a, F> {
    graph: &'a PriorityGraph,
    root: usize,
    terminal_mask: u64,
    incident: Vec<u32>,
    edge_lb: Vec<f64>,
    vertex_lb: Vec<f64>,
    score: F,
    best: Option<(f64, u32)>,
    count: u64,
}

impl<F: FnMut(&[usize]) -> f64> Search<'_, F> {
    fn run(&mut self) {
        let root_bit = 1u64 << self.root;
        let frontier = self.incident[self.root];
        self.go(root_bit, 0, frontier, self.vertex_lb[self.root]);
    }

    fn go(&mut self, vmask: u64, emask: u32, frontier: u32, lb: f64) {
        if let Some((best, _)) = self.best {
            if lb >= best {
                return;
            }
        }
        if frontier == 0 {
            self.count += 1;
            self.finish(vmask, emask);
            return;
        }
        let e = frontier.trailing_zeros() as usize;
        let bit = 1u32 << e;
        let (a, b) = self.graph.edge(e);
        let x = if vmask & (1u64 << a) != 0 { b } else { a };
        let joined = vmask | (1u64 << x);
        let mut next = (frontier & !bit) & !self.incident[x];
        for &(y, f) in self.graph.neighbors(x) {
            if joined & (1u64 << y) == 0 {
                next |= 1u32 << f;
            }
        }
        self.go(
            joined,
            emask | bit,
            next,
            lb + self.edge_lb[e] + self.vertex_lb[x],
        );
        self.go(vmask, emask, frontier & !bit, lb);
    }

    fn finish(&mut self, vmask: u64, emask: u32) {
        if vmask & self.terminal_mask != self.terminal_mask {
            return;
        }
        let mut degree = vec![0u8; self.graph.n()];
        let edges: Vec<usize> = (0..self.graph.m())
            .filter(|&e| emask & (1 << e) != 0)
            .collect();
        for &e in &edges {
            let (a, b) = self.graph.edge(e);
            degree[a] += 1;
            degree[b] += 1;
        }
        let dead_leaf = (0..self.graph.n())
            .any(|v| v != self.root && degree[v] == 1 && self.terminal_mask & (1u64 << v) == 0);
        if dead_leaf {
            return;
        }
        let w = (self.score)(&edges);
        if self.best.is_none_or(|(b, _)| w < b) {
            self.best = Some((w, emask));
        }
    }
}

fn guard(graph: &PriorityGraph) -> Result<(), SolveError> {
    if graph.m() > MAX_EDGES || graph.n() > 64 {
        return Err(SolveError::TooLarge {
            edges: graph.m(),
            limit: MAX_EDGES,
        });
    }
    Ok(())
}

fn search_trees(
    graph: &PriorityGraph,
    root: usize,
    terminals: &[usize],
    edge_lb: Vec<f64>,
    vertex_lb: Vec<f64>,
    score: impl FnMut(&[usize]) -> f64,
) -> Result<(f64, Vec<usize>, u64), SolveError> {
    guard(graph)?;
    let mut incident = vec![0u32; graph.n()];
    for (e, &(a, b)) in graph.edges().iter().enumerate() {
        if a != b {
            incident[a] |= 1 << e;
            incident[b] |= 1 << e;
        }
    }
    let terminal_mask = terminals.iter().fold(0u64, |m, &t| m | (1u64 << t));
    let mut s = Search {
        graph,
        root,
        terminal_mask,
        incident,
        edge_lb,
        vertex_lb,
        score,
        best: None,
        count: 0,
    };
    s.run();
    let (w, emask) = s.best.ok_or(SolveError::NoFeasibleTree)?;
    let edges = (0..graph.m()).filter(|&e| emask & (1 << e) != 0).collect();
    Ok((w, edges, s.count))
}

fn row_one(table: &[Vec<f64>]) -> Vec<f64> {
    table.iter().map(|row| row[0]).collect()
}

pub fn exact_pst(inst: &PstInstance) -> Result<OracleResult<EdgeRateSolution>, SolveError> {
    let g = inst.graph();
    let (opt_weight, edges, count) = search_trees(
        g,
        inst.source(),
        inst.terminals(),
        row_one(inst.edge_weights()),
        vec![0.0; g.n()],
        |edges| {
            let sol = inst
                .forced_rates(edges)
                .expect("enumerated trees span the terminals");
            inst.solution_weight(&sol)
                .expect("solution matches instance")
        },
    )?;
    let witness = inst
        .forced_rates(&edges)
        .map_err(|e| SolveError::Invariant(e.to_string()))?;
    Ok(OracleResult {
        opt_weight,
        witness,
        enumerated_count: count,
    })
}

pub fn exact_pnwst(inst: &PnwstInstance) -> Result<OracleResult<VertexRateSolution>, SolveError> {
    let g = inst.graph();
    let space = rate_space(inst);
    let tree_space = if g.m() <= MAX_EDGES && g.n() <= 64 {
        (g.m() as f64).exp2()
    } else {
        f64::INFINITY
    };
    if space <= MAX_RATE_VECTORS && space <= tree_space {
        return exact_pnwst_by_rates(inst);
    }
    let (opt_weight, edges, count) = search_trees(
        g,
        inst.source(),
        inst.terminals(),
        vec![0.0; g.m()],
        row_one(inst.vertex_weights()),
        |edges| {
            let sol = inst
                .forced_rates(edges)
                .expect("enumerated trees span the terminals");
            inst.solution_weight(&sol)
                .expect("solution matches instance")
        },
    )?;
    let witness = inst
        .forced_rates(&edges)
        .map_err(|e| SolveError::Invariant(e.to_string()))?;
    Ok(OracleResult {
        opt_weight,
        witness,
        enumerated_count: count,
    })
}

/// Candidate rates for `v`: the source is pinned to the top level and a
/// terminal never drops below its priority.
fn rate_choices(inst: &PnwstInstance, v: usize) -> std::ops::RangeInclusive<u32> {
    let k = inst.graph().k() as u32;
    if v == inst.source() {
        k..=k
    } else if inst.demands().is_terminal(v) {
        inst.priority(v).0..=k
    } else {
        0..=k
    }
}

fn rate_space(inst: &PnwstInstance) -> f64 {
    (0..inst.graph().n())
        .map(|v| rate_choices(inst, v).count() as f64)
        .product()
}

struct RateSearch<'a> {
    inst: &'a PnwstInstance,
    rates: Vec<Level>,
    /// Cheapest possible weight of vertices `v..`, for pruning.
    tail_lb: Vec<f64>,
    levels: Vec<Level>,
    best: Option<(f64, Vec<Level>)>,
    count: u64,
}

impl RateSearch<'_> {
    fn go(&mut self, v: usize, cost: f64) {
        if let Some((best, _)) = &self.best {
            if cost + self.tail_lb[v] >= *best {
                return;
            }
        }
        if v == self.rates.len() {
            self.count += 1;
            if self.connected() {
                self.best = Some((cost, self.rates.clone()));
            }
            return;
        }
        for r in rate_choices(self.inst, v) {
            let l = Level(r);
            self.rates[v] = l;
            self.go(v + 1, cost + self.inst.weight(v, l));
        }
        self.rates[v] = Level::ABSENT;
    }

    /// Every terminal reaches the source through vertices rated at least
    /// its priority.
    fn connected(&self) -> bool {
        let g = self.inst.graph();
        let s = self.inst.source();
        self.levels.iter().all(|&b| {
            let mut seen = vec![false; g.n()];
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &(x, _) in g.neighbors(u) {
                    if !seen[x] && self.rates[x] >= b {
                        seen[x] = true;
                        stack.push(x);
                    }
                }
            }
            self.inst
                .terminals()
                .iter()
                .all(|&t| self.inst.priority(t) < b || seen[t])
        })
    }
}

fn exact_pnwst_by_rates(
    inst: &PnwstInstance,
) -> Result<OracleResult<VertexRateSolution>, SolveError> {
    let g = inst.graph();
    let n = g.n();
    let mut tail_lb = vec![0.0; n + 1];
    for v in (0..n).rev() {
        let low = *rate_choices(inst, v).start();
        tail_lb[v] = tail_lb[v + 1] + inst.weight(v, Level(low));
    }
    let mut search = RateSearch {
        inst,
        rates: vec![Level::ABSENT; n],
        tail_lb,
        levels: inst.demands().distinct_priorities(),
        best: None,
        count: 0,
    };
    search.go(0, 0.0);
    let (_, rates) = search.best.ok_or(SolveError::NoFeasibleTree)?;
    let tree = bottleneck_spanning_tree(g, &rates);
    let witness = inst
        .forced_rates(&tree)
        .map_err(|e| SolveError::Invariant(e.to_string()))?;
    let opt_weight = inst
        .solution_weight(&witness)
        .map_err(|e| SolveError::Invariant(e.to_string()))?;
    Ok(OracleResult {
        opt_weight,
        witness,
        enumerated_count: search.count,
    })
}

/// Spanning forest of the rated vertices maximizing each edge's smaller
/// endpoint rate.
fn bottleneck_spanning_tree(g: &PriorityGraph, rates: &[Level]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.m())
        .filter(|&e| {
            let (a, b) = g.edge(e);
            !rates[a].is_absent() && !rates[b].is_absent()
        })
        .collect();
    order.sort_by_key(|&e| {
        let (a, b) = g.edge(e);
        (std::cmp::Reverse(rates[a].min(rates[b])), e)
    });
    let mut uf = UnionFind::new(g.n());
    order
        .into_iter()
        .filter(|&e| {
            let (a, b) = g.edge(e);
            uf.union(a, b)
        })
        .collect()
}

/// Optimum when both edges and vertices carry weight: each edge pays at
/// its forced edge rate and each vertex at its forced vertex rate.
pub fn exact_combined(
    inst: &CombinedInstance,
) -> Result<OracleResult<(EdgeRateSolution, VertexRateSolution)>, SolveError> {
    let g = inst.graph();
    let edge_view = inst.edge_part();
    let vertex_table: Vec<Vec<f64>> = (0..g.n())
        .map(|v| g.levels().map(|l| inst.vertex_weight(v, l)).collect())
        .collect();
    let vertex_view = PnwstInstance::new(
        g.clone(),
        inst.demands().source(),
        &inst
            .demands()
            .terminals()
            .iter()
            .map(|&t| (t, inst.demands().priority(t)))
            .collect::<Vec<(usize, Level)>>(),
        vertex_table.clone(),
    )
    .map_err(|e| SolveError::Invariant(e.to_string()))?;
    let score = |edges: &[usize]| -> f64 {
        let es = edge_view.forced_rates(edges).expect("tree spans terminals");
        let vs = vertex_view
            .forced_rates(edges)
            .expect("tree spans terminals");
        edge_view.solution_weight(&es).expect("matches")
            + vertex_view.solution_weight(&vs).expect("matches")
    };
    let (opt_weight, edges, count) = search_trees(
        g,
        inst.demands().source(),
        inst.demands().terminals(),
        row_one(edge_view.edge_weights()),
        row_one(&vertex_table),
        score,
    )?;
    let es = edge_view
        .forced_rates(&edges)
        .map_err(|e| SolveError::Invariant(e.to_string()))?;
    let vs = vertex_view
        .forced_rates(&edges)
        .map_err(|e| SolveError::Invariant(e.to_string()))?;
    Ok(OracleResult {
        opt_weight,
        witness: (es, vs),
        enumerated_count: count,
    })
}

/// Minimum-weight tree spanning `terminals` under a single edge weight.
pub fn exact_steiner(
    graph: &PriorityGraph,
    terminals: &[usize],
    weight: impl Fn(usize) -> f64,
) -> Result<OracleResult<Vec<usize>>, SolveError> {
    let Some(&root) = terminals.iter().min() else {
        return Ok(OracleResult {
            opt_weight: 0.0,
            witness: Vec::new(),
            enumerated_count: 0,
        });
    };
    let lb: Vec<f64> = (0..graph.m()).map(&weight).collect();
    let (opt_weight, witness, count) =
        search_trees(graph, root, terminals, lb, vec![0.0; graph.n()], |edges| {
            edges.iter().map(|&e| weight(e)).sum()
        })?;
    Ok(OracleResult {
        opt_weight,
        witness,
        enumerated_count: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_is_forced() {
        let g = PriorityGraph::new(2, vec![(0, 1)], 2).unwrap();
        let inst = PstInstance::new(g, 0, &[(1, Level(2))], vec![vec![1.0, 3.0]]).unwrap();
        let r = exact_pst(&inst).unwrap();
        assert_eq!(r.opt_weight, 3.0);
        assert_eq!(r.witness.rates(), &[Level(2)]);
    }

    #[test]
    fn triangle_prefers_detour() {
        let g = PriorityGraph::new(3, vec![(0, 1), (1, 2), (0, 2)], 1).unwrap();
        let inst = PstInstance::new(
            g,
            0,
            &[(2, Level(1))],
            vec![vec![1.0], vec![1.0], vec![3.0]],
        )
        .unwrap();
        assert_eq!(exact_pst(&inst).unwrap().opt_weight, 2.0);
    }

    #[test]
    fn star_around_source_is_free() {
        let g = PriorityGraph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2)], 1).unwrap();
        let inst = PnwstInstance::new(
            g,
            0,
            &[(1, Level(1)), (2, Level(1)), (3, Level(1))],
            vec![vec![0.0]; 4],
        )
        .unwrap();
        assert_eq!(exact_pnwst(&inst).unwrap().opt_weight, 0.0);
    }

    #[test]
    fn four_cycle_opposite_terminals() {
        let g = PriorityGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)], 1).unwrap();
        let r = exact_steiner(&g, &[0, 2], |_| 1.0).unwrap();
        assert_eq!(r.opt_weight, 2.0);
        assert_eq!(r.witness.len(), 2);
    }

    #[test]
    fn subdivided_single_edge_agrees() {
        let g = PriorityGraph::new(2, vec![(0, 1)], 2).unwrap();
        let c = CombinedInstance::new(
            g,
            0,
            &[(1, Level(2))],
            vec![vec![1.0, 3.0]],
            vec![vec![0.0, 0.0]; 2],
        )
        .unwrap();
        let direct = exact_pst(&c.edge_part()).unwrap().opt_weight;
        let via = exact_pnwst(&c.subdivide_to_node_weighted())
            .unwrap()
            .opt_weight;
        assert_eq!(direct, 3.0);
        assert_eq!(via, 3.0);
        assert_eq!(exact_combined(&c).unwrap().opt_weight, 3.0);
    }

    #[test]
    fn rate_enumeration_agrees_with_tree_enumeration() {
        use crate::generators::{gen_random_pnwst, RandomSpec};
        for seed in 0..40 {
            let inst = gen_random_pnwst(&RandomSpec::new(7, 0.45, 3, 0.5, seed)).unwrap();
            let by_rates = exact_pnwst_by_rates(&inst).unwrap();
            let g = inst.graph();
            let (by_trees, _, _) = search_trees(
                g,
                inst.source(),
                inst.terminals(),
                vec![0.0; g.m()],
                row_one(inst.vertex_weights()),
                |edges| {
                    inst.solution_weight(&inst.forced_rates(edges).unwrap())
                        .unwrap()
                },
            )
            .unwrap();
            assert_eq!(by_rates.opt_weight, by_trees, "seed {seed}");
            assert_eq!(inst.check_feasible(&by_rates.witness), Ok(()));
        }
    }

    #[test]
    fn guard_refuses_large_graphs() {
        let edges: Vec<(usize, usize)> = (0..25).map(|i| (i, i + 1)).collect();
        let g = PriorityGraph::new(26, edges, 1).unwrap();
        let inst = PstInstance::new(g, 0, &[(25, Level(1))], vec![vec![1.0]; 25]).unwrap();
        assert_eq!(
            exact_pst(&inst).unwrap_err(),
            SolveError::TooLarge {
                edges: 25,
                limit: MAX_EDGES
            }
        );
    }
}
