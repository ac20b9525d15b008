//! Single-rate Steiner tree 2-approximation via the metric closure MST.

use std::collections::BTreeSet;

use crate::error::SolveError;
use crate::instance::PriorityGraph;
use crate::paths::weighted_search;
use crate::unionfind::UnionFind;

/// A tree given by edge ids, with its weight under the weights it was built for.
#[derive(Clone, Debug, PartialEq)]
pub struct SteinerTree {
    pub edges: Vec<usize>,
    pub weight: f64,
}

/// Connect `terminals` with weight at most `2(1 - 1/|T|)` times the optimum.
///
/// Shortest paths between every terminal pair, Prim over that closure,
/// each closure edge expanded back into its path, a Kruskal MST over the
/// union, then non-terminal leaves pruned.
pub fn steiner_2approx(
    graph: &PriorityGraph,
    terminals: &[usize],
    weight: impl Fn(usize) -> f64,
) -> Result<SteinerTree, SolveError> {
    let mut terms: Vec<usize> = terminals.to_vec();
    terms.sort_unstable();
    terms.dedup();
    if terms.len() <= 1 {
        return Ok(SteinerTree {
            edges: Vec::new(),
            weight: 0.0,
        });
    }
    let searches: Vec<_> = terms
        .iter()
        .map(|&t| weighted_search(graph, &[t], &weight))
        .collect();
    for &t in &terms[1..] {
        if !searches[0].is_reachable(t) {
            return Err(SolveError::Unreachable { terminal: t });
        }
    }

    // Prim on the closure, ties by terminal index.
    let q = terms.len();
    let mut in_tree = vec![false; q];
    let mut best = vec![(f64::INFINITY, usize::MAX); q];
    in_tree[0] = true;
    for j in 1..q {
        best[j] = (searches[0].dist(terms[j]), 0);
    }
    let mut union = BTreeSet::new();
    for _ in 1..q {
        let next = (0..q)
            .filter(|&j| !in_tree[j])
            .min_by(|&a, &b| best[a].0.total_cmp(&best[b].0).then(a.cmp(&b)))
            .expect("a terminal remains outside the tree");
        in_tree[next] = true;
        let from = best[next].1;
        union.extend(
            searches[from]
                .path_edges(terms[next])
                .expect("terminals are mutually reachable"),
        );
        for j in 0..q {
            let d = searches[next].dist(terms[j]);
            if !in_tree[j] && d < best[j].0 {
                best[j] = (d, next);
            }
        }
    }

    let mut candidates: Vec<usize> = union.into_iter().collect();
    candidates.sort_by(|&a, &b| weight(a).total_cmp(&weight(b)).then(a.cmp(&b)));
    let mut uf = UnionFind::new(graph.n());
    let mut edges: Vec<usize> = candidates
        .into_iter()
        .filter(|&e| {
            let (u, v) = graph.edge(e);
            uf.union(u, v)
        })
        .collect();

    let mut is_terminal = vec![false; graph.n()];
    for &t in &terms {
        is_terminal[t] = true;
    }
    prune_leaves(graph, &mut edges, |v| is_terminal[v]);
    edges.sort_unstable();
    let weight = edges.iter().map(|&e| weight(e)).sum();
    Ok(SteinerTree { edges, weight })
}

/// Repeatedly drop edges hanging off a leaf that is not `keep`.
pub(crate) fn prune_leaves(
    graph: &PriorityGraph,
    edges: &mut Vec<usize>,
    keep: impl Fn(usize) -> bool,
) {
    let mut degree = vec![0usize; graph.n()];
    for &e in edges.iter() {
        let (u, v) = graph.edge(e);
        degree[u] += 1;
        degree[v] += 1;
    }
    let mut alive = vec![true; edges.len()];
    loop {
        let mut changed = false;
        for (i, &e) in edges.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            let (u, v) = graph.edge(e);
            if (degree[u] == 1 && !keep(u)) || (degree[v] == 1 && !keep(v)) {
                alive[i] = false;
                degree[u] -= 1;
                degree[v] -= 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut i = 0;
    edges.retain(|_| {
        i += 1;
        alive[i - 1]
    });
}
