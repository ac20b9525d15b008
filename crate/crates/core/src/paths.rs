//! Rate-restricted shortest paths.
//!
//! Every search here is Dijkstra with a heap keyed on `(distance, vertex)`,
//! neighbors scanned in ascending id and parents replaced only on strict
//! improvement, so parent trees are a pure function of the input.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::instance::{Level, PnwstInstance, PriorityGraph, PstInstance};

/// Distances and a shortest-path forest from a source set.
#[derive(Clone, Debug, PartialEq)]
pub struct PathResult {
    dist: Vec<f64>,
    parent: Vec<Option<(usize, usize)>>,
    settled: Vec<bool>,
    rate: Level,
    reached: Option<usize>,
}

impl PathResult {
    /// Distance to `v`; infinite when `v` was not reached.
    pub fn dist(&self, v: usize) -> f64 {
        self.dist[v]
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    pub fn is_reachable(&self, v: usize) -> bool {
        self.dist[v].is_finite()
    }

    /// `(predecessor, edge id)` on the chosen shortest path.
    pub fn parent(&self, v: usize) -> Option<(usize, usize)> {
        self.parent[v]
    }

    /// Whether `v` was popped before the search stopped. Only settled
    /// distances are final.
    pub fn is_settled(&self, v: usize) -> bool {
        self.settled[v]
    }

    /// The rate the search was restricted to.
    pub fn rate(&self) -> Level {
        self.rate
    }

    /// The vertex that triggered an early stop, if any.
    pub fn reached(&self) -> Option<usize> {
        self.reached
    }

    /// Vertices from the source set to `v`, inclusive. `None` if unreachable.
    pub fn path_vertices(&self, v: usize) -> Option<Vec<usize>> {
        if !self.is_reachable(v) {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some((p, _)) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }

    /// Edge ids from the source set to `v`.
    pub fn path_edges(&self, v: usize) -> Option<Vec<usize>> {
        if !self.is_reachable(v) {
            return None;
        }
        let mut edges = Vec::new();
        let mut cur = v;
        while let Some((p, e)) = self.parent[cur] {
            edges.push(e);
            cur = p;
        }
        edges.reverse();
        Some(edges)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multi-source Dijkstra. `step(from, to, edge)` is the cost of moving
/// along `edge`; `stop` is tested on every popped vertex.
pub(crate) fn dijkstra(
    graph: &PriorityGraph,
    sources: &[usize],
    rate: Level,
    step: impl Fn(usize, usize, usize) -> f64,
    mut stop: impl FnMut(usize) -> bool,
) -> PathResult {
    let n = graph.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Reverse(Key(0.0, s)));
    }
    let mut reached = None;
    while let Some(Reverse(Key(d, u))) = heap.pop() {
        if settled[u] {
            continue;
        }
        settled[u] = true;
        if stop(u) {
            reached = Some(u);
            break;
        }
        for &(x, e) in graph.neighbors(u) {
            if settled[x] {
                continue;
            }
            let nd = d + step(u, x, e);
            if nd < dist[x] {
                dist[x] = nd;
                parent[x] = Some((u, e));
                heap.push(Reverse(Key(nd, x)));
            }
        }
    }
    PathResult {
        dist,
        parent,
        settled,
        rate,
        reached,
    }
}

/// Shortest paths from `sources` with edge costs `w(e, rate)`.
pub fn edge_rate_search(inst: &PstInstance, sources: &[usize], rate: Level) -> PathResult {
    edge_rate_search_until(inst, sources, rate, |_| false)
}

/// As [`edge_rate_search`], stopping at the first popped vertex satisfying
/// `stop`.
pub fn edge_rate_search_until(
    inst: &PstInstance,
    sources: &[usize],
    rate: Level,
    stop: impl FnMut(usize) -> bool,
) -> PathResult {
    dijkstra(
        inst.graph(),
        sources,
        rate,
        |_, _, e| inst.weight(e, rate),
        stop,
    )
}

/// Shortest paths under an arbitrary per-edge weight.
pub fn weighted_search(
    graph: &PriorityGraph,
    sources: &[usize],
    weight: impl Fn(usize) -> f64,
) -> PathResult {
    dijkstra(
        graph,
        sources,
        Level::ABSENT,
        |_, _, e| weight(e),
        |_| false,
    )
}

/// How interior vertices are charged in node-weighted searches.
#[derive(Clone, Copy, Debug)]
pub enum NodeCost<'a> {
    /// `w(y, b)`.
    Faithful,
    /// `max(0, w(y, b) - w(y, R(y)))` for the given current rates.
    Residual(&'a [Level]),
}

impl NodeCost<'_> {
    pub fn cost(&self, inst: &PnwstInstance, v: usize, rate: Level) -> f64 {
        let full = inst.weight(v, rate);
        match self {
            NodeCost::Faithful => full,
            NodeCost::Residual(current) => (full - inst.weight(v, current[v])).max(0.0),
        }
    }
}

/// `σ_b(source, ·)`: the cheapest path cost counting interior vertices only.
pub fn node_rate_search(
    inst: &PnwstInstance,
    source: usize,
    rate: Level,
    cost: NodeCost<'_>,
) -> PathResult {
    dijkstra(
        inst.graph(),
        &[source],
        rate,
        |from, _, _| {
            if from == source {
                0.0
            } else {
                cost.cost(inst, from, rate)
            }
        },
        |_| false,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(scale: f64) -> PstInstance {
        // s = 0, a = 1, t = 2; edges sa, at, st.
        let g = PriorityGraph::new(3, vec![(0, 1), (1, 2), (0, 2)], 2).unwrap();
        PstInstance::new(
            g,
            0,
            &[(2, Level(1))],
            vec![
                vec![1.0, 1.0 * scale],
                vec![1.0, 1.0 * scale],
                vec![3.0, 3.0 * scale],
            ],
        )
        .unwrap()
    }

    #[test]
    fn source_has_zero_distance() {
        let inst = triangle(2.0);
        for b in [Level(1), Level(2)] {
            let r = edge_rate_search(&inst, &[1], b);
            assert_eq!(r.dist(1), 0.0);
            assert_eq!(r.path_vertices(1), Some(vec![1]));
        }
    }

    #[test]
    fn triangle_detour_wins() {
        let inst = triangle(2.0);
        let r = edge_rate_search(&inst, &[0], Level(1));
        assert_eq!(r.dist(2), 2.0);
        assert_eq!(r.path_vertices(2), Some(vec![0, 1, 2]));
        assert_eq!(r.path_edges(2), Some(vec![0, 1]));
        let r = edge_rate_search(&inst, &[0], Level(2));
        assert_eq!(r.dist(2), 4.0);
    }

    #[test]
    fn early_stop_reports_target() {
        let inst = triangle(2.0);
        let r = edge_rate_search_until(&inst, &[2], Level(1), |v| v == 0);
        assert_eq!(r.reached(), Some(0));
        assert_eq!(r.dist(0), 2.0);
        assert!(r.is_settled(0));
    }

    fn node_path(weights: Vec<f64>, edges: Vec<(usize, usize)>) -> PnwstInstance {
        let n = weights.len();
        let g = PriorityGraph::new(n, edges, 1).unwrap();
        let t = n - 1;
        PnwstInstance::new(
            g,
            0,
            &[(t, Level(1))],
            weights.into_iter().map(|w| vec![w]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn adjacent_vertices_have_zero_node_distance() {
        let inst = node_path(vec![0.0, 0.0], vec![(0, 1)]);
        let r = node_rate_search(&inst, 0, Level(1), NodeCost::Faithful);
        assert_eq!(r.dist(1), 0.0);
        assert_eq!(r.dist(0), 0.0);
    }

    #[test]
    fn single_interior_vertex_is_charged() {
        let inst = node_path(vec![0.0, 5.0, 0.0], vec![(0, 1), (1, 2)]);
        let r = node_rate_search(&inst, 0, Level(1), NodeCost::Faithful);
        assert_eq!(r.dist(2), 5.0);
        let r = node_rate_search(&inst, 2, Level(1), NodeCost::Faithful);
        assert_eq!(r.dist(0), 5.0);
    }

    #[test]
    fn residual_cost_discounts_bought_rate() {
        let g = PriorityGraph::new(3, vec![(0, 1), (1, 2)], 2).unwrap();
        let inst = PnwstInstance::new(
            g,
            0,
            &[(2, Level(2))],
            vec![vec![0.0, 0.0], vec![2.0, 5.0], vec![0.0, 0.0]],
        )
        .unwrap();
        let rates = [Level(2), Level(1), Level(2)];
        let r = node_rate_search(&inst, 0, Level(2), NodeCost::Residual(&rates));
        assert_eq!(r.dist(2), 3.0);
        let r = node_rate_search(&inst, 0, Level(1), NodeCost::Residual(&rates));
        assert_eq!(r.dist(2), 0.0);
    }
}
