//! Problem instances: the shared graph, the terminal demands and the
//! per-level weight tables.
//!
//! Vertices are `0..n` internally. Priority levels are indices `1..=k` into
//! an increasing table of level values; level 0 ([`Level::ABSENT`]) means
//! "not bought" and always weighs zero. Every algorithm compares level
//! indices only.
//!
//! `Display` impls render vertex ids 1-based, matching the instance files.

use std::collections::VecDeque;
use std::fmt;

use crate::error::InstanceError;

/// A priority level index. `Level(0)` is the absent rate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level(pub u32);

impl Level {
    pub const ABSENT: Level = Level(0);

    pub fn is_absent(self) -> bool {
        self.0 == 0
    }

    /// Zero-based row index into a weight table. Panics on `ABSENT`.
    pub(crate) fn row(self) -> usize {
        assert!(!self.is_absent(), "absent level has no weight row");
        self.0 as usize - 1
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An undirected graph together with its `k` priority levels.
#[derive(Clone, Debug, PartialEq)]
pub struct PriorityGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<(usize, usize)>>,
    level_values: Vec<f64>,
}

impl PriorityGraph {
    /// Graph with levels valued `1..=k`.
    pub fn new(n: usize, edges: Vec<(usize, usize)>, k: usize) -> Result<Self, InstanceError> {
        Self::with_level_values(n, edges, (1..=k).map(|p| p as f64).collect())
    }

    pub fn with_level_values(
        n: usize,
        edges: Vec<(usize, usize)>,
        level_values: Vec<f64>,
    ) -> Result<Self, InstanceError> {
        if level_values.is_empty() {
            return Err(InstanceError::NoLevels);
        }
        let mut adjacency = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            for x in [u, v] {
                if x >= n {
                    return Err(InstanceError::VertexOutOfRange { vertex: x, n });
                }
            }
            adjacency[u].push((v, id));
            if u != v {
                adjacency[v].push((u, id));
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            edges,
            adjacency,
            level_values,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn k(&self) -> usize {
        self.level_values.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    /// `(neighbor, edge id)` pairs, sorted by neighbor.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn level_values(&self) -> &[f64] {
        &self.level_values
    }

    /// The highest level `p_k`.
    pub fn top_level(&self) -> Level {
        Level(self.k() as u32)
    }

    /// All levels `1..=k`, lowest first.
    pub fn levels(&self) -> impl Iterator<Item = Level> + Clone {
        (1..=self.k() as u32).map(Level)
    }

    pub fn find_edge(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.n {
            return None;
        }
        self.adjacency[u]
            .iter()
            .find(|&&(x, _)| x == v)
            .map(|&(_, id)| id)
    }

    /// Vertices reachable from `start`, as a membership mask.
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        if start >= self.n {
            return seen;
        }
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            for &(x, _) in &self.adjacency[u] {
                if !seen[x] {
                    seen[x] = true;
                    queue.push_back(x);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.reachable_from(0).iter().all(|&r| r)
    }

    fn structural_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for w in self.level_values.windows(2).enumerate() {
            let (i, pair) = w;
            if pair[0].partial_cmp(&pair[1]) != Some(std::cmp::Ordering::Less) {
                out.push(Violation::LevelsNotIncreasing {
                    level: Level(i as u32 + 2),
                });
            }
        }
        let mut seen = std::collections::BTreeMap::new();
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            if u == v {
                out.push(Violation::SelfLoop {
                    edge: id,
                    vertex: u,
                });
                continue;
            }
            let key = (u.min(v), u.max(v));
            if let Some(&first) = seen.get(&key) {
                out.push(Violation::DuplicateEdge {
                    first,
                    second: id,
                    endpoints: key,
                });
            } else {
                seen.insert(key, id);
            }
        }
        if self.n > 0 {
            let reach = self.reachable_from(0);
            if let Some(v) = reach.iter().position(|&r| !r) {
                out.push(Violation::Disconnected { unreachable: v });
            }
        }
        out
    }
}

/// Source, terminals and their priorities.
#[derive(Clone, Debug, PartialEq)]
pub struct DemandSet {
    source: usize,
    priority: Vec<Level>,
    terminals: Vec<usize>,
}

impl DemandSet {
    pub fn new(
        graph: &PriorityGraph,
        source: usize,
        terminals: &[(usize, Level)],
    ) -> Result<Self, InstanceError> {
        let n = graph.n();
        if source >= n {
            return Err(InstanceError::VertexOutOfRange { vertex: source, n });
        }
        let mut priority = vec![Level::ABSENT; n];
        let mut list = Vec::with_capacity(terminals.len());
        for &(v, level) in terminals {
            if v >= n {
                return Err(InstanceError::VertexOutOfRange { vertex: v, n });
            }
            if level.is_absent() || level.0 as usize > graph.k() {
                return Err(InstanceError::LevelOutOfRange {
                    level: level.0,
                    k: graph.k(),
                });
            }
            if !priority[v].is_absent() {
                return Err(InstanceError::DuplicateTerminal { vertex: v });
            }
            priority[v] = level;
            list.push(v);
        }
        list.sort_unstable();
        Ok(Self {
            source,
            priority,
            terminals: list,
        })
    }

    pub fn source(&self) -> usize {
        self.source
    }

    /// Terminals in ascending id order.
    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    /// `P(v)`, or `ABSENT` for non-terminals (including the source).
    pub fn priority(&self, v: usize) -> Level {
        self.priority[v]
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        !self.priority[v].is_absent()
    }

    /// Distinct terminal priorities, ascending.
    pub fn distinct_priorities(&self) -> Vec<Level> {
        let mut levels: Vec<Level> = self.terminals.iter().map(|&t| self.priority[t]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels
    }

    fn violations(&self) -> Vec<Violation> {
        if self.is_terminal(self.source) {
            vec![Violation::SourceIsTerminal {
                source: self.source,
            }]
        } else {
            Vec::new()
        }
    }
}

/// Which element a weight-related violation concerns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Element {
    Edge(usize, usize),
    Vertex(usize),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Element::Edge(u, v) => write!(f, "edge ({},{})", u + 1, v + 1),
            Element::Vertex(v) => write!(f, "vertex {}", v + 1),
        }
    }
}

/// A violated modelling assumption, reported by `validate`.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    SelfLoop {
        edge: usize,
        vertex: usize,
    },
    DuplicateEdge {
        first: usize,
        second: usize,
        endpoints: (usize, usize),
    },
    Disconnected {
        unreachable: usize,
    },
    LevelsNotIncreasing {
        level: Level,
    },
    SourceIsTerminal {
        source: usize,
    },
    InvalidWeight {
        element: Element,
        level: Level,
        value: f64,
    },
    Monotonicity {
        element: Element,
        level: Level,
    },
    TerminalNonzeroWeight {
        vertex: usize,
        level: Level,
    },
    SourceNonzeroWeight {
        source: usize,
        level: Level,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SelfLoop { vertex, .. } => write!(f, "self-loop at vertex {}", vertex + 1),
            Violation::DuplicateEdge { endpoints, .. } => write!(
                f,
                "duplicate edge ({},{})",
                endpoints.0 + 1,
                endpoints.1 + 1
            ),
            Violation::Disconnected { unreachable } => {
                write!(
                    f,
                    "graph disconnected: vertex {} unreachable",
                    unreachable + 1
                )
            }
            Violation::LevelsNotIncreasing { level } => {
                write!(f, "level values not increasing at level {level}")
            }
            Violation::SourceIsTerminal { source } => {
                write!(f, "source {} is also a terminal", source + 1)
            }
            Violation::InvalidWeight {
                element,
                level,
                value,
            } => write!(f, "invalid weight {value} at {element} level {level}"),
            Violation::Monotonicity { element, level } => {
                write!(f, "monotonicity at {element} (level {level})")
            }
            Violation::TerminalNonzeroWeight { vertex, level } => write!(
                f,
                "terminal nonzero weight at vertex {} level {level}",
                vertex + 1
            ),
            Violation::SourceNonzeroWeight { source, level } => write!(
                f,
                "source nonzero weight at vertex {} level {level}",
                source + 1
            ),
        }
    }
}

fn check_table_shape(table: &[Vec<f64>], rows: usize, k: usize) -> Result<(), InstanceError> {
    if table.len() != rows {
        return Err(InstanceError::RowCount {
            found: table.len(),
            expected: rows,
        });
    }
    for (row, entries) in table.iter().enumerate() {
        if entries.len() != k {
            return Err(InstanceError::RowLength {
                row,
                found: entries.len(),
                expected: k,
            });
        }
    }
    Ok(())
}

fn weight_row_violations(element: Element, row: &[f64], out: &mut Vec<Violation>) {
    for (i, &value) in row.iter().enumerate() {
        let level = Level(i as u32 + 1);
        if !value.is_finite() || value < 0.0 {
            out.push(Violation::InvalidWeight {
                element,
                level,
                value,
            });
        } else if i > 0 && value < row[i - 1] {
            out.push(Violation::Monotonicity { element, level });
        }
    }
}

fn lookup(table: &[Vec<f64>], index: usize, level: Level) -> f64 {
    if level.is_absent() {
        0.0
    } else {
        table[index][level.row()]
    }
}

/// Edge-weighted priority Steiner tree instance.
#[derive(Clone, Debug, PartialEq)]
pub struct PstInstance {
    graph: PriorityGraph,
    demands: DemandSet,
    edge_weights: Vec<Vec<f64>>,
}

impl PstInstance {
    /// `edge_weights[e][i]` is `w(e, level i+1)`.
    pub fn new(
        graph: PriorityGraph,
        source: usize,
        terminals: &[(usize, Level)],
        edge_weights: Vec<Vec<f64>>,
    ) -> Result<Self, InstanceError> {
        check_table_shape(&edge_weights, graph.m(), graph.k())?;
        let demands = DemandSet::new(&graph, source, terminals)?;
        Ok(Self {
            graph,
            demands,
            edge_weights,
        })
    }

    pub fn graph(&self) -> &PriorityGraph {
        &self.graph
    }

    pub fn demands(&self) -> &DemandSet {
        &self.demands
    }

    pub fn source(&self) -> usize {
        self.demands.source
    }

    pub fn terminals(&self) -> &[usize] {
        &self.demands.terminals
    }

    pub fn priority(&self, v: usize) -> Level {
        self.demands.priority[v]
    }

    pub fn edge_weights(&self) -> &[Vec<f64>] {
        &self.edge_weights
    }

    /// `w(e, level)`; zero at the absent level.
    pub fn weight(&self, edge: usize, level: Level) -> f64 {
        lookup(&self.edge_weights, edge, level)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.graph.structural_violations();
        out.extend(self.demands.violations());
        for (id, row) in self.edge_weights.iter().enumerate() {
            let (u, v) = self.graph.edge(id);
            weight_row_violations(Element::Edge(u, v), row, &mut out);
        }
        out
    }

    pub fn to_combined(&self) -> CombinedInstance {
        CombinedInstance {
            graph: self.graph.clone(),
            demands: self.demands.clone(),
            edge_weights: self.edge_weights.clone(),
            vertex_weights: vec![vec![0.0; self.graph.k()]; self.graph.n()],
        }
    }
}

/// Node-weighted priority Steiner tree instance. Edges are free.
#[derive(Clone, Debug, PartialEq)]
pub struct PnwstInstance {
    graph: PriorityGraph,
    demands: DemandSet,
    vertex_weights: Vec<Vec<f64>>,
}

impl PnwstInstance {
    /// `vertex_weights[v][i]` is `w(v, level i+1)`.
    pub fn new(
        graph: PriorityGraph,
        source: usize,
        terminals: &[(usize, Level)],
        vertex_weights: Vec<Vec<f64>>,
    ) -> Result<Self, InstanceError> {
        check_table_shape(&vertex_weights, graph.n(), graph.k())?;
        let demands = DemandSet::new(&graph, source, terminals)?;
        Ok(Self {
            graph,
            demands,
            vertex_weights,
        })
    }

    pub fn graph(&self) -> &PriorityGraph {
        &self.graph
    }

    pub fn demands(&self) -> &DemandSet {
        &self.demands
    }

    pub fn source(&self) -> usize {
        self.demands.source
    }

    pub fn terminals(&self) -> &[usize] {
        &self.demands.terminals
    }

    pub fn priority(&self, v: usize) -> Level {
        self.demands.priority[v]
    }

    /// Priority a tree rooted at `v` carries: `P(v)` for terminals, `p_k`
    /// for the source.
    pub fn root_priority(&self, v: usize) -> Level {
        if v == self.source() {
            self.graph.top_level()
        } else {
            self.priority(v)
        }
    }

    pub fn vertex_weights(&self) -> &[Vec<f64>] {
        &self.vertex_weights
    }

    pub fn weight(&self, vertex: usize, level: Level) -> f64 {
        lookup(&self.vertex_weights, vertex, level)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.graph.structural_violations();
        out.extend(self.demands.violations());
        let s = self.source();
        for (v, row) in self.vertex_weights.iter().enumerate() {
            weight_row_violations(Element::Vertex(v), row, &mut out);
            let zero_up_to = if v == s {
                self.graph.k()
            } else {
                self.priority(v).0 as usize
            };
            if let Some(i) = row[..zero_up_to].iter().position(|&w| w != 0.0) {
                let level = Level(i as u32 + 1);
                out.push(if v == s {
                    Violation::SourceNonzeroWeight { source: v, level }
                } else {
                    Violation::TerminalNonzeroWeight { vertex: v, level }
                });
            }
        }
        out
    }
}

/// Instance carrying both edge and vertex weights. Objective is the sum of
/// both at their respective rates; it exists to exercise the subdivision
/// reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct CombinedInstance {
    graph: PriorityGraph,
    demands: DemandSet,
    edge_weights: Vec<Vec<f64>>,
    vertex_weights: Vec<Vec<f64>>,
}

impl CombinedInstance {
    pub fn new(
        graph: PriorityGraph,
        source: usize,
        terminals: &[(usize, Level)],
        edge_weights: Vec<Vec<f64>>,
        vertex_weights: Vec<Vec<f64>>,
    ) -> Result<Self, InstanceError> {
        check_table_shape(&edge_weights, graph.m(), graph.k())?;
        check_table_shape(&vertex_weights, graph.n(), graph.k())?;
        let demands = DemandSet::new(&graph, source, terminals)?;
        Ok(Self {
            graph,
            demands,
            edge_weights,
            vertex_weights,
        })
    }

    pub fn graph(&self) -> &PriorityGraph {
        &self.graph
    }

    pub fn demands(&self) -> &DemandSet {
        &self.demands
    }

    pub fn edge_weight(&self, edge: usize, level: Level) -> f64 {
        lookup(&self.edge_weights, edge, level)
    }

    pub fn vertex_weight(&self, vertex: usize, level: Level) -> f64 {
        lookup(&self.vertex_weights, vertex, level)
    }

    /// The edge-weighted part alone. Only meaningful when every vertex
    /// weight is zero.
    pub fn edge_part(&self) -> PstInstance {
        PstInstance {
            graph: self.graph.clone(),
            demands: self.demands.clone(),
            edge_weights: self.edge_weights.clone(),
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let node_view = PnwstInstance {
            graph: self.graph.clone(),
            demands: self.demands.clone(),
            vertex_weights: self.vertex_weights.clone(),
        };
        let mut out = node_view.validate();
        for (id, row) in self.edge_weights.iter().enumerate() {
            let (u, v) = self.graph.edge(id);
            weight_row_violations(Element::Edge(u, v), row, &mut out);
        }
        out
    }

    /// Replace every edge `uv` by a path `u x v` whose middle vertex carries
    /// the edge's weight table. Vertex `n + e` subdivides edge `e`; edges
    /// `2e` and `2e + 1` are its two halves.
    pub fn subdivide_to_node_weighted(&self) -> PnwstInstance {
        let n = self.graph.n();
        let mut edges = Vec::with_capacity(2 * self.graph.m());
        for (id, &(u, v)) in self.graph.edges().iter().enumerate() {
            edges.push((u, n + id));
            edges.push((n + id, v));
        }
        let graph = PriorityGraph::with_level_values(
            n + self.graph.m(),
            edges,
            self.graph.level_values().to_vec(),
        )
        .expect("subdivision of a valid graph is valid");
        let mut priority = self.demands.priority.clone();
        priority.resize(n + self.graph.m(), Level::ABSENT);
        let demands = DemandSet {
            source: self.demands.source,
            priority,
            terminals: self.demands.terminals.clone(),
        };
        let mut vertex_weights = self.vertex_weights.clone();
        vertex_weights.extend(self.edge_weights.iter().cloned());
        PnwstInstance {
            graph,
            demands,
            vertex_weights,
        }
    }
}

/// Either problem kind, as read from a file or produced by a generator.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyInstance {
    Pst(PstInstance),
    Pnwst(PnwstInstance),
}

impl AnyInstance {
    pub fn graph(&self) -> &PriorityGraph {
        match self {
            AnyInstance::Pst(i) => i.graph(),
            AnyInstance::Pnwst(i) => i.graph(),
        }
    }

    pub fn demands(&self) -> &DemandSet {
        match self {
            AnyInstance::Pst(i) => i.demands(),
            AnyInstance::Pnwst(i) => i.demands(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AnyInstance::Pst(_) => "PST",
            AnyInstance::Pnwst(_) => "PNWST",
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        match self {
            AnyInstance::Pst(i) => i.validate(),
            AnyInstance::Pnwst(i) => i.validate(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge(w: [f64; 2]) -> PstInstance {
        let g = PriorityGraph::new(2, vec![(0, 1)], 2).unwrap();
        PstInstance::new(g, 0, &[(1, Level(2))], vec![w.to_vec()]).unwrap()
    }

    #[test]
    fn monotone_single_edge_is_valid() {
        assert!(single_edge([1.0, 3.0]).validate().is_empty());
    }

    #[test]
    fn decreasing_weight_is_a_monotonicity_violation() {
        let v = single_edge([1.0, 0.5]).validate();
        assert_eq!(
            v,
            vec![Violation::Monotonicity {
                element: Element::Edge(0, 1),
                level: Level(2)
            }]
        );
        assert_eq!(v[0].to_string(), "monotonicity at edge (1,2) (level 2)");
    }

    #[test]
    fn terminal_with_weight_is_reported() {
        let g = PriorityGraph::new(2, vec![(0, 1)], 1).unwrap();
        let inst = PnwstInstance::new(g, 0, &[(1, Level(1))], vec![vec![0.0], vec![4.0]]).unwrap();
        let v = inst.validate();
        assert_eq!(
            v,
            vec![Violation::TerminalNonzeroWeight {
                vertex: 1,
                level: Level(1)
            }]
        );
        assert!(v[0].to_string().starts_with("terminal nonzero weight"));
    }

    #[test]
    fn terminal_weight_above_its_priority_is_allowed() {
        let g = PriorityGraph::new(2, vec![(0, 1)], 2).unwrap();
        let inst = PnwstInstance::new(g, 0, &[(1, Level(1))], vec![vec![0.0, 0.0], vec![0.0, 2.0]])
            .unwrap();
        assert!(inst.validate().is_empty());
    }

    #[test]
    fn source_weight_is_reported() {
        let g = PriorityGraph::new(2, vec![(0, 1)], 1).unwrap();
        let inst = PnwstInstance::new(g, 0, &[(1, Level(1))], vec![vec![1.0], vec![0.0]]).unwrap();
        assert!(matches!(
            inst.validate()[..],
            [Violation::SourceNonzeroWeight { source: 0, .. }]
        ));
    }

    #[test]
    fn structural_violations_are_collected() {
        let g = PriorityGraph::new(4, vec![(0, 1), (1, 0), (2, 2)], 1).unwrap();
        let inst = PstInstance::new(
            g,
            0,
            &[(0, Level(1))],
            vec![vec![1.0], vec![1.0], vec![-1.0]],
        )
        .unwrap();
        let v = inst.validate();
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::DuplicateEdge { .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::SelfLoop { .. })));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::Disconnected { .. })));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::SourceIsTerminal { .. })));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::InvalidWeight { .. })));
    }

    #[test]
    fn construction_rejects_bad_shapes() {
        let g = PriorityGraph::new(2, vec![(0, 1)], 2).unwrap();
        assert_eq!(
            PstInstance::new(g.clone(), 0, &[(1, Level(3))], vec![vec![1.0, 2.0]]),
            Err(InstanceError::LevelOutOfRange { level: 3, k: 2 })
        );
        assert!(matches!(
            PstInstance::new(g.clone(), 0, &[(1, Level(1))], vec![vec![1.0]]),
            Err(InstanceError::RowLength { .. })
        ));
        assert!(matches!(
            PstInstance::new(g, 5, &[], vec![vec![1.0, 1.0]]),
            Err(InstanceError::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            PriorityGraph::new(2, vec![(0, 2)], 1),
            Err(InstanceError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn subdivision_of_single_edge() {
        let g = PriorityGraph::new(2, vec![(0, 1)], 2).unwrap();
        let c = CombinedInstance::new(
            g,
            0,
            &[(1, Level(2))],
            vec![vec![1.0, 3.0]],
            vec![vec![0.0, 0.0]; 2],
        )
        .unwrap();
        let p = c.subdivide_to_node_weighted();
        assert_eq!(p.graph().n(), 3);
        assert_eq!(p.graph().edges(), &[(0, 2), (2, 1)]);
        assert_eq!(p.vertex_weights()[2], vec![1.0, 3.0]);
        assert_eq!(p.priority(2), Level::ABSENT);
        assert!(p.validate().is_empty());
    }

    #[test]
    fn subdivision_counts() {
        let edges = vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)];
        let m = edges.len();
        let g = PriorityGraph::new(4, edges, 1).unwrap();
        let c = CombinedInstance::new(
            g,
            0,
            &[(2, Level(1))],
            vec![vec![1.0]; m],
            vec![vec![0.0]; 4],
        )
        .unwrap();
        let p = c.subdivide_to_node_weighted();
        assert_eq!(p.graph().n(), 4 + m);
        assert_eq!(p.graph().m(), 2 * m);
    }
}
