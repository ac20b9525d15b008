//! Rate assignments, their weight, feasibility checking and forced-rate
//! canonicalization.

use std::fmt;

use thiserror::Error;

use crate::instance::{Element, Level, PnwstInstance, PstInstance};
use crate::tree::{RootedTree, TreeError};

/// Per-edge rates. An edge with rate `ABSENT` is not in the tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRateSolution {
    rates: Vec<Level>,
}

impl EdgeRateSolution {
    pub fn new(rates: Vec<Level>) -> Self {
        Self { rates }
    }

    pub fn empty(m: usize) -> Self {
        Self {
            rates: vec![Level::ABSENT; m],
        }
    }

    pub fn rates(&self) -> &[Level] {
        &self.rates
    }

    pub fn rate(&self, edge: usize) -> Level {
        self.rates[edge]
    }

    pub fn selected_edges(&self) -> Vec<usize> {
        self.rates
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_absent())
            .map(|(e, _)| e)
            .collect()
    }
}

/// Per-vertex rates plus the tree edges joining the selected vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexRateSolution {
    rates: Vec<Level>,
    tree_edges: Vec<usize>,
}

impl VertexRateSolution {
    pub fn new(rates: Vec<Level>, mut tree_edges: Vec<usize>) -> Self {
        tree_edges.sort_unstable();
        tree_edges.dedup();
        Self { rates, tree_edges }
    }

    pub fn rates(&self) -> &[Level] {
        &self.rates
    }

    pub fn rate(&self, v: usize) -> Level {
        self.rates[v]
    }

    pub fn tree_edges(&self) -> &[usize] {
        &self.tree_edges
    }

    pub fn selected_vertices(&self) -> Vec<usize> {
        self.rates
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_absent())
            .map(|(v, _)| v)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolutionError {
    #[error("solution has {found} entries, instance has {expected}")]
    Length { found: usize, expected: usize },
    #[error("unknown edge id {0}")]
    UnknownEdge(usize),
    #[error("level {level} exceeds k = {k}")]
    UnknownLevel { level: u32, k: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ForcedRatesError {
    #[error("edge set is not a tree: edge {0} closes a cycle")]
    Cycle(usize),
    #[error("edge set is not a tree: edge {0} is not connected to the source")]
    Detached(usize),
    #[error("terminal {0} is not spanned by the tree")]
    TerminalMissing(usize),
    #[error("unknown edge id {0}")]
    UnknownEdge(usize),
}

impl From<TreeError> for ForcedRatesError {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::Cycle(e) => ForcedRatesError::Cycle(e),
            TreeError::Detached(e) => ForcedRatesError::Detached(e),
        }
    }
}

/// The first reason a solution is infeasible.
#[derive(Debug, Clone, PartialEq)]
pub enum Infeasibility {
    /// The selected elements contain a cycle.
    Cycle {
        edge: usize,
    },
    /// Selected elements not connected to the source.
    Detached {
        element: Element,
    },
    SourceMissing,
    Unreachable {
        terminal: usize,
    },
    RateTooLow {
        terminal: usize,
        element: Element,
        rate: Level,
        required: Level,
    },
    Malformed(SolutionError),
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::Cycle { edge } => {
                write!(f, "selected edges contain a cycle (edge #{})", edge + 1)
            }
            Infeasibility::Detached { element } => {
                write!(f, "{element} is selected but not connected to the source")
            }
            Infeasibility::SourceMissing => write!(f, "source not in solution"),
            Infeasibility::Unreachable { terminal } => write!(f, "{} unreachable", terminal + 1),
            Infeasibility::RateTooLow {
                element,
                rate,
                required,
                ..
            } => write!(f, "{element} rate {rate} < required {required}"),
            Infeasibility::Malformed(e) => write!(f, "{e}"),
        }
    }
}

/// Operations shared by the edge-weighted and node-weighted problems.
pub trait PriorityProblem {
    type Solution;

    /// Sum of every element's weight at its assigned rate.
    fn solution_weight(&self, sol: &Self::Solution) -> Result<f64, SolutionError>;

    /// Tree-ness, terminal coverage and the per-terminal rate constraint.
    fn check_feasible(&self, sol: &Self::Solution) -> Result<(), Infeasibility>;

    /// The pointwise-minimal feasible rates on a tree given by edge ids.
    /// Branches without terminals get the absent rate and drop out.
    fn forced_rates(&self, tree_edges: &[usize]) -> Result<Self::Solution, ForcedRatesError>;
}

fn check_edge_ids(m: usize, edges: &[usize]) -> Result<(), ForcedRatesError> {
    match edges.iter().find(|&&e| e >= m) {
        Some(&e) => Err(ForcedRatesError::UnknownEdge(e)),
        None => Ok(()),
    }
}

/// For every tree member, the highest terminal priority in its subtree.
fn subtree_demand(tree: &RootedTree, priority: impl Fn(usize) -> Level) -> Vec<Level> {
    let mut need = vec![Level::ABSENT; tree.parent.len()];
    for &v in tree.order.iter().rev() {
        need[v] = need[v].max(priority(v));
        if let Some((p, _)) = tree.parent[v] {
            need[p] = need[p].max(need[v]);
        }
    }
    need
}

impl PriorityProblem for PstInstance {
    type Solution = EdgeRateSolution;

    fn solution_weight(&self, sol: &EdgeRateSolution) -> Result<f64, SolutionError> {
        let m = self.graph().m();
        if sol.rates.len() != m {
            return Err(SolutionError::Length {
                found: sol.rates.len(),
                expected: m,
            });
        }
        let mut total = 0.0;
        for (e, &r) in sol.rates.iter().enumerate() {
            if r.0 as usize > self.graph().k() {
                return Err(SolutionError::UnknownLevel {
                    level: r.0,
                    k: self.graph().k(),
                });
            }
            total += self.weight(e, r);
        }
        Ok(total)
    }

    fn check_feasible(&self, sol: &EdgeRateSolution) -> Result<(), Infeasibility> {
        self.solution_weight(sol)
            .map_err(Infeasibility::Malformed)?;
        let g = self.graph();
        let tree = match RootedTree::build(g, self.source(), &sol.selected_edges()) {
            Ok(t) => t,
            Err(TreeError::Cycle(edge)) => return Err(Infeasibility::Cycle { edge }),
            Err(TreeError::Detached(e)) => {
                let (u, v) = g.edge(e);
                return Err(Infeasibility::Detached {
                    element: Element::Edge(u, v),
                });
            }
        };
        for &t in self.terminals() {
            if !tree.member[t] {
                return Err(Infeasibility::Unreachable { terminal: t });
            }
            let required = self.priority(t);
            let path = tree.path_from_root(t);
            for (pair, e) in path.windows(2).zip(tree.edges_from_root(t)) {
                let rate = sol.rates[e];
                if rate < required {
                    return Err(Infeasibility::RateTooLow {
                        terminal: t,
                        element: Element::Edge(pair[0], pair[1]),
                        rate,
                        required,
                    });
                }
            }
        }
        Ok(())
    }

    fn forced_rates(&self, tree_edges: &[usize]) -> Result<EdgeRateSolution, ForcedRatesError> {
        check_edge_ids(self.graph().m(), tree_edges)?;
        let tree = RootedTree::build(self.graph(), self.source(), tree_edges)?;
        if let Some(&t) = self.terminals().iter().find(|&&t| !tree.member[t]) {
            return Err(ForcedRatesError::TerminalMissing(t));
        }
        let need = subtree_demand(&tree, |v| self.priority(v));
        let mut rates = vec![Level::ABSENT; self.graph().m()];
        for &v in &tree.order {
            if let Some((_, e)) = tree.parent[v] {
                rates[e] = need[v];
            }
        }
        Ok(EdgeRateSolution { rates })
    }
}

impl PriorityProblem for PnwstInstance {
    type Solution = VertexRateSolution;

    fn solution_weight(&self, sol: &VertexRateSolution) -> Result<f64, SolutionError> {
        let n = self.graph().n();
        if sol.rates.len() != n {
            return Err(SolutionError::Length {
                found: sol.rates.len(),
                expected: n,
            });
        }
        if let Some(&e) = sol.tree_edges.iter().find(|&&e| e >= self.graph().m()) {
            return Err(SolutionError::UnknownEdge(e));
        }
        let mut total = 0.0;
        for (v, &r) in sol.rates.iter().enumerate() {
            if r.0 as usize > self.graph().k() {
                return Err(SolutionError::UnknownLevel {
                    level: r.0,
                    k: self.graph().k(),
                });
            }
            total += self.weight(v, r);
        }
        Ok(total)
    }

    fn check_feasible(&self, sol: &VertexRateSolution) -> Result<(), Infeasibility> {
        self.solution_weight(sol)
            .map_err(Infeasibility::Malformed)?;
        let g = self.graph();
        let s = self.source();
        if sol.rates[s].is_absent() {
            return Err(Infeasibility::SourceMissing);
        }
        let tree = match RootedTree::build(g, s, &sol.tree_edges) {
            Ok(t) => t,
            Err(TreeError::Cycle(edge)) => return Err(Infeasibility::Cycle { edge }),
            Err(TreeError::Detached(e)) => {
                let (u, v) = g.edge(e);
                return Err(Infeasibility::Detached {
                    element: Element::Edge(u, v),
                });
            }
        };
        for v in 0..g.n() {
            let selected = !sol.rates[v].is_absent();
            if selected != tree.member[v] {
                return Err(Infeasibility::Detached {
                    element: Element::Vertex(v),
                });
            }
        }
        for &t in self.terminals() {
            if !tree.member[t] {
                return Err(Infeasibility::Unreachable { terminal: t });
            }
            let required = self.priority(t);
            for v in tree.path_from_root(t) {
                let rate = sol.rates[v];
                if rate < required {
                    return Err(Infeasibility::RateTooLow {
                        terminal: t,
                        element: Element::Vertex(v),
                        rate,
                        required,
                    });
                }
            }
        }
        Ok(())
    }

    fn forced_rates(&self, tree_edges: &[usize]) -> Result<VertexRateSolution, ForcedRatesError> {
        check_edge_ids(self.graph().m(), tree_edges)?;
        let s = self.source();
        let tree = RootedTree::build(self.graph(), s, tree_edges)?;
        if let Some(&t) = self.terminals().iter().find(|&&t| !tree.member[t]) {
            return Err(ForcedRatesError::TerminalMissing(t));
        }
        let mut rates = subtree_demand(&tree, |v| self.priority(v));
        rates[s] = self.graph().top_level();
        let kept = tree
            .order
            .iter()
            .filter_map(|&v| match tree.parent[v] {
                Some((_, e)) if !rates[v].is_absent() => Some(e),
                _ => None,
            })
            .collect();
        Ok(VertexRateSolution::new(rates, kept))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::PriorityGraph;

    /// Path s - a - t with t at the given level, k = 2, unit weights.
    fn path_instance(level: u32) -> PstInstance {
        let g = PriorityGraph::new(3, vec![(0, 1), (1, 2)], 2).unwrap();
        PstInstance::new(g, 0, &[(2, Level(level))], vec![vec![1.0, 2.0]; 2]).unwrap()
    }

    #[test]
    fn weight_of_empty_and_single_edge() {
        let g = PriorityGraph::new(2, vec![(0, 1)], 2).unwrap();
        let inst = PstInstance::new(g, 0, &[(1, Level(2))], vec![vec![1.0, 3.0]]).unwrap();
        assert_eq!(inst.solution_weight(&EdgeRateSolution::empty(1)), Ok(0.0));
        let sol = EdgeRateSolution::new(vec![Level(2)]);
        assert_eq!(inst.solution_weight(&sol), Ok(3.0));
        assert!(matches!(
            inst.solution_weight(&EdgeRateSolution::empty(2)),
            Err(SolutionError::Length { .. })
        ));
    }

    #[test]
    fn feasibility_on_path() {
        let inst = path_instance(1);
        let ok = EdgeRateSolution::new(vec![Level(1), Level(1)]);
        assert_eq!(inst.check_feasible(&ok), Ok(()));

        let cut = EdgeRateSolution::new(vec![Level(0), Level(1)]);
        let err = inst.check_feasible(&cut).unwrap_err();
        assert!(matches!(err, Infeasibility::Detached { .. }), "{err:?}");

        let none = EdgeRateSolution::empty(2);
        assert_eq!(
            inst.check_feasible(&none),
            Err(Infeasibility::Unreachable { terminal: 2 })
        );
        assert_eq!(
            Infeasibility::Unreachable { terminal: 2 }.to_string(),
            "3 unreachable"
        );

        let inst = path_instance(2);
        let err = inst.check_feasible(&ok).unwrap_err();
        assert_eq!(
            err,
            Infeasibility::RateTooLow {
                terminal: 2,
                element: Element::Edge(0, 1),
                rate: Level(1),
                required: Level(2)
            }
        );
        assert_eq!(err.to_string(), "edge (1,2) rate 1 < required 2");
    }

    #[test]
    fn cycle_is_infeasible() {
        let g = PriorityGraph::new(3, vec![(0, 1), (1, 2), (2, 0)], 1).unwrap();
        let inst = PstInstance::new(g, 0, &[(2, Level(1))], vec![vec![1.0]; 3]).unwrap();
        let sol = EdgeRateSolution::new(vec![Level(1); 3]);
        assert!(matches!(
            inst.check_feasible(&sol),
            Err(Infeasibility::Cycle { .. })
        ));
    }

    #[test]
    fn forced_rates_on_star() {
        // s = 0 with children t1 = 1 (level 2) and t2 = 2 (level 1).
        let g = PriorityGraph::new(3, vec![(0, 1), (0, 2)], 2).unwrap();
        let inst = PstInstance::new(
            g,
            0,
            &[(1, Level(2)), (2, Level(1))],
            vec![vec![1.0, 2.0]; 2],
        )
        .unwrap();
        let sol = inst.forced_rates(&[0, 1]).unwrap();
        assert_eq!(sol.rates(), &[Level(2), Level(1)]);
    }

    #[test]
    fn forced_rates_on_branching_path() {
        // s - a - t1 (level 2), a - t2 (level 1), plus a dangling edge a - x.
        let g = PriorityGraph::new(5, vec![(0, 1), (1, 2), (1, 3), (1, 4)], 2).unwrap();
        let inst = PstInstance::new(
            g,
            0,
            &[(2, Level(2)), (3, Level(1))],
            vec![vec![1.0, 2.0]; 4],
        )
        .unwrap();
        let sol = inst.forced_rates(&[0, 1, 2, 3]).unwrap();
        assert_eq!(sol.rates(), &[Level(2), Level(2), Level(1), Level(0)]);
        assert_eq!(inst.check_feasible(&sol), Ok(()));
        assert_eq!(
            inst.forced_rates(&[0, 2]),
            Err(ForcedRatesError::TerminalMissing(2))
        );
    }

    #[test]
    fn forced_vertex_rates() {
        // s - a - t1 (level 2), a - t2 (level 1), a - x dangling.
        let g = PriorityGraph::new(5, vec![(0, 1), (1, 2), (1, 3), (1, 4)], 2).unwrap();
        let inst = PnwstInstance::new(
            g,
            0,
            &[(2, Level(2)), (3, Level(1))],
            vec![
                vec![0.0, 0.0],
                vec![1.0, 2.0],
                vec![0.0; 2],
                vec![0.0, 5.0],
                vec![1.0, 1.0],
            ],
        )
        .unwrap();
        let sol = inst.forced_rates(&[0, 1, 2, 3]).unwrap();
        assert_eq!(
            sol.rates(),
            &[Level(2), Level(2), Level(2), Level(1), Level(0)]
        );
        assert_eq!(sol.tree_edges(), &[0, 1, 2]);
        assert_eq!(inst.check_feasible(&sol), Ok(()));
        assert_eq!(inst.solution_weight(&sol), Ok(2.0));
    }

    #[test]
    fn vertex_feasibility_errors() {
        let g = PriorityGraph::new(3, vec![(0, 1), (1, 2)], 2).unwrap();
        let inst = PnwstInstance::new(
            g,
            0,
            &[(2, Level(2))],
            vec![vec![0.0; 2], vec![1.0, 2.0], vec![0.0; 2]],
        )
        .unwrap();
        let low = VertexRateSolution::new(vec![Level(2), Level(1), Level(2)], vec![0, 1]);
        assert_eq!(
            inst.check_feasible(&low),
            Err(Infeasibility::RateTooLow {
                terminal: 2,
                element: Element::Vertex(1),
                rate: Level(1),
                required: Level(2)
            })
        );
        let no_source = VertexRateSolution::new(vec![Level(0), Level(2), Level(2)], vec![1]);
        assert_eq!(
            inst.check_feasible(&no_source),
            Err(Infeasibility::SourceMissing)
        );
        let stray = VertexRateSolution::new(vec![Level(2), Level(2), Level(2)], vec![0]);
        assert!(matches!(
            inst.check_feasible(&stray),
            Err(Infeasibility::Detached {
                element: Element::Vertex(2)
            })
        ));
    }
}
