use std::collections::VecDeque;

use crate::instance::PriorityGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum TreeError {
    /// The edge closes a cycle.
    Cycle(usize),
    /// The edge is not connected to the root.
    Detached(usize),
}

/// An edge set rooted at a vertex, with BFS order.
#[derive(Clone, Debug)]
pub(crate) struct RootedTree {
    /// `(parent vertex, edge id)` for every non-root member.
    pub(crate) parent: Vec<Option<(usize, usize)>>,
    pub(crate) member: Vec<bool>,
    /// Members in BFS order, root first.
    pub(crate) order: Vec<usize>,
}

impl RootedTree {
    pub(crate) fn build(
        graph: &PriorityGraph,
        root: usize,
        edges: &[usize],
    ) -> Result<Self, TreeError> {
        let n = graph.n();
        let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        let mut ids: Vec<usize> = edges.to_vec();
        ids.sort_unstable();
        ids.dedup();
        for &e in &ids {
            let (u, v) = graph.edge(e);
            if u == v {
                return Err(TreeError::Cycle(e));
            }
            incident[u].push((v, e));
            incident[v].push((u, e));
        }
        let mut parent = vec![None; n];
        let mut member = vec![false; n];
        let mut order = vec![root];
        member[root] = true;
        let mut used = 0usize;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(x, e) in &incident[u] {
                if parent[u].map(|(_, pe)| pe) == Some(e) {
                    continue;
                }
                if member[x] {
                    return Err(TreeError::Cycle(e));
                }
                member[x] = true;
                parent[x] = Some((u, e));
                order.push(x);
                used += 1;
                queue.push_back(x);
            }
        }
        if used != ids.len() {
            let stray = ids
                .iter()
                .copied()
                .find(|&e| {
                    let (u, v) = graph.edge(e);
                    !member[u] || !member[v]
                })
                .expect("an unused edge lies outside the root component");
            return Err(TreeError::Detached(stray));
        }
        Ok(Self {
            parent,
            member,
            order,
        })
    }

    /// Vertices from the root down to `v`, inclusive.
    pub(crate) fn path_from_root(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some((p, _)) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Edge ids from the root down to `v`.
    pub(crate) fn edges_from_root(&self, v: usize) -> Vec<usize> {
        let mut edges = Vec::new();
        let mut cur = v;
        while let Some((p, e)) = self.parent[cur] {
            edges.push(e);
            cur = p;
        }
        edges.reverse();
        edges
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_cycles_and_detached_edges() {
        let g = PriorityGraph::new(5, vec![(0, 1), (1, 2), (2, 0), (3, 4)], 1).unwrap();
        assert!(matches!(
            RootedTree::build(&g, 0, &[0, 1, 2]),
            Err(TreeError::Cycle(_))
        ));
        assert_eq!(
            RootedTree::build(&g, 0, &[0, 3]).unwrap_err(),
            TreeError::Detached(3)
        );
        let t = RootedTree::build(&g, 0, &[0, 1]).unwrap();
        assert_eq!(t.path_from_root(2), vec![0, 1, 2]);
        assert_eq!(t.edges_from_root(2), vec![0, 1]);
        assert_eq!(t.order, vec![0, 1, 2]);
    }
}
