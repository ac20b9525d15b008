//! M-optimization of rate trees and their decomposition into vertex-disjoint
//! rate spiders.
//!
//! A rate tree is rooted and its rates never increase walking away from
//! the root. Given a vertex set `M` containing the root, the tree is
//! M-optimized when every leaf is in `M` and every vertex outside `M`
//! carries exactly the largest rate of an `M`-vertex below it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::instance::Level;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpiderError {
    #[error("root {0} is not in M")]
    RootNotInM(usize),
    #[error("vertex {0} is not in the tree")]
    NotInTree(usize),
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("rate increases from {parent} to {child}")]
    RateIncreases { parent: usize, child: usize },
    #[error("tree is not M-optimized: {0}")]
    NotMOptimized(String),
    #[error("M needs at least two vertices")]
    TooFewM,
}

/// A rooted tree with a rate on every vertex. Vertex ids are arbitrary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateTree {
    root: usize,
    rates: BTreeMap<usize, Level>,
    /// Normalized `(min, max)` and sorted.
    edges: Vec<(usize, usize)>,
}

struct Shape {
    parent: BTreeMap<usize, usize>,
    children: BTreeMap<usize, Vec<usize>>,
    depth: BTreeMap<usize, usize>,
    /// BFS order from the root.
    order: Vec<usize>,
}

impl RateTree {
    pub fn new(
        root: usize,
        rates: impl IntoIterator<Item = (usize, Level)>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, SpiderError> {
        let tree = Self::unchecked(
            root,
            rates.into_iter().collect(),
            edges.into_iter().collect(),
        );
        if !tree.rates.contains_key(&root) {
            return Err(SpiderError::NotInTree(root));
        }
        for &(a, b) in &tree.edges {
            for x in [a, b] {
                if !tree.rates.contains_key(&x) {
                    return Err(SpiderError::NotInTree(x));
                }
            }
        }
        if tree.edges.len() + 1 != tree.rates.len() {
            return Err(SpiderError::NotATree(format!(
                "{} vertices but {} edges",
                tree.rates.len(),
                tree.edges.len()
            )));
        }
        let shape = tree.shape();
        if shape.order.len() != tree.rates.len() {
            return Err(SpiderError::NotATree("not connected".into()));
        }
        for (&child, &parent) in &shape.parent {
            if tree.rates[&child] > tree.rates[&parent] {
                return Err(SpiderError::RateIncreases { parent, child });
            }
        }
        Ok(tree)
    }

    fn unchecked(root: usize, rates: BTreeMap<usize, Level>, edges: Vec<(usize, usize)>) -> Self {
        let mut edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Self { root, rates, edges }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn rate(&self, v: usize) -> Option<Level> {
        self.rates.get(&v).copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.rates.keys().copied()
    }

    pub fn rates(&self) -> &BTreeMap<usize, Level> {
        &self.rates
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn contains(&self, v: usize) -> bool {
        self.rates.contains_key(&v)
    }

    /// Parent of `v`, `None` for the root.
    pub fn parent(&self, v: usize) -> Option<usize> {
        self.shape().parent.get(&v).copied()
    }

    fn shape(&self) -> Shape {
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(a, b) in &self.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        let mut parent = BTreeMap::new();
        let mut children: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut depth = BTreeMap::from([(self.root, 0)]);
        let mut order = vec![self.root];
        let mut queue = VecDeque::from([self.root]);
        while let Some(u) = queue.pop_front() {
            let mut next: Vec<usize> = adj
                .get(&u)
                .map(|l| {
                    l.iter()
                        .copied()
                        .filter(|x| !depth.contains_key(x))
                        .collect()
                })
                .unwrap_or_default();
            next.sort_unstable();
            for &x in &next {
                depth.insert(x, depth[&u] + 1);
                parent.insert(x, u);
                order.push(x);
                queue.push_back(x);
            }
            children.insert(u, next);
        }
        Shape {
            parent,
            children,
            depth,
            order,
        }
    }

    /// `v` and everything below it.
    fn subtree(&self, shape: &Shape, v: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.insert(u);
            stack.extend(shape.children[&u].iter().copied());
        }
        out
    }

    /// The tree restricted to `keep`, which must contain the root and be
    /// closed under taking parents.
    fn restrict(&self, keep: &BTreeSet<usize>) -> Self {
        let rates = self
            .rates
            .iter()
            .filter(|(v, _)| keep.contains(v))
            .map(|(&v, &r)| (v, r))
            .collect();
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|(a, b)| keep.contains(a) && keep.contains(b))
            .collect();
        Self::unchecked(self.root, rates, edges)
    }
}

fn check_m(tree: &RateTree, m: &BTreeSet<usize>) -> Result<(), SpiderError> {
    if !m.contains(&tree.root) {
        return Err(SpiderError::RootNotInM(tree.root));
    }
    if let Some(&v) = m.iter().find(|v| !tree.contains(**v)) {
        return Err(SpiderError::NotInTree(v));
    }
    Ok(())
}

/// Prune leaves outside `M` until none remain, then give every vertex
/// outside `M` the largest rate of an `M`-vertex below it. Rates of
/// `M`-vertices are left alone.
pub fn m_optimize(tree: &RateTree, m: &BTreeSet<usize>) -> Result<RateTree, SpiderError> {
    check_m(tree, m)?;
    let shape = tree.shape();
    let mut keep = BTreeSet::new();
    let mut best: BTreeMap<usize, Level> = BTreeMap::new();
    for &v in shape.order.iter().rev() {
        let mut below = Level::ABSENT;
        let mut any = false;
        for c in &shape.children[&v] {
            if keep.contains(c) {
                any = true;
                below = below.max(best[c]);
            }
        }
        if m.contains(&v) {
            keep.insert(v);
            best.insert(v, below.max(tree.rates[&v]));
        } else if any {
            keep.insert(v);
            best.insert(v, below);
        }
    }
    let mut out = tree.restrict(&keep);
    for (v, r) in out.rates.iter_mut() {
        if !m.contains(v) {
            *r = best[v];
        }
    }
    Ok(out)
}

/// Whether every leaf is in `M` and every other vertex has exactly the
/// largest rate of an `M`-vertex below it.
pub fn is_m_optimized(tree: &RateTree, m: &BTreeSet<usize>) -> bool {
    check_m(tree, m).is_ok() && m_optimize(tree, m).is_ok_and(|t| &t == tree)
}

/// A rate tree that is a spider: at most one vertex of degree above two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateSpider {
    pub root: usize,
    pub center: usize,
    /// Paths from the center to each leaf, center excluded.
    pub legs: Vec<Vec<usize>>,
    pub rates: BTreeMap<usize, Level>,
    pub edges: Vec<(usize, usize)>,
}

impl RateSpider {
    fn build(
        root: usize,
        center: usize,
        rates: BTreeMap<usize, Level>,
        edges: Vec<(usize, usize)>,
    ) -> Self {
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(a, b) in &edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        let mut legs = Vec::new();
        let mut starts = adj.get(&center).cloned().unwrap_or_default();
        starts.sort_unstable();
        for first in starts {
            let mut leg = vec![first];
            let (mut prev, mut cur) = (center, first);
            loop {
                let next: Vec<usize> = adj[&cur].iter().copied().filter(|&x| x != prev).collect();
                match next.as_slice() {
                    [x] => {
                        leg.push(*x);
                        prev = cur;
                        cur = *x;
                    }
                    _ => break,
                }
            }
            legs.push(leg);
        }
        Self {
            root,
            center,
            legs,
            rates,
            edges,
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.rates.keys().copied()
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.legs.iter().filter_map(|l| l.last().copied()).collect()
    }

    /// `M`-vertices of the spider other than its root.
    pub fn covered(&self, m: &BTreeSet<usize>) -> Vec<usize> {
        self.vertices()
            .filter(|v| m.contains(v) && *v != self.root)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpiderDecomposition {
    pub spiders: Vec<RateSpider>,
    pub m: BTreeSet<usize>,
}

impl SpiderDecomposition {
    /// `Σ_j (1 + |S_j|)`.
    pub fn covered_count(&self) -> usize {
        self.spiders
            .iter()
            .map(|s| 1 + s.covered(&self.m).len())
            .sum()
    }
}

/// Split an M-optimized rate tree into vertex-disjoint rate spiders whose
/// leaves and roots lie in `M`.
///
/// Repeatedly takes the deepest vertex `u` (hop count, ties by smaller id)
/// with at least two `M`-vertices below it. If `u` is the root the whole
/// tree is a spider. Otherwise the subtree at `u` is a spider; when only
/// the root of `M` would remain, that spider absorbs the root path
/// instead, otherwise it is cut off and the rest re-optimized.
pub fn decompose_rate_spiders(
    tree: &RateTree,
    m: &BTreeSet<usize>,
) -> Result<SpiderDecomposition, SpiderError> {
    check_m(tree, m)?;
    if m.len() < 2 {
        return Err(SpiderError::TooFewM);
    }
    if !is_m_optimized(tree, m) {
        return Err(SpiderError::NotMOptimized(
            "leaves outside M or rates not subtree maxima".into(),
        ));
    }
    let mut spiders = Vec::new();
    let mut current = tree.clone();
    let mut m_cur = m.clone();
    loop {
        let shape = current.shape();
        let mut count: BTreeMap<usize, usize> = BTreeMap::new();
        for &v in shape.order.iter().rev() {
            let own = usize::from(m_cur.contains(&v));
            let below: usize = shape.children[&v].iter().map(|c| count[c]).sum();
            count.insert(v, own + below);
        }
        let u = shape
            .order
            .iter()
            .copied()
            .filter(|v| count[v] >= 2)
            .max_by(|a, b| shape.depth[a].cmp(&shape.depth[b]).then(b.cmp(a)))
            .expect("the root has at least two M-vertices below it");
        if u == current.root {
            spiders.push(RateSpider::build(
                u,
                u,
                current.rates.clone(),
                current.edges.clone(),
            ));
            break;
        }
        let x = current.subtree(&shape, u);
        let rest_m: BTreeSet<usize> = m_cur.difference(&x).copied().collect();
        if rest_m.len() == 1 {
            let mut keep = x.clone();
            let mut cur = u;
            while let Some(&p) = shape.parent.get(&cur) {
                keep.insert(p);
                cur = p;
            }
            let part = restrict_any(&current, &keep);
            spiders.push(RateSpider::build(current.root, u, part.0, part.1));
            break;
        }
        let root = if m_cur.contains(&u) {
            u
        } else {
            let want = current.rates[&u];
            *x.iter()
                .find(|v| m_cur.contains(v) && current.rates[v] == want)
                .ok_or_else(|| {
                    SpiderError::NotMOptimized(format!("no M-vertex below {u} carries its rate"))
                })?
        };
        let part = restrict_any(&current, &x);
        spiders.push(RateSpider::build(root, u, part.0, part.1));
        let remainder: BTreeSet<usize> = current.vertices().filter(|v| !x.contains(v)).collect();
        current = m_optimize(&current.restrict(&remainder), &rest_m)?;
        m_cur = rest_m;
    }
    Ok(SpiderDecomposition {
        spiders,
        m: m.clone(),
    })
}

fn restrict_any(
    tree: &RateTree,
    keep: &BTreeSet<usize>,
) -> (BTreeMap<usize, Level>, Vec<(usize, usize)>) {
    let rates = tree
        .rates
        .iter()
        .filter(|(v, _)| keep.contains(v))
        .map(|(&v, &r)| (v, r))
        .collect();
    let edges = tree
        .edges
        .iter()
        .copied()
        .filter(|(a, b)| keep.contains(a) && keep.contains(b))
        .collect();
    (rates, edges)
}

fn non_increasing_from(
    adj: &BTreeMap<usize, Vec<usize>>,
    rates: &BTreeMap<usize, Level>,
    start: usize,
) -> Result<(), String> {
    let mut stack = vec![(start, usize::MAX)];
    while let Some((u, from)) = stack.pop() {
        for &x in adj.get(&u).into_iter().flatten() {
            if x == from {
                continue;
            }
            if rates[&x] > rates[&u] {
                return Err(format!("rate rises from {u} to {x}"));
            }
            stack.push((x, u));
        }
    }
    Ok(())
}

/// Check every structural claim about a decomposition of `tree`.
pub fn verify_decomposition(
    tree: &RateTree,
    m: &BTreeSet<usize>,
    dec: &SpiderDecomposition,
) -> Result<(), String> {
    let tree_edges: BTreeSet<(usize, usize)> = tree.edges.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut roles = BTreeSet::new();
    for (i, s) in dec.spiders.iter().enumerate() {
        let tag = format!("spider {i}");
        for v in s.vertices() {
            if !seen.insert(v) {
                return Err(format!("{tag}: vertex {v} shared with another spider"));
            }
            match tree.rate(v) {
                None => return Err(format!("{tag}: vertex {v} not in tree")),
                Some(r) if s.rates[&v] > r => {
                    return Err(format!("{tag}: vertex {v} rate raised"));
                }
                _ => {}
            }
        }
        if let Some(e) = s.edges.iter().find(|e| !tree_edges.contains(e)) {
            return Err(format!("{tag}: edge {e:?} not in tree"));
        }
        if s.edges.len() + 1 != s.rates.len() || s.rates.len() < 2 {
            return Err(format!("{tag}: not a nontrivial tree"));
        }
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(a, b) in &s.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        let degree = |v: usize| adj.get(&v).map_or(0, Vec::len);
        if let Some(v) = s.vertices().find(|&v| degree(v) > 2 && v != s.center) {
            return Err(format!("{tag}: vertex {v} branches but is not the center"));
        }
        let reach: usize = s.legs.iter().map(Vec::len).sum::<usize>() + 1;
        if reach != s.rates.len() {
            return Err(format!("{tag}: legs do not cover the spider"));
        }
        let leaves: Vec<usize> = s.vertices().filter(|&v| degree(v) == 1).collect();
        if leaves.len() < 2 {
            return Err(format!("{tag}: fewer than two leaves"));
        }
        if s.root != s.center && degree(s.root) != 1 {
            return Err(format!("{tag}: root is neither center nor leaf"));
        }
        if let Some(v) = leaves.iter().chain([&s.root]).find(|v| !m.contains(v)) {
            return Err(format!("{tag}: leaf or root {v} outside M"));
        }
        non_increasing_from(&adj, &s.rates, s.root)
            .map_err(|e| format!("{tag}: from root, {e}"))?;
        for leg in &s.legs {
            let mut prev = s.center;
            for &v in leg {
                if v == s.root {
                    break;
                }
                if s.rates[&v] > s.rates[&prev] {
                    return Err(format!("{tag}: rate rises from center towards {v}"));
                }
                prev = v;
            }
        }
        roles.insert(s.root);
        roles.insert(s.center);
        roles.extend(leaves);
    }
    if let Some(v) = m.iter().find(|v| !roles.contains(v)) {
        return Err(format!("M-vertex {v} is not a leaf, root or center"));
    }
    if dec.covered_count() != m.len() {
        return Err(format!(
            "spiders account for {} M-vertices, |M| = {}",
            dec.covered_count(),
            m.len()
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const NAMES: [&str; 19] = [
        "r", "1a", "1b", "2a", "2b", "2c", "2d", "2e", "3a", "3b", "3c", "3d", "3e", "3f", "4a",
        "4b", "4c", "4d", "4e",
    ];

    fn id(name: &str) -> usize {
        NAMES.iter().position(|&n| n == name).unwrap()
    }

    /// The 19-vertex example tree and its ten marked vertices.
    fn example() -> (RateTree, BTreeSet<usize>) {
        let rates = [
            ("r", 3),
            ("1a", 2),
            ("1b", 3),
            ("2a", 2),
            ("2b", 2),
            ("2c", 2),
            ("2d", 3),
            ("2e", 3),
            ("3a", 1),
            ("3b", 2),
            ("3c", 2),
            ("3d", 2),
            ("3e", 3),
            ("3f", 1),
            ("4a", 1),
            ("4b", 2),
            ("4c", 1),
            ("4d", 1),
            ("4e", 1),
        ];
        let edges = [
            ("r", "1a"),
            ("r", "1b"),
            ("1a", "2a"),
            ("1a", "2b"),
            ("1a", "2c"),
            ("1b", "2d"),
            ("1b", "2e"),
            ("2a", "3a"),
            ("2b", "3b"),
            ("2b", "3c"),
            ("2d", "3d"),
            ("2d", "3e"),
            ("2d", "3f"),
            ("3c", "4a"),
            ("3c", "4b"),
            ("3e", "4c"),
            ("3e", "4d"),
            ("3f", "4e"),
        ];
        let tree = RateTree::new(
            id("r"),
            rates.iter().map(|&(n, r)| (id(n), Level(r))),
            edges.iter().map(|&(a, b)| (id(a), id(b))),
        )
        .unwrap();
        let m = ["r", "1a", "2c", "3a", "3c", "3d", "4a", "4b", "4d", "4e"]
            .iter()
            .map(|n| id(n))
            .collect();
        (tree, m)
    }

    #[test]
    fn example_m_optimization() {
        let (tree, m) = example();
        let opt = m_optimize(&tree, &m).unwrap();
        assert_eq!(opt.len(), 16);
        for gone in ["3b", "2e", "4c"] {
            assert!(!opt.contains(id(gone)));
        }
        assert_eq!(opt.rate(id("1b")), Some(Level(2)));
        assert_eq!(opt.rate(id("2d")), Some(Level(2)));
        assert_eq!(opt.rate(id("3e")), Some(Level(1)));
        assert_eq!(opt.rate(id("2a")), Some(Level(1)));
        assert!(is_m_optimized(&opt, &m));
        assert_eq!(m_optimize(&opt, &m).unwrap(), opt);
    }

    #[test]
    fn example_decomposition() {
        let (tree, m) = example();
        let opt = m_optimize(&tree, &m).unwrap();
        let dec = decompose_rate_spiders(&opt, &m).unwrap();
        verify_decomposition(&opt, &m, &dec).unwrap();
        let summary: Vec<(usize, usize, usize)> = dec
            .spiders
            .iter()
            .map(|s| (s.root, s.center, 1 + s.covered(&m).len()))
            .collect();
        assert_eq!(
            summary,
            vec![
                (id("3c"), id("3c"), 3),
                (id("3d"), id("2d"), 3),
                (id("r"), id("1a"), 4)
            ]
        );
        assert_eq!(dec.covered_count(), 10);
    }

    #[test]
    fn two_marked_vertices_give_one_path_spider() {
        let tree = RateTree::new(
            0,
            [(0, Level(2)), (1, Level(2)), (2, Level(1))],
            [(0, 1), (1, 2)],
        )
        .unwrap();
        let m = BTreeSet::from([0, 2]);
        let opt = m_optimize(&tree, &m).unwrap();
        let dec = decompose_rate_spiders(&opt, &m).unwrap();
        assert_eq!(dec.spiders.len(), 1);
        assert_eq!(dec.spiders[0].rates.len(), 3);
        verify_decomposition(&opt, &m, &dec).unwrap();
    }

    #[test]
    fn root_only_optimizes_to_singleton() {
        let (tree, _) = example();
        let opt = m_optimize(&tree, &BTreeSet::from([id("r")])).unwrap();
        assert_eq!(opt.len(), 1);
        assert!(opt.edges().is_empty());
    }

    #[test]
    fn rejects_bad_inputs() {
        let (tree, m) = example();
        assert_eq!(
            m_optimize(&tree, &BTreeSet::from([id("1a")])),
            Err(SpiderError::RootNotInM(id("r")))
        );
        assert!(matches!(
            decompose_rate_spiders(&tree, &m),
            Err(SpiderError::NotMOptimized(_))
        ));
        assert!(matches!(
            RateTree::new(0, [(0, Level(1)), (1, Level(2))], [(0, 1)]),
            Err(SpiderError::RateIncreases { .. })
        ));
    }
}
