//! Approximation algorithms for the priority Steiner tree problem (edge
//! weighted) and its node-weighted variant.
//!
//! A priority instance asks for a tree rooted at a source that reaches every
//! terminal, where each terminal demands that its source path is built from
//! elements of at least its priority level, and where an element's weight
//! depends on the level it is bought at.
//!
//! The crate contains:
//!
//! * [`instance`] and [`solution`]: problem data, validation, weights,
//!   feasibility, forced-rate canonicalization and the edge-to-node
//!   subdivision reduction.
//! * [`paths`]: rate-restricted shortest paths over edge or vertex weights.
//! * [`pst`] and [`steiner`]: the sequential greedy (QoSMT), the
//!   parallelizable nearest-higher-priority solver, the per-level
//!   Steiner-union solver and a best-of combinator.
//! * [`pnwst`]: the greedy rate-tree merging solver for the node-weighted
//!   variant.
//! * [`spider`]: M-optimization of rate trees and rate spider decomposition.
//! * [`oracle`]: exhaustive exact solvers for small instances.
//! * [`generators`]: seeded instance families, including the tightness family
//!   for the node-weighted solver.
//! * [`format`]: the text formats for instances and solutions.

pub mod error;
pub mod format;
pub mod generators;
pub mod instance;
pub mod oracle;
pub mod paths;
pub mod pnwst;
pub mod pst;
pub mod solution;
pub mod spider;
pub mod steiner;
mod tree;
mod unionfind;

pub use error::{InstanceError, SolveError};
pub use instance::{
    AnyInstance, CombinedInstance, DemandSet, Element, Level, PnwstInstance, PriorityGraph,
    PstInstance, Violation,
};
pub use solution::{EdgeRateSolution, Infeasibility, PriorityProblem, VertexRateSolution};

/// `H_n = 1 + 1/2 + ... + 1/n`, with `H_0 = 0`.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

/// `ceil(log2 t) + 1`, the ratio guaranteed by both logarithmic PST solvers.
/// Returns 1 for `t <= 1`.
pub fn log2_ratio_bound(terminals: usize) -> f64 {
    if terminals <= 1 {
        return 1.0;
    }
    let ceil_log = usize::BITS - (terminals - 1).leading_zeros();
    f64::from(ceil_log) + 1.0
}
