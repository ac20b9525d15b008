use thiserror::Error;

/// Structural problems that make it impossible to even hold an instance.
///
/// Everything else (connectivity, weight monotonicity, zero-weight
/// assumptions) is reported by `validate` as data, not as an error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("graph needs at least one priority level")]
    NoLevels,
    #[error("vertex {vertex} out of range (graph has {n} vertices)")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("level {level} out of range 1..={k}")]
    LevelOutOfRange { level: u32, k: usize },
    #[error("terminal {vertex} declared twice")]
    DuplicateTerminal { vertex: usize },
    #[error("weight table has {found} rows, expected {expected}")]
    RowCount { found: usize, expected: usize },
    #[error("weight row {row} has {found} entries, expected {expected}")]
    RowLength {
        row: usize,
        found: usize,
        expected: usize,
    },
}

/// Failures of the solvers and oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("terminal {terminal} cannot be connected")]
    Unreachable { terminal: usize },
    #[error("instance too large for exhaustive search: {edges} edges (limit {limit})")]
    TooLarge { edges: usize, limit: usize },
    #[error("no feasible tree exists")]
    NoFeasibleTree,
    #[error("internal invariant broken: {0}")]
    Invariant(String),
}
