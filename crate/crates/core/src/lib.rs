//! Exact model counting over systems of integer linear inequalities.
//!
//! The counter is an exhaustive DPLL search: every node is simplified with a
//! pipeline of presolve-style reductions, split into independent components
//! of the primal graph when possible, and otherwise branched on the variable
//! of highest betweenness centrality. Counts of simplified components are
//! cached under a canonical byte key.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, timing and the
//! command-line front end live in the `ilcount` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod counter;
pub mod fixtures;
pub mod graph;
pub mod lp;
pub mod oracle;
pub mod simplify;
pub mod system;

pub use counter::{
    count, Cache, CacheKey, CacheTiming, CountError, CountErrorKind, CountResult, CountStats,
    Counter, CounterConfig, Interrupt, NeverInterrupt, SelectionMode,
};
pub use graph::{
    betweenness_scores, build_primal_graph, decompose, select_variable, Partition, PrimalGraph,
};
pub use lp::{BoundedSimplex, LpError, LpOutcome, LpProblem, LpSolver};
pub use oracle::{oracle_count, oracle_solutions, BudgetExceeded, DEFAULT_BUDGET};
pub use simplify::{simplify, SimplifyConfig, SimplifyLog, Technique};
pub use system::{Domain, Row, RowId, System, SystemStatus, VarId};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Errors raised while building or querying a [`System`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error("variable {0} declared twice")]
    DuplicateVariable(VarId),
    #[error("row mentions undeclared variable {0}")]
    UnknownVariable(VarId),
    #[error("system still has {0} live rows")]
    RowsRemain(usize),
}
