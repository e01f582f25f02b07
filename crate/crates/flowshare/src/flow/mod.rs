//! Exact-rational graph and flow primitives.
//!
//! All solvers here are deterministic: for a fixed input (and fixed
//! [`maxflow::AugmentOrder`]) they return bit-identical flows. The default
//! augmenting rule scans residual arcs in ascending edge-id order from a
//! FIFO queue, i.e. breadth-first search with ordered adjacency.

pub mod circulation;
pub mod decompose;
pub mod graph;
pub mod maxflow;
pub mod network;
pub mod objective;
pub mod profit;
pub mod recover;

pub use circulation::{
    feasible_circulation, feasible_circulation_with_order, InfeasibilityCut, Required,
};
pub use decompose::decompose_paths;
pub use graph::{DirectedGraph, EdgeId, GraphError, NodeId};
pub use maxflow::{max_flow, max_flow_with_order, residual_reachable, AugmentOrder};
pub use network::{Bound, BoundedNetwork, Flow, PathFlow};
pub use objective::{max_edge_objective, max_edge_objective_with_witness};
pub use profit::{max_profit_flow, verify_profit_optimal};
pub use recover::{common_denominator, factorial_denominator_bound, rational_recover};

/// Errors from the flow primitives.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlowError {
    /// No finite cut separates source and sink.
    #[error("maximum flow is unbounded: no finite cut separates source and sink")]
    UnboundedFlow,

    /// A positive-profit residual cycle or path with unlimited capacity.
    #[error("objective is unbounded: positive-profit augmentation with infinite capacity")]
    UnboundedObjective,

    /// No feasible flow exists; carries a violated-cut certificate.
    #[error("no feasible flow: {0}")]
    Infeasible(InfeasibilityCut),

    /// The support of a flow handed to the path decomposition contains a
    /// directed cycle.
    #[error("flow support contains a directed cycle through node {0}")]
    CyclicSupport(NodeId),

    /// Flow remained after extracting every source-rooted path; the input
    /// was not a pure source-to-sink flow.
    #[error("undecomposable flow: residue on edge {0} after path extraction")]
    StrandedFlow(EdgeId),

    /// No rational with the requested denominator bound lies in the
    /// interval; the caller passed a wrong bound.
    #[error("no rational with denominator <= {bound} in [{lo}, {hi}]")]
    RecoverNotFound {
        lo: crate::rat::Rat,
        hi: crate::rat::Rat,
        bound: num_bigint::BigInt,
    },

    #[error("graph error: {0}")]
    Graph(#[from] GraphError),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
