//! Hamiltonian paths between opposite-parity vertices of the hypercube `Q_n`
//! with faulty edges.
//!
//! The fault sets handled are those with at most `4n - 17` faulty edges in
//! which every vertex keeps degree at least 2 and at most one vertex has
//! degree exactly 2. Modules:
//!
//! - [`cube`]: vertices, edges, dimensions and sub-cube projection.
//! - [`fault`]: fault sets, the admissibility check and direction choice.
//! - [`path`]: paths, path systems, the verifier and splicing helpers.
//! - [`solver`]: the recursive construction and its spanning-path subsolvers.
//! - [`oracle`]: exhaustive search and random instance generation.

pub mod cube;
pub mod fault;
mod graph;
pub mod oracle;
pub mod path;
pub mod solver;

pub use cube::{edge_dimension, layer_edges, CubeError, Dim, Edge, Vertex};
pub use fault::{
    check_conditions, choose_direction, parse_instance, separating_direction, split, ConditionReport, FaultError,
    FaultSet, SplitView,
};
pub use path::{verify_hamiltonian_path, verify_spanning_k_path, EndpointPairSet, Path, PathSystem, VerifyReport};
pub use solver::{ham_path_laceable, SolveError, SolveRequest, SolveTrace};
