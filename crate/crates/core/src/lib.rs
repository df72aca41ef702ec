//! Solver-free traffic engineering: minimizes the maximum link utilization
//! of a network by re-optimizing one source-destination pair at a time with
//! a balanced binary search instead of a linear-program solve.

pub mod dense;
pub mod error;
pub mod experiment;
pub mod fsio;
pub mod loads;
pub mod oracle;
pub mod path;
pub mod problem;
pub mod seeds;
pub mod ssdo;
pub mod subproblem;
pub mod topology;
pub mod traffic;

pub use error::{Result, TeError};
