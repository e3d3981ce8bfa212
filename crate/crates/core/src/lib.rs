//! Spin networks and Wilson loops on lattice gauge configuration spaces for
//! the compact groups U(n), SU(n), O(n), SO(n) and Sp(n), and the compilation
//! of invariant diagram operators into products of Wilson loops.

pub mod diagrams;
pub mod error;
pub mod graph;
pub mod group;
pub mod jobs;
pub mod report;
pub mod spin;
pub mod tensor;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
