//! Decentralized nonconvex optimization with mixing-accelerated primal-dual
//! proximal iterations.

pub mod algorithm;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod linalg;
pub mod metrics;
pub mod mixing;
pub mod problems;

pub use error::{Error, Result};
