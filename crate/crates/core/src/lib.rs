pub mod cli;
pub mod convexity;
pub mod coset;
pub mod coxeter;
pub mod cuts;
pub mod error;
pub mod feasibility;
pub mod invariants;
pub mod locc;
pub mod psigraph;

pub use error::{Error, Result};
