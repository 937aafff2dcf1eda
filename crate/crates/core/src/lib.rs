pub mod checkpoint;
pub mod curve;
pub mod dyadic;
pub mod error;
pub mod invariants;
pub mod oracle;
pub mod periodic;
pub mod runner;
pub mod tau;

pub use error::{Error, Result};
