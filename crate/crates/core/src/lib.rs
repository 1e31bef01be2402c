//! Potential operators for constant-rank differential operators.

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod polycore;
pub mod synthesis;
pub mod torus;
pub mod variational;

pub use error::{Error, Result};
