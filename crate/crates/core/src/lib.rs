pub mod cli;
pub mod error;
pub mod genmodels;
pub mod graphcore;
pub mod harness;
mod quad;
pub mod randsrc;
pub mod spread;
pub mod urn;

pub use error::{Error, Result};
