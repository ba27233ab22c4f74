pub mod advect;
pub mod cli;
pub mod consistency;
pub mod error;
pub mod field;
pub mod inference;
pub mod io;
pub mod observe;
pub mod rng;

pub use error::{Error, Result};
