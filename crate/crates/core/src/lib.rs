pub mod asympt;
pub mod cheb;
pub mod cli;
pub mod design;
pub mod error;
pub mod linalg;
pub mod model;
pub mod optimal;
mod scalar;

pub use error::{Error, Result};
