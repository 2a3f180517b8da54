pub mod classify;
pub mod cli;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod heisenberg;
pub mod numint;
pub mod quadrature;
pub mod reduction;
pub mod trace;

pub use error::{Error, Result};
