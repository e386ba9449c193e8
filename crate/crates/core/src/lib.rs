pub mod bits;
pub mod cli;
pub mod cost;
pub mod coupling;
pub mod diagonal;
pub mod encoding;
pub mod error;
pub mod gates;
pub mod induction;
pub mod pauli;
pub mod statevec;
pub mod verify;

pub use error::{Error, Result};
