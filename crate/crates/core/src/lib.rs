pub mod arith;
pub mod classify;
pub mod cli;
pub mod error;
pub mod hn;
pub mod hyperbolic;
pub mod lattice;
pub mod pell;
pub mod sample;
pub mod slice;
pub mod weyl;

pub use error::{Error, Result};
pub use lattice::{MukaiVector, ParityClass, SurfaceModel};
