//! Primitive partial lattices over `F_q[Y]` at the place at infinity:
//! exact arithmetic, block-LU decomposition, shapes, arithmetic constants,
//! exhaustive enumeration, and counting experiments.

pub mod blocklu;
pub mod enumerate;
pub mod error;
pub mod grassmann;
pub mod harness;
pub mod io;
pub mod latmod;
pub mod measures;
pub mod scalars;
pub mod shapes;

pub use error::{Error, Result};
