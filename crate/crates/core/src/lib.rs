//! Matrix lattices, exact lattice-point enumeration and inverse determinant
//! sums for algebraic space-time codes.

pub mod asymptotics;
pub mod channel;
pub mod constructions;
pub mod detsum;
pub mod enumeration;
pub mod error;
pub mod gaussian;
pub mod lattice;
pub mod lie;
pub mod matrix;
pub mod numeric;
pub mod poly;

pub use error::{Error, Result};
pub use lattice::{build_lattice, MatrixLattice};
pub use matrix::ComplexMatrix;
