//! Uniformly finite chains on integer lattices, Thom-class capping against
//! coordinate flats, wrong-way maps, and their equivariant versions on flat
//! tori, all in exact arithmetic.

pub mod chains;
pub mod coeffs;
pub mod equivariant;
pub mod error;
pub mod geometry;
pub mod io;
pub mod scenario;
pub mod spaces;
pub mod verify;
pub mod wrongway;

pub use error::{Error, Result};
