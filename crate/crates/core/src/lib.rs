//! Thomas–Fermi–von Weizsäcker ground states of random nuclear lattices on
//! periodic cells, representative-volume energies, and the selection
//! approach to variance reduction built on top of them.

pub mod energy;
pub mod error;
pub mod grid;
pub mod io;
pub mod lattice;
pub mod locality;
pub mod selection;
pub mod solver;
pub mod stats;

pub use error::{Error, Result};
