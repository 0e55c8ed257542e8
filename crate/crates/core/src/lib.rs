//! Numerical laboratory for relativistic Scott corrections with self-generated
//! magnetic fields.
//!
//! The crate covers Thomas-Fermi phase-space laws and the atomic TF solver,
//! lattice Pauli operators and their negative-spectrum traces, the magnetic
//! energy functional with its exact gradient, the Scott coefficient limit,
//! Daubechies-type inequality checks, and the assembled energy expansion.

pub mod assemble;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod lattice;
pub mod ltlab;
pub mod params;
pub mod phase_space;
pub mod quadrature;
pub mod sgf;
pub mod spectral;
pub mod tf_atom;

pub use error::{LabError, Result};
