//! Circuit-QED modeling toolkit for lumped-element superconducting
//! circuits: Hamiltonian extraction from netlists, multimode Rabi
//! diagonalization, Bogoliubov normal modes and dispersive shifts,
//! RFcQED design search, voltage-biased drum electromechanics,
//! steady-state Lindblad spectroscopy and flux-sweep spectrum fitting.
//!
//! Internal conventions: frequencies are angular (rad/s), energies are
//! stored as E/h in Hz, and all user-facing I/O is in ordinary Hz.

pub mod circuit;
pub mod constants;
pub mod designer;
pub mod electromech;
pub mod error;
pub mod linalg;
pub mod normalmodes;
pub mod optimize;
pub mod quantizer;
pub mod rabi;
pub mod spectro;
pub mod waveguide;

pub use error::{Error, Result};
