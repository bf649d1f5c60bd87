//! Relativistic spin–magnetic-field detector model.
//!
//! The electron of a hydrogen-like atom, in its Dirac ground orbital, acts as
//! a spin qubit coupled to the quantum magnetic field through a smeared Zeeman
//! interaction. This crate provides the orbital data and its smearing profile,
//! the vacuum response functionals that drive the qubit, the leading-order
//! state maps, transition probabilities and rates, and the equivalent
//! Unruh–DeWitt models for comparison.
//!
//! Units: ħ = c = 1 and the Bohr radius a₀ = 1. Lengths and times are in a₀,
//! frequencies and wavenumbers in 1/a₀, and the electron mass is 1/α.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atom;
pub mod detector;
pub mod error;
pub mod fieldgeom;
pub mod numerics;

pub use error::{Error, Result};

/// CODATA 2018 fine-structure constant.
pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;
