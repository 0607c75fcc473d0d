#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Mean-field upper bounds on total correlations of thermal spin states.
//!
//! The bound `S(ρ || ρ_MF) = ln Z_MF - ln Z + β<H_MF - H>` is evaluated for a
//! two-qubit Heisenberg model, the infinite transverse-field Ising chain and
//! small chains by exact diagonalization. [`qcmap`] maps a qubit onto a
//! classical Ising ring.

pub mod bound;
pub mod ed;
mod error;
pub mod heisenberg;
pub mod numerics;
pub mod par;
pub mod qcmap;
pub mod tfim;

pub use error::{Error, Result};
