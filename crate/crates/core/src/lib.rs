//! Joint spectrum of hydrogen for the commuting operators `(H, G, L_z)`
//! obtained from separation in prolate spheroidal coordinates, where
//! `G = L^2 + 2a e_z` and `a` is the focal half-distance.
//!
//! The crate computes the exact spectrum by interbasis expansion, checks it
//! against a shooting solution of the separated equations, evaluates the
//! classical actions and their EBK quantization, describes the critical set
//! and singular reduction of the classical system, and detects the lattice
//! defect (quantum monodromy) by transporting a lattice cell around the
//! isolated critical value. Atomic units throughout.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod actions;
pub mod classical;
pub mod error;
pub mod interbasis;
pub mod monodromy;
pub mod quadrature;
pub mod reduction;
pub mod shooting;
pub mod system;

pub use error::{Error, Result};
pub use interbasis::{build_matrix, eigenvalues, joint_spectrum, TridiagonalMatrix};
pub use system::{energy_from_n, JointPoint, JointSpectrum, QuantumNumbers, SystemParams};
