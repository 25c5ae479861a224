//! Lattice defect of the joint spectrum: a cell of the quantum lattice is
//! carried around a closed loop in the `(m, g)` plane and the final basis
//! is compared with the initial one.

mod lattice;
mod matrix;
mod transport;

pub use lattice::{build_lattice, Node, Snap, SpectralLattice};
pub use matrix::MonodromyMatrix;
pub use transport::{
    default_loop, loop_with_width, rectangle_loop, transport, transport_cell, Cell, CellPath, LoopSkeleton, Move,
    Transport,
};
