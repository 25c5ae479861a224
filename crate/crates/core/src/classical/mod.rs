//! Classical side of the prolate spheroidal separation.

mod critical;
mod geometry;
mod quartic;

pub use critical::*;
pub use geometry::*;
pub use quartic::*;
