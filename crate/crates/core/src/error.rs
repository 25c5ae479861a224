use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates the documented precondition of an operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested values lie outside the range of the energy-momentum map.
    #[error("empty classically allowed region for E = {energy}, g = {g}, l_z = {lz}")]
    EmptyRegion { energy: f64, g: f64, lz: f64 },

    /// An action integral was requested on a collapsed or pinched interval.
    #[error("degenerate interval: {0}")]
    Degenerate(String),

    /// A root search found no sign change in the admissible range.
    #[error("no root: {0}")]
    NoRoot(String),

    /// ODE integration broke down.
    #[error("integration failed at s = {at}: {reason}")]
    Integration { at: f64, reason: String },

    /// Shooting found a different number of joint eigenvalues than expected.
    #[error("found {found} joint eigenvalues, expected {expected}")]
    CountMismatch { found: usize, expected: usize },

    /// No loop around the requested center fits inside the lattice.
    #[error("infeasible loop: {0}")]
    InfeasibleLoop(String),

    /// Two lattice points compete for one predicted cell corner.
    #[error("ambiguous snap at m = {m}, g = {g}: nearest {d1:.4}, runner-up {d2:.4}; use a finer loop")]
    AmbiguousSnap { m: i64, g: f64, d1: f64, d2: f64 },

    /// Transport left the lattice or failed to close.
    #[error("transport failed: {0}")]
    Transport(String),
}

impl Error {
    /// True for precondition violations, as opposed to numerical failures.
    pub fn is_precondition(&self) -> bool {
        matches!(self, Error::InvalidArgument(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
