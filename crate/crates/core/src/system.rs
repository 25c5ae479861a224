//! Shared domain types: system parameters, quantum-number bookkeeping and
//! the joint spectrum container.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Configuration of the integrable system: the focal half-distance `a` of
/// the prolate spheroidal coordinates, in atomic units. The nucleus sits
/// at the focus `+a` on the z-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    a: f64,
}

impl SystemParams {
    pub fn new(a: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "focal half-distance must be finite and positive, got {a}"
            )));
        }
        Ok(Self { a })
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Potential energy `-1/(2a)` at the second focus `-a`.
    pub fn focal_potential(&self) -> f64 {
        -1.0 / (2.0 * self.a)
    }
}

/// Energy `-1/(2n^2)` of principal quantum number `n`.
pub fn energy_from_n(n: i64) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!(
            "principal quantum number must be >= 1, got {n}"
        )));
    }
    let n = n as f64;
    Ok(-1.0 / (2.0 * n * n))
}

/// Principal number recovered from a bound-state energy, `1/sqrt(-2E)`.
pub fn n_from_energy(energy: f64) -> f64 {
    1.0 / (-2.0 * energy).sqrt()
}

/// Labels of one joint eigenstate. `k` indexes the sorted g-values of the
/// column `(n, m)` and has no meaning outside that column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantumNumbers {
    pub n: i64,
    pub m: i64,
    pub k: usize,
}

impl QuantumNumbers {
    pub fn new(n: i64, m: i64, k: usize) -> Result<Self> {
        if n < 1 || m.abs() > n - 1 {
            return Err(Error::InvalidArgument(format!(
                "need |m| <= n - 1, got n = {n}, m = {m}"
            )));
        }
        if k as i64 > n - m.abs() - 1 {
            return Err(Error::InvalidArgument(format!(
                "column (n = {n}, m = {m}) has {} states, k = {k} out of range",
                n - m.abs()
            )));
        }
        Ok(Self { n, m, k })
    }

    /// Number of states `n - |m|` in the column.
    pub fn column_len(n: i64, m: i64) -> usize {
        (n - m.abs()).max(0) as usize
    }

    /// All valid labels at fixed `n`, ordered by `m` then `k`.
    pub fn all(n: i64) -> impl Iterator<Item = QuantumNumbers> {
        (-(n - 1)..=(n - 1)).flat_map(move |m| (0..Self::column_len(n, m)).map(move |k| QuantumNumbers { n, m, k }))
    }
}

/// One joint eigenvalue triple `(E, g, l_z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointPoint {
    pub energy: f64,
    pub g: f64,
    pub m: i64,
}

/// Joint spectrum at fixed principal quantum number: one ascending column
/// of g-values for every `|m| <= n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectrum {
    pub n: i64,
    pub params: SystemParams,
    pub columns: BTreeMap<i64, Vec<f64>>,
}

impl JointSpectrum {
    pub fn energy(&self) -> f64 {
        -1.0 / (2.0 * (self.n * self.n) as f64)
    }

    pub fn len(&self) -> usize {
        self.columns.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn column(&self, m: i64) -> Option<&[f64]> {
        self.columns.get(&m).map(Vec::as_slice)
    }

    /// Points ordered by `m` ascending, then `g` ascending.
    pub fn points(&self) -> impl Iterator<Item = JointPoint> + '_ {
        let energy = self.energy();
        self.columns
            .iter()
            .flat_map(move |(&m, gs)| gs.iter().map(move |&g| JointPoint { energy, g, m }))
    }

    /// `sum_{l=|m|}^{n-1} l(l+1)`, the trace of the column matrix.
    pub fn column_trace(n: i64, m: i64) -> f64 {
        (m.abs()..n).map(|l| (l * (l + 1)) as f64).sum()
    }
}
