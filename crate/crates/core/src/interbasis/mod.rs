//! Interbasis expansion: for fixed `(n, m)` the operator `L^2 + 2a e_z`
//! is a symmetric tridiagonal matrix in the spherical basis `|n l m>`,
//! `l = |m|, ..., n - 1`.

mod tridiag;

use std::collections::BTreeMap;

pub use tridiag::{gershgorin_bounds, newton_correction, sturm_count, symmetric_tridiagonal_eigenvalues};

use crate::error::{Error, Result};
use crate::system::{JointSpectrum, SystemParams};

/// The column matrix. `diag[i] = l(l+1)` with `l = |m| + i`; `offdiag[i]`
/// couples `l` and `l + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues(self)
    }
}

/// Coupling between the spherical states `lambda - 1` and `lambda`:
/// `(a/n) sqrt((n^2 - lambda^2)(lambda^2 - m^2) / (lambda^2 - 1/4))`.
/// Vanishes at `lambda = |m|` and `lambda = n`.
pub fn coupling(n: i64, m: i64, lambda: i64, a: f64) -> f64 {
    let (n2, m2, l2) = ((n * n) as f64, (m * m) as f64, (lambda * lambda) as f64);
    let num = (n2 - l2) * (l2 - m2);
    if num <= 0.0 {
        return 0.0;
    }
    (a / n as f64) * (num / (l2 - 0.25)).sqrt()
}

/// Matrix for arbitrary `a >= 0`; `a = 0` yields the spherical limit.
pub fn coupling_matrix(n: i64, m: i64, a: f64) -> Result<TridiagonalMatrix> {
    if n < 1 || m.abs() >= n {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and |m| < n, got n = {n}, m = {m}"
        )));
    }
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("need finite a >= 0, got {a}")));
    }
    let mu = m.abs();
    let diag = (mu..n).map(|l| (l * (l + 1)) as f64).collect();
    let offdiag = (mu..n - 1).map(|l| coupling(n, m, l + 1, a)).collect();
    Ok(TridiagonalMatrix { diag, offdiag })
}

pub fn build_matrix(n: i64, m: i64, params: &SystemParams) -> Result<TridiagonalMatrix> {
    coupling_matrix(n, m, params.a())
}

/// Ascending eigenvalues of the column matrix.
pub fn eigenvalues(matrix: &TridiagonalMatrix) -> Vec<f64> {
    symmetric_tridiagonal_eigenvalues(&matrix.diag, &matrix.offdiag)
}

/// Full joint spectrum at principal quantum number `n`. Columns `m` and
/// `-m` share one matrix, so they are computed once.
pub fn joint_spectrum(n: i64, params: &SystemParams) -> Result<JointSpectrum> {
    spectrum_for_a(n, params.a()).map(|columns| JointSpectrum {
        n,
        params: *params,
        columns,
    })
}

/// Spherical-limit-capable variant used by the `a -> 0` checks.
pub fn spectrum_for_a(n: i64, a: f64) -> Result<BTreeMap<i64, Vec<f64>>> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!(
            "principal quantum number must be >= 1, got {n}"
        )));
    }
    let mut columns = BTreeMap::new();
    for mu in 0..n {
        let values = coupling_matrix(n, mu, a)?.eigenvalues();
        if mu > 0 {
            columns.insert(-mu, values.clone());
        }
        columns.insert(mu, values);
    }
    Ok(columns)
}
