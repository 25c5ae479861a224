//! Critical values of the energy-momentum map at fixed energy: the curves
//! where the separation quartic has a double root, the boundary of the
//! image in the `(l_z, g)` plane, and the isolated value `(0, 2a)`.

use crate::error::{Error, Result};
use crate::system::{n_from_energy, SystemParams};

/// Which double-root family a critical point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Double root `s0` in `(-1, 0)`: lower boundary of the image.
    Eta,
    /// Double root `s0 > max(1, s*)`: upper boundary of the image.
    Xi,
    /// Double root in `(s*, 1)`, present only when `a > n^2`.
    EtaInner,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::Eta => "eta",
            Branch::Xi => "xi",
            Branch::EtaInner => "eta-inner",
        }
    }
}

/// Point `(l_z >= 0, g)` on a critical curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub s0: f64,
    pub lz: f64,
    pub g: f64,
}

/// Solution of `P(s0) = P'(s0) = 0` for `(l_z^2, g)` before the sign of
/// `l_z^2` is inspected.
pub fn critical_curve_raw(energy: f64, a: f64, s0: f64) -> (f64, f64) {
    let w = s0 * s0 - 1.0;
    let dq = 4.0 * a * a * energy * s0 + 2.0 * a;
    let q0 = -dq * w / (2.0 * s0);
    let g = 2.0 * a * a * energy * w + 2.0 * a * s0 - q0;
    (q0 * w, g)
}

/// Critical value with a double root at `s0`, or `None` when that double
/// root would need `l_z^2 < 0`.
pub fn critical_curve(energy: f64, params: &SystemParams, s0: f64) -> Result<Option<CriticalPoint>> {
    if !(energy < 0.0) {
        return Err(Error::InvalidArgument(format!("need E < 0, got {energy}")));
    }
    if s0 == 0.0 || s0.abs() == 1.0 || !s0.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "s0 = {s0} is excluded; use the s0 -> 1 limit"
        )));
    }
    if s0 < -1.0 {
        return Err(Error::InvalidArgument(format!(
            "s0 = {s0} lies outside both coordinate ranges"
        )));
    }
    let (lz2, g) = critical_curve_raw(energy, params.a(), s0);
    Ok((lz2 >= 0.0).then(|| CriticalPoint { s0, lz: lz2.sqrt(), g }))
}

/// The limit of every branch as `s0 -> 1`: `(l_z, g) = (0, 2a)`.
pub fn critical_curve_limit_at_one(params: &SystemParams) -> (f64, f64) {
    (0.0, 2.0 * params.a())
}

/// Position `s* = -1/(2aE)` of the maximum of `Q`, where the `xi` branch
/// starts when `s* > 1`.
pub fn q_vertex(energy: f64, params: &SystemParams) -> f64 {
    -1.0 / (2.0 * params.a() * energy)
}

/// Parameter range of a branch, `(start, end)` with `l_z = 0` at `start`.
/// `end` is open (`l_z` grows without bound there) except for the inner
/// branch, which returns to `l_z = 0` at `s0 -> 1`.
pub fn branch_range(energy: f64, params: &SystemParams, branch: Branch) -> Option<(f64, f64)> {
    let s_star = q_vertex(energy, params);
    match branch {
        Branch::Eta => Some((-1.0, 0.0)),
        Branch::Xi => Some((s_star.max(1.0), f64::INFINITY)),
        Branch::EtaInner => (s_star < 1.0).then_some((s_star, 1.0)),
    }
}

fn lz_on_branch(energy: f64, a: f64, s0: f64) -> f64 {
    critical_curve_raw(energy, a, s0).0.max(0.0).sqrt()
}

/// Parameter `s0` on a boundary branch where `l_z` equals `lz`.
pub fn branch_parameter_for_lz(energy: f64, params: &SystemParams, branch: Branch, lz: f64) -> Result<f64> {
    let a = params.a();
    let (start, end) = branch_range(energy, params, branch)
        .ok_or_else(|| Error::InvalidArgument("branch absent for these parameters".into()))?;
    let lz = lz.abs();
    let (mut lo, mut hi) = match branch {
        Branch::Eta => (start, end),
        Branch::Xi => {
            let mut hi = 2.0 * start.max(1.0);
            while lz_on_branch(energy, a, hi) < lz {
                hi *= 2.0;
                if hi > 1e12 {
                    return Err(Error::NoRoot(format!("l_z = {lz} beyond the xi branch")));
                }
            }
            (start, hi)
        }
        Branch::EtaInner => {
            return Err(Error::InvalidArgument("inner branch is not monotonic in l_z".into()));
        }
    };
    if lz == 0.0 {
        return Ok(start);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-15 * mid.abs().max(1.0) || mid <= lo || mid >= hi {
            break;
        }
        if lz_on_branch(energy, a, mid) < lz {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Lower and upper ends of the `g`-range of the image at fixed `(E, l_z)`.
/// At `l_z = 0` this is `[-2a, n^2 + a^2/n^2]` for `a < n^2` and ends at
/// `2a` for `a > n^2`.
pub fn g_range(energy: f64, params: &SystemParams, lz: f64) -> Result<(f64, f64)> {
    let a = params.a();
    let lower = if lz == 0.0 {
        -2.0 * a
    } else {
        let s0 = branch_parameter_for_lz(energy, params, Branch::Eta, lz)?;
        critical_curve_raw(energy, a, s0).1
    };
    let start = branch_range(energy, params, Branch::Xi).map(|r| r.0).unwrap_or(1.0);
    let upper = if lz == 0.0 {
        critical_curve_raw_limit(energy, a, start)
    } else {
        let s0 = branch_parameter_for_lz(energy, params, Branch::Xi, lz)?;
        critical_curve_raw(energy, a, s0).1
    };
    Ok((lower, upper))
}

fn critical_curve_raw_limit(energy: f64, a: f64, s0: f64) -> f64 {
    if s0 == 1.0 {
        2.0 * a
    } else {
        critical_curve_raw(energy, a, s0).1
    }
}

/// True when `(lz, g)` lies inside the image of the energy-momentum map at
/// energy `E`, i.e. between the boundary curves.
pub fn inside_critical_region(energy: f64, params: &SystemParams, lz: f64, g: f64) -> Result<bool> {
    if lz.abs() >= n_from_energy(energy) {
        return Ok(false);
    }
    let (lo, hi) = g_range(energy, params, lz)?;
    Ok(g > lo && g < hi)
}

/// Samples of all branches, geometric in the distance from each branch's
/// start, truncated where `l_z` exceeds `1/sqrt(-2E)`.
pub fn sample_critical_curves(energy: f64, params: &SystemParams, samples: usize) -> Vec<(Branch, CriticalPoint)> {
    let a = params.a();
    let lz_max = n_from_energy(energy);
    let mut out = Vec::new();
    for branch in [Branch::Eta, Branch::Xi, Branch::EtaInner] {
        let Some((start, end)) = branch_range(energy, params, branch) else {
            continue;
        };
        let stop = match branch {
            Branch::EtaInner => end,
            _ => branch_parameter_for_lz(energy, params, branch, lz_max).unwrap_or(end),
        };
        let span = stop - start;
        let first = 1e-6_f64.min(span * 1e-6).max(f64::EPSILON);
        for i in 0..samples {
            let t = i as f64 / (samples - 1).max(1) as f64;
            // geometric in the offset from start, closing at stop
            let offset = first * (span / first).powf(t);
            let s0 = match branch {
                Branch::EtaInner => {
                    // dense near both ends; s0 -> 1 approaches the isolated value
                    let u = 0.5 - 0.5 * (std::f64::consts::PI * t).cos();
                    start + (end - start) * u
                }
                _ => start + offset,
            };
            if s0 == 0.0 || s0.abs() == 1.0 || s0 <= start && branch != Branch::EtaInner {
                continue;
            }
            let (lz2, g) = critical_curve_raw(energy, a, s0);
            if lz2 >= 0.0 && s0 < end {
                out.push((branch, CriticalPoint { s0, lz: lz2.sqrt(), g }));
            }
        }
    }
    out
}

/// Status of the isolated critical value `(l_z, g) = (0, 2a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IsolatedValue {
    /// `n > sqrt(a)`: an isolated value in the interior of the image.
    Present { lz: f64, g: f64 },
    /// `n = sqrt(a)`: the bifurcation point.
    Degenerate { lz: f64, g: f64 },
    /// `n < sqrt(a)`: `(0, 2a)` lies on the boundary.
    Absent,
}

impl IsolatedValue {
    pub fn is_present(&self) -> bool {
        matches!(self, IsolatedValue::Present { .. })
    }
}

/// Relative width of the band around `a = n^2` reported as degenerate.
pub const BIFURCATION_TOLERANCE: f64 = 1e-12;

pub fn isolated_critical_value(n: f64, params: &SystemParams) -> Result<IsolatedValue> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidArgument(format!("need n > 0, got {n}")));
    }
    let a = params.a();
    let n2 = n * n;
    let g = 2.0 * a;
    Ok(if (n2 - a).abs() <= BIFURCATION_TOLERANCE * n2.max(a) {
        IsolatedValue::Degenerate { lz: 0.0, g }
    } else if n2 > a {
        IsolatedValue::Present { lz: 0.0, g }
    } else {
        IsolatedValue::Absent
    })
}
