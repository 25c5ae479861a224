//! Shooting solution of the separated equation
//! `-d/ds (s^2-1) d/ds psi = P(s)/(s^2-1) psi` on `[-1, 1]` (eta) and
//! `[1, inf)` (xi).
//!
//! With `psi = |s^2-1|^{|m|/2} f` the equation becomes
//! `(s^2-1) f'' + 2(mu+1) s f' + (Q(s) + mu(mu+1)) f = 0`, `mu = |m|`,
//! `Q(s) = 2a^2E(s^2-1) + 2as - g`, whose solutions regular at `s = +-1`
//! are started from power series.
//!
//! Used as an independent check of the interbasis eigenvalues.

mod rk45;

use crate::error::{Error, Result};
use crate::system::{energy_from_n, SystemParams};
pub use rk45::Tolerance;
use rk45::{integrate, State};

/// Number of series terms at a regular singular point.
pub const SERIES_TERMS: usize = 6;
/// Distance from the singular point at which integration starts.
pub const STEP_OFF: f64 = 1e-3;
/// `xi_max = XI_MAX_DECAYS / (sqrt(-2E) a)`.
pub const XI_MAX_DECAYS: f64 = 30.0;

#[derive(Debug, Clone, Copy)]
struct Equation {
    mu: f64,
    /// `2a^2 E`
    quad: f64,
    a: f64,
    g: f64,
}

impl Equation {
    fn new(energy: f64, g: f64, m: i64, params: &SystemParams) -> Result<Self> {
        if !(energy < 0.0) || !energy.is_finite() {
            return Err(Error::InvalidArgument(format!("need E < 0, got {energy}")));
        }
        if !g.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite g = {g}")));
        }
        let a = params.a();
        Ok(Self {
            mu: m.unsigned_abs() as f64,
            quad: 2.0 * a * a * energy,
            a,
            g,
        })
    }

    fn q(&self, s: f64) -> f64 {
        self.quad * (s * s - 1.0) + 2.0 * self.a * s - self.g
    }

    fn rhs(&self, s: f64, y: State) -> State {
        let mu = self.mu;
        let w = s * s - 1.0;
        [
            y[1],
            -(2.0 * (mu + 1.0) * s * y[1] + (self.q(s) + mu * (mu + 1.0)) * y[0]) / w,
        ]
    }

    /// `(f, f')` at `s = side + t`, `side = +-1`, from the regular series
    /// normalised to `f(side) = 1`.
    fn series(&self, side: f64, t: f64) -> State {
        let mu = self.mu;
        // Q in powers of t = s - side
        let q0 = 2.0 * self.a * side - self.g;
        let q1 = 2.0 * self.quad * side + 2.0 * self.a;
        let q2 = self.quad;
        let mut c = [0.0; SERIES_TERMS];
        c[0] = 1.0;
        for k in 0..SERIES_TERMS - 1 {
            let kf = k as f64;
            let mut acc = (kf * (kf - 1.0) + 2.0 * (mu + 1.0) * kf + mu * (mu + 1.0) + q0) * c[k];
            if k >= 1 {
                acc += q1 * c[k - 1];
            }
            if k >= 2 {
                acc += q2 * c[k - 2];
            }
            c[k + 1] = -side * acc / (2.0 * (kf + 1.0) * (kf + mu + 1.0));
        }
        let mut f = 0.0;
        let mut df = 0.0;
        for k in (0..SERIES_TERMS).rev() {
            f = f * t + c[k];
            if k >= 1 {
                df = df * t + k as f64 * c[k];
            }
        }
        [f, df]
    }

    fn start_at_pole(&self, side: f64, inward: f64, to: f64, tol: Tolerance) -> Result<State> {
        let t = inward * STEP_OFF;
        let start = self.series(side, t);
        integrate(|s, y| self.rhs(s, y), side + t, start, to, tol)
    }

    fn decay_rate(&self) -> f64 {
        (-self.quad).sqrt()
    }

    /// `(f, f')` at `xi_max` on the solution decaying like
    /// `exp(-lambda s) s^p`, `lambda = a sqrt(-2E)`, `p = a/lambda - mu - 1`.
    fn asymptotic(&self, xi_max: f64) -> State {
        let lambda = self.decay_rate();
        let p = self.a / lambda - self.mu - 1.0;
        [1.0, -lambda + p / xi_max]
    }

    /// Outer root of `Q`, clamped into `[1.05, xi_max / 2]`.
    fn xi_match_point(&self, xi_max: f64) -> f64 {
        let upper = (0.5 * xi_max).max(1.1);
        let disc = self.a * self.a + self.quad * (self.quad + self.g);
        let s = if disc > 0.0 {
            (self.a + disc.sqrt()) / (-self.quad)
        } else {
            1.05
        };
        s.clamp(1.05, upper)
    }
}

fn normalised_wronskian(left: State, right: State) -> f64 {
    let w = left[0] * right[1] - left[1] * right[0];
    let norm = ((left[0] * left[0] + left[1] * left[1]) * (right[0] * right[0] + right[1] * right[1])).sqrt();
    if norm == 0.0 {
        0.0
    } else {
        w / norm
    }
}

/// Mismatch of the solutions regular at `eta = -1` and `eta = +1`,
/// compared at `eta = 0`. Zero exactly when `g` is an eta-eigenvalue at
/// this `(E, m)`.
pub fn shoot_eta(energy: f64, g: f64, m: i64, params: &SystemParams) -> Result<f64> {
    let eq = Equation::new(energy, g, m, params)?;
    let tol = Tolerance::default();
    let left = eq.start_at_pole(-1.0, 1.0, 0.0, tol)?;
    let right = eq.start_at_pole(1.0, -1.0, 0.0, tol)?;
    Ok(normalised_wronskian(left, right))
}

pub fn default_xi_max(energy: f64, params: &SystemParams) -> f64 {
    XI_MAX_DECAYS / ((-2.0 * energy).sqrt() * params.a())
}

/// Mismatch between the solution regular at `xi = 1` and the decaying
/// solution started at the default `xi_max`.
pub fn shoot_xi(energy: f64, g: f64, m: i64, params: &SystemParams) -> Result<f64> {
    shoot_xi_with(energy, g, m, params, default_xi_max(energy, params))
}

pub fn shoot_xi_with(energy: f64, g: f64, m: i64, params: &SystemParams, xi_max: f64) -> Result<f64> {
    let eq = Equation::new(energy, g, m, params)?;
    if !(xi_max > 1.0 + 2.0 * STEP_OFF) {
        return Err(Error::InvalidArgument(format!("xi_max = {xi_max} too close to 1")));
    }
    let tol = Tolerance::default();
    let mid = eq.xi_match_point(xi_max);
    let inner = eq.start_at_pole(1.0, 1.0, mid, tol)?;
    let outer = integrate(|s, y| eq.rhs(s, y), xi_max, eq.asymptotic(xi_max), mid, tol)?;
    Ok(normalised_wronskian(inner, outer))
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, mut flo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 * mid.abs().max(1.0) {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn scan_roots<F: Fn(f64) -> Result<f64>>(f: &F, lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>> {
    let mut roots = Vec::new();
    let step = (hi - lo) / samples as f64;
    let mut x0 = lo;
    let mut f0 = f(x0)?;
    for i in 1..=samples {
        let x1 = lo + step * i as f64;
        let f1 = f(x1)?;
        if f0 == 0.0 {
            roots.push(x0);
        } else if (f0 > 0.0) != (f1 > 0.0) && f1 != 0.0 {
            roots.push(bisect(f, x0, x1, f0)?);
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(roots)
}

/// Joint eigenvalues `g` of column `m` at `E = -1/(2n^2)`: values where
/// both mismatches vanish, ascending.
pub fn shooting_spectrum(n: i64, m: i64, params: &SystemParams) -> Result<Vec<f64>> {
    if !(1..=6).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "shooting supports 1 <= n <= 6, got {n}"
        )));
    }
    if m.abs() >= n {
        return Err(Error::InvalidArgument(format!(
            "need |m| <= n - 1, got m = {m}, n = {n}"
        )));
    }
    let energy = energy_from_n(n)?;
    let a = params.a();
    let nf = n as f64;
    // Gershgorin-type bounds on G within the energy shell
    let lo = -2.5 * a - 2.0;
    let hi = nf * nf + 2.5 * a + 2.0;
    let expected = (n - m.abs()) as usize;
    let eta = |g: f64| shoot_eta(energy, g, m, params);
    let base = 24 * (1 + n as usize) + (4.0 * a) as usize;
    let xi_far = 2.0 * default_xi_max(energy, params);
    let mut found = 0;
    for samples in [base, 4 * base] {
        // eta roots are bracketed by a scan; a joint value also needs a
        // sign change of the xi mismatch across a window 1e-8 wide.
        let mut joint = Vec::new();
        for g in scan_roots(&eta, lo, hi, samples)? {
            let d = 1e-8 * g.abs().max(1.0);
            let below = shoot_xi(energy, g - d, m, params)?;
            let above = shoot_xi(energy, g + d, m, params)?;
            if (below > 0.0) == (above > 0.0) {
                continue;
            }
            let below = shoot_xi_with(energy, g - d, m, params, xi_far)?;
            let above = shoot_xi_with(energy, g + d, m, params, xi_far)?;
            if (below > 0.0) == (above > 0.0) {
                return Err(Error::Integration {
                    at: xi_far,
                    reason: format!("xi eigenvalue near g = {g} moves when xi_max is doubled"),
                });
            }
            joint.push(g);
        }
        found = joint.len();
        if found == expected {
            return Ok(joint);
        }
    }
    Err(Error::CountMismatch { found, expected })
}

/// Which separated equation a profile solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    Eta,
    Xi,
}

/// Solution regular at the start pole, sampled on a uniform grid.
/// Normalised so that `psi / |s^2-1|^{|m|/2} -> 1` at the start pole.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionProfile {
    pub coordinate: Coordinate,
    pub s: Vec<f64>,
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
    pub energy: f64,
    pub g: f64,
    pub m: i64,
    pub a: f64,
}

impl SolutionProfile {
    /// Eta solution started at `-1`, sampled on `[-1 + STEP_OFF, end]`.
    pub fn eta(energy: f64, g: f64, m: i64, params: &SystemParams, end: f64, points: usize) -> Result<Self> {
        Self::build(Coordinate::Eta, energy, g, m, params, -1.0, 1.0, end, points)
    }

    /// Xi solution started at `1`, sampled on `[1 + STEP_OFF, end]`.
    pub fn xi(energy: f64, g: f64, m: i64, params: &SystemParams, end: f64, points: usize) -> Result<Self> {
        Self::build(Coordinate::Xi, energy, g, m, params, 1.0, 1.0, end, points)
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        coordinate: Coordinate,
        energy: f64,
        g: f64,
        m: i64,
        params: &SystemParams,
        side: f64,
        inward: f64,
        end: f64,
        points: usize,
    ) -> Result<Self> {
        let eq = Equation::new(energy, g, m, params)?;
        let start = side + inward * STEP_OFF;
        let valid = match coordinate {
            Coordinate::Eta => end > start && end < 1.0,
            Coordinate::Xi => end > start,
        };
        if !valid || points < 5 {
            return Err(Error::InvalidArgument(format!(
                "bad profile range end = {end}, points = {points}"
            )));
        }
        let tol = Tolerance::default();
        let step = (end - start) / (points - 1) as f64;
        let mut y = eq.series(side, inward * STEP_OFF);
        let mut x = start;
        let mut s = Vec::with_capacity(points);
        let mut psi = Vec::with_capacity(points);
        let mut dpsi = Vec::with_capacity(points);
        let half_mu = 0.5 * eq.mu;
        for i in 0..points {
            let target = start + step * i as f64;
            y = integrate(|t, v| eq.rhs(t, v), x, y, target, tol)?;
            x = target;
            let w = (x * x - 1.0).abs();
            let weight = w.powf(half_mu);
            // d/ds |s^2-1|^{mu/2} = mu s |s^2-1|^{mu/2} / (s^2-1)
            let dweight = if half_mu == 0.0 {
                0.0
            } else {
                eq.mu * x * weight / (x * x - 1.0)
            };
            s.push(x);
            psi.push(weight * y[0]);
            dpsi.push(weight * y[1] + dweight * y[0]);
        }
        Ok(Self {
            coordinate,
            s,
            psi,
            dpsi,
            energy,
            g,
            m,
            a: params.a(),
        })
    }

    /// Largest residual of the separated equation at interior grid points,
    /// relative to the largest term magnitude on the grid, with `d/ds ((s^2-1) psi')` from five-point differences.
    /// Points with `|s^2-1| < 0.05` are skipped: the stencil does not resolve
    /// the `|s^2-1|^{|m|/2}` factor there.
    pub fn residual(&self) -> f64 {
        let n = self.s.len();
        if n < 5 {
            return 0.0;
        }
        let h = self.s[1] - self.s[0];
        let flux: Vec<f64> = (0..n).map(|i| (self.s[i] * self.s[i] - 1.0) * self.dpsi[i]).collect();
        let two_a2e = 2.0 * self.a * self.a * self.energy;
        let m2 = (self.m * self.m) as f64;
        let mut worst: f64 = 0.0;
        let mut largest: f64 = 0.0;
        for i in 2..n - 2 {
            let x = self.s[i];
            let w = x * x - 1.0;
            if w.abs() < 0.05 {
                continue;
            }
            let dflux = (-flux[i + 2] + 8.0 * flux[i + 1] - 8.0 * flux[i - 1] + flux[i - 2]) / (12.0 * h);
            let q = two_a2e * w + 2.0 * self.a * x - self.g;
            let potential = (q - m2 / w) * self.psi[i];
            let scale = dflux.abs() + (q * self.psi[i]).abs() + (m2 / w * self.psi[i]).abs();
            worst = worst.max((dflux + potential).abs());
            largest = largest.max(scale);
        }
        if largest == 0.0 {
            0.0
        } else {
            worst / largest
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interbasis::spectrum_for_a;

    fn params(a: f64) -> SystemParams {
        SystemParams::new(a).unwrap()
    }

    #[test]
    fn series_reproduces_ground_state() {
        // n = 1: f = exp(-a s) solves both equations at g = 0
        let a = 0.7;
        let eq = Equation::new(-0.5, 0.0, 0, &params(a)).unwrap();
        for (side, t) in [(1.0, 1e-3), (1.0, -1e-3), (-1.0, 1e-3)] {
            let [f, df] = eq.series(side, t);
            let exact = (-a * (side + t)).exp() / (-a * side).exp();
            assert!((f - exact).abs() < 1e-14, "{f} {exact}");
            assert!((df + a * exact).abs() < 1e-11);
        }
    }

    #[test]
    fn ground_state_mismatches_vanish() {
        for a in [0.3, 1.0, 3.0] {
            let p = params(a);
            assert!(shoot_eta(-0.5, 0.0, 0, &p).unwrap().abs() < 1e-8);
            assert!(shoot_xi(-0.5, 0.0, 0, &p).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn n2_closed_form() {
        let p = params(1.0);
        let e = -0.125;
        for g in [1.0 - 2f64.sqrt(), 1.0 + 2f64.sqrt()] {
            assert!(shoot_eta(e, g, 0, &p).unwrap().abs() < 1e-6);
            assert!(shoot_xi(e, g, 0, &p).unwrap().abs() < 1e-6);
        }
        let s = shooting_spectrum(2, 0, &p).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s[0] - (1.0 - 2f64.sqrt())).abs() < 1e-6);
        assert!((s[1] - (1.0 + 2f64.sqrt())).abs() < 1e-6);
    }

    #[test]
    fn sign_changes_across_eigenvalues() {
        let p = params(1.0);
        let e = -0.125;
        let r = 2f64.sqrt();
        let below = shoot_eta(e, 1.0 - r - 0.3, 0, &p).unwrap();
        let between = shoot_eta(e, 1.0, 0, &p).unwrap();
        let above = shoot_eta(e, 1.0 + r + 0.3, 0, &p).unwrap();
        assert!(between.abs() > 1e-3);
        assert!((below > 0.0) != (between > 0.0));
        assert!((between > 0.0) != (above > 0.0));
    }

    #[test]
    fn small_spectra() {
        assert_eq!(shooting_spectrum(1, 0, &params(3.0)).unwrap().len(), 1);
        assert!(shooting_spectrum(1, 0, &params(3.0)).unwrap()[0].abs() < 1e-6);
        for m in [-1, 1] {
            let s = shooting_spectrum(2, m, &params(7.0)).unwrap();
            assert_eq!(s.len(), 1);
            assert!((s[0] - 2.0).abs() < 1e-6, "{s:?}");
        }
    }

    #[test]
    fn n3_joint_zeros() {
        let p = params(2.0);
        let exact = spectrum_for_a(3, 2.0).unwrap();
        for &g in &exact[&0] {
            assert!(shoot_eta(-1.0 / 18.0, g, 0, &p).unwrap().abs() < 1e-6);
            assert!(shoot_xi(-1.0 / 18.0, g, 0, &p).unwrap().abs() < 1e-6);
        }
    }

    #[test]
    fn non_eigenvalue_is_not_a_zero() {
        let p = params(2.0);
        assert!(shoot_xi(-1.0 / 18.0, 3.3, 0, &p).unwrap().abs() > 1e-3);
    }

    #[test]
    fn rejects_bad_input() {
        let p = params(1.0);
        assert!(shoot_eta(0.1, 0.0, 0, &p).is_err());
        assert!(shooting_spectrum(7, 0, &p).is_err());
        assert!(shooting_spectrum(3, 3, &p).is_err());
    }

    #[test]
    fn profiles_satisfy_equation() {
        let p = params(2.0);
        let e = -1.0 / 18.0;
        let g = spectrum_for_a(3, 2.0).unwrap()[&1][0];
        let eta = SolutionProfile::eta(e, g, 1, &p, 0.9, 7601).unwrap();
        assert!(eta.residual() < 1e-8, "{}", eta.residual());
        let xi = SolutionProfile::xi(e, g, 1, &p, 6.0, 40001).unwrap();
        assert!(xi.residual() < 1e-8, "{}", xi.residual());
        assert!((eta.psi[0] / (1.0 - eta.s[0] * eta.s[0]).sqrt() - 1.0).abs() < 1e-2);
    }
}
