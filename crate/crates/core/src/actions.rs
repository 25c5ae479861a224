//! Action integrals of the separated motions, the sum rule
//! `I_eta + I_xi + |I_phi| = 1/sqrt(-2E)`, and EBK quantization.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::classical::{g_range, separation_quartic, turning_points, Interval, SeparationQuartic};
use crate::error::{Error, Result};
use crate::quadrature;
use crate::system::{n_from_energy, SystemParams};

/// Starting Gauss-Legendre order per panel.
pub const DEFAULT_NODES: usize = 64;
/// Stop doubling once successive estimates differ by less than this.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;
const MAX_NODES: usize = 4096;

/// An action value and its estimated absolute quadrature error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionValue {
    pub value: f64,
    pub error: f64,
    /// The interval had a double-root endpoint or an interior pinch.
    pub degenerate: bool,
}

/// `(I_phi, I_eta, I_xi)` at one value of the energy-momentum map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionTriple {
    pub i_phi: f64,
    pub i_eta: f64,
    pub i_xi: f64,
    pub quad_error: f64,
    pub degenerate: bool,
}

impl ActionTriple {
    pub fn sum(&self) -> f64 {
        self.i_eta + self.i_xi + self.i_phi.abs()
    }
}

/// `(1/pi) int sqrt(P(s)) / |s^2 - 1| ds` over an allowed interval.
///
/// The substitution `s = mid + half sin(theta)` removes the square-root
/// endpoint behaviour; the `theta` range is split into panels graded
/// geometrically towards an endpoint that sits close to a pole at `s = +-1`
/// or to another root of `P`.
pub fn action(interval: &Interval, p: &SeparationQuartic) -> Result<ActionValue> {
    let degenerate = interval.is_degenerate();
    if interval.is_collapsed() {
        return Ok(ActionValue {
            value: 0.0,
            error: 0.0,
            degenerate: true,
        });
    }
    let (lo, hi) = (interval.lo, interval.hi);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let integrand = |theta: f64| {
        let (sn, cs) = theta.sin_cos();
        let s = mid + half * sn;
        p.momentum_squared(s).max(0.0).sqrt() * half * cs
    };

    let singular: Vec<f64> = p
        .real_roots()
        .into_iter()
        .map(|r| r.s)
        .chain([-1.0, 1.0])
        .filter(|&x| x <= lo - 1e-14 || x >= hi + 1e-14)
        .collect();
    let nearest = |end: f64| -> f64 { singular.iter().map(|&x| (x - end).abs()).fold(f64::INFINITY, f64::min) };
    let breaks = panel_breaks(nearest(lo) / half, nearest(hi) / half);

    let mut order = DEFAULT_NODES;
    let mut prev = integrate_panels(&breaks, order, &integrand);
    loop {
        order *= 2;
        let next = integrate_panels(&breaks, order, &integrand);
        let change = (next - prev).abs();
        prev = next;
        if change < QUADRATURE_TOLERANCE || order >= MAX_NODES {
            if !prev.is_finite() {
                return Err(Error::Degenerate(format!("non-finite action on [{lo}, {hi}]")));
            }
            return Ok(ActionValue {
                value: prev / PI,
                error: change / PI,
                degenerate,
            });
        }
    }
}

/// Panel boundaries in `theta`, given the distances (in units of the
/// half-width) of the nearest singularity beyond each end.
fn panel_breaks(rel_lo: f64, rel_hi: f64) -> Vec<f64> {
    let graded = |rel: f64| -> Vec<f64> {
        // singularity at theta = -pi/2 + i t, cosh t = 1 + rel
        let t = (1.0 + rel).acosh().max(1e-8);
        let mut offs = Vec::new();
        if t < 0.25 {
            let mut o = t;
            while o < FRAC_PI_4 {
                offs.push(o);
                o *= 2.0;
            }
        }
        offs
    };
    let mut breaks = vec![-FRAC_PI_2];
    breaks.extend(graded(rel_lo).into_iter().map(|o| -FRAC_PI_2 + o));
    let mut top: Vec<f64> = graded(rel_hi).into_iter().map(|o| FRAC_PI_2 - o).collect();
    top.reverse();
    breaks.extend(top);
    breaks.push(FRAC_PI_2);
    breaks
}

fn integrate_panels<F: Fn(f64) -> f64>(breaks: &[f64], order: usize, f: &F) -> f64 {
    let rule = quadrature::rule(order);
    breaks.windows(2).map(|w| rule.integrate(w[0], w[1], f)).sum()
}

/// All three actions at `(E, g, l_z)`. Needs exactly one allowed interval
/// per degree of freedom.
pub fn actions(energy: f64, g: f64, lz: f64, params: &SystemParams) -> Result<ActionTriple> {
    let p = separation_quartic(energy, g, lz, params)?;
    let tp = turning_points(&p)?;
    let eta = action(&tp.eta_interval()?, &p)?;
    let xi = action(&tp.xi_interval()?, &p)?;
    Ok(ActionTriple {
        i_phi: lz,
        i_eta: eta.value,
        i_xi: xi.value,
        quad_error: eta.error + xi.error,
        degenerate: eta.degenerate || xi.degenerate,
    })
}

/// `|I_eta + I_xi + |l_z| - 1/sqrt(-2E)|`.
pub fn sum_rule_residual(energy: f64, g: f64, lz: f64, params: &SystemParams) -> Result<f64> {
    let t = actions(energy, g, lz, params)?;
    Ok((t.sum() - n_from_energy(energy)).abs())
}

/// EBK labels `I_phi = m`, `I_eta = n_eta + 1/2`, `I_xi = n_xi + 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EbkLabel {
    pub n: i64,
    pub m: i64,
    pub n_eta: i64,
    pub n_xi: i64,
}

impl EbkLabel {
    /// Label with `n_xi` fixed by `n_eta + n_xi + |m| + 1 = n`.
    pub fn new(n: i64, m: i64, n_eta: i64) -> Result<Self> {
        let n_xi = n - m.abs() - 1 - n_eta;
        let label = Self { n, m, n_eta, n_xi };
        label.validate()?;
        Ok(label)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.n_eta < 0 || self.n_xi < 0 || self.n_eta + self.n_xi + self.m.abs() + 1 != self.n {
            return Err(Error::InvalidArgument(format!("inconsistent EBK label {self:?}")));
        }
        Ok(())
    }
}

/// Semiclassical `g` solving `I_eta(E_n, g, m) = n_eta + 1/2`.
///
/// `I_eta` grows from 0 on the lower boundary of the image to `n - |m|` on
/// the upper boundary; the root is bracketed there and found by
/// Illinois-modified regula falsi.
pub fn ebk_g(label: EbkLabel, params: &SystemParams) -> Result<f64> {
    label.validate()?;
    let n = label.n as f64;
    let energy = -1.0 / (2.0 * n * n);
    let lz = label.m as f64;
    let target = label.n_eta as f64 + 0.5;
    let (g_lo, g_hi) = g_range(energy, params, lz)?;
    if !(g_hi > g_lo) {
        return Err(Error::NoRoot(format!("empty g-range for {label:?}")));
    }
    let full = n - lz.abs();
    let residual = |g: f64| -> Result<f64> {
        let p = separation_quartic(energy, g, lz, params)?;
        match turning_points(&p) {
            Ok(tp) => Ok(action(&tp.eta_interval()?, &p)?.value - target),
            // rounding at the image boundary: report the boundary value
            Err(Error::EmptyRegion { .. }) if g - g_lo < g_hi - g => Ok(-target),
            Err(Error::EmptyRegion { .. }) => Ok(full - target),
            Err(e) => Err(e),
        }
    };

    let (mut a, mut fa) = (g_lo, -target);
    let (mut b, mut fb) = (g_hi, full - target);
    if fa >= 0.0 || fb <= 0.0 {
        return Err(Error::NoRoot(format!("target action outside range for {label:?}")));
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a && c < b { c } else { 0.5 * (a + b) };
        let fc = residual(c)?;
        if fc.abs() < QUADRATURE_TOLERANCE || (b - a) <= 1e-13 * c.abs().max(1.0) {
            return Ok(c);
        }
        if (fc < 0.0) == (fa < 0.0) {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::NoRoot(format!("EBK solve did not converge for {label:?}")))
}

/// Semiclassical spectrum at fixed `n`, columns ascending in `n_eta`.
pub fn ebk_spectrum(n: i64, params: &SystemParams) -> Result<BTreeMap<i64, Vec<f64>>> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("n must be >= 1, got {n}")));
    }
    let mut columns = BTreeMap::new();
    for mu in 0..n {
        let values = (0..n - mu)
            .map(|n_eta| ebk_g(EbkLabel::new(n, mu, n_eta)?, params))
            .collect::<Result<Vec<f64>>>()?;
        if mu > 0 {
            columns.insert(-mu, values.clone());
        }
        columns.insert(mu, values);
    }
    Ok(columns)
}

/// `I_eta` at the isolated critical value `(0, 2a)`, in closed form:
/// `(2n/pi)(theta + sin theta cos theta)` with `sin theta = sqrt(a)/n`.
pub fn eta_action_at_isolated_value(n: f64, params: &SystemParams) -> Option<f64> {
    let ratio = params.a().sqrt() / n;
    (ratio < 1.0).then(|| {
        let th = ratio.asin();
        2.0 * n / PI * (th + th.sin() * th.cos())
    })
}
