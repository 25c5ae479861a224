//! The separation quartic `P(s) = (2a^2 E (s^2-1) + 2as - g)(s^2-1) - l_z^2`
//! shared by the `eta` and `xi` degrees of freedom, its real roots and the
//! classically allowed intervals.

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::system::SystemParams;

/// Separation quartic together with the data that defines it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationQuartic {
    /// Coefficients in descending degree, `coeffs[0]` multiplies `s^4`.
    pub coeffs: [f64; 5],
    pub energy: f64,
    pub g: f64,
    pub lz: f64,
    pub a: f64,
}

pub fn separation_quartic(energy: f64, g: f64, lz: f64, params: &SystemParams) -> Result<SeparationQuartic> {
    if !(energy < 0.0) {
        return Err(Error::InvalidArgument(format!("bound states need E < 0, got {energy}")));
    }
    if !g.is_finite() || !lz.is_finite() {
        return Err(Error::InvalidArgument("g and l_z must be finite".into()));
    }
    Ok(SeparationQuartic::new(energy, g, lz, params.a()))
}

impl SeparationQuartic {
    pub(crate) fn new(energy: f64, g: f64, lz: f64, a: f64) -> Self {
        let c = 2.0 * a * a * energy;
        let coeffs = [c, 2.0 * a, -(2.0 * c + g), -2.0 * a, c + g - lz * lz];
        Self {
            coeffs,
            energy,
            g,
            lz,
            a,
        }
    }

    /// Quadratic factor `Q(s) = 2a^2 E (s^2-1) + 2as - g`.
    #[inline]
    pub fn q(&self, s: f64) -> f64 {
        2.0 * self.a * self.a * self.energy * (s * s - 1.0) + 2.0 * self.a * s - self.g
    }

    #[inline]
    pub fn dq(&self, s: f64) -> f64 {
        4.0 * self.a * self.a * self.energy * s + 2.0 * self.a
    }

    /// Horner evaluation of the expanded coefficients.
    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * s + c)
    }

    /// Evaluation in the factored form.
    #[inline]
    pub fn eval_factored(&self, s: f64) -> f64 {
        self.q(s) * (s * s - 1.0) - self.lz * self.lz
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let c = &self.coeffs;
        ((4.0 * c[0] * s + 3.0 * c[1]) * s + 2.0 * c[2]) * s + c[3]
    }

    pub fn second_derivative(&self, s: f64) -> f64 {
        let c = &self.coeffs;
        (12.0 * c[0] * s + 6.0 * c[1]) * s + 2.0 * c[2]
    }

    /// Upper bound for the rounding error of `eval` at `s`.
    fn rounding_floor(&self, s: f64) -> f64 {
        let mag = self.coeffs.iter().fold(0.0, |acc, &c| acc * s.abs() + c.abs());
        64.0 * f64::EPSILON * mag
    }

    /// `p_s^2 = P(s) / (s^2 - 1)^2`, written so that it stays finite at
    /// `s = +-1` when `l_z = 0`.
    #[inline]
    pub fn momentum_squared(&self, s: f64) -> f64 {
        let w = s * s - 1.0;
        if self.lz == 0.0 {
            self.q(s) / w
        } else {
            self.q(s) / w - self.lz * self.lz / (w * w)
        }
    }

    /// Quartic discriminant divided by the sum of the magnitudes of its
    /// monomials, so exact double roots give a value at rounding level.
    pub fn relative_discriminant(&self) -> f64 {
        let [a, b, c, d, e] = self.coeffs;
        let terms = [
            256.0 * a * a * a * e * e * e,
            -192.0 * a * a * b * d * e * e,
            -128.0 * a * a * c * c * e * e,
            144.0 * a * a * c * d * d * e,
            -27.0 * a * a * d * d * d * d,
            144.0 * a * b * b * c * e * e,
            -6.0 * a * b * b * d * d * e,
            -80.0 * a * b * c * c * d * e,
            18.0 * a * b * c * d * d * d,
            16.0 * a * c * c * c * c * e,
            -4.0 * a * c * c * c * d * d,
            -27.0 * b * b * b * b * e * e,
            18.0 * b * b * b * c * d * e,
            -4.0 * b * b * b * d * d * d,
            -4.0 * b * b * c * c * c * e,
            b * b * c * c * d * d,
        ];
        let sum: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        if scale == 0.0 {
            0.0
        } else {
            sum.abs() / scale
        }
    }

    /// Distinct real roots, ascending, each tagged with its multiplicity
    /// class. Roots come from the companion-matrix eigenvalues and are
    /// polished by bisection (simple roots) or by Newton on `P'` (double).
    pub fn real_roots(&self) -> Vec<Root> {
        if self.lz == 0.0 {
            return self.real_roots_factored();
        }
        let [c4, c3, c2, c1, c0] = self.coeffs;
        let companion = Matrix4::new(
            -c3 / c4,
            -c2 / c4,
            -c1 / c4,
            -c0 / c4, //
            1.0,
            0.0,
            0.0,
            0.0, //
            0.0,
            1.0,
            0.0,
            0.0, //
            0.0,
            0.0,
            1.0,
            0.0,
        );
        let mut cand: Vec<(f64, f64)> = companion.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
        cand.sort_by(|x, y| x.0.total_cmp(&y.0));
        self.classify_candidates(&cand)
    }

    /// With `l_z = 0` the quartic splits as `(s^2 - 1) Q(s)`.
    fn real_roots_factored(&self) -> Vec<Root> {
        let mut roots = vec![-1.0, 1.0];
        let (qa, qb, qc) = (
            2.0 * self.a * self.a * self.energy,
            2.0 * self.a,
            -2.0 * self.a * self.a * self.energy - self.g,
        );
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            // numerically stable pair
            let t = -0.5 * (qb + qb.signum() * sq);
            roots.push(t / qa);
            if t != 0.0 {
                roots.push(qc / t);
            }
        }
        roots.sort_by(f64::total_cmp);
        let mut out: Vec<Root> = Vec::new();
        for r in roots {
            let tol = 1e-9 * r.abs().max(1.0);
            match out.last_mut() {
                Some(prev) if (r - prev.s).abs() < tol => {
                    prev.double = true;
                    if prev.s.abs() == 1.0 {
                        // keep the exact boundary value
                    } else {
                        prev.s = 0.5 * (prev.s + r);
                    }
                }
                _ => out.push(Root { s: r, double: false }),
            }
        }
        out
    }

    fn classify_candidates(&self, cand: &[(f64, f64)]) -> Vec<Root> {
        let near_real = |re: f64, im: f64| im.abs() <= 1e-6 * re.abs().max(1.0);
        let reals: Vec<f64> = cand
            .iter()
            .filter(|(re, im)| near_real(*re, *im))
            .map(|c| c.0)
            .collect();
        // cluster nearby candidates (double roots split by rounding)
        let mut clusters: Vec<Vec<f64>> = Vec::new();
        for r in reals {
            match clusters.last_mut() {
                Some(cl) if (r - cl[cl.len() - 1]).abs() <= 1e-6 * r.abs().max(1.0) => cl.push(r),
                _ => clusters.push(vec![r]),
            }
        }
        let mut out = Vec::new();
        for cl in &clusters {
            let guess = cl.iter().sum::<f64>() / cl.len() as f64;
            if cl.len() >= 2 {
                if let Some(r) = self.polish_double(guess) {
                    out.push(r);
                    continue;
                }
            }
            // simple root, or a pair that the double test rejected
            for &r in cl {
                if let Some(dr) = self.polish_double(r) {
                    if out
                        .last()
                        .is_none_or(|p: &Root| (p.s - dr.s).abs() > 1e-9 * dr.s.abs().max(1.0))
                    {
                        out.push(dr);
                    }
                    continue;
                }
                out.push(Root {
                    s: self.polish_simple(r),
                    double: false,
                });
            }
        }
        out.sort_by(|x, y| x.s.total_cmp(&y.s));
        out.dedup_by(|x, y| (x.s - y.s).abs() <= 1e-12 * x.s.abs().max(1.0));
        out
    }

    /// Bisection polish of a simple root inside a bracket around `guess`.
    fn polish_simple(&self, guess: f64) -> f64 {
        let mut w = 1e-8 * guess.abs().max(1.0);
        let (mut lo, mut hi) = (guess - w, guess + w);
        let mut found = false;
        for _ in 0..40 {
            if self.eval(lo) * self.eval(hi) <= 0.0 {
                found = true;
                break;
            }
            w *= 2.0;
            lo = guess - w;
            hi = guess + w;
        }
        if !found {
            return guess;
        }
        let flo = self.eval(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 1e-13 * mid.abs().max(1.0) || mid <= lo || mid >= hi {
                break;
            }
            if (self.eval(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Newton iteration on `P'` from `guess`; accepts the stationary point
    /// as a double root when the implied root separation is below
    /// `1e-9 max(1, |s|)` or `P` vanishes there to rounding accuracy.
    fn polish_double(&self, guess: f64) -> Option<Root> {
        let mut s = guess;
        for _ in 0..50 {
            let d2 = self.second_derivative(s);
            if d2 == 0.0 {
                break;
            }
            let step = self.derivative(s) / d2;
            s -= step;
            if step.abs() <= 1e-15 * s.abs().max(1.0) {
                break;
            }
        }
        if (s - guess).abs() > 1e-4 * guess.abs().max(1.0) {
            return None;
        }
        let p = self.eval(s);
        let d2 = self.second_derivative(s).abs();
        let separation = if d2 > 0.0 {
            2.0 * (2.0 * p.abs() / d2).sqrt()
        } else {
            f64::INFINITY
        };
        if separation < 1e-9 * s.abs().max(1.0) || p.abs() <= self.rounding_floor(s) {
            Some(Root { s, double: true })
        } else {
            None
        }
    }
}

/// A real root of the quartic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub s: f64,
    pub double: bool,
}

/// What bounds an allowed interval at one end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    /// Simple root of `P`, an ordinary turning point.
    Simple,
    /// Double root of `P`.
    Double,
    /// Coordinate boundary `s = +-1` reached with `l_z = 0`.
    Boundary,
}

/// A classically allowed interval `[lo, hi]` with `P >= 0` inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_kind: Endpoint,
    pub hi_kind: Endpoint,
    /// Interior double roots where two allowed pieces touch.
    pub pinched: bool,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_collapsed(&self) -> bool {
        self.width() <= 1e-9 * self.lo.abs().max(1.0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.pinched || self.is_collapsed() || self.lo_kind == Endpoint::Double || self.hi_kind == Endpoint::Double
    }
}

/// Degeneracy markers attached to a turning-point set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DegeneracyFlags {
    /// Two roots coincide within `1e-9`.
    pub double_root: bool,
    /// An interval reaches `s = +-1`.
    pub touches_boundary: bool,
    /// The `eta` and `xi` intervals share the endpoint `s = 1`.
    pub shared_endpoint: bool,
}

impl DegeneracyFlags {
    pub fn any(&self) -> bool {
        self.double_root || self.touches_boundary || self.shared_endpoint
    }
}

/// Classically allowed `eta`-intervals in `[-1, 1]` and `xi`-intervals in
/// `[1, inf)`. Generically there is exactly one of each.
#[derive(Debug, Clone, PartialEq)]
pub struct TurningPoints {
    pub eta_intervals: Vec<Interval>,
    pub xi_intervals: Vec<Interval>,
    pub flags: DegeneracyFlags,
}

impl TurningPoints {
    fn unique(list: &[Interval], name: &str) -> Result<Interval> {
        match list {
            [one] => Ok(*one),
            [] => Err(Error::Degenerate(format!("no {name} interval"))),
            _ => Err(Error::Degenerate(format!("{} disjoint {name} intervals", list.len()))),
        }
    }

    pub fn eta_interval(&self) -> Result<Interval> {
        Self::unique(&self.eta_intervals, "eta")
    }

    pub fn xi_interval(&self) -> Result<Interval> {
        Self::unique(&self.xi_intervals, "xi")
    }
}

/// Real roots found via the companion matrix, sorted into allowed
/// intervals. Fails with [`Error::EmptyRegion`] when either degree of
/// freedom has no allowed motion.
pub fn turning_points(p: &SeparationQuartic) -> Result<TurningPoints> {
    let roots = p.real_roots();
    let mut flags = DegeneracyFlags {
        double_root: roots.iter().any(|r| r.double),
        ..Default::default()
    };

    let eta = allowed_intervals(p, &roots, -1.0, 1.0);
    let xi_outer = roots.iter().map(|r| r.s).filter(|&s| s > 1.0).fold(1.0, f64::max);
    let xi = allowed_intervals(p, &roots, 1.0, xi_outer);

    if eta.is_empty() || xi.is_empty() {
        return Err(Error::EmptyRegion {
            energy: p.energy,
            g: p.g,
            lz: p.lz,
        });
    }
    flags.touches_boundary = eta
        .iter()
        .chain(&xi)
        .any(|iv| iv.lo_kind == Endpoint::Boundary || iv.hi_kind == Endpoint::Boundary);
    let eta_top = eta.iter().any(|iv| iv.hi == 1.0);
    let xi_bottom = xi.iter().any(|iv| iv.lo == 1.0);
    let one_is_double = roots.iter().any(|r| r.double && (r.s - 1.0).abs() <= 1e-9);
    flags.shared_endpoint = eta_top && xi_bottom && one_is_double;
    flags.double_root |= eta.iter().chain(&xi).any(Interval::is_degenerate);
    Ok(TurningPoints {
        eta_intervals: eta,
        xi_intervals: xi,
        flags,
    })
}

fn allowed_intervals(p: &SeparationQuartic, roots: &[Root], lo: f64, hi: f64) -> Vec<Interval> {
    if hi <= lo {
        return Vec::new();
    }
    let tol = 1e-12;
    let mut breaks: Vec<(f64, Option<bool>)> = vec![(lo, None)];
    for r in roots {
        if r.s > lo + tol && r.s < hi - tol {
            breaks.push((r.s, Some(r.double)));
        }
    }
    breaks.push((hi, None));
    let boundary_double = |s: f64| roots.iter().any(|r| r.double && (r.s - s).abs() <= 1e-9);

    let kind_at = |s: f64, inner: Option<bool>| -> Endpoint {
        match inner {
            Some(true) => Endpoint::Double,
            Some(false) => Endpoint::Simple,
            None => {
                if boundary_double(s) {
                    Endpoint::Double
                } else if s.abs() == 1.0 && p.lz == 0.0 {
                    Endpoint::Boundary
                } else {
                    Endpoint::Simple
                }
            }
        }
    };

    let mut out: Vec<Interval> = Vec::new();
    let mut open: Option<Interval> = None;
    for w in breaks.windows(2) {
        let (a, ka) = w[0];
        let (b, kb) = w[1];
        let positive = p.eval(0.5 * (a + b)) > 0.0;
        if positive {
            match open.as_mut() {
                Some(iv) => {
                    iv.hi = b;
                    iv.hi_kind = kind_at(b, kb);
                    iv.pinched = true;
                }
                None => {
                    open = Some(Interval {
                        lo: a,
                        hi: b,
                        lo_kind: kind_at(a, ka),
                        hi_kind: kind_at(b, kb),
                        pinched: false,
                    })
                }
            }
        } else if let Some(iv) = open.take() {
            out.push(iv);
        }
    }
    if let Some(iv) = open.take() {
        out.push(iv);
    }
    // isolated allowed points: double roots with P < 0 on both sides
    for r in roots.iter().filter(|r| r.double && r.s > lo + tol && r.s < hi - tol) {
        if !out.iter().any(|iv| r.s >= iv.lo - tol && r.s <= iv.hi + tol) {
            out.push(Interval {
                lo: r.s,
                hi: r.s,
                lo_kind: Endpoint::Double,
                hi_kind: Endpoint::Double,
                pinched: false,
            });
        }
    }
    out.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    out
}

/// Classical momentum `sqrt(P(s)) / |s^2 - 1|`.
pub fn momentum(s: f64, p: &SeparationQuartic) -> Result<f64> {
    if (s * s - 1.0).abs() == 0.0 {
        return Err(Error::InvalidArgument("momentum undefined at s = +-1".into()));
    }
    let value = p.eval(s);
    if value < -1e-12 {
        return Err(Error::InvalidArgument(format!(
            "s = {s} is classically forbidden (P = {value:e})"
        )));
    }
    Ok(value.max(0.0).sqrt() / (s * s - 1.0).abs())
}
