//! Singular reduction of the Kepler problem at fixed energy
//! `E = -1/(2n^2)` and fixed `L_z = m`.
//!
//! Invariants of the axial rotation are `rho1 = K_z`,
//! `rho2 = L_x^2 + L_y^2 - K_x^2 - K_y^2` and `rho3 = 2(K_y L_x - K_x L_y)`,
//! with `K = n e`. The factor in `rho3` is the one for which the brackets
//! below follow from `{L_i, K_j} = eps_ijk K_k`. They satisfy
//! `C = (n^2 - (m + rho1)^2)(n^2 - (m - rho1)^2) - rho2^2 - rho3^2 = 0`.

use crate::classical::BIFURCATION_TOLERANCE;
use crate::error::{Error, Result};
use crate::system::SystemParams;

/// Angular momentum `L` and scaled eccentricity vector `K = n e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianState {
    pub l: [f64; 3],
    pub k: [f64; 3],
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl CartesianState {
    /// State from the two `so(4)` vectors `L + K` and `L - K`, each of
    /// length `n` on shell.
    pub fn from_sum_difference(plus: [f64; 3], minus: [f64; 3]) -> Self {
        let l = [0, 1, 2].map(|i| 0.5 * (plus[i] + minus[i]));
        let k = [0, 1, 2].map(|i| 0.5 * (plus[i] - minus[i]));
        Self { l, k }
    }

    /// Residuals `(L.K, |L|^2 + |K|^2 - n^2)`.
    pub fn casimir_residuals(&self, n: f64) -> (f64, f64) {
        (dot(self.l, self.k), dot(self.l, self.l) + dot(self.k, self.k) - n * n)
    }
}

/// A point of the reduced phase space with its context `(n, m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedPoint {
    pub rho: [f64; 3],
    pub n: f64,
    pub m: f64,
    /// `|C(rho)|` at construction.
    pub casimir_residual: f64,
}

impl ReducedPoint {
    pub fn new(rho: [f64; 3], n: f64, m: f64) -> Self {
        let mut p = Self {
            rho,
            n,
            m,
            casimir_residual: 0.0,
        };
        p.casimir_residual = casimir(&p).abs();
        p
    }

    /// Point on `C = 0` from `rho1` and an angle in the `(rho2, rho3)`
    /// plane. `rho1` must satisfy `|rho1| <= n - |m|`.
    pub fn on_casimir(n: f64, m: f64, rho1: f64, angle: f64) -> Self {
        let radius = (cone_factor(n, m, rho1)).max(0.0).sqrt();
        Self::new([rho1, radius * angle.cos(), radius * angle.sin()], n, m)
    }
}

fn cone_factor(n: f64, m: f64, rho1: f64) -> f64 {
    (n * n - (m + rho1).powi(2)) * (n * n - (m - rho1).powi(2))
}

/// Reduction map. Rejects states off the `so(4)` shell or with `L_z != m`
/// beyond `1e-8` (relative to `n^2`).
pub fn reduce(state: &CartesianState, n: f64, m: f64) -> Result<ReducedPoint> {
    let (lk, norm) = state.casimir_residuals(n);
    let tol = 1e-8 * (n * n).max(1.0);
    if lk.abs() > tol || norm.abs() > tol {
        return Err(Error::InvalidArgument(format!(
            "state off shell: L.K = {lk:e}, |L|^2+|K|^2-n^2 = {norm:e}"
        )));
    }
    if (state.l[2] - m).abs() > 1e-8 * n.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "L_z = {} differs from m = {m}",
            state.l[2]
        )));
    }
    let [lx, ly, _] = state.l;
    let [kx, ky, kz] = state.k;
    let rho = [kz, lx * lx + ly * ly - kx * kx - ky * ky, 2.0 * (ky * lx - kx * ly)];
    Ok(ReducedPoint::new(rho, n, m))
}

pub fn casimir(p: &ReducedPoint) -> f64 {
    let [r1, r2, r3] = p.rho;
    cone_factor(p.n, p.m, r1) - r2 * r2 - r3 * r3
}

pub fn casimir_gradient(p: &ReducedPoint) -> [f64; 3] {
    let [r1, r2, r3] = p.rho;
    let (n2, m2) = (p.n * p.n, p.m * p.m);
    [-4.0 * r1 * (n2 + m2 - r1 * r1), -2.0 * r2, -2.0 * r3]
}

/// Poisson tensor `J[i][j] = {rho_i, rho_j}`.
pub fn structure_matrix(p: &ReducedPoint) -> [[f64; 3]; 3] {
    structure_at(p.rho, p.n, p.m)
}

fn structure_at(rho: [f64; 3], n: f64, m: f64) -> [[f64; 3]; 3] {
    let [r1, r2, r3] = rho;
    let b12 = 2.0 * r3;
    let b13 = -2.0 * r2;
    let b23 = 4.0 * r1 * (n * n + m * m - r1 * r1);
    [[0.0, b12, b13], [-b12, 0.0, b23], [-b13, -b23, 0.0]]
}

/// `|J grad C|` relative to `|J| |grad C|`.
pub fn casimir_annihilation_residual(p: &ReducedPoint) -> f64 {
    let j = structure_matrix(p);
    let dc = casimir_gradient(p);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for row in &j {
        let v: f64 = (0..3).map(|c| row[c] * dc[c]).sum();
        let s: f64 = (0..3).map(|c| (row[c] * dc[c]).abs()).sum();
        worst = worst.max(v.abs());
        scale = scale.max(s);
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

/// Jacobi identity `J^{il} d_l J^{jk} + cyclic = 0`, with derivatives of
/// the tensor entries taken by five-point central differences. Returned
/// relative to the sum of magnitudes of the terms.
pub fn jacobi_residual(p: &ReducedPoint) -> f64 {
    let j = structure_matrix(p);
    let h = 1e-3 * (p.n * p.n).max(1.0).sqrt();
    // dj[l][a][b] = d J[a][b] / d rho_l
    let mut dj = [[[0.0; 3]; 3]; 3];
    for (l, slot) in dj.iter_mut().enumerate() {
        let shifted = |t: f64| {
            let mut r = p.rho;
            r[l] += t;
            structure_at(r, p.n, p.m)
        };
        let (p2, p1, m1, m2) = (shifted(2.0 * h), shifted(h), shifted(-h), shifted(-2.0 * h));
        for a in 0..3 {
            for b in 0..3 {
                slot[a][b] = (-p2[a][b] + 8.0 * p1[a][b] - 8.0 * m1[a][b] + m2[a][b]) / (12.0 * h);
            }
        }
    }
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let mut sum = 0.0;
                let mut mag = 0.0;
                for l in 0..3 {
                    for t in [j[a][l] * dj[l][b][c], j[b][l] * dj[l][c][a], j[c][l] * dj[l][a][b]] {
                        sum += t;
                        mag += t.abs();
                    }
                }
                worst = worst.max(sum.abs());
                scale = scale.max(mag);
            }
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

/// Reduced second integral `G = (rho2 + n^2 - rho1^2 + m^2)/2 + 2a rho1/n`.
pub fn reduced_g(p: &ReducedPoint, params: &SystemParams) -> f64 {
    let [r1, r2, _] = p.rho;
    0.5 * (r2 + p.n * p.n - r1 * r1 + p.m * p.m) + 2.0 * params.a() * r1 / p.n
}

/// Fibre type over the singular point `(n, 0, 0)` of the `m = 0` reduced
/// space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularPointKind {
    /// `0 < a < n^2`: the level set `G = 2a` enters the cone, so the fibre
    /// is a pinched torus.
    PinchedTorus,
    /// `a > n^2`: the level set touches the reduced space only at the
    /// singular point.
    EllipticEquilibrium,
    /// `a = n^2`.
    DegenerateBifurcation,
}

impl SingularPointKind {
    pub fn name(&self) -> &'static str {
        match self {
            SingularPointKind::PinchedTorus => "pinched-torus",
            SingularPointKind::EllipticEquilibrium => "elliptic-equilibrium",
            SingularPointKind::DegenerateBifurcation => "degenerate-bifurcation",
        }
    }
}

/// Slope `2n - 4a/n` of the line `G = 2a` in the `rho3 = 0` chart,
/// compared with the cone slopes `+-2n` at `(n, 0, 0)`.
pub fn classify_singular_point(n: f64, params: &SystemParams) -> Result<SingularPointKind> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidArgument(format!("need n > 0, got {n}")));
    }
    let a = params.a();
    let n2 = n * n;
    if (a - n2).abs() <= BIFURCATION_TOLERANCE * n2.max(a) {
        return Ok(SingularPointKind::DegenerateBifurcation);
    }
    let slope = level_line_slope(n, params);
    let cone = 2.0 * n;
    Ok(if slope.abs() < cone {
        SingularPointKind::PinchedTorus
    } else {
        SingularPointKind::EllipticEquilibrium
    })
}

/// `d rho2 / d rho1` along `G = const`, evaluated at `rho1 = n`.
pub fn level_line_slope(n: f64, params: &SystemParams) -> f64 {
    2.0 * n - 4.0 * params.a() / n
}

/// Section `rho3 = 0` of the reduced space and the lines `G = g`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseSpaceSlice {
    /// Closed curve `rho2 = +-sqrt(...)` as one polyline, upper half left
    /// to right then lower half back.
    pub section: Vec<(f64, f64)>,
    /// Each requested `g` with its line sampled over the section's `rho1` range.
    pub lines: Vec<(f64, Vec<(f64, f64)>)>,
}

pub fn phase_space_slice(n: f64, m: f64, params: &SystemParams, g_values: &[f64], samples: usize) -> PhaseSpaceSlice {
    if m.abs() > n || samples < 2 {
        return PhaseSpaceSlice::default();
    }
    let r_max = n - m.abs();
    if r_max <= 0.0 {
        return PhaseSpaceSlice {
            section: vec![(0.0, 0.0)],
            lines: Vec::new(),
        };
    }
    let rho1s: Vec<f64> = (0..samples)
        .map(|i| {
            // cosine spacing resolves the corners at +-r_max
            let t = i as f64 / (samples - 1) as f64;
            -r_max * (std::f64::consts::PI * t).cos()
        })
        .collect();
    let upper: Vec<(f64, f64)> = rho1s
        .iter()
        .map(|&r| (r, cone_factor(n, m, r).max(0.0).sqrt()))
        .collect();
    let mut section = upper.clone();
    section.extend(upper.iter().rev().skip(1).map(|&(r, y)| (r, -y)));
    let a = params.a();
    let lines = g_values
        .iter()
        .map(|&g| {
            let pts = rho1s
                .iter()
                .map(|&r| (r, 2.0 * g - n * n + r * r - m * m - 4.0 * a * r / n))
                .collect();
            (g, pts)
        })
        .collect();
    PhaseSpaceSlice { section, lines }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(a: f64) -> SystemParams {
        SystemParams::new(a).unwrap()
    }

    fn unit_with_z(rng: &mut ChaCha8Rng, z: f64) -> [f64; 3] {
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let r = (1.0 - z * z).max(0.0).sqrt();
        [r * phi.cos(), r * phi.sin(), z]
    }

    fn random_state(rng: &mut ChaCha8Rng, n: f64, m: f64) -> CartesianState {
        // A_z + B_z = 2m with |A_z|, |B_z| <= n
        let lo = (2.0 * m - n).max(-n);
        let hi = (2.0 * m + n).min(n);
        let az: f64 = rng.gen_range(lo..=hi);
        let bz = 2.0 * m - az;
        let plus = unit_with_z(rng, az / n).map(|c| c * n);
        let minus = unit_with_z(rng, bz / n).map(|c| c * n);
        CartesianState::from_sum_difference(plus, minus)
    }

    #[test]
    fn named_states() {
        let n = 5.0;
        let circ = CartesianState {
            l: [0.0, 0.0, n],
            k: [0.0; 3],
        };
        assert_eq!(reduce(&circ, n, n).unwrap().rho, [0.0, 0.0, 0.0]);
        let coll = CartesianState {
            l: [0.0; 3],
            k: [0.0, 0.0, n],
        };
        assert_eq!(reduce(&coll, n, 0.0).unwrap().rho, [n, 0.0, 0.0]);
        let tilt = CartesianState {
            l: [n, 0.0, 0.0],
            k: [0.0; 3],
        };
        assert_eq!(reduce(&tilt, n, 0.0).unwrap().rho, [0.0, n * n, 0.0]);
    }

    #[test]
    fn rejects_off_shell() {
        let bad = CartesianState {
            l: [1.0, 0.0, 0.0],
            k: [1.0, 0.0, 0.0],
        };
        assert!(reduce(&bad, 2f64.sqrt(), 0.0).is_err());
        let wrong_m = CartesianState {
            l: [0.0, 0.0, 3.0],
            k: [0.0, 0.0, 0.0],
        };
        assert!(reduce(&wrong_m, 3.0, 1.0).is_err());
    }

    #[test]
    fn casimir_vanishes_at_named_points() {
        let n = 7.0;
        assert_eq!(casimir(&ReducedPoint::new([n, 0.0, 0.0], n, 0.0)), 0.0);
        assert_eq!(casimir(&ReducedPoint::new([0.0, n * n, 0.0], n, 0.0)), 0.0);
        assert_eq!(casimir(&ReducedPoint::new([0.0, 0.0, 0.0], n, n)), 0.0);
    }

    #[test]
    fn reduced_states_lie_on_casimir() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (n, m) in [(12.0, 0.0), (12.0, 5.0), (3.0, -2.0)] {
            for _ in 0..200 {
                let st = random_state(&mut rng, n, m);
                let p = reduce(&st, n, m).unwrap();
                assert!(p.casimir_residual <= 1e-9 * n.powi(4), "{p:?}");
                assert!(p.rho[0].abs() <= n + 1e-12);
            }
        }
    }

    #[allow(clippy::needless_range_loop)]
    fn so4_bracket(st: &CartesianState, ga: &[f64; 6], gb: &[f64; 6]) -> f64 {
        let eps = |i: usize, j: usize, k: usize| -> f64 {
            match (i, j, k) {
                (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
                (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
                _ => 0.0,
            }
        };
        let v = [st.l[0], st.l[1], st.l[2], st.k[0], st.k[1], st.k[2]];
        let mut sum = 0.0;
        for a in 0..6 {
            for b in 0..6 {
                let same = (a < 3) == (b < 3);
                let val: f64 = (0..3)
                    .map(|k| eps(a % 3, b % 3, k) * v[if same { k } else { k + 3 }])
                    .sum();
                sum += ga[a] * gb[b] * val;
            }
        }
        sum
    }

    #[test]
    fn structure_matrix_matches_so4_brackets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (n, m) = (6.0, 2.0);
        for _ in 0..50 {
            let st = random_state(&mut rng, n, m);
            let [lx, ly, _] = st.l;
            let [kx, ky, _] = st.k;
            let g1 = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
            let g2 = [2.0 * lx, 2.0 * ly, 0.0, -2.0 * kx, -2.0 * ky, 0.0];
            let g3 = [2.0 * ky, -2.0 * kx, 0.0, -2.0 * ly, 2.0 * lx, 0.0];
            let j = structure_matrix(&reduce(&st, n, m).unwrap());
            for (a, b, ga, gb) in [(0, 1, &g1, &g2), (0, 2, &g1, &g3), (1, 2, &g2, &g3)] {
                let direct = so4_bracket(&st, ga, gb);
                assert!(
                    (direct - j[a][b]).abs() <= 1e-9 * n.powi(3),
                    "{a}{b}: {direct} vs {}",
                    j[a][b]
                );
            }
        }
    }

    #[test]
    fn structure_matrix_samples() {
        let n = 12.0;
        let j = structure_matrix(&ReducedPoint::new([n, 0.0, 0.0], n, 0.0));
        assert!(j.iter().flatten().all(|&x| x == 0.0));
        let j = structure_matrix(&ReducedPoint::new([0.0, n * n, 0.0], n, 0.0));
        assert_eq!(j[0][1], 0.0);
        assert_eq!(j[0][2], -2.0 * n * n);
        assert_eq!(j[1][2], 0.0);
    }

    #[test]
    fn bracket_identities_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, m) in [(12.0, 0.0), (12.0, 5.0)] {
            for _ in 0..100 {
                let r1 = rng.gen_range(-(n - m)..=(n - m));
                let p = ReducedPoint::on_casimir(n, m, r1, rng.gen_range(0.0..6.3));
                assert!(casimir_annihilation_residual(&p) <= 1e-9);
                assert!(jacobi_residual(&p) <= 1e-8, "{}", jacobi_residual(&p));
            }
        }
    }

    #[test]
    fn reduced_g_values() {
        let pr = params(3.0);
        let n = 12.0;
        assert!((reduced_g(&ReducedPoint::new([n, 0.0, 0.0], n, 0.0), &pr) - 6.0).abs() < 1e-12);
        assert!((reduced_g(&ReducedPoint::new([-n, 0.0, 0.0], n, 0.0), &pr) + 6.0).abs() < 1e-12);
        assert_eq!(reduced_g(&ReducedPoint::new([0.0, n * n, 0.0], n, 0.0), &pr), n * n);
    }

    #[test]
    fn classification() {
        use SingularPointKind::*;
        let c = |a: f64| classify_singular_point(12.0, &params(a)).unwrap();
        assert_eq!(c(4.0), PinchedTorus);
        assert_eq!(c(36.0), PinchedTorus);
        assert_eq!(c(288.0), EllipticEquilibrium);
        assert_eq!(c(144.0), DegenerateBifurcation);
        assert_eq!(c(144.0 * (1.0 - 1e-9)), PinchedTorus);
        assert_eq!(c(144.0 * (1.0 + 1e-9)), EllipticEquilibrium);
    }

    #[test]
    fn slice_shape() {
        let n = 12.0;
        let pr = params(4.0);
        let s = phase_space_slice(n, 0.0, &pr, &[8.0, 72.0, 576.0], 201);
        let first = s.section[0];
        assert!((first.0 + n).abs() < 1e-12 && first.1.abs() < 1e-9);
        assert!(s.section.iter().any(|&(r, y)| (r - n).abs() < 1e-12 && y.abs() < 1e-9));
        // each line g = 2a' passes through (n, 0) when paired with its own a'
        for (g, a) in [(8.0, 4.0), (72.0, 36.0), (576.0, 288.0)] {
            let s = phase_space_slice(n, 0.0, &params(a), &[g], 11);
            let end = *s.lines[0].1.last().unwrap();
            assert!((end.0 - n).abs() < 1e-12 && end.1.abs() < 1e-9, "{end:?}");
        }
        // corner slope 2n near rho1 = n
        let eps = 1e-6;
        let y = cone_factor(n, 0.0, n - eps).sqrt();
        assert!((y / eps - 2.0 * n).abs() < 1e-3);
        assert_eq!(phase_space_slice(n, n, &pr, &[], 10).section, vec![(0.0, 0.0)]);
        assert!(phase_space_slice(n, n + 1.0, &pr, &[], 10).section.is_empty());
    }
}
