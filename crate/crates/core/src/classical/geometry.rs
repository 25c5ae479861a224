//! Configuration-space geometry: prolate spheroidal coordinates and the
//! family of Kepler ellipses over the isolated critical value.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::system::SystemParams;

/// `(xi, eta, phi)` of a Cartesian point, with `r1 = |r - a z|` measured
/// from the nucleus and `r2 = |r + a z|`. The nucleus has `eta = -1`.
pub fn prolate_from_cartesian(r: [f64; 3], params: &SystemParams) -> (f64, f64, f64) {
    let a = params.a();
    let [x, y, z] = r;
    let r1 = (x * x + y * y + (z - a) * (z - a)).sqrt();
    let r2 = (x * x + y * y + (z + a) * (z + a)).sqrt();
    let xi = ((r1 + r2) / (2.0 * a)).max(1.0);
    let eta = ((r1 - r2) / (2.0 * a)).clamp(-1.0, 1.0);
    let phi = if x == 0.0 && y == 0.0 {
        0.0
    } else {
        y.atan2(x).rem_euclid(TAU)
    };
    (xi, eta, phi)
}

/// Inverse map, for round-trip checks.
pub fn cartesian_from_prolate(xi: f64, eta: f64, phi: f64, params: &SystemParams) -> [f64; 3] {
    let a = params.a();
    let rho = a * ((xi * xi - 1.0) * (1.0 - eta * eta)).max(0.0).sqrt();
    // eta = -1 is the nucleus at +a
    [rho * phi.cos(), rho * phi.sin(), -a * xi * eta]
}

/// One Kepler ellipse in the `(x, z)` plane with the nucleus focus at `+a`
/// that passes through the second focus point `-a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseFamilyMember {
    pub t: f64,
    /// Nucleus, `(0, 0, a)`.
    pub nucleus: [f64; 3],
    /// Empty focus of the Kepler ellipse.
    pub second_focus: [f64; 3],
    pub semi_major: f64,
    pub semi_minor: f64,
}

fn dist(p: [f64; 3], q: [f64; 3]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
}

impl EllipseFamilyMember {
    pub fn focal_sum(&self) -> f64 {
        2.0 * self.semi_major
    }

    /// `|r - F1| + |r - F2| - 2 alpha`.
    pub fn focal_residual(&self, r: [f64; 3]) -> f64 {
        dist(r, self.nucleus) + dist(r, self.second_focus) - self.focal_sum()
    }

    pub fn is_degenerate(&self) -> bool {
        self.semi_minor <= 1e-12 * self.semi_major
    }

    /// `count` points around the ellipse, as `(x, z)` pairs.
    pub fn sample(&self, count: usize) -> Vec<(f64, f64)> {
        let (f1, f2) = (self.nucleus, self.second_focus);
        let center = [(f1[0] + f2[0]) / 2.0, (f1[2] + f2[2]) / 2.0];
        let (dx, dz) = (f2[0] - f1[0], f2[2] - f1[2]);
        let len = (dx * dx + dz * dz).sqrt();
        let (ux, uz) = if len > 0.0 { (dx / len, dz / len) } else { (1.0, 0.0) };
        (0..count)
            .map(|i| {
                let psi = TAU * i as f64 / count as f64;
                let (c, s) = (psi.cos(), psi.sin());
                (
                    center[0] + self.semi_major * c * ux - self.semi_minor * s * uz,
                    center[1] + self.semi_major * c * uz + self.semi_minor * s * ux,
                )
            })
            .collect()
    }
}

/// Member `t` of the critical ellipse family at energy `E > -1/(2a)`. The
/// empty focus sits at distance `-1/E - 2a` from `-a` in direction
/// `(sin t, 0, cos t)`; `t = pi` gives the collision orbit along the axis.
pub fn critical_ellipse_family(energy: f64, params: &SystemParams, t: f64) -> Result<EllipseFamilyMember> {
    let a = params.a();
    if !(energy < 0.0) || energy <= params.focal_potential() {
        return Err(Error::InvalidArgument(format!(
            "family exists only for -1/(2a) < E < 0, got E = {energy}, -1/(2a) = {}",
            params.focal_potential()
        )));
    }
    let semi_major = -1.0 / (2.0 * energy);
    let d = -1.0 / energy - 2.0 * a;
    let nucleus = [0.0, 0.0, a];
    let second_focus = [d * t.sin(), 0.0, -a + d * t.cos()];
    let c = dist(nucleus, second_focus) / 2.0;
    let semi_minor = (semi_major * semi_major - c * c).max(0.0).sqrt();
    Ok(EllipseFamilyMember {
        t,
        nucleus,
        second_focus,
        semi_major,
        semi_minor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn focal_points() {
        let params = SystemParams::new(2.0).unwrap();
        let (xi, eta, _) = prolate_from_cartesian([0.0, 0.0, 2.0], &params);
        assert_eq!((xi, eta), (1.0, -1.0));
        let (xi, eta, _) = prolate_from_cartesian([0.0, 0.0, -2.0], &params);
        assert_eq!((xi, eta), (1.0, 1.0));
        let (xi, eta, phi) = prolate_from_cartesian([2.0, 0.0, 0.0], &params);
        assert!((xi - 2f64.sqrt()).abs() < 1e-15 && eta.abs() < 1e-15 && phi == 0.0);
    }

    #[test]
    fn axis_has_zero_phi_and_round_trip() {
        let params = SystemParams::new(1.5).unwrap();
        assert_eq!(prolate_from_cartesian([0.0, 0.0, 7.0], &params).2, 0.0);
        for r in [[0.3, -1.2, 0.7], [-2.0, 0.5, -3.0], [0.0, 4.0, 1.5]] {
            let (xi, eta, phi) = prolate_from_cartesian(r, &params);
            assert!(xi >= 1.0 && (-1.0..=1.0).contains(&eta) && (0.0..TAU).contains(&phi));
            let back = cartesian_from_prolate(xi, eta, phi, &params);
            for i in 0..3 {
                assert!((back[i] - r[i]).abs() < 1e-12, "{r:?} -> {back:?}");
            }
        }
    }

    #[test]
    fn ellipses_pass_through_second_focus() {
        let params = SystemParams::new(144.0 / 5.0).unwrap();
        let e = -1.0 / 288.0;
        for i in 0..32 {
            let m = critical_ellipse_family(e, &params, TAU * i as f64 / 32.0).unwrap();
            assert!(m.focal_residual([0.0, 0.0, -params.a()]).abs() < 1e-12);
            assert!((m.semi_major - 144.0).abs() < 1e-12);
            for (x, z) in m.sample(16) {
                assert!(m.focal_residual([x, 0.0, z]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn t_pi_is_collision_segment() {
        let params = SystemParams::new(4.0).unwrap();
        let e = -1.0 / 288.0;
        let m = critical_ellipse_family(e, &params, PI).unwrap();
        assert!(m.is_degenerate());
        assert!(m.second_focus[0].abs() < 1e-12);
        assert!((m.second_focus[2] - (4.0 + 1.0 / e)).abs() < 1e-9);
    }

    #[test]
    fn family_requires_energy_above_focal_potential() {
        let params = SystemParams::new(288.0).unwrap();
        assert!(critical_ellipse_family(-1.0 / 288.0, &params, 0.0).is_err());
        assert!(critical_ellipse_family(-1.0 / 576.0, &params, 0.0).is_err());
    }
}
