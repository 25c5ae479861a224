use hydromono_core::classical::separation_quartic;
use hydromono_core::reduction::{casimir, reduce, CartesianState, ReducedPoint};
use hydromono_core::{joint_spectrum, JointSpectrum, SystemParams};
use proptest::prelude::*;

fn on_sphere(radius: f64, z: f64, phi: f64) -> [f64; 3] {
    let r = (1.0 - z * z).max(0.0).sqrt();
    [radius * r * phi.cos(), radius * r * phi.sin(), radius * z]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_counts_and_order(n in 1i64..=16, a in 1e-3f64..400.0) {
        let spec = joint_spectrum(n, &SystemParams::new(a).unwrap()).unwrap();
        prop_assert_eq!(spec.len() as i64, n * n);
        prop_assert_eq!(spec.columns.len() as i64, 2 * n - 1);
        for (&m, col) in &spec.columns {
            prop_assert_eq!(col.len() as i64, n - m.abs());
            prop_assert!(col.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn reflection_symmetry(n in 2i64..=16, a in 1e-3f64..400.0) {
        let spec = joint_spectrum(n, &SystemParams::new(a).unwrap()).unwrap();
        for m in 1..n {
            prop_assert_eq!(spec.column(m), spec.column(-m));
        }
    }

    #[test]
    fn column_trace_is_a_independent(n in 1i64..=16, a in 1e-3f64..400.0) {
        let spec = joint_spectrum(n, &SystemParams::new(a).unwrap()).unwrap();
        for (&m, col) in &spec.columns {
            let want = JointSpectrum::column_trace(n, m);
            let got: f64 = col.iter().sum();
            prop_assert!((got - want).abs() <= 1e-10 * want.max(1.0), "m = {}: {} vs {}", m, got, want);
        }
    }

    #[test]
    fn quartic_expanded_matches_factored(
        n in 1.0f64..40.0,
        a in 1e-2f64..500.0,
        g in -500.0f64..2000.0,
        lz in -30.0f64..30.0,
        s in -3.0f64..30.0,
    ) {
        let energy = -1.0 / (2.0 * n * n);
        let p = separation_quartic(energy, g, lz, &SystemParams::new(a).unwrap()).unwrap();
        let (x, y) = (p.eval(s), p.eval_factored(s));
        let scale = 1.0 + x.abs().max(y.abs()) + (a * s * s).powi(2) / (n * n) + g.abs() * s * s + lz * lz;
        prop_assert!((x - y).abs() <= 1e-12 * scale, "{} vs {}", x, y);
    }

    #[test]
    fn reduction_lands_on_casimir(
        n in 1.0f64..30.0,
        mfrac in -0.95f64..0.95,
        zfrac in 0.0f64..1.0,
        phi1 in 0.0f64..std::f64::consts::TAU,
        phi2 in 0.0f64..std::f64::consts::TAU,
    ) {
        let m = mfrac * n;
        let lo = (2.0 * m - n).max(-n);
        let hi = (2.0 * m + n).min(n);
        let az = lo + zfrac * (hi - lo);
        let bz = 2.0 * m - az;
        let state = CartesianState::from_sum_difference(on_sphere(n, az / n, phi1), on_sphere(n, bz / n, phi2));
        let p = reduce(&state, n, m).unwrap();
        prop_assert!(casimir(&p).abs() <= 1e-9 * n.powi(4));
        prop_assert!(p.rho[0].abs() <= n - m.abs() + 1e-9 * n);
    }

    #[test]
    fn casimir_parametrization(n in 1.0f64..30.0, mfrac in -0.95f64..0.95, rfrac in -1.0f64..1.0, angle in 0.0f64..6.3) {
        let m = mfrac * n;
        let rho1 = rfrac * (n - m.abs());
        let p = ReducedPoint::on_casimir(n, m, rho1, angle);
        prop_assert!(p.casimir_residual <= 1e-9 * n.powi(4));
    }
}
