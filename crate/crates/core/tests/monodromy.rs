use hydromono_core::monodromy::*;
use hydromono_core::reduction::{classify_singular_point, SingularPointKind};
use hydromono_core::{joint_spectrum, Error, SystemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lattice(n: i64, a: f64) -> SpectralLattice {
    build_lattice(&joint_spectrum(n, &SystemParams::new(a).unwrap()).unwrap()).unwrap()
}

fn unipotent() -> MonodromyMatrix {
    MonodromyMatrix::new([[1, 1], [0, 1]])
}

#[test]
fn lattice_counts() {
    let l = lattice(12, 144.0 / 5.0);
    assert_eq!(l.len(), 144);
    assert_eq!(l.columns.len(), 23);
    assert!(l.scaling > 0.0);
    for a in [0.3, 5.0, 200.0] {
        let l = lattice(4, a);
        assert_eq!(l.len(), 16);
        assert_eq!(l.columns.len(), 7);
        assert!(l.scaling > 0.0);
    }
}

#[test]
fn small_n_rejected() {
    let spec = joint_spectrum(3, &SystemParams::new(1.0).unwrap()).unwrap();
    assert!(build_lattice(&spec).is_err());
}

#[test]
fn defect_at_fig1_parameters() {
    let l = lattice(12, 144.0 / 5.0);
    let sk = default_loop(&l, (0.0, 57.6)).unwrap();
    assert!(sk.encloses(0.0, 57.6));
    let m = transport_cell(&l, &sk).unwrap();
    assert_eq!(m.det(), 1);
    assert!(m.is_conjugate(&unipotent()), "got {m}");
    assert_eq!(m.parabolic_index().map(i64::abs), Some(1));
}

#[test]
fn default_loop_spans_central_columns() {
    let l = lattice(12, 144.0 / 5.0);
    let sk = default_loop(&l, (0.0, 57.6)).unwrap();
    assert!(
        sk.left() <= -4 && sk.right() >= 4,
        "columns {}..{}",
        sk.left(),
        sk.right()
    );
    assert_eq!(sk.waypoints.first(), sk.waypoints.last());
}

#[test]
fn regular_point_above_defect_free_lattice() {
    let l = lattice(12, 288.0);
    for center in [(0.0, 0.0), (0.0, 400.0)] {
        let sk = default_loop(&l, center).unwrap();
        assert!(transport_cell(&l, &sk).unwrap().is_identity());
        assert!(transport_cell(&l, &sk.reversed()).unwrap().is_identity());
    }
}

#[test]
fn absent_isolated_value_is_infeasible() {
    let l = lattice(12, 288.0);
    assert!(matches!(default_loop(&l, (0.0, 576.0)), Err(Error::InfeasibleLoop(_))));
}

#[test]
fn small_lattice_has_no_loop() {
    let l = lattice(4, 1000.0);
    assert!(matches!(default_loop(&l, (0.0, 0.0)), Err(Error::InfeasibleLoop(_))));
    let l = lattice(4, 1.0);
    assert!(loop_with_width(&l, (0.0, 2.0), 1).is_err());
}

#[test]
fn forward_then_backward_is_identity() {
    let l = lattice(12, 144.0 / 5.0);
    let sk = default_loop(&l, (0.0, 57.6)).unwrap();
    let both = sk.then(&sk.reversed()).unwrap();
    assert!(transport_cell(&l, &both).unwrap().is_identity());
}

#[test]
fn reversal_inverts() {
    let l = lattice(12, 144.0 / 5.0);
    for w in 1..=3 {
        let sk = loop_with_width(&l, (0.0, 57.6), w).unwrap();
        let f = transport_cell(&l, &sk).unwrap();
        let r = transport_cell(&l, &sk.reversed()).unwrap();
        assert_eq!(f.inverse().unwrap(), r, "w = {w}");
    }
}

#[test]
fn loop_size_does_not_matter() {
    let l = lattice(12, 144.0 / 5.0);
    let small = transport_cell(&l, &loop_with_width(&l, (0.0, 57.6), 1).unwrap()).unwrap();
    let large = transport_cell(&l, &loop_with_width(&l, (0.0, 57.6), 4).unwrap()).unwrap();
    assert!(small.is_conjugate(&large), "{small} vs {large}");
    assert!(!small.is_identity());
}

#[test]
fn regular_loops_are_trivial() {
    let a = 36.0;
    let l = lattice(12, a);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut done = 0;
    for _ in 0..400 {
        let column = rng.gen_range(-7i64..=7);
        let w = rng.gen_range(1i64..=2);
        let col = l.column(column).unwrap();
        let g = rng.gen_range(col[0]..col[col.len() - 1]);
        let Ok(sk) = loop_with_width(&l, (column as f64, g), w) else {
            continue;
        };
        if sk.encloses(0.0, 2.0 * a)
            || (sk.left() <= 0 && sk.right() >= 0 && sk.g_bottom <= 2.0 * a && sk.g_top >= 2.0 * a)
        {
            continue;
        }
        let m = transport_cell(&l, &sk).unwrap();
        assert!(m.is_identity(), "loop {:?} gave {m}", sk.waypoints);
        done += 1;
        if done == 5 {
            break;
        }
    }
    assert_eq!(done, 5);
}

#[test]
fn defect_iff_pinched_torus() {
    for a in [4.0, 36.0, 144.0 / 5.0, 288.0] {
        let params = SystemParams::new(a).unwrap();
        let pinched = classify_singular_point(12.0, &params).unwrap() == SingularPointKind::PinchedTorus;
        let l = lattice(12, a);
        let center = if pinched { (0.0, 2.0 * a) } else { (0.0, 0.0) };
        let m = transport_cell(&l, &default_loop(&l, center).unwrap()).unwrap();
        assert_eq!(!m.is_identity(), pinched, "a = {a}: {m}");
        if pinched {
            assert!(m.is_conjugate(&unipotent()));
        }
    }
}

#[test]
fn path_is_closed_and_connected() {
    let l = lattice(12, 144.0 / 5.0);
    let t = transport(&l, &default_loop(&l, (0.0, 57.6)).unwrap()).unwrap();
    let cells = &t.path.cells;
    assert!(t.path.closed);
    assert_eq!(cells.first().unwrap().anchor, cells.last().unwrap().anchor);
    assert_eq!(cells.len(), t.path.moves.len() + 1);
    for pair in cells.windows(2) {
        let (p, q) = (pair[0].anchor, pair[1].anchor);
        assert!((p.m - q.m).abs() <= 1);
    }
}

#[test]
fn every_width_detects_the_defect() {
    for n in [10i64, 16] {
        for frac in [0.1, 0.35] {
            let a = frac * (n * n) as f64;
            let l = lattice(n, a);
            for w in 1..=(n - 4) {
                let Ok(sk) = loop_with_width(&l, (0.0, 2.0 * a), w) else {
                    continue;
                };
                let m = transport_cell(&l, &sk).unwrap();
                assert!(m.is_conjugate(&unipotent()), "n = {n}, a = {a}, w = {w}: {m}");
                assert_eq!(transport_cell(&l, &sk.reversed()).unwrap(), m.inverse().unwrap());
            }
        }
    }
}
