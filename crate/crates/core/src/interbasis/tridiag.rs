//! Eigenvalues of real symmetric tridiagonal matrices by Sturm-sequence
//! bisection, polished with Newton steps on the characteristic polynomial.

/// Rescale the polynomial recurrence when values leave this window.
const RESCALE_HI: f64 = 1e150;
const RESCALE_LO: f64 = 1e-150;

/// Number of eigenvalues strictly below `x`, counted from the signs of the
/// LDL^T pivots.
pub fn sturm_count(diag: &[f64], offdiag: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        let coupling = if i == 0 { 0.0 } else { offdiag[i - 1] * offdiag[i - 1] };
        q = (d - x) - coupling / q;
        if q == 0.0 {
            // nudge off the exact zero pivot, as if x were slightly larger
            q = -f64::EPSILON * (d.abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Characteristic polynomial `det(T - x)` and its derivative, returned as
/// the Newton correction `p / p'`. Scaling is shared by both values so the
/// ratio is unaffected by rescaling.
pub fn newton_correction(diag: &[f64], offdiag: &[f64], x: f64) -> Option<f64> {
    // p_{-1} = 0, p_0 = 1
    let (mut p_prev, mut p) = (0.0_f64, 1.0_f64);
    let (mut dp_prev, mut dp) = (0.0_f64, 0.0_f64);
    for (i, &d) in diag.iter().enumerate() {
        let e2 = if i == 0 { 0.0 } else { offdiag[i - 1] * offdiag[i - 1] };
        let p_next = (d - x) * p - e2 * p_prev;
        let dp_next = -p + (d - x) * dp - e2 * dp_prev;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
        let mag = p.abs().max(dp.abs());
        if mag > RESCALE_HI || (mag < RESCALE_LO && mag > 0.0) {
            let s = 1.0 / mag;
            p *= s;
            dp *= s;
            p_prev *= s;
            dp_prev *= s;
        }
    }
    if dp == 0.0 || !dp.is_finite() || !p.is_finite() {
        return None;
    }
    Some(p / dp)
}

/// Gershgorin interval containing every eigenvalue.
pub fn gershgorin_bounds(diag: &[f64], offdiag: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// All eigenvalues, ascending.
pub fn symmetric_tridiagonal_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert_eq!(offdiag.len(), n.saturating_sub(1), "off-diagonal length must be n - 1");
    match n {
        0 => return Vec::new(),
        1 => return vec![diag[0]],
        _ => {}
    }
    let (glo, ghi) = gershgorin_bounds(diag, offdiag);
    let pad = 1e-12 * glo.abs().max(ghi.abs()).max(1.0);
    let (glo, ghi) = (glo - pad, ghi + pad);

    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        // invariant: count(lo) <= k < count(hi)
        let mut lo = values.last().copied().map_or(glo, |v: f64| v.max(glo) - pad);
        let mut hi = ghi;
        if sturm_count(diag, offdiag, lo) > k {
            lo = glo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let floor = 1e-13 * mid.abs().max(1.0);
            if hi - lo <= floor || mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(diag, offdiag, mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..3 {
            match newton_correction(diag, offdiag, x) {
                Some(step) if (x - step) > lo && (x - step) < hi => x -= step,
                _ => break,
            }
        }
        values.push(x);
    }
    values
}
