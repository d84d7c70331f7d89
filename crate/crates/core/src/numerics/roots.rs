//! Bracketed root refinement (Brent's method).

use super::{Bracket, NumericsError, Result, Tolerance};

/// Root of `g` inside `bracket`, refined until the enclosing interval is
/// narrower than `abs_tol + rel_tol·|x|`.
///
/// A bracket without a sign change yields [`NumericsError::NoSignChange`],
/// which callers use to switch to a different stationarity condition.
pub fn find_root<G: FnMut(f64) -> f64>(mut g: G, bracket: Bracket, tol: Tolerance) -> Result<f64> {
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (g(a), g(b));
    if !fa.is_finite() {
        return Err(NumericsError::NonFinite { at: a });
    }
    if !fb.is_finite() {
        return Err(NumericsError::NonFinite { at: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoSignChange { lo: a, hi: b, g_lo: fa, g_hi: fb });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..tol.max_subdivisions.max(100) {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.budget(b);
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b);
        if !fb.is_finite() {
            return Err(NumericsError::NonFinite { at: b });
        }
    }
    Err(NumericsError::RootIterationCap { best: b, value: fb })
}
