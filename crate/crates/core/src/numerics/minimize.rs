//! Derivative-free minimization: golden section in 1D, Nelder–Mead in 2D.

use super::{finite_difference, Bracket, DerivativeOrder, NumericsError, Result, Tolerance};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimumScalar {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for the minimizer of a unimodal `h`.
///
/// Exact ties between the two probes keep the lower one. A minimizer that
/// ends up against either end of the bracket is reported as
/// [`NumericsError::MinimumAtEdge`] so the caller can widen the bracket.
pub fn minimize_scalar<H: FnMut(f64) -> f64>(mut h: H, bracket: Bracket, tol: Tolerance) -> Result<MinimumScalar> {
    let (lo, hi) = (bracket.lo, bracket.hi);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (h(c), h(d));
    let mut touched_lo = false;
    let mut touched_hi = false;
    for _ in 0..tol.max_subdivisions.max(200) {
        if b - a <= tol.budget(0.5 * (a + b)) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = h(d);
        }
        touched_lo = a == lo;
        touched_hi = b == hi;
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    if !value.is_finite() {
        return Err(NumericsError::NonFinite { at: x });
    }
    if touched_lo || touched_hi {
        return Err(NumericsError::MinimumAtEdge { x, value, lo, hi });
    }
    Ok(MinimumScalar { x, value })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum2d {
    pub point: (f64, f64),
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
}

fn nelder_mead<H: FnMut(f64, f64) -> f64>(
    h: &mut H,
    start: [f64; 2],
    tol: Tolerance,
    iterations: &mut usize,
) -> ([f64; 2], f64, bool) {
    let step = |v: f64| if v != 0.0 { 0.05 * v } else { 2.5e-4 };
    let mut simplex = [start, [start[0] + step(start[0]), start[1]], [start[0], start[1] + step(start[1])]];
    let mut values = simplex.map(|p| h(p[0], p[1]));
    loop {
        // Stable sort keeps the earlier vertex first on ties.
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        let diameter = simplex[1..]
            .iter()
            .map(|p| (p[0] - simplex[0][0]).abs().max((p[1] - simplex[0][1]).abs()))
            .fold(0.0, f64::max);
        let scale = simplex[0][0].abs().max(simplex[0][1].abs());
        if diameter <= tol.abs_tol + tol.rel_tol * scale {
            return (simplex[0], values[0], true);
        }
        if *iterations >= tol.max_subdivisions {
            return (simplex[0], values[0], false);
        }
        *iterations += 1;
        let centroid = [0.5 * (simplex[0][0] + simplex[1][0]), 0.5 * (simplex[0][1] + simplex[1][1])];
        let along =
            |t: f64| [centroid[0] + t * (simplex[2][0] - centroid[0]), centroid[1] + t * (simplex[2][1] - centroid[1])];
        let reflected = along(-1.0);
        let fr = h(reflected[0], reflected[1]);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = h(expanded[0], expanded[1]);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
            continue;
        }
        if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
            continue;
        }
        let (contracted, fcontr) = if fr < values[2] {
            let p = along(-0.5);
            (p, h(p[0], p[1]))
        } else {
            let p = along(0.5);
            (p, h(p[0], p[1]))
        };
        if fcontr < values[2].min(fr) {
            simplex[2] = contracted;
            values[2] = fcontr;
            continue;
        }
        for k in 1..3 {
            simplex[k] = [
                simplex[0][0] + 0.5 * (simplex[k][0] - simplex[0][0]),
                simplex[0][1] + 0.5 * (simplex[k][1] - simplex[0][1]),
            ];
            values[k] = h(simplex[k][0], simplex[k][1]);
        }
    }
}

/// Nelder–Mead descent from `start`, restarted from the best vertex until a
/// restart no longer moves it.
///
/// The result must be stationary: the central-difference gradient norm has
/// to fall below `sqrt(max(abs_tol, rel_tol))·(1 + |h*|)`. Otherwise, or when
/// `max_subdivisions` simplex iterations are exhausted, the best point is
/// returned inside [`NumericsError::IterationCap`].
pub fn minimize_2d<H: FnMut(f64, f64) -> f64>(mut h: H, start: (f64, f64), tol: Tolerance) -> Result<Minimum2d> {
    let mut iterations = 0;
    let mut best = [start.0, start.1];
    let mut value = h(best[0], best[1]);
    let mut converged = false;
    for _ in 0..8 {
        let (p, v, ok) = nelder_mead(&mut h, best, tol, &mut iterations);
        let moved = (p[0] - best[0]).abs().max((p[1] - best[1]).abs());
        let settled = moved <= tol.abs_tol + tol.rel_tol * p[0].abs().max(p[1].abs());
        if v <= value {
            best = p;
            value = v;
        }
        converged = ok;
        if !ok || settled {
            break;
        }
    }
    let step = |v: f64| if v != 0.0 { 1e-6 * v.abs() } else { 1e-8 };
    let gx = finite_difference(|x| h(x, best[1]), best[0], DerivativeOrder::First, Some(step(best[0])));
    let gy = finite_difference(|y| h(best[0], y), best[1], DerivativeOrder::First, Some(step(best[1])));
    let gradient_norm = gx.hypot(gy);
    let gtol = tol.abs_tol.max(tol.rel_tol).sqrt() * (1.0 + value.abs());
    if !converged || !(gradient_norm <= gtol) {
        return Err(NumericsError::IterationCap { best: (best[0], best[1]), value, gradient_norm, iterations });
    }
    Ok(Minimum2d { point: (best[0], best[1]), value, gradient_norm, iterations })
}
