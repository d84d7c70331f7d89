//! Globally adaptive 21-point Gauss–Kronrod quadrature.

use super::{NumericsError, Result, Tolerance};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600311669426,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Value of an integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    resabs: f64,
}

fn checked<E: From<NumericsError>>(x: f64, y: f64) -> std::result::Result<f64, E> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(NumericsError::NonFinite { at: x }.into())
    }
}

fn gk21<E, F>(f: &mut F, a: f64, b: f64) -> std::result::Result<Panel, E>
where
    E: From<NumericsError>,
    F: FnMut(f64) -> std::result::Result<f64, E>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = checked(center, f(center)?)?;
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let f1 = checked(x1, f(x1)?)?;
        let f2 = checked(x2, f(x2)?)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Panel { a, b, value, error, resabs })
}

/// Adaptive integration over `[points[0], points[last]]` with the interior
/// points used as initial panel boundaries. The integrand may fail.
pub(crate) fn try_integrate_with_breaks<E, F>(
    mut f: F,
    points: &[f64],
    tol: Tolerance,
) -> std::result::Result<Estimate, E>
where
    E: From<NumericsError>,
    F: FnMut(f64) -> std::result::Result<f64, E>,
{
    let mut panels: Vec<Panel> = Vec::with_capacity(points.len() + tol.max_subdivisions);
    for w in points.windows(2) {
        if w[1] > w[0] {
            panels.push(gk21(&mut f, w[0], w[1])?);
        }
    }
    let mut evaluations = 21 * panels.len();
    if panels.is_empty() {
        return Ok(Estimate { value: 0.0, error: 0.0, evaluations });
    }
    let mut bisections = 0;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let resabs: f64 = panels.iter().map(|p| p.resabs).sum();
        let roundoff = 100.0 * f64::EPSILON * resabs;
        if error <= tol.budget(value).max(roundoff) {
            return Ok(Estimate { value, error, evaluations });
        }
        let (worst, _) =
            panels
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if bisections >= tol.max_subdivisions || mid <= a || mid >= b {
            return Err(NumericsError::QuadratureNotConverged {
                estimate: value,
                error_bound: error,
                subdivisions: bisections,
            }
            .into());
        }
        let left = gk21(&mut f, a, mid)?;
        let right = gk21(&mut f, mid, b)?;
        evaluations += 42;
        bisections += 1;
        panels[worst] = left;
        panels.insert(worst + 1, right);
    }
}

/// ∫ₐᵇ f with error at most `max(abs_tol, rel_tol·|I|)` for integrands that
/// are smooth apart from integrable endpoint singularities.
pub fn integrate_finite<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    integrate_finite_estimate(&mut f, a, b, tol).map(|e| e.value)
}

/// As [`integrate_finite`], returning the error estimate as well.
pub fn integrate_finite_estimate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if !(a <= b) {
        return Err(NumericsError::InvalidBracket { lo: a, hi: b });
    }
    try_integrate_with_breaks(|x| Ok::<f64, NumericsError>(f(x)), &[a, b], tol)
}

/// ∫ over `[points[0], points[last]]`, starting from the panels delimited by
/// `points` so that kinks at known locations sit on panel boundaries.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], tol: Tolerance) -> Result<f64> {
    if points.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(NumericsError::InvalidBracket {
            lo: points.first().copied().unwrap_or(f64::NAN),
            hi: points.last().copied().unwrap_or(f64::NAN),
        });
    }
    try_integrate_with_breaks(|x| Ok::<f64, NumericsError>(f(x)), points, tol).map(|e| e.value)
}

/// Change of variable that maps `[0, ∞)` onto `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SemiInfiniteMap {
    /// σ = s₀·u/(1−u). Suited to exponential decay and power decay faster than σ⁻².
    Rational { scale: f64 },
    /// σ = s₀·(1/(1−w)² − 1). Keeps σ^(−3/2)-type tails smooth in w.
    Quadratic { scale: f64 },
}

impl SemiInfiniteMap {
    fn point(&self, u: f64) -> (f64, f64) {
        match *self {
            SemiInfiniteMap::Rational { scale } => {
                let v = 1.0 - u;
                (scale * u / v, scale / (v * v))
            }
            SemiInfiniteMap::Quadratic { scale } => {
                let v = 1.0 - u;
                let inv = 1.0 / (v * v);
                (scale * (inv - 1.0), 2.0 * scale * inv / v)
            }
        }
    }
}

pub(crate) fn try_integrate_semi_infinite_mapped<E, F>(
    mut f: F,
    map: SemiInfiniteMap,
    tol: Tolerance,
) -> std::result::Result<Estimate, E>
where
    E: From<NumericsError>,
    F: FnMut(f64) -> std::result::Result<f64, E>,
{
    let mut mapped = |u: f64| {
        let (sigma, jac) = map.point(u);
        let v = f(sigma)?;
        Ok(if v == 0.0 { 0.0 } else { v * jac })
    };
    match try_integrate_with_breaks(&mut mapped, &[0.0, 0.5, 1.0], tol) {
        Ok(e) => Ok(e),
        Err(err) => {
            // Separate genuine divergence from slow convergence by watching
            // how the integral over [0, 1−10⁻ᵏ] grows with k.
            let mut partials = Vec::with_capacity(4);
            for k in 1..=4 {
                let top = 1.0 - 10f64.powi(-k);
                match try_integrate_with_breaks(&mut mapped, &[0.0, 0.5, top], tol) {
                    Ok(e) => partials.push(e.value),
                    Err(_) => return Err(err),
                }
            }
            let d1 = (partials[2] - partials[1]).abs();
            let d2 = (partials[3] - partials[2]).abs();
            if d2 > 0.5 * d1 && d2 > tol.budget(partials[3]) {
                Err(NumericsError::Divergent { partials }.into())
            } else {
                Err(err)
            }
        }
    }
}

/// ∫₀^∞ f through `u = σ/(σ+s₀)` with `s₀ = scale`.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(f: F, scale: f64, tol: Tolerance) -> Result<f64> {
    integrate_semi_infinite_mapped(f, SemiInfiniteMap::Rational { scale }, tol)
}

/// ∫₀^∞ f through the given compactifying map.
pub fn integrate_semi_infinite_mapped<F: FnMut(f64) -> f64>(
    mut f: F,
    map: SemiInfiniteMap,
    tol: Tolerance,
) -> Result<f64> {
    let scale = match map {
        SemiInfiniteMap::Rational { scale } | SemiInfiniteMap::Quadratic { scale } => scale,
    };
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(NumericsError::InvalidBracket { lo: 0.0, hi: scale });
    }
    try_integrate_semi_infinite_mapped(|x| Ok::<f64, NumericsError>(f(x)), map, tol).map(|e| e.value)
}

/// One axis of a 2D product domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    Finite { a: f64, b: f64 },
    SemiInfinite { map: SemiInfiniteMap },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain2d {
    pub x: Axis,
    pub y: Axis,
}

fn try_integrate_axis<E, F>(f: F, axis: Axis, tol: Tolerance) -> std::result::Result<Estimate, E>
where
    E: From<NumericsError>,
    F: FnMut(f64) -> std::result::Result<f64, E>,
{
    match axis {
        Axis::Finite { a, b } => try_integrate_with_breaks(f, &[a, b], tol),
        Axis::SemiInfinite { map } => try_integrate_semi_infinite_mapped(f, map, tol),
    }
}

/// Iterated ∫∫ f(x, y) dy dx. The outer layer runs at ten times the inner
/// tolerance; a failing inner integral reports the outer coordinate.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(f: F, domain: Domain2d, tol: Tolerance) -> Result<f64> {
    let outer = |x: f64| {
        try_integrate_axis(|y| Ok::<f64, NumericsError>(f(x, y)), domain.y, tol)
            .map(|e| e.value)
            .map_err(|e| NumericsError::InnerIntegralFailed { at: x, source: Box::new(e) })
    };
    try_integrate_axis(outer, domain.x, tol.scaled(10.0)).map(|e| e.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TOL: Tolerance = Tolerance::INNER;

    #[test]
    fn polynomial_and_constant() {
        assert_relative_eq!(integrate_finite(|x| x * x, 0.0, 1.0, TOL).unwrap(), 1.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(integrate_finite(|_| 1.0, 0.0, 1.0, TOL).unwrap(), 1.0, epsilon = 1e-14);
        assert_eq!(integrate_finite(|x| x, 2.0, 2.0, TOL).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_against_error_function() {
        let v = integrate_finite(|x| (-0.5 * x * x).exp(), 0.0, 1.0, TOL).unwrap();
        assert_relative_eq!(v, 0.855_624_391_892_148_7, epsilon = 1e-12);
    }

    #[test]
    fn odd_integrand_converges_to_zero() {
        let v = integrate_finite(|x| x * x * x, -1.0, 1.0, TOL).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn endpoint_singularity() {
        let v = integrate_finite(|x| x.ln(), 0.0, 1.0, TOL).unwrap();
        assert_relative_eq!(v, -1.0, epsilon = 1e-9);
        let v = integrate_finite(|x| 1.0 / x.sqrt(), 0.0, 1.0, TOL).unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn kink_with_break_point() {
        let v = integrate_with_breaks(|x: f64| (x - 0.3).abs(), &[0.0, 0.3, 1.0], TOL).unwrap();
        assert_relative_eq!(v, 0.5 * (0.09 + 0.49), epsilon = 1e-14);
    }

    #[test]
    fn semi_infinite_examples() {
        let v = integrate_semi_infinite(|s| (-s).exp(), 1.0, TOL).unwrap();
        assert_relative_eq!(v, 1.0, epsilon = 1e-10);
        let v = integrate_semi_infinite(|s| (1.0 + s).powi(-2), 1.0, TOL).unwrap();
        assert_relative_eq!(v, 1.0, epsilon = 1e-10);
        let v = integrate_semi_infinite(|s| (1.0 + 2.0 * s).powf(-1.5), 1.0, TOL).unwrap();
        assert_relative_eq!(v, 1.0, epsilon = 1e-8);
        let v = integrate_semi_infinite_mapped(
            |s| (1.0 + 2.0 * s).powf(-1.5),
            SemiInfiniteMap::Quadratic { scale: 1.0 },
            TOL,
        )
        .unwrap();
        assert_relative_eq!(v, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn divergence_is_detected() {
        let err = integrate_semi_infinite(|s| 1.0 / (1.0 + s), 1.0, TOL).unwrap_err();
        assert!(matches!(err, NumericsError::Divergent { .. }), "{err:?}");
    }

    #[test]
    fn non_convergence_carries_estimate() {
        let tight = Tolerance::new(0.0, 1e-15, 3).unwrap();
        let err = integrate_finite(|x| (50.0 * x).sin().abs(), 0.0, 1.0, tight).unwrap_err();
        match err {
            NumericsError::QuadratureNotConverged { estimate, .. } => assert!(estimate > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn double_integrals() {
        let unit = Domain2d { x: Axis::Finite { a: 0.0, b: 1.0 }, y: Axis::Finite { a: 0.0, b: 1.0 } };
        assert_relative_eq!(integrate_2d(|_, _| 1.0, unit, TOL).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(integrate_2d(|x, y| x * y, unit, TOL).unwrap(), 0.25, epsilon = 1e-12);
        let quadrant = Domain2d {
            x: Axis::SemiInfinite { map: SemiInfiniteMap::Rational { scale: 1.0 } },
            y: Axis::SemiInfinite { map: SemiInfiniteMap::Rational { scale: 1.0 } },
        };
        assert_relative_eq!(integrate_2d(|x, y| (-x - y).exp(), quadrant, TOL).unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn inner_failure_reports_slice() {
        let unit = Domain2d { x: Axis::Finite { a: 0.0, b: 1.0 }, y: Axis::Finite { a: 0.0, b: 1.0 } };
        let err = integrate_2d(|x, y| if x > 0.5 { f64::NAN } else { y }, unit, TOL).unwrap_err();
        match err {
            NumericsError::InnerIntegralFailed { at, .. } => assert!(at > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }
}
