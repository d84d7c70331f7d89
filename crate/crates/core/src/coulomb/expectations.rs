//! Smeared Coulomb expectations from the proper-time representation
//! 1/r = (2/√π)∫₀^∞ dk e^{−k²r²}.

use super::{CoulombError, Result};
use crate::numerics::{self, SemiInfiniteMap, Tolerance};
use crate::smearing::{AnisotropicKernel3D, Channel};
use std::f64::consts::PI;

const LAMBDA_TOL: Tolerance = Tolerance { abs_tol: 1e-15, rel_tol: 1e-12, max_subdivisions: 200 };
const PAIR_TOL: Tolerance = Tolerance { abs_tol: 1e-14, rel_tol: 1e-11, max_subdivisions: 300 };

/// Relative two-time determinant 1 − a⁴₁₂/a⁴ below which both channels are
/// treated as coincident times.
pub const EQUAL_TIME_THRESHOLD: f64 = 1e-10;

// ∫₀¹ dλ g(λ)·exp(−r₀²λ²/2a_L²) with panel boundaries adapted to the
// Gaussian decay.
fn lambda_integral<G: Fn(f64) -> f64>(r0: f64, a2_l: f64, g: G) -> Result<f64> {
    let c = r0 * r0 / (2.0 * a2_l);
    let mut points = vec![0.0];
    if c > 1.0 {
        let width = 1.0 / c.sqrt();
        for m in [0.5, 1.5, 3.0, 6.0] {
            if m * width < 1.0 {
                points.push(m * width);
            }
        }
    }
    points.push(1.0);
    let f = |l: f64| {
        let e = (-c * l * l).exp();
        if e == 0.0 {
            0.0
        } else {
            g(l) * e
        }
    };
    Ok(numerics::integrate_with_breaks(f, &points, LAMBDA_TOL)?)
}

fn validate_widths(r0: f64, a2_t: f64, a2_l: f64) -> Result<()> {
    if a2_t > 0.0 && a2_l > 0.0 && a2_t.is_finite() && a2_l.is_finite() && r0 >= 0.0 && r0.is_finite() {
        Ok(())
    } else {
        Err(CoulombError::InvalidInput("widths must be positive and r0 non-negative"))
    }
}

/// ⟨1/r⟩ = √(2a_L²/π)·∫₀¹dλ exp(−r₀²λ²/2a_L²)/[(a_T²−a_L²)λ² + a_L²].
pub fn coulomb_smeared(r0: f64, a2_t: f64, a2_l: f64) -> Result<f64> {
    validate_widths(r0, a2_t, a2_l)?;
    let d = a2_t - a2_l;
    let v = lambda_integral(r0, a2_l, |l| 1.0 / (d * l * l + a2_l))?;
    Ok((2.0 * a2_l / PI).sqrt() * v)
}

/// ⟨(1/r(τ₁))·[δx(τ₂)]²_{T|L}⟩ as a single λ-integral.
pub fn coulomb_times_fluct_square(channel: Channel, k: &AnisotropicKernel3D) -> Result<f64> {
    validate_widths(k.r0, k.a2_t, k.a2_l)?;
    let (at, al, r0) = (k.a2_t, k.a2_l, k.r0);
    let d = at - al;
    let v = match channel {
        Channel::Transverse => {
            let bt2 = k.a2_t12 * k.a2_t12;
            lambda_integral(r0, al, |l| {
                let den = d * l * l + al;
                2.0 * at / den - 2.0 * bt2 * l * l / (den * den)
            })?
        }
        Channel::Longitudinal => {
            let bl2 = k.a2_l12 * k.a2_l12;
            lambda_integral(r0, al, |l| {
                let l2 = l * l;
                let den = d * l2 + al;
                (al * al * al + bl2 * (r0 * r0 * l2 * l2 - al * l2)) / (al * al * den)
            })?
        }
    };
    Ok((2.0 * al / PI).sqrt() * v)
}

/// ⟨1/r²⟩ at a single time: ∫₀^∞ds exp(−s r₀²/(1+2sa_L²))/[(1+2sa_T²)√(1+2sa_L²)].
pub fn inverse_square_smeared(r0: f64, a2_t: f64, a2_l: f64) -> Result<f64> {
    validate_widths(r0, a2_t, a2_l)?;
    let f = |s: f64| {
        let bl = 1.0 + 2.0 * s * a2_l;
        (-s * r0 * r0 / bl).exp() / ((1.0 + 2.0 * s * a2_t) * bl.sqrt())
    };
    Ok(numerics::integrate_semi_infinite_mapped(f, SemiInfiniteMap::Quadratic { scale: 1.0 / a2_l }, PAIR_TOL)?)
}

// ∫₀^{z_max} e^{−Kz²}/(1 + Qz²) dz, with 1 + Q·z_max² > 0.
fn reduced_inner(z_max: f64, k: f64, q: f64) -> Result<f64> {
    if k * z_max * z_max < 1e-300 {
        let t = q * z_max * z_max;
        return Ok(if t.abs() < 1e-6 {
            z_max * (1.0 - t / 3.0 + t * t / 5.0)
        } else if q > 0.0 {
            (q.sqrt() * z_max).atan() / q.sqrt()
        } else {
            ((-q).sqrt() * z_max).atanh() / (-q).sqrt()
        });
    }
    let top = z_max.min((45.0 / k).sqrt());
    let f = |z: f64| (-k * z * z).exp() / (1.0 + q * z * z);
    Ok(numerics::integrate_finite(f, 0.0, top, PAIR_TOL)?)
}

/// ⟨1/r(τ₁)·1/r(τ₂)⟩ for a two-time kernel.
///
/// The double proper-time integral is reduced analytically in the second
/// variable, leaving a bounded one-dimensional integrand that is either in
/// closed form (r₀ = 0) or a short smooth quadrature. Kernels whose two
/// channels are both within [`EQUAL_TIME_THRESHOLD`] of coincidence use
/// the equal-time limit [`inverse_square_smeared`].
pub fn coulomb_pair(k: &AnisotropicKernel3D) -> Result<f64> {
    validate_widths(k.r0, k.a2_t, k.a2_l)?;
    let (ct, cl) = k.correlations();
    if 1.0 - ct < EQUAL_TIME_THRESHOLD && 1.0 - cl < EQUAL_TIME_THRESHOLD {
        return inverse_square_smeared(k.r0, k.a2_t, k.a2_l);
    }
    let (at, al, bt, bl, r0) = (k.a2_t, k.a2_l, k.a2_t12, k.a2_l12, k.r0);
    let integrand = |s1: f64| -> Result<f64> {
        let a1 = at + 2.0 * s1;
        let b1 = al + 2.0 * s1;
        let y0 = b1 * al - bl * bl;
        let z_max = 1.0 / y0.sqrt();
        let kk = r0 * r0 * (b1 - bl).powi(2) / (2.0 * b1);
        let q = b1 * (at - al) - b1 * bt * bt / a1 + bl * bl;
        let pre = (-r0 * r0 / (2.0 * b1)).exp() / a1;
        if pre == 0.0 {
            return Ok(0.0);
        }
        Ok(pre * reduced_inner(z_max, kk, q)?)
    };
    let v: f64 = numerics::quadrature_try_semi_infinite(integrand, SemiInfiniteMap::Quadratic { scale: al }, PAIR_TOL)?;
    Ok(2.0 / PI * v)
}

/// Reference evaluation of [`coulomb_pair`] by direct iterated quadrature
/// of the double proper-time integral. Slow; intended for cross-checks.
pub fn coulomb_pair_direct(k: &AnisotropicKernel3D, tol: Tolerance) -> Result<f64> {
    validate_widths(k.r0, k.a2_t, k.a2_l)?;
    let (at, al, bt, bl, r0) = (k.a2_t, k.a2_l, k.a2_t12, k.a2_l12, k.r0);
    let f = |s1: f64, s2: f64| {
        let dt = (at + 2.0 * s1) * (at + 2.0 * s2) - bt * bt;
        let dl = (al + 2.0 * s1) * (al + 2.0 * s2) - bl * bl;
        (-r0 * r0 * (al + s1 + s2 - bl) / dl).exp() / (dt * dl.sqrt())
    };
    let axis = numerics::Axis::SemiInfinite { map: SemiInfiniteMap::Quadratic { scale: al } };
    let v = numerics::integrate_2d(f, numerics::Domain2d { x: axis, y: axis }, tol)?;
    Ok(2.0 / PI * v)
}

/// Connected part ⟨1/r(τ₁)·1/r(τ₂)⟩ − ⟨1/r⟩².
pub fn connected_coulomb_pair(k: &AnisotropicKernel3D) -> Result<f64> {
    let single = coulomb_smeared(k.r0, k.a2_t, k.a2_l)?;
    Ok(coulomb_pair(k)? - single * single)
}
