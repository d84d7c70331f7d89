use super::{GroundStateError, Result};
use crate::correlator::ModelParams;
use crate::numerics::{integrate_finite, Tolerance};
use std::f64::consts::PI;

/// arcsin(ρ)/ρ − 1 for ρ ∈ [0, 1].
fn arcsin_ratio_minus_one(rho: f64) -> f64 {
    if rho < 1e-4 {
        let r2 = rho * rho;
        r2 / 6.0 + 3.0 * r2 * r2 / 40.0
    } else {
        rho.asin() / rho - 1.0
    }
}

/// Connected expectation ⟨1/|x(τ₁)| · 1/|x(τ₂)|⟩_c at the origin, zero
/// temperature, |τ₁ − τ₂| = `dtau_abs`.
///
/// With a² = ℏ/2MΩ and b = a²e^{−ΩΔτ} this is
/// 1/b − (2/πb)·arctan√(a⁴/b² − 1) − 2/(πa²), evaluated as
/// (2/πa²)·(arcsin(ρ)/ρ − 1) with ρ = b/a² so that it decays without
/// cancellation.
pub fn zero_t_connected_coulomb_pair(omega: f64, dtau_abs: f64, params: &ModelParams) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(GroundStateError::InvalidInput("omega must be positive and finite"));
    }
    if !(dtau_abs >= 0.0) {
        return Err(GroundStateError::InvalidInput("dtau_abs must be non-negative"));
    }
    let a2 = params.hbar / (2.0 * params.mass * omega);
    let rho = (-omega * dtau_abs).exp();
    Ok(2.0 / (PI * a2) * arcsin_ratio_minus_one(rho))
}

/// ∫₀^{ℏβ}∫₀^{ℏβ} dτ₁dτ₂ of [`zero_t_connected_coulomb_pair`] in closed form,
/// valid for ℏβΩ ≥ 5.
///
/// With x = ℏβΩ and α = (1 − √(1−e^{−2x}))/(1 + √(1−e^{−2x})):
///
/// ```text
/// (4M/ℏΩ)·{ eˣ − 1 − x − x²/π − (2/π)[ eˣ·arcsin√(1−e^{−2x}) + ½ln α − ⅛ln²α − ½∫_α^1 ln u/(1+u) du ] }
/// ```
///
/// The eˣ terms cancel analytically to (2/π)·arcsin(e^{−x})·eˣ; the integral
/// is done numerically after u = e^{−t}.
pub fn ccc_double_time_integral(beta: f64, omega: f64, params: &ModelParams) -> Result<f64> {
    if !(beta > 0.0 && omega > 0.0 && beta.is_finite() && omega.is_finite()) {
        return Err(GroundStateError::InvalidInput("beta and omega must be positive and finite"));
    }
    let x = params.hbar * beta * omega;
    if x < 5.0 {
        return Err(GroundStateError::InvalidInput("the closed form requires hbar*beta*omega >= 5"));
    }
    let rho = (-x).exp();
    let s = (-(-2.0 * x).exp_m1()).sqrt();
    let ln_alpha = -2.0 * x - 2.0 * s.ln_1p();
    let log_integral = integrate_finite(
        |t| {
            let e = (-t).exp();
            -t * e / (1.0 + e)
        },
        0.0,
        -ln_alpha,
        Tolerance::INNER.scaled(1e-3),
    )?;
    let braces = 2.0 / PI * (arcsin_ratio_minus_one(rho) + 1.0)
        - 1.0
        - x
        - x * x / PI
        - 2.0 / PI * (0.5 * ln_alpha - 0.125 * ln_alpha * ln_alpha - 0.5 * log_integral);
    Ok(4.0 * params.mass / (params.hbar * omega) * braces)
}
