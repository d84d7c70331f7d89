//! First- and second-order effective classical potentials W₁, W₂.

use super::expectations::{connected_coulomb_pair, coulomb_smeared};
use super::{CoulombError, Result, TrialFrequencies};
use crate::correlator::{CorrelatorSet, ModelParams, ThermalState};
use crate::numerics::{self, Tolerance};
use crate::smearing::AnisotropicKernel3D;
use std::f64::consts::PI;

const LAMBDA_TOL: Tolerance = Tolerance { abs_tol: 1e-15, rel_tol: 1e-12, max_subdivisions: 200 };
const TIME_TOL: Tolerance = Tolerance { abs_tol: 1e-13, rel_tol: 1e-10, max_subdivisions: 400 };

/// Truncation order of the variational expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    First,
    Second,
}

impl Order {
    pub fn as_u8(self) -> u8 {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }
}

impl TryFrom<u8> for Order {
    type Error = CoulombError;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            _ => Err(CoulombError::InvalidInput("order must be 1 or 2")),
        }
    }
}

// log(sinh y / y) without overflow or cancellation.
fn log_sinhc(y: f64) -> f64 {
    if y < 0.1 {
        let y2 = y * y;
        y2 * (1.0 / 6.0 + y2 * (-1.0 / 180.0 + y2 * (1.0 / 2835.0 + y2 * (-1.0 / 37800.0 + y2 / 467_775.0))))
    } else if y > 20.0 {
        y - (2.0 * y).ln() + (-(-2.0 * y).exp()).ln_1p()
    } else {
        (y.sinh() / y).ln()
    }
}

/// Local harmonic free energy of the three trial oscillators.
fn free_energy(f: TrialFrequencies, thermal: ThermalState, params: &ModelParams) -> f64 {
    match thermal {
        ThermalState::Finite { beta } => {
            let half = 0.5 * params.hbar * beta;
            (2.0 * log_sinhc(half * f.omega_t) + log_sinhc(half * f.omega_l)) / beta
        }
        ThermalState::ZeroTemperature => 0.5 * params.hbar * (2.0 * f.omega_t + f.omega_l),
    }
}

fn check_r0(r0: f64) -> Result<()> {
    if r0 >= 0.0 && r0.is_finite() {
        Ok(())
    } else {
        Err(CoulombError::InvalidInput("r0 must be non-negative and finite"))
    }
}

/// W₁ = F_harm − (M/2)(2Ω_T²a_T² + Ω_L²a_L²) − e²⟨1/r⟩.
pub fn w1(r0: f64, f: TrialFrequencies, thermal: ThermalState, params: &ModelParams) -> Result<f64> {
    check_r0(r0)?;
    let cs = CorrelatorSet::new(f.omega_t, f.omega_l, thermal, *params)?;
    let (at, al) = (cs.a2_t(), cs.a2_l());
    let harmonic = 0.5 * params.mass * (2.0 * f.omega_t.powi(2) * at + f.omega_l.powi(2) * al);
    Ok(free_energy(f, thermal, params) - harmonic - params.e2 * coulomb_smeared(r0, at, al)?)
}

/// Two-time kernel of the correlator set at separation Δτ.
pub fn kernel_at(cs: &CorrelatorSet, r0: f64, dtau: f64) -> Result<AnisotropicKernel3D> {
    Ok(AnisotropicKernel3D::new(r0, cs.a2_t(), cs.a2_l(), cs.a2_t_at(dtau)?, cs.a2_l_at(dtau)?)?)
}

// Panel boundaries in t = √Δτ for ∫₀^end dΔτ.
fn time_breaks(f: TrialFrequencies, end: f64) -> Vec<f64> {
    let fast = 1.0 / f.omega_t.max(f.omega_l);
    let slow = 1.0 / f.omega_t.min(f.omega_l);
    let mut points = vec![0.0];
    for p in [fast / 16.0, fast / 4.0, fast, slow, 4.0 * slow, 16.0 * slow] {
        if p < end && p > *points.last().unwrap() {
            points.push(p);
        }
    }
    points.push(end);
    points.into_iter().map(f64::sqrt).collect()
}

/// ∫∫dτ₁dτ₂ of the connected Coulomb pair over the imaginary-time square
/// [0, ℏβ]², divided by ℏβ; at zero temperature the limit 2∫₀^∞dΔτ.
///
/// Time-translation invariance reduces the double integral to
/// ∫₀^{ℏβ}dΔτ and the reflection Δτ → ℏβ − Δτ to 2∫₀^{ℏβ/2}dΔτ.
pub fn connected_time_integral(
    r0: f64,
    f: TrialFrequencies,
    thermal: ThermalState,
    params: &ModelParams,
) -> Result<f64> {
    check_r0(r0)?;
    let cs = CorrelatorSet::new(f.omega_t, f.omega_l, thermal, *params)?;
    // Δτ = t²: the pair expectation has a √Δτ cusp at coincident times.
    let conn = |t: f64| -> Result<f64> { Ok(2.0 * t * connected_coulomb_pair(&kernel_at(&cs, r0, t * t)?)?) };
    match thermal {
        ThermalState::Finite { beta } => {
            let half = 0.5 * params.hbar * beta;
            let v: f64 = numerics::quadrature_try(conn, &time_breaks(f, half), TIME_TOL)?;
            Ok(2.0 * v)
        }
        ThermalState::ZeroTemperature => {
            // The connected pair decays as e^{−2Ω_min·Δτ}; past 20/Ω_min it is
            // below double-precision resolution of the two terms it is built from.
            let end = 20.0 / f.omega_t.min(f.omega_l);
            let v: f64 = numerics::quadrature_try(conn, &time_breaks(f, end), TIME_TOL)?;
            Ok(2.0 * v)
        }
    }
}

/// The four pieces of W₂ = `first` + `mixed` − `harmonic` − `coulomb`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct W2Terms {
    /// W₁.
    pub first: f64,
    /// e²-weighted λ-integral over the l⁴ widths times the fluctuation square.
    pub mixed: f64,
    /// M²(2Ω_T³l_T⁴ + Ω_L³l_L⁴)/4ℏ.
    pub harmonic: f64,
    /// (e⁴/2ℏ²β)∬dτ₁dτ₂⟨1/r·1/r⟩_c.
    pub coulomb: f64,
}

impl W2Terms {
    pub fn total(&self) -> f64 {
        self.first + self.mixed - self.harmonic - self.coulomb
    }
}

/// The separate contributions to W₂.
pub fn w2_terms(r0: f64, f: TrialFrequencies, thermal: ThermalState, params: &ModelParams) -> Result<W2Terms> {
    let first = w1(r0, f, thermal, params)?;
    let cs = CorrelatorSet::new(f.omega_t, f.omega_l, thermal, *params)?;
    let (at, al) = (cs.a2_t(), cs.a2_l());
    let (lt, ll) = (cs.l4_t(), cs.l4_l());
    let ModelParams { hbar, mass, e2 } = *params;
    let (wt, wl) = (f.omega_t, f.omega_l);

    let c = r0 * r0 / (2.0 * al);
    let d = at - al;
    let integrand = |l: f64| {
        let l2 = l * l;
        let den = d * l2 + al;
        let g = 2.0 * wt * lt * l2 / (den * den) - wl * ll * (r0 * r0 * l2 * l2 - al * l2) / (al * al * den);
        g * (-c * l2).exp()
    };
    let lambda = numerics::integrate_finite(integrand, 0.0, 1.0, LAMBDA_TOL)?;
    Ok(W2Terms {
        first,
        mixed: e2 * mass / (2.0 * hbar) * (2.0 * al / PI).sqrt() * lambda,
        harmonic: mass * mass * (2.0 * wt.powi(3) * lt + wl.powi(3) * ll) / (4.0 * hbar),
        coulomb: e2 * e2 / (2.0 * hbar) * connected_time_integral(r0, f, thermal, params)?,
    })
}

/// W₂ = W₁ + the l⁴ λ-integral term − M²(2Ω_T³l_T⁴ + Ω_L³l_L⁴)/4ℏ
/// − (e⁴/2ℏ²β)∬dτ₁dτ₂⟨1/r·1/r⟩_c.
pub fn w2(r0: f64, f: TrialFrequencies, thermal: ThermalState, params: &ModelParams) -> Result<f64> {
    w2_terms(r0, f, thermal, params).map(|t| t.total())
}

/// W₁ or W₂ by order.
pub fn w_order(order: Order, r0: f64, f: TrialFrequencies, thermal: ThermalState, params: &ModelParams) -> Result<f64> {
    match order {
        Order::First => w1(r0, f, thermal, params),
        Order::Second => w2(r0, f, thermal, params),
    }
}

/// Zero-temperature value estimated from finite β.
///
/// At large β the potentials approach their limit as
/// W(β) = W(∞) + (A·ln β + B)/β + O(β⁻²): the ln β/β piece comes from the
/// oscillator free energy. Evaluating at β, 2β and 4β and eliminating A and
/// B gives W(∞) up to O(β⁻²).
pub fn zero_temperature_extrapolation(
    order: Order,
    r0: f64,
    f: TrialFrequencies,
    beta: f64,
    params: &ModelParams,
) -> Result<f64> {
    let at = |b: f64| w_order(order, r0, f, ThermalState::finite(b)?, params);
    let (w1, w2, w4) = (at(beta)?, at(2.0 * beta)?, at(4.0 * beta)?);
    // g(β) = β·(W(β) − E) = A ln β + B satisfies g(β) − 2g(2β) + g(4β) = 0.
    Ok(w1 - 4.0 * w2 + 4.0 * w4)
}
