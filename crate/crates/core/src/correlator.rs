//! Two-point functions of the trial oscillator with the zero mode removed.
//!
//! For inverse temperature β the periodic correlator of an oscillator of
//! frequency Ω, with its time average projected out, is
//!
//! ```text
//! a²(Δτ) = ℏ/(2MΩ) · [cosh(ΩΔτ − ℏβΩ/2)/sinh(ℏβΩ/2) − 2/(ℏβΩ)],   0 ≤ Δτ ≤ ℏβ.
//! ```
//!
//! Zero temperature is a separate state ([`ThermalState::ZeroTemperature`]),
//! never a large sentinel β.

use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrelatorError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("time difference {dtau} lies outside [0, {period}]")]
    DtauOutOfRange { dtau: f64, period: f64 },
    #[error("the zero Matsubara mode is excluded")]
    ZeroMode,
}

pub type Result<T> = std::result::Result<T, CorrelatorError>;

/// Physical constants ℏ, M and e². Defaults to atomic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub hbar: f64,
    pub mass: f64,
    pub e2: f64,
}

impl ModelParams {
    pub const ATOMIC: ModelParams = ModelParams { hbar: 1.0, mass: 1.0, e2: 1.0 };

    pub fn new(hbar: f64, mass: f64, e2: f64) -> Result<Self> {
        if [hbar, mass, e2].iter().all(|v| *v > 0.0 && v.is_finite()) {
            Ok(ModelParams { hbar, mass, e2 })
        } else {
            Err(CorrelatorError::InvalidParameter("hbar, mass and e2 must be positive and finite"))
        }
    }

    /// Me⁴/ℏ³.
    pub fn natural_frequency(&self) -> f64 {
        self.mass * self.e2 * self.e2 / self.hbar.powi(3)
    }

    /// Me⁴/ℏ² (the Hartree energy).
    pub fn natural_energy(&self) -> f64 {
        self.mass * self.e2 * self.e2 / (self.hbar * self.hbar)
    }

    /// ℏ²/Me² (the Bohr radius).
    pub fn natural_length(&self) -> f64 {
        self.hbar * self.hbar / (self.mass * self.e2)
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams::ATOMIC
    }
}

/// Inverse temperature, or the exact zero-temperature limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThermalState {
    Finite { beta: f64 },
    ZeroTemperature,
}

impl ThermalState {
    pub fn finite(beta: f64) -> Result<Self> {
        if beta > 0.0 && beta.is_finite() {
            Ok(ThermalState::Finite { beta })
        } else {
            Err(CorrelatorError::InvalidParameter("beta must be positive and finite"))
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match *self {
            ThermalState::Finite { beta } => Some(beta),
            ThermalState::ZeroTemperature => None,
        }
    }

    pub fn is_zero_temperature(&self) -> bool {
        matches!(self, ThermalState::ZeroTemperature)
    }
}

/// ωₘ = 2πm/ℏβ for m ≥ 1.
pub fn matsubara_frequency(m: u64, beta: f64, params: &ModelParams) -> Result<f64> {
    if m == 0 {
        return Err(CorrelatorError::ZeroMode);
    }
    Ok(2.0 * PI * m as f64 / (params.hbar * beta))
}

// coth(y) − 1/y
fn coth_minus_inverse(y: f64) -> f64 {
    if y < 0.1 {
        let y2 = y * y;
        y * (1.0 / 3.0
            + y2 * (-1.0 / 45.0
                + y2 * (2.0 / 945.0 + y2 * (-1.0 / 4725.0 + y2 * (2.0 / 93555.0 - y2 * 1382.0 / 638_512_875.0)))))
    } else {
        1.0 / y.tanh() - 1.0 / y
    }
}

// 1/sinh(y) − 1/y
fn csch_minus_inverse(y: f64) -> f64 {
    if y < 0.1 {
        let y2 = y * y;
        y * (-1.0 / 6.0
            + y2 * (7.0 / 360.0
                + y2 * (-31.0 / 15120.0
                    + y2 * (127.0 / 604_800.0 + y2 * (-73.0 / 3_421_440.0 + y2 * 1_414_477.0 / 653_837_184_000.0)))))
    } else {
        1.0 / y.sinh() - 1.0 / y
    }
}

// 4 + x² − 4cosh x + x sinh x = Σ_{k≥3} (2k−4)·x^{2k}/(2k)!, all terms positive.
fn l4_numerator_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut power = x2 * x2 * x2 / 720.0;
    let mut sum = 0.0;
    for k in 3..60 {
        let term = (2 * k - 4) as f64 * power;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        power *= x2 / ((2 * k + 1) * (2 * k + 2)) as f64;
    }
    sum
}

/// Periodic, zero-mode-subtracted correlator of one oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlator {
    pub beta: f64,
    pub omega: f64,
    pub params: ModelParams,
}

impl Correlator {
    pub fn new(beta: f64, omega: f64, params: ModelParams) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(CorrelatorError::InvalidParameter("beta must be positive and finite"));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(CorrelatorError::InvalidParameter("omega must be positive and finite"));
        }
        Ok(Correlator { beta, omega, params })
    }

    /// Period ℏβ of imaginary time.
    pub fn period(&self) -> f64 {
        self.params.hbar * self.beta
    }

    /// Dimensionless ℏβΩ.
    pub fn reduced_inverse_temperature(&self) -> f64 {
        self.period() * self.omega
    }

    fn prefactor(&self) -> f64 {
        self.params.hbar / (2.0 * self.params.mass * self.omega)
    }

    /// a²(Δτ) for Δτ in [0, ℏβ]; values outside are rejected rather than folded.
    pub fn pair_correlation(&self, dtau: f64) -> Result<f64> {
        let period = self.period();
        if !(0.0..=period).contains(&dtau) {
            return Err(CorrelatorError::DtauOutOfRange { dtau, period });
        }
        let x = self.reduced_inverse_temperature();
        let d = dtau.min(period - dtau);
        let bracket = if x > 40.0 {
            let near = (-self.omega * d).exp();
            let far = (-self.omega * (period - d)).exp();
            (near + far) / -(-x).exp_m1() - 2.0 / x
        } else {
            let y = 0.5 * x;
            let half_u = 0.5 * (self.omega * d - y);
            2.0 * half_u.sinh().powi(2) / y.sinh() + csch_minus_inverse(y)
        };
        Ok(self.prefactor() * bracket)
    }

    /// One Matsubara term (2/Mβ)·cos(ωₘΔτ)/(ωₘ² + Ω²).
    pub fn matsubara_term(&self, m: u64, dtau: f64) -> Result<f64> {
        let w = matsubara_frequency(m, self.beta, &self.params)?;
        Ok(2.0 / (self.params.mass * self.beta) * (w * dtau).cos() / (w * w + self.omega * self.omega))
    }

    /// Truncated Matsubara sum through `m_max` plus an integral estimate of
    /// the remainder. Used as an independent check of [`Self::pair_correlation`].
    pub fn pair_correlation_sum(&self, dtau: f64, m_max: u64) -> Result<f64> {
        if m_max == 0 {
            return Err(CorrelatorError::ZeroMode);
        }
        let mut sum = 0.0;
        for m in (1..=m_max).rev() {
            sum += self.matsubara_term(m, dtau)?;
        }
        let pref = 2.0 / (self.params.mass * self.beta);
        let k = 2.0 * PI / self.period();
        let x_end = m_max as f64 + 0.5;
        let theta = k * dtau;
        let on_period = (dtau / self.period()).fract() == 0.0;
        let tail = if on_period {
            pref / (k * self.omega) * (0.5 * PI - (k * x_end / self.omega).atan())
        } else {
            -pref * (theta * x_end).sin() / (theta * ((k * x_end).powi(2) + self.omega.powi(2)))
        };
        Ok(sum + tail)
    }

    /// a² = a²(0) = ℏ/(2MΩ)·[coth(ℏβΩ/2) − 2/(ℏβΩ)].
    pub fn equal_time_width(&self) -> f64 {
        self.prefactor() * coth_minus_inverse(0.5 * self.reduced_inverse_temperature())
    }

    /// l⁴ = ℏ[4 + x² − 4cosh x + x sinh x]/(8βM²Ω³ sinh²(x/2)) with x = ℏβΩ,
    /// evaluated without cancellation for all x.
    pub fn l4(&self) -> f64 {
        let ModelParams { hbar, mass, .. } = self.params;
        let x = self.reduced_inverse_temperature();
        let scale = hbar / (self.beta * mass * mass * self.omega.powi(3));
        if x < 2.0 {
            scale * l4_numerator_series(x) / (8.0 * (0.5 * x).sinh().powi(2))
        } else {
            let e = (-x).exp();
            let numerator = (4.0 + x * x) * e - 2.0 * (1.0 + e * e) + 0.5 * x * (1.0 - e * e);
            scale * numerator / (2.0 * (1.0 - e).powi(2))
        }
    }
}

/// Zero-temperature correlator ℏ/(2MΩ)·e^{−Ω|Δτ|}.
pub fn zero_t_pair_correlation(omega: f64, dtau_abs: f64, params: &ModelParams) -> Result<f64> {
    if !(dtau_abs >= 0.0) {
        return Err(CorrelatorError::InvalidParameter("time difference must be non-negative"));
    }
    if !(omega > 0.0) {
        return Err(CorrelatorError::InvalidParameter("omega must be positive"));
    }
    Ok(params.hbar / (2.0 * params.mass * omega) * (-omega * dtau_abs).exp())
}

/// α = (1 − √(1−e^{−2x}))/(1 + √(1−e^{−2x})) with x = ℏβΩ, computed as
/// e^{−2x}/(1+√(1−e^{−2x}))² to stay accurate for large x.
pub fn alpha_of_beta(beta: f64, omega: f64, params: &ModelParams) -> f64 {
    let x = params.hbar * beta * omega;
    let eps = (-2.0 * x).exp();
    let s = (-(-2.0 * x).exp_m1()).sqrt();
    eps / (1.0 + s).powi(2)
}

/// Correlator of one channel at finite or zero temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelCorrelator {
    Thermal(Correlator),
    ZeroTemperature { omega: f64, params: ModelParams },
}

impl ChannelCorrelator {
    pub fn new(omega: f64, thermal: ThermalState, params: ModelParams) -> Result<Self> {
        match thermal {
            ThermalState::Finite { beta } => Correlator::new(beta, omega, params).map(ChannelCorrelator::Thermal),
            ThermalState::ZeroTemperature => {
                if omega > 0.0 && omega.is_finite() {
                    Ok(ChannelCorrelator::ZeroTemperature { omega, params })
                } else {
                    Err(CorrelatorError::InvalidParameter("omega must be positive and finite"))
                }
            }
        }
    }

    pub fn omega(&self) -> f64 {
        match *self {
            ChannelCorrelator::Thermal(c) => c.omega,
            ChannelCorrelator::ZeroTemperature { omega, .. } => omega,
        }
    }

    pub fn equal_time_width(&self) -> f64 {
        match *self {
            ChannelCorrelator::Thermal(c) => c.equal_time_width(),
            ChannelCorrelator::ZeroTemperature { omega, params } => params.hbar / (2.0 * params.mass * omega),
        }
    }

    /// Width at time separation Δτ: in [0, ℏβ] at finite β, any Δτ ≥ 0 at zero temperature.
    pub fn width_at(&self, dtau: f64) -> Result<f64> {
        match *self {
            ChannelCorrelator::Thermal(c) => c.pair_correlation(dtau),
            ChannelCorrelator::ZeroTemperature { omega, params } => zero_t_pair_correlation(omega, dtau, &params),
        }
    }

    pub fn l4(&self) -> f64 {
        match *self {
            ChannelCorrelator::Thermal(c) => c.l4(),
            ChannelCorrelator::ZeroTemperature { omega, params } => (params.hbar / (2.0 * params.mass * omega)).powi(2),
        }
    }
}

/// Transverse and longitudinal correlators of an anisotropic trial oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorSet {
    pub transverse: ChannelCorrelator,
    pub longitudinal: ChannelCorrelator,
}

impl CorrelatorSet {
    pub fn new(omega_t: f64, omega_l: f64, thermal: ThermalState, params: ModelParams) -> Result<Self> {
        Ok(CorrelatorSet {
            transverse: ChannelCorrelator::new(omega_t, thermal, params)?,
            longitudinal: ChannelCorrelator::new(omega_l, thermal, params)?,
        })
    }

    pub fn a2_t(&self) -> f64 {
        self.transverse.equal_time_width()
    }

    pub fn a2_l(&self) -> f64 {
        self.longitudinal.equal_time_width()
    }

    pub fn a2_t_at(&self, dtau: f64) -> Result<f64> {
        self.transverse.width_at(dtau)
    }

    pub fn a2_l_at(&self, dtau: f64) -> Result<f64> {
        self.longitudinal.width_at(dtau)
    }

    pub fn l4_t(&self) -> f64 {
        self.transverse.l4()
    }

    pub fn l4_l(&self) -> f64 {
        self.longitudinal.l4()
    }
}
