//! Smeared Coulomb expectations, the first- and second-order effective
//! classical potentials and the optimization of their trial frequencies.

mod expectations;
mod optimize;
mod potential;

pub use expectations::{
    connected_coulomb_pair, coulomb_pair, coulomb_pair_direct, coulomb_smeared, coulomb_times_fluct_square,
    inverse_square_smeared, EQUAL_TIME_THRESHOLD,
};

pub use optimize::{
    curve, optimize_frequencies, optimize_frequencies_from, AnisotropyMode, CurveEntry, EcpPoint, OptimizationMode,
    PotentialCurve,
};
pub use potential::{
    connected_time_integral, kernel_at, w1, w2, w2_terms, w_order, zero_temperature_extrapolation, Order, W2Terms,
};

use crate::correlator::CorrelatorError;
use crate::numerics::NumericsError;
use crate::smearing::SmearingError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoulombError {
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error(transparent)]
    Correlator(#[from] CorrelatorError),
    #[error(transparent)]
    Smearing(#[from] SmearingError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("no stationary point or turning point of W in the scanned range; (Ω, ∂W/∂Ω) = {scanned:?}")]
    NoStationaryPoint { scanned: Vec<(f64, f64)> },
}

pub type Result<T> = std::result::Result<T, CoulombError>;

/// Transverse and longitudinal trial frequencies at one r₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialFrequencies {
    pub omega_t: f64,
    pub omega_l: f64,
}

impl TrialFrequencies {
    pub fn new(omega_t: f64, omega_l: f64) -> Result<Self> {
        if omega_t > 0.0 && omega_l > 0.0 && omega_t.is_finite() && omega_l.is_finite() {
            Ok(TrialFrequencies { omega_t, omega_l })
        } else {
            Err(CoulombError::InvalidInput("trial frequencies must be positive and finite"))
        }
    }

    pub fn isotropic(omega: f64) -> Result<Self> {
        Self::new(omega, omega)
    }

    pub fn is_isotropic(&self) -> bool {
        self.omega_t == self.omega_l
    }
}
