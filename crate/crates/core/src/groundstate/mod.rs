//! Ground-state energy of the Coulomb system: zero-temperature limits of the
//! smeared expansion, Rayleigh–Schrödinger coefficients in an oscillator
//! basis and their variational reexpansion.

mod perturbation;
mod variational;
mod zero_temperature;

pub use perturbation::{
    constant_c, default_c_truncation, default_rs_truncation, hyp3f2_terminating, rs_matrix_element,
    rs_second_order_coefficient, rs_second_order_energy, QuantumNumbers, MAX_QUANTUM_NUMBER,
};
pub use variational::{
    cubic_frequency_root, default_expansion, energy_variational, optimize_ground_state, resummation_coefficient,
    second_order_constant, GroundStateResult, RsExpansion, RsTerm, VariationalOrder, MAX_RESUMMATION_ORDER,
};
pub use zero_temperature::{ccc_double_time_integral, zero_t_connected_coulomb_pair};

use crate::numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroundStateError {
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error("quantum number {value} exceeds the supported maximum {limit}")]
    QuantumNumberTooLarge { value: u32, limit: u32 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(
        "expected {expected} real roots of the frequency cubic in (-2, 2), found {found}; (c', g(c')) = {values:?}"
    )]
    CubicRoots { expected: usize, found: usize, values: Vec<(f64, f64)> },
}

pub type Result<T> = std::result::Result<T, GroundStateError>;
