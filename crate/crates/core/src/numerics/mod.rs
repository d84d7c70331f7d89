//! Numerical kernel: adaptive quadrature, root finding, derivative-free
//! minimization, series summation and finite differences.
//!
//! Everything here is pure and reentrant. Failures are reported through
//! [`NumericsError`], which always carries the best available estimate.

mod diff;
mod minimize;
mod quadrature;
mod roots;
mod series;

pub use diff::{finite_difference, DerivativeOrder};
pub use minimize::{minimize_2d, minimize_scalar, Minimum2d, MinimumScalar};
pub use quadrature::{
    integrate_2d, integrate_finite, integrate_finite_estimate, integrate_semi_infinite, integrate_semi_infinite_mapped,
    integrate_with_breaks, Axis, Domain2d, Estimate, SemiInfiniteMap,
};
pub use roots::find_root;
pub use series::{sum_series, sum_series_with_tail};

use thiserror::Error;

/// Errors raised by the numerical kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("invalid series truncation: {0}")]
    InvalidTruncation(&'static str),
    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate:e}, error bound {error_bound:e})"
    )]
    QuadratureNotConverged { estimate: f64, error_bound: f64, subdivisions: usize },
    #[error("integral appears divergent (partial estimates {partials:?})")]
    Divergent { partials: Vec<f64> },
    #[error("inner integral failed at outer coordinate {at}: {source}")]
    InnerIntegralFailed { at: f64, source: Box<NumericsError> },
    #[error("no sign change on [{lo}, {hi}]: g(lo) = {g_lo:e}, g(hi) = {g_hi:e}")]
    NoSignChange { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },
    #[error("root finding hit the iteration cap; best point {best} with g = {value:e}")]
    RootIterationCap { best: f64, value: f64 },
    #[error("minimizer {x} lies at the bracket edge [{lo}, {hi}]")]
    MinimumAtEdge { x: f64, value: f64, lo: f64, hi: f64 },
    #[error(
        "2D minimization stopped after {iterations} iterations at ({}, {}) \
         with value {value:e} and gradient norm {gradient_norm:e}", best.0, best.1
    )]
    IterationCap { best: (f64, f64), value: f64, gradient_norm: f64, iterations: usize },
    #[error("series not converged after {terms} terms (partial sum {partial:e})")]
    SeriesNotConverged { partial: f64, terms: usize },
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// Absolute/relative accuracy goal plus a work limit.
///
/// For quadrature `max_subdivisions` bounds the number of bisected panels;
/// for iterative solvers it bounds the iteration count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    /// Default for innermost integrals and solvers.
    pub const INNER: Tolerance = Tolerance { abs_tol: 1e-10, rel_tol: 1e-8, max_subdivisions: 500 };
    /// Default for outer integration layers.
    pub const OUTER: Tolerance = Tolerance { abs_tol: 1e-8, rel_tol: 1e-6, max_subdivisions: 500 };

    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol >= 0.0 && rel_tol >= 0.0) {
            return Err(NumericsError::InvalidTolerance("tolerances must be non-negative"));
        }
        if abs_tol == 0.0 && rel_tol == 0.0 {
            return Err(NumericsError::InvalidTolerance("one of abs_tol, rel_tol must be positive"));
        }
        if max_subdivisions == 0 {
            return Err(NumericsError::InvalidTolerance("max_subdivisions must be at least 1"));
        }
        Ok(Tolerance { abs_tol, rel_tol, max_subdivisions })
    }

    /// Both accuracy goals multiplied by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Tolerance { abs_tol: self.abs_tol * factor, rel_tol: self.rel_tol * factor, ..self }
    }

    /// Error budget for an estimate of magnitude `value`.
    pub fn budget(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::INNER
    }
}

/// Closed search interval with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo < hi && lo.is_finite() && hi.is_finite() {
            Ok(Bracket { lo, hi })
        } else {
            Err(NumericsError::InvalidBracket { lo, hi })
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Stopping rule for [`sum_series`]: stop once a whole block of 16 terms
/// adds less than `tail_tol`, fail after `max_terms`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTruncation {
    pub max_terms: usize,
    pub tail_tol: f64,
}

impl SeriesTruncation {
    pub fn new(max_terms: usize, tail_tol: f64) -> Result<Self> {
        if max_terms == 0 {
            return Err(NumericsError::InvalidTruncation("max_terms must be at least 1"));
        }
        if !(tail_tol > 0.0) {
            return Err(NumericsError::InvalidTruncation("tail_tol must be positive"));
        }
        Ok(SeriesTruncation { max_terms, tail_tol })
    }
}

/// Adaptive quadrature over consecutive panels `points` for an integrand
/// that may itself fail (for example because it evaluates an inner integral).
pub fn quadrature_try<E, F>(f: F, points: &[f64], tol: Tolerance) -> std::result::Result<f64, E>
where
    E: From<NumericsError>,
    F: FnMut(f64) -> std::result::Result<f64, E>,
{
    quadrature::try_integrate_with_breaks(f, points, tol).map(|e| e.value)
}

/// Semi-infinite counterpart of [`quadrature_try`].
pub fn quadrature_try_semi_infinite<E, F>(f: F, map: SemiInfiniteMap, tol: Tolerance) -> std::result::Result<f64, E>
where
    E: From<NumericsError>,
    F: FnMut(f64) -> std::result::Result<f64, E>,
{
    quadrature::try_integrate_semi_infinite_mapped(f, map, tol).map(|e| e.value)
}
