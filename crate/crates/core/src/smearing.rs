//! Gaussian smearing: expectation values of functions of the path under a
//! harmonic trial measure, in one dimension and in three dimensions with
//! separate transverse and longitudinal widths.

use crate::numerics::{self, NumericsError, Tolerance};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SmearingError {
    #[error("invalid kernel: {0}")]
    InvalidKernel(&'static str),
    #[error("Wick enumeration supports at most 10 indices, got {0}")]
    TooManyIndices(usize),
    #[error("covariance matrix must be square")]
    NotSquare,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, SmearingError>;

const TOL: Tolerance = Tolerance { abs_tol: 1e-13, rel_tol: 1e-11, max_subdivisions: 400 };
const CUT: f64 = 10.0;

/// Relative determinant below which a two-time covariance is treated as
/// equal-time.
pub const PAIR_SINGULARITY: f64 = 1e-12;

/// Gaussian of width a² centered at x₀; `a2_12` is the cross width of the
/// two-time kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernel1D {
    pub x0: f64,
    pub a2: f64,
    pub a2_12: f64,
}

impl GaussianKernel1D {
    pub fn single(x0: f64, a2: f64) -> Result<Self> {
        Self::pair(x0, a2, 0.0)
    }

    /// Requires `|a2_12| ≤ a2`; the boundary is handled as the degenerate
    /// (perfectly correlated) limit.
    pub fn pair(x0: f64, a2: f64, a2_12: f64) -> Result<Self> {
        if !(a2 > 0.0 && a2.is_finite() && x0.is_finite()) {
            return Err(SmearingError::InvalidKernel("width must be positive and finite"));
        }
        if !(a2_12.abs() <= a2) {
            return Err(SmearingError::InvalidKernel("cross width exceeds width"));
        }
        Ok(GaussianKernel1D { x0, a2, a2_12 })
    }
}

fn standard_normal(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

fn gaussian_average<E, F>(mut f: F) -> std::result::Result<f64, E>
where
    E: From<NumericsError>,
    F: FnMut(f64) -> std::result::Result<f64, E>,
{
    numerics::quadrature_try(|z| Ok(f(z)? * standard_normal(z)), &[-CUT, -3.0, 0.0, 3.0, CUT], TOL)
}

/// ⟨F⟩ = ∫dx F(x)·exp(−(x−x₀)²/2a²)/√(2πa²), truncated at ±10 widths.
pub fn smear_single_1d<F: Fn(f64) -> f64>(f: F, k: &GaussianKernel1D) -> Result<f64> {
    let a = k.a2.sqrt();
    gaussian_average(|z| Ok::<f64, SmearingError>(f(k.x0 + a * z)))
}

/// ⟨F₁(x(τ₁))F₂(x(τ₂))⟩ under the covariance [[a², a²₁₂], [a²₁₂, a²]].
/// Near-singular covariances fall back to the equal-time (or, for negative
/// cross width, mirrored) single smearing.
pub fn smear_pair_1d<F1: Fn(f64) -> f64, F2: Fn(f64) -> f64>(f1: F1, f2: F2, k: &GaussianKernel1D) -> Result<f64> {
    let rho = k.a2_12 / k.a2;
    let a = k.a2.sqrt();
    let det = 1.0 - rho * rho;
    if det < PAIR_SINGULARITY {
        let x0 = k.x0;
        return if rho > 0.0 {
            smear_single_1d(|x| f1(x) * f2(x), k)
        } else {
            smear_single_1d(|x| f1(x) * f2(2.0 * x0 - x), k)
        };
    }
    let s = det.sqrt();
    gaussian_average(|z1| {
        let x1 = k.x0 + a * z1;
        let v1 = f1(x1);
        if v1 == 0.0 {
            return Ok(0.0);
        }
        let inner = gaussian_average(|z2| Ok::<f64, SmearingError>(f2(x1 + a * ((rho - 1.0) * z1 + s * z2))))?;
        Ok::<f64, SmearingError>(v1 * inner)
    })
}

/// Gaussian moment ⟨δxⁿ⟩ = (n−1)!!·aⁿ; zero for odd n.
pub fn wick_moment(n: u32, a: f64) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let double_factorial: f64 = (1..n).step_by(2).map(f64::from).product();
    double_factorial * a.powi(n as i32)
}

fn square(cov: &[Vec<f64>]) -> Result<()> {
    if cov.iter().all(|row| row.len() == cov.len()) {
        Ok(())
    } else {
        Err(SmearingError::NotSquare)
    }
}

/// ⟨δx₁⋯δxₙ⟩ as the sum over all (n−1)!! pairings of covariance products.
pub fn wick_pairings(cov: &[Vec<f64>]) -> Result<f64> {
    square(cov)?;
    let n = cov.len();
    if n > 10 {
        return Err(SmearingError::TooManyIndices(n));
    }
    if n % 2 == 1 {
        return Ok(0.0);
    }
    fn recurse(cov: &[Vec<f64>], rest: &mut Vec<usize>) -> f64 {
        if rest.is_empty() {
            return 1.0;
        }
        let first = rest.remove(0);
        let mut total = 0.0;
        for i in 0..rest.len() {
            let partner = rest.remove(i);
            total += cov[first][partner] * recurse(cov, rest);
            rest.insert(i, partner);
        }
        rest.insert(0, first);
        total
    }
    Ok(recurse(cov, &mut (0..n).collect()))
}

/// ⟨exp(i Σₖ uₖ δxₖ)⟩ = exp(−½ Σ uₖ cov_kk′ u_k′).
pub fn exp_product_expectation(u: &[f64], cov: &[Vec<f64>]) -> Result<f64> {
    square(cov)?;
    if cov.len() != u.len() {
        return Err(SmearingError::NotSquare);
    }
    let quad: f64 = u.iter().zip(cov).map(|(ui, row)| ui * row.iter().zip(u).map(|(c, uj)| c * uj).sum::<f64>()).sum();
    Ok((-0.5 * quad).exp())
}

/// Anisotropic two-time kernel centered at distance r₀ on the longitudinal axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnisotropicKernel3D {
    pub r0: f64,
    pub a2_t: f64,
    pub a2_l: f64,
    pub a2_t12: f64,
    pub a2_l12: f64,
}

impl AnisotropicKernel3D {
    pub fn new(r0: f64, a2_t: f64, a2_l: f64, a2_t12: f64, a2_l12: f64) -> Result<Self> {
        if !(a2_t > 0.0 && a2_l > 0.0 && a2_t.is_finite() && a2_l.is_finite() && r0.is_finite()) {
            return Err(SmearingError::InvalidKernel("widths must be positive and finite"));
        }
        if !(a2_t12.abs() <= a2_t && a2_l12.abs() <= a2_l) {
            return Err(SmearingError::InvalidKernel("cross width exceeds width"));
        }
        Ok(AnisotropicKernel3D { r0, a2_t, a2_l, a2_t12, a2_l12 })
    }

    /// Kernel with coincident times (cross widths equal to the widths).
    pub fn equal_time(r0: f64, a2_t: f64, a2_l: f64) -> Result<Self> {
        Self::new(r0, a2_t, a2_l, a2_t, a2_l)
    }

    /// Kernel of two statistically independent times.
    pub fn independent(r0: f64, a2_t: f64, a2_l: f64) -> Result<Self> {
        Self::new(r0, a2_t, a2_l, 0.0, 0.0)
    }

    /// Squared correlation coefficients (a⁴₁₂/a⁴) of the transverse and
    /// longitudinal channels.
    pub fn correlations(&self) -> (f64, f64) {
        ((self.a2_t12 / self.a2_t).powi(2), (self.a2_l12 / self.a2_l).powi(2))
    }
}

/// ⟨F(x)⟩ for an axially symmetric F(ρ, z): ρ is the distance from the
/// longitudinal axis, z the longitudinal coordinate (centered at r₀).
pub fn smear_single_3d<F: Fn(f64, f64) -> f64>(f: F, k: &AnisotropicKernel3D) -> Result<f64> {
    let (at, al) = (k.a2_t.sqrt(), k.a2_l.sqrt());
    let mut zs = vec![-CUT, 0.0, CUT];
    let origin = -k.r0 / al;
    if origin > -CUT && origin < CUT && origin != 0.0 {
        zs.push(origin);
        zs.sort_by(f64::total_cmp);
    }
    numerics::quadrature_try(
        |t| {
            // Transverse radius ρ = a_T·t with weight t·e^{−t²/2}.
            let rho = at * t;
            let inner = numerics::quadrature_try(
                |z| Ok::<f64, SmearingError>(f(rho, k.r0 + al * z) * standard_normal(z)),
                &zs,
                TOL,
            )?;
            Ok::<f64, SmearingError>(t * (-0.5 * t * t).exp() * inner)
        },
        &[0.0, 1.0, 3.0, CUT],
        TOL,
    )
}

/// Which pair of fluctuation squares enters a product expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelPair {
    TT,
    TL,
    LL,
}

/// ⟨[δx(τ₁)]²_X [δx(τ₂)]²_Y⟩ for the channel pair (X, Y).
pub fn fluct_square_products(pair: ChannelPair, k: &AnisotropicKernel3D) -> f64 {
    match pair {
        ChannelPair::TT => 4.0 * k.a2_t * k.a2_t + 4.0 * k.a2_t12 * k.a2_t12,
        ChannelPair::TL => 2.0 * k.a2_t * k.a2_l,
        ChannelPair::LL => k.a2_l * k.a2_l + 2.0 * k.a2_l12 * k.a2_l12,
    }
}

/// ⟨F(x(τ₁))·[δx(τ₂)]²⟩ reduced to equal-time smearings:
/// a²(1 − a⁴₁₂/a⁴)⟨F⟩ + (a⁴₁₂/a⁴)⟨F·δx²⟩.
pub fn reduce_fluct_square_1d<F: Fn(f64) -> f64>(f: F, k: &GaussianKernel1D) -> Result<f64> {
    let c = (k.a2_12 / k.a2).powi(2);
    let plain = smear_single_1d(&f, k)?;
    let weighted = smear_single_1d(|x| f(x) * (x - k.x0).powi(2), k)?;
    Ok(k.a2 * (1.0 - c) * plain + c * weighted)
}

/// Transverse or longitudinal fluctuation channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Transverse,
    Longitudinal,
}

/// ⟨F(x(τ₁))·[δx(τ₂)]²_{T|L}⟩ for axially symmetric F, reduced to
/// equal-time 3D smearings.
pub fn reduce_fluct_square_3d<F: Fn(f64, f64) -> f64>(f: F, channel: Channel, k: &AnisotropicKernel3D) -> Result<f64> {
    let (ct, cl) = k.correlations();
    let plain = smear_single_3d(&f, k)?;
    match channel {
        Channel::Transverse => {
            let weighted = smear_single_3d(|rho, z| f(rho, z) * rho * rho, k)?;
            Ok(2.0 * k.a2_t * (1.0 - ct) * plain + ct * weighted)
        }
        Channel::Longitudinal => {
            let weighted = smear_single_3d(|rho, z| f(rho, z) * (z - k.r0).powi(2), k)?;
            Ok(k.a2_l * (1.0 - cl) * plain + cl * weighted)
        }
    }
}
