//! Registry of numerical invariants, run by `ecp selfcheck`.
//!
//! Every check measures a non-negative residual and passes when it does not
//! exceed the check's tolerance. Counting checks report the number of
//! violations with tolerance zero.

use crate::correlator::{Correlator, CorrelatorSet, ModelParams, ThermalState};
use crate::coulomb::{
    connected_coulomb_pair, connected_time_integral, coulomb_pair, coulomb_smeared, kernel_at, optimize_frequencies,
    w1, w2, w2_terms, zero_temperature_extrapolation, AnisotropyMode, Order, TrialFrequencies,
};
use crate::groundstate::{
    ccc_double_time_integral, constant_c, default_c_truncation, default_rs_truncation, energy_variational,
    hyp3f2_terminating, optimize_ground_state, resummation_coefficient, rs_matrix_element, rs_second_order_energy,
    second_order_constant, zero_t_connected_coulomb_pair, QuantumNumbers, VariationalOrder,
};
use crate::numerics::{
    find_root, finite_difference, integrate_finite, integrate_with_breaks, minimize_scalar, sum_series_with_tail,
    Bracket, DerivativeOrder, SeriesTruncation, Tolerance,
};
use crate::smearing::{
    exp_product_expectation, reduce_fluct_square_1d, reduce_fluct_square_3d, smear_pair_1d, smear_single_1d,
    smear_single_3d, wick_moment, wick_pairings, AnisotropicKernel3D, Channel, GaussianKernel1D,
};
use num_rational::Ratio;
use std::error::Error;
use std::f64::consts::{LN_2, PI};

type Measure = std::result::Result<f64, Box<dyn Error>>;

const P: ModelParams = ModelParams::ATOMIC;

/// One registered invariant.
#[derive(Clone, Copy)]
pub struct Check {
    pub module: &'static str,
    pub name: &'static str,
    pub tolerance: f64,
    measure: fn() -> Measure,
}

/// Result of running one check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub module: &'static str,
    pub name: &'static str,
    pub tolerance: f64,
    pub residual: Option<f64>,
    pub error: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self.residual, Some(r) if r <= self.tolerance)
    }
}

impl Check {
    /// Runs the check against its own tolerance or `tolerance_override`.
    pub fn run(&self, tolerance_override: Option<f64>) -> CheckOutcome {
        let tolerance = tolerance_override.unwrap_or(self.tolerance);
        let (residual, error) = match (self.measure)() {
            Ok(r) if r.is_finite() => (Some(r), None),
            Ok(r) => (None, Some(format!("non-finite residual {r}"))),
            Err(e) => (None, Some(e.to_string())),
        };
        CheckOutcome { module: self.module, name: self.name, tolerance, residual, error }
    }
}

/// Runs every registered check in registry order.
pub fn run_all(tolerance_override: Option<f64>) -> Vec<CheckOutcome> {
    registry().iter().map(|c| c.run(tolerance_override)).collect()
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn count(flags: impl IntoIterator<Item = bool>) -> f64 {
    flags.into_iter().filter(|v| *v).count() as f64
}

macro_rules! check {
    ($module:literal, $name:literal, $tol:expr, $f:expr) => {
        Check { module: $module, name: $name, tolerance: $tol, measure: $f }
    };
}

/// All registered invariants.
pub fn registry() -> Vec<Check> {
    vec![
        check!("numerics", "quadrature is linear", 1e-9, quadrature_linearity),
        check!("numerics", "quadrature is additive over intervals", 2e-9, quadrature_additivity),
        check!("numerics", "root finding and minimization are deterministic", 0.0, solver_determinism),
        check!("numerics", "finite differences are exact on cubics", 1e-6, finite_difference_cubic),
        check!("numerics", "series with integral tail gives pi^2/6", 1e-6, basel_sum),
        check!("correlator", "correlator integrates to zero over a period", 1e-8, correlator_zero_integral),
        check!("correlator", "correlator is reflection symmetric", 1e-14, correlator_reflection),
        check!("correlator", "correlator is bounded by the equal-time width", 0.0, correlator_bounded),
        check!("correlator", "closed form matches the Matsubara sum", 1e-4, correlator_matsubara),
        check!("correlator", "l4 matches the double time integral", 1e-8, l4_time_integral),
        check!("correlator", "l4 extrapolated from beta=1e3 tends to hbar^2/4M^2 Omega^2", 1e-4, l4_zero_temperature),
        check!("correlator", "equal-time width decreases with frequency", 0.0, width_decreasing),
        check!("smearing", "one-dimensional fluctuation-square rule", 1e-8, rule_1d),
        check!("smearing", "three-dimensional fluctuation-square rules", 1e-6, rule_3d),
        check!("smearing", "exponential expectation matches quadrature", 1e-8, exponential_expectation),
        check!("smearing", "Wick pairings reproduce Gaussian moments", 1e-12, wick_equal_time),
        check!("smearing", "smearing is translation invariant", 1e-12, translation_invariance),
        check!("coulomb", "isotropic smeared Coulomb equals erf(r0/sqrt(2a^2))/r0", 1e-8, smeared_coulomb_erf),
        check!("coulomb", "smeared Coulomb decreases with r0", 0.0, smeared_coulomb_decreasing),
        check!("coulomb", "pair expectation bounds the squared mean at equal times", 0.0, pair_variance),
        check!("coulomb", "zero-temperature pair landmark 4/3", 1e-6, pair_landmark),
        check!("coulomb", "second order vanishes relative to first at high temperature", 1e-3, high_temperature_orders),
        check!("coulomb", "reduced time integral matches the full square", 1e-6, reduced_time_integral),
        check!("coulomb", "anisotropic optimum is isotropic at the origin", 1e-6, anisotropic_origin),
        check!("groundstate", "W1 and W2 approach E1 and E2 at zero temperature", 1e-3, zero_temperature_energies),
        check!("groundstate", "zero-temperature W2 pieces at the origin", 1e-10, zero_temperature_pieces),
        check!("groundstate", "reexpansion gives the variational coefficients", 0.0, reexpansion_rationals),
        check!("groundstate", "variational energies approach -1/2 monotonically", 0.0, gamma_sequence),
        check!("groundstate", "second-order coefficient is frequency independent", 1e-10, rs_frequency_independence),
        check!("groundstate", "second-order coefficient matches closed form", 1e-4, rs_second_order_value),
        check!("groundstate", "ground diagonal matrix element", 1e-10, ground_matrix_element),
        check!("groundstate", "hypergeometric series matches gamma ratios", 1e-12, hypergeometric_gamma),
        check!("groundstate", "connected pair integrates to the closed form", 1e-3, double_time_closed_form),
        check!("groundstate", "constant c lies in [0.0313, 0.0323]", 0.0, constant_c_band),
    ]
}

fn quadrature_linearity() -> Measure {
    let tol = Tolerance::INNER;
    let (a, b) = (0.3, 2.7);
    let f = |x: f64| (3.0 * x).sin() + x * x;
    let g = |x: f64| (-x).exp() / (1.0 + x);
    let lhs = integrate_finite(|x| 2.5 * f(x) - 1.5 * g(x), a, b, tol)?;
    let rhs = 2.5 * integrate_finite(f, a, b, tol)? - 1.5 * integrate_finite(g, a, b, tol)?;
    Ok((lhs - rhs).abs())
}

fn quadrature_additivity() -> Measure {
    let tol = Tolerance::INNER;
    let f = |x: f64| (-x).exp() * (4.0 * x).cos();
    let whole = integrate_finite(f, 0.0, 3.0, tol)?;
    let split = integrate_finite(f, 0.0, 1.3, tol)? + integrate_finite(f, 1.3, 3.0, tol)?;
    Ok((whole - split).abs())
}

fn solver_determinism() -> Measure {
    let g = |x: f64| x * x * x - 2.0 * x - 5.0;
    let bracket = Bracket::new(2.0, 3.0)?;
    let r1 = find_root(g, bracket, Tolerance::INNER)?;
    let r2 = find_root(g, bracket, Tolerance::INNER)?;
    let h = |x: f64| (x - 1.3).powi(2) + (2.0 * x).sin();
    let m1 = minimize_scalar(h, Bracket::new(-1.0, 3.0)?, Tolerance::INNER)?;
    let m2 = minimize_scalar(h, Bracket::new(-1.0, 3.0)?, Tolerance::INNER)?;
    Ok(count([r1.to_bits() != r2.to_bits(), m1.x.to_bits() != m2.x.to_bits()]))
}

fn finite_difference_cubic() -> Measure {
    let h = |x: f64| 2.0 * x * x * x - x * x + 3.0 * x - 7.0;
    let dh = |x: f64| 6.0 * x * x - 2.0 * x + 3.0;
    Ok(max_of([-2.0, -0.5, 0.0, 0.7, 3.0].map(|x| {
        let d = finite_difference(h, x, DerivativeOrder::First, None);
        (d - dh(x)).abs() / dh(x).abs()
    })))
}

fn basel_sum() -> Measure {
    let t = SeriesTruncation::new(100_000, 1e-6)?;
    let s = sum_series_with_tail(|m| 1.0 / (m * m) as f64, |n| 1.0 / (n as f64 + 0.5), t)?;
    Ok((s - PI * PI / 6.0).abs())
}

const CORRELATOR_GRID: [(f64, f64); 4] = [(0.1, 0.3), (1.0, 1.0), (3.0, 0.5), (10.0, 7.0)];

fn correlator_zero_integral() -> Measure {
    let mut worst: f64 = 0.0;
    for (beta, omega) in CORRELATOR_GRID {
        let c = Correlator::new(beta, omega, P)?;
        let a2 = c.equal_time_width();
        let v = integrate_with_breaks(
            |d| c.pair_correlation(d).unwrap_or(f64::NAN),
            &[0.0, 0.5 * c.period(), c.period()],
            Tolerance::INNER.scaled(1e-3),
        )?;
        worst = worst.max(v.abs() / a2);
    }
    Ok(worst)
}

fn correlator_reflection() -> Measure {
    let mut worst: f64 = 0.0;
    for (beta, omega) in CORRELATOR_GRID {
        let c = Correlator::new(beta, omega, P)?;
        for frac in [0.0, 0.13, 0.31, 0.5] {
            let d = frac * c.period();
            let diff = c.pair_correlation(d)? - c.pair_correlation(c.period() - d)?;
            worst = worst.max(diff.abs() / c.equal_time_width());
        }
    }
    Ok(worst)
}

fn correlator_bounded() -> Measure {
    let mut violations = 0.0;
    for (beta, omega) in CORRELATOR_GRID {
        let c = Correlator::new(beta, omega, P)?;
        for i in 0..=50 {
            let d = c.period() * i as f64 / 50.0;
            // Allow a few ulp: the equal-time width and a²(0) are computed separately.
            violations += count([c.pair_correlation(d)?.abs() > c.equal_time_width() * (1.0 + 1e-14)]);
        }
    }
    Ok(violations)
}

fn correlator_matsubara() -> Measure {
    let mut worst: f64 = 0.0;
    for beta in [0.5, 2.0, 8.0] {
        for omega in [0.3, 1.0, 3.0] {
            let c = Correlator::new(beta, omega, P)?;
            for frac in [0.0, 0.25, 0.6] {
                let d = frac * c.period();
                let diff = c.pair_correlation(d)? - c.pair_correlation_sum(d, 100_000)?;
                worst = worst.max(diff.abs());
            }
        }
    }
    Ok(worst)
}

fn l4_time_integral() -> Measure {
    let mut worst: f64 = 0.0;
    for (beta, omega) in [(0.5, 0.5), (1.0, 1.0), (2.0, 5.0), (5.0, 2.0)] {
        let c = Correlator::new(beta, omega, P)?;
        // (Ω/ℏβ)∬dτ₁dτ₂ a⁴(τ₁ − τ₂) = Ω∫₀^{ℏβ} a⁴(s) ds by periodicity.
        let v = integrate_finite(
            |s| c.pair_correlation(s).map_or(f64::NAN, |a| a * a),
            0.0,
            c.period(),
            Tolerance::INNER.scaled(1e-4),
        )?;
        worst = worst.max((omega * v - c.l4()).abs());
    }
    Ok(worst)
}

fn l4_zero_temperature() -> Measure {
    // l⁴ approaches its limit as 1/β up to exponentially small terms.
    let omega = 1.0;
    let (a, b) = (Correlator::new(1e3, omega, P)?.l4(), Correlator::new(2e3, omega, P)?.l4());
    Ok((2.0 * b - a - 1.0 / (4.0 * omega * omega)).abs())
}

fn width_decreasing() -> Measure {
    let mut violations = 0.0;
    for beta in [0.1, 1.0, 10.0] {
        let widths = (1..=40)
            .map(|i| Correlator::new(beta, 0.05 * 1.2f64.powi(i), P).map(|c| c.equal_time_width()))
            .collect::<Result<Vec<_>, _>>()?;
        violations += count(widths.windows(2).map(|w| !(w[1] < w[0]) || w[1] <= 0.0));
    }
    Ok(violations)
}

fn rule_1d() -> Measure {
    let f = |x: f64| (-0.4 * x * x).exp() * (1.0 + 0.3 * x);
    let mut worst: f64 = 0.0;
    for (x0, a2, a12) in [(0.0, 1.0, 0.5), (0.7, 0.4, -0.3), (-1.2, 2.0, 1.9)] {
        let k = GaussianKernel1D::pair(x0, a2, a12)?;
        let direct = smear_pair_1d(f, |x| (x - x0).powi(2), &k)?;
        worst = worst.max((direct - reduce_fluct_square_1d(f, &k)?).abs());
    }
    Ok(worst)
}

fn rule_3d() -> Measure {
    // Separable F(ρ, z) = e^{−ρ²/2s}·g(z) factorizes over the three axes.
    let s = 0.8;
    let g = |z: f64| 1.0 / (1.0 + 0.5 * z * z);
    let f = |rho: f64, z: f64| (-rho * rho / (2.0 * s)).exp() * g(z);
    let ft = |x: f64| (-x * x / (2.0 * s)).exp();
    let mut worst: f64 = 0.0;
    for (r0, at, al, at12, al12) in [(0.5, 0.7, 1.3, 0.4, -0.6), (1.5, 1.1, 0.6, -0.9, 0.2)] {
        let k = AnisotropicKernel3D::new(r0, at, al, at12, al12)?;
        let tk = GaussianKernel1D::pair(0.0, at, at12)?;
        let lk = GaussianKernel1D::pair(r0, al, al12)?;
        let t_plain = smear_single_1d(ft, &tk)?;
        let t_pair = smear_pair_1d(ft, |x| x * x, &tk)?;
        let l_plain = smear_single_1d(g, &lk)?;
        let l_pair = smear_pair_1d(g, |z| (z - r0).powi(2), &lk)?;
        let transverse = l_plain * 2.0 * t_pair * t_plain;
        let longitudinal = t_plain * t_plain * l_pair;
        worst = worst.max((reduce_fluct_square_3d(f, Channel::Transverse, &k)? - transverse).abs());
        worst = worst.max((reduce_fluct_square_3d(f, Channel::Longitudinal, &k)? - longitudinal).abs());
    }
    Ok(worst)
}

fn exponential_expectation() -> Measure {
    let mut worst: f64 = 0.0;
    for (u, a2) in [(0.5, 1.0), (2.0, 0.3), (1.3, 2.2)] {
        let k = GaussianKernel1D::single(0.0, a2)?;
        let quad = smear_single_1d(|x| (u * x).cos(), &k)?;
        worst = worst.max((quad - exp_product_expectation(&[u], &[vec![a2]])?).abs());
    }
    Ok(worst)
}

fn wick_equal_time() -> Measure {
    let a2: f64 = 1.7;
    let mut worst: f64 = 0.0;
    for n in [2usize, 4, 6, 8] {
        let cov = vec![vec![a2; n]; n];
        let m = wick_moment(n as u32, a2.sqrt());
        worst = worst.max((wick_pairings(&cov)? - m).abs() / m);
    }
    Ok(worst)
}

fn translation_invariance() -> Measure {
    let f = |x: f64| (-0.3 * x * x).exp() + 0.1 * x;
    let shift = 2.3;
    let mut worst: f64 = 0.0;
    for (x0, a2) in [(0.0, 1.0), (-0.5, 0.2)] {
        let a = smear_single_1d(f, &GaussianKernel1D::single(x0, a2)?)?;
        let b = smear_single_1d(|x| f(x - shift), &GaussianKernel1D::single(x0 + shift, a2)?)?;
        worst = worst.max((a - b).abs());
        let k = GaussianKernel1D::pair(x0, a2, 0.5 * a2)?;
        let kp = GaussianKernel1D::pair(x0 + shift, a2, 0.5 * a2)?;
        let a = smear_pair_1d(f, f, &k)?;
        let b = smear_pair_1d(|x| f(x - shift), |x| f(x - shift), &kp)?;
        worst = worst.max((a - b).abs());
    }
    let g = |rho: f64, z: f64| (-(rho * rho + z * z) / 3.0).exp();
    let k = AnisotropicKernel3D::new(0.4, 0.6, 0.9, 0.0, 0.0)?;
    let kp = AnisotropicKernel3D::new(0.4 + shift, 0.6, 0.9, 0.0, 0.0)?;
    let a = smear_single_3d(g, &k)?;
    let b = smear_single_3d(|rho, z| g(rho, z - shift), &kp)?;
    Ok(worst.max((a - b).abs()))
}

fn smeared_coulomb_erf() -> Measure {
    let mut worst: f64 = 0.0;
    for r0 in [0.1, 1.0, 5.0] {
        for a2 in [0.5, 1.0, 2.0] {
            let exact = statrs::function::erf::erf(r0 / (2.0f64 * a2).sqrt()) / r0;
            worst = worst.max((coulomb_smeared(r0, a2, a2)? - exact).abs());
        }
    }
    Ok(worst)
}

fn smeared_coulomb_decreasing() -> Measure {
    let mut violations = 0.0;
    for (at, al) in [(1.0, 1.0), (0.3, 1.5), (2.0, 0.4)] {
        for i in 1..=20 {
            let r0 = 0.25 * i as f64;
            let d =
                finite_difference(|r| coulomb_smeared(r, at, al).unwrap_or(f64::NAN), r0, DerivativeOrder::First, None);
            violations += count([!(d < 0.0)]);
        }
    }
    Ok(violations)
}

fn pair_variance() -> Measure {
    let mut violations = 0.0;
    for (r0, at, al) in [(0.0, 0.5, 0.5), (0.8, 0.3, 1.2), (2.0, 1.5, 0.4)] {
        let k = AnisotropicKernel3D::equal_time(r0, at, al)?;
        let mean = coulomb_smeared(r0, at, al)?;
        violations += count([coulomb_pair(&k)? < mean * mean]);
    }
    Ok(violations)
}

fn pair_landmark() -> Measure {
    let k = AnisotropicKernel3D::new(0.0, 0.5, 0.5, 0.25, 0.25)?;
    let full = (coulomb_pair(&k)? - 4.0 / 3.0).abs();
    let conn = (zero_t_connected_coulomb_pair(1.0, LN_2, &P)? - (4.0 / 3.0 - 4.0 / PI)).abs();
    Ok(full.max(conn))
}

fn high_temperature_orders() -> Measure {
    let th = ThermalState::finite(1e-3)?;
    let mut worst: f64 = 0.0;
    for (r0, omega) in [(0.5, 1.0), (2.0, 0.3)] {
        let f = TrialFrequencies::isotropic(omega)?;
        let a = w1(r0, f, th, &P)?;
        worst = worst.max(((w2(r0, f, th, &P)? - a) / a).abs());
    }
    Ok(worst)
}

fn reduced_time_integral() -> Measure {
    let th = ThermalState::finite(1.0)?;
    let f = TrialFrequencies::new(1.0, 2.0)?;
    let cs = CorrelatorSet::new(1.0, 2.0, th, P)?;
    let r0 = 1.0;
    let conn =
        |d: f64| kernel_at(&cs, r0, d.abs()).ok().and_then(|k| connected_coulomb_pair(&k).ok()).unwrap_or(f64::NAN);
    let tol = Tolerance { abs_tol: 1e-11, rel_tol: 1e-9, max_subdivisions: 200 };
    let raw = integrate_finite(
        |t1| integrate_with_breaks(|t2| conn(t1 - t2), &[0.0, t1.max(1e-300), 1.0], tol).unwrap_or(f64::NAN),
        0.0,
        1.0,
        tol.scaled(10.0),
    )?;
    Ok((raw - connected_time_integral(r0, f, th, &P)?).abs())
}

fn anisotropic_origin() -> Measure {
    let th = ThermalState::finite(10.0)?;
    let p = optimize_frequencies(Order::First, 0.0, th, AnisotropyMode::Anisotropic, &P)?;
    Ok((p.frequencies.omega_t - p.frequencies.omega_l).abs() / p.frequencies.omega_t)
}

fn zero_temperature_energies() -> Measure {
    let mut worst: f64 = 0.0;
    for omega in [0.5, 1.0, 2.0] {
        let f = TrialFrequencies::isotropic(omega)?;
        for (order, vo) in [(Order::First, VariationalOrder::First), (Order::Second, VariationalOrder::Second)] {
            let w = zero_temperature_extrapolation(order, 0.0, f, 1e3, &P)?;
            worst = worst.max((w - energy_variational(vo, omega, &P, 0.0)?).abs());
        }
    }
    Ok(worst)
}

fn zero_temperature_pieces() -> Measure {
    let mut worst: f64 = 0.0;
    for omega in [0.5, 1.0, 2.0] {
        let t = w2_terms(0.0, TrialFrequencies::isotropic(omega)?, ThermalState::ZeroTemperature, &P)?;
        worst = worst.max((t.harmonic - 3.0 * omega / 16.0).abs());
        worst = worst.max((t.mixed - 0.5 * (omega / PI).sqrt()).abs());
    }
    Ok(worst)
}

fn reexpansion_rationals() -> Measure {
    let osc = Ratio::new(3i64, 2);
    let expected = [
        (Ratio::new(3, 4), Ratio::new(1, 1)),
        (Ratio::new(9, 16), Ratio::new(3, 4)),
        (Ratio::new(15, 32), Ratio::new(21, 32)),
    ];
    let mut violations = 0.0;
    for (n, (o, q)) in (1u32..=3).zip(expected) {
        violations += count([
            osc * resummation_coefficient(Ratio::new(1, 2), n)? != o,
            resummation_coefficient(Ratio::new(1, 4), n - 1)? != q,
        ]);
    }
    Ok(violations)
}

fn gamma_sequence() -> Measure {
    let gammas = VariationalOrder::ALL
        .iter()
        .map(|&o| optimize_ground_state(o, &P).map(|r| r.gamma))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(count(gammas.windows(2).map(|w| !(w[0] < w[1] && (0.5 - w[1]).abs() < (0.5 - w[0]).abs()))))
}

fn rs_frequency_independence() -> Measure {
    let t = default_rs_truncation();
    Ok((rs_second_order_energy(1.0, &P, t)? - rs_second_order_energy(2.0, &P, t)?).abs())
}

fn rs_second_order_value() -> Measure {
    Ok((rs_second_order_energy(1.0, &P, default_rs_truncation())? - second_order_constant()).abs())
}

fn ground_matrix_element() -> Measure {
    let g = QuantumNumbers::GROUND;
    Ok(max_of(
        [0.5, 1.0, 2.0]
            .map(|w: f64| rs_matrix_element(g, g, w, &P).map_or(f64::NAN, |v| (v + 2.0 * (w / PI).sqrt()).abs())),
    ))
}

fn hypergeometric_gamma() -> Measure {
    use statrs::function::gamma::gamma;
    // Γ(α+k)/Γ(α) with Γ at negative half-integers and the terminating
    // factor (−n′)_k = (−1)^k n′!/(n′−k)!.
    let mut worst: f64 = 0.0;
    for n in 0..=10u32 {
        for np in 0..=10u32 {
            let mut sum = 0.0;
            let mut scale: f64 = 1.0;
            for k in 0..=np {
                let kf = k as f64;
                let neg = (-1f64).powi(k as i32) * gamma(np as f64 + 1.0) / gamma((np - k) as f64 + 1.0);
                let poch = |a: f64| gamma(a + kf) / gamma(a);
                let t = neg * poch(1.0) * poch(0.5) / (poch(1.5) * poch(0.5 - n as f64) * gamma(kf + 1.0));
                scale = scale.max(t.abs());
                sum += t;
            }
            worst = worst.max((hyp3f2_terminating(np, 0, n) - sum).abs() / scale);
        }
    }
    Ok(worst)
}

fn double_time_closed_form() -> Measure {
    let (beta, omega) = (8.0, 1.0);
    let tol = Tolerance { abs_tol: 1e-9, rel_tol: 1e-7, max_subdivisions: 200 };
    let conn = |d: f64| zero_t_connected_coulomb_pair(omega, d.abs(), &P).unwrap_or(f64::NAN);
    let direct = integrate_finite(
        |t1| integrate_with_breaks(|t2| conn(t1 - t2), &[0.0, t1.max(1e-300), beta], tol).unwrap_or(f64::NAN),
        0.0,
        beta,
        tol.scaled(10.0),
    )?;
    let closed = ccc_double_time_integral(beta, omega, &P)?;
    Ok((direct / closed - 1.0).abs())
}

fn constant_c_band() -> Measure {
    let c = constant_c(default_c_truncation())?;
    Ok(count([!(0.0313..=0.0323).contains(&c)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes() {
        for outcome in run_all(None) {
            assert!(outcome.passed(), "{outcome:?}");
        }
    }

    #[test]
    fn tiny_tolerance_fails_with_residuals() {
        let outcomes = run_all(Some(1e-20));
        assert!(outcomes.iter().any(|o| !o.passed()));
        assert!(outcomes.iter().all(|o| o.residual.is_some()));
    }

    #[test]
    fn names_are_unique() {
        let mut names: Vec<_> = registry().iter().map(|c| c.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), registry().len());
    }
}
