use super::perturbation::{constant_c, default_c_truncation, default_rs_truncation, rs_second_order_coefficient};
use super::{GroundStateError, Result};
use crate::correlator::ModelParams;
use crate::numerics::{
    find_root, finite_difference, minimize_scalar, Bracket, DerivativeOrder, SeriesTruncation, Tolerance,
};
use num_rational::Ratio;
use std::f64::consts::{LN_2, PI};

/// Largest expansion order accepted by [`resummation_coefficient`]; beyond
/// it the exact rationals may overflow `i64`.
pub const MAX_RESUMMATION_ORDER: u32 = 12;

/// Truncation order N of the variational ground-state energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VariationalOrder {
    First,
    Second,
    Third,
}

impl VariationalOrder {
    pub const ALL: [VariationalOrder; 3] = [VariationalOrder::First, VariationalOrder::Second, VariationalOrder::Third];

    pub fn as_u8(self) -> u8 {
        match self {
            VariationalOrder::First => 1,
            VariationalOrder::Second => 2,
            VariationalOrder::Third => 3,
        }
    }
}

impl TryFrom<u8> for VariationalOrder {
    type Error = GroundStateError;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            1 => Ok(VariationalOrder::First),
            2 => Ok(VariationalOrder::Second),
            3 => Ok(VariationalOrder::Third),
            _ => Err(GroundStateError::InvalidInput("order must be 1, 2 or 3")),
        }
    }
}

/// Optimized variational ground state of order N. `energy = −gamma·Me⁴/ℏ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateResult {
    pub order: VariationalOrder,
    pub omega_star: f64,
    pub gamma: f64,
    pub energy: f64,
}

/// −(4/π)(1 + ln 2 − π/2), the e⁴ coefficient of the ground-state energy in
/// units of Me⁴/ℏ².
pub fn second_order_constant() -> f64 {
    -(4.0 / PI) * (1.0 + LN_2 - PI / 2.0)
}

/// Σ_{j=0}^{K} binom(p, j)(−1)^j: the expansion of (1 − 1)^p in its second
/// argument truncated after K terms, exactly.
pub fn resummation_coefficient(power: Ratio<i64>, k: u32) -> Result<Ratio<i64>> {
    if k > MAX_RESUMMATION_ORDER {
        return Err(GroundStateError::InvalidInput("resummation order exceeds MAX_RESUMMATION_ORDER"));
    }
    let mut binom = Ratio::from_integer(1);
    let mut sum = binom;
    for j in 1..=k as i64 {
        binom = -binom * (power - (j - 1)) / j;
        sum += binom;
    }
    Ok(sum)
}

/// One term coefficient·ℏω·g^k of the perturbation series, with the
/// dimensionless coupling g = e²√(M/ℏ³ω); `power` = 1 − k/2 is the
/// resulting exponent of ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsTerm {
    pub power: Ratio<i64>,
    pub coefficient: f64,
}

/// Ground-state energy of the oscillator plus Coulomb potential through
/// order e⁶:
/// (3/2)ℏω − (2/√π)√(Mω/ℏ)e² + s·Me⁴/ℏ² − c·√(M³/ℏ⁷ω)e⁶.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsExpansion {
    pub terms: [RsTerm; 4],
}

impl RsExpansion {
    /// From the second-order coefficient s and the third-order constant c.
    pub fn with_constants(second: f64, c: f64) -> Self {
        let term = |n, d, coefficient| RsTerm { power: Ratio::new(n, d), coefficient };
        RsExpansion { terms: [term(1, 1, 1.5), term(1, 2, -2.0 / PI.sqrt()), term(0, 1, second), term(-1, 2, -c)] }
    }

    /// Constants from the numerical sums over matrix elements.
    pub fn compute(rs: SeriesTruncation, c: SeriesTruncation) -> Result<Self> {
        Ok(Self::with_constants(rs_second_order_coefficient(rs)?, constant_c(c)?))
    }

    pub fn energy(&self, omega: f64, params: &ModelParams) -> f64 {
        let g = (params.natural_frequency() / omega).sqrt();
        params.hbar * omega * self.terms.iter().rev().fold(0.0, |acc, t| acc * g + t.coefficient)
    }

    /// Replaces ω by Ω(1 − 1)^{1/2}, expands every term to the total order
    /// N in the second 1 and drops terms beyond order N. `energy` of the
    /// result is the variational energy as a function of Ω.
    pub fn reexpanded(&self, order: VariationalOrder) -> Result<Self> {
        let n = order.as_u8() as u32;
        let mut terms = self.terms;
        for (k, t) in terms.iter_mut().enumerate() {
            let k = k as u32;
            t.coefficient = if k > n {
                0.0
            } else {
                let f = resummation_coefficient(t.power / 2, n - k)?;
                t.coefficient * *f.numer() as f64 / *f.denom() as f64
            };
        }
        Ok(RsExpansion { terms })
    }
}

/// Variational ground-state energy of order N at trial frequency Ω:
///
/// ```text
/// E₁ = ¾ℏΩ − (2/√π)√(MΩ/ℏ)e²
/// E₂ = 9/16·ℏΩ − (3/2√π)√(MΩ/ℏ)e² − (4/π)(1 + ln 2 − π/2)Me⁴/ℏ²
/// E₃ = 15/32·ℏΩ − (21/16√π)√(MΩ/ℏ)e² − (4/π)(1 + ln 2 − π/2)Me⁴/ℏ² − c√(M³/ℏ⁷Ω)e⁶
/// ```
///
/// `c` is used only for N = 3.
pub fn energy_variational(order: VariationalOrder, omega: f64, params: &ModelParams, c: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(GroundStateError::InvalidInput("omega must be positive and finite"));
    }
    let oscillator = params.hbar * omega;
    let coulomb = (params.mass * omega / params.hbar).sqrt() * params.e2;
    let e4 = second_order_constant() * params.natural_energy();
    let sqrt_pi = PI.sqrt();
    Ok(match order {
        VariationalOrder::First => 0.75 * oscillator - 2.0 / sqrt_pi * coulomb,
        VariationalOrder::Second => 9.0 / 16.0 * oscillator - 1.5 / sqrt_pi * coulomb + e4,
        VariationalOrder::Third => {
            let e6 = (params.mass.powi(3) / (params.hbar.powi(7) * omega)).sqrt() * params.e2.powi(3);
            15.0 / 32.0 * oscillator - 21.0 / (16.0 * sqrt_pi) * coulomb + e4 - c * e6
        }
    })
}

/// g(c′) = 15c′³ − (21/√π)c′² + 16c, whose roots c′ = √(Ω/(Me⁴/ℏ³)) make E₃ stationary.
fn frequency_cubic(c: f64, x: f64) -> f64 {
    (15.0 * x - 21.0 / PI.sqrt()) * x * x + 16.0 * c
}

/// Largest of the three real roots of the stationarity cubic of E₃.
pub fn cubic_frequency_root(c: f64) -> Result<f64> {
    const STEPS: usize = 400;
    let grid: Vec<(f64, f64)> = (0..=STEPS)
        .map(|i| {
            let x = -2.0 + 4.0 * i as f64 / STEPS as f64;
            (x, frequency_cubic(c, x))
        })
        .collect();
    let tol = Tolerance::new(1e-15, 1e-14, 200)?;
    let mut roots = Vec::new();
    for w in grid.windows(2) {
        if w[0].1 == 0.0 {
            roots.push(w[0].0);
        } else if w[0].1.signum() != w[1].1.signum() && w[1].1 != 0.0 {
            roots.push(find_root(|x| frequency_cubic(c, x), Bracket::new(w[0].0, w[1].0)?, tol)?);
        }
    }
    if roots.len() != 3 {
        return Err(GroundStateError::CubicRoots { expected: 3, found: roots.len(), values: grid });
    }
    Ok(roots[2])
}

/// Optimal trial frequency and energy of order N. Orders 1 and 2 are
/// minimized numerically and the minimum is polished by a root of dE/dΩ;
/// order 3 takes the largest root of the
/// stationarity cubic with c from [`constant_c`].
pub fn optimize_ground_state(order: VariationalOrder, params: &ModelParams) -> Result<GroundStateResult> {
    let natural = params.natural_frequency();
    let (omega_star, c) = match order {
        VariationalOrder::First | VariationalOrder::Second => {
            let tol = Tolerance::new(1e-15 * natural, 1e-12, 500)?;
            let bracket = Bracket::new(1e-2 * natural, 1e2 * natural)?;
            let energy = |omega: f64| energy_variational(order, omega, params, 0.0).unwrap_or(f64::INFINITY);
            let min = minimize_scalar(energy, bracket, tol)?;
            // The minimum only locates Ω to ~√ε; the slope has a simple zero there.
            let slope = |omega: f64| finite_difference(energy, omega, DerivativeOrder::First, Some(6e-6 * omega));
            let polish = Bracket::new(0.9 * min.x, 1.1 * min.x)?;
            (find_root(slope, polish, Tolerance::new(1e-15 * natural, 1e-14, 200)?)?, 0.0)
        }
        VariationalOrder::Third => {
            let c = constant_c(default_c_truncation())?;
            (cubic_frequency_root(c)?.powi(2) * natural, c)
        }
    };
    let energy = energy_variational(order, omega_star, params, c)?;
    Ok(GroundStateResult { order, omega_star, gamma: -energy / params.natural_energy(), energy })
}

/// Default perturbation coefficients.
pub fn default_expansion() -> Result<RsExpansion> {
    RsExpansion::compute(default_rs_truncation(), default_c_truncation())
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: ModelParams = ModelParams::ATOMIC;

    #[test]
    fn resummation_hand_values() {
        assert_eq!(resummation_coefficient(Ratio::new(1, 2), 3).unwrap(), Ratio::new(5, 16));
        assert_eq!(resummation_coefficient(Ratio::new(1, 4), 2).unwrap(), Ratio::new(21, 32));
        assert_eq!(resummation_coefficient(Ratio::new(7, 3), 0).unwrap(), Ratio::from_integer(1));
        assert!(resummation_coefficient(Ratio::new(1, 2), MAX_RESUMMATION_ORDER + 1).is_err());
    }

    #[test]
    fn resummation_of_integer_power_vanishes() {
        // (1 − 1)^p = 0 exactly once K ≥ p for integer p ≥ 1.
        for p in 1..5 {
            for k in p..=MAX_RESUMMATION_ORDER as i64 {
                assert_eq!(resummation_coefficient(Ratio::from_integer(p), k as u32).unwrap(), Ratio::from_integer(0));
            }
        }
    }

    #[test]
    fn resummation_does_not_overflow_at_cap() {
        for (n, d) in [(1, 2), (1, 4), (-1, 4), (7, 4), (-3, 2), (5, 3)] {
            let r = resummation_coefficient(Ratio::new(n, d), MAX_RESUMMATION_ORDER).unwrap();
            let direct: f64 = (0..=MAX_RESUMMATION_ORDER as i32)
                .scan(1.0, |b, j| {
                    let v = *b;
                    *b *= -(n as f64 / d as f64 - j as f64) / (j + 1) as f64;
                    Some(v)
                })
                .sum();
            assert!((*r.numer() as f64 / *r.denom() as f64 - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn reexpansion_reproduces_variational_coefficients() {
        let half = Ratio::new(1, 2);
        let quarter = Ratio::new(1, 4);
        let osc = Ratio::new(3, 2);
        let expected = [
            (Ratio::new(3, 4), Ratio::from_integer(1)),
            (Ratio::new(9, 16), Ratio::new(3, 4)),
            (Ratio::new(15, 32), Ratio::new(21, 32)),
        ];
        for (n, (o, q)) in (1..=3u32).zip(expected) {
            assert_eq!(osc * resummation_coefficient(half, n).unwrap(), o);
            assert_eq!(resummation_coefficient(quarter, n - 1).unwrap(), q);
        }
        let e = RsExpansion::with_constants(second_order_constant(), 0.0318);
        for order in VariationalOrder::ALL {
            let r = e.reexpanded(order).unwrap();
            for omega in [0.3, 1.0, 2.5] {
                let a = r.energy(omega, &P);
                let b = energy_variational(order, omega, &P, 0.0318).unwrap();
                assert!((a - b).abs() < 1e-14, "{order:?} Ω={omega}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn expansion_energy_matches_term_units() {
        let p = ModelParams::new(1.3, 0.7, 2.1).unwrap();
        let e = RsExpansion::with_constants(-0.15, 0.03);
        let omega = 0.9;
        let expected = 1.5 * p.hbar * omega
            - 2.0 / PI.sqrt() * (p.mass * omega / p.hbar).sqrt() * p.e2
            - 0.15 * p.natural_energy()
            - 0.03 * (p.mass.powi(3) / (p.hbar.powi(7) * omega)).sqrt() * p.e2.powi(3);
        assert!((e.energy(omega, &p) - expected).abs() < 1e-13);
    }

    #[test]
    fn first_and_second_order_optimum() {
        let omega = 16.0 / (9.0 * PI);
        assert!(
            (energy_variational(VariationalOrder::First, omega, &P, 0.0).unwrap() + 4.0 / (3.0 * PI)).abs() < 1e-15
        );
        let g2 = (5.0 + 4.0 * LN_2) / PI - 2.0;
        assert!((energy_variational(VariationalOrder::Second, omega, &P, 0.0).unwrap() + g2).abs() < 1e-15);
        for (order, gamma) in [(VariationalOrder::First, 4.0 / (3.0 * PI)), (VariationalOrder::Second, g2)] {
            let r = optimize_ground_state(order, &P).unwrap();
            assert!((r.omega_star - omega).abs() < 1e-7, "{r:?}");
            assert!((r.gamma - gamma).abs() < 1e-12, "{r:?}");
            assert!((r.energy + r.gamma).abs() < 1e-15);
        }
    }

    #[test]
    fn third_order_optimum() {
        let r = optimize_ground_state(VariationalOrder::Third, &P).unwrap();
        let c_prime = r.omega_star.sqrt();
        assert!((c_prime - 0.7254).abs() < 1e-3, "{c_prime}");
        assert!((r.gamma - 0.490).abs() < 1e-3, "{}", r.gamma);
        // The root is a stationary point of E₃.
        let c = constant_c(default_c_truncation()).unwrap();
        let h = 1e-5;
        let d = (energy_variational(VariationalOrder::Third, r.omega_star + h, &P, c).unwrap()
            - energy_variational(VariationalOrder::Third, r.omega_star - h, &P, c).unwrap())
            / (2.0 * h);
        assert!(d.abs() < 1e-8, "{d}");
    }

    #[test]
    fn printed_cubic_does_not_reproduce_the_root() {
        // With 21/π instead of 21/√π the largest root is far from 0.7254.
        let c = 0.0318;
        let g = |x: f64| 15.0 * x * x * x - 21.0 / PI * x * x + 16.0 * c;
        let root = find_root(g, Bracket::new(0.3, 1.0).unwrap(), Tolerance::INNER);
        assert!(root.map_or(true, |r| (r - 0.7254).abs() > 0.1));
    }

    #[test]
    fn cubic_root_count_is_checked() {
        assert!(matches!(cubic_frequency_root(-1.0), Err(GroundStateError::CubicRoots { found: 1, .. })));
    }

    #[test]
    fn order_round_trip() {
        for o in VariationalOrder::ALL {
            assert_eq!(VariationalOrder::try_from(o.as_u8()).unwrap(), o);
        }
        assert!(VariationalOrder::try_from(0).is_err());
    }
}
