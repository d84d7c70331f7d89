use super::{GroundStateError, Result};
use crate::correlator::ModelParams;
use crate::numerics::{sum_series_with_tail, NumericsError, SeriesTruncation};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

/// Largest radial quantum number accepted by [`rs_matrix_element`].
pub const MAX_QUANTUM_NUMBER: u32 = 500;

/// Oscillator eigenstate labels: radial n, angular l, magnetic m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantumNumbers {
    n: u32,
    l: u32,
    m: i32,
}

impl QuantumNumbers {
    pub const GROUND: QuantumNumbers = QuantumNumbers { n: 0, l: 0, m: 0 };

    pub fn new(n: u32, l: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > l {
            return Err(GroundStateError::InvalidInput("|m| must not exceed l"));
        }
        Ok(QuantumNumbers { n, l, m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> i32 {
        self.m
    }
}

/// ₃F₂(−n′, l+1, ½; l+3/2, ½−n; 1), which terminates after n′ + 1 terms.
/// Pochhammer symbols are accumulated as running products.
pub fn hyp3f2_terminating(n_prime: u32, l: u32, n: u32) -> f64 {
    let (np, l, n) = (n_prime as f64, l as f64, n as f64);
    let (mut sum, mut term) = (1.0, 1.0);
    for k in 0..n_prime {
        let k = k as f64;
        term *= (k - np) * (l + 1.0 + k) * (0.5 + k) / ((l + 1.5 + k) * (0.5 - n + k) * (k + 1.0));
        sum += term;
    }
    sum
}

/// ⟨n l m| −e²/r |n′ l′ m′⟩ in the eigenbasis of an isotropic oscillator of
/// frequency ω:
///
/// ```text
/// −e²√(Mω/πℏ) · Γ(l+1)Γ(n+½)/Γ(l+3/2) · √(Γ(n′+l+3/2)/(n! n′! Γ(n+l+3/2)))
///     · ₃F₂(−n′, l+1, ½; l+3/2, ½−n; 1) · δ_{ll′} δ_{mm′}
/// ```
///
/// The element is symmetric; it is evaluated with n ≥ n′, where the
/// terminating series has no cancellation.
pub fn rs_matrix_element(a: QuantumNumbers, b: QuantumNumbers, omega: f64, params: &ModelParams) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(GroundStateError::InvalidInput("omega must be positive and finite"));
    }
    for value in [a.n, b.n] {
        if value > MAX_QUANTUM_NUMBER {
            return Err(GroundStateError::QuantumNumberTooLarge { value, limit: MAX_QUANTUM_NUMBER });
        }
    }
    if a.l != b.l || a.m != b.m {
        return Ok(0.0);
    }
    let (n, np, l) = (a.n.max(b.n), a.n.min(b.n), a.l);
    let (nf, npf, lf) = (n as f64, np as f64, l as f64);
    let log_gamma = ln_gamma(lf + 1.0) + ln_gamma(nf + 0.5) - ln_gamma(lf + 1.5)
        + 0.5 * (ln_gamma(npf + lf + 1.5) - ln_gamma(nf + 1.0) - ln_gamma(npf + 1.0) - ln_gamma(nf + lf + 1.5));
    let scale = params.e2 * (params.mass * omega / (PI * params.hbar)).sqrt();
    Ok(-scale * log_gamma.exp() * hyp3f2_terminating(np, l, n))
}

/// ⟨0 0 0| −e²/r |n 0 0⟩ in units of e²√(Mω/ℏ).
fn ground_coupling(n: usize) -> f64 {
    let n = n as f64;
    let log_gamma = ln_gamma(n + 0.5) - ln_gamma(1.5) + 0.5 * (ln_gamma(1.5) - ln_gamma(n + 1.0) - ln_gamma(n + 1.5));
    -log_gamma.exp() / PI.sqrt()
}

/// Default truncation for [`rs_second_order_energy`].
pub fn default_rs_truncation() -> SeriesTruncation {
    SeriesTruncation { max_terms: 2000, tail_tol: 1e-7 }
}

/// Default truncation for [`constant_c`].
pub fn default_c_truncation() -> SeriesTruncation {
    SeriesTruncation { max_terms: 2000, tail_tol: 1e-5 }
}

/// Second-order Rayleigh–Schrödinger shift of the oscillator ground state
/// by −e²/r, Σ_{n≥1} |V_{000;n00}|²/(E₀₀₀ − E_{n00}); only l = m = 0
/// states couple. The terms fall off as n^{−5/2}/π^{3/2}; the remainder
/// is estimated by the integral from N + ½.
pub fn rs_second_order_energy(omega: f64, params: &ModelParams, truncation: SeriesTruncation) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(GroundStateError::InvalidInput("omega must be positive and finite"));
    }
    let coupling2 = params.e2 * params.e2 * params.mass * omega / params.hbar;
    let quantum = params.hbar * omega;
    let sum = sum_series_with_tail(
        |n| coupling2 * ground_coupling(n).powi(2) / (-2.0 * n as f64 * quantum),
        |n| -params.natural_energy() * (2.0 / 3.0) * (n as f64 + 0.5).powf(-1.5) / PI.powf(1.5),
        truncation,
    )?;
    Ok(sum)
}

/// [`rs_second_order_energy`] in units of Me⁴/ℏ²; independent of ω.
pub fn rs_second_order_coefficient(truncation: SeriesTruncation) -> Result<f64> {
    rs_second_order_energy(1.0, &ModelParams::ATOMIC, truncation)
}

/// Weights (2n−1)!!/(2n)!! for n = 0..=n_max as a running product.
fn double_factorial_ratios(n_max: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n_max + 1);
    w.push(1.0);
    for n in 1..=n_max {
        w.push(w[n - 1] * (2 * n - 1) as f64 / (2 * n) as f64);
    }
    w
}

/// Single and double sums of the third-order constant truncated at n_max.
///
/// In the double sum, w_n w_{n′} ₃F₂(−n′, 1, ½; 3/2, ½−n; 1) equals
/// T_{nn′}/(2n′+1) with T_{nn′} = Σ_j w_{n−j} w_{n′−j}, which obeys
/// T_{nn′} = T_{n−1,n′−1} + w_n w_{n′} and is accumulated along diagonals.
fn c_sums(n_max: usize) -> (f64, f64) {
    let w = double_factorial_ratios(n_max);
    let single: f64 = (1..=n_max).map(|n| w[n] / ((n * n) as f64 * (n as f64 + 0.5))).sum();
    let mut double = 0.0;
    let starts = (0..=n_max).map(|d| (0, d)).chain((1..=n_max).map(|d| (d, 0)));
    for (n0, np0) in starts {
        let mut t = w[n0] * w[np0];
        for step in 1..=(n_max - n0.max(np0)) {
            let (n, np) = (n0 + step, np0 + step);
            t += w[n] * w[np];
            double += t / ((2 * np + 1) as f64 * n as f64 * np as f64 * (n as f64 + 0.5));
        }
    }
    (single, double)
}

fn c_truncated(n_max: usize) -> f64 {
    let (single, double) = c_sums(n_max);
    (double - single) / PI.powf(1.5)
}

/// Third-order Rayleigh–Schrödinger constant c ≈ 0.0318, defined by the
/// e⁶ term −c·√(M³/ℏ⁷ω)·e⁶ of the oscillator-plus-Coulomb ground state.
///
/// The double sum converges as N^{−3/2}; sums truncated at N and N/2 are
/// Richardson-extrapolated. If the extrapolation step exceeds
/// `truncation.tail_tol` the partial value is returned in the error.
pub fn constant_c(truncation: SeriesTruncation) -> Result<f64> {
    let n = truncation.max_terms;
    if n < 4 {
        return Err(GroundStateError::InvalidInput("constant_c needs at least 4 terms"));
    }
    let (full, half) = (c_truncated(n), c_truncated(n / 2));
    let ratio = (n as f64 / (n / 2) as f64).powf(1.5);
    let step = (full - half) / (ratio - 1.0);
    if !(step.abs() <= truncation.tail_tol) {
        return Err(NumericsError::SeriesNotConverged { partial: full, terms: n }.into());
    }
    Ok(full + step)
}

#[cfg(test)]
pub(crate) fn c_parts(n_max: usize) -> (f64, f64) {
    c_sums(n_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: ModelParams = ModelParams::ATOMIC;

    fn qn(n: u32, l: u32, m: i32) -> QuantumNumbers {
        QuantumNumbers::new(n, l, m).unwrap()
    }

    #[test]
    fn quantum_numbers_validate_m() {
        assert!(QuantumNumbers::new(0, 1, -1).is_ok());
        assert!(QuantumNumbers::new(0, 1, 2).is_err());
    }

    #[test]
    fn hypergeometric_hand_values() {
        assert_eq!(hyp3f2_terminating(0, 3, 7), 1.0);
        assert!((hyp3f2_terminating(1, 0, 1) - 5.0 / 3.0).abs() < 1e-15);
        assert!((hyp3f2_terminating(1, 0, 0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn hypergeometric_matches_gamma_ratios() {
        fn poch_ratio(a: f64, k: u32) -> (f64, f64) {
            // sign and log|Γ(a+k)/Γ(a)| through the reflection-free product for small k
            let mut s = 1.0;
            let mut lg = 0.0;
            for j in 0..k {
                let v = a + j as f64;
                s *= v.signum();
                lg += v.abs().ln();
            }
            (s, lg)
        }
        for n in 0..=10u32 {
            for np in 0..=10u32 {
                for l in 0..3u32 {
                    let mut terms = Vec::new();
                    for k in 0..=np {
                        let parts = [
                            poch_ratio(-(np as f64), k),
                            poch_ratio(l as f64 + 1.0, k),
                            poch_ratio(0.5, k),
                            poch_ratio(l as f64 + 1.5, k),
                            poch_ratio(0.5 - n as f64, k),
                        ];
                        let sign = parts.iter().map(|p| p.0).product::<f64>();
                        let lg =
                            parts[0].1 + parts[1].1 + parts[2].1 - parts[3].1 - parts[4].1 - ln_gamma(k as f64 + 1.0);
                        terms.push(sign * lg.exp());
                    }
                    let direct: f64 = terms.iter().sum();
                    let scale = terms.iter().map(|t| t.abs()).fold(1.0, f64::max);
                    let run = hyp3f2_terminating(np, l, n);
                    assert!((run - direct).abs() < 1e-12 * scale, "n={n} n'={np} l={l}: {run} vs {direct}");
                }
            }
        }
    }

    #[test]
    fn ground_diagonal_element() {
        for omega in [0.5, 1.0, 2.0] {
            let v = rs_matrix_element(QuantumNumbers::GROUND, QuantumNumbers::GROUND, omega, &P).unwrap();
            assert!((v + 2.0 * (omega / PI).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn selection_rules_and_guard() {
        assert_eq!(rs_matrix_element(qn(1, 0, 0), qn(1, 1, 0), 1.0, &P).unwrap(), 0.0);
        assert_eq!(rs_matrix_element(qn(1, 1, 1), qn(1, 1, -1), 1.0, &P).unwrap(), 0.0);
        assert!(matches!(
            rs_matrix_element(qn(501, 0, 0), qn(0, 0, 0), 1.0, &P),
            Err(GroundStateError::QuantumNumberTooLarge { value: 501, .. })
        ));
    }

    #[test]
    fn matrix_element_matches_radial_quadrature() {
        use crate::numerics::{integrate_semi_infinite, Tolerance};
        // Radial functions from the Laguerre recurrence, ω = M = ℏ = 1.
        fn laguerre(n: u32, alpha: f64, x: f64) -> f64 {
            let (mut prev, mut cur) = (0.0, 1.0);
            for k in 0..n {
                let k = k as f64;
                let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
                prev = cur;
                cur = next;
            }
            cur
        }
        fn radial(n: u32, l: u32, r: f64) -> f64 {
            let (nf, lf) = (n as f64, l as f64);
            let norm = (2.0 * (ln_gamma(nf + 1.0) - ln_gamma(nf + lf + 1.5)).exp()).sqrt();
            norm * r.powi(l as i32) * laguerre(n, lf + 0.5, r * r) * (-r * r / 2.0).exp()
        }
        for (n, np, l) in [(0, 0, 0), (1, 0, 0), (2, 5, 0), (3, 1, 1), (4, 4, 2), (0, 6, 1)] {
            let direct = -integrate_semi_infinite(
                |r| r * radial(n, l, r) * radial(np, l, r),
                1.0,
                Tolerance::INNER.scaled(1e-3),
            )
            .unwrap();
            let closed = rs_matrix_element(qn(n, l, 0), qn(np, l, 0), 1.0, &P).unwrap();
            assert!((direct - closed).abs() < 1e-10, "({n},{np},{l}): {direct} vs {closed}");
        }
    }

    #[test]
    fn matrix_element_is_symmetric() {
        // The formula evaluated with the smaller index first, where the
        // series is still accurate, against the production ordering.
        let raw = |n: u32, np: u32, l: u32| {
            let (nf, npf, lf) = (n as f64, np as f64, l as f64);
            let lg = ln_gamma(lf + 1.0) + ln_gamma(nf + 0.5) - ln_gamma(lf + 1.5)
                + 0.5 * (ln_gamma(npf + lf + 1.5) - ln_gamma(nf + 1.0) - ln_gamma(npf + 1.0) - ln_gamma(nf + lf + 1.5));
            -(1.3 / PI).sqrt() * lg.exp() * hyp3f2_terminating(np, l, n)
        };
        for l in 0..3 {
            for (n, np) in [(0, 7), (3, 9), (1, 12), (6, 10)] {
                let a = rs_matrix_element(qn(n, l, 0), qn(np, l, 0), 1.3, &P).unwrap();
                let b = raw(n, np, l);
                assert!((a - b).abs() < 1e-12, "l={l} ({n},{np}): {a} vs {b}");
                assert_eq!(a, rs_matrix_element(qn(np, l, 0), qn(n, l, 0), 1.3, &P).unwrap());
            }
        }
    }

    #[test]
    fn ground_coupling_matches_matrix_element() {
        for n in [1u32, 2, 10, 400] {
            let v = rs_matrix_element(QuantumNumbers::GROUND, qn(n, 0, 0), 1.0, &P).unwrap();
            assert!((v - ground_coupling(n as usize)).abs() < 1e-14);
        }
    }

    #[test]
    fn second_order_sum() {
        let exact = -(4.0 / PI) * (1.0 + 2f64.ln() - PI / 2.0);
        let v = rs_second_order_coefficient(default_rs_truncation()).unwrap();
        assert!((v - exact).abs() < 1e-6, "{v} vs {exact}");
        let first_term = ground_coupling(1).powi(2) / -2.0;
        assert!(first_term < 0.0);
        let t = SeriesTruncation::new(1, 1e3).unwrap();
        let one = sum_series_with_tail(|n| ground_coupling(n).powi(2) / (-2.0 * n as f64), |_| 0.0, t).unwrap();
        assert_eq!(one, first_term);
    }

    #[test]
    fn second_order_is_frequency_independent() {
        let t = default_rs_truncation();
        let a = rs_second_order_energy(1.0, &P, t).unwrap();
        let b = rs_second_order_energy(2.0, &P, t).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn third_order_constant_from_matrix_elements() {
        // E₃ = Σ' V₀ₙVₙₘVₘ₀/((E₀−Eₙ)(E₀−Eₘ)) − V₀₀ Σ' V₀ₙ²/(E₀−Eₙ)², truncated
        // at the same N, must equal −c before extrapolation.
        let n_max = 60u32;
        let v = |a: u32, b: u32| rs_matrix_element(qn(a, 0, 0), qn(b, 0, 0), 1.0, &P).unwrap();
        let mut e3 = 0.0;
        for n in 1..=n_max {
            for m in 1..=n_max {
                e3 += v(0, n) * v(n, m) * v(m, 0) / ((2 * n) as f64 * (2 * m) as f64);
            }
            e3 -= v(0, 0) * v(0, n).powi(2) / (4 * n * n) as f64;
        }
        assert!((e3 + c_truncated(n_max as usize)).abs() < 1e-12, "{e3} vs {}", c_truncated(n_max as usize));
    }

    #[test]
    fn diagonal_recursion_matches_hypergeometric_kernel() {
        let w = double_factorial_ratios(40);
        for n in 1..=30usize {
            for np in 1..=30usize {
                let t: f64 = (0..=n.min(np)).map(|j| w[n - j] * w[np - j]).sum();
                let lhs = w[n] * w[np] * hyp3f2_terminating(np as u32, 0, n as u32);
                let rhs = t / (2 * np + 1) as f64;
                if n >= np {
                    assert!((lhs - rhs).abs() < 1e-13, "({n},{np}): {lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn c_value_and_truncation_drift() {
        let c = constant_c(default_c_truncation()).unwrap();
        assert!((c - 0.0318).abs() < 5e-4, "{c}");
        let c4000 = constant_c(SeriesTruncation::new(4000, 1e-5).unwrap()).unwrap();
        assert!((c - c4000).abs() < 1e-6, "{c} vs {c4000}");
        let (single, double) = c_parts(2000);
        assert!(single > 0.0 && double > single);
        assert!((single - 0.389_249_25).abs() < 1e-7, "{single}");
    }

    #[test]
    fn c_reports_slow_convergence() {
        let t = SeriesTruncation::new(16, 1e-9).unwrap();
        assert!(matches!(
            constant_c(t),
            Err(GroundStateError::Numerics(NumericsError::SeriesNotConverged { terms: 16, .. }))
        ));
    }
}
