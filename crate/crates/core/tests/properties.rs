use ecp_core::correlator::{Correlator, ModelParams, ThermalState};
use ecp_core::coulomb::{coulomb_pair, coulomb_smeared, w1, w2, TrialFrequencies};
use ecp_core::numerics::{
    find_root, finite_difference, integrate_finite, integrate_with_breaks, minimize_scalar, Bracket, DerivativeOrder,
    Tolerance,
};
use ecp_core::smearing::{
    exp_product_expectation, reduce_fluct_square_1d, smear_pair_1d, smear_single_1d, smear_single_3d, wick_moment,
    wick_pairings, AnisotropicKernel3D, GaussianKernel1D,
};
use proptest::prelude::*;

const P: ModelParams = ModelParams::ATOMIC;

fn smooth(p: f64, q: f64) -> impl Fn(f64) -> f64 {
    move |x| (p * x).sin() + q * x * x / (1.0 + x * x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quadrature_is_linear(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, p in 0.1f64..4.0, q in -2.0f64..2.0,
                            a in -2.0f64..0.0, b in 0.5f64..3.0) {
        let tol = Tolerance::INNER;
        let f = smooth(p, q);
        let g = |x: f64| (-x * x).exp() * (1.0 + 0.3 * x);
        let lhs = integrate_finite(|x| alpha * f(x) + beta * g(x), a, b, tol).unwrap();
        let (fi, gi) = (integrate_finite(&f, a, b, tol).unwrap(), integrate_finite(g, a, b, tol).unwrap());
        let budget = (alpha.abs() + beta.abs() + 1.0) * tol.budget(fi.abs() + gi.abs() + lhs.abs());
        prop_assert!((lhs - alpha * fi - beta * gi).abs() <= budget);
    }

    #[test]
    fn quadrature_is_additive(p in 0.1f64..4.0, q in -2.0f64..2.0, split in 0.01f64..0.99) {
        let tol = Tolerance::INNER;
        let f = smooth(p, q);
        let (a, b) = (-1.0, 2.5);
        let c = a + split * (b - a);
        let whole = integrate_finite(&f, a, b, tol).unwrap();
        let parts = integrate_finite(&f, a, c, tol).unwrap() + integrate_finite(&f, c, b, tol).unwrap();
        prop_assert!((whole - parts).abs() <= 2.0 * tol.budget(whole));
    }

    #[test]
    fn solvers_are_bit_deterministic(shift in -1.0f64..1.0, scale in 0.5f64..3.0) {
        let g = |x: f64| scale * (x - shift).powi(3) + (x - shift) - 0.1;
        let bracket = Bracket::new(-3.0, 3.0).unwrap();
        let r1 = find_root(g, bracket, Tolerance::INNER).unwrap();
        let r2 = find_root(g, bracket, Tolerance::INNER).unwrap();
        prop_assert_eq!(r1.to_bits(), r2.to_bits());
        let h = |x: f64| scale * (x - shift).powi(2) + 0.1 * (3.0 * x).cos();
        let m1 = minimize_scalar(h, Bracket::new(-2.5, 2.5).unwrap(), Tolerance::INNER).unwrap();
        let m2 = minimize_scalar(h, Bracket::new(-2.5, 2.5).unwrap(), Tolerance::INNER).unwrap();
        prop_assert_eq!(m1.x.to_bits(), m2.x.to_bits());
    }

    #[test]
    fn finite_differences_exact_on_cubics(c in prop::array::uniform4(-3.0f64..3.0), x in -2.0f64..2.0) {
        let h = |x: f64| c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
        let exact = c[1] + 2.0 * c[2] * x + 3.0 * c[3] * x * x;
        let d = finite_difference(h, x, DerivativeOrder::First, None);
        prop_assert!((d - exact).abs() <= 1e-6 * exact.abs().max(1.0));
    }

    #[test]
    fn correlator_integrates_to_zero(beta in 0.1f64..10.0, omega in 0.1f64..10.0) {
        let c = Correlator::new(beta, omega, P).unwrap();
        let v = integrate_with_breaks(
            |d| c.pair_correlation(d).unwrap(),
            &[0.0, 0.5 * c.period(), c.period()],
            Tolerance::INNER.scaled(1e-3),
        ).unwrap();
        prop_assert!(v.abs() <= 1e-8 * c.equal_time_width());
    }

    #[test]
    fn correlator_reflection_and_bound(beta in 0.1f64..10.0, omega in 0.1f64..10.0, frac in 0.0f64..=1.0) {
        let c = Correlator::new(beta, omega, P).unwrap();
        let d = frac * c.period();
        let (a, b) = (c.pair_correlation(d).unwrap(), c.pair_correlation(c.period() - d).unwrap());
        prop_assert!((a - b).abs() <= 1e-14 * c.equal_time_width());
        prop_assert!(a.abs() <= c.equal_time_width() * (1.0 + 1e-14));
        prop_assert!(c.l4() >= 0.0);
    }

    #[test]
    fn width_decreases_with_frequency(beta in 0.1f64..10.0, omega in 0.05f64..10.0, factor in 1.01f64..3.0) {
        let lo = Correlator::new(beta, omega, P).unwrap().equal_time_width();
        let hi = Correlator::new(beta, omega * factor, P).unwrap().equal_time_width();
        prop_assert!(hi > 0.0 && hi < lo);
    }

    #[test]
    fn one_dimensional_rule(x0 in -2.0f64..2.0, a2 in 0.1f64..3.0, rho in -0.99f64..0.99, p in 0.1f64..2.0, q in -1.0f64..1.0) {
        let k = GaussianKernel1D::pair(x0, a2, rho * a2).unwrap();
        let f = smooth(p, q);
        let direct = smear_pair_1d(&f, |x| (x - x0).powi(2), &k).unwrap();
        prop_assert!((direct - reduce_fluct_square_1d(&f, &k).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn exponential_expectation(u in -3.0f64..3.0, a2 in 0.1f64..3.0) {
        let quad = smear_single_1d(|x| (u * x).cos(), &GaussianKernel1D::single(0.0, a2).unwrap()).unwrap();
        prop_assert!((quad - exp_product_expectation(&[u], &[vec![a2]]).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn wick_pairings_match_moments(a2 in 0.1f64..3.0, half in 1usize..=4) {
        let n = 2 * half;
        let m = wick_moment(n as u32, a2.sqrt());
        prop_assert!((wick_pairings(&vec![vec![a2; n]; n]).unwrap() - m).abs() <= 1e-12 * m);
    }

    #[test]
    fn smearing_is_translation_invariant(x0 in -2.0f64..2.0, a2 in 0.1f64..3.0, rho in -0.9f64..0.9, shift in -5.0f64..5.0) {
        let f = |x: f64| (-0.3 * x * x).exp() + 0.1 * x;
        let k = GaussianKernel1D::pair(x0, a2, rho * a2).unwrap();
        let kp = GaussianKernel1D::pair(x0 + shift, a2, rho * a2).unwrap();
        let a = smear_pair_1d(f, f, &k).unwrap();
        let b = smear_pair_1d(|x| f(x - shift), |x| f(x - shift), &kp).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn smeared_coulomb_slope_is_negative(r0 in 0.05f64..8.0, at in 0.1f64..2.0, al in 0.1f64..2.0) {
        let d = finite_difference(|r| coulomb_smeared(r, at, al).unwrap(), r0, DerivativeOrder::First, None);
        prop_assert!(d < 0.0);
    }

    #[test]
    fn pair_bounds_squared_mean(r0 in 0.0f64..4.0, at in 0.1f64..2.0, al in 0.1f64..2.0) {
        let k = AnisotropicKernel3D::equal_time(r0, at, al).unwrap();
        let mean = coulomb_smeared(r0, at, al).unwrap();
        prop_assert!(coulomb_pair(&k).unwrap() >= mean * mean);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn three_dimensional_translation(r0 in 0.0f64..2.0, at in 0.2f64..1.5, al in 0.2f64..1.5, shift in -3.0f64..3.0) {
        let g = |rho: f64, z: f64| (-(rho * rho + z * z) / 3.0).exp();
        let k = AnisotropicKernel3D::independent(r0, at, al).unwrap();
        let kp = AnisotropicKernel3D::independent(r0 + shift, at, al).unwrap();
        let a = smear_single_3d(g, &k).unwrap();
        let b = smear_single_3d(|rho, z| g(rho, z - shift), &kp).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn second_order_approaches_first_at_high_temperature(r0 in 0.2f64..5.0, omega in 0.1f64..3.0) {
        let th = ThermalState::finite(1e-3).unwrap();
        let f = TrialFrequencies::isotropic(omega).unwrap();
        let a = w1(r0, f, th, &P).unwrap();
        prop_assert!(((w2(r0, f, th, &P).unwrap() - a) / a).abs() < 1e-3);
    }
}
