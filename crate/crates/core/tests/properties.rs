//! Randomized invariants of the numeric kernels.

mod common;

use jmfrac::cfrdtm::cfrdtm_solve;
use jmfrac::fracseries::{CoefFn, Exponent, FracSeries, Orders, TimeAxis};
use jmfrac::jets::{Elementary, Jet};
use jmfrac::jm_model::ModelSpec;
use jmfrac::qhatm::{qhatm_solve, HomotopyConfig};
use jmfrac::special::{gamma, gamma_ratio, ln_gamma};
use proptest::prelude::*;

use common::brute_product_at;

fn jet_strategy(order: usize) -> impl Strategy<Value = Jet> {
    prop::collection::vec(-2.0f64..2.0, order + 1).prop_map(|c| Jet::from_coeffs(0.3, c))
}

fn close(a: &Jet, b: &Jet, tol: f64) -> bool {
    a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

/// Coefficient functions built from a small random recipe.
fn coef_strategy() -> impl Strategy<Value = CoefFn> {
    (-1.5f64..1.5, 0.2f64..1.2, 0usize..3).prop_map(|(a, b, kind)| {
        let arg = CoefFn::x().scale(b);
        let f = match kind {
            0 => arg.sech(),
            1 => arg.tanh(),
            _ => arg.cosh(),
        };
        f.scale(a)
    })
}

fn series_strategy(orders: Orders) -> impl Strategy<Value = FracSeries> {
    prop::collection::vec((0u32..3, 0u32..3, coef_strategy()), 1..5).prop_map(move |terms| {
        let mut s = FracSeries::zero(orders);
        for (h, j, c) in terms {
            s.insert(Exponent::new(h, j), c);
        }
        s
    })
}

fn eval(s: &FracSeries, x: f64, t: f64) -> f64 {
    s.profile(x).unwrap().at(t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gamma_recurrence(x in 0.01f64..60.0) {
        let lhs = gamma(x + 1.0).unwrap();
        prop_assert!((lhs - x * gamma(x).unwrap()).abs() <= 1e-12 * lhs);
    }

    #[test]
    fn log_gamma_agrees_with_gamma(x in 0.01f64..100.0) {
        prop_assert!((ln_gamma(x).unwrap() - gamma(x).unwrap().ln()).abs() <= 1e-12 * ln_gamma(x).unwrap().abs().max(1.0));
    }

    #[test]
    fn gamma_ratio_is_antisymmetric(a in 0.05f64..200.0, d in -20.0f64..20.0) {
        let b = (a + d).max(0.05);
        let p = gamma_ratio(a, b).unwrap() * gamma_ratio(b, a).unwrap();
        prop_assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jet_product_is_commutative_and_associative(a in jet_strategy(5), b in jet_strategy(5), c in jet_strategy(5)) {
        prop_assert!(close(&a.mul(&b).unwrap(), &b.mul(&a).unwrap(), 1e-14));
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-13));
    }

    #[test]
    fn jet_product_rule(a in jet_strategy(6), b in jet_strategy(6)) {
        let lhs = a.mul(&b).unwrap().derivative(1).unwrap();
        let da = a.derivative(1).unwrap();
        let db = b.derivative(1).unwrap();
        let rhs = da.mul(&b.truncate(5)).unwrap().add(&a.truncate(5).mul(&db).unwrap()).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-13));
    }

    #[test]
    fn jet_exp_is_a_homomorphism(a in jet_strategy(5), b in jet_strategy(5)) {
        let lhs = a.add(&b).unwrap().exp();
        let rhs = a.exp().mul(&b.exp()).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn hyperbolic_identities(x0 in -3.0f64..3.0) {
        let x = Jet::lift(x0, 6);
        let t = x.elementary(Elementary::Tanh).unwrap();
        let s = x.elementary(Elementary::Sech).unwrap();
        let one = t.mul(&t).unwrap().add(&s.mul(&s).unwrap()).unwrap();
        prop_assert!(close(&one, &Jet::constant(x0, 6, 1.0), 1e-13));
    }

    #[test]
    fn truncating_a_high_order_jet_equals_direct_evaluation(f in coef_strategy(), x in -2.0f64..2.0, hi in 3usize..9) {
        let direct = f.dx(2).jet(x, 2).unwrap();
        let from_high = f.dx(2).jet(x, hi).unwrap().truncate(2);
        prop_assert!(close(&direct, &from_high, 1e-14));
    }

    #[test]
    fn integral_inverts_caputo_on_nonconstant_series(alpha in 0.05f64..=1.0, beta in 0.05f64..=1.0, x in -2.0f64..2.0, t in 0.0f64..1.0,
        terms in prop::collection::vec((1u32..4, 0u32..4, -3.0f64..3.0), 1..5)) {
        let o = Orders::new(alpha, beta).unwrap();
        let mut s = FracSeries::zero(o);
        for (h, j, c) in &terms {
            s.insert(Exponent::new(*h, *j), CoefFn::x().scale(*c).tanh());
        }
        let back = s.caputo_d(TimeAxis::Alpha).unwrap().rl_integral().unwrap();
        prop_assert!((eval(&back, x, t) - eval(&s, x, t)).abs() <= 1e-12);
    }

    #[test]
    fn caputo_and_spatial_derivatives_are_linear(alpha in 0.1f64..=1.0, c in -3.0f64..3.0, x in -2.0f64..2.0, t in 0.0f64..1.0,
        a in series_strategy(Orders::single(0.5).unwrap()), b in series_strategy(Orders::single(0.5).unwrap())) {
        let o = Orders::single(alpha).unwrap();
        let rebase = |s: &FracSeries| {
            let mut out = FracSeries::zero(o);
            for (k, f) in s.terms() {
                if k.h > 0 {
                    out.insert(k, f.clone());
                }
            }
            out
        };
        let (a, b) = (rebase(&a), rebase(&b));
        let sum = a.add(&b).unwrap().caputo_d(TimeAxis::Alpha).unwrap();
        let parts = a.caputo_d(TimeAxis::Alpha).unwrap().add(&b.caputo_d(TimeAxis::Alpha).unwrap()).unwrap();
        prop_assert!((eval(&sum, x, t) - eval(&parts, x, t)).abs() <= 1e-13 * (1.0 + eval(&parts, x, t).abs()));
        let scaled = a.scale(c).spatial_d(2);
        let outside = a.spatial_d(2).scale(c);
        prop_assert!((eval(&scaled, x, t) - eval(&outside, x, t)).abs() <= 1e-13 * (1.0 + eval(&outside, x, t).abs()));
    }

    #[test]
    fn product_matches_pairwise_expansion(alpha in 0.1f64..=1.0, beta in 0.1f64..=1.0, t in 0.0f64..1.0,
        a in prop::collection::vec((0u32..4, 0u32..4, -2.0f64..2.0), 1..6),
        b in prop::collection::vec((0u32..4, 0u32..4, -2.0f64..2.0), 1..6)) {
        let o = Orders::new(alpha, beta).unwrap();
        let build = |terms: &[(u32, u32, f64)]| {
            let mut s = FracSeries::zero(o);
            for &(h, j, c) in terms.iter().rev() {
                s.insert(Exponent::new(h, j), CoefFn::constant(c));
            }
            s
        };
        let got = eval(&build(&a).mul(&build(&b), None).unwrap(), 0.0, t);
        let want = brute_product_at(&a, &b, alpha, beta, t);
        prop_assert!((got - want).abs() <= 1e-13 * (1.0 + want.abs()) * 16.0);
    }

    #[test]
    fn raising_the_cap_only_adds_terms(o in (0.2f64..=1.0, 0.2f64..=1.0), x in -2.0f64..2.0, t in 0.0f64..1.0, k in 0u32..3,
        s in series_strategy(Orders::single(1.0).unwrap())) {
        let orders = Orders::new(o.0, o.1).unwrap();
        let mut series = FracSeries::zero(orders);
        for (key, c) in s.terms() {
            series.insert(key, c.clone());
        }
        let added: f64 = series
            .terms()
            .filter(|(key, _)| key.lattice_order() == k + 1)
            .map(|(key, c)| c.value(x).unwrap() * t.powf(key.value(orders)))
            .sum();
        let step = series.evaluate(x, t, k + 1).unwrap() - series.evaluate(x, t, k).unwrap();
        prop_assert!((step - added).abs() <= 1e-13 * (1.0 + added.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn engines_agree_through_first_order(alpha in 0.1f64..=1.0, x in -2.0f64..2.0, t in 0.0f64..=0.5) {
        let model = ModelSpec::new(0.5, alpha, alpha).unwrap();
        let (qv, qw) = qhatm_solve(&model, &HomotopyConfig::new(1, -1.0, alpha, 1).unwrap()).unwrap();
        let (cv, cw) = cfrdtm_solve(&model, 1).unwrap();
        prop_assert!((eval(&qv, x, t) - eval(&cv, x, t)).abs() <= 1e-12);
        prop_assert!((eval(&qw, x, t) - eval(&cw, x, t)).abs() <= 1e-12);
    }
}
