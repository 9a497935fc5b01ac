use proptest::prelude::*;

use maasslab::forms::{SeriesEvaluator, SeriesKind, SeriesParams};
use maasslab::operators::{
    bilinear_form, quadratic_form, slash_half_integral, theta_function, theta_multiplier, theta_multiplier_closed,
    MoebiusMatrix,
};
use maasslab::qforms::{enumerate_forms, q_tau, q_value, q_value_norm_sqr, EnumerationBox, HPoint, QuadForm};
use maasslab::specfun::{erf, g_k, inc_gamma_half, lipschitz_lhs_rhs, psi_k, sgn, GkRoute, Weight, SQRT_PI};
use maasslab::{Complex, Rational};

fn point() -> impl Strategy<Value = HPoint> {
    (-2.0..2.0f64, 0.05..3.0f64).prop_map(|(re, im)| HPoint { re, im })
}

fn rational_point() -> impl Strategy<Value = HPoint<Rational>> {
    (-2000i64..2000, 1i64..3000).prop_map(|(x, y)| HPoint { re: Rational::new(x, 1000), im: Rational::new(y, 1000) })
}

fn form() -> impl Strategy<Value = QuadForm> {
    (-40i64..40, -40i64..40, -40i64..40)
        .prop_filter("nonzero", |(a, b, c)| (*a, *b, *c) != (0, 0, 0))
        .prop_map(|(a, b, c)| QuadForm { a, b, c })
}

/// Products of the generators `T` and `(1 0; 4 1)` of `Γ₀(4)` and their inverses.
fn gamma0_4() -> impl Strategy<Value = MoebiusMatrix> {
    proptest::collection::vec(0u8..4, 1..5).prop_map(|word| {
        let gens = [
            MoebiusMatrix::T,
            MoebiusMatrix::new(1, -1, 0, 1).unwrap(),
            MoebiusMatrix::new(1, 0, 4, 1).unwrap(),
            MoebiusMatrix::new(1, 0, -4, 1).unwrap(),
        ];
        word.iter().fold(MoebiusMatrix::IDENTITY, |m, &g| m.compose(&gens[g as usize]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn norm_of_q_rewrites_through_q_tau(q in form(), tau in point()) {
        let lhs = q_value_norm_sqr(&q, &tau);
        let qt = q_tau(&q, &tau);
        let rhs = tau.im * tau.im * (qt * qt + q.discriminant() as f64);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0));
    }

    #[test]
    fn translation_and_inversion_preserve_discriminant(q in form(), tau in point()) {
        let t = q.translate();
        let s = q.invert();
        prop_assert_eq!(t.discriminant(), q.discriminant());
        prop_assert_eq!(s.discriminant(), q.discriminant());
        prop_assert!((q_tau(&t, &tau) - q_tau(&q, &tau.shifted(1.0))).abs() < 1e-9 * (1.0 + q_tau(&t, &tau).abs()));
        prop_assert!((q_tau(&s, &tau) - q_tau(&q, &tau.inverted())).abs() < 1e-9 * (1.0 + q_tau(&s, &tau).abs()));
        let weight_two = q_value(&s, &tau) - tau.to_complex().powi(2) * q_value(&q, &tau.inverted());
        prop_assert!(weight_two.norm() < 1e-9 * (1.0 + q_value(&s, &tau).norm()));
    }

    #[test]
    fn majorant_is_positive_definite(q in form(), tau in rational_point()) {
        let qt = q_tau(&q, &tau);
        prop_assert!(Rational::from_integer(q.discriminant()) + Rational::from_integer(2) * qt * qt > Rational::from_integer(0));
    }

    #[test]
    fn sign_is_constant_for_nonpositive_discriminant(q in form(), t1 in rational_point(), t2 in rational_point()) {
        prop_assume!(q.discriminant() <= 0);
        prop_assert_eq!(maasslab::scalar::sgn(&q_tau(&q, &t1)), maasslab::scalar::sgn(&q_tau(&q, &t2)));
    }

    #[test]
    fn bilinear_form_reproduces_q_tau(q in form(), tau in rational_point()) {
        let r = Rational::from_integer;
        let c1 = [r(-1), r(2) * tau.re, -(tau.re * tau.re + tau.im * tau.im)];
        let w = [r(q.a), r(q.b), r(q.c)];
        prop_assert_eq!(quadratic_form(&c1), -r(4) * tau.im * tau.im);
        prop_assert_eq!(bilinear_form(&c1, &w), r(4) * tau.im * q_tau(&q, &tau));
        prop_assert_eq!(quadratic_form(&w), r(q.discriminant()));
    }

    #[test]
    fn enumerated_forms_are_distinct_and_of_the_right_discriminant(d in -60i64..60, a in 1u32..5, n in 1u32..5, c in 1u32..5) {
        let forms = enumerate_forms(d, &EnumerationBox { a_max: a, n_max: n, c_max: c });
        prop_assert!(forms.iter().all(|q| q.discriminant() == d && (q.a, q.b, q.c) != (0, 0, 0)));
        prop_assert!(forms.windows(2).all(|w| (w[0].a.abs(), w[0].a, w[0].b, w[0].c) < (w[1].a.abs(), w[1].a, w[1].b, w[1].c)));
        if d.rem_euclid(4) > 1 {
            prop_assert!(forms.is_empty());
        }
    }

    #[test]
    fn erf_rewrite(t in -4.0..4.0f64) {
        let lhs = erf(SQRT_PI * t);
        let rhs = sgn(t) * (1.0 - inc_gamma_half(std::f64::consts::PI * t * t) / SQRT_PI);
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn psi_k_is_monotone(v1 in 0.0..1.0f64, v2 in 0.0..1.0f64, k in prop::sample::select(vec![4i64, 6, 8])) {
        let k = Weight::new(k).unwrap();
        let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
        prop_assert!(psi_k(lo, k).unwrap() <= psi_k(hi, k).unwrap() + 1e-15);
    }

    #[test]
    fn g_k_is_odd_and_routes_agree(r in -5.0..5.0f64, k in prop::sample::select(vec![4i64, 6])) {
        let k = Weight::new(k).unwrap();
        let a = g_k(r, k, GkRoute::Closed).unwrap();
        prop_assert!((a + g_k(-r, k, GkRoute::Closed).unwrap()).abs() < 1e-14);
        prop_assert!((a - g_k(r, k, GkRoute::Integral).unwrap()).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lipschitz_pair_agrees(re in -0.5..0.5f64, im in 0.3..2.0f64, kappa in prop::sample::select(vec![4.0, 4.5])) {
        let (lhs, rhs) = lipschitz_lhs_rhs(Complex::new(re, im), kappa, 400).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-8 * lhs.norm().max(rhs.norm()));
    }

    #[test]
    fn cocycle_relation(m in gamma0_4(), n in gamma0_4(), tau in point()) {
        let lhs = m.compose(&n).cocycle(&tau);
        let rhs = m.cocycle(&n.apply(&tau)) * n.cocycle(&tau);
        prop_assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm().max(1.0));
    }

    #[test]
    fn closed_multiplier_matches_theta_ratio(m in gamma0_4(), re in -0.5..0.5f64, im in 0.5..1.5f64) {
        let [_, _, c, d] = m.entries();
        prop_assume!(c != 0);
        // near the cusp −δ/γ both z and Mz stay in the well-conditioned region of θ
        let z = HPoint { re: -(d as f64) / c as f64 + re / (c * c) as f64, im: im / (c * c) as f64 };
        prop_assume!(m.apply(&z).im > 0.1 && z.im > 0.02);
        let a = theta_multiplier(&m, &z).unwrap();
        let b = theta_multiplier_closed(&m, &z).unwrap();
        prop_assert!((a - b).norm() < 1e-8 * a.norm(), "{:?}: {} vs {}", m.entries(), a, b);
    }

    #[test]
    fn theta_is_invariant_under_its_own_slash(m in gamma0_4(), re in -0.5..0.5f64, im in 0.3..1.5f64) {
        let z = HPoint { re, im };
        prop_assume!(m.apply(&z).im > 0.05);
        let lhs = slash_half_integral(theta_function, &m, 0.5, &z).unwrap();
        prop_assert!((lhs - theta_function(&z)).norm() < 1e-9 * lhs.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn psi_hat_is_periodic_in_z(u in -0.5..0.5f64, v in 0.4..1.0f64) {
        let p = SeriesParams::default();
        let tau = HPoint { re: 0.1, im: 1.1 };
        let z = HPoint { re: u, im: v };
        let ev = SeriesEvaluator::new(SeriesKind::PsiHatDef, p, tau, z).unwrap();
        let a = ev.eval(&tau, &z);
        let b = ev.eval(&tau, &z.shifted(1.0));
        prop_assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn theta_kernels_are_covariant_in_tau(x in -0.45..0.45f64, y in 0.9..1.4f64) {
        let p = SeriesParams { policy: SeriesParams::default().policy.with_tail_target(1e-13), ..SeriesParams::default() };
        let tau = HPoint { re: x, im: y };
        let z = HPoint { re: 0.17, im: 0.6 };
        let t = tau.to_complex();
        let th = maasslab::forms::theta(&tau, &z, &p).unwrap().value;
        let th_s = maasslab::forms::theta(&tau.inverted(), &z, &p).unwrap().value;
        let th_t = maasslab::forms::theta(&tau.shifted(1.0), &z, &p).unwrap().value;
        prop_assert!((th_t - th).norm() < 1e-8 * th.norm().max(1e-10));
        prop_assert!((th_s - t.powi(-6) * th).norm() < 1e-8 * th_s.norm().max(1e-10));
        let ts = maasslab::forms::theta_star(&tau, &z, &p).unwrap().value;
        let ts_s = maasslab::forms::theta_star(&tau.inverted(), &z, &p).unwrap().value;
        prop_assert!((ts_s - t.conj().powi(8) * ts).norm() < 1e-8 * ts_s.norm().max(1e-10));
    }
}
