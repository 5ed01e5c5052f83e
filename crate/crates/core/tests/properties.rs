use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use pentarec::critical::{
    k_sequence, product_form_solution, product_limit, APPLICATION_INDEX_SHIFT,
};
use pentarec::engine::{simulate, transforms};
use pentarec::model::{classify, discriminants, Params, PositiveReal, Regime, SeedValues};
use pentarec::number::{parse_rational, round_rational_half_even, ArithmeticMode};
use pentarec::spectral::{characteristic_roots, jacobian, numeric_eigen_check};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn params() -> impl Strategy<Value = Params> {
    (0.01f64..2.0, 0.05f64..2.0, 0.05f64..2.0, 0.05f64..2.0)
        .prop_map(|(a, b, c, d)| Params::new(a, b, c, d).unwrap())
}

fn seeds() -> impl Strategy<Value = SeedValues> {
    prop::array::uniform5(0.2f64..3.0).prop_map(|s| SeedValues::new(s).unwrap())
}

fn critical_params() -> impl Strategy<Value = Params> {
    (1i64..100, 1i64..60, 1i64..60)
        .prop_map(|(a, c, d)| Params::critical(q(a, 100), q(c, 12), q(d, 15)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ratio_limit_sign_matches_a(p in params()) {
        let r = discriminants(&p);
        prop_assume!(r.a_discriminant.abs() > 1e-12);
        prop_assert_eq!(r.a_discriminant > 0.0, r.ratio_limit < 1.0);
    }

    #[test]
    fn roots_satisfy_vieta(p in params()) {
        let r = discriminants(&p);
        let (a, b, c, d) = (p.a(), p.b(), p.c(), p.d());
        prop_assert!(r.rho_plus > 0.0 && r.rho_minus < 0.0);
        prop_assert!(r.rho_plus > r.rho_minus.abs());
        prop_assert!(((r.rho_plus + r.rho_minus) - (c + a * d)).abs() <= 1e-12 * (c + a * d + r.rho_plus));
        prop_assert!((r.rho_plus * r.rho_minus + b * d).abs() <= 1e-12 * b * d);
    }

    #[test]
    fn critical_surface_is_never_unstable(p in critical_params()) {
        let regime = classify(&p, 0.0);
        prop_assert!(matches!(regime, Regime::CriticalConvergent(_)), "{:?}", regime);
        prop_assert!(regime.report().b_discriminant < 0.0);
        prop_assert!(regime.report().coupling < 1.0);
    }

    #[test]
    fn orbits_stay_positive(p in params(), s in seeds()) {
        let traj = simulate(&p, &s, 60, ArithmeticMode::double()).unwrap();
        prop_assert!(traj.to_f64_vec().iter().all(|&x| x > 0.0 && x.is_finite()));
    }

    #[test]
    fn scaling_b_c_d_leaves_orbit_unchanged(p in params(), s in seeds(), k in 0.1f64..10.0) {
        let base = simulate(&p, &s, 40, ArithmeticMode::double()).unwrap().to_f64_vec();
        let scaled = simulate(&p.scaled(k).unwrap(), &s, 40, ArithmeticMode::double()).unwrap().to_f64_vec();
        for (x, y) in base.iter().zip(&scaled) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs());
        }
    }

    #[test]
    fn double_tracks_exact_over_short_runs(
        a in 1i64..40, b in 1i64..40, c in 1i64..40, d in 1i64..40,
        s in prop::array::uniform5(1i64..20),
    ) {
        let p = Params::from_rationals(q(a, 16), q(b, 16), q(c, 16), q(d, 16)).unwrap();
        let seeds = SeedValues::from_rationals(s.map(|v| q(v, 4))).unwrap();
        let exact = simulate(&p, &seeds, 12, ArithmeticMode::exact()).unwrap().to_f64_vec();
        let float = simulate(&p, &seeds, 12, ArithmeticMode::double()).unwrap().to_f64_vec();
        let wide = simulate(&p, &seeds, 12, ArithmeticMode::float(160)).unwrap().to_f64_vec();
        for ((e, f), w) in exact.iter().zip(&float).zip(&wide) {
            prop_assert!((e - f).abs() <= 1e-12 * e);
            prop_assert!((e - w).abs() <= 1e-15 * e);
        }
    }

    #[test]
    fn mobius_map_holds_on_every_class(p in params(), s in seeds()) {
        let traj = simulate(&p, &s, 45, ArithmeticMode::double()).unwrap();
        let seqs = transforms(&traj).unwrap();
        let r = discriminants(&p);
        for class in seqs.residue_classes() {
            for pair in class.windows(2) {
                let next = p.c() + p.a() * p.d() + p.b() * p.d() / pair[0];
                prop_assert!((next - pair[1]).abs() <= 1e-10 * pair[1]);
            }
            // w approaches ρ+ at the geometric rate |ρ-/ρ+|
            let rate = (r.rho_minus / r.rho_plus).abs();
            if rate.powi(class.len() as i32 - 1) < 1e-9 {
                let last = class[class.len() - 1];
                prop_assert!((last - r.rho_plus).abs() <= 1e-6 * r.rho_plus);
            }
        }
    }

    #[test]
    fn spectral_radius_formula(p in 1e-6f64..50.0) {
        let s = characteristic_roots(p).unwrap();
        prop_assert!((s.spectral_radius - p.cbrt().max(1.0)).abs() <= 1e-12 * s.spectral_radius);
        prop_assert!(numeric_eigen_check(&jacobian(p).unwrap(), 1e-10));
        prop_assert_eq!(s.moduli.iter().filter(|m| (**m - 1.0).abs() < 1e-15).count() >= 2, true);
    }

    #[test]
    fn product_formula_matches_double_simulation(mu in 0.05f64..6.0) {
        let mu = PositiveReal::new("mu", mu).unwrap();
        let formula = product_form_solution(&mu, 10, ArithmeticMode::double()).unwrap().to_f64_vec();
        let params = pentarec::critical::application_params();
        let seeds = pentarec::critical::application_seeds(&mu);
        let steps = formula.len() - 1 - APPLICATION_INDEX_SHIFT as usize;
        let direct = simulate(&params, &seeds, steps, ArithmeticMode::double()).unwrap().to_f64_vec();
        prop_assert_eq!(direct.len(), formula.len());
        for (x, y) in direct.iter().zip(&formula) {
            prop_assert!((x - y).abs() <= 1e-13 * y);
        }
    }

    #[test]
    fn k_terms_alternate_around_one(mu in 0.01f64..10.0) {
        prop_assume!((mu - 1.0).abs() > 1e-9);
        let k = k_sequence(&PositiveReal::new("mu", mu).unwrap(), 30, ArithmeticMode::double()).unwrap();
        let logs = k.log_terms();
        for i in 1..logs.len() - 1 {
            if logs[i].abs() < 1e-14 {
                break;
            }
            prop_assert!(logs[i] * logs[i + 1] < 0.0);
            prop_assert!(logs[i + 1].abs() < logs[i].abs());
        }
    }

    #[test]
    fn limit_bracket_contains_a_tighter_estimate(mu in 0.05f64..5.0) {
        let loose = product_limit(mu, 1e-4).unwrap();
        let tight = product_limit(mu, 1e-13).unwrap();
        let (lo, hi) = loose.bracket();
        prop_assert!(lo <= tight.limit_estimate * (1.0 + 1e-14));
        prop_assert!(tight.limit_estimate <= hi * (1.0 + 1e-14));
    }

    #[test]
    fn fractions_round_trip(n in -100_000i64..100_000, d in 1i64..10_000) {
        prop_assert_eq!(parse_rational(&format!("{n}/{d}")).unwrap(), q(n, d));
    }

    #[test]
    fn fixed_rounding_stays_within_half_unit(n in 0i64..1_000_000, d in 1i64..100_000, places in 0u32..8) {
        let x = q(n, d);
        let shown = parse_rational(&round_rational_half_even(&x, places)).unwrap();
        let unit = BigRational::new(BigInt::from(1), num_traits::pow(BigInt::from(10), places as usize));
        let err = if shown > x { &shown - &x } else { &x - &shown };
        prop_assert!(err * BigInt::from(2) <= unit);
    }
}
