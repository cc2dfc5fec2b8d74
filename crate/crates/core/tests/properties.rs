use proptest::prelude::*;

use moscolab::classify::{
    classify_recurrence_u04, classify_tail, feller_explosion_test, Convergence, PathProperty, TailDomain,
};
use moscolab::coeffs::{
    l1_local_distance, make_prop15_coefficient, make_sharp_log_order, DiffusionCoefficient, Prop15Variant, Region,
};
use moscolab::forms::{assemble_diffusion, Boundary, Grid1D};
use moscolab::levy::{eval_exponent, stable_scaling_check, LevyExponent};
use moscolab::mosco::{resolvent, semigroup_apply};

fn exponent_cases() -> ProptestConfig {
    ProptestConfig {
        cases: 24,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(exponent_cases())]

    #[test]
    fn pure_powers_resolve_at_level_zero(p in prop_oneof![-3.0f64..-1.2, -0.8f64..0.0]) {
        let v = classify_tail(move |u: f64| Ok(u.powf(p)), TailDomain::AtInfinity(1.0), 3).unwrap();
        let expected = if p < -1.0 { Convergence::Convergent } else { Convergence::Divergent };
        prop_assert_eq!(v.verdict, expected);
        prop_assert_eq!(v.depth, 0);
    }

    #[test]
    fn tail_verdict_is_scale_invariant(p in -3.0f64..0.0, c in 1e-3f64..1e3) {
        let a = classify_tail(move |u: f64| Ok(u.powf(p)), TailDomain::AtInfinity(1.0), 3).unwrap();
        let b = classify_tail(move |u: f64| Ok(c * u.powf(p)), TailDomain::AtInfinity(1.0), 3).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
    }

    #[test]
    fn exponent_is_even_and_nonnegative(alpha in 0.2f64..1.9, xi in 1e-3f64..50.0) {
        let e = LevyExponent::stable(1, alpha).unwrap();
        let plus = eval_exponent(&e, &[xi]).unwrap();
        let minus = eval_exponent(&e, &[-xi]).unwrap();
        prop_assert!(plus > 0.0);
        prop_assert!((plus - minus).abs() <= 1e-12 * plus);
    }

    #[test]
    fn doubling_bound(alpha in 0.2f64..1.9, xi in 1e-3f64..20.0) {
        let e = LevyExponent::stable(1, alpha).unwrap();
        let one = eval_exponent(&e, &[xi]).unwrap();
        let two = eval_exponent(&e, &[2.0 * xi]).unwrap();
        prop_assert!(two <= 4.0 * one * (1.0 + 1e-9));
    }

    #[test]
    fn stable_scaling(alpha in 0.3f64..1.8, xi in 0.05f64..5.0, c in 0.5f64..8.0) {
        let e = LevyExponent::stable(1, alpha).unwrap();
        prop_assert!(stable_scaling_check(&e, &[xi], c).unwrap() < 1e-6);
    }

    #[test]
    fn u04_never_reports_transient(eps in 0.2f64..1.5, offset in 1.0f64..1.6) {
        let order = make_sharp_log_order(eps, offset, 2.0).unwrap();
        let c = classify_recurrence_u04(&order, 1).unwrap();
        prop_assert_ne!(c.property, PathProperty::Transient);
    }
}

proptest! {
    #[test]
    fn l1_distance_is_a_pseudometric(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
        let region = Region::interval(-1.0, 1.0);
        let f = |s: f64| move |x: &[f64]| Ok((s * x[0]).sin());
        let d = |s: f64, t: f64| l1_local_distance(f(s), f(t), &region, 400).unwrap();
        prop_assert_eq!(d(a, a), 0.0);
        prop_assert!((d(a, b) - d(b, a)).abs() <= 1e-14);
        prop_assert!(d(a, c) <= d(a, b) + d(b, c) + 1e-12);
    }

    #[test]
    fn feller_verdict_ignores_time_change(n in 1u32..9, explosive in any::<bool>()) {
        let v = if explosive { Prop15Variant::ExplosiveFamily(n) } else { Prop15Variant::ConservativeFamily(n) };
        let a = make_prop15_coefficient(v).unwrap();
        let doubled = DiffusionCoefficient::scalar("2a", move |x| 2.0 * a.scalar_at(x));
        let a = make_prop15_coefficient(v).unwrap();
        prop_assert_eq!(
            feller_explosion_test(&a).unwrap().property,
            feller_explosion_test(&doubled).unwrap().property
        );
    }

    #[test]
    fn diffusion_forms_are_markovian(
        amp in 0.0f64..0.9,
        freq in 0.1f64..3.0,
        periodic in any::<bool>(),
        seed in proptest::collection::vec(0.0f64..1.0, 64),
    ) {
        let boundary = if periodic { Boundary::Periodic } else { Boundary::Killing };
        let grid = Grid1D::new(8.0, 64, boundary).unwrap();
        let a = DiffusionCoefficient::scalar("a", move |x| 1.0 + amp * (freq * x).sin());
        let form = assemble_diffusion(&a, grid).unwrap();
        let rows = form.apply(&[1.0; 64]).unwrap();
        for r in &rows {
            if periodic { prop_assert!(r.abs() < 1e-10); } else { prop_assert!(*r >= -1e-10); }
        }
        prop_assert!(form.energy(&seed).unwrap() >= -1e-12);
        let u = resolvent(&form, 1.0, &seed).unwrap().output;
        prop_assert!(u.iter().all(|v| *v >= -1e-12));
        let p = semigroup_apply(&form, 0.5, &seed, 8).unwrap();
        prop_assert!(p.iter().all(|v| *v >= -1e-12 && *v <= 1.0 + 1e-12));
    }
}
