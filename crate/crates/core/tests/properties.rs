//! Property tests over randomly drawn parameters.

use proptest::prelude::*;
use telegraph_core::{
    atom_probability, density, log_gamma, mean_conditional, parity_expectation, reg_lower_gamma, reg_upper_gamma,
    sample_path, upper_gamma, InitialVelocity, MotionParams, SeriesControl, SymmetricGammaParams,
};

fn shape() -> impl Strategy<Value = f64> {
    0.3f64..4.0
}

fn positive() -> impl Strategy<Value = f64> {
    0.2f64..3.0
}

fn motion() -> impl Strategy<Value = MotionParams> {
    (positive(), positive(), positive(), shape(), positive(), shape())
        .prop_map(|(c, v, l, a, m, b)| MotionParams::new(c, v, l, a, m, b).unwrap())
}

fn v0() -> impl Strategy<Value = InitialVelocity> {
    prop_oneof![Just(InitialVelocity::Forward), Just(InitialVelocity::Backward)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lower_and_upper_sum_to_one(a in 0.01f64..500.0, u in 0.0f64..800.0) {
        let p = reg_lower_gamma(a, u).unwrap();
        let q = reg_upper_gamma(a, u).unwrap();
        prop_assert!((p + q - 1.0).abs() <= 1e-13);
        prop_assert!((0.0..=1.0).contains(&p));
        // Γ(a,u)/Γ(a) route, while Γ(a) is representable
        prop_assume!(a < 170.0);
        let g = upper_gamma(a, u).unwrap();
        let ratio = if g == 0.0 { 0.0 } else { (g.ln() - log_gamma(a).unwrap()).exp() };
        prop_assert!((p + ratio - 1.0).abs() <= 1e-13);
    }

    #[test]
    fn lower_gamma_monotone_in_argument(a in 0.01f64..200.0, u in 0.0f64..400.0, du in 0.0f64..5.0) {
        prop_assert!(reg_lower_gamma(a, u).unwrap() <= reg_lower_gamma(a, u + du).unwrap());
    }

    #[test]
    fn lower_gamma_reaches_one(a in 0.01f64..1000.0) {
        let u = a + 40.0 * a.sqrt() + 40.0;
        prop_assert!((reg_lower_gamma(a, u).unwrap() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn bracket_terms_non_negative(alpha in 0.1f64..5.0, k in 1u32..200, u in 0.0f64..300.0) {
        let a = k as f64 * alpha;
        let d = reg_lower_gamma(a, u).unwrap() - reg_lower_gamma(a + alpha, u).unwrap();
        prop_assert!(d >= -1e-15, "{}", d);
    }

    #[test]
    fn density_components_non_negative_and_additive(p in motion(), t in 0.1f64..4.0, frac in 0.001f64..0.999, v0 in v0()) {
        let x = -p.v * t + frac * (p.c + p.v) * t;
        let lp = density(&p, x, t, v0, &SeriesControl::default()).unwrap();
        prop_assert!(lp.forward_density >= 0.0 && lp.backward_density >= 0.0);
        prop_assert_eq!(lp.total_density, lp.forward_density + lp.backward_density);
    }

    #[test]
    fn reflection_maps_forward_start_to_backward_start(p in motion(), t in 0.1f64..4.0, frac in 0.001f64..0.999) {
        let x = -p.v * t + frac * (p.c + p.v) * t;
        let ctl = SeriesControl::default();
        let fwd = density(&p, x, t, InitialVelocity::Forward, &ctl).unwrap();
        let bwd = density(&p.reflected(), -x, t, InitialVelocity::Backward, &ctl).unwrap();
        let scale = fwd.total_density.abs().max(1.0);
        prop_assert!((fwd.total_density - bwd.total_density).abs() <= 1e-12 * scale);
        prop_assert!((fwd.forward_density - bwd.backward_density).abs() <= 1e-12 * scale);
        let atom_f = atom_probability(&p, t, InitialVelocity::Forward).unwrap();
        let atom_b = atom_probability(&p.reflected(), t, InitialVelocity::Backward).unwrap();
        prop_assert_eq!(atom_f, atom_b);
    }

    #[test]
    fn mean_antisymmetric_and_bounded(c in positive(), v in positive(), lambda in positive(), alpha in shape(), t in 0.01f64..6.0) {
        let ctl = SeriesControl::default();
        let p = SymmetricGammaParams::new(c, v, lambda, alpha).unwrap();
        let mf = mean_conditional(&p, t, InitialVelocity::Forward, &ctl).unwrap();
        let mb = mean_conditional(&p, t, InitialVelocity::Backward, &ctl).unwrap();
        prop_assert!(-v * t <= mf && mf <= c * t);
        prop_assert!(-v * t <= mb && mb <= c * t);
        // swapping speeds mirrors the motion
        let q = SymmetricGammaParams::new(v, c, lambda, alpha).unwrap();
        let mq = mean_conditional(&q, t, InitialVelocity::Backward, &ctl).unwrap();
        prop_assert!((mf + mq).abs() <= 1e-12 * mf.abs().max(1.0));
        let eq = SymmetricGammaParams::new(c, c, lambda, alpha).unwrap();
        let ef = mean_conditional(&eq, t, InitialVelocity::Forward, &ctl).unwrap();
        let eb = mean_conditional(&eq, t, InitialVelocity::Backward, &ctl).unwrap();
        prop_assert!((ef + eb).abs() <= 1e-12 * ef.abs().max(1.0));
    }

    #[test]
    fn parity_expectation_in_unit_interval(lambda in positive(), alpha in shape(), s in 0.0f64..10.0) {
        let p = SymmetricGammaParams::new(1.0, 1.0, lambda, alpha).unwrap();
        let e = parity_expectation(&p, s, &SeriesControl::default()).unwrap();
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&e));
    }

    #[test]
    fn sampled_paths_respect_support_and_parity(p in motion(), t in 0.05f64..5.0, v0 in v0(), seed in any::<u64>()) {
        let mut rng = telegraph_core::path_rng(seed, 0);
        let s = sample_path(&p, t, v0, &mut rng).unwrap();
        prop_assert!(-p.v * t <= s.position && s.position <= p.c * t);
        prop_assert!(s.velocity == p.c || s.velocity == -p.v);
        prop_assert!((s.velocity - s.parity_velocity(&p, v0)).abs() <= 4.0 * f64::EPSILON * (p.c + p.v));
        prop_assert_eq!(s.hit_boundary, s.renewal_count == 0);
        if s.hit_boundary {
            prop_assert_eq!(s.position, v0.velocity(&p) * t);
        }
    }
}

#[test]
fn lower_gamma_recurrence_grid() {
    for a in [0.5, 1.0, 1.5, 2.0, 5.0] {
        for u in [0.1, 1.0, 5.0, 20.0] {
            let lhs = reg_lower_gamma(a + 1.0, u).unwrap();
            let step = (a * f64::ln(u) - u - log_gamma(a + 1.0).unwrap()).exp();
            let rhs = reg_lower_gamma(a, u).unwrap() - step;
            assert!((lhs - rhs).abs() <= 1e-12, "a={a} u={u}: {lhs} vs {rhs}");
        }
    }
}
