//! Property tests: the algebraic laws the constructions must satisfy on
//! randomized inputs. Instances are derived from a proptest-chosen seed
//! through the crate's deterministic samplers, so failures replay exactly.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

use inertia_bundles::bundle::field_inertia;
use inertia_bundles::linalg::{max_abs, rel_frobenius, spectral_norm};
use inertia_bundles::sample;
use inertia_bundles::splitting::complement_field;
use inertia_bundles::{
    gauge_act, gauge_act_subbundle, inertia, interpolate_positive, isometry_positive,
    make_line_bundle_lk, monodromy_w1, openness_radius, operator_l, q_splitting,
    simultaneous_diagonalize, spd_sqrt, theta_homotopy, theta_iso, verify_q_splitting,
    winding_halfturns, DiscreteBundle, FormField, GaugeField, HomotopyClass, SplittingField,
    SubbundleField, SymForm, DEFAULT_TOL,
};

fn rotation(a: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[a.cos(), -a.sin(), a.sin(), a.cos()])
}

/// A line field on the trivial rank-2 bundle with a prescribed winding and
/// a smooth random wobble.
fn wobbled_line_field(seed: u64, n: usize, k: i64) -> SubbundleField {
    let mut rng = sample::rng(seed);
    let bundle = DiscreteBundle::trivial(n, 2).unwrap();
    let (a, b) = (rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3));
    let frames = (0..n)
        .map(|i| {
            let alpha = TAU * i as f64 / n as f64;
            let theta = k as f64 * alpha / 2.0 + a * alpha.cos() + b * alpha.sin();
            DMatrix::from_column_slice(2, 1, &[theta.cos(), theta.sin()])
        })
        .collect();
    SubbundleField::new(bundle, 1, frames).unwrap()
}

/// An indefinite form field over the l_k splitting with smooth blocks.
fn smooth_line_form(seed: u64, n: usize, k: i64) -> FormField {
    let mut rng = sample::rng(seed);
    let plus = make_line_bundle_lk(n, k).unwrap();
    let r = FormField::identity(plus.bundle().clone());
    let minus = complement_field(&plus, &r).unwrap();
    let s = SplittingField::new(plus, minus).unwrap();
    sample::smooth_form_field_on_splitting(&mut rng, &s).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn inertia_is_a_congruence_invariant(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = sample::rng(seed);
        let plus = rng.random_range(0..=n);
        let a = sample::symmetric_with_inertia(&mut rng, n, plus);
        let g = sample::well_conditioned_invertible(&mut rng, n);
        let congruent = SymForm::symmetrized(g.transpose() * a.mat() * &g);
        prop_assert_eq!(
            inertia(&congruent, DEFAULT_TOL).unwrap(),
            inertia(&a, DEFAULT_TOL).unwrap()
        );
    }

    #[test]
    fn square_root_transports_the_form(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = sample::rng(seed);
        let r = sample::spd(&mut rng, n);
        let q = sample::spd(&mut rng, n);
        let l = operator_l(&r, &q).unwrap();
        let s = spd_sqrt(&l, &r, DEFAULT_TOL).unwrap();
        for _ in 0..20 {
            let v = sample::vector(&mut rng, n);
            let qv = q.eval(&v);
            let rsv = r.eval(&(&s * &v));
            prop_assert!((qv - rsv).abs() < 1e-9 * qv.abs());
        }
    }

    #[test]
    fn openness_radius_is_safe(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = sample::rng(seed);
        let plus = rng.random_range(0..=n);
        let q = sample::symmetric_with_inertia(&mut rng, n, plus);
        let start = inertia(&q, DEFAULT_TOL).unwrap();
        let (b, _) = simultaneous_diagonalize(&q, &SymForm::identity(n)).unwrap();
        let v_plus = b.columns(0, plus).into_owned();
        let v_minus = b.columns(plus, n - plus).into_owned();
        let radius = openness_radius(&q, &v_plus, &v_minus).unwrap();
        prop_assert!(radius.is_finite() && radius > 0.0);
        for _ in 0..5 {
            let raw = sample::symmetric(&mut rng, n);
            let norm = spectral_norm(raw.mat());
            prop_assume!(norm > 1e-12);
            let scale = rng.random_range(0.0..0.999) * radius / norm;
            let perturbed = SymForm::symmetrized(q.mat() + raw.mat() * scale);
            prop_assert_eq!(inertia(&perturbed, DEFAULT_TOL).unwrap(), start);
        }
    }

    #[test]
    fn splitting_always_passes_its_verifier(seed in any::<u64>(), p in 0usize..=3) {
        let mut rng = sample::rng(seed);
        let bundle = DiscreteBundle::trivial(16, 3).unwrap();
        let s = sample::splitting_field(&mut rng, &bundle, p).unwrap();
        let q = sample::form_field_on_splitting(&mut rng, &s).unwrap();
        let r = sample::spd_field(&mut rng, &bundle).unwrap();
        let result = q_splitting(&q, &r).unwrap();
        prop_assert_eq!(result.splitting.plus().dim(), p);
        prop_assert_eq!(result.splitting.minus().dim(), 3 - p);
        let report = verify_q_splitting(&q, &result.splitting).unwrap();
        prop_assert!(report.pass);
        for gap in &result.eigen_gaps {
            prop_assert!(*gap > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gauge_action_composes(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let bundle = DiscreteBundle::trivial(8, 3).unwrap();
        let forms = (0..8)
            .map(|_| sample::symmetric_with_inertia(&mut rng, 3, 2))
            .collect();
        let q = FormField::new(bundle.clone(), forms).unwrap();
        let phi = sample::gauge_field(&mut rng, &bundle).unwrap();
        let psi = sample::gauge_field(&mut rng, &bundle).unwrap();
        let two_steps = gauge_act(&gauge_act(&q, &phi).unwrap(), &psi).unwrap();
        let one_step = gauge_act(&q, &phi.compose(&psi).unwrap()).unwrap();
        for i in 0..8 {
            let gap = max_abs(&(two_steps.form(i).mat() - one_step.form(i).mat()));
            prop_assert!(gap < 1e-12);
        }
        prop_assert_eq!(
            field_inertia(&two_steps).unwrap(),
            field_inertia(&q).unwrap()
        );
    }

    #[test]
    fn interpolation_stays_positive(seed in any::<u64>(), t in 0.0f64..=1.0) {
        let mut rng = sample::rng(seed);
        let bundle = DiscreteBundle::trivial(6, 3).unwrap();
        let r0 = sample::spd_field(&mut rng, &bundle).unwrap();
        let r1 = sample::spd_field(&mut rng, &bundle).unwrap();
        let rt = interpolate_positive(&r0, &r1, t).unwrap();
        prop_assert!(field_inertia(&rt).unwrap().is_positive_definite());
    }

    #[test]
    fn line_bundles_admit_any_legal_resolution(k in -6i64..=6, extra in 0usize..40) {
        let n = (2 * k.unsigned_abs() as usize + 1).max(3) + extra;
        let s = make_line_bundle_lk(n, k).unwrap();
        prop_assert_eq!(winding_halfturns(&s).unwrap(), k);
    }

    #[test]
    fn iso_class_ignores_arbitrary_gauge(
        seed in any::<u64>(),
        k in -2i64..=2,
        m in -1i64..=1,
    ) {
        let q = smooth_line_form(seed, 32, k);
        let mut rng = sample::rng(seed.wrapping_add(1));
        let smooth = sample::smooth_gauge_loop(&mut rng, q.bundle()).unwrap();
        let maps = (0..32)
            .map(|i| rotation(m as f64 * TAU * i as f64 / 32.0) * smooth.map(i))
            .collect();
        let phi = GaugeField::new(q.bundle().clone(), maps).unwrap();
        let acted = gauge_act(&q, &phi).unwrap();
        prop_assert_eq!(theta_iso(&acted).unwrap(), theta_iso(&q).unwrap());
    }

    #[test]
    fn homotopy_class_ignores_witnessed_gauge(seed in any::<u64>(), k in -2i64..=2) {
        let q = smooth_line_form(seed, 32, k);
        let mut rng = sample::rng(seed.wrapping_add(2));
        let w = sample::gau0_witnessed(&mut rng, q.bundle(), 8).unwrap();
        let acted = gauge_act(&q, w.endpoint()).unwrap();
        prop_assert_eq!(theta_homotopy(&acted).unwrap(), theta_homotopy(&q).unwrap());
        prop_assert_eq!(theta_homotopy(&q).unwrap(), HomotopyClass::Winding(k));
    }

    #[test]
    fn rotation_loops_shift_winding_by_their_degree(
        seed in any::<u64>(),
        k in -2i64..=2,
        m in -1i64..=1,
    ) {
        // covariant action of the degree-m rotation loop on a line field
        let s = wobbled_line_field(seed, 48, k);
        let maps = (0..48)
            .map(|i| rotation(m as f64 * TAU * i as f64 / 48.0))
            .collect();
        let phi = GaugeField::new(s.bundle().clone(), maps).unwrap();
        let moved = gauge_act_subbundle(&s, &phi).unwrap();
        prop_assert_eq!(winding_halfturns(&moved).unwrap(), k + 2 * m);
    }

    #[test]
    fn winding_is_a_loop_invariant(seed in any::<u64>(), k in -4i64..=4, shift in 0usize..48) {
        let s = wobbled_line_field(seed, 48, k);
        prop_assert_eq!(winding_halfturns(&s).unwrap(), k);
        let relabeled: Vec<DMatrix<f64>> = (0..48)
            .map(|i| s.frame((i + shift) % 48).clone())
            .collect();
        let relabeled = SubbundleField::new(s.bundle().clone(), 1, relabeled).unwrap();
        prop_assert_eq!(winding_halfturns(&relabeled).unwrap(), k);
        let reversed: Vec<DMatrix<f64>> = (0..48)
            .map(|i| s.frame((48 - i) % 48).clone())
            .collect();
        let reversed = SubbundleField::new(s.bundle().clone(), 1, reversed).unwrap();
        prop_assert_eq!(winding_halfturns(&reversed).unwrap(), -k);
    }

    #[test]
    fn winding_parity_is_the_monodromy_sign(seed in any::<u64>(), k in -4i64..=4) {
        let s = wobbled_line_field(seed, 48, k);
        let w1 = monodromy_w1(&s).unwrap();
        let winding = winding_halfturns(&s).unwrap();
        prop_assert_eq!(w1 == 1, winding.rem_euclid(2) == 0);
    }

    #[test]
    fn positive_isometries_invert_each_other(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = sample::rng(seed);
        let bundle = DiscreteBundle::trivial(8, n).unwrap();
        let forms0 = (0..8).map(|_| sample::spd(&mut rng, n)).collect();
        let forms1 = (0..8).map(|_| sample::spd(&mut rng, n)).collect();
        let q0 = FormField::new(bundle.clone(), forms0).unwrap();
        let q1 = FormField::new(bundle, forms1).unwrap();
        let w01 = isometry_positive(&q0, &q1, 12).unwrap();
        let w10 = isometry_positive(&q1, &q0, 12).unwrap();
        for (a, b) in w01.endpoint().maps().iter().zip(w10.endpoint().maps()) {
            let prod = a * b;
            prop_assert!(rel_frobenius(&prod, &DMatrix::identity(n, n)) < 1e-8);
        }
    }
}
