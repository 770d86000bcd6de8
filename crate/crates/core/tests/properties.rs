use num_complex::Complex;
use piqfc_core::measurement::{
    analyzer_ket, coincidence_probability, format_records, parse_records, simulate_counts, standard_plan, PlanName,
};
use piqfc_core::metrics::{concurrence, eof, fidelity_at, max_fidelity, purity};
use piqfc_core::qfc::{apply_qfc_postselected, efficiency, mode_transform, Arm, EfficiencyModel, QfcConfig};
use piqfc_core::quantum::{hermitian_eigensystem, kron, kron_vec, ComplexMatrix, TwoQubitState};
use piqfc_core::random::{derive_seed, ginibre, random_density_matrix, random_pure_state, random_unitary};
use piqfc_core::source::phase_rotation;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn state(seed: u64) -> TwoQubitState {
    let mut r = rng(seed);
    if seed.is_multiple_of(3) {
        random_pure_state(&mut r)
    } else {
        random_density_matrix(&mut r)
    }
}

fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn angle() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kron_mixed_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c, d) = (ginibre::<f64, _>(2, &mut r), ginibre(2, &mut r), ginibre(2, &mut r), ginibre(2, &mut r));
        let lhs = kron(&a, &b).matmul(&kron(&c, &d));
        let rhs = kron(&a.matmul(&c), &b.matmul(&d));
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
        let abc = kron(&kron(&a, &b), &c);
        let a_bc = kron(&a, &kron(&b, &c));
        prop_assert!(max_abs_diff(&abc, &a_bc) < 1e-12);
    }

    #[test]
    fn eigensystem_reassembles(seed in any::<u64>(), n in 2usize..9) {
        let mut r = rng(seed);
        let h = ginibre::<f64, _>(n, &mut r).hermitian_part();
        let es = hermitian_eigensystem(&h).unwrap();
        prop_assert!(max_abs_diff(&es.reassemble(|x| x), &h) < 1e-10);
        prop_assert!(es.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn mode_transform_is_unitary(th in 0.0..20.0f64, tv in 0.0..20.0f64, ph in angle(), pv in angle()) {
        let u = mode_transform(&QfcConfig::new(th, tv, ph, pv).unwrap());
        let err = (&u.adjoint().matmul(&u) - &ComplexMatrix::identity(4)).frobenius_norm();
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn postselection_yields_a_state(seed in any::<u64>(), th in 0.05..3.0f64, tv in 0.05..3.0f64, ph in angle(), pv in angle(), anti in any::<bool>()) {
        let cfg = QfcConfig::new(th, tv, ph, pv).unwrap();
        let arm = if anti { Arm::AntiStokes } else { Arm::Stokes };
        let input = state(seed);
        if let Ok((out, p)) = apply_qfc_postselected(&input, &cfg, arm) {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
            prop_assert!((out.rho().trace().re - 1.0).abs() < 1e-12);
            prop_assert!(hermitian_eigensystem(out.rho()).unwrap().min_value() > -1e-12);
            // local filtering cannot create entanglement
            prop_assert!(concurrence(&out) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn balanced_conversion_is_a_phase_rotation(seed in any::<u64>(), theta in 0.05..3.0f64, ph in angle(), pv in angle()) {
        let cfg = QfcConfig::balanced(theta, ph, pv).unwrap();
        let input = state(seed);
        let (out, p) = apply_qfc_postselected(&input, &cfg, Arm::AntiStokes).unwrap();
        prop_assert!((p - theta.sin().powi(2)).abs() < 1e-12);
        let z = ComplexMatrix::from_diag(&[Complex::from_polar(1.0, -ph), Complex::from_polar(1.0, -pv)]);
        let expect = input.transform(&kron(&ComplexMatrix::identity(2), &z)).unwrap();
        prop_assert!(out.trace_distance(&expect) < 1e-10);
        prop_assert!((concurrence(&out) - concurrence(&input)).abs() < 1e-9);
    }

    #[test]
    fn metric_ranges(seed in any::<u64>()) {
        let s = state(seed);
        let c = concurrence(&s);
        let e = eof(&s);
        let p = purity(&s);
        let (f, _) = max_fidelity(&s);
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!((0.0..=1.0).contains(&e) && e <= c + 1e-12);
        prop_assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&p));
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn max_fidelity_dominates(seed in any::<u64>(), theta in angle()) {
        let s = state(seed);
        let (f, t) = max_fidelity(&s);
        prop_assert!(fidelity_at(&s, theta) <= f + 1e-12);
        prop_assert!((fidelity_at(&s, t) - f).abs() < 1e-12);
    }

    #[test]
    fn local_unitaries_preserve_entanglement(seed in any::<u64>()) {
        let mut r = rng(seed ^ 0xABCD);
        let s = state(seed);
        let u = kron(&random_unitary::<f64, _>(2, &mut r), &random_unitary(2, &mut r));
        let t = s.transform(&u).unwrap();
        prop_assert!((concurrence(&s) - concurrence(&t)).abs() < 1e-9);
        prop_assert!((purity(&s) - purity(&t)).abs() < 1e-12);
    }

    #[test]
    fn rotation_moves_the_fidelity_angle(seed in any::<u64>(), theta in -3.0..3.0f64) {
        let s = state(seed);
        let rotated = s.transform(&phase_rotation(theta)).unwrap();
        let (f0, t0) = max_fidelity(&s);
        let (f1, t1) = max_fidelity(&rotated);
        prop_assert!((f0 - f1).abs() < 1e-12);
        if s.entry(0, 3).norm() > 1e-6 {
            let d = piqfc_core::qfc::reduce_phase(t1 - t0 - theta);
            prop_assert!(d.abs() < 1e-8, "{d}");
        }
    }

    #[test]
    fn analyzer_ports_partition_unity(seed in any::<u64>(), a in angle(), b in angle(), c in angle(), d in angle()) {
        let s = state(seed);
        let ms = analyzer_ket(a, b);
        let ma = analyzer_ket(c, d);
        let mut total = 0.0;
        for x in [ms, ms.orthogonal()] {
            for y in [ma, ma.orthogonal()] {
                total += s.fidelity_pure(&kron_vec(x.amplitudes(), y.amplitudes()));
            }
        }
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn standard_probabilities_sum_to_nine(seed in any::<u64>()) {
        let s = state(seed);
        let plan = standard_plan(PlanName::Standard36).unwrap();
        let total: f64 = plan.settings.iter().map(|x| coincidence_probability(&s, x)).sum();
        prop_assert!((total - 9.0).abs() < 1e-12);
    }

    #[test]
    fn records_round_trip(seed in any::<u64>(), mean in 0.5..1e4f64) {
        let plan = standard_plan(PlanName::Minimal16).unwrap();
        let recs = simulate_counts(&state(seed), &plan, mean, seed).unwrap();
        let text = format_records(&recs);
        let back = parse_records::<f64>(&text).unwrap();
        prop_assert_eq!(format_records(&back), text);
        prop_assert!(back.iter().zip(&recs).all(|(a, b)| a.count == b.count));
    }

    #[test]
    fn efficiency_is_bounded_and_inverts(eta in 0.01..1.0f64, g in 0.5..50.0f64, frac in 0.0..1.0f64) {
        let m = EfficiencyModel::new(eta, g).unwrap();
        let target = eta * frac;
        let p = m.power_for_efficiency(target).unwrap();
        prop_assert!(p <= m.peak_power() + 1e-12);
        prop_assert!((efficiency(&m, p).unwrap() - target).abs() < 1e-12);
    }

    #[test]
    fn derived_seeds_are_distinct(seed in any::<u64>(), i in 0u64..1_000_000) {
        prop_assert_ne!(derive_seed(seed, i), derive_seed(seed, i + 1));
        prop_assert_ne!(derive_seed(seed, i), derive_seed(seed.wrapping_add(1), i));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mle_ignores_record_order(seed in any::<u64>(), shift in 1usize..35) {
        use piqfc_core::tomography::{mle_reconstruct, MleOptions};
        let plan = standard_plan(PlanName::Standard36).unwrap();
        let recs = simulate_counts(&state(seed), &plan, 200.0, seed).unwrap();
        let mut rotated = recs.clone();
        rotated.rotate_left(shift);
        let opts = MleOptions::default();
        let a = mle_reconstruct(&recs, &opts).unwrap();
        let b = mle_reconstruct(&rotated, &opts).unwrap();
        prop_assert_eq!(a, b);
    }
}
