use proptest::prelude::*;

use magqrm_core::perturbation::geff3_general_detailed;
use magqrm_core::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn coupling() -> impl Strategy<Value = f64> {
    prop_oneof![-0.3..-0.01f64, 0.01..0.3f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamiltonian_is_hermitian(
        omega0 in 0.1..4.0f64,
        qubits in prop::collection::vec((0.3..2.0f64, -0.3..0.3f64, -0.3..0.3f64), 1..=3),
        n_max in 2usize..8,
    ) {
        let qubits = qubits.into_iter().map(|(omega_q, g_r, g_cr)| QubitParams { omega_q, g_r, g_cr }).collect();
        let p = ModelParams::new(omega0, qubits, n_max).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        prop_assert!(h.is_hermitian(0.0));
        prop_assert!(h.is_real());
    }

    #[test]
    fn bogoliubov_hyperbolic_identity(a in 0.1..5.0f64, frac in -0.49..0.49f64) {
        let sq = bogoliubov(a, frac * a).unwrap();
        prop_assert!((sq.cosh_r.powi(2) - sq.sinh_r.powi(2) - 1.0).abs() < 1e-12);
        prop_assert!((sq.omega0 - (a * a - 4.0 * frac * frac * a * a).sqrt()).abs() < 1e-12 * a);
    }

    #[test]
    fn general_third_order_matches_identical_form(
        omega0 in 0.2..5.0f64,
        omega_q in 0.3..2.0f64,
        g_r in coupling(),
        g_cr in coupling(),
    ) {
        prop_assume!((omega0 - omega_q).abs() > 1e-3);
        let general = geff3_general(&PertInputs::identical(omega0, omega_q, g_r, g_cr)).unwrap();
        let closed = geff3_identical(omega0, omega_q, g_r, g_cr).unwrap();
        let scale = geff3_general_detailed(&PertInputs::identical(omega0, omega_q, g_r, g_cr)).unwrap().largest_summand;
        prop_assert!((general - closed).abs() <= 1e-12 * scale, "{general} vs {closed}");
    }

    #[test]
    fn couplings_are_odd_in_counter_rotating_terms(
        omega0 in 0.2..5.0f64,
        omega_q in 0.3..2.0f64,
        g_r in coupling(),
        g_cr in coupling(),
    ) {
        prop_assume!((omega0 - omega_q).abs() > 1e-3);
        let flip = |f: &dyn Fn(f64) -> f64| f(g_cr) + f(-g_cr);
        prop_assert!(flip(&|x| geff3_identical(omega0, omega_q, g_r, x).unwrap()).abs() < 1e-15);
        prop_assert!(flip(&|x| geff5_identical_resonance(g_r, x, omega_q).unwrap()).abs() < 1e-18);
        prop_assert!(flip(&|x| geff3_shifted(g_r, x, omega_q).unwrap()).abs() < 1e-18);
        prop_assert!(flip(&|x| geff_total_resonance(g_r, x, omega_q).unwrap()).abs() < 1e-18);
        let inp = |x| PertInputs::identical(omega0, omega_q, g_r, x);
        prop_assert!((geff3_general(&inp(g_cr)).unwrap() + geff3_general(&inp(-g_cr)).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn coupling_scaling(g_r in coupling(), g_cr in coupling(), omega_q in 0.5..2.0f64) {
        for lambda in [0.5f64, 2.0] {
            let g3 = |s: f64| geff3_identical(2.0 * omega_q, omega_q, s * g_r, s * g_cr).unwrap();
            prop_assert!(rel(g3(lambda), lambda.powi(3) * g3(1.0)) < 1e-12);
            let total = |s: f64| geff_total_resonance(s * g_r, s * g_cr, omega_q).unwrap();
            prop_assert!((total(lambda) - lambda.powi(5) * total(1.0)).abs() <= 1e-12 * lambda.powi(5) * (g_r.abs() + g_cr.abs()).powi(5));
        }
    }

    #[test]
    fn fifth_order_families_reproduce_closed_form(g_r in coupling(), g_cr in coupling(), omega_q in 0.5..2.0f64) {
        let fam = geff5_diagrams(&PertInputs::resonant(g_r, g_cr, omega_q), FifthOrderMode::Anchored).unwrap();
        let closed = geff5_identical_resonance(g_r, g_cr, omega_q).unwrap();
        let scale = (g_r.abs() + g_cr.abs()).powi(5) / omega_q.powi(4);
        prop_assert!((fam.total() - closed).abs() < 1e-12 * scale);
    }

    #[test]
    fn third_order_cancels_on_resonance(
        omega_q in prop::array::uniform3(0.5..1.5f64),
        g_r in prop::array::uniform3(coupling()),
        g_cr in prop::array::uniform3(coupling()),
    ) {
        let inp = PertInputs { omega0: omega_q.iter().sum(), omega_q, g_r, g_cr };
        let s = geff3_general_detailed(&inp).unwrap();
        prop_assert!(s.value.abs() <= 1e-14 * s.largest_summand);
    }

    #[test]
    fn spectrum_invariant_under_qubit_permutation(
        qubits in prop::collection::vec((0.5..1.5f64, -0.2..0.2f64, -0.2..0.2f64), 3),
        omega0 in 0.5..3.5f64,
        swap in 1usize..3,
    ) {
        let qubits: Vec<_> = qubits.into_iter().map(|(omega_q, g_r, g_cr)| QubitParams { omega_q, g_r, g_cr }).collect();
        let p = ModelParams::new(omega0, qubits, 6).unwrap();
        let mut q = p.clone();
        q.qubits.swap(0, swap);
        let a = linalg::eigvalsh(&build_hamiltonian(&p).unwrap());
        let b = linalg::eigvalsh(&build_hamiltonian(&q).unwrap());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn gap_kind_serializes_lowercase() {
    assert_eq!(
        serde_json::to_string(&GapKind::Anticrossing).unwrap(),
        "\"anticrossing\""
    );
    assert_eq!(
        serde_json::to_string(&GapKind::Crossing).unwrap(),
        "\"crossing\""
    );
}

#[test]
fn errors_name_the_problem() {
    let err = bogoliubov(1.0, 0.6).unwrap_err();
    assert!(matches!(err, Error::Domain(_)));
    let err = geff3_identical(1.0, 1.0, 0.1, 0.1).unwrap_err();
    assert!(matches!(err, Error::Singularity { .. }), "{err}");
}
