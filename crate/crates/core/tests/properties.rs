use std::f64::consts::PI;

use hifi_core::ancilla::{cz_ancilla_state, single_ancilla_state, CoefficientProfile};
use hifi_core::fidelity::{average_error_exact, average_error_second_order, success_probability_exact, InputEnsemble};
use hifi_core::fock::{FockState, ModeUnitary, OccupationVector};
use hifi_core::optimize::optimize_second_order;
use hifi_core::protocol::{fourier_shift_phase, teleport_enumerate, QubitAmplitudes};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn unitary(m: usize, entries: &[(f64, f64)]) -> ModeUnitary {
    let a = DMatrix::from_iterator(m, m, entries.iter().map(|&(re, im)| Complex64::new(re, im)));
    ModeUnitary::new(a.qr().q()).expect("QR factor is unitary")
}

fn arb_unitary(m: usize) -> impl Strategy<Value = ModeUnitary> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), m * m)
        .prop_filter("full rank", |v| v.iter().map(|(a, b)| a.abs() + b.abs()).sum::<f64>() > 0.1)
        .prop_map(move |v| unitary(m, &v))
}

/// Normalized superposition of a few basis states on `m` modes.
fn arb_state(m: usize, max_photons: u8) -> impl Strategy<Value = FockState> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_photons, m), -1.0..1.0f64, -1.0..1.0f64),
        1..5,
    )
    .prop_filter_map("non-zero", move |terms| {
        let terms = terms
            .into_iter()
            .map(|(occ, re, im)| (OccupationVector::new(occ), Complex64::new(re, im)));
        FockState::normalized_from_terms(m, terms).ok()
    })
}

fn arb_qubit() -> impl Strategy<Value = QubitAmplitudes> {
    (0.0..=1.0f64, 0.0..2.0 * PI, 0.0..2.0 * PI).prop_map(|(p0, a, b)| {
        QubitAmplitudes::normalized(Complex64::from_polar(p0.sqrt(), a), Complex64::from_polar((1.0 - p0).sqrt(), b))
            .unwrap()
    })
}

fn arb_profile(max_n: usize) -> impl Strategy<Value = CoefficientProfile> {
    (1..=max_n)
        .prop_flat_map(|n| prop::collection::vec(0.0..1.0f64, n + 1))
        .prop_filter_map("non-zero", |c| CoefficientProfile::custom(c).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitaries_preserve_norm(u in arb_unitary(3), s in arb_state(4, 3)) {
        let out = s.apply_mode_unitary(&u, &[0, 2, 3]).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn photons_are_conserved_on_the_subset(u in arb_unitary(2), s in arb_state(3, 3)) {
        let out = s.apply_mode_unitary(&u, &[1, 2]).unwrap();
        let totals = |st: &FockState| {
            st.iter().map(|(o, _)| (o.get(0), o.get(1) as u32 + o.get(2) as u32)).collect::<std::collections::BTreeSet<_>>()
        };
        prop_assert!(totals(&out).is_subset(&totals(&s)));
    }

    #[test]
    fn adjoint_undoes_unitary(u in arb_unitary(3), s in arb_state(3, 3)) {
        let back = s
            .apply_mode_unitary(&u, &[0, 1, 2]).unwrap()
            .apply_mode_unitary(&u.adjoint(), &[0, 1, 2]).unwrap();
        prop_assert!(back.distance(&s).unwrap() < 1e-10);
    }

    #[test]
    fn measurement_is_complete(u in arb_unitary(3), s in arb_state(4, 2)) {
        let state = s.apply_mode_unitary(&u, &[1, 2, 3]).unwrap();
        let outcomes = state.measure(&[0, 2]).unwrap();
        let total: f64 = outcomes.iter().map(|m| m.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        for m in outcomes {
            prop_assert!((m.post_state.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn shifted_input_rephases_each_pattern(counts in (1usize..=5).prop_flat_map(|m| prop::collection::vec(0u8..=2, m))) {
        let m = counts.len();
        let modes: Vec<usize> = (0..m).collect();
        let dft = ModeUnitary::dft(m).unwrap();
        let state = FockState::basis(OccupationVector::new(counts));
        let direct = state.apply_mode_unitary(&dft, &modes).unwrap();
        let shifted = state.cyclic_shift(&modes).unwrap().apply_mode_unitary(&dft, &modes).unwrap();
        let rephased = FockState::from_terms(m, direct.iter().map(|(o, a)| (o.clone(), a * fourier_shift_phase(o)))).unwrap();
        prop_assert!(rephased.distance(&shifted).unwrap() < 1e-10);
    }

    #[test]
    fn teleport_matches_closed_form(q in arb_qubit(), p in arb_profile(4)) {
        let mut total = 0.0;
        for o in teleport_enumerate(&q, &p).unwrap() {
            let k = o.k as i64;
            let norm = (q.p0() * p.f(k).powi(2) + q.p1() * p.f(k - 1).powi(2)).sqrt();
            let expected = [q.a0() * p.f(k) / norm, q.a1() * p.f(k - 1) / norm];
            let got = o.output.to_array();
            prop_assert!((got[0] - expected[0]).norm() < 1e-10 && (got[1] - expected[1]).norm() < 1e-10);
            if o.degenerate {
                let fixed = if o.k == 0 { [1.0, 0.0] } else { [0.0, 1.0] };
                prop_assert!((got[0].norm() - fixed[0]).abs() < 1e-12 && (got[1].norm() - fixed[1]).abs() < 1e-12);
            }
            total += o.probability;
        }
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn teleport_is_linear_in_the_input(q in arb_qubit(), n in 1usize..=3) {
        let p = CoefficientProfile::sine(n).unwrap();
        let zero = teleport_enumerate(&QubitAmplitudes::basis(false), &p).unwrap();
        let one = teleport_enumerate(&QubitAmplitudes::basis(true), &p).unwrap();
        let find = |v: &[hifi_core::protocol::TeleportOutcome], o: &OccupationVector| v.iter().find(|x| &x.pattern == o).cloned();
        for o in teleport_enumerate(&q, &p).unwrap() {
            let mut combo = [Complex64::new(0.0, 0.0); 2];
            for (branch, alpha) in [(find(&zero, &o.pattern), q.a0()), (find(&one, &o.pattern), q.a1())] {
                if let Some(b) = branch {
                    for (c, a) in combo.iter_mut().zip(b.output.to_array()) {
                        *c += alpha * b.probability.sqrt() * a;
                    }
                }
            }
            let expected = QubitAmplitudes::normalized(combo[0], combo[1]).unwrap();
            let got = o.output.to_array();
            prop_assert!((got[0] - expected.a0()).norm() < 1e-10 && (got[1] - expected.a1()).norm() < 1e-10);
        }
    }

    #[test]
    fn ancilla_states_are_normalized(p in arb_profile(5)) {
        let s = single_ancilla_state(&p);
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        let nonzero = p.coeffs().iter().filter(|c| c.abs() > 0.0).count();
        prop_assert_eq!(s.len(), nonzero);
        for (occ, _) in s.iter() {
            prop_assert_eq!(occ.total(), p.n());
            // y is x with every bit flipped
            for i in 0..p.n() {
                prop_assert_eq!(occ.get(i) + occ.get(p.n() + i), 1);
            }
        }
    }

    #[test]
    fn cz_ancilla_is_signed_product(p in arb_profile(3)) {
        let n = p.n();
        let cz = cz_ancilla_state(&p, &p).unwrap();
        let single = single_ancilla_state(&p);
        let product = single.tensor(&single).unwrap();
        let stripped = FockState::from_terms(4 * n, cz.iter().map(|(o, a)| {
            let j = (0..n).map(|i| o.get(i) as usize).sum::<usize>();
            let j2 = (2 * n..3 * n).map(|i| o.get(i) as usize).sum::<usize>();
            (o.clone(), if (j * j2) % 2 == 1 { -a } else { *a })
        })).unwrap();
        prop_assert!(stripped.distance(&product).unwrap() < 1e-15);
    }

    #[test]
    fn success_probability_is_bounded(q in arb_qubit(), p in arb_profile(6)) {
        for k in 0..=p.n() + 1 {
            if let Ok(s) = success_probability_exact(&q, &p, k) {
                prop_assert!((0.0..=1.0).contains(&s));
                let flat = (p.f(k as i64) - p.f(k as i64 - 1)).abs() < 1e-15;
                let trivial = q.p0() * q.p1() < 1e-15;
                if flat || trivial {
                    prop_assert!((s - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ensemble_error_equals_difference_sum(p in arb_profile(12)) {
        let exact = average_error_exact(&p, &InputEnsemble::uniform_p0()).unwrap();
        prop_assert!((exact - average_error_second_order(&p)).abs() < 1e-13);
    }

    #[test]
    fn second_order_optimum_beats_any_profile(p in arb_profile(8)) {
        let best = optimize_second_order(p.n()).unwrap();
        prop_assert!(best.objective_value <= average_error_second_order(&p) + 1e-14);
    }
}
