mod common;

use common::*;
use hyperwitness::observables::{minimal_settings, StabilizerSet};
use hyperwitness::{
    density, evaluate_witness, hyper_state, pauli_expectation, settings_required, stabilizer,
    witness_operator, Register, Witness, WitnessKind,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[test]
fn stabilizers_commute_pairwise() {
    for i in 1..=6 {
        for j in 1..=6 {
            let (a, b) = (stabilizer(i).unwrap(), stabilizer(j).unwrap());
            assert!(a.commutes_with(&b));
            let ab = &dense_pauli(&a) * &dense_pauli(&b);
            let ba = &dense_pauli(&b) * &dense_pauli(&a);
            assert!(ab.max_abs_diff(&ba) < 1e-15);
        }
    }
}

#[test]
fn all_stabilizer_products_are_plus_one() {
    let psi = hyper_state(0.0, 0.0, 0.0).unwrap();
    for set in StabilizerSet::all() {
        let op = set.operator();
        let v = pauli_expectation(&psi, &op).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{set}: {v}");
        let oracle = dense_expectation(&dense_pauli(&op), &psi);
        assert!((oracle.re - v).abs() < 1e-12 && oracle.im.abs() < 1e-12);
    }
}

#[test]
fn product_operator_matches_dense_product() {
    for set in StabilizerSet::all() {
        let dense = set
            .indices()
            .map(|i| dense_pauli(&stabilizer(i).unwrap()))
            .fold(hyperwitness::qcore::CMatrix::identity(64), |acc, m| {
                &acc * &m
            });
        assert!(
            dense.max_abs_diff(&dense_pauli(&set.operator())) < 1e-15,
            "{set}"
        );
    }
}

#[test]
fn pauli_expectation_matches_dense_oracle_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let psi = random_state(Register::FULL, &mut rng);
        let rho = random_mixed(Register::FULL, &mut rng);
        for set in StabilizerSet::all().step_by(5) {
            let op = set.operator();
            let m = dense_pauli(&op);
            assert!(
                (pauli_expectation(&psi, &op).unwrap() - dense_expectation(&m, &psi).re).abs()
                    < 1e-12
            );
            assert!(
                (pauli_expectation(&rho, &op).unwrap() - dense_trace(&m, &rho).re).abs() < 1e-12
            );
        }
    }
}

#[test]
fn witness_operators_match_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let rho = random_mixed(Register::FULL, &mut rng);
    for kind in WitnessKind::ALL {
        for w in [Witness::new(kind), Witness::printed(kind)] {
            let dense = dense_observable(&witness_operator(w), Register::FULL);
            assert!(dense.hermiticity_defect() < 1e-15);
            let want = dense_trace(&dense, &rho);
            assert!((evaluate_witness(&rho, w).unwrap() - want.re).abs() < 1e-12);
        }
    }
}

#[test]
fn witness_expectations_are_real_on_random_mixed_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let ops: Vec<_> = WitnessKind::ALL
        .iter()
        .map(|&k| witness_operator(Witness::new(k)))
        .collect();
    for _ in 0..100 {
        let rho = random_mixed(Register::FULL, &mut rng);
        for op in &ops {
            assert!(op.expectation_complex(&rho).im.abs() < 1e-10);
        }
    }
}

#[test]
fn ideal_witness_floor() {
    let psi = hyper_state(0.0, 0.0, 0.0).unwrap();
    let rho = density(&psi);
    for kind in WitnessKind::ALL {
        assert!((evaluate_witness(&psi, kind).unwrap() + 1.0).abs() < 1e-10);
        assert!((evaluate_witness(&rho, kind).unwrap() + 1.0).abs() < 1e-10);
    }
}

/// W2 and W3 from products of stabilizer expectations, valid on stabilizer
/// eigenstates where those products factorize.
fn w2_product_form(s: &[f64; 7]) -> f64 {
    let even: f64 = [2, 4, 6].iter().map(|&i| (s[i] + 1.0) / 2.0).product();
    let odd: f64 = [1, 3, 5].iter().map(|&i| (s[i] + 1.0) / 2.0).product();
    3.0 - 2.0 * (even + odd)
}

fn w3_product_form(s: &[f64; 7]) -> f64 {
    2.0 - 3.0
        * (1..=3)
            .map(|k| (1.0 + s[2 * k - 1] + s[2 * k]) / 3.0)
            .product::<f64>()
}

#[test]
fn expanded_witnesses_match_product_form_on_stabilizer_eigenstates() {
    for flips in 0..8 {
        let phase = |b: usize| if flips >> b & 1 == 1 { PI } else { 0.0 };
        let psi = hyper_state(phase(0), phase(1), phase(2)).unwrap();
        let mut s = [0.0; 7];
        for (i, slot) in s.iter_mut().enumerate().skip(1) {
            *slot = pauli_expectation(&psi, &stabilizer(i).unwrap()).unwrap();
            assert!((slot.abs() - 1.0).abs() < 1e-12);
        }
        let w2 = evaluate_witness(&psi, WitnessKind::W2).unwrap();
        let w3 = evaluate_witness(&psi, WitnessKind::W3).unwrap();
        assert!((w2 - w2_product_form(&s)).abs() < 1e-10, "flips {flips}");
        assert!((w3 - w3_product_form(&s)).abs() < 1e-10, "flips {flips}");
    }
}

#[test]
fn settings_agree_with_brute_force() {
    for kind in WitnessKind::ALL {
        for w in [Witness::new(kind), Witness::printed(kind)] {
            let op = witness_operator(w);
            assert_eq!(
                settings_required(&op).unwrap(),
                brute_force_settings(&op),
                "{w}"
            );
        }
    }
    assert_eq!(
        brute_force_settings(&witness_operator(WitnessKind::W2.into())),
        2
    );
    assert_eq!(
        brute_force_settings(&witness_operator(WitnessKind::W3.into())),
        8
    );
}

#[test]
fn minimal_settings_read_every_term() {
    for kind in WitnessKind::ALL {
        let op = witness_operator(kind.into());
        let settings = minimal_settings(&op).unwrap();
        for (_, p) in &op.terms {
            assert!(settings.iter().any(|s| p
                .support()
                .all(|(l, letter)| { format!("{letter}") == format!("{:?}", s.basis(l)) })));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn witness_values_are_affine_under_mixing(p in 0.0f64..=1.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_mixed(Register::FULL, &mut rng);
        let b = density(&hyper_state(0.0, 0.0, 0.0).unwrap());
        let m = hyperwitness::mix(&a, &b, p).unwrap();
        for kind in [WitnessKind::W2, WitnessKind::W3, WitnessKind::Wk] {
            let want = (1.0 - p) * evaluate_witness(&a, kind).unwrap() + p * evaluate_witness(&b, kind).unwrap();
            prop_assert!((evaluate_witness(&m, kind).unwrap() - want).abs() < 1e-10);
        }
    }
}
