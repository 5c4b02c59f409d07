mod common;

use hyperwitness::observables::StabilizerSet;
use hyperwitness::{
    density, dephase_dof, dof_white_noise, evaluate_witness, hyper_state, pauli_expectation,
    stabilizer, visibility_state, white_noise, witness_noise_threshold, DensityMatrix, Dof,
    NoiseChannel, NoiseModel, PerDof, WitnessKind,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ideal() -> DensityMatrix {
    density(&hyper_state(0.0, 0.0, 0.0).unwrap())
}

#[test]
fn channel_outputs_are_valid_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let rho = common::random_mixed(hyperwitness::Register::FULL, &mut rng);
        let dof = Dof::ALL[rng.random_range(0..3)];
        let p = rng.random_range(0.0..=1.0);
        let outputs = [
            white_noise(&rho, p).unwrap(),
            dof_white_noise(&rho, p).unwrap(),
            dephase_dof(&rho, dof, p).unwrap(),
            visibility_state(&PerDof {
                pi: rng.random_range(0.0..=1.0),
                k: rng.random_range(0.0..=1.0),
                c: rng.random_range(0.0..=1.0),
            })
            .unwrap(),
        ];
        for out in outputs {
            out.validate().unwrap();
            let ev = out.eigenvalues();
            assert!(ev[0] >= -1e-10);
            assert!((out.trace().re - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn witnesses_follow_closed_forms_on_a_grid() {
    let rho = ideal();
    for i in 0..=20 {
        let p = i as f64 / 20.0;
        let q = 1.0 - p;
        // Per-DOF white noise: every DOF factor carries (1-p) correlations.
        let local = dof_white_noise(&rho, p).unwrap();
        let w2 = 3.0 - 4.0 * ((2.0 - p) / 2.0).powi(3);
        let w3 = 2.0 - 3.0 * ((3.0 - 2.0 * p) / 3.0).powi(3);
        assert!((evaluate_witness(&local, WitnessKind::W2).unwrap() - w2).abs() < 1e-9);
        assert!((evaluate_witness(&local, WitnessKind::W3).unwrap() - w3).abs() < 1e-9);
        // Global white noise: every nontrivial stabilizer product is (1-p).
        let global = white_noise(&rho, p).unwrap();
        assert!(
            (evaluate_witness(&global, WitnessKind::W2).unwrap() - (3.0 - (1.0 + 7.0 * q) / 2.0))
                .abs()
                < 1e-9
        );
        assert!(
            (evaluate_witness(&global, WitnessKind::W3).unwrap() - (-1.0 + 26.0 * p / 9.0)).abs()
                < 1e-9
        );
        for channel in [NoiseChannel::White, NoiseChannel::DofWhite] {
            let noisy = channel.apply(&rho, p).unwrap();
            for kind in [WitnessKind::Wpi, WitnessKind::Wk, WitnessKind::Wc] {
                assert!((evaluate_witness(&noisy, kind).unwrap() - (2.0 * p - 1.0)).abs() < 1e-9);
            }
            for s in 1..=6 {
                assert!(
                    (pauli_expectation(&noisy, &stabilizer(s).unwrap()).unwrap() - q).abs() < 1e-9
                );
            }
        }
    }
}

#[test]
fn local_noise_factorizes_cross_dof_products() {
    let noisy = dof_white_noise(&ideal(), 0.2).unwrap();
    for set in StabilizerSet::all().filter(|s| s.one_per_dof()) {
        let dofs = set.len() as i32;
        let v = pauli_expectation(&noisy, &set.operator()).unwrap();
        assert!((v - 0.8f64.powi(dofs)).abs() < 1e-12, "{set}");
    }
}

#[test]
fn w3_tolerates_more_noise_than_w2() {
    for channel in [NoiseChannel::DofWhite, NoiseChannel::White] {
        let t2 = witness_noise_threshold(WitnessKind::W2, channel, 1e-6).unwrap();
        let t3 = witness_noise_threshold(WitnessKind::W3, channel, 1e-6).unwrap();
        assert!(t3 > t2, "{channel}: {t3} <= {t2}");
    }
}

#[test]
fn visibility_model_of_measured_fringes() {
    // Each per-DOF witness reads back minus its visibility.
    let v = PerDof {
        pi: 0.733,
        k: 0.815,
        c: 0.70,
    };
    let rho = visibility_state(&v).unwrap();
    for (kind, vis) in [
        (WitnessKind::Wpi, v.pi),
        (WitnessKind::Wk, v.k),
        (WitnessKind::Wc, v.c),
    ] {
        assert!((evaluate_witness(&rho, kind).unwrap() - (-vis)).abs() < 1e-12);
    }
    let model = NoiseModel {
        visibility: v,
        ..NoiseModel::default()
    };
    assert_eq!(model.state().unwrap(), rho);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dephasing_composes(q1 in 0.0f64..=1.0, q2 in 0.0f64..=1.0, dof_i in 0usize..3) {
        let dof = Dof::ALL[dof_i];
        let rho = ideal();
        let twice = dephase_dof(&dephase_dof(&rho, dof, q1).unwrap(), dof, q2).unwrap();
        let once = dephase_dof(&rho, dof, q1 + q2 - 2.0 * q1 * q2).unwrap();
        prop_assert!(twice.matrix().max_abs_diff(once.matrix()) < 1e-12);
    }

    #[test]
    fn dephasing_scales_only_the_x_type_stabilizer(q in 0.0f64..=1.0, dof_i in 0usize..3) {
        let dof = Dof::ALL[dof_i];
        let out = dephase_dof(&ideal(), dof, q).unwrap();
        let odd = 2 * dof_i + 1;
        prop_assert!((pauli_expectation(&out, &stabilizer(odd).unwrap()).unwrap() - (1.0 - 2.0 * q)).abs() < 1e-12);
        prop_assert!((pauli_expectation(&out, &stabilizer(odd + 1).unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }
}
