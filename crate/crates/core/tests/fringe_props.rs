mod common;

use std::f64::consts::PI;

use hyperwitness::{
    coincidence_rate, delay_grid, fit_visibility, pattern, read_pattern_csv, sample_pattern,
    write_pattern_csv, FringeConfig, Stage,
};
use proptest::prelude::*;

fn cfg(visibility: f64, phase: f64, stage: Stage) -> FringeConfig {
    FringeConfig {
        visibility,
        phase,
        stage,
        ..FringeConfig::default()
    }
}

#[test]
fn halving_bandwidth_doubles_fitted_width() {
    let wide = FringeConfig {
        bandwidth_nm: 6.0,
        ..cfg(0.815, 0.0, Stage::First)
    };
    let narrow = FringeConfig {
        bandwidth_nm: 3.0,
        ..wide
    };
    let delays = delay_grid(600.0, 241);
    let a = fit_visibility(&pattern(&wide, &delays).unwrap(), &wide).unwrap();
    let b = fit_visibility(&pattern(&narrow, &delays).unwrap(), &narrow).unwrap();
    let ratio = b.fwhm_um.value / a.fwhm_um.value;
    assert!((ratio - 2.0).abs() < 0.01, "{ratio}");
}

#[test]
fn sampled_width_matches_envelope() {
    for stage in [Stage::First, Stage::Second] {
        let c = cfg(1.0, 0.0, stage);
        let pts = pattern(&c, &delay_grid(600.0, 2401)).unwrap();
        let w = common::sampled_fwhm(&pts, c.baseline);
        assert!((w / c.fwhm_um() - 1.0).abs() < 1e-3, "{stage:?}: {w}");
    }
}

#[test]
fn fit_uncertainty_covers_truth() {
    let truth = cfg(0.815, 0.0, Stage::First);
    let delays = delay_grid(300.0, 61);
    let mut inside = 0;
    for seed in 0..100 {
        let pts = sample_pattern(&truth, &delays, 1.0, seed).unwrap();
        let fit = fit_visibility(&pts, &truth).unwrap();
        if (fit.visibility.value - truth.visibility).abs() <= 3.0 * fit.visibility.sigma {
            inside += 1;
        }
    }
    assert!(inside >= 95, "{inside}/100 within 3 sigma");
}

#[test]
fn csv_round_trip_is_exact_with_full_precision() {
    let pts = sample_pattern(
        &cfg(0.7, 0.3, Stage::Second),
        &delay_grid(500.0, 33),
        2.5,
        9,
    )
    .unwrap();
    let mut buf = Vec::new();
    write_pattern_csv(&pts, &mut buf, |v| format!("{v:?}")).unwrap();
    assert_eq!(read_pattern_csv(buf.as_slice()).unwrap(), pts);
}

proptest! {
    #[test]
    fn complementary_phases_sum_to_twice_baseline(
        v in 0.0f64..=1.0,
        phase in -10.0f64..10.0,
        delay in -500.0f64..500.0,
        baseline in 0.0f64..1e5,
    ) {
        let a = FringeConfig { baseline, ..cfg(v, phase, Stage::First) };
        let b = FringeConfig { phase: phase + PI, ..a };
        let sum = coincidence_rate(delay, &a) + coincidence_rate(delay, &b);
        prop_assert!((sum - 2.0 * baseline).abs() <= 1e-12 * baseline.max(1.0));
    }

    #[test]
    fn rates_are_nonnegative(
        v in 0.0f64..=1.0,
        phase in -10.0f64..10.0,
        delay in -500.0f64..500.0,
        factor in 0.0f64..=1.0,
        second in any::<bool>(),
    ) {
        let stage = if second { Stage::Second } else { Stage::First };
        let c = FringeConfig { dephasing_factor: factor, ..cfg(v, phase, stage) };
        prop_assert!(coincidence_rate(delay, &c) >= 0.0);
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>()) {
        let c = cfg(0.877, 0.0, Stage::Second);
        let d = delay_grid(400.0, 21);
        prop_assert_eq!(sample_pattern(&c, &d, 0.5, seed).unwrap(), sample_pattern(&c, &d, 0.5, seed).unwrap());
    }
}
