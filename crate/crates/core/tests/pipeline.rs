use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use tur_core::entanglement::{concurrence, werner_concurrence};
use tur_core::io::{parse_counts, read_density, write_counts, write_density};
use tur_core::optimizer::{maximize, OptimizerConfig};
use tur_core::rng::stream_rng;
use tur_core::states::{bell_state, density_from_pure, werner_state, WernerParams};
use tur_core::tightness::{scan, scan_with};
use tur_core::tomography::{monte_carlo_errors, reconstruct, simulate_counts, Quantity, Shots};
use tur_core::uncertainty::{RatioForm, UncertaintyFunction};
use tur_core::LAMBDA;

use rand::Rng;

#[test]
fn werner_concurrence_matches_wootters() {
    let mut rng = stream_rng(21, 0);
    for _ in 0..200 {
        let alpha = rng.random_range(0.0..std::f64::consts::PI);
        let eta = rng.random_range(0.0..=1.0);
        let rho = werner_state(WernerParams { alpha, eta }).unwrap();
        let numeric = concurrence(&rho).unwrap().concurrence;
        assert!(
            (numeric - werner_concurrence(alpha, eta).unwrap()).abs() < 1e-9,
            "{alpha} {eta}"
        );
    }
}

#[test]
fn maxima_have_period_half_pi_and_grow_with_entanglement() {
    let config = OptimizerConfig::default();
    let g_max = |alpha: f64| {
        maximize(
            &density_from_pure(&bell_state(alpha)),
            UncertaintyFunction::G,
            &config,
        )
        .unwrap()
        .best_value
    };
    let mut previous = f64::NEG_INFINITY;
    for i in 0..=6 {
        let alpha = FRAC_PI_4 * i as f64 / 6.0;
        let here = g_max(alpha);
        assert!((here - g_max(alpha + FRAC_PI_2)).abs() < 1e-6);
        assert!(here >= previous - 1e-6);
        previous = here;
    }
}

#[test]
fn optimizer_is_deterministic() {
    let rho = werner_state(WernerParams {
        alpha: 0.3,
        eta: 0.7,
    })
    .unwrap();
    let config = OptimizerConfig {
        seed: 17,
        ..OptimizerConfig::default()
    };
    for func in UncertaintyFunction::ALL {
        assert_eq!(
            maximize(&rho, func, &config).unwrap(),
            maximize(&rho, func, &config).unwrap()
        );
    }
}

#[test]
fn scan_spans_several_chunks_deterministically() {
    let a = scan_with(RatioForm::KProduct, 100_000, 8, true).unwrap();
    let b = scan_with(RatioForm::KProduct, 100_000, 8, true).unwrap();
    assert_eq!(a, b);
    assert!(a.min_ratio >= LAMBDA - 1e-9);
    let samples = a.samples.unwrap();
    assert!(samples.iter().all(|&(_, r)| r >= LAMBDA - 1e-9));
    assert_eq!(samples.len() as u64, a.samples_accepted);
    // a different seed draws different samples
    assert_ne!(
        scan(RatioForm::KProduct, 100_000, 9)
            .unwrap()
            .samples_accepted,
        0
    );
}

#[test]
fn files_round_trip_through_reconstruction() {
    let rho = werner_state(WernerParams {
        alpha: 0.6,
        eta: 0.9,
    })
    .unwrap();
    let records = simulate_counts(&rho, 20_000, 4).unwrap();
    let parsed = parse_counts(&write_counts(&records)).unwrap();
    assert_eq!(parsed, records);
    let rho_hat = reconstruct(&parsed).unwrap();
    let back = read_density(&write_density(rho_hat.matrix())).unwrap();
    assert_eq!(back.matrix().max_abs_diff(rho_hat.matrix()), 0.0);
}

#[test]
fn error_bars_shrink_with_shots() {
    let rho = density_from_pure(&bell_state(FRAC_PI_4));
    let config = OptimizerConfig::default();
    let std_at = |shots| {
        monte_carlo_errors(
            &rho,
            &[Quantity::Concurrence],
            Shots::Finite(shots),
            60,
            5,
            &config,
        )
        .unwrap()[0]
            .1
            .std
    };
    assert!(std_at(1_000) > std_at(100_000));
    let exact =
        monte_carlo_errors(&rho, &[Quantity::Concurrence], Shots::Exact, 3, 5, &config).unwrap();
    assert_eq!(exact[0].1.std, 0.0);
    assert!((exact[0].1.mean - 1.0).abs() < 1e-9);
}

#[cfg(feature = "parallel")]
#[test]
fn results_do_not_depend_on_thread_count() {
    let rho = werner_state(WernerParams {
        alpha: 0.4,
        eta: 0.8,
    })
    .unwrap();
    let config = OptimizerConfig::default();
    let run = || {
        (
            scan(RatioForm::JProduct, 80_000, 3).unwrap(),
            maximize(&rho, UncertaintyFunction::F, &config).unwrap(),
            monte_carlo_errors(
                &rho,
                &Quantity::ALL[4..],
                Shots::Finite(3_000),
                8,
                1,
                &config,
            )
            .unwrap(),
        )
    };
    let pool = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
    };
    let one = pool(1).install(run);
    let four = pool(4).install(run);
    assert_eq!(one.0, four.0);
    assert_eq!(one.1, four.1);
    assert_eq!(one.2, four.2);
}
