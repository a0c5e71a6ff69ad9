mod common;

use latdisc::metric::{
    farey_count, farey_enumerate, farey_sample, levy_cdf, levy_quantile, reversal_check, run_sweep, sample_irrational,
    trimmed_sum_diag, Estimator, Measure, SweepConfig, SweepMode,
};
use num_integer::Integer;
use proptest::prelude::*;

#[test]
fn levy_cdf_limits_and_monotonicity() {
    assert_eq!(levy_cdf(0.0), 0.0);
    assert_eq!(levy_cdf(-1.0), 0.0);
    assert!(levy_cdf(1e-3) < 1e-200);
    assert!(1.0 - levy_cdf(1e12) < 1e-5);
    let grid: Vec<f64> = (1..2000).map(|i| i as f64 * 0.01).collect();
    assert!(grid.windows(2).all(|w| levy_cdf(w[0]) <= levy_cdf(w[1])));
}

#[test]
fn levy_cdf_matches_quadrature() {
    for i in 1..=100 {
        let t = 0.05 * i as f64;
        let d = (levy_cdf(t) - common::levy_cdf_quadrature(t)).abs();
        assert!(d <= 1e-9, "t = {t}: {d}");
    }
}

#[test]
fn levy_quantile_inverts_cdf() {
    for p in [0.01, 0.1, 0.5, 0.9, 0.99] {
        assert!((levy_cdf(levy_quantile(p)) - p).abs() < 1e-12);
    }
}

#[test]
fn farey_counts_agree_with_brute_force() {
    let mut brute = 1u64; // 0/1
    for q in 1..=3000u64 {
        brute += (1..=q).filter(|p| p.gcd(&q) == 1).count() as u64;
        if q % 250 == 0 || q <= 20 {
            assert_eq!(farey_count(q), brute, "Q = {q}");
        }
    }
    for q in [1u64, 7, 100, 600] {
        let f: Vec<(u64, u64)> = farey_enumerate(q).collect();
        assert_eq!(f.len() as u64, farey_count(q));
        // strictly increasing, reduced, neighbours unimodular
        for w in f.windows(2) {
            let ((a, b), (c, d)) = (w[0], w[1]);
            assert_eq!(c * b - a * d, 1);
        }
    }
}

#[test]
fn farey_samples_are_reduced_and_reproducible() {
    let a = farey_sample(500, 1000, 3).unwrap();
    assert_eq!(a, farey_sample(500, 1000, 3).unwrap());
    assert!(a.iter().all(|&(p, q)| p >= 1 && p <= q && q <= 500 && p.gcd(&q) == 1));
}

#[test]
fn reversal_is_a_bijection_with_even_length_expansions() {
    let r = reversal_check(300).unwrap();
    assert!(r.well_defined && r.injective, "{r:?}");
    assert!(r.canonical_collisions > 0);
}

fn sweep_in_pool(threads: usize, cfg: &SweepConfig) -> latdisc::metric::SweepResult {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| run_sweep(cfg).unwrap())
}

#[test]
fn sweeps_do_not_depend_on_thread_count() {
    let configs = [
        SweepConfig {
            mode: SweepMode::FareySample { q: 400, m: 300, seed: 11 },
            estimator: Estimator::Exact,
            bits: 256,
        },
        SweepConfig {
            mode: SweepMode::Irrational { n: 5000, m: 200, seed: 11, measure: Measure::Gauss },
            estimator: Estimator::Prop1Mid,
            bits: 256,
        },
    ];
    for cfg in &configs {
        let one = sweep_in_pool(1, cfg);
        let three = sweep_in_pool(3, cfg);
        assert_eq!(one, three);
        assert!(one.records.iter().enumerate().all(|(i, r)| r.id == i));
    }
}

#[test]
fn lebesgue_samples_carry_the_expected_number_of_quotients() {
    // q_K ≈ 2^96 after truncation; Lévy's constant turns that into K
    let expected = 96.0 * std::f64::consts::LN_2 * 12.0 * std::f64::consts::LN_2 / std::f64::consts::PI.powi(2);
    let mut ks: Vec<usize> =
        (0..2000).map(|i| sample_irrational(Measure::Lebesgue, 256, 99, i).unwrap().cf().len().unwrap()).collect();
    ks.sort_unstable();
    let at_least_40 = ks.iter().filter(|&&k| k >= 40).count();
    assert!(at_least_40 as f64 >= 0.99 * ks.len() as f64);
    assert!((ks[ks.len() / 2] as f64 - expected).abs() <= 3.0, "median {} vs {expected}", ks[ks.len() / 2]);
}

#[test]
fn trimmed_sums_approach_their_almost_sure_limit() {
    for measure in [Measure::Gauss, Measure::Lebesgue] {
        for k in [50, 200] {
            let r = trimmed_sum_diag(measure, k, 500, 5).unwrap();
            assert!((r.mean - r.target).abs() <= 0.1 * r.target, "{r:?}");
            assert!((r.target - 1.0 / std::f64::consts::LN_2).abs() < 1e-15);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samples_are_deterministic_per_index(seed in any::<u64>(), index in 0u64..1_000_000) {
        let a = sample_irrational(Measure::Gauss, 256, seed, index).unwrap();
        let b = sample_irrational(Measure::Gauss, 256, seed, index).unwrap();
        prop_assert_eq!(a.cf().prefix(10).ok(), b.cf().prefix(10).ok());
    }
}
