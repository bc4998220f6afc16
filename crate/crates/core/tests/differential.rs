//! Counter against brute-force enumeration on seeded random systems.

mod common;

use common::{random_system, rng, small_system, BUDGET};
use ilcount_core::{
    count, oracle_count, CacheTiming, CounterConfig, SelectionMode, SimplifyConfig,
};
use rand::Rng;

#[test]
fn default_config_matches_oracle() {
    let mut r = rng(1);
    for seed in 0..400 {
        let s = small_system(&mut r);
        let expected = oracle_count(&s, BUDGET).unwrap();
        let got = count(&s, &CounterConfig::default()).unwrap().count;
        assert_eq!(got, expected, "seed {seed}: {s:?}");
    }
}

#[test]
fn random_configs_match_oracle() {
    let mut r = rng(2);
    for seed in 0..300 {
        let s = small_system(&mut r);
        let cfg = CounterConfig {
            simplify: SimplifyConfig::from_mask(r.random_range(0..128)),
            cache_enabled: r.random_bool(0.5),
            lp_per_node: r.random_bool(0.3),
            selection: SelectionMode::ALL[r.random_range(0..3)],
            cache_timing: if r.random_bool(0.5) {
                CacheTiming::PostSimplify
            } else {
                CacheTiming::PreSimplify
            },
            ..CounterConfig::default()
        };
        let expected = oracle_count(&s, BUDGET).unwrap();
        assert_eq!(
            count(&s, &cfg).unwrap().count,
            expected,
            "seed {seed}: {cfg:?} {s:?}"
        );
    }
}

#[test]
fn wider_coefficients_match_oracle() {
    let mut r = rng(3);
    for _ in 0..100 {
        let n = r.random_range(3..=7);
        let m = r.random_range(1..=n);
        let s = random_system(&mut r, n, m, n, (-3, 3), 40, 60);
        let expected = oracle_count(&s, BUDGET).unwrap();
        assert_eq!(
            count(&s, &CounterConfig::default()).unwrap().count,
            expected,
            "{s:?}"
        );
    }
}

#[test]
fn verify_mode_never_disagrees() {
    let mut r = rng(4);
    for _ in 0..100 {
        let s = small_system(&mut r);
        let cfg = CounterConfig {
            verify_cache_every: Some(1),
            ..CounterConfig::default()
        };
        let expected = oracle_count(&s, BUDGET).unwrap();
        assert_eq!(count(&s, &cfg).unwrap().count, expected);
    }
}
