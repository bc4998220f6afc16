//! Every simplification technique, alone and in the full pipeline, keeps
//! the model count.

mod common;

use common::{rng, small_system, BUDGET};
use ilcount_core::simplify::{
    remove_individual_rows, remove_individual_rows_lp, remove_parallel_rows, remove_subset_rows,
    remove_variables, strengthen_bounds, strengthen_coefficients,
};
use ilcount_core::{
    oracle_count, simplify, BigInt, BoundedSimplex, SimplifyConfig, SimplifyLog, System,
    SystemStatus, Technique,
};
use num_traits::Zero;

fn apply(t: Technique, s: &System, log: &mut SimplifyLog) -> System {
    match t {
        Technique::RemoveVariables => remove_variables(s, log),
        Technique::StrengthenBounds => strengthen_bounds(s, log),
        Technique::StrengthenCoefficients => strengthen_coefficients(s, log),
        Technique::RemoveIndividualRows => remove_individual_rows(s, log),
        Technique::RemoveIndividualRowsLp => {
            remove_individual_rows_lp(s, &BoundedSimplex::default(), log).unwrap()
        }
        Technique::RemoveParallelRows => remove_parallel_rows(s, log),
        Technique::RemoveSubsetRows => remove_subset_rows(s, log),
    }
}

fn check_verdict(s: &System, expected: &BigInt) {
    match s.status() {
        SystemStatus::Inconsistent => assert!(expected.is_zero()),
        SystemStatus::Valid => assert_eq!(&s.box_size(), expected),
        SystemStatus::Open => {}
    }
}

#[test]
fn each_technique_preserves_count() {
    for t in Technique::ALL {
        let mut r = rng(10 + t as u64);
        for _ in 0..150 {
            let s = small_system(&mut r);
            let expected = oracle_count(&s, BUDGET).unwrap();
            let mut log = SimplifyLog::default();
            let out = apply(t, &s, &mut log);
            assert_eq!(
                oracle_count(&out, BUDGET).unwrap(),
                expected,
                "{t}: {s:?} -> {out:?}"
            );
            check_verdict(&out, &expected);
        }
    }
}

#[test]
fn repeated_application_preserves_count() {
    let mut r = rng(20);
    for _ in 0..100 {
        let s = small_system(&mut r);
        let expected = oracle_count(&s, BUDGET).unwrap();
        let mut cur = s.clone();
        let mut log = SimplifyLog::default();
        for round in 0..3 {
            for t in Technique::ALL {
                cur = apply(t, &cur, &mut log);
                assert_eq!(
                    oracle_count(&cur, BUDGET).unwrap(),
                    expected,
                    "round {round}, {t}"
                );
            }
        }
    }
}

#[test]
fn pipeline_preserves_count_for_every_subset() {
    let mut r = rng(21);
    let systems: Vec<System> = (0..25).map(|_| small_system(&mut r)).collect();
    for mask in 0..128u8 {
        let cfg = SimplifyConfig::from_mask(mask);
        for s in &systems {
            let expected = oracle_count(s, BUDGET).unwrap();
            let out = simplify(
                s,
                &cfg,
                &BoundedSimplex::default(),
                &mut SimplifyLog::default(),
            )
            .unwrap();
            assert_eq!(
                oracle_count(&out, BUDGET).unwrap(),
                expected,
                "mask {mask:07b}"
            );
            check_verdict(&out, &expected);
        }
    }
}

#[test]
fn cheap_fixpoint_is_idempotent() {
    let mut cfg = SimplifyConfig::none();
    for t in [
        Technique::RemoveVariables,
        Technique::StrengthenBounds,
        Technique::RemoveIndividualRows,
    ] {
        cfg.set(t, true);
    }
    let mut r = rng(22);
    for _ in 0..200 {
        let s = small_system(&mut r);
        let lp = BoundedSimplex::default();
        let once = simplify(&s, &cfg, &lp, &mut SimplifyLog::default()).unwrap();
        let twice = simplify(&once, &cfg, &lp, &mut SimplifyLog::default()).unwrap();
        // A VALID or INCONSISTENT verdict returns early, possibly with
        // fixed variables left in place; only open results are fixpoints.
        assert_eq!(once.status(), twice.status());
        if once.status() == SystemStatus::Open {
            assert_eq!(once, twice);
        } else {
            assert_eq!(
                oracle_count(&once, BUDGET).unwrap(),
                oracle_count(&twice, BUDGET).unwrap()
            );
        }
    }
}

#[test]
fn full_pipeline_output_is_stable_under_cheap_fixpoint() {
    // After the full pipeline the cheap techniques may still find work, but
    // running the pipeline again never changes the count.
    let mut r = rng(23);
    for _ in 0..100 {
        let s = small_system(&mut r);
        let lp = BoundedSimplex::default();
        let cfg = SimplifyConfig::all();
        let once = simplify(&s, &cfg, &lp, &mut SimplifyLog::default()).unwrap();
        let twice = simplify(&once, &cfg, &lp, &mut SimplifyLog::default()).unwrap();
        assert_eq!(
            oracle_count(&twice, BUDGET).unwrap(),
            oracle_count(&s, BUDGET).unwrap()
        );
        assert!(twice.num_rows() <= once.num_rows());
    }
}

#[test]
fn log_counts_removed_rows() {
    let mut r = rng(24);
    for _ in 0..100 {
        let s = small_system(&mut r);
        let mut log = SimplifyLog::default();
        let out = simplify(
            &s,
            &SimplifyConfig::all(),
            &BoundedSimplex::default(),
            &mut log,
        )
        .unwrap();
        if !out.is_inconsistent() {
            assert!(log.rows_removed_total() as usize >= s.num_rows() - out.num_rows());
        }
    }
}
