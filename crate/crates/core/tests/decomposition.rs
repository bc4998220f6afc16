//! Independent blocks multiply, and partitions are structurally sound.

mod common;

use std::collections::BTreeSet;

use common::{random_system, rng, shifted, union, BUDGET};
use ilcount_core::{count, decompose, oracle_count, BigInt, CounterConfig, RowId, System, VarId};
use rand::Rng;

fn block(r: &mut rand_chacha::ChaCha8Rng) -> System {
    let n = r.random_range(1..=3);
    let m = r.random_range(1..=n + 1);
    random_system(r, n, m, n, (-4, 3), 5, 6)
}

fn check_partition(s: &System) {
    let p = decompose(s);
    // Variables are covered exactly once.
    let mut seen = BTreeSet::new();
    for c in &p.components {
        for v in &c.vars {
            assert!(seen.insert(*v), "{v} in two components");
        }
    }
    assert_eq!(seen, s.vars().collect::<BTreeSet<VarId>>());
    // Every row with support lives in exactly one component, and only
    // mentions that component's variables.
    let mut rows = BTreeSet::new();
    for c in &p.components {
        for id in &c.rows {
            assert!(rows.insert(*id));
            let row = s.row(*id).unwrap();
            assert!(row.support().all(|v| c.vars.contains(&v)));
        }
    }
    let nonempty: BTreeSet<RowId> = s
        .rows()
        .filter(|(_, r)| !r.is_empty())
        .map(|(id, _)| id)
        .collect();
    assert_eq!(rows, nonempty);
    // Components are connected: a component's primal graph is one piece.
    for c in &p.components {
        let sub = s.restrict(&c.vars, &c.rows);
        assert_eq!(decompose(&sub).len(), 1);
    }
}

#[test]
fn product_law_on_constructed_blocks() {
    let mut r = rng(30);
    for _ in 0..300 {
        let k = r.random_range(2..=4);
        let mut parts = Vec::new();
        let mut offset = 0;
        for _ in 0..k {
            let b = block(&mut r);
            let n = b.num_vars() as u32;
            parts.push(shifted(&b, offset));
            offset += n;
        }
        let whole = union(&parts);
        let expected: BigInt = parts
            .iter()
            .map(|p| oracle_count(p, BUDGET).unwrap())
            .product();
        assert_eq!(
            count(&whole, &CounterConfig::default()).unwrap().count,
            expected
        );
        if whole.box_size() <= BigInt::from(BUDGET) {
            assert_eq!(oracle_count(&whole, BUDGET).unwrap(), expected);
        }
        check_partition(&whole);
    }
}

#[test]
fn partition_of_random_systems() {
    let mut r = rng(31);
    for _ in 0..300 {
        let n = r.random_range(1..=8);
        let m = r.random_range(0..=n);
        let l = r.random_range(1..=3.min(n));
        check_partition(&random_system(&mut r, n, m, l, (-4, 3), 5, 6));
    }
}
