//! Seeded random systems for the integration tests.

#![allow(dead_code)]

use ilcount_core::{BigInt, Domain, Row, System, VarId};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BUDGET: u64 = 1 << 22;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random system with `n` variables and `m` rows of at most `l` terms.
/// Each variable gets an independent sub-interval of `dom`, coefficients
/// are nonzero in `[-c, c]` and right-hand sides lie in `[-r, r]`.
pub fn random_system(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    l: usize,
    dom: (i64, i64),
    c: i64,
    r: i64,
) -> System {
    let mut s = System::new();
    for j in 1..=n {
        let a = rng.random_range(dom.0..=dom.1);
        let b = rng.random_range(dom.0..=dom.1);
        s.add_var(VarId(j as u32), Domain::new(a.min(b), a.max(b)))
            .unwrap();
    }
    for _ in 0..m {
        let k = rng.random_range(1..=l.min(n));
        let vars = sample(rng, n, k).into_vec();
        let terms: Vec<(VarId, i64)> = vars
            .into_iter()
            .map(|j| {
                let mut a = 0;
                while a == 0 {
                    a = rng.random_range(-c..=c);
                }
                (VarId(j as u32 + 1), a)
            })
            .collect();
        s.add_row(Row::new(terms, rng.random_range(-r..=r)))
            .unwrap();
    }
    s
}

/// Small instance with random shape: n in [2,6], m in [1,n], l in [1,n].
pub fn small_system(rng: &mut ChaCha8Rng) -> System {
    let n = rng.random_range(2..=6);
    let m = rng.random_range(1..=n);
    let l = rng.random_range(1..=n);
    random_system(rng, n, m, l, (-4, 3), 5, 8)
}

/// Values of a satisfying point as a map-friendly vector, one per variable
/// in id order.
pub fn satisfies(s: &System, point: &[BigInt]) -> bool {
    let vars: Vec<VarId> = s.vars().collect();
    s.rows().all(|(_, row)| {
        let lhs: BigInt = row
            .terms()
            .iter()
            .map(|(v, a)| a * &point[vars.iter().position(|w| w == v).unwrap()])
            .sum();
        &lhs <= row.rhs()
    })
}

/// Copy of `s` with variables renumbered by `offset`.
pub fn shifted(s: &System, offset: u32) -> System {
    let mut out = System::new();
    for (v, d) in s.domains() {
        out.add_var(VarId(v.0 + offset), d.clone()).unwrap();
    }
    for (_, row) in s.rows() {
        let terms = row
            .terms()
            .iter()
            .map(|(v, a)| (VarId(v.0 + offset), a.clone()));
        out.add_row(Row::new(terms, row.rhs().clone())).unwrap();
    }
    out
}

/// Disjoint union of systems over distinct variables.
pub fn union(parts: &[System]) -> System {
    let mut out = System::new();
    for p in parts {
        for (v, d) in p.domains() {
            out.add_var(*v, d.clone()).unwrap();
        }
    }
    for p in parts {
        for (_, row) in p.rows() {
            out.add_row(row.clone()).unwrap();
        }
    }
    out
}
