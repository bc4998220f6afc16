//! Algebraic laws of the model count, property-tested.

mod common;

use common::BUDGET;
use ilcount_core::simplify::{remove_individual_rows, strengthen_bounds};
use ilcount_core::{
    count, oracle_count, BigInt, CounterConfig, Domain, Row, SimplifyLog, System, VarId,
};
use proptest::prelude::*;

fn system_strategy() -> impl Strategy<Value = System> {
    (1usize..=4).prop_flat_map(|n| {
        let domains = prop::collection::vec((-4i64..=3, 0i64..=4), n);
        let row = (prop::collection::vec(-5i64..=5, n), -10i64..=10);
        let rows = prop::collection::vec(row, 0..=4);
        (domains, rows).prop_map(move |(domains, rows)| {
            let mut s = System::new();
            for (j, (lo, width)) in domains.into_iter().enumerate() {
                s.add_var(VarId(j as u32 + 1), Domain::new(lo, lo + width))
                    .unwrap();
            }
            for (coeffs, rhs) in rows {
                let terms = coeffs
                    .into_iter()
                    .enumerate()
                    .map(|(j, c)| (VarId(j as u32 + 1), c));
                s.add_row(Row::new(terms, rhs)).unwrap();
            }
            s
        })
    })
}

fn counted(s: &System) -> BigInt {
    count(s, &CounterConfig::default()).unwrap().count
}

proptest! {
    #[test]
    fn counter_equals_oracle(s in system_strategy()) {
        prop_assert_eq!(counted(&s), oracle_count(&s, BUDGET).unwrap());
    }

    #[test]
    fn branching_sums(s in system_strategy(), pick in 0usize..4) {
        let vars: Vec<VarId> = s.vars().collect();
        let x = vars[pick % vars.len()];
        let d = s.domain(x).unwrap().clone();
        let mut total = BigInt::from(0);
        let mut v = d.lo.clone();
        while v <= d.hi {
            total += oracle_count(&s.assign(x, &v), BUDGET).unwrap();
            v += 1;
        }
        prop_assert_eq!(total, counted(&s));
    }

    #[test]
    fn scaling_a_row_keeps_count(s in system_strategy(), k in 1i64..=4) {
        let mut t = System::new();
        for (v, d) in s.domains() {
            t.add_var(*v, d.clone()).unwrap();
        }
        for (_, row) in s.rows() {
            let terms = row.terms().iter().map(|(v, a)| (*v, a * k));
            t.add_row(Row::new(terms, row.rhs() * k)).unwrap();
        }
        prop_assert_eq!(counted(&t), counted(&s));
    }

    #[test]
    fn adding_a_valid_row_keeps_count(s in system_strategy(), coeffs in prop::collection::vec(-5i64..=5, 4)) {
        let row = Row::new(s.vars().zip(coeffs), 0);
        let mut probe = s.clone();
        let id = probe.add_row(row.clone()).unwrap();
        let sup = probe.sup_activity(id, None);
        let mut t = s.clone();
        t.add_row(Row::new(row.terms().to_vec(), sup)).unwrap();
        prop_assert_eq!(counted(&t), counted(&s));
    }

    #[test]
    fn activities_bracket_every_point(s in system_strategy()) {
        let ids: Vec<_> = s.row_ids().collect();
        for id in ids {
            let sup = s.sup_activity(id, None);
            let inf = s.inf_activity(id, None);
            prop_assert!(inf <= sup);
            for v in s.row(id).unwrap().support() {
                let excl_sup = s.sup_activity(id, Some(v));
                let excl_inf = s.inf_activity(id, Some(v));
                let a = s.row(id).unwrap().coeff(v).unwrap().clone();
                let d = s.domain(v).unwrap();
                let (hi, lo) = if a > BigInt::from(0) { (&d.hi, &d.lo) } else { (&d.lo, &d.hi) };
                prop_assert_eq!(excl_sup + &a * hi, sup.clone());
                prop_assert_eq!(excl_inf + &a * lo, inf.clone());
            }
        }
    }

    #[test]
    fn bound_strengthening_never_widens(s in system_strategy()) {
        let t = strengthen_bounds(&s, &mut SimplifyLog::default());
        if !t.is_inconsistent() {
            for (v, d) in t.domains() {
                let old = s.domain(*v).unwrap();
                prop_assert!(old.lo <= d.lo && d.hi <= old.hi);
            }
        }
        let u = remove_individual_rows(&s, &mut SimplifyLog::default());
        prop_assert!(u.num_rows() <= s.num_rows() || u.is_inconsistent());
    }
}
