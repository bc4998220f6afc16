//! Brute-force enumeration of every point in the box.
//!
//! Deliberately naive: no propagation, no pruning. It only reads the rows and
//! domains of a [`System`] and evaluates each row directly, so it can serve as
//! an independent reference for the counter.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::system::{System, VarId};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("box has more than {budget} points")]
pub struct BudgetExceeded {
    pub budget: u64,
}

/// Number of box points satisfying every row.
pub fn oracle_count(s: &System, budget: u64) -> Result<BigInt, BudgetExceeded> {
    let mut n = 0u64;
    enumerate(s, budget, |_| n += 1)?;
    Ok(BigInt::from(n))
}

/// Every satisfying point, as values ordered by variable id, in odometer order
/// (last variable fastest).
pub fn oracle_solutions(s: &System, budget: u64) -> Result<Vec<Vec<BigInt>>, BudgetExceeded> {
    let mut out = Vec::new();
    enumerate(s, budget, |x| out.push(x.to_vec()))?;
    Ok(out)
}

/// Rows as plain `i128` data when every number is small enough that no
/// evaluation can overflow.
/// Row as (variable index, coefficient) pairs and a right-hand side.
type SmallRow = (Vec<(usize, i128)>, i128);

fn small_rows(s: &System, vars: &[VarId]) -> Option<Vec<SmallRow>> {
    const LIMIT: i128 = 1 << 40;
    let fits = |n: &BigInt| n.to_i128().filter(|x| x.abs() < LIMIT);
    for d in s.domains().values() {
        fits(&d.lo)?;
        fits(&d.hi)?;
    }
    s.rows()
        .map(|(_, row)| {
            let terms = row
                .terms()
                .iter()
                .map(|(v, c)| Some((vars.binary_search(v).ok()?, fits(c)?)))
                .collect::<Option<Vec<_>>>()?;
            Some((terms, fits(row.rhs())?))
        })
        .collect()
}

fn enumerate(
    s: &System,
    budget: u64,
    mut visit: impl FnMut(&[BigInt]),
) -> Result<(), BudgetExceeded> {
    let vars: Vec<VarId> = s.vars().collect();
    let doms: Vec<(BigInt, BigInt)> = s
        .domains()
        .values()
        .map(|d| (d.lo.clone(), d.hi.clone()))
        .collect();
    let mut points = BigInt::one();
    for (lo, hi) in &doms {
        if lo > hi {
            return Ok(());
        }
        points *= hi - lo + 1;
    }
    if points > BigInt::from(budget) {
        return Err(BudgetExceeded { budget });
    }

    let mut x: Vec<BigInt> = doms.iter().map(|(lo, _)| lo.clone()).collect();
    let small = small_rows(s, &vars);
    let mut xs: Vec<i128> = x.iter().map(|v| v.to_i128().unwrap_or(0)).collect();
    loop {
        let ok = match &small {
            Some(rows) => rows
                .iter()
                .all(|(terms, rhs)| terms.iter().map(|(k, c)| c * xs[*k]).sum::<i128>() <= *rhs),
            None => s.rows().all(|(_, row)| {
                let lhs: BigInt = row
                    .terms()
                    .iter()
                    .map(|(v, c)| c * &x[vars.binary_search(v).expect("declared")])
                    .sum();
                &lhs <= row.rhs()
            }),
        };
        if ok {
            visit(&x);
        }
        // odometer step, last position fastest
        let mut k = x.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            if x[k] < doms[k].1 {
                x[k] += 1;
                xs[k] += 1;
                break;
            }
            x[k] = doms[k].0.clone();
            xs[k] = x[k].to_i128().unwrap_or(0);
        }
    }
}
