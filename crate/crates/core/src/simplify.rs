//! Count-preserving simplifications and the fixpoint pipeline that combines
//! them.
//!
//! Every technique maps a system to one with exactly the same solution set
//! over the surviving variables (substituted variables contribute a factor of
//! one). A technique that proves the system unsatisfiable returns
//! [`System::inconsistent`].

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::lp::{LpError, LpOutcome, LpProblem, LpSolver};
use crate::system::{inf_term, sup_term, Row, RowId, System, SystemStatus, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Technique {
    RemoveVariables,
    StrengthenBounds,
    StrengthenCoefficients,
    RemoveIndividualRows,
    RemoveIndividualRowsLp,
    RemoveParallelRows,
    RemoveSubsetRows,
}

impl Technique {
    pub const ALL: [Technique; 7] = [
        Technique::RemoveVariables,
        Technique::StrengthenBounds,
        Technique::StrengthenCoefficients,
        Technique::RemoveIndividualRows,
        Technique::RemoveIndividualRowsLp,
        Technique::RemoveParallelRows,
        Technique::RemoveSubsetRows,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Technique::RemoveVariables => "remove-variables",
            Technique::StrengthenBounds => "strengthen-bounds",
            Technique::StrengthenCoefficients => "strengthen-coefficients",
            Technique::RemoveIndividualRows => "remove-individual-rows",
            Technique::RemoveIndividualRowsLp => "remove-individual-rows-lp",
            Technique::RemoveParallelRows => "remove-parallel-rows",
            Technique::RemoveSubsetRows => "remove-subset-rows",
        }
    }

    pub fn from_name(name: &str) -> Option<Technique> {
        Technique::ALL.into_iter().find(|t| t.name() == name)
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which techniques run, and how long the cheap loop may iterate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimplifyConfig {
    pub remove_variables: bool,
    pub strengthen_bounds: bool,
    pub strengthen_coefficients: bool,
    pub remove_individual_rows: bool,
    pub remove_individual_rows_lp: bool,
    pub remove_parallel_rows: bool,
    pub remove_subset_rows: bool,
    pub fixpoint_iteration_cap: u32,
}

impl Default for SimplifyConfig {
    fn default() -> Self {
        Self::all()
    }
}

impl SimplifyConfig {
    pub fn all() -> Self {
        Self::from_mask(0x7f)
    }

    pub fn none() -> Self {
        Self::from_mask(0)
    }

    /// Bit `k` of `mask` enables `Technique::ALL[k]`.
    pub fn from_mask(mask: u8) -> Self {
        let mut cfg = SimplifyConfig {
            remove_variables: false,
            strengthen_bounds: false,
            strengthen_coefficients: false,
            remove_individual_rows: false,
            remove_individual_rows_lp: false,
            remove_parallel_rows: false,
            remove_subset_rows: false,
            fixpoint_iteration_cap: 100,
        };
        for (k, t) in Technique::ALL.into_iter().enumerate() {
            cfg.set(t, mask & (1 << k) != 0);
        }
        cfg
    }

    pub fn enabled(&self, t: Technique) -> bool {
        match t {
            Technique::RemoveVariables => self.remove_variables,
            Technique::StrengthenBounds => self.strengthen_bounds,
            Technique::StrengthenCoefficients => self.strengthen_coefficients,
            Technique::RemoveIndividualRows => self.remove_individual_rows,
            Technique::RemoveIndividualRowsLp => self.remove_individual_rows_lp,
            Technique::RemoveParallelRows => self.remove_parallel_rows,
            Technique::RemoveSubsetRows => self.remove_subset_rows,
        }
    }

    pub fn set(&mut self, t: Technique, on: bool) {
        let flag = match t {
            Technique::RemoveVariables => &mut self.remove_variables,
            Technique::StrengthenBounds => &mut self.strengthen_bounds,
            Technique::StrengthenCoefficients => &mut self.strengthen_coefficients,
            Technique::RemoveIndividualRows => &mut self.remove_individual_rows,
            Technique::RemoveIndividualRowsLp => &mut self.remove_individual_rows_lp,
            Technique::RemoveParallelRows => &mut self.remove_parallel_rows,
            Technique::RemoveSubsetRows => &mut self.remove_subset_rows,
        };
        *flag = on;
    }
}

/// A single recorded change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transformation {
    VariableFixed {
        var: VarId,
        value: BigInt,
    },
    LowerBound {
        var: VarId,
        value: BigInt,
    },
    UpperBound {
        var: VarId,
        value: BigInt,
    },
    Coefficient {
        row: RowId,
        var: VarId,
        value: BigInt,
    },
    RowRemoved {
        row: RowId,
        by: Technique,
    },
    Inconsistent {
        by: Technique,
    },
}

/// Counters per technique, plus an optional trace of every transformation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimplifyLog {
    pub rows_removed: [u64; 7],
    pub bounds_tightened: u64,
    pub coefficients_strengthened: u64,
    pub variables_removed: u64,
    pub inconsistencies: [u64; 7],
    trace: Option<Vec<Transformation>>,
}

impl SimplifyLog {
    /// A log that also records the ordered list of transformations.
    pub fn with_trace() -> Self {
        SimplifyLog {
            trace: Some(Vec::new()),
            ..Self::default()
        }
    }

    pub fn transformations(&self) -> &[Transformation] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn rows_removed_by(&self, t: Technique) -> u64 {
        self.rows_removed[t.index()]
    }

    pub fn rows_removed_total(&self) -> u64 {
        self.rows_removed.iter().sum()
    }

    /// Adds the counters of `other` (the trace is not merged).
    pub fn absorb(&mut self, other: &SimplifyLog) {
        for k in 0..7 {
            self.rows_removed[k] += other.rows_removed[k];
            self.inconsistencies[k] += other.inconsistencies[k];
        }
        self.bounds_tightened += other.bounds_tightened;
        self.coefficients_strengthened += other.coefficients_strengthened;
        self.variables_removed += other.variables_removed;
    }

    fn record(&mut self, t: Transformation) {
        match &t {
            Transformation::VariableFixed { .. } => self.variables_removed += 1,
            Transformation::LowerBound { .. } | Transformation::UpperBound { .. } => {
                self.bounds_tightened += 1
            }
            Transformation::Coefficient { .. } => self.coefficients_strengthened += 1,
            Transformation::RowRemoved { by, .. } => self.rows_removed[by.index()] += 1,
            Transformation::Inconsistent { by } => self.inconsistencies[by.index()] += 1,
        }
        if let Some(trace) = &mut self.trace {
            trace.push(t);
        }
    }

    fn inconsistent(&mut self, s: &mut System, by: Technique) {
        self.record(Transformation::Inconsistent { by });
        s.mark_inconsistent();
    }
}

fn is_open(s: &System) -> bool {
    s.status() == SystemStatus::Open
}

/// Substitutes out every variable whose domain is a single value.
pub fn remove_variables(s: &System, log: &mut SimplifyLog) -> System {
    let mut out = s.clone();
    if s.is_inconsistent() {
        return out;
    }
    let fixed: Vec<(VarId, BigInt)> = s
        .domains()
        .iter()
        .filter(|(_, d)| d.is_fixed())
        .map(|(v, d)| (*v, d.hi.clone()))
        .collect();
    for (var, value) in fixed {
        out.assign_in_place(var, &value);
        log.record(Transformation::VariableFixed { var, value });
    }
    out
}

/// One sweep of bound propagation over every row and every variable in it.
pub fn strengthen_bounds(s: &System, log: &mut SimplifyLog) -> System {
    let mut out = s.clone();
    if !is_open(s) {
        return out;
    }
    let ids: Vec<RowId> = out.row_ids().collect();
    for id in ids {
        let row = out.row(id).expect("live row").clone();
        for (var, a) in row.terms() {
            let rest = out.row_inf(&row, Some(*var));
            let slack = row.rhs() - rest;
            let dom = out.domain_mut(*var);
            if a.is_positive() {
                let bound = slack.div_floor(a);
                if bound < dom.hi {
                    dom.hi = bound.clone();
                    log.record(Transformation::UpperBound {
                        var: *var,
                        value: bound,
                    });
                }
            } else {
                let bound = slack.div_ceil(a);
                if bound > dom.lo {
                    dom.lo = bound.clone();
                    log.record(Transformation::LowerBound {
                        var: *var,
                        value: bound,
                    });
                }
            }
            if out.domain(*var).expect("live").is_empty() {
                log.inconsistent(&mut out, Technique::StrengthenBounds);
                return out;
            }
        }
    }
    out
}

/// Tightens coefficients whose variable only matters at one end of its
/// domain, keeping the row's integer solution set unchanged.
pub fn strengthen_coefficients(s: &System, log: &mut SimplifyLog) -> System {
    let mut out = s.clone();
    if !is_open(s) {
        return out;
    }
    let ids: Vec<RowId> = out.row_ids().collect();
    for id in ids {
        let vars: Vec<VarId> = out.row(id).expect("live").support().collect();
        for var in vars {
            let row = out.row(id).expect("live");
            let a = row.coeff(var).expect("in support").clone();
            let dom = out.domain(var).expect("live").clone();
            let rest_sup = out.row_sup(row, Some(var));
            if a.is_positive() {
                let d: BigInt = row.rhs() - rest_sup - &a * (&dom.hi - 1);
                if d.is_positive() && a >= d {
                    let new = &a - &d;
                    let row = out.row_mut(id);
                    *row.rhs_mut() -= &d * &dom.hi;
                    row.set_coeff(var, new.clone());
                    log.record(Transformation::Coefficient {
                        row: id,
                        var,
                        value: new,
                    });
                }
            } else {
                let d: BigInt = row.rhs() - rest_sup - &a * (&dom.lo + 1);
                if d.is_positive() && -&a >= d {
                    let new = &a + &d;
                    let row = out.row_mut(id);
                    *row.rhs_mut() += &d * &dom.lo;
                    row.set_coeff(var, new.clone());
                    log.record(Transformation::Coefficient {
                        row: id,
                        var,
                        value: new,
                    });
                }
            }
        }
    }
    out
}

/// Drops rows satisfied by the whole box; detects rows no point satisfies.
pub fn remove_individual_rows(s: &System, log: &mut SimplifyLog) -> System {
    let mut out = s.clone();
    if !is_open(s) {
        return out;
    }
    let mut removed = Vec::new();
    for (id, row) in s.rows() {
        if &s.row_inf(row, None) > row.rhs() {
            log.inconsistent(&mut out, Technique::RemoveIndividualRows);
            return out;
        }
        if &s.row_sup(row, None) <= row.rhs() {
            removed.push(id);
        }
    }
    for id in removed {
        out.remove_row(id);
        log.record(Transformation::RowRemoved {
            row: id,
            by: Technique::RemoveIndividualRows,
        });
    }
    out
}

/// Like [`remove_individual_rows`], but bounds each row's left-hand side by
/// the LP relaxation of all the other rows instead of the box alone.
pub fn remove_individual_rows_lp<L: LpSolver + ?Sized>(
    s: &System,
    lp: &L,
    log: &mut SimplifyLog,
) -> Result<System, LpError> {
    let mut out = s.clone();
    if !is_open(s) {
        return Ok(out);
    }
    let ids: Vec<RowId> = s.row_ids().collect();
    for id in ids {
        let row = out.row(id).expect("live row").clone();
        let problem = LpProblem::from_system(&out, &row, Some(id));
        let rhs = BigRational::from_integer(row.rhs().clone());
        let upper = match lp.maximize(&problem)? {
            LpOutcome::Infeasible => {
                log.inconsistent(&mut out, Technique::RemoveIndividualRowsLp);
                return Ok(out);
            }
            LpOutcome::Optimal { value, .. } => value,
        };
        if upper <= rhs {
            out.remove_row(id);
            log.record(Transformation::RowRemoved {
                row: id,
                by: Technique::RemoveIndividualRowsLp,
            });
            continue;
        }
        if let LpOutcome::Optimal { value: lower, .. } = lp.minimize(&problem)? {
            if lower > rhs {
                log.inconsistent(&mut out, Technique::RemoveIndividualRowsLp);
                return Ok(out);
            }
        }
    }
    Ok(out)
}

/// Coefficients divided by the gcd of their absolute values, sign kept.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalizedRowKey(Vec<(VarId, BigInt)>);

impl NormalizedRowKey {
    /// Returns the key and the gcd used. `None` for an empty row.
    pub fn of(row: &Row) -> Option<(NormalizedRowKey, BigInt)> {
        let g = row
            .terms()
            .iter()
            .fold(BigInt::zero(), |g, (_, c)| g.gcd(c));
        if g.is_zero() {
            return None;
        }
        let terms = row.terms().iter().map(|(v, c)| (*v, c / &g)).collect();
        Some((NormalizedRowKey(terms), g))
    }

    pub fn negated(&self) -> NormalizedRowKey {
        NormalizedRowKey(self.0.iter().map(|(v, c)| (*v, -c)).collect())
    }

    pub fn terms(&self) -> &[(VarId, BigInt)] {
        &self.0
    }
}

/// Removes dominated positively-parallel rows and detects conflicting
/// negatively-parallel pairs, in one pass with a map keyed by normalized
/// coefficients.
pub fn remove_parallel_rows(s: &System, log: &mut SimplifyLog) -> System {
    let mut out = s.clone();
    if !is_open(s) {
        return out;
    }
    // key -> (surviving row, its rhs, its gcd)
    let mut seen: BTreeMap<NormalizedRowKey, (RowId, BigInt, BigInt)> = BTreeMap::new();
    let mut removed = Vec::new();
    for (id, row) in s.rows() {
        let Some((key, g)) = NormalizedRowKey::of(row) else {
            continue;
        };
        let b = row.rhs().clone();
        let inserted = match seen.get(&key) {
            // b/g < b_k/g_k, compared without division
            Some((k, bk, gk)) if &b * gk < bk * &g => {
                removed.push(*k);
                true
            }
            Some(_) => {
                removed.push(id);
                false
            }
            None => true,
        };
        if !inserted {
            continue;
        }
        if let Some((_, bk, gk)) = seen.get(&key.negated()) {
            // b/g < -b_k/g_k: the band between the two rows is empty
            if &b * gk < -(bk * &g) {
                log.inconsistent(&mut out, Technique::RemoveParallelRows);
                return out;
            }
        }
        seen.insert(key, (id, b, g));
    }
    for id in removed {
        out.remove_row(id);
        log.record(Transformation::RowRemoved {
            row: id,
            by: Technique::RemoveParallelRows,
        });
    }
    out
}

/// For rows `i`, `k` where `i`'s terms are a strict sub-vector of `k`'s,
/// removes whichever of the two the other implies.
pub fn remove_subset_rows(s: &System, log: &mut SimplifyLog) -> System {
    let mut out = s.clone();
    if !is_open(s) {
        return out;
    }
    let rows: Vec<(RowId, Row)> = s.rows().map(|(id, r)| (id, r.clone())).collect();
    let mut alive = alloc::vec![true; rows.len()];
    for (kk, (_, k_row)) in rows.iter().enumerate() {
        for (ii, (_, i_row)) in rows.iter().enumerate() {
            if ii == kk || !alive[ii] || !alive[kk] {
                continue;
            }
            if i_row.len() >= k_row.len()
                || !i_row
                    .terms()
                    .iter()
                    .all(|(v, c)| k_row.coeff(*v) == Some(c))
            {
                continue;
            }
            let (mut inf, mut sup) = (BigInt::zero(), BigInt::zero());
            for (v, c) in k_row.terms() {
                if !i_row.contains(*v) {
                    let dom = s.domain(*v).expect("live");
                    inf += inf_term(c, dom);
                    sup += sup_term(c, dom);
                }
            }
            let gap = k_row.rhs() - i_row.rhs();
            let victim = if inf >= gap {
                ii
            } else if sup <= gap {
                kk
            } else {
                continue;
            };
            alive[victim] = false;
            let row = rows[victim].0;
            out.remove_row(row);
            log.record(Transformation::RowRemoved {
                row,
                by: Technique::RemoveSubsetRows,
            });
        }
    }
    out
}

/// Runs the cheap techniques to a fixpoint, then the expensive ones once.
///
/// Disabled techniques are skipped. The result has the same model count as
/// the input.
pub fn simplify<L: LpSolver + ?Sized>(
    s: &System,
    cfg: &SimplifyConfig,
    lp: &L,
    log: &mut SimplifyLog,
) -> Result<System, LpError> {
    let mut cur = s.clone();
    if cur.is_inconsistent() {
        return Ok(cur);
    }
    for _ in 0..cfg.fixpoint_iteration_cap.max(1) {
        let prev = cur.clone();
        if cfg.remove_variables {
            cur = remove_variables(&cur, log);
        }
        if cfg.strengthen_bounds {
            cur = strengthen_bounds(&cur, log);
            if cur.is_inconsistent() {
                return Ok(cur);
            }
        }
        if cfg.remove_individual_rows {
            cur = remove_individual_rows(&cur, log);
            if cur.status() != SystemStatus::Open {
                return Ok(cur);
            }
        }
        if cur == prev {
            break;
        }
    }
    if cfg.strengthen_coefficients {
        cur = strengthen_coefficients(&cur, log);
    }
    if cfg.remove_individual_rows_lp {
        cur = remove_individual_rows_lp(&cur, lp, log)?;
        if cur.status() != SystemStatus::Open {
            return Ok(cur);
        }
    }
    if cfg.remove_parallel_rows {
        cur = remove_parallel_rows(&cur, log);
        if cur.is_inconsistent() {
            return Ok(cur);
        }
    }
    if cfg.remove_subset_rows {
        cur = remove_subset_rows(&cur, log);
    }
    Ok(cur)
}
