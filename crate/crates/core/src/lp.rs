//! Exact linear programming over the rationals.
//!
//! [`BoundedSimplex`] is a two-phase primal simplex on a dense tableau. Box
//! bounds are handled natively: a nonbasic column rests at its lower or upper
//! bound, and the ratio test considers both bounds of every basic column.
//! Bland's smallest-index rule picks both the entering and the leaving column,
//! which rules out cycling.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::system::{Row, RowId, System, VarId};

type Q = BigRational;

/// One constraint `sum(a_j * x_j) <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpRow {
    pub terms: Vec<(VarId, Q)>,
    pub rhs: Q,
}

/// Maximize or minimize `objective` over `rows` and the box `bounds`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub objective: Vec<(VarId, Q)>,
    pub rows: Vec<LpRow>,
    pub bounds: BTreeMap<VarId, (Q, Q)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Q,
        witness: BTreeMap<VarId, Q>,
    },
    Infeasible,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Q> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            LpOutcome::Infeasible => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("simplex exceeded {0} iterations")]
    IterationLimit(usize),
    #[error("unbounded direction in a boxed problem")]
    Unbounded,
    #[error("variable {0} has no box bounds")]
    UnknownVariable(VarId),
}

fn q(n: &BigInt) -> Q {
    Q::from_integer(n.clone())
}

fn to_q_terms(row: &Row) -> Vec<(VarId, Q)> {
    row.terms().iter().map(|(v, c)| (*v, q(c))).collect()
}

impl LpProblem {
    /// The continuous relaxation of `s` without row `skip`, with the
    /// left-hand side of `objective` as the objective.
    pub fn from_system(s: &System, objective: &Row, skip: Option<RowId>) -> Self {
        LpProblem {
            objective: to_q_terms(objective),
            rows: s
                .rows()
                .filter(|(id, _)| Some(*id) != skip)
                .map(|(_, row)| LpRow {
                    terms: to_q_terms(row),
                    rhs: q(row.rhs()),
                })
                .collect(),
            bounds: s
                .domains()
                .iter()
                .map(|(v, d)| (*v, (q(&d.lo), q(&d.hi))))
                .collect(),
        }
    }

    pub fn negated(&self) -> Self {
        LpProblem {
            objective: self
                .objective
                .iter()
                .map(|(v, c)| (*v, -c.clone()))
                .collect(),
            ..self.clone()
        }
    }

    /// Objective value at `point`; missing variables count as zero.
    pub fn objective_at(&self, point: &BTreeMap<VarId, Q>) -> Q {
        self.objective
            .iter()
            .map(|(v, c)| point.get(v).map(|x| c * x).unwrap_or_else(Q::zero))
            .sum()
    }
}

pub trait LpSolver {
    fn maximize(&self, problem: &LpProblem) -> Result<LpOutcome, LpError>;

    fn minimize(&self, problem: &LpProblem) -> Result<LpOutcome, LpError> {
        Ok(match self.maximize(&problem.negated())? {
            LpOutcome::Optimal { value, witness } => LpOutcome::Optimal {
                value: -value,
                witness,
            },
            LpOutcome::Infeasible => LpOutcome::Infeasible,
        })
    }
}

impl<L: LpSolver + ?Sized> LpSolver for &L {
    fn maximize(&self, problem: &LpProblem) -> Result<LpOutcome, LpError> {
        (**self).maximize(problem)
    }
}

/// Bounded-variable primal simplex with Bland's rule, in exact arithmetic.
#[derive(Debug, Clone, Copy)]
pub struct BoundedSimplex {
    pub max_iterations: usize,
}

impl Default for BoundedSimplex {
    fn default() -> Self {
        BoundedSimplex {
            max_iterations: 100_000,
        }
    }
}

impl LpSolver for BoundedSimplex {
    fn maximize(&self, problem: &LpProblem) -> Result<LpOutcome, LpError> {
        let vars: Vec<VarId> = problem.bounds.keys().copied().collect();
        let col_of = |v: &VarId| {
            vars.binary_search(v)
                .map_err(|_| LpError::UnknownVariable(*v))
        };
        if problem.bounds.values().any(|(lo, hi)| lo > hi) {
            return Ok(LpOutcome::Infeasible);
        }

        let n = vars.len();
        let m = problem.rows.len();
        let mut dense = Vec::with_capacity(m);
        for row in &problem.rows {
            let mut coeffs = vec![Q::zero(); n];
            for (v, c) in &row.terms {
                coeffs[col_of(v)?] += c;
            }
            dense.push(coeffs);
        }
        let mut objective = vec![Q::zero(); n];
        for (v, c) in &problem.objective {
            objective[col_of(v)?] += c;
        }

        let mut tab = Tableau::new(problem, &dense);
        let phase_one: Vec<Q> = (0..tab.ncols())
            .map(|j| {
                if j >= n + m {
                    -Q::from_integer(1.into())
                } else {
                    Q::zero()
                }
            })
            .collect();
        let mut budget = self.max_iterations;
        tab.optimize(&phase_one, &mut budget, self.max_iterations)?;
        if tab.values[n + m..].iter().any(|v| v.is_positive()) {
            return Ok(LpOutcome::Infeasible);
        }
        for j in n + m..tab.ncols() {
            tab.upper[j] = Some(Q::zero());
        }

        let mut phase_two = vec![Q::zero(); tab.ncols()];
        phase_two[..n].clone_from_slice(&objective);
        tab.optimize(&phase_two, &mut budget, self.max_iterations)?;

        let witness: BTreeMap<VarId, Q> = vars
            .iter()
            .zip(&tab.values)
            .map(|(v, x)| (*v, x.clone()))
            .collect();
        let value = objective.iter().zip(&tab.values).map(|(c, x)| c * x).sum();
        Ok(LpOutcome::Optimal { value, witness })
    }
}

/// Dense tableau: row `r` reads `sum_j coeffs[r][j] * x_j = const` with the
/// basic column `basis[r]` carrying coefficient one and absent from the
/// other rows. Column values are stored explicitly.
struct Tableau {
    coeffs: Vec<Vec<Q>>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    lower: Vec<Q>,
    upper: Vec<Option<Q>>,
    values: Vec<Q>,
}

impl Tableau {
    /// Columns: structural, then one slack per row, then one artificial per
    /// row whose slack would start negative. Structural columns start at
    /// their lower bound.
    fn new(problem: &LpProblem, dense: &[Vec<Q>]) -> Self {
        let n = problem.bounds.len();
        let m = dense.len();
        let start: Vec<Q> = problem.bounds.values().map(|(lo, _)| lo.clone()).collect();
        let residuals: Vec<Q> = problem
            .rows
            .iter()
            .zip(dense)
            .map(|(row, coeffs)| {
                let act: Q = coeffs.iter().zip(&start).map(|(a, x)| a * x).sum();
                &row.rhs - act
            })
            .collect();
        let n_art = residuals.iter().filter(|r| r.is_negative()).count();
        let ncols = n + m + n_art;

        let mut lower = vec![Q::zero(); ncols];
        let mut upper = vec![None; ncols];
        for (j, (lo, hi)) in problem.bounds.values().enumerate() {
            lower[j] = lo.clone();
            upper[j] = Some(hi.clone());
        }
        let mut values = vec![Q::zero(); ncols];
        values[..n].clone_from_slice(&start);

        let mut coeffs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut next_art = n + m;
        for (i, (row, resid)) in dense.iter().zip(&residuals).enumerate() {
            let mut line = vec![Q::zero(); ncols];
            line[..n].clone_from_slice(row);
            line[n + i] = Q::from_integer(1.into());
            if resid.is_negative() {
                for c in line.iter_mut() {
                    *c = -c.clone();
                }
                line[next_art] = Q::from_integer(1.into());
                values[next_art] = -resid.clone();
                basis.push(next_art);
                next_art += 1;
            } else {
                values[n + i] = resid.clone();
                basis.push(n + i);
            }
            coeffs.push(line);
        }
        let mut is_basic = vec![false; ncols];
        for &b in &basis {
            is_basic[b] = true;
        }
        Tableau {
            coeffs,
            basis,
            is_basic,
            lower,
            upper,
            values,
        }
    }

    fn ncols(&self) -> usize {
        self.values.len()
    }

    /// Reduced cost of nonbasic column `j` under `cost`.
    fn reduced_cost(&self, cost: &[Q], j: usize) -> Q {
        let mut d = cost[j].clone();
        for (r, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.coeffs[r][j].is_zero() {
                d -= &cost[b] * &self.coeffs[r][j];
            }
        }
        d
    }

    /// Smallest-index improving column and its direction (+1 up, -1 down).
    fn entering(&self, cost: &[Q]) -> Option<(usize, bool)> {
        (0..self.ncols()).find_map(|j| {
            if self.is_basic[j] || self.upper[j].as_ref() == Some(&self.lower[j]) {
                return None;
            }
            let d = self.reduced_cost(cost, j);
            let at_lower = self.values[j] == self.lower[j];
            if at_lower && d.is_positive() {
                Some((j, true))
            } else if !at_lower && d.is_negative() {
                Some((j, false))
            } else {
                None
            }
        })
    }

    fn optimize(&mut self, cost: &[Q], budget: &mut usize, cap: usize) -> Result<(), LpError> {
        while let Some((enter, up)) = self.entering(cost) {
            if *budget == 0 {
                return Err(LpError::IterationLimit(cap));
            }
            *budget -= 1;
            self.step(enter, up)?;
        }
        Ok(())
    }

    fn step(&mut self, enter: usize, up: bool) -> Result<(), LpError> {
        let sign = |x: &Q| if up { x.clone() } else { -x.clone() };
        // Each basic value moves by -coeffs[r][enter] * dir * t.
        let flip = self.upper[enter].as_ref().map(|hi| hi - &self.lower[enter]);
        let mut best: Option<(Q, usize)> = None;
        for (r, &b) in self.basis.iter().enumerate() {
            let a = &self.coeffs[r][enter];
            if a.is_zero() {
                continue;
            }
            let rate = -sign(a);
            let limit = if rate.is_negative() {
                (&self.values[b] - &self.lower[b]) / -&rate
            } else {
                match &self.upper[b] {
                    Some(hi) => (hi - &self.values[b]) / &rate,
                    None => continue,
                }
            };
            let better = match &best {
                None => true,
                Some((t, r0)) => limit < *t || (limit == *t && b < self.basis[*r0]),
            };
            if better {
                best = Some((limit, r));
            }
        }

        let (t, leave_row) = match (best, flip) {
            (None, None) => return Err(LpError::Unbounded),
            (None, Some(range)) => (range, None),
            (Some((t, _)), Some(range)) if range <= t => (range, None),
            (Some((t, r)), _) => (t, Some(r)),
        };

        let delta = sign(&t);
        self.values[enter] += &delta;
        for (r, &b) in self.basis.iter().enumerate() {
            let a = &self.coeffs[r][enter];
            if !a.is_zero() {
                let shift = a * &delta;
                self.values[b] -= shift;
            }
        }

        if let Some(r) = leave_row {
            self.pivot(r, enter);
        }
        Ok(())
    }

    fn pivot(&mut self, r: usize, enter: usize) {
        let leave = self.basis[r];
        let p = self.coeffs[r][enter].clone();
        for c in self.coeffs[r].iter_mut() {
            if !c.is_zero() {
                *c = &*c / &p;
            }
        }
        let pivot_row = self.coeffs[r].clone();
        for (k, line) in self.coeffs.iter_mut().enumerate() {
            if k == r || line[enter].is_zero() {
                continue;
            }
            let factor = line[enter].clone();
            for (c, pc) in line.iter_mut().zip(&pivot_row) {
                if !pc.is_zero() {
                    *c -= &factor * pc;
                }
            }
        }
        self.is_basic[leave] = false;
        self.is_basic[enter] = true;
        self.basis[r] = enter;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example_one, from_dense};

    fn qi(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn problem(obj: &[i64], rows: &[(&[i64], i64)], bounds: &[(i64, i64)]) -> LpProblem {
        let s = from_dense(rows, bounds);
        let objective = Row::new(
            obj.iter()
                .enumerate()
                .map(|(k, c)| (VarId(k as u32 + 1), *c)),
            0,
        );
        LpProblem::from_system(&s, &objective, None)
    }

    fn check_witness(p: &LpProblem, out: &LpOutcome) {
        if let LpOutcome::Optimal { value, witness } = out {
            assert_eq!(&p.objective_at(witness), value);
            for row in &p.rows {
                let act: Q = row.terms.iter().map(|(v, c)| c * &witness[v]).sum();
                assert!(act <= row.rhs, "row violated at witness");
            }
            for (v, (lo, hi)) in &p.bounds {
                assert!(lo <= &witness[v] && &witness[v] <= hi);
            }
        }
    }

    #[test]
    fn facet_optimum() {
        let p = problem(&[1, 1], &[(&[1, 1], 2)], &[(0, 3), (0, 3)]);
        let out = BoundedSimplex::default().maximize(&p).unwrap();
        assert_eq!(out.value(), Some(&qi(2)));
        check_witness(&p, &out);
    }

    #[test]
    fn box_optimum() {
        let p = problem(&[1], &[], &[(-8, 7)]);
        assert_eq!(
            BoundedSimplex::default().maximize(&p).unwrap().value(),
            Some(&qi(7))
        );
        assert_eq!(
            BoundedSimplex::default().minimize(&p).unwrap().value(),
            Some(&qi(-8))
        );
    }

    #[test]
    fn infeasible_region() {
        let p = problem(&[1], &[(&[1], -1)], &[(0, 3)]);
        assert_eq!(
            BoundedSimplex::default().maximize(&p).unwrap(),
            LpOutcome::Infeasible
        );
    }

    #[test]
    fn lower_facet() {
        let p = problem(&[1, 1], &[(&[-1, -1], -1)], &[(0, 3), (0, 3)]);
        let out = BoundedSimplex::default().minimize(&p).unwrap();
        assert_eq!(out.value(), Some(&qi(1)));
        check_witness(&p, &out);
    }

    #[test]
    fn zero_objective() {
        let p = problem(&[0, 0], &[(&[1, 1], 2)], &[(0, 3), (0, 3)]);
        let out = BoundedSimplex::default().minimize(&p).unwrap();
        assert_eq!(out.value(), Some(&qi(0)));
        check_witness(&p, &out);
    }

    #[test]
    fn fractional_vertex() {
        // max x1 + x2 s.t. 2x1 + x2 <= 4, x1 + 2x2 <= 4 -> (4/3, 4/3)
        let p = problem(&[1, 1], &[(&[2, 1], 4), (&[1, 2], 4)], &[(0, 5), (0, 5)]);
        let out = BoundedSimplex::default().maximize(&p).unwrap();
        assert_eq!(out.value(), Some(&Q::new(8.into(), 3.into())));
        check_witness(&p, &out);
    }

    #[test]
    fn example_one_relaxation_bounds() {
        let s = example_one();
        let row3 = s.row(RowId(3)).unwrap().clone();
        let p = LpProblem::from_system(&s, &row3, Some(RowId(3)));
        let hi = BoundedSimplex::default().maximize(&p).unwrap();
        let lo = BoundedSimplex::default().minimize(&p).unwrap();
        check_witness(&p, &hi);
        check_witness(&p, &lo);
        assert!(hi.value().unwrap() <= &qi(12));
        assert!(lo.value().unwrap() >= &qi(-3));
    }

    #[test]
    fn negative_start_needs_phase_one() {
        // x1 + x2 >= 3 over [0,2]^2: origin infeasible
        let p = problem(&[1, -1], &[(&[-1, -1], -3)], &[(0, 2), (0, 2)]);
        let out = BoundedSimplex::default().maximize(&p).unwrap();
        assert_eq!(out.value(), Some(&qi(1)));
        check_witness(&p, &out);
    }
}
