//! Systems of integer linear inequalities over bounded integer variables.
//!
//! A [`System`] holds a set of `<=` rows, each stored sparsely, together with
//! a finite integer box for every live variable. All coefficients, right-hand
//! sides and bounds are arbitrary-precision integers.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::CoreError;

/// Identifier of a variable (column). Ids are the ones used in instance files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

/// Identifier of a row. Ids are stable under simplification: rows are only
/// ever removed, never renumbered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl fmt::Display for RowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

/// Closed integer interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Domain {
    pub lo: BigInt,
    pub hi: BigInt,
}

impl Domain {
    pub fn new(lo: impl Into<BigInt>, hi: impl Into<BigInt>) -> Self {
        Domain {
            lo: lo.into(),
            hi: hi.into(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn is_fixed(&self) -> bool {
        self.lo == self.hi
    }

    /// Number of integers in the interval (zero when empty).
    pub fn size(&self) -> BigInt {
        if self.is_empty() {
            BigInt::zero()
        } else {
            &self.hi - &self.lo + 1
        }
    }
}

/// One inequality `sum(a_j * x_j) <= rhs`.
///
/// Terms are kept sorted by ascending variable id and never contain a zero
/// coefficient, so the stored index set is exactly the row's support.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row {
    terms: Vec<(VarId, BigInt)>,
    rhs: BigInt,
}

impl Row {
    /// Builds a row, summing repeated variables and dropping zero coefficients.
    pub fn new<I, C>(terms: I, rhs: impl Into<BigInt>) -> Self
    where
        I: IntoIterator<Item = (VarId, C)>,
        C: Into<BigInt>,
    {
        let mut merged: BTreeMap<VarId, BigInt> = BTreeMap::new();
        for (var, coeff) in terms {
            *merged.entry(var).or_default() += coeff.into();
        }
        Row {
            terms: merged.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            rhs: rhs.into(),
        }
    }

    pub fn terms(&self) -> &[(VarId, BigInt)] {
        &self.terms
    }

    pub fn rhs(&self) -> &BigInt {
        &self.rhs
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, var: VarId) -> Option<&BigInt> {
        self.terms
            .binary_search_by_key(&var, |(v, _)| *v)
            .ok()
            .map(|idx| &self.terms[idx].1)
    }

    pub fn contains(&self, var: VarId) -> bool {
        self.coeff(var).is_some()
    }

    pub fn support(&self) -> impl Iterator<Item = VarId> + '_ {
        self.terms.iter().map(|(v, _)| *v)
    }

    pub(crate) fn rhs_mut(&mut self) -> &mut BigInt {
        &mut self.rhs
    }

    /// Overwrites the coefficient of `var`, removing the term when it becomes
    /// zero. `var` must already be in the support.
    pub(crate) fn set_coeff(&mut self, var: VarId, coeff: BigInt) {
        let idx = self
            .terms
            .binary_search_by_key(&var, |(v, _)| *v)
            .expect("variable not in row support");
        if coeff.is_zero() {
            self.terms.remove(idx);
        } else {
            self.terms[idx].1 = coeff;
        }
    }

    /// Removes `var` from the row and returns its coefficient.
    pub(crate) fn take(&mut self, var: VarId) -> Option<BigInt> {
        let idx = self.terms.binary_search_by_key(&var, |(v, _)| *v).ok()?;
        Some(self.terms.remove(idx).1)
    }
}

/// Contribution of `coeff * x` to the maximal activity over `dom`.
pub(crate) fn sup_term(coeff: &BigInt, dom: &Domain) -> BigInt {
    if coeff.is_positive() {
        coeff * &dom.hi
    } else {
        coeff * &dom.lo
    }
}

/// Contribution of `coeff * x` to the minimal activity over `dom`.
pub(crate) fn inf_term(coeff: &BigInt, dom: &Domain) -> BigInt {
    if coeff.is_negative() {
        coeff * &dom.hi
    } else {
        coeff * &dom.lo
    }
}

/// Classification of a system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemStatus {
    /// Rows remain to be satisfied.
    Open,
    /// No rows remain; every point of the box is a solution.
    Valid,
    /// Known to have no solution.
    Inconsistent,
}

/// A system of integer linear `<=` constraints over a box.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct System {
    rows: Vec<(RowId, Row)>,
    domains: BTreeMap<VarId, Domain>,
    inconsistent: bool,
    next_row: u32,
}

impl Default for System {
    fn default() -> Self {
        Self::new()
    }
}

impl System {
    pub fn new() -> Self {
        System {
            rows: Vec::new(),
            domains: BTreeMap::new(),
            inconsistent: false,
            next_row: 1,
        }
    }

    /// The canonical inconsistent system `0 * x1 <= -1` with `x1 in [0, 0]`.
    pub fn inconsistent() -> Self {
        let mut domains = BTreeMap::new();
        domains.insert(VarId(1), Domain::new(0, 0));
        System {
            rows: alloc::vec![(RowId(1), Row::new(core::iter::empty::<(VarId, i64)>(), -1))],
            domains,
            inconsistent: true,
            next_row: 2,
        }
    }

    /// Declares a variable. An empty domain marks the system inconsistent.
    pub fn add_var(&mut self, var: VarId, domain: Domain) -> Result<(), CoreError> {
        if self.domains.contains_key(&var) {
            return Err(CoreError::DuplicateVariable(var));
        }
        if domain.is_empty() {
            self.inconsistent = true;
        }
        self.domains.insert(var, domain);
        Ok(())
    }

    /// Appends a row; every variable it mentions must already be declared.
    pub fn add_row(&mut self, row: Row) -> Result<RowId, CoreError> {
        if let Some(var) = row.support().find(|v| !self.domains.contains_key(v)) {
            return Err(CoreError::UnknownVariable(var));
        }
        let id = RowId(self.next_row);
        self.next_row += 1;
        self.rows.push((id, row));
        Ok(id)
    }

    pub fn status(&self) -> SystemStatus {
        if self.inconsistent {
            SystemStatus::Inconsistent
        } else if self.rows.is_empty() {
            SystemStatus::Valid
        } else {
            SystemStatus::Open
        }
    }

    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = (RowId, &Row)> + '_ {
        self.rows.iter().map(|(id, row)| (*id, row))
    }

    pub fn row(&self, id: RowId) -> Option<&Row> {
        self.row_index(id).map(|idx| &self.rows[idx].1)
    }

    pub fn row_ids(&self) -> impl Iterator<Item = RowId> + '_ {
        self.rows.iter().map(|(id, _)| *id)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn vars(&self) -> impl ExactSizeIterator<Item = VarId> + '_ {
        self.domains.keys().copied()
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &BTreeMap<VarId, Domain> {
        &self.domains
    }

    pub fn domain(&self, var: VarId) -> Option<&Domain> {
        self.domains.get(&var)
    }

    /// Maximal activity of row `id`, optionally over its support minus `exclude`.
    ///
    /// Panics if `id` is not a live row.
    pub fn sup_activity(&self, id: RowId, exclude: Option<VarId>) -> BigInt {
        let row = self.row(id).expect("live row");
        self.row_sup(row, exclude)
    }

    /// Minimal activity of row `id`, optionally over its support minus `exclude`.
    ///
    /// Panics if `id` is not a live row.
    pub fn inf_activity(&self, id: RowId, exclude: Option<VarId>) -> BigInt {
        let row = self.row(id).expect("live row");
        self.row_inf(row, exclude)
    }

    pub(crate) fn row_sup(&self, row: &Row, exclude: Option<VarId>) -> BigInt {
        row.terms()
            .iter()
            .filter(|(v, _)| Some(*v) != exclude)
            .map(|(v, c)| sup_term(c, &self.domains[v]))
            .sum()
    }

    pub(crate) fn row_inf(&self, row: &Row, exclude: Option<VarId>) -> BigInt {
        row.terms()
            .iter()
            .filter(|(v, _)| Some(*v) != exclude)
            .map(|(v, c)| inf_term(c, &self.domains[v]))
            .sum()
    }

    /// Substitutes `var = value`, returning the residual system over the other
    /// variables. The value is not checked against the domain.
    pub fn assign(&self, var: VarId, value: &BigInt) -> System {
        let mut out = self.clone();
        out.assign_in_place(var, value);
        out
    }

    pub(crate) fn assign_in_place(&mut self, var: VarId, value: &BigInt) {
        self.domains.remove(&var);
        for (_, row) in &mut self.rows {
            if let Some(coeff) = row.take(var) {
                *row.rhs_mut() -= coeff * value;
            }
        }
    }

    /// Number of points in the box. Only defined once every row is gone.
    pub fn valid_count(&self) -> Result<BigInt, CoreError> {
        if !self.rows.is_empty() {
            return Err(CoreError::RowsRemain(self.rows.len()));
        }
        Ok(self.box_size())
    }

    /// Product of all domain sizes, ignoring the rows.
    pub fn box_size(&self) -> BigInt {
        self.domains
            .values()
            .fold(BigInt::one(), |acc, dom| acc * dom.size())
    }

    /// The subsystem over `vars` and `rows`. Rows must only mention `vars`.
    pub fn restrict(&self, vars: &[VarId], rows: &[RowId]) -> System {
        let domains = vars.iter().map(|v| (*v, self.domains[v].clone())).collect();
        let rows = self
            .rows
            .iter()
            .filter(|(id, _)| rows.binary_search(id).is_ok())
            .cloned()
            .collect();
        System {
            rows,
            domains,
            inconsistent: self.inconsistent,
            next_row: self.next_row,
        }
    }

    pub(crate) fn mark_inconsistent(&mut self) {
        *self = System::inconsistent();
    }

    pub(crate) fn domain_mut(&mut self, var: VarId) -> &mut Domain {
        self.domains.get_mut(&var).expect("live variable")
    }

    pub(crate) fn row_mut(&mut self, id: RowId) -> &mut Row {
        let idx = self.row_index(id).expect("live row");
        &mut self.rows[idx].1
    }

    pub(crate) fn remove_rows(&mut self, mut pred: impl FnMut(RowId, &Row) -> bool) -> usize {
        let before = self.rows.len();
        self.rows.retain(|(id, row)| !pred(*id, row));
        before - self.rows.len()
    }

    pub(crate) fn remove_row(&mut self, id: RowId) -> bool {
        match self.row_index(id) {
            Some(idx) => {
                self.rows.remove(idx);
                true
            }
            None => false,
        }
    }

    fn row_index(&self, id: RowId) -> Option<usize> {
        self.rows.binary_search_by_key(&id, |(rid, _)| *rid).ok()
    }

    /// Rough heap footprint, used for memory accounting.
    pub fn approx_bytes(&self) -> usize {
        let limb = |n: &BigInt| 8 + n.bits() as usize / 8;
        let rows: usize = self
            .rows
            .iter()
            .map(|(_, r)| {
                48 + limb(r.rhs()) + r.terms().iter().map(|(_, c)| 16 + limb(c)).sum::<usize>()
            })
            .sum();
        let doms: usize = self
            .domains
            .values()
            .map(|d| 48 + limb(&d.lo) + limb(&d.hi))
            .sum();
        64 + rows + doms
    }
}
