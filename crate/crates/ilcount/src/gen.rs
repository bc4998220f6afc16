//! Seeded random instance generator.
//!
//! Each row draws its length `k` uniformly from `[1, l]`, then `k` distinct
//! variables uniformly without replacement, a nonzero coefficient for each
//! and a right-hand side, all uniform over their configured ranges. The
//! random source is PCG-XSL-RR 128/64 (`rand_pcg::Pcg64`) seeded through
//! `SeedableRng::seed_from_u64`, so an instance is a pure function of its
//! parameters.

use std::fmt::{self, Write as _};

use ilcount_core::{Domain, Row, System, VarId};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

/// Name stamped into generated files.
pub const GENERATOR_NAME: &str = "ilcount-gen/1";
/// PRNG stamped into generated files.
pub const PRNG_NAME: &str = "pcg64-xsl-rr-128/64";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub n: usize,
    pub m: usize,
    pub l: usize,
    /// Domain of every variable.
    pub domain: (i64, i64),
    /// Coefficient range; zero is always excluded.
    pub coef: (i64, i64),
    pub rhs: (i64, i64),
    pub seed: u64,
}

impl GenParams {
    pub fn new(n: usize, m: usize, l: usize, seed: u64) -> Self {
        GenParams {
            n,
            m,
            l,
            domain: (-8, 7),
            coef: (-10, 10),
            rhs: (-20, 20),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.n == 0 || self.n > u32::MAX as usize {
            return Err(GenError::Variables(self.n));
        }
        if self.m == 0 {
            return Err(GenError::Rows);
        }
        if self.l == 0 || self.l > self.n {
            return Err(GenError::RowLength {
                l: self.l,
                n: self.n,
            });
        }
        if self.domain.0 > self.domain.1 {
            return Err(GenError::EmptyRange("domain"));
        }
        if self.rhs.0 > self.rhs.1 {
            return Err(GenError::EmptyRange("rhs"));
        }
        if self.coef.0 > self.coef.1 || self.coef == (0, 0) {
            return Err(GenError::EmptyRange("coefficient"));
        }
        Ok(())
    }
}

impl fmt::Display for GenParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} m={} l={} domain={}..{} coef={}..{}\\0 rhs={}..{} seed={}",
            self.n,
            self.m,
            self.l,
            self.domain.0,
            self.domain.1,
            self.coef.0,
            self.coef.1,
            self.rhs.0,
            self.rhs.1,
            self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("need at least one variable (got n={0})")]
    Variables(usize),
    #[error("need at least one row")]
    Rows,
    #[error("row length l={l} must lie in [1, n={n}]")]
    RowLength { l: usize, n: usize },
    #[error("{0} range is empty")]
    EmptyRange(&'static str),
}

/// Uniform nonzero integer in `[lo, hi]`.
fn nonzero(rng: &mut Pcg64, (lo, hi): (i64, i64)) -> i64 {
    let contains_zero = lo <= 0 && 0 <= hi;
    if !contains_zero {
        return rng.random_range(lo..=hi);
    }
    // Draw from the range with one slot removed, then shift past zero.
    let v = rng.random_range(lo..hi);
    if v >= 0 {
        v + 1
    } else {
        v
    }
}

pub fn generate(p: &GenParams) -> Result<System, GenError> {
    p.validate()?;
    let mut rng = Pcg64::seed_from_u64(p.seed);
    let mut s = System::new();
    for j in 1..=p.n {
        s.add_var(VarId(j as u32), Domain::new(p.domain.0, p.domain.1))
            .expect("fresh variable");
    }
    for _ in 0..p.m {
        let k = rng.random_range(1..=p.l);
        let mut vars = sample(&mut rng, p.n, k).into_vec();
        vars.sort_unstable();
        let terms: Vec<(VarId, i64)> = vars
            .into_iter()
            .map(|j| (VarId(j as u32 + 1), nonzero(&mut rng, p.coef)))
            .collect();
        let rhs = rng.random_range(p.rhs.0..=p.rhs.1);
        s.add_row(Row::new(terms, rhs)).expect("declared variables");
    }
    Ok(s)
}

/// Generated instance in file form, with the parameters in a header comment.
pub fn generate_text(p: &GenParams) -> Result<String, GenError> {
    let s = generate(p)?;
    let mut out = String::new();
    writeln!(out, "# generator={GENERATOR_NAME} prng={PRNG_NAME}").unwrap();
    writeln!(out, "# {p}").unwrap();
    crate::format::render_into(&mut out, &s);
    Ok(out)
}

/// Inclusive integer range given on the command line as `a` or `a..b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

impl std::str::FromStr for Span {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
        let (lo, hi) = match text.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let v = parse(text)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range `{text}`"));
        }
        Ok(Span { lo, hi })
    }
}

/// The parameter tuples of a sweep: every `(n, m, l)` with `m <= n` and
/// `l <= n`, `per_tuple` instances each, seeds counting up from `seed`.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub n: Span,
    pub m: Span,
    pub l: Span,
    pub per_tuple: usize,
    pub template: GenParams,
}

impl Sweep {
    pub fn params(&self) -> Vec<GenParams> {
        let mut out = Vec::new();
        let mut seed = self.template.seed;
        for n in self.n.lo..=self.n.hi {
            for m in self.m.lo..=self.m.hi.min(n) {
                for l in self.l.lo..=self.l.hi.min(n) {
                    for _ in 0..self.per_tuple {
                        out.push(GenParams {
                            n,
                            m,
                            l,
                            seed,
                            ..self.template.clone()
                        });
                        seed = seed.wrapping_add(1);
                    }
                }
            }
        }
        out
    }
}

/// File name used for a generated instance.
pub fn file_name(p: &GenParams) -> String {
    format!("n{}_m{}_l{}_s{}.ilc", p.n, p.m, p.l, p.seed)
}
