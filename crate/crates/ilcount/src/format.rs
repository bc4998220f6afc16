//! Plain-text instance format.
//!
//! ```text
//! # comment
//! p ilc <n> <m>
//! d <j> <lo> <hi>                     (n lines)
//! r <a1>*x<j1> <a2>*x<j2> ... <= <b>  (m lines)
//! ```
//!
//! Rows may also use `>=`, `=`, `<` and `>`; they are rewritten into `<=`
//! rows when read. Loose term spellings such as `x1 + 3*x2` or `- x4` are
//! accepted on input. [`render`] always writes the canonical form, so a
//! render/parse/render cycle is byte-exact.

use std::fmt::Write as _;

use ilcount_core::{BigInt, CoreError, Domain, Row, System, VarId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("missing `p ilc <n> <m>` header")]
    MissingHeader,
    #[error("duplicate header")]
    DuplicateHeader,
    #[error("malformed header")]
    BadHeader,
    #[error("expected {expected} {what} lines, found {found}")]
    WrongCount {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("unknown line tag `{0}`")]
    UnknownTag(String),
    #[error("not an integer: `{0}`")]
    NotInteger(String),
    #[error("malformed term `{0}`")]
    BadTerm(String),
    #[error("missing comparison operator")]
    MissingOperator,
    #[error("expected a single right-hand side after the operator")]
    BadRhs,
    #[error("variable x{0} declared twice")]
    DuplicateVariable(u32),
    #[error("variable x{0} is not declared")]
    UndeclaredVariable(u32),
    #[error("domain line after the first row")]
    DomainAfterRow,
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn int(tok: &str, line: usize) -> Result<BigInt, ParseError> {
    let digits = tok.strip_prefix(['-', '+']).unwrap_or(tok);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err(line, ParseErrorKind::NotInteger(tok.to_string())));
    }
    tok.trim_start_matches('+')
        .parse()
        .map_err(|_| err(line, ParseErrorKind::NotInteger(tok.to_string())))
}

fn var_id(tok: &str, line: usize) -> Option<Result<u32, ParseError>> {
    let digits = tok.strip_prefix('x')?;
    Some(
        digits
            .parse::<u32>()
            .ok()
            .filter(|_| digits.bytes().all(|b| b.is_ascii_digit()))
            .ok_or_else(|| err(line, ParseErrorKind::BadTerm(tok.to_string()))),
    )
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Op {
    Le,
    Ge,
    Eq,
    Lt,
    Gt,
}

fn op(tok: &str) -> Option<Op> {
    Some(match tok {
        "<=" => Op::Le,
        ">=" => Op::Ge,
        "=" | "==" => Op::Eq,
        "<" => Op::Lt,
        ">" => Op::Gt,
        _ => return None,
    })
}

/// Parses one term token, with an optional pending sign from a detached
/// `+`/`-` token.
fn term(tok: &str, negate: bool, line: usize) -> Result<(u32, BigInt), ParseError> {
    let bad = || err(line, ParseErrorKind::BadTerm(tok.to_string()));
    let (coeff, var) = match tok.split_once('*') {
        Some((c, v)) => (int(c, line).map_err(|_| bad())?, v),
        None => {
            let (sign, rest) = match tok.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, tok.strip_prefix('+').unwrap_or(tok)),
            };
            (BigInt::from(sign), rest)
        }
    };
    let id = var_id(var, line).ok_or_else(bad)??;
    Ok((id, if negate { -coeff } else { coeff }))
}

type RawRow = (usize, Vec<(u32, BigInt)>, Op, BigInt);

fn parse_row(body: &[&str], line: usize) -> Result<RawRow, ParseError> {
    let pos = body
        .iter()
        .position(|t| op(t).is_some())
        .ok_or_else(|| err(line, ParseErrorKind::MissingOperator))?;
    let operator = op(body[pos]).expect("found above");
    let rhs = match &body[pos + 1..] {
        [b] => int(b, line)?,
        _ => return Err(err(line, ParseErrorKind::BadRhs)),
    };
    let mut terms = Vec::new();
    let mut negate = false;
    let mut pending = false;
    for tok in &body[..pos] {
        match *tok {
            "+" | "-" if !pending => {
                negate = *tok == "-";
                pending = true;
            }
            _ => {
                terms.push(term(tok, negate, line)?);
                negate = false;
                pending = false;
            }
        }
    }
    if pending {
        return Err(err(
            line,
            ParseErrorKind::BadTerm(body[pos - 1].to_string()),
        ));
    }
    Ok((line, terms, operator, rhs))
}

/// Reads an instance. Rows are numbered 1.. in file order, after operator
/// rewriting (an `=` row becomes two consecutive rows).
pub fn parse(text: &str) -> Result<System, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut domains: Vec<(usize, u32, BigInt, BigInt)> = Vec::new();
    let mut rows: Vec<RawRow> = Vec::new();
    let mut last_line = 0;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "p" => {
                if header.is_some() {
                    return Err(err(line, ParseErrorKind::DuplicateHeader));
                }
                let [_, "ilc", n, m] = toks[..] else {
                    return Err(err(line, ParseErrorKind::BadHeader));
                };
                let n = n
                    .parse()
                    .map_err(|_| err(line, ParseErrorKind::BadHeader))?;
                let m = m
                    .parse()
                    .map_err(|_| err(line, ParseErrorKind::BadHeader))?;
                header = Some((line, n, m));
            }
            _ if header.is_none() => return Err(err(line, ParseErrorKind::MissingHeader)),
            "d" => {
                if !rows.is_empty() {
                    return Err(err(line, ParseErrorKind::DomainAfterRow));
                }
                let [_, j, lo, hi] = toks[..] else {
                    return Err(err(line, ParseErrorKind::BadTerm(content.to_string())));
                };
                let j: u32 = j
                    .parse()
                    .map_err(|_| err(line, ParseErrorKind::NotInteger(j.to_string())))?;
                domains.push((line, j, int(lo, line)?, int(hi, line)?));
            }
            "r" => rows.push(parse_row(&toks[1..], line)?),
            tag => return Err(err(line, ParseErrorKind::UnknownTag(tag.to_string()))),
        }
    }

    let (header_line, n, m) =
        header.ok_or_else(|| err(last_line.max(1), ParseErrorKind::MissingHeader))?;
    if domains.len() != n {
        return Err(err(
            header_line,
            ParseErrorKind::WrongCount {
                what: "d",
                expected: n,
                found: domains.len(),
            },
        ));
    }
    if rows.len() != m {
        return Err(err(
            header_line,
            ParseErrorKind::WrongCount {
                what: "r",
                expected: m,
                found: rows.len(),
            },
        ));
    }

    let mut s = System::new();
    for (line, j, lo, hi) in domains {
        s.add_var(VarId(j), Domain::new(lo, hi))
            .map_err(|e| match e {
                CoreError::DuplicateVariable(v) => {
                    err(line, ParseErrorKind::DuplicateVariable(v.0))
                }
                other => unreachable!("{other}"),
            })?;
    }
    for (line, terms, operator, rhs) in rows {
        let plain: Vec<(VarId, BigInt)> = terms.into_iter().map(|(j, c)| (VarId(j), c)).collect();
        let negated = || {
            plain
                .iter()
                .map(|(v, c)| (*v, -c.clone()))
                .collect::<Vec<_>>()
        };
        let rewritten: Vec<Row> = match operator {
            Op::Le => vec![Row::new(plain.clone(), rhs)],
            Op::Lt => vec![Row::new(plain.clone(), rhs - 1)],
            Op::Ge => vec![Row::new(negated(), -rhs)],
            Op::Gt => vec![Row::new(negated(), -rhs - 1)],
            Op::Eq => vec![
                Row::new(plain.clone(), rhs.clone()),
                Row::new(negated(), -rhs),
            ],
        };
        for row in rewritten {
            s.add_row(row).map_err(|e| match e {
                CoreError::UnknownVariable(v) => err(line, ParseErrorKind::UndeclaredVariable(v.0)),
                other => unreachable!("{other}"),
            })?;
        }
    }
    Ok(s)
}

/// Writes the canonical text form of `s` (without comments).
pub fn render(s: &System) -> String {
    let mut out = String::new();
    render_into(&mut out, s);
    out
}

pub(crate) fn render_into(out: &mut String, s: &System) {
    writeln!(out, "p ilc {} {}", s.num_vars(), s.num_rows()).unwrap();
    for (v, d) in s.domains() {
        writeln!(out, "d {} {} {}", v.0, d.lo, d.hi).unwrap();
    }
    for (_, row) in s.rows() {
        out.push('r');
        for (v, c) in row.terms() {
            write!(out, " {}*x{}", c, v.0).unwrap();
        }
        writeln!(out, " <= {}", row.rhs()).unwrap();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ilcount_core::fixtures::example_one;
    use ilcount_core::RowId;

    const EXAMPLE: &str = "\
# four rows over [0,3]^3
p ilc 3 4
d 1 0 3
d 2 0 3
d 3 0 3
r 1*x1 -1*x2 1*x3 <= 1
r 1*x1 2*x2 1*x3 <= 3
r -1*x1 1*x2 3*x3 <= 2
r -2*x1 -1*x2 -3*x3 <= 4
";

    #[test]
    fn parses_example() {
        assert_eq!(parse(EXAMPLE).unwrap(), example_one());
    }

    #[test]
    fn render_round_trip() {
        let text = render(&example_one());
        assert_eq!(
            text,
            EXAMPLE
                .lines()
                .skip(1)
                .map(|l| format!("{l}\n"))
                .collect::<String>()
        );
        assert_eq!(parse(&text).unwrap(), example_one());
    }

    #[test]
    fn ge_is_negated() {
        let s = parse("p ilc 1 1\nd 1 0 5\nr x1 >= 2\n").unwrap();
        let row = s.row(RowId(1)).unwrap();
        assert_eq!(row.terms(), &[(VarId(1), BigInt::from(-1))]);
        assert_eq!(row.rhs(), &BigInt::from(-2));
    }

    #[test]
    fn equality_splits() {
        let s = parse("p ilc 2 1\nd 1 0 5\nd 2 0 5\nr x1 + x2 = 1\n").unwrap();
        assert_eq!(s.num_rows(), 2);
        let r1 = s.row(RowId(1)).unwrap();
        let r2 = s.row(RowId(2)).unwrap();
        assert_eq!(
            r1.terms(),
            &[(VarId(1), BigInt::from(1)), (VarId(2), BigInt::from(1))]
        );
        assert_eq!(r1.rhs(), &BigInt::from(1));
        assert_eq!(
            r2.terms(),
            &[(VarId(1), BigInt::from(-1)), (VarId(2), BigInt::from(-1))]
        );
        assert_eq!(r2.rhs(), &BigInt::from(-1));
    }

    #[test]
    fn strict_operators() {
        let s = parse("p ilc 1 2\nd 1 0 9\nr 2*x1 < 5\nr x1 > 1\n").unwrap();
        assert_eq!(s.row(RowId(1)).unwrap().rhs(), &BigInt::from(4));
        assert_eq!(s.row(RowId(2)).unwrap().rhs(), &BigInt::from(-2));
    }

    #[test]
    fn loose_terms() {
        let s = parse("p ilc 3 1\nd 1 0 1\nd 2 0 1\nd 3 0 1\nr -x1 - 3*x2 + x3 <= 0\n").unwrap();
        let row = s.row(RowId(1)).unwrap();
        let coeffs: Vec<i64> = row
            .terms()
            .iter()
            .map(|(_, c)| i64::try_from(c).unwrap())
            .collect();
        assert_eq!(coeffs, [-1, -3, 1]);
    }

    #[test]
    fn empty_lhs_row() {
        let s = parse("p ilc 1 1\nd 1 0 0\nr <= -1\n").unwrap();
        assert!(s.row(RowId(1)).unwrap().is_empty());
        assert_eq!(render(&s), "p ilc 1 1\nd 1 0 0\nr <= -1\n");
    }

    #[test]
    fn big_literals() {
        let big = "123456789012345678901234567890";
        let s = parse(&format!(
            "p ilc 1 1\nd 1 -{big} {big}\nr {big}*x1 <= -{big}\n"
        ))
        .unwrap();
        assert_eq!(parse(&render(&s)).unwrap(), s);
        assert!(render(&s).contains(big));
    }

    fn kind(text: &str) -> (usize, ParseErrorKind) {
        let e = parse(text).unwrap_err();
        (e.line, e.kind)
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(kind("d 1 0 1\n"), (1, ParseErrorKind::MissingHeader));
        assert_eq!(kind(""), (1, ParseErrorKind::MissingHeader));
        assert_eq!(
            kind("p ilc 2 0\nd 1 0 1\nd 1 0 1\n"),
            (3, ParseErrorKind::DuplicateVariable(1))
        );
        assert_eq!(
            kind("p ilc 1 1\nd 1 0 1\nr 1*x2 <= 0\n"),
            (3, ParseErrorKind::UndeclaredVariable(2))
        );
        assert_eq!(
            kind("p ilc 1 1\nd 1 0 1\nr 1.5*x1 <= 0\n"),
            (3, ParseErrorKind::BadTerm("1.5*x1".into()))
        );
        assert_eq!(
            kind("p ilc 1 1\nd 1 0 1\nr 1*x1 <= 1/2\n"),
            (3, ParseErrorKind::NotInteger("1/2".into()))
        );
        assert_eq!(
            kind("p ilc 1 1\nd 1 0 1\nr 1*x1 1\n"),
            (3, ParseErrorKind::MissingOperator)
        );
        assert_eq!(
            kind("p ilc 1 0\nd 1 0 1.0\n"),
            (2, ParseErrorKind::NotInteger("1.0".into()))
        );
        assert_eq!(
            kind("p ilc 1 0\nq\n"),
            (2, ParseErrorKind::UnknownTag("q".into()))
        );
        assert!(matches!(
            kind("p ilc 2 0\nd 1 0 1\n").1,
            ParseErrorKind::WrongCount { .. }
        ));
    }
}
