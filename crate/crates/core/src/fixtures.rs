//! Small hand-written systems shared by tests, docs and the CLI.

use alloc::vec::Vec;

use crate::system::{Domain, Row, System, VarId};

/// Four rows over `x1, x2, x3 in [0, 3]`:
///
/// ```text
///  x1 -  x2 +  x3 <= 1
///  x1 + 2x2 +  x3 <= 3
/// -x1 +  x2 + 3x3 <= 2
/// -2x1 - x2 - 3x3 <= 4
/// ```
///
/// It has exactly four solutions: `[0,0,0]`, `[0,1,0]`, `[1,0,0]`, `[1,1,0]`.
pub fn example_one() -> System {
    from_dense(
        &[
            (&[1, -1, 1], 1),
            (&[1, 2, 1], 3),
            (&[-1, 1, 3], 2),
            (&[-2, -1, -3], 4),
        ],
        &[(0, 3), (0, 3), (0, 3)],
    )
}

/// [`example_one`] without its first row. It has eight solutions.
pub fn example_one_last_three_rows() -> System {
    from_dense(
        &[(&[1, 2, 1], 3), (&[-1, 1, 3], 2), (&[-2, -1, -3], 4)],
        &[(0, 3), (0, 3), (0, 3)],
    )
}

/// The four solutions of [`example_one`], in odometer order.
pub fn example_one_solutions() -> Vec<[i64; 3]> {
    alloc::vec![[0, 0, 0], [0, 1, 0], [1, 0, 0], [1, 1, 0]]
}

/// The eight solutions of [`example_one_last_three_rows`], in odometer order.
pub fn example_one_last_three_rows_solutions() -> Vec<[i64; 3]> {
    alloc::vec![
        [0, 0, 0],
        [0, 1, 0],
        [1, 0, 0],
        [1, 0, 1],
        [1, 1, 0],
        [2, 0, 0],
        [2, 0, 1],
        [3, 0, 0],
    ]
}

/// Builds a system from dense rows; variable `k` of the slice is `x{k+1}`.
pub fn from_dense(rows: &[(&[i64], i64)], bounds: &[(i64, i64)]) -> System {
    let mut s = System::new();
    for (k, (lo, hi)) in bounds.iter().enumerate() {
        s.add_var(VarId(k as u32 + 1), Domain::new(*lo, *hi))
            .expect("fresh variable");
    }
    for (coeffs, rhs) in rows {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (VarId(k as u32 + 1), *c));
        s.add_row(Row::new(terms, *rhs))
            .expect("declared variables");
    }
    s
}
