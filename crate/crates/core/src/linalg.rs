//! Exact Gaussian elimination over `Q`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// How a pivot is picked among the nonzero candidates of a column (or row).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest `|numerator · denominator|`; keeps entry growth down.
    #[default]
    SmallestHeight,
    /// Largest `|numerator · denominator|`.
    LargestHeight,
    /// First nonzero candidate in scan order.
    First,
    /// Last nonzero candidate in scan order.
    Last,
}

fn height(x: &BigRational) -> BigInt {
    (x.numer() * x.denom()).abs()
}

/// Index of the chosen pivot among `candidates`, ignoring zeros.
fn choose<'a, I>(candidates: I, rule: PivotRule) -> Option<usize>
where
    I: Iterator<Item = (usize, &'a BigRational)>,
{
    let mut best: Option<(usize, BigInt)> = None;
    for (i, x) in candidates {
        if x.is_zero() {
            continue;
        }
        let take = match (&best, rule) {
            (None, _) => true,
            (Some(_), PivotRule::First) => false,
            (Some(_), PivotRule::Last) => true,
            (Some((_, h)), PivotRule::SmallestHeight) => height(x) < *h,
            (Some((_, h)), PivotRule::LargestHeight) => height(x) > *h,
        };
        if take {
            best = Some((i, height(x)));
        }
    }
    best.map(|(i, _)| i)
}

/// Row-echelon set of vectors built incrementally; used to pick a maximal
/// independent subset greedily in input order.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rule: PivotRule,
    /// Reduced rows, each normalised to 1 at its pivot column.
    rows: Vec<(usize, Vec<BigRational>)>,
}

impl Echelon {
    pub fn new(rule: PivotRule) -> Self {
        Echelon { rule, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Remainder of `v` after elimination against the stored rows.
    pub fn reduce(&self, v: &[BigRational]) -> Vec<BigRational> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let factor = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &factor * r;
                }
            }
        }
        v
    }

    /// Adds `v` if it is independent of the stored rows; returns whether it
    /// was added.
    pub fn insert(&mut self, v: &[BigRational]) -> bool {
        let mut rem = self.reduce(v);
        let Some(p) = choose(rem.iter().enumerate(), self.rule) else {
            return false;
        };
        let inv = rem[p].recip();
        for x in rem.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        self.rows.push((p, rem));
        true
    }
}

/// Rank of a list of row vectors.
pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut e = Echelon::new(PivotRule::SmallestHeight);
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Finds `c` with `Σ_i c_i · vectors[i] = target`.
///
/// Returns `None` when the system is inconsistent. When the vectors are
/// dependent the solution is not unique and free coefficients are set to 0.
pub fn solve_combination(
    vectors: &[Vec<BigRational>],
    target: &[BigRational],
    rule: PivotRule,
) -> Option<Vec<BigRational>> {
    let n = vectors.len();
    let m = target.len();
    debug_assert!(vectors.iter().all(|v| v.len() == m));
    // Augmented matrix: m equations in n unknowns.
    let mut a: Vec<Vec<BigRational>> = (0..m)
        .map(|row| {
            let mut r: Vec<BigRational> = vectors.iter().map(|v| v[row].clone()).collect();
            r.push(target[row].clone());
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        let Some(off) = choose(a[row..].iter().map(|r| &r[col]).enumerate(), rule) else {
            continue;
        };
        a.swap(row, row + off);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = a[row].clone();
        for (r, other) in a.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for (x, p) in other.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    if a[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut c = vec![BigRational::zero(); n];
    for (r, &col) in pivot_cols.iter().enumerate() {
        c[col] = a[r][n].clone();
    }
    Some(c)
}

/// Inverse of a square matrix, `None` when singular.
pub fn invert(matrix: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = matrix.len();
    let mut cols = Vec::with_capacity(n);
    // Column j of the inverse solves M x = e_j; M x = Σ x_i · (column i of M).
    let columns: Vec<Vec<BigRational>> =
        (0..n).map(|i| matrix.iter().map(|row| row[i].clone()).collect()).collect();
    if rank(&columns) < n {
        return None;
    }
    for j in 0..n {
        let e: Vec<BigRational> = (0..n)
            .map(|i| if i == j { BigRational::one() } else { BigRational::zero() })
            .collect();
        cols.push(solve_combination(&columns, &e, PivotRule::SmallestHeight)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}
