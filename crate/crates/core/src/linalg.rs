//! Exact linear algebra: fraction-free rank, rational row reduction, and
//! determinants of matrices with polynomial entries.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::poly::{Polynomial, Rational};

/// Clear denominators row by row.
fn integer_rows(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let l = row
                .iter()
                .filter(|c| !c.is_zero())
                .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            row.iter()
                .map(|c| {
                    if c.is_zero() {
                        BigInt::zero()
                    } else {
                        c.numer() * (&l / c.denom())
                    }
                })
                .collect()
        })
        .collect()
}

/// Rank of an integer matrix by Bareiss fraction-free elimination. Every
/// intermediate entry is a minor of the input, so divisions are exact.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let pivot_row = std::mem::take(&mut m[rank]);
        let p = pivot_row[col].clone();
        for row in m.iter_mut().skip(rank + 1) {
            let a = row[col].clone();
            for c in col..ncols {
                let v = &p * &row[c];
                let v = if a.is_zero() || pivot_row[c].is_zero() {
                    v
                } else {
                    v - &a * &pivot_row[c]
                };
                row[c] = if prev.is_one() { v } else { v / &prev };
            }
        }
        m[rank] = pivot_row;
        prev = p;
        rank += 1;
    }
    rank
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    bareiss_rank(integer_rows(rows))
}

/// Reduced row echelon form over the rationals.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rows: Vec<Vec<Rational>>,
    pub pivots: Vec<usize>,
}

pub fn rref(mut m: Vec<Vec<Rational>>, ncols: usize) -> Rref {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = m[r][col].recip();
        for c in col..ncols {
            if !m[r][c].is_zero() {
                m[r][c] = &m[r][c] * &inv;
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let a = row[col].clone();
            for c in col..ncols {
                if !pivot_row[c].is_zero() {
                    row[c] -= &a * &pivot_row[c];
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    Rref { rows: m, pivots }
}

/// Solve `a x = b` for square invertible `a`; `None` if singular.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| row.iter().cloned().chain(std::iter::once(bi.clone())).collect())
        .collect();
    let red = rref(aug, n + 1);
    if red.pivots.len() != n || red.pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(red.rows.iter().map(|row| row[n].clone()).collect())
}

/// Determinant of a square matrix with polynomial entries, by Laplace
/// expansion memoized over column subsets (2^n states, no divisions).
pub fn det_poly(m: &[Vec<Polynomial>], num_vars: usize) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::one(num_vars);
    }
    assert!(n < usize::BITS as usize);
    // dp[mask] = det of rows 0..|mask| restricted to columns in mask
    let mut dp: Vec<Option<Polynomial>> = vec![None; 1 << n];
    dp[0] = Some(Polynomial::one(num_vars));
    for mask in 1usize..(1 << n) {
        let r = mask.count_ones() as usize - 1;
        let mut acc = Polynomial::zero(num_vars);
        for j in 0..n {
            if mask & (1 << j) == 0 || m[r][j].is_zero() {
                continue;
            }
            let sub = dp[mask ^ (1 << j)].as_ref().unwrap();
            if sub.is_zero() {
                continue;
            }
            let above = (mask >> (j + 1)).count_ones();
            let t = &m[r][j] * sub;
            acc = if above % 2 == 0 { &acc + &t } else { &acc - &t };
        }
        dp[mask] = Some(acc);
    }
    dp.pop().unwrap().unwrap()
}

/// Signed cofactor `(-1)^(i+j) det(M without row i, column j)`.
pub fn cofactor_poly(m: &[Vec<Polynomial>], i: usize, j: usize, num_vars: usize) -> Polynomial {
    let minor: Vec<Vec<Polynomial>> = m
        .iter()
        .enumerate()
        .filter(|&(r, _)| r != i)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|&(c, _)| c != j)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect();
    let d = det_poly(&minor, num_vars);
    if (i + j).is_multiple_of(2) {
        d
    } else {
        -&d
    }
}
