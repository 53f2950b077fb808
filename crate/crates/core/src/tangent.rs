//! Differential of the Hessian-determinant map `F(f) = det Hess(f)` at a
//! cubic, and the independence lemmas behind the maximal-family tangent
//! certificate.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::aglib::hessian;
use crate::error::{Error, Result};
use crate::linalg::{self, cofactor_poly};
use crate::poly::{rat, Monomial, Polynomial, Rational};

/// Signed cofactors of a Hessian: `entries[i][j] = d det / d H_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct CofactorMatrix {
    entries: Vec<Vec<Polynomial>>,
}

impl CofactorMatrix {
    pub fn of(f: &Polynomial) -> Result<CofactorMatrix> {
        check_cubic(f)?;
        let h = hessian(f)?;
        let n = h.size();
        let mut entries = vec![vec![Polynomial::zero(n); n]; n];
        for i in 0..n {
            for j in i..n {
                let c = cofactor_poly(h.entries(), i, j, n);
                entries[j][i] = c.clone();
                entries[i][j] = c;
            }
        }
        Ok(CofactorMatrix { entries })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<Polynomial>] {
        &self.entries
    }
}

fn check_cubic(f: &Polynomial) -> Result<()> {
    let d = f.homogeneous_degree()?;
    if d != 3 {
        return Err(Error::NotCubic(d));
    }
    Ok(())
}

/// `d_f F(v) = sum_{i,j} cof_ij(Hess f) * d^2 v / dx_i dx_j`.
pub fn differential(cof: &CofactorMatrix, v: &Polynomial) -> Result<Polynomial> {
    let n = cof.size();
    let mut out = Polynomial::zero(n);
    for i in 0..n {
        for j in 0..n {
            if cof.get(i, j).is_zero() {
                continue;
            }
            let d2 = v.partial(i)?.partial(j)?;
            if !d2.is_zero() {
                out = &out + &(cof.get(i, j) * &d2);
            }
        }
    }
    Ok(out)
}

/// Exact rank of `d_f F : S_3 -> S_{N+1}` over monomial bases, and the
/// projective dimension `dim S_3 - rank - 1` of its kernel.
pub fn df_rank(f: &Polynomial) -> Result<(usize, usize)> {
    let cof = CofactorMatrix::of(f)?;
    let n = f.num_vars();
    let domain = Monomial::all_of_degree(n, 3);
    let images = domain
        .iter()
        .map(|m| differential(&cof, &Polynomial::monomial(m.clone(), rat(1))))
        .collect::<Result<Vec<_>>>()?;
    let rank = rank_of(&images);
    Ok((rank, domain.len() - rank - 1))
}

/// Rank of a family of polynomials as vectors of coefficients.
pub fn rank_of(polys: &[Polynomial]) -> usize {
    let mut columns: BTreeMap<Monomial, usize> = BTreeMap::new();
    for p in polys {
        for (m, _) in p.terms() {
            let next = columns.len();
            columns.entry(m.clone()).or_insert(next);
        }
    }
    let rows: Vec<Vec<Rational>> = polys
        .iter()
        .map(|p| {
            let mut row = vec![Rational::zero(); columns.len()];
            for (m, c) in p.terms() {
                row[columns[m]] = c.clone();
            }
            row
        })
        .collect();
    linalg::rank(&rows)
}

/// `x_0 x_{k+1}^2 + ... + x_{k-1} x_{2k}^2 + x_k L^2` with
/// `L = x_{k+1} + ... + x_{2k}`, in `2k + 1` variables.
pub fn maximal_special_point(k: usize) -> Result<Polynomial> {
    if k < 2 {
        return Err(Error::OutOfRange(format!("k must be at least 2, got {k}")));
    }
    let n = 2 * k + 1;
    let x = |i| Polynomial::var(i, n);
    let l = (k + 1..=2 * k).fold(Polynomial::zero(n), |acc, i| &acc + &x(i));
    let mut f = &x(k) * &l.pow(2);
    for i in 0..k {
        f = &f + &(&x(i) * &x(k + 1 + i).pow(2));
    }
    Ok(f)
}

/// Lower bound `k binom(k+1, 2) + binom(k+3, 3)` for the rank at the
/// maximal special point.
pub fn maximal_rank_bound(k: usize) -> usize {
    k * binom(k + 1, 2) + binom(k + 3, 3)
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// The products `Delta_i` in `2n + 1` variables: `Delta_i = L Pi / x_{n+1+i}`
/// for `i < n` and `Delta_n = Pi`, with `Pi = x_{n+1} ... x_{2n}`.
pub fn deltas(n: usize) -> Vec<Polynomial> {
    let nv = 2 * n + 1;
    let x = |i| Polynomial::var(i, nv);
    let l = (n + 1..=2 * n).fold(Polynomial::zero(nv), |acc, i| &acc + &x(i));
    let pi_without = |skip: Option<usize>| {
        (n + 1..=2 * n)
            .filter(|&i| Some(i) != skip)
            .fold(Polynomial::one(nv), |acc, i| &acc * &x(i))
    };
    let mut out: Vec<Polynomial> = (0..n).map(|i| &l * &pi_without(Some(n + 1 + i))).collect();
    out.push(pi_without(None));
    out
}

/// `A(n) = { Delta_i Delta_j : 0 <= i <= j <= n }`.
pub fn set_a(n: usize) -> Vec<Polynomial> {
    let d = deltas(n);
    let mut out = Vec::new();
    for i in 0..=n {
        for j in i..=n {
            out.push(&d[i] * &d[j]);
        }
    }
    out
}

/// `B(n) = union over m < n of { x_{n+1+m} Delta_i Delta_j : i <= j, i, j != m }`.
pub fn set_b(n: usize) -> Vec<Polynomial> {
    let d = deltas(n);
    let nv = 2 * n + 1;
    let mut out = Vec::new();
    for m in 0..n {
        let xm = Polynomial::var(n + 1 + m, nv);
        for i in (0..=n).filter(|&i| i != m) {
            for j in (i..=n).filter(|&j| j != m) {
                out.push(&xm * &(&d[i] * &d[j]));
            }
        }
    }
    out
}

/// `|C(n)| = sum_{m=0}^{n} binom(n - m + 2, 2)`.
pub fn set_c_size(n: usize) -> usize {
    (0..=n).map(|m| binom(n - m + 2, 2)).sum()
}

/// Whether `A(n)` and `B(n)` are linearly independent.
pub fn delta_sets_independent(n: usize) -> Result<(bool, bool)> {
    if n < 3 {
        return Err(Error::OutOfRange(format!("n must be at least 3, got {n}")));
    }
    let a = set_a(n);
    let b = set_b(n);
    Ok((rank_of(&a) == a.len(), rank_of(&b) == b.len()))
}

/// `Hess(f) * adj(Hess f) = det * Id`, checked as polynomials.
pub fn adjugate_identity_holds(f: &Polynomial) -> Result<bool> {
    let h = hessian(f)?;
    let cof = CofactorMatrix::of(f)?;
    let det = h.determinant();
    let n = h.size();
    for i in 0..n {
        for k in 0..n {
            let mut s = Polynomial::zero(n);
            for j in 0..n {
                // adj[j][k] = cof[k][j]
                s = &s + &(h.get(i, j) * cof.get(k, j));
            }
            let expected = if i == k { det.clone() } else { Polynomial::zero(n) };
            if s != expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
