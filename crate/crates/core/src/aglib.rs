//! Invariants of the Artinian Gorenstein algebra `A_f = Q / Ann(f)` attached
//! to a form `f`: cone test, Hessians, Hilbert function, strong Lefschetz
//! test in socle degree 3, Jordan types and Hessian rank strata.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{apply_operator, rat, Monomial, Polynomial, Rational};

/// Matrix of second partials. Entries are linear forms when `f` is a cubic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HessianMatrix {
    num_vars: usize,
    entries: Vec<Vec<Polynomial>>,
}

impl HessianMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<Polynomial>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i][j]
    }

    pub fn determinant(&self) -> Polynomial {
        linalg::det_poly(&self.entries, self.num_vars)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Vec<Vec<Rational>>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| e.evaluate(point)).collect())
            .collect()
    }

    /// Exact rank of the Hessian evaluated at `point`.
    pub fn rank_at(&self, point: &[Rational]) -> Result<usize> {
        Ok(linalg::rank(&self.evaluate(point)?))
    }
}

/// Non-increasing list of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn multiplicity(&self, part: u32) -> usize {
        self.0.iter().filter(|&&p| p == part).count()
    }
}

impl fmt::Display for Partition {
    /// Exponential notation, e.g. `4^1 2^2 1^8`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let p = self.0[i];
            let m = self.multiplicity(p);
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{p}^{m}")?;
            first = false;
            i += m;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicReport {
    pub f: Polynomial,
    pub is_cone: bool,
    pub hess_zero: bool,
    pub hilbert: Vec<usize>,
    /// `None` for cones, where the criterion does not apply.
    pub slp: Option<bool>,
}

fn require_cubic(f: &Polynomial) -> Result<()> {
    match f.homogeneous_degree()? {
        3 => Ok(()),
        d => Err(Error::NotCubic(d)),
    }
}

/// Coefficient vectors of `polys` over the degree-`d` monomials.
fn coefficient_rows(polys: &[Polynomial], num_vars: usize, d: u32) -> Vec<Vec<Rational>> {
    let basis = Monomial::all_of_degree(num_vars, d);
    let index: HashMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    polys
        .iter()
        .map(|p| {
            let mut row = vec![rat(0); basis.len()];
            for (m, c) in p.terms() {
                row[index[m]] = c.clone();
            }
            row
        })
        .collect()
}

/// True iff the partial derivatives of `f` are linearly dependent.
pub fn is_cone(f: &Polynomial) -> Result<bool> {
    let d = f.homogeneous_degree()?;
    if d == 0 {
        return Err(Error::DegreeTooLow(0));
    }
    let n = f.num_vars();
    let partials: Vec<Polynomial> = (0..n).map(|i| f.partial(i)).collect::<Result<_>>()?;
    Ok(linalg::rank(&coefficient_rows(&partials, n, d - 1)) < n)
}

pub fn hessian(f: &Polynomial) -> Result<HessianMatrix> {
    let d = f.homogeneous_degree()?;
    if d < 2 {
        return Err(Error::DegreeTooLow(d));
    }
    let n = f.num_vars();
    let first: Vec<Polynomial> = (0..n).map(|i| f.partial(i)).collect::<Result<_>>()?;
    let mut entries = vec![vec![Polynomial::zero(n); n]; n];
    for i in 0..n {
        for j in i..n {
            let e = first[i].partial(j)?;
            entries[j][i] = e.clone();
            entries[i][j] = e;
        }
    }
    Ok(HessianMatrix {
        num_vars: n,
        entries,
    })
}

/// Symbolic Hessian determinant, of degree `(N+1)(d-2)` unless zero.
pub fn hess_det(f: &Polynomial) -> Result<Polynomial> {
    Ok(hessian(f)?.determinant())
}

/// Rank of the catalecticant `Q_k -> S_{d-k}`, `alpha -> alpha(f)`.
fn catalecticant_rank(f: &Polynomial, d: u32, k: u32) -> Result<usize> {
    let n = f.num_vars();
    let images: Vec<Polynomial> = Monomial::all_of_degree(n, k)
        .into_iter()
        .map(|m| apply_operator(&Polynomial::monomial(m, rat(1)), f))
        .collect::<Result<_>>()?;
    Ok(linalg::rank(&coefficient_rows(&images, n, d - k)))
}

/// Hilbert function `(h_0, ..., h_d)` of `A_f`.
pub fn hilbert_function(f: &Polynomial) -> Result<Vec<usize>> {
    let d = f.homogeneous_degree()?;
    (0..=d).map(|k| catalecticant_rank(f, d, k)).collect()
}

/// Monomials of degree `k` whose images under the catalecticant are
/// independent, chosen greedily in descending graded-lex order. They form a
/// basis of `A_k`.
pub fn algebra_basis(f: &Polynomial, k: u32) -> Result<Vec<Monomial>> {
    let d = f.homogeneous_degree()?;
    if k > d {
        return Err(Error::OutOfRange(format!("degree {k} exceeds socle degree {d}")));
    }
    let n = f.num_vars();
    let mut chosen = Vec::new();
    let mut images: Vec<Polynomial> = Vec::new();
    for m in Monomial::all_of_degree(n, k) {
        let img = apply_operator(&Polynomial::monomial(m.clone(), rat(1)), f)?;
        if img.is_zero() {
            continue;
        }
        images.push(img);
        if linalg::rank(&coefficient_rows(&images, n, d - k)) == images.len() {
            chosen.push(m);
        } else {
            images.pop();
        }
    }
    Ok(chosen)
}

/// `k`-th Hessian `[alpha_i alpha_j (f)]` over the basis of [`algebra_basis`].
pub fn hessian_k(f: &Polynomial, k: u32) -> Result<Vec<Vec<Polynomial>>> {
    let d = f.homogeneous_degree()?;
    if 2 * k > d {
        return Err(Error::OutOfRange(format!("k = {k} exceeds d/2 for d = {d}")));
    }
    let basis = algebra_basis(f, k)?;
    basis
        .iter()
        .map(|a| {
            basis
                .iter()
                .map(|b| apply_operator(&Polynomial::monomial(a.mul(b), rat(1)), f))
                .collect()
        })
        .collect()
}

/// Strong Lefschetz test for a cubic: SLP holds iff the Hessian does not
/// vanish identically. Cones are reported with `slp = None`.
pub fn slp_socle3(f: &Polynomial) -> Result<CubicReport> {
    require_cubic(f)?;
    let cone = is_cone(f)?;
    let hess_zero = hess_det(f)?.is_zero();
    let hilbert = hilbert_function(f)?;
    Ok(CubicReport {
        f: f.clone(),
        is_cone: cone,
        hess_zero,
        hilbert,
        slp: if cone { None } else { Some(!hess_zero) },
    })
}

fn check_linear_form(f: &Polynomial, l: &[Rational]) -> Result<()> {
    if l.len() != f.num_vars() {
        return Err(Error::LengthMismatch {
            expected: f.num_vars(),
            got: l.len(),
        });
    }
    if l.iter().all(num_traits::Zero::is_zero) {
        return Err(Error::ZeroLinearForm);
    }
    Ok(())
}

/// `4 (+) 2^(r-1) (+) 1^(2(N+1-r))`.
pub fn jordan_partition(rank: usize, num_vars: usize) -> Partition {
    let mut parts = vec![4];
    parts.extend(std::iter::repeat_n(2, rank.saturating_sub(1)));
    parts.extend(std::iter::repeat_n(1, 2 * (num_vars - rank)));
    Partition::new(parts)
}

/// Jordan type of multiplication by `L` on `A_f`, where the coefficient vector
/// of `L` is read as the point `L^perp` at which the Hessian rank is taken.
pub fn jordan_type(f: &Polynomial, l: &[Rational]) -> Result<(usize, Partition)> {
    require_cubic(f)?;
    check_linear_form(f, l)?;
    if is_cone(f)? {
        return Err(Error::ConeInput);
    }
    let r = hessian(f)?.rank_at(l)?;
    Ok((r, jordan_partition(r, f.num_vars())))
}

/// Multiset of Hessian ranks, rank -> count.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RankProfile(pub BTreeMap<usize, usize>);

impl RankProfile {
    /// Most frequent rank; ties go to the larger rank.
    pub fn dominant(&self) -> Option<usize> {
        self.0
            .iter()
            .max_by_key(|&(r, c)| (*c, *r))
            .map(|(r, _)| *r)
    }

    pub fn max_rank(&self) -> Option<usize> {
        self.0.keys().next_back().copied()
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }
}

/// Random point of the span of `basis` with coefficients in [-9, 9], not all zero.
pub fn random_point_in_span(basis: &[Vec<Rational>], rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let n = basis[0].len();
    loop {
        let coeffs: Vec<i64> = (0..basis.len()).map(|_| rng.gen_range(-9..=9)).collect();
        if coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        let mut p = vec![rat(0); n];
        for (c, b) in coeffs.iter().zip(basis) {
            for (pi, bi) in p.iter_mut().zip(b) {
                *pi += bi * rat(*c);
            }
        }
        if p.iter().any(|x| !num_traits::Zero::is_zero(x)) {
            return p;
        }
    }
}

/// Exact Hessian ranks at `samples` seeded random points of the linear span of
/// `subspace_basis`.
pub fn rank_profile(
    f: &Polynomial,
    subspace_basis: &[Vec<Rational>],
    samples: usize,
    seed: u64,
) -> Result<RankProfile> {
    if subspace_basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    for b in subspace_basis {
        if b.len() != f.num_vars() {
            return Err(Error::LengthMismatch {
                expected: f.num_vars(),
                got: b.len(),
            });
        }
    }
    if linalg::rank(subspace_basis) < subspace_basis.len() {
        return Err(Error::DependentBasis);
    }
    let h = hessian(f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut profile = RankProfile::default();
    for _ in 0..samples {
        let p = random_point_in_span(subspace_basis, &mut rng);
        *profile.0.entry(h.rank_at(&p)?).or_default() += 1;
    }
    Ok(profile)
}

/// Coordinate points `e_i` for the listed variables: a basis of the linear
/// subspace where every other coordinate vanishes.
pub fn coordinate_subspace(num_vars: usize, vars: impl IntoIterator<Item = usize>) -> Vec<Vec<Rational>> {
    vars.into_iter()
        .map(|i| {
            let mut e = vec![rat(0); num_vars];
            e[i] = rat(1);
            e
        })
        .collect()
}

/// True iff `L^3(f) = 0`, i.e. `L` is nilpotent of index at most 3 in `A_f`.
pub fn is_nilpotent_index3(f: &Polynomial, l: &[Rational]) -> Result<bool> {
    require_cubic(f)?;
    check_linear_form(f, l)?;
    let cube = Polynomial::linear_form(l).pow(3);
    Ok(apply_operator(&cube, f)?.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn perazzo() -> Polynomial {
        parse("x0*x3^2+x1*x3*x4+x2*x4^2", 5).unwrap()
    }

    fn pt(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn cone_examples() {
        assert!(is_cone(&parse("x0*x1^2", 3).unwrap()).unwrap());
        assert!(!is_cone(&perazzo()).unwrap());
        assert!(!is_cone(&parse("x0^3+x1^3+x2^3", 3).unwrap()).unwrap());
        assert_eq!(is_cone(&parse("x0^3+x1", 2).unwrap()), Err(Error::NotHomogeneous));
    }

    #[test]
    fn hessian_examples() {
        let fermat = parse("x0^3+x1^3+x2^3", 3).unwrap();
        let h = hessian(&fermat).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j {
                    Polynomial::var(i, 3).scale(&rat(6))
                } else {
                    Polynomial::zero(3)
                };
                assert_eq!(h.get(i, j), &expected);
            }
        }
        let h = hessian(&perazzo()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!(h.get(i, j).is_zero());
            }
        }
        let h = hessian(&parse("x0*x1", 2).unwrap()).unwrap();
        assert_eq!(h.evaluate(&pt(&[0, 0])).unwrap(), vec![pt(&[0, 1]), pt(&[1, 0])]);
        assert_eq!(hessian(&parse("x0+x1", 2).unwrap()), Err(Error::DegreeTooLow(1)));
    }

    #[test]
    fn hess_det_examples() {
        let fermat = parse("x0^3+x1^3+x2^3", 3).unwrap();
        assert_eq!(hess_det(&fermat).unwrap(), parse("216*x0*x1*x2", 3).unwrap());
        assert!(hess_det(&perazzo()).unwrap().is_zero());
    }

    #[test]
    fn slp_examples() {
        let r = slp_socle3(&perazzo()).unwrap();
        assert!(!r.is_cone && r.hess_zero);
        assert_eq!(r.slp, Some(false));
        assert_eq!(r.hilbert, vec![1, 5, 5, 1]);
        let r = slp_socle3(&parse("x0*x1^2", 3).unwrap()).unwrap();
        assert!(r.is_cone);
        assert_eq!(r.slp, None);
        assert!(r.hilbert[1] < 3);
        assert_eq!(slp_socle3(&parse("x0^2", 2).unwrap()), Err(Error::NotCubic(2)));
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_function(&perazzo()).unwrap(), vec![1, 5, 5, 1]);
        assert_eq!(hilbert_function(&parse("x0^3", 1).unwrap()).unwrap(), vec![1, 1, 1, 1]);
        // Ann(x0 x1^2) in degree 1 is <X2>, in degree 2 it is <X0^2, X0X2, X1X2, X2^2>.
        assert_eq!(hilbert_function(&parse("x0*x1^2", 3).unwrap()).unwrap(), vec![1, 2, 2, 1]);
        assert_eq!(hilbert_function(&Polynomial::zero(2)), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn hessian_k_examples() {
        let f = perazzo();
        let h0 = hessian_k(&f, 0).unwrap();
        assert_eq!(h0, vec![vec![f.clone()]]);
        let h1 = hessian_k(&f, 1).unwrap();
        assert_eq!(h1.len(), 5);
        assert!(linalg::det_poly(&h1, 5).is_zero());
        // x0*x1^2: x2 is annihilated, so the basis of A_1 is {x0, x1}
        let g = parse("x0*x1^2", 3).unwrap();
        let h1 = hessian_k(&g, 1).unwrap();
        let full = hessian(&g).unwrap();
        assert_eq!(h1, vec![
            vec![full.get(0, 0).clone(), full.get(0, 1).clone()],
            vec![full.get(1, 0).clone(), full.get(1, 1).clone()],
        ]);
        assert!(matches!(hessian_k(&f, 2), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn jordan_examples() {
        let f = perazzo();
        let (r, p) = jordan_type(&f, &pt(&[1, 0, 1, 0, 0])).unwrap();
        assert_eq!(r, 2);
        assert_eq!(p.parts(), &[4, 2, 1, 1, 1, 1, 1, 1]);
        let (r, p) = jordan_type(&f, &pt(&[1, 0, 0, 0, 0])).unwrap();
        assert_eq!(r, 1);
        assert_eq!(p.parts(), &[4, 1, 1, 1, 1, 1, 1, 1, 1]);
        let (r, p) = jordan_type(&f, &pt(&[1, 1, 1, 1, 1])).unwrap();
        assert_eq!(r, 4);
        assert_eq!(p.parts(), &[4, 2, 2, 2, 1, 1]);
        assert_eq!(p.to_string(), "4^1 2^3 1^2");
        assert_eq!(jordan_type(&f, &pt(&[0; 5])), Err(Error::ZeroLinearForm));
        let cone = parse("x0*x1^2", 3).unwrap();
        assert_eq!(jordan_type(&cone, &pt(&[1, 0, 0])), Err(Error::ConeInput));
    }

    #[test]
    fn nilpotent_examples() {
        let f = perazzo();
        assert!(is_nilpotent_index3(&f, &pt(&[1, 0, 0, 0, 0])).unwrap());
        assert!(!is_nilpotent_index3(&parse("x0^3", 1).unwrap(), &pt(&[1])).unwrap());
        assert_eq!(is_nilpotent_index3(&f, &pt(&[0; 5])), Err(Error::ZeroLinearForm));
    }

    #[test]
    fn rank_profile_errors() {
        let f = perazzo();
        assert_eq!(rank_profile(&f, &[], 5, 0), Err(Error::EmptyBasis));
        let dep = vec![pt(&[1, 0, 0, 0, 0]), pt(&[2, 0, 0, 0, 0])];
        assert_eq!(rank_profile(&f, &dep, 5, 0), Err(Error::DependentBasis));
    }

    #[test]
    fn rank_profile_perazzo_plane() {
        let f = perazzo();
        let plane = coordinate_subspace(5, 0..3);
        let prof = rank_profile(&f, &plane, 30, 7).unwrap();
        assert_eq!(prof.dominant(), Some(2));
        assert!(prof.max_rank().unwrap() <= 2);
        let full = coordinate_subspace(5, 0..5);
        assert_eq!(rank_profile(&f, &full, 20, 7).unwrap().dominant(), Some(4));
    }
}
