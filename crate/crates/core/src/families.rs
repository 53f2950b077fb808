//! Canonical forms, seeded samplers and membership predicates for the minimal
//! and maximal families of special Perazzo cubics and their cone strata.
//!
//! Minimal family in `P^N`: `f = x0 g0 + x1 g1 + x2 g2 + h` with
//! `g_i in K[x_{N-1}, x_N]_2` and `h in K[x3..xN]_3`.
//! Maximal family in `P^{2k}`: `f = sum_{i<=k} x_i g_i + h` with
//! `g_i, h in K[x_{k+1}..x_{2k}]`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aglib;
use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{parse, rat, Monomial, Polynomial, Rational};

/// Seeds tried past the requested one before a sampler gives up.
const MAX_RESAMPLES: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Minimal,
    Maximal,
    MinimalCone1,
    MinimalCone2,
    MinimalCone3,
    MaximalCone1,
    MaximalCone2,
    PerazzoP4,
    Specialization,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 9] = [
        FamilyKind::Minimal,
        FamilyKind::Maximal,
        FamilyKind::MinimalCone1,
        FamilyKind::MinimalCone2,
        FamilyKind::MinimalCone3,
        FamilyKind::MaximalCone1,
        FamilyKind::MaximalCone2,
        FamilyKind::PerazzoP4,
        FamilyKind::Specialization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Minimal => "minimal",
            FamilyKind::Maximal => "maximal",
            FamilyKind::MinimalCone1 => "minimal_cone_1",
            FamilyKind::MinimalCone2 => "minimal_cone_2",
            FamilyKind::MinimalCone3 => "minimal_cone_3",
            FamilyKind::MaximalCone1 => "maximal_cone_1",
            FamilyKind::MaximalCone2 => "maximal_cone_2",
            FamilyKind::PerazzoP4 => "perazzo_p4",
            FamilyKind::Specialization => "specialization_t",
        }
    }

    fn is_maximal_type(self) -> bool {
        matches!(
            self,
            FamilyKind::Maximal
                | FamilyKind::MaximalCone1
                | FamilyKind::MaximalCone2
                | FamilyKind::Specialization
        )
    }

    pub fn is_cone_stratum(self) -> bool {
        matches!(
            self,
            FamilyKind::MinimalCone1
                | FamilyKind::MinimalCone2
                | FamilyKind::MinimalCone3
                | FamilyKind::MaximalCone1
                | FamilyKind::MaximalCone2
        )
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('-', "_");
        let kind = match s.as_str() {
            "min" | "minimal" => FamilyKind::Minimal,
            "max" | "maximal" => FamilyKind::Maximal,
            "specialization" | "specialization_t" => FamilyKind::Specialization,
            other => FamilyKind::ALL
                .into_iter()
                .find(|k| k.name() == other)
                .ok_or_else(|| Error::InvalidFamily(format!("unknown kind `{other}`")))?,
        };
        Ok(kind)
    }
}

/// A family together with its ambient dimension `N` (cubics in `x0..xN`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub n: usize,
    /// Declared `dim Z*`: 1 on the minimal side, `k - 1` on the maximal side.
    pub expected_dim_zstar: usize,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, n: usize) -> Result<Self> {
        let invalid = |why: &str| Err(Error::InvalidFamily(format!("{kind} with N = {n}: {why}")));
        match kind {
            FamilyKind::PerazzoP4 if n != 4 => return invalid("lives in P^4"),
            FamilyKind::Specialization if n != 6 => return invalid("lives in P^6"),
            k if k.is_maximal_type() && (!n.is_multiple_of(2) || n < 4) => {
                return invalid("requires N = 2k with k >= 2")
            }
            _ if n < 4 => return invalid("requires N >= 4"),
            _ => {}
        }
        let expected_dim_zstar = if kind.is_maximal_type() { n / 2 - 1 } else { 1 };
        Ok(FamilySpec {
            kind,
            n,
            expected_dim_zstar,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.n + 1
    }

    /// `k` with `N = 2k` on the maximal side.
    pub fn k(&self) -> usize {
        self.n / 2
    }

    /// Coordinates spanning `<Z*>`; the Hessian vanishes on this block.
    pub fn zstar_span_vars(&self) -> Vec<usize> {
        if self.kind.is_maximal_type() {
            (0..=self.k()).collect()
        } else {
            (0..3).collect()
        }
    }

    /// Generators of the ideal of `<Z*>`.
    pub fn plane_ideal_vars(&self) -> Vec<usize> {
        let span = self.zstar_span_vars();
        (0..=self.n).filter(|i| !span.contains(i)).collect()
    }
}

fn random_form(rng: &mut ChaCha8Rng, num_vars: usize, vars: &[usize], degree: u32) -> Polynomial {
    Polynomial::from_terms(
        num_vars,
        Monomial::all_in_vars(num_vars, vars, degree)
            .into_iter()
            .map(|m| (m, rat(rng.gen_range(-9..=9)))),
    )
}

fn nonzero_form(rng: &mut ChaCha8Rng, num_vars: usize, vars: &[usize], degree: u32) -> Polynomial {
    loop {
        let g = random_form(rng, num_vars, vars, degree);
        if !g.is_zero() {
            return g;
        }
    }
}

fn linearly_independent(polys: &[Polynomial], num_vars: usize, degree: u32) -> bool {
    let basis = Monomial::all_of_degree(num_vars, degree);
    let rows: Vec<Vec<Rational>> = polys
        .iter()
        .map(|p| basis.iter().map(|m| p.coefficient(m)).collect())
        .collect();
    linalg::rank(&rows) == polys.len()
}

fn sum_xg(num_vars: usize, pairs: impl IntoIterator<Item = (usize, Polynomial)>) -> Polynomial {
    pairs.into_iter().fold(Polynomial::zero(num_vars), |acc, (i, g)| {
        &acc + &(&Polynomial::var(i, num_vars) * &g)
    })
}

/// One candidate draw; `None` if the draw is degenerate for its stratum.
fn draw(spec: &FamilySpec, rng: &mut ChaCha8Rng) -> Result<Option<Polynomial>> {
    let n = spec.n;
    let nv = spec.num_vars();
    let fixed = |s: &str| parse(s, nv);
    let f = match spec.kind {
        FamilyKind::PerazzoP4 => return Ok(Some(perazzo_p4())),
        FamilyKind::Specialization => {
            let t = loop {
                let t: i64 = rng.gen_range(-9..=9);
                if t != 0 {
                    break t;
                }
            };
            return Ok(Some(specialization_member(&rat(t))));
        }
        FamilyKind::Minimal => {
            let gvars = [n - 1, n];
            let gs: Vec<Polynomial> = (0..3).map(|_| nonzero_form(rng, nv, &gvars, 2)).collect();
            if !linearly_independent(&gs, nv, 2) {
                return Ok(None);
            }
            let h = random_form(rng, nv, &(3..=n).collect::<Vec<_>>(), 3);
            &sum_xg(nv, gs.into_iter().enumerate()) + &h
        }
        FamilyKind::Maximal => {
            let k = spec.k();
            let gvars: Vec<usize> = (k + 1..=n).collect();
            let gs: Vec<Polynomial> = (0..=k).map(|_| nonzero_form(rng, nv, &gvars, 2)).collect();
            if !linearly_independent(&gs, nv, 2) {
                return Ok(None);
            }
            let h = random_form(rng, nv, &gvars, 3);
            &sum_xg(nv, gs.into_iter().enumerate()) + &h
        }
        FamilyKind::MinimalCone1 => {
            let head = fixed(&format!("x0*x{}^2", n - 1))?;
            &head + &random_form(rng, nv, &(3..n).collect::<Vec<_>>(), 3)
        }
        FamilyKind::MinimalCone2 => {
            let (a, b) = (n - 1, n);
            let head = fixed(&format!("x0*x{a}^2 + x1*x{a}*x{b} + x2*x{b}^2"))?;
            &head + &random_form(rng, nv, &(4..=n).collect::<Vec<_>>(), 3)
        }
        FamilyKind::MinimalCone3 => {
            let (a, b) = (n - 1, n);
            let head = fixed(&format!("x1*x{a}*x{b} + x2*x{b}^2"))?;
            &head + &random_form(rng, nv, &(3..=n).collect::<Vec<_>>(), 3)
        }
        FamilyKind::MaximalCone1 => {
            let k = spec.k();
            let vars: Vec<usize> = (k + 1..n).collect();
            let gs: Vec<(usize, Polynomial)> =
                (0..=k).map(|i| (i, nonzero_form(rng, nv, &vars, 2))).collect();
            &sum_xg(nv, gs) + &random_form(rng, nv, &vars, 3)
        }
        FamilyKind::MaximalCone2 => {
            let k = spec.k();
            let vars: Vec<usize> = (k + 1..=n).collect();
            let gs: Vec<(usize, Polynomial)> =
                (1..=k).map(|i| (i, nonzero_form(rng, nv, &vars, 2))).collect();
            &sum_xg(nv, gs) + &random_form(rng, nv, &vars, 3)
        }
    };
    if f.is_zero() {
        return Ok(None);
    }
    let cone = aglib::is_cone(&f)?;
    Ok((cone == spec.kind.is_cone_stratum()).then_some(f))
}

/// Seeded member of the family in canonical coordinates. Draws that are
/// degenerate for the stratum (dependent `g_i`, an unexpected cone, or a
/// non-cone in a cone stratum) are rejected and the sampler moves on to
/// `seed + 1`.
pub fn sample(spec: &FamilySpec, seed: u64) -> Result<Polynomial> {
    for attempt in 0..MAX_RESAMPLES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        if let Some(f) = draw(spec, &mut rng)? {
            return Ok(f);
        }
    }
    Err(Error::SamplingExhausted(MAX_RESAMPLES))
}

/// `x0 x3^2 + x1 x3 x4 + x2 x4^2`.
pub fn perazzo_p4() -> Polynomial {
    parse("x0*x3^2 + x1*x3*x4 + x2*x4^2", 5).unwrap()
}

/// `f_t = x0 x4^2 + x1 x4 x5 + x2 (x5^2 + t x6^2) + x3 x6^2` in seven variables.
pub fn specialization_member(t: &Rational) -> Polynomial {
    let base = parse("x0*x4^2 + x1*x4*x5 + x2*x5^2 + x3*x6^2", 7).unwrap();
    let tail = parse("x2*x6^2", 7).unwrap().scale(t);
    &base + &tail
}

/// True iff every monomial of `f` has degree at least 2 in `plane_vars`,
/// i.e. `f` lies in the square of the ideal they generate.
pub fn in_ideal_square(f: &Polynomial, plane_vars: &[usize]) -> Result<bool> {
    if plane_vars.is_empty() {
        return Err(Error::EmptyBasis);
    }
    match f.homogeneous_degree()? {
        3 => {}
        d => return Err(Error::NotCubic(d)),
    }
    if let Some(&bad) = plane_vars.iter().find(|&&v| v >= f.num_vars()) {
        return Err(Error::VariableOutOfRange {
            index: bad,
            num_vars: f.num_vars(),
        });
    }
    Ok(f.terms().all(|(m, _)| m.degree_in(plane_vars) >= 2))
}

fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension of the family's parameter space from the closed formulas.
pub fn family_dimension(kind: FamilyKind, n: usize) -> Result<i64> {
    let spec = FamilySpec::new(kind, n)?;
    let nn = n as i64;
    let k = spec.k() as i64;
    match kind {
        FamilyKind::Minimal => Ok(5 * (nn - 2) + binomial(nn, 3) + 4),
        FamilyKind::MinimalCone3 => Ok(5 * (nn - 2) + binomial(nn, 3) + 3),
        FamilyKind::Maximal => Ok((4 * k * k * k + 15 * k * k + 11 * k - 6) / 6),
        FamilyKind::MaximalCone2 => Ok(2 * k * binomial(k + 1, 2) + binomial(k, 3)
            - k * binomial(k, 2)
            + k * k
            + 2 * k
            - 1),
        other => Err(Error::NoClosedForm(other.to_string())),
    }
}

/// `dim X_min - dim X_max` in `P^{2k}`: `(k-2)(4k^2-19k+15)/6`.
pub fn min_minus_max_dimension(k: usize) -> i64 {
    let k = k as i64;
    (k - 2) * (4 * k * k - 19 * k + 15) / 6
}

/// A rational point of `<Z*>` where the Hessian of a minimal-family member in
/// canonical form has rank 1: the `a` with `sum a_i Hess(g_i) = diag(1, 0)`
/// on the `(x_{N-1}, x_N)` block. `None` if the `g_i` are dependent.
pub fn minimal_delta_witness(f: &Polynomial) -> Result<Option<Vec<Rational>>> {
    let nv = f.num_vars();
    let (a, b) = (nv - 2, nv - 1);
    let mut cols = Vec::new();
    for i in 0..3 {
        let g = f.partial(i)?;
        let gaa = g.partial(a)?.partial(a)?;
        let gab = g.partial(a)?.partial(b)?;
        let gbb = g.partial(b)?.partial(b)?;
        let zero = vec![rat(0); nv];
        cols.push([gaa.evaluate(&zero)?, gab.evaluate(&zero)?, gbb.evaluate(&zero)?]);
    }
    let m: Vec<Vec<Rational>> = (0..3).map(|r| (0..3).map(|c| cols[c][r].clone()).collect()).collect();
    let Some(coef) = linalg::solve(&m, &[rat(1), rat(0), rat(0)]) else {
        return Ok(None);
    };
    let mut p = vec![rat(0); nv];
    p[..3].clone_from_slice(&coef);
    Ok(Some(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(FamilySpec::new(FamilyKind::Minimal, 3).is_err());
        assert!(FamilySpec::new(FamilyKind::Maximal, 5).is_err());
        assert!(FamilySpec::new(FamilyKind::Maximal, 2).is_err());
        assert!(FamilySpec::new(FamilyKind::PerazzoP4, 5).is_err());
        assert_eq!(FamilySpec::new(FamilyKind::Maximal, 6).unwrap().expected_dim_zstar, 2);
        assert_eq!(FamilySpec::new(FamilyKind::Minimal, 6).unwrap().expected_dim_zstar, 1);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in FamilyKind::ALL {
            assert_eq!(k.name().parse::<FamilyKind>().unwrap(), k);
        }
        assert_eq!("min".parse::<FamilyKind>().unwrap(), FamilyKind::Minimal);
        assert!("max-cones".parse::<FamilyKind>().is_err());
    }

    #[test]
    fn perazzo_sample() {
        let spec = FamilySpec::new(FamilyKind::PerazzoP4, 4).unwrap();
        assert_eq!(sample(&spec, 0).unwrap(), perazzo_p4());
    }

    #[test]
    fn minimal_sample_shape() {
        let spec = FamilySpec::new(FamilyKind::Minimal, 5).unwrap();
        let f = sample(&spec, 11).unwrap();
        for (m, _) in f.terms() {
            let e = m.exponents();
            let lead: u32 = e[..3].iter().sum();
            if lead == 1 {
                assert_eq!(e[3], 0, "g_i must only involve x4, x5");
            } else {
                assert_eq!(lead, 0);
            }
        }
        assert!(!aglib::is_cone(&f).unwrap());
        assert!(aglib::hess_det(&f).unwrap().is_zero());
        assert_eq!(sample(&spec, 11).unwrap(), f);
    }

    #[test]
    fn maximal_sample_shape() {
        let spec = FamilySpec::new(FamilyKind::Maximal, 6).unwrap();
        let f = sample(&spec, 3).unwrap();
        assert!(in_ideal_square(&f, &[4, 5, 6]).unwrap());
        assert!(!aglib::is_cone(&f).unwrap());
        assert!(aglib::hess_det(&f).unwrap().is_zero());
    }

    #[test]
    fn cone_strata_are_cones() {
        for (kind, n) in [
            (FamilyKind::MinimalCone1, 5),
            (FamilyKind::MinimalCone2, 5),
            (FamilyKind::MinimalCone3, 6),
            (FamilyKind::MaximalCone1, 6),
            (FamilyKind::MaximalCone2, 6),
        ] {
            let f = sample(&FamilySpec::new(kind, n).unwrap(), 5).unwrap();
            assert!(aglib::is_cone(&f).unwrap(), "{kind}");
        }
    }

    #[test]
    fn specialization_examples() {
        let f0 = specialization_member(&rat(0));
        assert_eq!(f0, parse("x0*x4^2 + x1*x4*x5 + x2*x5^2 + x3*x6^2", 7).unwrap());
        assert!(in_ideal_square(&f0, &[4, 5, 6]).unwrap());
        let f1 = specialization_member(&rat(1));
        assert!(aglib::hess_det(&f1).unwrap().is_zero());
        assert!(!aglib::is_cone(&f1).unwrap());
        for t in [-3, 0, 2, 7] {
            assert!(aglib::hess_det(&specialization_member(&rat(t))).unwrap().is_zero());
        }
    }

    #[test]
    fn ideal_square_examples() {
        assert!(!in_ideal_square(&parse("x0^3", 2).unwrap(), &[1]).unwrap());
        assert_eq!(in_ideal_square(&parse("x0^3", 2).unwrap(), &[]), Err(Error::EmptyBasis));
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(family_dimension(FamilyKind::Minimal, 5).unwrap(), 29);
        assert_eq!(family_dimension(FamilyKind::Minimal, 6).unwrap(), 44);
        assert_eq!(family_dimension(FamilyKind::Maximal, 6).unwrap(), 45);
        assert_eq!(family_dimension(FamilyKind::MinimalCone3, 5).unwrap(), 28);
        assert_eq!(family_dimension(FamilyKind::MaximalCone2, 6).unwrap(), 42);
        assert_eq!(family_dimension(FamilyKind::Minimal, 4).unwrap(), family_dimension(FamilyKind::Maximal, 4).unwrap());
        assert!(matches!(family_dimension(FamilyKind::MinimalCone1, 5), Err(Error::NoClosedForm(_))));
        assert!(family_dimension(FamilyKind::Maximal, 5).is_err());
    }

    #[test]
    fn dimension_difference_formula() {
        assert_eq!(min_minus_max_dimension(3), -1);
        for k in 2..8 {
            let n = 2 * k;
            assert_eq!(
                min_minus_max_dimension(k),
                family_dimension(FamilyKind::Minimal, n).unwrap() - family_dimension(FamilyKind::Maximal, n).unwrap()
            );
        }
    }

    #[test]
    fn delta_witness_has_rank_one() {
        let spec = FamilySpec::new(FamilyKind::Minimal, 6).unwrap();
        let f = sample(&spec, 2).unwrap();
        let w = minimal_delta_witness(&f).unwrap().unwrap();
        assert_eq!(aglib::hessian(&f).unwrap().rank_at(&w).unwrap(), 1);
    }
}
