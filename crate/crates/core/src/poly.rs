//! Exact multivariate polynomials over the rationals.
//!
//! A [`Polynomial`] lives in `Q[x0, ..., x_{n-1}]`. The same type doubles as a
//! constant-coefficient differential operator: the monomial `x^a` read as an
//! operator is `X^a = prod (d/dx_i)^{a_i}`, which is how [`apply_operator`]
//! interprets its first argument.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent vector. Ordered graded-lexicographically: total degree first,
/// then lexicographically with `x0 > x1 > ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn var(i: usize, num_vars: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Total degree in the given subset of variables.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&v| self.0[v]).sum()
    }

    /// All monomials of total degree `d` in `n` variables, largest first.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<Monomial> {
        fn rec(n: usize, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i + 1 == n {
                cur[i] = left;
                out.push(Monomial(cur.clone()));
                cur[i] = 0;
                return;
            }
            for e in (0..=left).rev() {
                cur[i] = e;
                rec(n, i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        let mut out = Vec::new();
        if n == 0 {
            if d == 0 {
                out.push(Monomial(Vec::new()));
            }
            return out;
        }
        rec(n, 0, d, &mut vec![0; n], &mut out);
        out
    }

    /// Monomials of degree `d` supported on the listed variables.
    pub fn all_in_vars(num_vars: usize, vars: &[usize], d: u32) -> Vec<Monomial> {
        Monomial::all_of_degree(vars.len(), d)
            .into_iter()
            .map(|m| {
                let mut e = vec![0; num_vars];
                for (k, &v) in vars.iter().enumerate() {
                    e[v] = m.0[k];
                }
                Monomial(e)
            })
            .collect()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with exact rational coefficients. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    num_vars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rational, num_vars: usize) -> Self {
        Polynomial::monomial(Monomial::one(num_vars), c)
    }

    pub fn one(num_vars: usize) -> Self {
        Polynomial::constant(Rational::one(), num_vars)
    }

    pub fn var(i: usize, num_vars: usize) -> Self {
        Polynomial::monomial(Monomial::var(i, num_vars), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let num_vars = m.num_vars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { num_vars, terms }
    }

    /// `sum_i coeffs[i] * x_i`.
    pub fn linear_form(coeffs: &[Rational]) -> Self {
        let n = coeffs.len();
        let mut p = Polynomial::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(i, n), c.clone());
        }
        p
    }

    pub fn from_terms(num_vars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero(num_vars);
        for (m, c) in terms {
            assert_eq!(m.num_vars(), num_vars);
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Maximum total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Degree of a nonzero homogeneous polynomial.
    pub fn homogeneous_degree(&self) -> Result<u32> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !self.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
        Ok(self.degree().unwrap())
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.num_vars);
        }
        Polynomial {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.num_vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn partial(&self, i: usize) -> Result<Polynomial> {
        if i >= self.num_vars {
            return Err(Error::VariableOutOfRange {
                index: i,
                num_vars: self.num_vars,
            });
        }
        let mut out = Polynomial::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.add_term(Monomial(exps), c * rat(e as i64));
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.num_vars {
            return Err(Error::LengthMismatch {
                expected: self.num_vars,
                got: point.len(),
            });
        }
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Part of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        Polynomial {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Variables that occur in some term.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.num_vars)
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    fn check_same(&self, other: &Polynomial) {
        assert_eq!(
            self.num_vars, other.num_vars,
            "polynomials over different variable counts"
        );
    }
}

/// Apply `alpha`, read as a differential operator, to `f`.
pub fn apply_operator(alpha: &Polynomial, f: &Polynomial) -> Result<Polynomial> {
    if alpha.num_vars != f.num_vars {
        return Err(Error::VariableCountMismatch(alpha.num_vars, f.num_vars));
    }
    let mut out = Polynomial::zero(f.num_vars);
    for (a, ca) in &alpha.terms {
        for (b, cb) in &f.terms {
            if !a.divides(b) {
                continue;
            }
            // d^a x^b = prod b_i! / (b_i - a_i)! x^(b - a)
            let mut factor = BigInt::one();
            let mut exps = Vec::with_capacity(b.0.len());
            for (&ai, &bi) in a.0.iter().zip(&b.0) {
                for t in (bi - ai + 1)..=bi {
                    factor *= t;
                }
                exps.push(bi - ai);
            }
            out.add_term(Monomial(exps), ca * cb * Rational::from_integer(factor));
        }
    }
    Ok(out)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.check_same(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.check_same(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.check_same(rhs);
        let mut out = Polynomial::zero(self.num_vars);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&rat(-1))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write!(f, "x{i}")?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    /// Canonical form: terms in descending graded-lex order, e.g.
    /// `1/2*x0^3 - x1*x2^2`. Parses back to the same polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            if m.degree() == 0 {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write_monomial(f, m)?;
            }
        }
        Ok(())
    }
}

/// Parse a polynomial in `x0..x{num_vars-1}`.
///
/// Grammar: `expr := ['+'|'-'] term (('+'|'-') term)*`,
/// `term := factor ('*' factor)*`,
/// `factor := int ['/' uint] | 'x' uint ['^' uint] | '(' expr ')'`.
pub fn parse(text: &str, num_vars: usize) -> Result<Polynomial> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        num_vars,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    num_vars: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn uint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected unsigned integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn small_uint(&mut self) -> Result<u32> {
        let pos = self.pos;
        let v = self.uint()?;
        u32::try_from(v).map_err(|_| Error::Syntax {
            pos,
            msg: "integer too large".into(),
        })
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut sign = rat(1);
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                sign = rat(-1);
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?.scale(&sign);
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.uint()?;
                let den = if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let pos = self.pos;
                    let d = self.uint()?;
                    if d.is_zero() {
                        return Err(Error::Syntax {
                            pos,
                            msg: "zero denominator".into(),
                        });
                    }
                    d
                } else {
                    BigInt::one()
                };
                Ok(Polynomial::constant(
                    BigRational::new(num, den),
                    self.num_vars,
                ))
            }
            Some(b'x') => {
                let start = self.pos;
                self.pos += 1;
                if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    return Err(Error::UnknownVariable {
                        pos: start,
                        name: self.ident_at(start),
                    });
                }
                let idx = self.small_uint()? as usize;
                if idx >= self.num_vars {
                    return Err(Error::VariableOutOfRange {
                        index: idx,
                        num_vars: self.num_vars,
                    });
                }
                let exp = if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.small_uint()?
                } else {
                    1
                };
                let mut e = vec![0; self.num_vars];
                e[idx] = exp;
                Ok(Polynomial::monomial(Monomial(e), rat(1)))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                Err(Error::UnknownVariable {
                    pos: start,
                    name: self.ident_at(start),
                })
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn ident_at(&self, start: usize) -> String {
        let end = self.src[start..]
            .iter()
            .position(|c| !c.is_ascii_alphanumeric() && *c != b'_')
            .map_or(self.src.len(), |k| start + k);
        String::from_utf8_lossy(&self.src[start..end]).into_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> Polynomial {
        parse(s, n).unwrap()
    }

    #[test]
    fn parse_examples() {
        let f = p("x0*x4^2 + x1*x4*x5 + x2*x5^2", 6);
        assert_eq!(f.len(), 3);
        assert_eq!(f.homogeneous_degree().unwrap(), 3);
        assert!(p("0", 3).is_zero());
        let g = p("1/2*x0^3 - x1*x2^2", 3);
        assert_eq!(g.len(), 2);
        assert_eq!(g.coefficient(&Monomial::new(vec![3, 0, 0])), ratio(1, 2));
        assert_eq!(g.coefficient(&Monomial::new(vec![0, 1, 2])), rat(-1));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse("x0 + * x1", 2), Err(Error::Syntax { pos: 5, .. })));
        assert!(matches!(parse("x0 + y1", 2), Err(Error::UnknownVariable { pos: 5, .. })));
        assert!(matches!(
            parse("x0*x3", 3),
            Err(Error::VariableOutOfRange { index: 3, num_vars: 3 })
        ));
        assert!(matches!(parse("(x0 + x1", 2), Err(Error::Syntax { .. })));
        assert!(matches!(parse("1/0", 2), Err(Error::Syntax { .. })));
    }

    #[test]
    fn parse_parentheses_and_whitespace() {
        let f = p(" ( x0 + x1 ) * ( x0 - x1 ) ", 2);
        assert_eq!(f, p("x0^2 - x1^2", 2));
    }

    #[test]
    fn print_canonical() {
        assert_eq!(p("x1*x2^2*(-1) + 1/2*x0^3", 3).to_string(), "1/2*x0^3 - x1*x2^2");
        assert_eq!(p("-3*x1 + 2", 2).to_string(), "-3*x1 + 2");
        assert_eq!(p("0", 2).to_string(), "0");
    }

    #[test]
    fn partial_examples() {
        let f = p("x0*x4^2", 5);
        assert_eq!(f.partial(4).unwrap(), p("2*x0*x4", 5));
        assert!(p("x0*x1^2", 3).partial(2).unwrap().is_zero());
        assert_eq!(p("x0^3+x1^3", 2).partial(0).unwrap(), p("3*x0^2", 2));
        assert!(matches!(p("x0", 2).partial(2), Err(Error::VariableOutOfRange { .. })));
    }

    #[test]
    fn operator_examples() {
        let f = p("x0*x4^2", 5);
        assert_eq!(apply_operator(&p("x0*x4^2", 5), &f).unwrap(), p("2", 5));
        assert_eq!(apply_operator(&p("x0^3", 1), &p("x0^3", 1)).unwrap(), p("6", 1));
        assert!(matches!(
            apply_operator(&p("x0", 2), &p("x0", 3)),
            Err(Error::VariableCountMismatch(2, 3))
        ));
    }

    #[test]
    fn evaluate_examples() {
        let f = p("x0*x4^2", 5);
        let pt: Vec<_> = [1, 0, 0, 0, 2].iter().map(|&v| rat(v)).collect();
        assert_eq!(f.evaluate(&pt).unwrap(), rat(4));
        let perazzo = p("x0*x3^2+x1*x3*x4+x2*x4^2", 5);
        assert_eq!(perazzo.evaluate(&vec![rat(1); 5]).unwrap(), rat(3));
        assert!(perazzo.evaluate(&vec![rat(0); 5]).unwrap().is_zero());
        assert!(matches!(
            perazzo.evaluate(&[rat(1)]),
            Err(Error::LengthMismatch { expected: 5, got: 1 })
        ));
    }

    #[test]
    fn monomials_of_degree() {
        let ms = Monomial::all_of_degree(3, 2);
        assert_eq!(ms.len(), 6);
        assert_eq!(ms[0].exponents(), &[2, 0, 0]);
        assert!(ms.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(Monomial::all_of_degree(7, 3).len(), 84);
    }
}
