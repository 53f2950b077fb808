//! Intersection rings of flag-bundle towers over a point, with Chern, Segre
//! and Chern-character calculus for (possibly virtual) sheaves.
//!
//! A tower is built one Grassmannian bundle at a time. The level
//! `G(a, E) -> B` parametrizes rank-`a` subbundles `S` of a rank-`n` bundle
//! `E` on the base `B`; its ring is `A(B)[e_1..e_a] / (q_{b+1}, ..., q_n)`
//! where `e_i = c_i(S)`, `b = n - a` and `q = c(E) / c(S) = c(Q)`.
//!
//! Over `A(B)` this ring is free on the "box" monomials `e^m` with
//! `m_1 + ... + m_a <= b`, so each graded piece has the Schubert cell count
//! as dimension and every class has a unique normal form. Other monomials
//! are reduced with a certificate `mu = box part + sum_j lambda_j s_j(S)`
//! computed by Gaussian elimination on the point Grassmannian, followed by
//! `s_j(S) = -sum_{t>=1} c_t(E) s_{j-t}(S)` modulo the relations, which
//! strictly lowers the fiber degree.

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg;

pub type Coeff = BigRational;
type Sparse = Vec<(usize, Coeff)>;
type Mono = Vec<u16>;

fn int(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelInfo {
    pub sub_rank: usize,
    pub quot_rank: usize,
    /// Index of `c_1` of this level's subbundle among the tower generators.
    pub gen_offset: usize,
}

struct TowerData {
    parent: Option<Tower>,
    levels: Vec<LevelInfo>,
    gen_degrees: Vec<usize>,
    dim: usize,
    basis: Vec<Vec<Mono>>,
    index: Vec<HashMap<Mono, usize>>,
    /// `table[g][d][i]`: generator `g` times basis element `(d, i)`, as a
    /// sparse vector over the basis in degree `d + deg g`.
    table: Vec<Vec<Vec<Sparse>>>,
    /// Basis element = `generator * trie parent`, with the parent again a
    /// basis element. Degree-0 has no parent.
    trie: Vec<Vec<Option<(usize, usize)>>>,
    euler_characteristic: BigInt,
    /// Top coefficient of `c_top` of the relative tangent bundle.
    euler_top: OnceLock<Coeff>,
}

/// A flag-bundle tower over a point together with its graded intersection
/// ring. Cheap to clone; towers are compared by identity.
#[derive(Clone)]
pub struct Tower(Arc<TowerData>);

impl std::fmt::Debug for Tower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tower")
            .field("levels", &self.0.levels)
            .field("dim", &self.0.dim)
            .finish()
    }
}

impl PartialEq for Tower {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Tower {
    pub fn point() -> Tower {
        let euler_top = OnceLock::new();
        euler_top.set(int(1)).unwrap();
        Tower(Arc::new(TowerData {
            parent: None,
            levels: Vec::new(),
            gen_degrees: Vec::new(),
            dim: 0,
            basis: vec![vec![Vec::new()]],
            index: vec![HashMap::from([(Vec::new(), 0)])],
            table: Vec::new(),
            trie: vec![vec![None]],
            euler_characteristic: BigInt::one(),
            euler_top,
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn levels(&self) -> &[LevelInfo] {
        &self.0.levels
    }

    pub fn num_generators(&self) -> usize {
        self.0.gen_degrees.len()
    }

    /// Ranks of the graded pieces of the ring.
    pub fn betti_numbers(&self) -> Vec<usize> {
        self.0.basis.iter().map(Vec::len).collect()
    }

    /// Number of Schubert cells: the product of `binom(n, a)` over levels.
    pub fn euler_characteristic(&self) -> &BigInt {
        &self.0.euler_characteristic
    }

    pub fn basis(&self, degree: usize) -> &[Mono] {
        &self.0.basis[degree]
    }

    fn is_ancestor_of(&self, other: &Tower) -> bool {
        let mut cur = Some(other.clone());
        while let Some(t) = cur {
            if t == *self {
                return true;
            }
            cur = t.0.parent.clone();
        }
        false
    }

    pub fn one(&self) -> RingElement {
        let mut x = RingElement::zero(self);
        x.comps[0][0] = int(1);
        x
    }

    /// The `i`-th generator (`c_j` of some level's subbundle) as a class.
    pub fn generator(&self, g: usize) -> RingElement {
        let d = self.0.gen_degrees[g];
        let mut mono = vec![0u16; self.num_generators()];
        mono[g] = 1;
        let mut x = RingElement::zero(self);
        if d <= self.dim() {
            let i = self.0.index[d][&mono];
            x.comps[d][i] = int(1);
        }
        x
    }

    pub fn trivial(&self, rank: usize) -> Sheaf {
        Sheaf::from_chern(self.one(), rank as i64)
    }

    /// Grassmannian bundle of rank-`sub_rank` subbundles of `ambient`. Returns
    /// the extended tower with the tautological subbundle `S` and quotient
    /// `Q`, in that order, both living on the new tower.
    pub fn flag_bundle(&self, sub_rank: usize, quot_rank: usize, ambient: &Sheaf) -> Result<(Tower, Sheaf, Sheaf)> {
        if ambient.tower != *self {
            return Err(Error::TowerMismatch);
        }
        if sub_rank == 0 || quot_rank == 0 || (sub_rank + quot_rank) as i64 != ambient.rank {
            return Err(Error::RankMismatch(format!(
                "flag bundle {{{sub_rank}, {quot_rank}}} over a bundle of rank {}",
                ambient.rank
            )));
        }
        let ambient_chern = ambient.chern();
        let data = LevelBuilder::new(self, sub_rank, quot_rank, &ambient_chern).build()?;
        let tower = Tower(Arc::new(data));
        let offset = self.num_generators();
        let mut s_chern = tower.one();
        for i in 0..sub_rank {
            s_chern = &s_chern + &tower.generator(offset + i);
        }
        let s = Sheaf::from_chern(s_chern, sub_rank as i64);
        let q = tower.pull(ambient)?.difference(&s)?;
        // c_top of Hom(S, Q), times the pulled-back Euler class of the base.
        let rel = s.dual().tensor(&q)?;
        let ctop = rel.chern().component(sub_rank * quot_rank).to_vec();
        let mut base_top = vec![int(0); tower.0.basis[self.dim()].len()];
        let mut mono = self.0.basis[self.dim()][0].clone();
        mono.resize(tower.num_generators(), 0);
        base_top[tower.0.index[self.dim()][&mono]] = self.0.euler_top.get().unwrap().clone();
        let top = tower.mul_hom(&base_top, self.dim(), &ctop, sub_rank * quot_rank);
        let tau = top[0].clone();
        if tau.is_zero() {
            return Err(Error::TowerAnomaly("Euler class vanishes".into()));
        }
        tower.0.euler_top.set(tau).unwrap();
        Ok((tower, s, q))
    }

    /// Pull a sheaf back from an ancestor tower (or return it unchanged).
    pub fn pull(&self, sheaf: &Sheaf) -> Result<Sheaf> {
        if sheaf.tower == *self {
            return Ok(sheaf.clone());
        }
        if !sheaf.tower.is_ancestor_of(self) {
            return Err(Error::TowerMismatch);
        }
        let mut power: Vec<(usize, Vec<Coeff>)> =
            sheaf.power.iter().map(|v| self.pull_element(&sheaf.tower, v)).collect();
        for m in power.len()..=self.dim() {
            power.push((m, vec![int(0); self.0.basis[m].len()]));
        }
        Ok(Sheaf::from_power_sums(self, sheaf.rank, power))
    }

    pub fn pull_class(&self, x: &RingElement) -> Result<RingElement> {
        if !x.tower.is_ancestor_of(self) {
            return Err(Error::TowerMismatch);
        }
        let mut out = RingElement::zero(self);
        for d in 0..=x.tower.dim() {
            out.comps[d] = self.pull_element(&x.tower, &(d, x.comps[d].clone())).1;
        }
        Ok(out)
    }

    fn pull_element(&self, from: &Tower, v: &(usize, Vec<Coeff>)) -> (usize, Vec<Coeff>) {
        let (d, comps) = v;
        let mut out = vec![int(0); self.0.basis.get(*d).map_or(0, Vec::len)];
        for (i, c) in comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut mono = from.0.basis[*d][i].clone();
            mono.resize(self.num_generators(), 0);
            out[self.0.index[*d][&mono]] = c.clone();
        }
        (*d, out)
    }

    /// Coefficient of the point class in the top-degree component, normalized
    /// so that `integral(c_top(T)) = euler_characteristic()`.
    pub fn integral(&self, x: &RingElement) -> Result<Coeff> {
        if x.tower != *self {
            return Err(Error::TowerMismatch);
        }
        let top = &x.comps[self.dim()];
        if top.len() != 1 {
            return Err(Error::TowerAnomaly(format!("top graded piece has rank {}", top.len())));
        }
        let tau = self.0.euler_top.get().ok_or_else(|| Error::TowerAnomaly("missing Euler class".into()))?;
        Ok(&top[0] * Coeff::from_integer(self.0.euler_characteristic.clone()) / tau)
    }

    /// `g * v` for `v` homogeneous of degree `d`.
    fn apply_gen(&self, g: usize, v: &[Coeff], d: usize) -> Vec<Coeff> {
        let td = d + self.0.gen_degrees[g];
        let mut out = vec![int(0); self.0.basis[td].len()];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, t) in &self.0.table[g][d][i] {
                out[*j] += c * t;
            }
        }
        out
    }

    /// `x * b` for every basis element `b` with `p + deg b <= dim`, where `x`
    /// is homogeneous of degree `p`.
    fn mul_operator(&self, x: &[Coeff], p: usize) -> Vec<Vec<Vec<Coeff>>> {
        let dim = self.dim();
        let mut ops: Vec<Vec<Vec<Coeff>>> = Vec::with_capacity(dim + 1 - p);
        for q in 0..=(dim - p) {
            let mut row = Vec::with_capacity(self.0.basis[q].len());
            for i in 0..self.0.basis[q].len() {
                let v = match self.0.trie[q][i] {
                    None => x.to_vec(),
                    Some((g, parent)) => {
                        let dg = self.0.gen_degrees[g];
                        self.apply_gen(g, &ops[q - dg][parent], p + q - dg)
                    }
                };
                row.push(v);
            }
            ops.push(row);
        }
        ops
    }

    fn mul_hom(&self, x: &[Coeff], p: usize, y: &[Coeff], q: usize) -> Vec<Coeff> {
        if p + q > self.dim() {
            return Vec::new();
        }
        let (x, p, y, q) = if y.iter().filter(|c| !c.is_zero()).count() < x.iter().filter(|c| !c.is_zero()).count() {
            (y, q, x, p)
        } else {
            (x, p, y, q)
        };
        // only the degree-q slice of the operator is needed
        let ops = self.mul_operator_upto(x, p, q);
        combine(&ops[q], y, self.0.basis[p + q].len())
    }

    fn mul_operator_upto(&self, x: &[Coeff], p: usize, qmax: usize) -> Vec<Vec<Vec<Coeff>>> {
        let mut ops: Vec<Vec<Vec<Coeff>>> = Vec::with_capacity(qmax + 1);
        for q in 0..=qmax {
            let mut row = Vec::with_capacity(self.0.basis[q].len());
            for i in 0..self.0.basis[q].len() {
                let v = match self.0.trie[q][i] {
                    None => x.to_vec(),
                    Some((g, parent)) => {
                        let dg = self.0.gen_degrees[g];
                        self.apply_gen(g, &ops[q - dg][parent], p + q - dg)
                    }
                };
                row.push(v);
            }
            ops.push(row);
        }
        ops
    }
}

fn combine(products: &[Vec<Coeff>], y: &[Coeff], len: usize) -> Vec<Coeff> {
    let mut out = vec![int(0); len];
    for (j, c) in y.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (o, v) in out.iter_mut().zip(&products[j]) {
            if !v.is_zero() {
                *o += c * v;
            }
        }
    }
    out
}

/// Precomputed multiplication by a fixed homogeneous class.
struct MulOp {
    degree: usize,
    scalar: Option<Coeff>,
    products: Vec<Vec<Vec<Coeff>>>,
}

impl MulOp {
    fn new(tower: &Tower, x: &[Coeff], p: usize) -> MulOp {
        if p == 0 {
            return MulOp {
                degree: 0,
                scalar: Some(x[0].clone()),
                products: Vec::new(),
            };
        }
        MulOp {
            degree: p,
            scalar: None,
            products: tower.mul_operator(x, p),
        }
    }

    fn is_zero(&self) -> bool {
        match &self.scalar {
            Some(s) => s.is_zero(),
            None => self.products.first().is_none_or(|r| r[0].iter().all(Zero::is_zero)),
        }
    }

    /// `x * y` for `y` homogeneous of degree `q`; `None` above the top degree.
    fn apply(&self, tower: &Tower, y: &[Coeff], q: usize) -> Option<Vec<Coeff>> {
        let d = self.degree + q;
        if d > tower.dim() {
            return None;
        }
        if let Some(s) = &self.scalar {
            return Some(y.iter().map(|c| c * s).collect());
        }
        Some(combine(&self.products[q], y, tower.0.basis[d].len()))
    }
}

/// Graded class in a tower ring, dense over the normal-form basis.
#[derive(Clone, Debug, PartialEq)]
pub struct RingElement {
    tower: Tower,
    comps: Vec<Vec<Coeff>>,
}

impl RingElement {
    pub fn zero(tower: &Tower) -> RingElement {
        RingElement {
            tower: tower.clone(),
            comps: tower.0.basis.iter().map(|b| vec![int(0); b.len()]).collect(),
        }
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn component(&self, d: usize) -> &[Coeff] {
        &self.comps[d]
    }

    pub fn homogeneous_part(&self, d: usize) -> RingElement {
        let mut out = RingElement::zero(&self.tower);
        out.comps[d] = self.comps[d].clone();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(Zero::is_zero))
    }

    pub fn scale(&self, s: &Coeff) -> RingElement {
        RingElement {
            tower: self.tower.clone(),
            comps: self.comps.iter().map(|c| c.iter().map(|x| x * s).collect()).collect(),
        }
    }

    /// Constant term.
    pub fn constant(&self) -> Coeff {
        self.comps[0][0].clone()
    }

    fn zip(&self, other: &RingElement, f: impl Fn(&Coeff, &Coeff) -> Coeff) -> RingElement {
        assert!(self.tower == other.tower, "classes on different towers");
        RingElement {
            tower: self.tower.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
                .collect(),
        }
    }

    /// Multiplicative inverse of a class with constant term 1.
    pub fn inverse(&self) -> Result<RingElement> {
        if !self.constant().is_one() {
            return Err(Error::TowerAnomaly("inverse of a class with constant term != 1".into()));
        }
        let t = &self.tower;
        let ops: Vec<MulOp> = (0..=t.dim()).map(|i| MulOp::new(t, &self.comps[i], i)).collect();
        let mut out = RingElement::zero(t);
        out.comps[0][0] = int(1);
        for m in 1..=t.dim() {
            let mut acc = vec![int(0); out.comps[m].len()];
            for (i, op) in ops.iter().enumerate().take(m + 1).skip(1) {
                if op.is_zero() {
                    continue;
                }
                let prod = op.apply(t, &out.comps[m - i], m - i).unwrap();
                for (a, p) in acc.iter_mut().zip(prod) {
                    *a -= p;
                }
            }
            out.comps[m] = acc;
        }
        Ok(out)
    }
}

/// Terms in increasing degree; `c<i>_<l>` is `c_i` of the subbundle
/// introduced at level `l` (counting from 1).
impl std::fmt::Display for RingElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<String> = self
            .tower
            .levels()
            .iter()
            .enumerate()
            .flat_map(|(l, info)| (1..=info.sub_rank).map(move |i| format!("c{i}_{}", l + 1)))
            .collect();
        let mut first = true;
        for (d, comp) in self.comps.iter().enumerate() {
            for (c, mono) in comp.iter().zip(&self.tower.0.basis[d]) {
                if c.is_zero() {
                    continue;
                }
                let factors: Vec<String> = mono
                    .iter()
                    .zip(&names)
                    .filter(|(e, _)| **e > 0)
                    .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
                    .collect();
                let mag = c.abs();
                let sign = if c.is_negative() { "-" } else { "+" };
                if first {
                    if c.is_negative() {
                        f.write_str("-")?;
                    }
                } else {
                    write!(f, " {sign} ")?;
                }
                first = false;
                match (factors.is_empty(), mag.is_one()) {
                    (true, _) => write!(f, "{mag}")?,
                    (false, true) => f.write_str(&factors.join("*"))?,
                    (false, false) => write!(f, "{mag}*{}", factors.join("*"))?,
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl std::ops::Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        self.zip(rhs, |a, b| a + b)
    }
}

impl std::ops::Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        self.zip(rhs, |a, b| a - b)
    }
}

impl std::ops::Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        assert!(self.tower == rhs.tower, "classes on different towers");
        let t = &self.tower;
        let mut out = RingElement::zero(t);
        for p in 0..=t.dim() {
            if self.comps[p].iter().all(Zero::is_zero) {
                continue;
            }
            let op = MulOp::new(t, &self.comps[p], p);
            for q in 0..=(t.dim() - p) {
                if rhs.comps[q].iter().all(Zero::is_zero) {
                    continue;
                }
                let prod = op.apply(t, &rhs.comps[q], q).unwrap();
                for (o, v) in out.comps[p + q].iter_mut().zip(prod) {
                    *o += v;
                }
            }
        }
        out
    }
}

/// A (possibly virtual) sheaf on a tower: rank and power sums of Chern roots
/// `p_m = m! ch_m`, with the total Chern class derived on demand.
#[derive(Clone, Debug)]
pub struct Sheaf {
    tower: Tower,
    rank: i64,
    /// `power[m] = (m, p_m)`; `p_0 = rank`.
    power: Vec<(usize, Vec<Coeff>)>,
    chern: OnceLock<RingElement>,
}

impl Sheaf {
    /// Sheaf with the given total Chern class (constant term 1).
    pub fn from_chern(chern: RingElement, rank: i64) -> Sheaf {
        let t = chern.tower.clone();
        let dim = t.dim();
        let ops: Vec<MulOp> = (0..=dim).map(|i| MulOp::new(&t, &chern.comps[i], i)).collect();
        let mut power: Vec<(usize, Vec<Coeff>)> = vec![(0, vec![int(rank)])];
        for m in 1..=dim {
            // p_m = sum_{i<m} (-1)^(i-1) c_i p_{m-i} + (-1)^(m-1) m c_m
            let mut acc: Vec<Coeff> = chern.comps[m].iter().map(|c| c * int(m as i64)).collect();
            if m % 2 == 0 {
                acc.iter_mut().for_each(|a| *a = -a.clone());
            }
            for (i, op) in ops.iter().enumerate().take(m).skip(1) {
                if op.is_zero() {
                    continue;
                }
                let prod = op.apply(&t, &power[m - i].1, m - i).unwrap();
                let neg = i % 2 == 0;
                for (a, p) in acc.iter_mut().zip(prod) {
                    if neg {
                        *a -= p;
                    } else {
                        *a += p;
                    }
                }
            }
            power.push((m, acc));
        }
        let cell = OnceLock::new();
        cell.set(chern).unwrap();
        Sheaf {
            tower: t,
            rank,
            power,
            chern: cell,
        }
    }

    fn from_power_sums(tower: &Tower, rank: i64, power: Vec<(usize, Vec<Coeff>)>) -> Sheaf {
        Sheaf {
            tower: tower.clone(),
            rank,
            power,
            chern: OnceLock::new(),
        }
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn rank(&self) -> i64 {
        self.rank
    }

    /// Total Chern class, recovered from the power sums by Newton's
    /// identities `m c_m = sum_{i=1}^m (-1)^(i-1) c_{m-i} p_i`.
    pub fn chern(&self) -> RingElement {
        self.chern
            .get_or_init(|| {
                let t = &self.tower;
                let ops: Vec<MulOp> = self.power.iter().map(|(d, v)| MulOp::new(t, v, *d)).collect();
                let mut c = RingElement::zero(t);
                c.comps[0][0] = int(1);
                for m in 1..=t.dim() {
                    let mut acc = vec![int(0); c.comps[m].len()];
                    for (i, op) in ops.iter().enumerate().take(m + 1).skip(1) {
                        if op.is_zero() {
                            continue;
                        }
                        let prod = op.apply(t, &c.comps[m - i], m - i).unwrap();
                        let neg = i % 2 == 0;
                        for (a, p) in acc.iter_mut().zip(prod) {
                            if neg {
                                *a -= p;
                            } else {
                                *a += p;
                            }
                        }
                    }
                    let inv = Coeff::new(BigInt::one(), BigInt::from(m));
                    c.comps[m] = acc.into_iter().map(|a| a * &inv).collect();
                }
                c
            })
            .clone()
    }

    /// `ch_m = p_m / m!` for `m = 0..=dim`.
    pub fn chern_character(&self) -> RingElement {
        let mut out = RingElement::zero(&self.tower);
        let mut fact = BigInt::one();
        for (m, v) in &self.power {
            if *m > 0 {
                fact *= *m;
            }
            let inv = Coeff::new(BigInt::one(), fact.clone());
            out.comps[*m] = v.iter().map(|c| c * &inv).collect();
        }
        out
    }

    pub fn from_chern_character(ch: &RingElement) -> Result<Sheaf> {
        let rank = ch.constant();
        if !rank.is_integer() {
            return Err(Error::RankMismatch(format!("non-integral rank {rank}")));
        }
        let mut fact = BigInt::one();
        let mut power = Vec::new();
        for m in 0..=ch.tower.dim() {
            if m > 0 {
                fact *= m;
            }
            let f = Coeff::from_integer(fact.clone());
            power.push((m, ch.comps[m].iter().map(|c| c * &f).collect()));
        }
        let r: i64 = rank.to_integer().try_into().map_err(|_| Error::RankMismatch("rank overflow".into()))?;
        Ok(Sheaf::from_power_sums(&ch.tower, r, power))
    }

    fn check(&self, other: &Sheaf) -> Result<()> {
        if self.tower != other.tower {
            return Err(Error::TowerMismatch);
        }
        Ok(())
    }

    fn map_power(&self, rank: i64, f: impl Fn(usize, &Coeff) -> Coeff) -> Sheaf {
        let power = self
            .power
            .iter()
            .map(|(m, v)| (*m, v.iter().map(|c| f(*m, c)).collect()))
            .collect();
        Sheaf::from_power_sums(&self.tower, rank, power)
    }

    pub fn dual(&self) -> Sheaf {
        self.map_power(self.rank, |m, c| if m % 2 == 1 { -c.clone() } else { c.clone() })
    }

    /// Adams operation: Chern roots scaled by `j`.
    pub fn adams(&self, j: i64) -> Sheaf {
        self.map_power(self.rank, |m, c| c * int(j).pow(m as i32))
    }

    pub fn sum(&self, other: &Sheaf) -> Result<Sheaf> {
        self.check(other)?;
        let power = self
            .power
            .iter()
            .zip(&other.power)
            .map(|((m, a), (_, b))| (*m, a.iter().zip(b).map(|(x, y)| x + y).collect()))
            .collect();
        Ok(Sheaf::from_power_sums(&self.tower, self.rank + other.rank, power))
    }

    pub fn difference(&self, other: &Sheaf) -> Result<Sheaf> {
        self.sum(&other.scale_multiplicity(-1))
    }

    /// `E^(+n)` for `n >= 0`, or the negative virtual class for `n < 0`.
    pub fn scale_multiplicity(&self, n: i64) -> Sheaf {
        self.map_power(self.rank * n, |_, c| c * int(n))
    }

    /// `p_m(E (x) F) = sum_k binom(m, k) p_k(E) p_{m-k}(F)`.
    fn convolve(&self, other: &Sheaf) -> Vec<(usize, Vec<Coeff>)> {
        let t = &self.tower;
        let ops: Vec<MulOp> = self.power.iter().map(|(d, v)| MulOp::new(t, v, *d)).collect();
        (0..=t.dim())
            .map(|m| {
                let mut acc = vec![int(0); t.0.basis[m].len()];
                for (k, op) in ops.iter().enumerate().take(m + 1) {
                    if op.is_zero() {
                        continue;
                    }
                    let b = Coeff::from_integer(binom(m as u64, k as u64));
                    let prod = op.apply(t, &other.power[m - k].1, m - k).unwrap();
                    for (a, p) in acc.iter_mut().zip(prod) {
                        if !p.is_zero() {
                            *a += p * &b;
                        }
                    }
                }
                (m, acc)
            })
            .collect()
    }

    pub fn tensor(&self, other: &Sheaf) -> Result<Sheaf> {
        self.check(other)?;
        Ok(Sheaf::from_power_sums(&self.tower, self.rank * other.rank, self.convolve(other)))
    }

    fn combine_power(parts: &[(&Sheaf, i64)], divisor: i64, rank: i64) -> Sheaf {
        let t = &parts[0].0.tower;
        let div = Coeff::new(BigInt::one(), BigInt::from(divisor));
        let power = (0..=t.dim())
            .map(|m| {
                let mut acc = vec![int(0); t.0.basis[m].len()];
                for (s, w) in parts {
                    let w = int(*w);
                    for (a, p) in acc.iter_mut().zip(&s.power[m].1) {
                        *a += p * &w;
                    }
                }
                (m, acc.into_iter().map(|a| a * &div).collect())
            })
            .collect();
        Sheaf::from_power_sums(t, rank, power)
    }

    /// `ch(Sym^2 E) = (ch(E)^2 + psi^2 ch(E)) / 2`.
    pub fn sym2(&self) -> Sheaf {
        let sq = self.tensor(self).unwrap();
        let r = self.rank;
        Sheaf::combine_power(&[(&sq, 1), (&self.adams(2), 1)], 2, r * (r + 1) / 2)
    }

    /// `ch(wedge^2 E) = (ch(E)^2 - psi^2 ch(E)) / 2`.
    pub fn wedge2(&self) -> Sheaf {
        let sq = self.tensor(self).unwrap();
        let r = self.rank;
        Sheaf::combine_power(&[(&sq, 1), (&self.adams(2), -1)], 2, r * (r - 1) / 2)
    }

    fn cube_terms(&self) -> (Sheaf, Sheaf, Sheaf) {
        let sq = self.tensor(self).unwrap();
        let cube = sq.tensor(self).unwrap();
        let mixed = self.tensor(&self.adams(2)).unwrap();
        (cube, mixed, self.adams(3))
    }

    /// `ch(Sym^3 E) = (ch^3 + 3 ch psi^2 ch + 2 psi^3 ch) / 6`.
    pub fn sym3(&self) -> Sheaf {
        let (cube, mixed, psi3) = self.cube_terms();
        let r = self.rank;
        Sheaf::combine_power(&[(&cube, 1), (&mixed, 3), (&psi3, 2)], 6, r * (r + 1) * (r + 2) / 6)
    }

    /// `ch(wedge^3 E) = (ch^3 - 3 ch psi^2 ch + 2 psi^3 ch) / 6`.
    pub fn wedge3(&self) -> Sheaf {
        let (cube, mixed, psi3) = self.cube_terms();
        let r = self.rank;
        Sheaf::combine_power(&[(&cube, 1), (&mixed, -3), (&psi3, 2)], 6, r * (r - 1) * (r - 2) / 6)
    }

    /// Total Segre class `s(E) = c(E^dual)^{-1}`, so that `s_m(E)` is
    /// `(-1)^m` times the degree-`m` part of `c(E)^{-1}`.
    pub fn segre_class(&self) -> RingElement {
        self.dual().chern().inverse().expect("Chern class has constant term 1")
    }

    /// Degree-`m` Segre class.
    pub fn segre(&self, m: usize) -> Result<RingElement> {
        if m > self.tower.dim() {
            return Err(Error::OutOfRange(format!(
                "Segre degree {m} exceeds tower dimension {}",
                self.tower.dim()
            )));
        }
        Ok(self.segre_class().homogeneous_part(m))
    }
}

/// Reduction data for one fiber monomial on the point Grassmannian:
/// `mu = sum box_coeffs + sum_j lambda_j s_j`.
struct Certificate {
    box_part: Vec<(Mono, Coeff)>,
    lambdas: Vec<(usize, FiberPoly)>,
}

type FiberPoly = Vec<(Mono, Coeff)>;

fn fiber_degree(m: &[u16]) -> usize {
    m.iter().enumerate().map(|(i, &e)| (i + 1) * e as usize).sum()
}

fn is_box(m: &[u16], quot_rank: usize) -> bool {
    m.iter().map(|&e| e as usize).sum::<usize>() <= quot_rank
}

/// Exponent vectors over `e_1..e_a` of weighted degree `q`.
fn fiber_monomials(a: usize, q: usize) -> Vec<Mono> {
    fn rec(i: usize, left: usize, cur: &mut Mono, out: &mut Vec<Mono>) {
        if i == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // i is the 1-based generator index
        for e in (0..=left / i).rev() {
            cur[i - 1] = e as u16;
            rec(i - 1, left - e * i, cur, out);
        }
        cur[i - 1] = 0;
    }
    let mut out = Vec::new();
    rec(a, q, &mut vec![0; a], &mut out);
    out
}

fn fiber_mul(x: &FiberPoly, y: &FiberPoly) -> FiberPoly {
    let mut acc: HashMap<Mono, Coeff> = HashMap::new();
    for (a, ca) in x {
        for (b, cb) in y {
            let m: Mono = a.iter().zip(b).map(|(u, v)| u + v).collect();
            *acc.entry(m).or_insert_with(|| int(0)) += ca * cb;
        }
    }
    let mut out: FiberPoly = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

struct LevelBuilder<'a> {
    base: &'a Tower,
    a: usize,
    b: usize,
    /// `c_t(E)` on the base, by degree.
    ambient: Vec<Vec<Coeff>>,
    dim: usize,
    /// Segre classes `s_j(S)` as fiber polynomials.
    segre: Vec<FiberPoly>,
    certs: HashMap<Mono, Rc<Certificate>>,
    /// `(fiber monomial, base degree, base index)` -> normal form.
    nf_memo: HashMap<(Mono, usize, usize), Rc<Vec<Coeff>>>,
    /// `(base degree, base index, t)` -> basis element times `c_t(E)`.
    base_mul_memo: HashMap<(usize, usize, usize), Rc<Vec<Coeff>>>,
    basis: Vec<Vec<Mono>>,
    index: Vec<HashMap<Mono, usize>>,
}

impl<'a> LevelBuilder<'a> {
    fn new(base: &'a Tower, a: usize, b: usize, ambient: &RingElement) -> Self {
        let dim = base.dim() + a * b;
        let mut segre: Vec<FiberPoly> = vec![vec![(vec![0; a], int(1))]];
        for j in 1..=dim {
            // s_j = -sum_{i=1}^{min(j,a)} e_i s_{j-i}
            let mut acc: HashMap<Mono, Coeff> = HashMap::new();
            for i in 1..=j.min(a) {
                for (m, c) in &segre[j - i] {
                    let mut m2 = m.clone();
                    m2[i - 1] += 1;
                    *acc.entry(m2).or_insert_with(|| int(0)) -= c;
                }
            }
            let mut s: FiberPoly = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            s.sort_by(|x, y| x.0.cmp(&y.0));
            segre.push(s);
        }
        LevelBuilder {
            base,
            a,
            b,
            ambient: ambient.comps.clone(),
            dim,
            segre,
            certs: HashMap::new(),
            nf_memo: HashMap::new(),
            base_mul_memo: HashMap::new(),
            basis: Vec::new(),
            index: Vec::new(),
        }
    }

    fn full_mono(&self, base_mono: &[u16], fiber: &[u16]) -> Mono {
        base_mono.iter().chain(fiber).copied().collect()
    }

    fn build_basis(&mut self) {
        let boxes: Vec<Vec<Mono>> = (0..=self.a * self.b)
            .map(|q| fiber_monomials(self.a, q).into_iter().filter(|m| is_box(m, self.b)).collect())
            .collect();
        for d in 0..=self.dim {
            let mut basis = Vec::new();
            for p in 0..=d.min(self.base.dim()) {
                let q = d - p;
                if q >= boxes.len() {
                    continue;
                }
                for bm in &self.base.0.basis[p] {
                    for f in &boxes[q] {
                        basis.push(self.full_mono(bm, f));
                    }
                }
            }
            self.index.push(basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect());
            self.basis.push(basis);
        }
    }

    /// Certificates for all non-box fiber monomials of fiber degree `q`.
    fn certify_degree(&mut self, q: usize) -> Result<()> {
        let monos = fiber_monomials(self.a, q);
        let (non_box, boxed): (Vec<Mono>, Vec<Mono>) = monos.into_iter().partition(|m| !is_box(m, self.b));
        if non_box.is_empty() {
            return Ok(());
        }
        let cols: Vec<Mono> = non_box.iter().chain(&boxed).cloned().collect();
        let col_index: HashMap<&Mono, usize> = cols.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let n = self.a + self.b;
        let mut provenance: Vec<(usize, Mono)> = Vec::new();
        for j in (self.b + 1)..=n.min(q) {
            for nu in fiber_monomials(self.a, q - j) {
                provenance.push((j, nu));
            }
        }
        let nrows = provenance.len();
        let ncols = cols.len() + nrows;
        let rows: Vec<Vec<Coeff>> = provenance
            .iter()
            .enumerate()
            .map(|(r, (j, nu))| {
                let mut row = vec![int(0); ncols];
                for (m, c) in &self.segre[*j] {
                    let full: Mono = m.iter().zip(nu).map(|(x, y)| x + y).collect();
                    row[col_index[&full]] += c;
                }
                row[cols.len() + r] = int(1);
                row
            })
            .collect();
        let red = linalg::rref(rows, ncols);
        for (k, mu) in non_box.iter().enumerate() {
            let Some(r) = red.pivots.iter().position(|&p| p == k) else {
                return Err(Error::TowerAnomaly(format!("fiber monomial {mu:?} is not reducible")));
            };
            let row = &red.rows[r];
            if row[..non_box.len()].iter().enumerate().any(|(c, v)| c != k && !v.is_zero()) {
                return Err(Error::TowerAnomaly("non-box monomials are dependent modulo box".into()));
            }
            // mu + sum_box row[k] k = sum_i T_i nu_i s_{j_i}
            let box_part = boxed
                .iter()
                .enumerate()
                .filter(|(i, _)| !row[non_box.len() + i].is_zero())
                .map(|(i, m)| (m.clone(), -row[non_box.len() + i].clone()))
                .collect();
            let mut lambdas: HashMap<usize, FiberPoly> = HashMap::new();
            for (i, (j, nu)) in provenance.iter().enumerate() {
                let t = &row[cols.len() + i];
                if !t.is_zero() {
                    lambdas.entry(*j).or_default().push((nu.clone(), t.clone()));
                }
            }
            let mut lambdas: Vec<(usize, FiberPoly)> = lambdas.into_iter().collect();
            lambdas.sort_by_key(|(j, _)| *j);
            self.certs.insert(mu.clone(), Rc::new(Certificate { box_part, lambdas }));
        }
        // pivots in box columns would mean the box monomials are dependent
        if red.pivots.iter().any(|&p| p >= non_box.len() && p < cols.len()) {
            return Err(Error::TowerAnomaly("box monomials are dependent".into()));
        }
        Ok(())
    }

    fn base_times_ambient(&mut self, p: usize, i: usize, t: usize) -> Rc<Vec<Coeff>> {
        if let Some(v) = self.base_mul_memo.get(&(p, i, t)) {
            return v.clone();
        }
        let base = self.base;
        // multiply c_t(E) by the basis monomial (p, i) one generator at a time
        let mut chain = Vec::new();
        let (mut d, mut k) = (p, i);
        while let Some((g, parent)) = base.0.trie[d][k] {
            chain.push(g);
            d -= base.0.gen_degrees[g];
            k = parent;
        }
        let mut v = self.ambient[t].clone();
        let mut deg = t;
        for g in chain.into_iter().rev() {
            v = base.apply_gen(g, &v, deg);
            deg += base.0.gen_degrees[g];
        }
        let v = Rc::new(v);
        self.base_mul_memo.insert((p, i, t), v.clone());
        v
    }

    /// Normal form of `base basis (p, i) * fiber monomial mu`.
    fn normal_form(&mut self, mu: &Mono, p: usize, i: usize) -> Rc<Vec<Coeff>> {
        let q = fiber_degree(mu);
        let d = p + q;
        if d > self.dim {
            return Rc::new(Vec::new());
        }
        let key = (mu.clone(), p, i);
        if let Some(v) = self.nf_memo.get(&key) {
            return v.clone();
        }
        let mut out = vec![int(0); self.basis[d].len()];
        let base_mono = self.base.0.basis[p][i].clone();
        if is_box(mu, self.b) {
            out[self.index[d][&self.full_mono(&base_mono, mu)]] = int(1);
        } else {
            let cert = self.certs[mu].clone();
            for (bm, c) in &cert.box_part {
                out[self.index[d][&self.full_mono(&base_mono, bm)]] += c;
            }
            for (j, lambda) in &cert.lambdas {
                for t in 1..=(*j).min(self.base.dim() - p) {
                    if self.ambient[t].iter().all(Zero::is_zero) {
                        continue;
                    }
                    let w = self.base_times_ambient(p, i, t);
                    if w.iter().all(Zero::is_zero) {
                        continue;
                    }
                    let poly = fiber_mul(lambda, &self.segre[j - t]);
                    for (nu, a) in &poly {
                        for (gamma, wg) in w.iter().enumerate() {
                            if wg.is_zero() {
                                continue;
                            }
                            let sub = self.normal_form(nu, p + t, gamma);
                            let coef = a * wg;
                            for (o, s) in out.iter_mut().zip(sub.iter()) {
                                if !s.is_zero() {
                                    *o -= &coef * s;
                                }
                            }
                        }
                    }
                }
            }
        }
        let out = Rc::new(out);
        self.nf_memo.insert(key, out.clone());
        out
    }

    fn build(mut self) -> Result<TowerData> {
        self.build_basis();
        for q in 0..=self.dim {
            self.certify_degree(q)?;
        }
        let base = self.base;
        let nbase = base.num_generators();
        let mut gen_degrees = base.0.gen_degrees.clone();
        gen_degrees.extend(1..=self.a);
        let ngens = gen_degrees.len();

        // where each basis element comes from: (base degree, base index, fiber mono)
        let mut origin: Vec<Vec<(usize, usize, Mono)>> = Vec::new();
        for d in 0..=self.dim {
            let row = self.basis[d]
                .iter()
                .map(|m| {
                    let (bm, f) = m.split_at(nbase);
                    let p = d - fiber_degree(f);
                    (p, base.0.index[p][bm], f.to_vec())
                })
                .collect();
            origin.push(row);
        }

        let mut table = vec![Vec::with_capacity(self.dim + 1); ngens];
        for (g, gt) in table.iter_mut().enumerate() {
            let dg = gen_degrees[g];
            for d in 0..=self.dim {
                let mut row: Vec<Sparse> = Vec::with_capacity(self.basis[d].len());
                for (p, bi, f) in origin[d].clone() {
                    if d + dg > self.dim {
                        row.push(Vec::new());
                        continue;
                    }
                    let sparse: Sparse = if g < nbase {
                        if p + dg > base.dim() {
                            // the product lies above the base dimension, so it vanishes
                            Vec::new()
                        } else {
                            base.0.table[g][p][bi]
                                .iter()
                                .map(|(j, c)| {
                                    let m = self.full_mono(&base.0.basis[p + dg][*j], &f);
                                    (self.index[d + dg][&m], c.clone())
                                })
                                .collect()
                        }
                    } else {
                        let mut mu = f.clone();
                        mu[g - nbase] += 1;
                        let nf = self.normal_form(&mu, p, bi);
                        nf.iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(j, c)| (j, c.clone()))
                            .collect()
                    };
                    row.push(sparse);
                }
                gt.push(row);
            }
        }

        let mut trie = Vec::with_capacity(self.dim + 1);
        for d in 0..=self.dim {
            let mut row = Vec::with_capacity(self.basis[d].len());
            for m in &self.basis[d] {
                match (0..ngens).rev().find(|&g| m[g] > 0) {
                    None => row.push(None),
                    Some(g) => {
                        let mut pm = m.clone();
                        pm[g] -= 1;
                        let pd = d - gen_degrees[g];
                        let pi = *self.index[pd]
                            .get(&pm)
                            .ok_or_else(|| Error::TowerAnomaly("basis is not closed under division".into()))?;
                        row.push(Some((g, pi)));
                    }
                }
            }
            trie.push(row);
        }

        if self.basis[self.dim].len() != 1 {
            return Err(Error::TowerAnomaly(format!(
                "top graded piece has rank {}",
                self.basis[self.dim].len()
            )));
        }
        let mut levels = base.0.levels.clone();
        levels.push(LevelInfo {
            sub_rank: self.a,
            quot_rank: self.b,
            gen_offset: nbase,
        });
        let chi = &base.0.euler_characteristic * binom((self.a + self.b) as u64, self.a as u64);
        Ok(TowerData {
            parent: Some(base.clone()),
            levels,
            gen_degrees,
            dim: self.dim,
            basis: self.basis,
            index: self.index,
            table,
            trie,
            euler_characteristic: chi,
            euler_top: OnceLock::new(),
        })
    }
}

/// Integral of a class that must be an integer.
pub fn integral_integer(tower: &Tower, x: &RingElement) -> Result<BigInt> {
    let v = tower.integral(x)?;
    if !v.is_integer() {
        return Err(Error::NonIntegral(v.to_string()));
    }
    Ok(v.to_integer())
}

/// Sign helper used by tests and callers that want `|x|`.
pub fn abs_integer(x: &BigInt) -> BigInt {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grassmannian(a: usize, n: usize) -> (Tower, Sheaf, Sheaf) {
        let pt = Tower::point();
        pt.flag_bundle(a, n - a, &pt.trivial(n)).unwrap()
    }

    fn power(x: &RingElement, k: usize) -> RingElement {
        (0..k).fold(x.tower().one(), |acc, _| &acc * x)
    }

    fn c1(s: &Sheaf) -> RingElement {
        s.chern().homogeneous_part(1)
    }

    #[test]
    fn projective_space() {
        for n in 1..6 {
            let (t, _, q) = grassmannian(1, n + 1);
            assert_eq!(t.betti_numbers(), vec![1; n + 1]);
            let h = c1(&q);
            assert_eq!(t.integral(&power(&h, n)).unwrap(), int(1));
            assert_eq!(t.euler_characteristic(), &BigInt::from(n + 1));
        }
    }

    #[test]
    fn grassmannian_g24() {
        let (t, s, q) = grassmannian(2, 4);
        assert_eq!(t.betti_numbers(), vec![1, 1, 2, 1, 1]);
        assert_eq!(t.integral(&power(&c1(&q), 4)).unwrap(), int(2));
        let whitney = &s.chern() * &q.chern();
        assert_eq!(whitney, t.one());
        // sigma_2 squared and sigma_11 squared are both the point
        let c2q = q.chern().homogeneous_part(2);
        assert_eq!(t.integral(&(&c2q * &c2q)).unwrap(), int(1));
        let c2s = s.chern().homogeneous_part(2);
        assert_eq!(t.integral(&(&c2s * &c2s)).unwrap(), int(1));
        assert_eq!(t.integral(&(&c2s * &c2q)).unwrap(), int(0));
    }

    #[test]
    fn segre_inverts_chern() {
        let (t, s, q) = grassmannian(2, 5);
        let e = s.sym2().tensor(&q).unwrap();
        assert_eq!(&e.dual().chern() * &e.segre_class(), t.one());
        let inv = e.chern().inverse().unwrap();
        for m in 0..=t.dim() {
            let sign = if m % 2 == 0 { int(1) } else { int(-1) };
            assert_eq!(e.segre(m).unwrap(), inv.homogeneous_part(m).scale(&sign));
        }
    }

    #[test]
    fn chern_roundtrip_through_character() {
        let (_, s, q) = grassmannian(2, 5);
        let e = s.dual().tensor(&q).unwrap();
        let back = Sheaf::from_chern_character(&e.chern_character()).unwrap();
        let fresh = Sheaf::from_chern(e.chern(), e.rank());
        assert_eq!(back.chern(), fresh.chern());
        assert_eq!(fresh.chern_character(), e.chern_character());
    }

    #[test]
    fn relative_flag_euler_characteristic() {
        let pt = Tower::point();
        let (t1, _, q) = pt.flag_bundle(2, 4, &pt.trivial(6)).unwrap();
        let (t2, _, _) = t1.flag_bundle(1, 3, &q).unwrap();
        assert_eq!(t2.euler_characteristic(), &BigInt::from(60));
        assert_eq!(t2.betti_numbers().iter().sum::<usize>(), 60);
        assert_eq!(t2.dim(), 11);
    }

    #[test]
    fn rank_mismatch_rejected() {
        let pt = Tower::point();
        assert!(pt.flag_bundle(2, 2, &pt.trivial(5)).is_err());
        assert!(pt.flag_bundle(0, 3, &pt.trivial(3)).is_err());
    }
}
