//! Coefficient rings for the universal algebra: polynomials in `eps_1, .., eps_nu`,
//! the localization at the linear factors `(1 - m eps_j)`, and truncated power series.
//!
//! Denominators are kept as a multiset of linear factors and never expanded, so a
//! pole at `eps_j = 1/n_j` is just the presence of the factor `(j, n_j)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{serde_rational, Rational};
use crate::coset::Margins;
use crate::error::{Error, Result};

type Monomial = Vec<u32>;

/// Sparse polynomial with rational coefficients in `nu` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpsPolynomial {
    nu: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl EpsPolynomial {
    pub fn zero(nu: usize) -> Self {
        EpsPolynomial {
            nu,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nu: usize, q: Rational) -> Self {
        Self::monomial(nu, vec![0; nu], q)
    }

    pub fn one(nu: usize) -> Self {
        Self::constant(nu, Rational::one())
    }

    pub fn monomial(nu: usize, deg: Monomial, q: Rational) -> Self {
        assert_eq!(deg.len(), nu);
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(deg, q);
        }
        EpsPolynomial { nu, terms }
    }

    /// `eps_j^k`.
    pub fn var_power(nu: usize, j: usize, k: u32) -> Self {
        let mut deg = vec![0; nu];
        deg[j] = k;
        Self::monomial(nu, deg, Rational::one())
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, deg: &[u32]) -> Rational {
        self.terms.get(deg).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|d| d.iter().sum()).max()
    }

    fn push(&mut self, deg: Monomial, q: Rational) {
        if q.is_zero() {
            return;
        }
        match self.terms.entry(deg) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(q);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += q;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.nu);
        }
        EpsPolynomial {
            nu: self.nu,
            terms: self.terms.iter().map(|(d, q)| (d.clone(), q * s)).collect(),
        }
    }

    /// Multiplies by `(1 - m eps_j)`.
    pub fn mul_linear(&self, j: usize, m: u32) -> Self {
        let mut out = self.clone();
        if m == 0 {
            return out;
        }
        let mq = Rational::from_integer(BigInt::from(m));
        for (d, q) in &self.terms {
            let mut d2 = d.clone();
            d2[j] += 1;
            out.push(d2, -(q * &mq));
        }
        out
    }

    /// Exact quotient by `(1 - m eps_j)`, if it divides.
    pub fn div_linear(&self, j: usize, m: u32) -> Option<Self> {
        if m == 0 {
            return Some(self.clone());
        }
        // group by the power of eps_j: p = sum_k p_k eps_j^k
        let mut slices: BTreeMap<u32, Vec<(Monomial, Rational)>> = BTreeMap::new();
        for (d, q) in &self.terms {
            let mut rest = d.clone();
            let k = rest[j];
            rest[j] = 0;
            slices.entry(k).or_default().push((rest, q.clone()));
        }
        let top = match slices.keys().next_back() {
            Some(&k) => k,
            None => return Some(self.clone()),
        };
        if top == 0 {
            return None;
        }
        let mq = Rational::from_integer(BigInt::from(m));
        // q_k = p_k + m q_{k-1}; remainder p_top + m q_{top-1} must vanish
        let mut quotient = EpsPolynomial::zero(self.nu);
        let mut prev = EpsPolynomial::zero(self.nu);
        for k in 0..=top {
            let mut cur = prev.scale(&mq);
            if let Some(slice) = slices.get(&k) {
                for (rest, q) in slice {
                    cur.push(rest.clone(), q.clone());
                }
            }
            if k == top {
                if !cur.is_zero() {
                    return None;
                }
            } else {
                for (rest, q) in &cur.terms {
                    let mut d = rest.clone();
                    d[j] = k;
                    quotient.push(d, q.clone());
                }
                prev = cur;
            }
        }
        Some(quotient)
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nu);
        let mut acc = Rational::zero();
        for (d, q) in &self.terms {
            let mut t = q.clone();
            for (x, &k) in point.iter().zip(d) {
                for _ in 0..k {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Drops monomials of total degree above `d`.
    pub fn truncate(&self, d: u32) -> Self {
        EpsPolynomial {
            nu: self.nu,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.iter().sum::<u32>() <= d)
                .map(|(k, q)| (k.clone(), q.clone()))
                .collect(),
        }
    }
}

impl Add for &EpsPolynomial {
    type Output = EpsPolynomial;
    fn add(self, rhs: &EpsPolynomial) -> EpsPolynomial {
        assert_eq!(self.nu, rhs.nu);
        let mut out = self.clone();
        for (d, q) in &rhs.terms {
            out.push(d.clone(), q.clone());
        }
        out
    }
}

impl Sub for &EpsPolynomial {
    type Output = EpsPolynomial;
    fn sub(self, rhs: &EpsPolynomial) -> EpsPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &EpsPolynomial {
    type Output = EpsPolynomial;
    fn neg(self) -> EpsPolynomial {
        self.scale(&-Rational::one())
    }
}

impl Mul for &EpsPolynomial {
    type Output = EpsPolynomial;
    fn mul(self, rhs: &EpsPolynomial) -> EpsPolynomial {
        assert_eq!(self.nu, rhs.nu);
        let mut out = EpsPolynomial::zero(self.nu);
        for (d1, q1) in &self.terms {
            for (d2, q2) in &rhs.terms {
                let d: Monomial = d1.iter().zip(d2).map(|(x, y)| x + y).collect();
                out.push(d, q1 * q2);
            }
        }
        out
    }
}

impl fmt::Display for EpsPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(d, q)| {
                let mono: Vec<String> = d
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(j, &k)| {
                        if k == 1 {
                            format!("e{}", j + 1)
                        } else {
                            format!("e{}^{}", j + 1, k)
                        }
                    })
                    .collect();
                if mono.is_empty() {
                    format!("{q}")
                } else {
                    format!("({q})*{}", mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `((p, q; eps_j)) = prod_{m=p}^{q-1} (1 - m eps_j)`; equal to one when `p = q`.
pub fn bracket(nu: usize, p: u32, q: u32, j: usize) -> Result<EpsPolynomial> {
    if p > q {
        return Err(Error::InvalidBracket { p, q });
    }
    let mut out = EpsPolynomial::one(nu);
    for m in p..q {
        out = out.mul_linear(j, m);
    }
    Ok(out)
}

/// Element of `Q[eps_j, (1 - m eps_j)^-1]`: a polynomial over a product of linear factors.
///
/// Canonical form: no denominator factor divides the numerator, and zero has an
/// empty denominator. Canonical forms are unique, but equality is still decided
/// by cross multiplication.
#[derive(Debug, Clone)]
pub struct EpsRingElement {
    num: EpsPolynomial,
    /// `(j, m) -> multiplicity` of the factor `(1 - m eps_j)`, `m >= 1`.
    den: BTreeMap<(usize, u32), u32>,
}

impl EpsRingElement {
    pub fn zero(nu: usize) -> Self {
        Self::from_poly(EpsPolynomial::zero(nu))
    }

    pub fn one(nu: usize) -> Self {
        Self::from_poly(EpsPolynomial::one(nu))
    }

    pub fn constant(nu: usize, q: Rational) -> Self {
        Self::from_poly(EpsPolynomial::constant(nu, q))
    }

    pub fn from_poly(num: EpsPolynomial) -> Self {
        EpsRingElement {
            num,
            den: BTreeMap::new(),
        }
    }

    /// `num / prod (1 - m eps_j)^mult`, reduced.
    pub fn new(num: EpsPolynomial, factors: &[(usize, u32)]) -> Self {
        let mut den = BTreeMap::new();
        for &(j, m) in factors {
            assert!(j < num.nu());
            if m > 0 {
                *den.entry((j, m)).or_insert(0) += 1;
            }
        }
        let mut out = EpsRingElement { num, den };
        out.reduce();
        out
    }

    pub fn nu(&self) -> usize {
        self.num.nu()
    }

    pub fn numerator(&self) -> &EpsPolynomial {
        &self.num
    }

    pub fn denominator(&self) -> &BTreeMap<(usize, u32), u32> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let keys: Vec<(usize, u32)> = self.den.keys().copied().collect();
        for key in keys {
            while self.den.get(&key).copied().unwrap_or(0) > 0 {
                match self.num.div_linear(key.0, key.1) {
                    Some(q) => {
                        self.num = q;
                        let mult = self.den.get_mut(&key).unwrap();
                        *mult -= 1;
                        if *mult == 0 {
                            self.den.remove(&key);
                        }
                    }
                    None => break,
                }
            }
        }
    }

    fn with_denominator(&self, target: &BTreeMap<(usize, u32), u32>) -> EpsPolynomial {
        let mut num = self.num.clone();
        for (&(j, m), &mult) in target {
            let have = self.den.get(&(j, m)).copied().unwrap_or(0);
            for _ in have..mult {
                num = num.mul_linear(j, m);
            }
        }
        num
    }

    fn common_denominator(&self, other: &Self) -> BTreeMap<(usize, u32), u32> {
        let mut den = self.den.clone();
        for (&k, &mult) in &other.den {
            let e = den.entry(k).or_insert(0);
            *e = (*e).max(mult);
        }
        den
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = EpsRingElement {
            num: self.num.scale(s),
            den: self.den.clone(),
        };
        if out.num.is_zero() {
            out.den.clear();
        }
        out
    }

    /// Division by `(1 - m eps_j)`.
    pub fn div_by_factor(&self, j: usize, m: u32) -> Self {
        let mut out = self.clone();
        if m > 0 && !out.num.is_zero() {
            *out.den.entry((j, m)).or_insert(0) += 1;
            out.reduce();
        }
        out
    }

    /// Division by `((p, q; eps_j))`.
    pub fn div_by_bracket(&self, p: u32, q: u32, j: usize) -> Result<Self> {
        if p > q {
            return Err(Error::InvalidBracket { p, q });
        }
        let mut out = self.clone();
        for m in p.max(1)..q {
            if !out.num.is_zero() {
                *out.den.entry((j, m)).or_insert(0) += 1;
            }
        }
        out.reduce();
        Ok(out)
    }

    /// Division by a nonzero rational.
    pub fn div_by_rational(&self, q: &Rational) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::NonUnitDivision);
        }
        Ok(self.scale(&(Rational::one() / q)))
    }

    /// Cross-multiplied comparison.
    pub fn equals(&self, other: &Self) -> bool {
        let common = self.common_denominator(other);
        self.with_denominator(&common) == other.with_denominator(&common)
    }

    /// Evaluation at an arbitrary rational point.
    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        assert_eq!(point.len(), self.nu());
        let mut den = Rational::one();
        for (&(j, m), &mult) in &self.den {
            let f = Rational::one() - Rational::from_integer(BigInt::from(m)) * &point[j];
            if f.is_zero() {
                return Err(Error::PoleAtSpecialization { j, m });
            }
            for _ in 0..mult {
                den *= &f;
            }
        }
        Ok(self.num.eval(point) / den)
    }

    /// Value at `eps_j = 1/n_j`.
    pub fn specialize(&self, margins: &Margins) -> Result<Rational> {
        if margins.nu() != self.nu() {
            return Err(Error::RankMismatch(self.nu(), margins.nu()));
        }
        for &(j, m) in self.den.keys() {
            if m == margins.size(j) {
                return Err(Error::PoleAtSpecialization { j, m });
            }
        }
        let point: Vec<Rational> = margins
            .sizes()
            .iter()
            .map(|&n| Rational::new(BigInt::one(), BigInt::from(n)))
            .collect();
        self.evaluate(&point)
    }

    /// Power-series expansion up to total degree `d`.
    pub fn expand(&self, d: u32) -> EpsSeries {
        let mut out = EpsSeries::from_poly(&self.num, d);
        for (&(j, m), &mult) in &self.den {
            let inv = EpsSeries::inverse_linear(self.nu(), j, m, d);
            for _ in 0..mult {
                out = &out * &inv;
            }
        }
        out
    }
}

impl PartialEq for EpsRingElement {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl Eq for EpsRingElement {}

impl Add for &EpsRingElement {
    type Output = EpsRingElement;
    fn add(self, rhs: &EpsRingElement) -> EpsRingElement {
        assert_eq!(self.nu(), rhs.nu());
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let den = self.common_denominator(rhs);
        let num = &self.with_denominator(&den) + &rhs.with_denominator(&den);
        let mut out = EpsRingElement { num, den };
        out.reduce();
        out
    }
}

impl Sub for &EpsRingElement {
    type Output = EpsRingElement;
    fn sub(self, rhs: &EpsRingElement) -> EpsRingElement {
        self + &(-rhs)
    }
}

impl Neg for &EpsRingElement {
    type Output = EpsRingElement;
    fn neg(self) -> EpsRingElement {
        self.scale(&-Rational::one())
    }
}

impl Mul for &EpsRingElement {
    type Output = EpsRingElement;
    fn mul(self, rhs: &EpsRingElement) -> EpsRingElement {
        assert_eq!(self.nu(), rhs.nu());
        let num = &self.num * &rhs.num;
        if num.is_zero() {
            return EpsRingElement::zero(self.nu());
        }
        let mut den = self.den.clone();
        for (&k, &mult) in &rhs.den {
            *den.entry(k).or_insert(0) += mult;
        }
        let mut out = EpsRingElement { num, den };
        out.reduce();
        out
    }
}

impl fmt::Display for EpsRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let den: Vec<String> = self
            .den
            .iter()
            .map(|(&(j, m), &k)| {
                if k == 1 {
                    format!("(1-{m}e{})", j + 1)
                } else {
                    format!("(1-{m}e{})^{k}", j + 1)
                }
            })
            .collect();
        write!(f, "[{}] / [{}]", self.num, den.join("*"))
    }
}

#[derive(Serialize, Deserialize)]
struct NumTermJson {
    deg: Vec<u32>,
    #[serde(with = "serde_rational")]
    coeff: Rational,
}

#[derive(Serialize, Deserialize)]
struct DenJson {
    j: usize,
    m: u32,
    mult: u32,
}

#[derive(Serialize, Deserialize)]
struct RingJson {
    num: Vec<NumTermJson>,
    den: Vec<DenJson>,
}

impl Serialize for EpsRingElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RingJson {
            num: self
                .num
                .terms
                .iter()
                .map(|(d, q)| NumTermJson {
                    deg: d.clone(),
                    coeff: q.clone(),
                })
                .collect(),
            den: self
                .den
                .iter()
                .map(|(&(j, m), &mult)| DenJson { j: j + 1, m, mult })
                .collect(),
        }
        .serialize(s)
    }
}

impl EpsRingElement {
    /// Parses the JSON form; `nu` is needed for the zero element, whose numerator lists no degrees.
    pub fn from_json(value: &serde_json::Value, nu: usize) -> Result<Self> {
        let raw: RingJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        ring_from_json(raw, Some(nu))
    }
}

fn ring_from_json(raw: RingJson, nu: Option<usize>) -> Result<EpsRingElement> {
    let nu = match nu.or_else(|| raw.num.first().map(|t| t.deg.len())) {
        Some(nu) => nu,
        None => {
            return Err(Error::Parse(
                "cannot infer nu from an empty numerator".into(),
            ))
        }
    };
    let mut num = EpsPolynomial::zero(nu);
    for t in raw.num {
        if t.deg.len() != nu {
            return Err(Error::Parse("degree vector has the wrong length".into()));
        }
        num.push(t.deg, t.coeff);
    }
    let mut factors = Vec::new();
    for d in raw.den {
        if d.j == 0 || d.j > nu || d.m == 0 {
            return Err(Error::Parse(format!(
                "bad denominator factor j={} m={}",
                d.j, d.m
            )));
        }
        factors.extend(std::iter::repeat_n((d.j - 1, d.m), d.mult as usize));
    }
    Ok(EpsRingElement::new(num, &factors))
}

impl<'de> Deserialize<'de> for EpsRingElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RingJson::deserialize(d)?;
        ring_from_json(raw, None).map_err(serde::de::Error::custom)
    }
}

/// Power series in `eps_1, .., eps_nu` known up to total degree `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsSeries {
    order: u32,
    poly: EpsPolynomial,
}

impl EpsSeries {
    pub fn zero(nu: usize, order: u32) -> Self {
        EpsSeries {
            order,
            poly: EpsPolynomial::zero(nu),
        }
    }

    pub fn from_poly(p: &EpsPolynomial, order: u32) -> Self {
        EpsSeries {
            order,
            poly: p.truncate(order),
        }
    }

    /// `1 / (1 - m eps_j) = sum_k m^k eps_j^k`.
    pub fn inverse_linear(nu: usize, j: usize, m: u32, order: u32) -> Self {
        let mut poly = EpsPolynomial::zero(nu);
        let mut power = Rational::one();
        let mq = Rational::from_integer(BigInt::from(m));
        for k in 0..=order {
            let mut deg = vec![0; nu];
            deg[j] = k;
            poly.push(deg, power.clone());
            power *= &mq;
        }
        EpsSeries { order, poly }
    }

    pub fn nu(&self) -> usize {
        self.poly.nu()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coefficients(&self) -> &BTreeMap<Monomial, Rational> {
        self.poly.terms()
    }

    pub fn coefficient(&self, deg: &[u32]) -> Rational {
        self.poly.coefficient(deg)
    }

    pub fn constant_term(&self) -> Rational {
        self.poly.coefficient(&vec![0; self.nu()])
    }

    /// Coefficient of `eps_j` alone.
    pub fn linear_coefficient(&self, j: usize) -> Rational {
        let mut deg = vec![0; self.nu()];
        deg[j] = 1;
        self.poly.coefficient(&deg)
    }

    /// Coefficients after setting every `eps_j` to one common `eps`, indexed by degree.
    pub fn diagonal(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.order as usize + 1];
        for (d, q) in self.poly.terms() {
            out[d.iter().sum::<u32>() as usize] += q;
        }
        out
    }

    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        EpsSeries {
            order,
            poly: self.poly.truncate(order),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        EpsSeries {
            order: self.order,
            poly: self.poly.scale(s),
        }
    }
}

impl Add for &EpsSeries {
    type Output = EpsSeries;
    fn add(self, rhs: &EpsSeries) -> EpsSeries {
        let order = self.order.min(rhs.order);
        EpsSeries {
            order,
            poly: (&self.poly + &rhs.poly).truncate(order),
        }
    }
}

impl Sub for &EpsSeries {
    type Output = EpsSeries;
    fn sub(self, rhs: &EpsSeries) -> EpsSeries {
        let order = self.order.min(rhs.order);
        EpsSeries {
            order,
            poly: (&self.poly - &rhs.poly).truncate(order),
        }
    }
}

impl Mul for &EpsSeries {
    type Output = EpsSeries;
    fn mul(self, rhs: &EpsSeries) -> EpsSeries {
        assert_eq!(self.nu(), rhs.nu());
        let order = self.order.min(rhs.order);
        let mut out = EpsPolynomial::zero(self.nu());
        for (d1, q1) in self.poly.terms() {
            let t1: u32 = d1.iter().sum();
            for (d2, q2) in rhs.poly.terms() {
                if t1 + d2.iter().sum::<u32>() > order {
                    continue;
                }
                let d: Monomial = d1.iter().zip(d2).map(|(x, y)| x + y).collect();
                out.push(d, q1 * q2);
            }
        }
        EpsSeries { order, poly: out }
    }
}
