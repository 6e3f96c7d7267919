//! The universal algebra: basis indexed by balanced off-diagonal types, structure
//! constants in `Q[eps_j, (1 - m eps_j)^-1]`, and specialization at `eps_j = 1/n_j`.
//!
//! A tensor `t_ijk` (all triples except `i = j = k`) is split by its middle index.
//! For fixed `j` the entries with `i != j` and `k != j` form a free block whose
//! row sums are at most `a_ij` and column sums at most `b_jk`; the remaining
//! entries of the slice are then forced:
//!
//! ```text
//! t_ijj = a_ij - (row i of block j),   t_jjk = b_jk - (column k of block j)
//! ```
//!
//! With this parametrization the first two equalities defining `t*_jjj` hold
//! identically, `t*_jjj = a*_jj + b*_jj - |block j|`, and the last one is
//! equivalent to the output `c` being balanced.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{factorial, Rational};
use crate::coset::{Margins, OffDiagonalType};
use crate::eps::{bracket, EpsPolynomial, EpsRingElement, EpsSeries};
use crate::error::{Error, Result};
use crate::tables::for_each_bounded_table;

/// A member of the constrained tensor set for a fixed `(a, b, c)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstrainedTripleTensor {
    nu: usize,
    /// `nu^3` entries indexed `(i * nu + j) * nu + k`; the `i = j = k` slots stay zero.
    entries: Vec<u32>,
    stars: Vec<u32>,
}

impl ConstrainedTripleTensor {
    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> u32 {
        self.entries[(i * self.nu + j) * self.nu + k]
    }

    /// `t*_jjj`.
    pub fn star(&self, j: usize) -> u32 {
        self.stars[j]
    }

    pub fn stars(&self) -> &[u32] {
        &self.stars
    }

    /// `sum_{i != j, k != j} t_ijk`, the power of `eps_j` carried by this tensor.
    pub fn block_total(&self, j: usize) -> u32 {
        let nu = self.nu;
        let mut s = 0;
        for i in (0..nu).filter(|&i| i != j) {
            for k in (0..nu).filter(|&k| k != j) {
                s += self.get(i, j, k);
            }
        }
        s
    }

    fn inv_factorial_weight(&self) -> Rational {
        let den: BigInt = self.entries.iter().map(|&x| factorial(x)).product();
        Rational::new(BigInt::one(), den)
    }
}

/// One middle-index slice: the free block plus its forced border.
#[derive(Clone)]
struct Slice {
    /// Contribution to the off-diagonal output `c`, row-major `nu x nu`.
    c: Vec<u32>,
    /// `1 / prod t!` over the slice.
    weight: Rational,
    block_total: u32,
    /// Entries `t_(i, j, k)` of the slice, `nu x nu` over `(i, k)`.
    raw: Vec<u32>,
}

fn slices(a: &OffDiagonalType, b: &OffDiagonalType, j: usize, total_cap: u32) -> Vec<Slice> {
    let nu = a.nu();
    let others: Vec<usize> = (0..nu).filter(|&x| x != j).collect();
    let row_caps: Vec<u32> = others.iter().map(|&i| a.get(i, j)).collect();
    let col_caps: Vec<u32> = others.iter().map(|&k| b.get(j, k)).collect();
    let m = others.len();
    let mut out = Vec::new();
    for_each_bounded_table(&row_caps, &col_caps, total_cap, |block| {
        let mut raw = vec![0u32; nu * nu];
        for (r, &i) in others.iter().enumerate() {
            for (s, &k) in others.iter().enumerate() {
                raw[i * nu + k] = block[r * m + s];
            }
        }
        for (r, &i) in others.iter().enumerate() {
            let row: u32 = block[r * m..(r + 1) * m].iter().sum();
            raw[i * nu + j] = a.get(i, j) - row;
        }
        for (s, &k) in others.iter().enumerate() {
            let col: u32 = (0..m).map(|r| block[r * m + s]).sum();
            raw[j * nu + k] = b.get(j, k) - col;
        }
        let mut c = raw.clone();
        for x in 0..nu {
            c[x * nu + x] = 0;
        }
        let den: BigInt = raw.iter().map(|&x| factorial(x)).product();
        out.push(Slice {
            c,
            weight: Rational::new(BigInt::one(), den),
            block_total: block.iter().sum(),
            raw,
        });
    });
    out
}

fn prefactor(a: &OffDiagonalType, b: &OffDiagonalType) -> Rational {
    let num: BigInt = a
        .entries()
        .iter()
        .chain(b.entries())
        .map(|&x| factorial(x))
        .product();
    Rational::from_integer(num)
}

fn check_rank(xs: &[&OffDiagonalType]) -> Result<()> {
    for x in &xs[1..] {
        if x.nu() != xs[0].nu() {
            return Err(Error::RankMismatch(xs[0].nu(), x.nu()));
        }
    }
    Ok(())
}

/// The constrained tensor set for `(a, b, c)`, sorted.
pub fn enumerate_t(
    a: &OffDiagonalType,
    b: &OffDiagonalType,
    c: &OffDiagonalType,
) -> Result<Vec<ConstrainedTripleTensor>> {
    check_rank(&[a, b, c])?;
    let nu = a.nu();
    let per_j: Vec<Vec<Slice>> = (0..nu).map(|j| slices(a, b, j, u32::MAX)).collect();
    let mut out = Vec::new();
    let mut c_rem = c.entries().to_vec();
    let mut chosen: Vec<usize> = Vec::with_capacity(nu);
    fn rec(
        j: usize,
        per_j: &[Vec<Slice>],
        c_rem: &mut Vec<u32>,
        chosen: &mut Vec<usize>,
        a: &OffDiagonalType,
        b: &OffDiagonalType,
        out: &mut Vec<ConstrainedTripleTensor>,
    ) {
        let nu = per_j.len();
        if j == nu {
            if c_rem.iter().all(|&x| x == 0) {
                let mut entries = vec![0u32; nu * nu * nu];
                let mut stars = vec![0u32; nu];
                for (jj, &s) in chosen.iter().enumerate() {
                    let slice = &per_j[jj][s];
                    for i in 0..nu {
                        for k in 0..nu {
                            entries[(i * nu + jj) * nu + k] = slice.raw[i * nu + k];
                        }
                    }
                    stars[jj] = a.star(jj) + b.star(jj) - slice.block_total;
                }
                out.push(ConstrainedTripleTensor { nu, entries, stars });
            }
            return;
        }
        for (s, slice) in per_j[j].iter().enumerate() {
            if slice.c.iter().zip(c_rem.iter()).any(|(x, y)| x > y) {
                continue;
            }
            for (x, y) in c_rem.iter_mut().zip(&slice.c) {
                *x -= y;
            }
            chosen.push(s);
            rec(j + 1, per_j, c_rem, chosen, a, b, out);
            chosen.pop();
            for (x, y) in c_rem.iter_mut().zip(&slice.c) {
                *x += y;
            }
        }
    }
    rec(0, &per_j, &mut c_rem, &mut chosen, a, b, &mut out);
    out.sort();
    Ok(out)
}

/// `eps_j^(a* + b* - t*) ((a*, t*; eps_j)) ((b*, t*; eps_j)) / ((0, t*; eps_j))`.
fn diagonal_factor(nu: usize, j: usize, a_star: u32, b_star: u32, t_star: u32) -> EpsRingElement {
    let exponent = a_star + b_star - t_star;
    let num = &(&EpsPolynomial::var_power(nu, j, exponent)
        * &bracket(nu, a_star, t_star, j).unwrap())
        * &bracket(nu, b_star, t_star, j).unwrap();
    EpsRingElement::from_poly(num)
        .div_by_bracket(0, t_star, j)
        .unwrap()
}

fn eps_weight(
    nu: usize,
    a: &OffDiagonalType,
    b: &OffDiagonalType,
    stars: &[u32],
) -> EpsRingElement {
    let mut acc = EpsRingElement::one(nu);
    for (j, &t_star) in stars.iter().enumerate() {
        acc = &acc * &diagonal_factor(nu, j, a.star(j), b.star(j), t_star);
    }
    acc
}

/// `eps_weight` expanded to total degree `order`, using
/// `((a*, t*)) / ((0, t*)) = 1 / ((0, a*))` so that no rational function is formed.
fn series_weight(
    nu: usize,
    a: &OffDiagonalType,
    b: &OffDiagonalType,
    stars: &[u32],
    order: u32,
) -> EpsSeries {
    let exponents: Vec<u32> = stars
        .iter()
        .enumerate()
        .map(|(j, &t)| a.star(j) + b.star(j) - t)
        .collect();
    if exponents.iter().sum::<u32>() > order {
        return EpsSeries::zero(nu, order);
    }
    let mut acc = EpsSeries::from_poly(
        &EpsPolynomial::monomial(nu, exponents, Rational::one()),
        order,
    );
    for (j, &t_star) in stars.iter().enumerate() {
        for m in b.star(j)..t_star {
            acc = &acc * &EpsSeries::from_poly(&EpsPolynomial::one(nu).mul_linear(j, m), order);
        }
        for m in 1..a.star(j) {
            acc = &acc * &EpsSeries::inverse_linear(nu, j, m, order);
        }
    }
    acc
}

/// Structure constant of `Xi{c}` in `Xi{a} Xi{b}`, summed literally over the tensor set.
pub fn universal_structure_constant(
    a: &OffDiagonalType,
    b: &OffDiagonalType,
    c: &OffDiagonalType,
) -> Result<EpsRingElement> {
    let nu = a.nu();
    let tensors = enumerate_t(a, b, c)?;
    // tensors sharing the t* vector share the eps-dependence
    let mut by_stars: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    for t in &tensors {
        *by_stars
            .entry(t.stars.clone())
            .or_insert_with(Rational::zero) += t.inv_factorial_weight();
    }
    let pre = prefactor(a, b);
    let mut acc = EpsRingElement::zero(nu);
    for (stars, w) in by_stars {
        acc = &acc + &eps_weight(nu, a, b, &stars).scale(&(&pre * w));
    }
    Ok(acc)
}

/// Slice-by-slice accumulation of `(c, block totals) -> sum of weights`.
fn product_states(
    a: &OffDiagonalType,
    b: &OffDiagonalType,
    max_total: u32,
) -> BTreeMap<(Vec<u32>, Vec<u32>), Rational> {
    let nu = a.nu();
    let mut states: BTreeMap<(Vec<u32>, Vec<u32>), Rational> = BTreeMap::new();
    states.insert((vec![0; nu * nu], Vec::new()), Rational::one());
    for j in 0..nu {
        let sl = slices(a, b, j, max_total);
        let mut next: BTreeMap<(Vec<u32>, Vec<u32>), Rational> = BTreeMap::new();
        for ((c, totals), w) in &states {
            let used: u32 = totals.iter().sum();
            for s in &sl {
                if used + s.block_total > max_total {
                    continue;
                }
                let c2: Vec<u32> = c.iter().zip(&s.c).map(|(x, y)| x + y).collect();
                let mut t2 = totals.clone();
                t2.push(s.block_total);
                *next.entry((c2, t2)).or_insert_with(Rational::zero) += w * &s.weight;
            }
        }
        states = next;
    }
    states.retain(|(c, _), _| OffDiagonalType::from_raw(nu, c.clone()).is_balanced());
    states
}

/// Every `c` whose tensor set is nonempty.
pub fn candidate_outputs(
    a: &OffDiagonalType,
    b: &OffDiagonalType,
) -> Result<BTreeSet<OffDiagonalType>> {
    check_rank(&[a, b])?;
    let nu = a.nu();
    Ok(product_states(a, b, u32::MAX)
        .into_keys()
        .map(|(c, _)| OffDiagonalType::from_raw(nu, c))
        .collect())
}

/// Finitely supported element of the universal algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalElement {
    nu: usize,
    terms: BTreeMap<OffDiagonalType, EpsRingElement>,
}

impl UniversalElement {
    pub fn zero(nu: usize) -> Self {
        UniversalElement {
            nu,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(t: &OffDiagonalType) -> Self {
        let mut out = Self::zero(t.nu());
        out.terms.insert(t.clone(), EpsRingElement::one(t.nu()));
        out
    }

    pub fn unit(nu: usize) -> Self {
        Self::basis(&OffDiagonalType::zero(nu))
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn terms(&self) -> &BTreeMap<OffDiagonalType, EpsRingElement> {
        &self.terms
    }

    pub fn coefficient(&self, t: &OffDiagonalType) -> EpsRingElement {
        self.terms
            .get(t)
            .cloned()
            .unwrap_or_else(|| EpsRingElement::zero(self.nu))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, t: OffDiagonalType, x: EpsRingElement) {
        assert_eq!(t.nu(), self.nu);
        let cur = self.coefficient(&t);
        let sum = &cur + &x;
        if sum.is_zero() {
            self.terms.remove(&t);
        } else {
            self.terms.insert(t, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, x) in &other.terms {
            out.add_term(t.clone(), x.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, x) in &other.terms {
            out.add_term(t.clone(), -x);
        }
        out
    }

    pub fn scale(&self, s: &EpsRingElement) -> Self {
        let mut out = Self::zero(self.nu);
        for (t, x) in &self.terms {
            out.add_term(t.clone(), x * s);
        }
        out
    }

    /// Coefficientwise series expansion up to total degree `d`.
    pub fn expand(&self, d: u32) -> BTreeMap<OffDiagonalType, EpsSeries> {
        self.terms
            .iter()
            .map(|(t, x)| (t.clone(), x.expand(d)))
            .collect()
    }

    /// Coefficientwise value at `eps_j = 1/n_j`.
    pub fn specialize(&self, margins: &Margins) -> Result<BTreeMap<OffDiagonalType, Rational>> {
        let mut out = BTreeMap::new();
        for (t, x) in &self.terms {
            let q = x.specialize(margins)?;
            if !q.is_zero() {
                out.insert(t.clone(), q);
            }
        }
        Ok(out)
    }
}

impl Serialize for UniversalElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            offdiag: &'a OffDiagonalType,
            coeff: &'a EpsRingElement,
        }
        #[derive(Serialize)]
        struct Element<'a> {
            nu: usize,
            terms: Vec<Term<'a>>,
        }
        Element {
            nu: self.nu,
            terms: self
                .terms
                .iter()
                .map(|(offdiag, coeff)| Term { offdiag, coeff })
                .collect(),
        }
        .serialize(s)
    }
}

/// `Xi{a} Xi{b}` with exact ring coefficients.
pub fn multiply_basis(a: &OffDiagonalType, b: &OffDiagonalType) -> Result<UniversalElement> {
    check_rank(&[a, b])?;
    let nu = a.nu();
    let pre = prefactor(a, b);
    let mut grouped: BTreeMap<Vec<u32>, Vec<(Vec<u32>, Rational)>> = BTreeMap::new();
    for ((c, totals), w) in product_states(a, b, u32::MAX) {
        grouped.entry(c).or_default().push((totals, w));
    }
    let mut out = UniversalElement::zero(nu);
    for (c, parts) in grouped {
        let mut acc = EpsRingElement::zero(nu);
        for (totals, w) in parts {
            let stars: Vec<u32> = (0..nu).map(|j| a.star(j) + b.star(j) - totals[j]).collect();
            acc = &acc + &eps_weight(nu, a, b, &stars).scale(&(&pre * w));
        }
        if !acc.is_zero() {
            out.terms.insert(OffDiagonalType::from_raw(nu, c), acc);
        }
    }
    Ok(out)
}

/// Bilinear extension over ring coefficients.
pub fn universal_multiply(x: &UniversalElement, y: &UniversalElement) -> Result<UniversalElement> {
    if x.nu != y.nu {
        return Err(Error::RankMismatch(x.nu, y.nu));
    }
    let mut out = UniversalElement::zero(x.nu);
    for (a, p) in &x.terms {
        for (b, q) in &y.terms {
            let pq = p * q;
            for (c, s) in multiply_basis(a, b)?.terms {
                out.add_term(c, &s * &pq);
            }
        }
    }
    Ok(out)
}

/// `Xi{a} Xi{b}` as power series, exact up to total degree `order`.
///
/// Only tensors whose blocks hold at most `order` units in total can reach
/// degree `order`, so the walk is cut off there.
pub fn multiply_basis_series(
    a: &OffDiagonalType,
    b: &OffDiagonalType,
    order: u32,
) -> Result<BTreeMap<OffDiagonalType, EpsSeries>> {
    check_rank(&[a, b])?;
    let nu = a.nu();
    let pre = prefactor(a, b);
    let mut out: BTreeMap<OffDiagonalType, EpsSeries> = BTreeMap::new();
    let mut factor_cache: BTreeMap<Vec<u32>, EpsSeries> = BTreeMap::new();
    for ((c, totals), w) in product_states(a, b, order) {
        let series = factor_cache
            .entry(totals.clone())
            .or_insert_with(|| {
                let stars: Vec<u32> = (0..nu).map(|j| a.star(j) + b.star(j) - totals[j]).collect();
                series_weight(nu, a, b, &stars, order)
            })
            .scale(&(&pre * w));
        let key = OffDiagonalType::from_raw(nu, c);
        let slot = out.entry(key).or_insert_with(|| EpsSeries::zero(nu, order));
        *slot = &*slot + &series;
    }
    out.retain(|_, s| !s.is_zero());
    Ok(out)
}

fn check_domain(t: &OffDiagonalType, margins: &Margins) -> Result<()> {
    for j in 0..t.nu() {
        if t.star(j) > margins.size(j) {
            return Err(Error::OutsideDomain {
                block: j + 1,
                star: t.star(j),
                n: margins.size(j),
            });
        }
    }
    Ok(())
}

/// Structure constant at `eps_j = 1/n_j`; both operands must satisfy `a*_jj, b*_jj <= n_j`.
pub fn specialize_constant(
    a: &OffDiagonalType,
    b: &OffDiagonalType,
    c: &OffDiagonalType,
    margins: &Margins,
) -> Result<Rational> {
    check_rank(&[a, b, c])?;
    if margins.nu() != a.nu() {
        return Err(Error::RankMismatch(a.nu(), margins.nu()));
    }
    check_domain(a, margins)?;
    check_domain(b, margins)?;
    universal_structure_constant(a, b, c)?.specialize(margins)
}

/// Findings of the exponent checks over every candidate output.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LeadingTermReport {
    pub outputs_checked: usize,
    pub tensors_checked: usize,
    /// Tensors where `a* + b* - t*` is negative or differs from the block total.
    pub exponent_violations: Vec<(OffDiagonalType, Vec<u32>)>,
    /// Outputs reached with all exponents zero but `c != a + b`.
    pub leading_violations: Vec<OffDiagonalType>,
}

impl LeadingTermReport {
    pub fn passed(&self) -> bool {
        self.exponent_violations.is_empty() && self.leading_violations.is_empty()
    }

    pub fn merge(&mut self, other: LeadingTermReport) {
        self.outputs_checked += other.outputs_checked;
        self.tensors_checked += other.tensors_checked;
        self.exponent_violations.extend(other.exponent_violations);
        self.leading_violations.extend(other.leading_violations);
    }
}

/// Checks, for every tensor of every candidate output, that each exponent
/// `a*_jj + b*_jj - t*_jjj` equals `sum_{i != j, k != j} t_ijk` (hence is
/// nonnegative), and that all-zero exponents force `c = a + b`.
pub fn leading_term_checks(a: &OffDiagonalType, b: &OffDiagonalType) -> Result<LeadingTermReport> {
    let nu = a.nu();
    let mut report = LeadingTermReport::default();
    let sum = a.add(b);
    for c in candidate_outputs(a, b)? {
        report.outputs_checked += 1;
        for t in enumerate_t(a, b, &c)? {
            report.tensors_checked += 1;
            let exps: Vec<i64> = (0..nu)
                .map(|j| a.star(j) as i64 + b.star(j) as i64 - t.star(j) as i64)
                .collect();
            if (0..nu).any(|j| exps[j] < 0 || exps[j] != t.block_total(j) as i64) {
                report
                    .exponent_violations
                    .push((c.clone(), t.stars.clone()));
            }
            if exps.iter().all(|&e| e == 0) && c != sum {
                report.leading_violations.push(c.clone());
            }
        }
    }
    Ok(report)
}

/// Runs [`leading_term_checks`] over all ordered pairs from `basis`.
pub fn leading_term_exhaustive(basis: &[OffDiagonalType]) -> Result<LeadingTermReport> {
    let reports: Vec<Result<LeadingTermReport>> = basis
        .par_iter()
        .map(|a| {
            let mut r = LeadingTermReport::default();
            for b in basis {
                r.merge(leading_term_checks(a, b)?);
            }
            Ok(r)
        })
        .collect();
    let mut out = LeadingTermReport::default();
    for r in reports {
        out.merge(r?);
    }
    Ok(out)
}
