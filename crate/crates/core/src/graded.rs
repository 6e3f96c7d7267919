//! The associated graded algebra of the universal algebra, the first-order
//! term of its product and the Poisson bracket at `eps_1 = ... = eps_nu`.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{int, serde_rational, Rational};
use crate::coset::OffDiagonalType;
use crate::error::{Error, Result};
use crate::universal::multiply_basis_series;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedElement {
    nu: usize,
    terms: BTreeMap<OffDiagonalType, Rational>,
}

impl GradedElement {
    pub fn zero(nu: usize) -> Self {
        GradedElement {
            nu,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(t: &OffDiagonalType) -> Self {
        let mut out = Self::zero(t.nu());
        out.add_term(t.clone(), int(1));
        out
    }

    pub fn unit(nu: usize) -> Self {
        Self::basis(&OffDiagonalType::zero(nu))
    }

    pub fn from_terms<I: IntoIterator<Item = (OffDiagonalType, Rational)>>(
        nu: usize,
        it: I,
    ) -> Self {
        let mut out = Self::zero(nu);
        for (t, q) in it {
            out.add_term(t, q);
        }
        out
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn terms(&self) -> &BTreeMap<OffDiagonalType, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, t: &OffDiagonalType) -> Rational {
        self.terms.get(t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, t: OffDiagonalType, q: Rational) {
        assert_eq!(t.nu(), self.nu);
        if q.is_zero() {
            return;
        }
        let slot = self.terms.entry(t.clone()).or_insert_with(Rational::zero);
        *slot += q;
        if slot.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, q) in &other.terms {
            out.add_term(t.clone(), q.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.nu);
        }
        GradedElement {
            nu: self.nu,
            terms: self.terms.iter().map(|(t, q)| (t.clone(), q * s)).collect(),
        }
    }
}

impl Serialize for GradedElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            offdiag: &'a OffDiagonalType,
            #[serde(with = "serde_rational")]
            coeff: &'a Rational,
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

fn same_rank(x: &GradedElement, y: &GradedElement) -> Result<()> {
    if x.nu != y.nu {
        return Err(Error::RankMismatch(x.nu, y.nu));
    }
    Ok(())
}

/// `Xi{a} Xi{b} = Xi{a + b}`, extended bilinearly.
pub fn graded_multiply(x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
    same_rank(x, y)?;
    let mut out = GradedElement::zero(x.nu);
    for (a, p) in &x.terms {
        for (b, q) in &y.terms {
            out.add_term(a.add(b), p * q);
        }
    }
    Ok(out)
}

/// Degree-zero part of the universal product `Xi{a} Xi{b}`.
pub fn constant_term(a: &OffDiagonalType, b: &OffDiagonalType) -> Result<GradedElement> {
    let series = multiply_basis_series(a, b, 0)?;
    Ok(GradedElement::from_terms(
        a.nu(),
        series.into_iter().map(|(c, s)| (c, s.constant_term())),
    ))
}

/// Coefficient of `eps_j` (0-based `j`) in the universal product `Xi{a} Xi{b}`.
pub fn first_order_term(
    a: &OffDiagonalType,
    b: &OffDiagonalType,
) -> Result<BTreeMap<usize, GradedElement>> {
    let nu = a.nu();
    let series = multiply_basis_series(a, b, 1)?;
    let mut out = BTreeMap::new();
    for j in 0..nu {
        let g = GradedElement::from_terms(
            nu,
            series
                .iter()
                .map(|(c, s)| (c.clone(), s.linear_coefficient(j))),
        );
        if !g.is_zero() {
            out.insert(j, g);
        }
    }
    Ok(out)
}

/// `a + b + E_{al,ga} - E_{al,j} - E_{j,ga}` with the diagonal dropped, if nonnegative.
fn try_shifted(
    a: &OffDiagonalType,
    b: &OffDiagonalType,
    alpha: usize,
    gamma: usize,
    j: usize,
) -> Option<OffDiagonalType> {
    let nu = a.nu();
    let mut e: Vec<i64> = a.add(b).entries().iter().map(|&x| x as i64).collect();
    e[alpha * nu + gamma] += 1;
    e[alpha * nu + j] -= 1;
    e[j * nu + gamma] -= 1;
    for k in 0..nu {
        e[k * nu + k] = 0;
    }
    let e: Vec<u32> = e
        .into_iter()
        .map(u32::try_from)
        .collect::<std::result::Result<_, _>>()
        .ok()?;
    Some(OffDiagonalType::from_flat(nu, e).expect("shift preserves balance"))
}

fn shifted(
    a: &OffDiagonalType,
    b: &OffDiagonalType,
    alpha: usize,
    gamma: usize,
    j: usize,
) -> OffDiagonalType {
    try_shifted(a, b, alpha, gamma, j).expect("shift stays nonnegative when a_{al j} b_{j ga} > 0")
}

/// Closed form of `first_order_term`:
/// `-a*_j b*_j Xi{a+b} + sum_{al,ga != j} a_{al j} b_{j ga} Xi(a + b + E_{al ga} - E_{al j} - E_{j ga})`.
pub fn first_order_closed_form(
    a: &OffDiagonalType,
    b: &OffDiagonalType,
) -> BTreeMap<usize, GradedElement> {
    let nu = a.nu();
    let mut out = BTreeMap::new();
    for j in 0..nu {
        let mut g = GradedElement::zero(nu);
        g.add_term(a.add(b), int(-(a.star(j) as i64 * b.star(j) as i64)));
        for alpha in (0..nu).filter(|&x| x != j) {
            for gamma in (0..nu).filter(|&x| x != j) {
                let w = a.get(alpha, j) as i64 * b.get(j, gamma) as i64;
                if w != 0 {
                    g.add_term(shifted(a, b, alpha, gamma, j), int(w));
                }
            }
        }
        if !g.is_zero() {
            out.insert(j, g);
        }
    }
    out
}

/// The first-order sum as it is usually displayed, with `beta` read as `gamma`:
/// `sum_{al,ga} a_{al j} b_{j ga} Xi(a + b + E_{al ga} - E_{al j} - E_{j ga})`, no diagonal term.
pub fn first_order_display(
    a: &OffDiagonalType,
    b: &OffDiagonalType,
) -> BTreeMap<usize, GradedElement> {
    let mut out = first_order_closed_form(a, b);
    for (j, g) in out.iter_mut() {
        g.add_term(a.add(b), int(a.star(*j) as i64 * b.star(*j) as i64));
    }
    out.retain(|_, g| !g.is_zero());
    out
}

/// Bracket of basis elements from the closed form:
/// `sum_j sum_{al,ga != j} (a_{al j} b_{j ga} - b_{al j} a_{j ga}) Xi(a + b + E_{al ga} - E_{al j} - E_{j ga})`.
pub fn bracket_closed_form(a: &OffDiagonalType, b: &OffDiagonalType) -> GradedElement {
    let nu = a.nu();
    let mut g = GradedElement::zero(nu);
    for j in 0..nu {
        for alpha in (0..nu).filter(|&x| x != j) {
            for gamma in (0..nu).filter(|&x| x != j) {
                let w = a.get(alpha, j) as i64 * b.get(j, gamma) as i64
                    - b.get(alpha, j) as i64 * a.get(j, gamma) as i64;
                if w != 0 {
                    g.add_term(shifted(a, b, alpha, gamma, j), int(w));
                }
            }
        }
    }
    g
}

/// The displayed commutator coefficient `a_{al j} b_{j ga} - a_{ga j} b_{j al}` with the same shifts.
///
/// `None` when a nonzero coefficient lands on a shift with a negative entry.
pub fn bracket_display(a: &OffDiagonalType, b: &OffDiagonalType) -> Option<GradedElement> {
    let nu = a.nu();
    let mut g = GradedElement::zero(nu);
    for j in 0..nu {
        for alpha in (0..nu).filter(|&x| x != j) {
            for gamma in (0..nu).filter(|&x| x != j) {
                let w = a.get(alpha, j) as i64 * b.get(j, gamma) as i64
                    - a.get(gamma, j) as i64 * b.get(j, alpha) as i64;
                if w != 0 {
                    g.add_term(try_shifted(a, b, alpha, gamma, j)?, int(w));
                }
            }
        }
    }
    Some(g)
}

/// Poisson bracket with memoized basis brackets.
#[derive(Debug, Default)]
pub struct Poisson {
    cache: RwLock<HashMap<(OffDiagonalType, OffDiagonalType), GradedElement>>,
}

impl Poisson {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{Xi a, Xi b}`: the `eps` coefficient of the universal commutator with all `eps_j` equal.
    pub fn basis(&self, a: &OffDiagonalType, b: &OffDiagonalType) -> Result<GradedElement> {
        if a.nu() != b.nu() {
            return Err(Error::RankMismatch(a.nu(), b.nu()));
        }
        if a == b {
            return Ok(GradedElement::zero(a.nu()));
        }
        if a > b {
            return Ok(self.basis(b, a)?.scale(&int(-1)));
        }
        let key = (a.clone(), b.clone());
        if let Some(g) = self.cache.read().unwrap().get(&key) {
            return Ok(g.clone());
        }
        let g = commutator_eps_coefficient(a, b)?;
        self.cache.write().unwrap().insert(key, g.clone());
        Ok(g)
    }

    pub fn bracket(&self, x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
        same_rank(x, y)?;
        let mut out = GradedElement::zero(x.nu);
        for (a, p) in &x.terms {
            for (b, q) in &y.terms {
                out = out.add(&self.basis(a, b)?.scale(&(p * q)));
            }
        }
        Ok(out)
    }
}

fn commutator_eps_coefficient(a: &OffDiagonalType, b: &OffDiagonalType) -> Result<GradedElement> {
    let ab = multiply_basis_series(a, b, 1)?;
    let ba = multiply_basis_series(b, a, 1)?;
    let mut out = GradedElement::zero(a.nu());
    for c in ab.keys().chain(ba.keys()) {
        if out.terms.contains_key(c) {
            continue;
        }
        let diag = |m: &BTreeMap<OffDiagonalType, crate::eps::EpsSeries>| {
            m.get(c).map(|s| s.diagonal()).unwrap_or_default()
        };
        let (x, y) = (diag(&ab), diag(&ba));
        let at = |v: &Vec<Rational>, k: usize| v.get(k).cloned().unwrap_or_else(Rational::zero);
        assert_eq!(at(&x, 0), at(&y, 0), "graded product must be commutative");
        out.add_term(c.clone(), at(&x, 1) - at(&y, 1));
    }
    Ok(out)
}

pub fn poisson_bracket(x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
    Poisson::new().bracket(x, y)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PoissonReport {
    pub basis_size: usize,
    pub antisymmetry_violations: usize,
    pub jacobi_triples: usize,
    pub jacobi_violations: usize,
    pub leibniz_triples: usize,
    pub leibniz_violations: usize,
}

impl PoissonReport {
    pub fn passed(&self) -> bool {
        self.antisymmetry_violations == 0
            && self.jacobi_violations == 0
            && self.leibniz_violations == 0
    }
}

/// Antisymmetry on all pairs, Jacobi on all triples of distinct elements and
/// Leibniz on all `(x, {y, z})`, over the given basis.
pub fn check_poisson(basis: &[OffDiagonalType]) -> Result<PoissonReport> {
    let p = Poisson::new();
    let k = basis.len();
    let e: Vec<GradedElement> = basis.iter().map(GradedElement::basis).collect();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let anti = pairs
        .par_iter()
        .map(|&(i, j)| {
            let x = commutator_eps_coefficient(&basis[i], &basis[j])?;
            let y = commutator_eps_coefficient(&basis[j], &basis[i])?;
            Ok(usize::from(
                !x.add(&y).is_zero() || x != p.basis(&basis[i], &basis[j])?,
            ))
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum();
    let triples: Vec<(usize, usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).flat_map(move |j| (j + 1..k).map(move |l| (i, j, l))))
        .collect();
    let jacobi = triples
        .par_iter()
        .map(|&(i, j, l)| {
            let (x, y, z) = (&e[i], &e[j], &e[l]);
            let s = p
                .bracket(x, &p.bracket(y, z)?)?
                .add(&p.bracket(y, &p.bracket(z, x)?)?)
                .add(&p.bracket(z, &p.bracket(x, y)?)?);
            Ok(usize::from(!s.is_zero()))
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum();
    let leibniz_triples: Vec<(usize, usize, usize)> = (0..k)
        .flat_map(|i| (0..k).flat_map(move |j| (j..k).map(move |l| (i, j, l))))
        .collect();
    let leibniz = leibniz_triples
        .par_iter()
        .map(|&(i, j, l)| {
            let (x, y, z) = (&e[i], &e[j], &e[l]);
            let lhs = p.bracket(x, &graded_multiply(y, z)?)?;
            let rhs =
                graded_multiply(&p.bracket(x, y)?, z)?.add(&graded_multiply(y, &p.bracket(x, z)?)?);
            Ok(usize::from(lhs != rhs))
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum();
    Ok(PoissonReport {
        basis_size: k,
        antisymmetry_violations: anti,
        jacobi_triples: triples.len(),
        jacobi_violations: jacobi,
        leibniz_triples: leibniz_triples.len(),
        leibniz_violations: leibniz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(nu: usize, triples: &[(usize, usize, u32)]) -> OffDiagonalType {
        OffDiagonalType::from_triples(nu, triples).unwrap()
    }

    #[test]
    fn graded_product_adds_indices() {
        let a = t(3, &[(0, 1, 1), (1, 0, 1)]);
        let b = t(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]);
        let p = graded_multiply(&GradedElement::basis(&a), &GradedElement::basis(&b)).unwrap();
        assert_eq!(p, GradedElement::basis(&a.add(&b)));
        assert_eq!(graded_multiply(&GradedElement::unit(3), &p).unwrap(), p);
    }

    #[test]
    fn unit_has_no_first_order_term() {
        let a = t(3, &[(0, 1, 2), (1, 2, 2), (2, 0, 2)]);
        assert!(first_order_term(&OffDiagonalType::zero(3), &a)
            .unwrap()
            .is_empty());
        assert!(first_order_term(&a, &OffDiagonalType::zero(3))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn bracket_of_self_vanishes() {
        let a = t(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]);
        let x = GradedElement::basis(&a);
        assert!(poisson_bracket(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn serializes_terms() {
        let a = t(2, &[(0, 1, 1), (1, 0, 1)]);
        let json = serde_json::to_string(&GradedElement::basis(&a).scale(&int(3))).unwrap();
        assert_eq!(
            json,
            r#"{"nu":2,"terms":[{"offdiag":{"nu":2,"offdiag":[[1,2,1],[2,1,1]]},"coeff":"3/1"}]}"#
        );
    }
}
