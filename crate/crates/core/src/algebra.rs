//! The double-coset algebra `Delta{n_j}` with basis `Xi{a}` (uniform averages over
//! double cosets) and exact products from the triple-tensor sum.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{factorial, serde_rational, Rational};
use crate::coset::{enumerate_coset_matrices, CosetMatrix, Margins};
use crate::error::{Error, Result};
use crate::tables::{for_each_capped_table, for_each_table};

/// Default cap on the basis size accepted by [`product_table`] and [`verify_associativity`].
pub const DEFAULT_TABLE_BOUND: usize = 256;

/// Finite linear combination of `Xi` basis elements with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    margins: Margins,
    terms: BTreeMap<CosetMatrix, Rational>,
}

impl AlgebraElement {
    pub fn zero(margins: &Margins) -> Self {
        AlgebraElement {
            margins: margins.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(m: &CosetMatrix) -> Self {
        let mut out = Self::zero(m.margins());
        out.terms.insert(m.clone(), Rational::one());
        out
    }

    pub fn unit(margins: &Margins) -> Self {
        Self::basis(&CosetMatrix::identity(margins))
    }

    pub fn margins(&self) -> &Margins {
        &self.margins
    }

    pub fn terms(&self) -> &BTreeMap<CosetMatrix, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, m: &CosetMatrix) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of coefficients; every `Xi` has mass one.
    pub fn mass(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |acc, q| acc + q)
    }

    pub(crate) fn add_term(&mut self, m: CosetMatrix, q: Rational) {
        debug_assert_eq!(m.margins(), &self.margins);
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += q;
        if slot.is_zero() {
            self.terms.retain(|_, q| !q.is_zero());
        }
    }

    fn same_margins(&self, other: &Self) -> Result<()> {
        if self.margins != other.margins {
            return Err(Error::MarginMismatch(
                self.margins.sizes().to_vec(),
                other.margins.sizes().to_vec(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_margins(other)?;
        let mut out = self.clone();
        for (m, q) in &other.terms {
            out.add_term(m.clone(), q.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero(&self.margins);
        if s.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(m, q)| (m.clone(), q * s)).collect();
        out
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        multiply(self, other)
    }

    /// `[x, y] = xy - yx`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.multiply(other)?.sub(&other.multiply(self)?)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    matrix: Vec<Vec<u32>>,
    #[serde(with = "serde_rational")]
    coeff: Rational,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    n: Vec<u32>,
    terms: Vec<TermJson>,
}

impl Serialize for AlgebraElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementJson {
            n: self.margins.sizes().to_vec(),
            terms: self
                .terms
                .iter()
                .map(|(m, q)| TermJson {
                    matrix: m.rows(),
                    coeff: q.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebraElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ElementJson::deserialize(d)?;
        let margins = Margins::new(raw.n).map_err(serde::de::Error::custom)?;
        let mut out = AlgebraElement::zero(&margins);
        for t in raw.terms {
            let m = CosetMatrix::new(margins.clone(), t.matrix.into_iter().flatten().collect())
                .map_err(serde::de::Error::custom)?;
            out.add_term(m, t.coeff);
        }
        Ok(out)
    }
}

fn check_margins(ms: &[&CosetMatrix]) -> Result<()> {
    let first = ms[0].margins();
    for m in &ms[1..] {
        if m.margins() != first {
            return Err(Error::MarginMismatch(
                first.sizes().to_vec(),
                m.margins().sizes().to_vec(),
            ));
        }
    }
    Ok(())
}

/// `prod a_ij! prod b_jk! / prod n_j!`.
fn prefactor(a: &CosetMatrix, b: &CosetMatrix) -> Rational {
    let num: BigInt = a
        .entries()
        .iter()
        .chain(b.entries())
        .map(|&x| factorial(x))
        .product();
    Rational::new(num, a.margins().young_order())
}

fn inv_factorial_product(t: &[u32]) -> Rational {
    Rational::new(BigInt::one(), t.iter().map(|&x| factorial(x)).product())
}

/// Coefficient of `Xi{c}` in `Xi{a} Xi{b}`.
///
/// Sums `1 / prod t_ijk!` over nonnegative `t` with `sum_k t_ijk = a_ij`,
/// `sum_i t_ijk = b_jk` and `sum_j t_ijk = c_ik`. For fixed middle index `j`
/// the slice `t_(.j.)` is a table with row sums `a_(.j)` and column sums
/// `b_(j.)`; the walk fills one slice at a time, capped by what is left of `c`.
pub fn structure_constant(a: &CosetMatrix, b: &CosetMatrix, c: &CosetMatrix) -> Result<Rational> {
    check_margins(&[a, b, c])?;
    let nu = a.nu();
    let mut c_rem = c.entries().to_vec();
    let mut sum = Rational::zero();
    fn rec(
        j: usize,
        nu: usize,
        a: &CosetMatrix,
        b: &CosetMatrix,
        c_rem: &mut Vec<u32>,
        weight: Rational,
        sum: &mut Rational,
    ) {
        if j == nu {
            if c_rem.iter().all(|&x| x == 0) {
                *sum += weight;
            }
            return;
        }
        let rows: Vec<u32> = (0..nu).map(|i| a.get(i, j)).collect();
        let cols: Vec<u32> = (0..nu).map(|k| b.get(j, k)).collect();
        let caps = c_rem.clone();
        for_each_capped_table(&rows, &cols, &caps, |t| {
            for (x, y) in c_rem.iter_mut().zip(t) {
                *x -= y;
            }
            rec(
                j + 1,
                nu,
                a,
                b,
                c_rem,
                &weight * inv_factorial_product(t),
                sum,
            );
            for (x, y) in c_rem.iter_mut().zip(t) {
                *x += y;
            }
        });
    }
    rec(0, nu, a, b, &mut c_rem, Rational::one(), &mut sum);
    Ok(prefactor(a, b) * sum)
}

/// `Xi{a} Xi{b}` expanded in the basis, by accumulating slice by slice.
pub fn multiply_basis(a: &CosetMatrix, b: &CosetMatrix) -> Result<AlgebraElement> {
    check_margins(&[a, b])?;
    let nu = a.nu();
    let mut states: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    states.insert(vec![0; nu * nu], Rational::one());
    for j in 0..nu {
        let rows: Vec<u32> = (0..nu).map(|i| a.get(i, j)).collect();
        let cols: Vec<u32> = (0..nu).map(|k| b.get(j, k)).collect();
        let mut slices: Vec<(Vec<u32>, Rational)> = Vec::new();
        for_each_table(&rows, &cols, |t| {
            slices.push((t.to_vec(), inv_factorial_product(t)))
        });
        let mut next: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (partial, w) in &states {
            for (t, tw) in &slices {
                let key: Vec<u32> = partial.iter().zip(t).map(|(x, y)| x + y).collect();
                *next.entry(key).or_insert_with(Rational::zero) += w * tw;
            }
        }
        states = next;
    }
    let pre = prefactor(a, b);
    let mut out = AlgebraElement::zero(a.margins());
    for (entries, w) in states {
        out.add_term(CosetMatrix::from_raw(a.margins(), entries), &pre * w);
    }
    Ok(out)
}

/// Bilinear extension of [`multiply_basis`].
pub fn multiply(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    x.same_margins(y)?;
    let mut out = AlgebraElement::zero(&x.margins);
    for (a, p) in &x.terms {
        for (b, q) in &y.terms {
            let pq = p * q;
            for (c, s) in multiply_basis(a, b)?.terms {
                out.add_term(c, s * &pq);
            }
        }
    }
    Ok(out)
}

/// One nonzero structure constant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub a: CosetMatrix,
    pub b: CosetMatrix,
    pub c: CosetMatrix,
    #[serde(with = "serde_rational")]
    pub coeff: Rational,
}

/// All nonzero structure constants, ordered by `(a, b, c)`.
pub fn product_table(margins: &Margins, bound: usize) -> Result<Vec<TableEntry>> {
    let basis = enumerate_coset_matrices(margins);
    if basis.len() > bound {
        return Err(Error::BoundExceeded {
            size: basis.len(),
            bound,
        });
    }
    let pairs: Vec<(&CosetMatrix, &CosetMatrix)> = basis
        .iter()
        .flat_map(|a| basis.iter().map(move |b| (a, b)))
        .collect();
    let rows: Vec<Vec<TableEntry>> = pairs
        .par_iter()
        .map(|(a, b)| {
            let prod = multiply_basis(a, b).expect("shared margins");
            prod.terms
                .into_iter()
                .map(|(c, coeff)| TableEntry {
                    a: (*a).clone(),
                    b: (*b).clone(),
                    c,
                    coeff,
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Outcome of an exhaustive associativity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssociativityReport {
    pub margins: Margins,
    pub basis_size: usize,
    pub triples_checked: usize,
    pub violations: Vec<(CosetMatrix, CosetMatrix, CosetMatrix)>,
}

impl AssociativityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `(Xi_a Xi_b) Xi_c = Xi_a (Xi_b Xi_c)` for every basis triple.
pub fn verify_associativity(margins: &Margins, bound: usize) -> Result<AssociativityReport> {
    let basis = enumerate_coset_matrices(margins);
    if basis.len() > bound {
        return Err(Error::BoundExceeded {
            size: basis.len(),
            bound,
        });
    }
    let nb = basis.len();
    let products: Vec<Vec<AlgebraElement>> = basis
        .par_iter()
        .map(|a| {
            basis
                .iter()
                .map(|b| multiply_basis(a, b).expect("shared margins"))
                .collect()
        })
        .collect();
    let index: BTreeMap<&CosetMatrix, usize> =
        basis.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let times = |x: &AlgebraElement, right: Option<usize>, left: Option<usize>| -> AlgebraElement {
        let mut out = AlgebraElement::zero(margins);
        for (m, q) in &x.terms {
            let k = index[m];
            let prod = match (left, right) {
                (None, Some(r)) => &products[k][r],
                (Some(l), None) => &products[l][k],
                _ => unreachable!(),
            };
            for (c, s) in &prod.terms {
                out.add_term(c.clone(), s * q);
            }
        }
        out
    };
    let violations: Vec<(CosetMatrix, CosetMatrix, CosetMatrix)> = (0..nb)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut bad = Vec::new();
            for b in 0..nb {
                for c in 0..nb {
                    let left = times(&products[a][b], Some(c), None);
                    let right = times(&products[b][c], None, Some(a));
                    if left != right {
                        bad.push((basis[a].clone(), basis[b].clone(), basis[c].clone()));
                    }
                }
            }
            bad
        })
        .collect();
    Ok(AssociativityReport {
        margins: margins.clone(),
        basis_size: nb,
        triples_checked: nb * nb * nb,
        violations,
    })
}

/// Every structure constant is a nonnegative rational whose denominator divides `prod n_j!`.
pub fn has_expected_denominator(q: &Rational, margins: &Margins) -> bool {
    !q.is_negative() && (margins.young_order() % q.denom()).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};

    fn margins(n: &[u32]) -> Margins {
        Margins::new(n.to_vec()).unwrap()
    }

    #[test]
    fn unit_is_two_sided() {
        for n in [vec![2, 2], vec![1, 2, 1], vec![3]] {
            let m = margins(&n);
            let one = AlgebraElement::unit(&m);
            for b in enumerate_coset_matrices(&m) {
                let x = AlgebraElement::basis(&b);
                assert_eq!(one.multiply(&x).unwrap(), x);
                assert_eq!(x.multiply(&one).unwrap(), x);
                for c in enumerate_coset_matrices(&m) {
                    let want = if c == b { int(1) } else { int(0) };
                    assert_eq!(
                        structure_constant(&CosetMatrix::identity(&m), &b, &c).unwrap(),
                        want
                    );
                }
            }
        }
    }

    #[test]
    fn triple_and_product_routes_agree() {
        for n in [vec![2, 3], vec![1, 1, 2], vec![2, 1, 2]] {
            let m = margins(&n);
            let basis = enumerate_coset_matrices(&m);
            for a in &basis {
                for b in &basis {
                    let prod = multiply_basis(a, b).unwrap();
                    assert_eq!(prod.mass(), int(1));
                    for c in &basis {
                        let q = structure_constant(a, b, c).unwrap();
                        assert_eq!(q, prod.coefficient(c));
                        assert!(has_expected_denominator(&q, &m));
                    }
                }
            }
        }
    }

    #[test]
    fn single_block_table() {
        let t = product_table(&margins(&[4]), 10).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].coeff, int(1));
    }

    #[test]
    fn two_singletons_is_s2() {
        let m = margins(&[1, 1]);
        let t = product_table(&m, 10).unwrap();
        assert_eq!(t.len(), 4);
        let anti = CosetMatrix::new(m.clone(), vec![0, 1, 1, 0]).unwrap();
        let id = CosetMatrix::identity(&m);
        let square = t.iter().find(|e| e.a == anti && e.b == anti).unwrap();
        assert_eq!(square.c, id);
        assert!(t.iter().all(|e| e.coeff == int(1)));
    }

    #[test]
    fn bound_is_enforced() {
        assert!(matches!(
            product_table(&margins(&[2, 2, 2]), 5),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn margin_mismatch() {
        let a = CosetMatrix::identity(&margins(&[2, 2]));
        let b = CosetMatrix::identity(&margins(&[1, 3]));
        assert!(matches!(
            structure_constant(&a, &b, &a),
            Err(Error::MarginMismatch(..))
        ));
    }

    #[test]
    fn associativity_small() {
        for n in [vec![1, 1], vec![2, 2], vec![2, 3], vec![1, 1, 2]] {
            let r = verify_associativity(&margins(&n), DEFAULT_TABLE_BOUND).unwrap();
            assert!(r.passed(), "{n:?}");
        }
    }

    #[test]
    fn nu2_small_constants() {
        // phi_1 phi_1 for n = (2, 2), by hand from the slice sum:
        // prefactor (1!)^8 / (2! 2!) = 1/4, slices (sigma, tau) in {0,1}^2.
        let m = margins(&[2, 2]);
        let phi = |a: u32| CosetMatrix::new(m.clone(), vec![2 - a, a, a, 2 - a]).unwrap();
        let prod = multiply_basis(&phi(1), &phi(1)).unwrap();
        assert_eq!(prod.coefficient(&phi(0)), ratio(1, 4));
        assert_eq!(prod.coefficient(&phi(1)), ratio(1, 2));
        assert_eq!(prod.coefficient(&phi(2)), ratio(1, 4));
    }

    #[test]
    fn json_lines() {
        let t = product_table(&margins(&[1, 1]), 10).unwrap();
        let line = serde_json::to_string(&t[0]).unwrap();
        assert_eq!(
            line,
            r#"{"a":{"n":[1,1],"entries":[[0,1],[1,0]]},"b":{"n":[1,1],"entries":[[0,1],[1,0]]},"c":{"n":[1,1],"entries":[[1,0],[0,1]]},"coeff":"1/1"}"#
        );
        let x = multiply_basis(&t[0].a, &t[0].b).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(serde_json::from_str::<AlgebraElement>(&s).unwrap(), x);
    }
}
