//! Integer matrices labelling double cosets `Y g Y` of `S_N` by a Young subgroup `Y`,
//! and their off-diagonal "types" used by the universal algebra.
//!
//! Indices are 0-based in memory and 1-based in every serialized form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::factorial;
use crate::error::{Error, Result};
use crate::tables::for_each_table;

/// Block sizes `n_1, ..., n_nu` of a Young subgroup.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Margins {
    n: Vec<u32>,
}

impl Margins {
    pub fn new(n: Vec<u32>) -> Result<Self> {
        if n.is_empty() {
            return Err(Error::InvalidMargins("need at least one block".into()));
        }
        if n.contains(&0) {
            return Err(Error::InvalidMargins(format!(
                "block sizes must be positive: {n:?}"
            )));
        }
        Ok(Margins { n })
    }

    pub fn nu(&self) -> usize {
        self.n.len()
    }

    pub fn sizes(&self) -> &[u32] {
        &self.n
    }

    pub fn size(&self, j: usize) -> u32 {
        self.n[j]
    }

    /// `N = n_1 + ... + n_nu`.
    pub fn total(&self) -> u32 {
        self.n.iter().sum()
    }

    /// Order of the Young subgroup, `prod n_j!`.
    pub fn young_order(&self) -> BigInt {
        self.n.iter().map(|&x| factorial(x)).product()
    }
}

impl<'de> Deserialize<'de> for Margins {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let n = Vec::<u32>::deserialize(d)?;
        Margins::new(n).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Margins {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.n.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A `nu x nu` matrix with row sums and column sums both equal to the margins.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CosetMatrix {
    // field order matters: the derived Ord is lexicographic on row-major entries
    entries: Vec<u32>,
    margins: Margins,
}

impl CosetMatrix {
    /// Row-major entries; validated against Eq-style margin conditions.
    pub fn new(margins: Margins, entries: Vec<u32>) -> Result<Self> {
        let nu = margins.nu();
        if entries.len() != nu * nu {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries, got {}",
                nu * nu,
                entries.len()
            )));
        }
        for j in 0..nu {
            let row: u32 = entries[j * nu..(j + 1) * nu].iter().sum();
            let col: u32 = (0..nu).map(|i| entries[i * nu + j]).sum();
            if row != margins.size(j) || col != margins.size(j) {
                return Err(Error::InvalidMatrix(format!(
                    "row/column {} sums ({row}, {col}) differ from n = {}",
                    j + 1,
                    margins.size(j)
                )));
            }
        }
        Ok(CosetMatrix { entries, margins })
    }

    pub fn from_rows(margins: Margins, rows: &[&[u32]]) -> Result<Self> {
        let flat = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(margins, flat)
    }

    /// `diag(n_1, ..., n_nu)`, the label of the Young subgroup itself.
    pub fn identity(margins: &Margins) -> Self {
        let nu = margins.nu();
        let mut entries = vec![0; nu * nu];
        for j in 0..nu {
            entries[j * nu + j] = margins.size(j);
        }
        CosetMatrix {
            entries,
            margins: margins.clone(),
        }
    }

    pub(crate) fn from_raw(margins: &Margins, entries: Vec<u32>) -> Self {
        debug_assert!(Self::new(margins.clone(), entries.clone()).is_ok());
        CosetMatrix {
            entries,
            margins: margins.clone(),
        }
    }

    pub fn margins(&self) -> &Margins {
        &self.margins
    }

    pub fn nu(&self) -> usize {
        self.margins.nu()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.nu() + j]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.nu()).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let nu = self.nu();
        let mut entries = vec![0; nu * nu];
        for i in 0..nu {
            for j in 0..nu {
                entries[j * nu + i] = self.get(i, j);
            }
        }
        CosetMatrix {
            entries,
            margins: self.margins.clone(),
        }
    }

    /// Number of permutations in the double coset: `prod (n_j!)^2 / prod a_ij!`.
    pub fn coset_size(&self) -> BigInt {
        let num = self.margins.young_order();
        let num = &num * &num;
        let den: BigInt = self.entries.iter().map(|&a| factorial(a)).product();
        let (q, r) = num.div_rem(&den);
        assert!(r.is_zero(), "coset size is not an integer for {self}");
        q
    }

    pub fn strip_diagonal(&self) -> OffDiagonalType {
        let nu = self.nu();
        let mut entries = self.entries.clone();
        for j in 0..nu {
            entries[j * nu + j] = 0;
        }
        OffDiagonalType { nu, entries }
    }
}

impl fmt::Display for CosetMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: Vec<u32>,
    entries: Vec<Vec<u32>>,
}

impl Serialize for CosetMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            n: self.margins.n.clone(),
            entries: self.rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CosetMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        let margins = Margins::new(raw.n).map_err(serde::de::Error::custom)?;
        let flat = raw.entries.into_iter().flatten().collect();
        CosetMatrix::new(margins, flat).map_err(serde::de::Error::custom)
    }
}

/// All coset matrices for `margins`, lexicographic on row-major entries.
pub fn enumerate_coset_matrices(margins: &Margins) -> Vec<CosetMatrix> {
    let mut out = Vec::new();
    for_each_table(margins.sizes(), margins.sizes(), |t| {
        out.push(CosetMatrix {
            entries: t.to_vec(),
            margins: margins.clone(),
        });
    });
    out
}

/// Off-diagonal part `{a_ij : i != j}` with balanced margins; diagonal slots are kept at zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OffDiagonalType {
    nu: usize,
    entries: Vec<u32>,
}

impl OffDiagonalType {
    pub fn zero(nu: usize) -> Self {
        OffDiagonalType {
            nu,
            entries: vec![0; nu * nu],
        }
    }

    /// Builds from 0-based `(i, j, value)` triples; repeated pairs accumulate.
    pub fn from_triples(nu: usize, triples: &[(usize, usize, u32)]) -> Result<Self> {
        if nu == 0 {
            return Err(Error::InvalidIndex("nu must be positive".into()));
        }
        let mut entries = vec![0; nu * nu];
        for &(i, j, v) in triples {
            if i >= nu || j >= nu || i == j {
                return Err(Error::InvalidIndex(format!(
                    "({}, {}) for nu = {nu}",
                    i + 1,
                    j + 1
                )));
            }
            entries[i * nu + j] += v;
        }
        Self::from_flat(nu, entries)
    }

    /// Row-major `nu x nu` entries; the diagonal must be zero.
    pub fn from_flat(nu: usize, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != nu * nu {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries",
                nu * nu
            )));
        }
        if (0..nu).any(|j| entries[j * nu + j] != 0) {
            return Err(Error::InvalidMatrix(
                "diagonal of an off-diagonal type must be zero".into(),
            ));
        }
        let t = OffDiagonalType { nu, entries };
        if let Some(j) = t.unbalanced_index() {
            return Err(Error::Unbalanced(j + 1));
        }
        Ok(t)
    }

    pub(crate) fn from_raw(nu: usize, entries: Vec<u32>) -> Self {
        OffDiagonalType { nu, entries }
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.nu + j]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn row_sum(&self, j: usize) -> u32 {
        (0..self.nu)
            .filter(|&k| k != j)
            .map(|k| self.get(j, k))
            .sum()
    }

    pub fn col_sum(&self, j: usize) -> u32 {
        (0..self.nu)
            .filter(|&i| i != j)
            .map(|i| self.get(i, j))
            .sum()
    }

    fn unbalanced_index(&self) -> Option<usize> {
        (0..self.nu).find(|&j| self.row_sum(j) != self.col_sum(j))
    }

    /// Membership in the set of balanced collections.
    pub fn is_balanced(&self) -> bool {
        self.unbalanced_index().is_none()
    }

    /// `a*_jj`, the common value of the off-diagonal row and column sums at `j`.
    pub fn star(&self, j: usize) -> u32 {
        self.col_sum(j)
    }

    pub fn stars(&self) -> Vec<u32> {
        (0..self.nu).map(|j| self.star(j)).collect()
    }

    /// Nonzero entries as 0-based `(i, j, value)` triples in row-major order.
    pub fn triples(&self) -> Vec<(usize, usize, u32)> {
        let nu = self.nu;
        (0..nu * nu)
            .filter(|&p| self.entries[p] != 0)
            .map(|p| (p / nu, p % nu, self.entries[p]))
            .collect()
    }

    /// Entrywise sum, the graded product of basis indices.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nu, other.nu);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| x + y)
            .collect();
        OffDiagonalType {
            nu: self.nu,
            entries,
        }
    }

    /// Completes the diagonal with `n_j - a*_jj`.
    pub fn embed(&self, margins: &Margins) -> Result<CosetMatrix> {
        if margins.nu() != self.nu {
            return Err(Error::RankMismatch(self.nu, margins.nu()));
        }
        let mut entries = self.entries.clone();
        for j in 0..self.nu {
            let star = self.star(j);
            let n = margins.size(j);
            if star > n {
                return Err(Error::Overflow {
                    block: j + 1,
                    star,
                    n,
                });
            }
            entries[j * self.nu + j] = n - star;
        }
        CosetMatrix::new(margins.clone(), entries)
    }

    /// Whether every `a*_jj <= n_j`.
    pub fn fits(&self, margins: &Margins) -> bool {
        (0..self.nu).all(|j| self.star(j) <= margins.size(j))
    }
}

pub fn embed_offdiagonal(t: &OffDiagonalType, margins: &Margins) -> Result<CosetMatrix> {
    t.embed(margins)
}

pub fn strip_diagonal(m: &CosetMatrix) -> OffDiagonalType {
    m.strip_diagonal()
}

impl fmt::Display for OffDiagonalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .triples()
            .iter()
            .map(|(i, j, v)| format!("{}{}:{}", i + 1, j + 1, v))
            .collect();
        write!(f, "{{{}}}", parts.join(" "))
    }
}

#[derive(Serialize, Deserialize)]
struct OffDiagJson {
    nu: usize,
    offdiag: Vec<(usize, usize, u32)>,
}

impl Serialize for OffDiagonalType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let offdiag = self
            .triples()
            .into_iter()
            .map(|(i, j, v)| (i + 1, j + 1, v))
            .collect();
        OffDiagJson {
            nu: self.nu,
            offdiag,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OffDiagonalType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = OffDiagJson::deserialize(d)?;
        let mut triples = Vec::with_capacity(raw.offdiag.len());
        for (i, j, v) in raw.offdiag {
            if i == 0 || j == 0 {
                return Err(serde::de::Error::custom("indices are 1-based"));
            }
            triples.push((i - 1, j - 1, v));
        }
        OffDiagonalType::from_triples(raw.nu, &triples).map_err(serde::de::Error::custom)
    }
}

/// Every balanced off-diagonal type of rank `nu` with entries at most `max_entry`, sorted.
pub fn enumerate_offdiagonal(nu: usize, max_entry: u32) -> Vec<OffDiagonalType> {
    let slots: Vec<usize> = (0..nu * nu).filter(|p| p / nu != p % nu).collect();
    let mut out = Vec::new();
    let mut cur = vec![0u32; nu * nu];
    fn rec(
        k: usize,
        slots: &[usize],
        nu: usize,
        max_entry: u32,
        cur: &mut Vec<u32>,
        out: &mut Vec<OffDiagonalType>,
    ) {
        if k == slots.len() {
            let t = OffDiagonalType {
                nu,
                entries: cur.clone(),
            };
            if t.is_balanced() {
                out.push(t);
            }
            return;
        }
        for v in 0..=max_entry {
            cur[slots[k]] = v;
            rec(k + 1, slots, nu, max_entry, cur, out);
        }
        cur[slots[k]] = 0;
    }
    rec(0, &slots, nu, max_entry, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: &[u32]) -> Margins {
        Margins::new(n.to_vec()).unwrap()
    }

    #[test]
    fn single_block() {
        let all = enumerate_coset_matrices(&m(&[3]));
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].entries(), &[3]);
        assert_eq!(all[0].coset_size(), BigInt::from(6));
    }

    #[test]
    fn two_singletons() {
        let all = enumerate_coset_matrices(&m(&[1, 1]));
        let flat: Vec<_> = all.iter().map(|x| x.entries().to_vec()).collect();
        assert_eq!(flat, vec![vec![0, 1, 1, 0], vec![1, 0, 0, 1]]);
        assert_eq!(all[0].coset_size(), BigInt::from(1));
    }

    #[test]
    fn two_blocks_count() {
        for n1 in 1..6 {
            for n2 in 1..6 {
                assert_eq!(
                    enumerate_coset_matrices(&m(&[n1, n2])).len() as u32,
                    n1.min(n2) + 1
                );
            }
        }
    }

    #[test]
    fn sizes_partition_the_group() {
        for n in [
            vec![1, 1],
            vec![2, 3],
            vec![1, 2, 3],
            vec![2, 2, 2, 1],
            vec![1, 1, 1, 1, 1],
        ] {
            let margins = m(&n);
            let total: BigInt = enumerate_coset_matrices(&margins)
                .iter()
                .map(|x| x.coset_size())
                .sum();
            assert_eq!(total, factorial(margins.total()), "{margins}");
        }
    }

    #[test]
    fn embed_examples() {
        let margins = m(&[2, 2]);
        let zero = OffDiagonalType::zero(2);
        assert_eq!(
            zero.embed(&margins).unwrap(),
            CosetMatrix::identity(&margins)
        );
        let t = OffDiagonalType::from_triples(2, &[(0, 1, 1), (1, 0, 1)]).unwrap();
        assert_eq!(t.embed(&margins).unwrap().entries(), &[1, 1, 1, 1]);
        let big = OffDiagonalType::from_triples(2, &[(0, 1, 3), (1, 0, 3)]).unwrap();
        assert_eq!(
            big.embed(&margins),
            Err(Error::Overflow {
                block: 1,
                star: 3,
                n: 2
            })
        );
    }

    #[test]
    fn strip_examples() {
        let margins = m(&[2, 3, 1]);
        assert!(CosetMatrix::identity(&margins).strip_diagonal().is_zero());
        let x = CosetMatrix::new(m(&[2, 2]), vec![1, 1, 1, 1]).unwrap();
        assert_eq!(x.strip_diagonal().triples(), vec![(0, 1, 1), (1, 0, 1)]);
    }

    #[test]
    fn unbalanced_rejected() {
        assert_eq!(
            OffDiagonalType::from_triples(2, &[(0, 1, 1)]),
            Err(Error::Unbalanced(1))
        );
        assert!(OffDiagonalType::from_triples(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).is_ok());
        assert!(OffDiagonalType::from_triples(2, &[(0, 0, 1)]).is_err());
    }

    #[test]
    fn invalid_matrix_rejected() {
        assert!(CosetMatrix::new(m(&[2, 2]), vec![2, 0, 1, 1]).is_err());
        assert!(CosetMatrix::new(m(&[2, 2]), vec![2, 0, 0]).is_err());
        assert!(Margins::new(vec![]).is_err());
        assert!(Margins::new(vec![1, 0]).is_err());
    }

    #[test]
    fn json_shapes() {
        let x = CosetMatrix::new(m(&[2, 2]), vec![1, 1, 1, 1]).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"n":[2,2],"entries":[[1,1],[1,1]]}"#);
        assert_eq!(serde_json::from_str::<CosetMatrix>(&s).unwrap(), x);
        let t = x.strip_diagonal();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"nu":2,"offdiag":[[1,2,1],[2,1,1]]}"#);
        assert_eq!(serde_json::from_str::<OffDiagonalType>(&s).unwrap(), t);
    }

    #[test]
    fn offdiagonal_census() {
        // nu = 2: a_12 = a_21 in 0..=2
        assert_eq!(enumerate_offdiagonal(2, 2).len(), 3);
        let all = enumerate_offdiagonal(3, 1);
        assert!(all.iter().all(|t| t.is_balanced()));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }
}
