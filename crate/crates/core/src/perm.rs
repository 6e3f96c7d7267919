//! Brute-force ground truth: permutations of `{0, .., N-1}`, their double-coset
//! labels, and products computed directly in the group algebra.
//!
//! Composition is `(h . g)(x) = h(g(x))`. The algebra product of two basis
//! elements `Xi{a} . Xi{b}` is the average of `h . g` over `g` in `xi{a}` and
//! `h` in `xi{b}`; [`convolve`] uses the same order, `delta_g * delta_h = delta_{h . g}`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraElement;
use crate::arith::Rational;
use crate::coset::{enumerate_coset_matrices, CosetMatrix, Margins};
use crate::error::{Error, Result};

/// Default largest `N` the oracle will enumerate (`8! = 40320`).
pub const DEFAULT_LIMIT: u32 = 8;
/// No configuration may raise the limit past this.
pub const HARD_LIMIT: u32 = 9;

/// Basis positions `(a, b, c)`.
type Triple = (usize, usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::InvalidIndex(format!(
                    "not a permutation: {images:?}"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: u32) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn transposition(n: u32, x: u32, y: u32) -> Self {
        let mut images: Vec<u32> = (0..n).collect();
        images.swap(x as usize, y as usize);
        Permutation { images }
    }

    /// Uniform random permutation: Fisher-Yates shuffle driven by `ChaCha8Rng::seed_from_u64(seed)`.
    pub fn random(n: u32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut images: Vec<u32> = (0..n).collect();
        images.shuffle(&mut rng);
        Permutation { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `self . g`, i.e. apply `g` first.
    pub fn after(&self, g: &Permutation) -> Permutation {
        assert_eq!(self.len(), g.len());
        Permutation {
            images: g.images.iter().map(|&x| self.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y as usize] = x as u32;
        }
        Permutation { images }
    }
}

/// All permutations of `{0, .., n-1}` in lexicographic order.
pub fn all_permutations(n: u32) -> Vec<Permutation> {
    let mut cur: Vec<u32> = (0..n).collect();
    let mut out = vec![Permutation {
        images: cur.clone(),
    }];
    // next_permutation
    loop {
        let len = cur.len();
        if len < 2 {
            return out;
        }
        let mut i = len - 1;
        while i > 0 && cur[i - 1] >= cur[i] {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        let mut j = len - 1;
        while cur[j] <= cur[i - 1] {
            j -= 1;
        }
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(Permutation {
            images: cur.clone(),
        });
    }
}

/// Splitting of `{0, .., N-1}` into consecutive blocks `P_j` of sizes `n_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YoungPartition {
    margins: Margins,
    block_of: Vec<usize>,
    starts: Vec<u32>,
}

impl YoungPartition {
    pub fn new(margins: &Margins) -> Self {
        let mut block_of = Vec::with_capacity(margins.total() as usize);
        let mut starts = Vec::with_capacity(margins.nu());
        for (j, &n) in margins.sizes().iter().enumerate() {
            starts.push(block_of.len() as u32);
            block_of.extend(std::iter::repeat_n(j, n as usize));
        }
        YoungPartition {
            margins: margins.clone(),
            block_of,
            starts,
        }
    }

    pub fn margins(&self) -> &Margins {
        &self.margins
    }

    pub fn degree(&self) -> u32 {
        self.block_of.len() as u32
    }

    pub fn block_of(&self, x: u32) -> usize {
        self.block_of[x as usize]
    }

    /// The range of points forming block `j`.
    pub fn block(&self, j: usize) -> std::ops::Range<u32> {
        let s = self.starts[j];
        s..s + self.margins.size(j)
    }

    fn classify_raw(&self, g: &Permutation) -> Vec<u32> {
        let nu = self.margins.nu();
        let mut a = vec![0u32; nu * nu];
        for (x, &y) in g.images.iter().enumerate() {
            a[self.block_of[x] * nu + self.block_of[y as usize]] += 1;
        }
        a
    }

    /// `a_ij = #(g(P_i) n P_j)`.
    pub fn classify(&self, g: &Permutation) -> CosetMatrix {
        assert_eq!(
            g.len() as u32,
            self.degree(),
            "permutation degree does not match partition"
        );
        CosetMatrix::from_raw(&self.margins, self.classify_raw(g))
    }
}

pub fn classify(g: &Permutation, yp: &YoungPartition) -> CosetMatrix {
    yp.classify(g)
}

/// Brute-force engine with a configurable size limit.
#[derive(Debug, Clone)]
pub struct Oracle {
    yp: YoungPartition,
    group: Vec<Permutation>,
}

impl Oracle {
    pub fn new(margins: &Margins, limit: u32) -> Result<Self> {
        let limit = limit.min(HARD_LIMIT);
        let n = margins.total();
        if n > limit {
            return Err(Error::LimitExceeded { n, limit });
        }
        Ok(Oracle {
            yp: YoungPartition::new(margins),
            group: all_permutations(n),
        })
    }

    pub fn partition(&self) -> &YoungPartition {
        &self.yp
    }

    pub fn margins(&self) -> &Margins {
        self.yp.margins()
    }

    pub fn group(&self) -> &[Permutation] {
        &self.group
    }

    /// Every `g` with `classify(g) = m`, in lexicographic order.
    pub fn enumerate_coset(&self, m: &CosetMatrix) -> Result<Vec<Permutation>> {
        self.check(m)?;
        Ok(self
            .group
            .iter()
            .filter(|g| self.yp.classify_raw(g) == m.entries())
            .cloned()
            .collect())
    }

    /// Groups the whole of `S_N` by double coset.
    pub fn cosets(&self) -> BTreeMap<CosetMatrix, Vec<Permutation>> {
        let mut out: BTreeMap<CosetMatrix, Vec<Permutation>> = BTreeMap::new();
        for g in &self.group {
            out.entry(self.yp.classify(g)).or_default().push(g.clone());
        }
        out
    }

    fn check(&self, m: &CosetMatrix) -> Result<()> {
        if m.margins() != self.margins() {
            return Err(Error::MarginMismatch(
                m.margins().sizes().to_vec(),
                self.margins().sizes().to_vec(),
            ));
        }
        Ok(())
    }

    /// Coefficient of `Xi{c}` in `Xi{a} Xi{b}` by counting all pairs `(g, h)`.
    pub fn structure_constant_pairs(
        &self,
        a: &CosetMatrix,
        b: &CosetMatrix,
        c: &CosetMatrix,
    ) -> Result<Rational> {
        self.check(a)?;
        self.check(b)?;
        self.check(c)?;
        let xa = self.enumerate_coset(a)?;
        let xb = self.enumerate_coset(b)?;
        let mut count = 0u64;
        for g in &xa {
            for h in &xb {
                if self.yp.classify_raw(&h.after(g)) == c.entries() {
                    count += 1;
                }
            }
        }
        let mass = BigInt::from(xa.len()) * BigInt::from(xb.len());
        Ok(Rational::new(BigInt::from(count), mass))
    }

    /// Same constant from a fixed representative `x0` of `xi{c}`: count `g` in `xi{a}`
    /// with `x0 . g^-1` in `xi{b}`, times `mu{c}`, over `mu{a} mu{b}`.
    pub fn structure_constant_with_representative(
        &self,
        a: &CosetMatrix,
        b: &CosetMatrix,
        c: &CosetMatrix,
        x0: &Permutation,
    ) -> Result<Rational> {
        self.check(a)?;
        self.check(b)?;
        self.check(c)?;
        if self.yp.classify_raw(x0) != c.entries() {
            return Err(Error::InvalidMatrix(format!(
                "representative is not in the coset {c}"
            )));
        }
        let mut count = 0u64;
        for g in &self.group {
            if self.yp.classify_raw(g) == a.entries()
                && self.yp.classify_raw(&x0.after(&g.inverse())) == b.entries()
            {
                count += 1;
            }
        }
        let num = BigInt::from(count) * c.coset_size();
        Ok(Rational::new(num, a.coset_size() * b.coset_size()))
    }

    /// Representative mode with the lexicographically first element of `xi{c}`.
    pub fn structure_constant(
        &self,
        a: &CosetMatrix,
        b: &CosetMatrix,
        c: &CosetMatrix,
    ) -> Result<Rational> {
        let x0 = self
            .enumerate_coset(c)?
            .into_iter()
            .next()
            .expect("double cosets are nonempty");
        self.structure_constant_with_representative(a, b, c, &x0)
    }

    /// Every structure constant at once, keyed by `(a, b, c)`; zeros are omitted.
    pub fn table(&self) -> BTreeMap<(CosetMatrix, CosetMatrix, CosetMatrix), Rational> {
        let basis = enumerate_coset_matrices(self.margins());
        let index: HashMap<Vec<u32>, usize> = basis
            .iter()
            .enumerate()
            .map(|(k, m)| (m.entries().to_vec(), k))
            .collect();
        let sizes: Vec<BigInt> = basis.iter().map(|m| m.coset_size()).collect();
        let reps: Vec<Permutation> = {
            let mut reps: Vec<Option<Permutation>> = vec![None; basis.len()];
            for g in &self.group {
                let k = index[&self.yp.classify_raw(g)];
                if reps[k].is_none() {
                    reps[k] = Some(g.clone());
                }
            }
            reps.into_iter().map(|r| r.unwrap()).collect()
        };
        let labels: Vec<usize> = self
            .group
            .iter()
            .map(|g| index[&self.yp.classify_raw(g)])
            .collect();
        let per_c: Vec<Vec<(Triple, Rational)>> = (0..basis.len())
            .into_par_iter()
            .map(|c| {
                let x0 = &reps[c];
                let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
                for (g, &a) in self.group.iter().zip(&labels) {
                    let b = index[&self.yp.classify_raw(&x0.after(&g.inverse()))];
                    *counts.entry((a, b)).or_default() += 1;
                }
                counts
                    .into_iter()
                    .map(|((a, b), n)| {
                        let q = Rational::new(BigInt::from(n) * &sizes[c], &sizes[a] * &sizes[b]);
                        ((a, b, c), q)
                    })
                    .collect()
            })
            .collect();
        per_c
            .into_iter()
            .flatten()
            .map(|((a, b, c), q)| ((basis[a].clone(), basis[b].clone(), basis[c].clone()), q))
            .collect()
    }

    /// `Xi{a} Xi{b}` computed by composing every pair of coset elements.
    pub fn multiply_basis(&self, a: &CosetMatrix, b: &CosetMatrix) -> Result<AlgebraElement> {
        let xa = self.enumerate_coset(a)?;
        let xb = self.enumerate_coset(b)?;
        let mut counts: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for g in &xa {
            for h in &xb {
                *counts.entry(self.yp.classify_raw(&h.after(g))).or_default() += 1;
            }
        }
        let mass = BigInt::from(xa.len()) * BigInt::from(xb.len());
        let mut out = AlgebraElement::zero(self.margins());
        for (entries, n) in counts {
            out.add_term(
                CosetMatrix::from_raw(self.margins(), entries),
                Rational::new(BigInt::from(n), mass.clone()),
            );
        }
        Ok(out)
    }

    /// Bilinear extension of [`Oracle::multiply_basis`].
    pub fn multiply(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        let mut out = AlgebraElement::zero(self.margins());
        for (a, p) in x.terms() {
            for (b, q) in y.terms() {
                let prod = self.multiply_basis(a, b)?;
                out = out.add(&prod.scale(&(p * q)))?;
            }
        }
        Ok(out)
    }

    pub fn young_projector(&self) -> GroupAlgebraVector {
        let members: Vec<&Permutation> = self
            .group
            .iter()
            .filter(|g| self.yp.classify_raw(g) == CosetMatrix::identity(self.margins()).entries())
            .collect();
        let w = Rational::new(BigInt::one(), BigInt::from(members.len()));
        GroupAlgebraVector::from_terms(members.into_iter().map(|g| (g.clone(), w.clone())))
    }

    /// `Xi{m}` as a vector in the group algebra.
    pub fn basis_vector(&self, m: &CosetMatrix) -> Result<GroupAlgebraVector> {
        let coset = self.enumerate_coset(m)?;
        let w = Rational::new(BigInt::one(), BigInt::from(coset.len()));
        Ok(GroupAlgebraVector::from_terms(
            coset.into_iter().map(|g| (g, w.clone())),
        ))
    }

    /// Reads a bi-invariant vector back as a combination of the `Xi` basis.
    ///
    /// Returns `None` if `v` is not constant on some double coset.
    pub fn to_algebra(&self, v: &GroupAlgebraVector) -> Option<AlgebraElement> {
        let mut per_coset: BTreeMap<CosetMatrix, (Rational, usize)> = BTreeMap::new();
        for (g, q) in &v.terms {
            let e = per_coset
                .entry(self.yp.classify(g))
                .or_insert((q.clone(), 0));
            if &e.0 != q {
                return None;
            }
            e.1 += 1;
        }
        let mut out = AlgebraElement::zero(self.margins());
        for (m, (q, count)) in per_coset {
            let size = m.coset_size();
            if BigInt::from(count) != size {
                return None;
            }
            out.add_term(m, q * Rational::from_integer(size));
        }
        Some(out)
    }
}

/// Sparse element of `Q[S_N]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupAlgebraVector {
    terms: BTreeMap<Permutation, Rational>,
}

impl GroupAlgebraVector {
    pub fn from_terms<I: IntoIterator<Item = (Permutation, Rational)>>(it: I) -> Self {
        let mut terms: BTreeMap<Permutation, Rational> = BTreeMap::new();
        for (g, q) in it {
            *terms.entry(g).or_insert_with(Rational::zero) += q;
        }
        terms.retain(|_, q| !q.is_zero());
        GroupAlgebraVector { terms }
    }

    pub fn delta(g: Permutation) -> Self {
        Self::from_terms([(g, Rational::one())])
    }

    pub fn terms(&self) -> &BTreeMap<Permutation, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, g: &Permutation) -> Rational {
        self.terms.get(g).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .chain(&other.terms)
                .map(|(g, q)| (g.clone(), q.clone())),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(g, q)| (g.clone(), q * s)))
    }
}

/// Group-algebra product with `delta_g * delta_h = delta_{h . g}`.
pub fn convolve(x: &GroupAlgebraVector, y: &GroupAlgebraVector) -> GroupAlgebraVector {
    let mut terms: BTreeMap<Permutation, Rational> = BTreeMap::new();
    for (g, p) in &x.terms {
        for (h, q) in &y.terms {
            *terms.entry(h.after(g)).or_insert_with(Rational::zero) += p * q;
        }
    }
    terms.retain(|_, q| !q.is_zero());
    GroupAlgebraVector { terms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn margins(n: &[u32]) -> Margins {
        Margins::new(n.to_vec()).unwrap()
    }

    #[test]
    fn permutation_basics() {
        let g = Permutation::new(vec![1, 2, 0]).unwrap();
        assert_eq!(g.after(&g.inverse()), Permutation::identity(3));
        let h = Permutation::transposition(3, 0, 1);
        // apply g then h: 0 -> 1 -> 0
        assert_eq!(h.after(&g).images(), &[0, 2, 1]);
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert_eq!(all_permutations(4).len(), 24);
        assert!(all_permutations(4).windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn classify_examples() {
        let yp = YoungPartition::new(&margins(&[2, 3]));
        assert_eq!(
            yp.classify(&Permutation::identity(5)),
            CosetMatrix::identity(&margins(&[2, 3]))
        );
        let swap = Permutation::transposition(5, 0, 2);
        assert_eq!(yp.classify(&swap).entries(), &[1, 1, 1, 2]);
    }

    #[test]
    fn classify_random_recount() {
        let m = margins(&[2, 3]);
        let yp = YoungPartition::new(&m);
        let g = Permutation::random(5, 0);
        let got = yp.classify(&g);
        for i in 0..2 {
            for j in 0..2 {
                let image: Vec<u32> = yp.block(i).map(|x| g.apply(x)).collect();
                let count = image.iter().filter(|y| yp.block(j).contains(y)).count() as u32;
                assert_eq!(got.get(i, j), count);
            }
        }
    }

    #[test]
    fn limit_is_enforced() {
        assert!(matches!(
            Oracle::new(&margins(&[5, 4]), 8),
            Err(Error::LimitExceeded { n: 9, limit: 8 })
        ));
        assert!(Oracle::new(&margins(&[5, 5]), 12).is_err());
        assert!(Oracle::new(&margins(&[5, 4]), 9).is_ok());
    }

    #[test]
    fn enumerate_coset_examples() {
        let o = Oracle::new(&margins(&[3]), 8).unwrap();
        assert_eq!(
            o.enumerate_coset(&CosetMatrix::identity(&margins(&[3])))
                .unwrap()
                .len(),
            6
        );
        let o = Oracle::new(&margins(&[1, 1]), 8).unwrap();
        let anti = CosetMatrix::new(margins(&[1, 1]), vec![0, 1, 1, 0]).unwrap();
        assert_eq!(
            o.enumerate_coset(&anti).unwrap(),
            vec![Permutation::transposition(2, 0, 1)]
        );
        let o = Oracle::new(&margins(&[2, 2]), 8).unwrap();
        let m = CosetMatrix::new(margins(&[2, 2]), vec![1, 1, 1, 1]).unwrap();
        assert_eq!(
            BigInt::from(o.enumerate_coset(&m).unwrap().len()),
            m.coset_size()
        );
        assert_eq!(m.coset_size(), BigInt::from(16));
    }

    #[test]
    fn oracle_modes_agree_and_unit_acts_trivially() {
        let m = margins(&[1, 2]);
        let o = Oracle::new(&m, 8).unwrap();
        let basis = enumerate_coset_matrices(&m);
        let id = CosetMatrix::identity(&m);
        for a in &basis {
            for b in &basis {
                for c in &basis {
                    let p = o.structure_constant_pairs(a, b, c).unwrap();
                    assert_eq!(p, o.structure_constant(a, b, c).unwrap());
                    for x0 in o.enumerate_coset(c).unwrap() {
                        assert_eq!(
                            p,
                            o.structure_constant_with_representative(a, b, c, &x0)
                                .unwrap()
                        );
                    }
                }
                let unit = o.structure_constant_pairs(&id, a, b).unwrap();
                assert_eq!(unit, if a == b { int(1) } else { int(0) });
            }
        }
    }

    #[test]
    fn transposition_squares_to_identity() {
        let m = margins(&[1, 1]);
        let o = Oracle::new(&m, 8).unwrap();
        let anti = CosetMatrix::new(m.clone(), vec![0, 1, 1, 0]).unwrap();
        assert_eq!(
            o.structure_constant(&anti, &anti, &CosetMatrix::identity(&m))
                .unwrap(),
            int(1)
        );
        assert_eq!(o.structure_constant(&anti, &anti, &anti).unwrap(), int(0));
    }

    #[test]
    fn full_table_three_singletons_matches_double_loop() {
        let m = margins(&[1, 1, 1]);
        let o = Oracle::new(&m, 8).unwrap();
        let table = o.table();
        // With trivial Young subgroup every coset is a single permutation, so the
        // table is the multiplication table of S_3: exactly 36 unit entries.
        assert_eq!(table.len(), 36);
        let yp = o.partition();
        for g in o.group() {
            for h in o.group() {
                let key = (yp.classify(g), yp.classify(h), yp.classify(&h.after(g)));
                assert_eq!(table[&key], int(1));
            }
        }
    }

    #[test]
    fn projector_is_idempotent_and_averages_cosets() {
        let m = margins(&[2, 1]);
        let o = Oracle::new(&m, 8).unwrap();
        let pi = o.young_projector();
        assert_eq!(convolve(&pi, &pi), pi);
        let id = GroupAlgebraVector::delta(Permutation::identity(3));
        assert_eq!(convolve(&id, &pi), pi);
        for g in o.group() {
            let v = convolve(&convolve(&pi, &GroupAlgebraVector::delta(g.clone())), &pi);
            let mat = o.partition().classify(g);
            assert_eq!(v, o.basis_vector(&mat).unwrap());
        }
    }

    #[test]
    fn permutation_json() {
        let g = Permutation::new(vec![2, 0, 1]).unwrap();
        assert_eq!(serde_json::to_string(&g).unwrap(), "[2,0,1]");
    }
}
