//! Averaged transpositions `r_ij = Pi r_ij Pi` and the infinitesimal braid
//! relations satisfied by their rescalings `n_i n_j r_ij`.

use serde::Serialize;

use crate::algebra::AlgebraElement;
use crate::arith::Rational;
use crate::coset::{CosetMatrix, Margins};
use crate::error::{Error, Result};
use crate::perm::Oracle;

/// Label of the double coset containing a transposition between blocks `i` and `j` (0-based).
pub fn r_matrix(i: usize, j: usize, margins: &Margins) -> Result<CosetMatrix> {
    let nu = margins.nu();
    if i == j || i >= nu || j >= nu {
        return Err(Error::InvalidIndex(format!(
            "need distinct block indices below {nu}, got {} and {}",
            i + 1,
            j + 1
        )));
    }
    let mut entries = vec![0u32; nu * nu];
    for k in 0..nu {
        entries[k * nu + k] = margins.size(k);
    }
    entries[i * nu + i] -= 1;
    entries[j * nu + j] -= 1;
    entries[i * nu + j] = 1;
    entries[j * nu + i] = 1;
    CosetMatrix::new(margins.clone(), entries)
}

pub fn r_element(i: usize, j: usize, margins: &Margins) -> Result<AlgebraElement> {
    Ok(AlgebraElement::basis(&r_matrix(i, j, margins)?))
}

/// `n_i n_j r_ij`.
pub fn r_tilde(i: usize, j: usize, margins: &Margins) -> Result<AlgebraElement> {
    let s = Rational::from_integer((margins.size(i) as u64 * margins.size(j) as u64).into());
    Ok(r_element(i, j, margins)?.scale(&s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `[r~_ij, r~_jk + r~_ik] = 0`.
    #[serde(rename = "(8)")]
    ThreeIndex,
    /// `[r~_ij, r~_kl] = 0` for pairwise distinct indices.
    #[serde(rename = "(9)")]
    FourIndex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationInstance {
    pub relation: Relation,
    /// 1-based block indices.
    pub indices: Vec<usize>,
    pub holds: bool,
    pub commutator: AlgebraElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BraidReport {
    pub margins: Margins,
    /// Generators carry the `n_i n_j` normalization.
    pub normalized: bool,
    pub instances: Vec<RelationInstance>,
}

impl BraidReport {
    pub fn all_hold(&self) -> bool {
        self.instances.iter().all(|r| r.holds)
    }

    pub fn count(&self, relation: Relation) -> usize {
        self.instances
            .iter()
            .filter(|r| r.relation == relation)
            .count()
    }
}

/// Relation instances up to the symmetry `r_ij = r_ji`: three-index ones as
/// `(i, j, k)` with `i < j`, four-index ones as `(i, j, k, l)` with `i < j`, `k < l`, `i < k`.
fn instances(nu: usize) -> Vec<(Relation, Vec<usize>)> {
    let mut out = Vec::new();
    for i in 0..nu {
        for j in i + 1..nu {
            for k in (0..nu).filter(|&k| k != i && k != j) {
                out.push((Relation::ThreeIndex, vec![i, j, k]));
            }
        }
    }
    for i in 0..nu {
        for j in i + 1..nu {
            for k in i + 1..nu {
                for l in k + 1..nu {
                    if k != j && l != j {
                        out.push((Relation::FourIndex, vec![i, j, k, l]));
                    }
                }
            }
        }
    }
    out
}

fn check_with<F>(margins: &Margins, normalized: bool, multiply: F) -> Result<BraidReport>
where
    F: Fn(&AlgebraElement, &AlgebraElement) -> Result<AlgebraElement>,
{
    let gen = |i: usize, j: usize| {
        if normalized {
            r_tilde(i, j, margins)
        } else {
            r_element(i, j, margins)
        }
    };
    let bracket = |x: &AlgebraElement, y: &AlgebraElement| -> Result<AlgebraElement> {
        multiply(x, y)?.sub(&multiply(y, x)?)
    };
    let mut out = Vec::new();
    for (relation, idx) in instances(margins.nu()) {
        let commutator = match relation {
            Relation::ThreeIndex => {
                let (i, j, k) = (idx[0], idx[1], idx[2]);
                bracket(&gen(i, j)?, &gen(j, k)?.add(&gen(i, k)?)?)?
            }
            Relation::FourIndex => bracket(&gen(idx[0], idx[1])?, &gen(idx[2], idx[3])?)?,
        };
        out.push(RelationInstance {
            relation,
            indices: idx.iter().map(|x| x + 1).collect(),
            holds: commutator.is_zero(),
            commutator,
        });
    }
    Ok(BraidReport {
        margins: margins.clone(),
        normalized,
        instances: out,
    })
}

/// Every relation instance for `margins`, with products from the structure-constant formula.
pub fn check_relations(margins: &Margins) -> Result<BraidReport> {
    check_with(margins, true, |x, y| x.multiply(y))
}

/// Same check with the unnormalized `r_ij`; three-index relations then generally fail
/// unless the block sizes involved are equal.
pub fn check_relations_unnormalized(margins: &Margins) -> Result<BraidReport> {
    check_with(margins, false, |x, y| x.multiply(y))
}

/// Same check with products computed by the permutation oracle.
pub fn check_relations_oracle(margins: &Margins, oracle: &Oracle) -> Result<BraidReport> {
    check_with(margins, true, |x, y| oracle.multiply(x, y))
}

/// `[r_jk, r_ij]` for pairwise distinct `i, j, k` (0-based).
pub fn commutator_witness(
    i: usize,
    j: usize,
    k: usize,
    margins: &Margins,
) -> Result<AlgebraElement> {
    if i == j || j == k || i == k {
        return Err(Error::InvalidIndex(
            "indices must be pairwise distinct".into(),
        ));
    }
    r_element(j, k, margins)?.commutator(&r_element(i, j, margins)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};
    use crate::perm::{Permutation, YoungPartition};

    fn margins(n: &[u32]) -> Margins {
        Margins::new(n.to_vec()).unwrap()
    }

    #[test]
    fn r_matrix_examples() {
        let m = margins(&[2, 2]);
        assert_eq!(r_matrix(0, 1, &m).unwrap().entries(), &[1, 1, 1, 1]);
        assert_eq!(r_matrix(0, 1, &m).unwrap(), r_matrix(1, 0, &m).unwrap());
        assert!(r_matrix(1, 1, &m).is_err());
        // degenerate blocks of size one are fine
        let m = margins(&[1, 1, 3]);
        assert_eq!(
            r_matrix(0, 1, &m).unwrap().entries(),
            &[0, 1, 0, 1, 0, 0, 0, 0, 3]
        );
    }

    #[test]
    fn transposition_classifies_to_r() {
        let m = margins(&[2, 3, 1]);
        let yp = YoungPartition::new(&m);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let x = yp.block(i).start;
            let y = yp.block(j).start;
            let g = Permutation::transposition(m.total(), x, y);
            assert_eq!(yp.classify(&g), r_matrix(i, j, &m).unwrap());
        }
    }

    #[test]
    fn instance_counts() {
        assert_eq!(instances(3).len(), 3);
        let four = instances(4);
        assert_eq!(
            four.iter().filter(|x| x.0 == Relation::ThreeIndex).count(),
            12
        );
        assert_eq!(
            four.iter().filter(|x| x.0 == Relation::FourIndex).count(),
            3
        );
    }

    #[test]
    fn witness_is_antisymmetric_and_massless() {
        let m = margins(&[2, 3, 2]);
        let w = commutator_witness(0, 1, 2, &m).unwrap();
        assert_eq!(w.mass(), int(0));
        let other = r_element(0, 1, &m)
            .unwrap()
            .commutator(&r_element(1, 2, &m).unwrap())
            .unwrap();
        assert_eq!(w, other.scale(&int(-1)));
        assert_eq!(w.terms().len(), 2);
        assert!(w
            .terms()
            .values()
            .all(|q| *q == ratio(1, 3) || *q == ratio(-1, 3)));
    }
}
