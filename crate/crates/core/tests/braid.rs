use young_cosets::algebra::AlgebraElement;
use young_cosets::arith::ratio;
use young_cosets::braid::*;
use young_cosets::coset::{CosetMatrix, Margins};
use young_cosets::perm::{
    convolve, GroupAlgebraVector, Oracle, Permutation, YoungPartition, DEFAULT_LIMIT,
};
use young_cosets::Rational;

fn margins(n: &[u32]) -> Margins {
    Margins::new(n.to_vec()).unwrap()
}

fn mat(n: &Margins, rows: &[&[u32]]) -> CosetMatrix {
    CosetMatrix::from_rows(n.clone(), rows).unwrap()
}

fn r(i: usize, j: usize, n: &Margins) -> AlgebraElement {
    r_element(i - 1, j - 1, n).unwrap()
}

// The two targets of r_12 r_23 written with general block sizes.
fn targets(n: &Margins) -> (CosetMatrix, CosetMatrix, CosetMatrix) {
    let (a, b, c) = (n.size(0), n.size(1), n.size(2));
    let big = mat(n, &[&[a - 1, 1, 0], &[1, b - 2, 1], &[0, 1, c - 1]]);
    let shifted = mat(n, &[&[a - 1, 0, 1], &[1, b - 1, 0], &[0, 1, c - 1]]);
    let other = mat(n, &[&[a - 1, 1, 0], &[0, b - 1, 1], &[1, 0, c - 1]]);
    (big, shifted, other)
}

#[test]
fn displayed_product_coefficients() {
    for n in [[2u32, 2, 2], [2, 4, 3], [3, 3, 3], [1, 3, 2], [4, 2, 1]] {
        let n = margins(&n);
        let n2 = n.size(1) as i64;
        let (big, shifted, other) = targets(&n);
        let p = r(1, 2, &n).multiply(&r(2, 3, &n)).unwrap();
        assert_eq!(p.coefficient(&big), ratio(n2 - 1, n2));
        assert_eq!(p.coefficient(&shifted), ratio(1, n2));
        assert_eq!(p.terms().len(), if n2 == 1 { 1 } else { 2 });
        // the opposite order moves the 1/n_2 weight onto the mirrored matrix
        let q = r(2, 3, &n).multiply(&r(1, 2, &n)).unwrap();
        assert_eq!(q.coefficient(&big), ratio(n2 - 1, n2));
        assert_eq!(q.coefficient(&other), ratio(1, n2));
    }
}

#[test]
fn witness_weights() {
    for n in [[3u32, 3, 3], [2, 2, 2], [1, 2, 3], [2, 5, 1]] {
        let n = margins(&n);
        let n2 = n.size(1) as i64;
        let (_, shifted, other) = targets(&n);
        let w = commutator_witness(0, 1, 2, &n).unwrap();
        assert_eq!(w.terms().len(), 2);
        assert_eq!(w.coefficient(&shifted), ratio(-1, n2));
        assert_eq!(w.coefficient(&other), ratio(1, n2));
        assert_eq!(w.mass(), Rational::from_integer(0.into()));
    }
    let n = margins(&[3, 3, 3]);
    let w = commutator_witness(0, 1, 2, &n).unwrap();
    assert!(w
        .terms()
        .values()
        .all(|q| *q == ratio(1, 3) || *q == ratio(-1, 3)));
}

#[test]
fn disjoint_pairs_commute_as_single_basis_element() {
    let n = margins(&[1, 1, 1, 1]);
    let x = r(1, 2, &n).multiply(&r(3, 4, &n)).unwrap();
    let y = r(3, 4, &n).multiply(&r(1, 2, &n)).unwrap();
    assert_eq!(x, y);
    let expect = mat(
        &n,
        &[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]],
    );
    assert_eq!(x, AlgebraElement::basis(&expect));
}

#[test]
fn three_index_relations() {
    for n in [[2u32, 2, 2], [1, 2, 3], [3, 3, 3]] {
        let rep = check_relations(&margins(&n)).unwrap();
        assert_eq!(rep.count(Relation::ThreeIndex), 3);
        assert!(rep.all_hold(), "{n:?}");
    }
}

#[test]
fn four_index_relations() {
    for n in [[1u32, 1, 1, 1], [2, 1, 1, 2], [2, 2, 2, 2]] {
        let rep = check_relations(&margins(&n)).unwrap();
        assert_eq!(rep.count(Relation::FourIndex), 3);
        assert_eq!(rep.count(Relation::ThreeIndex), 12);
        assert!(rep.all_hold(), "{n:?}");
    }
}

#[test]
fn oracle_route_agrees() {
    for n in [
        &[2u32, 2, 2][..],
        &[1, 2, 3],
        &[1, 1, 1, 1],
        &[2, 1, 1, 2],
        &[1, 1, 2, 3],
    ] {
        let n = margins(n);
        let oracle = Oracle::new(&n, DEFAULT_LIMIT).unwrap();
        let a = check_relations_oracle(&n, &oracle).unwrap();
        assert_eq!(a, check_relations(&n).unwrap());
        assert!(a.all_hold());
    }
}

#[test]
fn normalization_is_needed_for_unequal_blocks() {
    let rep = check_relations_unnormalized(&margins(&[1, 2, 3])).unwrap();
    assert!(!rep.all_hold());
    // equal blocks make the normalization a common scalar
    assert!(check_relations_unnormalized(&margins(&[2, 2, 2]))
        .unwrap()
        .all_hold());
}

#[test]
fn symmetric_in_indices() {
    let n = margins(&[1, 2, 3, 2]);
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                assert_eq!(r_element(i, j, &n).unwrap(), r_element(j, i, &n).unwrap());
            }
        }
    }
}

#[test]
fn averaged_transposition_in_group_algebra() {
    let n = margins(&[2, 1, 2]);
    let oracle = Oracle::new(&n, DEFAULT_LIMIT).unwrap();
    let yp = YoungPartition::new(&n);
    let t = Permutation::transposition(5, yp.block(0).start, yp.block(1).start);
    let pi = oracle.young_projector();
    let lhs = convolve(&convolve(&pi, &GroupAlgebraVector::delta(t)), &pi);
    assert_eq!(oracle.to_algebra(&lhs), Some(r(1, 2, &n)));
}
