use young_cosets::arith::{factorial, int, ratio};
use young_cosets::coset::{Margins, OffDiagonalType};
use young_cosets::eps::{bracket, EpsPolynomial, EpsRingElement};
use young_cosets::nu2::*;
use young_cosets::perm::{Oracle, DEFAULT_LIMIT};
use young_cosets::universal::universal_structure_constant;
use young_cosets::Rational;

fn grid(n1: u32, n2: u32) -> impl Iterator<Item = (u32, u32, u32)> {
    let top = n1.min(n2);
    (0..=top).flat_map(move |a| (0..=top).flat_map(move |b| (0..=top).map(move |c| (a, b, c))))
}

fn fact(n: i64) -> Rational {
    Rational::from_integer(factorial(n as u32))
}

#[test]
fn closed_form_matches_sum() {
    for n1 in 0..=8 {
        for n2 in 0..=8 {
            if n1.min(n2) > 4 {
                continue;
            }
            for (a, b, c) in grid(n1, n2) {
                assert_eq!(
                    s_closed_form(a, b, c, n1, n2).unwrap(),
                    s_sum(a, b, c, n1, n2).unwrap(),
                    "{a} {b} {c} {n1} {n2}"
                );
            }
        }
    }
}

#[test]
fn closed_form_parameters_in_the_unshifted_case() {
    // c >= a, c >= b and a + b <= n2: the summation starts at sigma = 0
    for (a, b, c, n1, n2) in [
        (1, 2, 2, 4, 3),
        (2, 2, 3, 5, 4),
        (1, 1, 1, 2, 2),
        (2, 1, 3, 3, 3),
    ] {
        let (pre, upper, lower) = closed_form_parameters(a, b, c, n1, n2).unwrap().unwrap();
        let (a, b, c, n1, n2) = (a as i64, b as i64, c as i64, n1 as i64, n2 as i64);
        assert_eq!(
            upper,
            [
                int(a + b - c).clone() * int(-1),
                int(-a),
                int(-b),
                int(c - n1)
            ]
        );
        let mut lower = lower.to_vec();
        lower.sort();
        let mut want = vec![int(c - b + 1), int(c - a + 1), int(n2 - a - b + 1)];
        want.sort();
        assert_eq!(lower, want);
        let display = fact(a) * fact(b) * fact(n1 - a) * fact(n2 - a) * fact(n1 - b) * fact(n2 - b)
            / (fact(n1)
                * fact(n2)
                * fact(n1 - c)
                * fact(n2 - a - b)
                * fact(a + b - c)
                * fact(c - a)
                * fact(c - b));
        assert_eq!(pre, display);
    }
}

#[test]
fn boundary_and_shifted_branches() {
    // a + b = n2, a + b > n2, and c < max(a, b)
    for (a, b, c, n1, n2) in [
        (2, 2, 2, 4, 4),
        (3, 2, 2, 5, 3),
        (3, 3, 1, 6, 4),
        (2, 3, 1, 3, 3),
        (4, 4, 0, 4, 5),
    ] {
        let s = s_sum(a, b, c, n1, n2).unwrap();
        assert_eq!(s_closed_form(a, b, c, n1, n2).unwrap(), s);
        assert_eq!(s_product_formula(a, b, c, n1, n2).unwrap(), s);
    }
}

#[test]
fn sum_matches_product_formula() {
    for n1 in 1..=5 {
        for n2 in 1..=5 {
            for (a, b, c) in grid(n1, n2) {
                assert_eq!(
                    s_sum(a, b, c, n1, n2).unwrap(),
                    s_product_formula(a, b, c, n1, n2).unwrap(),
                    "{a} {b} {c} {n1} {n2}"
                );
            }
        }
    }
}

#[test]
fn sum_matches_oracle() {
    for (n1, n2) in [(1, 1), (2, 2), (2, 3), (3, 3), (1, 4), (3, 4), (2, 5)] {
        let oracle = Oracle::new(&Margins::new(vec![n1, n2]).unwrap(), DEFAULT_LIMIT).unwrap();
        let table = oracle.table();
        for (a, b, c) in grid(n1, n2) {
            let key = (
                phi(a, n1, n2).unwrap(),
                phi(b, n1, n2).unwrap(),
                phi(c, n1, n2).unwrap(),
            );
            let want = table.get(&key).cloned().unwrap_or_default();
            assert_eq!(s_sum(a, b, c, n1, n2).unwrap(), want);
        }
    }
    assert_eq!(
        s_oracle(1, 1, 1, 2, 2, DEFAULT_LIMIT).unwrap(),
        s_sum(1, 1, 1, 2, 2).unwrap()
    );
    assert_eq!(
        s_constant(Method::Oracle, 1, 2, 1, 3, 3).unwrap(),
        s_constant(Method::Closed, 1, 2, 1, 3, 3).unwrap()
    );
}

#[test]
fn commutative() {
    for n1 in 0..=6 {
        for n2 in 0..=6 {
            for (a, b, c) in grid(n1, n2) {
                assert_eq!(
                    s_sum(a, b, c, n1, n2).unwrap(),
                    s_sum(b, a, c, n1, n2).unwrap()
                );
            }
        }
    }
}

#[test]
fn associativity_identity() {
    for n1 in 0..=6 {
        for n2 in 0..=6 {
            assert!(
                associativity_violations(n1, n2).unwrap().is_empty(),
                "{n1} {n2}"
            );
        }
    }
}

#[test]
fn small_explicit_values() {
    // phi_1^2 at n = (2, 2): phi_1 phi_1 = 1/4 phi_0 + 1/2 phi_1 + 1/4 phi_2
    assert_eq!(s_sum(1, 1, 0, 2, 2).unwrap(), ratio(1, 4));
    assert_eq!(s_sum(1, 1, 1, 2, 2).unwrap(), ratio(1, 2));
    assert_eq!(s_sum(1, 1, 2, 2, 2).unwrap(), ratio(1, 4));
}

fn offdiag(a: u32) -> OffDiagonalType {
    OffDiagonalType::from_triples(2, &[(0, 1, a), (1, 0, a)]).unwrap()
}

#[test]
fn universal_matches_general_formula() {
    for a in 0..=3 {
        for b in 0..=3 {
            for c in 0..=6 {
                let general =
                    universal_structure_constant(&offdiag(a), &offdiag(b), &offdiag(c)).unwrap();
                assert_eq!(universal_s_nu2(a, b, c).unwrap(), general, "{a} {b} {c}");
            }
        }
    }
}

#[test]
fn universal_diagonal_case() {
    for a in 0..=4u32 {
        let f = Rational::from_integer(factorial(a));
        let num = EpsPolynomial::monomial(2, vec![a, a], &f * &f);
        let den: Vec<(usize, u32)> = (1..a)
            .map(|m| (0, m))
            .chain((1..a).map(|m| (1, m)))
            .collect();
        assert_eq!(
            universal_s_nu2(a, a, 0).unwrap(),
            EpsRingElement::new(num, &den)
        );
        let _ = bracket(2, 0, a, 0).unwrap();
    }
}

#[test]
fn universal_exponents_follow_sigma_and_tau() {
    // a = 2, b = 1, c = 2: terms (sigma, tau) = (0, 1) and (1, 0) start at eps_1 and eps_2
    let e = universal_s_nu2(2, 1, 2).unwrap();
    let lowest = e.expand(1);
    assert_eq!(lowest.constant_term(), int(0));
    assert_eq!(lowest.linear_coefficient(0), int(2));
    assert_eq!(lowest.linear_coefficient(1), int(2));
}

#[test]
fn universal_specializes_to_finite() {
    for n1 in 1..=4 {
        for n2 in 1..=4 {
            let m = Margins::new(vec![n1, n2]).unwrap();
            for (a, b, c) in grid(n1, n2) {
                let u = universal_s_nu2(a, b, c).unwrap();
                assert_eq!(
                    u.specialize(&m).unwrap(),
                    s_sum(a, b, c, n1, n2).unwrap(),
                    "{a} {b} {c} {n1} {n2}"
                );
            }
        }
    }
}

#[test]
fn universal_pole_beyond_block_size() {
    let m = Margins::new(vec![2, 3]).unwrap();
    assert!(universal_s_nu2(3, 3, 0).unwrap().specialize(&m).is_err());
}
