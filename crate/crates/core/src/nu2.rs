//! Two blocks: the basis `phi_a = Xi[[n1-a, a], [a, n2-a]]`, its structure
//! constants as finite sums and as terminating 4F3(1), and the universal version.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::algebra;
use crate::arith::{factorial, int, inv_factorial_signed, Rational};
use crate::coset::{CosetMatrix, Margins};
use crate::eps::{bracket, EpsPolynomial, EpsRingElement};
use crate::error::{Error, Result};
use crate::perm::{Oracle, DEFAULT_LIMIT};

fn check_range(a: u32, b: u32, c: u32, n1: u32, n2: u32) -> Result<()> {
    let top = n1.min(n2);
    if a > top || b > top || c > top {
        return Err(Error::InvalidIndex(format!(
            "indices {a},{b},{c} must not exceed min(n1,n2) = {top}"
        )));
    }
    Ok(())
}

fn fact(n: u32) -> Rational {
    Rational::from_integer(factorial(n))
}

fn outer(a: u32, b: u32, n1: u32, n2: u32) -> Rational {
    let ab = fact(a) * fact(b);
    &ab * &ab * fact(n1 - a) * fact(n2 - a) * fact(n1 - b) * fact(n2 - b) / (fact(n1) * fact(n2))
}

pub fn phi(a: u32, n1: u32, n2: u32) -> Result<CosetMatrix> {
    if a > n1.min(n2) {
        return Err(Error::InvalidIndex(format!(
            "phi_{a} needs a <= min({n1},{n2})"
        )));
    }
    CosetMatrix::new(Margins::new(vec![n1, n2])?, vec![n1 - a, a, a, n2 - a])
}

/// `s_ab^c` as the sum over `sigma = t_121`, `tau = t_212 = a + b - c - sigma`.
pub fn s_sum(a: u32, b: u32, c: u32, n1: u32, n2: u32) -> Result<Rational> {
    check_range(a, b, c, n1, n2)?;
    let (a, b, c, n1, n2) = (a as i64, b as i64, c as i64, n1 as i64, n2 as i64);
    let mut acc = Rational::zero();
    for sigma in 0..=a.min(b) {
        let tau = a + b - c - sigma;
        let term = [
            sigma,
            tau,
            a - sigma,
            b - sigma,
            a - tau,
            b - tau,
            n1 - a - b + tau,
            n2 - a - b + sigma,
        ]
        .iter()
        .fold(Rational::one(), |q, &k| q * inv_factorial_signed(k));
        acc += term;
    }
    Ok(acc * outer(a as u32, b as u32, n1 as u32, n2 as u32))
}

/// `4F3(upper; lower; 1)` for a series terminated by a nonpositive integer upper parameter.
pub fn f43_terminating(upper: &[Rational; 4], lower: &[Rational; 3]) -> Result<Rational> {
    let stop = upper
        .iter()
        .filter(|u| u.is_integer() && !u.is_positive())
        .map(|u| {
            (-u.to_integer())
                .to_u32()
                .ok_or_else(|| Error::InvalidParameters("termination index too large".into()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .ok_or_else(|| Error::InvalidParameters("no nonpositive integer upper parameter".into()))?;
    for l in lower {
        if l.is_integer() && !l.is_positive() && (-l.to_integer()) < stop.into() {
            return Err(Error::InvalidParameters(format!(
                "lower parameter {l} vanishes before the series ends at {stop}"
            )));
        }
    }
    let mut acc = Rational::zero();
    let mut term = Rational::one();
    for k in 0..=stop {
        acc += &term;
        if k == stop {
            break;
        }
        let mut num = Rational::one();
        for u in upper {
            num *= u + int(k as i64);
        }
        let mut den = int(k as i64 + 1);
        for l in lower {
            den *= l + int(k as i64);
        }
        term = term * num / den;
    }
    Ok(acc)
}

/// `(prefactor, upper, lower)` with `s = prefactor * 4F3(upper; lower; 1)`.
pub type ClosedForm = (Rational, [Rational; 4], [Rational; 3]);

/// Parameters of the closed form after shifting the summation to start at the
/// smallest admissible `sigma`. `None` when the sum is empty.
pub fn closed_form_parameters(
    a: u32,
    b: u32,
    c: u32,
    n1: u32,
    n2: u32,
) -> Result<Option<ClosedForm>> {
    check_range(a, b, c, n1, n2)?;
    let (a, b, c, n1, n2) = (a as i64, b as i64, c as i64, n1 as i64, n2 as i64);
    let lo = [0, a - c, b - c, a + b - n2].into_iter().max().unwrap();
    let hi = [a, b, a + b - c, n1 - c].into_iter().min().unwrap();
    if lo > hi {
        return Ok(None);
    }
    // factorials growing with sigma, then shrinking
    let p = [lo, c - b + lo, c - a + lo, n2 - a - b + lo];
    let q = [a + b - c - lo, a - lo, b - lo, n1 - c - lo];
    let zero = p
        .iter()
        .position(|&x| x == 0)
        .expect("some lower bound is attained");
    let mut pre = outer(a as u32, b as u32, n1 as u32, n2 as u32);
    for &x in p.iter().chain(q.iter()) {
        pre *= inv_factorial_signed(x);
    }
    let upper = q.map(|x| int(-x));
    let lower: Vec<Rational> = p
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != zero)
        .map(|(_, &x)| int(x + 1))
        .collect();
    Ok(Some((
        pre,
        upper,
        [lower[0].clone(), lower[1].clone(), lower[2].clone()],
    )))
}

pub fn s_closed_form(a: u32, b: u32, c: u32, n1: u32, n2: u32) -> Result<Rational> {
    match closed_form_parameters(a, b, c, n1, n2)? {
        None => Ok(Rational::zero()),
        Some((pre, upper, lower)) => Ok(pre * f43_terminating(&upper, &lower)?),
    }
}

pub fn s_product_formula(a: u32, b: u32, c: u32, n1: u32, n2: u32) -> Result<Rational> {
    check_range(a, b, c, n1, n2)?;
    algebra::structure_constant(&phi(a, n1, n2)?, &phi(b, n1, n2)?, &phi(c, n1, n2)?)
}

pub fn s_oracle(a: u32, b: u32, c: u32, n1: u32, n2: u32, limit: u32) -> Result<Rational> {
    check_range(a, b, c, n1, n2)?;
    let oracle = Oracle::new(&Margins::new(vec![n1, n2])?, limit)?;
    oracle.structure_constant(&phi(a, n1, n2)?, &phi(b, n1, n2)?, &phi(c, n1, n2)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Sum,
    Closed,
    ProductFormula,
    Oracle,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Method::Sum),
            "closed" => Ok(Method::Closed),
            "eq3" => Ok(Method::ProductFormula),
            "oracle" => Ok(Method::Oracle),
            _ => Err(Error::Parse(format!("unknown method {s:?}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Sum => "sum",
            Method::Closed => "closed",
            Method::ProductFormula => "eq3",
            Method::Oracle => "oracle",
        })
    }
}

pub fn s_constant(method: Method, a: u32, b: u32, c: u32, n1: u32, n2: u32) -> Result<Rational> {
    match method {
        Method::Sum => s_sum(a, b, c, n1, n2),
        Method::Closed => s_closed_form(a, b, c, n1, n2),
        Method::ProductFormula => s_product_formula(a, b, c, n1, n2),
        Method::Oracle => s_oracle(a, b, c, n1, n2, DEFAULT_LIMIT),
    }
}

/// Quadruples `(a, b, c, d)` where `sum_g s_ab^g s_gc^d != sum_g s_ag^d s_bc^g`.
pub fn associativity_violations(n1: u32, n2: u32) -> Result<Vec<[u32; 4]>> {
    let top = n1.min(n2);
    let r = top as usize + 1;
    let mut s = vec![Rational::zero(); r * r * r];
    for a in 0..=top {
        for b in 0..=top {
            for c in 0..=top {
                s[(a as usize * r + b as usize) * r + c as usize] = s_sum(a, b, c, n1, n2)?;
            }
        }
    }
    let at = |a: usize, b: usize, c: usize| &s[(a * r + b) * r + c];
    let quads: Vec<[usize; 4]> = (0..r)
        .flat_map(|a| {
            (0..r).flat_map(move |b| (0..r).flat_map(move |c| (0..r).map(move |d| [a, b, c, d])))
        })
        .collect();
    Ok(quads
        .into_par_iter()
        .filter(|&[a, b, c, d]| {
            let lhs: Rational = (0..r).map(|g| at(a, b, g) * at(g, c, d)).sum();
            let rhs: Rational = (0..r).map(|g| at(a, g, d) * at(b, c, g)).sum();
            lhs != rhs
        })
        .map(|q| q.map(|x| x as u32))
        .collect())
}

/// Universal two-block constant `s_ab^c` in `eps_1, eps_2`.
pub fn universal_s_nu2(a: u32, b: u32, c: u32) -> Result<EpsRingElement> {
    let mut acc = EpsRingElement::zero(2);
    if c > a + b {
        return Ok(acc);
    }
    let ab = fact(a) * fact(b);
    let ab2 = &ab * &ab;
    for sigma in 0..=a.min(b) {
        let Some(tau) = (a + b - c).checked_sub(sigma) else {
            break;
        };
        if tau > a.min(b) {
            continue;
        }
        let coeff = &ab2
            / (fact(sigma)
                * fact(tau)
                * fact(a - sigma)
                * fact(a - tau)
                * fact(b - sigma)
                * fact(b - tau));
        let (top1, top2) = (a + b - tau, a + b - sigma);
        let mut num = EpsPolynomial::monomial(2, vec![tau, sigma], coeff);
        for (lo, hi, j) in [(a, top1, 0), (b, top1, 0), (a, top2, 1), (b, top2, 1)] {
            num = &num * &bracket(2, lo, hi, j)?;
        }
        let den: Vec<(usize, u32)> = (1..top1)
            .map(|m| (0, m))
            .chain((1..top2).map(|m| (1, m)))
            .collect();
        acc = &acc + &EpsRingElement::new(num, &den);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    #[test]
    fn f43_basics() {
        let z = int(0);
        assert_eq!(
            f43_terminating(
                &[z.clone(), z.clone(), z.clone(), z.clone()],
                &[int(1), int(1), int(1)]
            )
            .unwrap(),
            int(1)
        );
        // first parameter -1: 1 + u2 u3 u4 / (l1 l2 l3)
        let v = f43_terminating(
            &[int(-1), int(2), ratio(1, 2), int(3)],
            &[int(4), int(5), ratio(3, 2)],
        )
        .unwrap();
        assert_eq!(v, int(1) - ratio(3, 30));
        assert!(
            f43_terminating(&[int(1), int(2), int(3), int(4)], &[int(1), int(1), int(1)]).is_err()
        );
        assert!(f43_terminating(
            &[int(-3), int(1), int(1), int(1)],
            &[int(-1), int(1), int(1)]
        )
        .is_err());
        // vanishing exactly after the last term is fine
        assert!(f43_terminating(
            &[int(-2), int(1), int(1), int(1)],
            &[int(-2), int(1), int(1)]
        )
        .is_ok());
    }

    #[test]
    fn identity_basis_element() {
        for b in 0..=3 {
            for c in 0..=3 {
                let want = if b == c { int(1) } else { int(0) };
                assert_eq!(s_sum(0, b, c, 3, 4).unwrap(), want);
                assert_eq!(s_closed_form(0, b, c, 3, 4).unwrap(), want);
            }
        }
        assert_eq!(s_closed_form(0, 0, 0, 5, 2).unwrap(), int(1));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(s_sum(3, 0, 0, 2, 5).is_err());
        assert!(phi(3, 2, 5).is_err());
    }

    #[test]
    fn universal_small_cases() {
        let e = universal_s_nu2(1, 1, 0).unwrap();
        assert_eq!(
            e,
            EpsRingElement::from_poly(EpsPolynomial::monomial(2, vec![1, 1], int(1)))
        );
        assert_eq!(universal_s_nu2(0, 3, 3).unwrap(), EpsRingElement::one(2));
        assert!(universal_s_nu2(1, 1, 3).unwrap().is_zero());
    }

    #[test]
    fn method_names_round_trip() {
        for m in [
            Method::Sum,
            Method::Closed,
            Method::ProductFormula,
            Method::Oracle,
        ] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
    }
}
