//! Irreducible factorization over `Q` and over number fields.
//!
//! Over `Q` the Zassenhaus-style factorizer of the `algebraics` crate is used on
//! the integer primitive part. Over a number field `K = Q(delta)` a squarefree
//! polynomial is shifted until its norm is squarefree, the norm is factored over
//! `Q`, and each rational factor is pulled back by a gcd over `K`.

use std::sync::Arc;

use algebraics::polynomial::Polynomial;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::arith::{Field, Rational};
use crate::numfield::{shifts, AlgNum, NumberField};
use crate::poly::UniPoly;

/// Monic irreducible factors over `Q` with multiplicities.
pub fn factor_rational(p: &UniPoly<Rational>) -> Vec<(UniPoly<Rational>, u32)> {
    if p.deg0() == 0 {
        return Vec::new();
    }
    let lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let factors = Polynomial::<BigInt>::from(ints).factor();
    let mut out: Vec<(UniPoly<Rational>, u32)> = factors
        .polynomial_factors
        .into_iter()
        .map(|f| {
            let c: Vec<Rational> = f.polynomial.into_coefficients().into_iter().map(Rational::from_integer).collect();
            (UniPoly::new(c).monic(), f.power as u32)
        })
        .filter(|(f, _)| f.deg0() > 0)
        .collect();
    out.sort_by(|a, b| a.0.deg0().cmp(&b.0.deg0()).then_with(|| cmp_coeffs(&a.0, &b.0)));
    out
}

fn cmp_coeffs(a: &UniPoly<Rational>, b: &UniPoly<Rational>) -> std::cmp::Ordering {
    a.coeffs().cmp(b.coeffs())
}

/// Substitutes `z + c` for `z`.
pub fn translate(p: &UniPoly<AlgNum>, c: &AlgNum) -> UniPoly<AlgNum> {
    p.compose(&UniPoly::new(vec![c.clone(), AlgNum::one()]))
}

/// Monic irreducible factors over `k` of a squarefree polynomial.
pub fn factor_squarefree_over(k: &Arc<NumberField>, p: &UniPoly<AlgNum>) -> Vec<UniPoly<AlgNum>> {
    let p = promote_poly(k, &p.monic());
    match p.degree() {
        None | Some(0) => return Vec::new(),
        Some(1) => return vec![p],
        _ => {}
    }
    let delta = k.gen();
    for s in shifts() {
        let norm = k.norm(&p, s);
        if !norm.is_squarefree() {
            continue;
        }
        // norm(z) = N(p(z - s delta)); pull factors back through the shift
        let shift = delta.clone() * AlgNum::rational(Rational::from_int(s));
        let shifted = translate(&p, &(-shift.clone()));
        let mut out = Vec::new();
        for (g, _) in factor_rational(&norm) {
            let gk = promote_poly(k, &g.map(|c| AlgNum::rational(c.clone())));
            let h = shifted.gcd(&gk);
            if h.deg0() > 0 {
                out.push(translate(&h, &shift).monic());
            }
        }
        debug_assert_eq!(out.iter().map(|f| f.deg0()).sum::<usize>(), p.deg0());
        return out;
    }
    unreachable!()
}

/// Monic irreducible factors over `k` with multiplicities.
pub fn factor_over(k: &Arc<NumberField>, p: &UniPoly<AlgNum>) -> Vec<(UniPoly<AlgNum>, u32)> {
    let mut out = Vec::new();
    for (part, d) in p.squarefree() {
        for f in factor_squarefree_over(k, &part) {
            out.push((f, d));
        }
    }
    out
}

fn promote_poly(k: &Arc<NumberField>, p: &UniPoly<AlgNum>) -> UniPoly<AlgNum> {
    UniPoly::new(p.coeffs().iter().map(|c| c.clone().promote(k)).collect())
}

/// The cyclotomic polynomial `Phi_n` over `Q`.
pub fn cyclotomic(n: usize) -> UniPoly<Rational> {
    assert!(n >= 1);
    let mut p = UniPoly::monomial(Rational::one(), n) - UniPoly::one();
    for d in 1..n {
        if n % d == 0 {
            p = p.div_rem(&cyclotomic(d)).0;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, Gaussian};

    fn q(v: &[i64]) -> UniPoly<Rational> {
        UniPoly::new(v.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn rational_factorization() {
        // (z^2 - 2)(z + 1)^2
        let p = q(&[-2, 0, 1]) * q(&[1, 1]).pow(2);
        let f = factor_rational(&p);
        assert_eq!(f, vec![(q(&[1, 1]), 2), (q(&[-2, 0, 1]), 1)]);
        let p = q(&[3, 0, 6]); // 6 z^2 + 3
        assert_eq!(factor_rational(&p), vec![(UniPoly::new(vec![crate::arith::rat(1, 2), int(0), int(1)]), 1)]);
    }

    #[test]
    fn gaussian_splits_sum_of_squares() {
        let k = NumberField::gaussian();
        let p = q(&[1, 0, 1]).map(|c| AlgNum::rational(c.clone()));
        let f = factor_squarefree_over(&k, &p);
        assert_eq!(f.len(), 2);
        let prod = f.iter().fold(UniPoly::one(), |acc: UniPoly<AlgNum>, g| acc * g.clone());
        assert_eq!(prod, promote_poly(&k, &p));
    }

    #[test]
    fn irreducible_stays() {
        let k = NumberField::gaussian();
        let p = q(&[-2, 0, 1]).map(|c| AlgNum::rational(c.clone()));
        assert_eq!(factor_squarefree_over(&k, &p).len(), 1);
        // z^4 + 4 = (z^2 + 2z + 2)(z^2 - 2z + 2) splits further over Q(i) into 4 linear factors
        let p = q(&[4, 0, 0, 0, 1]).map(|c| AlgNum::rational(c.clone()));
        assert_eq!(factor_squarefree_over(&k, &p).len(), 4);
    }

    #[test]
    fn factor_in_extension() {
        let k = NumberField::gaussian();
        let sq2 = q(&[-2, 0, 1]).map(|c| AlgNum::rational(c.clone()));
        let (k2, _, _) = k.adjoin(&sq2, 64).unwrap();
        // z^4 - 4 = (z^2 - 2)(z^2 + 2) splits completely over Q(i, sqrt 2)
        let p = q(&[-4, 0, 0, 0, 1]).map(|c| AlgNum::rational(c.clone()));
        let f = factor_squarefree_over(&k2, &p);
        assert_eq!(f.len(), 4);
        // z^3 - 2 has no root in a field of degree 4
        let p = q(&[-2, 0, 0, 1]).map(|c| AlgNum::rational(c.clone()));
        assert_eq!(factor_squarefree_over(&k2, &p).len(), 1);
        let g = k.from_gaussian(&Gaussian::i());
        assert_eq!(g.clone() * g, -AlgNum::one());
    }

    #[test]
    fn cyclotomics() {
        assert_eq!(cyclotomic(1), q(&[-1, 1]));
        assert_eq!(cyclotomic(4), q(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), q(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), q(&[1, 0, -1, 0, 1]));
    }
}
