use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::arith::{Field, Ring};

/// Dense univariate polynomial, coefficients stored lowest degree first.
#[derive(Clone, PartialEq)]
pub struct UniPoly<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> UniPoly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn constant(c: R) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: R, deg: usize) -> Self {
        let mut v = vec![R::zero(); deg + 1];
        v[deg] = c;
        Self::new(v)
    }

    /// The polynomial `z`.
    pub fn var() -> Self {
        Self::monomial(R::one(), 1)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> R {
        self.coeffs.get(i).cloned().unwrap_or_else(R::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> R {
        self.coeffs.last().cloned().unwrap_or_else(R::zero)
    }

    /// Index of the lowest nonzero coefficient; `None` for the zero polynomial.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![R::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Self::new(v)
    }

    pub fn eval(&self, x: &R) -> R {
        self.coeffs
            .iter()
            .rev()
            .fold(R::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// Substitutes another polynomial for the variable.
    pub fn compose(&self, inner: &UniPoly<R>) -> UniPoly<R> {
        self.coeffs
            .iter()
            .rev()
            .fold(UniPoly::zero(), |acc, c| acc * inner.clone() + UniPoly::constant(c.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> UniPoly<S> {
        UniPoly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn truncate(&self, n: usize) -> Self {
        Self::new(self.coeffs.iter().take(n).cloned().collect())
    }

    /// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b`.
    pub fn prem(&self, b: &UniPoly<R>) -> UniPoly<R> {
        let db = b.degree().expect("pseudo-division by zero");
        let Some(da) = self.degree() else { return self.clone() };
        if da < db {
            return self.clone();
        }
        let lb = b.lc();
        let mut r = self.clone();
        let mut e = da - db + 1;
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let t = UniPoly::monomial(r.lc(), dr - db);
            r = r.scale(&lb) - t * b.clone();
            e -= 1;
        }
        let mut f = R::one();
        for _ in 0..e {
            f = f * lb.clone();
        }
        r.scale(&f)
    }

    /// Exact quotient over a ring, or `None` if `b` does not divide `self`.
    pub fn div_exact_checked(&self, b: &UniPoly<R>) -> Option<UniPoly<R>> {
        let db = b.degree().expect("division by zero polynomial");
        let lb = b.lc();
        let mut r = self.clone();
        let mut q = vec![R::zero(); self.deg0().saturating_sub(db) + 1];
        while let Some(dr) = r.degree() {
            if dr < db {
                return None;
            }
            let c = r.lc().div_exact(&lb);
            if c.clone() * lb.clone() != r.lc() {
                return None;
            }
            q[dr - db] = c.clone();
            r = r - UniPoly::monomial(c, dr - db) * b.clone();
        }
        Some(UniPoly::new(q))
    }
}

/// Resultant by the subresultant algorithm. Works over any ring with exact division.
pub fn resultant<R: Ring>(a: &UniPoly<R>, b: &UniPoly<R>) -> R {
    let (Some(mut da), Some(mut db)) = (a.degree(), b.degree()) else {
        return R::zero();
    };
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut sign_neg = false;
    if da < db {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut da, &mut db);
        if da % 2 == 1 && db % 2 == 1 {
            sign_neg = true;
        }
    }
    if db == 0 {
        let r = pow_ring(&b.lc(), da);
        return if sign_neg { -r } else { r };
    }
    let mut g = R::one();
    let mut h = R::one();
    loop {
        let da = a.deg0();
        let db = b.deg0();
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            sign_neg = !sign_neg;
        }
        let r = a.prem(&b);
        a = b;
        if r.is_zero() {
            return R::zero();
        }
        let denom = g.clone() * pow_ring(&h, delta);
        b = UniPoly::new(r.coeffs.iter().map(|c| c.div_exact(&denom)).collect());
        g = a.lc();
        // h <- g^delta / h^(delta - 1)
        h = if delta == 0 {
            h
        } else {
            pow_ring(&g, delta).div_exact(&pow_ring(&h, delta - 1))
        };
        if b.deg0() == 0 {
            let da = a.deg0();
            let res = if da == 0 {
                b.lc()
            } else {
                pow_ring(&b.lc(), da).div_exact(&pow_ring(&h, da - 1))
            };
            return if sign_neg { -res } else { res };
        }
    }
}

pub fn pow_ring<R: Ring>(x: &R, e: usize) -> R {
    let mut acc = R::one();
    for _ in 0..e {
        acc = acc * x.clone();
    }
    acc
}

impl<F: Field> UniPoly<F> {
    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * F::from_int(i as i64))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lc().inv();
        self.scale(&inv)
    }

    pub fn div_rem(&self, b: &UniPoly<F>) -> (UniPoly<F>, UniPoly<F>) {
        let db = b.degree().expect("division by zero polynomial");
        let inv = b.lc().inv();
        let mut r = self.coeffs.clone();
        let n = r.len();
        if n <= db {
            return (UniPoly::zero(), self.clone());
        }
        let mut q = vec![F::zero(); n - db];
        for k in (0..n - db).rev() {
            let c = r[k + db].clone() * inv.clone();
            if c.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                r[k + j] = r[k + j].clone() - c.clone() * bj.clone();
            }
            q[k] = c;
        }
        r.truncate(db);
        (UniPoly::new(q), UniPoly::new(r))
    }

    pub fn rem(&self, b: &UniPoly<F>) -> UniPoly<F> {
        self.div_rem(b).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, b: &UniPoly<F>) -> UniPoly<F> {
        let (mut a, mut b) = (self.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*a + t*b = g`, `g` monic.
    pub fn ext_gcd(&self, b: &UniPoly<F>) -> (UniPoly<F>, UniPoly<F>, UniPoly<F>) {
        let (mut r0, mut r1) = (self.clone(), b.clone());
        let (mut s0, mut s1) = (UniPoly::one(), UniPoly::zero());
        let (mut t0, mut t1) = (UniPoly::zero(), UniPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0 - q.clone() * s1.clone();
            s0 = std::mem::replace(&mut s1, s);
            let t = t0 - q * t1.clone();
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().inv();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).deg0() == 0
    }

    /// Yun's squarefree decomposition: monic parts with multiplicities.
    pub fn squarefree(&self) -> Vec<(UniPoly<F>, u32)> {
        let mut out = Vec::new();
        if self.deg0() == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let c = df.div_rem(&a0).0;
        let mut d = c - b.derivative();
        let mut i = 1;
        while b.deg0() > 0 {
            let a = b.gcd(&d);
            if a.deg0() > 0 {
                out.push((a.clone(), i));
            }
            let nb = b.div_rem(&a).0;
            let c = d.div_rem(&a).0;
            d = c - nb.derivative();
            b = nb;
            i += 1;
        }
        out
    }
}

impl<R: Ring> Zero for UniPoly<R> {
    fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<R: Ring> One for UniPoly<R> {
    fn one() -> Self {
        UniPoly::constant(R::one())
    }
}

impl<R: Ring> Add for UniPoly<R> {
    type Output = UniPoly<R>;
    fn add(self, o: UniPoly<R>) -> UniPoly<R> {
        let (mut long, short) = if self.coeffs.len() >= o.coeffs.len() { (self, o) } else { (o, self) };
        for (i, c) in short.coeffs.into_iter().enumerate() {
            long.coeffs[i] = long.coeffs[i].clone() + c;
        }
        UniPoly::new(long.coeffs)
    }
}

impl<R: Ring> Neg for UniPoly<R> {
    type Output = UniPoly<R>;
    fn neg(self) -> UniPoly<R> {
        UniPoly { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<R: Ring> Sub for UniPoly<R> {
    type Output = UniPoly<R>;
    fn sub(self, o: UniPoly<R>) -> UniPoly<R> {
        self + (-o)
    }
}

impl<R: Ring> Mul for UniPoly<R> {
    type Output = UniPoly<R>;
    fn mul(self, o: UniPoly<R>) -> UniPoly<R> {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut v = vec![R::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + a.clone() * b.clone();
            }
        }
        UniPoly::new(v)
    }
}

impl<R: Ring> Ring for UniPoly<R> {
    fn div_exact(&self, rhs: &Self) -> Self {
        self.div_exact_checked(rhs).expect("inexact polynomial division")
    }
}

impl<R: fmt::Debug> fmt::Debug for UniPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly{:?}", self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, Rational};

    fn p(v: &[i64]) -> UniPoly<Rational> {
        UniPoly::new(v.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn div_rem_and_gcd() {
        let a = p(&[-1, 0, 1]); // z^2 - 1
        let b = p(&[1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, p(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&p(&[1, 2, 1])), p(&[1, 1]));
    }

    #[test]
    fn yun_decomposition() {
        // (z-1)^2 (z+2)
        let f = p(&[-1, 1]).pow(2) * p(&[2, 1]);
        let sf = f.squarefree();
        assert_eq!(sf, vec![(p(&[2, 1]), 1), (p(&[-1, 1]), 2)]);
    }

    #[test]
    fn resultant_small() {
        // Res(z^2 - 2, z - 1) = 1 - 2 = -1 (b monic linear: a(1))
        assert_eq!(resultant(&p(&[-2, 0, 1]), &p(&[-1, 1])), int(-1));
        // Res(z^2+1, z^2-1) = 4
        assert_eq!(resultant(&p(&[1, 0, 1]), &p(&[-1, 0, 1])), int(4));
        // common root
        assert_eq!(resultant(&p(&[-1, 0, 1]), &p(&[1, 1])), int(0));
    }

    #[test]
    fn resultant_matches_root_product() {
        // a = (z-1)(z-2)(z-3), b = z^2 + z + 1: Res = prod b(root)
        let a = p(&[-1, 1]) * p(&[-2, 1]) * p(&[-3, 1]);
        let b = p(&[1, 1, 1]);
        let expected = int(3) * int(7) * int(13);
        assert_eq!(resultant(&a, &b), expected.clone());
        // Res(b, a) = (-1)^(3*2) Res(a, b)
        assert_eq!(resultant(&b, &a), expected);
    }

    #[test]
    fn ext_gcd_identity() {
        let a = p(&[1, 0, 1]);
        let b = p(&[-1, 1, 0, 1]);
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(s * a + t * b, g);
    }
}
