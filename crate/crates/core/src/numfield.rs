//! Number fields `Q(delta)` containing `i`, grown by adjoining roots of irreducible
//! polynomials. Each field keeps a primitive generator, so an extension of an
//! extension is again a simple extension of `Q`; the chain of adjoined
//! polynomials is kept as a level history.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::arith::{fmt_rational, rational_to_f64, Field, Gaussian, Rational, Ring};
use crate::error::{GermError, Result};
use crate::poly::{resultant, Bivariate, UniPoly};

/// Default cap on the absolute degree of a field.
pub const DEFAULT_TOWER_CAP: usize = 64;

/// Simple algebraic extension `Q[t] / (minpoly)`.
pub struct NumberField {
    minpoly: UniPoly<Rational>,
    /// Representation of `i`.
    i_image: Vec<Rational>,
    /// Generator values of the complex embeddings sending `i` to `+i`.
    embeddings: Vec<Complex64>,
    /// Relative degrees of the successive adjunctions.
    levels: Vec<usize>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField(degree {}, levels {:?})", self.degree(), self.levels)
    }
}

impl NumberField {
    /// The Gaussian field `Q(i)` with generator `i`.
    pub fn gaussian() -> Arc<NumberField> {
        let minpoly = UniPoly::new(vec![Rational::one(), Rational::zero(), Rational::one()]);
        Arc::new(NumberField {
            minpoly,
            i_image: vec![Rational::zero(), Rational::one()],
            embeddings: vec![Complex64::new(0.0, 1.0)],
            levels: vec![2],
        })
    }

    pub fn degree(&self) -> usize {
        self.minpoly.deg0()
    }

    pub fn minpoly(&self) -> &UniPoly<Rational> {
        &self.minpoly
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// Generator values of the embeddings with `i -> +i`.
    pub fn embeddings(&self) -> &[Complex64] {
        &self.embeddings
    }

    pub fn element(self: &Arc<Self>, c: Vec<Rational>) -> AlgNum {
        AlgNum::in_field(self, UniPoly::new(c))
    }

    pub fn gen(self: &Arc<Self>) -> AlgNum {
        self.element(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_gaussian(self: &Arc<Self>, g: &Gaussian) -> AlgNum {
        let c = UniPoly::constant(g.re.clone())
            + UniPoly::new(self.i_image.clone()).scale(&g.im);
        AlgNum::in_field(self, c)
    }

    pub fn i(self: &Arc<Self>) -> AlgNum {
        self.element(self.i_image.clone())
    }

    /// `Res_t(minpoly(t), p(z - k t))`, a rational polynomial in `z` of degree `deg p * degree`.
    pub fn norm(&self, p: &UniPoly<AlgNum>, k: i64) -> UniPoly<Rational> {
        let lin = Bivariate::<Rational>::y() - Bivariate::x().scale(&Rational::from_int(k));
        let mut acc = Bivariate::<Rational>::zero();
        let mut pw = Bivariate::one();
        for c in p.coeffs() {
            let ct = Bivariate::from_terms(c.rep().into_iter().enumerate().map(|(j, a)| ((j as u32, 0), a)));
            acc = acc + ct * pw.clone();
            pw = pw * lin.clone();
        }
        let m = Bivariate::from_terms(
            self.minpoly.coeffs().iter().enumerate().map(|(j, a)| ((j as u32, 0), a.clone())),
        );
        resultant(&m.as_x_poly(), &acc.as_x_poly())
    }

    fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b) || a.minpoly == b.minpoly
    }

    /// Adjoins a root of `pi`, which must be irreducible over this field.
    /// Returns the new field, the embedding of this field into it and the root.
    pub fn adjoin(self: &Arc<Self>, pi: &UniPoly<AlgNum>, cap: usize) -> Result<(Arc<NumberField>, FieldMap, AlgNum)> {
        let e = pi.degree().expect("adjoining a root of the zero polynomial");
        assert!(e >= 1);
        if e == 1 {
            let root = -(pi.coeff(0).div(&pi.coeff(1)));
            return Ok((self.clone(), FieldMap::identity(self), root.promote(self)));
        }
        let degree = self.degree() * e;
        if degree > cap {
            return Err(GermError::TowerCap { degree, cap });
        }
        let pi = pi.monic();
        let n = self.degree();
        for k in shifts() {
            let norm = self.norm(&pi, k).monic();
            debug_assert_eq!(norm.deg0(), n * e);
            if !norm.is_squarefree() {
                continue;
            }
            let roots = complex_roots(&norm);
            let mut field = NumberField {
                minpoly: norm,
                i_image: Vec::new(),
                embeddings: Vec::new(),
                levels: self.levels.iter().copied().chain([e]).collect(),
            };
            let new = Arc::new(NumberField { minpoly: field.minpoly.clone(), i_image: vec![], embeddings: vec![], levels: vec![] });
            // old generator: gcd over the new field of m(s) and pi(delta' - k s, s)
            let dp = new.gen();
            let ms: UniPoly<AlgNum> = self.minpoly.map(|a| AlgNum::rational(a.clone()));
            let s_lin = UniPoly::new(vec![dp.clone(), AlgNum::rational(-Rational::from_int(k))]);
            let mut g = UniPoly::<AlgNum>::zero();
            let mut pw = UniPoly::<AlgNum>::one();
            for c in pi.coeffs() {
                let cs: UniPoly<AlgNum> = UniPoly::new(c.rep().into_iter().map(AlgNum::rational).collect());
                g = g + cs * pw.clone();
                pw = pw * s_lin.clone();
            }
            let h = ms.gcd(&g);
            if h.degree() != Some(1) {
                return Err(GermError::Inconsistent(format!(
                    "adjunction gcd has degree {:?}; polynomial not irreducible",
                    h.degree()
                )));
            }
            let t_img = -h.coeff(0);
            let map_tmp = FieldMap::new(self, &new, t_img.clone());
            let i_img = map_tmp.apply(&self.i());
            field.i_image = i_img.c.clone().into_coeffs();
            field.embeddings = roots
                .into_iter()
                .filter(|r| (i_img.to_complex(*r) - Complex64::new(0.0, 1.0)).norm() < 1e-6)
                .collect();
            let field = Arc::new(field);
            let t_img = AlgNum::in_field(&field, t_img.c);
            let root = field.gen() - t_img.clone() * AlgNum::rational(Rational::from_int(k));
            let map = FieldMap::new(self, &field, t_img);
            if field.embeddings.len() * 2 != field.degree() {
                return Err(GermError::Inconsistent("embedding count mismatch".into()));
            }
            return Ok((field, map, root));
        }
        unreachable!("some shift gives a squarefree norm")
    }
}

pub(crate) fn shifts() -> impl Iterator<Item = i64> {
    (0..).flat_map(|n: i64| if n == 0 { vec![0] } else { vec![n, -n] })
}

/// Embedding of one number field into another, determined by the image of the generator.
#[derive(Clone, Debug)]
pub struct FieldMap {
    pub from: Arc<NumberField>,
    pub to: Arc<NumberField>,
    powers: Vec<AlgNum>,
}

impl FieldMap {
    pub fn new(from: &Arc<NumberField>, to: &Arc<NumberField>, gen_image: AlgNum) -> Self {
        let gen_image = gen_image.promote(to);
        let mut powers = vec![AlgNum::one().promote(to)];
        for _ in 1..from.degree() {
            let next = powers.last().unwrap().clone() * gen_image.clone();
            powers.push(next);
        }
        FieldMap { from: from.clone(), to: to.clone(), powers }
    }

    pub fn identity(k: &Arc<NumberField>) -> Self {
        FieldMap::new(k, k, k.gen())
    }

    pub fn gen_image(&self) -> AlgNum {
        if self.powers.len() > 1 {
            self.powers[1].clone()
        } else {
            self.to.gen()
        }
    }

    pub fn apply(&self, a: &AlgNum) -> AlgNum {
        match &a.k {
            None => a.clone(),
            Some(k) => {
                debug_assert!(NumberField::same(k, &self.from), "map applied outside its domain");
                let mut acc = AlgNum::zero().promote(&self.to);
                for (c, p) in a.c.coeffs().iter().zip(&self.powers) {
                    if !c.is_zero() {
                        acc = acc + p.clone() * AlgNum::rational(c.clone());
                    }
                }
                acc
            }
        }
    }

    /// `other` after `self`.
    pub fn then(&self, other: &FieldMap) -> FieldMap {
        FieldMap::new(&self.from, &other.to, other.apply(&self.gen_image()))
    }
}

/// Element of a [`NumberField`], or a rational constant when no field is attached.
#[derive(Clone)]
pub struct AlgNum {
    c: UniPoly<Rational>,
    k: Option<Arc<NumberField>>,
}

impl AlgNum {
    pub fn rational(q: Rational) -> Self {
        AlgNum { c: UniPoly::constant(q), k: None }
    }

    fn in_field(k: &Arc<NumberField>, c: UniPoly<Rational>) -> Self {
        let c = if c.deg0() >= k.degree() { c.rem(&k.minpoly) } else { c };
        AlgNum { c, k: Some(k.clone()) }
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.k.as_ref()
    }

    /// Coefficients in the power basis of the generator.
    pub fn rep(&self) -> Vec<Rational> {
        self.c.coeffs().to_vec()
    }

    /// Attaches the field `k`; only valid for rational constants or elements of `k`.
    pub fn promote(self, k: &Arc<NumberField>) -> Self {
        match &self.k {
            Some(own) => {
                debug_assert!(NumberField::same(own, k));
                self
            }
            None => AlgNum { c: self.c, k: Some(k.clone()) },
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.c.deg0() == 0 {
            Some(self.c.coeff(0))
        } else {
            None
        }
    }

    /// Value under the embedding sending the generator to `delta`.
    pub fn to_complex(&self, delta: Complex64) -> Complex64 {
        self.c
            .coeffs()
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, q| acc * delta + rational_to_f64(q))
    }

    fn join(&self, o: &Self) -> Option<Arc<NumberField>> {
        match (&self.k, &o.k) {
            (Some(a), Some(b)) => {
                assert!(NumberField::same(a, b), "arithmetic across different number fields");
                Some(a.clone())
            }
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        }
    }

    fn build(k: Option<Arc<NumberField>>, c: UniPoly<Rational>) -> Self {
        match k {
            Some(k) => AlgNum::in_field(&k, c),
            None => AlgNum { c, k: None },
        }
    }
}

impl PartialEq for AlgNum {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c
    }
}

impl fmt::Debug for AlgNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for AlgNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, q) in self.c.coeffs().iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{}", fmt_rational(q))?,
                1 => write!(f, "{}*t", fmt_rational(q))?,
                _ => write!(f, "{}*t^{j}", fmt_rational(q))?,
            }
        }
        Ok(())
    }
}

impl Zero for AlgNum {
    fn zero() -> Self {
        AlgNum { c: UniPoly::zero(), k: None }
    }
    fn is_zero(&self) -> bool {
        self.c.is_zero()
    }
}

impl One for AlgNum {
    fn one() -> Self {
        AlgNum::rational(Rational::one())
    }
}

impl Add for AlgNum {
    type Output = AlgNum;
    fn add(self, o: AlgNum) -> AlgNum {
        let k = self.join(&o);
        AlgNum { c: self.c + o.c, k }
    }
}

impl Sub for AlgNum {
    type Output = AlgNum;
    fn sub(self, o: AlgNum) -> AlgNum {
        let k = self.join(&o);
        AlgNum { c: self.c - o.c, k }
    }
}

impl Neg for AlgNum {
    type Output = AlgNum;
    fn neg(self) -> AlgNum {
        AlgNum { c: -self.c, k: self.k }
    }
}

impl Mul for AlgNum {
    type Output = AlgNum;
    fn mul(self, o: AlgNum) -> AlgNum {
        let k = self.join(&o);
        AlgNum::build(k, self.c * o.c)
    }
}

impl Ring for AlgNum {
    fn div_exact(&self, rhs: &Self) -> Self {
        self.div(rhs)
    }
}

impl Field for AlgNum {
    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        match &self.k {
            None => AlgNum::rational(self.c.coeff(0).recip()),
            Some(k) => {
                let (g, s, _) = self.c.ext_gcd(&k.minpoly);
                debug_assert!(g.is_one());
                AlgNum::in_field(k, s)
            }
        }
    }

    fn from_rational(q: &Rational) -> Self {
        AlgNum::rational(q.clone())
    }
}

/// Complex roots of a squarefree rational polynomial by Aberth iteration with Newton polishing.
pub fn complex_roots(p: &UniPoly<Rational>) -> Vec<Complex64> {
    let n = p.deg0();
    if n == 0 {
        return Vec::new();
    }
    let lc = rational_to_f64(&p.lc());
    let a: Vec<Complex64> = p.coeffs().iter().map(|q| Complex64::new(rational_to_f64(q) / lc, 0.0)).collect();
    let da: Vec<Complex64> = (1..=n).map(|j| a[j] * j as f64).collect();
    let eval = |c: &[Complex64], z: Complex64| c.iter().rev().fold(Complex64::zero(), |acc, v| acc * z + v);
    // Fujiwara bound
    let radius = (0..n)
        .map(|j| (a[j].norm()).powf(1.0 / (n - j) as f64))
        .fold(0.0f64, f64::max)
        * 2.0
        + 1e-3;
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius * 0.5 + 0.1, 0.4 + 2.0 * std::f64::consts::PI * j as f64 / n as f64))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for j in 0..n {
            let pz = eval(&a, z[j]);
            let dz = eval(&da, z[j]);
            if pz.norm() == 0.0 {
                continue;
            }
            let ratio = pz / dz;
            let s: Complex64 = (0..n).filter(|&l| l != j).map(|l| (z[j] - z[l]).inv()).sum();
            let w = ratio / (Complex64::one() - ratio * s);
            z[j] -= w;
            moved = moved.max(w.norm() / (1.0 + z[j].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let d = eval(&da, *r);
            if d.norm() > 0.0 {
                *r -= eval(&a, *r) / d;
            }
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn qpoly(v: &[i64]) -> UniPoly<AlgNum> {
        UniPoly::new(v.iter().map(|&c| AlgNum::rational(int(c))).collect())
    }

    #[test]
    fn gaussian_field_arithmetic() {
        let k = NumberField::gaussian();
        let i = k.i();
        assert_eq!(i.clone() * i.clone(), -AlgNum::one());
        let z = k.from_gaussian(&Gaussian::new(int(3), int(4)));
        assert_eq!(z.clone() * z.inv(), AlgNum::one());
    }

    #[test]
    fn adjoin_sqrt2() {
        let k = NumberField::gaussian();
        let (k2, map, r) = k.adjoin(&qpoly(&[-2, 0, 1]), 64).unwrap();
        assert_eq!(k2.degree(), 4);
        assert_eq!(r.clone() * r.clone(), AlgNum::rational(int(2)));
        let i = map.apply(&k.i());
        assert_eq!(i.clone() * i, -AlgNum::one());
        assert_eq!(k2.embeddings().len(), 2);
        for &d in k2.embeddings() {
            let iv = map.apply(&k.i()).to_complex(d);
            assert!((iv - Complex64::new(0.0, 1.0)).norm() < 1e-9);
            assert!((r.to_complex(d).powi(2) - 2.0).norm() < 1e-9);
        }
    }

    #[test]
    fn tower_of_two_steps() {
        let k = NumberField::gaussian();
        let (k2, m1, r2) = k.adjoin(&qpoly(&[-2, 0, 1]), 64).unwrap();
        // adjoin a cube root of sqrt 2
        let pi = UniPoly::new(vec![-r2.clone(), AlgNum::zero(), AlgNum::zero(), AlgNum::one()]);
        let (k3, m2, c) = k2.adjoin(&pi, 64).unwrap();
        assert_eq!(k3.degree(), 12);
        assert_eq!(k3.levels(), &[2, 2, 3]);
        let r2_in_k3 = m2.apply(&r2);
        assert_eq!(c.clone() * c.clone() * c, r2_in_k3);
        let comp = m1.then(&m2);
        assert_eq!(comp.apply(&k.i()), m2.apply(&m1.apply(&k.i())));
    }

    #[test]
    fn linear_adjoin_stays() {
        let k = NumberField::gaussian();
        let (k2, _, r) = k.adjoin(&UniPoly::new(vec![-k.i(), AlgNum::one()]), 64).unwrap();
        assert_eq!(k2.degree(), 2);
        assert_eq!(r, k.i());
    }

    #[test]
    fn tower_cap_enforced() {
        let k = NumberField::gaussian();
        assert!(matches!(k.adjoin(&qpoly(&[-2, 0, 0, 1]), 4), Err(GermError::TowerCap { .. })));
    }

    #[test]
    fn roots_of_cyclotomic() {
        let p = UniPoly::new(vec![int(1), int(1), int(1), int(1), int(1)]);
        let r = complex_roots(&p);
        assert_eq!(r.len(), 4);
        for z in r {
            assert!((z.powi(5) - 1.0).norm() < 1e-12);
        }
    }
}
