use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::uni::UniPoly;
use crate::arith::{Field, Ring};

/// Sparse bivariate polynomial in `x` and `y`; keys are `(deg_x, deg_y)`.
#[derive(Clone, PartialEq)]
pub struct Bivariate<F> {
    terms: BTreeMap<(u32, u32), F>,
}

impl<F: Field> Bivariate<F> {
    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), F)>) -> Self {
        let mut out = Bivariate::zero();
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    pub fn x() -> Self {
        Self::from_terms([((1, 0), F::one())])
    }

    pub fn y() -> Self {
        Self::from_terms([((0, 1), F::one())])
    }

    pub fn constant(c: F) -> Self {
        Self::from_terms([((0, 0), c)])
    }

    pub fn add_term(&mut self, key: (u32, u32), c: F) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(F::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &F)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> F {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(F::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn deg_x(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn deg_y(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.0 + k.1).max().unwrap_or(0)
    }

    /// Lowest total degree of a term (the multiplicity at the origin).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0 + k.1).min()
    }

    pub fn constant_term(&self) -> F {
        self.coeff(0, 0)
    }

    /// Lowest homogeneous form.
    pub fn lowest_form(&self) -> Self {
        match self.order() {
            None => Bivariate::zero(),
            Some(n) => Self::from_terms(
                self.terms.iter().filter(|(k, _)| k.0 + k.1 == n).map(|(k, c)| (*k, c.clone())),
            ),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, a)| (*k, a.clone() * c.clone())))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    pub fn dx(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(k, _)| k.0 > 0)
                .map(|(k, c)| ((k.0 - 1, k.1), c.clone() * F::from_int(k.0 as i64))),
        )
    }

    pub fn dy(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(k, _)| k.1 > 0)
                .map(|(k, c)| ((k.0, k.1 - 1), c.clone() * F::from_int(k.1 as i64))),
        )
    }

    pub fn eval(&self, x: &F, y: &F) -> F {
        self.terms
            .iter()
            .fold(F::zero(), |acc, (k, c)| acc + c.clone() * pow_f(x, k.0) * pow_f(y, k.1))
    }

    /// The univariate polynomial `f(x, 0)`.
    pub fn at_y_zero(&self) -> UniPoly<F> {
        let mut v = vec![F::zero(); self.deg_x() as usize + 1];
        for (k, c) in &self.terms {
            if k.1 == 0 {
                v[k.0 as usize] = c.clone();
            }
        }
        UniPoly::new(v)
    }

    /// View as a polynomial in `x` whose coefficients are polynomials in `y`.
    pub fn as_x_poly(&self) -> UniPoly<UniPoly<F>> {
        let mut rows: Vec<Vec<F>> = vec![Vec::new(); self.deg_x() as usize + 1];
        for (k, c) in &self.terms {
            let row = &mut rows[k.0 as usize];
            if row.len() <= k.1 as usize {
                row.resize(k.1 as usize + 1, F::zero());
            }
            row[k.1 as usize] = c.clone();
        }
        UniPoly::new(rows.into_iter().map(UniPoly::new).collect())
    }

    pub fn from_x_poly(p: &UniPoly<UniPoly<F>>) -> Self {
        let mut out = Bivariate::zero();
        for (i, row) in p.coeffs().iter().enumerate() {
            for (j, c) in row.coeffs().iter().enumerate() {
                out.add_term((i as u32, j as u32), c.clone());
            }
        }
        out
    }

    /// Largest `k` with `y^k` dividing the polynomial.
    pub fn y_valuation(&self) -> u32 {
        self.terms.keys().map(|k| k.1).min().unwrap_or(0)
    }

    /// Largest `k` with `x^k` dividing the polynomial.
    pub fn x_valuation(&self) -> u32 {
        self.terms.keys().map(|k| k.0).min().unwrap_or(0)
    }

    /// Divides by `x^a y^b`; the monomial must divide exactly.
    pub fn div_monomial(&self, a: u32, b: u32) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| {
            assert!(k.0 >= a && k.1 >= b, "monomial does not divide");
            ((k.0 - a, k.1 - b), c.clone())
        }))
    }

    /// The shear `f(x, y + c x)`.
    pub fn shear(&self, c: &F) -> Self {
        if c.is_zero() {
            return self.clone();
        }
        let lin = Bivariate::y() + Bivariate::x().scale(c);
        let mut powers = vec![Bivariate::one()];
        let mut out = Bivariate::zero();
        for (k, a) in &self.terms {
            while powers.len() <= k.1 as usize {
                let next = powers.last().unwrap().clone() * lin.clone();
                powers.push(next);
            }
            let xm = Bivariate::from_terms([((k.0, 0), a.clone())]);
            out = out + xm * powers[k.1 as usize].clone();
        }
        out
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Bivariate<G> {
        Bivariate::from_terms(self.terms.iter().map(|(k, c)| (*k, f(c))))
    }

    /// Exact division in `F[y][x]`; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Bivariate<F>) -> Option<Bivariate<F>> {
        let a = self.as_x_poly();
        let b = d.as_x_poly();
        a.div_exact_checked(&b).map(|q| Bivariate::from_x_poly(&q))
    }
}

fn pow_f<F: Field>(x: &F, e: u32) -> F {
    let mut acc = F::one();
    for _ in 0..e {
        acc = acc * x.clone();
    }
    acc
}

impl<F: Field> Zero for Bivariate<F> {
    fn zero() -> Self {
        Bivariate { terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<F: Field> One for Bivariate<F> {
    fn one() -> Self {
        Bivariate::constant(F::one())
    }
}

impl<F: Field> Add for Bivariate<F> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for (k, c) in o.terms {
            self.add_term(k, c);
        }
        self
    }
}

impl<F: Field> Sub for Bivariate<F> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<F: Field> Neg for Bivariate<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Bivariate { terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect() }
    }
}

impl<F: Field> Mul for Bivariate<F> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Bivariate::zero();
        for (ka, a) in &self.terms {
            for (kb, b) in &o.terms {
                out.add_term((ka.0 + kb.0, ka.1 + kb.1), a.clone() * b.clone());
            }
        }
        out
    }
}

impl<F: Field> Ring for Bivariate<F> {
    fn div_exact(&self, rhs: &Self) -> Self {
        Bivariate::div_exact(self, rhs).expect("inexact bivariate division")
    }
}

impl<F: Field + fmt::Display> fmt::Display for Bivariate<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest total degree first reads most naturally
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by(|a, b| (b.0 + b.1).cmp(&(a.0 + a.1)).then(b.0.cmp(&a.0)));
        for (n, k) in keys.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let c = &self.terms[k];
            let mono = match (k.0, k.1) {
                (0, 0) => String::new(),
                (a, 0) => var_pow("x", a),
                (0, b) => var_pow("y", b),
                (a, b) => format!("{}*{}", var_pow("x", a), var_pow("y", b)),
            };
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{c}*{mono}")?;
            }
        }
        Ok(())
    }
}

fn var_pow(v: &str, e: u32) -> String {
    if e == 1 {
        v.to_string()
    } else {
        format!("{v}^{e}")
    }
}

impl<F: fmt::Debug> fmt::Debug for Bivariate<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}
