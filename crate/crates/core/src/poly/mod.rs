//! Exact polynomial machinery: univariate and bivariate polynomials over a
//! field, squarefree decomposition, resultants, Newton polygons, shears and
//! local Weierstrass factors.

mod bi;
mod uni;

pub use bi::Bivariate;
pub use uni::{pow_ring, resultant, UniPoly};

use num_traits::{One, Zero};

use crate::arith::{Field, Rational};
use crate::error::{GermError, Result};

/// Default cap on total degree of input germs.
pub const DEFAULT_DEGREE_CAP: u32 = 64;

pub fn check_degree<F: Field>(f: &Bivariate<F>, cap: u32) -> Result<()> {
    let degree = f.total_degree();
    if degree > cap {
        return Err(GermError::DegreeCap { degree, cap });
    }
    Ok(())
}

/// `(factor, multiplicity)` pairs whose product with exponents is the input up to a scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct SquarefreeDecomposition<F> {
    pub parts: Vec<(Bivariate<F>, u32)>,
}

impl<F: Field> SquarefreeDecomposition<F> {
    pub fn product(&self) -> Bivariate<F> {
        self.parts
            .iter()
            .fold(Bivariate::one(), |acc, (p, d)| acc * p.pow(*d))
    }

    /// Parts that vanish at the origin; the others are local units.
    pub fn local_parts(&self) -> Vec<(Bivariate<F>, u32)> {
        self.parts
            .iter()
            .filter(|(p, _)| p.constant_term().is_zero())
            .cloned()
            .collect()
    }
}

type XPoly<F> = UniPoly<UniPoly<F>>;

fn content<F: Field>(p: &XPoly<F>) -> UniPoly<F> {
    p.coeffs()
        .iter()
        .fold(UniPoly::zero(), |g: UniPoly<F>, c| if g.is_zero() { c.monic() } else { g.gcd(c) })
}

fn primitive_part<F: Field>(p: &XPoly<F>) -> XPoly<F> {
    if p.is_zero() {
        return p.clone();
    }
    let c = content(p);
    let q = UniPoly::new(p.coeffs().iter().map(|a| a.div_rem(&c).0).collect());
    normalize(&q)
}

/// Scales so that the leading coefficient of the leading `y`-polynomial is one.
fn normalize<F: Field>(p: &XPoly<F>) -> XPoly<F> {
    if p.is_zero() {
        return p.clone();
    }
    let inv = p.lc().lc().inv();
    UniPoly::new(p.coeffs().iter().map(|c| c.scale(&inv)).collect())
}

fn x_derivative<F: Field>(p: &XPoly<F>) -> XPoly<F> {
    UniPoly::new(
        p.coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&F::from_int(i as i64)))
            .collect(),
    )
}

/// Gcd in `F[y][x]` by the primitive remainder sequence.
fn gcd_xy<F: Field>(a: &XPoly<F>, b: &XPoly<F>) -> XPoly<F> {
    if a.is_zero() {
        return primitive_part(b);
    }
    if b.is_zero() {
        return primitive_part(a);
    }
    let g = content(a).gcd(&content(b));
    let (mut a, mut b) = (primitive_part(a), primitive_part(b));
    if a.deg0() < b.deg0() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        if b.deg0() == 0 {
            return UniPoly::constant(g);
        }
        let r = a.prem(&b);
        a = b;
        b = if r.is_zero() { r } else { primitive_part(&r) };
    }
    UniPoly::new(a.coeffs().iter().map(|c| c.clone() * g.clone()).collect())
}

fn div_xy<F: Field>(a: &XPoly<F>, b: &XPoly<F>) -> XPoly<F> {
    a.div_exact_checked(b).expect("squarefree step: inexact division")
}

/// True when some `p(x, y0)` with the leading coefficient nonzero at `y0` is squarefree,
/// which forces `gcd(p, p_x)` to be constant in `x`.
fn squarefree_by_specialization<F: Field>(p: &XPoly<F>) -> bool {
    let lc = p.lc();
    for k in 1..=8i64 {
        let y0 = F::from_int(k);
        if lc.eval(&y0).is_zero() {
            continue;
        }
        let q = UniPoly::new(p.coeffs().iter().map(|c| c.eval(&y0)).collect());
        if q.is_squarefree() {
            return true;
        }
    }
    false
}

/// Squarefree decomposition of a nonzero bivariate polynomial.
pub fn squarefree_decompose<F: Field>(f: &Bivariate<F>) -> Result<SquarefreeDecomposition<F>> {
    if f.is_zero() {
        return Err(GermError::ZeroPolynomial);
    }
    let p = f.as_x_poly();
    let cont = content(&p);
    let mut parts: Vec<(Bivariate<F>, u32)> = cont
        .squarefree()
        .into_iter()
        .map(|(q, d)| {
            let xp: XPoly<F> = UniPoly::constant(q);
            (Bivariate::from_x_poly(&xp), d)
        })
        .collect();
    let pp = primitive_part(&p);
    if pp.deg0() > 0 && squarefree_by_specialization(&pp) {
        parts.push((Bivariate::from_x_poly(&pp), 1));
    } else if pp.deg0() > 0 {
        let dp = x_derivative(&pp);
        let a0 = gcd_xy(&pp, &dp);
        let mut b = div_xy(&pp, &a0);
        let c = div_xy(&dp, &a0);
        let mut d = c - x_derivative(&b);
        let mut i = 1;
        while b.deg0() > 0 {
            let a = gcd_xy(&b, &d);
            if a.deg0() > 0 {
                parts.push((Bivariate::from_x_poly(&normalize(&a)), i));
            }
            let nb = div_xy(&b, &a);
            let c = div_xy(&d, &a);
            d = c - x_derivative(&nb);
            b = nb;
            i += 1;
        }
    }
    parts.sort_by(|a, b| b.1.cmp(&a.1));
    Ok(SquarefreeDecomposition { parts })
}

/// Gcd of two bivariate polynomials, normalized.
pub fn gcd_bivariate<F: Field>(a: &Bivariate<F>, b: &Bivariate<F>) -> Bivariate<F> {
    Bivariate::from_x_poly(&normalize(&gcd_xy(&a.as_x_poly(), &b.as_x_poly())))
}

/// Resultant with respect to `x`, a polynomial in `y`.
pub fn resultant_x<F: Field>(p: &Bivariate<F>, q: &Bivariate<F>) -> Result<UniPoly<F>> {
    if p.is_zero() || q.is_zero() {
        return Err(GermError::ZeroPolynomial);
    }
    if p.deg_x() == 0 || q.deg_x() == 0 {
        return Err(GermError::Degenerate("resultant_x needs positive x-degree".into()));
    }
    Ok(resultant(&p.as_x_poly(), &q.as_x_poly()))
}

/// Least exponent with nonzero coefficient; `None` stands for infinite order.
pub fn order_at_zero<F: Field>(p: &UniPoly<F>) -> Option<usize> {
    p.order()
}

/// One edge of the Newton polygon, read as a family of roots `x ~ c y^slope`.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonEdge<F> {
    /// Root order contributed by the edge.
    pub slope: Rational,
    /// Lattice point with the larger `x`-exponent.
    pub start: (u32, u32),
    /// Lattice point with the smaller `x`-exponent.
    pub end: (u32, u32),
    /// `sum a_ij z^(i - end.0)` over support points on the edge.
    pub edge_poly: UniPoly<F>,
}

/// Edges of the Newton polygon that govern roots `x = x(y)` of positive order,
/// ordered by increasing slope.
pub fn newton_polygon<F: Field>(f: &Bivariate<F>) -> Result<Vec<NewtonEdge<F>>> {
    if f.is_zero() {
        return Err(GermError::ZeroPolynomial);
    }
    let f = f.div_monomial(0, f.y_valuation());
    let r = f
        .at_y_zero()
        .order()
        .expect("nonzero after removing the y-valuation") as u32;
    let i_min = f.x_valuation();
    let mut lowest: Vec<(u32, u32)> = Vec::new();
    for i in i_min..=r {
        if let Some(j) = f.terms().filter(|(k, _)| k.0 == i).map(|(k, _)| k.1).min() {
            lowest.push((i, j));
        }
    }
    // lower convex hull, left to right
    let mut hull: Vec<(u32, u32)> = Vec::new();
    for p in lowest {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 as i64 - a.0 as i64) * (p.1 as i64 - a.1 as i64)
                - (b.1 as i64 - a.1 as i64) * (p.0 as i64 - a.0 as i64);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut edges = Vec::new();
    for w in hull.windows(2).rev() {
        let (end, start) = (w[0], w[1]);
        let di = (start.0 - end.0) as i64;
        let dj = end.1 as i64 - start.1 as i64;
        let slope = Rational::new(dj.into(), di.into());
        let mut coeffs = vec![F::zero(); di as usize + 1];
        for (k, c) in f.terms() {
            if k.0 < end.0 || k.0 > start.0 {
                continue;
            }
            // on the line through end and start
            if (k.0 as i64 - end.0 as i64) * dj == (end.1 as i64 - k.1 as i64) * di {
                coeffs[(k.0 - end.0) as usize] = c.clone();
            }
        }
        edges.push(NewtonEdge { slope, start, end, edge_poly: UniPoly::new(coeffs) });
    }
    Ok(edges)
}

/// The fixed shear search sequence `0, 1, -1, 2, -2, ...`.
pub fn shear_sequence<F: Field>() -> impl Iterator<Item = F> {
    let ints = (0..=128i64).flat_map(|n| if n == 0 { vec![0] } else { vec![n, -n] });
    ints.map(F::from_int)
}

/// Finds the first shear `c` making `y = 0` transverse to the tangent cone of
/// `f(x, y + c x)`; returns the sheared polynomial and `c`.
pub fn ensure_transverse<F: Field>(f: &Bivariate<F>) -> Result<(Bivariate<F>, F)> {
    if f.is_zero() {
        return Err(GermError::ZeroPolynomial);
    }
    let n = f.order().unwrap();
    if n == 0 {
        return Err(GermError::NotAGerm(format!("{:?}", f.constant_term())));
    }
    let low = f.lowest_form();
    for c in shear_sequence::<F>() {
        // lowest form of the shear is the shear of the lowest form
        if !low.shear(&c).coeff(n, 0).is_zero() {
            return Ok((f.shear(&c), c));
        }
    }
    unreachable!("a nonzero binary form has finitely many roots")
}

/// Monic local Weierstrass factor of `p` in `F[[y]][x]`, truncated modulo `y^prec`.
/// Requires `p(x, 0) != 0`. Returned as a polynomial in `x` with `y`-polynomial coefficients.
pub fn weierstrass_factor<F: Field>(p: &Bivariate<F>, prec: usize) -> Result<XPoly<F>> {
    let p0 = p.at_y_zero();
    let r = p0
        .order()
        .ok_or_else(|| GermError::Degenerate("p(x, 0) vanishes identically".into()))?;
    if r == 0 {
        return Ok(UniPoly::one());
    }
    let xr: UniPoly<F> = UniPoly::monomial(F::one(), r);
    let h0 = UniPoly::new(p0.coeffs()[r..].to_vec());
    let (g, s, t) = xr.ext_gcd(&h0);
    debug_assert!(g.is_one());
    let _ = s;
    // p_k(x) = coefficient of y^k
    let py: Vec<UniPoly<F>> = {
        let rows = p.as_x_poly();
        let dy = p.deg_y() as usize;
        (0..=dy)
            .map(|k| UniPoly::new(rows.coeffs().iter().map(|row| row.coeff(k)).collect()))
            .collect()
    };
    let mut w: Vec<UniPoly<F>> = vec![xr.clone()];
    let mut h: Vec<UniPoly<F>> = vec![h0.clone()];
    for k in 1..prec {
        let mut e = py.get(k).cloned().unwrap_or_else(UniPoly::zero);
        for a in 1..k {
            e = e - w[a].clone() * h[k - a].clone();
        }
        let dw = (t.clone() * e.clone()).truncate(r);
        let rest = e - dw.clone() * h0.clone();
        debug_assert!(rest.coeffs().iter().take(r).all(|c| c.is_zero()));
        let dh = UniPoly::new(rest.coeffs().get(r..).map(|s| s.to_vec()).unwrap_or_default());
        w.push(dw);
        h.push(dh);
    }
    // transpose into an x-polynomial with y-coefficients
    let coeffs = (0..=r)
        .map(|i| UniPoly::new(w.iter().map(|wk| wk.coeff(i)).collect()))
        .collect();
    Ok(UniPoly::new(coeffs))
}

/// Weierstrass factor and unit of `p`: monic `W` and `u` in `F[[y]][x]` with `p = u W`,
/// both truncated modulo `y^prec`. Requires `p(x, 0) != 0`.
pub fn weierstrass_unit<F: Field>(p: &Bivariate<F>, prec: usize) -> Result<(XPoly<F>, XPoly<F>)> {
    let wp = weierstrass_factor(p, prec)?;
    let w: Vec<UniPoly<F>> = wp.coeffs().iter().map(|c| c.truncate(prec)).collect();
    let r = w.len() - 1;
    let mut a: Vec<UniPoly<F>> = p.as_x_poly().coeffs().iter().map(|c| c.truncate(prec)).collect();
    let mut q = vec![UniPoly::zero(); a.len().saturating_sub(r)];
    while a.len() > r {
        let top = a.pop().unwrap();
        let d = a.len() - r;
        for i in 0..r {
            a[d + i] = (a[d + i].clone() - top.clone() * w[i].clone()).truncate(prec);
        }
        q[d] = top;
    }
    if a.iter().any(|c| !c.is_zero()) {
        return Err(GermError::Inconsistent("Weierstrass division left a remainder".into()));
    }
    Ok((UniPoly::new(w), UniPoly::new(q)))
}

/// Local intersection multiplicity at the origin of the curves `p = 0` and `q = 0`,
/// computed as the `y`-order of the determinant of multiplication by `q` on
/// `F[[y]][x] / (W_p)`, where `W_p` is the Weierstrass factor of `p`.
/// `None` when the curves share a component through the origin.
pub fn local_intersection<F: Field>(p: &Bivariate<F>, q: &Bivariate<F>) -> Result<Option<usize>> {
    if !p.constant_term().is_zero() || !q.constant_term().is_zero() {
        return Ok(Some(0));
    }
    if p.is_zero() || q.is_zero() {
        return Ok(None);
    }
    // i(y^a p, y^b q) = i(p, q) + a i(y, q) + b i(p, y), with i(y, g) = ord_x g(x, 0)
    let (a, b) = (p.y_valuation(), q.y_valuation());
    if a > 0 && b > 0 {
        return Ok(None);
    }
    let (p, q) = (p.div_monomial(0, a), q.div_monomial(0, b));
    let extra = a as usize * q.at_y_zero().order().unwrap() + b as usize * p.at_y_zero().order().unwrap();
    let bezout = (p.total_degree() * q.total_degree()) as usize;
    let mut prec = 16;
    loop {
        let wp = weierstrass_factor(&p, prec)?;
        let r = wp.deg0();
        let w: Vec<UniPoly<F>> = wp.coeffs().iter().map(|c| c.truncate(prec)).collect();
        let qx: Vec<UniPoly<F>> = q.as_x_poly().coeffs().iter().map(|c| c.truncate(prec)).collect();
        let mut col = rem_monic(qx, &w, prec);
        let mut m = vec![vec![UniPoly::zero(); r]; r];
        for j in 0..r {
            for (i, row) in m.iter_mut().enumerate() {
                row[j] = col.get(i).cloned().unwrap_or_else(UniPoly::zero);
            }
            let mut shifted = vec![UniPoly::zero()];
            shifted.extend(col);
            col = rem_monic(shifted, &w, prec);
        }
        if let Some(o) = det_order(m, prec) {
            return Ok(Some(o + extra));
        }
        if prec > bezout {
            return Ok(None);
        }
        prec *= 2;
    }
}

/// Remainder of `a` modulo the monic `w`, coefficients in `F[y] / (y^prec)`.
fn rem_monic<F: Field>(mut a: Vec<UniPoly<F>>, w: &[UniPoly<F>], prec: usize) -> Vec<UniPoly<F>> {
    let r = w.len() - 1;
    while a.len() > r {
        let top = a.pop().unwrap();
        let d = a.len();
        for i in 0..r {
            let k = d - r + i;
            a[k] = (a[k].clone() - top.clone() * w[i].clone()).truncate(prec);
        }
    }
    a
}

/// `y`-order of the determinant of a square matrix over `F[[y]]` with entries known
/// modulo `y^n`; `None` when the precision is exhausted. Rows are only ever scaled
/// by units, which leaves the order unchanged.
fn det_order<F: Field>(mut m: Vec<Vec<UniPoly<F>>>, mut n: usize) -> Option<usize> {
    let mut rows: Vec<usize> = (0..m.len()).collect();
    let mut cols = rows.clone();
    let mut total = 0;
    while !rows.is_empty() {
        let mut best: Option<(usize, usize, usize)> = None;
        for &i in &rows {
            for &j in &cols {
                if let Some(v) = m[i][j].truncate(n).order() {
                    if best.as_ref().map_or(true, |b| v < b.0) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (v, pi, pj) = best?;
        total += v;
        let unit = UniPoly::new(m[pi][pj].truncate(n).coeffs()[v..].to_vec());
        n -= v;
        for &i in &rows {
            if i == pi {
                continue;
            }
            let b = m[i][pj].truncate(n + v);
            let b = UniPoly::new(b.coeffs().get(v..).map(|s| s.to_vec()).unwrap_or_default());
            if b.is_zero() {
                continue;
            }
            for &j in &cols {
                if j != pj {
                    m[i][j] = (unit.clone() * m[i][j].clone() - b.clone() * m[pi][j].clone()).truncate(n);
                }
            }
        }
        rows.retain(|&i| i != pi);
        cols.retain(|&j| j != pj);
    }
    Some(total)
}

/// `ord_y disc_x(f) + 1`, a strict upper bound for all pairwise contact orders
/// of roots of the squarefree polynomial `f`.
pub fn discriminant_bound<F: Field>(f: &Bivariate<F>) -> Result<Rational> {
    if f.deg_x() == 0 {
        return Ok(Rational::one());
    }
    // ord_y disc_x(W) of the Weierstrass factor equals i(f, f_x)
    let o = local_intersection(f, &f.dx())?
        .ok_or_else(|| GermError::Degenerate("polynomial is not squarefree".into()))?;
    Ok(Rational::from_integer((o as i64 + 1).into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, Gaussian};

    type P = Bivariate<Gaussian>;

    fn x() -> P {
        P::x()
    }
    fn y() -> P {
        P::y()
    }
    fn k(n: i64) -> P {
        P::constant(Gaussian::from_int(n))
    }

    #[test]
    fn squarefree_examples() {
        let f = x().pow(2) * (x() - y());
        let sf = squarefree_decompose(&f).unwrap();
        assert_eq!(sf.parts, vec![(x(), 2), (x() - y(), 1)]);

        let g = x().pow(2) - y().pow(2);
        assert_eq!(squarefree_decompose(&g).unwrap().parts, vec![(g.clone(), 1)]);

        let cusp = x().pow(2) - y().pow(3);
        let h = cusp.pow(2);
        assert_eq!(squarefree_decompose(&h).unwrap().parts, vec![(cusp, 2)]);
    }

    #[test]
    fn squarefree_with_y_content() {
        let f = (y() + k(1)).pow(2) * (x() - y());
        let sf = squarefree_decompose(&f).unwrap();
        assert_eq!(sf.local_parts(), vec![(x() - y(), 1)]);
        let prod = sf.product();
        assert_eq!(prod, f);
    }

    #[test]
    fn resultant_examples() {
        let r = resultant_x(&x(), &(x().pow(2) - y().pow(3))).unwrap();
        assert_eq!(r.order(), Some(3));
        let r = resultant_x(&(x() - y()), &(x() + y())).unwrap();
        assert_eq!(r, UniPoly::monomial(Gaussian::from_int(2), 1));
        let r = resultant_x(&(x().pow(2) - y().pow(3)), &(x().pow(3) - y().pow(2))).unwrap();
        assert_eq!(r.order(), Some(4));
        assert!(resultant_x(&y(), &x()).is_err());
    }

    #[test]
    fn order_examples() {
        let p: UniPoly<Gaussian> = UniPoly::monomial(Gaussian::from_int(4), 3);
        assert_eq!(order_at_zero(&p), Some(3));
        assert_eq!(order_at_zero(&UniPoly::<Gaussian>::zero()), None);
        let q = UniPoly::monomial(Gaussian::one(), 2) + UniPoly::monomial(Gaussian::one(), 5);
        assert_eq!(order_at_zero(&q), Some(2));
    }

    #[test]
    fn newton_polygon_examples() {
        let e = newton_polygon(&(x().pow(2) - y().pow(3))).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].slope, rat(3, 2));
        assert_eq!((e[0].start, e[0].end), ((2, 0), (0, 3)));
        assert_eq!(e[0].edge_poly, UniPoly::new(vec![-Gaussian::one(), Gaussian::zero(), Gaussian::one()]));

        let e = newton_polygon(&(x().pow(2) - x() * y())).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].slope, int(1));
        assert_eq!((e[0].start, e[0].end), ((2, 0), (1, 1)));

        let e = newton_polygon(&(x().pow(2) - y().pow(5))).unwrap();
        assert_eq!(e[0].slope, rat(5, 2));
    }

    #[test]
    fn newton_polygon_two_edges() {
        // (x - y)(x - y^2): slopes 1 and 2
        let f = (x() - y()) * (x() - y().pow(2));
        let e = newton_polygon(&f).unwrap();
        let slopes: Vec<_> = e.iter().map(|e| e.slope.clone()).collect();
        assert_eq!(slopes, vec![int(1), int(2)]);
    }

    #[test]
    fn transverse_examples() {
        let cusp = x().pow(2) - y().pow(3);
        assert_eq!(ensure_transverse(&cusp).unwrap(), (cusp.clone(), Gaussian::zero()));

        let f = y().pow(2) - x().pow(3);
        let (g, c) = ensure_transverse(&f).unwrap();
        assert_eq!(c, Gaussian::one());
        assert_eq!(g, (y() + x()).pow(2) - x().pow(3));

        let (g, c) = ensure_transverse(&(x() * y())).unwrap();
        assert_eq!(c, Gaussian::one());
        assert_eq!(g, x() * (y() + x()));

        assert!(matches!(ensure_transverse(&(x() + k(1))), Err(GermError::NotAGerm(_))));
    }

    #[test]
    fn weierstrass_of_unit_times_curve() {
        // (1 + x + y) (x^2 - y^3): local factor is x^2 - y^3
        let f = (k(1) + x() + y()) * (x().pow(2) - y().pow(3));
        let w = weierstrass_factor(&f, 8).unwrap();
        let w = Bivariate::from_x_poly(&w);
        assert_eq!(w, x().pow(2) - y().pow(3));
    }

    #[test]
    fn weierstrass_unit_reconstructs() {
        let f = (k(1) + x() + y()) * (x().pow(2) - y().pow(3));
        let (w, u) = weierstrass_unit(&f, 12).unwrap();
        assert_eq!(w.deg0(), 2);
        let prod = Bivariate::from_x_poly(&(u * w));
        let diff = prod - f;
        assert!(diff.terms().all(|((_, j), _)| *j >= 12));
    }

    #[test]
    fn local_intersection_ignores_far_points() {
        // x and x - 1 + y meet away from the origin only
        let a = x();
        let b = x() - y() * y() - y();
        assert_eq!(local_intersection(&a, &b).unwrap(), Some(1));
        let far = (x() - k(1)) * (x() - k(1)) - y();
        let cusp = x().pow(2) - y().pow(3);
        assert_eq!(local_intersection(&far, &cusp).unwrap(), Some(0));
        // y = 0 is a line through the origin but (x - 1)^2 - y passes through (1, 0) as well
        let line = y();
        let parab = y() - x().pow(2) + x();
        assert_eq!(local_intersection(&line, &parab).unwrap(), Some(1));
    }

    #[test]
    fn discriminant_bounds() {
        assert_eq!(discriminant_bound(&(x().pow(2) - y().pow(3))).unwrap(), int(4));
        assert_eq!(discriminant_bound(&(x() * (x() - y()))).unwrap(), int(3));
        assert_eq!(discriminant_bound(&(x() - y())).unwrap(), int(1));
    }
}
