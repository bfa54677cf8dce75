//! Newton–Puiseux expansion of a germ's local factors.
//!
//! The expansion tree is computed exactly and in compressed form: a child
//! stands for a whole orbit of `e * q` clusters, `e` conjugates of an
//! irreducible factor of the edge polynomial and `q` rotations of a `q`-th root.
//! Each leaf orbit carries one representative root with coefficients in a
//! number field. Concrete roots are obtained from the complex embeddings of
//! that field and the rotations `y^(1/Q) -> theta y^(1/Q)`; the combinatorial
//! tree they induce is checked against the exact one.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{frac, rational_to_f64, Field, Gaussian, Rational};
use crate::error::{GermError, Result};
use crate::factor::{cyclotomic, factor_over, factor_squarefree_over};
use crate::numfield::{AlgNum, FieldMap, NumberField, DEFAULT_TOWER_CAP};
use crate::poly::{discriminant_bound, newton_polygon, squarefree_decompose, Bivariate, UniPoly};

/// Relative tolerance for comparing numeric root coefficients.
pub const COEFF_TOL: f64 = 1e-7;
/// Arguments closer than this to a multiple of `2 pi` (in turns) count as zero.
pub const ARG_SNAP: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ExpandConfig {
    pub trunc: Rational,
    pub tower_cap: usize,
}

impl ExpandConfig {
    pub fn new(trunc: Rational) -> Self {
        ExpandConfig { trunc, tower_cap: DEFAULT_TOWER_CAP }
    }
}

/// One split level on the path to a leaf.
#[derive(Clone, Debug, PartialEq)]
pub struct PathStep {
    /// Exponent of the term introduced at this level.
    pub exponent: Rational,
    /// Ramification gained at this level.
    pub q: u32,
    /// Number of conjugates of the edge-polynomial factor.
    pub e: usize,
}

/// Representative of an orbit of roots that are conjugate under Galois action and rotations.
#[derive(Clone, Debug)]
pub struct LeafOrbit {
    /// Index of the local factor the roots belong to.
    pub factor: usize,
    pub field: Arc<NumberField>,
    /// Common denominator of all exponents; the ramification of each branch in the orbit.
    pub ramification: u32,
    /// Nonzero terms `(exponent, coefficient)` up to the truncation, exponents increasing.
    pub terms: Vec<(Rational, AlgNum)>,
    pub steps: Vec<PathStep>,
}

impl LeafOrbit {
    /// Number of distinct roots in the orbit.
    pub fn count(&self) -> usize {
        self.steps.iter().map(|s| s.e * s.q as usize).product()
    }

    pub fn char_exponents(&self) -> Vec<Rational> {
        self.steps.iter().filter(|s| s.q > 1).map(|s| s.exponent.clone()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct CompressedChild {
    /// Exponent where the child's roots separate from their siblings; `None` for an exact root.
    pub exponent: Option<Rational>,
    pub e: usize,
    pub q: u32,
    pub node: CompressedTree,
}

#[derive(Clone, Debug)]
pub enum CompressedTree {
    Leaf(usize),
    Split(Vec<CompressedChild>),
}

/// Exact expansion of a list of pairwise coprime squarefree local factors.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub tree: CompressedTree,
    pub leaves: Vec<LeafOrbit>,
    pub trunc: Rational,
    /// Number of roots of each factor.
    pub factor_roots: Vec<usize>,
}

struct Work {
    field: Arc<NumberField>,
    polys: Vec<(usize, Bivariate<AlgNum>)>,
    exponent: Rational,
    a: u64,
    q_total: u32,
    prefix: Vec<(Rational, AlgNum)>,
    steps: Vec<PathStep>,
}

struct Expander<'a> {
    cfg: &'a ExpandConfig,
    leaves: Vec<LeafOrbit>,
}

fn map_poly(p: &Bivariate<AlgNum>, m: &FieldMap) -> Bivariate<AlgNum> {
    p.map(|c| m.apply(c))
}

/// `H(y^p (c + x), y^q)` divided by its `y`-valuation.
fn substitute(h: &Bivariate<AlgNum>, p: u32, q: u32, c: &AlgNum) -> Bivariate<AlgNum> {
    let lin = Bivariate::constant(c.clone()) + Bivariate::x();
    let mut powers = vec![Bivariate::one()];
    let mut out = Bivariate::zero();
    for (k, a) in h.terms() {
        while powers.len() <= k.0 as usize {
            let next = powers.last().unwrap().clone() * lin.clone();
            powers.push(next);
        }
        let shift = Bivariate::from_terms([((0, p * k.0 + q * k.1), a.clone())]);
        out = out + shift * powers[k.0 as usize].clone();
    }
    let v = out.y_valuation();
    out.div_monomial(0, v)
}

fn x_order(p: &Bivariate<AlgNum>) -> usize {
    p.at_y_zero().order().expect("node polynomial vanishes on y = 0")
}

type Series = Vec<AlgNum>;

fn series_mul(a: &Series, b: &Series, prec: usize) -> Series {
    let mut out = vec![AlgNum::zero(); prec];
    for (i, x) in a.iter().enumerate().take(prec) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(prec - i) {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

fn series_inv(a: &Series, prec: usize) -> Series {
    let a0inv = a[0].inv();
    let mut out = vec![AlgNum::zero(); prec];
    out[0] = a0inv.clone();
    for k in 1..prec {
        let mut s = AlgNum::zero();
        for j in 1..=k.min(a.len() - 1) {
            s = s + a[j].clone() * out[k - j].clone();
        }
        out[k] = -(s * a0inv.clone());
    }
    out
}

/// `H(phi(y), y)` modulo `y^prec`.
fn eval_at_series(h: &Bivariate<AlgNum>, phi: &Series, prec: usize) -> Series {
    let rows = h.as_x_poly();
    let mut acc: Series = vec![AlgNum::zero(); prec];
    for row in rows.coeffs().iter().rev() {
        acc = series_mul(&acc, phi, prec);
        for (j, c) in row.coeffs().iter().enumerate().take(prec) {
            acc[j] = acc[j].clone() + c.clone();
        }
    }
    acc
}

/// Power series root `x = phi(y)`, `phi(0) = 0`, of `h` with `h_x(0, 0) != 0`, modulo `y^prec`.
fn implicit_root(h: &Bivariate<AlgNum>, prec: usize) -> Series {
    let hx = h.dx();
    let mut phi: Series = vec![AlgNum::zero(); prec];
    let mut cur = 1;
    while cur < prec {
        cur = (cur * 2).min(prec);
        let val = eval_at_series(h, &phi, cur);
        let der = eval_at_series(&hx, &phi, cur);
        let corr = series_mul(&val, &series_inv(&der, cur), cur);
        for k in 0..cur {
            phi[k] = phi[k].clone() - corr[k].clone();
        }
    }
    phi
}

impl Expander<'_> {
    fn leaf(&mut self, w: &Work, factor: usize, tail: Vec<(Rational, AlgNum)>) -> CompressedTree {
        let mut terms = w.prefix.clone();
        terms.extend(tail);
        self.leaves.push(LeafOrbit {
            factor,
            field: w.field.clone(),
            ramification: w.q_total,
            terms,
            steps: w.steps.clone(),
        });
        CompressedTree::Leaf(self.leaves.len() - 1)
    }

    fn node(&mut self, w: Work) -> Result<CompressedTree> {
        let rs: Vec<usize> = w.polys.iter().map(|(_, p)| x_order(p)).collect();
        let total: usize = rs.iter().sum();
        if total == 1 {
            let idx = rs.iter().position(|&r| r == 1).unwrap();
            let (factor, h) = &w.polys[idx];
            let trunc_units = (&self.cfg.trunc * Rational::from_integer(w.q_total.into())).floor();
            let n_terms = trunc_units.to_integer().to_i64().unwrap_or(0) - w.a as i64;
            let mut tail = Vec::new();
            if n_terms >= 1 && !h.at_y_zero().is_zero() && h.x_valuation() == 0 {
                let phi = implicit_root(h, n_terms as usize + 1);
                for (k, c) in phi.into_iter().enumerate().skip(1) {
                    if !c.is_zero() {
                        let ex = Rational::new((w.a as i64 + k as i64).into(), (w.q_total as i64).into());
                        tail.push((ex, c));
                    }
                }
            }
            let factor = *factor;
            return Ok(self.leaf(&w, factor, tail));
        }
        let mut children = Vec::new();
        let mut polys = Vec::new();
        for (j, p) in &w.polys {
            let mut p = p.clone();
            if p.x_valuation() >= 1 {
                debug_assert_eq!(p.x_valuation(), 1);
                let leaf = self.leaf(&w, *j, Vec::new());
                children.push(CompressedChild { exponent: None, e: 1, q: 1, node: leaf });
                p = p.div_monomial(1, 0);
            }
            if x_order(&p) > 0 {
                polys.push((*j, p));
            }
        }
        let mut by_slope: BTreeMap<Rational, Vec<(usize, UniPoly<AlgNum>)>> = BTreeMap::new();
        for (idx, (_, p)) in polys.iter().enumerate() {
            for edge in newton_polygon(p)? {
                let q = edge.slope.denom().to_u32().unwrap() as usize;
                let psi: Vec<AlgNum> = edge.edge_poly.coeffs().iter().step_by(q).cloned().collect();
                by_slope.entry(edge.slope.clone()).or_default().push((idx, UniPoly::new(psi)));
            }
        }
        for (slope, list) in by_slope {
            let p_num = slope.numer().to_u32().unwrap();
            let q = slope.denom().to_u32().unwrap();
            let exponent = &w.exponent + &slope / Rational::from_integer(w.q_total.into());
            if exponent >= self.cfg.trunc {
                return Err(GermError::TruncationTooSmall(format!(
                    "roots separate at exponent {} but the truncation is {}",
                    crate::arith::fmt_rational(&exponent),
                    crate::arith::fmt_rational(&self.cfg.trunc)
                )));
            }
            let mut irr: Vec<(UniPoly<AlgNum>, Vec<(usize, u32)>)> = Vec::new();
            for (idx, psi) in &list {
                for (pi, mult) in factor_over(&w.field, psi) {
                    match irr.iter_mut().find(|(f, _)| *f == pi) {
                        Some((_, members)) => members.push((*idx, mult)),
                        None => irr.push((pi, vec![(*idx, mult)])),
                    }
                }
            }
            for (pi, members) in irr {
                let e = pi.deg0();
                let (k1, map1, w0) = w.field.adjoin(&pi, self.cfg.tower_cap)?;
                let (k2, map, c0) = if q == 1 {
                    (k1, map1, w0)
                } else {
                    let zq = UniPoly::monomial(AlgNum::one(), q as usize) - UniPoly::constant(w0);
                    let mut fs = factor_squarefree_over(&k1, &zq);
                    fs.sort_by_key(|f| f.deg0());
                    let (k2, map12, c0) = k1.adjoin(&fs[0], self.cfg.tower_cap)?;
                    (k2, map1.then(&map12), c0)
                };
                let child_polys: Vec<(usize, Bivariate<AlgNum>)> = members
                    .iter()
                    .map(|(idx, _)| {
                        let (j, p) = &polys[*idx];
                        (*j, substitute(&map_poly(p, &map), p_num, q, &c0))
                    })
                    .collect();
                debug_assert!(members
                    .iter()
                    .zip(&child_polys)
                    .all(|((_, mult), (_, p))| x_order(p) == *mult as usize));
                let mut prefix: Vec<(Rational, AlgNum)> =
                    w.prefix.iter().map(|(ex, c)| (ex.clone(), map.apply(c))).collect();
                prefix.push((exponent.clone(), c0));
                let mut steps = w.steps.clone();
                steps.push(PathStep { exponent: exponent.clone(), q, e });
                let child = Work {
                    field: k2,
                    polys: child_polys,
                    exponent: exponent.clone(),
                    a: q as u64 * w.a + p_num as u64,
                    q_total: q * w.q_total,
                    prefix,
                    steps,
                };
                let node = self.node(child)?;
                children.push(CompressedChild { exponent: Some(exponent.clone()), e, q, node });
            }
        }
        Ok(CompressedTree::Split(children))
    }
}

/// Expands pairwise coprime squarefree factors, each vanishing at the origin,
/// with `y = 0` transverse to the tangent cone of their product.
pub fn expand(factors: &[Bivariate<Gaussian>], cfg: &ExpandConfig) -> Result<Expansion> {
    let k = NumberField::gaussian();
    let mut polys = Vec::new();
    let mut factor_roots = Vec::new();
    for (j, f) in factors.iter().enumerate() {
        let p = f.map(|c| k.from_gaussian(c));
        let p = p.div_monomial(0, p.y_valuation());
        let r = p.at_y_zero().order().ok_or_else(|| GermError::Degenerate("factor vanishes on y = 0".into()))?;
        factor_roots.push(r);
        if r > 0 {
            polys.push((j, p));
        }
    }
    if polys.is_empty() {
        return Err(GermError::Degenerate("no local factor".into()));
    }
    let mut ex = Expander { cfg, leaves: Vec::new() };
    let root = Work {
        field: k,
        polys,
        exponent: Rational::zero(),
        a: 0,
        q_total: 1,
        prefix: Vec::new(),
        steps: Vec::new(),
    };
    let tree = ex.node(root)?;
    Ok(Expansion { tree, leaves: ex.leaves, trunc: cfg.trunc.clone(), factor_roots })
}

/// `ord_y disc_x(f_red) + 1`, at least 1.
pub fn sufficient_truncation(f: &Bivariate<Gaussian>) -> Result<Rational> {
    let sf = squarefree_decompose(f)?;
    let red = sf.parts.iter().fold(Bivariate::one(), |acc, (p, _)| acc * p.clone());
    discriminant_bound(&red)
}

/// Abstract copy of a root in the replicated tree.
#[derive(Clone, Debug)]
pub struct AbstractRoot {
    pub leaf: usize,
    /// Branch label: leaf index and the conjugate choices along the path.
    pub branch_key: (usize, Vec<usize>),
    path: Vec<(usize, usize, Option<Rational>)>,
}

/// Every root as a path through the replicated tree.
pub fn abstract_roots(exp: &Expansion) -> Vec<AbstractRoot> {
    fn walk(t: &CompressedTree, path: &mut Vec<(usize, usize, Option<Rational>)>, galois: &mut Vec<usize>, out: &mut Vec<AbstractRoot>) {
        match t {
            CompressedTree::Leaf(l) => out.push(AbstractRoot {
                leaf: *l,
                branch_key: (*l, galois.clone()),
                path: path.clone(),
            }),
            CompressedTree::Split(children) => {
                for (ci, c) in children.iter().enumerate() {
                    for g in 0..c.e {
                        for r in 0..c.q as usize {
                            path.push((ci, g * c.q as usize + r, c.exponent.clone()));
                            galois.push(g);
                            walk(&c.node, path, galois, out);
                            galois.pop();
                            path.pop();
                        }
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    walk(&exp.tree, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// Contact order of two distinct abstract roots.
pub fn abstract_contact(a: &AbstractRoot, b: &AbstractRoot) -> Rational {
    for (x, y) in a.path.iter().zip(&b.path) {
        if x.0 != y.0 {
            return match (&x.2, &y.2) {
                (Some(u), Some(v)) => u.min(v).clone(),
                (Some(u), None) | (None, Some(u)) => u.clone(),
                (None, None) => unreachable!("two exact roots at one node"),
            };
        }
        if x.1 != y.1 {
            return x.2.clone().expect("exact roots have a single copy");
        }
    }
    panic!("contact of a root with itself")
}

/// Truncated fractional power series `x = sum a_alpha y^alpha` with complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxRoot {
    pub branch: usize,
    /// Conjugate index in `1..=m`.
    pub conjugate: usize,
    pub terms: Vec<(Rational, Complex64)>,
    pub truncation: Rational,
}

impl PuiseuxRoot {
    pub fn coeff(&self, alpha: &Rational) -> Complex64 {
        self.terms
            .iter()
            .find(|(e, _)| e == alpha)
            .map(|t| t.1)
            .unwrap_or_else(Complex64::zero)
    }

    /// Value at `y = t^n` for a complex `t`, with `n` a multiple of every denominator.
    pub fn eval_t(&self, t: Complex64, n: u32) -> Complex64 {
        self.terms.iter().fold(Complex64::zero(), |acc, (e, c)| {
            let k = (e * Rational::from_integer(n.into())).to_integer().to_i32().unwrap();
            acc + c * t.powi(k)
        })
    }

    /// Coefficients under `y^(1/m) -> theta^j y^(1/m)`.
    pub fn rotate(&self, j: i64) -> Vec<(Rational, Complex64)> {
        self.terms.iter().map(|(e, c)| (e.clone(), c * turn(e, j))).collect()
    }
}

/// `exp(2 pi i j alpha)` computed from the exact fractional part.
pub fn turn(alpha: &Rational, j: i64) -> Complex64 {
    let f = frac(&(alpha * Rational::from_integer(j.into())));
    Complex64::from_polar(1.0, 2.0 * PI * rational_to_f64(&f))
}

fn coeff_eq(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= COEFF_TOL * 1f64.max(a.norm()).max(b.norm())
}

/// First exponent where two term lists differ; `None` when they agree up to the truncation.
pub fn numeric_contact(a: &[(Rational, Complex64)], b: &[(Rational, Complex64)]) -> Option<Rational> {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return None,
            (Some(x), None) => {
                if !coeff_eq(x.1, Complex64::zero()) {
                    return Some(x.0.clone());
                }
                i += 1;
            }
            (None, Some(y)) => {
                if !coeff_eq(y.1, Complex64::zero()) {
                    return Some(y.0.clone());
                }
                j += 1;
            }
            (Some(x), Some(y)) => {
                if x.0 == y.0 {
                    if !coeff_eq(x.1, y.1) {
                        return Some(x.0.clone());
                    }
                    i += 1;
                    j += 1;
                } else if x.0 < y.0 {
                    if !coeff_eq(x.1, Complex64::zero()) {
                        return Some(x.0.clone());
                    }
                    i += 1;
                } else {
                    if !coeff_eq(y.1, Complex64::zero()) {
                        return Some(y.0.clone());
                    }
                    j += 1;
                }
            }
        }
    }
}

/// `O(r1, r2)`: order of the difference of two distinct roots.
pub fn contact_order(r1: &PuiseuxRoot, r2: &PuiseuxRoot) -> Result<Rational> {
    numeric_contact(&r1.terms, &r2.terms).ok_or_else(|| {
        GermError::TruncationTooSmall("roots agree up to the truncation".into())
    })
}

/// Concrete roots of an expansion grouped into branches.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub expansion: Expansion,
    /// All roots; `roots[i].branch` indexes `branches`.
    pub roots: Vec<PuiseuxRoot>,
    pub branches: Vec<BranchRoots>,
    /// Pairwise contact orders; the diagonal holds `None`.
    pub contacts: Vec<Vec<Option<Rational>>>,
}

#[derive(Clone, Debug)]
pub struct BranchRoots {
    pub leaf: usize,
    pub factor: usize,
    pub ramification: u32,
    pub char_exponents: Vec<Rational>,
    /// Root indices; `members[j]` is the conjugate obtained from `members[0]` by rotation `j`.
    pub members: Vec<usize>,
}

/// Enumerates the concrete roots of every leaf orbit and computes all contacts.
pub fn concrete_roots(exp: &Expansion) -> Result<RootSystem> {
    let mut roots: Vec<PuiseuxRoot> = Vec::new();
    let mut branches = Vec::new();
    for (li, leaf) in exp.leaves.iter().enumerate() {
        let mut found: Vec<Vec<(Rational, Complex64)>> = Vec::new();
        let q = leaf.ramification as i64;
        for &delta in leaf.field.embeddings() {
            let base = PuiseuxRoot {
                branch: 0,
                conjugate: 0,
                terms: leaf.terms.iter().map(|(e, c)| (e.clone(), c.to_complex(delta))).collect(),
                truncation: exp.trunc.clone(),
            };
            for j in 0..q {
                let r = base.rotate(j);
                if !found.iter().any(|f| numeric_contact(f, &r).is_none()) {
                    found.push(r);
                }
            }
        }
        if found.len() != leaf.count() {
            return Err(GermError::Inconsistent(format!(
                "leaf orbit {li}: {} numeric roots, expected {}",
                found.len(),
                leaf.count()
            )));
        }
        let mut assigned = vec![false; found.len()];
        for s in 0..found.len() {
            if assigned[s] {
                continue;
            }
            let base = PuiseuxRoot {
                branch: branches.len(),
                conjugate: 0,
                terms: found[s].clone(),
                truncation: exp.trunc.clone(),
            };
            let mut members = Vec::new();
            for j in 0..q {
                let r = base.rotate(j);
                let pos = found
                    .iter()
                    .position(|f| numeric_contact(f, &r).is_none())
                    .ok_or_else(|| GermError::Inconsistent("rotation left the orbit".into()))?;
                if assigned[pos] {
                    return Err(GermError::Inconsistent("rotation orbits overlap".into()));
                }
                assigned[pos] = true;
                members.push(roots.len());
                roots.push(PuiseuxRoot {
                    branch: branches.len(),
                    conjugate: j as usize,
                    terms: r,
                    truncation: exp.trunc.clone(),
                });
            }
            branches.push(BranchRoots {
                leaf: li,
                factor: leaf.factor,
                ramification: leaf.ramification,
                char_exponents: leaf.char_exponents(),
                members,
            });
        }
    }
    let n = roots.len();
    let mut contacts = vec![vec![None; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let c = contact_order(&roots[a], &roots[b])?;
            contacts[a][b] = Some(c.clone());
            contacts[b][a] = Some(c);
        }
    }
    Ok(RootSystem { expansion: exp.clone(), roots, branches, contacts })
}

/// Argument of `z` in turns, in `[0, 1)`, snapped to 0 near the cut.
pub fn arg_turns(z: Complex64) -> f64 {
    let mut t = z.arg() / (2.0 * PI);
    if t < 0.0 {
        t += 1.0;
    }
    if t < ARG_SNAP || 1.0 - t < ARG_SNAP {
        0.0
    } else {
        t
    }
}

fn arg_key(root: &[(Rational, Complex64)], exps: &[Rational]) -> Vec<f64> {
    exps.iter()
        .map(|e| {
            let c = root.iter().find(|t| &t.0 == e).map(|t| t.1).unwrap_or_else(Complex64::zero);
            arg_turns(c)
        })
        .collect()
}

fn lex_order(keys: &[Vec<f64>]) -> Result<Vec<usize>> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    let mut tie = None;
    idx.sort_by(|&a, &b| {
        for (x, y) in keys[a].iter().zip(&keys[b]) {
            if (x - y).abs() > 1e-9 {
                return x.partial_cmp(y).unwrap();
            }
        }
        if a != b {
            tie = Some((a, b));
        }
        std::cmp::Ordering::Equal
    });
    if let Some((a, b)) = tie {
        return Err(GermError::ArgumentTie(format!("conjugates {a} and {b}")));
    }
    Ok(idx)
}

/// One branch with its canonical first root.
#[derive(Clone, Debug)]
pub struct Branch {
    pub id: usize,
    pub ramification: u32,
    pub multiplicity: u32,
    pub factor: usize,
    /// `lambda_{k,1}`.
    pub first_root: PuiseuxRoot,
    pub char_exponents: Vec<Rational>,
    /// Root indices in the [`RootSystem`]; entry `j - 1` is conjugate `j`.
    pub conjugates: Vec<usize>,
    pub lambda_all: Vec<Rational>,
    pub lambda_p: Vec<Rational>,
    pub lambda_free: Vec<Rational>,
    /// Whether ordering by arguments over `Lambda_k` agrees with ordering over `Lambda_P`.
    pub ordering_agrees: bool,
}

impl Branch {
    /// `Lambda_k = Lambda_P ∪ Lambda_free`, increasing.
    pub fn lambda_k(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self.lambda_p.iter().chain(&self.lambda_free).cloned().collect();
        v.sort();
        v
    }
}

/// Lowest common denominator of a list of rationals.
pub fn lcm_denoms<'a>(v: impl IntoIterator<Item = &'a Rational>) -> num_bigint::BigInt {
    v.into_iter().fold(num_bigint::BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// `Lambda_free`: exponents of `all` outside `p` whose denominator divides the
/// lcm of the denominators of the smaller exponents of `p`.
pub fn lambda_free(all: &[Rational], p: &[Rational]) -> Vec<Rational> {
    all.iter()
        .filter(|a| !p.contains(a))
        .filter(|a| {
            let l = lcm_denoms(p.iter().filter(|e| e < a));
            (&l % a.denom()).is_zero()
        })
        .cloned()
        .collect()
}

/// Canonical first roots, conjugate numbering and exponent sets for every branch.
/// `multiplicities[j]` is the multiplicity of factor `j`.
pub fn branches(rs: &RootSystem, multiplicities: &[u32]) -> Result<Vec<Branch>> {
    let mut out = Vec::new();
    for (k, b) in rs.branches.iter().enumerate() {
        let m = b.members.len();
        let lambda_p = b.char_exponents.clone();
        let keys: Vec<Vec<f64>> = b.members.iter().map(|&r| arg_key(&rs.roots[r].terms, &lambda_p)).collect();
        let order = lex_order(&keys)?;
        let first = b.members[order[0]];
        let mut lambda_all: Vec<Rational> = (0..rs.roots.len())
            .filter(|&r| r != first)
            .filter_map(|r| rs.contacts[first][r].clone())
            .collect();
        lambda_all.sort();
        lambda_all.dedup();
        let free = lambda_free(&lambda_all, &lambda_p);
        // ordering over Lambda_k restricted to nonzero coefficients of the first root
        let mut lk: Vec<Rational> = lambda_p.iter().chain(&free).cloned().collect();
        lk.sort();
        let first_terms = &rs.roots[first].terms;
        lk.retain(|e| first_terms.iter().any(|t| &t.0 == e && !coeff_eq(t.1, Complex64::zero())));
        let keys_k: Vec<Vec<f64>> = b.members.iter().map(|&r| arg_key(&rs.roots[r].terms, &lk)).collect();
        let ordering_agrees = lex_order(&keys_k).map(|o| o == order).unwrap_or(false);
        // conjugate j is the rotation of the first root by j; j = m is the first root
        let base_rot = rs.roots[first].conjugate as i64;
        let conjugates: Vec<usize> = (1..=m as i64)
            .map(|j| b.members[((base_rot + j) % m as i64) as usize])
            .collect();
        let mut first_root = rs.roots[first].clone();
        first_root.conjugate = 1;
        out.push(Branch {
            id: k,
            ramification: b.ramification,
            multiplicity: multiplicities[b.factor],
            factor: b.factor,
            first_root,
            char_exponents: b.char_exponents.clone(),
            conjugates,
            lambda_all,
            lambda_p,
            lambda_free: free,
            ordering_agrees,
        });
    }
    Ok(out)
}

/// `lambda_{k,j}(y) = sum a_alpha(k,1) theta^(j alpha m) y^alpha` with `theta = exp(2 pi i / m)`.
pub fn conjugate_expansion(b: &Branch, j: usize) -> PuiseuxRoot {
    let m = b.ramification as usize;
    assert!((1..=m).contains(&j), "conjugate index out of range");
    PuiseuxRoot {
        branch: b.id,
        conjugate: j,
        terms: b.first_root.rotate(j as i64),
        truncation: b.first_root.truncation.clone(),
    }
}

/// Exact conjugates of a leaf representative: the field extended by a primitive
/// `m`-th root of unity `zeta`, and the `m` rotated roots `sum a_alpha zeta^(j alpha m) y^alpha`.
pub fn exact_conjugates(leaf: &LeafOrbit, cap: usize) -> Result<(Arc<NumberField>, Vec<Vec<(Rational, AlgNum)>>)> {
    let m = leaf.ramification as usize;
    let (field, map, zeta) = if m <= 2 {
        let z = if m == 2 { -AlgNum::one() } else { AlgNum::one() };
        (leaf.field.clone(), FieldMap::identity(&leaf.field), z.promote(&leaf.field))
    } else {
        let phi = cyclotomic(m).map(|c| AlgNum::rational(c.clone()));
        let fs = factor_squarefree_over(&leaf.field, &phi);
        leaf.field.adjoin(&fs[0], cap)?
    };
    let terms: Vec<(Rational, AlgNum)> = leaf.terms.iter().map(|(e, c)| (e.clone(), map.apply(c))).collect();
    let mut powers = vec![AlgNum::one().promote(&field)];
    for _ in 1..m {
        let next = powers.last().unwrap().clone() * zeta.clone();
        powers.push(next);
    }
    let roots = (0..m)
        .map(|j| {
            terms
                .iter()
                .map(|(e, c)| {
                    let k = (e * Rational::from_integer((m as i64).into())).to_integer();
                    let idx = ((k * j as i64) % m as i64).to_usize().unwrap();
                    (e.clone(), c.clone() * powers[idx].clone())
                })
                .collect()
        })
        .collect();
    Ok((field, roots))
}

/// First exponent where two exact term lists differ.
pub fn exact_contact(a: &[(Rational, AlgNum)], b: &[(Rational, AlgNum)]) -> Option<Rational> {
    let mut exps: Vec<&Rational> = a.iter().chain(b).map(|t| &t.0).collect();
    exps.sort();
    exps.dedup();
    let get = |v: &[(Rational, AlgNum)], e: &Rational| v.iter().find(|t| &t.0 == e).map(|t| t.1.clone()).unwrap_or_else(AlgNum::zero);
    exps.into_iter().find(|e| get(a, e) != get(b, e)).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

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

    fn run(factors: &[P], trunc: i64) -> RootSystem {
        let exp = expand(factors, &ExpandConfig::new(int(trunc))).unwrap();
        concrete_roots(&exp).unwrap()
    }

    #[test]
    fn cusp_single_branch() {
        let rs = run(&[x().pow(2) - y().pow(3)], 4);
        assert_eq!(rs.branches.len(), 1);
        let b = &rs.branches[0];
        assert_eq!(b.ramification, 2);
        assert_eq!(b.char_exponents, vec![rat(3, 2)]);
        let bs = branches(&rs, &[1]).unwrap();
        let r = &bs[0].first_root;
        assert_eq!(r.terms.len(), 1);
        assert_eq!(r.terms[0].0, rat(3, 2));
        assert!((r.terms[0].1 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(bs[0].lambda_all, vec![rat(3, 2)]);
        assert!(bs[0].lambda_free.is_empty());
    }

    #[test]
    fn conjugate_indexing() {
        let rs = run(&[x().pow(2) - y().pow(3)], 4);
        let b = &branches(&rs, &[1]).unwrap()[0];
        let c1 = conjugate_expansion(b, 1);
        let c2 = conjugate_expansion(b, 2);
        assert!((c1.terms[0].1 + 1.0).norm() < 1e-12);
        assert!((c2.terms[0].1 - 1.0).norm() < 1e-12);
    }

    #[test]
    fn sum_of_squares_splits() {
        let rs = run(&[x().pow(2) + y().pow(2)], 3);
        assert_eq!(rs.branches.len(), 2);
        assert!(rs.branches.iter().all(|b| b.ramification == 1));
        assert_eq!(rs.contacts[0][1], Some(int(1)));
    }

    #[test]
    fn cusp_with_tail() {
        let f = x().pow(2) - y().pow(3) - y().pow(4);
        let rs = run(&[f], 4);
        let b = &branches(&rs, &[1]).unwrap()[0];
        let t = &b.first_root.terms;
        assert_eq!(t[0].0, rat(3, 2));
        assert_eq!(t[1].0, rat(5, 2));
        assert_eq!(t[2].0, rat(7, 2));
        assert!((t[1].1 - 0.5).norm() < 1e-12);
        assert!((t[2].1 + 0.125).norm() < 1e-12);
        assert_eq!(b.char_exponents, vec![rat(3, 2)]);
    }

    #[test]
    fn two_pairs_branch() {
        // x = y^(3/2) + y^(7/4): (x^2 - y^3)^2 - 4 x y^5 - y^7 has one branch of ramification 4
        let f = (x().pow(2) - y().pow(3)).pow(2) - k(4) * x() * y().pow(5) - y().pow(7);
        let trunc = sufficient_truncation(&f).unwrap();
        let exp = expand(&[f], &ExpandConfig::new(trunc)).unwrap();
        let rs = concrete_roots(&exp).unwrap();
        assert_eq!(rs.branches.len(), 1);
        assert_eq!(rs.branches[0].ramification, 4);
        assert_eq!(rs.branches[0].char_exponents, vec![rat(3, 2), rat(7, 4)]);
        let b = &branches(&rs, &[1]).unwrap()[0];
        assert!(b.ordering_agrees);
        // conjugate j has phases i^{3j}... theta^{j alpha m} with theta = i
        for j in 1..=4 {
            let c = conjugate_expansion(b, j);
            let a = c.coeff(&rat(3, 2)) / b.first_root.coeff(&rat(3, 2));
            let expect = Complex64::i().powi(6 * j as i32);
            assert!((a - expect).norm() < 1e-9);
            let a = c.coeff(&rat(7, 4)) / b.first_root.coeff(&rat(7, 4));
            let expect = Complex64::i().powi(7 * j as i32);
            assert!((a - expect).norm() < 1e-9);
        }
    }

    #[test]
    fn exact_root_child() {
        // x (x - y): one exact root x = 0
        let rs = run(&[x(), x() - y()], 3);
        assert_eq!(rs.branches.len(), 2);
        assert_eq!(rs.contacts[0][1], Some(int(1)));
        let rs = run(&[x() * (x() - y().pow(2))], 4);
        assert_eq!(rs.contacts[0][1], Some(int(2)));
    }

    #[test]
    fn irrational_coefficients() {
        // x^2 - 2 y^3: coefficient sqrt 2
        let rs = run(&[x().pow(2) - k(2) * y().pow(3)], 4);
        assert_eq!(rs.branches.len(), 1);
        let b = &branches(&rs, &[1]).unwrap()[0];
        assert!((b.first_root.terms[0].1 - 2f64.sqrt()).norm() < 1e-9);
        // x^2 - 2 y^2: two branches with conjugate slopes
        let rs = run(&[x().pow(2) - k(2) * y().pow(2)], 3);
        assert_eq!(rs.branches.len(), 2);
    }

    #[test]
    fn truncation_too_small() {
        let f = x() * (x() - y().pow(3));
        let r = expand(&[f], &ExpandConfig::new(int(2)));
        assert!(matches!(r, Err(GermError::TruncationTooSmall(_))));
    }

    #[test]
    fn sufficient_truncation_examples() {
        assert_eq!(sufficient_truncation(&(x().pow(2) - y().pow(3))).unwrap(), int(4));
        assert_eq!(sufficient_truncation(&(x() * (x() - y()))).unwrap(), int(3));
        assert_eq!(sufficient_truncation(&(x() - y())).unwrap(), int(1));
    }

    #[test]
    fn contact_examples() {
        let mk = |terms: Vec<(Rational, f64)>| PuiseuxRoot {
            branch: 0,
            conjugate: 1,
            terms: terms.into_iter().map(|(e, c)| (e, Complex64::new(c, 0.0))).collect(),
            truncation: int(5),
        };
        let cusp_plus = mk(vec![(rat(3, 2), 1.0)]);
        let cusp_minus = mk(vec![(rat(3, 2), -1.0)]);
        let line = mk(vec![(int(1), 1.0)]);
        assert_eq!(contact_order(&cusp_plus, &cusp_minus).unwrap(), rat(3, 2));
        assert_eq!(contact_order(&cusp_plus, &line).unwrap(), int(1));
        let l2 = mk(vec![(int(1), 2.0)]);
        assert_eq!(contact_order(&line, &l2).unwrap(), int(1));
        let l3 = mk(vec![(int(1), 1.0), (int(2), 1.0)]);
        assert_eq!(contact_order(&line, &l3).unwrap(), int(2));
        assert!(contact_order(&line, &line).is_err());
    }

    #[test]
    fn abstract_matches_numeric_contacts() {
        let f = (x().pow(2) - y().pow(3)) * (x() - y());
        let exp = expand(&[x().pow(2) - y().pow(3), x() - y()], &ExpandConfig::new(int(6))).unwrap();
        let ab = abstract_roots(&exp);
        assert_eq!(ab.len(), 3);
        let mut cs: Vec<Rational> = Vec::new();
        for a in 0..3 {
            for b in a + 1..3 {
                cs.push(abstract_contact(&ab[a], &ab[b]));
            }
        }
        cs.sort();
        assert_eq!(cs, vec![int(1), int(1), rat(3, 2)]);
        let _ = f;
    }

    #[test]
    fn exact_conjugates_of_branch() {
        let f = (x().pow(2) - y().pow(3)).pow(2) - k(4) * x() * y().pow(5) - y().pow(7);
        let exp = expand(&[f], &ExpandConfig::new(int(9))).unwrap();
        let (_, roots) = exact_conjugates(&exp.leaves[0], 64).unwrap();
        assert_eq!(roots.len(), 4);
        let mut cs = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                cs.push(exact_contact(&roots[a], &roots[b]).unwrap());
            }
        }
        cs.sort();
        assert_eq!(cs, vec![rat(3, 2), rat(3, 2), rat(3, 2), rat(3, 2), rat(7, 4), rat(7, 4)]);
    }
}
