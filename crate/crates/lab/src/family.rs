//! The normal family of a germ, its joint version for two equivalent germs,
//! the deformation space and exact evaluation with gradients.

use num_complex::Complex64;
use num_traits::{Float, ToPrimitive, Zero};

use germ_core::arith::fmt_rational;
use germ_core::invariants::{analyze, AnalyzeConfig, GermInvariant};
use germ_core::poly::weierstrass_unit;
use germ_core::puiseux::{conjugate_expansion, numeric_contact, turn, COEFF_TOL};
use germ_core::tree::bijection_match;
use germ_core::{BiPoly, Gaussian, GermError, Rational};

use crate::{cast, to_c, LabError, Result, C};

/// Default order in `y` up to which roots and units are expanded.
pub const DEFAULT_TAIL_ORDER: i64 = 16;
/// Relative size of the neglected remainder accepted inside the validity radius.
pub const VALIDITY_TOL: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub enum Constraint {
    /// `a_alpha(k) != 0` for `alpha` in `Lambda_P(k)`.
    NonZero { k: usize, i: usize },
    /// `a_alpha(k1) = a_alpha(k2)` below the contact of the two first roots.
    Equal { k1: usize, i1: usize, k2: usize, i2: usize },
    /// `a_alpha(k1) != a_alpha(k2)` at the contact of the two first roots.
    Distinct { k1: usize, i1: usize, k2: usize, i2: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchExponents {
    pub m: u32,
    pub d: u32,
    pub lambda_p: Vec<Rational>,
    pub lambda_free: Vec<Rational>,
    /// `Lambda_k`, increasing; indexes the coordinates `a(k)`.
    pub lambda_k: Vec<Rational>,
}

/// `D(f)`: exponent sets, thresholds and the constraint list.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationSpace {
    pub branches: Vec<BranchExponents>,
    /// Contact of the first roots of two branches; `None` on the diagonal.
    pub thresholds: Vec<Vec<Option<Rational>>>,
    pub constraints: Vec<Constraint>,
}

pub fn deformation_space(inv: &GermInvariant) -> DeformationSpace {
    let branches: Vec<BranchExponents> = inv
        .branch_data
        .iter()
        .map(|b| BranchExponents {
            m: b.ramification,
            d: b.multiplicity,
            lambda_p: b.lambda_p.clone(),
            lambda_free: b.lambda_free.clone(),
            lambda_k: b.lambda_k(),
        })
        .collect();
    let nb = branches.len();
    let mut thresholds = vec![vec![None; nb]; nb];
    for k1 in 0..nb {
        for k2 in 0..nb {
            if k1 != k2 {
                thresholds[k1][k2] =
                    numeric_contact(&inv.branch_data[k1].first_root.terms, &inv.branch_data[k2].first_root.terms);
            }
        }
    }
    let constraints = constraints_of(&branches, &thresholds);
    DeformationSpace { branches, thresholds, constraints }
}

fn constraints_of(branches: &[BranchExponents], thresholds: &[Vec<Option<Rational>>]) -> Vec<Constraint> {
    let mut out = Vec::new();
    for (k, b) in branches.iter().enumerate() {
        for (i, alpha) in b.lambda_k.iter().enumerate() {
            if b.lambda_p.contains(alpha) {
                out.push(Constraint::NonZero { k, i });
            }
        }
    }
    for k1 in 0..branches.len() {
        for k2 in k1 + 1..branches.len() {
            let Some(th) = &thresholds[k1][k2] else { continue };
            for (i1, alpha) in branches[k1].lambda_k.iter().enumerate() {
                let Some(i2) = branches[k2].lambda_k.iter().position(|b| b == alpha) else { continue };
                if alpha < th {
                    out.push(Constraint::Equal { k1, i1, k2, i2 });
                } else if alpha == th {
                    out.push(Constraint::Distinct { k1, i1, k2, i2 });
                }
            }
        }
    }
    out
}

/// A point `(tau, s, u0, a)` of the parameter space; `tau` and `s` have two
/// entries for the joint family.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamPoint<T> {
    pub tau: Vec<C<T>>,
    pub s: Vec<C<T>>,
    pub u0: C<T>,
    pub a: Vec<Vec<C<T>>>,
}

impl<T: Float> ParamPoint<T> {
    pub fn flat(&self) -> Vec<C<T>> {
        let mut v = self.tau.clone();
        v.extend(&self.s);
        v.push(self.u0);
        for a in &self.a {
            v.extend(a);
        }
        v
    }

    /// Same shape as `self`, coordinates from `v`.
    pub fn with_flat(&self, v: &[C<T>]) -> Self {
        let mut it = v.iter().copied();
        let mut take = |n: usize| (0..n).map(|_| it.next().expect("flat vector too short")).collect::<Vec<_>>();
        let tau = take(self.tau.len());
        let s = take(self.s.len());
        let u0 = take(1)[0];
        let a = self.a.iter().map(|a| take(a.len())).collect();
        ParamPoint { tau, s, u0, a }
    }

    /// `(1 - w) self + w other`, coordinate by coordinate.
    pub fn lerp(&self, other: &Self, w: T) -> Self {
        let one = T::one();
        let v: Vec<C<T>> = self.flat().iter().zip(other.flat()).map(|(a, b)| *a * (one - w) + b * w).collect();
        self.with_flat(&v)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.tau.len() == other.tau.len()
            && self.s.len() == other.s.len()
            && self.a.len() == other.a.len()
            && self.a.iter().zip(&other.a).all(|(x, y)| x.len() == y.len())
    }
}

/// Conditions (1)-(3) of the deformation space, checked exactly, plus `u0 != 0`.
pub fn check_param<T: Float>(space: &DeformationSpace, p: &ParamPoint<T>) -> bool {
    if p.a.len() != space.branches.len() || p.a.iter().zip(&space.branches).any(|(a, b)| a.len() != b.lambda_k.len()) {
        return false;
    }
    if p.u0.is_zero() {
        return false;
    }
    space.constraints.iter().all(|c| match *c {
        Constraint::NonZero { k, i } => !p.a[k][i].is_zero(),
        Constraint::Equal { k1, i1, k2, i2 } => p.a[k1][i1] == p.a[k2][i2],
        Constraint::Distinct { k1, i1, k2, i2 } => p.a[k1][i1] != p.a[k2][i2],
    })
}

/// Roots of one branch: `Lambda_k` part with phases, and tails per source.
#[derive(Clone, Debug)]
pub struct FamilyBranch<T> {
    pub m: u32,
    pub d: u32,
    /// `alpha n` for `alpha` in `Lambda_k`.
    pub exps: Vec<u32>,
    /// `phases[j - 1][i] = theta^(j alpha_i m)`.
    pub phases: Vec<Vec<C<T>>>,
    /// `tails[src][j - 1]`: terms `(alpha n, c)` of `R_{src,k,j}`.
    pub tails: Vec<Vec<Vec<(u32, C<T>)>>>,
}

/// `u - u(0,0)` as a polynomial in `x` and `y`, truncated in `y`.
#[derive(Clone, Debug)]
pub struct UnitDeviation<T> {
    /// `coeffs[i][j]` multiplies `x^i y^j`.
    pub coeffs: Vec<Vec<C<T>>>,
    pub u00: C<T>,
}

impl<T: Float> UnitDeviation<T> {
    /// Value and partial derivatives in `x` and `y`.
    pub fn eval(&self, x: C<T>, y: C<T>) -> (C<T>, C<T>, C<T>) {
        let (mut v, mut vx, mut vy) = (C::zero(), C::zero(), C::zero());
        let mut xp = C::new(T::one(), T::zero());
        let mut xp_prev = C::zero();
        for (i, row) in self.coeffs.iter().enumerate() {
            // Horner in y for the row and its y-derivative
            let (mut r, mut ry): (C<T>, C<T>) = (C::zero(), C::zero());
            for c in row.iter().rev() {
                ry = ry * y + r;
                r = r * y + c;
            }
            v = v + r * xp;
            vy = vy + ry * xp;
            if i > 0 {
                vx = vx + r * xp_prev * cast::<T>(i as f64);
            }
            xp_prev = xp;
            xp = xp * x;
        }
        (v, vx, vy)
    }
}

/// Exact data of one input germ in its transverse coordinates.
#[derive(Clone, Debug)]
pub struct Source {
    /// The germ after the shear `y -> y + c x`.
    pub poly: BiPoly,
    pub shear: Gaussian,
    pub invariant: GermInvariant,
    /// Branch of the invariant used as family branch `k`.
    pub branch_map: Vec<usize>,
}

impl Source {
    /// Direct evaluation of the transverse polynomial.
    pub fn eval<T: Float>(&self, x: C<T>, y: C<T>) -> C<T> {
        self.poly.terms().fold(C::zero(), |acc, (&(i, j), c)| acc + to_c::<T>(c.to_c64()) * x.powu(i) * y.powu(j))
    }

    /// Roots of the germ from its own expansion, at `y = t^n`.
    pub fn roots_t<T: Float>(&self, t: C<T>, n: u32) -> Vec<C<T>> {
        let mut out = Vec::new();
        for b in &self.invariant.branch_data {
            for j in 1..=b.ramification as usize {
                let r = conjugate_expansion(b, j);
                out.push(r.terms.iter().fold(C::zero(), |acc, (e, c)| {
                    let k = (e * Rational::from_integer(n.into())).to_integer().to_u32().unwrap();
                    acc + to_c::<T>(*c) * t.powu(k)
                }));
            }
        }
        out
    }
}

/// Value and exact gradient of the family at one point.
#[derive(Clone, Debug)]
pub struct FamilyEval<T> {
    pub value: C<T>,
    pub dx: C<T>,
    pub dy: C<T>,
    /// Derivatives along the flat parameter coordinates of [`ParamPoint::flat`].
    pub dv: Vec<C<T>>,
}

#[derive(Clone, Copy, Debug)]
pub struct RootEval<T> {
    pub lam: C<T>,
    /// `d lambda / dt` at fixed parameters.
    pub dt: C<T>,
    /// `d lambda / dy` at fixed parameters.
    pub dy: C<T>,
}

/// The family `F(tau, s, u0, a, x, y)`, single or joint.
#[derive(Clone, Debug)]
pub struct NormalFamily<T> {
    /// Common denominator: roots are analytic in `t = y^(1/n)`.
    pub n: u32,
    pub space: DeformationSpace,
    pub branches: Vec<FamilyBranch<T>>,
    pub units: Vec<UnitDeviation<T>>,
    pub sources: Vec<Source>,
    /// Distinguished point of each source.
    pub points: Vec<ParamPoint<T>>,
    /// Bound on `|y|` inside which truncations are trusted.
    pub validity_radius: T,
    pub tail_order: i64,
}

fn analyze_deep(f: &BiPoly, order: i64) -> Result<GermInvariant> {
    let mut trunc = order;
    loop {
        let cfg = AnalyzeConfig { trunc: Some(Rational::from_integer(trunc.into())), oracles: false, ..AnalyzeConfig::default() };
        match analyze(f, None, &cfg) {
            Err(GermError::TruncationTooSmall(_)) => trunc *= 2,
            other => return Ok(other?),
        }
    }
}

struct Raw {
    source: Source,
    /// `a[k][i]` from the first root.
    a: Vec<Vec<Complex64>>,
    /// Conjugate term lists `conj[k][j - 1]`.
    conj: Vec<Vec<Vec<(Rational, Complex64)>>>,
    unit: Vec<Vec<Complex64>>,
    u00: Complex64,
    radius: f64,
}

fn raw_source(f: &BiPoly, inv: GermInvariant, order: i64, map: Option<Vec<usize>>, space: &DeformationSpace) -> Result<Raw> {
    let poly = f.shear(&inv.shear);
    let branch_map = map.unwrap_or_else(|| (0..inv.branch_data.len()).collect());
    let mut a = Vec::new();
    let mut conj = Vec::new();
    let mut trunc = f64::INFINITY;
    for (k, &b) in branch_map.iter().enumerate() {
        let br = &inv.branch_data[b];
        trunc = trunc.min(br.first_root.truncation.to_f64().unwrap());
        a.push(space.branches[k].lambda_k.iter().map(|e| br.first_root.coeff(e)).collect());
        conj.push((1..=br.ramification as usize).map(|j| conjugate_expansion(br, j).terms).collect());
    }
    let prec = order as usize + 1;
    let (_, u) = weierstrass_unit(&poly, prec)?;
    let mut unit: Vec<Vec<Complex64>> =
        u.coeffs().iter().map(|row| (0..prec).map(|j| row.coeff(j).to_c64()).collect()).collect();
    if unit.is_empty() {
        return Err(LabError::Mismatch("zero unit".into()));
    }
    let u00 = unit[0][0];
    unit[0][0] = Complex64::zero();
    let radius = validity_radius(&conj, trunc, &unit);
    let source = Source { poly, shear: inv.shear.clone(), invariant: inv, branch_map };
    Ok(Raw { source, a, conj, unit, u00, radius })
}

/// Growth radius `min |c_e|^(-1/e)` over the upper half of a truncated series.
fn growth_radius<'a>(terms: impl Iterator<Item = (f64, &'a Complex64)>, order: f64) -> f64 {
    terms
        .filter(|(e, c)| *e >= order / 2.0 && *e > 0.0 && c.norm() > 0.0)
        .map(|(e, c)| c.norm().powf(-1.0 / e))
        .fold(f64::INFINITY, f64::min)
}

/// Largest radius on a fixed ladder where the neglected remainders, estimated
/// geometrically from the retained coefficients, are negligible.
fn validity_radius(conj: &[Vec<Vec<(Rational, Complex64)>>], trunc: f64, unit: &[Vec<Complex64>]) -> f64 {
    let rho_root = conj
        .iter()
        .flatten()
        .map(|terms| growth_radius(terms.iter().map(|(e, c)| (e.to_f64().unwrap(), c)), trunc))
        .fold(f64::INFINITY, f64::min);
    let prec = unit.first().map_or(0, |r| r.len()) as f64;
    let rho_unit = unit
        .iter()
        .map(|row| growth_radius(row.iter().enumerate().map(|(j, c)| (j as f64, c)), prec))
        .fold(f64::INFINITY, f64::min);
    let ok = |r: f64| (r / rho_root).powf(trunc) <= VALIDITY_TOL * r && (r / rho_unit).powf(prec) <= VALIDITY_TOL;
    let mut r = 0.1;
    while r > 1e-12 && !ok(r) {
        r /= 10f64.powf(0.25);
    }
    r
}

fn find(parent: &mut [usize], a: usize) -> usize {
    if parent[a] != a {
        let r = find(parent, parent[a]);
        parent[a] = r;
    }
    parent[a]
}

impl<T: Float> NormalFamily<T> {
    /// The normal family of one germ.
    pub fn new(f: &BiPoly) -> Result<Self> {
        Self::with_order(f, DEFAULT_TAIL_ORDER)
    }

    pub fn with_order(f: &BiPoly, order: i64) -> Result<Self> {
        let inv = analyze_deep(f, order)?;
        let space = deformation_space(&inv);
        let raw = raw_source(f, inv, order, None, &space)?;
        Self::assemble(space, vec![raw], order)
    }

    /// The joint family of two equivalent germs.
    pub fn joint(f: &BiPoly, g: &BiPoly) -> Result<Self> {
        Self::joint_with_order(f, g, DEFAULT_TAIL_ORDER)
    }

    pub fn joint_with_order(f: &BiPoly, g: &BiPoly, order: i64) -> Result<Self> {
        let fi = analyze_deep(f, order)?;
        let gi = analyze_deep(g, order)?;
        if fi.encoding != gi.encoding {
            return Err(LabError::Inequivalent(format!("{} vs {}", fi.encoding, gi.encoding)));
        }
        let assign = bijection_match(&fi, &gi)
            .ok_or_else(|| LabError::Inequivalent("no branch correspondence".into()))?;
        let space = deformation_space(&fi);
        let gspace = deformation_space(&gi);
        let nb = space.branches.len();
        for k in 0..nb {
            if space.branches[k] != gspace.branches[assign[k]] {
                return Err(LabError::Mismatch(format!("exponent sets of branch {k} differ")));
            }
            for l in 0..nb {
                if space.thresholds[k][l] != gspace.thresholds[assign[k]][assign[l]] {
                    return Err(LabError::Mismatch(format!("first-root contacts of branches {k}, {l} differ")));
                }
            }
        }
        let rf = raw_source(f, fi, order, None, &space)?;
        let rg = raw_source(g, gi, order, Some(assign), &space)?;
        Self::assemble(space, vec![rf, rg], order)
    }

    fn assemble(space: DeformationSpace, mut raws: Vec<Raw>, order: i64) -> Result<Self> {
        let n = space.branches.iter().fold(1u32, |acc, b| num_integer::lcm(acc, b.m));
        let nsrc = raws.len();
        // condition (2) holds exactly: coupled coordinates share one value
        let offsets: Vec<usize> = space
            .branches
            .iter()
            .scan(0, |acc, b| {
                let o = *acc;
                *acc += b.lambda_k.len();
                Some(o)
            })
            .collect();
        let total: usize = space.branches.iter().map(|b| b.lambda_k.len()).sum();
        let mut parent: Vec<usize> = (0..total).collect();
        for c in &space.constraints {
            if let Constraint::Equal { k1, i1, k2, i2 } = *c {
                let (a, b) = (find(&mut parent, offsets[k1] + i1), find(&mut parent, offsets[k2] + i2));
                parent[a.max(b)] = a.min(b);
            }
        }
        for raw in &mut raws {
            let flat: Vec<Complex64> = raw.a.iter().flatten().copied().collect();
            for (k, row) in raw.a.iter_mut().enumerate() {
                for (i, v) in row.iter_mut().enumerate() {
                    let r = find(&mut parent, offsets[k] + i);
                    let rep = flat[r];
                    if (rep - *v).norm() > COEFF_TOL * 1f64.max(rep.norm()) {
                        return Err(LabError::Mismatch("first roots disagree below their contact".into()));
                    }
                    *v = rep;
                }
            }
        }
        let nr = Rational::from_integer(n.into());
        let texp = |e: &Rational| (e * &nr).to_integer().to_u32().expect("exponent");
        let mut branches = Vec::new();
        for (k, b) in space.branches.iter().enumerate() {
            let exps: Vec<u32> = b.lambda_k.iter().map(texp).collect();
            let tail_low = raws.iter().flat_map(|r| r.conj[k].iter().flatten()).any(|(e, _)| texp(e) < n);
            if tail_low || exps.iter().any(|&e| e < n) {
                return Err(LabError::Mismatch("exponent below 1 after transversality".into()));
            }
            let phases = (1..=b.m as i64).map(|j| b.lambda_k.iter().map(|e| to_c::<T>(turn(e, j))).collect()).collect();
            let tails = raws
                .iter()
                .map(|raw| {
                    raw.conj[k]
                        .iter()
                        .map(|terms| {
                            terms
                                .iter()
                                .filter(|(e, _)| !b.lambda_k.contains(e))
                                .map(|(e, c)| (texp(e), to_c::<T>(*c)))
                                .collect()
                        })
                        .collect()
                })
                .collect();
            branches.push(FamilyBranch { m: b.m, d: b.d, exps, phases, tails });
        }
        let units = raws
            .iter()
            .map(|raw| UnitDeviation {
                coeffs: raw.unit.iter().map(|row| row.iter().map(|c| to_c::<T>(*c)).collect()).collect(),
                u00: to_c::<T>(raw.u00),
            })
            .collect::<Vec<_>>();
        let points = (0..nsrc)
            .map(|src| {
                let e = |i: usize| if i == src { C::new(T::one(), T::zero()) } else { C::zero() };
                ParamPoint {
                    tau: (0..nsrc).map(e).collect(),
                    s: (0..nsrc).map(e).collect(),
                    u0: units[src].u00,
                    a: raws[src].a.iter().map(|row| row.iter().map(|c| to_c::<T>(*c)).collect()).collect(),
                }
            })
            .collect();
        let radius = raws.iter().map(|r| r.radius).fold(f64::INFINITY, f64::min);
        Ok(NormalFamily {
            n,
            space,
            branches,
            units,
            sources: raws.into_iter().map(|r| r.source).collect(),
            points,
            validity_radius: cast(radius),
            tail_order: order,
        })
    }

    pub fn is_joint(&self) -> bool {
        self.sources.len() == 2
    }

    pub fn root_count(&self) -> usize {
        self.branches.iter().map(|b| b.m as usize).sum()
    }

    /// Branch of every root, in root order.
    pub fn root_branch(&self) -> Vec<usize> {
        self.branches.iter().enumerate().flat_map(|(k, b)| std::iter::repeat(k).take(b.m as usize)).collect()
    }

    /// Multiplicity of every root, in root order.
    pub fn root_multiplicity(&self) -> Vec<u32> {
        self.branches.iter().flat_map(|b| std::iter::repeat(b.d).take(b.m as usize)).collect()
    }

    /// Names of the flat parameter coordinates.
    pub fn param_names(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.is_joint() {
            v.extend(["tau1", "tau2", "s_f", "s_g"].map(String::from));
        } else {
            v.extend(["tau", "s"].map(String::from));
        }
        v.push("u0".into());
        for (k, b) in self.space.branches.iter().enumerate() {
            for e in &b.lambda_k {
                v.push(format!("a[{}][{}]", k + 1, fmt_rational(e)));
            }
        }
        v
    }

    pub fn param_count(&self) -> usize {
        2 * self.sources.len() + 1 + self.space.branches.iter().map(|b| b.lambda_k.len()).sum::<usize>()
    }

    fn check_shape(&self, p: &ParamPoint<T>) -> Result<()> {
        if p.same_shape(&self.points[0]) {
            Ok(())
        } else {
            Err(LabError::Shape(format!("expected the shape of {:?}", self.param_names())))
        }
    }

    /// Principal `n`-th root of `y`.
    pub fn principal_t(&self, y: C<T>) -> C<T> {
        if y.is_zero() {
            return C::zero();
        }
        let (r, th) = y.to_polar();
        let n = cast::<T>(self.n as f64);
        C::from_polar(r.powf(T::one() / n), th / n)
    }

    fn max_exp(&self) -> usize {
        self.branches
            .iter()
            .flat_map(|b| b.exps.iter().copied().chain(b.tails.iter().flatten().flatten().map(|t| t.0)))
            .max()
            .unwrap_or(0) as usize
    }

    fn t_powers(&self, t: C<T>) -> Vec<C<T>> {
        let mut tp = vec![C::new(T::one(), T::zero())];
        for _ in 0..self.max_exp() {
            let last = *tp.last().unwrap();
            tp.push(last * t);
        }
        tp
    }

    /// All roots `lambda_{k,j}(s, a, t^n)` with their `t`- and `y`-derivatives.
    pub fn roots_t(&self, p: &ParamPoint<T>, t: C<T>) -> Vec<RootEval<T>> {
        let tp = self.t_powers(t);
        let n = self.n;
        let nf = cast::<T>(n as f64);
        let mut out = Vec::with_capacity(self.root_count());
        for (k, b) in self.branches.iter().enumerate() {
            for j in 0..b.m as usize {
                let mut r = RootEval { lam: C::zero(), dt: C::zero(), dy: C::zero() };
                let mut add = |e: u32, c: C<T>| {
                    let e = e as usize;
                    r.lam = r.lam + c * tp[e];
                    if e > 0 {
                        r.dt = r.dt + c * tp[e - 1] * cast::<T>(e as f64);
                    }
                    if e >= n as usize {
                        r.dy = r.dy + c * tp[e - n as usize] * (cast::<T>(e as f64) / nf);
                    }
                };
                for (i, &e) in b.exps.iter().enumerate() {
                    add(e, p.a[k][i] * b.phases[j][i]);
                }
                for (src, tails) in b.tails.iter().enumerate() {
                    for &(e, c) in &tails[j] {
                        add(e, p.s[src] * c);
                    }
                }
                out.push(r);
            }
        }
        out
    }

    /// `F` (or the reduced `G`) at `x` and `y = t^n` with all first derivatives.
    pub fn eval_t(&self, p: &ParamPoint<T>, x: C<T>, t: C<T>, reduced: bool) -> FamilyEval<T> {
        let tp = self.t_powers(t);
        let n = self.n as usize;
        let y = tp.get(n).copied().unwrap_or_else(|| t.powu(n as u32));
        let roots = self.roots_t(p, t);
        let mult = self.root_multiplicity();
        let nroots = roots.len();
        let (phi, dphi): (Vec<C<T>>, Vec<C<T>>) = roots
            .iter()
            .zip(&mult)
            .map(|(r, &d)| {
                let d = if reduced { 1 } else { d };
                let z = x - r.lam;
                let low = z.powu(d - 1);
                (low * z, low * cast::<T>(d as f64))
            })
            .unzip();
        let mut prefix = vec![C::new(T::one(), T::zero()); nroots + 1];
        for i in 0..nroots {
            prefix[i + 1] = prefix[i] * phi[i];
        }
        let mut suffix = vec![C::new(T::one(), T::zero()); nroots + 1];
        for i in (0..nroots).rev() {
            suffix[i] = suffix[i + 1] * phi[i];
        }
        let prod = prefix[nroots];
        // w_i = prod_{l != i} phi_l * phi_i'
        let w: Vec<C<T>> = (0..nroots).map(|i| prefix[i] * suffix[i + 1] * dphi[i]).collect();
        let px = w.iter().fold(C::zero(), |acc, wi| acc + wi);
        let py = w.iter().zip(&roots).fold(C::zero(), |acc, (wi, r)| acc - wi * r.dy);

        let nsrc = self.sources.len();
        let mut unit = p.u0;
        let (mut ux, mut uy): (C<T>, C<T>) = (C::zero(), C::zero());
        let mut devs = Vec::with_capacity(nsrc);
        for (src, u) in self.units.iter().enumerate() {
            let (v, vx, vy) = u.eval(x, y);
            unit = unit + p.tau[src] * v;
            ux = ux + p.tau[src] * vx;
            uy = uy + p.tau[src] * vy;
            devs.push(v);
        }

        let mut dv = Vec::with_capacity(self.param_count());
        for v in &devs {
            dv.push(*v * prod);
        }
        let mut root = 0;
        let mut ds = vec![C::<T>::zero(); nsrc];
        let mut da = Vec::new();
        for b in &self.branches {
            let mut row = vec![C::<T>::zero(); b.exps.len()];
            for j in 0..b.m as usize {
                let wi = w[root];
                for (i, &e) in b.exps.iter().enumerate() {
                    row[i] = row[i] - wi * b.phases[j][i] * tp[e as usize];
                }
                for (src, tails) in b.tails.iter().enumerate() {
                    let r = tails[j].iter().fold(C::zero(), |acc, &(e, c)| acc + c * tp[e as usize]);
                    ds[src] = ds[src] - wi * r;
                }
                root += 1;
            }
            da.push(row);
        }
        dv.extend(ds.iter().map(|d| *d * unit));
        dv.push(prod);
        for row in da {
            dv.extend(row.into_iter().map(|d| d * unit));
        }
        FamilyEval { value: unit * prod, dx: ux * prod + unit * px, dy: uy * prod + unit * py, dv }
    }

    /// The unit factor `sum tau_src (u_src - u_src(0,0)) + u0`.
    pub fn unit_value(&self, p: &ParamPoint<T>, x: C<T>, y: C<T>) -> C<T> {
        self.units.iter().zip(&p.tau).fold(p.u0, |acc, (u, tau)| acc + *tau * u.eval(x, y).0)
    }

    /// Evaluation at `(x, y)` with the principal branch of `y^(1/n)`.
    pub fn eval(&self, p: &ParamPoint<T>, x: C<T>, y: C<T>, reduced: bool) -> Result<FamilyEval<T>> {
        self.check_shape(p)?;
        let r = y.norm();
        if r > self.validity_radius {
            return Err(LabError::OutsideValidity {
                y: r.to_f64().unwrap_or(f64::NAN),
                radius: self.validity_radius.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(self.eval_t(p, x, self.principal_t(y), reduced))
    }

    /// `t`-orders `e_{m,l}` of differences of roots at the first distinguished point.
    pub fn contact_exponents(&self) -> Vec<Vec<Option<u32>>> {
        let src = &self.sources[0];
        let mut terms = Vec::new();
        for &b in &src.branch_map {
            let br = &src.invariant.branch_data[b];
            for j in 1..=br.ramification as usize {
                terms.push(conjugate_expansion(br, j).terms);
            }
        }
        let nr = Rational::from_integer(self.n.into());
        (0..terms.len())
            .map(|a| {
                (0..terms.len())
                    .map(|b| {
                        if a == b {
                            None
                        } else {
                            numeric_contact(&terms[a], &terms[b]).map(|c| (c * &nr).to_integer().to_u32().unwrap())
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

