//! Topological invariants of a germ: branch multiplicities, Puiseux pairs,
//! contacts and intersection numbers, with resultant and Milnor-number oracles.

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{Gaussian, Rational};
use crate::error::{GermError, Result};
use crate::numfield::DEFAULT_TOWER_CAP;
use crate::poly::{
    check_degree, ensure_transverse, gcd_bivariate, local_intersection,
    squarefree_decompose, DEFAULT_DEGREE_CAP,
};
use crate::puiseux::{
    abstract_contact, abstract_roots, branches, concrete_roots, expand, Branch, ExpandConfig, RootSystem,
};
use crate::tree::{build_tree, canonical_encoding, CanonicalEncoding, KuoLuTree};
use crate::BiPoly;

/// Coprime pair `(p, q)` of one characteristic exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PuiseuxPair {
    pub p: u32,
    pub q: u32,
}

/// Pairs from characteristic exponents: `e_i * R_{i-1} = q_i / p_i` in lowest terms, `R_i = R_{i-1} p_i`.
pub fn puiseux_pairs(char_exponents: &[Rational]) -> Vec<PuiseuxPair> {
    let mut r = Rational::from_integer(1.into());
    let mut out = Vec::new();
    for e in char_exponents {
        let v = e * &r;
        let p = v.denom().to_u32().unwrap();
        let q = v.numer().to_u32().unwrap();
        out.push(PuiseuxPair { p, q });
        r *= Rational::from_integer(p.into());
    }
    out
}

/// Inverse of [`puiseux_pairs`].
pub fn char_exponents_from_pairs(pairs: &[PuiseuxPair]) -> Vec<Rational> {
    let mut r = 1u64;
    let mut out = Vec::new();
    for pp in pairs {
        out.push(Rational::new((pp.q as i64).into(), (pp.p as u64 * r).into()));
        r *= pp.p as u64;
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchInvariant {
    pub d: u32,
    pub m: u32,
    pub pairs: Vec<PuiseuxPair>,
    pub char_exponents: Vec<Rational>,
}

impl BranchInvariant {
    pub fn pairs_tuples(&self) -> Vec<(u32, u32)> {
        self.pairs.iter().map(|p| (p.p, p.q)).collect()
    }
}

/// Branch-level contacts.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactMatrix {
    /// Max-contact between distinct branches; `None` on the diagonal.
    pub entries: Vec<Vec<Option<Rational>>>,
    /// Contacts between conjugate roots of each branch, one per unordered pair, increasing.
    pub diagonal: Vec<Vec<Rational>>,
}

/// Intersection multiplicity check of two distinct local factors.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultantCheck {
    pub factors: (usize, usize),
    pub from_contacts: u64,
    pub from_resultant: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MilnorDelta {
    pub mu: u64,
    pub delta: u64,
    pub r: u64,
    pub consistent: bool,
}

#[derive(Clone, Debug)]
pub struct GermInvariant {
    pub branches: Vec<BranchInvariant>,
    pub contact: ContactMatrix,
    /// Intersection numbers of distinct branches; `None` on the diagonal.
    pub intersections: Vec<Vec<Option<u64>>>,
    pub germ_order: u32,
    pub tree: KuoLuTree,
    pub encoding: CanonicalEncoding,
    /// Shear `c` used for `f(x, y + c x)`.
    pub shear: Gaussian,
    pub trunc: Rational,
    /// Local factors after the shear, with multiplicities.
    pub factors: Vec<(BiPoly, u32)>,
    pub roots: RootSystem,
    /// Full branch data, in the same order as `branches`.
    pub branch_data: Vec<Branch>,
    pub resultant_checks: Vec<ResultantCheck>,
    /// Pairs of branches where the first-root contact is not the maximal root contact.
    pub lemma_violations: usize,
    /// Branches where ordering over `Lambda_k` and over `Lambda_P` differ.
    pub ordering_mismatches: usize,
    /// Present when every multiplicity is 1.
    pub milnor: Option<MilnorDelta>,
}

#[derive(Clone, Debug)]
pub struct AnalyzeConfig {
    /// Fixed truncation; by default it starts at 2 and doubles until every root separates below it.
    pub trunc: Option<Rational>,
    pub tower_cap: usize,
    pub degree_cap: u32,
    /// Run the resultant and Milnor-number cross-checks.
    pub oracles: bool,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig { trunc: None, tower_cap: DEFAULT_TOWER_CAP, degree_cap: DEFAULT_DEGREE_CAP, oracles: true }
    }
}

fn validate(f: &BiPoly, cap: u32) -> Result<()> {
    if f.is_zero() {
        return Err(GermError::ZeroPolynomial);
    }
    check_degree(f, cap)?;
    let c = f.constant_term();
    if !c.is_zero() {
        return Err(GermError::NotAGerm(c.to_string()));
    }
    Ok(())
}

/// Local squarefree factors with multiplicities after the shear, using the given
/// factorization when its parts are pairwise coprime.
fn local_factors(g: &BiPoly, c: &Gaussian, given: Option<&[(BiPoly, u32)]>) -> Result<Vec<(BiPoly, u32)>> {
    if let Some(given) = given {
        let mut parts = Vec::new();
        for (base, e) in given {
            for (p, d) in squarefree_decompose(&base.shear(c))?.local_parts() {
                parts.push((p, d * e));
            }
        }
        let coprime = (0..parts.len())
            .all(|i| (i + 1..parts.len()).all(|j| gcd_bivariate(&parts[i].0, &parts[j].0).total_degree() == 0));
        if coprime && !parts.is_empty() {
            return Ok(parts);
        }
    }
    Ok(squarefree_decompose(g)?.local_parts())
}

/// The full pipeline: shear, squarefree parts, expansion, canonical roots, matrices and tree.
pub fn analyze(f: &BiPoly, given: Option<&[(BiPoly, u32)]>, cfg: &AnalyzeConfig) -> Result<GermInvariant> {
    validate(f, cfg.degree_cap)?;
    let (g, c) = ensure_transverse(f)?;
    let factors = local_factors(&g, &c, given)?;
    let polys: Vec<BiPoly> = factors.iter().map(|(p, _)| p.clone()).collect();
    let mults: Vec<u32> = factors.iter().map(|(_, d)| *d).collect();
    let mut trunc = match &cfg.trunc {
        Some(t) => t.clone(),
        None => Rational::from_integer(2.into()),
    };
    let expansion = loop {
        let ecfg = ExpandConfig { trunc: trunc.clone(), tower_cap: cfg.tower_cap };
        match expand(&polys, &ecfg) {
            Err(GermError::TruncationTooSmall(_)) if cfg.trunc.is_none() => trunc = &trunc * Rational::from_integer(2.into()),
            other => break other?,
        }
    };
    let roots = concrete_roots(&expansion)?;
    let data = branches(&roots, &mults)?;
    // abstract tree from the exact expansion
    let abs = abstract_roots(&expansion);
    let mut keys: Vec<(usize, Vec<usize>)> = abs.iter().map(|a| a.branch_key.clone()).collect();
    keys.sort();
    keys.dedup();
    let abs_branch: Vec<usize> = abs.iter().map(|a| keys.binary_search(&a.branch_key).unwrap()).collect();
    let abs_d: Vec<u32> = keys.iter().map(|(l, _)| mults[expansion.leaves[*l].factor]).collect();
    let n_abs = abs.len();
    let mut abs_contacts = vec![vec![None; n_abs]; n_abs];
    for a in 0..n_abs {
        for b in a + 1..n_abs {
            let v = abstract_contact(&abs[a], &abs[b]);
            abs_contacts[a][b] = Some(v.clone());
            abs_contacts[b][a] = Some(v);
        }
    }
    let exact_tree = build_tree(&abs_contacts, &abs_branch, &abs_d)?;

    let branch_of: Vec<usize> = roots.roots.iter().map(|r| r.branch).collect();
    let d_of: Vec<u32> = data.iter().map(|b| b.multiplicity).collect();
    let tree = build_tree(&roots.contacts, &branch_of, &d_of)?;
    let encoding = canonical_encoding(&tree);
    if encoding != canonical_encoding(&exact_tree) {
        return Err(GermError::Inconsistent(format!(
            "numeric roots give {} but the exact expansion gives {}",
            encoding,
            canonical_encoding(&exact_tree)
        )));
    }

    // canonical branch order
    let mut order: Vec<usize> = (0..data.len()).collect();
    let sort_key = |k: usize| {
        let b = &data[k];
        (b.multiplicity, b.ramification, b.char_exponents.clone())
    };
    order.sort_by(|&a, &b| sort_key(a).cmp(&sort_key(b)).then(a.cmp(&b)));
    let data: Vec<Branch> = order.iter().map(|&k| data[k].clone()).collect();

    let nb = data.len();
    let mut entries = vec![vec![None; nb]; nb];
    let mut intersections = vec![vec![None; nb]; nb];
    let mut lemma_violations = 0;
    let contact = |a: usize, b: usize| roots.contacts[a][b].clone().unwrap();
    for a in 0..nb {
        for b in 0..nb {
            if a == b {
                continue;
            }
            let fa = *data[a].conjugates.last().unwrap();
            let fb = *data[b].conjugates.last().unwrap();
            let first = contact(fa, fb);
            let mut max = Rational::zero();
            let mut sum = Rational::zero();
            for &i in &data[a].conjugates {
                for &j in &data[b].conjugates {
                    let v = contact(i, j);
                    sum += &v;
                    if v > max {
                        max = v;
                    }
                }
            }
            if first != max {
                lemma_violations += 1;
            }
            let first = max;
            if !sum.is_integer() {
                return Err(GermError::Inconsistent(format!("intersection sum {sum} is not an integer")));
            }
            entries[a][b] = Some(first);
            intersections[a][b] = Some(sum.to_integer().to_u64().unwrap());
        }
    }
    let diagonal: Vec<Vec<Rational>> = data
        .iter()
        .map(|b| {
            let mut v = Vec::new();
            for (i, &r) in b.conjugates.iter().enumerate() {
                for &s in &b.conjugates[i + 1..] {
                    v.push(contact(r, s));
                }
            }
            v.sort();
            v
        })
        .collect();

    let branch_inv: Vec<BranchInvariant> = data
        .iter()
        .map(|b| BranchInvariant {
            d: b.multiplicity,
            m: b.ramification,
            pairs: puiseux_pairs(&b.char_exponents),
            char_exponents: b.char_exponents.clone(),
        })
        .collect();
    let germ_order: u32 = branch_inv.iter().map(|b| b.d * b.m).sum();
    if Some(germ_order) != f.order() {
        return Err(GermError::Inconsistent(format!(
            "branches account for order {germ_order}, the germ has order {:?}",
            f.order()
        )));
    }

    // resultant oracle for every pair of distinct factors
    let mut resultant_checks = Vec::new();
    for fa in 0..if cfg.oracles { factors.len() } else { 0 } {
        for fb in fa + 1..factors.len() {
            let mut sum = 0u64;
            for a in 0..nb {
                for b in 0..nb {
                    if data[a].factor == fa && data[b].factor == fb {
                        sum += intersections[a][b].unwrap();
                    }
                }
            }
            let res = local_intersection(&factors[fa].0, &factors[fb].0)?
                .ok_or_else(|| GermError::Inconsistent("distinct factors share a component".into()))?;
            if res as u64 != sum {
                return Err(GermError::Inconsistent(format!(
                    "factors {fa} and {fb}: contacts give {sum}, resultant gives {res}"
                )));
            }
            resultant_checks.push(ResultantCheck { factors: (fa, fb), from_contacts: sum, from_resultant: res as u64 });
        }
    }

    let ordering_mismatches = data.iter().filter(|b| !b.ordering_agrees).count();
    let contact_matrix = ContactMatrix { entries, diagonal };
    let milnor = if cfg.oracles && branch_inv.iter().all(|b| b.d == 1) {
        Some(milnor_from(f, &branch_inv, &contact_matrix, &intersections)?)
    } else {
        None
    };
    Ok(GermInvariant {
        branches: branch_inv,
        contact: contact_matrix,
        intersections,
        germ_order,
        tree,
        encoding,
        shear: c,
        trunc: expansion.trunc.clone(),
        factors,
        roots,
        branch_data: data,
        resultant_checks,
        lemma_violations,
        ordering_mismatches,
        milnor,
    })
}

/// `delta` of one branch from the contacts between its conjugates.
pub fn branch_delta(m: u32, conjugate_contacts: &[Rational]) -> Result<u64> {
    // each unordered pair counted twice
    let ordered: Rational = conjugate_contacts.iter().sum::<Rational>() * Rational::from_integer(2.into());
    let twice = ordered - Rational::from_integer((m as i64 - 1).into());
    if !twice.is_integer() || twice.to_integer().is_odd() {
        return Err(GermError::Inconsistent(format!("branch delta {twice}/2 is not an integer")));
    }
    Ok((twice.to_integer() / num_bigint::BigInt::from(2)).to_u64().unwrap())
}

fn milnor_from(
    f: &BiPoly,
    branches: &[BranchInvariant],
    contact: &ContactMatrix,
    intersections: &[Vec<Option<u64>>],
) -> Result<MilnorDelta> {
    let mu = local_intersection(&f.dx(), &f.dy())?.ok_or(GermError::NonIsolated)? as u64;
    let mut delta = 0u64;
    for (b, diag) in branches.iter().zip(&contact.diagonal) {
        delta += branch_delta(b.m, diag)?;
    }
    for a in 0..branches.len() {
        for b in a + 1..branches.len() {
            delta += intersections[a][b].unwrap();
        }
    }
    let r = branches.len() as u64;
    let consistent = mu + r == 2 * delta + 1;
    Ok(MilnorDelta { mu, delta, r, consistent })
}

/// `(mu, delta, r, consistent)` for a reduced germ.
pub fn milnor_delta_check(f: &BiPoly) -> Result<MilnorDelta> {
    let inv = analyze(f, None, &AnalyzeConfig::default())?;
    if inv.branches.iter().any(|b| b.d > 1) {
        return Err(GermError::NonIsolated);
    }
    Ok(inv.milnor.expect("reduced germ"))
}

/// Intersection multiplicity of two branches of one analyzed germ.
pub fn intersection_multiplicity(inv: &GermInvariant, a: usize, b: usize) -> Result<u64> {
    if a == b {
        return Err(GermError::Degenerate("intersection of a branch with itself".into()));
    }
    Ok(inv.intersections[a][b].unwrap())
}

/// Convenience wrapper with the default configuration.
pub fn germ_invariant(f: &BiPoly) -> Result<GermInvariant> {
    analyze(f, None, &AnalyzeConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::parse::parse_poly;

    fn inv(s: &str) -> GermInvariant {
        germ_invariant(&parse_poly(s).unwrap()).unwrap()
    }

    #[test]
    fn pairs_convention() {
        assert_eq!(puiseux_pairs(&[rat(3, 2)]), vec![PuiseuxPair { p: 2, q: 3 }]);
        let two = puiseux_pairs(&[rat(3, 2), rat(7, 4)]);
        assert_eq!(two, vec![PuiseuxPair { p: 2, q: 3 }, PuiseuxPair { p: 2, q: 7 }]);
        assert_eq!(char_exponents_from_pairs(&two), vec![rat(3, 2), rat(7, 4)]);
        assert_eq!(puiseux_pairs(&[rat(5, 3)]), vec![PuiseuxPair { p: 3, q: 5 }]);
    }

    #[test]
    fn cusp() {
        let i = inv("x^2 - y^3");
        assert_eq!(i.branches.len(), 1);
        assert_eq!(i.branches[0].pairs_tuples(), vec![(2, 3)]);
        assert_eq!(i.milnor, Some(MilnorDelta { mu: 2, delta: 1, r: 1, consistent: true }));
        assert_eq!(i.encoding.0, "(H=1 (H=3/2 (L d=1 w=2)))");
    }

    #[test]
    fn e8_milnor() {
        let i = inv("x^3 - y^5");
        assert_eq!(i.milnor.as_ref().unwrap().mu, 8);
        assert!(i.milnor.unwrap().consistent);
    }

    #[test]
    fn cusp_and_line() {
        let i = inv("(x^2 - y^3)*(x - y)");
        assert_eq!(i.branches.len(), 2);
        let m = i.milnor.clone().unwrap();
        assert_eq!((m.mu, m.delta, m.r, m.consistent), (5, 3, 2, true));
        assert_eq!(i.intersections[0][1], Some(2));
        assert_eq!(i.contact.entries[0][1], Some(int(1)));
        assert_eq!(i.lemma_violations, 0);
    }

    #[test]
    fn double_line() {
        let i = inv("x^2*(x - y)");
        let ds: Vec<u32> = i.branches.iter().map(|b| b.d).collect();
        assert_eq!(ds, vec![1, 2]);
        assert_eq!(i.intersections[0][1], Some(1));
        assert!(i.milnor.is_none());
        assert!(matches!(milnor_delta_check(&parse_poly("x^2*(x - y)").unwrap()), Err(GermError::NonIsolated)));
    }

    #[test]
    fn cusp_against_transposed_cusp() {
        let f = parse_poly("(x^2 - y^3)*(x^3 - y^2)").unwrap();
        let g = crate::parse::parse_expression("(x^2 - y^3)*(x^3 - y^2)", 64).unwrap();
        let i = analyze(&f, g.factors.as_deref(), &AnalyzeConfig::default()).unwrap();
        assert_eq!(i.intersections[0][1], Some(4));
        assert_eq!(i.resultant_checks.len(), 1);
        assert_eq!(i.resultant_checks[0].from_resultant, 4);
    }

    #[test]
    fn not_a_germ() {
        assert!(matches!(germ_invariant(&parse_poly("x + 1").unwrap()), Err(GermError::NotAGerm(_))));
    }
}
