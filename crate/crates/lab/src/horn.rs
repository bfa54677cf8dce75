//! Horn neighbourhoods of the roots in `t = y^(1/n)` and the localized factorization.

use num_traits::Float;
use serde::Serialize;

use crate::family::{NormalFamily, ParamPoint, RootEval};
use crate::{cast, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HornMode {
    /// `H_d(lambda_m, eps)` minus the `C`-horn at the next level of `lambda_m`.
    Hat,
    /// `H_d(lambda_m, C)` minus the `eps`-horns at level `d` of the roots near `lambda_m`.
    Ring,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HornRegion {
    /// Root index of the centre.
    pub center: usize,
    pub d: u32,
    pub mode: HornMode,
    /// Hat: the next level of the centre, if any.
    pub next: Option<u32>,
    /// Ring: roots `l` with `e_{m,l} >= d`, the centre included.
    pub near: Vec<usize>,
}

impl HornRegion {
    pub fn label(&self) -> String {
        let kind = match self.mode {
            HornMode::Hat => "hat",
            HornMode::Ring => "ring",
        };
        format!("{kind} root={} d={}", self.center + 1, self.d)
    }
}

/// Finite family of horns around all roots at levels `0`, `n` and every `e_{m,l}`.
#[derive(Clone, Debug)]
pub struct HornCover {
    pub n: u32,
    pub eps: f64,
    pub cap: f64,
    /// `e[m][l]`: `t`-order of `lambda_m - lambda_l`.
    pub e: Vec<Vec<Option<u32>>>,
    pub mult: Vec<u32>,
    /// Sorted levels of each root.
    pub levels: Vec<Vec<u32>>,
    pub regions: Vec<HornRegion>,
}

impl HornCover {
    pub fn new<T: Float>(nf: &NormalFamily<T>, eps: f64, cap: f64) -> Self {
        let e = nf.contact_exponents();
        let mult = nf.root_multiplicity();
        let nr = e.len();
        let mut levels = Vec::with_capacity(nr);
        let mut regions = Vec::new();
        for m in 0..nr {
            let mut lv: Vec<u32> = vec![0, nf.n];
            lv.extend(e[m].iter().flatten().copied());
            lv.sort_unstable();
            lv.dedup();
            for (i, &d) in lv.iter().enumerate() {
                regions.push(HornRegion { center: m, d, mode: HornMode::Hat, next: lv.get(i + 1).copied(), near: vec![] });
                if d > 0 {
                    let near = (0..nr).filter(|&l| l == m || e[m][l].is_some_and(|v| v >= d)).collect();
                    regions.push(HornRegion { center: m, d, mode: HornMode::Ring, next: None, near });
                }
            }
            levels.push(lv);
        }
        HornCover { n: nf.n, eps, cap, e, mult, levels, regions }
    }

    /// Membership of `(x, t)` given the roots at `t`.
    pub fn contains<T: Float>(&self, r: &HornRegion, roots: &[RootEval<T>], x: C<T>, t: C<T>) -> bool {
        let at = t.norm();
        let eps = cast::<T>(self.eps);
        let cap = cast::<T>(self.cap);
        let dist = (x - roots[r.center].lam).norm();
        match r.mode {
            HornMode::Hat => {
                dist <= eps * at.powi(r.d as i32) && r.next.is_none_or(|nx| dist > cap * at.powi(nx as i32))
            }
            HornMode::Ring => {
                let inner = eps * at.powi(r.d as i32);
                dist <= cap * at.powi(r.d as i32) && r.near.iter().all(|&l| (x - roots[l].lam).norm() > inner)
            }
        }
    }

    /// Index of the first region containing `(x, t)`.
    pub fn covering_region<T: Float>(&self, roots: &[RootEval<T>], x: C<T>, t: C<T>) -> Option<usize> {
        self.regions.iter().position(|r| self.contains(r, roots, x, t))
    }

    pub fn localized(&self, r: &HornRegion) -> LocalizedFactorization {
        LocalizedFactorization::new(&self.e, &self.mult, r.center, r.d)
    }
}

/// `F = u t^M prod_{m in I} (x~ - beta_m)^{d_m}` inside a horn of level `d` around `xi`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalizedFactorization {
    pub center: usize,
    pub d: u32,
    /// `M = sum_{m not in I} d_m O(lambda_m, xi) + d sum_{m in I} d_m`.
    pub m_exp: u32,
    /// `I(xi, d)`.
    pub inside: Vec<usize>,
    /// `(m, O(lambda_m, xi))` for `m` outside `I`.
    pub outside: Vec<(usize, u32)>,
    pub mult: Vec<u32>,
}

impl LocalizedFactorization {
    pub fn new(e: &[Vec<Option<u32>>], mult: &[u32], center: usize, d: u32) -> Self {
        let mut inside = Vec::new();
        let mut outside = Vec::new();
        for l in 0..e.len() {
            match e[center][l] {
                None => inside.push(l),
                Some(v) if v >= d => inside.push(l),
                Some(v) => outside.push((l, v)),
            }
        }
        let m_exp = outside.iter().map(|&(l, v)| mult[l] * v).sum::<u32>() + d * inside.iter().map(|&l| mult[l]).sum::<u32>();
        LocalizedFactorization { center, d, m_exp, inside, outside, mult: mult.to_vec() }
    }

    /// `beta_m = t^(-d) (lambda_m - xi)` for `m` in `I`.
    pub fn beta<T: Float>(&self, roots: &[RootEval<T>], t: C<T>) -> Vec<C<T>> {
        let td = t.powu(self.d);
        self.inside.iter().map(|&l| (roots[l].lam - roots[self.center].lam) / td).collect()
    }

    /// The unit `u` and the reconstructed value of `F` at `x`, with `x~ = t^(-d) (x - xi)`.
    pub fn reconstruct<T: Float>(&self, nf: &NormalFamily<T>, p: &ParamPoint<T>, x: C<T>, t: C<T>) -> (C<T>, C<T>) {
        let roots = nf.roots_t(p, t);
        let xt = (x - roots[self.center].lam) / t.powu(self.d);
        let y = t.powu(nf.n);
        let mut u = nf.unit_value(p, x, y);
        for &(l, v) in &self.outside {
            u = u * ((x - roots[l].lam) / t.powu(v)).powu(self.mult[l]);
        }
        let beta = self.beta(&roots, t);
        let inner = self.inside.iter().zip(beta).fold(C::new(T::one(), T::zero()), |acc, (&l, b)| acc * (xt - b).powu(self.mult[l]));
        (u, u * t.powu(self.m_exp) * inner)
    }
}
