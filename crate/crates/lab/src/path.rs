//! Piecewise-linear paths inside the parameter space.

use num_traits::{Float, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::family::{check_param, Constraint, DeformationSpace, NormalFamily, ParamPoint};
use crate::{cast, LabError, Result, C};

/// Retry budget for random midpoints.
pub const PATH_RETRIES: usize = 64;
/// Tolerance of the affine zero test along a segment.
pub const SEGMENT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ParamPath<T> {
    pub vertices: Vec<ParamPoint<T>>,
    /// Midpoints rejected before the path was accepted.
    pub retries: usize,
}

impl<T: Float> ParamPath<T> {
    pub fn segments(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Point at path parameter `v` in `[0, segments]`.
    pub fn at(&self, v: T) -> ParamPoint<T> {
        let k = v.floor().to_usize().unwrap_or(0).min(self.segments() - 1);
        let w = v - cast(k as f64);
        self.vertices[k].lerp(&self.vertices[k + 1], w)
    }

    /// Flat velocity on segment `k`.
    pub fn tangent(&self, k: usize) -> Vec<C<T>> {
        let a = self.vertices[k].flat();
        let b = self.vertices[k + 1].flat();
        a.iter().zip(b).map(|(p, q)| q - p).collect()
    }

    /// Vertices and segment midpoints.
    pub fn samples(&self) -> Vec<ParamPoint<T>> {
        let half = cast::<T>(0.5);
        let mut out = vec![self.vertices[0].clone()];
        for k in 0..self.segments() {
            out.push(self.vertices[k].lerp(&self.vertices[k + 1], half));
            out.push(self.vertices[k + 1].clone());
        }
        out
    }
}

/// Whether `a + w (b - a)` vanishes for some real `w` in `[0, 1]`.
fn affine_zero<T: Float>(a: C<T>, b: C<T>) -> bool {
    let tol = cast::<T>(SEGMENT_TOL);
    let diff = a - b;
    if diff.is_zero() {
        return a.is_zero();
    }
    let w = a / diff;
    w.im.abs() <= tol * (T::one() + w.norm()) && w.re >= -tol && w.re <= T::one() + tol
}

/// Whether every point of the segment from `p` to `q` lies in the parameter space.
pub fn segment_admissible<T: Float>(space: &DeformationSpace, p: &ParamPoint<T>, q: &ParamPoint<T>) -> bool {
    if !check_param(space, p) || !check_param(space, q) || affine_zero(p.u0, q.u0) {
        return false;
    }
    space.constraints.iter().all(|c| match *c {
        Constraint::NonZero { k, i } => !affine_zero(p.a[k][i], q.a[k][i]),
        // equalities hold on the segment when they hold at both ends
        Constraint::Equal { .. } => true,
        Constraint::Distinct { k1, i1, k2, i2 } => {
            !affine_zero(p.a[k1][i1] - p.a[k2][i2], q.a[k1][i1] - q.a[k2][i2])
        }
    })
}

/// Straight path from the distinguished point to the point without tails and unit deviation.
pub fn normal_form_path<T: Float>(nf: &NormalFamily<T>) -> Result<ParamPath<T>> {
    let start = nf.points[0].clone();
    let mut end = start.clone();
    end.tau.iter_mut().for_each(|t| *t = C::zero());
    end.s.iter_mut().for_each(|s| *s = C::zero());
    if !segment_admissible(&nf.space, &start, &end) {
        return Err(LabError::Mismatch("distinguished point violates the constraints".into()));
    }
    Ok(ParamPath { vertices: vec![start, end], retries: 0 })
}

fn random_midpoint<T: Float>(space: &DeformationSpace, p: &ParamPoint<T>, q: &ParamPoint<T>, rng: &mut ChaCha8Rng) -> ParamPoint<T> {
    let mid = p.lerp(q, cast(0.5));
    let scale = 1.0
        + p.flat().iter().zip(q.flat()).map(|(a, b)| (*a - b).norm().to_f64().unwrap_or(0.0)).fold(0.0, f64::max);
    let mut draw = || C::new(cast::<T>(rng.gen_range(-scale..scale)), cast::<T>(rng.gen_range(-scale..scale)));
    let mut out = mid.clone();
    out.tau.iter_mut().for_each(|t| *t = *t + draw());
    out.s.iter_mut().for_each(|s| *s = *s + draw());
    out.u0 = out.u0 + draw();
    let mut pert: Vec<Vec<C<T>>> = mid.a.iter().map(|row| row.iter().map(|_| draw()).collect()).collect();
    // coupled coordinates move together
    let mut changed = true;
    while changed {
        changed = false;
        for c in &space.constraints {
            if let Constraint::Equal { k1, i1, k2, i2 } = *c {
                if pert[k2][i2] != pert[k1][i1] {
                    pert[k2][i2] = pert[k1][i1];
                    changed = true;
                }
            }
        }
    }
    for (row, prow) in out.a.iter_mut().zip(pert) {
        for (v, d) in row.iter_mut().zip(prow) {
            *v = *v + d;
        }
    }
    out
}

/// Admissible path between the two distinguished points of a joint family:
/// the straight segment, or two segments through a random midpoint.
pub fn joint_path<T: Float>(nf: &NormalFamily<T>, seed: u64) -> Result<ParamPath<T>> {
    if !nf.is_joint() {
        return Err(LabError::Shape("joint path needs a joint family".into()));
    }
    let (p, q) = (&nf.points[0], &nf.points[1]);
    if !check_param(&nf.space, p) || !check_param(&nf.space, q) {
        return Err(LabError::Mismatch("distinguished point violates the constraints".into()));
    }
    if segment_admissible(&nf.space, p, q) {
        return Ok(ParamPath { vertices: vec![p.clone(), q.clone()], retries: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for retry in 0..PATH_RETRIES {
        let m = random_midpoint(&nf.space, p, q, &mut rng);
        if segment_admissible(&nf.space, p, &m) && segment_admissible(&nf.space, &m, q) {
            return Ok(ParamPath { vertices: vec![p.clone(), m, q.clone()], retries: retry + 1 });
        }
    }
    Err(LabError::RetryBudget(PATH_RETRIES))
}
