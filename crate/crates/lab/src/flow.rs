//! Kuo's vector field and its flow along a parameter path.

use num_complex::Complex64;
use num_traits::{Float, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::family::{NormalFamily, ParamPoint};
use crate::path::ParamPath;
use crate::rk45::{integrate, Stats, Tolerances};
use crate::{cast, LabError, Result, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stratum {
    /// The parameter axis `x = y = 0`.
    P,
    /// The zero set minus `P`; the field uses the reduced family.
    ZeroSet,
    /// The complement of the zero set.
    Complement,
}

/// `(dv, dx, dy)` of Kuo's field for the parameter direction `dir`.
pub fn kuo_field<T: Float>(
    nf: &NormalFamily<T>,
    p: &ParamPoint<T>,
    dir: &[C<T>],
    x: C<T>,
    y: C<T>,
    stratum: Stratum,
) -> Result<(T, C<T>, C<T>)> {
    if stratum == Stratum::P {
        return Ok((T::one(), C::zero(), C::zero()));
    }
    let ev = nf.eval_t(p, x, nf.principal_t(y), stratum == Stratum::ZeroSet);
    let fv = ev.dv.iter().zip(dir).fold(C::zero(), |acc, (a, b)| acc + a * b);
    if fv.is_zero() {
        return Ok((T::one(), C::zero(), C::zero()));
    }
    let g2 = ev.dx.norm_sqr() + ev.dy.norm_sqr();
    if !(g2 > T::zero()) || !g2.is_finite() {
        let c = |z: C<T>| {
            let [re, im] = [z.re, z.im].map(|v| v.to_f64().unwrap_or(f64::NAN));
            format!("{re}{im:+}i")
        };
        return Err(LabError::VanishingGradient { x: c(x), y: c(y) });
    }
    let k = fv / g2;
    Ok((T::one(), -k * ev.dx.conj(), -k * ev.dy.conj()))
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowConfig {
    pub zero_seeds: usize,
    pub off_seeds: usize,
    /// `|y|` of the seeds.
    pub y_abs: f64,
    pub rtol: f64,
    pub atol: f64,
    pub hmin: f64,
    /// Checkpoints per segment for drift and trajectory rows.
    pub checkpoints: usize,
    pub zero_tol: f64,
    pub drift_tol: f64,
    pub seed: u64,
    pub dump: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            zero_seeds: 50,
            off_seeds: 50,
            y_abs: 1e-2,
            rtol: 1e-10,
            atol: 1e-14,
            hmin: 1e-12,
            checkpoints: 8,
            zero_tol: 1e-6,
            drift_tol: 1e-6,
            seed: 0,
            dump: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeedReport {
    pub stratum: Stratum,
    pub start: [[f64; 2]; 2],
    pub end: Option<[[f64; 2]; 2]>,
    /// Zero-set seeds: distance from the endpoint to the nearest target root.
    pub distance: Option<f64>,
    /// Off-zero seeds: largest `|F(v) - F(0)| / |F(0)|` over the checkpoints.
    pub drift: Option<f64>,
    pub ok: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowReport {
    pub segments: usize,
    pub seeds: Vec<SeedReport>,
    pub max_distance: f64,
    pub max_drift: f64,
    pub zero_ok: bool,
    pub off_ok: bool,
    pub p_fixed: bool,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Rows `(seed, v, x, y, |F|)` with complex `x`, `y` split into parts.
    pub trajectory: Vec<[f64; 7]>,
}

fn pair<T: Float>(x: C<T>, y: C<T>) -> [[f64; 2]; 2] {
    let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
    [[f(x.re), f(x.im)], [f(y.re), f(y.im)]]
}

fn to_t<T: Float>(z: Complex64) -> C<T> {
    C::new(cast(z.re), cast(z.im))
}

struct Seed<T> {
    stratum: Stratum,
    x: C<T>,
    y: C<T>,
}

fn seeds<T: Float>(nf: &NormalFamily<T>, p: &ParamPoint<T>, cfg: &FlowConfig) -> Vec<Seed<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = vec![Seed { stratum: Stratum::P, x: C::zero(), y: C::zero() }];
    let nr = nf.root_count();
    let random_y = |rng: &mut ChaCha8Rng| to_t::<T>(Complex64::from_polar(cfg.y_abs, rng.gen_range(0.0..std::f64::consts::TAU)));
    for _ in 0..cfg.zero_seeds {
        let y = random_y(&mut rng);
        let roots = nf.roots_t(p, nf.principal_t(y));
        let m = rng.gen_range(0..nr);
        out.push(Seed { stratum: Stratum::ZeroSet, x: roots[m].lam, y });
    }
    let mut made = 0;
    while made < cfg.off_seeds {
        let y = random_y(&mut rng);
        let roots = nf.roots_t(p, nf.principal_t(y));
        let scale = roots.iter().map(|r| r.lam.norm()).fold(T::zero(), T::max).to_f64().unwrap_or(0.0).max(cfg.y_abs);
        let x = to_t::<T>(Complex64::from_polar(2.0 * scale * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)));
        let near = roots.iter().map(|r| (x - r.lam).norm()).fold(T::infinity(), T::min);
        if near.to_f64().unwrap_or(0.0) > 0.05 * scale {
            out.push(Seed { stratum: Stratum::Complement, x, y });
            made += 1;
        }
    }
    out
}

/// Transports seeds on `P`, on the zero set and off it along `path` with the flow of Kuo's field.
pub fn flow_trivialize<T: Float>(nf: &NormalFamily<T>, path: &ParamPath<T>, cfg: &FlowConfig) -> Result<FlowReport> {
    let start = &path.vertices[0];
    let end = path.vertices.last().unwrap();
    let tol = Tolerances { rtol: cfg.rtol, atol: cfg.atol, hmin: cfg.hmin };
    let mut stats = Stats::default();
    let mut reports = Vec::new();
    let mut trajectory = Vec::new();
    let segs = path.segments();
    for (si, seed) in seeds(nf, start, cfg).into_iter().enumerate() {
        let level = |p: &ParamPoint<T>, x: C<T>, y: C<T>| nf.eval_t(p, x, nf.principal_t(y), false).value;
        let f0 = level(start, seed.x, seed.y);
        let mut state = vec![seed.x, seed.y];
        let mut drift = 0.0f64;
        let mut error = None;
        if cfg.dump {
            trajectory.push(row(si, 0.0, state[0], state[1], f0));
        }
        'path: for k in 0..segs {
            let dir = path.tangent(k);
            for c in 0..cfg.checkpoints {
                let v0 = cast::<T>(k as f64 + c as f64 / cfg.checkpoints as f64);
                let v1 = cast::<T>(k as f64 + (c + 1) as f64 / cfg.checkpoints as f64);
                let field = |v: T, s: &[C<T>]| {
                    let (_, dx, dy) = kuo_field(nf, &path.at(v), &dir, s[0], s[1], seed.stratum)?;
                    Ok(vec![dx, dy])
                };
                match integrate(field, v0, v1, state.clone(), tol, &mut stats) {
                    Ok(s) => state = s,
                    Err(e) => {
                        error = Some(e.to_string());
                        break 'path;
                    }
                }
                let f = level(&path.at(v1), state[0], state[1]);
                if seed.stratum == Stratum::Complement {
                    drift = drift.max(((f - f0).norm() / f0.norm()).to_f64().unwrap_or(f64::INFINITY));
                }
                if cfg.dump {
                    trajectory.push(row(si, v1.to_f64().unwrap_or(f64::NAN), state[0], state[1], f));
                }
            }
        }
        let done = error.is_none();
        let (x, y) = (state[0], state[1]);
        let report = match seed.stratum {
            Stratum::P => SeedReport {
                stratum: seed.stratum,
                start: pair(seed.x, seed.y),
                end: done.then(|| pair(x, y)),
                distance: None,
                drift: None,
                ok: done && x.is_zero() && y.is_zero(),
                error,
            },
            Stratum::ZeroSet => {
                let dist = done.then(|| target_distance(nf, end, x, y));
                SeedReport {
                    stratum: seed.stratum,
                    start: pair(seed.x, seed.y),
                    end: done.then(|| pair(x, y)),
                    distance: dist,
                    drift: None,
                    ok: dist.is_some_and(|d| d <= cfg.zero_tol),
                    error,
                }
            }
            Stratum::Complement => SeedReport {
                stratum: seed.stratum,
                start: pair(seed.x, seed.y),
                end: done.then(|| pair(x, y)),
                distance: None,
                drift: done.then_some(drift),
                ok: done && drift <= cfg.drift_tol,
                error,
            },
        };
        reports.push(report);
    }
    let of = |s: Stratum| reports.iter().filter(move |r| r.stratum == s);
    let max_distance = of(Stratum::ZeroSet).map(|r| r.distance.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    let max_drift = of(Stratum::Complement).map(|r| r.drift.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    Ok(FlowReport {
        segments: segs,
        zero_ok: of(Stratum::ZeroSet).all(|r| r.ok),
        off_ok: of(Stratum::Complement).all(|r| r.ok),
        p_fixed: of(Stratum::P).all(|r| r.ok),
        seeds: reports,
        max_distance,
        max_drift,
        accepted_steps: stats.accepted,
        rejected_steps: stats.rejected,
        trajectory,
    })
}

/// Distance to the nearest root of the target germ, from its own expansion when known.
fn target_distance<T: Float>(nf: &NormalFamily<T>, end: &ParamPoint<T>, x: C<T>, y: C<T>) -> f64 {
    let t = nf.principal_t(y);
    let roots: Vec<C<T>> = if nf.is_joint() {
        nf.sources[1].roots_t(t, nf.n)
    } else {
        nf.roots_t(end, t).into_iter().map(|r| r.lam).collect()
    };
    roots.iter().map(|r| (x - r).norm()).fold(T::infinity(), T::min).to_f64().unwrap_or(f64::INFINITY)
}

fn row<T: Float>(seed: usize, v: f64, x: C<T>, y: C<T>, f: C<T>) -> [f64; 7] {
    let g = |v: T| v.to_f64().unwrap_or(f64::NAN);
    [seed as f64, v, g(x.re), g(x.im), g(y.re), g(y.im), g(f.norm())]
}
