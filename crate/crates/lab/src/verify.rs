//! Sampled checks of the Verdier inequality on the zero set and of the strong
//! Thom inequality on a horn cover of its complement.

use num_complex::Complex64;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::family::{FamilyEval, NormalFamily, ParamPoint};
use crate::horn::{HornCover, HornMode, HornRegion};
use crate::{cast, LabError, Result, C};

pub const NOTE: &str = "empirical non-growth check, not a proof";
/// Maxima below this are treated as zero by the growth test.
pub const RATIO_FLOOR: f64 = 1e-12;
/// Relative tolerance of the localized reconstruction.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
/// Covering retries, each doubling `C`.
pub const COVER_ESCALATIONS: usize = 3;

#[derive(Clone, Debug, Serialize)]
pub struct VerificationConfig {
    /// Samples per region (or per root for the zero set) and radius.
    pub samples: usize,
    /// Decreasing ladder of `|y|`.
    pub radii: Vec<f64>,
    pub eps: f64,
    pub cap: f64,
    /// Allowed growth of a maximum per decade of `|y|`.
    pub growth_tol: f64,
    pub covering_points: usize,
    pub seed: u64,
}

impl Default for VerificationConfig {
    fn default() -> Self {
        VerificationConfig {
            samples: 64,
            radii: vec![1e-2, 1e-3, 1e-4, 1e-5],
            eps: 0.25,
            cap: 4.0,
            growth_tol: 0.10,
            covering_points: 100_000,
            seed: 0,
        }
    }
}

impl VerificationConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        let ok = self.samples > 0
            && !self.radii.is_empty()
            && self.radii.iter().all(|&r| pos(r))
            && self.radii.windows(2).all(|w| w[1] < w[0])
            && pos(self.eps)
            && pos(self.cap)
            && self.eps < self.cap
            && pos(self.growth_tol)
            && self.covering_points > 0;
        if ok {
            Ok(())
        } else {
            Err(LabError::Shape("invalid verification config".into()))
        }
    }
}

/// Maxima of one ratio along the radii ladder.
#[derive(Clone, Debug, Serialize)]
pub struct RatioSeries {
    pub direction: String,
    pub maxima: Vec<f64>,
    /// `(max_{i+1} / max_i)^(1 / decades)`, 1 when both are below the floor,
    /// absent when a radius has no samples.
    pub growth_per_decade: Vec<Option<f64>>,
    pub bounded: bool,
    /// `(x, y)` of the largest ratio at the first radius where growth fails.
    pub witness: Option<[[f64; 2]; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WReport {
    pub note: &'static str,
    pub radii: Vec<f64>,
    pub points: usize,
    pub samples: usize,
    pub skipped: usize,
    pub series: Vec<RatioSeries>,
    pub bounded: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionReport {
    pub label: String,
    pub center: usize,
    pub d: u32,
    pub mode: HornMode,
    pub m_exp: u32,
    /// Accepted samples per radius.
    pub samples: Vec<usize>,
    pub skipped: usize,
    pub series: Vec<RatioSeries>,
    /// Ring regions: largest `max(0, M - |t F_t| / |F|)` per radius.
    pub margin: Option<Vec<f64>>,
    pub reconstruction_err: f64,
    pub bounded: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoveringReport {
    pub points: usize,
    pub rho_t: f64,
    pub rho_x: f64,
    pub eps: f64,
    /// `C` after escalation.
    pub cap: f64,
    pub escalations: usize,
    pub gaps: usize,
    /// `(x, t)` of the first uncovered point.
    pub witness: Option<[[f64; 2]; 2]>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WfReport {
    pub note: &'static str,
    pub radii: Vec<f64>,
    pub points: usize,
    pub regions: Vec<RegionReport>,
    pub covering: CoveringReport,
    pub max_reconstruction_err: f64,
    pub reconstruction_ok: bool,
    pub bounded: bool,
}

fn c64<T: Float>(z: C<T>) -> [f64; 2] {
    [z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN)]
}

fn f64_of<T: Float>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Running maxima per direction and radius with their arguments.
struct Tally {
    max: Vec<Vec<f64>>,
    arg: Vec<Vec<Option<[[f64; 2]; 2]>>>,
    count: Vec<usize>,
    skipped: usize,
}

impl Tally {
    fn new(dirs: usize, radii: usize) -> Self {
        Tally { max: vec![vec![0.0; radii]; dirs], arg: vec![vec![None; radii]; dirs], count: vec![0; radii], skipped: 0 }
    }

    /// Adds `|dF/dv| / (|(x, y)| |grad F|)` for every direction.
    fn add<T: Float>(&mut self, ri: usize, ev: &FamilyEval<T>, x: C<T>, y: C<T>) {
        let g = (ev.dx.norm_sqr() + ev.dy.norm_sqr()).sqrt();
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let den = f64_of(g) * f64_of(r);
        if !(den.is_finite() && den > 0.0) {
            self.skipped += 1;
            return;
        }
        self.count[ri] += 1;
        for (i, dv) in ev.dv.iter().enumerate() {
            let q = f64_of(dv.norm()) / den;
            if q > self.max[i][ri] {
                self.max[i][ri] = q;
                self.arg[i][ri] = Some([c64(x), c64(y)]);
            }
        }
    }

    fn series(&self, names: &[String], radii: &[f64], tol: f64) -> Vec<RatioSeries> {
        names.iter().enumerate().map(|(i, name)| growth(name, &self.max[i], &self.arg[i], &self.count, radii, tol)).collect()
    }
}

fn growth(name: &str, maxima: &[f64], arg: &[Option<[[f64; 2]; 2]>], count: &[usize], radii: &[f64], tol: f64) -> RatioSeries {
    let mut g = Vec::new();
    let mut witness = None;
    for i in 1..maxima.len() {
        if count[i - 1] == 0 || count[i] == 0 {
            g.push(None);
            continue;
        }
        let (a, b) = (maxima[i - 1], maxima[i]);
        let decades = (radii[i - 1] / radii[i]).log10();
        let rate = if b <= RATIO_FLOOR {
            1.0
        } else if a <= RATIO_FLOOR {
            f64::INFINITY
        } else {
            (b / a).powf(1.0 / decades)
        };
        if !(rate <= 1.0 + tol) && witness.is_none() {
            witness = arg[i];
        }
        g.push(Some(rate));
    }
    let bounded = g.iter().flatten().all(|&r| r <= 1.0 + tol) && maxima.iter().all(|m| m.is_finite());
    RatioSeries { direction: name.to_string(), maxima: maxima.to_vec(), growth_per_decade: g, bounded, witness }
}

fn check_radii<T: Float>(nf: &NormalFamily<T>, cfg: &VerificationConfig) -> Result<()> {
    cfg.validate()?;
    let radius = f64_of(nf.validity_radius);
    match cfg.radii.iter().find(|&&r| r > radius) {
        Some(&y) => Err(LabError::OutsideValidity { y, radius }),
        None => Ok(()),
    }
}

/// `t` with `|t^n| = r` at angle `phi`.
fn t_at<T: Float>(n: u32, r: f64, phi: f64) -> C<T> {
    to_t(Complex64::from_polar(r.powf(1.0 / n as f64), phi))
}

fn to_t<T: Float>(z: Complex64) -> C<T> {
    C::new(cast(z.re), cast(z.im))
}

/// Verdier ratios of the reduced family on the zero set, at every parameter point.
pub fn verify_w<T: Float>(nf: &NormalFamily<T>, points: &[ParamPoint<T>], cfg: &VerificationConfig) -> Result<WReport> {
    check_radii(nf, cfg)?;
    let names = nf.param_names();
    let mut tally = Tally::new(names.len(), cfg.radii.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let angles: Vec<f64> = (0..cfg.samples).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    for p in points {
        for (ri, &r) in cfg.radii.iter().enumerate() {
            for &phi in &angles {
                let t = t_at::<T>(nf.n, r, phi);
                let y = t.powu(nf.n);
                for root in nf.roots_t(p, t) {
                    let ev = nf.eval_t(p, root.lam, t, true);
                    tally.add(ri, &ev, root.lam, y);
                }
            }
        }
    }
    let series = tally.series(&names, &cfg.radii, cfg.growth_tol);
    let bounded = series.iter().all(|s| s.bounded);
    Ok(WReport {
        note: NOTE,
        radii: cfg.radii.clone(),
        points: points.len(),
        samples: cfg.samples,
        skipped: tally.skipped,
        series,
        bounded,
    })
}

/// Normalized sample `(rho e^{i psi}, phi)` in the unit disc, reused across radii.
fn normalized_samples(rng: &mut ChaCha8Rng, count: usize) -> Vec<(Complex64, f64)> {
    (0..count)
        .map(|_| {
            let rho = rng.gen::<f64>().sqrt();
            let psi = rng.gen_range(0.0..std::f64::consts::TAU);
            (Complex64::from_polar(rho, psi), rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect()
}

fn region_report<T: Float>(
    nf: &NormalFamily<T>,
    cover: &HornCover,
    region: &HornRegion,
    points: &[ParamPoint<T>],
    cfg: &VerificationConfig,
    seed: u64,
) -> RegionReport {
    let names = nf.param_names();
    let loc = cover.localized(region);
    let mut tally = Tally::new(names.len(), cfg.radii.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // oversample to leave room for rejections
    let cand = normalized_samples(&mut rng, 4 * cfg.samples);
    let width = match region.mode {
        HornMode::Hat => cover.eps,
        HornMode::Ring => cover.cap,
    };
    let ring = region.mode == HornMode::Ring && region.d > 0;
    let mut margin = vec![0.0f64; cfg.radii.len()];
    let mut accepted = vec![0usize; cfg.radii.len()];
    let mut rec_err = 0.0f64;
    let nn = cast::<T>(nf.n as f64);
    let dd = cast::<T>(region.d as f64);
    let m_exp = loc.m_exp as f64;
    for p in points {
        for (ri, &r) in cfg.radii.iter().enumerate() {
            let mut taken = 0;
            for &(z, phi) in &cand {
                if taken == cfg.samples {
                    break;
                }
                let t = t_at::<T>(nf.n, r, phi);
                let roots = nf.roots_t(p, t);
                let td = t.powu(region.d);
                let xt = to_t::<T>(z * width);
                let x = roots[region.center].lam + xt * td;
                if !cover.contains(region, &roots, x, t) {
                    continue;
                }
                taken += 1;
                let y = t.powu(nf.n);
                let ev = nf.eval_t(p, x, t, false);
                tally.add(ri, &ev, x, y);
                let (_, rec) = loc.reconstruct(nf, p, x, t);
                let fv = ev.value.norm();
                if fv > T::zero() {
                    rec_err = rec_err.max(f64_of((rec - ev.value).norm() / fv));
                }
                if ring {
                    // derivative along x = lambda + x~ t^d at fixed x~
                    let lam_t = roots[region.center].dt;
                    let dx_dt = lam_t + xt * td / t * dd;
                    let ft = ev.dx * dx_dt + ev.dy * y / t * nn;
                    let q = f64_of((t * ft).norm() / ev.value.norm());
                    margin[ri] = margin[ri].max((m_exp - q).max(0.0));
                }
            }
            accepted[ri] += taken;
        }
    }
    let series = tally.series(&names, &cfg.radii, cfg.growth_tol);
    let bounded = series.iter().all(|s| s.bounded);
    RegionReport {
        label: region.label(),
        center: region.center,
        d: region.d,
        mode: region.mode,
        m_exp: loc.m_exp,
        samples: accepted,
        skipped: tally.skipped,
        series,
        margin: ring.then_some(margin),
        reconstruction_err: rec_err,
        bounded,
    }
}

/// Random points of the punctured bidisc `|t| <= rho_t`, `|x| <= rho_x`, tested against the cover.
fn covering<T: Float>(nf: &NormalFamily<T>, p: &ParamPoint<T>, cfg: &VerificationConfig, rng: &mut ChaCha8Rng) -> (CoveringReport, f64) {
    let n = nf.n;
    let eps = cfg.eps;
    let rho_x = eps / 2.0;
    let mut rho_t = (eps / (2.0 * cfg.cap)).min(0.5 * f64_of(nf.validity_radius).powf(1.0 / n as f64));
    // every root stays inside the x-disc
    let probe = |rho: f64| {
        (0..16).all(|k| {
            let t = to_t::<T>(Complex64::from_polar(rho, k as f64 * std::f64::consts::TAU / 16.0));
            nf.roots_t(p, t).iter().all(|r| f64_of(r.lam.norm()) <= eps / 2.0)
        })
    };
    while !probe(rho_t) && rho_t > 1e-12 {
        rho_t /= 2.0;
    }
    let pts: Vec<(Complex64, Complex64)> = (0..cfg.covering_points)
        .map(|_| {
            let x = Complex64::from_polar(rho_x * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
            let mut rt = rho_t * rng.gen::<f64>().sqrt();
            if rt == 0.0 {
                rt = rho_t * 1e-6;
            }
            (x, Complex64::from_polar(rt, rng.gen_range(0.0..std::f64::consts::TAU)))
        })
        .collect();
    let mut cap = cfg.cap;
    let mut escalations = 0;
    loop {
        let cover = HornCover::new(nf, eps, cap);
        let mut gaps = 0;
        let mut witness = None;
        for &(x, t) in &pts {
            let t = to_t::<T>(t);
            let x = to_t::<T>(x);
            let roots = nf.roots_t(p, t);
            if cover.covering_region(&roots, x, t).is_none() {
                gaps += 1;
                witness.get_or_insert([c64(x), c64(t)]);
            }
        }
        if gaps == 0 || escalations == COVER_ESCALATIONS {
            let report = CoveringReport {
                points: pts.len(),
                rho_t,
                rho_x,
                eps,
                cap,
                escalations,
                gaps,
                witness,
                ok: gaps == 0,
            };
            return (report, cap);
        }
        cap *= 2.0;
        escalations += 1;
    }
}

/// Strong Thom ratios per horn region, the localized reconstruction, the
/// `|t F_t| >= (M - delta) |F|` margin on rings and the covering test.
pub fn verify_wf_on_horns<T: Float>(nf: &NormalFamily<T>, points: &[ParamPoint<T>], cfg: &VerificationConfig) -> Result<WfReport> {
    check_radii(nf, cfg)?;
    if points.is_empty() {
        return Err(LabError::Shape("no parameter points".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (covering, cap) = covering(nf, &points[0], cfg, &mut rng);
    let cover = HornCover::new(nf, cfg.eps, cap);
    let regions: Vec<RegionReport> = cover
        .regions
        .iter()
        .enumerate()
        .map(|(i, r)| region_report(nf, &cover, r, points, cfg, cfg.seed.wrapping_add(1 + i as u64)))
        .collect();
    let max_rec = regions.iter().map(|r| r.reconstruction_err).fold(0.0, f64::max);
    let bounded = regions.iter().all(|r| r.bounded);
    Ok(WfReport {
        note: NOTE,
        radii: cfg.radii.clone(),
        points: points.len(),
        regions,
        covering,
        max_reconstruction_err: max_rec,
        reconstruction_ok: max_rec <= RECONSTRUCTION_TOL,
        bounded,
    })
}
