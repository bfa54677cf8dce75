use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use germ_core::parse::parse_poly;
use germ_core::Rational;
use germ_lab::family::{check_param, Constraint};
use germ_lab::horn::HornMode;
use germ_lab::*;

fn poly(s: &str) -> germ_core::BiPoly {
    parse_poly(s).unwrap()
}

fn single(s: &str) -> NormalFamily<f64> {
    NormalFamily::new(&poly(s)).unwrap()
}

fn joint(f: &str, g: &str) -> NormalFamily<f64> {
    NormalFamily::joint(&poly(f), &poly(g)).unwrap()
}

fn q(s: &str) -> Rational {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    Rational::new(n.parse::<i64>().unwrap().into(), d.parse::<i64>().unwrap().into())
}

fn disc(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    C64::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Admissible point near the distinguished one: generic shifts, coupled coordinates kept equal.
fn perturbed(nf: &NormalFamily<f64>, rng: &mut ChaCha8Rng, size: f64) -> ParamPoint<f64> {
    let p0 = &nf.points[0];
    let mut v = p0.flat();
    for z in v.iter_mut() {
        *z += disc(rng, size);
    }
    let mut p = p0.with_flat(&v);
    for c in &nf.space.constraints {
        if let Constraint::Equal { k1, i1, k2, i2 } = *c {
            p.a[k2][i2] = p.a[k1][i1];
        }
    }
    assert!(check_param(&nf.space, &p));
    p
}

const RECON: [&str; 6] = [
    "x^2 - y^3",
    "x^2 - y^3 - y^4",
    "(1 + x + y)*(x^2 - y^3)",
    "(x^2 - y^3)*(x - y)",
    "x^2*(x - y)",
    "y^2 - x^3",
];

#[test]
fn reconstruction_at_distinguished_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in RECON {
        let nf = single(s);
        let p = &nf.points[0];
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let y = disc(&mut rng, 1e-2);
            let x = disc(&mut rng, 0.1);
            let f = nf.sources[0].eval(x, y);
            let v = nf.eval(p, x, y, false).unwrap().value;
            worst = worst.max((v - f).norm() / f.norm());
        }
        assert!(worst <= 1e-10, "{s}: {worst}");
    }
}

#[test]
fn joint_family_reproduces_both_germs() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (f, g) in [("x^2 - y^3 - y^4", "x^2 - y^3"), ("x*y", "x^2 - y^2"), ("x^2 - y^3", "y^2 - x^3")] {
        let nf = joint(f, g);
        assert!(nf.is_joint());
        for src in 0..2 {
            for _ in 0..1000 {
                let y = disc(&mut rng, 1e-2);
                let x = disc(&mut rng, 0.1);
                let direct = nf.sources[src].eval(x, y);
                let v = nf.eval(&nf.points[src], x, y, false).unwrap().value;
                assert!((v - direct).norm() <= 1e-10 * direct.norm(), "{f} / {g} source {src}");
            }
        }
    }
}

fn check_gradients(nf: &NormalFamily<f64>, p: &ParamPoint<f64>, x: C64, y: C64, reduced: bool) {
    let h = 1e-7;
    let t = nf.principal_t(y);
    let ev = nf.eval_t(p, x, t, reduced);
    let scale = ev.value.norm() * 1e-8;
    let ok = |fd: C64, an: C64| (fd - an).norm() <= 1e-5 * an.norm() + scale;
    let fx = (nf.eval_t(p, x + h, t, reduced).value - nf.eval_t(p, x - h, t, reduced).value) / (2.0 * h);
    assert!(ok(fx, ev.dx), "dx {fx} {}", ev.dx);
    let hy = h * y.norm();
    let fy = (nf.eval(p, x, y + hy, reduced).unwrap().value - nf.eval(p, x, y - hy, reduced).unwrap().value) / (2.0 * hy);
    assert!((fy - ev.dy).norm() <= 1e-5 * ev.dy.norm() + ev.value.norm() * 1e-8 / y.norm(), "dy {fy} {}", ev.dy);
    let flat = p.flat();
    for (i, name) in nf.param_names().iter().enumerate() {
        let mut up = flat.clone();
        let mut dn = flat.clone();
        up[i] += h;
        dn[i] -= h;
        let fv = (nf.eval_t(&p.with_flat(&up), x, t, reduced).value - nf.eval_t(&p.with_flat(&dn), x, t, reduced).value)
            / (2.0 * h);
        assert!(ok(fv, ev.dv[i]), "{name}: {fv} {}", ev.dv[i]);
    }
}

#[test]
fn analytic_gradients_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut fams: Vec<NormalFamily<f64>> = RECON.iter().map(|s| single(s)).collect();
    fams.push(joint("x^2 - y^3 - y^4", "x^2 - y^3"));
    fams.push(joint("(x^2 - y^3)*(x - y)", "(x^2 - y^3 - y^4)*(x + y)"));
    for nf in &fams {
        for _ in 0..50 {
            let p = perturbed(nf, &mut rng, 0.3);
            let y = disc(&mut rng, 1e-2);
            let x = disc(&mut rng, 0.1);
            check_gradients(nf, &p, x, y, false);
            check_gradients(nf, &p, x, y, true);
        }
    }
}

#[test]
fn deformation_space_examples() {
    let cusp = single("x^2 - y^3");
    let b = &cusp.space.branches[0];
    assert_eq!(b.lambda_p, vec![q("3/2")]);
    assert!(b.lambda_free.is_empty());
    assert_eq!(cusp.space.constraints, vec![Constraint::NonZero { k: 0, i: 0 }]);

    let xy = single("x*y");
    assert_eq!(xy.space.branches.len(), 2);
    assert!(xy.space.branches.iter().all(|b| b.lambda_p.is_empty() && b.lambda_k == vec![q("1")]));
    assert_eq!(xy.space.thresholds[0][1], Some(q("1")));
    assert_eq!(xy.space.constraints, vec![Constraint::Distinct { k1: 0, i1: 0, k2: 1, i2: 0 }]);

    let mixed = single("(x^2 - y^3)*(x - y)");
    assert!(mixed.space.constraints.iter().any(|c| matches!(c, Constraint::NonZero { .. })));
    assert!(mixed.space.constraints.iter().any(|c| matches!(c, Constraint::Distinct { .. })));
    assert!(mixed.space.thresholds.iter().flatten().flatten().all(|t| *t == q("1")));
}

#[test]
fn check_param_examples() {
    let cusp = single("x^2 - y^3");
    let mut p = cusp.points[0].clone();
    p.a[0][0] = C64::new(1.0, 0.0);
    assert!(check_param(&cusp.space, &p));
    p.a[0][0] = C64::new(0.0, 0.0);
    assert!(!check_param(&cusp.space, &p));
    let mut p = cusp.points[0].clone();
    p.u0 = C64::new(0.0, 0.0);
    assert!(!check_param(&cusp.space, &p));

    let xy = single("x*y");
    let mut p = xy.points[0].clone();
    p.a[0][0] = C64::new(1.0, 0.0);
    p.a[1][0] = C64::new(1.0, 0.0);
    assert!(!check_param(&xy.space, &p));
    p.a[1][0] = C64::new(-1.0, 0.0);
    assert!(check_param(&xy.space, &p));
}

#[test]
fn product_structure() {
    let cusp = single("x^2 - y^3");
    let p = &cusp.points[0];
    assert_eq!(cusp.eval(p, C64::new(0.0, 0.0), C64::new(0.0, 0.0), false).unwrap().value, C64::new(0.0, 0.0));
    let nf = single("(1 + x + y)*(x^2 - y^3)*(x - y)");
    let mut p = nf.points[0].clone();
    p.tau[0] = C64::new(0.0, 0.0);
    p.u0 = C64::new(2.0, 1.0);
    let (x, y) = (C64::new(0.05, 0.02), C64::new(1e-4, -2e-4));
    let ev = nf.eval(&p, x, y, false).unwrap();
    let direct = p.u0 * nf.roots_t(&p, nf.principal_t(y)).iter().fold(C64::new(1.0, 0.0), |acc, r| acc * (x - r.lam));
    assert!((ev.value - direct).norm() <= 1e-14 * direct.norm());
    let big = p.u0 * x.powu(3);
    assert!((ev.value - big).norm() <= 0.1 * big.norm());
}

#[test]
fn evaluation_outside_validity_is_rejected() {
    let cusp = single("x^2 - y^3");
    let r = cusp.eval(&cusp.points[0], C64::new(0.0, 0.0), C64::new(0.5, 0.0), false);
    assert!(matches!(r, Err(LabError::OutsideValidity { .. })));
    let mut p = cusp.points[0].clone();
    p.s.push(C64::new(0.0, 0.0));
    assert!(matches!(cusp.eval(&p, C64::new(0.0, 0.0), C64::new(1e-3, 0.0), false), Err(LabError::Shape(_))));
}

#[test]
fn paths() {
    let same = joint("x^2 - y^3", "x^2 - y^3");
    let path = joint_path(&same, 0).unwrap();
    assert_eq!((path.segments(), path.retries), (1, 0));

    let tail = joint("x^2 - y^3", "x^2 - y^3 - y^4");
    let path = joint_path(&tail, 0).unwrap();
    assert_eq!(path.segments(), 1);
    let a = tail.points[0].a[0][0];
    for p in path.samples() {
        assert_eq!(p.a[0][0], a);
        assert!(check_param(&tail.space, &p));
    }
    let end = path.vertices.last().unwrap();
    assert_eq!((end.s[0], end.s[1]), (C64::new(0.0, 0.0), C64::new(1.0, 0.0)));

    let lines = joint("x*y", "x^2 - y^2");
    let path = joint_path(&lines, 3).unwrap();
    for k in 0..=200 {
        let p = path.at(k as f64 * path.segments() as f64 / 200.0);
        assert!(check_param(&lines.space, &p));
        assert!(p.a[0][0] != p.a[1][0]);
    }

    assert!(matches!(NormalFamily::<f64>::joint(&poly("x*y"), &poly("x^2 - y^3")), Err(LabError::Inequivalent(_))));
}

#[test]
fn path_detours_around_forbidden_hyperplanes() {
    // straight segment would pass through a_1(1) = a_1(2)
    let lines = joint("x*(x - y)", "(x - y)*x");
    let mut nf = lines.clone();
    let p = nf.points[0].clone();
    nf.points[1].a[0][0] = p.a[1][0];
    nf.points[1].a[1][0] = p.a[0][0];
    let path = joint_path(&nf, 11).unwrap();
    assert_eq!(path.segments(), 2);
    assert!(path.retries >= 1);
    for k in 0..=400 {
        let v = k as f64 * 2.0 / 400.0;
        assert!(check_param(&nf.space, &path.at(v)));
    }
}

#[test]
fn verdier_ratio_examples() {
    let cfg = VerificationConfig::default();
    // |dG/da| = |y| and |dG/dx| = 1 on the line
    let line = single("x - 2*y");
    let mut points = vec![line.points[0].clone()];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    points.push(perturbed(&line, &mut rng, 0.5));
    let w = verify_w(&line, &points, &cfg).unwrap();
    for s in &w.series {
        assert!(s.maxima.iter().all(|&m| m <= 1.0 + 1e-9), "{}: {:?}", s.direction, s.maxima);
    }
    // tail-free germ: the s direction is constant
    let cusp = single("x^2 - y^3");
    let w = verify_w(&cusp, &[cusp.points[0].clone()], &cfg).unwrap();
    let s = w.series.iter().find(|s| s.direction == "s").unwrap();
    assert!(s.maxima.iter().all(|&m| m == 0.0));
    assert!(w.bounded);
    assert_eq!(w.note, "empirical non-growth check, not a proof");
}

#[test]
fn localized_exponent_matches_measured_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for s in ["x^2 - y^3", "(x^2 - y^3)*(x - y)", "x^2*(x - y)", "(x^2 - y^3)*(x^2 - y^3 - y^4)"] {
        let nf = single(s);
        let p = nf.points[0].clone();
        let cover = HornCover::new(&nf, 0.25, 4.0);
        for r in &cover.regions {
            let loc = cover.localized(r);
            let xt = C64::from_polar(0.17 + 0.05 * rng.gen::<f64>(), rng.gen_range(0.0..std::f64::consts::TAU));
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let val = |rad: f64| {
                let t = C64::from_polar(rad, phi);
                let roots = nf.roots_t(&p, t);
                let x = roots[r.center].lam + xt * t.powu(r.d);
                nf.eval_t(&p, x, t, false).value.norm()
            };
            let order = (val(1e-3) / val(1e-4)).log10();
            assert!((order - loc.m_exp as f64).abs() < 0.05, "{s} {}: {order} vs {}", r.label(), loc.m_exp);
        }
    }
    // cusp, horn of level 3 around the first root: both roots nearby, M = 3 * 2
    let cusp = single("x^2 - y^3");
    let cover = HornCover::new(&cusp, 0.25, 4.0);
    let r = cover.regions.iter().find(|r| r.center == 0 && r.d == 3 && r.mode == HornMode::Ring).unwrap();
    let loc = cover.localized(r);
    assert_eq!((loc.m_exp, loc.inside.len()), (6, 2));
}

#[test]
fn strong_thom_on_horns() {
    let cfg = VerificationConfig { covering_points: 20_000, ..VerificationConfig::default() };
    let line = single("x - 2*y");
    let wf = verify_wf_on_horns(&line, &[line.points[0].clone()], &cfg).unwrap();
    let ring = wf.regions.iter().find(|r| r.mode == HornMode::Ring && r.d == 1).unwrap();
    assert_eq!(ring.m_exp, 1);
    assert!(ring.margin.as_ref().unwrap().iter().all(|&d| d <= 1e-9));
    assert!(wf.covering.ok && wf.reconstruction_ok && wf.bounded);

    let cusp = single("x^2 - y^3");
    let wf = verify_wf_on_horns(&cusp, &[cusp.points[0].clone()], &cfg).unwrap();
    for r in &wf.regions {
        let s = r.series.iter().find(|s| s.direction == "s").unwrap();
        assert!(s.maxima.iter().all(|&m| m == 0.0), "{}", r.label);
        if let Some(m) = &r.margin {
            assert!(*m.last().unwrap() <= m[0] + 1e-12, "{}: {m:?}", r.label);
        }
    }
    assert!(wf.reconstruction_ok && wf.covering.ok);
}

#[test]
fn kuo_field_examples() {
    let nf = joint("x^2 - y^3 - y^4", "x^2 - y^3");
    let path = joint_path(&nf, 0).unwrap();
    let p = &nf.points[0];
    let dir = path.tangent(0);
    let z = C64::new(0.0, 0.0);
    assert_eq!(kuo_field(&nf, p, &dir, z, z, Stratum::P).unwrap(), (1.0, z, z));
    // only tau moves: the unit deviation of this germ vanishes
    let mut only_tau = vec![z; dir.len()];
    only_tau[0] = C64::new(1.0, 0.0);
    let (x, y) = (C64::new(0.01, 0.003), C64::new(0.004, 0.001));
    assert_eq!(kuo_field(&nf, p, &only_tau, x, y, Stratum::Complement).unwrap(), (1.0, z, z));
}

#[test]
fn kuo_field_preserves_levels() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for nf in [joint("x^2 - y^3 - y^4", "x^2 - y^3"), joint("(1 + x)*(x^2 - y^3)", "x^2 - y^3 + x*y^2"), single("(x^2 - y^3)*(x - y)")] {
        let path = if nf.is_joint() { joint_path(&nf, 0).unwrap() } else { normal_form_path(&nf).unwrap() };
        let dir = path.tangent(0);
        for _ in 0..200 {
            let p = path.at(rng.gen::<f64>());
            let x = disc(&mut rng, 0.05);
            let y = disc(&mut rng, 1e-2);
            let (dv, dx, dy) = kuo_field(&nf, &p, &dir, x, y, Stratum::Complement).unwrap();
            let ev = nf.eval_t(&p, x, nf.principal_t(y), false);
            let fv: C64 = ev.dv.iter().zip(&dir).map(|(a, b)| a * b).sum();
            let total = fv * dv + ev.dx * dx + ev.dy * dy;
            assert!(total.norm() <= 1e-10 * fv.norm().max(1e-300), "{total} vs {fv}");
        }
    }
}

#[test]
fn flow_transports_zero_set_and_levels() {
    let nf = joint("x^2 - y^3 - y^4", "x^2 - y^3");
    let path = joint_path(&nf, 0).unwrap();
    let cfg = FlowConfig { dump: true, ..FlowConfig::default() };
    let rep = flow_trivialize(&nf, &path, &cfg).unwrap();
    assert!(rep.p_fixed);
    assert!(rep.max_distance <= 1e-6, "{}", rep.max_distance);
    assert!(rep.max_drift <= 1e-6, "{}", rep.max_drift);
    assert_eq!(rep.seeds.len(), 101);
    assert!(!rep.trajectory.is_empty());

    let nf = single("(1 + x + y)*(x^2 - y^3 - y^4)");
    let path = normal_form_path(&nf).unwrap();
    let rep = flow_trivialize(&nf, &path, &FlowConfig { zero_seeds: 10, off_seeds: 10, ..FlowConfig::default() }).unwrap();
    assert!(rep.zero_ok && rep.off_ok && rep.p_fixed);
}

#[test]
fn reports_serialize() {
    let nf = single("x^2 - y^3");
    let cfg = VerificationConfig { covering_points: 1000, samples: 8, ..VerificationConfig::default() };
    let w = verify_w(&nf, &nf.points, &cfg).unwrap();
    let wf = verify_wf_on_horns(&nf, &nf.points, &cfg).unwrap();
    let a = serde_json::to_string(&(&w, &wf)).unwrap();
    let b = serde_json::to_string(&(verify_w(&nf, &nf.points, &cfg).unwrap(), verify_wf_on_horns(&nf, &nf.points, &cfg).unwrap())).unwrap();
    assert_eq!(a, b);
    assert!(a.contains("not a proof"));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn hat_membership_as_stated(seed in 0u64..1000, rad in 1e-4f64..1e-2, frac in 0.05f64..0.95) {
        let nf = single("(x^2 - y^3)*(x - y)");
        let cover = HornCover::new(&nf, 0.25, 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = perturbed(&nf, &mut rng, 0.2);
        let t = C64::from_polar(rad.sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
        let roots = nf.roots_t(&p, t);
        for r in cover.regions.iter().filter(|r| r.mode == HornMode::Hat) {
            let c = roots[r.center].lam;
            let x = c + C64::from_polar(frac * 0.25 * t.norm().powi(r.d as i32), 1.0);
            let excluded = r.next.is_some_and(|nx| (x - c).norm() <= 4.0 * t.norm().powi(nx as i32));
            prop_assert_eq!(cover.contains(r, &roots, x, t), !excluded);
            let out = c + C64::from_polar(1.01 * 0.25 * t.norm().powi(r.d as i32), 1.0);
            prop_assert!(!cover.contains(r, &roots, out, t));
        }
    }

    #[test]
    fn random_points_are_covered(seed in 0u64..1000) {
        let nf = single("(x^2 - y^3)*(x - y)*(x + y)");
        let cover = HornCover::new(&nf, 0.25, 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = nf.points[0].clone();
        for _ in 0..200 {
            let t = disc(&mut rng, 0.03);
            let x = disc(&mut rng, 0.125);
            let roots = nf.roots_t(&p, t);
            prop_assert!(cover.covering_region(&roots, x, t).is_some());
        }
    }

    #[test]
    fn localized_reconstruction(seed in 0u64..1000) {
        let nf = single("(x^2 - y^3)*(x^2 - y^3 - y^4)*(x - y)");
        let cover = HornCover::new(&nf, 0.25, 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = perturbed(&nf, &mut rng, 0.2);
        let t = disc(&mut rng, 0.1);
        for r in &cover.regions {
            let roots = nf.roots_t(&p, t);
            let x = roots[r.center].lam + disc(&mut rng, 0.25) * t.powu(r.d);
            let (_, rec) = cover.localized(r).reconstruct(&nf, &p, x, t);
            let direct = nf.eval_t(&p, x, t, false).value;
            prop_assert!((rec - direct).norm() <= 1e-10 * direct.norm());
        }
    }

    #[test]
    fn coupled_parameters_stay_equal(seed in 0u64..1000) {
        let nf = single("(x^2 - y^3)*(x^2 - y^3 - y^4)");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = perturbed(&nf, &mut rng, 0.5);
        let path = ParamPath { vertices: vec![nf.points[0].clone(), p], retries: 0 };
        for k in 0..=10 {
            prop_assert!(check_param(&nf.space, &path.at(k as f64 / 10.0)));
        }
    }
}
