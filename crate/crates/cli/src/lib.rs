//! Reports behind the `plane-germ` commands.

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use germ_core::arith::fmt_rational;
use germ_core::invariants::{analyze, AnalyzeConfig, GermInvariant};
use germ_core::parse::{parse_germ, print_poly};
use germ_core::tree::{bijection_match, to_dot};
use germ_core::{BiPoly, GermError, Rational};
use germ_lab::family::DEFAULT_TAIL_ORDER;
use germ_lab::{
    flow_trivialize, joint_path, normal_form_path, verify_w, verify_wf_on_horns, FlowConfig, LabError, NormalFamily,
    ParamPath, VerificationConfig,
};

pub const SCHEMA: &str = "plane-germ/1";
/// Largest expansion order tried when the validity radius is too small for the radii ladder.
pub const MAX_TAIL_ORDER: i64 = 128;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INEQUIVALENT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    #[serde(serialize_with = "ser_opt_rational")]
    pub trunc: Option<Rational>,
    pub seed: u64,
    pub format: Format,
    pub verification: VerificationConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { trunc: None, seed: 0, format: Format::Text, verification: VerificationConfig::default() }
    }
}

fn ser_opt_rational<S: serde::Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&fmt_rational(q)),
        None => s.serialize_none(),
    }
}

/// Failure with a stable code and the process exit status.
#[derive(Clone, Debug, PartialEq)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub exit: i32,
}

impl CliError {
    pub fn input(code: &str, message: impl Into<String>) -> Self {
        CliError { code: code.into(), message: message.into(), exit: EXIT_INPUT }
    }

    pub fn to_json(&self) -> Value {
        json!({ "schema": SCHEMA, "error": { "code": self.code, "message": self.message } })
    }
}

impl From<GermError> for CliError {
    fn from(e: GermError) -> Self {
        let exit = if e.code().starts_with("input.") { EXIT_INPUT } else { EXIT_NUMERIC };
        CliError { code: e.code().into(), message: e.to_string(), exit }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        match e {
            LabError::Core(e) => e.into(),
            LabError::Inequivalent(_) => CliError { code: e.code().into(), message: e.to_string(), exit: EXIT_INEQUIVALENT },
            LabError::Shape(_) => CliError::input(e.code(), e.to_string()),
            _ => CliError { code: e.code().into(), message: e.to_string(), exit: EXIT_NUMERIC },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// `p/q`, or a decimal literal.
pub fn parse_number(s: &str) -> CliResult<f64> {
    parse_rational(s).map(|q| germ_core::arith::rational_to_f64(&q)).or_else(|_| {
        s.trim().parse::<f64>().map_err(|_| CliError::input("input.number", format!("not a number: {s}")))
    })
}

pub fn parse_rational(s: &str) -> CliResult<Rational> {
    let bad = || CliError::input("input.number", format!("not a rational: {s}"));
    let (n, d) = s.trim().split_once('/').unwrap_or((s.trim(), "1"));
    let n = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

fn rat(q: &Rational) -> String {
    fmt_rational(q)
}

fn analyze_cfg(cfg: &RunConfig) -> AnalyzeConfig {
    AnalyzeConfig { trunc: cfg.trunc.clone(), ..AnalyzeConfig::default() }
}

pub fn read_germ(text: &str) -> CliResult<BiPoly> {
    Ok(parse_germ(text)?.poly)
}

fn invariant(text: &str, cfg: &RunConfig) -> CliResult<(BiPoly, GermInvariant)> {
    let e = parse_germ(text)?;
    let inv = analyze(&e.poly, e.factors.as_deref(), &analyze_cfg(cfg))?;
    Ok((e.poly, inv))
}

fn matrix<T>(m: &[Vec<Option<T>>], f: impl Fn(&T) -> Value) -> Value {
    Value::Array(m.iter().map(|row| Value::Array(row.iter().map(|v| v.as_ref().map_or(Value::Null, &f)).collect())).collect())
}

fn invariant_json(poly: &BiPoly, inv: &GermInvariant) -> Value {
    let branches: Vec<Value> = inv
        .branches
        .iter()
        .map(|b| {
            json!({
                "d": b.d,
                "m": b.m,
                "pairs": b.pairs_tuples().iter().map(|(p, q)| json!([p, q])).collect::<Vec<_>>(),
                "char_exponents": b.char_exponents.iter().map(rat).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut v = json!({
        "input": print_poly(poly),
        "shear": inv.shear.to_string(),
        "germ_order": inv.germ_order,
        "truncation": rat(&inv.trunc),
        "branches": branches,
        "contact": matrix(&inv.contact.entries, |q| json!(rat(q))),
        "conjugate_contacts": inv.contact.diagonal.iter().map(|d| d.iter().map(rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "intersections": matrix(&inv.intersections, |n| json!(n)),
        "tree": inv.encoding.0,
        "checks": {
            "resultant": inv.resultant_checks.iter().all(|c| c.from_contacts == c.from_resultant),
            "max_contact_violations": inv.lemma_violations,
        },
    });
    if let Some(m) = &inv.milnor {
        v["mu"] = json!(m.mu);
        v["delta"] = json!(m.delta);
        v["r"] = json!(m.r);
        v["milnor_consistent"] = json!(m.consistent);
    }
    v
}

pub fn dot(inv: &GermInvariant) -> String {
    to_dot(&inv.tree, |k, d| format!("branch {} d={d}", k + 1))
}

/// `analyze`: the invariant report, with the DOT rendering when the format asks for it.
pub fn cmd_analyze(text: &str, cfg: &RunConfig) -> CliResult<Value> {
    let (poly, inv) = invariant(text, cfg)?;
    let mut v = invariant_json(&poly, &inv);
    v["schema"] = json!(SCHEMA);
    v["seed"] = json!(cfg.seed);
    if cfg.format == Format::Dot {
        v["dot"] = json!(dot(&inv));
    }
    Ok(v)
}

pub fn analyze_text(v: &Value) -> String {
    let mut out = format!("germ {}\n", v["input"].as_str().unwrap_or(""));
    for (k, b) in v["branches"].as_array().into_iter().flatten().enumerate() {
        out += &format!("branch {}: d={} m={} pairs={}\n", k + 1, b["d"], b["m"], b["pairs"]);
    }
    out += &format!("contact {}\n", v["contact"]);
    out += &format!("intersections {}\n", v["intersections"]);
    if let Some(mu) = v.get("mu") {
        out += &format!("mu={} delta={} r={}\n", mu, v["delta"], v["r"]);
    }
    out += &format!("tree {}\n", v["tree"].as_str().unwrap_or(""));
    out
}

/// `compare`: verdict, both encodings and the branch correspondence.
pub fn cmd_compare(a: &str, b: &str, cfg: &RunConfig) -> CliResult<(Value, bool)> {
    let (pa, ia) = invariant(a, cfg)?;
    let (pb, ib) = invariant(b, cfg)?;
    let verdict = ia.encoding == ib.encoding;
    let matched = bijection_match(&ia, &ib);
    let mut v = json!({
        "schema": SCHEMA,
        "equivalent": verdict,
        "inputs": [print_poly(&pa), print_poly(&pb)],
        "encodings": [ia.encoding.0, ib.encoding.0],
        "matcher_agrees": matched.is_some() == verdict,
    });
    if let (true, Some(m)) = (verdict, matched) {
        v["correspondence"] = json!(m.iter().enumerate().map(|(i, j)| json!([i + 1, j + 1])).collect::<Vec<_>>());
    }
    Ok((v, verdict))
}

fn family(f: &BiPoly, g: Option<&BiPoly>, radius: f64) -> CliResult<NormalFamily<f64>> {
    let mut order = DEFAULT_TAIL_ORDER;
    loop {
        let nf = match g {
            Some(g) => NormalFamily::joint_with_order(f, g, order)?,
            None => NormalFamily::with_order(f, order)?,
        };
        if nf.validity_radius >= radius || order >= MAX_TAIL_ORDER {
            return Ok(nf);
        }
        order *= 2;
    }
}

fn cplx(z: &Complex64) -> Value {
    json!([z.re, z.im])
}

fn path_json(nf: &NormalFamily<f64>, path: &ParamPath<f64>) -> Value {
    json!({
        "segments": path.segments(),
        "retries": path.retries,
        "names": nf.param_names(),
        "vertices": path.vertices.iter().map(|p| p.flat().iter().map(cplx).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

/// Output of `deform-check`: the report, the overall verdict and trajectory rows.
pub struct DeformOutcome {
    pub report: Value,
    pub ok: bool,
    pub trajectory: Vec<[f64; 7]>,
}

/// `deform-check`: family, path, Verdier and strong Thom checks, and the Kuo flow.
pub fn cmd_deform_check(a: &str, b: Option<&str>, cfg: &RunConfig, dump: bool) -> CliResult<DeformOutcome> {
    cfg.verification.validate()?;
    let f = read_germ(a)?;
    let g = b.map(read_germ).transpose()?;
    let vcfg = VerificationConfig { seed: cfg.seed, ..cfg.verification.clone() };
    let nf = family(&f, g.as_ref(), vcfg.radii[0])?;
    let path = match g {
        Some(_) => joint_path(&nf, cfg.seed)?,
        None => normal_form_path(&nf)?,
    };
    let points = path.samples();
    let w = verify_w(&nf, &points, &vcfg)?;
    let wf = verify_wf_on_horns(&nf, &points, &vcfg)?;
    let fcfg = FlowConfig { seed: cfg.seed, dump, ..FlowConfig::default() };
    let mut flow = flow_trivialize(&nf, &path, &fcfg)?;
    let trajectory = std::mem::take(&mut flow.trajectory);
    let verdicts = json!({
        "w_bounded": w.bounded,
        "wf_bounded": wf.bounded,
        "covering": wf.covering.ok,
        "reconstruction": wf.reconstruction_ok,
        "zero_set_transport": flow.zero_ok,
        "level_preservation": flow.off_ok,
        "p_fixed": flow.p_fixed,
    });
    let ok = verdicts.as_object().unwrap().values().all(|v| v == &Value::Bool(true));
    let mut flow_json = serde_json::to_value(&flow).expect("serializable");
    flow_json.as_object_mut().unwrap().remove("trajectory");
    let report = json!({
        "schema": SCHEMA,
        "mode": if nf.is_joint() { "joint" } else { "single" },
        "inputs": std::iter::once(&f).chain(g.as_ref()).map(print_poly).collect::<Vec<_>>(),
        "config": vcfg,
        "n": nf.n,
        "tail_order": nf.tail_order,
        "validity_radius": nf.validity_radius,
        "path": path_json(&nf, &path),
        "w": w,
        "wf": wf,
        "flow": flow_json,
        "verdicts": verdicts,
        "ok": ok,
    });
    Ok(DeformOutcome { report, ok, trajectory })
}

/// Trajectory rows as CSV with the columns `seed, v, x_re, x_im, y_re, y_im, abs_f`.
pub fn trajectory_csv(rows: &[[f64; 7]]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seed", "v", "x_re", "x_im", "y_re", "y_im", "abs_f"]).expect("in-memory write");
    for r in rows {
        w.write_record(r.iter().enumerate().map(|(i, v)| if i == 0 { format!("{}", *v as u64) } else { format!("{v:e}") }))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

/// Renders a value the way every command prints JSON.
pub fn render(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}
