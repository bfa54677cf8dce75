use germ_core::arith::{int, rat};
use germ_core::invariants::{analyze, germ_invariant, milnor_delta_check, AnalyzeConfig, GermInvariant};
use germ_core::parse::{parse_expression, parse_poly};
use germ_core::tree::{bijection_match, equivalent, heights_monotone};
use germ_core::GermError;

fn analyze_text(s: &str) -> GermInvariant {
    let e = parse_expression(s, 64).unwrap();
    analyze(&e.poly, e.factors.as_deref(), &AnalyzeConfig::default()).unwrap()
}

fn eq(a: &str, b: &str) -> bool {
    equivalent(&parse_poly(a).unwrap(), &parse_poly(b).unwrap()).unwrap()
}

#[test]
fn equivalence_examples() {
    assert!(eq("x^2 - y^3", "x^2 - y^3 - y^4"));
    assert!(eq("x^2 - y^3", "y^2 - x^3"));
    assert!(eq("x*y", "x^2 - y^2"));
    assert!(!eq("x^2 - y^3", "x^2 - y^5"));
    assert!(!eq("x^2*(x - y)", "x*(x - y)*(x - 2*y)"));
    assert!(eq("x^2*(x - y)", "x*(x - y)^2"));
}

#[test]
fn encodings() {
    assert_eq!(analyze_text("x").encoding.0, "(H=1 (L d=1 w=1))");
    assert_eq!(analyze_text("x*y").encoding, analyze_text("x^2 - y^2").encoding);
    assert_eq!(analyze_text("x*y").encoding.0, "(H=1 (L d=1 w=1) (L d=1 w=1))");
    let t = analyze_text("(x^2 - y^3)*(x - y)");
    assert_eq!(t.encoding.0, "(H=1 (H=3/2 (L d=1 w=2)) (L d=1 w=1))");
    assert!(heights_monotone(&t.tree));
}

#[test]
fn branch_contacts() {
    let c = |s: &str| analyze_text(s).contact.entries[0][1].clone().unwrap();
    assert_eq!(c("(x^2 - y^3)*(x - y)"), int(1));
    assert_eq!(c("(x - y)*(x - 2*y)"), int(1));
    assert_eq!(c("(x - y)*(x - y - y^2)"), int(2));
}

#[test]
fn intersections() {
    let i = |s: &str| analyze_text(s).intersections[0][1].unwrap();
    assert_eq!(i("x*(x^2 - y^3)"), 3);
    assert_eq!(i("(x - y)*(x + y)"), 1);
    assert_eq!(i("(x^2 - y^3)*(x^3 - y^2)"), 4);
    let inv = analyze_text("(x^2 - y^3)*(x^3 - y^2)");
    assert_eq!(inv.contact.entries[0][1], Some(int(1)));
}

#[test]
fn milnor_examples() {
    let m = |s: &str| milnor_delta_check(&parse_poly(s).unwrap()).unwrap();
    let c = m("x^2 - y^3");
    assert_eq!((c.mu, c.delta, c.r, c.consistent), (2, 1, 1, true));
    assert_eq!(m("x^3 - y^5").mu, 8);
    let c = m("(x^2 - y^3)*(x - y)");
    assert_eq!((c.mu, c.delta, c.r, c.consistent), (5, 3, 2, true));
}

#[test]
fn non_reduced_germ() {
    let inv = analyze_text("x^2*(x - y)");
    let mut ds: Vec<u32> = inv.branches.iter().map(|b| b.d).collect();
    ds.sort();
    assert_eq!(ds, vec![1, 2]);
    assert_eq!(inv.germ_order, 3);
    assert!(matches!(milnor_delta_check(&parse_poly("x^2*(x - y)").unwrap()), Err(GermError::NonIsolated)));
}

#[test]
fn bijection_agrees_on_examples() {
    let pairs = [
        ("x^2 - y^3", "y^2 - x^3", true),
        ("x*y", "x^2 - y^2", true),
        ("x^2 - y^3", "x^2 - y^5", false),
        ("(x^2 - y^3)*(x - y)", "(x^2 - y^3)*(x - y^2)", false),
    ];
    for (a, b, expected) in pairs {
        let ia = analyze_text(a);
        let ib = analyze_text(b);
        assert_eq!(bijection_match(&ia, &ib).is_some(), expected, "{a} vs {b}");
        assert_eq!(ia.encoding == ib.encoding, expected, "{a} vs {b}");
    }
}

#[test]
fn two_pair_branch() {
    let inv = germ_invariant(&parse_poly("(x^2 - y^3)^2 - 4*x*y^5 - y^7").unwrap()).unwrap();
    assert_eq!(inv.branches.len(), 1);
    assert_eq!(inv.branches[0].pairs_tuples(), vec![(2, 3), (2, 7)]);
    let m = inv.milnor.unwrap();
    assert!(m.consistent);
    assert_eq!(m.mu, 16);
}
