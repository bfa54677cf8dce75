//! Multiplicity-decorated Kuo–Lu trees and the equivalence decision.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::arith::{fmt_rational, Rational};
use crate::error::{GermError, Result};
use crate::invariants::{analyze, AnalyzeConfig, GermInvariant};
use crate::BiPoly;

#[derive(Clone, Debug, PartialEq)]
pub enum TreeNode {
    /// Roots of one branch that separate only above this point.
    Leaf { branch: usize, d: u32, w: usize },
    Bar { height: Rational, children: Vec<TreeNode> },
}

/// Rooted tree with the root bar at height 1.
#[derive(Clone, Debug, PartialEq)]
pub struct KuoLuTree {
    pub root: TreeNode,
}

/// Canonical text of a decorated tree; equal strings mean isomorphic trees.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalEncoding(pub String);

impl std::fmt::Display for CanonicalEncoding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, a: usize) -> usize {
        let p = self.0[a];
        if p == a {
            return a;
        }
        let r = self.find(p);
        self.0[a] = r;
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Merge tree of roots under the contact ultrametric.
///
/// `contacts[a][b]` is the contact of roots `a != b`; `branch_of[a]` the branch of root `a`;
/// `d[k]` the multiplicity of branch `k`.
pub fn build_tree(contacts: &[Vec<Option<Rational>>], branch_of: &[usize], d: &[u32]) -> Result<KuoLuTree> {
    let items: Vec<usize> = (0..branch_of.len()).collect();
    let one = Rational::from_integer(1.into());
    if items.iter().any(|&a| items.iter().any(|&b| a != b && contacts[a][b].as_ref().is_some_and(|c| *c < one))) {
        return Err(GermError::Inconsistent("contact below the root bar".into()));
    }
    Ok(KuoLuTree { root: bar(contacts, branch_of, d, &items, one)? })
}

fn bar(contacts: &[Vec<Option<Rational>>], branch_of: &[usize], d: &[u32], items: &[usize], h: Rational) -> Result<TreeNode> {
    let c = |a: usize, b: usize| contacts[a][b].clone().expect("contact of distinct roots");
    let mut uf = UnionFind::new(items.len());
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            if c(items[i], items[j]) > h {
                uf.union(i, j);
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..items.len() {
        classes.entry(uf.find(i)).or_default().push(items[i]);
    }
    let mut children = Vec::new();
    let mut leaf_weight: BTreeMap<usize, usize> = BTreeMap::new();
    for class in classes.values() {
        if class.len() == 1 {
            *leaf_weight.entry(branch_of[class[0]]).or_default() += 1;
            continue;
        }
        let mut inner = None::<Rational>;
        for (i, &a) in class.iter().enumerate() {
            for &b in &class[i + 1..] {
                let v = c(a, b);
                if v <= h {
                    return Err(GermError::Inconsistent("contacts violate the ultrametric inequality".into()));
                }
                inner = Some(match inner {
                    Some(m) if m <= v => m,
                    _ => v,
                });
            }
        }
        children.push(bar(contacts, branch_of, d, class, inner.unwrap())?);
    }
    for (branch, w) in leaf_weight {
        children.push(TreeNode::Leaf { branch, d: d[branch], w });
    }
    Ok(TreeNode::Bar { height: h, children })
}

fn encode(n: &TreeNode) -> String {
    match n {
        TreeNode::Leaf { d, w, .. } => format!("(L d={d} w={w})"),
        TreeNode::Bar { height, children } => {
            let mut parts: Vec<String> = children.iter().map(encode).collect();
            parts.sort();
            format!("(H={} {})", fmt_rational(height), parts.join(" "))
        }
    }
}

pub fn canonical_encoding(t: &KuoLuTree) -> CanonicalEncoding {
    CanonicalEncoding(encode(&t.root))
}

/// Heights never decrease from the root to a leaf, and strictly increase between bars.
pub fn heights_monotone(t: &KuoLuTree) -> bool {
    fn go(n: &TreeNode, above: Option<&Rational>) -> bool {
        match n {
            TreeNode::Leaf { .. } => true,
            TreeNode::Bar { height, children } => {
                above.is_none_or(|a| height > a) && children.iter().all(|c| go(c, Some(height)))
            }
        }
    }
    go(&t.root, None)
}

/// Graphviz rendering; `leaf_label(branch)` supplies the leaf text.
pub fn to_dot(t: &KuoLuTree, leaf_label: impl Fn(usize, u32) -> String) -> String {
    fn go(n: &TreeNode, id: &mut usize, out: &mut String, label: &dyn Fn(usize, u32) -> String) -> usize {
        let me = *id;
        *id += 1;
        match n {
            TreeNode::Leaf { branch, d, w } => {
                let _ = writeln!(out, "  n{me} [shape=box, label=\"{} (roots {w})\"];", label(*branch, *d));
            }
            TreeNode::Bar { height, children } => {
                let _ = writeln!(out, "  n{me} [shape=plaintext, label=\"H={}\"];", fmt_rational(height));
                for c in children {
                    let cid = go(c, id, out, label);
                    let _ = writeln!(out, "  n{me} -> n{cid};");
                }
            }
        }
        me
    }
    let mut out = String::from("digraph kuo_lu {\n");
    go(&t.root, &mut 0, &mut out, &leaf_label);
    out.push_str("}\n");
    out
}

/// Topological equivalence by comparison of decorated trees.
pub fn equivalent(f: &BiPoly, g: &BiPoly) -> Result<bool> {
    let cfg = AnalyzeConfig::default();
    let a = analyze(f, None, &cfg)?;
    let b = analyze(g, None, &cfg)?;
    Ok(a.encoding == b.encoding)
}

/// Literal bijection test: a correspondence of branches preserving multiplicities,
/// Puiseux pairs and intersection numbers. Returns the correspondence when one exists.
pub fn bijection_match(a: &GermInvariant, b: &GermInvariant) -> Option<Vec<usize>> {
    let n = a.branches.len();
    if n != b.branches.len() {
        return None;
    }
    let key = |inv: &GermInvariant, k: usize| {
        let br = &inv.branches[k];
        (br.d, br.pairs_tuples())
    };
    let mut assign = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn search(
        k: usize,
        a: &GermInvariant,
        b: &GermInvariant,
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
        key: &dyn Fn(&GermInvariant, usize) -> (u32, Vec<(u32, u32)>),
    ) -> bool {
        if k == assign.len() {
            return true;
        }
        for t in 0..assign.len() {
            if used[t] || key(a, k) != key(b, t) {
                continue;
            }
            if (0..k).any(|s| a.intersections[s][k] != b.intersections[assign[s]][t]) {
                continue;
            }
            assign[k] = t;
            used[t] = true;
            if search(k + 1, a, b, assign, used, key) {
                return true;
            }
            used[t] = false;
        }
        false
    }
    if search(0, a, b, &mut assign, &mut used, &key) {
        Some(assign)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn mat(v: &[&[Option<Rational>]]) -> Vec<Vec<Option<Rational>>> {
        v.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn cusp_tree() {
        let c = mat(&[&[None, Some(rat(3, 2))], &[Some(rat(3, 2)), None]]);
        let t = build_tree(&c, &[0, 0], &[1]).unwrap();
        assert_eq!(canonical_encoding(&t).0, "(H=1 (H=3/2 (L d=1 w=2)))");
    }

    #[test]
    fn cusp_and_line() {
        let o = Some(int(1));
        let c = mat(&[&[None, Some(rat(3, 2)), o.clone()], &[Some(rat(3, 2)), None, o.clone()], &[o.clone(), o, None]]);
        let t = build_tree(&c, &[0, 0, 1], &[1, 1]).unwrap();
        assert_eq!(canonical_encoding(&t).0, "(H=1 (H=3/2 (L d=1 w=2)) (L d=1 w=1))");
        assert!(heights_monotone(&t));
        let dot = to_dot(&t, |b, d| format!("d={d}, pairs={}", if b == 0 { "[(2,3)]" } else { "[]" }));
        assert!(dot.contains("H=3/2"));
        assert!(dot.contains("pairs=[(2,3)]"));
    }

    #[test]
    fn single_smooth() {
        let t = build_tree(&[vec![None]], &[0], &[1]).unwrap();
        assert_eq!(canonical_encoding(&t).0, "(H=1 (L d=1 w=1))");
    }

    #[test]
    fn ultrametric_violation() {
        let c = mat(&[
            &[None, Some(int(2)), Some(int(3))],
            &[Some(int(2)), None, Some(int(1))],
            &[Some(int(3)), Some(int(1)), None],
        ]);
        assert!(build_tree(&c, &[0, 1, 2], &[1, 1, 1]).is_err());
    }

    #[test]
    fn insertion_order_irrelevant() {
        let o = Some(int(1));
        let a = mat(&[&[None, o.clone(), o.clone()], &[o.clone(), None, Some(int(2))], &[o.clone(), Some(int(2)), None]]);
        let b = mat(&[&[None, Some(int(2)), o.clone()], &[Some(int(2)), None, o.clone()], &[o.clone(), o, None]]);
        let ta = build_tree(&a, &[0, 1, 2], &[3, 1, 1]).unwrap();
        let tb = build_tree(&b, &[0, 1, 2], &[1, 1, 3]).unwrap();
        assert_eq!(canonical_encoding(&ta), canonical_encoding(&tb));
    }
}
