//! Parenthesis-matching algebra.
//!
//! A matching is non-crossing ("parenthesis") when its edges, viewed as
//! intervals, are pairwise disjoint or nested. Such matchings are in
//! bijection with balanced parenthesis sequences (each matched pair of
//! parentheses is an edge) and with ordered rooted trees of size
//! `s = n/2 + 1` (each pair is a node under a virtual root).
//!
//! [`bound_pmatching`] turns that tree into a certified numeric upper bound
//! on `r_<(M, K3)`: a light root is handled by surrounding each child and
//! adding the results, a root with an `r`-heavy child by cutting along the
//! maximal heavy path and charging the branches. The produced
//! [`BoundCertificate`] records, per node, which rule fired and with what
//! numbers, so it can be re-checked without re-deriving anything.

use crate::graph::{GraphError, OrderedMatching};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParenError {
    #[error("unbalanced parenthesis sequence: violation at index {index}")]
    Unbalanced { index: usize },
    #[error("invalid character {ch:?} at index {index}; expected '(' or ')'")]
    BadChar { index: usize, ch: char },
    #[error("edges ({},{}) and ({},{}) cross", first.0, first.1, second.0, second.1)]
    Crossing {
        first: (u32, u32),
        second: (u32, u32),
    },
    #[error("vertex {vertex} is uncovered; the parenthesis form needs a perfect matching")]
    NotPerfect { vertex: u32 },
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A balanced parenthesis sequence. Indices are 1-based, like vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParenSeq {
    text: String,
}

impl ParenSeq {
    /// Validates balance. The error names the first violating index: the
    /// first unmatched ')' if the depth goes negative, otherwise the first
    /// '(' left open at the end.
    pub fn new(text: impl Into<String>) -> Result<Self, ParenError> {
        let text = text.into();
        let mut open = Vec::new();
        for (idx0, ch) in text.chars().enumerate() {
            match ch {
                '(' => open.push(idx0 + 1),
                ')' => {
                    if open.pop().is_none() {
                        return Err(ParenError::Unbalanced { index: idx0 + 1 });
                    }
                }
                _ => {
                    return Err(ParenError::BadChar {
                        index: idx0 + 1,
                        ch,
                    })
                }
            }
        }
        if let Some(&first) = open.first() {
            return Err(ParenError::Unbalanced { index: first });
        }
        Ok(ParenSeq { text })
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }
}

impl std::fmt::Display for ParenSeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.text)
    }
}

/// Each matched pair of parentheses becomes an edge; the result is a
/// non-crossing perfect matching on `[len]`.
pub fn parse_paren(seq: &ParenSeq) -> OrderedMatching {
    let mut open = Vec::new();
    let mut edges = Vec::with_capacity(seq.len() / 2);
    for (idx0, ch) in seq.as_str().chars().enumerate() {
        let pos = idx0 as u32 + 1;
        match ch {
            '(' => open.push(pos),
            _ => edges.push((open.pop().expect("validated sequence"), pos)),
        }
    }
    OrderedMatching::new(seq.len(), edges).expect("stack pairing is a matching")
}

/// Inverse of [`parse_paren`]; requires a perfect non-crossing matching.
pub fn render_paren(m: &OrderedMatching) -> Result<ParenSeq, ParenError> {
    if let Some((first, second)) = m.crossing_pair() {
        return Err(ParenError::Crossing { first, second });
    }
    let mut partner = vec![0u32; m.n() + 1];
    for &(i, j) in m.edges() {
        partner[i as usize] = j;
        partner[j as usize] = i;
    }
    let mut text = String::with_capacity(m.n());
    for v in 1..=m.n() as u32 {
        let p = partner[v as usize];
        if p == 0 {
            return Err(ParenError::NotPerfect { vertex: v });
        }
        text.push(if p > v { '(' } else { ')' });
    }
    Ok(ParenSeq { text })
}

/// The fully nested matching on `[2k]`: edges `(i, 2k+1-i)`.
pub fn nested_matching(k: usize) -> OrderedMatching {
    let edges = (1..=k as u32).map(|i| (i, 2 * k as u32 + 1 - i)).collect();
    OrderedMatching::new(2 * k, edges).expect("nested matching is valid")
}

/// `(M)`: wrap a matching in one surrounding edge.
pub fn surround_matching(inner: &OrderedMatching) -> OrderedMatching {
    let n = inner.n();
    let mut edges = vec![(1u32, n as u32 + 2)];
    edges.extend(inner.edges().iter().map(|&(i, j)| (i + 1, j + 1)));
    OrderedMatching::new(n + 2, edges).expect("surround preserves matching")
}

/// Concatenation of matchings on consecutive disjoint vertex intervals.
pub fn concat_matchings(parts: &[&OrderedMatching]) -> OrderedMatching {
    let mut edges = Vec::new();
    let mut offset = 0u32;
    for part in parts {
        edges.extend(part.edges().iter().map(|&(i, j)| (i + offset, j + offset)));
        offset += part.n() as u32;
    }
    OrderedMatching::new(offset as usize, edges).expect("disjoint concatenation")
}

/// Ordered rooted tree of a non-crossing perfect matching.
///
/// `nodes[0]` is the virtual root; every other node is one matched pair.
/// Per-node `size` counts the subtree including the node itself, so the
/// matching has `2 * (size(root) - 1)` vertices. An edge to a child is
/// `r`-heavy iff `size(child) >= r * size(parent)`.
#[derive(Debug, Clone)]
pub struct ParenTree {
    r: f64,
    nodes: Vec<TreeNode>,
}

#[derive(Debug, Clone)]
struct TreeNode {
    parent: usize, // self for the root
    children: Vec<usize>,
    size: usize,
    span: Option<(u32, u32)>,
    heavy: bool,
}

pub const ROOT: usize = 0;

impl ParenTree {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Tree size `s` (node count; equals the root's subtree size).
    pub fn size(&self) -> usize {
        self.nodes[ROOT].size
    }

    pub fn size_of(&self, id: usize) -> usize {
        self.nodes[id].size
    }

    pub fn children(&self, id: usize) -> &[usize] {
        &self.nodes[id].children
    }

    /// The matched pair of host positions for this node (`None` for the root).
    pub fn span(&self, id: usize) -> Option<(u32, u32)> {
        self.nodes[id].span
    }

    /// Whether the edge from this node to its parent is r-heavy.
    pub fn is_heavy(&self, id: usize) -> bool {
        self.nodes[id].heavy
    }

    /// Leftmost r-heavy child, if any. With `r > 1/2` at most one child can
    /// be heavy, since two would overfill the parent subtree.
    pub fn heavy_child(&self, id: usize) -> Option<usize> {
        self.nodes[id]
            .children
            .iter()
            .copied()
            .find(|&c| self.nodes[c].heavy)
    }

    /// The matching formed by the interior of `id` (its subtree treated as a
    /// whole sequence, relabeled to start at 1).
    pub fn interior_matching(&self, id: usize) -> OrderedMatching {
        let mut edges = Vec::new();
        let mut pos = 0u32;
        self.emit(id, &mut pos, &mut edges);
        OrderedMatching::new(pos as usize, edges).expect("tree interior is a matching")
    }

    fn emit(&self, id: usize, pos: &mut u32, edges: &mut Vec<(u32, u32)>) {
        for &child in &self.nodes[id].children {
            *pos += 1;
            let open = *pos;
            self.emit(child, pos, edges);
            *pos += 1;
            edges.push((open, *pos));
        }
    }
}

/// Builds the ordered rooted tree of `m`, labeling heavy edges against `r`.
///
/// Fails on a crossing pair (named in the error) or an uncovered vertex.
pub fn matching_to_tree(m: &OrderedMatching, r: f64) -> Result<ParenTree, ParenError> {
    if !r.is_finite() {
        return Err(ParenError::Parameter(format!(
            "heavy ratio r={r} must be finite"
        )));
    }
    let mut partner = vec![0u32; m.n() + 1];
    for &(i, j) in m.edges() {
        partner[i as usize] = j;
        partner[j as usize] = i;
    }
    let mut nodes = vec![TreeNode {
        parent: ROOT,
        children: Vec::new(),
        size: 1,
        span: None,
        heavy: false,
    }];
    let mut stack = vec![ROOT];
    for v in 1..=m.n() as u32 {
        let p = partner[v as usize];
        if p == 0 {
            return Err(ParenError::NotPerfect { vertex: v });
        }
        if p > v {
            let id = nodes.len();
            let top = *stack.last().unwrap();
            nodes.push(TreeNode {
                parent: top,
                children: Vec::new(),
                size: 1,
                span: Some((v, p)),
                heavy: false,
            });
            nodes[top].children.push(id);
            stack.push(id);
        } else {
            let top = *stack.last().unwrap();
            let span = nodes[top].span.expect("root never closes");
            if span != (p, v) {
                // the edge closing here leapfrogs the currently open one
                return Err(ParenError::Crossing {
                    first: span.min((p, v)),
                    second: span.max((p, v)),
                });
            }
            stack.pop();
        }
    }
    // children are created after their parents, so a reverse sweep sums sizes
    for id in (1..nodes.len()).rev() {
        let sz = nodes[id].size;
        let parent = nodes[id].parent;
        nodes[parent].size += sz;
    }
    let mut tree = ParenTree { r, nodes };
    for parent in 0..tree.nodes.len() {
        let psize = tree.nodes[parent].size;
        for ci in 0..tree.nodes[parent].children.len() {
            let child = tree.nodes[parent].children[ci];
            tree.nodes[child].heavy = tree.nodes[child].size as f64 >= r * psize as f64;
        }
    }
    Ok(tree)
}

/// Inverse of [`matching_to_tree`].
pub fn tree_to_matching(tree: &ParenTree) -> OrderedMatching {
    tree.interior_matching(ROOT)
}

/// How the bound recursion splits a node: trivially (leaf), child by child
/// (no heavy child), or along the maximal heavy path.
#[derive(Debug, Clone)]
pub(crate) enum NodeDecomp {
    Leaf,
    Light {
        children: Vec<usize>,
    },
    Heavy {
        /// Path node ids starting at the decomposed node, following the
        /// (leftmost) r-heavy child while one exists. `path.len()` is the
        /// heavy-path vertex count `s^h`.
        path: Vec<usize>,
        /// Children of the deepest path vertex: the `k'` center branches.
        center: Vec<usize>,
        /// For each non-final path vertex `path[j]`: its other children,
        /// split into those left and those right of `path[j+1]`.
        side: Vec<(Vec<usize>, Vec<usize>)>,
    },
}

impl NodeDecomp {
    /// Branch certificates are listed center-first, then side branches by
    /// path level, left before right.
    pub(crate) fn branches(&self) -> Vec<usize> {
        match self {
            NodeDecomp::Leaf => Vec::new(),
            NodeDecomp::Light { children } => children.clone(),
            NodeDecomp::Heavy { center, side, .. } => {
                let mut out = center.clone();
                for (left, right) in side {
                    out.extend(left.iter().copied());
                    out.extend(right.iter().copied());
                }
                out
            }
        }
    }
}

pub(crate) fn decompose(tree: &ParenTree, node: usize) -> NodeDecomp {
    if tree.size_of(node) == 1 {
        return NodeDecomp::Leaf;
    }
    if tree.heavy_child(node).is_none() {
        return NodeDecomp::Light {
            children: tree.children(node).to_vec(),
        };
    }
    let mut path = vec![node];
    while let Some(next) = tree.heavy_child(*path.last().unwrap()) {
        path.push(next);
    }
    let mut side = Vec::with_capacity(path.len() - 1);
    for j in 0..path.len() - 1 {
        let kids = tree.children(path[j]);
        let split = kids.iter().position(|&c| c == path[j + 1]).unwrap();
        side.push((kids[..split].to_vec(), kids[split + 1..].to_vec()));
    }
    let center = tree.children(*path.last().unwrap()).to_vec();
    NodeDecomp::Heavy { path, center, side }
}

/// Which rule produced a certificate node's bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertCase {
    #[serde(rename = "leaf")]
    Leaf,
    #[serde(rename = "light-root")]
    LightRoot,
    #[serde(rename = "heavy-path-A")]
    HeavyPathA,
    #[serde(rename = "heavy-path-B")]
    HeavyPathB,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertConstants {
    pub epsilon: f64,
    pub r: f64,
    pub c: f64,
}

/// A numeric upper bound on `r_<(M, K3)` together with the derivation tree
/// that produced it. Every node's bound is recomputed from its children by
/// the recorded case's formula during [`BoundCertificate::validate`], and
/// must not exceed `c * s^(1+eps)`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCertificate {
    pub case: CertCase,
    pub s: usize,
    pub bound: f64,
    pub constants: CertConstants,
    /// Heavy-path nodes only: how many leading children are center branches.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_prime: Option<usize>,
    pub children: Vec<BoundCertificate>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertError {
    #[error("node with s={s}: recorded bound {recorded} != recomputed {recomputed}")]
    BoundMismatch {
        s: usize,
        recorded: f64,
        recomputed: f64,
    },
    #[error("node with s={s}: bound {bound} exceeds c*s^(1+eps) = {cap}")]
    CapExceeded { s: usize, bound: f64, cap: f64 },
    #[error("node with s={s}: size does not match children ({detail})")]
    SizeMismatch { s: usize, detail: String },
    #[error("node with s={s}: case {case:?} inconsistent ({detail})")]
    CaseMismatch {
        s: usize,
        case: CertCase,
        detail: String,
    },
}

/// Constants of the bound recursion: `r = 1 - 23^(-2/eps)`, `c = 23/(1-r^eps)`.
pub fn bound_constants(epsilon: f64) -> (f64, f64) {
    let r = 1.0 - 23f64.powf(-2.0 / epsilon);
    let c = 23.0 / (1.0 - r.powf(epsilon));
    (r, c)
}

fn light_bound(children: &[BoundCertificate]) -> f64 {
    children
        .iter()
        .map(|ch| ch.bound + 2.0 * ch.s as f64 + 1.0)
        .sum()
}

fn heavy_bound(s_h: usize, k_prime: usize, children: &[BoundCertificate]) -> f64 {
    let outer: f64 = children[..k_prime]
        .iter()
        .map(|ch| ch.bound + 3.0 * ch.s as f64)
        .sum();
    let inner: f64 = children[k_prime..]
        .iter()
        .map(|ch| ch.bound + 3.0 * ch.s as f64)
        .sum();
    let center_edges: f64 = children[..k_prime].iter().map(|ch| ch.s as f64).sum();
    outer + 20.0 * (s_h as f64 + inner + center_edges)
}

/// Certified upper bound on `r_<(M, K3)` for a non-crossing matching `M`.
///
/// The recursion follows the tree decomposition: a leaf costs 0; a light
/// root surrounds each child (`t_i + 2 s_i + 1`) and adds; a heavy root pays
/// `sum_{i<=k'} (t_i + 3 s_i) + 20 (s^h + sum_{i>k'} (t_i + 3 s_i) +
/// sum_{i<=k'} s_i)` over the branches off its maximal heavy path. The case
/// label records whether the tail weight `s^h + sum_{i>k'} s_i` reaches
/// `23^(-1/eps) * s` (case A) or not (case B).
pub fn bound_pmatching(m: &OrderedMatching, epsilon: f64) -> Result<BoundCertificate, ParenError> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(ParenError::Parameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let (r, c) = bound_constants(epsilon);
    let tree = matching_to_tree(m, r)?;
    Ok(cert_for(&tree, ROOT, CertConstants { epsilon, r, c }))
}

fn cert_for(tree: &ParenTree, node: usize, constants: CertConstants) -> BoundCertificate {
    let s = tree.size_of(node);
    let decomp = decompose(tree, node);
    let children: Vec<BoundCertificate> = decomp
        .branches()
        .iter()
        .map(|&b| cert_for(tree, b, constants))
        .collect();
    match decomp {
        NodeDecomp::Leaf => BoundCertificate {
            case: CertCase::Leaf,
            s,
            bound: 0.0,
            constants,
            k_prime: None,
            children,
        },
        NodeDecomp::Light { .. } => BoundCertificate {
            case: CertCase::LightRoot,
            s,
            bound: light_bound(&children),
            constants,
            k_prime: None,
            children,
        },
        NodeDecomp::Heavy { path, center, .. } => {
            let s_h = path.len();
            let k_prime = center.len();
            let bound = heavy_bound(s_h, k_prime, &children);
            let tail: f64 = (s_h as f64)
                + children[k_prime..]
                    .iter()
                    .map(|ch| ch.s as f64)
                    .sum::<f64>();
            let case = if tail >= 23f64.powf(-1.0 / constants.epsilon) * s as f64 {
                CertCase::HeavyPathA
            } else {
                CertCase::HeavyPathB
            };
            BoundCertificate {
                case,
                s,
                bound,
                constants,
                k_prime: Some(k_prime),
                children,
            }
        }
    }
}

impl BoundCertificate {
    /// The bound rounded up to an integer host size. Rounding up preserves
    /// validity of an upper bound.
    pub fn integer_bound(&self) -> u64 {
        self.bound.ceil() as u64
    }

    /// Re-derives every node's bound from its children by the recorded
    /// case's formula and checks `bound <= c * s^(1+eps)` throughout.
    pub fn validate(&self) -> Result<(), CertError> {
        let CertConstants { epsilon, r: _, c } = self.constants;
        let cap = c * (self.s as f64).powf(1.0 + epsilon);
        if self.bound > cap {
            return Err(CertError::CapExceeded {
                s: self.s,
                bound: self.bound,
                cap,
            });
        }
        let child_sizes: usize = self.children.iter().map(|ch| ch.s).sum();
        let recomputed = match self.case {
            CertCase::Leaf => {
                if self.s != 1 || !self.children.is_empty() {
                    return Err(CertError::SizeMismatch {
                        s: self.s,
                        detail: "leaf must have s=1 and no children".into(),
                    });
                }
                0.0
            }
            CertCase::LightRoot => {
                if self.s != 1 + child_sizes {
                    return Err(CertError::SizeMismatch {
                        s: self.s,
                        detail: format!("light root expects s = 1 + {child_sizes}"),
                    });
                }
                light_bound(&self.children)
            }
            CertCase::HeavyPathA | CertCase::HeavyPathB => {
                let k_prime = self.k_prime.ok_or(CertError::CaseMismatch {
                    s: self.s,
                    case: self.case,
                    detail: "heavy node missing k_prime".into(),
                })?;
                if k_prime > self.children.len() {
                    return Err(CertError::CaseMismatch {
                        s: self.s,
                        case: self.case,
                        detail: "k_prime exceeds child count".into(),
                    });
                }
                if self.s < child_sizes + 2 {
                    return Err(CertError::SizeMismatch {
                        s: self.s,
                        detail: "heavy path needs at least two vertices".into(),
                    });
                }
                let s_h = self.s - child_sizes;
                let tail: f64 = s_h as f64
                    + self.children[k_prime..]
                        .iter()
                        .map(|ch| ch.s as f64)
                        .sum::<f64>();
                let want_a = tail >= 23f64.powf(-1.0 / epsilon) * self.s as f64;
                let is_a = self.case == CertCase::HeavyPathA;
                if want_a != is_a {
                    return Err(CertError::CaseMismatch {
                        s: self.s,
                        case: self.case,
                        detail: format!("tail weight {tail} vs threshold picks the other case"),
                    });
                }
                heavy_bound(s_h, k_prime, &self.children)
            }
        };
        if recomputed != self.bound {
            return Err(CertError::BoundMismatch {
                s: self.s,
                recorded: self.bound,
                recomputed,
            });
        }
        for ch in &self.children {
            if ch.constants != self.constants {
                return Err(CertError::CaseMismatch {
                    s: self.s,
                    case: self.case,
                    detail: "child constants differ".into(),
                });
            }
            ch.validate()?;
        }
        Ok(())
    }
}

/// Three-valued result of checking a convexity lemma instance: the
/// inequality can hold, fail, or the hypotheses may not apply at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaCheck {
    Holds,
    Fails,
    HypothesisUnmet,
}

fn check_finite(a: &[f64], params: &[(&str, f64)]) -> Result<(), ParenError> {
    if a.is_empty() {
        return Err(ParenError::Parameter("empty coefficient list".into()));
    }
    if let Some(x) = a.iter().find(|x| !x.is_finite()) {
        return Err(ParenError::Parameter(format!("non-finite coefficient {x}")));
    }
    for &(name, v) in params {
        if !v.is_finite() {
            return Err(ParenError::Parameter(format!(
                "non-finite parameter {name}={v}"
            )));
        }
    }
    Ok(())
}

// The extremal configurations sit exactly on equality, so the comparisons
// leave room for floating-point rounding.
const REL_SLACK: f64 = 1e-9;

/// Checks `m * (a_0 + c*a_1^d + .. + c*a_k^d) <= c * s^d` on one instance,
/// under the hypotheses `d > 1`, `m > 0`, `c >= m`, `a_i >= 0`,
/// `s = sum a_i >= 1`, and `a_i <= r*s` for `i >= 1` with `r = m^(-1/(d-1))`.
pub fn convex1_holds(a: &[f64], delta: f64, m: f64, c: f64) -> Result<LemmaCheck, ParenError> {
    check_finite(a, &[("delta", delta), ("m", m), ("c", c)])?;
    if delta <= 1.0 || m <= 0.0 || c < m || a.iter().any(|&x| x < 0.0) {
        return Ok(LemmaCheck::HypothesisUnmet);
    }
    let s: f64 = a.iter().sum();
    let r = m.powf(-1.0 / (delta - 1.0));
    if s < 1.0 || a[1..].iter().any(|&x| x > r * s) {
        return Ok(LemmaCheck::HypothesisUnmet);
    }
    let lhs = m * (a[0] + c * a[1..].iter().map(|&x| x.powf(delta)).sum::<f64>());
    let rhs = c * s.powf(delta);
    Ok(if lhs <= rhs * (1.0 + REL_SLACK) {
        LemmaCheck::Holds
    } else {
        LemmaCheck::Fails
    })
}

/// Checks `a_1^d + .. + a_k^d <= r^(d-1) * s^d` on one instance, under the
/// hypotheses `d >= 1`, `r` in `(0,1)`, `a_i >= 0`, and `a_i <= r*s` for all
/// `i` with `s = sum a_i`.
pub fn convex2_holds(a: &[f64], delta: f64, r: f64) -> Result<LemmaCheck, ParenError> {
    check_finite(a, &[("delta", delta), ("r", r)])?;
    if delta < 1.0 || r <= 0.0 || r >= 1.0 || a.iter().any(|&x| x < 0.0) {
        return Ok(LemmaCheck::HypothesisUnmet);
    }
    let s: f64 = a.iter().sum();
    if a.iter().any(|&x| x > r * s) {
        return Ok(LemmaCheck::HypothesisUnmet);
    }
    let lhs: f64 = a.iter().map(|&x| x.powf(delta)).sum();
    let rhs = r.powf(delta - 1.0) * s.powf(delta);
    Ok(if lhs <= rhs * (1.0 + REL_SLACK) + f64::MIN_POSITIVE {
        LemmaCheck::Holds
    } else {
        LemmaCheck::Fails
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> ParenSeq {
        ParenSeq::new(s).unwrap()
    }

    #[test]
    fn parse_figure_sequence() {
        let m = parse_paren(&seq("(()())()"));
        assert_eq!(m.edges(), &[(1, 6), (2, 3), (4, 5), (7, 8)]);
        assert!(m.is_perfect());
    }

    #[test]
    fn parse_edge_cases() {
        assert_eq!(parse_paren(&seq("")).n(), 0);
        let m = parse_paren(&seq("((()))"));
        assert_eq!(m.nested_order(), Some(3));
        assert_eq!(nested_matching(2).edges(), &[(1, 4), (2, 3)]);
        assert_eq!(nested_matching(3).edges(), &[(1, 6), (2, 5), (3, 4)]);
        assert_eq!(nested_matching(1).edges(), &[(1, 2)]);
    }

    #[test]
    fn unbalanced_errors_name_first_violation() {
        assert_eq!(
            ParenSeq::new(")("),
            Err(ParenError::Unbalanced { index: 1 })
        );
        assert_eq!(
            ParenSeq::new("())("),
            Err(ParenError::Unbalanced { index: 3 })
        );
        assert_eq!(
            ParenSeq::new("(()"),
            Err(ParenError::Unbalanced { index: 1 })
        );
        assert_eq!(
            ParenSeq::new("()("),
            Err(ParenError::Unbalanced { index: 3 })
        );
        assert_eq!(
            ParenSeq::new("(a)"),
            Err(ParenError::BadChar { index: 2, ch: 'a' })
        );
    }

    fn all_balanced(pairs: usize) -> Vec<String> {
        fn rec(open: usize, closed: usize, pairs: usize, cur: &mut String, out: &mut Vec<String>) {
            if cur.len() == 2 * pairs {
                out.push(cur.clone());
                return;
            }
            if open < pairs {
                cur.push('(');
                rec(open + 1, closed, pairs, cur, out);
                cur.pop();
            }
            if closed < open {
                cur.push(')');
                rec(open, closed + 1, pairs, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, 0, pairs, &mut String::new(), &mut out);
        out
    }

    #[test]
    fn round_trips_exhaustive_small() {
        for pairs in 0..=6 {
            for text in all_balanced(pairs) {
                let s = seq(&text);
                let m = parse_paren(&s);
                assert_eq!(render_paren(&m).unwrap(), s);
                let tree = matching_to_tree(&m, 0.5).unwrap();
                assert_eq!(tree.size(), pairs + 1);
                assert_eq!(tree_to_matching(&tree), m);
            }
        }
    }

    #[test]
    fn render_rejects_crossing_and_imperfect() {
        let crossing = OrderedMatching::new(4, vec![(1, 3), (2, 4)]).unwrap();
        assert!(matches!(
            render_paren(&crossing),
            Err(ParenError::Crossing { .. })
        ));
        assert!(matches!(
            matching_to_tree(&crossing, 0.5),
            Err(ParenError::Crossing {
                first: (1, 3),
                second: (2, 4)
            })
        ));
        let partial = OrderedMatching::new(3, vec![(1, 2)]).unwrap();
        assert!(matches!(
            render_paren(&partial),
            Err(ParenError::NotPerfect { vertex: 3 })
        ));
    }

    #[test]
    fn tree_shapes() {
        // fully nested matchings give a path
        for k in 1..=5 {
            let tree = matching_to_tree(&nested_matching(k), 0.9).unwrap();
            assert_eq!(tree.size(), k + 1);
            let mut node = ROOT;
            for _ in 0..k {
                assert_eq!(tree.children(node).len(), 1);
                node = tree.children(node)[0];
            }
            assert!(tree.children(node).is_empty());
        }
        // Figure-1 sequence: root children subtree sizes are 3 and 1
        let m = parse_paren(&seq("(()())()"));
        let tree = matching_to_tree(&m, 0.9).unwrap();
        let sizes: Vec<usize> = tree
            .children(ROOT)
            .iter()
            .map(|&c| tree.size_of(c))
            .collect();
        assert_eq!(sizes, vec![3, 1]);
        // empty matching: a single root
        let tree = matching_to_tree(&OrderedMatching::empty(0), 0.9).unwrap();
        assert_eq!(tree.size(), 1);
        assert_eq!(tree.node_count(), 1);
    }

    #[test]
    fn heavy_labels_and_uniqueness() {
        // sizes along a nested chain are s-1 over s, heavy iff (s-1) >= r*s
        let tree = matching_to_tree(&nested_matching(6), 1.0 - 23f64.powf(-0.5)).unwrap();
        let mut node = ROOT;
        let mut heavy_count_per_parent = Vec::new();
        while !tree.children(node).is_empty() {
            let heavies = tree
                .children(node)
                .iter()
                .filter(|&&c| tree.is_heavy(c))
                .count();
            heavy_count_per_parent.push(heavies);
            node = tree.children(node)[0];
        }
        assert_eq!(heavy_count_per_parent, vec![1, 1, 1, 0, 0, 0]);
    }

    #[test]
    fn heavy_child_unique_when_r_above_half() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let pairs = rng.random_range(1..=10usize);
            let mut text = String::new();
            let mut depth = 0usize;
            let (mut open, mut closed) = (0usize, 0usize);
            while text.len() < 2 * pairs {
                if open < pairs && (depth == 0 || rng.random_bool(0.5)) {
                    text.push('(');
                    open += 1;
                    depth += 1;
                } else if closed < open {
                    text.push(')');
                    closed += 1;
                    depth -= 1;
                }
            }
            let m = parse_paren(&seq(&text));
            let r = rng.random_range(0.51..0.99);
            let tree = matching_to_tree(&m, r).unwrap();
            for id in 0..tree.node_count() {
                let heavies = tree
                    .children(id)
                    .iter()
                    .filter(|&&c| tree.is_heavy(c))
                    .count();
                assert!(heavies <= 1, "r={r} seq={text}");
            }
        }
    }

    #[test]
    fn bound_constants_at_eps_one() {
        let (r, c) = bound_constants(1.0);
        assert!((r - 528.0 / 529.0).abs() < 1e-12);
        assert!((c - 23.0 * 529.0).abs() < 1e-6);
    }

    #[test]
    fn bound_trivial_and_param_errors() {
        let cert = bound_pmatching(&OrderedMatching::empty(0), 1.0).unwrap();
        assert_eq!(cert.case, CertCase::Leaf);
        assert_eq!(cert.bound, 0.0);
        cert.validate().unwrap();
        assert!(matches!(
            bound_pmatching(&nested_matching(1), 0.0),
            Err(ParenError::Parameter(_))
        ));
        assert!(matches!(
            bound_pmatching(&nested_matching(1), -1.0),
            Err(ParenError::Parameter(_))
        ));
    }

    /// Independent recurrence for fully nested matchings at small epsilon:
    /// every edge is light, so t(s) = t(s-1) + 2(s-1) + 1 from t(1) = 0.
    fn nested_light_oracle(k: usize) -> f64 {
        let mut t = 0.0;
        for s in 2..=k + 1 {
            t += 2.0 * (s as f64 - 1.0) + 1.0;
        }
        t
    }

    #[test]
    fn bound_nested_eps_one_golden() {
        let cert = bound_pmatching(&nested_matching(2), 1.0).unwrap();
        assert_eq!(cert.bound, nested_light_oracle(2));
        assert_eq!(cert.bound, 8.0);
        assert_eq!(cert.integer_bound(), 8);
        assert_eq!(cert.case, CertCase::LightRoot);
        cert.validate().unwrap();
        for k in 1..=8 {
            let cert = bound_pmatching(&nested_matching(k), 1.0).unwrap();
            assert_eq!(cert.bound, nested_light_oracle(k), "k={k}");
            cert.validate().unwrap();
        }
    }

    #[test]
    fn bound_figure_sequence() {
        let m = parse_paren(&seq("(()())()"));
        let cert = bound_pmatching(&m, 1.0).unwrap();
        assert_eq!(cert.s, 5);
        // ((M) with M="()()" costs 6+7, trailing "()" costs 3
        assert_eq!(cert.bound, 16.0);
        assert!(cert.bound <= 23.0 * 529.0 * 25.0);
        cert.validate().unwrap();
    }

    #[test]
    fn bound_heavy_cases_at_large_eps() {
        // epsilon = 4 makes r = 1 - 23^(-1/2), small enough that deep chains
        // contain heavy edges at desk scale
        let cert = bound_pmatching(&nested_matching(4), 4.0).unwrap();
        assert_eq!(cert.case, CertCase::HeavyPathB);
        assert_eq!(cert.k_prime, Some(1));
        assert_eq!(cert.bound, 117.0);
        cert.validate().unwrap();

        let cert = bound_pmatching(&nested_matching(6), 4.0).unwrap();
        assert_eq!(cert.case, CertCase::HeavyPathA);
        assert_eq!(cert.bound, 157.0);
        cert.validate().unwrap();
    }

    #[test]
    fn certificates_self_validate_across_corpus() {
        for pairs in 0..=6 {
            for text in all_balanced(pairs) {
                let m = parse_paren(&seq(&text));
                for eps in [0.5, 1.0, 2.0, 4.0] {
                    let cert = bound_pmatching(&m, eps).unwrap();
                    cert.validate()
                        .unwrap_or_else(|e| panic!("{text} eps={eps}: {e}"));
                    // the bound can host the matching itself
                    assert!(cert.bound >= m.n() as f64);
                }
            }
        }
    }

    #[test]
    fn certificate_serializes_with_expected_fields() {
        let cert = bound_pmatching(&nested_matching(4), 4.0).unwrap();
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["case"], "heavy-path-B");
        assert_eq!(json["s"], 5);
        assert_eq!(json["k_prime"], 1);
        assert!(json["children"].is_array());
        assert!(json["constants"]["epsilon"].is_number());
        let light = bound_pmatching(&nested_matching(2), 1.0).unwrap();
        let json = serde_json::to_value(&light).unwrap();
        assert_eq!(json["case"], "light-root");
        assert!(json.get("k_prime").is_none());
    }

    #[test]
    fn convex_examples() {
        // equality configuration of the power-sum bound
        let a = vec![0.25_f64; 4];
        assert_eq!(convex2_holds(&a, 2.0, 0.25).unwrap(), LemmaCheck::Holds);
        // all mass on a_0
        assert_eq!(
            convex1_holds(&[5.0, 0.0, 0.0], 2.0, 1.0, 1.0).unwrap(),
            LemmaCheck::Holds
        );
        // delta = 1 boundary: LHS 2 = r^0 * 2
        assert_eq!(
            convex2_holds(&[1.0, 1.0], 1.0, 0.5).unwrap(),
            LemmaCheck::Holds
        );
    }

    #[test]
    fn convex_hypothesis_and_parameter_handling() {
        assert!(matches!(
            convex1_holds(&[], 2.0, 1.0, 1.0),
            Err(ParenError::Parameter(_))
        ));
        assert!(matches!(
            convex2_holds(&[1.0, f64::NAN], 2.0, 0.5),
            Err(ParenError::Parameter(_))
        ));
        // c < m breaks a hypothesis, not a parameter contract
        assert_eq!(
            convex1_holds(&[1.0, 0.1], 2.0, 2.0, 1.0).unwrap(),
            LemmaCheck::HypothesisUnmet
        );
        // s < 1
        assert_eq!(
            convex1_holds(&[0.1, 0.1], 2.0, 1.0, 1.0).unwrap(),
            LemmaCheck::HypothesisUnmet
        );
        // some a_i > r*s
        assert_eq!(
            convex2_holds(&[0.9, 0.1], 2.0, 0.5).unwrap(),
            LemmaCheck::HypothesisUnmet
        );
    }
}
