//! Constructive embedders: given a host coloring of sufficient size, produce
//! a red copy of the target matching or exhibit a blue triangle / red clique.
//!
//! Edges nest under the strict partial order `(i,j) < (l,m)` iff
//! `l < i < j < m`. A chain of nested red edges is exactly a red copy of a
//! fully nested matching, which makes the chain DP the engine behind every
//! embedder here:
//!
//! - [`embed_nested`]: hosts of size `6k` always yield a blue triangle, a
//!   red clique on a high-blue-degree vertex's neighborhood, or a length-`k`
//!   red chain.
//! - [`embed_surround`]: wraps an inner red copy with one more red edge from
//!   vertex 1, falling back to a red clique in the tail interval.
//! - [`embed_nest_complex`]: splits the host into `X | Y | Z`, embeds the
//!   center part in `Y`, and either walks a long nested `X`-`Z` chain —
//!   skipping ("deleting") chain edges until every gap between consecutive
//!   saved pairs is wide enough for its part — or extracts a red clique from
//!   a blue `X`-`Z` neighborhood.
//! - [`embed_nest_simple`]: the simpler variant that first embeds a full
//!   nested matching and then carves all parts out of its chain.
//! - [`embed_pmatching`]: the top-level recursion over the matching's tree,
//!   surrounding light children and delegating heavy paths to
//!   [`embed_nest_complex`], sized throughout by [`bound_pmatching`]
//!   certificates.
//!
//! Every outcome re-validates against the host; nothing below trusts a
//! sub-embedder without checking its answer.

use crate::graph::{
    find_blue_triangle, Color, EmbeddingWitness, OrderedColoring, OrderedGraph, OrderedMatching,
};
use crate::paren::{
    bound_constants, bound_pmatching, decompose, matching_to_tree, surround_matching,
    BoundCertificate, NodeDecomp, ParenError, ParenTree, ROOT,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("host too small: need {needed} vertices, have {have}")]
    Size { needed: usize, have: usize },
    #[error("bad budget: {0}")]
    BadBudget(String),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error(transparent)]
    Paren(#[from] ParenError),
}

/// A chain of red edges listed innermost first; consecutive entries
/// `(i,j), (l,m)` satisfy `l < i < j < m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestChain {
    edges: Vec<(u32, u32)>,
}

impl NestChain {
    pub fn new(edges: Vec<(u32, u32)>) -> Result<Self, EmbedError> {
        for w in edges.windows(2) {
            let ((i, j), (l, m)) = (w[0], w[1]);
            if !(l < i && i < j && j < m) {
                return Err(EmbedError::ContractViolation(format!(
                    "({i},{j}) then ({l},{m}) is not a nesting step"
                )));
            }
        }
        Ok(NestChain { edges })
    }

    /// Edges innermost first.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[inline]
fn nested_in(inner: (u32, u32), outer: (u32, u32)) -> bool {
    outer.0 < inner.0 && inner.1 < outer.1
}

/// Length of the longest nested chain, by patience sorting: sort by left
/// endpoint descending and take the longest strictly increasing subsequence
/// of right endpoints. `O(E log E)`.
pub fn nested_chain_length(edges: &[(u32, u32)]) -> usize {
    let mut sorted: Vec<(u32, u32)> = edges.to_vec();
    // ties on the left endpoint keep rights descending so that no two edges
    // sharing a left endpoint can both enter an increasing run
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut tails: Vec<u32> = Vec::new();
    for (_, right) in sorted {
        let pos = tails.partition_point(|&t| t < right);
        if pos == tails.len() {
            tails.push(right);
        } else {
            tails[pos] = right;
        }
    }
    tails.len()
}

/// A maximum-length nested chain; among those, the one whose edge list
/// (innermost first) is lexicographically least. `O(E^2)`.
pub fn longest_nested_chain(edges: &[(u32, u32)]) -> NestChain {
    if edges.is_empty() {
        return NestChain { edges: Vec::new() };
    }
    // out[e] = longest chain whose innermost edge is e, growing outward
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_unstable_by_key(|&e| std::cmp::Reverse(edges[e].1 - edges[e].0));
    let mut out = vec![1usize; edges.len()];
    for &e in &order {
        let best = order
            .iter()
            .take_while(|&&g| g != e)
            .filter(|&&g| nested_in(edges[e], edges[g]))
            .map(|&g| out[g])
            .max();
        // containers have strictly larger span, so all are already final
        if let Some(b) = best {
            out[e] = b + 1;
        }
    }
    let target = *out.iter().max().unwrap();
    let mut chain = Vec::with_capacity(target);
    let mut need = target;
    let mut prev: Option<(u32, u32)> = None;
    while need > 0 {
        let next = (0..edges.len())
            .filter(|&e| out[e] == need && prev.is_none_or(|p| nested_in(p, edges[e])))
            .map(|e| edges[e])
            .min()
            .expect("a chain of the computed length exists");
        chain.push(next);
        prev = Some(next);
        need -= 1;
    }
    NestChain { edges: chain }
}

/// Mirsky decomposition: partitions edges into antichains by the length of
/// the longest chain ending (outermost) at each edge. The class count equals
/// the maximum chain length.
pub fn antichain_decomposition(edges: &[(u32, u32)]) -> Vec<Vec<(u32, u32)>> {
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_unstable_by_key(|&e| edges[e].1 - edges[e].0);
    let mut height = vec![1usize; edges.len()];
    for idx in 0..order.len() {
        let e = order[idx];
        let best = order[..idx]
            .iter()
            .filter(|&&g| nested_in(edges[g], edges[e]))
            .map(|&g| height[g])
            .max();
        if let Some(b) = best {
            height[e] = b + 1;
        }
    }
    let classes = height.iter().copied().max().unwrap_or(0);
    let mut out = vec![Vec::new(); classes];
    for e in 0..edges.len() {
        out[height[e] - 1].push(edges[e]);
    }
    out
}

/// What an embedder found in the host.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum EmbedOutcome {
    BlueTriangle { triangle: (u32, u32, u32) },
    RedCopy { witness: EmbeddingWitness },
    RedClique { vertices: Vec<u32> },
}

impl EmbedOutcome {
    /// Re-validates the carried structure against the host coloring: the
    /// triangle must be blue, a clique strictly increasing and pairwise red,
    /// and a red copy a valid witness of `expected` when one is given.
    pub fn validate(
        &self,
        host: &OrderedColoring,
        expected: Option<&OrderedGraph>,
    ) -> Result<(), String> {
        match self {
            EmbedOutcome::BlueTriangle {
                triangle: (i, j, k),
            } => {
                if !(i < j && j < k && *k as usize <= host.n()) {
                    return Err(format!("triangle ({i},{j},{k}) is not increasing in range"));
                }
                for (a, b) in [(i, j), (i, k), (j, k)] {
                    if host.color(*a, *b) != Color::Blue {
                        return Err(format!("triangle pair ({a},{b}) is not blue"));
                    }
                }
                Ok(())
            }
            EmbedOutcome::RedCopy { witness } => {
                if witness.color != Color::Red {
                    return Err("red copy carries the wrong color".into());
                }
                match expected {
                    Some(g) => witness.validate(host, g),
                    None => {
                        for w in witness.map.windows(2) {
                            if w[0] >= w[1] {
                                return Err("witness map not increasing".into());
                            }
                        }
                        Ok(())
                    }
                }
            }
            EmbedOutcome::RedClique { vertices } => {
                for w in vertices.windows(2) {
                    if w[0] >= w[1] {
                        return Err("clique vertices not strictly increasing".into());
                    }
                }
                if let Some(&last) = vertices.last() {
                    if last as usize > host.n() {
                        return Err("clique vertex out of range".into());
                    }
                }
                for a in 0..vertices.len() {
                    for b in a + 1..vertices.len() {
                        if host.color(vertices[a], vertices[b]) != Color::Red {
                            return Err(format!(
                                "clique pair ({},{}) is not red",
                                vertices[a], vertices[b]
                            ));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    fn shift(self, offset: u32) -> EmbedOutcome {
        match self {
            EmbedOutcome::BlueTriangle {
                triangle: (i, j, k),
            } => EmbedOutcome::BlueTriangle {
                triangle: (i + offset, j + offset, k + offset),
            },
            EmbedOutcome::RedCopy { mut witness } => {
                for v in &mut witness.map {
                    *v += offset;
                }
                EmbedOutcome::RedCopy { witness }
            }
            EmbedOutcome::RedClique { mut vertices } => {
                for v in &mut vertices {
                    *v += offset;
                }
                EmbedOutcome::RedClique { vertices }
            }
        }
    }
}

/// Either a blue triangle (host coordinates) or a red witness of a pattern.
enum RedOrBlue {
    Blue((u32, u32, u32)),
    Red(EmbeddingWitness),
}

/// Checks a sub-embedder's outcome against the sub-host and expected pattern,
/// converting an oversized clique into a red copy. A wrong answer is a
/// contract violation: the caller guaranteed the budget.
fn normalize(
    outcome: EmbedOutcome,
    sub: &OrderedColoring,
    pattern: &OrderedGraph,
) -> Result<RedOrBlue, EmbedError> {
    outcome
        .validate(sub, Some(pattern))
        .map_err(|e| EmbedError::ContractViolation(format!("sub-embedder outcome invalid: {e}")))?;
    match outcome {
        EmbedOutcome::BlueTriangle { triangle } => Ok(RedOrBlue::Blue(triangle)),
        EmbedOutcome::RedCopy { witness } => Ok(RedOrBlue::Red(witness)),
        EmbedOutcome::RedClique { vertices } => {
            if vertices.len() < pattern.n() {
                return Err(EmbedError::ContractViolation(format!(
                    "red clique of size {} cannot hold a pattern on {} vertices",
                    vertices.len(),
                    pattern.n()
                )));
            }
            Ok(RedOrBlue::Red(EmbeddingWitness::new(
                vertices[..pattern.n()].to_vec(),
                Color::Red,
            )))
        }
    }
}

/// Embeds the fully nested matching `NM_k`: returns a blue triangle, a red
/// clique of size at least `2k`, or a red copy of `NM_k`. Total on every
/// host with at least `6k` vertices.
pub fn embed_nested(c: &OrderedColoring, k: usize) -> Result<EmbedOutcome, EmbedError> {
    if k == 0 {
        return Ok(EmbedOutcome::RedCopy {
            witness: EmbeddingWitness::new(Vec::new(), Color::Red),
        });
    }
    if c.n() < 6 * k {
        return Err(EmbedError::Size {
            needed: 6 * k,
            have: c.n(),
        });
    }
    if let Some((i, j, t)) = find_blue_triangle(c) {
        return Ok(EmbedOutcome::BlueTriangle {
            triangle: (i, j, t),
        });
    }
    let (v, d) = crate::graph::max_blue_degree(c, None);
    if d >= 2 * k {
        // triangle-free, so the blue neighborhood is pairwise red
        return Ok(EmbedOutcome::RedClique {
            vertices: c.blue_neighbors(v, None),
        });
    }
    let chain = longest_nested_chain(&c.edges_of(Color::Red));
    if chain.len() < k {
        return Err(EmbedError::ContractViolation(format!(
            "no blue triangle, max blue degree {d} < {}, yet longest red chain {} < {k} \
             on {} vertices",
            2 * k,
            chain.len(),
            c.n()
        )));
    }
    Ok(EmbedOutcome::RedCopy {
        witness: nested_witness(&chain.edges()[..k]),
    })
}

/// Witness of `NM_k` from `k` chain edges listed innermost first.
fn nested_witness(chain_inner_first: &[(u32, u32)]) -> EmbeddingWitness {
    let k = chain_inner_first.len();
    let mut map = Vec::with_capacity(2 * k);
    for t in (0..k).rev() {
        map.push(chain_inner_first[t].0);
    }
    for e in chain_inner_first {
        map.push(e.1);
    }
    EmbeddingWitness::new(map, Color::Red)
}

/// Embeds `(inner)`: a red copy of `inner` in `{2,..,t+1}` wrapped by a red
/// edge from vertex 1 into the tail, the tail itself being a red clique when
/// no such edge exists.
///
/// With `c.n >= t + inner.n + 3` (the full budget) the outcome is always a
/// blue triangle or a red copy of `(inner)`. Below budget the embedder still
/// proceeds opportunistically and may return a smaller red clique instead.
pub fn embed_surround(
    c: &OrderedColoring,
    inner: &OrderedMatching,
    inner_budget: usize,
    inner_embedder: &mut dyn FnMut(&OrderedColoring) -> Result<EmbedOutcome, EmbedError>,
) -> Result<EmbedOutcome, EmbedError> {
    let t = inner_budget;
    if t < inner.n() {
        return Err(EmbedError::BadBudget(format!(
            "budget {t} below the {} vertices of the inner matching",
            inner.n()
        )));
    }
    let wrapped = surround_matching(inner);
    if c.n() < t + 1 {
        return Err(EmbedError::Size {
            needed: t + wrapped.n() + 1,
            have: c.n(),
        });
    }
    let inner_witness = if inner.n() == 0 {
        EmbeddingWitness::new(Vec::new(), Color::Red)
    } else {
        let sub = c.restrict(2, t as u32 + 1);
        match inner_embedder(&sub) {
            Err(EmbedError::Size { .. }) => {
                return Err(EmbedError::ContractViolation(
                    "inner embedder rejected its guaranteed budget".into(),
                ))
            }
            Err(e) => return Err(e),
            Ok(out) => match normalize(out, &sub, inner.graph())? {
                RedOrBlue::Blue((i, j, k)) => {
                    return Ok(EmbedOutcome::BlueTriangle {
                        triangle: (i + 1, j + 1, k + 1),
                    })
                }
                RedOrBlue::Red(mut w) => {
                    for v in &mut w.map {
                        *v += 1;
                    }
                    w
                }
            },
        }
    };
    // wrap with the first red edge from vertex 1 into the tail
    for z in t as u32 + 2..=c.n() as u32 {
        if c.color(1, z) == Color::Red {
            let mut map = Vec::with_capacity(wrapped.n());
            map.push(1);
            map.extend_from_slice(&inner_witness.map);
            map.push(z);
            return Ok(EmbedOutcome::RedCopy {
                witness: EmbeddingWitness::new(map, Color::Red),
            });
        }
    }
    // every tail edge from 1 is blue: a blue pair inside the tail closes a
    // triangle with vertex 1, otherwise the tail is a red clique
    let tail: Vec<u32> = (t as u32 + 2..=c.n() as u32).collect();
    let take = tail.len().min(wrapped.n());
    for a in 0..take {
        for b in a + 1..take {
            if c.color(tail[a], tail[b]) == Color::Blue {
                return Ok(EmbedOutcome::BlueTriangle {
                    triangle: (1, tail[a], tail[b]),
                });
            }
        }
    }
    if tail.len() >= wrapped.n() {
        let map = tail[..wrapped.n()].to_vec();
        return Ok(EmbedOutcome::RedCopy {
            witness: EmbeddingWitness::new(map, Color::Red),
        });
    }
    Ok(EmbedOutcome::RedClique {
        vertices: tail[..take].to_vec(),
    })
}

/// One slot of a nested decomposition: the matching to embed and the host
/// size its embedder is guaranteed to succeed at.
#[derive(Debug, Clone)]
pub struct NestPart {
    pub matching: OrderedMatching,
    pub budget: usize,
}

impl NestPart {
    pub fn new(matching: OrderedMatching, budget: usize) -> Self {
        NestPart { matching, budget }
    }
}

pub(crate) enum LayoutItem {
    Open(usize),
    Close(usize),
    Part(usize, u32),
}

/// The matching `(A_1(A_2(..(A_k)..)A_{2k-2})A_{2k-1})` for an odd list of
/// parts, plus the position layout used to assemble witnesses.
pub(crate) fn nest_layout(parts: &[NestPart]) -> (OrderedMatching, Vec<LayoutItem>) {
    let k = parts.len().div_ceil(2);
    let mut items = Vec::new();
    let put_part = |items: &mut Vec<LayoutItem>, i: usize| {
        for local in 1..=parts[i].matching.n() as u32 {
            items.push(LayoutItem::Part(i, local));
        }
    };
    for j in 1..=k {
        items.push(LayoutItem::Open(j));
        if j < k {
            put_part(&mut items, j - 1);
        }
    }
    put_part(&mut items, k - 1);
    items.push(LayoutItem::Close(k));
    for j in (1..k).rev() {
        put_part(&mut items, 2 * k - j - 1);
        items.push(LayoutItem::Close(j));
    }
    // positions the layout assigns to each pair and part vertex
    let mut open_pos = vec![0u32; k + 1];
    let mut part_start = vec![0u32; parts.len()];
    let mut edges = Vec::new();
    for (idx0, item) in items.iter().enumerate() {
        let pos = idx0 as u32 + 1;
        match *item {
            LayoutItem::Open(j) => open_pos[j] = pos,
            LayoutItem::Close(j) => edges.push((open_pos[j], pos)),
            LayoutItem::Part(i, local) => {
                if local == 1 {
                    part_start[i] = pos - 1;
                }
            }
        }
    }
    for (i, part) in parts.iter().enumerate() {
        for &(a, b) in part.matching.edges() {
            edges.push((a + part_start[i], b + part_start[i]));
        }
    }
    let n = items.len();
    (
        OrderedMatching::new(n, edges).expect("layout is a matching"),
        items,
    )
}

/// The composed matching a nested decomposition embeds.
pub fn compose_nest_parts(parts: &[NestPart]) -> OrderedMatching {
    nest_layout(parts).0
}

fn check_parts(parts: &[NestPart]) -> Result<usize, EmbedError> {
    if parts.len().is_multiple_of(2) || parts.is_empty() {
        return Err(EmbedError::BadBudget(format!(
            "part list must have odd length 2k-1, got {}",
            parts.len()
        )));
    }
    for (i, p) in parts.iter().enumerate() {
        if p.budget < p.matching.n() {
            return Err(EmbedError::BadBudget(format!(
                "part {i} has budget {} below its {} vertices",
                p.budget,
                p.matching.n()
            )));
        }
    }
    Ok(parts.len().div_ceil(2))
}

/// Walks a nested chain (innermost first) outward, saving one edge per
/// nesting level and skipping edges until the gap between consecutive saved
/// pairs is wide enough on both sides for the parts it must hold. Every
/// skipped edge widens both pending gaps by at least one vertex, so a chain
/// of length `k + sum(non-center budgets)` always suffices.
fn saved_pairs_walk(
    chain: &[(u32, u32)],
    parts: &[NestPart],
    k: usize,
    start: usize,
) -> Result<Vec<(u32, u32)>, EmbedError> {
    let mut saved = vec![chain[start]];
    let mut cursor = start + 1;
    for step in 1..k {
        let left_need = parts[k - 1 - step].budget;
        let right_need = parts[k - 1 + step].budget;
        loop {
            let cand = *chain.get(cursor).ok_or_else(|| {
                EmbedError::ContractViolation("nesting chain exhausted during the walk".into())
            })?;
            cursor += 1;
            let last = *saved.last().unwrap();
            let left_gap = (last.0 - cand.0 - 1) as usize;
            let right_gap = (cand.1 - last.1 - 1) as usize;
            if left_gap >= left_need && right_gap >= right_need {
                saved.push(cand);
                break;
            }
        }
    }
    Ok(saved)
}

/// Embeds the non-center parts into the gaps between saved pairs and stitches
/// the full composed witness together.
fn embed_parts_and_assemble(
    c: &OrderedColoring,
    parts: &[NestPart],
    saved: &[(u32, u32)],
    center_witness: EmbeddingWitness,
    part_embedder: &mut dyn FnMut(usize, &OrderedColoring) -> Result<EmbedOutcome, EmbedError>,
) -> Result<EmbedOutcome, EmbedError> {
    let k = saved.len();
    let mut witnesses: Vec<Option<EmbeddingWitness>> = vec![None; parts.len()];
    witnesses[k - 1] = Some(center_witness);
    for step in 1..k {
        let slots = [
            (k - 1 - step, saved[step].0 + 1, saved[step - 1].0 - 1),
            (k - 1 + step, saved[step - 1].1 + 1, saved[step].1 - 1),
        ];
        for (idx, lo, hi) in slots {
            if parts[idx].matching.n() == 0 {
                witnesses[idx] = Some(EmbeddingWitness::new(Vec::new(), Color::Red));
                continue;
            }
            let sub = c.restrict(lo, hi);
            debug_assert!(sub.n() >= parts[idx].budget);
            match normalize(part_embedder(idx, &sub)?, &sub, parts[idx].matching.graph())? {
                RedOrBlue::Blue(t) => {
                    return Ok(EmbedOutcome::BlueTriangle { triangle: t }.shift(lo - 1))
                }
                RedOrBlue::Red(mut w) => {
                    for v in &mut w.map {
                        *v += lo - 1;
                    }
                    witnesses[idx] = Some(w);
                }
            }
        }
    }
    let (composed, layout) = nest_layout(parts);
    let mut map = Vec::with_capacity(composed.n());
    for item in &layout {
        match *item {
            LayoutItem::Open(j) => map.push(saved[k - j].0),
            LayoutItem::Close(j) => map.push(saved[k - j].1),
            LayoutItem::Part(i, local) => {
                map.push(witnesses[i].as_ref().unwrap().map[local as usize - 1])
            }
        }
    }
    let witness = EmbeddingWitness::new(map, Color::Red);
    debug_assert!(witness.validate(c, composed.graph()).is_ok());
    Ok(EmbedOutcome::RedCopy { witness })
}

/// Embeds `(A_1(..(A_k)..)A_{2k-1})` into a host of size at least
/// `t + 20(k + l + |A_k|)`, where `t` is the center budget, `l` the sum of
/// the other budgets, and `|A_k|` the center's edge count.
///
/// The host splits into `X | Y | Z` with `|X| = |Z| = 10(k+l+|A_k|)`. The
/// center embeds in `Y`. A nested chain of `k+l` red `X`-`Z` edges feeds the
/// saving/deletion walk; otherwise counting forces a vertex of `X` with
/// `8(k+l+|A_k|)` blue edges into `Z`, whose blue neighborhood is a red
/// clique large enough for the whole composed matching (or yields a blue
/// triangle outright).
pub fn embed_nest_complex(
    c: &OrderedColoring,
    parts: &[NestPart],
    part_embedder: &mut dyn FnMut(usize, &OrderedColoring) -> Result<EmbedOutcome, EmbedError>,
) -> Result<EmbedOutcome, EmbedError> {
    let k = check_parts(parts)?;
    let center = &parts[k - 1];
    let t = center.budget;
    let l: usize = parts
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != k - 1)
        .map(|(_, p)| p.budget)
        .sum();
    let mk = center.matching.edge_count();
    let q = k + l + mk;
    let needed = t + 20 * q;
    if c.n() < needed {
        return Err(EmbedError::Size {
            needed,
            have: c.n(),
        });
    }
    let x_hi = 10 * q as u32;
    let y_lo = x_hi + 1;
    let y_hi = x_hi + t as u32;
    let z_lo = y_hi + 1;
    let z_hi = y_hi + 10 * q as u32;

    let mut xz_red = Vec::new();
    for x in 1..=x_hi {
        for z in z_lo..=z_hi {
            if c.color(x, z) == Color::Red {
                xz_red.push((x, z));
            }
        }
    }
    let chain = longest_nested_chain(&xz_red);
    if chain.len() >= k + l {
        let center_witness = if center.matching.n() == 0 {
            EmbeddingWitness::new(Vec::new(), Color::Red)
        } else {
            let sub = c.restrict(y_lo, y_hi);
            match normalize(part_embedder(k - 1, &sub)?, &sub, center.matching.graph())? {
                RedOrBlue::Blue(tri) => {
                    return Ok(EmbedOutcome::BlueTriangle { triangle: tri }.shift(y_lo - 1))
                }
                RedOrBlue::Red(mut w) => {
                    for v in &mut w.map {
                        *v += y_lo - 1;
                    }
                    w
                }
            }
        };
        // every X-Z edge spans Y, so the innermost chain edge already
        // surrounds the center copy
        let saved = saved_pairs_walk(chain.edges(), parts, k, 0)?;
        return embed_parts_and_assemble(c, parts, &saved, center_witness, part_embedder);
    }

    // short chain: the red X-Z edges split into fewer than k+l antichains of
    // size at most |X|+|Z|, so blue X-Z edges are plentiful
    let mut best = (0u32, 0usize);
    for v in 1..=x_hi {
        let d = c.blue_degree(v, Some((z_lo, z_hi)));
        if d > best.1 {
            best = (v, d);
        }
    }
    let (v, d) = best;
    if d < 8 * q {
        return Err(EmbedError::ContractViolation(format!(
            "chain {} < {} yet max blue X-Z degree {d} < {}",
            chain.len(),
            k + l,
            8 * q
        )));
    }
    let nbrs = c.blue_neighbors(v, Some((z_lo, z_hi)));
    for a in 0..nbrs.len() {
        for b in a + 1..nbrs.len() {
            if c.color(nbrs[a], nbrs[b]) == Color::Blue {
                return Ok(EmbedOutcome::BlueTriangle {
                    triangle: (v, nbrs[a], nbrs[b]),
                });
            }
        }
    }
    let composed = compose_nest_parts(parts);
    if composed.n() > nbrs.len() {
        return Err(EmbedError::ContractViolation(format!(
            "composed matching on {} vertices exceeds the red clique of size {}",
            composed.n(),
            nbrs.len()
        )));
    }
    Ok(EmbedOutcome::RedCopy {
        witness: EmbeddingWitness::new(nbrs[..composed.n()].to_vec(), Color::Red),
    })
}

/// The simpler nesting embedder: finds a red copy of the nested matching
/// `NM_{k+t}` first (with `t = sum_i max(budget_i, budget_{2k-i})`), then
/// deletes chain edges innermost-outward until each part fits. Needs
/// `6(k+t)` vertices.
pub fn embed_nest_simple(
    c: &OrderedColoring,
    parts: &[NestPart],
    part_embedder: &mut dyn FnMut(usize, &OrderedColoring) -> Result<EmbedOutcome, EmbedError>,
) -> Result<EmbedOutcome, EmbedError> {
    let k = check_parts(parts)?;
    let t_sum: usize = (0..k - 1)
        .map(|i| parts[i].budget.max(parts[2 * k - 2 - i].budget))
        .sum::<usize>()
        + parts[k - 1].budget;
    let order = k + t_sum;
    let needed = 6 * order;
    if c.n() < needed {
        return Err(EmbedError::Size {
            needed,
            have: c.n(),
        });
    }
    let composed = compose_nest_parts(parts);
    let chain: Vec<(u32, u32)> = match embed_nested(c, order)? {
        EmbedOutcome::BlueTriangle { triangle } => {
            return Ok(EmbedOutcome::BlueTriangle { triangle })
        }
        EmbedOutcome::RedClique { vertices } => {
            if vertices.len() < composed.n() {
                return Err(EmbedError::ContractViolation(format!(
                    "clique of {} cannot hold the composed matching on {}",
                    vertices.len(),
                    composed.n()
                )));
            }
            return Ok(EmbedOutcome::RedCopy {
                witness: EmbeddingWitness::new(vertices[..composed.n()].to_vec(), Color::Red),
            });
        }
        EmbedOutcome::RedCopy { witness } => {
            let m = witness.map;
            (0..order)
                .map(|i| (m[order - 1 - i], m[order + i]))
                .collect()
        }
    };
    // delete innermost edges until the interior holds the center
    let center = &parts[k - 1];
    let mut start = 0;
    while (chain[start].1 - chain[start].0 - 1) < center.budget as u32 {
        start += 1;
        if start >= chain.len() {
            return Err(EmbedError::ContractViolation(
                "chain exhausted while widening the center interior".into(),
            ));
        }
    }
    let center_witness = if center.matching.n() == 0 {
        EmbeddingWitness::new(Vec::new(), Color::Red)
    } else {
        let (lo, hi) = (chain[start].0 + 1, chain[start].1 - 1);
        let sub = c.restrict(lo, hi);
        match normalize(part_embedder(k - 1, &sub)?, &sub, center.matching.graph())? {
            RedOrBlue::Blue(tri) => {
                return Ok(EmbedOutcome::BlueTriangle { triangle: tri }.shift(lo - 1))
            }
            RedOrBlue::Red(mut w) => {
                for v in &mut w.map {
                    *v += lo - 1;
                }
                w
            }
        }
    };
    let saved = saved_pairs_walk(&chain, parts, k, start)?;
    embed_parts_and_assemble(c, parts, &saved, center_witness, part_embedder)
}

/// Top-level constructive embedder for a non-crossing matching `m`, sized by
/// its bound certificate: light roots embed children left-to-right in
/// disjoint intervals via [`embed_surround`]; a root with an r-heavy child
/// delegates to [`embed_nest_complex`] along the maximal heavy path.
pub fn embed_pmatching(
    c: &OrderedColoring,
    m: &OrderedMatching,
    epsilon: f64,
) -> Result<EmbedOutcome, EmbedError> {
    let cert = bound_pmatching(m, epsilon)?;
    let needed = cert.integer_bound() as usize;
    if c.n() < needed {
        return Err(EmbedError::Size {
            needed,
            have: c.n(),
        });
    }
    let (r, _) = bound_constants(epsilon);
    let tree = matching_to_tree(m, r)?;
    embed_node(c, &tree, ROOT, &cert)
}

fn as_width(bound: f64) -> usize {
    let w = bound.round();
    debug_assert!((bound - w).abs() < 1e-6, "certificate bounds are integral");
    w as usize
}

/// Embeds the interior matching of `node` into `c`, which the caller sized
/// to at least the node's certificate bound.
fn embed_node(
    c: &OrderedColoring,
    tree: &ParenTree,
    node: usize,
    cert: &BoundCertificate,
) -> Result<EmbedOutcome, EmbedError> {
    match decompose(tree, node) {
        NodeDecomp::Leaf => Ok(EmbedOutcome::RedCopy {
            witness: EmbeddingWitness::new(Vec::new(), Color::Red),
        }),
        NodeDecomp::Light { children } => {
            let mut map = Vec::new();
            let mut off = 0u32;
            for (child, ccert) in children.iter().zip(&cert.children) {
                let width = as_width(ccert.bound) + 2 * ccert.s + 1;
                let sub = c.restrict(off + 1, off + width as u32);
                let inner = tree.interior_matching(*child);
                let mut inner_embedder = |s: &OrderedColoring| embed_node(s, tree, *child, ccert);
                let out = embed_surround(&sub, &inner, as_width(ccert.bound), &mut inner_embedder)?;
                match normalize(out, &sub, surround_matching(&inner).graph())? {
                    RedOrBlue::Blue(t) => {
                        return Ok(EmbedOutcome::BlueTriangle { triangle: t }.shift(off))
                    }
                    RedOrBlue::Red(w) => map.extend(w.map.iter().map(|v| v + off)),
                }
                off += width as u32;
            }
            Ok(EmbedOutcome::RedCopy {
                witness: EmbeddingWitness::new(map, Color::Red),
            })
        }
        NodeDecomp::Heavy { path, center, side } => {
            embed_heavy(c, tree, cert, &path, &center, &side)
        }
    }
}

/// Branch slots of a heavy node's certificate, in the order `cert_for`
/// lists them: center branches first, then side branches by level.
fn heavy_branch_certs<'a>(
    cert: &'a BoundCertificate,
    center: &[usize],
    side: &[(Vec<usize>, Vec<usize>)],
) -> Vec<(usize, &'a BoundCertificate)> {
    let ids: Vec<usize> = center
        .iter()
        .copied()
        .chain(
            side.iter()
                .flat_map(|(l, r)| l.iter().chain(r.iter()).copied()),
        )
        .collect();
    ids.into_iter().zip(cert.children.iter()).collect()
}

fn embed_heavy(
    c: &OrderedColoring,
    tree: &ParenTree,
    cert: &BoundCertificate,
    path: &[usize],
    center: &[usize],
    side: &[(Vec<usize>, Vec<usize>)],
) -> Result<EmbedOutcome, EmbedError> {
    let branch_cert: std::collections::HashMap<usize, &BoundCertificate> =
        heavy_branch_certs(cert, center, side).into_iter().collect();
    let slot_width = |b: usize| as_width(branch_cert[&b].bound) + 3 * tree.size_of(b);

    // the nested block embeds the whole bracket of path[1]; the root's own
    // side branches concatenate around it
    let d = path.len() - 1;
    let mut slots: Vec<Vec<usize>> = Vec::with_capacity(2 * d - 1);
    for (left, _) in &side[1..] {
        slots.push(left.clone());
    }
    slots.push(center.to_vec());
    for (_, right) in side[1..].iter().rev() {
        slots.push(right.clone());
    }
    let parts: Vec<NestPart> = slots
        .iter()
        .map(|branches| {
            let mats: Vec<OrderedMatching> = branches
                .iter()
                .map(|&b| surround_matching(&tree.interior_matching(b)))
                .collect();
            let refs: Vec<&OrderedMatching> = mats.iter().collect();
            let budget = branches.iter().map(|&b| slot_width(b)).sum();
            NestPart::new(crate::paren::concat_matchings(&refs), budget)
        })
        .collect();
    let center_idx = d - 1;
    let l_sum: usize = parts
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != center_idx)
        .map(|(_, p)| p.budget)
        .sum();
    let nest_needed =
        parts[center_idx].budget + 20 * (d + l_sum + parts[center_idx].matching.edge_count());

    // segment layout at this level: left root branches, nest block, right
    let mut segments: Vec<(Option<usize>, usize)> = Vec::new(); // (branch id, width)
    for &b in &side[0].0 {
        segments.push((Some(b), slot_width(b)));
    }
    segments.push((None, nest_needed));
    for &b in &side[0].1 {
        segments.push((Some(b), slot_width(b)));
    }
    let total: usize = segments.iter().map(|(_, w)| w).sum();
    if total > c.n() {
        return Err(EmbedError::ContractViolation(format!(
            "segment widths {total} exceed host size {}",
            c.n()
        )));
    }

    let embed_slot = |slot: &[usize], sub: &OrderedColoring| -> Result<EmbedOutcome, EmbedError> {
        // consecutive surrounds inside the slot interval
        let mut map = Vec::new();
        let mut off = 0u32;
        for &b in slot {
            let width = slot_width(b);
            let inner = tree.interior_matching(b);
            let bsub = sub.restrict(off + 1, off + width as u32);
            let mut inner_embedder = |s: &OrderedColoring| embed_node(s, tree, b, branch_cert[&b]);
            let out = embed_surround(
                &bsub,
                &inner,
                as_width(branch_cert[&b].bound),
                &mut inner_embedder,
            )?;
            match normalize(out, &bsub, surround_matching(&inner).graph())? {
                RedOrBlue::Blue(t) => {
                    let (i, j, k) = t;
                    return Ok(EmbedOutcome::BlueTriangle {
                        triangle: (i + off, j + off, k + off),
                    });
                }
                RedOrBlue::Red(w) => map.extend(w.map.iter().map(|v| v + off)),
            }
            off += width as u32;
        }
        Ok(EmbedOutcome::RedCopy {
            witness: EmbeddingWitness::new(map, Color::Red),
        })
    };

    let mut map = Vec::new();
    let mut off = 0u32;
    for (branch, width) in segments {
        let sub = c.restrict(off + 1, off + width as u32);
        let out = match branch {
            Some(b) => embed_slot(std::slice::from_ref(&b), &sub)?,
            None => {
                let mut part_embedder =
                    |idx: usize, s: &OrderedColoring| embed_slot(&slots[idx], s);
                embed_nest_complex(&sub, &parts, &mut part_embedder)?
            }
        };
        let pattern = match branch {
            Some(b) => surround_matching(&tree.interior_matching(b)),
            None => compose_nest_parts(&parts),
        };
        match normalize(out, &sub, pattern.graph())? {
            RedOrBlue::Blue(t) => return Ok(EmbedOutcome::BlueTriangle { triangle: t }.shift(off)),
            RedOrBlue::Red(w) => map.extend(w.map.iter().map(|v| v + off)),
        }
        off += width as u32;
    }
    Ok(EmbedOutcome::RedCopy {
        witness: EmbeddingWitness::new(map, Color::Red),
    })
}
