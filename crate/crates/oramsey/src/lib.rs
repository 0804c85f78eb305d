//! Ordered Ramsey machinery for matchings versus triangles.
//!
//! An ordered graph lives on the linearly ordered vertex set `[n] = {1,..,n}`
//! and embeddings must preserve that order. This crate provides:
//!
//! - [`graph`]: ordered graphs, matchings, red/blue colorings of the ordered
//!   complete graph, and order-preserving containment with witnesses;
//! - [`paren`]: the bijections between non-crossing ("parenthesis") matchings,
//!   balanced parenthesis sequences, and ordered rooted trees, plus the
//!   certified upper-bound calculator for `r_<(M, K3)` on non-crossing `M`;
//! - [`embed`]: constructive embedders that, given a large enough host
//!   coloring, actually produce a red copy of the target matching (or exhibit
//!   a blue triangle / red clique);
//! - [`perm`]: corresponding permutations of interval-chromatic-2 matchings,
//!   exact-pattern containment, ordered intersection (permutation LCS),
//!   shift-compatible ordering counts, and seeded Monte Carlo tail sampling;
//! - [`search`]: exact small-case ordered Ramsey computation by pruned
//!   backtracking, the two-red-cliques lower-bound construction, and the
//!   `r_<(NM_k, K3)` sweep.
//!
//! Vertices are 1-based throughout, matching the usual `[n]` convention, and
//! all serialized formats are 1-based as well.

pub mod embed;
pub mod graph;
pub mod paren;
pub mod perm;
pub mod search;

pub use graph::{
    contains_ordered, find_blue_triangle, max_blue_degree, Color, EmbeddingWitness, GraphError,
    OrderedColoring, OrderedGraph, OrderedMatching,
};
