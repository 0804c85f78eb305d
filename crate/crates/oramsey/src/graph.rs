//! Ordered graphs, matchings, and red/blue colorings of the ordered complete
//! graph, together with order-preserving containment.
//!
//! Vertices are the integers `1..=n`. An edge is a pair `(i, j)` with
//! `i < j`. A coloring stores one bit per pair (blue = 1); red is implicitly
//! the complement, so complement queries are bit flips. All types are
//! immutable after construction and freely shareable across threads.

use serde::Serialize;
use thiserror::Error;

/// Edge color of a two-colored ordered complete graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn flip(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: u32, n: usize },
    #[error("edge ({i},{j}) violates i < j")]
    UnorderedPair { i: u32, j: u32 },
    #[error("duplicate edge ({i},{j})")]
    DuplicateEdge { i: u32, j: u32 },
    #[error("vertex {vertex} has degree greater than 1")]
    NotAMatching { vertex: u32 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("hex coloring: {0}")]
    BadHex(String),
}

/// A graph on the linearly ordered vertex set `[n]`.
///
/// Edges are stored sorted ascending as pairs `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedGraph {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl OrderedGraph {
    pub fn new(n: usize, mut edges: Vec<(u32, u32)>) -> Result<Self, GraphError> {
        for &(i, j) in &edges {
            if i >= j {
                return Err(GraphError::UnorderedPair { i, j });
            }
            if i < 1 || j as usize > n {
                let bad = if i < 1 { i } else { j };
                return Err(GraphError::VertexOutOfRange { vertex: bad, n });
            }
        }
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateEdge {
                    i: w[0].0,
                    j: w[0].1,
                });
            }
        }
        Ok(OrderedGraph { n, edges })
    }

    pub fn empty(n: usize) -> Self {
        OrderedGraph {
            n,
            edges: Vec::new(),
        }
    }

    /// The ordered complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 1..=n as u32 {
            for j in i + 1..=n as u32 {
                edges.push((i, j));
            }
        }
        OrderedGraph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_matching(&self) -> bool {
        let mut deg = vec![0u8; self.n + 1];
        for &(i, j) in &self.edges {
            deg[i as usize] += 1;
            deg[j as usize] += 1;
            if deg[i as usize] > 1 || deg[j as usize] > 1 {
                return false;
            }
        }
        true
    }

    /// Parses the text format: first line `n`, then one `i j` pair per line.
    pub fn parse_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate();
        let (_, first) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing vertex count".into(),
        })?;
        let n: usize = first.trim().parse().map_err(|_| GraphError::Parse {
            line: 1,
            msg: format!("bad vertex count {:?}", first.trim()),
        })?;
        let mut edges = Vec::new();
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<u32, GraphError> {
                let tok = tok.ok_or(GraphError::Parse {
                    line: idx + 1,
                    msg: "expected `i j`".into(),
                })?;
                tok.parse().map_err(|_| GraphError::Parse {
                    line: idx + 1,
                    msg: format!("bad vertex {tok:?}"),
                })
            };
            let i = parse(it.next())?;
            let j = parse(it.next())?;
            edges.push((i, j));
        }
        OrderedGraph::new(n, edges)
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for &(i, j) in &self.edges {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }
}

/// An ordered graph in which every vertex has degree at most one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedMatching {
    graph: OrderedGraph,
    perfect: bool,
}

impl OrderedMatching {
    pub fn new(n: usize, edges: Vec<(u32, u32)>) -> Result<Self, GraphError> {
        let graph = OrderedGraph::new(n, edges)?;
        let mut deg = vec![0u8; n + 1];
        for &(i, j) in graph.edges() {
            for v in [i, j] {
                deg[v as usize] += 1;
                if deg[v as usize] > 1 {
                    return Err(GraphError::NotAMatching { vertex: v });
                }
            }
        }
        let perfect = graph.edge_count() * 2 == n;
        Ok(OrderedMatching { graph, perfect })
    }

    pub fn empty(n: usize) -> Self {
        OrderedMatching {
            graph: OrderedGraph::empty(n),
            perfect: n == 0,
        }
    }

    pub fn graph(&self) -> &OrderedGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.graph.edges
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edges.len()
    }

    /// True iff every vertex of `[n]` is covered.
    pub fn is_perfect(&self) -> bool {
        self.perfect
    }

    /// Returns `Some(k)` iff this is exactly the nested matching on `[2k]`
    /// with edges `(i, 2k+1-i)`.
    pub fn nested_order(&self) -> Option<usize> {
        let k = self.edge_count();
        if self.n() != 2 * k {
            return None;
        }
        let m = 2 * k as u32 + 1;
        self.edges().iter().all(|&(i, j)| i + j == m).then_some(k)
    }

    /// Returns the first crossing pair of edges, if any. Absence makes this a
    /// parenthesis matching.
    pub fn crossing_pair(&self) -> Option<((u32, u32), (u32, u32))> {
        let e = self.edges();
        for a in 0..e.len() {
            for b in a + 1..e.len() {
                let (i, j) = e[a];
                let (l, m) = e[b];
                // e is sorted, so i <= l; crossing means i < l < j < m.
                if l < j && j < m && i < l {
                    return Some((e[a], e[b]));
                }
            }
        }
        None
    }

    pub fn is_noncrossing(&self) -> bool {
        self.crossing_pair().is_none()
    }
}

impl From<OrderedMatching> for OrderedGraph {
    fn from(m: OrderedMatching) -> OrderedGraph {
        m.graph
    }
}

/// Index of pair `(i, j)` in row-major order `(1,2),(1,3),..,(1,n),(2,3),..`.
#[inline]
fn pair_index(n: usize, i: u32, j: u32) -> usize {
    let i = i as usize;
    let j = j as usize;
    debug_assert!(1 <= i && i < j && j <= n);
    (i - 1) * n - i * (i - 1) / 2 + (j - i - 1)
}

/// A red/blue edge coloring of the ordered complete graph on `[n]`,
/// stored as the blue edge set (one bit per pair, red is the complement).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedColoring {
    n: usize,
    blue: Vec<u64>,
}

impl OrderedColoring {
    fn with_bits(n: usize) -> Self {
        let pairs = n * n.saturating_sub(1) / 2;
        OrderedColoring {
            n,
            blue: vec![0u64; pairs.div_ceil(64)],
        }
    }

    pub fn all_red(n: usize) -> Self {
        Self::with_bits(n)
    }

    pub fn all_blue(n: usize) -> Self {
        let mut c = Self::with_bits(n);
        let pairs = n * n.saturating_sub(1) / 2;
        for t in 0..pairs {
            c.blue[t / 64] |= 1 << (t % 64);
        }
        c
    }

    pub fn from_blue_pairs(n: usize, pairs: &[(u32, u32)]) -> Result<Self, GraphError> {
        let mut c = Self::with_bits(n);
        for &(i, j) in pairs {
            if i >= j {
                return Err(GraphError::UnorderedPair { i, j });
            }
            if i < 1 || j as usize > n {
                let bad = if i < 1 { i } else { j };
                return Err(GraphError::VertexOutOfRange { vertex: bad, n });
            }
            let t = pair_index(n, i, j);
            c.blue[t / 64] |= 1 << (t % 64);
        }
        Ok(c)
    }

    pub fn from_fn(n: usize, mut color: impl FnMut(u32, u32) -> Color) -> Self {
        let mut c = Self::with_bits(n);
        for i in 1..=n as u32 {
            for j in i + 1..=n as u32 {
                if color(i, j) == Color::Blue {
                    let t = pair_index(n, i, j);
                    c.blue[t / 64] |= 1 << (t % 64);
                }
            }
        }
        c
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pair_count(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    #[inline]
    pub fn is_blue(&self, i: u32, j: u32) -> bool {
        let t = pair_index(self.n, i, j);
        self.blue[t / 64] >> (t % 64) & 1 == 1
    }

    #[inline]
    pub fn color(&self, i: u32, j: u32) -> Color {
        if self.is_blue(i, j) {
            Color::Blue
        } else {
            Color::Red
        }
    }

    pub fn blue_edge_count(&self) -> usize {
        self.blue.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// All edges of the given color, sorted ascending.
    pub fn edges_of(&self, color: Color) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for i in 1..=self.n as u32 {
            for j in i + 1..=self.n as u32 {
                if self.color(i, j) == color {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The coloring induced on the interval `lo..=hi`, relabeled to `1..`.
    pub fn restrict(&self, lo: u32, hi: u32) -> OrderedColoring {
        assert!(1 <= lo && hi as usize <= self.n && lo <= hi + 1);
        let m = (hi + 1 - lo) as usize;
        OrderedColoring::from_fn(m, |i, j| self.color(lo + i - 1, lo + j - 1))
    }

    /// Blue degree of `v`, counted within `interval` when given.
    pub fn blue_degree(&self, v: u32, interval: Option<(u32, u32)>) -> usize {
        let (lo, hi) = interval.unwrap_or((1, self.n as u32));
        let mut d = 0;
        for u in lo..=hi {
            if u == v {
                continue;
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if self.is_blue(a, b) {
                d += 1;
            }
        }
        d
    }

    /// Blue neighbors of `v` within `interval`, ascending.
    pub fn blue_neighbors(&self, v: u32, interval: Option<(u32, u32)>) -> Vec<u32> {
        let (lo, hi) = interval.unwrap_or((1, self.n as u32));
        (lo..=hi)
            .filter(|&u| {
                u != v && {
                    let (a, b) = if u < v { (u, v) } else { (v, u) };
                    self.is_blue(a, b)
                }
            })
            .collect()
    }

    /// Per-vertex blue adjacency bitsets (bit `v-1` of row `u` set iff the
    /// pair `{u,v}` is blue). Width is `ceil(n/64)` words.
    pub fn blue_rows(&self) -> Vec<Vec<u64>> {
        let words = self.n.div_ceil(64);
        let mut rows = vec![vec![0u64; words]; self.n + 1];
        for i in 1..=self.n as u32 {
            for j in i + 1..=self.n as u32 {
                if self.is_blue(i, j) {
                    rows[i as usize][(j as usize - 1) / 64] |= 1 << ((j as usize - 1) % 64);
                    rows[j as usize][(i as usize - 1) / 64] |= 1 << ((i as usize - 1) % 64);
                }
            }
        }
        rows
    }

    /// Hex text format: first line `n`, second line one hex digit per four
    /// pair bits in row-major pair order, first pair in the high bit of the
    /// first digit.
    pub fn render_text(&self) -> String {
        format!("{}\n{}\n", self.n, self.render_hex())
    }

    pub fn render_hex(&self) -> String {
        let pairs = self.pair_count();
        let mut out = String::with_capacity(pairs.div_ceil(4));
        for d in 0..pairs.div_ceil(4) {
            let mut digit = 0u8;
            for b in 0..4 {
                let t = 4 * d + b;
                if t < pairs && self.blue[t / 64] >> (t % 64) & 1 == 1 {
                    digit |= 8 >> b;
                }
            }
            out.push(char::from_digit(digit as u32, 16).unwrap());
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines();
        let first = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing vertex count".into(),
        })?;
        let n: usize = first.trim().parse().map_err(|_| GraphError::Parse {
            line: 1,
            msg: format!("bad vertex count {:?}", first.trim()),
        })?;
        let hex = lines.next().unwrap_or("").trim();
        Self::from_hex(n, hex)
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self, GraphError> {
        let pairs = n * n.saturating_sub(1) / 2;
        let want = pairs.div_ceil(4);
        if hex.len() != want {
            return Err(GraphError::BadHex(format!(
                "expected {want} hex digits for n={n}, got {} in {hex:?}",
                hex.len()
            )));
        }
        let mut c = Self::with_bits(n);
        for (d, ch) in hex.chars().enumerate() {
            let digit = ch
                .to_digit(16)
                .ok_or_else(|| GraphError::BadHex(format!("invalid hex digit {ch:?}")))?
                as u8;
            for b in 0..4 {
                if digit & (8 >> b) != 0 {
                    let t = 4 * d + b;
                    if t >= pairs {
                        return Err(GraphError::BadHex(format!(
                            "trailing bit set in final digit {ch:?}"
                        )));
                    }
                    c.blue[t / 64] |= 1 << (t % 64);
                }
            }
        }
        Ok(c)
    }
}

/// An order-preserving embedding of a pattern graph into a host coloring:
/// a strictly increasing map plus the color carried by every pattern edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmbeddingWitness {
    /// `map[v-1]` is the host vertex for pattern vertex `v`.
    pub map: Vec<u32>,
    pub color: Color,
}

impl EmbeddingWitness {
    pub fn new(map: Vec<u32>, color: Color) -> Self {
        EmbeddingWitness { map, color }
    }

    /// Re-validates this witness against a host coloring and pattern:
    /// the map must be strictly increasing into `[host.n]` and every pattern
    /// edge must carry the witness color in the host.
    pub fn validate(&self, host: &OrderedColoring, pattern: &OrderedGraph) -> Result<(), String> {
        if self.map.len() != pattern.n() {
            return Err(format!(
                "witness has {} vertices, pattern has {}",
                self.map.len(),
                pattern.n()
            ));
        }
        for w in self.map.windows(2) {
            if w[0] >= w[1] {
                return Err(format!(
                    "map not strictly increasing at {} >= {}",
                    w[0], w[1]
                ));
            }
        }
        if let Some(&last) = self.map.last() {
            if self.map[0] < 1 || last as usize > host.n() {
                return Err(format!("map leaves host range 1..={}", host.n()));
            }
        }
        for &(u, v) in pattern.edges() {
            let (a, b) = (self.map[u as usize - 1], self.map[v as usize - 1]);
            if host.color(a, b) != self.color {
                return Err(format!(
                    "pattern edge ({u},{v}) maps to ({a},{b}) which is not {:?}",
                    self.color
                ));
            }
        }
        Ok(())
    }
}

/// Returns the lexicographically least triple `(i,j,k)` whose three pairs are
/// all blue, or `None` if the coloring has no blue triangle.
pub fn find_blue_triangle(c: &OrderedColoring) -> Option<(u32, u32, u32)> {
    if c.n < 3 {
        return None;
    }
    let rows = c.blue_rows();
    for i in 1..=c.n as u32 {
        for j in i + 1..=c.n as u32 {
            if !c.is_blue(i, j) {
                continue;
            }
            // least common blue neighbor above j (vertex v sits at bit v-1,
            // so "v > j" means global bit index >= j)
            let first_word = j as usize / 64;
            let pairs = rows[i as usize].iter().zip(&rows[j as usize]);
            for (w, (a, b)) in pairs.enumerate().skip(first_word) {
                let mut common = a & b;
                if w == first_word {
                    common &= u64::MAX << (j as usize % 64);
                }
                if common != 0 {
                    let k = (w * 64 + common.trailing_zeros() as usize + 1) as u32;
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

/// Vertex of maximum blue degree (ties broken toward the smallest index),
/// with degrees counted into `interval` when one is supplied.
pub fn max_blue_degree(c: &OrderedColoring, interval: Option<(u32, u32)>) -> (u32, usize) {
    assert!(c.n >= 1, "coloring must have at least one vertex");
    let mut best = (1u32, 0usize);
    for v in 1..=c.n as u32 {
        let d = c.blue_degree(v, interval);
        if d > best.1 {
            best = (v, d);
        }
    }
    best
}

/// Searches for an order-preserving copy of `g` carrying `color` in `c`.
///
/// The search is exhaustive backtracking over strictly increasing maps and
/// returns the lexicographically least witness. When `g` is a nested
/// matching the absence case is decided first by the nesting-chain bound,
/// which refutes without enumeration.
pub fn contains_ordered(
    c: &OrderedColoring,
    color: Color,
    g: &OrderedGraph,
) -> Option<EmbeddingWitness> {
    if g.n() > c.n() {
        return None;
    }
    if let Some(k) = nested_order_of(g) {
        if k > 0 && crate::embed::nested_chain_length(&c.edges_of(color)) < k {
            return None;
        }
    }
    // pattern edges grouped by their larger endpoint
    let mut back_edges: Vec<Vec<u32>> = vec![Vec::new(); g.n() + 1];
    for &(u, v) in g.edges() {
        back_edges[v as usize].push(u);
    }
    let mut map = Vec::with_capacity(g.n());
    if dfs_embed(c, color, g.n(), &back_edges, &mut map, 1) {
        Some(EmbeddingWitness::new(map, color))
    } else {
        None
    }
}

fn nested_order_of(g: &OrderedGraph) -> Option<usize> {
    let k = g.edge_count();
    if g.n() != 2 * k || k == 0 {
        return None;
    }
    let m = 2 * k as u32 + 1;
    g.edges().iter().all(|&(i, j)| i + j == m).then_some(k)
}

fn dfs_embed(
    c: &OrderedColoring,
    color: Color,
    gn: usize,
    back_edges: &[Vec<u32>],
    map: &mut Vec<u32>,
    min_host: u32,
) -> bool {
    let p = map.len();
    if p == gn {
        return true;
    }
    let remaining = (gn - p - 1) as u32;
    let mut h = min_host;
    while h + remaining <= c.n() as u32 {
        let ok = back_edges[p + 1]
            .iter()
            .all(|&q| c.color(map[q as usize - 1], h) == color);
        if ok {
            map.push(h);
            if dfs_embed(c, color, gn, back_edges, map, h + 1) {
                return true;
            }
            map.pop();
        }
        h += 1;
    }
    false
}
