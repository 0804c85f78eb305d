//! Permutation machinery for matchings of interval chromatic number 2.
//!
//! A perfect matching on `[2n]` whose edges all cross the midpoint
//! corresponds to the permutation mapping `i` to `j - n` for each edge
//! `(i, j)`. Exact patterns (subsequences with exactly those values) and the
//! ordered intersection `Int(a, b)` — the longest exact pattern two
//! sequences share, i.e. their LCS — drive both the shift-compatibility
//! count and the seeded Monte Carlo tail experiment.

use crate::graph::{
    find_blue_triangle, Color, EmbeddingWitness, OrderedColoring, OrderedGraph, OrderedMatching,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("values are not a bijection on [n]: {0}")]
    NotAPermutation(String),
    #[error("duplicate value {value} in {which} sequence")]
    DuplicateValue { value: u32, which: &'static str },
    #[error("edge ({i},{j}) does not cross the midpoint {mid}")]
    NotIntervalChromatic2 { i: u32, j: u32, mid: u32 },
    #[error("matching must be perfect on an even vertex count, n={n}")]
    NotPerfect { n: usize },
    #[error("{0}")]
    Size(String),
    #[error("parameter error: {0}")]
    Parameter(String),
}

/// A permutation of `[n]` in sequence form `(pi(1), .., pi(n))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Permutation {
    values: Vec<u32>,
}

impl Permutation {
    pub fn new(values: Vec<u32>) -> Result<Self, PermError> {
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v < 1 || v as usize > n || seen[v as usize] {
                return Err(PermError::NotAPermutation(format!("value {v} with n={n}")));
            }
            seen[v as usize] = true;
        }
        Ok(Permutation { values })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            values: (1..=n as u32).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// The value-shifted sequence `pi + h` on `{1+h, .., n+h}`.
    pub fn shifted(&self, h: u32) -> ShiftedSeq {
        ShiftedSeq {
            base: self.clone(),
            h,
        }
    }

    /// Uniform random permutation by Fisher-Yates.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let mut values: Vec<u32> = (1..=n as u32).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            values.swap(i, j);
        }
        Permutation { values }
    }
}

/// `pi + h`: the same sequence with every value shifted up by `h`, living on
/// `{1+h, .., n+h}`. The shift is a value shift, not modular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftedSeq {
    pub base: Permutation,
    pub h: u32,
}

impl ShiftedSeq {
    pub fn values(&self) -> Vec<u32> {
        self.base.values().iter().map(|&v| v + self.h).collect()
    }
}

/// An ordered subset of positive integers: values must be distinct, order
/// matters, and containment is exact-value subsequence containment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactPattern {
    seq: Vec<u32>,
}

impl ExactPattern {
    pub fn new(seq: Vec<u32>) -> Result<Self, PermError> {
        let mut sorted = seq.clone();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(PermError::DuplicateValue {
                    value: w[0],
                    which: "pattern",
                });
            }
        }
        Ok(ExactPattern { seq })
    }

    pub fn seq(&self) -> &[u32] {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn shifted(&self, h: u32) -> ExactPattern {
        ExactPattern {
            seq: self.seq.iter().map(|&v| v + h).collect(),
        }
    }
}

/// The corresponding permutation of a perfect matching on `[2n]` whose every
/// edge crosses the midpoint: `pi(i) = j - n` for each edge `(i, j)`.
pub fn matching_to_perm(m: &OrderedMatching) -> Result<Permutation, PermError> {
    if !m.is_perfect() || !m.n().is_multiple_of(2) {
        return Err(PermError::NotPerfect { n: m.n() });
    }
    let half = (m.n() / 2) as u32;
    let mut values = vec![0u32; half as usize];
    for &(i, j) in m.edges() {
        if i > half || j <= half {
            return Err(PermError::NotIntervalChromatic2 { i, j, mid: half });
        }
        values[i as usize - 1] = j - half;
    }
    Permutation::new(values)
}

/// Inverse of [`matching_to_perm`]: edges `(i, pi(i) + n)`.
pub fn perm_to_matching(p: &Permutation) -> OrderedMatching {
    let n = p.n() as u32;
    let edges = p
        .values()
        .iter()
        .enumerate()
        .map(|(i0, &v)| (i0 as u32 + 1, v + n))
        .collect();
    OrderedMatching::new(2 * p.n(), edges).expect("crossing matching is valid")
}

/// Minimum number of contiguous vertex intervals, each independent in `g`.
///
/// The greedy left-to-right scan that extends the current interval until an
/// internal edge would appear is optimal for interval partitions.
pub fn interval_chromatic_number(g: &OrderedGraph) -> usize {
    if g.n() == 0 {
        return 1;
    }
    let mut neighbors_below: Vec<Vec<u32>> = vec![Vec::new(); g.n() + 1];
    for &(i, j) in g.edges() {
        neighbors_below[j as usize].push(i);
    }
    let mut intervals = 1;
    let mut start = 1u32;
    for v in 2..=g.n() as u32 {
        if neighbors_below[v as usize].iter().any(|&u| u >= start) {
            intervals += 1;
            start = v;
        }
    }
    intervals
}

/// True iff `rho` appears in `pi` as a subsequence with exactly those values.
pub fn contains_exact_pattern(pi: &Permutation, rho: &ExactPattern) -> bool {
    let mut want = rho.seq().iter();
    let mut next = want.next();
    for &v in pi.values() {
        if Some(&v) == next {
            next = want.next();
        }
    }
    next.is_none()
}

/// Longest common subsequence length of two duplicate-free value sequences.
///
/// Relabels `b` through `a`'s positions and takes the longest strictly
/// increasing subsequence by patience sorting, `O(n log n)`.
pub fn ordered_intersection(a: &[u32], b: &[u32]) -> Result<usize, PermError> {
    for (which, seq) in [("first", a), ("second", b)] {
        let mut sorted = seq.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(PermError::DuplicateValue { value: w[0], which });
            }
        }
    }
    let pos: HashMap<u32, u32> = a.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let induced: Vec<u32> = b.iter().filter_map(|v| pos.get(v).copied()).collect();
    let mut tails: Vec<u32> = Vec::new();
    for x in induced {
        let at = tails.partition_point(|&t| t < x);
        if at == tails.len() {
            tails.push(x);
        } else {
            tails[at] = x;
        }
    }
    Ok(tails.len())
}

/// `Int(pi, pi + h)`: the longest exact pattern shared by a permutation and
/// its value shift.
pub fn shift_intersection(pi: &Permutation, h: u32) -> usize {
    ordered_intersection(pi.values(), &pi.shifted(h).values())
        .expect("permutation values are distinct")
}

/// Whether some permutation contains both `rho` and `rho + h` as exact
/// patterns: the two induced total orders, merged on the shared values
/// `rho ∩ (rho + h)`, must form an acyclic constraint digraph. Any
/// topological order then extends to a witness permutation.
pub fn shift_compatible(rho: &ExactPattern, h: u32) -> bool {
    let seq = rho.seq();
    if seq.len() <= 1 {
        return true;
    }
    let mut ids: HashMap<u32, usize> = HashMap::new();
    let id_of = |v: u32, ids: &mut HashMap<u32, usize>| -> usize {
        let next = ids.len();
        *ids.entry(v).or_insert(next)
    };
    let mut edges = Vec::new();
    for w in seq.windows(2) {
        edges.push((id_of(w[0], &mut ids), id_of(w[1], &mut ids)));
        edges.push((id_of(w[0] + h, &mut ids), id_of(w[1] + h, &mut ids)));
    }
    // Kahn's algorithm
    let n = ids.len();
    let mut indeg = vec![0usize; n];
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &edges {
        adj[u].push(v);
        indeg[v] += 1;
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &w in &adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push(w);
            }
        }
    }
    seen == n
}

pub const COMPATIBLE_EXHAUSTIVE_LIMIT: usize = 8;

#[derive(Debug, Clone, Serialize)]
pub struct CompatibleCount {
    pub k: usize,
    /// `|U ∩ (U + h)|`.
    pub t: usize,
    /// Orderings of `U` that some permutation realizes alongside their shift.
    pub count: u64,
    /// The counting bound `2^(2k-t) * k^(k-t)`.
    pub bound: f64,
}

/// Counts orderings `rho` of the set `U` such that some permutation contains
/// both `rho` and `rho + h` as exact patterns, by enumerating all `k!`
/// orderings and running the acyclicity test on each.
pub fn count_compatible_orderings(u: &[u32], h: u32) -> Result<CompatibleCount, PermError> {
    count_compatible_orderings_with_limit(u, h, COMPATIBLE_EXHAUSTIVE_LIMIT)
}

pub fn count_compatible_orderings_with_limit(
    u: &[u32],
    h: u32,
    limit: usize,
) -> Result<CompatibleCount, PermError> {
    if h == 0 {
        return Err(PermError::Parameter("shift h must be positive".into()));
    }
    let k = u.len();
    if k > limit {
        return Err(PermError::Size(format!(
            "|U| = {k} exceeds the exhaustive limit {limit}"
        )));
    }
    let mut sorted = u.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(PermError::DuplicateValue {
                value: w[0],
                which: "U",
            });
        }
    }
    let t = sorted
        .iter()
        .filter(|&&v| sorted.binary_search(&(v + h)).is_ok())
        .count();
    let mut count = 0u64;
    let mut perm = sorted.clone();
    permute_all(&mut perm, 0, &mut |rho| {
        let rho = ExactPattern::new(rho.to_vec()).expect("distinct by construction");
        if shift_compatible(&rho, h) {
            count += 1;
        }
    });
    let bound = 2f64.powi((2 * k - t) as i32) * (k as f64).powi((k - t) as i32);
    Ok(CompatibleCount { k, t, count, bound })
}

fn permute_all(vals: &mut [u32], at: usize, visit: &mut impl FnMut(&[u32])) {
    if at == vals.len() {
        visit(vals);
        return;
    }
    for i in at..vals.len() {
        vals.swap(at, i);
        permute_all(vals, at + 1, visit);
        vals.swap(at, i);
    }
}

/// One tail threshold of the Monte Carlo report.
#[derive(Debug, Clone, Serialize)]
pub struct TailBound {
    pub alpha: f64,
    /// `n^(2/3 + alpha)`.
    pub threshold: f64,
    /// Samples with `Int >= threshold`.
    pub exceedances: u64,
    /// `(e^5 n^(-3 alpha / 2))^(n^(2/3+alpha))`, usually an underflowed 0.
    pub bound: f64,
    /// Base-10 logarithm of the bound, computed in log space.
    pub bound_log10: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct McReport {
    pub n: usize,
    pub h: u32,
    pub trials: u64,
    pub seed: u64,
    /// `(trial, Int(pi, pi+h))` per trial, in trial order.
    pub samples: Vec<(u64, usize)>,
    /// Empirical CDF as `(value, P[Int <= value])` over observed values.
    pub cdf: Vec<(usize, f64)>,
    pub thresholds: Vec<TailBound>,
}

/// Samples `trials` uniform permutations of `[n]` and records the
/// distribution of `Int(pi, pi+h)`.
///
/// Trial `i` uses its own generator seeded with `seed ^ i`, so results are
/// independent of scheduling and reproduce bit-exactly.
pub fn mc_shift_intersection(
    n: usize,
    h: u32,
    trials: u64,
    seed: u64,
    alphas: &[f64],
    threads: usize,
    mut heartbeat: Option<&mut dyn FnMut(u64)>,
) -> Result<McReport, PermError> {
    if n < 2 {
        return Err(PermError::Parameter(format!(
            "n must be at least 2, got {n}"
        )));
    }
    if trials < 1 {
        return Err(PermError::Parameter("trials must be at least 1".into()));
    }
    let run_trial = |i: u64| -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i);
        let pi = Permutation::random(n, &mut rng);
        shift_intersection(&pi, h)
    };
    let mut samples: Vec<(u64, usize)> = Vec::with_capacity(trials as usize);
    if threads <= 1 {
        for i in 0..trials {
            samples.push((i, run_trial(i)));
            if let Some(cb) = heartbeat.as_deref_mut() {
                cb(i + 1);
            }
        }
    } else {
        let next = std::sync::atomic::AtomicU64::new(0);
        let done = std::sync::atomic::AtomicU64::new(0);
        let results = std::sync::Mutex::new(vec![0usize; trials as usize]);
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= trials {
                        return;
                    }
                    let v = run_trial(i);
                    results.lock().unwrap()[i as usize] = v;
                    done.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                });
            }
        });
        let results = results.into_inner().unwrap();
        samples.extend(results.into_iter().enumerate().map(|(i, v)| (i as u64, v)));
        if let Some(cb) = heartbeat {
            cb(trials);
        }
    }
    let mut dist: std::collections::BTreeMap<usize, u64> = std::collections::BTreeMap::new();
    for &(_, v) in &samples {
        *dist.entry(v).or_insert(0) += 1;
    }
    let mut cdf = Vec::with_capacity(dist.len());
    let mut acc = 0u64;
    for (&v, &cnt) in &dist {
        acc += cnt;
        cdf.push((v, acc as f64 / trials as f64));
    }
    let thresholds = alphas
        .iter()
        .map(|&alpha| {
            let nf = n as f64;
            let threshold = nf.powf(2.0 / 3.0 + alpha);
            let exceedances = samples
                .iter()
                .filter(|&&(_, v)| v as f64 >= threshold)
                .count() as u64;
            let bound_log10 =
                threshold * (5.0 * std::f64::consts::LOG10_E - 1.5 * alpha * nf.log10());
            TailBound {
                alpha,
                threshold,
                exceedances,
                bound: 10f64.powf(bound_log10),
                bound_log10,
            }
        })
        .collect();
    Ok(McReport {
        n,
        h,
        trials,
        seed,
        samples,
        cdf,
        thresholds,
    })
}

/// Which of the three competing structures a coloring of `[2n]` contains:
/// a blue triangle, a red clique of a requested size, and a red copy of a
/// crossing matching inside the bipartite subgraph `[1,n] | [n+1,2n]`.
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub blue_triangle: Option<(u32, u32, u32)>,
    pub red_clique: Option<Vec<u32>>,
    pub bipartite_red_copy: Option<EmbeddingWitness>,
}

/// Desk-scale exact checks for all three structures; the clique search is
/// exponential and the bipartite embedding backtracks over crossing edges.
pub fn three_structure_check(
    c: &OrderedColoring,
    m: &OrderedMatching,
    clique_size: usize,
) -> Result<StructureReport, PermError> {
    if !c.n().is_multiple_of(2) {
        return Err(PermError::Parameter(format!(
            "host must have even order, got {}",
            c.n()
        )));
    }
    let host_half = c.n() / 2;
    let sigma = matching_to_perm(m)?;
    if sigma.n() > host_half {
        return Err(PermError::Size(format!(
            "matching half {} exceeds host half {host_half}",
            sigma.n()
        )));
    }
    let blue_triangle = find_blue_triangle(c);
    let red_clique = find_red_clique(c, clique_size);
    let bipartite_red_copy = bipartite_matching_embed(c, host_half as u32, &sigma);
    Ok(StructureReport {
        blue_triangle,
        red_clique,
        bipartite_red_copy,
    })
}

/// Exact search for a red clique of the given size (smallest-vertex-first
/// branch and bound on adjacency bitsets).
fn find_red_clique(c: &OrderedColoring, size: usize) -> Option<Vec<u32>> {
    if size == 0 {
        return Some(Vec::new());
    }
    let n = c.n();
    if size > n {
        return None;
    }
    let words = n.div_ceil(64);
    let mut red_rows = vec![vec![0u64; words]; n + 1];
    for i in 1..=n as u32 {
        for j in i + 1..=n as u32 {
            if c.color(i, j) == Color::Red {
                red_rows[i as usize][(j as usize - 1) / 64] |= 1 << ((j as usize - 1) % 64);
            }
        }
    }
    fn popcount(words: &[u64]) -> usize {
        words.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn grow(rows: &[Vec<u64>], clique: &mut Vec<u32>, mut cand: Vec<u64>, size: usize) -> bool {
        loop {
            if clique.len() == size {
                return true;
            }
            if clique.len() + popcount(&cand) < size {
                return false;
            }
            // branch on the lowest candidate; everything left is above it,
            // so cliques come out strictly increasing
            let w = cand.iter().position(|&x| x != 0).expect("popcount checked");
            let b = cand[w].trailing_zeros() as usize;
            let v = (w * 64 + b + 1) as u32;
            cand[w] &= !(1u64 << b);
            let next: Vec<u64> = cand
                .iter()
                .zip(&rows[v as usize])
                .map(|(a, b)| a & b)
                .collect();
            clique.push(v);
            if grow(rows, clique, next, size) {
                return true;
            }
            clique.pop();
        }
    }
    let mut full = vec![u64::MAX; words];
    if !n.is_multiple_of(64) {
        full[words - 1] = (1u64 << (n % 64)) - 1;
    }
    let mut clique = Vec::new();
    grow(&red_rows, &mut clique, full, size).then_some(clique)
}

/// Red copy of the crossing matching described by `sigma` with left vertices
/// in `[1, half]` and right vertices in `[half+1, 2*half]`.
fn bipartite_matching_embed(
    c: &OrderedColoring,
    half: u32,
    sigma: &Permutation,
) -> Option<EmbeddingWitness> {
    let p = sigma.n() as u32;
    if p == 0 {
        return Some(EmbeddingWitness::new(Vec::new(), Color::Red));
    }
    let mut left = vec![0u32; p as usize + 1];
    let mut right = vec![0u32; p as usize + 1];
    fn rec(
        c: &OrderedColoring,
        half: u32,
        sigma: &[u32],
        i: u32,
        left: &mut [u32],
        right: &mut [u32],
    ) -> bool {
        let p = sigma.len() as u32;
        if i > p {
            return true;
        }
        let j = sigma[i as usize - 1];
        // window for the right endpoint R(j), from already placed neighbors
        let mut lo = half + 1;
        let mut hi = half + half;
        for jj in 1..j {
            if right[jj as usize] != 0 {
                lo = lo.max(right[jj as usize] + 1);
            }
        }
        for jj in j + 1..=p {
            if right[jj as usize] != 0 {
                hi = hi.min(right[jj as usize] - 1);
            }
        }
        for l in left[i as usize - 1] + 1..=half - (p - i) {
            for r in lo..=hi {
                if c.color(l, r) == Color::Red {
                    left[i as usize] = l;
                    right[j as usize] = r;
                    if rec(c, half, sigma, i + 1, left, right) {
                        return true;
                    }
                    right[j as usize] = 0;
                }
            }
        }
        false
    }
    if !rec(c, half, sigma.values(), 1, &mut left, &mut right) {
        return None;
    }
    let mut map: Vec<u32> = left[1..].to_vec();
    map.extend_from_slice(&right[1..]);
    Some(EmbeddingWitness::new(map, Color::Red))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(vals: &[u32]) -> Permutation {
        Permutation::new(vals.to_vec()).unwrap()
    }

    fn pattern(vals: &[u32]) -> ExactPattern {
        ExactPattern::new(vals.to_vec()).unwrap()
    }

    #[test]
    fn corresponding_permutation_examples() {
        let m = OrderedMatching::new(8, vec![(1, 6), (2, 8), (3, 5), (4, 7)]).unwrap();
        let p = matching_to_perm(&m).unwrap();
        assert_eq!(p.values(), &[2, 4, 1, 3]);
        assert_eq!(perm_to_matching(&p), m);

        let ident = OrderedMatching::new(6, vec![(1, 4), (2, 5), (3, 6)]).unwrap();
        assert_eq!(matching_to_perm(&ident).unwrap(), Permutation::identity(3));

        let tiny = OrderedMatching::new(2, vec![(1, 2)]).unwrap();
        assert_eq!(matching_to_perm(&tiny).unwrap().values(), &[1]);

        let bad = OrderedMatching::new(4, vec![(1, 2), (3, 4)]).unwrap();
        assert!(matches!(
            matching_to_perm(&bad),
            Err(PermError::NotIntervalChromatic2 { i: 1, j: 2, mid: 2 })
        ));
    }

    #[test]
    fn round_trip_all_small_permutations() {
        for n in 1..=6 {
            let mut vals: Vec<u32> = (1..=n as u32).collect();
            permute_all(&mut vals, 0, &mut |v| {
                let p = Permutation::new(v.to_vec()).unwrap();
                assert_eq!(matching_to_perm(&perm_to_matching(&p)).unwrap(), p);
            });
        }
    }

    fn brute_icn(g: &OrderedGraph) -> usize {
        // try all interval partitions by cut sets
        let n = g.n();
        if n == 0 {
            return 1;
        }
        let mut best = n;
        for mask in 0u32..1 << (n - 1) {
            // bit v set: cut between v+1 and v+2
            let mut start = 1u32;
            let mut parts = Vec::new();
            for v in 1..n as u32 {
                if mask >> (v - 1) & 1 == 1 {
                    parts.push((start, v));
                    start = v + 1;
                }
            }
            parts.push((start, n as u32));
            let ok = g
                .edges()
                .iter()
                .all(|&(i, j)| !parts.iter().any(|&(lo, hi)| lo <= i && j <= hi));
            if ok {
                best = best.min(parts.len());
            }
        }
        best
    }

    #[test]
    fn interval_chromatic_examples() {
        assert_eq!(interval_chromatic_number(&OrderedGraph::empty(5)), 1);
        for k in 1..=4 {
            assert_eq!(
                interval_chromatic_number(crate::paren::nested_matching(k).graph()),
                2
            );
        }
        let path = OrderedGraph::new(3, vec![(1, 2), (2, 3)]).unwrap();
        assert_eq!(brute_icn(&path), 3);
        assert_eq!(interval_chromatic_number(&path), 3);
    }

    #[test]
    fn interval_chromatic_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(0x1c);
        for _ in 0..300 {
            let n = rng.random_range(1..=8usize);
            let mut edges = Vec::new();
            for i in 1..=n as u32 {
                for j in i + 1..=n as u32 {
                    if rng.random_bool(0.3) {
                        edges.push((i, j));
                    }
                }
            }
            let g = OrderedGraph::new(n, edges).unwrap();
            assert_eq!(interval_chromatic_number(&g), brute_icn(&g), "{g:?}");
        }
    }

    #[test]
    fn exact_pattern_examples() {
        let p = perm(&[3, 5, 6, 1, 2, 4]);
        assert!(contains_exact_pattern(&p, &pattern(&[6, 1, 4])));
        assert!(!contains_exact_pattern(&p, &pattern(&[1, 2, 3])));
        assert!(contains_exact_pattern(&p, &pattern(&[])));
    }

    fn brute_lcs(a: &[u32], b: &[u32]) -> usize {
        // enumerate subsequences of a, test against b
        let mut best = 0;
        for mask in 0u32..1 << a.len() {
            let sub: Vec<u32> = (0..a.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| a[i])
                .collect();
            let mut it = sub.iter();
            let mut next = it.next();
            for &v in b {
                if Some(&v) == next {
                    next = it.next();
                }
            }
            if next.is_none() {
                best = best.max(sub.len());
            }
        }
        best
    }

    pub(crate) fn lcs_quadratic(a: &[u32], b: &[u32]) -> usize {
        let mut prev = vec![0usize; b.len() + 1];
        let mut cur = vec![0usize; b.len() + 1];
        for &x in a {
            for (j, &y) in b.iter().enumerate() {
                cur[j + 1] = if x == y {
                    prev[j] + 1
                } else {
                    prev[j + 1].max(cur[j])
                };
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        prev[b.len()]
    }

    #[test]
    fn ordered_intersection_examples() {
        let p = perm(&[3, 5, 6, 1, 2, 4]);
        assert_eq!(ordered_intersection(p.values(), p.values()).unwrap(), 6);
        assert_eq!(brute_lcs(&[2, 1, 3], &[1, 3, 2]), 2);
        assert_eq!(ordered_intersection(&[2, 1, 3], &[1, 3, 2]).unwrap(), 2);
        // shift beyond n: disjoint value ranges
        assert_eq!(shift_intersection(&perm(&[2, 1, 3]), 5), 0);
        assert!(matches!(
            ordered_intersection(&[1, 1], &[1, 2]),
            Err(PermError::DuplicateValue {
                value: 1,
                which: "first"
            })
        ));
    }

    #[test]
    fn ordered_intersection_matches_oracles() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(0x11a);
        // exhaustive small
        for n in 1..=5usize {
            let mut a: Vec<u32> = (1..=n as u32).collect();
            permute_all(&mut a, 0, &mut |av| {
                let mut b: Vec<u32> = (1..=n as u32).collect();
                permute_all(&mut b, 0, &mut |bv| {
                    assert_eq!(
                        ordered_intersection(av, bv).unwrap(),
                        brute_lcs(av, bv),
                        "{av:?} {bv:?}"
                    );
                });
            });
        }
        // randomized larger, against the quadratic DP; also symmetry
        for _ in 0..800 {
            let n = rand::Rng::random_range(&mut rng, 1..=60usize);
            let a = Permutation::random(n, &mut rng);
            let b = Permutation::random(n, &mut rng);
            let fwd = ordered_intersection(a.values(), b.values()).unwrap();
            assert_eq!(fwd, lcs_quadratic(a.values(), b.values()));
            assert_eq!(fwd, ordered_intersection(b.values(), a.values()).unwrap());
        }
    }

    fn brute_shift_compatible(rho: &ExactPattern, h: u32, n: usize) -> bool {
        let mut vals: Vec<u32> = (1..=n as u32).collect();
        let mut found = false;
        permute_all(&mut vals, 0, &mut |pv| {
            if found {
                return;
            }
            let p = Permutation::new(pv.to_vec()).unwrap();
            if contains_exact_pattern(&p, rho) && contains_exact_pattern(&p, &rho.shifted(h)) {
                found = true;
            }
        });
        found
    }

    #[test]
    fn compatible_ordering_examples() {
        let r = count_compatible_orderings(&[1, 2], 5).unwrap();
        assert_eq!((r.count, r.t), (2, 0));
        let r = count_compatible_orderings(&[1, 2], 1).unwrap();
        assert_eq!((r.count, r.t), (2, 1));
        assert!(r.count as f64 <= r.bound);
        // arithmetic progressions admit exactly the two monotone orders
        for (start, h, k) in [(1u32, 2u32, 3usize), (2, 1, 4), (1, 3, 5)] {
            let u: Vec<u32> = (0..k as u32).map(|i| start + i * h).collect();
            let r = count_compatible_orderings(&u, h).unwrap();
            assert_eq!(r.count, 2, "progression {u:?} h={h}");
        }
        assert!(matches!(
            count_compatible_orderings(&[1, 2, 3, 4, 5, 6, 7, 8, 9], 1),
            Err(PermError::Size(_))
        ));
    }

    #[test]
    fn dag_test_agrees_with_brute_force_small() {
        // all U in [6] with |U| <= 4, h in {1,2}: compare against searching
        // every permutation of S_6
        for h in 1..=2u32 {
            for mask in 1u32..1 << 6 {
                let u: Vec<u32> = (1..=6).filter(|&v| mask >> (v - 1) & 1 == 1).collect();
                if u.len() > 4 || u.iter().max().unwrap() + h > 6 {
                    continue;
                }
                let mut vals = u.clone();
                permute_all(&mut vals, 0, &mut |rv| {
                    let rho = ExactPattern::new(rv.to_vec()).unwrap();
                    assert_eq!(
                        shift_compatible(&rho, h),
                        brute_shift_compatible(&rho, h, 6),
                        "rho={rv:?} h={h}"
                    );
                });
            }
        }
    }

    #[test]
    fn mc_tiny_exhaustive() {
        // n=2, h=1: both permutations have Int = 1
        assert_eq!(shift_intersection(&perm(&[1, 2]), 1), 1);
        assert_eq!(shift_intersection(&perm(&[2, 1]), 1), 1);
        let rep = mc_shift_intersection(2, 1, 16, 42, &[0.4], 1, None).unwrap();
        assert!(rep.samples.iter().all(|&(_, v)| v == 1));
        assert_eq!(rep.cdf, vec![(1, 1.0)]);
        // h >= n: point mass at 0
        let rep = mc_shift_intersection(4, 7, 8, 42, &[], 1, None).unwrap();
        assert!(rep.samples.iter().all(|&(_, v)| v == 0));
    }

    #[test]
    fn mc_is_reproducible_and_thread_invariant() {
        let a = mc_shift_intersection(40, 2, 24, 7, &[0.4], 1, None).unwrap();
        let b = mc_shift_intersection(40, 2, 24, 7, &[0.4], 1, None).unwrap();
        let c = mc_shift_intersection(40, 2, 24, 7, &[0.4], 3, None).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.samples, c.samples);
    }

    #[test]
    fn three_structure_examples() {
        let m = perm_to_matching(&perm(&[2, 1]));
        let blue = OrderedColoring::all_blue(8);
        let rep = three_structure_check(&blue, &m, 3).unwrap();
        assert_eq!(rep.blue_triangle, Some((1, 2, 3)));
        assert!(rep.red_clique.is_none());
        assert!(rep.bipartite_red_copy.is_none());

        let red = OrderedColoring::all_red(8);
        let rep = three_structure_check(&red, &m, 4).unwrap();
        assert!(rep.blue_triangle.is_none());
        assert_eq!(rep.red_clique.as_ref().map(Vec::len), Some(4));
        let w = rep.bipartite_red_copy.unwrap();
        w.validate(&red, m.graph()).unwrap();
        // left vertices in [1,4], right in [5,8]
        assert!(w.map[..2].iter().all(|&v| v <= 4));
        assert!(w.map[2..].iter().all(|&v| v >= 5));

        // two red cliques on [1,n], [n+1,2n]: no blue triangle, clique of
        // size n, no bipartite red copy (all crossing edges blue)
        let split = OrderedColoring::from_fn(8, |i, j| {
            if (i <= 4) == (j <= 4) {
                Color::Red
            } else {
                Color::Blue
            }
        });
        let rep = three_structure_check(&split, &m, 4).unwrap();
        assert!(rep.blue_triangle.is_none());
        assert_eq!(rep.red_clique, Some(vec![1, 2, 3, 4]));
        assert!(rep.bipartite_red_copy.is_none());
    }

    #[test]
    fn bipartite_embed_matches_slow_containment_on_random_hosts() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(0x3d);
        for _ in 0..200 {
            let half = rng.random_range(2..=5usize);
            let p = Permutation::random(rng.random_range(1..=half.min(3)), &mut rng);
            let m = perm_to_matching(&p);
            let c = OrderedColoring::from_fn(2 * half, |_, _| {
                if rng.random_bool(0.5) {
                    Color::Blue
                } else {
                    Color::Red
                }
            });
            let fast = bipartite_matching_embed(&c, half as u32, &p);
            // slow oracle: brute force over increasing maps honoring the split
            let mut found = false;
            let k = p.n() as u32;
            let mut stack: Vec<(Vec<u32>, Vec<u32>)> = vec![(vec![], vec![])];
            while let Some((ls, rs)) = stack.pop() {
                if found {
                    break;
                }
                if ls.len() == k as usize && rs.len() == k as usize {
                    let ok = (1..=k).all(|i| {
                        let j = p.values()[i as usize - 1];
                        c.color(ls[i as usize - 1], rs[j as usize - 1]) == Color::Red
                    });
                    if ok {
                        found = true;
                    }
                    continue;
                }
                if ls.len() < k as usize {
                    let lo = ls.last().map_or(1, |&v| v + 1);
                    for v in lo..=half as u32 {
                        let mut ls2 = ls.clone();
                        ls2.push(v);
                        stack.push((ls2, rs.clone()));
                    }
                } else {
                    let lo = rs.last().map_or(half as u32 + 1, |&v| v + 1);
                    for v in lo..=2 * half as u32 {
                        let mut rs2 = rs.clone();
                        rs2.push(v);
                        stack.push((ls.clone(), rs2));
                    }
                }
            }
            assert_eq!(fast.is_some(), found, "half={half} p={:?}", p.values());
            if let Some(w) = fast {
                w.validate(&c, m.graph()).unwrap();
            }
        }
    }

    #[test]
    fn red_clique_search_is_exact_small() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(0xc11e);
        for _ in 0..150 {
            let n = rng.random_range(3..=9usize);
            let c = OrderedColoring::from_fn(n, |_, _| {
                if rng.random_bool(0.5) {
                    Color::Blue
                } else {
                    Color::Red
                }
            });
            // brute force maximal red clique size
            let mut best = 0usize;
            for mask in 0u32..1 << n {
                let verts: Vec<u32> = (1..=n as u32)
                    .filter(|&v| mask >> (v - 1) & 1 == 1)
                    .collect();
                let ok = (0..verts.len()).all(|a| {
                    (a + 1..verts.len()).all(|b| c.color(verts[a], verts[b]) == Color::Red)
                });
                if ok {
                    best = best.max(verts.len());
                }
            }
            for size in 0..=n {
                let got = find_red_clique(&c, size);
                assert_eq!(got.is_some(), size <= best, "n={n} size={size}");
                if let Some(verts) = got {
                    assert_eq!(verts.len(), size);
                    for a in 0..verts.len() {
                        for b in a + 1..verts.len() {
                            assert_eq!(c.color(verts[a], verts[b]), Color::Red);
                        }
                    }
                }
            }
        }
    }
}
