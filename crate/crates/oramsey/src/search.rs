//! Exact ordered Ramsey computation at desk scale.
//!
//! The engine is a depth-first search over edge colorings with edges decided
//! in a fixed order, short spans first: pairs sorted by `(j - i, i)`. Red
//! containment of a nested target binds earliest on short spans, and the
//! span order makes the nesting-chain height of a red edge final the moment
//! the edge is decided (everything it could contain has a strictly smaller
//! span, hence was decided earlier).
//!
//! A branch dies as soon as the decided blue edges close a triangle
//! (incremental bitset intersection) or the decided red edges contain the
//! red target (incremental chain height for nested targets, exhaustive
//! containment otherwise). Both events are monotone under extension, so the
//! pruning is exact. Budgets count search nodes, not wall time.

use crate::graph::{
    contains_ordered, find_blue_triangle, Color, EmbeddingWitness, OrderedColoring, OrderedGraph,
};
use crate::paren::nested_matching;
use serde::Serialize;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("search supports up to 64 vertices, got {n}")]
    TooLarge { n: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub max_nodes: u64,
    pub threads: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_nodes: 100_000_000,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    /// A coloring of `K_n` with no red copy of the red target and no blue
    /// copy of the blue target.
    AvoidingFound {
        #[serde(skip)]
        coloring: OrderedColoring,
    },
    /// The pruned search visited every branch; no avoiding coloring exists.
    Exhausted,
    /// The node budget ran out first.
    BudgetExceeded,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed_secs: f64,
}

enum RedCheck<'a> {
    /// Red target is the nested matching `NM_k`: track chain heights.
    Nested { k: usize },
    /// Anything else: exhaustive containment on the decided red subgraph.
    Generic(&'a OrderedGraph),
}

enum BlueCheck<'a> {
    /// Blue target is `K_3`: bitset adjacency rows.
    Triangle,
    Generic(&'a OrderedGraph),
}

struct Shared<'a> {
    nodes: AtomicU64,
    max_nodes: u64,
    cancel: AtomicBool,
    progress: Option<&'a (dyn Fn(u64) + Sync)>,
}

const FLUSH_EVERY: u64 = 1 << 12;
const PROGRESS_EVERY: u64 = 1 << 22;

enum Stop {
    Budget,
    Cancelled,
}

struct Core<'a> {
    n: u32,
    edges: &'a [(u32, u32)],
    red_check: &'a RedCheck<'a>,
    blue_check: &'a BlueCheck<'a>,
    blue_rows: Vec<u64>,
    decided_red: Vec<((u32, u32), u32)>, // edge, chain height ending at it
    decided_blue: Vec<(u32, u32)>,
    local_nodes: u64,
    shared: &'a Shared<'a>,
}

impl<'a> Core<'a> {
    fn new(
        n: u32,
        edges: &'a [(u32, u32)],
        red_check: &'a RedCheck<'a>,
        blue_check: &'a BlueCheck<'a>,
        shared: &'a Shared<'a>,
    ) -> Self {
        Core {
            n,
            edges,
            red_check,
            blue_check,
            blue_rows: vec![0u64; n as usize + 1],
            decided_red: Vec::new(),
            decided_blue: Vec::new(),
            local_nodes: 0,
            shared,
        }
    }

    fn tick(&mut self) -> Result<(), Stop> {
        self.local_nodes += 1;
        if self.local_nodes.is_multiple_of(FLUSH_EVERY) {
            let before = self.shared.nodes.fetch_add(FLUSH_EVERY, Ordering::Relaxed);
            let after = before + FLUSH_EVERY;
            if after > self.shared.max_nodes {
                return Err(Stop::Budget);
            }
            if self.shared.cancel.load(Ordering::Relaxed) {
                return Err(Stop::Cancelled);
            }
            if let Some(cb) = self.shared.progress {
                if before / PROGRESS_EVERY != after / PROGRESS_EVERY {
                    cb(after);
                }
            }
        }
        Ok(())
    }

    fn try_red(&mut self, pos: usize) -> bool {
        let e = self.edges[pos];
        match self.red_check {
            RedCheck::Nested { k } => {
                // every edge nested inside e has smaller span and is already
                // decided, so this height is final
                let h = 1 + self
                    .decided_red
                    .iter()
                    .filter(|((i, j), _)| e.0 < *i && *j < e.1)
                    .map(|&(_, h)| h)
                    .max()
                    .unwrap_or(0);
                if h as usize >= *k {
                    return false;
                }
                self.decided_red.push((e, h));
                true
            }
            RedCheck::Generic(pattern) => {
                self.decided_red.push((e, 0));
                if self.decided_contains(Color::Red, pattern) {
                    self.decided_red.pop();
                    false
                } else {
                    true
                }
            }
        }
    }

    fn undo_red(&mut self) {
        self.decided_red.pop();
    }

    fn try_blue(&mut self, pos: usize) -> bool {
        let (i, j) = self.edges[pos];
        match self.blue_check {
            BlueCheck::Triangle => {
                if self.blue_rows[i as usize] & self.blue_rows[j as usize] != 0 {
                    return false;
                }
                self.blue_rows[i as usize] |= 1 << (j - 1);
                self.blue_rows[j as usize] |= 1 << (i - 1);
                self.decided_blue.push((i, j));
                true
            }
            BlueCheck::Generic(pattern) => {
                self.decided_blue.push((i, j));
                if self.decided_contains(Color::Blue, pattern) {
                    self.decided_blue.pop();
                    false
                } else {
                    true
                }
            }
        }
    }

    fn undo_blue(&mut self) {
        let (i, j) = self.decided_blue.pop().expect("undo matches assign");
        if matches!(self.blue_check, BlueCheck::Triangle) {
            self.blue_rows[i as usize] &= !(1u64 << (j - 1));
            self.blue_rows[j as usize] &= !(1u64 << (i - 1));
        }
    }

    /// Exhaustive containment of `pattern` in the decided subgraph of one
    /// color. Desk scale: only used for non-standard targets.
    fn decided_contains(&self, color: Color, pattern: &OrderedGraph) -> bool {
        let host: Vec<(u32, u32)> = match color {
            Color::Red => self.decided_red.iter().map(|&(e, _)| e).collect(),
            Color::Blue => self.decided_blue.clone(),
        };
        if pattern.n() > self.n as usize {
            return false;
        }
        let mut back: Vec<Vec<u32>> = vec![Vec::new(); pattern.n() + 1];
        for &(u, v) in pattern.edges() {
            back[v as usize].push(u);
        }
        fn rec(
            n: u32,
            host: &[(u32, u32)],
            back: &[Vec<u32>],
            gn: usize,
            map: &mut Vec<u32>,
            min_host: u32,
        ) -> bool {
            let p = map.len();
            if p == gn {
                return true;
            }
            let remaining = (gn - p - 1) as u32;
            let mut h = min_host;
            while h + remaining <= n {
                let ok = back[p + 1].iter().all(|&q| {
                    let a = map[q as usize - 1];
                    host.contains(&(a, h))
                });
                if ok {
                    map.push(h);
                    if rec(n, host, back, gn, map, h + 1) {
                        return true;
                    }
                    map.pop();
                }
                h += 1;
            }
            false
        }
        rec(self.n, &host, &back, pattern.n(), &mut Vec::new(), 1)
    }

    fn dfs(&mut self, pos: usize) -> Result<Option<Vec<(u32, u32)>>, Stop> {
        self.tick()?;
        if pos == self.edges.len() {
            return Ok(Some(self.decided_blue.clone()));
        }
        if self.try_red(pos) {
            let found = self.dfs(pos + 1)?;
            self.undo_red();
            if found.is_some() {
                return Ok(found);
            }
        }
        if self.try_blue(pos) {
            let found = self.dfs(pos + 1)?;
            self.undo_blue();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    /// Enumerates the surviving color assignments of the first `depth` edges.
    fn prefixes(&mut self, depth: usize) -> Vec<Vec<Color>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.prefix_rec(0, depth, &mut cur, &mut out);
        out
    }

    fn prefix_rec(
        &mut self,
        pos: usize,
        depth: usize,
        cur: &mut Vec<Color>,
        out: &mut Vec<Vec<Color>>,
    ) {
        if pos == depth {
            out.push(cur.clone());
            return;
        }
        if self.try_red(pos) {
            cur.push(Color::Red);
            self.prefix_rec(pos + 1, depth, cur, out);
            cur.pop();
            self.undo_red();
        }
        if self.try_blue(pos) {
            cur.push(Color::Blue);
            self.prefix_rec(pos + 1, depth, cur, out);
            cur.pop();
            self.undo_blue();
        }
    }

    fn replay(&mut self, prefix: &[Color]) -> bool {
        for (pos, &color) in prefix.iter().enumerate() {
            let ok = match color {
                Color::Red => self.try_red(pos),
                Color::Blue => self.try_blue(pos),
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Searches for a coloring of `K_n` avoiding a red copy of `red_target` and
/// a blue copy of `blue_target`.
pub fn find_avoiding_coloring(
    n: usize,
    red_target: &OrderedGraph,
    blue_target: &OrderedGraph,
    opts: &SearchOptions,
    progress: Option<&(dyn Fn(u64) + Sync)>,
) -> Result<(SearchOutcome, SearchStats), SearchError> {
    if n > 64 {
        return Err(SearchError::TooLarge { n });
    }
    let start = Instant::now();
    let stats_done = |shared: &Shared, extra: u64| SearchStats {
        nodes: shared.nodes.load(Ordering::Relaxed) + extra,
        elapsed_secs: start.elapsed().as_secs_f64(),
    };

    // a target with no edges embeds into every coloring that is large enough
    for target in [red_target, blue_target] {
        if target.edge_count() == 0 && target.n() <= n {
            return Ok((
                SearchOutcome::Exhausted,
                SearchStats {
                    nodes: 0,
                    elapsed_secs: start.elapsed().as_secs_f64(),
                },
            ));
        }
    }

    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 1..=n as u32 {
        for j in i + 1..=n as u32 {
            edges.push((i, j));
        }
    }
    edges.sort_unstable_by_key(|&(i, j)| (j - i, i));

    let red_check = match nested_order_of(red_target) {
        Some(k) => RedCheck::Nested { k },
        None => RedCheck::Generic(red_target),
    };
    let blue_check = if is_k3(blue_target) {
        BlueCheck::Triangle
    } else {
        BlueCheck::Generic(blue_target)
    };

    let shared = Shared {
        nodes: AtomicU64::new(0),
        max_nodes: opts.max_nodes,
        cancel: AtomicBool::new(false),
        progress,
    };

    if opts.threads <= 1 {
        let mut core = Core::new(n as u32, &edges, &red_check, &blue_check, &shared);
        let result = core.dfs(0);
        shared
            .nodes
            .fetch_add(core.local_nodes % FLUSH_EVERY, Ordering::Relaxed);
        let stats = stats_done(&shared, 0);
        return Ok(match result {
            Ok(Some(blue_pairs)) => (
                SearchOutcome::AvoidingFound {
                    coloring: OrderedColoring::from_blue_pairs(n, &blue_pairs)
                        .expect("search pairs are valid"),
                },
                stats,
            ),
            Ok(None) => (SearchOutcome::Exhausted, stats),
            Err(Stop::Budget) => (SearchOutcome::BudgetExceeded, stats),
            Err(Stop::Cancelled) => unreachable!("nothing cancels a sequential search"),
        });
    }

    // split the tree at a fixed depth into independent subproblems
    let depth = edges
        .len()
        .min((opts.threads * 8).next_power_of_two().trailing_zeros() as usize);
    let prefixes = {
        let mut core = Core::new(n as u32, &edges, &red_check, &blue_check, &shared);
        let p = core.prefixes(depth);
        shared
            .nodes
            .fetch_add(core.local_nodes % FLUSH_EVERY, Ordering::Relaxed);
        p
    };
    let next = AtomicUsize::new(0);
    let budget_hit = AtomicBool::new(false);
    let found: std::sync::Mutex<Vec<Vec<(u32, u32)>>> = std::sync::Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..opts.threads {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= prefixes.len() || shared.cancel.load(Ordering::Relaxed) {
                    return;
                }
                let mut core = Core::new(n as u32, &edges, &red_check, &blue_check, &shared);
                if !core.replay(&prefixes[idx]) {
                    continue;
                }
                match core.dfs(depth) {
                    Ok(Some(blue_pairs)) => {
                        found.lock().unwrap().push(blue_pairs);
                        // cancellation hint only: existence is already settled
                        shared.cancel.store(true, Ordering::Relaxed);
                    }
                    Ok(None) => {}
                    Err(Stop::Budget) => {
                        budget_hit.store(true, Ordering::Relaxed);
                        shared.cancel.store(true, Ordering::Relaxed);
                    }
                    Err(Stop::Cancelled) => {}
                }
                shared
                    .nodes
                    .fetch_add(core.local_nodes % FLUSH_EVERY, Ordering::Relaxed);
            });
        }
    });
    let stats = stats_done(&shared, 0);
    let found = found.into_inner().unwrap();
    if !found.is_empty() {
        // deterministic preference: the lexicographically least witness
        let best = found
            .into_iter()
            .map(|pairs| {
                OrderedColoring::from_blue_pairs(n, &pairs).expect("search pairs are valid")
            })
            .min_by(|a, b| a.render_hex().cmp(&b.render_hex()))
            .unwrap();
        return Ok((SearchOutcome::AvoidingFound { coloring: best }, stats));
    }
    if budget_hit.load(Ordering::Relaxed) {
        return Ok((SearchOutcome::BudgetExceeded, stats));
    }
    Ok((SearchOutcome::Exhausted, stats))
}

fn is_k3(g: &OrderedGraph) -> bool {
    g.n() == 3 && g.edge_count() == 3
}

fn nested_order_of(g: &OrderedGraph) -> Option<usize> {
    let k = g.edge_count();
    if k == 0 || g.n() != 2 * k {
        return None;
    }
    let m = 2 * k as u32 + 1;
    g.edges().iter().all(|&(i, j)| i + j == m).then_some(k)
}

/// A copy of `pattern` in color `color`, using the cheap detectors where the
/// pattern allows: blue triangles via bitsets, nested matchings via the
/// chain bound, everything else via exhaustive containment.
pub fn find_copy(
    c: &OrderedColoring,
    color: Color,
    pattern: &OrderedGraph,
) -> Option<EmbeddingWitness> {
    if color == Color::Blue && is_k3(pattern) {
        return find_blue_triangle(c)
            .map(|(i, j, k)| EmbeddingWitness::new(vec![i, j, k], Color::Blue));
    }
    contains_ordered(c, color, pattern)
}

#[derive(Debug, Clone, Serialize)]
pub struct AvoidReport {
    pub red_copy: Option<EmbeddingWitness>,
    pub blue_copy: Option<EmbeddingWitness>,
}

impl AvoidReport {
    pub fn avoids_both(&self) -> bool {
        self.red_copy.is_none() && self.blue_copy.is_none()
    }
}

/// Re-validates that a coloring avoids both targets, independently of
/// whoever produced it.
pub fn verify_avoidance(
    c: &OrderedColoring,
    red_target: &OrderedGraph,
    blue_target: &OrderedGraph,
) -> AvoidReport {
    AvoidReport {
        red_copy: find_copy(c, Color::Red, red_target),
        blue_copy: find_copy(c, Color::Blue, blue_target),
    }
}

/// The two-red-cliques coloring on `4k-2` vertices: `{1,..,2k-1}` and
/// `{2k,..,4k-2}` are red cliques, all cross pairs blue. The blue graph is
/// bipartite (no blue triangle) and no red edge spans more than `2k-2`, so
/// no red nested matching reaches `k` levels.
pub fn two_clique_coloring(k: usize) -> OrderedColoring {
    assert!(k >= 1, "two-clique construction needs k >= 1");
    let cut = (2 * k - 1) as u32;
    OrderedColoring::from_fn(4 * k - 2, |i, j| {
        if (i <= cut) == (j <= cut) {
            Color::Red
        } else {
            Color::Blue
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NRecord {
    pub n: usize,
    pub outcome: SearchOutcome,
    pub nodes: u64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RamseyOutcome {
    /// `value` is the least `n` such that every coloring of `K_n` contains
    /// one of the targets; `witness_below` avoids both on `value - 1`
    /// vertices (absent only when `value == 0`).
    Exact {
        value: usize,
        #[serde(skip)]
        witness_below: Option<OrderedColoring>,
    },
    /// Search stopped early: avoiding colorings exist through
    /// `lower_exclusive`, nothing is known beyond `probed_to`.
    Bracket {
        lower_exclusive: usize,
        probed_to: usize,
        budget_limited: bool,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct RamseyResult {
    pub outcome: RamseyOutcome,
    pub records: Vec<NRecord>,
    pub total_nodes: u64,
    pub elapsed_secs: f64,
}

impl RamseyResult {
    /// For exact outcomes: the statement that pins the value from above,
    /// naming the exhaustive search that found no avoiding coloring.
    pub fn proof_above(&self) -> Option<String> {
        let RamseyOutcome::Exact { value, .. } = &self.outcome else {
            return None;
        };
        let exhausted = self
            .records
            .iter()
            .find(|r| r.n == *value && matches!(r.outcome, SearchOutcome::Exhausted));
        Some(match exhausted {
            Some(r) => format!(
                "exhaustive search at n={value} visited every branch ({} nodes) \
                 and found no avoiding coloring",
                r.nodes
            ),
            None => format!("no avoiding coloring exists at n={value} (settled earlier)"),
        })
    }
}

/// Computes the least `n` in `n_start..=n_max` with no avoiding coloring,
/// walking upward and reusing witnesses. Avoidance is downward closed
/// (restricting an avoiding coloring keeps it avoiding), so if the first
/// probe is already exhausted the walk continues downward until a witness
/// pins the exact value.
///
/// `seed_witness` is an optional known avoiding coloring on `n_start - 1`
/// vertices (it is re-validated before use).
pub fn exact_ramsey(
    red_target: &OrderedGraph,
    blue_target: &OrderedGraph,
    n_start: usize,
    n_max: usize,
    seed_witness: Option<&OrderedColoring>,
    opts: &SearchOptions,
    progress: Option<&(dyn Fn(u64) + Sync)>,
) -> Result<RamseyResult, SearchError> {
    assert!(n_start <= n_max, "n_start must not exceed n_max");
    let start = Instant::now();
    let mut records = Vec::new();
    let mut total_nodes = 0u64;
    let mut best_witness: Option<(usize, OrderedColoring)> = seed_witness.and_then(|w| {
        (w.n() + 1 == n_start && verify_avoidance(w, red_target, blue_target).avoids_both())
            .then(|| (w.n(), w.clone()))
    });

    let run = |n: usize, records: &mut Vec<NRecord>, total: &mut u64| {
        let (outcome, stats) = find_avoiding_coloring(n, red_target, blue_target, opts, progress)?;
        *total += stats.nodes;
        records.push(NRecord {
            n,
            outcome: outcome.clone(),
            nodes: stats.nodes,
        });
        Ok::<SearchOutcome, SearchError>(outcome)
    };

    let finish = |outcome, records: Vec<NRecord>, total_nodes| RamseyResult {
        outcome,
        records,
        total_nodes,
        elapsed_secs: start.elapsed().as_secs_f64(),
    };

    let mut exhausted_at: Option<usize> = None;
    for n in n_start..=n_max {
        match run(n, &mut records, &mut total_nodes)? {
            SearchOutcome::AvoidingFound { coloring } => {
                best_witness = Some((n, coloring));
            }
            SearchOutcome::Exhausted => {
                exhausted_at = Some(n);
                break;
            }
            SearchOutcome::BudgetExceeded => {
                let lower = best_witness
                    .as_ref()
                    .map_or(n_start.saturating_sub(1), |w| w.0);
                return Ok(finish(
                    RamseyOutcome::Bracket {
                        lower_exclusive: lower,
                        probed_to: n,
                        budget_limited: true,
                    },
                    records,
                    total_nodes,
                ));
            }
        }
    }
    let Some(hi) = exhausted_at else {
        // avoiding colorings all the way up: the value exceeds n_max
        let lower = best_witness
            .as_ref()
            .map_or(n_start.saturating_sub(1), |w| w.0);
        return Ok(finish(
            RamseyOutcome::Bracket {
                lower_exclusive: lower,
                probed_to: n_max,
                budget_limited: false,
            },
            records,
            total_nodes,
        ));
    };
    // pin the witness just below the first exhausted level
    if let Some((wn, w)) = &best_witness {
        if *wn + 1 == hi {
            return Ok(finish(
                RamseyOutcome::Exact {
                    value: hi,
                    witness_below: Some(w.clone()),
                },
                records,
                total_nodes,
            ));
        }
    }
    let mut m = hi;
    while m > 0 {
        m -= 1;
        match run(m, &mut records, &mut total_nodes)? {
            SearchOutcome::AvoidingFound { coloring } => {
                return Ok(finish(
                    RamseyOutcome::Exact {
                        value: m + 1,
                        witness_below: Some(coloring),
                    },
                    records,
                    total_nodes,
                ));
            }
            SearchOutcome::Exhausted => continue,
            SearchOutcome::BudgetExceeded => {
                return Ok(finish(
                    RamseyOutcome::Bracket {
                        lower_exclusive: 0,
                        probed_to: hi,
                        budget_limited: true,
                    },
                    records,
                    total_nodes,
                ));
            }
        }
    }
    Ok(finish(
        RamseyOutcome::Exact {
            value: 0,
            witness_below: None,
        },
        records,
        total_nodes,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub k: usize,
    /// `4k - 2`: the two-clique construction avoids both targets here.
    pub construction_n: usize,
    /// `6k`: embedding succeeds at this size, so the sweep never probes past.
    pub upper_bound: usize,
    pub result: RamseyResult,
}

/// Runs `exact_ramsey(NM_k, K3)` for `k = 1..=k_max`, seeding each level
/// with the two-clique witness and probing `4k-1 ..= 6k`. Budget exhaustion
/// degrades an entry to a bracket instead of hanging.
pub fn conjecture_sweep(
    k_max: usize,
    opts: &SearchOptions,
    progress: Option<&(dyn Fn(u64) + Sync)>,
) -> Result<Vec<SweepEntry>, SearchError> {
    let k3 = OrderedGraph::complete(3);
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let red: OrderedGraph = nested_matching(k).into();
        let seed = two_clique_coloring(k);
        let result = exact_ramsey(&red, &k3, 4 * k - 1, 6 * k, Some(&seed), opts, progress)?;
        out.push(SweepEntry {
            k,
            construction_n: 4 * k - 2,
            upper_bound: 6 * k,
            result,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::OrderedMatching;

    fn single_edge() -> OrderedGraph {
        OrderedMatching::new(2, vec![(1, 2)]).unwrap().into()
    }

    fn k3() -> OrderedGraph {
        OrderedGraph::complete(3)
    }

    fn opts() -> SearchOptions {
        SearchOptions::default()
    }

    /// Naive existence check over all colorings, with brute-force containment.
    fn naive_avoiding_exists(n: usize, red: &OrderedGraph, blue: &OrderedGraph) -> bool {
        fn brute_contains(c: &OrderedColoring, color: Color, g: &OrderedGraph) -> bool {
            fn rec(
                c: &OrderedColoring,
                color: Color,
                g: &OrderedGraph,
                map: &mut Vec<u32>,
                next: u32,
            ) -> bool {
                if map.len() == g.n() {
                    return g
                        .edges()
                        .iter()
                        .all(|&(u, v)| c.color(map[u as usize - 1], map[v as usize - 1]) == color);
                }
                for h in next..=c.n() as u32 {
                    map.push(h);
                    if rec(c, color, g, map, h + 1) {
                        return true;
                    }
                    map.pop();
                }
                false
            }
            rec(c, color, g, &mut Vec::new(), 1)
        }
        let pairs = n * n.saturating_sub(1) / 2;
        (0..1u64 << pairs).any(|mask| {
            let mut t = 0;
            let c = OrderedColoring::from_fn(n, |_, _| {
                let col = if mask >> t & 1 == 1 {
                    Color::Blue
                } else {
                    Color::Red
                };
                t += 1;
                col
            });
            !brute_contains(&c, Color::Red, red) && !brute_contains(&c, Color::Blue, blue)
        })
    }

    #[test]
    fn avoiding_examples() {
        // single red edge vs blue K3 at n=2: the all-blue edge avoids both
        let (out, _) = find_avoiding_coloring(2, &single_edge(), &k3(), &opts(), None).unwrap();
        match out {
            SearchOutcome::AvoidingFound { coloring } => {
                assert!(coloring.is_blue(1, 2));
            }
            other => panic!("expected witness, got {other:?}"),
        }

        // both targets a single edge: impossible for n >= 2
        for n in 2..=5 {
            let (out, _) =
                find_avoiding_coloring(n, &single_edge(), &single_edge(), &opts(), None).unwrap();
            assert_eq!(out, SearchOutcome::Exhausted, "n={n}");
        }

        // NM_k vs K3 at 4k-2: the construction exists, so the search finds one
        for k in 1..=2usize {
            let red: OrderedGraph = nested_matching(k).into();
            let (out, _) = find_avoiding_coloring(4 * k - 2, &red, &k3(), &opts(), None).unwrap();
            match out {
                SearchOutcome::AvoidingFound { coloring } => {
                    assert!(verify_avoidance(&coloring, &red, &k3()).avoids_both());
                }
                other => panic!("k={k}: {other:?}"),
            }
        }
    }

    #[test]
    fn search_agrees_with_naive_enumeration() {
        let patterns: Vec<OrderedGraph> = vec![
            single_edge(),
            OrderedMatching::new(4, vec![(1, 4), (2, 3)])
                .unwrap()
                .into(),
            OrderedMatching::new(4, vec![(1, 2), (3, 4)])
                .unwrap()
                .into(),
            OrderedMatching::new(4, vec![(1, 3), (2, 4)])
                .unwrap()
                .into(),
        ];
        for n in 1..=5 {
            for red in &patterns {
                for blue in [&k3(), &single_edge()] {
                    let want = naive_avoiding_exists(n, red, blue);
                    let (out, _) = find_avoiding_coloring(n, red, blue, &opts(), None).unwrap();
                    match (want, &out) {
                        (true, SearchOutcome::AvoidingFound { coloring }) => {
                            let report = verify_avoidance(coloring, red, blue);
                            assert!(report.avoids_both(), "n={n} red={red:?}");
                        }
                        (false, SearchOutcome::Exhausted) => {}
                        other => panic!("n={n} red={red:?} blue={blue:?}: {other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn parallel_search_agrees() {
        let red: OrderedGraph = nested_matching(2).into();
        let par = SearchOptions {
            max_nodes: 100_000_000,
            threads: 4,
        };
        for n in [6usize, 7] {
            let (seq_out, _) = find_avoiding_coloring(n, &red, &k3(), &opts(), None).unwrap();
            let (par_out, _) = find_avoiding_coloring(n, &red, &k3(), &par, None).unwrap();
            match (seq_out, par_out) {
                (
                    SearchOutcome::AvoidingFound { coloring: a },
                    SearchOutcome::AvoidingFound { coloring: b },
                ) => {
                    assert!(verify_avoidance(&a, &red, &k3()).avoids_both());
                    assert!(verify_avoidance(&b, &red, &k3()).avoids_both());
                }
                (SearchOutcome::Exhausted, SearchOutcome::Exhausted) => {}
                other => panic!("n={n}: {other:?}"),
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        // NM_3 at n=11 is far beyond a 8192-node budget
        let red: OrderedGraph = nested_matching(3).into();
        let tiny = SearchOptions {
            max_nodes: 1 << 13,
            threads: 1,
        };
        let (out, stats) = find_avoiding_coloring(11, &red, &k3(), &tiny, None).unwrap();
        assert_eq!(out, SearchOutcome::BudgetExceeded);
        assert!(stats.nodes >= 1 << 13);
    }

    #[test]
    fn two_clique_construction() {
        let c = two_clique_coloring(1);
        assert_eq!(c.n(), 2);
        assert!(c.is_blue(1, 2));
        let c = two_clique_coloring(2);
        assert_eq!(c.n(), 6);
        assert_eq!(c.blue_edge_count(), 9);
        for k in 1..=10 {
            let c = two_clique_coloring(k);
            let red: OrderedGraph = nested_matching(k).into();
            assert!(verify_avoidance(&c, &red, &k3()).avoids_both(), "k={k}");
        }
    }

    #[test]
    fn exact_ramsey_single_edge() {
        let res = exact_ramsey(&single_edge(), &k3(), 1, 6, None, &opts(), None).unwrap();
        match res.outcome {
            RamseyOutcome::Exact {
                value,
                witness_below,
            } => {
                assert_eq!(value, 3);
                let w = witness_below.unwrap();
                assert_eq!(w.n(), 2);
                assert!(verify_avoidance(&w, &single_edge(), &k3()).avoids_both());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exact_results_carry_the_exhaustion_statement() {
        let res = exact_ramsey(&single_edge(), &k3(), 1, 6, None, &opts(), None).unwrap();
        let statement = res.proof_above().unwrap();
        assert!(statement.contains("n=3"), "{statement}");
        assert!(statement.contains("no avoiding coloring"), "{statement}");
    }

    #[test]
    fn exact_ramsey_degenerate_empty_pattern() {
        // an edgeless pattern on 3 vertices embeds whenever the host has 3,
        // so the value is exactly its vertex count
        let empty3 = OrderedGraph::empty(3);
        let res = exact_ramsey(&empty3, &k3(), 1, 6, None, &opts(), None).unwrap();
        match res.outcome {
            RamseyOutcome::Exact {
                value,
                witness_below,
            } => {
                assert_eq!(value, 3);
                assert_eq!(witness_below.map(|w| w.n()), Some(2));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exact_ramsey_walks_down_when_start_is_high() {
        // starting above the true value still pins it exactly
        let res = exact_ramsey(&single_edge(), &k3(), 5, 6, None, &opts(), None).unwrap();
        match res.outcome {
            RamseyOutcome::Exact { value, .. } => assert_eq!(value, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn certificate_bounds_dominate_exact_values() {
        use crate::paren::{bound_pmatching, parse_paren, ParenSeq};
        // where the exact value is desk-computable, the certified upper
        // bound must dominate it
        for text in ["()", "(())", "()()"] {
            let m = parse_paren(&ParenSeq::new(text).unwrap());
            let cert = bound_pmatching(&m, 1.0).unwrap();
            let res = exact_ramsey(
                &m.clone().into(),
                &k3(),
                1,
                cert.integer_bound() as usize,
                None,
                &opts(),
                None,
            )
            .unwrap();
            match res.outcome {
                RamseyOutcome::Exact { value, .. } => {
                    assert!(
                        value as u64 <= cert.integer_bound(),
                        "{text}: exact value {value} above certificate {}",
                        cert.integer_bound()
                    );
                }
                other => panic!("{text} must settle within its certificate bound: {other:?}"),
            }
        }
    }

    #[test]
    fn sweep_k2_stays_inside_the_bracket() {
        let entries = conjecture_sweep(2, &opts(), None).unwrap();
        let red: OrderedGraph = nested_matching(2).into();
        match &entries[1].result.outcome {
            RamseyOutcome::Exact {
                value,
                witness_below,
            } => {
                println!("r_<(NM_2, K3) = {value}");
                assert!(6 < *value && *value <= 12);
                let w = witness_below.as_ref().unwrap();
                assert_eq!(w.n() + 1, *value);
                assert!(verify_avoidance(w, &red, &k3()).avoids_both());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweep_k1_is_exact() {
        let entries = conjecture_sweep(1, &opts(), None).unwrap();
        assert_eq!(entries.len(), 1);
        match &entries[0].result.outcome {
            RamseyOutcome::Exact {
                value,
                witness_below,
            } => {
                assert_eq!(*value, 3);
                assert!(witness_below.is_some());
            }
            other => panic!("{other:?}"),
        }
    }
}
