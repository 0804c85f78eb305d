//! Subcommand front end: exact Ramsey search and the conjecture sweep,
//! parenthesis parsing and bound certificates, constructive embedding,
//! permutation statistics, the lower-bound construction, and independent
//! witness verification.
//!
//! Results go to stdout as JSON (CSV only for the Monte Carlo rows);
//! progress heartbeats go to stderr. Exit codes: 0 success, 2 parameter
//! error, 3 budget exhaustion.

use clap::{Args, Parser, Subcommand, ValueEnum};
use oramsey::embed::{embed_pmatching, EmbedError, EmbedOutcome};
use oramsey::graph::{OrderedColoring, OrderedGraph, OrderedMatching};
use oramsey::paren::{bound_pmatching, nested_matching, parse_paren, render_paren, ParenSeq};
use oramsey::perm::{count_compatible_orderings, mc_shift_intersection, ordered_intersection};
use oramsey::search::{
    exact_ramsey, two_clique_coloring, verify_avoidance, RamseyOutcome, RamseyResult,
    SearchOptions, SearchOutcome,
};
use serde_json::{json, Value};
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "oramsey",
    version,
    about = "Ordered Ramsey numbers of matchings vs triangles"
)]
struct Cli {
    /// Output format; csv applies to `perm mc` only
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Append a replayable run record (command, params, seed, outputs, timestamp)
    #[arg(long, global = true)]
    record: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact ordered Ramsey values by pruned exhaustive search
    Ramsey {
        #[command(subcommand)]
        cmd: RamseyCmd,
    },
    /// Parenthesis matchings: parsing, rendering, bound certificates
    Paren {
        #[command(subcommand)]
        cmd: ParenCmd,
    },
    /// Constructive embedding into a host coloring
    Embed {
        #[command(subcommand)]
        cmd: EmbedCmd,
    },
    /// Permutation statistics for interval-chromatic-2 matchings
    Perm {
        #[command(subcommand)]
        cmd: PermCmd,
    },
    /// Lower-bound constructions
    Construct {
        #[command(subcommand)]
        cmd: ConstructCmd,
    },
    /// Independent re-validation of emitted witnesses
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum RamseyCmd {
    /// Least n in a range such that every coloring of K_n contains a red or
    /// blue target copy
    Exact(ExactArgs),
    /// r_<(NM_k, K3) for k = 1..=kmax, seeded by the two-clique construction
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ExactArgs {
    /// Red target: parenthesis string, NM<k>, or K<t>
    #[arg(long)]
    red: String,
    /// Blue target: K<t>, NM<k>, or parenthesis string
    #[arg(long, default_value = "K3")]
    blue: String,
    /// First host size to probe (default: the red target's vertex count)
    #[arg(long)]
    n_start: Option<usize>,
    /// Last host size to probe (default: the certificate bound at eps=1)
    #[arg(long)]
    n_max: Option<usize>,
    /// Node budget, e.g. 500k, 10M, 2G
    #[arg(long, default_value = "100M")]
    budget: String,
    #[arg(long)]
    threads: Option<usize>,
    /// Known avoiding coloring on n_start-1 vertices (text format)
    #[arg(long)]
    seed_witness: Option<PathBuf>,
    /// Write the final below-threshold witness here (text format)
    #[arg(long)]
    out_witness: Option<PathBuf>,
    /// Append per-n JSON records here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip host sizes already settled by records in this file
    #[arg(long)]
    resume: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    kmax: usize,
    #[arg(long, default_value = "100M")]
    budget: String,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    resume: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ParenCmd {
    /// Parenthesis string -> matching edge list
    Parse { seq: String },
    /// Matching text format (file or '-') -> parenthesis string
    Render {
        #[arg(long, default_value = "-")]
        input: String,
    },
    /// Certified upper bound on r_<(M, K3)
    Bound {
        seq: String,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
    },
}

#[derive(Subcommand)]
enum EmbedCmd {
    /// Run the constructive embedder for a matching against a host coloring
    Run {
        /// Non-crossing matching: parenthesis string or NM<k>
        #[arg(long)]
        matching: String,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// Host coloring in text format (file or '-')
        #[arg(long, default_value = "-")]
        coloring: String,
    },
}

#[derive(Subcommand)]
enum PermCmd {
    /// Ordered intersection (LCS) of two duplicate-free sequences
    Int {
        #[arg(long, value_delimiter = ',')]
        a: Vec<u32>,
        #[arg(long, value_delimiter = ',')]
        b: Vec<u32>,
    },
    /// Monte Carlo distribution of Int(pi, pi+h) over seeded random permutations
    Mc {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: u32,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tail exponents alpha for the threshold n^(2/3+alpha)
        #[arg(long, value_delimiter = ',', default_value = "0.4")]
        alpha: Vec<f64>,
        #[arg(long)]
        threads: Option<usize>,
        /// With --format csv: write the JSON summary here
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Count shift-compatible orderings of a value set
    Lemma5 {
        #[arg(long, value_delimiter = ',')]
        u: Vec<u32>,
        #[arg(long)]
        h: u32,
    },
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Two red cliques on 4k-2 vertices with blue cross edges
    TwoClique {
        #[arg(long)]
        k: usize,
        /// Also write the coloring in text format here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Check that a coloring avoids both targets
    Coloring {
        /// Coloring in text format (file or '-'); alternative to --n/--hex
        #[arg(long)]
        coloring: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        hex: Option<String>,
        #[arg(long)]
        red: String,
        #[arg(long, default_value = "K3")]
        blue: String,
    },
}

enum CliError {
    Param(String),
    Budget(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Param(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Param(m) | CliError::Budget(m) => m,
        }
    }
}

fn param<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Param(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            print!("{output}");
            if let Some(path) = &cli.record {
                if let Err(e) = append_run_record(path, &cli, &output) {
                    eprintln!("error: could not write run record: {e}");
                    return ExitCode::from(2);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn append_run_record(path: &PathBuf, cli: &Cli, output: &str) -> std::io::Result<()> {
    use std::io::Write;
    let argv: Vec<String> = std::env::args().collect();
    let record = json!({
        "command": argv.get(1).cloned().unwrap_or_default(),
        "params": argv[1..],
        "seed": seed_of(&cli.command),
        "outputs": output,
        "timestamp": std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        "version": env!("CARGO_PKG_VERSION"),
    });
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    writeln!(f, "{record}")
}

fn seed_of(cmd: &Command) -> u64 {
    match cmd {
        Command::Perm {
            cmd: PermCmd::Mc { seed, .. },
        } => *seed,
        _ => 0,
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    if cli.format == Format::Csv
        && !matches!(
            cli.command,
            Command::Perm {
                cmd: PermCmd::Mc { .. }
            }
        )
    {
        return Err(CliError::Param(
            "--format csv is supported for `perm mc` only".into(),
        ));
    }
    match &cli.command {
        Command::Ramsey { cmd } => match cmd {
            RamseyCmd::Exact(args) => ramsey_exact(args),
            RamseyCmd::Sweep(args) => ramsey_sweep(args),
        },
        Command::Paren { cmd } => match cmd {
            ParenCmd::Parse { seq } => {
                let m = parse_matching_arg(seq)?;
                Ok(format!("{}\n", json!({ "n": m.n(), "edges": m.edges() })))
            }
            ParenCmd::Render { input } => {
                let text = read_input(input)?;
                let g = OrderedGraph::parse_text(&text).map_err(param)?;
                let m = OrderedMatching::new(g.n(), g.edges().to_vec()).map_err(param)?;
                let seq = render_paren(&m).map_err(param)?;
                Ok(format!("{}\n", json!({ "seq": seq.as_str() })))
            }
            ParenCmd::Bound { seq, epsilon } => {
                let m = parse_matching_arg(seq)?;
                let cert = bound_pmatching(&m, *epsilon).map_err(param)?;
                cert.validate().map_err(param)?;
                Ok(format!(
                    "{}\n",
                    json!({
                        "seq": seq,
                        "epsilon": epsilon,
                        "bound": cert.bound,
                        "integer_bound": cert.integer_bound(),
                        "certificate": cert,
                    })
                ))
            }
        },
        Command::Embed { cmd } => match cmd {
            EmbedCmd::Run {
                matching,
                epsilon,
                coloring,
            } => {
                let m = parse_matching_arg(matching)?;
                let text = read_input(coloring)?;
                let host = OrderedColoring::parse_text(&text).map_err(param)?;
                let out = match embed_pmatching(&host, &m, *epsilon) {
                    Ok(out) => out,
                    Err(EmbedError::Size { needed, have }) => {
                        return Err(CliError::Param(format!(
                            "host has {have} vertices but the certificate bound needs {needed}"
                        )))
                    }
                    Err(e) => return Err(param(e)),
                };
                let expected = match out {
                    EmbedOutcome::RedCopy { .. } => Some(m.graph()),
                    _ => None,
                };
                out.validate(&host, expected).map_err(param)?;
                Ok(format!(
                    "{}\n",
                    json!({
                        "n": host.n(),
                        "matching": matching,
                        "epsilon": epsilon,
                        "result": out,
                        "validated": true,
                    })
                ))
            }
        },
        Command::Perm { cmd } => match cmd {
            PermCmd::Int { a, b } => {
                let v = ordered_intersection(a, b).map_err(param)?;
                Ok(format!("{v}\n"))
            }
            PermCmd::Mc {
                n,
                h,
                trials,
                seed,
                alpha,
                threads,
                summary,
            } => {
                let threads = threads_or_default(*threads);
                let every = (*trials / 10).max(1);
                let mut heartbeat = |done: u64| {
                    if done.is_multiple_of(every) || done == *trials {
                        eprintln!("perm mc: {done}/{trials} trials");
                    }
                };
                let report = mc_shift_intersection(
                    *n,
                    *h,
                    *trials,
                    *seed,
                    alpha,
                    threads,
                    Some(&mut heartbeat),
                )
                .map_err(param)?;
                let summary_json = json!({
                    "n": report.n,
                    "h": report.h,
                    "trials": report.trials,
                    "seed": report.seed,
                    "cdf": report.cdf,
                    "thresholds": report.thresholds,
                });
                if cli.format == Format::Csv {
                    if let Some(path) = summary {
                        std::fs::write(path, format!("{summary_json}\n")).map_err(param)?;
                    }
                    let mut out = String::from("n,h,trial,Int\n");
                    for (trial, v) in &report.samples {
                        out.push_str(&format!("{},{},{},{}\n", report.n, report.h, trial, v));
                    }
                    Ok(out)
                } else {
                    Ok(format!(
                        "{}\n",
                        serde_json::to_value(&report).map_err(param)?
                    ))
                }
            }
            PermCmd::Lemma5 { u, h } => {
                let r = count_compatible_orderings(u, *h).map_err(param)?;
                Ok(format!(
                    "{}\n",
                    json!({
                        "u": u,
                        "h": h,
                        "k": r.k,
                        "t": r.t,
                        "count": r.count,
                        "bound": r.bound,
                        "holds": (r.count as f64) <= r.bound,
                    })
                ))
            }
        },
        Command::Construct { cmd } => match cmd {
            ConstructCmd::TwoClique { k, out } => {
                if *k < 1 {
                    return Err(CliError::Param("k must be at least 1".into()));
                }
                let c = two_clique_coloring(*k);
                if let Some(path) = out {
                    std::fs::write(path, c.render_text()).map_err(param)?;
                }
                Ok(format!(
                    "{}\n",
                    json!({ "k": k, "n": c.n(), "hex": c.render_hex() })
                ))
            }
        },
        Command::Verify { cmd } => match cmd {
            VerifyCmd::Coloring {
                coloring,
                n,
                hex,
                red,
                blue,
            } => {
                let host = match (coloring, n, hex) {
                    (Some(input), None, None) => {
                        let text = read_input(input)?;
                        OrderedColoring::parse_text(&text).map_err(param)?
                    }
                    (None, Some(n), Some(hex)) => {
                        OrderedColoring::from_hex(*n, hex).map_err(param)?
                    }
                    _ => {
                        return Err(CliError::Param(
                            "pass either --coloring or both --n and --hex".into(),
                        ))
                    }
                };
                let red_g = parse_target(red)?;
                let blue_g = parse_target(blue)?;
                let report = verify_avoidance(&host, &red_g, &blue_g);
                Ok(format!(
                    "{}\n",
                    json!({
                        "n": host.n(),
                        "red_target": red,
                        "blue_target": blue,
                        "red_copy": report.red_copy,
                        "blue_copy": report.blue_copy,
                        "avoids_both": report.avoids_both(),
                    })
                ))
            }
        },
    }
}

fn threads_or_default(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| {
            std::env::var("ORAMSEY_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1)
        .max(1)
}

fn read_input(spec: &str) -> Result<String, CliError> {
    if spec == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Param(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(spec).map_err(|e| CliError::Param(format!("{spec}: {e}")))
    }
}

/// Budget strings: a plain count or a K/M/G-suffixed one, e.g. `10M`.
fn parse_budget(s: &str) -> Result<u64, CliError> {
    let s = s.trim();
    let (digits, mult) = match s.chars().last() {
        Some('k') | Some('K') => (&s[..s.len() - 1], 1_000u64),
        Some('m') | Some('M') => (&s[..s.len() - 1], 1_000_000),
        Some('g') | Some('G') => (&s[..s.len() - 1], 1_000_000_000),
        _ => (s, 1),
    };
    digits
        .parse::<u64>()
        .map(|v| v * mult)
        .map_err(|_| CliError::Param(format!("bad budget {s:?}")))
}

/// `NM<k>`, `K<t>`, or a parenthesis string.
fn parse_target(s: &str) -> Result<OrderedGraph, CliError> {
    if let Some(k) = s.strip_prefix("NM").or_else(|| s.strip_prefix("nm")) {
        let k: usize = k
            .parse()
            .map_err(|_| CliError::Param(format!("bad nested matching {s:?}")))?;
        return Ok(nested_matching(k).into());
    }
    if let Some(t) = s.strip_prefix('K').or_else(|| s.strip_prefix('k')) {
        if let Ok(t) = t.parse::<usize>() {
            return Ok(OrderedGraph::complete(t));
        }
    }
    Ok(parse_matching_arg(s)?.into())
}

fn parse_matching_arg(s: &str) -> Result<OrderedMatching, CliError> {
    if let Some(k) = s.strip_prefix("NM").or_else(|| s.strip_prefix("nm")) {
        let k: usize = k
            .parse()
            .map_err(|_| CliError::Param(format!("bad nested matching {s:?}")))?;
        return Ok(nested_matching(k));
    }
    let seq = ParenSeq::new(s).map_err(param)?;
    Ok(parse_paren(&seq))
}

fn target_descr(g: &OrderedGraph) -> String {
    if g.edge_count() == g.n() * g.n().saturating_sub(1) / 2 && g.n() >= 1 {
        return format!("K{}", g.n());
    }
    if let Ok(m) = OrderedMatching::new(g.n(), g.edges().to_vec()) {
        if let Ok(seq) = render_paren(&m) {
            return seq.as_str().to_string();
        }
    }
    let pairs: Vec<String> = g.edges().iter().map(|(i, j)| format!("{i}-{j}")).collect();
    format!("{}:{}", g.n(), pairs.join(","))
}

// ---------------------------------------------------------------------------
// search record persistence

fn search_record(red: &str, blue: &str, n: usize, outcome: &SearchOutcome, nodes: u64) -> Value {
    let (name, hex) = match outcome {
        SearchOutcome::AvoidingFound { coloring } => {
            ("avoiding_found", Some(coloring.render_hex()))
        }
        SearchOutcome::Exhausted => ("exhausted", None),
        SearchOutcome::BudgetExceeded => ("budget_exceeded", None),
    };
    json!({
        "red_target": red,
        "blue_target": blue,
        "n": n,
        "outcome": name,
        "witness_hex": hex,
        "nodes": nodes,
        "seed": 0,
    })
}

fn append_records(path: &PathBuf, records: &[Value]) -> Result<(), CliError> {
    use std::io::Write;
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(param)?;
    for r in records {
        writeln!(f, "{r}").map_err(param)?;
    }
    Ok(())
}

struct Resumed {
    /// Largest recorded host size with an avoiding coloring, and the witness.
    best_found: Option<(usize, OrderedColoring)>,
    /// Recorded host sizes with a conclusive `exhausted`.
    exhausted: Vec<usize>,
}

fn load_resume(path: &PathBuf, red: &str, blue: &str) -> Result<Resumed, CliError> {
    let text = std::fs::read_to_string(path).map_err(param)?;
    let mut best_found: Option<(usize, OrderedColoring)> = None;
    let mut exhausted = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(line)
            .map_err(|e| CliError::Param(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        if v["red_target"] != red || v["blue_target"] != blue {
            continue;
        }
        let n = v["n"].as_u64().unwrap_or(0) as usize;
        match v["outcome"].as_str() {
            Some("avoiding_found") => {
                if let Some(hex) = v["witness_hex"].as_str() {
                    let c = OrderedColoring::from_hex(n, hex).map_err(param)?;
                    if best_found.as_ref().is_none_or(|(bn, _)| n > *bn) {
                        best_found = Some((n, c));
                    }
                }
            }
            Some("exhausted") => exhausted.push(n),
            _ => {}
        }
    }
    Ok(Resumed {
        best_found,
        exhausted,
    })
}

fn ramsey_result_json(red: &str, blue: &str, result: &RamseyResult) -> (Value, Vec<Value>, bool) {
    let records: Vec<Value> = result
        .records
        .iter()
        .map(|r| search_record(red, blue, r.n, &r.outcome, r.nodes))
        .collect();
    let (outcome_json, budget_limited) = match &result.outcome {
        RamseyOutcome::Exact {
            value,
            witness_below,
        } => (
            json!({
                "kind": "exact",
                "value": value,
                "witness_n": witness_below.as_ref().map(|w| w.n()),
                "witness_hex": witness_below.as_ref().map(|w| w.render_hex()),
                "proof_above": result.proof_above(),
            }),
            false,
        ),
        RamseyOutcome::Bracket {
            lower_exclusive,
            probed_to,
            budget_limited,
        } => (
            json!({
                "kind": "bracket",
                "lower_exclusive": lower_exclusive,
                "probed_to": probed_to,
                "budget_limited": budget_limited,
            }),
            *budget_limited,
        ),
    };
    // timing stays off stdout so that replays are byte-identical
    eprintln!(
        "search for red={red} blue={blue}: {} nodes in {:.2}s",
        result.total_nodes, result.elapsed_secs
    );
    (
        json!({
            "red_target": red,
            "blue_target": blue,
            "result": outcome_json,
            "nodes": result.total_nodes,
        }),
        records,
        budget_limited,
    )
}

fn search_heartbeat(nodes: u64) {
    eprintln!("search: {nodes} nodes");
}

fn ramsey_exact(args: &ExactArgs) -> Result<String, CliError> {
    let red = parse_target(&args.red)?;
    let blue = parse_target(&args.blue)?;
    let red_descr = target_descr(&red);
    let blue_descr = target_descr(&blue);
    let opts = SearchOptions {
        max_nodes: parse_budget(&args.budget)?,
        threads: threads_or_default(args.threads),
    };
    let mut n_start = args.n_start.unwrap_or_else(|| red.n().max(1));
    let n_max = match args.n_max {
        Some(v) => v,
        None => default_n_max(&red, &blue)?,
    };
    if n_start > n_max {
        return Err(CliError::Param(format!(
            "n_start {n_start} exceeds n_max {n_max}"
        )));
    }

    let mut seed = match &args.seed_witness {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(param)?;
            Some(OrderedColoring::parse_text(&text).map_err(param)?)
        }
        None => None,
    };
    if let Some(path) = &args.resume {
        let resumed = load_resume(path, &red_descr, &blue_descr)?;
        if let Some((n, witness)) = resumed.best_found {
            if resumed.exhausted.contains(&(n + 1)) {
                // fully settled by prior records
                let result = RamseyResult {
                    outcome: RamseyOutcome::Exact {
                        value: n + 1,
                        witness_below: Some(witness),
                    },
                    records: Vec::new(),
                    total_nodes: 0,
                    elapsed_secs: 0.0,
                };
                return finish_exact(args, &red_descr, &blue_descr, &red, &blue, result);
            }
            if n >= n_start.saturating_sub(1) {
                n_start = n + 1;
                seed = Some(witness);
            }
        }
    }

    let result = exact_ramsey(
        &red,
        &blue,
        n_start,
        n_max,
        seed.as_ref(),
        &opts,
        Some(&search_heartbeat),
    )
    .map_err(param)?;
    finish_exact(args, &red_descr, &blue_descr, &red, &blue, result)
}

fn finish_exact(
    args: &ExactArgs,
    red_descr: &str,
    blue_descr: &str,
    red: &OrderedGraph,
    blue: &OrderedGraph,
    result: RamseyResult,
) -> Result<String, CliError> {
    if let RamseyOutcome::Exact {
        witness_below: Some(w),
        ..
    } = &result.outcome
    {
        // close the loop before reporting
        if !verify_avoidance(w, red, blue).avoids_both() {
            return Err(CliError::Param(
                "internal error: witness failed independent re-validation".into(),
            ));
        }
        if let Some(path) = &args.out_witness {
            std::fs::write(path, w.render_text()).map_err(param)?;
        }
    }
    let (payload, records, budget_limited) = ramsey_result_json(red_descr, blue_descr, &result);
    if let Some(path) = &args.out {
        append_records(path, &records)?;
    }
    if budget_limited {
        eprintln!("{payload}");
        return Err(CliError::Budget(
            "node budget exhausted; best bracket printed above".to_string(),
        ));
    }
    Ok(format!("{payload}\n"))
}

fn default_n_max(red: &OrderedGraph, blue: &OrderedGraph) -> Result<usize, CliError> {
    // a certificate bound gives a sound default ceiling for non-crossing
    // matchings against K3
    if blue.n() == 3 && blue.edge_count() == 3 {
        if let Ok(m) = OrderedMatching::new(red.n(), red.edges().to_vec()) {
            if m.is_noncrossing() && m.is_perfect() {
                let cert = bound_pmatching(&m, 1.0).map_err(param)?;
                return Ok((cert.integer_bound() as usize).min(64));
            }
        }
    }
    Err(CliError::Param(
        "pass --n-max: no default ceiling for this target pair".into(),
    ))
}

fn ramsey_sweep(args: &SweepArgs) -> Result<String, CliError> {
    if args.kmax < 1 {
        return Err(CliError::Param("kmax must be at least 1".into()));
    }
    let opts = SearchOptions {
        max_nodes: parse_budget(&args.budget)?,
        threads: threads_or_default(args.threads),
    };
    let blue = OrderedGraph::complete(3);
    let mut rows = Vec::new();
    let mut all_records = Vec::new();
    let mut any_budget_limited = false;
    for k in 1..=args.kmax {
        let red: OrderedGraph = nested_matching(k).into();
        let red_descr = target_descr(&red);
        let mut n_start = 4 * k - 1;
        let mut seed = Some(two_clique_coloring(k));
        let mut settled: Option<RamseyResult> = None;
        if let Some(path) = &args.resume {
            if path.exists() {
                let resumed = load_resume(path, &red_descr, "K3")?;
                if let Some((n, witness)) = resumed.best_found {
                    if resumed.exhausted.contains(&(n + 1)) {
                        settled = Some(RamseyResult {
                            outcome: RamseyOutcome::Exact {
                                value: n + 1,
                                witness_below: Some(witness),
                            },
                            records: Vec::new(),
                            total_nodes: 0,
                            elapsed_secs: 0.0,
                        });
                    } else if n >= n_start.saturating_sub(1) {
                        n_start = n + 1;
                        seed = Some(witness);
                    }
                }
            }
        }
        let result = match settled {
            Some(r) => r,
            None => {
                eprintln!("sweep: k={k}, probing {n_start}..={}", 6 * k);
                exact_ramsey(
                    &red,
                    &blue,
                    n_start,
                    6 * k,
                    seed.as_ref(),
                    &opts,
                    Some(&search_heartbeat),
                )
                .map_err(param)?
            }
        };
        if let RamseyOutcome::Exact {
            witness_below: Some(w),
            ..
        } = &result.outcome
        {
            if !verify_avoidance(w, &red, &blue).avoids_both() {
                return Err(CliError::Param(
                    "internal error: sweep witness failed re-validation".into(),
                ));
            }
        }
        let (payload, records, budget_limited) = ramsey_result_json(&red_descr, "K3", &result);
        any_budget_limited |= budget_limited;
        all_records.extend(records);
        let mut row = payload;
        row["k"] = json!(k);
        row["construction_n"] = json!(4 * k - 2);
        row["upper_bound"] = json!(6 * k);
        rows.push(row);
        if let Some(path) = &args.out {
            append_records(path, &all_records.split_off(0))?;
        }
    }
    let table = Value::Array(rows);
    if any_budget_limited {
        eprintln!("{table}");
        return Err(CliError::Budget(
            "node budget exhausted on at least one sweep level; table printed above".into(),
        ));
    }
    Ok(format!("{table}\n"))
}
