use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sgb_core::{
    amazon_ratings_to_records, build_signed_graph, exact_frustration_parallel,
    largest_connected_component, parse_edge_str, run_graphbpp, run_graphl, ByteBudget,
    EdgeListFormat, Error, GraphBppConfig, GraphLConfig, PreprocessReport, RawEdgeRecord,
    SamplerMethod, Sign, SignedGraph, DEFAULT_MAX_VERTICES,
};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_EMPTY: u8 = 3;
const EXIT_SAMPLER: u8 = 4;
const EXIT_DIVERGED: u8 = 5;
const EXIT_SIZE_GUARD: u8 = 6;

/// Hard ceiling for `oracle --force`; encodings are 64-bit.
const FORCED_MAX_VERTICES: usize = 64;

#[derive(Parser)]
#[command(
    name = "sgb",
    version,
    about = "Frustration index estimation for signed graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample spanning trees and collect nearest balanced states.
    Balance(BalanceArgs),
    /// Gradient-descent balancing with restarts.
    Graphl(GraphlArgs),
    /// Exact frustration index by exhaustive search (small graphs).
    Oracle(OracleArgs),
    /// Run a (method, iterations) matrix and emit one CSV row per cell.
    Bench(BenchArgs),
    /// Convert (user, item, rating) lines into a signed edge list.
    IngestAmazon(IngestArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Input edge list.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, env = "BALANCE_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BalanceArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "bfs")]
    method: String,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    /// Cloud memory budget in bytes, or "auto" for 75% of system memory.
    #[arg(long, default_value = "auto")]
    budget: String,
    #[arg(long)]
    workers: Option<usize>,
    /// Cloud entries included in the JSON report.
    #[arg(long, default_value_t = 10)]
    top_n: usize,
}

#[derive(Args)]
struct GraphlArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0.001, allow_negative_numbers = true)]
    alpha: f64,
    /// Gradient updates per restart.
    #[arg(long, default_value_t = 1000)]
    lambda: usize,
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    /// Keep at most this many loss-trace entries in the JSON report.
    #[arg(long)]
    trace_limit: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Lift the default vertex limit.
    #[arg(long)]
    force: bool,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated method:k cells, e.g. "bfs:100,rdfs:100".
    #[arg(long, default_value = "")]
    matrix: String,
    #[arg(long, default_value = "auto")]
    budget: String,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            Error::Io(_) => EXIT_IO,
            Error::EmptyGraph { .. } => EXIT_EMPTY,
            Error::Disconnected { .. }
            | Error::WalkTimeout { .. }
            | Error::AllIterationsFailed { .. } => EXIT_SAMPLER,
            Error::Divergence { .. } | Error::NotANumber { .. } => EXIT_DIVERGED,
            Error::SizeGuard { .. } => EXIT_SIZE_GUARD,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Balance(a) => cmd_balance(a),
        Command::Graphl(a) => cmd_graphl(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Bench(a) => cmd_bench(a),
        Command::IngestAmazon(a) => cmd_ingest_amazon(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_records(path: &Path) -> Result<(Vec<RawEdgeRecord>, usize), Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let parsed = parse_edge_str(&text, EdgeListFormat::detect(&text));
    Ok((parsed.records, parsed.invalid))
}

/// Parse, clean and reduce to the largest connected component.
fn load_graph(path: &Path) -> Result<SignedGraph, Failure> {
    let (records, invalid) = read_records(path)?;
    let (g, mut report) = build_signed_graph(&records).map_err(|e| match e {
        Error::EmptyGraph { mut report } => {
            report.record_invalid(invalid);
            Error::EmptyGraph { report }
        }
        e => e,
    })?;
    report.record_invalid(invalid);
    let (lcc, _) = largest_connected_component(&g)?;
    eprintln!(
        "loaded {}: {} vertices, {} edges in largest component ({report})",
        path.display(),
        lcc.vertex_count(),
        lcc.edge_count()
    );
    Ok(lcc)
}

fn write_output(out: Option<&Path>, body: &str) -> CmdResult {
    match out {
        Some(p) => fs::write(p, body).map_err(|e| io_failure(p, e)),
        None => io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| Failure {
                code: EXIT_IO,
                message: format!("stdout: {e}"),
            }),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn system_memory_bytes() -> Option<u64> {
    let info = fs::read_to_string("/proc/meminfo").ok()?;
    let line = info.lines().find(|l| l.starts_with("MemTotal:"))?;
    let kib: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kib * 1024)
}

fn parse_budget(text: &str) -> Result<ByteBudget, Failure> {
    if text == "auto" {
        let total = system_memory_bytes()
            .ok_or_else(|| usage("cannot read system memory for --budget auto"))?;
        return Ok(ByteBudget::Bytes(total / 4 * 3));
    }
    match text.parse::<u64>() {
        Ok(0) | Err(_) => Err(usage(format!(
            "--budget must be a positive byte count or \"auto\", got {text:?}"
        ))),
        Ok(b) => Ok(ByteBudget::Bytes(b)),
    }
}

fn resolve_workers(workers: Option<usize>) -> Result<usize, Failure> {
    match workers {
        Some(0) => Err(usage("--workers must be at least 1")),
        Some(w) => Ok(w),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn parse_method(token: &str) -> Result<SamplerMethod, Failure> {
    token.parse::<SamplerMethod>().map_err(Failure::from)
}

#[derive(Serialize)]
struct CloudRow<'a> {
    state_key: &'a str,
    count: u64,
    switches: usize,
}

#[derive(Serialize)]
struct BalanceOutput<'a> {
    vertices: usize,
    edges: usize,
    seed: u64,
    #[serde(flatten)]
    report: &'a sgb_core::RunReport,
    top_states: Vec<CloudRow<'a>>,
}

fn cmd_balance(a: BalanceArgs) -> CmdResult {
    let method = parse_method(&a.method)?;
    if a.iters == 0 {
        return Err(usage("--iters must be at least 1"));
    }
    let budget = parse_budget(&a.budget)?;
    let workers = resolve_workers(a.workers)?;
    let g = load_graph(&a.common.input)?;
    let cfg = GraphBppConfig {
        budget,
        workers,
        ..GraphBppConfig::new(method, a.iters, a.common.seed)
    };
    let (report, cloud) = run_graphbpp(&g, &cfg)?;

    let body = match a.common.format {
        Format::Json => {
            let top_states = cloud
                .iter_ranked()
                .take(a.top_n)
                .map(|(state_key, e)| CloudRow {
                    state_key,
                    count: e.count,
                    switches: e.switches,
                })
                .collect();
            to_json(&BalanceOutput {
                vertices: g.vertex_count(),
                edges: g.edge_count(),
                seed: a.common.seed,
                report: &report,
                top_states,
            })
        }
        Format::Csv => {
            let mut s = String::from("state_key,count,switches\n");
            for (key, e) in cloud.iter_ranked() {
                s.push_str(&format!("\"{key}\",{},{}\n", e.count, e.switches));
            }
            s
        }
    };
    write_output(a.common.out.as_deref(), &body)?;
    eprintln!(
        "frustration index {} ({} distinct states, {} iterations, {:.3} s)",
        report.frustration_index, report.distinct_states, report.iterations, report.wall_time_secs
    );
    Ok(())
}

#[derive(Serialize)]
struct GraphlOutput<'a> {
    vertices: usize,
    edges: usize,
    seed: u64,
    alpha: f64,
    lambda: usize,
    frustration: usize,
    restart_index: usize,
    restart_frustrations: &'a [usize],
    loss_trace: &'a [usize],
}

fn cmd_graphl(a: GraphlArgs) -> CmdResult {
    let cfg = GraphLConfig {
        alpha: a.alpha,
        lambda: a.lambda,
        seed: a.common.seed,
        restarts: a.restarts,
        record_trace: true,
    };
    cfg.validate()?;
    let g = load_graph(&a.common.input)?;
    let start = Instant::now();
    let res = run_graphl(&g, &cfg)?;

    let body = match a.common.format {
        Format::Json => {
            let keep = a
                .trace_limit
                .unwrap_or(usize::MAX)
                .min(res.loss_trace.len());
            to_json(&GraphlOutput {
                vertices: g.vertex_count(),
                edges: g.edge_count(),
                seed: cfg.seed,
                alpha: cfg.alpha,
                lambda: cfg.lambda,
                frustration: res.frustration,
                restart_index: res.restart_index,
                restart_frustrations: &res.restart_frustrations,
                loss_trace: &res.loss_trace[..keep],
            })
        }
        Format::Csv => {
            let mut s = String::from("src,tgt,old_sign,new_sign\n");
            for (e, &new) in g.edges().iter().zip(&res.balanced_signs) {
                if e.sign != new {
                    let (u, v) = (g.label(e.src as usize), g.label(e.tgt as usize));
                    s.push_str(&format!("{u},{v},{},{new}\n", e.sign));
                }
            }
            s
        }
    };
    write_output(a.common.out.as_deref(), &body)?;
    eprintln!(
        "frustration {} (best of {} restarts: {:?}, {:.3} s)",
        res.frustration,
        cfg.restarts,
        res.restart_frustrations,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

#[derive(Serialize)]
struct OracleOutput {
    vertices: usize,
    edges: usize,
    frustration: usize,
    assignments_checked: u64,
    best_theta: Vec<Sign>,
}

fn cmd_oracle(a: OracleArgs) -> CmdResult {
    let workers = resolve_workers(a.workers)?;
    let g = load_graph(&a.common.input)?;
    let max = if a.force {
        FORCED_MAX_VERTICES
    } else {
        DEFAULT_MAX_VERTICES
    };
    let start = Instant::now();
    let res = exact_frustration_parallel(&g, max, workers)?;

    let body = match a.common.format {
        Format::Json => to_json(&OracleOutput {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            frustration: res.frustration,
            assignments_checked: res.assignments_checked,
            best_theta: res.best_theta.0.clone(),
        }),
        Format::Csv => {
            let mut s = String::from("vertex,side\n");
            for (v, side) in res.best_theta.0.iter().enumerate() {
                s.push_str(&format!("{},{side}\n", g.label(v)));
            }
            s
        }
    };
    write_output(a.common.out.as_deref(), &body)?;
    eprintln!(
        "exact frustration index {} ({} assignments, {:.3} s)",
        res.frustration,
        res.assignments_checked,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn parse_matrix(text: &str) -> Result<Vec<(SamplerMethod, usize)>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|cell| !cell.is_empty())
        .map(|cell| {
            let (m, k) = cell
                .split_once(':')
                .ok_or_else(|| usage(format!("matrix cell {cell:?} is not method:k")))?;
            let method = parse_method(m.trim())?;
            let k = match k.trim().parse::<usize>() {
                Ok(k) if k > 0 => k,
                _ => return Err(usage(format!("matrix cell {cell:?} needs a positive k"))),
            };
            Ok((method, k))
        })
        .collect()
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    let cells = parse_matrix(&a.matrix)?;
    let budget = parse_budget(&a.budget)?;
    let workers = resolve_workers(a.workers)?;
    let mut body =
        String::from("method,k,frustration,distinct_states,seconds_per_iteration,total_seconds\n");
    if cells.is_empty() {
        return write_output(a.common.out.as_deref(), &body);
    }
    let g = load_graph(&a.common.input)?;
    let mut last_failure = None;
    let mut ok = 0;
    for (method, k) in cells {
        let cfg = GraphBppConfig {
            budget,
            workers,
            ..GraphBppConfig::new(method, k, a.common.seed)
        };
        match run_graphbpp(&g, &cfg) {
            Ok((r, _)) => {
                ok += 1;
                body.push_str(&format!(
                    "{method},{k},{},{},{:.9},{:.6}\n",
                    r.frustration_index,
                    r.distinct_states,
                    r.wall_time_secs / k as f64,
                    r.wall_time_secs
                ));
                eprintln!("{method} k={k}: frustration {}", r.frustration_index);
            }
            Err(e) => {
                eprintln!("{method} k={k}: {e}");
                body.push_str(&format!("{method},{k},NA,NA,NA,NA\n"));
                last_failure = Some(Failure::from(e));
            }
        }
    }
    write_output(a.common.out.as_deref(), &body)?;
    match last_failure {
        Some(f) if ok == 0 => Err(f),
        _ => Ok(()),
    }
}

fn cmd_ingest_amazon(a: IngestArgs) -> CmdResult {
    let (records, invalid_lines) = read_records(&a.input)?;
    let (signed, ratings) = amazon_ratings_to_records(&records);
    // items get ids past the largest user id so the two sides never collide
    let offset = records.iter().map(|r| r.src).max().map_or(0, |m| m + 1);
    let mut shifted = Vec::with_capacity(signed.len());
    for r in &signed {
        let tgt = r.tgt.checked_add(offset).ok_or_else(|| {
            usage(format!(
                "item id {} overflows after offsetting by {offset}",
                r.tgt
            ))
        })?;
        shifted.push(RawEdgeRecord { tgt, ..*r });
    }
    let annotate = |report: &mut PreprocessReport| {
        report.record_invalid(invalid_lines + ratings.invalid);
    };
    let (g, mut report) = match build_signed_graph(&shifted) {
        Ok(ok) => ok,
        Err(Error::EmptyGraph { mut report }) => {
            annotate(&mut report);
            return Err(Error::EmptyGraph { report }.into());
        }
        Err(e) => return Err(e.into()),
    };
    annotate(&mut report);

    let mut body = format!("# signed edges from ratings; items offset by {offset}\n");
    for e in g.edges() {
        body.push_str(&format!(
            "{} {} {}\n",
            g.label(e.src as usize),
            g.label(e.tgt as usize),
            e.sign
        ));
    }
    write_output(a.out.as_deref(), &body)?;
    eprintln!(
        "ratings: positive={} negative={} neutral_dropped={} invalid={}; {report}",
        ratings.positive, ratings.negative, ratings.neutral_dropped, ratings.invalid
    );
    Ok(())
}
