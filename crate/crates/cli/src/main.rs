use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use bnobs::bounds::{
    andor_entropy_bound, best_case_and_or, best_case_nc, coefficient_table, count_bound,
    fixed_point_bound, nc_entropy_bound, BoundReport, CoefficientRow,
};
use bnobs::claimcheck::{verify, with_jobs, Claim, ClaimParams, ClaimResult, Status};
use bnobs::families::{gen, Family, FamilyParams};
use bnobs::observability::{check, min_observers, SearchOutcome, DEFAULT_SEARCH_CAP};
use bnobs::state_space::{
    max_count, row_state, summarize, transition_table, StateSpaceSummary, DEFAULT_ENUMERATION_CAP,
};
use bnobs::{parse, serialize, Error, Network, NetworkFile, ObservationScheme, State};

/// Overrides the enumeration cap (largest `n` enumerated exhaustively).
const CAP_ENV: &str = "BNOBS_MAX_NODES";

#[derive(Parser)]
#[command(name = "bnobs", version, about = "Observability analysis for synchronous Boolean networks")]
struct Cli {
    /// Largest node count enumerated exhaustively [env: BNOBS_MAX_NODES] [default: 24]
    #[arg(long, global = true, value_name = "N")]
    max_nodes: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a network file and print its canonical form.
    Parse { file: PathBuf },
    /// Generate a constructive family or a named example.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long = "k", value_name = "K")]
        k: Option<usize>,
        #[arg(long = "n", value_name = "N")]
        n: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time-1 image statistics, fixed points and counting bounds.
    Summary {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Transition table of every initial state.
    Table {
        file: PathBuf,
        #[arg(long)]
        steps: usize,
        /// Write CSV here ("-" for stdout) instead of the text table.
        #[arg(long, value_name = "OUT")]
        csv: Option<PathBuf>,
    },
    /// Decide observability under the file's or the given observers.
    Check {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', value_name = "NODES")]
        observe: Option<Vec<usize>>,
        #[arg(long)]
        expect: Option<Expectation>,
        #[arg(long)]
        json: bool,
    },
    /// Smallest observation scheme.
    MinObservers {
        file: PathBuf,
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        jobs: Jobs,
    },
    /// Closed-form bounds for a class, or instance bounds for a file.
    Bounds(BoundsArgs),
    /// Coefficient comparison rows and inequality flags.
    Coeffs {
        #[arg(long, default_value_t = 2)]
        k_min: u32,
        #[arg(long, default_value_t = 16)]
        k_max: u32,
        #[arg(long, value_name = "OUT")]
        csv: Option<PathBuf>,
    },
    /// Exhaustive claim checks and construction validation.
    Verify {
        #[arg(long)]
        claim: Claim,
        #[arg(long = "n", value_name = "N")]
        n: Option<usize>,
        #[arg(long = "k", value_name = "K")]
        k: Option<usize>,
        /// Sample count when n is beyond exhaustive reach.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        jobs: Jobs,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct Jobs {
    /// Worker threads (default: all cores).
    #[arg(long, value_name = "J")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct BoundsArgs {
    file: Option<PathBuf>,
    #[arg(long, conflicts_with = "file", requires_all = ["k", "n"])]
    class: Option<BoundClass>,
    #[arg(long = "k", value_name = "K")]
    k: Option<u32>,
    #[arg(long = "n", value_name = "N")]
    n: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundClass {
    AndOr,
    Nc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Expectation {
    Observable,
    Unobservable,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Syntax { .. } | Error::Invalid(_) | Error::EmptyScheme => 2,
            Error::CapExceeded { .. } | Error::Constraint(_) | Error::NotXor { .. } => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cap = match cap_override(cli.max_nodes) {
        Ok(c) => c,
        Err(f) => return fail(f),
    };
    match run(cli.command, cap) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => fail(f),
    }
}

fn fail(f: Failure) -> ExitCode {
    eprintln!("error: {}", f.message);
    ExitCode::from(f.code)
}

fn cap_override(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::usage(format!("{CAP_ENV} must be a node count, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn run(command: Command, cap_override: Option<usize>) -> Outcome {
    let cap = cap_override.unwrap_or(DEFAULT_ENUMERATION_CAP);
    match command {
        Command::Parse { file } => {
            let f = load(&file)?;
            Ok(serialize(&f.network, f.scheme.as_ref()))
        }
        Command::Gen { family, k, n, output } => cmd_gen(family, FamilyParams { n, k }, output),
        Command::Summary { file, json } => cmd_summary(&load(&file)?.network, cap, json),
        Command::Table { file, steps, csv } => cmd_table(&load(&file)?.network, steps, csv, cap),
        Command::Check {
            file,
            observe,
            expect,
            json,
        } => cmd_check(load(&file)?, observe, expect, json, cap),
        Command::MinObservers { file, budget, jobs } => {
            let search_cap = cap_override.unwrap_or(DEFAULT_SEARCH_CAP);
            cmd_min_observers(&load(&file)?.network, budget, jobs.jobs, search_cap)
        }
        Command::Bounds(args) => cmd_bounds(args, cap),
        Command::Coeffs { k_min, k_max, csv } => cmd_coeffs(k_min, k_max, csv),
        Command::Verify {
            claim,
            n,
            k,
            samples,
            seed,
            jobs,
            json,
        } => cmd_verify(
            claim,
            ClaimParams { n, k, samples, seed },
            jobs.jobs,
            json,
        ),
    }
}

fn load(path: &Path) -> Result<NetworkFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure {
        message: format!("{}: {e}", path.display()),
        ..Failure::from(e)
    })
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn cmd_gen(family: Family, params: FamilyParams, output: Option<PathBuf>) -> Outcome {
    let inst = gen(family, params)?;
    let mut text = format!("# family {family}");
    if let Some(k) = inst.k {
        write!(text, ", K = {k}").unwrap();
    }
    writeln!(text, ", n = {}", inst.n).unwrap();
    writeln!(text, "# class {}", inst.class).unwrap();
    if let Some(m) = inst.claimed_m {
        write!(text, "# claimed m = {m}").unwrap();
        if let Some(h) = inst.claimed_horizon {
            write!(text, ", horizon {h}").unwrap();
        }
        text.push('\n');
    }
    text.push_str(&serialize(&inst.network, inst.scheme.as_ref()));
    match output {
        Some(path) => {
            write_out(&path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// Image states in `x1`-major binary order, as the tables list them.
fn table_order(summary: &StateSpaceSummary) -> Vec<(u64, u64)> {
    (0..1u64 << summary.n)
        .map(|row| row_state(row, summary.n))
        .filter_map(|s| {
            let c = summary.count_of(s);
            (c > 0).then_some((s, c))
        })
        .collect()
}

fn show(summary: &StateSpaceSummary, bits: u64) -> String {
    summary.state(bits).to_string()
}

fn cmd_summary(net: &Network, cap: usize, json: bool) -> Outcome {
    let summary = summarize(net, cap)?;
    let count = count_bound(&summary);
    let fixed = fixed_point_bound(&summary);
    let max = max_count(&summary);
    let fixed_sorted: Vec<String> = {
        let mut f: Vec<u64> = summary.fixed_points.clone();
        f.sort_by_key(|&s| s.reverse_bits());
        f.into_iter().map(|s| show(&summary, s)).collect()
    };
    if json {
        let counts: Vec<_> = table_order(&summary)
            .into_iter()
            .map(|(s, c)| json!({ "state": show(&summary, s), "count": c }))
            .collect();
        return Ok(to_json(&json!({
            "n": summary.n,
            "r": summary.r,
            "counts": counts,
            "max_count": max,
            "fixed_points": fixed_sorted,
            "ones_frequency": summary.ones_frequency,
            "bounds": { "count": count, "fixed_point": fixed },
        })));
    }
    let mut out = String::new();
    writeln!(out, "n = {}, r = {} distinct time-1 states", summary.n, summary.r).unwrap();
    writeln!(out, "COUNT:").unwrap();
    for (s, c) in table_order(&summary) {
        writeln!(out, "  {}  {c}", show(&summary, s)).unwrap();
    }
    writeln!(out, "max COUNT {max}; count bound m ≥ {}", count.integer).unwrap();
    writeln!(
        out,
        "fixed points {} [{}]; fixed-point bound m ≥ {}",
        fixed_sorted.len(),
        fixed_sorted.join(", "),
        fixed.integer
    )
    .unwrap();
    let ones: Vec<String> = summary.ones_frequency.iter().map(u64::to_string).collect();
    writeln!(out, "ones at t=1: {}", ones.join(", ")).unwrap();
    Ok(out)
}

fn cmd_table(net: &Network, steps: usize, csv: Option<PathBuf>, cap: usize) -> Outcome {
    let table = transition_table(net, steps, cap)?;
    let Some(path) = csv else {
        return Ok(table.to_text());
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::usage(e.to_string());
    w.write_record(table.header()).map_err(io)?;
    for row in table.cells() {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::usage(e.to_string()))?;
    let text = String::from_utf8(bytes).expect("ascii");
    if path.as_os_str() == "-" {
        Ok(text)
    } else {
        write_out(&path, &text)?;
        Ok(String::new())
    }
}

fn cmd_check(
    file: NetworkFile,
    observe: Option<Vec<usize>>,
    expect: Option<Expectation>,
    json: bool,
    cap: usize,
) -> Outcome {
    let scheme = match observe {
        Some(nodes) => ObservationScheme::new(nodes),
        None => file.scheme.ok_or_else(|| {
            Failure::usage("no observers: add an `observe:` line or pass --observe")
        })?,
    };
    let verdict = check(&file.network, &scheme, cap)?;
    let witness = verdict
        .witness
        .as_ref()
        .map(|(a, b): &(State, State)| [a.to_string(), b.to_string()]);
    let out = if json {
        to_json(&json!({
            "observers": scheme.nodes(),
            "observable": verdict.observable,
            "horizon": verdict.horizon,
            "witness": witness,
        }))
    } else if let Some(h) = verdict.horizon {
        format!("observable, horizon {h}\n")
    } else {
        let [a, b] = witness.expect("unobservable verdicts carry a witness");
        format!("unobservable, witness {a} / {b}\n")
    };
    match expect {
        Some(e) if (e == Expectation::Observable) != verdict.observable => {
            print!("{out}");
            Err(Failure {
                code: 4,
                message: format!(
                    "expected {}",
                    if verdict.observable { "unobservable" } else { "observable" }
                ),
            })
        }
        _ => Ok(out),
    }
}

fn cmd_min_observers(net: &Network, budget: Option<usize>, jobs: Option<usize>, cap: usize) -> Outcome {
    let search = with_jobs(jobs, || min_observers(net, budget, cap))??;
    let mut out = String::new();
    match &search.outcome {
        SearchOutcome::Found { m, scheme } => {
            writeln!(out, "m* = {m}, observers {scheme}").unwrap();
        }
        SearchOutcome::AtLeast(m) => {
            writeln!(out, "m* ≥ {m}, budget exhausted").unwrap();
        }
    }
    writeln!(
        out,
        "floor {} from counting bounds; {} schemes checked",
        search.floor, search.schemes_checked
    )
    .unwrap();
    Ok(out)
}

fn bound_line(r: &BoundReport) -> String {
    format!("{}: {:.4} -> m ≥ {}\n", r.kind, r.value, r.integer)
}

fn cmd_bounds(args: BoundsArgs, cap: usize) -> Outcome {
    let mut out = String::new();
    if let Some(class) = args.class {
        let (k, n) = (args.k.expect("required"), args.n.expect("required"));
        if k < 2 {
            return Err(Failure::usage("--k must be at least 2"));
        }
        let (lower, best) = match class {
            BoundClass::AndOr => (andor_entropy_bound(n, k), best_case_and_or(n, k)),
            BoundClass::Nc => (nc_entropy_bound(n, k), best_case_nc(n, k)),
        };
        out.push_str(&bound_line(&lower));
        writeln!(out, "{}: {:.4} observers achievable", best.kind, best.value).unwrap();
        if matches!(class, BoundClass::AndOr) && k == 2 {
            writeln!(
                out,
                "note: coefficient {:.5} (0.188 when truncated to three places)",
                lower.value / n as f64
            )
            .unwrap();
        }
        return Ok(out);
    }
    let Some(file) = args.file else {
        return Err(Failure::usage("give a network file or --class with --k and --n"));
    };
    let net = load(&file)?.network;
    let summary = summarize(&net, cap)?;
    out.push_str(&bound_line(&count_bound(&summary)));
    out.push_str(&bound_line(&fixed_point_bound(&summary)));
    let class = net.classify();
    if let Some(k) = class.k.filter(|&k| k >= 2) {
        if class.and_or {
            out.push_str(&bound_line(&andor_entropy_bound(net.n(), k as u32)));
        } else if class.nested_canalyzing {
            out.push_str(&bound_line(&nc_entropy_bound(net.n(), k as u32)));
        }
    }
    Ok(out)
}

fn cmd_coeffs(k_min: u32, k_max: u32, csv: Option<PathBuf>) -> Outcome {
    if k_min > k_max {
        return Err(Failure::usage("--k-min exceeds --k-max"));
    }
    if k_max > 60 {
        return Err(Failure::usage("--k-max is limited to 60"));
    }
    let rows = coefficient_table(k_min, k_max);
    match csv {
        Some(path) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Failure::usage(e.to_string());
            for r in &rows {
                w.serialize(r).map_err(io)?;
            }
            let text = String::from_utf8(w.into_inner().map_err(|e| Failure::usage(e.to_string()))?)
                .expect("utf-8");
            if path.as_os_str() == "-" {
                Ok(text)
            } else {
                write_out(&path, &text)?;
                Ok(String::new())
            }
        }
        None => {
            let mut out = CoefficientRow::HEADER[..7].join(", ");
            out.push('\n');
            for r in &rows {
                writeln!(out, "{r}").unwrap();
            }
            Ok(out)
        }
    }
}

fn cmd_verify(claim: Claim, params: ClaimParams, jobs: Option<usize>, json: bool) -> Outcome {
    let result = verify(claim, params, jobs)?;
    eprintln!("elapsed {:.2} s", result.elapsed.as_secs_f64());
    if json {
        return Ok(to_json(&result));
    }
    Ok(render_claim(&result))
}

fn render_claim(r: &ClaimResult) -> String {
    let mut out = String::new();
    let mut params = Vec::new();
    if let Some(n) = r.params.n {
        params.push(format!("n={n}"));
    }
    if let Some(k) = r.params.k {
        params.push(format!("K={k}"));
    }
    if let Some(s) = r.params.samples {
        params.push(format!("samples={s}"));
    }
    if let Some(s) = r.params.seed {
        params.push(format!("seed={s}"));
    }
    let status = match r.status {
        Status::Verified => "verified",
        Status::Refuted => "refuted",
        Status::Inconclusive => "inconclusive",
    };
    writeln!(out, "claim {} ({}): {status}", r.claim, params.join(", ")).unwrap();
    match r.stats.class_size {
        Some(size) => writeln!(out, "networks examined: {} of {size}", r.stats.networks).unwrap(),
        None => writeln!(out, "networks examined: {}", r.stats.networks).unwrap(),
    }
    writeln!(out, "checks: {}", r.stats.checks).unwrap();
    for (name, value) in &r.stats.metrics {
        writeln!(out, "{name}: {value}").unwrap();
    }
    for note in &r.notes {
        writeln!(out, "note: {note}").unwrap();
    }
    if let Some(ce) = &r.counterexample {
        match ce.index {
            Some(i) => writeln!(out, "counterexample (index {i}):").unwrap(),
            None => writeln!(out, "counterexample:").unwrap(),
        }
        for line in ce.network.lines() {
            writeln!(out, "  {line}").unwrap();
        }
    }
    out
}
