use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use trimatch::io::{format_instance, format_raw, parse_instance, target_from_ints, MatchingDoc};
use trimatch::oracle::{self, FuzzConfig, TargetPolicy, DEFAULT_CAP};
use trimatch::{solve_with_stats, verify_matching, Error, TargetTriple, Tracer, VerifyReport};

/// Exit codes are a stable contract: 0 success, 1 verification/search
/// failure, 2 invalid input, 3 internal guard tripped.
const EXIT_FAIL: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_GUARD: u8 = 3;

#[derive(Parser)]
#[command(name = "trimatch", version, about = "Matchings with prescribed per-color multiplicities in unions of three disjoint perfect matchings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for a matching with exact per-color counts
    Solve(SolveArgs),
    /// Verify a matching JSON against an instance and target
    Verify(VerifyArgs),
    /// Generate a random instance file on stdout
    Gen(GenArgs),
    /// Run a seeded fuzz campaign (generate, solve, verify, cross-check)
    Fuzz(FuzzArgs),
    /// Brute-force existence check for a target triple
    Oracle(OracleArgs),
    /// Search for structural witnesses
    #[command(subcommand)]
    Search(SearchCommand),
    /// Time the solver across instance sizes
    Bench(BenchArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file: line 1 is n, lines 2-4 the three permutations
    #[arg(long)]
    input: String,
    /// Exact per-color counts a1 a2 a3 (must sum to n-1)
    #[arg(long, num_args = 3, value_names = ["A1", "A2", "A3"])]
    target: Vec<i64>,
    /// Emit one structured pipeline event per line on stderr
    #[arg(long)]
    trace: bool,
    /// Write the matching JSON here instead of stdout
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: String,
    /// Matching JSON file ({"edges":[[u,color],...],"counts":[..]})
    #[arg(long)]
    matching: String,
    #[arg(long, num_args = 3, value_names = ["A1", "A2", "A3"])]
    target: Vec<i64>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// Seed for the deterministic generator; chosen and printed if absent
    #[arg(long)]
    seed: Option<u64>,
    /// Reject instances whose union graph is disconnected
    #[arg(long)]
    connected: bool,
    /// Number of pairwise disjoint perfect matchings (3 or 4)
    #[arg(long, default_value_t = 3)]
    k: usize,
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 3)]
    n_min: usize,
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Target policy: auto, exhaustive, or sample:<count>
    #[arg(long, default_value = "auto")]
    targets: String,
    /// Brute-force cross-check cap
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Fan trials out across a worker pool
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    input: String,
    #[arg(long, num_args = 3, value_names = ["A1", "A2", "A3"])]
    target: Vec<i64>,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(Subcommand)]
enum SearchCommand {
    /// Find (instance, triple summing to n) pairs with no matching
    Tightness(TightnessArgs),
    /// Probe the four-matching variant by brute force
    K4(K4Args),
}

#[derive(Args)]
struct TightnessArgs {
    #[arg(long, default_value_t = 5)]
    n_max: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(Args)]
struct K4Args {
    #[arg(long, default_value_t = 5)]
    n_max: usize,
    /// Instances per size
    #[arg(long, default_value_t = 3)]
    budget: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated instance sizes
    #[arg(long, default_value = "50,100,200,500,1000")]
    n: String,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let exit = err
                .downcast_ref::<Error>()
                .map(exit_for_error)
                .unwrap_or(EXIT_INVALID);
            ExitCode::from(exit)
        }
    };
    code
}

fn exit_for_error(err: &Error) -> u8 {
    match err {
        Error::IterationGuardExceeded(_) => EXIT_GUARD,
        _ => EXIT_INVALID,
    }
}

/// Pick a seed: the given one, or one minted from the clock and printed so
/// the run can be replayed byte for byte.
fn resolve_seed(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => s,
        None => {
            let s = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_nanos() as u64)
                .unwrap_or(0);
            println!("seed={s}");
            s
        }
    }
}

fn read_target(raw: &[i64]) -> Result<TargetTriple> {
    anyhow::ensure!(raw.len() == 3, "target needs exactly three values");
    Ok(target_from_ints(raw[0], raw[1], raw[2])?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Fuzz(args) => cmd_fuzz(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Search(SearchCommand::Tightness(args)) => cmd_search_tightness(args),
        Command::Search(SearchCommand::K4(args)) => cmd_search_k4(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input))?;
    let inst = parse_instance(&text)?;
    let target = read_target(&args.target)?;
    let trace_on = args.trace;
    let mut sink = move |line: &str| {
        if trace_on {
            let _ = writeln!(std::io::stderr().lock(), "{line}");
        }
    };
    let mut tracer = Tracer::new(&mut sink);
    let (m, _stats) = solve_with_stats(&inst, target, &mut tracer)?;
    let json = MatchingDoc::from_matching(&m).to_json();
    match &args.output {
        Some(path) => fs::write(path, json + "\n").with_context(|| format!("writing {path}"))?,
        None => println!("{json}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input))?;
    let inst = parse_instance(&text)?;
    let target = read_target(&args.target)?;
    let doc_text =
        fs::read_to_string(&args.matching).with_context(|| format!("reading {}", args.matching))?;
    let doc = MatchingDoc::from_json(&doc_text)?;
    match verify_matching(&inst, &doc.edges, target) {
        VerifyReport::Pass { counts } => {
            println!(
                "pass counts={},{},{}",
                counts[0], counts[1], counts[2]
            );
            Ok(ExitCode::SUCCESS)
        }
        VerifyReport::Fail(violation) => {
            println!("fail {violation}");
            Ok(ExitCode::from(EXIT_FAIL))
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    let seed = resolve_seed(args.seed);
    match args.k {
        3 => {
            let inst = oracle::gen_random(args.n, seed, args.connected)?;
            print!("{}", format_instance(&inst));
        }
        4 => {
            anyhow::ensure!(!args.connected, "--connected applies only to k=3");
            let inst = oracle::gen_random_k4(args.n, seed)?;
            print!("{}", format_raw(inst.n(), &inst.rows()));
        }
        k => anyhow::bail!("unsupported k={k}: only 3 or 4 matchings"),
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_policy(raw: &str) -> Result<TargetPolicy> {
    match raw {
        "auto" => Ok(TargetPolicy::Auto),
        "exhaustive" => Ok(TargetPolicy::Exhaustive),
        other => {
            let count = other
                .strip_prefix("sample:")
                .and_then(|v| v.parse().ok())
                .with_context(|| format!("bad target policy {other:?}"))?;
            Ok(TargetPolicy::Sampled(count))
        }
    }
}

fn cmd_fuzz(args: FuzzArgs) -> Result<ExitCode> {
    let seed = resolve_seed(args.seed);
    anyhow::ensure!(args.n_min >= 3 && args.n_min <= args.n_max, "need 3 <= n-min <= n-max");
    let config = FuzzConfig {
        trials: args.trials,
        n_min: args.n_min,
        n_max: args.n_max,
        seed,
        targets: parse_policy(&args.targets)?,
        cap: args.cap,
        parallel: args.parallel,
    };
    let report = oracle::fuzz_campaign(&config);
    for record in &report.records {
        println!("{}", record.line());
    }
    println!(
        "summary trials={} cases={} failures={} oracle_checked={} oracle_mismatches={} max_steps={}",
        report.trials,
        report.cases,
        report.failures,
        report.oracle_checked,
        report.oracle_mismatches,
        report.max_pipeline_steps
    );
    Ok(if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    })
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input))?;
    let inst = parse_instance(&text)?;
    let target = read_target(&args.target)?;
    let exists = oracle::exists_bruteforce(&inst, target, args.cap)?;
    println!("{exists}");
    Ok(if exists {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    })
}

fn cmd_search_tightness(args: TightnessArgs) -> Result<ExitCode> {
    let seed = resolve_seed(args.seed);
    let witnesses = oracle::search_tightness(args.n_max, seed, args.cap)?;
    for (idx, w) in witnesses.iter().enumerate() {
        // re-verified inside the search; print a replayable block
        println!(
            "witness {} n={} target={},{},{}",
            idx,
            w.instance.n(),
            w.target.0[0],
            w.target.0[1],
            w.target.0[2]
        );
        print!("{}", format_instance(&w.instance));
    }
    println!("summary witnesses={} n_max={} seed={}", witnesses.len(), args.n_max, seed);
    Ok(ExitCode::SUCCESS)
}

fn cmd_search_k4(args: K4Args) -> Result<ExitCode> {
    let seed = resolve_seed(args.seed);
    let report = oracle::search_k4(args.n_max, args.budget, seed, args.cap)?;
    for r in &report.records {
        println!(
            "probe n={} seed={} tuple={},{},{},{} exists={}",
            r.n, r.seed, r.tuple[0], r.tuple[1], r.tuple[2], r.tuple[3], r.exists
        );
    }
    for (seed, n, tuple) in &report.counterexamples {
        println!(
            "counterexample n={n} seed={seed} tuple={},{},{},{}",
            tuple[0], tuple[1], tuple[2], tuple[3]
        );
    }
    println!(
        "summary instances={} tuples={} counterexamples={}",
        report.instances,
        report.tuples,
        report.counterexamples.len()
    );
    Ok(if report.counterexamples.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    })
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let seed = resolve_seed(args.seed);
    let sizes: Result<Vec<usize>, _> = args.n.split(',').map(|s| s.trim().parse()).collect();
    let sizes = sizes.map_err(|_| anyhow::anyhow!("bad size list {:?}", args.n))?;
    println!("n wall_ms switches steps");
    for (idx, &n) in sizes.iter().enumerate() {
        let inst = oracle::gen_random(n, seed.wrapping_add(idx as u64), true)?;
        let a1 = (n - 1) / 3;
        let a2 = (n - 1 - a1) / 2;
        let target = TargetTriple::new(a1, a2, n - 1 - a1 - a2);
        let start = std::time::Instant::now();
        let (m, stats) = solve_with_stats(&inst, target, &mut Tracer::none())?;
        let wall = start.elapsed();
        anyhow::ensure!(
            trimatch::verify(&inst, &m, target).passed(),
            "bench output failed verification"
        );
        println!(
            "{} {:.3} {} {}",
            n,
            wall.as_secs_f64() * 1e3,
            stats.switches,
            stats.pipeline_steps
        );
    }
    Ok(ExitCode::SUCCESS)
}
