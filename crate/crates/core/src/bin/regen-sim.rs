//! Command-line simulator over a JSON state file.
//!
//! Exit codes: 0 success, 2 parameter error, 3 assertion or property
//! failure, 4 I/O error.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use regen::collector::{collect, dc_dimension, CollectError};
use regen::longevity::{random_nodes, run_longevity, LongevityConfig};
use regen::params::{validate_params, Mode, ParamSpec};
use regen::properties::{run_checks, Check, Sampling, DEFAULT_SAMPLE_LIMIT};
use regen::repair::{execute_round, RepairError};
use regen::state::{self, StateError};
use regen::system::{build_system, BuildError, StorageSystem};
use regen::tradeoff::{to_csv, tradeoff_points};

#[derive(Parser)]
#[command(name = "regen-sim", version, about = "Broadcast-repair regenerating code simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a system from a file and write its state.
    Init(InitArgs),
    /// Run one repair round.
    Repair(RepairArgs),
    /// Reconstruct the file from k nodes.
    Collect(CollectArgs),
    /// Run property checks and emit a JSON report.
    Verify(VerifyArgs),
    /// Emit the normalized operating points as CSV.
    Tradeoff(TradeoffArgs),
    /// Random repair rounds, checkpointed checks, and random collections.
    Longevity(LongevityArgs),
}

#[derive(Args)]
struct Shape {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    r: usize,
}

#[derive(Args)]
struct InitArgs {
    #[command(flatten)]
    shape: Shape,
    #[arg(long, default_value = "mbr")]
    mode: Mode,
    #[arg(long)]
    file: PathBuf,
    #[arg(long, default_value_t = 8)]
    b: u32,
    /// Extension degree; defaults to the smallest admissible value.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, env = "REGEN_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "state.json")]
    out: PathBuf,
    /// Store the state with polynomial membership checks disabled.
    #[arg(long)]
    no_oracle: bool,
}

#[derive(Args)]
struct RepairArgs {
    #[arg(long)]
    state: PathBuf,
    /// Comma-separated failed node ids.
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    fail: Option<String>,
    /// Fail r random nodes, drawn from the state seed and round number.
    #[arg(long)]
    random: bool,
    /// Comma-separated helper ids, in order; defaults to the d lowest survivors.
    #[arg(long)]
    helpers: Option<String>,
    /// Overrides the state seed for --random.
    #[arg(long, env = "REGEN_SEED")]
    seed: Option<u64>,
    /// Append the round record to this JSON-lines file.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    no_oracle: bool,
}

#[derive(Args)]
struct CollectArgs {
    #[arg(long)]
    state: PathBuf,
    /// Comma-separated k node ids.
    #[arg(long, conflicts_with = "all_subsets", required_unless_present = "all_subsets")]
    nodes: Option<String>,
    /// Try every k-subset, or a random sample of them with --sample.
    #[arg(long)]
    all_subsets: bool,
    #[arg(long, requires = "all_subsets")]
    sample: Option<usize>,
    #[arg(long, env = "REGEN_SEED")]
    seed: Option<u64>,
    /// Where to write the reconstructed bytes.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    state: PathBuf,
    /// Comma-separated checks among l1,l2,l3,l4,lemma1,dc.
    #[arg(long, default_value = "l1,l2,l3,l4,lemma1,dc")]
    checks: String,
    /// Candidate budget before a check switches to sampling.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_LIMIT)]
    limit: usize,
    /// Enumerate every candidate regardless of population.
    #[arg(long, conflicts_with = "limit")]
    exhaustive: bool,
    #[arg(long, env = "REGEN_SEED")]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct TradeoffArgs {
    #[command(flatten)]
    shape: Shape,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LongevityArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    rounds: usize,
    #[arg(long, default_value_t = 30)]
    collect_samples: usize,
    #[arg(long, env = "REGEN_SEED")]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_LIMIT)]
    limit: usize,
    /// Write the summary JSON here instead of stdout.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Append one JSON line per attempted round.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Persist the repaired state afterwards.
    #[arg(long)]
    save: bool,
    #[arg(long)]
    no_oracle: bool,
}

enum Failure {
    Param(String),
    Assertion(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Param(_) => 2,
            Failure::Assertion(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Param(m) | Failure::Assertion(m) | Failure::Io(m) => m,
        }
    }
}

impl From<StateError> for Failure {
    fn from(e: StateError) -> Self {
        match e {
            StateError::Param(e) => Failure::Param(e.to_string()),
            other => Failure::Io(other.to_string()),
        }
    }
}

impl From<RepairError> for Failure {
    fn from(e: RepairError) -> Self {
        match e {
            RepairError::Assertion { .. } | RepairError::RepeatedHelper { .. } => Failure::Assertion(e.to_string()),
            other => Failure::Param(other.to_string()),
        }
    }
}

impl From<CollectError> for Failure {
    fn from(e: CollectError) -> Self {
        match e {
            CollectError::SubsetSize { .. } | CollectError::UnknownNode(_) | CollectError::Duplicate(_) => {
                Failure::Param(e.to_string())
            }
            other => Failure::Assertion(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

/// Advisory lock held for the lifetime of a mutating command.
struct StateLock(PathBuf);

impl StateLock {
    fn acquire(state: &Path) -> Result<Self, Failure> {
        let path = state.with_extension("json.lock");
        OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
            .map_err(|e| io_err(&path, format!("cannot take state lock ({e}); another command may be running")))?;
        Ok(StateLock(path))
    }
}

impl Drop for StateLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

fn parse_ids(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<usize>().map_err(|_| Failure::Param(format!("not a node id: {t:?}"))))
        .collect()
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn append_trace(path: &Path, value: &serde_json::Value) -> Result<(), Failure> {
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(|e| io_err(path, e))?;
    writeln!(f, "{value}").map_err(|e| io_err(path, e))
}

fn load(path: &Path) -> Result<(StorageSystem, u64), Failure> {
    state::load(path).map_err(|e| match e {
        StateError::Io(io) => io_err(path, io),
        other => other.into(),
    })
}

fn save(system: &StorageSystem, seed: u64, path: &Path) -> Result<(), Failure> {
    state::save(system, seed, path).map_err(|e| io_err(path, e))
}

fn cmd_init(a: InitArgs) -> Result<(), Failure> {
    let Shape { n, k, d, r } = a.shape;
    let mut spec = ParamSpec::new(n, k, d, r, a.mode).with_base_bits(a.b);
    spec.m = a.m;
    let params = validate_params(&spec).map_err(|e| Failure::Param(e.to_string()))?;
    let data = fs::read(&a.file).map_err(|e| io_err(&a.file, e))?;
    let mut system = build_system(&params, &data).map_err(|e| match e {
        BuildError::Param(e) => Failure::Param(e.to_string()),
        BuildError::Placement(e) => Failure::Assertion(e.to_string()),
        other => Failure::Param(other.to_string()),
    })?;
    system.set_oracle_checks(!a.no_oracle);
    let _lock = StateLock::acquire(&a.out)?;
    save(&system, a.seed, &a.out)?;

    let sym = params.symbol_bits();
    let big_m = params.stripe_bits();
    let ((an, ad), (gn, gd)) = params.normalized_point_exact();
    println!("mode: {}", params.mode);
    println!("alpha: {}", params.alpha);
    println!("B: {}", params.subpackets);
    println!("m: {}", params.m);
    println!("q: {}", params.q());
    println!("stripe capacity: {} bytes", params.stripe_capacity());
    println!("stripes: {}", system.stripes());
    println!("M: {big_m} bits");
    println!("storage per node: {an}M/{ad} = {} bits", params.alpha as u64 * sym);
    println!("bandwidth per failed node: {gn}M/{gd} = {} bits", params.d as u64 * sym);
    println!("state: {}", a.out.display());
    Ok(())
}

fn cmd_repair(a: RepairArgs) -> Result<(), Failure> {
    let _lock = StateLock::acquire(&a.state)?;
    let (mut system, state_seed) = load(&a.state)?;
    let stored_checks = system.oracle_checks();
    if a.no_oracle {
        system.set_oracle_checks(false);
    }
    let p = *system.params();
    let failed = match &a.fail {
        Some(s) => parse_ids(s)?,
        None => {
            let round = system.history().len() as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(state_seed) ^ round.wrapping_mul(0x9E37_79B9));
            random_nodes(&mut rng, p.n, p.r)
        }
    };
    let helpers = a.helpers.as_deref().map(parse_ids).transpose()?;
    let round = execute_round(&mut system, &failed, helpers.as_deref())?;
    system.set_oracle_checks(stored_checks);
    save(&system, state_seed, &a.state)?;
    if let Some(t) = &a.trace {
        append_trace(t, &json!({ "event": "round", "round": round }))?;
    }
    println!("round: {}", round.round_id);
    println!("failed: {:?}", round.failed);
    println!("helpers: {:?}", round.helpers);
    println!("bandwidth_symbols: {}", round.bandwidth_symbols);
    println!("bandwidth_bits: {}", round.bandwidth_bits);
    println!("transfer_only_fraction: {:.4}", round.transfer_only_fraction());
    Ok(())
}

fn cmd_collect(a: CollectArgs) -> Result<(), Failure> {
    let (system, state_seed) = load(&a.state)?;
    let p = *system.params();
    let original = system.oracle_file().ok();
    if let Some(s) = &a.nodes {
        let nodes = parse_ids(s)?;
        let dim = dc_dimension(&system, &nodes)?;
        println!("dc_dimension: {dim} (required {})", p.subpackets);
        let bytes = collect(&system, &nodes)?;
        if let Some(out) = &a.out {
            fs::write(out, &bytes).map_err(|e| io_err(out, e))?;
        }
        println!("bytes: {}", bytes.len());
        return match &original {
            Some(o) if *o != bytes => Err(Failure::Assertion("reconstruction differs from the stored file".into())),
            Some(_) => {
                println!("verdict: bit-exact");
                Ok(())
            }
            None => {
                println!("verdict: reconstructed");
                Ok(())
            }
        };
    }

    let subsets: Vec<Vec<usize>> = match a.sample {
        Some(count) => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(state_seed));
            (0..count).map(|_| random_nodes(&mut rng, p.n, p.k)).collect()
        }
        None => regen::mds::combinations(p.n, p.k).map(|c| c.into_iter().map(|i| i + 1).collect()).collect(),
    };
    let mut exact = 0usize;
    let mut first_failure = None;
    let mut written = false;
    for nodes in &subsets {
        match collect(&system, nodes) {
            Ok(bytes) if original.as_ref().is_none_or(|o| *o == bytes) => {
                exact += 1;
                if let (Some(out), false) = (&a.out, written) {
                    fs::write(out, &bytes).map_err(|e| io_err(out, e))?;
                    written = true;
                }
            }
            Ok(_) => {
                first_failure.get_or_insert_with(|| format!("{nodes:?}: reconstruction differs"));
            }
            Err(e) => {
                first_failure.get_or_insert_with(|| format!("{nodes:?}: {e}"));
            }
        }
    }
    println!("subsets: {}", subsets.len());
    println!("bit_exact: {exact}");
    match first_failure {
        Some(f) => Err(Failure::Assertion(format!("{} of {} collections failed; first {f}", subsets.len() - exact, subsets.len()))),
        None => Ok(()),
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<(), Failure> {
    let (system, state_seed) = load(&a.state)?;
    let checks = a
        .checks
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.parse::<Check>().map_err(Failure::Param))
        .collect::<Result<Vec<_>, _>>()?;
    let seed = a.seed.unwrap_or(state_seed);
    let policy = if a.exhaustive { Sampling::exhaustive(seed) } else { Sampling::new(seed).with_limit(a.limit) };
    let reports = run_checks(&system, &checks, &policy);
    let passed = reports.iter().all(|r| r.passed());
    let text = serde_json::to_string_pretty(&json!({ "passed": passed, "reports": reports })).expect("report serializes");
    write_out(a.report.as_deref(), &(text + "\n"))?;
    for r in &reports {
        eprintln!("{}: {} ({} violations of {} sampled)", r.check, if r.passed() { "pass" } else { "FAIL" }, r.violations.len(), r.sampled);
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Assertion("property checks failed".into()))
    }
}

fn cmd_tradeoff(a: TradeoffArgs) -> Result<(), Failure> {
    let Shape { n, k, d, r } = a.shape;
    let rows = tradeoff_points(n, k, d, r).map_err(|e| Failure::Param(e.to_string()))?;
    write_out(a.out.as_deref(), &to_csv(&rows))
}

fn cmd_longevity(a: LongevityArgs) -> Result<(), Failure> {
    let lock = if a.save { Some(StateLock::acquire(&a.state)?) } else { None };
    let (mut system, state_seed) = load(&a.state)?;
    let stored_checks = system.oracle_checks();
    if a.no_oracle {
        system.set_oracle_checks(false);
    }
    let seed = a.seed.unwrap_or(state_seed);
    let mut cfg = LongevityConfig::new(a.rounds, a.collect_samples, seed);
    cfg.sampling = Sampling::new(seed).with_limit(a.limit);
    let mut trace_err = None;
    let summary = run_longevity(&mut system, &cfg, |round, failed, outcome| {
        if let Some(t) = &a.trace {
            let value = match outcome {
                Ok(rec) => json!({ "event": "round", "round": rec }),
                Err(e) => json!({ "event": "aborted", "attempt": round, "failed": failed, "error": e.to_string() }),
            };
            if let Err(e) = append_trace(t, &value) {
                trace_err.get_or_insert(e);
            }
        }
    });
    if let Some(e) = trace_err {
        return Err(e);
    }
    system.set_oracle_checks(stored_checks);
    if lock.is_some() {
        save(&system, state_seed, &a.state)?;
    }
    let passed = summary.passed();
    let text = serde_json::to_string_pretty(&json!({ "passed": passed, "summary": summary })).expect("summary serializes");
    write_out(a.summary.as_deref(), &(text + "\n"))?;
    eprintln!(
        "rounds: {}/{} completed, collections bit-exact: {}/{}, checkpoints passed: {}/{}",
        summary.rounds_completed,
        summary.rounds_requested,
        summary.collections_bit_exact,
        summary.collections.len(),
        summary.checkpoints.iter().filter(|c| c.passed()).count(),
        summary.checkpoints.len()
    );
    if passed {
        Ok(())
    } else {
        Err(Failure::Assertion("longevity campaign reported failures".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Init(a) => cmd_init(a),
        Command::Repair(a) => cmd_repair(a),
        Command::Collect(a) => cmd_collect(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Tradeoff(a) => cmd_tradeoff(a),
        Command::Longevity(a) => cmd_longevity(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
