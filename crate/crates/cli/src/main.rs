//! `qbsc`: run commitment sessions, manage codebooks and sweep bounds.
//!
//! Exit codes: 0 ok, 2 input or malformed file, 3 phase order, 4
//! certification failure, 5 numerical failure or failed bound rows,
//! 6 dimension mismatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qbsc::adversary::{self, CheatStrategy};
use qbsc::codebook::{capacity, generate_certified_codebook, Codebook};
use qbsc::protocol1::SecurityParams;
use qbsc::protocol2::CheatSet;
use qbsc::report::{run_sweep, Check, SweepConfig};
use qbsc::session::{self, Instance};
use qbsc::transcript::{ModeName, Transcript};
use qbsc::{parse_bits, rng, Error, Result};

#[derive(Parser)]
#[command(name = "qbsc", version, about = "Quantum bit string commitment simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Commit to a bit string and write the commit-phase transcript.
    Commit(CommitArgs),
    /// Record the claimed string in a committed transcript.
    Unveil(UnveilArgs),
    /// Run the receiver's test and finalize the transcript.
    Verify(VerifyArgs),
    /// Sweep analytic bounds against exact oracles.
    Bounds(BoundsArgs),
    /// Generate, re-certify or describe codebooks.
    Codebook {
        #[command(subcommand)]
        command: CodebookCommand,
    },
    /// Play a cheating sender and record the outcome.
    Cheat(CheatArgs),
}

#[derive(Subcommand)]
enum CodebookCommand {
    Gen(GenArgs),
    Verify(CodebookPath),
    Info(CodebookPath),
}

#[derive(Clone, Copy, ValueEnum)]
enum Protocol {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

impl From<Mode> for ModeName {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => ModeName::Exact,
            Mode::Sampled => ModeName::Sampled,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Honest,
    Top,
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long, value_enum, default_value = "1")]
    protocol: Protocol,
    /// Qubit overlap angle (protocol 1).
    #[arg(long)]
    theta: Option<f64>,
    /// Security parameter r (protocol 1) or cheat-set size (protocol 2).
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Certified codebook file (protocol 2).
    #[arg(long)]
    codebook: Option<PathBuf>,
}

#[derive(Args)]
struct CommitArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    bits: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    transcript: PathBuf,
}

#[derive(Args)]
struct UnveilArgs {
    #[arg(long)]
    transcript: PathBuf,
    #[arg(long)]
    bits: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    transcript: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(long)]
    codebook: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_delimiter = ',')]
    theta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<usize>>,
    /// Codebook dimensions.
    #[arg(long, value_delimiter = ',')]
    dim: Option<Vec<usize>>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    epsilon: Option<Vec<f64>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Subset of eq1, binding1, holevo1, delta1, binding2, equality2, hiding2.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Codebook dimension (code length).
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CodebookPath {
    #[arg(long)]
    codebook: PathBuf,
}

#[derive(Args)]
struct CheatArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// String length (protocol 1).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value = "top")]
    strategy: Strategy,
    /// Codebook indices kept open (protocol 2, top strategy).
    #[arg(long, value_delimiter = ',')]
    cheat_set: Option<Vec<usize>>,
    /// String claimed at unveil.
    #[arg(long)]
    reveal: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent sessions; seeds are derived from --seed.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Where to write the transcript of the first session.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Commit(a) => commit(a),
        Command::Unveil(a) => unveil(a),
        Command::Verify(a) => verify(a),
        Command::Bounds(a) => bounds(a),
        Command::Codebook { command } => codebook(command),
        Command::Cheat(a) => cheat(a),
    }
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn load_codebook(path: &Path) -> Result<Codebook> {
    Codebook::from_json(&read(path)?)
}

fn load_transcript(path: &Path) -> Result<Transcript> {
    if !path.exists() {
        return Err(Error::PhaseOrder(format!("no commitment recorded at {}", path.display())));
    }
    Transcript::from_json(&read(path)?)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => stdout(text)?,
    }
    Ok(())
}

// a closed pipe (`| head`) is not an error
fn stdout(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(value: serde_json::Value) -> Result<()> {
    stdout(&format!("{}\n", serde_json::to_string_pretty(&value)?))
}

fn params1(theta: Option<f64>, n: usize, r: usize) -> Result<SecurityParams> {
    let theta = theta.ok_or_else(|| Error::InvalidInput("protocol 1 needs --theta".into()))?;
    SecurityParams::new(theta, n, r)
}

fn codebook_arg(path: &Option<PathBuf>) -> Result<Codebook> {
    let path = path
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("protocol 2 needs --codebook".into()))?;
    load_codebook(path)
}

fn commit(a: CommitArgs) -> Result<ExitCode> {
    let bits = parse_bits(&a.bits)?;
    let t = match a.instance.protocol {
        Protocol::One => {
            let params = params1(a.instance.theta, bits.len(), a.instance.r)?;
            session::commit_honest(&Instance::One(params), &bits, a.seed)?
        }
        Protocol::Two => {
            let cb = codebook_arg(&a.instance.codebook)?;
            session::commit_honest(&Instance::Two { codebook: &cb, r: 1 }, &bits, a.seed)?
        }
    };
    fs::write(&a.transcript, t.to_json()?)?;
    Ok(ExitCode::SUCCESS)
}

fn unveil(a: UnveilArgs) -> Result<ExitCode> {
    let mut t = load_transcript(&a.transcript)?;
    session::unveil(&mut t, &parse_bits(&a.bits)?)?;
    fs::write(&a.transcript, t.to_json()?)?;
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let mut t = load_transcript(&a.transcript)?;
    let cb = a.codebook.as_deref().map(load_codebook).transpose()?;
    let verdict = session::verify(&mut t, cb.as_ref(), a.mode.into())?.clone();
    fs::write(&a.transcript, t.to_json()?)?;
    print_json(serde_json::to_value(&verdict)?)?;
    Ok(ExitCode::SUCCESS)
}

fn bounds(a: BoundsArgs) -> Result<ExitCode> {
    let defaults = SweepConfig::default();
    let checks = match a.checks {
        Some(names) => names.iter().map(|s| Check::parse(s)).collect::<Result<_>>()?,
        None => defaults.checks,
    };
    let config = SweepConfig {
        thetas: a.theta.unwrap_or(defaults.thetas),
        ns: a.n.unwrap_or(defaults.ns),
        rs: a.r.unwrap_or(defaults.rs),
        dims: a.dim.unwrap_or(defaults.dims),
        k: a.k.unwrap_or(defaults.k),
        epsilons: a.epsilon.unwrap_or(defaults.epsilons),
        samples: a.samples.unwrap_or(defaults.samples),
        seed: a.seed,
        checks,
    };
    let report = run_sweep(&config)?;
    let text = match a.format {
        Format::Json => report.to_json()?,
        Format::Csv => report.to_csv()?,
    };
    write_or_print(a.out.as_deref(), &text)?;
    eprintln!("{}", report.summary_line());
    Ok(if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(5)
    })
}

fn codebook(command: CodebookCommand) -> Result<ExitCode> {
    match command {
        CodebookCommand::Gen(a) => {
            let cb = generate_certified_codebook(a.dim, a.epsilon, a.k, a.seed)?;
            write_or_print(a.out.as_deref(), &cb.to_json()?)?;
        }
        CodebookCommand::Verify(a) => {
            let cb = load_codebook(&a.codebook)?;
            print_json(json!({ "certified": true, "epsilon_certified": cb.epsilon_certified(), "id": cb.id() }))?;
        }
        CodebookCommand::Info(a) => {
            let cb = load_codebook(&a.codebook)?;
            let p = cb.provenance();
            print_json(json!({
                "dim": cb.dim(),
                "k": cb.code().message_bits(),
                "capacity": capacity(&cb),
                "epsilon_certified": cb.epsilon_certified(),
                "seed": p.base_seed,
                "code_seed": p.code_seed,
                "attempts": p.attempts,
                "prng_id": p.prng_id,
                "id": cb.id(),
            }))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cheat(a: CheatArgs) -> Result<ExitCode> {
    let reveal = parse_bits(&a.reveal)?;
    let cb;
    let (instance, strategy) = match a.instance.protocol {
        Protocol::One => {
            let n = a.n.unwrap_or(reveal.len());
            let params = params1(a.instance.theta, n, a.instance.r)?;
            let strategy = match a.strategy {
                Strategy::Honest => CheatStrategy::honest(),
                Strategy::Top => CheatStrategy::protocol1_top(params.theta)?,
            };
            (Instance::One(params), strategy)
        }
        Protocol::Two => {
            cb = codebook_arg(&a.instance.codebook)?;
            let strategy = match a.strategy {
                Strategy::Honest => CheatStrategy::honest(),
                Strategy::Top => {
                    let indices = a.cheat_set.clone().unwrap_or_else(|| {
                        // default: the revealed string plus its successors
                        let first = qbsc::bits_to_index(&reveal);
                        (0..a.instance.r).map(|j| (first + j) % cb.size()).collect()
                    });
                    CheatStrategy::protocol2_top(&cb, &CheatSet::new(indices, &cb)?)?
                }
            };
            let r = a.cheat_set.as_ref().map_or(a.instance.r, Vec::len);
            (Instance::Two { codebook: &cb, r }, strategy)
        }
    };
    if a.trials == 0 {
        return Err(Error::InvalidInput("--trials must be >= 1".into()));
    }
    let mut accepted = 0u64;
    let mut probability = 0.0;
    for trial in 0..a.trials {
        let seed = if a.trials == 1 { a.seed } else { rng::derive_seed(a.seed, trial) };
        let t = adversary::run_cheat_session(&instance, &strategy, &reveal, seed)?;
        let v = t.verdict.as_ref().expect("cheat sessions are verified");
        probability = v.probability;
        accepted += u64::from(v.accepted == Some(true));
        if trial == 0 {
            if let Some(path) = &a.transcript {
                fs::write(path, t.to_json()?)?;
            }
        }
    }
    let frequency = accepted as f64 / a.trials as f64;
    let sigma = (probability * (1.0 - probability) / a.trials as f64).sqrt();
    print_json(json!({
        "strategy": strategy.kind(),
        "achieved_total": strategy.achieved(),
        "bound": strategy.bound(),
        "reveal": qbsc::format_bits(&reveal),
        "exact_probability": probability,
        "trials": a.trials,
        "accepted": accepted,
        "frequency": frequency,
        "sigma": sigma,
    }))?;
    Ok(ExitCode::SUCCESS)
}
