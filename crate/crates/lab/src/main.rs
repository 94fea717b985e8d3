use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use duality_core::binlin::{complete_basis, dual_basis, sample_full_rank, BinaryMatrix, HashFamilySpec, HashKind};
use duality_core::duality::Case;
use duality_lab::{
    run_experiment, serialize_report, Command, ExperimentConfig, Fixture, Format, HashSampler, LabError,
    Result, Theorem,
};

#[derive(Parser)]
#[command(name = "duality-lab", version, about = "Verification sweeps for privacy amplification / compression duality")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Include per-trial wall-clock durations in JSON output.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Conditional entropies of a state file or of random states.
    Entropy(EntropyArgs),
    /// Privacy amplification on a cq state.
    PaRun(ProtocolArgs),
    /// Compression with side information on a cq state.
    CsiRun(ProtocolArgs),
    /// Check a duality statement on random instances.
    DualityVerify(VerifyArgs),
    /// Check the (smooth) entropic uncertainty relation.
    UncertaintySweep(SweepArgs),
    /// GF(2) matrix utilities on the hex text format.
    Binlin(BinlinArgs),
}

#[derive(Args)]
struct EntropyArgs {
    /// State file (JSON).
    #[arg(long)]
    state: Option<PathBuf>,
    /// Subsystems conditioned on; defaults to the last one.
    #[arg(long, value_delimiter = ',')]
    conditioned_on: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    #[arg(long)]
    b_dim: Option<usize>,
    #[arg(long)]
    eps1: Option<f64>,
}

#[derive(Args)]
struct ProtocolArgs {
    /// cq state file (JSON); a built-in source otherwise.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Key or compression lengths, cycled per trial.
    #[arg(long, value_delimiter = ',')]
    length: Vec<usize>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    #[arg(long, value_enum)]
    hash: Option<HashSampler>,
    /// Copies of the built-in compression source.
    #[arg(long)]
    copies: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    A,
    B,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    theorem: Option<Theorem>,
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    qubits: Vec<usize>,
    #[arg(long)]
    b_dim: Option<usize>,
    #[arg(long)]
    r_dim: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    length: Vec<usize>,
    #[arg(long = "case", value_enum, value_delimiter = ',')]
    cases: Vec<CaseArg>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    fixture: Option<Fixture>,
    /// Dimension of A, cycled per trial.
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    /// Smoothing parameters; switches to the smooth relation.
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
    #[arg(long)]
    b_dim: Option<usize>,
    #[arg(long)]
    r_dim: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BinlinOp {
    Rank,
    Complete,
    Dual,
    Sample,
}

#[derive(Args)]
struct BinlinArgs {
    #[arg(value_enum)]
    op: BinlinOp,
    /// Matrix file; stdin when absent.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long, value_enum, default_value = "full-rank")]
    hash: HashSampler,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn set_list<T>(slot: &mut Vec<T>, v: Vec<T>) {
    if !v.is_empty() {
        *slot = v;
    }
}

fn build_config(common: &Common, cmd: Cmd) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    set(&mut cfg.seed, common.seed);
    set(&mut cfg.trials, common.trials);
    set(&mut cfg.format, common.format);
    if common.out.is_some() {
        cfg.out = common.out.clone();
    }
    cfg.timings |= common.timings;
    match cmd {
        Cmd::Entropy(a) => {
            cfg.command = Command::Entropy;
            if a.state.is_some() {
                cfg.state = a.state;
            }
            set_list(&mut cfg.conditioned_on, a.conditioned_on);
            set_list(&mut cfg.dims, a.dims);
            set(&mut cfg.b_dim, a.b_dim);
            set(&mut cfg.eps1, a.eps1);
        }
        Cmd::PaRun(a) => {
            cfg.command = Command::PaRun;
            apply_protocol(&mut cfg, a);
        }
        Cmd::CsiRun(a) => {
            cfg.command = Command::CsiRun;
            apply_protocol(&mut cfg, a);
        }
        Cmd::DualityVerify(a) => {
            cfg.command = Command::DualityVerify;
            set(&mut cfg.theorem, a.theorem);
            set_list(&mut cfg.dims, a.dims);
            set_list(&mut cfg.qubits, a.qubits);
            set(&mut cfg.b_dim, a.b_dim);
            set(&mut cfg.r_dim, a.r_dim);
            set_list(&mut cfg.lengths, a.length);
            let cases = a
                .cases
                .into_iter()
                .map(|c| match c {
                    CaseArg::A => Case::A,
                    CaseArg::B => Case::B,
                })
                .collect();
            set_list(&mut cfg.cases, cases);
        }
        Cmd::UncertaintySweep(a) => {
            cfg.command = Command::UncertaintySweep;
            set(&mut cfg.fixture, a.fixture);
            set_list(&mut cfg.dims, a.dims);
            set_list(&mut cfg.deltas, a.delta);
            set(&mut cfg.b_dim, a.b_dim);
            set(&mut cfg.r_dim, a.r_dim);
        }
        Cmd::Binlin(_) => unreachable!("binlin has no experiment config"),
    }
    Ok(cfg)
}

fn apply_protocol(cfg: &mut ExperimentConfig, a: ProtocolArgs) {
    if a.state.is_some() {
        cfg.state = a.state;
    }
    set_list(&mut cfg.lengths, a.length);
    set(&mut cfg.eps1, a.eps1);
    set(&mut cfg.eps2, a.eps2);
    set(&mut cfg.hash, a.hash);
    set(&mut cfg.copies, a.copies);
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| LabError::io(path.display().to_string(), e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| LabError::io("stdout", e)),
    }
}

fn binlin(common: &Common, a: BinlinArgs) -> Result<()> {
    let read_matrix = || -> Result<BinaryMatrix> {
        let text = match &a.matrix {
            Some(p) => std::fs::read_to_string(p).map_err(|e| LabError::io(p.display().to_string(), e))?,
            None => {
                let mut s = String::new();
                std::io::stdin()
                    .read_to_string(&mut s)
                    .map_err(|e| LabError::io("stdin", e))?;
                s
            }
        };
        Ok(BinaryMatrix::from_text(&text)?)
    };
    let text = match a.op {
        BinlinOp::Rank => format!("{}\n", read_matrix()?.rank()),
        BinlinOp::Complete => complete_basis(&read_matrix()?)?.to_text(),
        BinlinOp::Dual => dual_basis(&read_matrix()?)?.to_text(),
        BinlinOp::Sample => {
            let (Some(m), Some(n)) = (a.rows, a.cols) else {
                return Err(LabError::Config("sample needs --rows and --cols".into()));
            };
            let seed = common.seed.unwrap_or(0);
            let spec = |kind| HashFamilySpec::new(kind, n, m, seed).map(|s| s.sample());
            match a.hash {
                HashSampler::FullRank => sample_full_rank(m, n, seed)?,
                HashSampler::UniformLinear => spec(HashKind::UniformLinear)?,
                HashSampler::Toeplitz => spec(HashKind::Toeplitz)?,
            }
            .to_text()
        }
    };
    emit(common.out.as_deref(), text.as_bytes())
}

fn run(cli: Cli) -> Result<()> {
    if let Cmd::Binlin(a) = cli.command {
        return binlin(&cli.common, a);
    }
    let cfg = build_config(&cli.common, cli.command)?;
    let doc = run_experiment(&cfg)?;
    let bytes = serialize_report(&doc, cfg.format)?;
    emit(cfg.out.as_deref(), &bytes)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error[E_USAGE]: {}", line.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.one_line());
            ExitCode::FAILURE
        }
    }
}
