use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qfi_probe_cli::config::{read_config_file, SEED_ENV};
use qfi_probe_cli::{execute, CliError, Command, RunConfig};

#[derive(Parser)]
#[command(
    name = "qfi-probe",
    version,
    about = "QFI of qudit depolarizing-channel probing schemes"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// QFI per channel use: closed form against the numerical oracle.
    Curves(Flags),
    /// B-vs-O crossover θ* and the E_η boundary g(η).
    Thresholds(Flags),
    /// Partially entangled probes against the J_O ≤ J ≤ J_E sandwich.
    Partial(Flags),
    /// Monte Carlo MLE error against the Cramér–Rao bound.
    Crb(Flags),
}

#[derive(Args)]
struct Flags {
    /// Comma-separated dimensions.
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    theta_start: Option<String>,
    #[arg(long)]
    theta_stop: Option<String>,
    #[arg(long)]
    theta_step: Option<String>,
    /// Comma-separated subset of O, E, B, E_eta; may be empty.
    #[arg(long)]
    schemes: Option<String>,
    /// Comma-separated circulation counts.
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated ancilla noise strengths in (0, 1].
    #[arg(long)]
    eta: Option<String>,
    /// Comma-separated Schmidt coefficients (unit 2-norm).
    #[arg(long)]
    psi: Option<String>,
    /// Random ψ per dimension when --psi is absent.
    #[arg(long)]
    samples: Option<String>,
    /// Falls back to $QFI_PROBE_SEED, then 0.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    shots: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    /// Output CSV; a `.manifest` file is written next to it. Default: stdout.
    #[arg(long)]
    out: Option<String>,
    /// key=value file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn into_parts(self) -> (Option<PathBuf>, BTreeMap<String, String>) {
        let pairs = [
            ("d", self.d),
            ("theta-start", self.theta_start),
            ("theta-stop", self.theta_stop),
            ("theta-step", self.theta_step),
            ("schemes", self.schemes),
            ("n", self.n),
            ("eta", self.eta),
            ("psi", self.psi),
            ("samples", self.samples),
            ("seed", self.seed),
            ("shots", self.shots),
            ("trials", self.trials),
            ("out", self.out),
        ];
        let map = pairs
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect();
        (self.config, map)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (command, flags) = match cli.command {
        Sub::Curves(f) => (Command::Curves, f),
        Sub::Thresholds(f) => (Command::Thresholds, f),
        Sub::Partial(f) => (Command::Partial, f),
        Sub::Crb(f) => (Command::Crb, f),
    };
    let (config_path, flag_map) = flags.into_parts();
    let file_map = match config_path {
        Some(path) => read_config_file(&path)?,
        None => BTreeMap::new(),
    };
    let cfg = RunConfig::resolve(command, file_map, flag_map, std::env::var(SEED_ENV).ok())?;
    execute(&cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let first = e
                .to_string()
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ")
                .to_string();
            let err = CliError::Config(first);
            eprintln!("{}", err.record());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
