use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use divsim::config::{CommandKind, Overrides, RunConfig};
use divsim::{cmd_bounds, cmd_eigtail, cmd_proofcheck, cmd_simulate, prepare_config, CliError, Outcome};

/// Outage and diversity studies for spatial multiplexing with transmit
/// antenna selection.
#[derive(Debug, Parser)]
#[command(name = "divsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo outage curve and diversity slope.
    Simulate(RunArgs),
    /// Numerical check of the diversity-ceiling inequality chain.
    Proofcheck(RunArgs),
    /// Tail exponent of the L-th largest Gram eigenvalue.
    Eigtail(RunArgs),
    /// Print the diversity bounds for (n_tx, n_rx, l).
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Master seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per point, proof-check draws or tail draws, by command.
    #[arg(long)]
    trials: Option<u64>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (overrides `workers`).
    #[arg(long)]
    workers: Option<usize>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            trials: self.trials,
            out: self.out.clone(),
            workers: self.workers,
        }
    }
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_tx: Option<usize>,
    #[arg(long)]
    n_rx: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
}

fn bounds(args: &BoundsArgs) -> Result<Outcome, CliError> {
    let base = match &args.config {
        Some(path) => Some(RunConfig::load(path)?),
        None => None,
    };
    let pick = |flag: Option<usize>, from_cfg: Option<usize>, key: &str| {
        flag.or(from_cfg)
            .ok_or_else(|| CliError::Config(format!("{key}: required (use --config or --{})", key.replace('_', "-"))))
    };
    let n_tx = pick(args.n_tx, base.as_ref().map(|c| c.n_tx), "n_tx")?;
    let n_rx = pick(args.n_rx, base.as_ref().map(|c| c.n_rx), "n_rx")?;
    let l = pick(args.l, base.as_ref().map(|c| c.l), "l")?;
    if l == 0 || n_tx == 0 || n_rx == 0 || l > n_tx.min(n_rx) {
        return Err(CliError::Config(format!(
            "l: L ≤ min(N_T, N_R) with all counts ≥ 1 required, got n_tx = {n_tx}, n_rx = {n_rx}, l = {l}"
        )));
    }
    cmd_bounds(n_tx, n_rx, l)
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&prepare_config(&a.config, &a.overrides(), CommandKind::Simulate)?),
        Command::Proofcheck(a) => cmd_proofcheck(&prepare_config(&a.config, &a.overrides(), CommandKind::ProofCheck)?),
        Command::Eigtail(a) => cmd_eigtail(&prepare_config(&a.config, &a.overrides(), CommandKind::EigTail)?),
        Command::Bounds(a) => bounds(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => {
            if !outcome.message.is_empty() {
                if outcome.code == 0 {
                    println!("{}", outcome.message);
                } else {
                    eprintln!("{}", outcome.message);
                }
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("divsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
