//! Experiment runner behind the `divsim` command: loads a TOML run
//! configuration, runs the requested study on a rayon pool and writes
//! checksummed outputs.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 insufficient data,
//! 3 failed check.

pub mod config;
pub mod output;

use std::path::Path;

use divsim_core::outage::{estimate_slope, run_outage, OutageError, SlopeEstimate};
use divsim_core::proof::{diversity_bounds, estimate_eig_tail, run_proof_check, EigTailEstimate, ProofCheckReport, ProofError};
use serde::Serialize;
use thiserror::Error;

use crate::config::{CommandKind, Overrides, RunConfig};
use crate::output::{outage_csv, to_json, OutputSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        1
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INSUFFICIENT_DATA: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

/// Exit code and a human-readable summary of a finished command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub message: String,
}

impl Outcome {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

/// Loads, overrides and validates a configuration for `kind`.
pub fn prepare_config(path: &Path, overrides: &Overrides, kind: CommandKind) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(path)?;
    cfg.apply(overrides, kind);
    cfg.validate(kind)?;
    Ok(cfg)
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeReport {
    pub config_fingerprint: String,
    pub estimator: String,
    pub window_db: [f64; 2],
    pub points_used: usize,
    pub excluded_points: Vec<f64>,
    pub d_hat: f64,
    pub stderr: f64,
    pub bound_m_lower: usize,
    pub bound_m_upper: usize,
}

fn outage_error(e: OutageError) -> CliError {
    CliError::Config(e.to_string())
}

fn proof_error(e: ProofError) -> CliError {
    CliError::Config(e.to_string())
}

/// Outage curve, slope fit and manifest.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let outage_cfg = cfg.outage_config()?;
    let seed = cfg.seed;
    let curve = with_pool(cfg.workers, || run_outage(&outage_cfg, seed))?.map_err(outage_error)?;
    let fingerprint = cfg.fingerprint();
    let bounds = diversity_bounds(cfg.n_tx, cfg.n_rx, cfg.l).map_err(proof_error)?;

    let mut files = OutputSet::default();
    files.add("outage.csv", outage_csv(&curve, &fingerprint));
    let mut notes = Vec::new();
    let suspicious = curve.non_monotone_points();
    if !suspicious.is_empty() {
        let db: Vec<f64> = suspicious.iter().map(|&i| cfg.snr_grid_db[i]).collect();
        notes.push(format!("warning: all-out probability rises at {db:?} dB"));
    }
    let window = cfg.slope.window_db.map(|[a, b]| (a, b));
    let outcome = match estimate_slope(&curve, cfg.estimator()?, window, cfg.slope.min_events) {
        Ok(SlopeEstimate {
            estimator,
            d_hat,
            stderr,
            points_used,
            window,
            excluded_points,
        }) => {
            let report = SlopeReport {
                config_fingerprint: fingerprint,
                estimator: estimator.to_string(),
                window_db: [window.0, window.1],
                points_used,
                excluded_points,
                d_hat,
                stderr,
                bound_m_lower: bounds.m_lower,
                bound_m_upper: bounds.m_upper,
            };
            files.add("slope.json", to_json(&report));
            notes.push(format!(
                "{estimator} diversity estimate {d_hat:.3} ± {stderr:.3} from {points_used} points; \
                 bounds [{}, {}]",
                bounds.m_lower, bounds.m_upper
            ));
            Outcome::new(EXIT_OK, "")
        }
        Err(OutageError::InsufficientData { usable, excluded }) => {
            notes.push(format!(
                "insufficient data for a slope: {usable} usable point(s), excluded {excluded:?} dB"
            ));
            Outcome::new(EXIT_INSUFFICIENT_DATA, "")
        }
        Err(e) => return Err(outage_error(e)),
    };
    files.write(&cfg.output_dir, cfg, "simulate")?;
    Ok(Outcome::new(outcome.code, notes.join("\n")))
}

#[derive(Debug, Clone, Serialize)]
struct ProofCheckDocument<'a> {
    config_fingerprint: String,
    #[serde(flatten)]
    report: &'a ProofCheckReport,
}

/// Proof-chain inequality checks; exit 3 on any failure.
pub fn cmd_proofcheck(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let pc = cfg.proofcheck_config();
    let seed = cfg.seed;
    let report = with_pool(cfg.workers, || run_proof_check(&pc, seed))?.map_err(proof_error)?;
    let doc = ProofCheckDocument {
        config_fingerprint: cfg.fingerprint(),
        report: &report,
    };
    let mut files = OutputSet::default();
    files.add("proofcheck.json", to_json(&doc));
    files.write(&cfg.output_dir, cfg, "proofcheck")?;
    let failures = report.total_failures();
    let msg = format!(
        "{} draws, {} degenerate, {} failure(s), kappa_hat {:.4}, corr(tau, lambda_L) {:.2e}",
        report.draws, report.skipped_degenerate, failures, report.kappa_hat, report.corr_tau_lambda_l
    );
    Ok(Outcome::new(if failures == 0 { EXIT_OK } else { EXIT_CHECK_FAILED }, msg))
}

#[derive(Debug, Clone, Serialize)]
struct EigTailDocument<'a> {
    config_fingerprint: String,
    n_tx: usize,
    n_rx: usize,
    l: usize,
    #[serde(flatten)]
    estimate: &'a EigTailEstimate,
    tolerance: f64,
    verdict: &'static str,
}

/// Tail exponent of the `L`-th eigenvalue; exit 3 when it misses the target.
pub fn cmd_eigtail(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t = &cfg.eigtail;
    let (seed, n_tx, n_rx, l) = (cfg.seed, cfg.n_tx, cfg.n_rx, cfg.l);
    let result = with_pool(cfg.workers, || estimate_eig_tail(seed, t.trials, n_tx, n_rx, l, &t.eps_grid))?;
    let estimate = match result {
        Ok(e) => e,
        Err(ProofError::InsufficientData { usable, excluded }) => {
            return Ok(Outcome::new(
                EXIT_INSUFFICIENT_DATA,
                format!("insufficient data: {usable} usable eps value(s), excluded {excluded:?}"),
            ))
        }
        Err(e) => return Err(proof_error(e)),
    };
    let pass = (estimate.exponent_hat - estimate.target as f64).abs() <= t.tolerance;
    let doc = EigTailDocument {
        config_fingerprint: cfg.fingerprint(),
        n_tx,
        n_rx,
        l,
        estimate: &estimate,
        tolerance: t.tolerance,
        verdict: if pass { "pass" } else { "fail" },
    };
    let mut files = OutputSet::default();
    files.add("eigtail.json", to_json(&doc));
    files.write(&cfg.output_dir, cfg, "eigtail")?;
    let msg = format!(
        "exponent {:.3} ± {:.3} vs target {} ({})",
        estimate.exponent_hat, estimate.stderr, estimate.target, doc.verdict
    );
    Ok(Outcome::new(if pass { EXIT_OK } else { EXIT_CHECK_FAILED }, msg))
}

#[derive(Debug, Clone, Serialize)]
struct BoundsDocument {
    n_tx: usize,
    n_rx: usize,
    l: usize,
    m_lower: usize,
    m_upper: usize,
}

/// Diversity bounds as a JSON line on stdout.
pub fn cmd_bounds(n_tx: usize, n_rx: usize, l: usize) -> Result<Outcome, CliError> {
    let b = diversity_bounds(n_tx, n_rx, l).map_err(proof_error)?;
    let doc = BoundsDocument {
        n_tx,
        n_rx,
        l,
        m_lower: b.m_lower,
        m_upper: b.m_upper,
    };
    Ok(Outcome::new(
        EXIT_OK,
        serde_json::to_string(&doc).expect("bounds serialize"),
    ))
}
