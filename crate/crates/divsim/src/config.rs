//! Run configuration: a TOML document whose keys mirror the struct fields.

use std::path::{Path, PathBuf};

use divsim_core::channel::Receiver;
use divsim_core::outage::{db_to_linear, Estimator, OutageConfig};
use divsim_core::policy::PolicyId;
use divsim_core::proof::ProofCheckConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

fn default_receiver() -> Receiver {
    Receiver::Zf
}
fn default_policy() -> String {
    "max-min-snr".into()
}
fn default_fixed_index() -> usize {
    1
}
fn default_grid() -> Vec<f64> {
    vec![0.0, 5.0, 10.0, 15.0, 20.0]
}
fn default_gamma() -> f64 {
    1.0
}
fn default_trials() -> u64 {
    100_000
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    pub l: usize,
    #[serde(default = "default_receiver")]
    pub receiver: Receiver,
    /// `max-min-snr`, `max-capacity`, `random` or `fixed-first`.
    #[serde(default = "default_policy")]
    pub policy: String,
    /// 1-based catalog position used by `fixed-first`.
    #[serde(default = "default_fixed_index")]
    pub fixed_index: usize,
    #[serde(default = "default_grid")]
    pub snr_grid_db: Vec<f64>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_trials")]
    pub trials_per_point: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads; all available cores when absent. Never affects results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub slope: SlopeSection,
    #[serde(default)]
    pub eigtail: EigTailSection,
    #[serde(default)]
    pub proofcheck: ProofCheckSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlopeSection {
    /// `all-out`, `any-out` or `stream-k` (1-based).
    pub estimator: String,
    /// Inclusive `[min, max]` in dB; the whole grid when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_db: Option<[f64; 2]>,
    pub min_events: u64,
}

impl Default for SlopeSection {
    fn default() -> Self {
        Self {
            estimator: "all-out".into(),
            window_db: None,
            min_events: divsim_core::outage::DEFAULT_MIN_EVENTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigTailSection {
    /// Strictly decreasing thresholds on the `L`-th eigenvalue.
    pub eps_grid: Vec<f64>,
    pub trials: u64,
    /// Allowed `|exponent_hat − target|`.
    pub tolerance: f64,
}

impl Default for EigTailSection {
    fn default() -> Self {
        Self {
            eps_grid: vec![0.1, 0.05, 0.02, 0.01],
            trials: 1_000_000,
            tolerance: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProofCheckSection {
    pub draws: u64,
    pub rho0_db: f64,
    /// Negative control: flips the sign of the majorization check.
    pub inject_fault: bool,
}

impl Default for ProofCheckSection {
    fn default() -> Self {
        Self {
            draws: 100_000,
            rho0_db: 20.0,
            inject_fault: false,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

/// Which command the configuration is validated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Simulate,
    ProofCheck,
    EigTail,
    Bounds,
}

fn config_error(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {msg}"))
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Applies overrides; `--trials` sets the trial count of `kind`.
    pub fn apply(&mut self, o: &Overrides, kind: CommandKind) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(out) = &o.out {
            self.output_dir = out.clone();
        }
        if let Some(w) = o.workers {
            self.workers = Some(w);
        }
        if let Some(t) = o.trials {
            match kind {
                CommandKind::Simulate => self.trials_per_point = t,
                CommandKind::ProofCheck => self.proofcheck.draws = t,
                CommandKind::EigTail => self.eigtail.trials = t,
                CommandKind::Bounds => {}
            }
        }
    }

    pub fn validate(&self, kind: CommandKind) -> Result<(), CliError> {
        for (key, v) in [("n_tx", self.n_tx), ("n_rx", self.n_rx), ("l", self.l)] {
            if v == 0 {
                return Err(config_error(key, "must be at least 1"));
            }
        }
        if self.l > self.n_tx.min(self.n_rx) {
            return Err(config_error(
                "l",
                format!(
                    "L ≤ min(N_T, N_R) violated: l = {}, n_tx = {}, n_rx = {}",
                    self.l, self.n_tx, self.n_rx
                ),
            ));
        }
        if self.workers == Some(0) {
            return Err(config_error("workers", "must be at least 1"));
        }
        match kind {
            CommandKind::Simulate => self.validate_simulate(),
            CommandKind::ProofCheck => self.validate_proofcheck(),
            CommandKind::EigTail => self.validate_eigtail(),
            CommandKind::Bounds => Ok(()),
        }
    }

    fn validate_gamma(&self) -> Result<(), CliError> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(config_error(
                "gamma",
                format!("must be a finite threshold, γ > 0 (got {})", self.gamma),
            ));
        }
        Ok(())
    }

    fn validate_simulate(&self) -> Result<(), CliError> {
        self.validate_gamma()?;
        let grid = &self.snr_grid_db;
        if grid.is_empty() {
            return Err(config_error("snr_grid_db", "must not be empty"));
        }
        if grid.iter().any(|x| !x.is_finite()) {
            return Err(config_error("snr_grid_db", "entries must be finite"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_error("snr_grid_db", "must be strictly increasing"));
        }
        if self.trials_per_point == 0 {
            return Err(config_error("trials_per_point", "must be at least 1"));
        }
        self.policy_id()?;
        let estimator = self.estimator()?;
        if let Estimator::Stream(k) = estimator {
            if k >= self.l {
                return Err(config_error(
                    "slope.estimator",
                    format!("stream index {} exceeds L = {}", k + 1, self.l),
                ));
            }
        }
        if let Some([lo, hi]) = self.slope.window_db {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(config_error("slope.window_db", "must be finite [min, max] with min <= max"));
            }
        }
        Ok(())
    }

    fn validate_proofcheck(&self) -> Result<(), CliError> {
        self.validate_gamma()?;
        if self.proofcheck.draws == 0 {
            return Err(config_error("proofcheck.draws", "must be at least 1"));
        }
        if !self.proofcheck.rho0_db.is_finite() {
            return Err(config_error("proofcheck.rho0_db", "must be finite"));
        }
        Ok(())
    }

    fn validate_eigtail(&self) -> Result<(), CliError> {
        let grid = &self.eigtail.eps_grid;
        if grid.is_empty() {
            return Err(config_error("eigtail.eps_grid", "must not be empty"));
        }
        if grid.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(config_error("eigtail.eps_grid", "entries must be positive and finite"));
        }
        if grid.windows(2).any(|w| w[0] <= w[1]) {
            return Err(config_error("eigtail.eps_grid", "must be strictly decreasing"));
        }
        if self.eigtail.trials == 0 {
            return Err(config_error("eigtail.trials", "must be at least 1"));
        }
        if !(self.eigtail.tolerance > 0.0 && self.eigtail.tolerance.is_finite()) {
            return Err(config_error("eigtail.tolerance", "must be positive"));
        }
        Ok(())
    }

    pub fn policy_id(&self) -> Result<PolicyId, CliError> {
        let id: PolicyId = self.policy.parse().map_err(|e| config_error("policy", e))?;
        match id {
            PolicyId::FixedFirst { .. } => {
                let n_subsets = divsim_core::channel::enumerate_subsets(self.n_tx, self.l)
                    .map_err(|e| config_error("l", e))?
                    .len();
                if self.fixed_index == 0 || self.fixed_index > n_subsets {
                    return Err(config_error(
                        "fixed_index",
                        format!("must lie in 1..={n_subsets}, got {}", self.fixed_index),
                    ));
                }
                Ok(PolicyId::FixedFirst {
                    index: self.fixed_index - 1,
                })
            }
            other => Ok(other),
        }
    }

    pub fn estimator(&self) -> Result<Estimator, CliError> {
        self.slope
            .estimator
            .parse()
            .map_err(|e| config_error("slope.estimator", e))
    }

    pub fn outage_config(&self) -> Result<OutageConfig, CliError> {
        Ok(OutageConfig {
            n_tx: self.n_tx,
            n_rx: self.n_rx,
            l: self.l,
            receiver: self.receiver,
            policy: self.policy_id()?,
            snr_grid_db: self.snr_grid_db.clone(),
            gamma: self.gamma,
            trials_per_point: self.trials_per_point,
        })
    }

    pub fn proofcheck_config(&self) -> ProofCheckConfig {
        ProofCheckConfig {
            n_tx: self.n_tx,
            n_rx: self.n_rx,
            l: self.l,
            draws: self.proofcheck.draws,
            rho0: db_to_linear(self.proofcheck.rho0_db),
            gamma: self.gamma,
            inject_fault: self.proofcheck.inject_fault,
        }
    }

    /// SHA-256 of the canonical JSON form of every setting that can change
    /// results (everything except `output_dir` and `workers`).
    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        c.workers = None;
        let json = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
