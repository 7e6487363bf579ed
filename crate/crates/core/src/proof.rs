//! Numerical verification of the matrix inequalities behind the diversity
//! ceiling `(N_T−L+1)(N_R−L+1)` for any transmit antenna selection policy.
//!
//! With `Q = HᴴH = UΛUᴴ`, `V = [u₁ … u_{L−1}]` and `S = (λ₁/λ_L)VVᴴ + I`,
//! every subset `j` satisfies
//!
//! ```text
//! Q ⪯ λ₁VVᴴ + λ_L I                      (majorization)
//! S_j⁻¹ = I − V_j((λ_L/λ₁)I + V_jᴴV_j)⁻¹V_jᴴ   (inversion lemma)
//! S_j⁻¹ ⪰ P_j = I − V_j(V_jᴴV_j)⁻¹V_jᴴ        (projection bound)
//! [Q_j⁻¹]_kk ≥ λ_L⁻¹[P_j]_kk                  (diagonal chain)
//! ρ_k ≤ λ_L ρ₀ / (τ_j L)                      (SNR bound)
//! ```
//!
//! Each relation is evaluated as a signed slack on random draws. The tail of
//! `λ_L` is estimated separately.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{enumerate_subsets, sample_channel, AntennaSubset, ChannelError, ChannelMatrix, SubsetCatalog};
use crate::linalg::{self, ComplexMatrix, HermitianEig, LinalgError};
use crate::rng::{map_trial_chunks, RandomStream, StreamDomain};
use crate::stats::{self, Quantiles};

const CHUNK: u64 = 1024;

/// Relative tolerance shared by all inequality checks.
pub const CHECK_TOL: f64 = 1e-8;

/// `τ_j` at or below this is treated as the probability-zero degenerate case.
pub const TAU_DEGENERATE: f64 = 1e-12;

/// Grid points of the eigenvalue tail with fewer events are not fitted.
pub const MIN_TAIL_EVENTS: u64 = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProofError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate draw: {0}")]
    Degenerate(String),
    #[error("insufficient data: {usable} usable point(s), need at least 2")]
    InsufficientData { usable: usize, excluded: Vec<f64> },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

fn check_dims(n_tx: usize, n_rx: usize, l: usize) -> Result<(), ProofError> {
    if n_tx == 0 || n_rx == 0 || l == 0 || l > n_tx.min(n_rx) {
        return Err(ProofError::InvalidConfig(format!(
            "need 1 <= L <= min(N_T, N_R), got n_tx = {n_tx}, n_rx = {n_rx}, l = {l}"
        )));
    }
    Ok(())
}

/// Quantities attached to one antenna subset.
#[derive(Debug, Clone)]
pub struct SubsetArtifacts {
    pub subset: AntennaSubset,
    /// Rows of `V` picked by the subset; `None` when `L = 1`.
    pub v_j: Option<ComplexMatrix>,
    pub s_j: ComplexMatrix,
    pub s_j_inv: ComplexMatrix,
    /// Projection onto the orthogonal complement of the columns of `V_j`.
    pub p_j: ComplexMatrix,
    pub q_j: ComplexMatrix,
    pub q_j_inv: ComplexMatrix,
    /// `min_k [P_j]_kk`.
    pub tau_j: f64,
}

/// Everything the inequality chain refers to for one channel draw.
#[derive(Debug, Clone)]
pub struct ProofArtifacts {
    pub q: ComplexMatrix,
    pub eig: HermitianEig,
    pub l: usize,
    pub lambda_1: f64,
    pub lambda_l: f64,
    /// First `L−1` eigenvectors of `Q`; `None` when `L = 1`.
    pub v: Option<ComplexMatrix>,
    pub s: ComplexMatrix,
    /// One entry per subset, in catalog order.
    pub subsets: Vec<SubsetArtifacts>,
    /// `min_j τ_j`.
    pub tau_global: f64,
    /// Catalog index of the subset of interest.
    pub chosen: usize,
}

impl ProofArtifacts {
    pub fn chosen_subset(&self) -> &SubsetArtifacts {
        &self.subsets[self.chosen]
    }

    /// `λ_L / λ₁`.
    pub fn ratio(&self) -> f64 {
        self.lambda_l / self.lambda_1
    }
}

fn leading_eigenvectors(eig: &HermitianEig, l: usize) -> Result<Option<ComplexMatrix>, LinalgError> {
    if l == 1 {
        return Ok(None);
    }
    let cols: Vec<usize> = (0..l - 1).collect();
    linalg::column_submatrix(&eig.eigenvectors, &cols).map(Some)
}

fn subset_projection(v: Option<&ComplexMatrix>, idx: &[usize]) -> Result<(Option<ComplexMatrix>, ComplexMatrix), ProofError> {
    match v {
        None => Ok((None, ComplexMatrix::identity(idx.len()))),
        Some(v) => {
            let v_j = linalg::row_submatrix(v, idx)?;
            let p_j = linalg::projection_complement(&v_j)
                .map_err(|_| ProofError::Degenerate(format!("V_jᴴV_j singular for subset {idx:?}")))?;
            Ok((Some(v_j), p_j))
        }
    }
}

fn min_diag(a: &ComplexMatrix) -> f64 {
    a.diag_real().into_iter().fold(f64::INFINITY, f64::min)
}

/// Builds the artifacts from a Gram matrix `Q` (`N_T × N_T`).
pub fn artifacts_from_gram(q: &ComplexMatrix, l: usize, chosen: usize) -> Result<ProofArtifacts, ProofError> {
    let n_tx = q.rows();
    if l == 0 || l > n_tx {
        return Err(ProofError::InvalidConfig(format!("need 1 <= L <= N_T, got L = {l}, N_T = {n_tx}")));
    }
    let catalog = enumerate_subsets(n_tx, l)?;
    if chosen >= catalog.len() {
        return Err(ProofError::InvalidConfig(format!(
            "subset index {chosen} out of range for {} subsets",
            catalog.len()
        )));
    }
    let eig = linalg::hermitian_eig(q)?;
    let lambda_1 = eig.eigenvalues[0];
    let lambda_l = eig.eigenvalues[l - 1];
    if lambda_l.is_nan() || lambda_l <= 0.0 {
        return Err(ProofError::Degenerate(format!("lambda_L = {lambda_l}")));
    }
    let v = leading_eigenvectors(&eig, l)?;
    let mut s = ComplexMatrix::identity(n_tx);
    if let Some(v) = &v {
        s = v.matmul(&v.adjoint()).scale(lambda_1 / lambda_l).add(&s);
        s.symmetrize();
    }

    let subsets = catalog
        .iter()
        .map(|subset| {
            let idx = subset.indices();
            let (v_j, p_j) = subset_projection(v.as_ref(), idx)?;
            let s_j = linalg::principal_submatrix(&s, idx)?;
            let s_j_inv = linalg::invert_hermitian_pd(&s_j)?;
            let q_j = linalg::principal_submatrix(q, idx)?;
            let q_j_inv = linalg::invert_hermitian_pd(&q_j)
                .map_err(|_| ProofError::Degenerate(format!("Q_j singular for subset {subset}")))?;
            let tau_j = min_diag(&p_j);
            Ok(SubsetArtifacts {
                subset: subset.clone(),
                v_j,
                s_j,
                s_j_inv,
                p_j,
                q_j,
                q_j_inv,
                tau_j,
            })
        })
        .collect::<Result<Vec<_>, ProofError>>()?;
    let tau_global = subsets.iter().map(|a| a.tau_j).fold(f64::INFINITY, f64::min);

    Ok(ProofArtifacts {
        q: q.clone(),
        eig,
        l,
        lambda_1,
        lambda_l,
        v,
        s,
        subsets,
        tau_global,
        chosen,
    })
}

/// Builds the artifacts for channel `h` with `l` streams; `j` is the 0-based
/// catalog index of the subset of interest.
pub fn build_proof_artifacts(h: &ChannelMatrix, l: usize, j: usize) -> Result<ProofArtifacts, ProofError> {
    check_dims(h.n_tx(), h.n_rx(), l)?;
    artifacts_from_gram(&h.full_gram(), l, j)
}

/// Smallest eigenvalue of `λ₁VVᴴ + λ_L I − Q`. With `inject_fault` the
/// difference is negated, which must make the check fail.
pub fn check_majorization(art: &ProofArtifacts, inject_fault: bool) -> Result<f64, ProofError> {
    let n = art.q.rows();
    let mut bound = ComplexMatrix::identity(n).scale(art.lambda_l);
    if let Some(v) = &art.v {
        bound = v.matmul(&v.adjoint()).scale(art.lambda_1).add(&bound);
    }
    let mut diff = bound.sub(&art.q);
    if inject_fault {
        diff = diff.scale(-1.0);
    }
    diff.symmetrize();
    Ok(linalg::smallest_eigenvalue(&diff)?)
}

/// Tolerance on [`check_majorization`]'s slack.
pub fn majorization_tolerance(art: &ProofArtifacts) -> f64 {
    CHECK_TOL * art.lambda_1.max(1.0)
}

/// `‖S_j⁻¹ − (I − V_j((λ_L/λ₁)I + V_jᴴV_j)⁻¹V_jᴴ)‖_max` for subset `j`.
pub fn check_inversion_lemma(art: &ProofArtifacts, j: usize) -> Result<f64, ProofError> {
    let sub = &art.subsets[j];
    let n = sub.s_j.rows();
    let mut rhs = ComplexMatrix::identity(n);
    if let Some(v_j) = &sub.v_j {
        let inner = ComplexMatrix::identity(v_j.cols()).scale(art.ratio()).add(&v_j.gram());
        let inner_inv = linalg::invert_hermitian_pd(&inner)?;
        rhs = rhs.sub(&v_j.matmul(&inner_inv).matmul(&v_j.adjoint()));
    }
    Ok(sub.s_j_inv.sub(&rhs).max_abs())
}

/// Smallest eigenvalue of `S_j⁻¹ − P_j`.
pub fn check_projection_bound(art: &ProofArtifacts, j: usize) -> Result<f64, ProofError> {
    let sub = &art.subsets[j];
    let mut diff = sub.s_j_inv.sub(&sub.p_j);
    diff.symmetrize();
    Ok(linalg::smallest_eigenvalue(&diff)?)
}

/// `min_k ([Q_j⁻¹]_kk − λ_L⁻¹[P_j]_kk)`.
pub fn check_diagonal_chain(art: &ProofArtifacts, j: usize) -> f64 {
    let sub = &art.subsets[j];
    sub.q_j_inv
        .diag_real()
        .into_iter()
        .zip(sub.p_j.diag_real())
        .map(|(qi, p)| qi - p / art.lambda_l)
        .fold(f64::INFINITY, f64::min)
}

fn zf_snrs(sub: &SubsetArtifacts, l: usize, rho0: f64) -> impl Iterator<Item = f64> + '_ {
    let per_stream = rho0 / l as f64;
    sub.q_j_inv.diag_real().into_iter().map(move |d| per_stream / d)
}

/// `min_k (λ_L ρ₀ / (τ_j L) − ρ_k)` with ZF post-processing SNRs `ρ_k`.
/// `None` when `τ_j` is degenerate.
pub fn check_snr_bound(art: &ProofArtifacts, j: usize, rho0: f64) -> Option<f64> {
    let sub = &art.subsets[j];
    if sub.tau_j <= TAU_DEGENERATE {
        return None;
    }
    let bound = art.lambda_l * rho0 / (sub.tau_j * art.l as f64);
    Some(zf_snrs(sub, art.l, rho0).map(|rho| bound - rho).fold(f64::INFINITY, f64::min))
}

/// End-to-end implication with `κ = τ_j` at the largest SNR allowed by the
/// premise, `ρ₀ = τ_j γ L / λ_L`: returns `min_k (γ − ρ_k)`, which must be
/// non-negative. `None` when `τ_j` is degenerate.
pub fn check_outage_implication(art: &ProofArtifacts, j: usize, gamma: f64) -> Option<f64> {
    let sub = &art.subsets[j];
    if sub.tau_j <= TAU_DEGENERATE {
        return None;
    }
    let rho0 = sub.tau_j * gamma * art.l as f64 / art.lambda_l;
    Some(zf_snrs(sub, art.l, rho0).map(|rho| gamma - rho).fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofCheckConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    pub l: usize,
    pub draws: u64,
    pub rho0: f64,
    pub gamma: f64,
    /// Negates the majorization difference; a negative control.
    pub inject_fault: bool,
}

impl ProofCheckConfig {
    pub fn validate(&self) -> Result<(), ProofError> {
        check_dims(self.n_tx, self.n_rx, self.l)?;
        if self.draws == 0 {
            return Err(ProofError::InvalidConfig("draws must be at least 1".into()));
        }
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return Err(ProofError::InvalidConfig(format!("rho0 must be > 0, got {}", self.rho0)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(ProofError::InvalidConfig(format!("threshold gamma must be > 0, got {}", self.gamma)));
        }
        Ok(())
    }
}

/// Aggregate of one inequality over all evaluated (draw, subset) pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    /// Smallest slack seen; for the inversion lemma the largest residual.
    pub min_slack: Option<f64>,
    pub failures: u64,
    pub tolerance: f64,
    pub evaluated: u64,
}

impl CheckSummary {
    fn new(tolerance: f64) -> Self {
        Self {
            min_slack: None,
            failures: 0,
            tolerance,
            evaluated: 0,
        }
    }

    fn merge(&mut self, other: &CheckSummary) {
        self.evaluated += other.evaluated;
        self.failures += other.failures;
        self.min_slack = match (self.min_slack, other.min_slack) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }

    fn record(&mut self, slack: f64, pass: bool) {
        self.evaluated += 1;
        self.failures += !pass as u64;
        self.min_slack = Some(self.min_slack.map_or(slack, |m| m.min(slack)));
    }

    fn record_max(&mut self, residual: f64, pass: bool) {
        self.evaluated += 1;
        self.failures += !pass as u64;
        self.min_slack = Some(self.min_slack.map_or(residual, |m| m.max(residual)));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofChecks {
    pub majorization: CheckSummary,
    pub inversion_lemma: CheckSummary,
    pub projection_bound: CheckSummary,
    pub diagonal_chain: CheckSummary,
    pub snr_bound: CheckSummary,
    pub outage_implication: CheckSummary,
}

impl ProofChecks {
    fn new() -> Self {
        Self {
            majorization: CheckSummary::new(CHECK_TOL),
            inversion_lemma: CheckSummary::new(CHECK_TOL),
            projection_bound: CheckSummary::new(CHECK_TOL),
            diagonal_chain: CheckSummary::new(CHECK_TOL),
            snr_bound: CheckSummary::new(CHECK_TOL),
            outage_implication: CheckSummary::new(CHECK_TOL),
        }
    }

    fn all(&self) -> [&CheckSummary; 6] {
        [
            &self.majorization,
            &self.inversion_lemma,
            &self.projection_bound,
            &self.diagonal_chain,
            &self.snr_bound,
            &self.outage_implication,
        ]
    }

    fn merge(&mut self, o: &ProofChecks) {
        self.majorization.merge(&o.majorization);
        self.inversion_lemma.merge(&o.inversion_lemma);
        self.projection_bound.merge(&o.projection_bound);
        self.diagonal_chain.merge(&o.diagonal_chain);
        self.snr_bound.merge(&o.snr_bound);
        self.outage_implication.merge(&o.outage_implication);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofCheckReport {
    pub n_tx: usize,
    pub n_rx: usize,
    pub l: usize,
    pub rho0: f64,
    pub gamma: f64,
    pub draws: u64,
    /// Draws with a singular `V_jᴴV_j` or `Q_j`, or some `τ_j ≤ 1e-12`.
    pub skipped_degenerate: u64,
    pub checks: ProofChecks,
    pub tau_quantiles: Quantiles,
    /// 10th percentile of `τ`.
    pub kappa_hat: f64,
    pub p_tau_ge_kappa: f64,
    #[serde(rename = "corr_tau_lambdaL")]
    pub corr_tau_lambda_l: f64,
    #[serde(rename = "lambdaL_quantiles")]
    pub lambda_l_quantiles: Quantiles,
    pub tau_zero_fraction: f64,
}

impl ProofCheckReport {
    pub fn total_failures(&self) -> u64 {
        self.checks.all().iter().map(|c| c.failures).sum()
    }
}

struct DrawOutcome {
    checks: ProofChecks,
    degenerate: bool,
    tau_lambda: Option<(f64, f64)>,
}

fn check_draw(h: &ChannelMatrix, cfg: &ProofCheckConfig) -> Result<DrawOutcome, ProofError> {
    let mut checks = ProofChecks::new();
    let art = match build_proof_artifacts(h, cfg.l, 0) {
        Ok(a) => a,
        Err(ProofError::Degenerate(_)) | Err(ProofError::Linalg(_)) => {
            return Ok(DrawOutcome {
                checks,
                degenerate: true,
                tau_lambda: None,
            })
        }
        Err(e) => return Err(e),
    };
    let slack = check_majorization(&art, cfg.inject_fault)?;
    checks.majorization.record(slack, slack >= -majorization_tolerance(&art));
    let mut degenerate = false;
    for j in 0..art.subsets.len() {
        let r = check_inversion_lemma(&art, j)?;
        checks.inversion_lemma.record_max(r, r <= CHECK_TOL);
        let p = check_projection_bound(&art, j)?;
        checks.projection_bound.record(p, p >= -CHECK_TOL);
        let d = check_diagonal_chain(&art, j);
        checks.diagonal_chain.record(d, d >= -CHECK_TOL / art.lambda_l);
        match check_snr_bound(&art, j, cfg.rho0) {
            Some(s) => checks.snr_bound.record(s, s >= -CHECK_TOL * cfg.rho0),
            None => degenerate = true,
        }
        if let Some(s) = check_outage_implication(&art, j, cfg.gamma) {
            checks.outage_implication.record(s, s >= -CHECK_TOL * cfg.gamma);
        }
    }
    Ok(DrawOutcome {
        checks,
        degenerate,
        tau_lambda: Some((art.tau_global, art.lambda_l)),
    })
}

/// Runs every check on `cfg.draws` random channels on the current rayon
/// pool. All subsets are checked on each draw.
pub fn run_proof_check(cfg: &ProofCheckConfig, seed: u64) -> Result<ProofCheckReport, ProofError> {
    cfg.validate()?;
    let chunks = map_trial_chunks(cfg.draws, CHUNK, |range| {
        let mut rng = RandomStream::new(seed, StreamDomain::ProofCheck, 0);
        range
            .map(|trial| {
                rng.seek_trial(trial);
                let h = sample_channel(&mut rng, cfg.n_rx, cfg.n_tx);
                check_draw(&h, cfg)
            })
            .collect::<Result<Vec<_>, _>>()
    });

    let mut checks = ProofChecks::new();
    let mut skipped = 0;
    let mut tau = Vec::new();
    let mut lambda = Vec::new();
    for chunk in chunks {
        for outcome in chunk? {
            checks.merge(&outcome.checks);
            skipped += outcome.degenerate as u64;
            if let Some((t, l)) = outcome.tau_lambda {
                tau.push(t);
                lambda.push(l);
            }
        }
    }
    let study = TauStudy {
        tau,
        lambda_l: lambda,
        degenerate: skipped,
    };
    let summary = study.summary();
    Ok(ProofCheckReport {
        n_tx: cfg.n_tx,
        n_rx: cfg.n_rx,
        l: cfg.l,
        rho0: cfg.rho0,
        gamma: cfg.gamma,
        draws: cfg.draws,
        skipped_degenerate: skipped,
        checks,
        tau_quantiles: summary.tau_quantiles,
        kappa_hat: summary.kappa_hat,
        p_tau_ge_kappa: summary.p_tau_ge_kappa,
        corr_tau_lambda_l: summary.correlation,
        lambda_l_quantiles: summary.lambda_l_quantiles,
        tau_zero_fraction: summary.zero_fraction,
    })
}

/// `τ = min_{j,k} [P_j]_kk` from an eigendecomposition of `Q`.
pub fn tau_from_eig(eig: &HermitianEig, catalog: &SubsetCatalog) -> Result<f64, ProofError> {
    let v = leading_eigenvectors(eig, catalog.l())?;
    let mut tau = f64::INFINITY;
    for subset in catalog.iter() {
        let (_, p_j) = subset_projection(v.as_ref(), subset.indices())?;
        tau = tau.min(min_diag(&p_j));
    }
    Ok(tau)
}

/// Paired samples of `τ` and `λ_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauStudy {
    pub tau: Vec<f64>,
    pub lambda_l: Vec<f64>,
    /// Draws where `τ` could not be formed.
    pub degenerate: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauSummary {
    pub samples: usize,
    pub tau_quantiles: Quantiles,
    pub kappa_hat: f64,
    pub p_tau_ge_kappa: f64,
    pub zero_fraction: f64,
    pub correlation: f64,
    pub lambda_l_quantiles: Quantiles,
}

impl TauStudy {
    pub fn fraction_ge(&self, x: f64) -> f64 {
        self.tau.iter().filter(|&&t| t >= x).count() as f64 / self.tau.len().max(1) as f64
    }

    pub fn correlation(&self) -> f64 {
        stats::correlation(&self.tau, &self.lambda_l)
    }

    pub fn summary(&self) -> TauSummary {
        let nan = Quantiles {
            p10: f64::NAN,
            p50: f64::NAN,
            p90: f64::NAN,
        };
        if self.tau.is_empty() {
            return TauSummary {
                samples: 0,
                tau_quantiles: nan,
                kappa_hat: f64::NAN,
                p_tau_ge_kappa: f64::NAN,
                zero_fraction: f64::NAN,
                correlation: f64::NAN,
                lambda_l_quantiles: nan,
            };
        }
        let tau_quantiles = Quantiles::of(&self.tau);
        let kappa_hat = tau_quantiles.p10;
        TauSummary {
            samples: self.tau.len(),
            tau_quantiles,
            kappa_hat,
            p_tau_ge_kappa: self.fraction_ge(kappa_hat),
            zero_fraction: self.tau.iter().filter(|&&t| t == 0.0).count() as f64 / self.tau.len() as f64,
            correlation: self.correlation(),
            lambda_l_quantiles: Quantiles::of(&self.lambda_l),
        }
    }
}

/// Samples `τ` and `λ_L` on `trials` random channels.
pub fn estimate_tau_distribution(
    seed: u64,
    trials: u64,
    n_tx: usize,
    n_rx: usize,
    l: usize,
) -> Result<TauStudy, ProofError> {
    check_dims(n_tx, n_rx, l)?;
    let catalog = enumerate_subsets(n_tx, l)?;
    let chunks = map_trial_chunks(trials, CHUNK, |range| {
        let mut rng = RandomStream::new(seed, StreamDomain::Tau, 0);
        let mut out = Vec::with_capacity((range.end - range.start) as usize);
        for trial in range {
            rng.seek_trial(trial);
            let h = sample_channel(&mut rng, n_rx, n_tx);
            let sample = linalg::hermitian_eig(&h.full_gram())
                .map_err(ProofError::from)
                .and_then(|eig| Ok((tau_from_eig(&eig, &catalog)?, eig.eigenvalues[l - 1])));
            out.push(sample.ok());
        }
        out
    });
    let mut study = TauStudy {
        tau: Vec::new(),
        lambda_l: Vec::new(),
        degenerate: 0,
    };
    for sample in chunks.into_iter().flatten() {
        match sample {
            Some((t, lam)) => {
                study.tau.push(t);
                study.lambda_l.push(lam);
            }
            None => study.degenerate += 1,
        }
    }
    Ok(study)
}

/// Empirical tail of the `L`-th largest eigenvalue of `HᴴH`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigTailEstimate {
    pub exponent_hat: f64,
    pub stderr: f64,
    pub eps_grid: Vec<f64>,
    pub p_hats: Vec<f64>,
    pub counts: Vec<u64>,
    pub trials: u64,
    /// `(N_T−L+1)(N_R−L+1)`.
    pub target: usize,
    pub points_used: usize,
    /// Grid values with fewer than [`MIN_TAIL_EVENTS`] events.
    pub excluded_eps: Vec<f64>,
}

impl EigTailEstimate {
    /// `p̂` should not grow as `ε` shrinks; returns grid indices where it
    /// does by more than three combined standard errors.
    pub fn non_monotone_points(&self) -> Vec<usize> {
        let var = |p: f64| p * (1.0 - p) / self.trials as f64;
        (1..self.p_hats.len())
            .filter(|&i| {
                let (a, b) = (self.p_hats[i - 1], self.p_hats[i]);
                b - a > 3.0 * (var(a) + var(b)).sqrt()
            })
            .collect()
    }
}

/// Counts `λ_L ≤ ε` over `trials` draws for each `ε` of a strictly
/// decreasing grid and fits the log-log slope.
pub fn estimate_eig_tail(
    seed: u64,
    trials: u64,
    n_tx: usize,
    n_rx: usize,
    l: usize,
    eps_grid: &[f64],
) -> Result<EigTailEstimate, ProofError> {
    check_dims(n_tx, n_rx, l)?;
    if eps_grid.is_empty() {
        return Err(ProofError::InvalidConfig("eps_grid must not be empty".into()));
    }
    if eps_grid.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(ProofError::InvalidConfig("eps_grid entries must be positive".into()));
    }
    if eps_grid.windows(2).any(|w| w[0] <= w[1]) {
        return Err(ProofError::InvalidConfig("eps_grid must be strictly decreasing".into()));
    }
    if trials == 0 {
        return Err(ProofError::InvalidConfig("trials must be at least 1".into()));
    }

    let partial = map_trial_chunks(trials, 4 * CHUNK, |range| {
        let mut rng = RandomStream::new(seed, StreamDomain::EigTail, 0);
        let mut counts = vec![0u64; eps_grid.len()];
        for trial in range {
            rng.seek_trial(trial);
            let h = sample_channel(&mut rng, n_rx, n_tx);
            let vals = linalg::hermitian_eigenvalues(&h.full_gram()).expect("Gram matrix is Hermitian");
            let lambda = vals[l - 1];
            for (c, &e) in counts.iter_mut().zip(eps_grid) {
                *c += (lambda <= e) as u64;
            }
        }
        counts
    });
    let mut counts = vec![0u64; eps_grid.len()];
    for part in partial {
        for (c, p) in counts.iter_mut().zip(part) {
            *c += p;
        }
    }

    let p_hats: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut excluded = Vec::new();
    for ((&e, &c), &p) in eps_grid.iter().zip(&counts).zip(&p_hats) {
        if c >= MIN_TAIL_EVENTS {
            x.push(e.ln());
            y.push(p.ln());
        } else {
            excluded.push(e);
        }
    }
    let fit = stats::ols(&x, &y).ok_or_else(|| ProofError::InsufficientData {
        usable: x.len(),
        excluded: excluded.clone(),
    })?;
    Ok(EigTailEstimate {
        exponent_hat: fit.slope,
        stderr: fit.slope_stderr,
        eps_grid: eps_grid.to_vec(),
        p_hats,
        counts,
        trials,
        target: (n_tx - l + 1) * (n_rx - l + 1),
        points_used: x.len(),
        excluded_eps: excluded,
    })
}

/// Range of the best diversity order achievable with `L` of `N_T` transmit
/// antennas and `N_R` receive antennas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiversityBounds {
    /// `(N_T−L+1)(N_R−L+1)`.
    pub m_lower: usize,
    /// `(N_T−L+1)(N_R−1)` for `L ≥ 2`. With a single stream selection reaches
    /// full diversity `N_T N_R`, so the upper value equals the lower one.
    pub m_upper: usize,
}

pub fn diversity_bounds(n_tx: usize, n_rx: usize, l: usize) -> Result<DiversityBounds, ProofError> {
    check_dims(n_tx, n_rx, l)?;
    let m_lower = (n_tx - l + 1) * (n_rx - l + 1);
    let m_upper = if l == 1 { m_lower } else { (n_tx - l + 1) * (n_rx - 1) };
    Ok(DiversityBounds { m_lower, m_upper })
}
