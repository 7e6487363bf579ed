//! Monte Carlo outage probabilities over an SNR grid and log-log diversity
//! fits.
//!
//! For each grid point and trial the channel is drawn from the counter-based
//! stream `(seed, point, trial)`, a subset is selected, and three counter
//! families are updated: all streams in outage (`ρ̄ ≤ γ`), any stream in
//! outage (`ρ̲ ≤ γ`), and each stream separately. Trials are processed in
//! fixed-size chunks on the current rayon pool and merged by integer
//! addition, so results do not depend on the number of workers.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::channel::{self, enumerate_subsets, sample_channel, ChannelError, Receiver, SimParams, SubsetCatalog};
use crate::policy::{PolicyError, PolicyId};
use crate::rng::{RandomStream, StreamDomain};
use crate::stats::{self, LinearFit};

/// Trials per work item. Part of the reproducibility contract only through
/// the per-trial streams, not through the partition.
const CHUNK: u64 = 4096;

/// Default minimum outage count for a grid point to enter a slope fit.
pub const DEFAULT_MIN_EVENTS: u64 = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OutageError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("insufficient data: {usable} usable point(s), need at least 2")]
    InsufficientData { usable: usize, excluded: Vec<f64> },
    #[error("cannot merge outage points: {0}")]
    Mismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

/// Everything that determines an outage curve except the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    pub l: usize,
    pub receiver: Receiver,
    pub policy: PolicyId,
    pub snr_grid_db: Vec<f64>,
    pub gamma: f64,
    pub trials_per_point: u64,
}

impl OutageConfig {
    pub fn validate(&self) -> Result<SubsetCatalog, OutageError> {
        let bad = |m: String| Err(OutageError::InvalidConfig(m));
        if self.n_tx == 0 || self.n_rx == 0 || self.l == 0 {
            return bad("n_tx, n_rx and l must be at least 1".into());
        }
        if self.l > self.n_tx.min(self.n_rx) {
            return bad(format!(
                "L <= min(N_T, N_R) violated: l = {}, n_tx = {}, n_rx = {}",
                self.l, self.n_tx, self.n_rx
            ));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("threshold gamma must be > 0, got {}", self.gamma));
        }
        if self.snr_grid_db.is_empty() {
            return bad("snr_grid_db must not be empty".into());
        }
        if self.snr_grid_db.iter().any(|x| !x.is_finite()) {
            return bad("snr_grid_db entries must be finite".into());
        }
        if self.snr_grid_db.windows(2).any(|w| w[0] >= w[1]) {
            return bad("snr_grid_db must be strictly increasing".into());
        }
        if self.trials_per_point == 0 {
            return bad("trials_per_point must be at least 1".into());
        }
        let catalog = enumerate_subsets(self.n_tx, self.l)?;
        self.policy.validate(catalog.len())?;
        Ok(catalog)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Outage counters at one transmit SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutagePoint {
    pub rho0_db: f64,
    pub rho0_linear: f64,
    pub trials: u64,
    pub count_all_out: u64,
    pub count_any_out: u64,
    pub count_stream_out: Vec<u64>,
    pub singular_events: u64,
}

impl OutagePoint {
    /// Point with zero trials; the identity of [`merge_points`].
    pub fn empty(rho0_db: f64, streams: usize) -> Self {
        Self {
            rho0_db,
            rho0_linear: db_to_linear(rho0_db),
            trials: 0,
            count_all_out: 0,
            count_any_out: 0,
            count_stream_out: vec![0; streams],
            singular_events: 0,
        }
    }

    fn record(&mut self, snr: &channel::PostSnrSet, gamma: f64) {
        self.trials += 1;
        let mut all = true;
        let mut any = false;
        for (count, &rho) in self.count_stream_out.iter_mut().zip(&snr.effective) {
            let out = rho <= gamma;
            all &= out;
            any |= out;
            *count += out as u64;
        }
        self.count_all_out += all as u64;
        self.count_any_out += any as u64;
        self.singular_events += snr.singular as u64;
    }

    fn ratio(&self, count: u64) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            count as f64 / self.trials as f64
        }
    }

    pub fn phat_all_out(&self) -> f64 {
        self.ratio(self.count_all_out)
    }

    pub fn phat_any_out(&self) -> f64 {
        self.ratio(self.count_any_out)
    }

    pub fn phat_stream(&self, k: usize) -> f64 {
        self.ratio(self.count_stream_out[k])
    }

    pub fn count(&self, estimator: Estimator) -> u64 {
        match estimator {
            Estimator::AllOut => self.count_all_out,
            Estimator::AnyOut => self.count_any_out,
            Estimator::Stream(k) => self.count_stream_out[k],
        }
    }

    /// `all ≤ every stream ≤ any ≤ trials`.
    pub fn counters_ordered(&self) -> bool {
        self.count_stream_out
            .iter()
            .all(|&c| self.count_all_out <= c && c <= self.count_any_out)
            && self.count_any_out <= self.trials
            && self.count_all_out <= self.count_any_out
    }
}

/// Counter-wise sum of two points at the same SNR.
pub fn merge_points(a: &OutagePoint, b: &OutagePoint) -> Result<OutagePoint, OutageError> {
    if a.rho0_db.to_bits() != b.rho0_db.to_bits() {
        return Err(OutageError::Mismatch(format!(
            "rho0 {} dB vs {} dB",
            a.rho0_db, b.rho0_db
        )));
    }
    if a.count_stream_out.len() != b.count_stream_out.len() {
        return Err(OutageError::Mismatch("different stream counts".into()));
    }
    Ok(OutagePoint {
        rho0_db: a.rho0_db,
        rho0_linear: a.rho0_linear,
        trials: a.trials + b.trials,
        count_all_out: a.count_all_out + b.count_all_out,
        count_any_out: a.count_any_out + b.count_any_out,
        count_stream_out: a
            .count_stream_out
            .iter()
            .zip(&b.count_stream_out)
            .map(|(x, y)| x + y)
            .collect(),
        singular_events: a.singular_events + b.singular_events,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageCurve {
    pub config: OutageConfig,
    pub seed: u64,
    pub points: Vec<OutagePoint>,
}

impl OutageCurve {
    /// Indices `i` where `p̂_all` rises from point `i-1` to `i` by more than
    /// three combined binomial standard errors. A diagnostic only.
    pub fn non_monotone_points(&self) -> Vec<usize> {
        let se = |p: &OutagePoint| {
            let q = p.phat_all_out();
            q * (1.0 - q) / p.trials.max(1) as f64
        };
        (1..self.points.len())
            .filter(|&i| {
                let (a, b) = (&self.points[i - 1], &self.points[i]);
                b.phat_all_out() - a.phat_all_out() > 3.0 * (se(a) + se(b)).sqrt()
            })
            .collect()
    }
}

fn simulate_chunk(
    config: &OutageConfig,
    catalog: &SubsetCatalog,
    seed: u64,
    point: usize,
    trials: std::ops::Range<u64>,
) -> OutagePoint {
    let rho0_db = config.snr_grid_db[point];
    let mut out = OutagePoint::empty(rho0_db, config.l);
    let params = SimParams {
        rho0: out.rho0_linear,
        l: config.l,
        gamma: config.gamma,
    };
    let mut rng = RandomStream::new(seed, StreamDomain::Outage, point as u64);
    for trial in trials {
        rng.seek_trial(trial);
        let h = sample_channel(&mut rng, config.n_rx, config.n_tx);
        let j = config
            .policy
            .select(&h, catalog, &params, &mut rng)
            .expect("policy validated against catalog");
        let q_j = channel::gram(&h, catalog.get(j)).expect("catalog subsets fit the channel");
        let snr = config.receiver.post_snr_from_gram(&q_j, &params);
        out.record(&snr, config.gamma);
    }
    out
}

/// Runs the Monte Carlo outage experiment on the current rayon pool.
pub fn run_outage(config: &OutageConfig, seed: u64) -> Result<OutageCurve, OutageError> {
    let catalog = config.validate()?;
    let chunks_per_point = config.trials_per_point.div_ceil(CHUNK);
    let work: Vec<(usize, u64)> = (0..config.snr_grid_db.len())
        .flat_map(|p| (0..chunks_per_point).map(move |c| (p, c)))
        .collect();
    let partials: Vec<(usize, OutagePoint)> = work
        .into_par_iter()
        .map(|(p, c)| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(config.trials_per_point);
            (p, simulate_chunk(config, &catalog, seed, p, start..end))
        })
        .collect();

    let mut points: Vec<OutagePoint> = config
        .snr_grid_db
        .iter()
        .map(|&db| OutagePoint::empty(db, config.l))
        .collect();
    for (p, partial) in &partials {
        points[*p] = merge_points(&points[*p], partial)?;
    }
    Ok(OutageCurve {
        config: config.clone(),
        seed,
        points,
    })
}

/// Which outage event a slope is fitted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// `ρ̄ ≤ γ`: every stream in outage.
    AllOut,
    /// `ρ̲ ≤ γ`: some stream in outage.
    AnyOut,
    /// Stream `k` (0-based) in outage.
    Stream(usize),
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimator::AllOut => f.write_str("all-out"),
            Estimator::AnyOut => f.write_str("any-out"),
            Estimator::Stream(k) => write!(f, "stream-{}", k + 1),
        }
    }
}

impl FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all-out" => Ok(Estimator::AllOut),
            "any-out" => Ok(Estimator::AnyOut),
            other => other
                .strip_prefix("stream-")
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k >= 1)
                .map(|k| Estimator::Stream(k - 1))
                .ok_or_else(|| format!("unknown estimator '{other}' (expected all-out, any-out or stream-k)")),
        }
    }
}

impl Serialize for Estimator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Estimator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Fitted diversity order over a window of the SNR grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeEstimate {
    pub estimator: Estimator,
    pub d_hat: f64,
    pub stderr: f64,
    pub points_used: usize,
    /// `(min_db, max_db)`, inclusive.
    pub window: (f64, f64),
    /// Grid points inside the window dropped for having too few events (dB).
    pub excluded_points: Vec<f64>,
}

/// OLS slope of `ln p` against `ln ρ₀⁻¹`.
pub fn fit_diversity(rho0_linear: &[f64], p: &[f64]) -> Option<LinearFit> {
    let x: Vec<f64> = rho0_linear.iter().map(|r| -r.ln()).collect();
    let y: Vec<f64> = p.iter().map(|q| q.ln()).collect();
    stats::ols(&x, &y)
}

/// Diversity fit over grid points in `window` (whole grid when `None`) that
/// have at least `min_events` outage events.
pub fn estimate_slope(
    curve: &OutageCurve,
    estimator: Estimator,
    window: Option<(f64, f64)>,
    min_events: u64,
) -> Result<SlopeEstimate, OutageError> {
    if let Estimator::Stream(k) = estimator {
        if k >= curve.config.l {
            return Err(OutageError::InvalidArgument(format!(
                "estimator {estimator} but only {} streams",
                curve.config.l
            )));
        }
    }
    let window = window.unwrap_or_else(|| {
        let g = &curve.config.snr_grid_db;
        (g[0], g[g.len() - 1])
    });
    let mut rho = Vec::new();
    let mut p = Vec::new();
    let mut excluded = Vec::new();
    for point in curve
        .points
        .iter()
        .filter(|pt| pt.rho0_db >= window.0 && pt.rho0_db <= window.1)
    {
        let events = point.count(estimator);
        if events >= min_events.max(1) {
            rho.push(point.rho0_linear);
            p.push(events as f64 / point.trials as f64);
        } else {
            excluded.push(point.rho0_db);
        }
    }
    let fit = fit_diversity(&rho, &p).ok_or_else(|| OutageError::InsufficientData {
        usable: rho.len(),
        excluded: excluded.clone(),
    })?;
    Ok(SlopeEstimate {
        estimator,
        d_hat: fit.slope,
        stderr: fit.slope_stderr,
        points_used: rho.len(),
        window,
        excluded_points: excluded,
    })
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(count: u64, trials: u64, confidence: f64) -> Result<(f64, f64), OutageError> {
    if trials == 0 || count > trials {
        return Err(OutageError::InvalidArgument(format!(
            "need 0 <= count <= trials and trials >= 1, got {count}/{trials}"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(OutageError::InvalidArgument(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    let z = Normal::standard().inverse_cdf(1.0 - (1.0 - confidence) / 2.0);
    let n = trials as f64;
    let p = count as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if count == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let hi = if count == trials { 1.0 } else { (center + half).clamp(p, 1.0) };
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn config_1x1(grid: Vec<f64>, gamma: f64, trials: u64) -> OutageConfig {
        OutageConfig {
            n_tx: 1,
            n_rx: 1,
            l: 1,
            receiver: Receiver::Zf,
            policy: PolicyId::MaxMinSnr,
            snr_grid_db: grid,
            gamma,
            trials_per_point: trials,
        }
    }

    fn synthetic_curve(rho_db: &[f64], p: impl Fn(f64) -> f64, trials: u64) -> OutageCurve {
        let points = rho_db
            .iter()
            .map(|&db| {
                let mut pt = OutagePoint::empty(db, 1);
                pt.trials = trials;
                let c = (p(pt.rho0_linear) * trials as f64).round() as u64;
                pt.count_all_out = c;
                pt.count_any_out = c;
                pt.count_stream_out = vec![c];
                pt
            })
            .collect();
        OutageCurve {
            config: config_1x1(rho_db.to_vec(), 1.0, trials),
            seed: 0,
            points,
        }
    }

    #[test]
    fn extreme_thresholds() {
        let curve = run_outage(&config_1x1(vec![0.0, 10.0], 1e-300, 500), 1).unwrap();
        for pt in &curve.points {
            assert_eq!((pt.count_all_out, pt.count_any_out, pt.count_stream_out[0]), (0, 0, 0));
        }
        let mut cfg = config_1x1(vec![0.0, 10.0], 1e300, 500);
        cfg.n_tx = 3;
        cfg.n_rx = 2;
        cfg.l = 2;
        let curve = run_outage(&cfg, 1).unwrap();
        for pt in &curve.points {
            assert_eq!(pt.count_all_out, 500);
            assert_eq!(pt.count_any_out, 500);
            assert_eq!(pt.count_stream_out, vec![500, 500]);
        }
    }

    #[test]
    fn single_antenna_matches_exponential_cdf() {
        let trials = 1_000_000;
        let curve = run_outage(&config_1x1(vec![10.0], 1.0, trials), 42).unwrap();
        let pt = &curve.points[0];
        let p = 1.0 - (-1.0f64 / 10.0).exp();
        assert_abs_diff_eq!(p, 0.09516, epsilon = 1e-5);
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((pt.phat_all_out() - p).abs() <= 4.0 * se, "{}", pt.phat_all_out());
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = config_1x1(vec![0.0, 5.0], 1.0, 10);
        let mut c = base.clone();
        c.l = 2;
        assert!(matches!(run_outage(&c, 0), Err(OutageError::InvalidConfig(m)) if m.contains("L <= min(N_T, N_R)")));
        let mut c = base.clone();
        c.gamma = 0.0;
        assert!(run_outage(&c, 0).is_err());
        let mut c = base.clone();
        c.snr_grid_db = vec![5.0, 5.0];
        assert!(run_outage(&c, 0).is_err());
        let mut c = base.clone();
        c.trials_per_point = 0;
        assert!(run_outage(&c, 0).is_err());
        let mut c = base;
        c.policy = PolicyId::FixedFirst { index: 1 };
        assert!(matches!(run_outage(&c, 0), Err(OutageError::Policy(_))));
    }

    #[test]
    fn counters_are_ordered_for_every_receiver() {
        for receiver in Receiver::ALL {
            for policy in [PolicyId::MaxMinSnr, PolicyId::Random, PolicyId::MaxCapacity] {
                let cfg = OutageConfig {
                    n_tx: 4,
                    n_rx: 3,
                    l: 3,
                    receiver,
                    policy,
                    snr_grid_db: vec![0.0, 10.0],
                    gamma: 1.0,
                    trials_per_point: 3000,
                };
                let curve = run_outage(&cfg, 3).unwrap();
                assert!(curve.points.iter().all(OutagePoint::counters_ordered));
            }
        }
    }

    #[test]
    fn ordered_df_all_out_equals_zf_all_out() {
        // first decoded stream has SNR max_k ρ_k, so with propagation the
        // all-out events coincide draw by draw
        let mut cfg = OutageConfig {
            n_tx: 3,
            n_rx: 2,
            l: 2,
            receiver: Receiver::Zf,
            policy: PolicyId::MaxMinSnr,
            snr_grid_db: vec![0.0, 5.0],
            gamma: 1.0,
            trials_per_point: 20_000,
        };
        let zf = run_outage(&cfg, 5).unwrap();
        cfg.receiver = Receiver::ZfDfOrdered;
        let df = run_outage(&cfg, 5).unwrap();
        for (a, b) in zf.points.iter().zip(&df.points) {
            assert_eq!(a.count_all_out, b.count_all_out);
        }
    }

    #[test]
    fn trials_of_one() {
        let curve = run_outage(&config_1x1(vec![0.0], 1.0, 1), 3).unwrap();
        assert_eq!(curve.points[0].trials, 1);
        assert!(curve.points[0].count_all_out <= 1);
    }

    #[test]
    fn slope_of_exact_power_law() {
        let grid = [10.0, 15.0, 20.0, 25.0, 30.0];
        let rho: Vec<f64> = grid.iter().map(|&d| db_to_linear(d)).collect();
        let p: Vec<f64> = rho.iter().map(|r| r.powi(-2)).collect();
        let fit = fit_diversity(&rho, &p).unwrap();
        assert_abs_diff_eq!(fit.slope, 2.0, epsilon = 1e-12);
        let p: Vec<f64> = rho.iter().map(|r| 7.0 / r).collect();
        assert_abs_diff_eq!(fit_diversity(&rho, &p).unwrap().slope, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn slope_of_analytic_single_antenna_curve() {
        let grid = [20.0, 25.0, 30.0, 35.0, 40.0];
        let rho: Vec<f64> = grid.iter().map(|&d| db_to_linear(d)).collect();
        let p: Vec<f64> = rho.iter().map(|r| 1.0 - (-1.0 / r).exp()).collect();
        let fit = fit_diversity(&rho, &p).unwrap();
        assert!((fit.slope - 1.0).abs() <= 0.02, "{}", fit.slope);
    }

    #[test]
    fn estimate_slope_excludes_sparse_points() {
        let grid = [0.0, 10.0, 20.0, 30.0, 40.0];
        let curve = synthetic_curve(&grid, |r| 0.5 / r, 100_000);
        // counts: 50000, 5000, 500, 50, 5
        let est = estimate_slope(&curve, Estimator::AllOut, None, 50).unwrap();
        assert_eq!(est.points_used, 4);
        assert_eq!(est.excluded_points, vec![40.0]);
        assert_abs_diff_eq!(est.d_hat, 1.0, epsilon = 1e-9);
        assert_eq!(est.window, (0.0, 40.0));

        let est = estimate_slope(&curve, Estimator::Stream(0), Some((10.0, 30.0)), 50).unwrap();
        assert_eq!(est.points_used, 3);

        let err = estimate_slope(&curve, Estimator::AllOut, Some((30.0, 40.0)), 50).unwrap_err();
        assert!(matches!(err, OutageError::InsufficientData { usable: 1, .. }));
        assert!(estimate_slope(&curve, Estimator::Stream(1), None, 50).is_err());
    }

    #[test]
    fn estimator_names() {
        assert_eq!("stream-2".parse::<Estimator>().unwrap(), Estimator::Stream(1));
        assert_eq!(Estimator::Stream(1).to_string(), "stream-2");
        assert_eq!("all-out".parse::<Estimator>().unwrap(), Estimator::AllOut);
        assert!("stream-0".parse::<Estimator>().is_err());
        assert!("median".parse::<Estimator>().is_err());
    }

    /// Direct transcription of the Wilson score formula, with z for 95%.
    fn wilson_oracle(k: f64, n: f64) -> (f64, f64) {
        let z = 1.959_963_984_540_054;
        let p = k / n;
        let a = p + z * z / (2.0 * n);
        let b = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt();
        let d = 1.0 + z * z / n;
        ((a - b) / d, (a + b) / d)
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 1000, 0.95).unwrap();
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0);
        let (lo, hi) = wilson_interval(1000, 1000, 0.95).unwrap();
        assert_eq!(hi, 1.0);
        assert!(lo < 1.0);
        let (lo, hi) = wilson_interval(50, 1000, 0.95).unwrap();
        assert!(lo < 0.05 && 0.05 < hi);
        let (olo, ohi) = wilson_oracle(50.0, 1000.0);
        assert_abs_diff_eq!(lo, olo, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, ohi, epsilon = 1e-12);
        assert!(wilson_interval(5, 4, 0.95).is_err());
        assert!(wilson_interval(0, 0, 0.95).is_err());
        assert!(wilson_interval(1, 4, 1.0).is_err());
    }

    #[test]
    fn merge_identity_and_mismatch() {
        let mut a = OutagePoint::empty(5.0, 2);
        a.trials = 10;
        a.count_all_out = 1;
        a.count_any_out = 4;
        a.count_stream_out = vec![2, 3];
        assert_eq!(merge_points(&a, &OutagePoint::empty(5.0, 2)).unwrap(), a);
        assert!(merge_points(&a, &OutagePoint::empty(6.0, 2)).is_err());
        assert!(merge_points(&a, &OutagePoint::empty(5.0, 3)).is_err());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = OutageConfig {
            n_tx: 3,
            n_rx: 2,
            l: 2,
            receiver: Receiver::ZfDfOrdered,
            policy: PolicyId::Random,
            snr_grid_db: vec![0.0, 6.0],
            gamma: 1.0,
            trials_per_point: 10_000,
        };
        let run = |workers| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .unwrap()
                .install(|| run_outage(&cfg, 77).unwrap())
        };
        assert_eq!(run(1), run(3));
    }
}
