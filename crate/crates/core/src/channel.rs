//! Rayleigh channel draws, transmit antenna subsets and post-processing SNRs
//! for the zero-forcing (ZF) and ZF decision-feedback (ZF-DF) receivers.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, LinalgError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("need 1 <= L <= N_T, got L = {l}, N_T = {n_tx}")]
    InvalidSubsetSize { n_tx: usize, l: usize },
    #[error("antenna index {index} out of range for N_T = {n_tx}")]
    IndexOutOfRange { index: usize, n_tx: usize },
    #[error("antenna indices must be strictly increasing")]
    UnorderedSubset,
    #[error("invalid simulation parameter: {0}")]
    InvalidParams(String),
    #[error("subset has {subset} antennas but the receiver has only {n_rx}")]
    TooManyStreams { subset: usize, n_rx: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One `N_R × N_T` channel realization `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    matrix: ComplexMatrix,
}

impl ChannelMatrix {
    pub fn new(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        Self::new(ComplexMatrix::from_real_rows(rows))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn n_rx(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n_tx(&self) -> usize {
        self.matrix.cols()
    }

    /// Full transmit Gram matrix `Q = HᴴH` (`N_T × N_T`).
    pub fn full_gram(&self) -> ComplexMatrix {
        self.matrix.gram()
    }
}

/// Draws `H` with i.i.d. CN(0, 1) entries: real and imaginary parts are
/// independent N(0, 1/2). Entries are filled row by row.
pub fn sample_channel<R: Rng + ?Sized>(rng: &mut R, n_rx: usize, n_tx: usize) -> ChannelMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let matrix = ComplexMatrix::from_fn(n_rx, n_tx, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    });
    ChannelMatrix::new(matrix)
}

/// A set of `L` transmit antennas, stored as 0-based strictly increasing
/// column indices. Displays 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AntennaSubset {
    indices: Vec<usize>,
}

impl AntennaSubset {
    pub fn new(indices: Vec<usize>, n_tx: usize) -> Result<Self, ChannelError> {
        if indices.is_empty() || indices.len() > n_tx {
            return Err(ChannelError::InvalidSubsetSize {
                n_tx,
                l: indices.len(),
            });
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ChannelError::UnorderedSubset);
        }
        if let Some(&index) = indices.iter().find(|&&i| i >= n_tx) {
            return Err(ChannelError::IndexOutOfRange { index, n_tx });
        }
        Ok(Self { indices })
    }

    /// Builds a subset from 1-based antenna numbers.
    pub fn from_one_based(numbers: &[usize], n_tx: usize) -> Result<Self, ChannelError> {
        if numbers.contains(&0) {
            return Err(ChannelError::IndexOutOfRange { index: 0, n_tx });
        }
        Self::new(numbers.iter().map(|i| i - 1).collect(), n_tx)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

impl fmt::Display for AntennaSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// All `C(N_T, L)` antenna subsets in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetCatalog {
    n_tx: usize,
    l: usize,
    subsets: Vec<AntennaSubset>,
}

impl SubsetCatalog {
    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Subset `j` (0-based).
    pub fn get(&self, j: usize) -> &AntennaSubset {
        &self.subsets[j]
    }

    pub fn iter(&self) -> impl Iterator<Item = &AntennaSubset> {
        self.subsets.iter()
    }
}

pub fn enumerate_subsets(n_tx: usize, l: usize) -> Result<SubsetCatalog, ChannelError> {
    if l == 0 || l > n_tx {
        return Err(ChannelError::InvalidSubsetSize { n_tx, l });
    }
    let mut subsets = Vec::new();
    let mut current: Vec<usize> = (0..l).collect();
    loop {
        subsets.push(AntennaSubset {
            indices: current.clone(),
        });
        // advance to the next combination in lexicographic order
        let mut pos = l;
        while pos > 0 && current[pos - 1] == n_tx - l + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        current[pos - 1] += 1;
        for k in pos..l {
            current[k] = current[k - 1] + 1;
        }
    }
    Ok(SubsetCatalog { n_tx, l, subsets })
}

/// Transmit SNR `ρ₀`, stream count `L` and outage threshold `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub rho0: f64,
    pub l: usize,
    pub gamma: f64,
}

impl SimParams {
    pub fn new(rho0: f64, l: usize, gamma: f64) -> Result<Self, ChannelError> {
        if !(rho0 > 0.0 && rho0.is_finite()) {
            return Err(ChannelError::InvalidParams(format!("rho0 must be positive, got {rho0}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(ChannelError::InvalidParams(format!(
                "threshold gamma must be positive, got {gamma}"
            )));
        }
        if l == 0 {
            return Err(ChannelError::InvalidParams("L must be at least 1".into()));
        }
        Ok(Self { rho0, l, gamma })
    }

    /// Per-stream transmit SNR `ρ₀ / L`.
    pub fn stream_snr(&self) -> f64 {
        self.rho0 / self.l as f64
    }
}

/// `Q_j = H_jᴴ H_j` for the columns in `subset`.
pub fn gram(h: &ChannelMatrix, subset: &AntennaSubset) -> Result<ComplexMatrix, ChannelError> {
    Ok(linalg::column_submatrix(h.matrix(), subset.indices())?.gram())
}

/// Post-processing SNRs of the `L` streams of one subset.
#[derive(Debug, Clone, PartialEq)]
pub struct PostSnrSet {
    /// `ρ_k`, indexed by stream (column position inside the subset). For
    /// ZF-DF this is the SNR at the stage where the stream is decoded.
    pub per_stream: Vec<f64>,
    pub rho_max: f64,
    pub rho_min: f64,
    /// Decode order as stream indices; identity for plain ZF.
    pub ordering: Vec<usize>,
    /// SNR that decides outage per stream. Equal to `per_stream` for ZF. For
    /// ZF-DF a decoding failure propagates to every later stage, so this is
    /// the running minimum of stage SNRs along the decode order.
    pub effective: Vec<f64>,
    /// Set when a Gram matrix could not be inverted and streams were assigned
    /// SNR 0.
    pub singular: bool,
}

impl PostSnrSet {
    fn parallel(per_stream: Vec<f64>, singular: bool) -> Self {
        let ordering = (0..per_stream.len()).collect();
        let effective = per_stream.clone();
        Self::assemble(per_stream, ordering, effective, singular)
    }

    fn successive(per_stream: Vec<f64>, ordering: Vec<usize>, singular: bool) -> Self {
        let mut effective = vec![0.0; per_stream.len()];
        let mut running = f64::INFINITY;
        for &k in &ordering {
            running = running.min(per_stream[k]);
            effective[k] = running;
        }
        Self::assemble(per_stream, ordering, effective, singular)
    }

    fn assemble(per_stream: Vec<f64>, ordering: Vec<usize>, effective: Vec<f64>, singular: bool) -> Self {
        let rho_max = per_stream.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let rho_min = per_stream.iter().copied().fold(f64::INFINITY, f64::min);
        Self {
            per_stream,
            rho_max,
            rho_min,
            ordering,
            effective,
            singular,
        }
    }

    pub fn len(&self) -> usize {
        self.per_stream.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_stream.is_empty()
    }
}

/// ZF stream SNRs `(ρ₀/L) / [Q⁻¹]_kk`, or `None` if `Q` is numerically
/// singular.
fn zf_snrs(q: &ComplexMatrix, stream_snr: f64) -> Option<Vec<f64>> {
    match linalg::inverse_diagonal(q) {
        Ok(diag) => Some(diag.into_iter().map(|d| stream_snr / d).collect()),
        Err(_) => None,
    }
}

/// Plain ZF post-processing SNRs from the selected Gram matrix `Q_j`. A
/// numerically singular `Q_j` yields SNR 0 on every stream.
pub fn zf_post_snr(q_j: &ComplexMatrix, params: &SimParams) -> PostSnrSet {
    match zf_snrs(q_j, params.stream_snr()) {
        Some(snrs) => PostSnrSet::parallel(snrs, false),
        None => PostSnrSet::parallel(vec![0.0; q_j.rows()], true),
    }
}

#[derive(Clone, Copy)]
enum DecodeOrder {
    Greedy,
    Natural,
}

fn zfdf(q: &ComplexMatrix, params: &SimParams, order: DecodeOrder) -> PostSnrSet {
    let l = q.rows();
    let stream_snr = params.stream_snr();
    let mut per_stream = vec![0.0; l];
    let mut ordering = Vec::with_capacity(l);
    let mut remaining: Vec<usize> = (0..l).collect();
    let mut singular = false;
    while !remaining.is_empty() {
        let deflated = linalg::principal_submatrix(q, &remaining).expect("indices come from 0..l");
        let Some(snrs) = zf_snrs(&deflated, stream_snr) else {
            // remaining streams keep SNR 0
            singular = true;
            ordering.extend_from_slice(&remaining);
            break;
        };
        let pick = match order {
            DecodeOrder::Natural => 0,
            DecodeOrder::Greedy => {
                let mut best = 0;
                for (pos, &snr) in snrs.iter().enumerate().skip(1) {
                    if snr > snrs[best] {
                        best = pos;
                    }
                }
                best
            }
        };
        let stream = remaining.remove(pick);
        per_stream[stream] = snrs[pick];
        ordering.push(stream);
    }
    PostSnrSet::successive(per_stream, ordering, singular)
}

fn check_streams(h: &ChannelMatrix, subset: &AntennaSubset) -> Result<(), ChannelError> {
    if subset.len() > h.n_rx() {
        return Err(ChannelError::TooManyStreams {
            subset: subset.len(),
            n_rx: h.n_rx(),
        });
    }
    Ok(())
}

/// ZF-DF with greedy ordering: at every stage the undecoded stream with the
/// largest ZF SNR on the deflated channel is decoded next (ties go to the
/// lowest stream index).
pub fn zfdf_ordered_post_snr(
    h: &ChannelMatrix,
    subset: &AntennaSubset,
    params: &SimParams,
) -> Result<PostSnrSet, ChannelError> {
    check_streams(h, subset)?;
    Ok(zfdf(&gram(h, subset)?, params, DecodeOrder::Greedy))
}

/// ZF-DF decoding streams in natural order `1, …, L`.
pub fn zfdf_fixed_post_snr(
    h: &ChannelMatrix,
    subset: &AntennaSubset,
    params: &SimParams,
) -> Result<PostSnrSet, ChannelError> {
    check_streams(h, subset)?;
    Ok(zfdf(&gram(h, subset)?, params, DecodeOrder::Natural))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Receiver {
    #[serde(rename = "zf")]
    Zf,
    #[serde(rename = "zfdf-ordered")]
    ZfDfOrdered,
    #[serde(rename = "zfdf-fixed")]
    ZfDfFixed,
}

impl Receiver {
    pub const ALL: [Receiver; 3] = [Receiver::Zf, Receiver::ZfDfOrdered, Receiver::ZfDfFixed];

    pub fn name(self) -> &'static str {
        match self {
            Receiver::Zf => "zf",
            Receiver::ZfDfOrdered => "zfdf-ordered",
            Receiver::ZfDfFixed => "zfdf-fixed",
        }
    }

    /// Post-processing SNRs of the selected Gram matrix `Q_j`.
    pub fn post_snr_from_gram(self, q_j: &ComplexMatrix, params: &SimParams) -> PostSnrSet {
        match self {
            Receiver::Zf => zf_post_snr(q_j, params),
            Receiver::ZfDfOrdered => zfdf(q_j, params, DecodeOrder::Greedy),
            Receiver::ZfDfFixed => zfdf(q_j, params, DecodeOrder::Natural),
        }
    }

    pub fn post_snr(
        self,
        h: &ChannelMatrix,
        subset: &AntennaSubset,
        params: &SimParams,
    ) -> Result<PostSnrSet, ChannelError> {
        check_streams(h, subset)?;
        Ok(self.post_snr_from_gram(&gram(h, subset)?, params))
    }
}

impl fmt::Display for Receiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Receiver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Receiver::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown receiver '{s}' (expected zf, zfdf-ordered or zfdf-fixed)"))
    }
}
