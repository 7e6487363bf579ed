//! Transmit antenna selection policies `j = φ(H)`.
//!
//! Subset indices are 0-based positions in a [`SubsetCatalog`]. Every policy
//! breaks ties toward the lowest index.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{self, ChannelMatrix, SimParams, SubsetCatalog};
use crate::linalg::{self, ComplexMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("fixed subset index {index} out of range for {n_subsets} subsets")]
    IndexOutOfRange { index: usize, n_subsets: usize },
    #[error("catalog is for N_T = {catalog_tx}, L = {catalog_l} but the channel has N_T = {n_tx} and L = {l}")]
    CatalogMismatch {
        catalog_tx: usize,
        catalog_l: usize,
        n_tx: usize,
        l: usize,
    },
    #[error("unknown policy '{0}' (expected max-min-snr, max-capacity, random or fixed-first)")]
    UnknownPolicy(String),
}

/// Selection policy together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "kebab-case")]
pub enum PolicyId {
    /// Maximize the smallest ZF post-processing SNR.
    MaxMinSnr,
    /// Maximize `log det(I + (ρ₀/L) Q_j)`.
    MaxCapacity,
    /// Uniformly random subset.
    Random,
    /// Always the same subset (0-based `index`).
    FixedFirst { index: usize },
}

impl PolicyId {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyId::MaxMinSnr => "max-min-snr",
            PolicyId::MaxCapacity => "max-capacity",
            PolicyId::Random => "random",
            PolicyId::FixedFirst { .. } => "fixed-first",
        }
    }

    /// Checks policy parameters against a catalog size.
    pub fn validate(&self, n_subsets: usize) -> Result<(), PolicyError> {
        match *self {
            PolicyId::FixedFirst { index } if index >= n_subsets => {
                Err(PolicyError::IndexOutOfRange { index, n_subsets })
            }
            _ => Ok(()),
        }
    }

    /// Applies the policy. `rng` is only consumed by [`PolicyId::Random`].
    pub fn select<R: Rng + ?Sized>(
        &self,
        h: &ChannelMatrix,
        catalog: &SubsetCatalog,
        params: &SimParams,
        rng: &mut R,
    ) -> Result<usize, PolicyError> {
        match *self {
            PolicyId::MaxMinSnr => select_max_min_snr(h, catalog, params),
            PolicyId::MaxCapacity => select_max_capacity(h, catalog, params),
            PolicyId::Random => Ok(select_random(rng, catalog)),
            PolicyId::FixedFirst { index } => select_fixed(catalog, index),
        }
    }
}

impl fmt::Display for PolicyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyId::FixedFirst { index } => write!(f, "fixed-first({})", index + 1),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for PolicyId {
    type Err = PolicyError;

    /// Parses a policy tag; `fixed-first` selects subset 1.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max-min-snr" => Ok(PolicyId::MaxMinSnr),
            "max-capacity" => Ok(PolicyId::MaxCapacity),
            "random" => Ok(PolicyId::Random),
            "fixed-first" => Ok(PolicyId::FixedFirst { index: 0 }),
            other => Err(PolicyError::UnknownPolicy(other.to_string())),
        }
    }
}

fn check_catalog(h: &ChannelMatrix, catalog: &SubsetCatalog, params: &SimParams) -> Result<(), PolicyError> {
    if catalog.n_tx() != h.n_tx() || catalog.l() != params.l {
        return Err(PolicyError::CatalogMismatch {
            catalog_tx: catalog.n_tx(),
            catalog_l: catalog.l(),
            n_tx: h.n_tx(),
            l: params.l,
        });
    }
    Ok(())
}

fn argmax_lowest(scores: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (j, score) in scores.enumerate() {
        if score > best_score {
            best = j;
            best_score = score;
        }
    }
    best
}

/// `min_k 1/[Q_j⁻¹]_kk`, or 0 when `Q_j` is numerically singular. This is
/// `ρ̲` up to the common factor `ρ₀/L`.
pub fn min_snr_score(q_j: &ComplexMatrix) -> f64 {
    match linalg::inverse_diagonal(q_j) {
        Ok(diag) => diag.into_iter().map(|d| 1.0 / d).fold(f64::INFINITY, f64::min),
        Err(_) => 0.0,
    }
}

pub fn select_max_min_snr(
    h: &ChannelMatrix,
    catalog: &SubsetCatalog,
    params: &SimParams,
) -> Result<usize, PolicyError> {
    check_catalog(h, catalog, params)?;
    Ok(argmax_lowest(catalog.iter().map(|s| {
        channel::gram(h, s).map_or(0.0, |q| min_snr_score(&q))
    })))
}

/// `log det(I + (ρ₀/L) Q_j)`.
pub fn capacity_score(q_j: &ComplexMatrix, params: &SimParams) -> f64 {
    let m = ComplexMatrix::identity(q_j.rows()).add(&q_j.scale(params.stream_snr()));
    linalg::log_det_hermitian_pd(&m).unwrap_or(f64::NEG_INFINITY)
}

pub fn select_max_capacity(
    h: &ChannelMatrix,
    catalog: &SubsetCatalog,
    params: &SimParams,
) -> Result<usize, PolicyError> {
    check_catalog(h, catalog, params)?;
    Ok(argmax_lowest(catalog.iter().map(|s| {
        channel::gram(h, s).map_or(f64::NEG_INFINITY, |q| capacity_score(&q, params))
    })))
}

pub fn select_random<R: Rng + ?Sized>(rng: &mut R, catalog: &SubsetCatalog) -> usize {
    if catalog.len() == 1 {
        return 0;
    }
    rng.random_range(0..catalog.len())
}

pub fn select_fixed(catalog: &SubsetCatalog, index: usize) -> Result<usize, PolicyError> {
    if index >= catalog.len() {
        return Err(PolicyError::IndexOutOfRange {
            index,
            n_subsets: catalog.len(),
        });
    }
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{enumerate_subsets, sample_channel};
    use crate::rng::{RandomStream, StreamDomain};

    fn params(rho0: f64, l: usize) -> SimParams {
        SimParams::new(rho0, l, 1.0).unwrap()
    }

    /// Independent oracle: explicit pseudo-inverse rows give ZF noise
    /// enhancement `‖row_k(H_j†)‖²`, which equals `[Q_j⁻¹]_kk`.
    fn brute_force_max_min(h: &ChannelMatrix, catalog: &SubsetCatalog) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for (j, s) in catalog.iter().enumerate() {
            let hj = linalg::column_submatrix(h.matrix(), s.indices()).unwrap();
            let score = match linalg::pseudo_inverse(&hj) {
                Ok(pinv) => (0..pinv.rows())
                    .map(|k| 1.0 / (0..pinv.cols()).map(|c| pinv[(k, c)].norm_sqr()).sum::<f64>())
                    .fold(f64::INFINITY, f64::min),
                Err(_) => 0.0,
            };
            if score > best.1 {
                best = (j, score);
            }
        }
        best.0
    }

    #[test]
    fn max_min_zero_columns() {
        let h = ChannelMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let cat = enumerate_subsets(3, 2).unwrap();
        assert_eq!(select_max_min_snr(&h, &cat, &params(10.0, 2)).unwrap(), 0);
    }

    #[test]
    fn single_subset_catalog() {
        let mut rng = RandomStream::new(1, StreamDomain::Test, 0);
        let h = sample_channel(&mut rng, 3, 2);
        let cat = enumerate_subsets(2, 2).unwrap();
        let p = params(10.0, 2);
        assert_eq!(select_max_min_snr(&h, &cat, &p).unwrap(), 0);
        assert_eq!(select_max_capacity(&h, &cat, &p).unwrap(), 0);
        assert_eq!(select_random(&mut rng, &cat), 0);
    }

    #[test]
    fn max_min_matches_brute_force() {
        let mut rng = RandomStream::new(2, StreamDomain::Test, 0);
        let cat = enumerate_subsets(3, 2).unwrap();
        for _ in 0..2000 {
            let h = sample_channel(&mut rng, 2, 3);
            assert_eq!(
                select_max_min_snr(&h, &cat, &params(10.0, 2)).unwrap(),
                brute_force_max_min(&h, &cat)
            );
        }
        let cat = enumerate_subsets(4, 3).unwrap();
        for _ in 0..500 {
            let h = sample_channel(&mut rng, 4, 4);
            assert_eq!(
                select_max_min_snr(&h, &cat, &params(10.0, 3)).unwrap(),
                brute_force_max_min(&h, &cat)
            );
        }
    }

    #[test]
    fn max_min_invariant_to_snr_and_scaling() {
        let mut rng = RandomStream::new(3, StreamDomain::Test, 0);
        let cat = enumerate_subsets(4, 2).unwrap();
        for _ in 0..500 {
            let h = sample_channel(&mut rng, 3, 4);
            let base = select_max_min_snr(&h, &cat, &params(1.0, 2)).unwrap();
            assert_eq!(select_max_min_snr(&h, &cat, &params(1e4, 2)).unwrap(), base);
            let scaled = ChannelMatrix::new(h.matrix().scale(3.7));
            assert_eq!(select_max_min_snr(&scaled, &cat, &params(1.0, 2)).unwrap(), base);
        }
    }

    #[test]
    fn max_capacity_picks_dominant_orthogonal_pair() {
        // columns 1 and 3 are strong and orthogonal, column 2 is weak
        let h = ChannelMatrix::from_real_rows(&[&[3.0, 0.1, 0.0], &[0.0, 0.1, 3.0]]);
        let cat = enumerate_subsets(3, 2).unwrap();
        let p = params(10.0, 2);
        // brute force: det(I + (ρ₀/L) Q_j) for each pair
        let dets: Vec<f64> = cat
            .iter()
            .map(|s| {
                let q = channel::gram(&h, s).unwrap();
                let a = 1.0 + 5.0 * q[(0, 0)].re;
                let d = 1.0 + 5.0 * q[(1, 1)].re;
                a * d - 25.0 * q[(0, 1)].norm_sqr()
            })
            .collect();
        let oracle = (0..dets.len()).fold(0, |b, j| if dets[j] > dets[b] { j } else { b });
        assert_eq!(cat.get(oracle).one_based(), vec![1, 3]);
        assert_eq!(select_max_capacity(&h, &cat, &p).unwrap(), oracle);
    }

    #[test]
    fn random_is_uniform_and_reproducible() {
        let cat = enumerate_subsets(4, 2).unwrap();
        let mut rng = RandomStream::new(4, StreamDomain::Test, 0);
        let n = 1_000_000;
        let mut counts = [0usize; 6];
        for _ in 0..n {
            counts[select_random(&mut rng, &cat)] += 1;
        }
        let p = 1.0 / 6.0;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        for c in counts {
            assert!((c as f64 / n as f64 - p).abs() <= 3.0 * se);
        }
        let draw = |seed| {
            let mut r = RandomStream::new(seed, StreamDomain::Test, 0);
            (0..32).map(|_| select_random(&mut r, &cat)).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
    }

    #[test]
    fn fixed_policy() {
        let cat = enumerate_subsets(4, 2).unwrap();
        assert_eq!(select_fixed(&cat, 0).unwrap(), 0);
        assert_eq!(select_fixed(&cat, 5).unwrap(), 5);
        assert!(matches!(
            select_fixed(&cat, 6),
            Err(PolicyError::IndexOutOfRange { index: 6, n_subsets: 6 })
        ));
    }

    #[test]
    fn every_policy_is_total() {
        let cat = enumerate_subsets(4, 3).unwrap();
        let mut rng = RandomStream::new(5, StreamDomain::Test, 0);
        let p = params(10.0, 3);
        let policies = [
            PolicyId::MaxMinSnr,
            PolicyId::MaxCapacity,
            PolicyId::Random,
            PolicyId::FixedFirst { index: 3 },
        ];
        for _ in 0..200 {
            let h = sample_channel(&mut rng, 3, 4);
            for policy in policies {
                let j = policy.select(&h, &cat, &p, &mut rng).unwrap();
                assert!(j < cat.len());
            }
        }
        // a rank-deficient channel still gets an answer
        let zero = ChannelMatrix::new(ComplexMatrix::zeros(3, 4));
        for policy in policies {
            assert!(policy.select(&zero, &cat, &p, &mut rng).unwrap() < cat.len());
        }
    }

    #[test]
    fn catalog_mismatch() {
        let h = ChannelMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let cat = enumerate_subsets(3, 2).unwrap();
        assert!(matches!(
            select_max_min_snr(&h, &cat, &params(1.0, 2)),
            Err(PolicyError::CatalogMismatch { .. })
        ));
    }

    #[test]
    fn parse_names() {
        assert_eq!("max-min-snr".parse::<PolicyId>().unwrap(), PolicyId::MaxMinSnr);
        assert_eq!(
            "fixed-first".parse::<PolicyId>().unwrap(),
            PolicyId::FixedFirst { index: 0 }
        );
        assert!("best".parse::<PolicyId>().is_err());
    }
}
