//! Counter-based random streams.
//!
//! Every Monte Carlo trial gets its own stream addressed by
//! `(seed, domain, point, trial)`. The ChaCha8 key is derived from the seed
//! and domain, the 64-bit stream id is the grid point, and each trial starts
//! at word offset `trial << 32`. Streams never overlap and a trial's draws do
//! not depend on which worker ran it or in which order.

use std::ops::Range;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Separates independent uses of the same master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamDomain {
    Outage,
    ProofCheck,
    Tau,
    EigTail,
    Test,
}

impl StreamDomain {
    fn tag(self) -> u64 {
        match self {
            StreamDomain::Outage => 0x6f75_7461_6765,
            StreamDomain::ProofCheck => 0x0070_726f_6f66,
            StreamDomain::Tau => 0x0074_6175,
            StreamDomain::EigTail => 0x0065_6967_7461_696c,
            StreamDomain::Test => 0x7465_7374,
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_key(seed: u64, domain: StreamDomain) -> [u8; 32] {
    let mut state = seed ^ domain.tag().rotate_left(17);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// A reproducible random stream for one `(seed, domain, point)` triple that
/// can be positioned at any trial.
#[derive(Debug, Clone)]
pub struct RandomStream {
    inner: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, domain: StreamDomain, point: u64) -> Self {
        let mut inner = ChaCha8Rng::from_seed(derive_key(seed, domain));
        inner.set_stream(point);
        Self { inner }
    }

    /// Stream positioned at the start of `trial`.
    pub fn for_trial(seed: u64, domain: StreamDomain, point: u64, trial: u64) -> Self {
        let mut s = Self::new(seed, domain, point);
        s.seek_trial(trial);
        s
    }

    /// Jumps to the first word reserved for `trial`.
    pub fn seek_trial(&mut self, trial: u64) {
        self.inner.set_word_pos((trial as u128) << 32);
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Applies `f` to consecutive trial ranges of at most `chunk` trials on the
/// current rayon pool. Results come back in trial order.
pub fn map_trial_chunks<T, F>(trials: u64, chunk: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    (0..trials.div_ceil(chunk))
        .into_par_iter()
        .map(|c| f(c * chunk..((c + 1) * chunk).min(trials)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn take(s: &mut RandomStream, n: usize) -> Vec<u64> {
        (0..n).map(|_| s.next_u64()).collect()
    }

    #[test]
    fn seeking_is_order_independent() {
        let mut a = RandomStream::new(7, StreamDomain::Test, 3);
        a.seek_trial(10);
        let ten = take(&mut a, 4);
        a.seek_trial(2);
        let two = take(&mut a, 4);
        let mut b = RandomStream::for_trial(7, StreamDomain::Test, 3, 2);
        assert_eq!(take(&mut b, 4), two);
        let mut c = RandomStream::for_trial(7, StreamDomain::Test, 3, 10);
        assert_eq!(take(&mut c, 4), ten);
        assert_ne!(two, ten);
    }

    #[test]
    fn coordinates_separate_streams() {
        let base = take(&mut RandomStream::for_trial(1, StreamDomain::Test, 0, 0), 4);
        for other in [
            RandomStream::for_trial(2, StreamDomain::Test, 0, 0),
            RandomStream::for_trial(1, StreamDomain::Outage, 0, 0),
            RandomStream::for_trial(1, StreamDomain::Test, 1, 0),
            RandomStream::for_trial(1, StreamDomain::Test, 0, 1),
        ] {
            let mut other = other;
            assert_ne!(take(&mut other, 4), base);
        }
    }

    #[test]
    fn chunks_cover_range_in_order() {
        let ranges = map_trial_chunks(10, 4, |r| r);
        assert_eq!(ranges, vec![0..4, 4..8, 8..10]);
        assert!(map_trial_chunks(0, 4, |r| r).is_empty());
    }
}
