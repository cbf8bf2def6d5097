//! Counter-based randomness.
//!
//! Every random decision in the workspace is a pure function of a 64-bit seed
//! and a handful of 64-bit words identifying *what* is being decided (an edge
//! key, a replicate index, a resample counter). There is no RNG state to
//! advance, so evaluation order — and in particular the worker count of a
//! parallel sweep — cannot change any outcome.

/// SplitMix64 finalizer. Passes the usual avalanche tests; used here purely as
/// a stateless mixing primitive.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Absorb one word into a running hash state.
#[inline]
pub fn absorb(state: u64, word: u64) -> u64 {
    mix64(state ^ word.wrapping_mul(GOLDEN))
}

/// Hash an arbitrary sequence of words into one value.
pub fn hash_words(words: &[u64]) -> u64 {
    let mut h = 0x243f_6a88_85a3_08d3; // pi, nothing up the sleeve
    for &w in words {
        h = absorb(h, w);
    }
    // close over the length so prefixes don't collide
    absorb(h, words.len() as u64)
}

/// Domain-separation salts. Keeping them in one place makes it easy to see
/// that no two uses of the mixer can collide.
pub mod salt {
    /// Per-edge open/closed state of the base configuration.
    pub const EDGE_STATE: u64 = 0x45;
    /// Independent resample copy of a single edge.
    pub const RESAMPLE: u64 = 0x52;
    /// Outer conditioning draw of the variance estimator.
    pub const SIGMA_OUTER: u64 = 0x4f;
    /// Inner resampling draw of the variance estimator.
    pub const SIGMA_INNER: u64 = 0x49;
    /// Generic test/audit draws.
    pub const AUDIT: u64 = 0x41;
}

/// Threshold for "u64 hash < threshold" Bernoulli sampling.
///
/// `p` is scaled by 2^64 and truncated; the effective success probability
/// differs from `p` by less than 2^-64, far below any tolerance used here.
/// Exact for p = 0 and p = 1.
#[inline]
pub fn bernoulli_threshold(p: f64) -> u64 {
    assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
    if p >= 1.0 {
        return u64::MAX;
    }
    // Multiplying a finite f64 by 2^64 only shifts the exponent, so the
    // product is exact until truncation.
    (p * 18_446_744_073_709_551_616.0) as u64
}

/// One Bernoulli draw: pure in (seed, key, salt).
#[inline]
pub fn bernoulli(seed: u64, key: u64, salt: u64, threshold: u64) -> bool {
    let mut h = absorb(seed, salt);
    h = absorb(h, key);
    h < threshold
}

/// Seed for a derived stream (replicates, estimator loops).
#[inline]
pub fn derive_seed(master: u64, salt: u64, index: u64) -> u64 {
    let mut h = absorb(master, salt);
    h = absorb(h, index);
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixer_is_pure_and_spreads() {
        assert_eq!(mix64(42), mix64(42));
        assert_ne!(mix64(42), mix64(43));
        // low-bit flips must affect high bits
        let d = mix64(1) ^ mix64(2);
        assert!(d.count_ones() > 10);
    }

    #[test]
    fn hash_words_length_separated() {
        assert_ne!(hash_words(&[0]), hash_words(&[0, 0]));
        assert_ne!(hash_words(&[]), hash_words(&[0]));
    }

    #[test]
    fn bernoulli_threshold_endpoints() {
        assert_eq!(bernoulli_threshold(0.0), 0);
        assert_eq!(bernoulli_threshold(1.0), u64::MAX);
        assert_eq!(bernoulli_threshold(0.5), 1u64 << 63);
    }

    #[test]
    fn bernoulli_rate_close_to_p() {
        let thr = bernoulli_threshold(0.3);
        let n = 200_000u64;
        let hits = (0..n)
            .filter(|&i| bernoulli(0xdead_beef, i, salt::EDGE_STATE, thr))
            .count() as f64;
        let rate = hits / n as f64;
        // 5 sigma band for p = 0.3
        assert!((rate - 0.3).abs() < 5.0 * (0.3f64 * 0.7 / n as f64).sqrt());
    }
}
