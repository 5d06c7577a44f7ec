//! Reproducible random streams.
//!
//! Every Monte Carlo path owns one [`RngStream`], identified by
//! `(master_seed, stream_index)`. Streams are independent ChaCha8 counter
//! streams: path `i` consumes exactly the same random numbers no matter
//! which thread runs it, in what order, or how many worker threads exist.
//! That property is what makes estimator output byte-identical across
//! `--workers` settings and is relied on by every test in this workspace.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identifier of one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    /// Seed shared by every path of one experiment.
    pub master_seed: u64,
    /// Index of this path's private stream under the master seed.
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// Instantiates the generator for this stream. Calling twice yields two
    /// generators that produce identical sequences.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Uniform draw in the open interval (0, 1).
///
/// Maps the top 53 bits of a `u64` to `(k + 0.5) * 2^-53`, so the result is
/// never 0 and never 1: logarithms and inverse CDFs downstream need no
/// clamping.
#[inline]
pub fn uniform_open01(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal draw via the inverse CDF.
///
/// Inverse-CDF sampling keeps the uniform-to-normal map monotone, so two
/// strategies driven by the same stream see pathwise-coupled Brownian
/// increments (common random numbers).
#[inline]
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    crate::special::inverse_normal_cdf(uniform_open01(rng))
        .expect("uniform_open01 output is always inside (0, 1)")
}

/// Derives a decorrelated master seed for a sub-experiment.
///
/// splitmix64 finalizer over `master` and `tag`; distinct tags give
/// statistically independent seeds, and the derivation is pure so replays
/// are exact.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    let mut z = master ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
