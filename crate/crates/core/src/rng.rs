//! Reproducible random streams.
//!
//! A stream is identified by a 64-bit master seed and a 64-bit stream index.
//! The seed keys a ChaCha8 generator (expanded with `seed_from_u64`) and the
//! index selects the ChaCha stream word, so distinct indices under one seed
//! never overlap. Experiments give every sample its own index, which makes the
//! aggregated output independent of how samples are spread over threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

/// Number of low bits of the stream index reserved for the sample number in
/// [`RngStream::for_sample`]; the tag occupies the bits above.
pub const SAMPLE_BITS: u32 = 40;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    index: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(index);
        Self { seed, index, inner }
    }

    /// Stream for sample `sample` of the experiment labelled `tag`.
    pub fn for_sample(seed: u64, tag: u32, sample: u64) -> Self {
        debug_assert!(sample < (1u64 << SAMPLE_BITS));
        Self::new(seed, ((tag as u64) << SAMPLE_BITS) | sample)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on `{0, .., k-1}`; `k` must be positive.
    #[inline]
    pub fn below(&mut self, k: usize) -> usize {
        self.inner.random_range(0..k)
    }

    /// Standard exponential.
    #[inline]
    pub fn exp1(&mut self) -> f64 {
        self.inner.sample(Exp1)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed with configuration words into a child seed, so that
/// different experiments and parameter sets draw from unrelated streams.
pub fn derive_seed(seed: u64, words: &[u64]) -> u64 {
    words.iter().fold(splitmix(seed), |h, &w| splitmix(h ^ splitmix(w)))
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}
