use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Deterministic random stream: ChaCha8 keyed by a 64-bit value, with the
/// ChaCha stream counter selecting a sub-stream.
///
/// `derive(k)` keys the child from this stream's `(key, stream_id)` through
/// SplitMix64 and places it on ChaCha stream `k`, so children of one parent
/// share a key and differ only in stream number. Deriving never consumes
/// from the parent; `s.derive(0)` called twice yields the same sequence.
///
/// Gaussian draws use `rand_distr::StandardNormal` (ziggurat).
#[derive(Debug, Clone)]
pub struct PrngStream {
    key: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl PrngStream {
    /// Master stream for `seed`. Any seed, including zero, is valid.
    pub fn new(seed: u64) -> Self {
        Self::keyed(seed, 0)
    }

    fn keyed(key: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        rng.set_stream(stream_id);
        PrngStream {
            key,
            stream_id,
            rng,
        }
    }

    /// Independent sub-stream `k` of this stream.
    pub fn derive(&self, k: u64) -> Self {
        let child_key = splitmix64(self.key ^ splitmix64(self.stream_id));
        Self::keyed(child_key, k)
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform integer in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// `count` distinct indices from `0..n`, uniformly, in draw order.
    pub fn sample_indices(&mut self, n: usize, count: usize) -> Vec<usize> {
        rand::seq::index::sample(&mut self.rng, n, count).into_vec()
    }
}

impl RngCore for PrngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
