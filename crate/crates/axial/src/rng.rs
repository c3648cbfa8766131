//! Reproducible pseudo-random streams.
//!
//! Each Monte Carlo replicate gets its own stream, derived by hashing
//! `(master_seed, stream_index)` into a ChaCha seed. Identical inputs give
//! identical sequences regardless of thread schedule, and distinct indices
//! give statistically independent streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A deterministic random stream identified by `(master_seed, stream_index)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        // Mix both identifiers through splitmix64 to fill the 256-bit seed.
        let mut state = master_seed ^ 0x6a09_e667_f3bc_c909;
        let _ = splitmix64(&mut state);
        state ^= stream_index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        RngStream {
            master_seed,
            stream_index,
            rng: ChaCha8Rng::from_seed(seed),
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Uniform draw on `[0, 1)`.
    pub fn next_uniform(&mut self) -> f64 {
        // 53 random bits scaled to [0,1).
        let bits = self.rng.random::<u64>() >> 11;
        bits as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw (polar method).
    pub fn next_normal(&mut self) -> f64 {
        loop {
            let u = 2.0 * self.next_uniform() - 1.0;
            let v = 2.0 * self.next_uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                return u * (-2.0 * s.ln() / s).sqrt();
            }
        }
    }

    /// Vector of independent standard normals.
    pub fn next_normals(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.next_normal()).collect()
    }
}
