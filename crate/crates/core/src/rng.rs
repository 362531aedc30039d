//! Seeded random streams.
//!
//! Every stream is a ChaCha8 keystream: a 64-bit counter-based generator
//! keyed by `seed` (expanded to 256 bits) with `stream` as the ChaCha stream
//! id. Replication `r` of a Monte Carlo run reads stream `(seed, r)`, so the
//! numbers it sees do not depend on how replications are scheduled.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::Real;

/// One independent random stream.
#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval (0, 1), 53 random bits.
    pub fn open01_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (0, 1) in the target type; redraws the rare values that
    /// round onto an endpoint.
    pub fn open01<F: Real>(&mut self) -> F {
        loop {
            let u = F::of(self.open01_f64());
            if u > F::zero() && u < F::one() {
                return u;
            }
        }
    }
}

/// Mixes two words into a fresh seed (SplitMix64 finalizer). Used to give
/// each cell of a table its own seed.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
