//! Reproducible random streams.
//!
//! Every replica of every experiment draws from its own `(master_seed, stream)`
//! pair, so results do not depend on how replicas are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// A `(master_seed, stream)` pair naming one independent random sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSource {
    pub master_seed: u64,
    pub stream: u64,
}

impl RandomSource {
    pub fn new(master_seed: u64, stream: u64) -> Self {
        Self { master_seed, stream }
    }

    /// The generator for this stream. Identical pairs give identical sequences.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream);
        rng
    }

    /// A source with a new master seed derived from this one and `tag`, used
    /// to give each sub-task of an experiment its own family of streams.
    pub fn derive(&self, tag: u64) -> RandomSource {
        RandomSource {
            master_seed: mix64(self.master_seed ^ mix64(self.stream.wrapping_add(0x9e37_79b9)) ^ mix64(tag)),
            stream: 0,
        }
    }

    /// Stream `index` under this source's master seed.
    pub fn replica(&self, index: u64) -> RandomSource {
        RandomSource { master_seed: self.master_seed, stream: index }
    }
}

/// Source of standard Gaussian variates for the SDE steppers.
///
/// Implemented for every [`Rng`] and for [`ZeroNoise`], which turns the
/// steppers into deterministic ODE solvers.
pub trait GaussianNoise {
    fn fill_standard_normal(&mut self, out: &mut [f64]);
}

impl<R: Rng> GaussianNoise for R {
    fn fill_standard_normal(&mut self, out: &mut [f64]) {
        for z in out.iter_mut() {
            *z = self.sample(StandardNormal);
        }
    }
}

/// Noise source that always yields zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroNoise;

impl GaussianNoise for ZeroNoise {
    fn fill_standard_normal(&mut self, out: &mut [f64]) {
        out.fill(0.0);
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based standard normal: a pure function of `seed` and `keys`.
///
/// Used where several simulations must see the same Gaussian variate at the
/// same logical position (shared-noise coupling) without sharing a generator.
pub fn counter_normal(seed: u64, keys: &[u64]) -> f64 {
    let mut h = mix64(seed);
    for &k in keys {
        h = mix64(h ^ k);
    }
    let a = mix64(h ^ 0x5851_f42d_4c95_7f2d);
    let b = mix64(a ^ 0x1405_7b7e_f767_814f);
    // 53-bit uniforms in (0, 1].
    let u1 = ((a >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64);
    let u2 = (b >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
