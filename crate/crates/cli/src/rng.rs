//! Reproducible synthetic data.
//!
//! The generator is xoshiro256++ seeded through SplitMix64 (`seed_from_u64`). Uniform doubles use
//! the top 53 bits of each output, scaled by 2⁻⁵³. Normal deviates use the Box–Muller transform on
//! pairs of uniforms, `u1` mapped to `(0, 1]` so the logarithm is always finite; both outputs of
//! each pair are used. The integer stream is identical everywhere; the normal deviates also depend
//! on the platform's `ln`, `sin` and `cos`.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub const DEFAULT_SEED: u64 = 0x5eed_2015;

pub struct DataGenerator {
    rng: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl DataGenerator {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.random::<u64>() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    pub fn normal(&mut self, mean: f64, stddev: f64) -> f64 {
        mean + stddev * self.standard_normal()
    }

    pub fn uniform_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.uniform()).collect()
    }

    pub fn normal_vec(&mut self, n: usize, mean: f64, stddev: f64) -> Vec<f64> {
        (0..n).map(|_| self.normal(mean, stddev)).collect()
    }
}
