//! The single seeded generator behind every randomized check.
//!
//! SplitMix64 (64-bit state, Steele/Lea/Flood constants) via `rand_xoshiro`,
//! so a seed reproduces the same draws on every platform.

use rand::{RngExt, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::model::C64;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone)]
pub struct CheckRng {
    inner: SplitMix64,
}

impl CheckRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: SplitMix64::seed_from_u64(seed),
        }
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.inner.random_range(lo..hi)
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        self.inner.random_range(lo..=hi)
    }

    /// Real and imaginary parts uniform in `[-r, r)`.
    pub fn complex(&mut self, r: f64) -> C64 {
        C64::new(self.uniform(-r, r), self.uniform(-r, r))
    }

    /// Point of the closed disc `|z| <= r`, uniform in radius and angle.
    pub fn in_disc(&mut self, r: f64) -> C64 {
        let rho = self.uniform(0.0, r);
        let phi = self.uniform(0.0, std::f64::consts::TAU);
        C64::from_polar(rho, phi)
    }

    pub fn complex_vec(&mut self, n: usize, r: f64) -> Vec<C64> {
        (0..n).map(|_| self.complex(r)).collect()
    }
}
