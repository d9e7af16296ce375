//! Seeded random sources with a stable cross-run contract.
//!
//! Every random quantity in the toolkit is drawn from a [`SimRng`] that is
//! seeded through [`derive_seed`], so a simulation is a pure function of its
//! master seed and the (point, block) indices. Gaussian variates use an
//! explicit Box-Muller transform rather than a distribution crate so the
//! byte-level output of a run does not depend on sampler implementation
//! details.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// SplitMix64 step; mixes `state` and returns the next output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and two stream indices.
///
/// Used as `derive_seed(master, point_index, block_index)` by the Monte Carlo
/// engine, which makes per-block randomness independent of worker count and
/// batch scheduling.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut state = master;
    let a = splitmix64(&mut state);
    let mut state = a ^ stream.wrapping_mul(0xd1b5_4a32_d192_ed03);
    let b = splitmix64(&mut state);
    let mut state = b ^ index.wrapping_mul(0xaef1_7502_1fd5_7acb);
    splitmix64(&mut state)
}

/// Deterministic random source for one unit of simulation work.
pub struct SimRng(ChaCha8Rng);

impl SimRng {
    pub fn from_seed(seed: u64) -> Self {
        SimRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in the half-open interval (0, 1]; never returns 0, so it is
    /// safe to feed into a logarithm.
    pub fn uniform_open0(&mut self) -> f64 {
        (((self.0.next_u64() >> 11) + 1) as f64) / (1u64 << 53) as f64
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.0.next_u64() >> 11) as f64) / (1u64 << 53) as f64
    }

    /// A pair of independent standard normal variates (Box-Muller).
    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        let u1 = self.uniform_open0();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * theta.cos(), r * theta.sin())
    }

    /// Circularly symmetric complex Gaussian with total variance `var`
    /// (each real component has variance `var / 2`).
    pub fn complex_gaussian(&mut self, var: f64) -> Complex64 {
        let (g1, g2) = self.gaussian_pair();
        let s = (var / 2.0).sqrt();
        Complex64::new(g1 * s, g2 * s)
    }

    /// Uniform index in `0..m`. Exact for powers of two.
    pub fn index(&mut self, m: usize) -> usize {
        debug_assert!(m > 0);
        if m.is_power_of_two() {
            (self.next_u64() as usize) & (m - 1)
        } else {
            (self.next_u64() % m as u64) as usize
        }
    }

    pub fn bit(&mut self) -> u8 {
        (self.next_u64() & 1) as u8
    }

    pub fn bits(&mut self, n: usize) -> Vec<u8> {
        (0..n).map(|_| self.bit()).collect()
    }
}
