//! SISO channel: flat fading (or none), AWGN, Eb/N0 calibration, matched
//! filter.
//!
//! One channel coefficient is drawn per transmitted block (block fading) and
//! the receiver is handed the exact coefficient, so the matched filter is
//! `conj(h) * y`. Noise is circularly symmetric complex Gaussian with total
//! per-sample variance `sigma2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::codec::{bit_rate, KronConfig};
use crate::error::{Error, Result};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelModel {
    Awgn,
    #[serde(rename = "rayleigh")]
    RayleighFlat,
}

impl std::fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChannelModel::Awgn => write!(f, "awgn"),
            ChannelModel::RayleighFlat => write!(f, "rayleigh"),
        }
    }
}

/// One block's channel state: coefficient and noise variance.
#[derive(Debug, Clone, Copy)]
pub struct ChannelRealization {
    pub h: Complex64,
    pub sigma2: f64,
    pub model: ChannelModel,
}

/// Noise variance for a target Eb/N0 given a config's nominal bit rate.
///
/// With unit symbol energy and `rate` bits per symbol period,
/// `Eb = 1 / rate` and `N0 = sigma2`, so
/// `sigma2 = 1 / (rate * 10^(ebn0_db / 10))`.
pub fn calibrate_noise_rate(ebn0_db: f64, rate: f64) -> Result<f64> {
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "bit rate must be positive for Eb/N0 calibration, got {rate}"
        )));
    }
    Ok(1.0 / (rate * 10f64.powf(ebn0_db / 10.0)))
}

/// [`calibrate_noise_rate`] with the rate taken from the config.
pub fn calibrate_noise(ebn0_db: f64, cfg: &KronConfig) -> Result<f64> {
    calibrate_noise_rate(ebn0_db, bit_rate(cfg))
}

/// Draws the block coefficient: `CN(0, 1)` for Rayleigh, exactly 1 for AWGN.
pub fn draw_channel(model: ChannelModel, rng: &mut SimRng) -> Complex64 {
    match model {
        ChannelModel::Awgn => Complex64::new(1.0, 0.0),
        ChannelModel::RayleighFlat => rng.complex_gaussian(1.0),
    }
}

/// `y = h x + n` with i.i.d. `CN(0, sigma2)` noise samples.
pub fn transmit(x: &[Complex64], real: &ChannelRealization, rng: &mut SimRng) -> Vec<Complex64> {
    if real.sigma2 == 0.0 {
        return x.iter().map(|&v| real.h * v).collect();
    }
    x.iter()
        .map(|&v| real.h * v + rng.complex_gaussian(real.sigma2))
        .collect()
}

/// Matched filter with genie channel knowledge: `conj(h) * y`.
pub fn matched_filter(y: &[Complex64], h: Complex64) -> Vec<Complex64> {
    let hc = h.conj();
    y.iter().map(|&v| hc * v).collect()
}
