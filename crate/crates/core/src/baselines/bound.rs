//! Finite-blocklength normal approximation for the complex AWGN channel.
//!
//! Block error probability at blocklength `n`, rate `R` bits per channel use
//! and SNR `snr`:
//!
//! ```text
//! eps = Q( (n (C - R) + 0.5 log2 n) / sqrt(n V) )
//! C   = log2(1 + snr)
//! V   = (snr (snr + 2) / (snr + 1)^2) * (log2 e)^2
//! ```

use crate::constellation::q_function;
use crate::error::{Error, Result};

/// Channel capacity in bits per complex channel use.
pub fn awgn_capacity(snr: f64) -> f64 {
    (1.0 + snr).log2()
}

/// Channel dispersion in bits^2 per complex channel use.
pub fn awgn_dispersion(snr: f64) -> f64 {
    let l2e = std::f64::consts::LOG2_E;
    (snr * (snr + 2.0)) / ((snr + 1.0) * (snr + 1.0)) * l2e * l2e
}

/// Normal-approximation block error probability, clamped to [0, 1].
pub fn normal_approximation(n: u64, rate: f64, snr: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("blocklength must be >= 1".into()));
    }
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::Domain(format!("rate must be positive, got {rate}")));
    }
    if !snr.is_finite() || snr <= 0.0 {
        return Err(Error::Domain(format!("snr must be positive, got {snr}")));
    }
    let nf = n as f64;
    let c = awgn_capacity(snr);
    let v = awgn_dispersion(snr);
    let arg = (nf * (c - rate) + 0.5 * nf.log2()) / (nf * v).sqrt();
    Ok(q_function(arg).clamp(0.0, 1.0))
}
