//! Eb/N0 gain readout between two BER curves.

use crate::error::{Error, Result};

/// Eb/N0 (dB) at which a curve crosses `target_ber`, by log-linear
/// interpolation between the first adjacent pair of positive-BER points that
/// brackets the target. Points with zero measured BER cannot pin a crossing
/// in log domain and are skipped.
pub fn ebn0_at_ber(curve: &[(f64, f64)], target_ber: f64) -> Result<f64> {
    if !target_ber.is_finite() || target_ber <= 0.0 {
        return Err(Error::Domain("target BER must be positive".into()));
    }
    let pts: Vec<(f64, f64)> = curve.iter().copied().filter(|&(_, ber)| ber > 0.0).collect();
    for w in pts.windows(2) {
        let (x0, b0) = w[0];
        let (x1, b1) = w[1];
        if b0 >= target_ber && target_ber >= b1 && b0 > b1 {
            let t = (target_ber.log10() - b0.log10()) / (b1.log10() - b0.log10());
            return Ok(x0 + t * (x1 - x0));
        }
        // Exact hit on a grid point.
        if (b0 - target_ber).abs() < f64::EPSILON {
            return Ok(x0);
        }
    }
    if let Some(&(x, b)) = pts.last() {
        if (b - target_ber).abs() < f64::EPSILON {
            return Ok(x);
        }
    }
    Err(Error::NotBracketed(target_ber))
}

/// Eb/N0 advantage of curve `a` over curve `b` at the target BER:
/// positive when `a` reaches the target at a lower Eb/N0.
pub fn gain_at_ber(a: &[(f64, f64)], b: &[(f64, f64)], target_ber: f64) -> Result<f64> {
    let xa = ebn0_at_ber(a, target_ber)?;
    let xb = ebn0_at_ber(b, target_ber)?;
    Ok(xb - xa)
}
