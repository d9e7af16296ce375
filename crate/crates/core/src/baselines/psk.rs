//! Gray-PSK symbol demapping for the convolutional baseline: hard decisions
//! and exact (full-sum) per-bit LLRs with genie channel knowledge.

use num_complex::Complex64;

use crate::constellation::ConstellationSet;

/// Nearest-point decisions, emitted as label bits (MSB first).
pub fn psk_hard_demod(y: &[Complex64], h: Complex64, set: &ConstellationSet) -> Vec<u8> {
    let mut bits = Vec::with_capacity(y.len() * set.bits_per_symbol() as usize);
    for &z in y {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, p) in set.points().iter().enumerate() {
            let d = (z - h * p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        set.push_label_bits(best, &mut bits);
    }
    bits
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + terms.iter().map(|&t| (t - m).exp()).sum::<f64>().ln()
}

/// Exact per-bit LLRs under circularly symmetric Gaussian noise of total
/// variance `sigma2`; positive favors bit 0. Bits come out MSB first per
/// symbol, matching [`psk_hard_demod`].
pub fn psk_soft_demod(y: &[Complex64], h: Complex64, sigma2: f64, set: &ConstellationSet) -> Vec<f64> {
    let bits_per_symbol = set.bits_per_symbol();
    let mut llrs = Vec::with_capacity(y.len() * bits_per_symbol as usize);
    let inv = 1.0 / sigma2;
    for &z in y {
        let metrics: Vec<f64> = set
            .points()
            .iter()
            .map(|p| -(z - h * p).norm_sqr() * inv)
            .collect();
        for k in (0..bits_per_symbol).rev() {
            let mut zero_terms = Vec::with_capacity(set.cardinality() / 2);
            let mut one_terms = Vec::with_capacity(set.cardinality() / 2);
            for (i, &m) in metrics.iter().enumerate() {
                if (set.label_of(i) >> k) & 1 == 0 {
                    zero_terms.push(m);
                } else {
                    one_terms.push(m);
                }
            }
            llrs.push(log_sum_exp(&zero_terms) - log_sum_exp(&one_terms));
        }
    }
    llrs
}
