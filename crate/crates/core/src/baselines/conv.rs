//! Rate-1/2 convolutional code, constraint length 3, octal generators (5, 7),
//! with Viterbi decoding under Hamming (hard) or LLR (soft) branch metrics.
//!
//! The encoder starts in the all-zero state and appends two zero flush bits,
//! so the trellis is terminated and the decoder traces back from state 0. A
//! truncated-traceback mode (window of `5 K = 15` by convention) is available
//! for decoding-delay experiments; the default full-block traceback is
//! maximum likelihood.

use crate::error::{Error, Result};

/// Constraint length K of the fixed code.
pub const CONSTRAINT_LENGTH: usize = 3;
/// Generator taps, MSB = newest bit: 5o = 101, 7o = 111.
const G0: u8 = 0b101;
const G1: u8 = 0b111;
const NUM_STATES: usize = 4;

/// Fixed (5,7) code plus decoder options.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvCode {
    /// `None` decodes with full-block traceback (exact ML on the terminated
    /// trellis); `Some(d)` emits decisions `d` steps behind the frontier.
    pub traceback_depth: Option<usize>,
}

impl ConvCode {
    pub fn new() -> Self {
        ConvCode {
            traceback_depth: None,
        }
    }

    pub fn with_traceback(depth: usize) -> Self {
        ConvCode {
            traceback_depth: Some(depth),
        }
    }

    pub fn rate(&self) -> f64 {
        0.5
    }

    /// Flush overhead: coded bits spent terminating the trellis.
    pub fn flush_coded_bits(&self) -> usize {
        2 * (CONSTRAINT_LENGTH - 1)
    }
}

impl Default for ConvCode {
    fn default() -> Self {
        ConvCode::new()
    }
}

#[inline]
fn step_state(state: usize, bit: u8) -> (usize, u8, u8) {
    // state = (b_{k-1} << 1) | b_{k-2}; register value with the new bit is
    // (bit << 2) | state, tapped by G0/G1.
    let reg = ((bit as usize) << 2) | state;
    let out0 = ((reg & G0 as usize).count_ones() & 1) as u8;
    let out1 = ((reg & G1 as usize).count_ones() & 1) as u8;
    let next = ((bit as usize) << 1) | (state >> 1);
    (next, out0, out1)
}

/// Encodes a message, appending `K - 1 = 2` zero flush bits. Output length is
/// `2 * (len + 2)`, pairs `(g0, g1)` interleaved.
pub fn conv_encode(message: &[u8]) -> Result<Vec<u8>> {
    if message.is_empty() {
        return Err(Error::InvalidArgument("empty message".into()));
    }
    let mut out = Vec::with_capacity(2 * (message.len() + CONSTRAINT_LENGTH - 1));
    let mut state = 0usize;
    for &b in message.iter().chain([0u8, 0u8].iter()) {
        debug_assert!(b <= 1);
        let (next, o0, o1) = step_state(state, b);
        out.push(o0);
        out.push(o1);
        state = next;
    }
    debug_assert_eq!(state, 0);
    Ok(out)
}

fn check_framing(coded_len: usize) -> Result<usize> {
    if coded_len % 2 != 0 {
        return Err(Error::Framing(coded_len));
    }
    let steps = coded_len / 2;
    if steps < CONSTRAINT_LENGTH {
        return Err(Error::InvalidArgument(format!(
            "need at least {CONSTRAINT_LENGTH} trellis steps, got {steps}"
        )));
    }
    Ok(steps)
}

/// Viterbi forward pass plus traceback, generic over the branch metric.
/// `cost(t, out0, out1)` is the metric of emitting the coded pair
/// `(out0, out1)` at step `t`; lower is better.
fn viterbi_core<F: Fn(usize, u8, u8) -> f64>(
    steps: usize,
    traceback_depth: Option<usize>,
    cost: F,
) -> Vec<u8> {
    let mut metrics = [f64::INFINITY; NUM_STATES];
    metrics[0] = 0.0;
    // survivors[t][state] = (previous state, input bit).
    let mut survivors = vec![[(0usize, 0u8); NUM_STATES]; steps];
    let mut window_decisions: Vec<u8> = Vec::with_capacity(steps);

    for t in 0..steps {
        let mut next = [f64::INFINITY; NUM_STATES];
        let mut surv = [(0usize, 0u8); NUM_STATES];
        for state in 0..NUM_STATES {
            if metrics[state].is_infinite() {
                continue;
            }
            for bit in 0..2u8 {
                let (ns, o0, o1) = step_state(state, bit);
                let m = metrics[state] + cost(t, o0, o1);
                // Strict less-than keeps the lowest predecessor state on ties.
                if m < next[ns] {
                    next[ns] = m;
                    surv[ns] = (state, bit);
                }
            }
        }
        metrics = next;
        survivors[t] = surv;

        if let Some(depth) = traceback_depth {
            if t + 1 >= depth {
                let mut state = (0..NUM_STATES)
                    .min_by(|&a, &b| metrics[a].partial_cmp(&metrics[b]).unwrap())
                    .unwrap();
                let mut bit = 0u8;
                for back in (t + 1 - depth..=t).rev() {
                    let (prev, b) = survivors[back][state];
                    bit = b;
                    state = prev;
                }
                window_decisions.push(bit);
            }
        }
    }

    // Terminated trellis: the tail is always resolved from state 0.
    let mut tail = Vec::with_capacity(steps);
    let mut state = 0usize;
    for t in (0..steps).rev() {
        let (prev, bit) = survivors[t][state];
        tail.push(bit);
        state = prev;
    }
    tail.reverse();

    match traceback_depth {
        None => tail,
        Some(_) => {
            // Windowed decisions cover the early steps; the final traceback
            // fills whatever the window had not reached yet.
            let mut out = window_decisions;
            let have = out.len();
            out.extend_from_slice(&tail[have..]);
            out
        }
    }
}

fn strip_flush(mut decoded: Vec<u8>) -> Vec<u8> {
    decoded.truncate(decoded.len() - (CONSTRAINT_LENGTH - 1));
    decoded
}

/// Decodes hard bit decisions (one per coded bit) under the Hamming metric.
pub fn viterbi_decode_hard(observations: &[u8], code: &ConvCode) -> Result<Vec<u8>> {
    let steps = check_framing(observations.len())?;
    let decoded = viterbi_core(steps, code.traceback_depth, |t, o0, o1| {
        f64::from(o0 != observations[2 * t]) + f64::from(o1 != observations[2 * t + 1])
    });
    Ok(strip_flush(decoded))
}

/// Decodes per-coded-bit LLRs (positive favors bit 0) under the correlation
/// metric; with exact LLRs this is ML on the terminated trellis.
pub fn viterbi_decode_soft(llrs: &[f64], code: &ConvCode) -> Result<Vec<u8>> {
    let steps = check_framing(llrs.len())?;
    let decoded = viterbi_core(steps, code.traceback_depth, |t, o0, o1| {
        let c0 = if o0 == 0 { -llrs[2 * t] } else { llrs[2 * t] };
        let c1 = if o1 == 0 { -llrs[2 * t + 1] } else { llrs[2 * t + 1] };
        c0 + c1
    });
    Ok(strip_flush(decoded))
}
