//! Link-level toolkit for Kronecker-structured constant-modulus signaling.
//!
//! A length-`L` block is transmitted as the Kronecker product of `N` short
//! per-branch PSK vectors. At the receiver, the matched-filtered block is
//! reshaped into an `N`-way tensor whose noise-free part is rank one; each
//! branch vector is recovered by power iteration on the corresponding mode
//! Gramian (the Kronecker rank-one detector), rescaled against a per-branch
//! pilot and sliced back to its alphabet.
//!
//! The crate provides:
//!
//! * [`constellation`] — factor-set construction (schemes 1 and 2), Kronecker
//!   expansion, per-set error probabilities;
//! * [`tensor`] — dense tensors, unfoldings and mode Gramians;
//! * [`codec`] — bit mapping, cross-coding and the rate formulas;
//! * [`channel`] — AWGN / flat Rayleigh block fading, Eb/N0 calibration,
//!   matched filtering;
//! * [`detector`] — the tensor-power-method branches plus scale resolution
//!   and slicing;
//! * [`baselines`] — rate-1/2 convolutional code with hard/soft Viterbi over
//!   Gray PSK, and the finite-blocklength normal approximation;
//! * [`sim`] — the reproducible Monte Carlo BER harness behind the `kronrod`
//!   CLI.

pub mod baselines;
pub mod channel;
pub mod codec;
pub mod constellation;
pub mod detector;
pub mod error;
pub mod rng;
pub mod sim;
pub mod tensor;

pub use error::{Error, Result};
