//! Reference schemes the detector is compared against: a rate-1/2
//! convolutional code with hard and soft Viterbi decoding over Gray-mapped
//! PSK, and the finite-blocklength normal approximation.

pub mod bound;
pub mod conv;
pub mod psk;

pub use bound::normal_approximation;
pub use conv::{conv_encode, viterbi_decode_hard, viterbi_decode_soft, ConvCode, CONSTRAINT_LENGTH};
pub use psk::{psk_hard_demod, psk_soft_demod};
