//! Bit mapping and Kronecker cross-coding.
//!
//! A block is built from `N` per-branch symbol vectors `s_1, ..., s_N`
//! (lengths `L_1, ..., L_N`, entries taken from the branch's assigned factor
//! set) and transmitted as the Kronecker product `x = s_N (x) ... (x) s_1` of
//! length `L = prod L_n`.
//!
//! When pilots are enabled (the default) the first symbol of each branch is
//! pinned to the assigned set's first point. The receiver needs that anchor to
//! resolve the per-branch complex scale left over by the rank-one detector;
//! without it the block is not decodable at all. Rate accounting keeps the
//! conventional figure (all symbol positions counted) and the pilot-adjusted
//! effective figure side by side.

use num_complex::Complex64;

use crate::constellation::{ConstellationSet, SchemeId, scheme1_sets, scheme2_sets};
use crate::error::{Error, Result};
use crate::tensor::kron_vec;

/// Full description of one Kronecker code: branch lengths, per-branch factor
/// set assignment (repeats allowed) and the pilot convention.
#[derive(Debug, Clone)]
pub struct KronConfig {
    lengths: Vec<usize>,
    sets: Vec<ConstellationSet>,
    pilot_enabled: bool,
    scheme: SchemeId,
}

impl KronConfig {
    pub fn new(
        scheme: SchemeId,
        lengths: Vec<usize>,
        sets: Vec<ConstellationSet>,
        pilot_enabled: bool,
    ) -> Result<Self> {
        if lengths.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 branches, got {}",
                lengths.len()
            )));
        }
        if lengths.len() != sets.len() {
            return Err(Error::InvalidConfig(format!(
                "{} lengths but {} set assignments",
                lengths.len(),
                sets.len()
            )));
        }
        if let Some(&l) = lengths.iter().find(|&&l| l < 2) {
            return Err(Error::InvalidConfig(format!(
                "branch lengths must be >= 2, got {l}"
            )));
        }
        Ok(KronConfig {
            lengths,
            sets,
            pilot_enabled,
            scheme,
        })
    }

    /// Scheme-1 config over an `m`-PSK target. With more branches than factor
    /// sets, the antipodal base set is repeated first:
    /// `{s_1, ..., s_N} <-> {Phi_0, ..., Phi_0, Phi_1, ..., Phi_{P-1}}`.
    pub fn scheme1(m: usize, lengths: Vec<usize>, pilot_enabled: bool) -> Result<Self> {
        let sets = scheme1_sets(m)?;
        let n = lengths.len();
        let p = sets.len();
        if n < p {
            return Err(Error::InvalidConfig(format!(
                "scheme 1 with {p} factor sets needs at least {p} branches, got {n}"
            )));
        }
        let mut assigned = vec![sets[0].clone(); n - p + 1];
        assigned.extend_from_slice(&sets[1..]);
        KronConfig::new(SchemeId::Scheme1, lengths, assigned, pilot_enabled)
    }

    /// Scheme-2 config with one factor cardinality per branch.
    pub fn scheme2(factor_cardinalities: &[usize], lengths: Vec<usize>, pilot_enabled: bool) -> Result<Self> {
        if factor_cardinalities.len() != lengths.len() {
            return Err(Error::InvalidConfig(format!(
                "{} factor cardinalities for {} branches",
                factor_cardinalities.len(),
                lengths.len()
            )));
        }
        let sets = scheme2_sets(factor_cardinalities)?;
        KronConfig::new(SchemeId::Scheme2, lengths, sets, pilot_enabled)
    }

    pub fn n_branches(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn block_len(&self) -> usize {
        self.lengths.iter().product()
    }

    pub fn set(&self, branch: usize) -> &ConstellationSet {
        &self.sets[branch]
    }

    pub fn sets(&self) -> &[ConstellationSet] {
        &self.sets
    }

    pub fn pilot_enabled(&self) -> bool {
        self.pilot_enabled
    }

    pub fn scheme(&self) -> SchemeId {
        self.scheme
    }

    fn pilot_per_branch(&self) -> usize {
        usize::from(self.pilot_enabled)
    }

    /// Payload bits of one branch (pilot position excluded when enabled).
    pub fn branch_payload_bits(&self, branch: usize) -> usize {
        (self.lengths[branch] - self.pilot_per_branch()) * self.sets[branch].bits_per_symbol() as usize
    }
}

/// Information bits carried by one block, excluding pilot positions.
pub fn payload_bits_per_block(cfg: &KronConfig) -> usize {
    (0..cfg.n_branches()).map(|n| cfg.branch_payload_bits(n)).sum()
}

/// Nominal bit rate in bits per symbol period,
/// `sum(L_n log2 M_n) / prod(L_n)`, counting every symbol position.
pub fn bit_rate(cfg: &KronConfig) -> f64 {
    let bits: usize = cfg
        .lengths()
        .iter()
        .zip(cfg.sets())
        .map(|(&l, s)| l * s.bits_per_symbol() as usize)
        .sum();
    bits as f64 / cfg.block_len() as f64
}

/// Pilot-adjusted bit rate: payload bits over block length.
pub fn effective_bit_rate(cfg: &KronConfig) -> f64 {
    payload_bits_per_block(cfg) as f64 / cfg.block_len() as f64
}

/// Code rate of the cross-coding, `sum(L_n) / prod(L_n)`.
pub fn code_rate(cfg: &KronConfig) -> f64 {
    cfg.lengths().iter().sum::<usize>() as f64 / cfg.block_len() as f64
}

/// The `N` branch symbol vectors of one block together with the coded vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock {
    pub branch_symbols: Vec<Vec<Complex64>>,
    pub coded: Vec<Complex64>,
}

impl SymbolBlock {
    /// Bundles branch vectors and their encoding, validating lengths.
    pub fn from_branch_symbols(branch_symbols: Vec<Vec<Complex64>>, cfg: &KronConfig) -> Result<Self> {
        if branch_symbols.len() != cfg.n_branches() {
            return Err(Error::InvalidConfig(format!(
                "{} branch vectors for {} branches",
                branch_symbols.len(),
                cfg.n_branches()
            )));
        }
        for (n, (s, &l)) in branch_symbols.iter().zip(cfg.lengths()).enumerate() {
            if s.len() != l {
                return Err(Error::InvalidConfig(format!(
                    "branch {n} has {} symbols, expected {l}",
                    s.len()
                )));
            }
        }
        let coded = encode(&branch_symbols)?;
        Ok(SymbolBlock {
            branch_symbols,
            coded,
        })
    }
}

/// Cross-coding: `x = s_N (x) ... (x) s_1`, length `prod L_n`.
pub fn encode(branch_symbols: &[Vec<Complex64>]) -> Result<Vec<Complex64>> {
    if branch_symbols.is_empty() {
        return Err(Error::InvalidArgument("encode of an empty branch list".into()));
    }
    let reversed: Vec<&[Complex64]> = branch_symbols.iter().rev().map(|v| v.as_slice()).collect();
    kron_vec(&reversed)
}

/// Maps payload bits onto branch symbols. Bits fill branch 1 first; inside a
/// branch each group of `log2 M_n` bits selects a point through the set's bit
/// labels. Pilot positions (index 0 of each branch) are skipped and pinned to
/// the set's first point.
pub fn modulate_branches(bits: &[u8], cfg: &KronConfig) -> Result<SymbolBlock> {
    let expected = payload_bits_per_block(cfg);
    if bits.len() != expected {
        return Err(Error::BitCount {
            expected,
            got: bits.len(),
        });
    }
    let mut offset = 0usize;
    let mut branches = Vec::with_capacity(cfg.n_branches());
    for n in 0..cfg.n_branches() {
        let set = cfg.set(n);
        let bps = set.bits_per_symbol() as usize;
        let mut symbols = Vec::with_capacity(cfg.lengths()[n]);
        for l in 0..cfg.lengths()[n] {
            if cfg.pilot_enabled() && l == 0 {
                symbols.push(set.first_point());
            } else {
                let label = set.label_from_bits(&bits[offset..offset + bps]);
                symbols.push(set.point(set.index_of_label(label)));
                offset += bps;
            }
        }
        branches.push(symbols);
    }
    debug_assert_eq!(offset, expected);
    SymbolBlock::from_branch_symbols(branches, cfg)
}

/// Recovers the payload bits of one branch. Symbols must be exact points of
/// the assigned set (slicing comes first).
pub fn demap_branch(symbols: &[Complex64], set: &ConstellationSet, pilot_enabled: bool, branch: usize) -> Result<Vec<u8>> {
    let mut bits = Vec::with_capacity(symbols.len() * set.bits_per_symbol() as usize);
    for (l, &z) in symbols.iter().enumerate() {
        if pilot_enabled && l == 0 {
            continue;
        }
        match set.exact_index(z) {
            Some(idx) => set.push_label_bits(idx, &mut bits),
            None => return Err(Error::InvalidSymbol { branch, position: l }),
        }
    }
    Ok(bits)
}

/// Inverse of [`modulate_branches`]: concatenated branch payload bits, pilot
/// positions excluded.
pub fn demap_branches(block: &SymbolBlock, cfg: &KronConfig) -> Result<Vec<u8>> {
    let mut bits = Vec::with_capacity(payload_bits_per_block(cfg));
    for (n, symbols) in block.branch_symbols.iter().enumerate() {
        bits.extend(demap_branch(symbols, cfg.set(n), cfg.pilot_enabled(), n)?);
    }
    Ok(bits)
}
