//! Simulation configuration: a flat JSON document with strict key checking.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelModel;
use crate::codec::KronConfig;
use crate::constellation::SchemeId;
use crate::detector::TpmdSettings;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    KronRod,
    ViterbiHard,
    ViterbiSoft,
    NormalApprox,
}

impl std::fmt::Display for Pipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Pipeline::KronRod => "kron_rod",
            Pipeline::ViterbiHard => "viterbi_hard",
            Pipeline::ViterbiSoft => "viterbi_soft",
            Pipeline::NormalApprox => "normal_approx",
        };
        write!(f, "{s}")
    }
}

/// Kronecker-code description as it appears in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KronSpec {
    /// 1 or 2.
    pub scheme: u8,
    /// Branch lengths `L_1..L_N`.
    pub lengths: Vec<usize>,
    /// Optional branch count, cross-checked against `lengths`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Scheme 1: target (expanded) PSK order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Scheme 2: factor-set cardinalities (the palette).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<usize>>,
    /// Optional explicit branch -> set-index assignment (indices into the
    /// scheme's set list); defaults to the scheme's own convention.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignments: Option<Vec<usize>>,
    #[serde(default = "default_true")]
    pub pilot: bool,
}

fn default_true() -> bool {
    true
}

impl KronSpec {
    pub fn build(&self) -> Result<KronConfig> {
        if let Some(n) = self.n {
            if n != self.lengths.len() {
                return Err(Error::InvalidConfig(format!(
                    "kron.n = {n} but {} lengths were given",
                    self.lengths.len()
                )));
            }
        }
        let base = match self.scheme {
            1 => {
                let m = self.m.ok_or_else(|| {
                    Error::InvalidConfig("scheme 1 requires kron.m (expanded PSK order)".into())
                })?;
                if self.factors.is_some() {
                    return Err(Error::InvalidConfig(
                        "kron.factors is a scheme-2 key; scheme 1 derives its sets from kron.m".into(),
                    ));
                }
                (SchemeId::Scheme1, crate::constellation::scheme1_sets(m)?)
            }
            2 => {
                let factors = self.factors.as_ref().ok_or_else(|| {
                    Error::InvalidConfig("scheme 2 requires kron.factors (set cardinalities)".into())
                })?;
                (SchemeId::Scheme2, crate::constellation::scheme2_sets(factors)?)
            }
            other => {
                return Err(Error::InvalidConfig(format!(
                    "kron.scheme must be 1 or 2, got {other}"
                )))
            }
        };
        let (scheme, palette) = base;
        let n = self.lengths.len();
        match &self.assignments {
            Some(idx) => {
                if idx.len() != n {
                    return Err(Error::InvalidConfig(format!(
                        "{} assignments for {} branches",
                        idx.len(),
                        n
                    )));
                }
                let mut sets = Vec::with_capacity(n);
                for &i in idx {
                    let set = palette.get(i).ok_or_else(|| {
                        Error::InvalidConfig(format!(
                            "assignment index {i} out of range ({} sets)",
                            palette.len()
                        ))
                    })?;
                    sets.push(set.clone());
                }
                KronConfig::new(scheme, self.lengths.clone(), sets, self.pilot)
            }
            None => match scheme {
                SchemeId::Scheme1 => KronConfig::scheme1(
                    self.m.unwrap(),
                    self.lengths.clone(),
                    self.pilot,
                ),
                SchemeId::Scheme2 => {
                    if palette.len() != n {
                        return Err(Error::InvalidConfig(format!(
                            "scheme 2 without assignments needs one factor per branch: {} factors, {} branches",
                            palette.len(),
                            n
                        )));
                    }
                    KronConfig::new(scheme, self.lengths.clone(), palette, self.pilot)
                }
            },
        }
    }
}

/// Convolutional-baseline block framing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ViterbiSpec {
    /// PSK symbols per simulated block.
    pub block_symbols: usize,
    /// Truncated traceback depth; absent means full-block traceback.
    pub traceback: Option<usize>,
}

impl Default for ViterbiSpec {
    fn default() -> Self {
        ViterbiSpec {
            block_symbols: 16,
            traceback: None,
        }
    }
}

/// Normal-approximation evaluation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundSpec {
    /// Blocklength in channel uses.
    pub block_len: u64,
    /// Rate in bits per channel use.
    pub rate: f64,
    /// Report `0.5 * epsilon` as a crude BER proxy instead of the block
    /// error probability itself. Heuristic; off by default.
    #[serde(default)]
    pub ber_proxy: bool,
}

fn default_min_bit_errors() -> u64 {
    200
}

fn default_max_bits() -> u64 {
    10_000_000
}

fn default_batch_blocks() -> u64 {
    1024
}

fn default_master_seed() -> u64 {
    1
}

/// One simulation campaign: pipeline, channel, Eb/N0 grid and stop rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub pipeline: Pipeline,
    pub channel: ChannelModel,
    pub ebn0_grid_db: Vec<f64>,
    /// Free-text provenance notes carried along in preset files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    #[serde(default = "default_min_bit_errors")]
    pub min_bit_errors: u64,
    #[serde(default = "default_max_bits")]
    pub max_bits: u64,
    #[serde(default = "default_master_seed", alias = "seed")]
    pub master_seed: u64,
    /// Worker threads; 0 uses all cores.
    #[serde(default)]
    pub workers: usize,
    /// Blocks per scheduling batch. The stop rule is evaluated on batch
    /// boundaries, which is what makes results independent of `workers`.
    #[serde(default = "default_batch_blocks")]
    pub batch_blocks: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kron: Option<KronSpec>,
    #[serde(default)]
    pub tpmd: TpmdSettings,
    #[serde(default)]
    pub viterbi: ViterbiSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundSpec>,
    /// Overrides the bits/symbol figure used for the Eb/N0 -> sigma2 mapping.
    /// Defaults to the pipeline's nominal rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ebn0_rate: Option<f64>,
    /// Forces the noise variance at every grid point; test hook.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2_override: Option<f64>,
}

impl SimConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: SimConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn validate(&self) -> Result<()> {
        if self.ebn0_grid_db.is_empty() {
            return Err(Error::InvalidConfig("ebn0_grid_db must be nonempty".into()));
        }
        if self.min_bit_errors < 1 {
            return Err(Error::InvalidConfig("min_bit_errors must be >= 1".into()));
        }
        if self.batch_blocks < 1 {
            return Err(Error::InvalidConfig("batch_blocks must be >= 1".into()));
        }
        self.tpmd.validate()?;
        match self.pipeline {
            Pipeline::KronRod => {
                let spec = self.kron.as_ref().ok_or_else(|| {
                    Error::InvalidConfig("pipeline kron_rod requires a kron section".into())
                })?;
                spec.build()?;
            }
            Pipeline::ViterbiHard | Pipeline::ViterbiSoft => {
                if self.viterbi.block_symbols < 3 {
                    return Err(Error::InvalidConfig(
                        "viterbi.block_symbols must be >= 3 (two coded pairs are flush)".into(),
                    ));
                }
            }
            Pipeline::NormalApprox => {
                let b = self.bound.as_ref().ok_or_else(|| {
                    Error::InvalidConfig("pipeline normal_approx requires a bound section".into())
                })?;
                if b.block_len < 1 || !b.rate.is_finite() || b.rate <= 0.0 {
                    return Err(Error::InvalidConfig(
                        "bound.block_len must be >= 1 and bound.rate positive".into(),
                    ));
                }
            }
        }
        if let Some(r) = self.ebn0_rate {
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::InvalidConfig("ebn0_rate must be positive".into()));
            }
        }
        if let Some(s) = self.sigma2_override {
            if s < 0.0 {
                return Err(Error::InvalidConfig("sigma2_override must be >= 0".into()));
            }
        }
        Ok(())
    }

    /// Bits/symbol figure used to place the Eb/N0 axis.
    pub fn calibration_rate(&self) -> Result<f64> {
        if let Some(r) = self.ebn0_rate {
            return Ok(r);
        }
        match self.pipeline {
            Pipeline::KronRod => {
                let kron = self
                    .kron
                    .as_ref()
                    .ok_or_else(|| Error::InvalidConfig("missing kron section".into()))?
                    .build()?;
                Ok(crate::codec::bit_rate(&kron))
            }
            // Rate-1/2 code on QPSK: one information bit per symbol, flush
            // overhead excluded from the nominal figure.
            Pipeline::ViterbiHard | Pipeline::ViterbiSoft => Ok(1.0),
            Pipeline::NormalApprox => Ok(self
                .bound
                .as_ref()
                .ok_or_else(|| Error::InvalidConfig("missing bound section".into()))?
                .rate),
        }
    }

    /// Decoding delay in symbols reported as sweep metadata.
    pub fn decoding_delay_symbols(&self) -> Result<Option<usize>> {
        match self.pipeline {
            Pipeline::KronRod => {
                let kron = self
                    .kron
                    .as_ref()
                    .ok_or_else(|| Error::InvalidConfig("missing kron section".into()))?
                    .build()?;
                Ok(Some(kron.block_len()))
            }
            Pipeline::ViterbiHard | Pipeline::ViterbiSoft => Ok(Some(
                self.viterbi
                    .traceback
                    .unwrap_or(5 * crate::baselines::CONSTRAINT_LENGTH),
            )),
            Pipeline::NormalApprox => Ok(None),
        }
    }
}
