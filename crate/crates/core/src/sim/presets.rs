//! Named reference presets for the standard comparison sweeps.
//!
//! The JSON lives in the repository's `presets/` directory and is embedded
//! here, so `--preset NAME` and the on-disk files cannot drift apart. Each
//! file's `notes` field records the assumptions behind the curve (branch
//! lengths, axis convention).

use crate::error::{Error, Result};
use crate::sim::config::SimConfig;

macro_rules! presets {
    ($(($name:literal, $file:literal)),+ $(,)?) => {
        const PRESETS: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../../../../presets/", $file)))),+
        ];
    };
}

presets![
    ("fig3a-tpmd2-s2", "fig3a-tpmd2-s2.json"),
    ("fig3a-tpmd3-s2", "fig3a-tpmd3-s2.json"),
    ("fig3a-tpmd4-s2", "fig3a-tpmd4-s2.json"),
    ("fig3a-tpmd4-s1", "fig3a-tpmd4-s1.json"),
    ("fig3a-viterbi-hard", "fig3a-viterbi-hard.json"),
    ("fig3a-viterbi-soft", "fig3a-viterbi-soft.json"),
    ("fig3a-bound", "fig3a-bound.json"),
    ("fig3b-tpmd2-s2", "fig3b-tpmd2-s2.json"),
    ("fig3b-tpmd3-s2", "fig3b-tpmd3-s2.json"),
    ("fig3b-tpmd4-s2", "fig3b-tpmd4-s2.json"),
    ("fig3b-tpmd4-s1", "fig3b-tpmd4-s1.json"),
    ("fig3b-viterbi-hard", "fig3b-viterbi-hard.json"),
    ("fig3b-viterbi-soft", "fig3b-viterbi-soft.json"),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(name, _)| *name).collect()
}

pub fn preset_json(name: &str) -> Option<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, json)| *json)
}

pub fn preset(name: &str) -> Result<SimConfig> {
    let json = preset_json(name).ok_or_else(|| {
        Error::InvalidConfig(format!(
            "unknown preset '{name}'; available: {}",
            preset_names().join(", ")
        ))
    })?;
    SimConfig::from_json(json)
}
