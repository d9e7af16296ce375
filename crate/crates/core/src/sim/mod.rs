//! Monte Carlo harness: configuration, engine, statistics, presets and curve
//! post-processing.

pub mod config;
pub mod engine;
pub mod gain;
pub mod presets;
pub mod stats;

pub use config::{BoundSpec, KronSpec, Pipeline, SimConfig, ViterbiSpec};
pub use engine::{run_point, run_sweep};
pub use gain::{ebn0_at_ber, gain_at_ber};
pub use presets::{preset, preset_json, preset_names};
pub use stats::{csv_string, read_csv_curve, write_csv, BerStat, CsvMeta, CSV_HEADER};
