//! Per-point statistics and the CSV surface.
//!
//! All aggregation is integer-valued (bit/block counters and an iteration
//! histogram), so merged results do not depend on summation order and two
//! runs with the same seed produce byte-identical CSV no matter how many
//! workers were used. Measured wall time is therefore excluded from the file
//! by default; `include_timing` opts in and is documented as breaking
//! reproducibility of the output bytes.

use std::io::Write;

use crate::error::{Error, Result};

const WILSON_Z: f64 = 1.959963984540054; // 95% normal quantile

/// Accumulated counters for one Eb/N0 point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerStat {
    pub ebn0_db: f64,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub blocks_sent: u64,
    pub block_errors: u64,
    /// `iter_hist[k]` = number of detector branch runs that used `k`
    /// iterations. Empty for non-TPMD pipelines.
    pub iter_hist: Vec<u64>,
    /// Closed-form result for analytic pipelines (no Monte Carlo counters).
    pub analytic: Option<f64>,
    /// The stop rule ran out of bits before reaching the error target.
    pub truncated: bool,
    /// Measured wall-clock seconds for this point.
    pub wall_s: f64,
}

impl BerStat {
    pub fn ber(&self) -> f64 {
        if self.bits_sent > 0 {
            self.bit_errors as f64 / self.bits_sent as f64
        } else {
            self.analytic.unwrap_or(0.0)
        }
    }

    pub fn bler(&self) -> f64 {
        if self.blocks_sent > 0 {
            self.block_errors as f64 / self.blocks_sent as f64
        } else {
            self.analytic.unwrap_or(0.0)
        }
    }

    /// Wilson 95% interval on the bit error rate; degenerates to the point
    /// value for analytic rows.
    pub fn wilson_ci(&self) -> (f64, f64) {
        if self.bits_sent == 0 {
            let p = self.ber();
            return (p, p);
        }
        let n = self.bits_sent as f64;
        let p = self.bit_errors as f64 / n;
        let z2 = WILSON_Z * WILSON_Z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        ((center - half).max(0.0), (center + half).min(1.0))
    }

    pub fn branch_runs(&self) -> u64 {
        self.iter_hist.iter().sum()
    }

    pub fn mean_iters(&self) -> f64 {
        let runs = self.branch_runs();
        if runs == 0 {
            return 0.0;
        }
        let total: u64 = self
            .iter_hist
            .iter()
            .enumerate()
            .map(|(k, &c)| k as u64 * c)
            .sum();
        total as f64 / runs as f64
    }

    pub fn median_iters(&self) -> f64 {
        let runs = self.branch_runs();
        if runs == 0 {
            return 0.0;
        }
        let lower_rank = runs.div_ceil(2);
        let upper_rank = runs / 2 + 1;
        let mut lower = None;
        let mut upper = None;
        let mut cum = 0u64;
        for (k, &c) in self.iter_hist.iter().enumerate() {
            cum += c;
            if lower.is_none() && cum >= lower_rank {
                lower = Some(k as f64);
            }
            if upper.is_none() && cum >= upper_rank {
                upper = Some(k as f64);
                break;
            }
        }
        match (lower, upper) {
            (Some(a), Some(b)) => (a + b) / 2.0,
            _ => 0.0,
        }
    }

    pub fn max_iters(&self) -> u64 {
        self.iter_hist
            .iter()
            .rposition(|&c| c > 0)
            .map(|k| k as u64)
            .unwrap_or(0)
    }

    /// Merges another accumulator for the same point into this one.
    pub fn absorb(&mut self, other: &BerStat) {
        debug_assert_eq!(self.ebn0_db, other.ebn0_db);
        self.bits_sent += other.bits_sent;
        self.bit_errors += other.bit_errors;
        self.blocks_sent += other.blocks_sent;
        self.block_errors += other.block_errors;
        if self.iter_hist.len() < other.iter_hist.len() {
            self.iter_hist.resize(other.iter_hist.len(), 0);
        }
        for (k, &c) in other.iter_hist.iter().enumerate() {
            self.iter_hist[k] += c;
        }
        self.truncated |= other.truncated;
    }

    pub fn empty(ebn0_db: f64) -> Self {
        BerStat {
            ebn0_db,
            bits_sent: 0,
            bit_errors: 0,
            blocks_sent: 0,
            block_errors: 0,
            iter_hist: Vec::new(),
            analytic: None,
            truncated: false,
            wall_s: 0.0,
        }
    }
}

/// Header metadata written as `#` comment lines ahead of the CSV table.
#[derive(Debug, Clone, Default)]
pub struct CsvMeta {
    pub pipeline: String,
    pub channel: String,
    pub preset: Option<String>,
    pub master_seed: u64,
    pub decoding_delay_symbols: Option<usize>,
}

pub const CSV_HEADER: &str =
    "ebn0_db,ber,bit_errors,bits_sent,block_errors,blocks_sent,ci_low,ci_high,mean_iters,wall_s";

/// Writes the sweep as CSV. With `include_timing` false (the default path)
/// the wall_s column is written as zero so output bytes are reproducible.
pub fn write_csv<W: Write>(
    mut w: W,
    stats: &[BerStat],
    meta: &CsvMeta,
    include_timing: bool,
) -> std::io::Result<()> {
    writeln!(w, "# kronrod ber sweep")?;
    write!(w, "# pipeline={} channel={}", meta.pipeline, meta.channel)?;
    if let Some(p) = &meta.preset {
        write!(w, " preset={p}")?;
    }
    writeln!(w, " seed={}", meta.master_seed)?;
    if let Some(d) = meta.decoding_delay_symbols {
        writeln!(w, "# decoding_delay_symbols={d}")?;
    }
    writeln!(w, "{CSV_HEADER}")?;
    for s in stats {
        let (lo, hi) = s.wilson_ci();
        let wall = if include_timing { s.wall_s } else { 0.0 };
        writeln!(
            w,
            "{:.3},{:.6e},{},{},{},{},{:.6e},{:.6e},{:.4},{:.3}",
            s.ebn0_db,
            s.ber(),
            s.bit_errors,
            s.bits_sent,
            s.block_errors,
            s.blocks_sent,
            lo,
            hi,
            s.mean_iters(),
            wall
        )?;
    }
    Ok(())
}

pub fn csv_string(stats: &[BerStat], meta: &CsvMeta, include_timing: bool) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, stats, meta, include_timing).expect("write to Vec cannot fail");
    String::from_utf8(buf).expect("csv is ascii")
}

/// Reads `(ebn0_db, ber)` pairs back from a sweep CSV, skipping comments and
/// the header row.
pub fn read_csv_curve(content: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for line in content.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("ebn0_db") {
            continue;
        }
        let mut fields = line.split(',');
        let ebn0: f64 = fields
            .next()
            .ok_or_else(|| Error::InvalidArgument(format!("bad csv line: {line}")))?
            .parse()
            .map_err(|e| Error::InvalidArgument(format!("bad ebn0 field in '{line}': {e}")))?;
        let ber: f64 = fields
            .next()
            .ok_or_else(|| Error::InvalidArgument(format!("bad csv line: {line}")))?
            .parse()
            .map_err(|e| Error::InvalidArgument(format!("bad ber field in '{line}': {e}")))?;
        out.push((ebn0, ber));
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("csv contains no data rows".into()));
    }
    Ok(out)
}
