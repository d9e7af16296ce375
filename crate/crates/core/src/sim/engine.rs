//! Monte Carlo BER engine.
//!
//! Blocks are simulated in fixed-size batches; each block's randomness is a
//! pure function of `(master_seed, point_index, block_index)` and batch
//! results are merged with integer sums only, so a sweep is bit-reproducible
//! for any worker count. The stop rule (error target or bit budget) is
//! evaluated on batch boundaries.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::baselines::{conv_encode, psk_hard_demod, psk_soft_demod, viterbi_decode_hard, viterbi_decode_soft, ConvCode};
use crate::channel::{calibrate_noise_rate, draw_channel, matched_filter, transmit, ChannelModel, ChannelRealization};
use crate::codec::{demap_branch, modulate_branches, payload_bits_per_block, KronConfig};
use crate::constellation::{make_psk, ConstellationSet};
use crate::detector::{detect, TpmdSettings};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SimRng};
use crate::sim::config::{Pipeline, SimConfig};
use crate::sim::stats::BerStat;

const MAX_BRANCHES: usize = 16;

/// Counters produced by one simulated block.
#[derive(Debug, Clone, Copy)]
struct BlockOutcome {
    payload_bits: u32,
    bit_errors: u32,
    block_error: bool,
    /// Iteration counts of the successful detector branches.
    iters: [u16; MAX_BRANCHES],
    n_iters: u8,
}

impl BlockOutcome {
    fn new(payload_bits: u32, bit_errors: u32) -> Self {
        BlockOutcome {
            payload_bits,
            bit_errors,
            block_error: bit_errors > 0,
            iters: [0; MAX_BRANCHES],
            n_iters: 0,
        }
    }

    fn push_iters(&mut self, iters: u32) {
        if (self.n_iters as usize) < MAX_BRANCHES {
            self.iters[self.n_iters as usize] = iters as u16;
            self.n_iters += 1;
        }
    }
}

#[derive(Debug, Clone, Default)]
struct PointAccum {
    bits: u64,
    bit_errors: u64,
    blocks: u64,
    block_errors: u64,
    hist: Vec<u64>,
}

impl PointAccum {
    fn add(mut self, o: &BlockOutcome) -> Self {
        self.bits += o.payload_bits as u64;
        self.bit_errors += o.bit_errors as u64;
        self.blocks += 1;
        self.block_errors += u64::from(o.block_error);
        for k in 0..o.n_iters as usize {
            let it = o.iters[k] as usize;
            if self.hist.len() <= it {
                self.hist.resize(it + 1, 0);
            }
            self.hist[it] += 1;
        }
        self
    }

    fn merge(mut self, other: PointAccum) -> Self {
        self.bits += other.bits;
        self.bit_errors += other.bit_errors;
        self.blocks += other.blocks;
        self.block_errors += other.block_errors;
        if self.hist.len() < other.hist.len() {
            self.hist.resize(other.hist.len(), 0);
        }
        for (k, c) in other.hist.iter().enumerate() {
            self.hist[k] += c;
        }
        self
    }
}

fn log_level() -> u8 {
    static LEVEL: std::sync::OnceLock<u8> = std::sync::OnceLock::new();
    *LEVEL.get_or_init(|| match std::env::var("KRONROD_LOG").as_deref() {
        Ok("debug") => 2,
        Ok("info") => 1,
        _ => 0,
    })
}

struct KronCtx {
    kron: KronConfig,
    tpmd: TpmdSettings,
    channel: ChannelModel,
    payload_bits: usize,
    branch_bits: Vec<usize>,
}

fn simulate_kron_block(ctx: &KronCtx, sigma2: f64, seed: u64) -> BlockOutcome {
    let mut rng = SimRng::from_seed(seed);
    let bits = rng.bits(ctx.payload_bits);
    let block = modulate_branches(&bits, &ctx.kron).expect("payload size matches config");
    let h = draw_channel(ctx.channel, &mut rng);
    let real = ChannelRealization {
        h,
        sigma2,
        model: ctx.channel,
    };
    let y = transmit(&block.coded, &real, &mut rng);
    let yhat = matched_filter(&y, h);
    let branches = detect(&yhat, &ctx.kron, &ctx.tpmd, &mut rng).expect("block length matches config");

    let mut outcome = BlockOutcome::new(ctx.payload_bits as u32, 0);
    let mut offset = 0usize;
    for (n, branch) in branches.iter().enumerate() {
        let nbits = ctx.branch_bits[n];
        let sent = &bits[offset..offset + nbits];
        match branch {
            Ok(r) => {
                let got = demap_branch(&r.s_sliced, ctx.kron.set(n), ctx.kron.pilot_enabled(), n)
                    .expect("sliced symbols are exact set points");
                outcome.bit_errors += sent
                    .iter()
                    .zip(got.iter())
                    .filter(|(a, b)| a != b)
                    .count() as u32;
                outcome.push_iters(r.iters_used);
            }
            // Erased branch: all of its payload bits count as errors.
            Err(_) => outcome.bit_errors += nbits as u32,
        }
        offset += nbits;
    }
    outcome.block_error = outcome.bit_errors > 0;
    outcome
}

struct ViterbiCtx {
    qpsk: ConstellationSet,
    code: ConvCode,
    msg_bits: usize,
    soft: bool,
    channel: ChannelModel,
}

fn map_qpsk(coded: &[u8], set: &ConstellationSet) -> Vec<Complex64> {
    coded
        .chunks_exact(2)
        .map(|pair| {
            let label = set.label_from_bits(pair);
            set.point(set.index_of_label(label))
        })
        .collect()
}

fn simulate_viterbi_block(ctx: &ViterbiCtx, sigma2: f64, seed: u64) -> BlockOutcome {
    let mut rng = SimRng::from_seed(seed);
    let msg = rng.bits(ctx.msg_bits);
    let coded = conv_encode(&msg).expect("message is nonempty");
    let x = map_qpsk(&coded, &ctx.qpsk);
    let h = draw_channel(ctx.channel, &mut rng);
    let real = ChannelRealization {
        h,
        sigma2,
        model: ctx.channel,
    };
    let y = transmit(&x, &real, &mut rng);
    let decoded = if ctx.soft {
        // Guard the noiseless test hook: exact LLRs need sigma2 > 0.
        let s2 = sigma2.max(1e-12);
        let llrs = psk_soft_demod(&y, h, s2, &ctx.qpsk);
        viterbi_decode_soft(&llrs, &ctx.code).expect("framing fixed by construction")
    } else {
        let hard = psk_hard_demod(&y, h, &ctx.qpsk);
        viterbi_decode_hard(&hard, &ctx.code).expect("framing fixed by construction")
    };
    let errors = msg
        .iter()
        .zip(decoded.iter())
        .filter(|(a, b)| a != b)
        .count() as u32;
    BlockOutcome::new(ctx.msg_bits as u32, errors)
}

enum PointCtx {
    Kron(KronCtx),
    Viterbi(ViterbiCtx),
}

impl PointCtx {
    fn payload_bits(&self) -> usize {
        match self {
            PointCtx::Kron(c) => c.payload_bits,
            PointCtx::Viterbi(c) => c.msg_bits,
        }
    }

    fn simulate(&self, sigma2: f64, seed: u64) -> BlockOutcome {
        match self {
            PointCtx::Kron(c) => simulate_kron_block(c, sigma2, seed),
            PointCtx::Viterbi(c) => simulate_viterbi_block(c, sigma2, seed),
        }
    }
}

fn build_point_ctx(cfg: &SimConfig) -> Result<Option<PointCtx>> {
    match cfg.pipeline {
        Pipeline::KronRod => {
            let kron = cfg
                .kron
                .as_ref()
                .ok_or_else(|| Error::InvalidConfig("pipeline kron_rod requires a kron section".into()))?
                .build()?;
            if kron.n_branches() > MAX_BRANCHES {
                return Err(Error::InvalidConfig(format!(
                    "at most {MAX_BRANCHES} branches supported, got {}",
                    kron.n_branches()
                )));
            }
            let payload_bits = payload_bits_per_block(&kron);
            if payload_bits == 0 {
                return Err(Error::InvalidConfig(
                    "config carries no payload bits per block".into(),
                ));
            }
            let branch_bits = (0..kron.n_branches())
                .map(|n| kron.branch_payload_bits(n))
                .collect();
            Ok(Some(PointCtx::Kron(KronCtx {
                kron,
                tpmd: cfg.tpmd,
                channel: cfg.channel,
                payload_bits,
                branch_bits,
            })))
        }
        Pipeline::ViterbiHard | Pipeline::ViterbiSoft => {
            let code = match cfg.viterbi.traceback {
                Some(d) => ConvCode::with_traceback(d),
                None => ConvCode::new(),
            };
            Ok(Some(PointCtx::Viterbi(ViterbiCtx {
                qpsk: make_psk(4, 0.0)?,
                code,
                msg_bits: cfg.viterbi.block_symbols - 2,
                soft: cfg.pipeline == Pipeline::ViterbiSoft,
                channel: cfg.channel,
            })))
        }
        Pipeline::NormalApprox => Ok(None),
    }
}

fn bound_point(cfg: &SimConfig, ebn0_db: f64) -> Result<BerStat> {
    let bound = cfg
        .bound
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("pipeline normal_approx requires a bound section".into()))?;
    let snr = bound.rate * 10f64.powf(ebn0_db / 10.0);
    let eps = crate::baselines::normal_approximation(bound.block_len, bound.rate, snr)?;
    let mut stat = BerStat::empty(ebn0_db);
    stat.analytic = Some(if bound.ber_proxy { 0.5 * eps } else { eps });
    Ok(stat)
}

/// Simulates one Eb/N0 grid point. `point_index` is the position in the
/// sweep grid and seeds the per-block randomness.
pub fn run_point(cfg: &SimConfig, ebn0_db: f64, point_index: usize) -> Result<BerStat> {
    cfg.validate()?;
    let start = Instant::now();
    if cfg.pipeline == Pipeline::NormalApprox {
        let mut stat = bound_point(cfg, ebn0_db)?;
        stat.wall_s = start.elapsed().as_secs_f64();
        return Ok(stat);
    }
    let ctx = build_point_ctx(cfg)?.expect("monte carlo pipelines build a context");
    let sigma2 = match cfg.sigma2_override {
        Some(s) => s,
        None => calibrate_noise_rate(ebn0_db, cfg.calibration_rate()?)?,
    };

    let payload = ctx.payload_bits() as u64;
    let mut acc = PointAccum::default();
    let mut next_block = 0u64;
    loop {
        let batch_start = next_block;
        let batch_end = batch_start + cfg.batch_blocks;
        let batch: PointAccum = (batch_start..batch_end)
            .into_par_iter()
            .map(|block_index| {
                let seed = derive_seed(cfg.master_seed, point_index as u64, block_index);
                ctx.simulate(sigma2, seed)
            })
            .fold(PointAccum::default, |acc, o| acc.add(&o))
            .reduce(PointAccum::default, PointAccum::merge);
        acc = acc.merge(batch);
        next_block = batch_end;
        if log_level() >= 2 {
            eprintln!(
                "[kronrod] point {point_index} ({ebn0_db} dB): {} blocks, {} errors / {} bits",
                acc.blocks, acc.bit_errors, acc.bits
            );
        }
        if acc.bit_errors >= cfg.min_bit_errors || acc.bits >= cfg.max_bits {
            break;
        }
        // Degenerate guard: a config whose blocks carry no payload cannot
        // make progress (rejected earlier, but keep the loop total).
        debug_assert!(payload > 0);
    }

    let truncated = acc.bit_errors < cfg.min_bit_errors;
    let stat = BerStat {
        ebn0_db,
        bits_sent: acc.bits,
        bit_errors: acc.bit_errors,
        blocks_sent: acc.blocks,
        block_errors: acc.block_errors,
        iter_hist: acc.hist,
        analytic: None,
        truncated,
        wall_s: start.elapsed().as_secs_f64(),
    };
    if log_level() >= 1 {
        eprintln!(
            "[kronrod] {} dB: ber={:.3e} ({}/{} bits, {} blocks{}) in {:.2}s",
            ebn0_db,
            stat.ber(),
            stat.bit_errors,
            stat.bits_sent,
            stat.blocks_sent,
            if truncated { ", bit budget hit" } else { "" },
            stat.wall_s
        );
    }
    Ok(stat)
}

/// Runs the whole Eb/N0 grid, honoring the configured worker count.
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<BerStat>> {
    cfg.validate()?;
    let run = || -> Result<Vec<BerStat>> {
        cfg.ebn0_grid_db
            .iter()
            .enumerate()
            .map(|(i, &db)| run_point(cfg, db, i))
            .collect()
    };
    if cfg.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot build worker pool: {e}")))?;
        pool.install(run)
    } else {
        run()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_cfg(json_channel: &str) -> SimConfig {
        let json = format!(
            r#"{{
                "pipeline": "kron_rod",
                "channel": "{json_channel}",
                "ebn0_grid_db": [4.0],
                "min_bit_errors": 20,
                "max_bits": 20000,
                "batch_blocks": 64,
                "kron": {{"scheme": 2, "lengths": [2, 2], "factors": [4, 4]}}
            }}"#
        );
        SimConfig::from_json(&json).unwrap()
    }

    #[test]
    fn noiseless_override_gives_zero_errors() {
        let mut cfg = tiny_cfg("awgn");
        cfg.sigma2_override = Some(0.0);
        cfg.max_bits = 2000;
        let stat = run_point(&cfg, 0.0, 0).unwrap();
        assert_eq!(stat.bit_errors, 0);
        assert!(stat.truncated);
        assert!(stat.bits_sent >= 2000);
    }

    #[test]
    fn same_seed_same_result_any_worker_count() {
        use crate::sim::stats::{csv_string, CsvMeta};
        let mut cfg = tiny_cfg("rayleigh");
        cfg.workers = 1;
        let a = run_sweep(&cfg).unwrap();
        cfg.workers = 4;
        let b = run_sweep(&cfg).unwrap();
        // Wall time is measured, everything else must match bit for bit;
        // the CSV (timing scrubbed) is the binding contract.
        let meta = CsvMeta::default();
        assert_eq!(csv_string(&a, &meta, false), csv_string(&b, &meta, false));
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.iter_hist, y.iter_hist);
            assert_eq!(
                (x.bits_sent, x.bit_errors, x.blocks_sent, x.block_errors),
                (y.bits_sent, y.bit_errors, y.blocks_sent, y.block_errors)
            );
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut cfg = tiny_cfg("awgn");
        let a = run_point(&cfg, 4.0, 0).unwrap();
        cfg.master_seed = 99;
        let b = run_point(&cfg, 4.0, 0).unwrap();
        assert_ne!((a.bit_errors, a.bits_sent), (b.bit_errors, b.bits_sent));
    }

    #[test]
    fn stop_rule_reaches_error_target() {
        let cfg = tiny_cfg("awgn");
        let stat = run_point(&cfg, 0.0, 0).unwrap();
        assert!(stat.bit_errors >= 20 || stat.bits_sent >= cfg.max_bits);
        assert!(!stat.truncated || stat.bits_sent >= cfg.max_bits);
    }

    #[test]
    fn viterbi_pipelines_run() {
        for pipeline in ["viterbi_hard", "viterbi_soft"] {
            let json = format!(
                r#"{{
                    "pipeline": "{pipeline}",
                    "channel": "awgn",
                    "ebn0_grid_db": [3.0],
                    "min_bit_errors": 20,
                    "max_bits": 50000,
                    "batch_blocks": 64
                }}"#
            );
            let cfg = SimConfig::from_json(&json).unwrap();
            let stat = run_point(&cfg, 3.0, 0).unwrap();
            assert!(stat.bits_sent > 0);
            assert!(stat.iter_hist.is_empty());
        }
    }

    #[test]
    fn soft_beats_hard_at_moderate_snr() {
        let mk = |pipeline: &str| {
            let json = format!(
                r#"{{
                    "pipeline": "{pipeline}",
                    "channel": "awgn",
                    "ebn0_grid_db": [4.0],
                    "min_bit_errors": 400,
                    "max_bits": 2000000,
                    "batch_blocks": 512
                }}"#
            );
            SimConfig::from_json(&json).unwrap()
        };
        let hard = run_point(&mk("viterbi_hard"), 4.0, 0).unwrap();
        let soft = run_point(&mk("viterbi_soft"), 4.0, 0).unwrap();
        assert!(soft.ber() < hard.ber());
    }

    #[test]
    fn bound_pipeline_is_closed_form() {
        let json = r#"{
            "pipeline": "normal_approx",
            "channel": "awgn",
            "ebn0_grid_db": [0.0, 2.0, 4.0],
            "bound": {"block_len": 16, "rate": 1.0}
        }"#;
        let cfg = SimConfig::from_json(json).unwrap();
        let stats = run_sweep(&cfg).unwrap();
        assert_eq!(stats.len(), 3);
        assert!(stats[0].blocks_sent == 0 && stats[0].bits_sent == 0);
        assert!(stats.windows(2).all(|w| w[1].ber() < w[0].ber()));
    }
}
