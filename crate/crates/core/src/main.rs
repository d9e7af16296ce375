use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kronrod::constellation::{constellation_report, SchemeId};
use kronrod::detector::flops_estimate;
use kronrod::error::Error;
use kronrod::sim::{
    csv_string, gain_at_ber, preset, preset_names, read_csv_curve, run_sweep, CsvMeta, Pipeline,
    SimConfig,
};

/// Kronecker-structured constant-modulus link simulator.
#[derive(Parser)]
#[command(name = "kronrod", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo BER sweep and write a CSV curve.
    Simulate(SimulateArgs),
    /// Evaluate the finite-blocklength normal approximation on an SNR grid.
    Bound(BoundArgs),
    /// Dump factor constellation sets and their Kronecker expansion as JSON.
    Constellation(ConstellationArgs),
    /// Read the Eb/N0 gain between two sweep CSVs at a target BER.
    Gain(GainArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Path to a JSON config file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Name of a built-in preset (see --list-presets).
    #[arg(long)]
    preset: Option<String>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the worker count (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Override the Eb/N0 grid, comma-separated dB values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ebn0: Option<Vec<f64>>,
    /// Write measured wall seconds into the CSV. Off by default because it
    /// makes the output bytes non-reproducible.
    #[arg(long)]
    timing: bool,
    /// List available presets and exit.
    #[arg(long)]
    list_presets: bool,
}

#[derive(Args)]
struct BoundArgs {
    /// Blocklength in channel uses.
    #[arg(long)]
    n: u64,
    /// Rate in bits per channel use.
    #[arg(long)]
    rate: f64,
    /// SNR grid in dB: comma-separated values or start:stop:step.
    #[arg(long = "snr-grid", allow_hyphen_values = true)]
    snr_grid: String,
    /// Report 0.5 * epsilon as a crude BER proxy (heuristic).
    #[arg(long)]
    ber_proxy: bool,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstellationArgs {
    /// Construction scheme: 1 or 2.
    #[arg(long)]
    scheme: u8,
    /// Target (expanded) PSK order.
    #[arg(long)]
    m: usize,
    /// Scheme-2 factor cardinalities.
    #[arg(long, value_delimiter = ',')]
    factors: Option<Vec<usize>>,
    /// Output JSON path; stdout when omitted.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct GainArgs {
    /// CSV of the first (reference) curve.
    #[arg(long)]
    a: PathBuf,
    /// CSV of the second curve.
    #[arg(long)]
    b: PathBuf,
    /// Target BER at which to compare.
    #[arg(long)]
    ber: f64,
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Error> {
    let text = text.trim();
    if let Some((start, rest)) = text.split_once(':') {
        let (stop, step) = rest
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument("grid range must be start:stop:step".into()))?;
        let (start, stop, step): (f64, f64, f64) = (
            start.parse().map_err(|_| Error::InvalidArgument("bad grid start".into()))?,
            stop.parse().map_err(|_| Error::InvalidArgument("bad grid stop".into()))?,
            step.parse().map_err(|_| Error::InvalidArgument("bad grid step".into()))?,
        );
        if step <= 0.0 || stop < start {
            return Err(Error::InvalidArgument("grid range must ascend".into()));
        }
        let mut grid = Vec::new();
        let mut v = start;
        while v <= stop + 1e-9 {
            grid.push(v);
            v += step;
        }
        Ok(grid)
    } else {
        text.split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("bad grid value '{tok}'")))
            })
            .collect()
    }
}

fn write_output(path: Option<&PathBuf>, content: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(Error::from),
        None => {
            print!("{content}");
            std::io::stdout().flush().map_err(Error::from)
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Error> {
    if args.list_presets {
        for name in preset_names() {
            println!("{name}");
        }
        return Ok(());
    }
    let (mut cfg, preset_name) = match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)?;
            (SimConfig::from_json(&text)?, None)
        }
        (None, Some(name)) => (preset(name)?, Some(name.clone())),
        _ => {
            return Err(Error::InvalidConfig(
                "simulate needs exactly one of --config or --preset".into(),
            ))
        }
    };
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(workers) = args.workers {
        cfg.workers = workers;
    }
    if let Some(grid) = args.ebn0 {
        cfg.ebn0_grid_db = grid;
    }
    cfg.validate()?;

    if cfg.pipeline == Pipeline::KronRod {
        let kron = cfg.kron.as_ref().unwrap().build()?;
        let est = flops_estimate(&kron, &cfg.tpmd);
        eprintln!("predicted detector cost per block: {est}");
    }

    let stats = run_sweep(&cfg)?;
    let meta = CsvMeta {
        pipeline: cfg.pipeline.to_string(),
        channel: cfg.channel.to_string(),
        preset: preset_name,
        master_seed: cfg.master_seed,
        decoding_delay_symbols: cfg.decoding_delay_symbols()?,
    };
    let csv = csv_string(&stats, &meta, args.timing);
    write_output(args.out.as_ref(), &csv)?;
    let wall: f64 = stats.iter().map(|s| s.wall_s).sum();
    eprintln!(
        "{} points, {:.2}s total{}",
        stats.len(),
        wall,
        match meta.decoding_delay_symbols {
            Some(d) => format!(", decoding delay {d} symbols"),
            None => String::new(),
        }
    );
    Ok(())
}

fn cmd_bound(args: BoundArgs) -> Result<(), Error> {
    let grid = parse_grid(&args.snr_grid)?;
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty snr grid".into()));
    }
    let mut out = String::from("snr_db,snr,ebn0_db,epsilon\n");
    for &snr_db in &grid {
        let snr = 10f64.powf(snr_db / 10.0);
        let mut eps = kronrod::baselines::normal_approximation(args.n, args.rate, snr)?;
        if args.ber_proxy {
            eps *= 0.5;
        }
        let ebn0_db = snr_db - 10.0 * args.rate.log10();
        out.push_str(&format!("{snr_db:.3},{snr:.6e},{ebn0_db:.3},{eps:.6e}\n"));
    }
    write_output(args.out.as_ref(), &out)
}

fn cmd_constellation(args: ConstellationArgs) -> Result<(), Error> {
    let scheme = match args.scheme {
        1 => SchemeId::Scheme1,
        2 => SchemeId::Scheme2,
        other => {
            return Err(Error::InvalidConfig(format!(
                "scheme must be 1 or 2, got {other}"
            )))
        }
    };
    let factors = match (scheme, args.factors) {
        (SchemeId::Scheme1, Some(_)) => {
            return Err(Error::InvalidConfig(
                "--factors applies to scheme 2 only".into(),
            ))
        }
        (SchemeId::Scheme1, None) => Vec::new(),
        (SchemeId::Scheme2, Some(f)) => f,
        (SchemeId::Scheme2, None) => {
            return Err(Error::InvalidConfig(
                "scheme 2 requires --factors".into(),
            ))
        }
    };
    let report = constellation_report(scheme, args.m, &factors)?;
    let json = serde_json::to_string_pretty(&report)?;
    write_output(args.dump.as_ref(), &format!("{json}\n"))
}

fn cmd_gain(args: GainArgs) -> Result<(), Error> {
    let a = read_csv_curve(&std::fs::read_to_string(&args.a)?)?;
    let b = read_csv_curve(&std::fs::read_to_string(&args.b)?)?;
    let xa = kronrod::sim::ebn0_at_ber(&a, args.ber)?;
    let xb = kronrod::sim::ebn0_at_ber(&b, args.ber)?;
    let gain = gain_at_ber(&a, &b, args.ber)?;
    println!("a_ebn0_db={xa:.3} b_ebn0_db={xb:.3} gain_db={gain:.3}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Bound(args) => cmd_bound(args),
        Command::Constellation(args) => cmd_constellation(args),
        Command::Gain(args) => cmd_gain(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = if e.is_config() { "config" } else { "runtime" };
            eprintln!(
                "{}",
                serde_json::json!({ "error": e.to_string(), "kind": kind })
            );
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
