//! `pcfec` — product-code FEC toolkit.
//!
//! Subcommands: `optimize` (overhead-targeted code search), `threshold`
//! (DE threshold of explicit parameters), `simulate` (Monte Carlo BER),
//! `floor` (stall-pattern error floor), `reach` (GN-model reach and reach
//! gain), `transfer-estimate` (Monte Carlo miscorrection tables).
//!
//! Each subcommand reads `--config FILE` (JSON), applies explicit flags on
//! top, echoes the fully resolved config (with its SHA-256) beside the
//! outputs, and exits 0 on success, 2 on validation errors, 3 on
//! non-convergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use pcfec::cli::{
    decoders_to_value, model_to_value, resolve, run_floor, run_optimize, run_reach,
    run_simulate, run_threshold, run_transfer_estimate, Resolved,
};
use pcfec::Error;

#[derive(Parser)]
#[command(
    name = "pcfec",
    version,
    about = "Product-code FEC toolkit: code search, DE thresholds, BER simulation, \
             error floors, optical reach"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config file; explicit flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for result files and the resolved-config echo.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Master seed override (simulate: master_seed, transfer-estimate: seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Size of the worker thread pool (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Search (v, t, s) for the best code at each overhead target.
    Optimize {
        /// Inverse overhead targets, e.g. 7 for 1/7 (comma-separated).
        #[arg(long, value_delimiter = ',')]
        oh: Option<Vec<u32>>,
        /// Decoders to search for: ibdd, ideal-ibdd, ibdd-sr.
        #[arg(long, value_delimiter = ',')]
        decoders: Option<Vec<String>>,
        /// Miscorrection model: ideal, analytic-we, mc-estimated.
        #[arg(long)]
        model: Option<String>,
    },
    /// DE threshold of explicit code parameters.
    Threshold {
        #[arg(long)]
        v: Option<u32>,
        #[arg(long)]
        t: Option<u32>,
        #[arg(long)]
        s: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        decoders: Option<Vec<String>>,
        #[arg(long)]
        model: Option<String>,
    },
    /// Monte Carlo BER over an Eb/N0 grid.
    Simulate {
        #[arg(long)]
        v: Option<u32>,
        #[arg(long)]
        t: Option<u32>,
        #[arg(long)]
        s: Option<u32>,
        /// Eb/N0 grid in dB (comma-separated).
        #[arg(long, value_delimiter = ',')]
        ebn0: Option<Vec<f64>>,
        /// Stop a grid point once every decoder has this many bit errors.
        #[arg(long)]
        min_errors: Option<u64>,
        /// Hard frame budget per grid point.
        #[arg(long)]
        max_frames: Option<u64>,
        /// Transmit the all-zero codeword instead of random data.
        #[arg(long)]
        all_zero: bool,
        /// Count errors over the whole block, not just information bits.
        #[arg(long)]
        whole_block: bool,
        /// Fill empty ibdd-sr weight lists with DE-optimized weights.
        #[arg(long)]
        auto_sr_weights: bool,
    },
    /// Stall-pattern error-floor estimate over a pre-FEC error-rate grid.
    Floor {
        #[arg(long)]
        v: Option<u32>,
        #[arg(long)]
        t: Option<u32>,
        #[arg(long)]
        s: Option<u32>,
        /// Pre-FEC error rates (comma-separated); omit for an automatic
        /// grid below the iBDD threshold.
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
    },
    /// GN-model reach and reach-gain conversion.
    Reach {
        /// Farthest link meeting this SNR (dB).
        #[arg(long)]
        required_snr_db: Option<f64>,
        /// SNR-threshold improvement to convert into reach gain (dB).
        #[arg(long)]
        delta_db: Option<f64>,
        /// Baseline link length for the gain conversion (km).
        #[arg(long)]
        baseline_km: Option<f64>,
    },
    /// Monte Carlo estimate of the miscorrection transfer tables.
    TransferEstimate {
        #[arg(long)]
        v: Option<u32>,
        #[arg(long)]
        t: Option<u32>,
        /// Component-decode trials per grid point (>= 10000).
        #[arg(long)]
        trials: Option<u64>,
    },
}

type Overrides = Vec<(String, serde_json::Value)>;

fn push<T: serde::Serialize>(overrides: &mut Overrides, key: &str, value: &Option<T>) {
    if let Some(v) = value {
        overrides.push((key.to_string(), json!(v)));
    }
}

fn push_flag(overrides: &mut Overrides, key: &str, set: bool) {
    if set {
        overrides.push((key.to_string(), json!(true)));
    }
}

fn run(cli: Cli) -> pcfec::Result<()> {
    let common = &cli.common;
    let config = common.config.as_deref();
    let out = &common.out;
    match &cli.command {
        Command::Optimize {
            oh,
            decoders,
            model,
        } => {
            let mut ov = Overrides::new();
            push(&mut ov, "oh_targets", oh);
            if let Some(names) = decoders {
                ov.push(("decoders".into(), decoders_to_value(names)?));
            }
            if let Some(name) = model {
                ov.push(("transfer.model".into(), model_to_value(name)?));
            }
            let resolved: Resolved<pcfec::cli::OptimizeConfig> = resolve(config, &ov)?;
            run_optimize(&resolved, out)
        }
        Command::Threshold {
            v,
            t,
            s,
            decoders,
            model,
        } => {
            let mut ov = Overrides::new();
            push(&mut ov, "v", v);
            push(&mut ov, "t", t);
            push(&mut ov, "s", s);
            if let Some(names) = decoders {
                ov.push(("decoders".into(), decoders_to_value(names)?));
            }
            if let Some(name) = model {
                ov.push(("transfer.model".into(), model_to_value(name)?));
            }
            let resolved: Resolved<pcfec::cli::ThresholdConfig> = resolve(config, &ov)?;
            run_threshold(&resolved, out)
        }
        Command::Simulate {
            v,
            t,
            s,
            ebn0,
            min_errors,
            max_frames,
            all_zero,
            whole_block,
            auto_sr_weights,
        } => {
            let mut ov = Overrides::new();
            push(&mut ov, "v", v);
            push(&mut ov, "t", t);
            push(&mut ov, "s", s);
            push(&mut ov, "ebn0_grid_db", ebn0);
            push(&mut ov, "stop.min_bit_errors", min_errors);
            push(&mut ov, "stop.max_frames", max_frames);
            push_flag(&mut ov, "options.all_zero_codeword", *all_zero);
            push_flag(&mut ov, "options.whole_block_ber", *whole_block);
            push_flag(&mut ov, "auto_sr_weights", *auto_sr_weights);
            push(&mut ov, "master_seed", &common.seed);
            let resolved: Resolved<pcfec::cli::SimulateConfig> = resolve(config, &ov)?;
            run_simulate(&resolved, out)
        }
        Command::Floor { v, t, s, p } => {
            let mut ov = Overrides::new();
            push(&mut ov, "v", v);
            push(&mut ov, "t", t);
            push(&mut ov, "s", s);
            push(&mut ov, "p_grid", p);
            let resolved: Resolved<pcfec::cli::FloorConfig> = resolve(config, &ov)?;
            run_floor(&resolved, out)
        }
        Command::Reach {
            required_snr_db,
            delta_db,
            baseline_km,
        } => {
            let mut ov = Overrides::new();
            push(&mut ov, "required_snr_db", required_snr_db);
            push(&mut ov, "delta_snr_db", delta_db);
            push(&mut ov, "baseline_km", baseline_km);
            let resolved: Resolved<pcfec::cli::ReachConfig> = resolve(config, &ov)?;
            run_reach(&resolved, out)
        }
        Command::TransferEstimate { v, t, trials } => {
            let mut ov = Overrides::new();
            push(&mut ov, "v", v);
            push(&mut ov, "t", t);
            push(&mut ov, "trials", trials);
            push(&mut ov, "seed", &common.seed);
            let resolved: Resolved<pcfec::cli::TransferEstimateConfig> = resolve(config, &ov)?;
            run_transfer_estimate(&resolved, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.common.workers {
        if workers == 0 {
            eprintln!("error: --workers must be >= 1");
            return ExitCode::from(2);
        }
        // Errors only if a global pool already exists, which cannot happen
        // this early in a single-shot binary.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidInput(_) | Error::Json(_) => ExitCode::from(2),
                Error::NonConvergence(_) => ExitCode::from(3),
                Error::Io(_) => ExitCode::FAILURE,
            }
        }
    }
}
