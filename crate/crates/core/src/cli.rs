//! Configuration resolution and subcommand runners for the `pcfec` binary.
//!
//! Every subcommand reads an optional JSON config file, applies explicit
//! command-line overrides on top (flags win), fills remaining fields with
//! defaults, and writes the fully resolved config as `resolved_config.json`
//! next to its outputs. The SHA-256 of that resolved form is embedded in
//! every output (CSV header comment / JSON field), so any result file can
//! be traced back to the exact configuration that produced it, and reruns
//! of the same resolved config are byte-identical.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bch::CodeParams;
use crate::de::DeConfig;
use crate::optimizer::{
    evaluate_candidate, full_report, stall_floor, Candidate, ModelChoice, OhTarget,
    OptimizerConfig,
};
use crate::product::{DecoderKind, DecoderSchedule, ProductCodeSpec};
use crate::reach::{reach, reach_gain_with, LinkSpec, ReachGain, ReachResult, SpanRounding};
use crate::sim::{run_ber, sim_points_to_csv, RunManifest, SimOptions, StopRule};
use crate::transfer::default_x_grid;
use crate::{invalid, Result};

/// Hex-encoded SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// A typed config together with its canonical JSON form and digest.
#[derive(Debug, Clone)]
pub struct Resolved<T> {
    pub config: T,
    /// Pretty-printed canonical JSON of `config` (defaults filled in).
    pub json: String,
    /// SHA-256 of `json`.
    pub sha256: String,
}

/// Set `path` (dot-separated keys) in a JSON object tree, creating
/// intermediate objects as needed.
pub fn set_key(root: &mut serde_json::Value, path: &str, value: serde_json::Value) {
    let mut node = root;
    let mut parts = path.split('.').peekable();
    while let Some(part) = parts.next() {
        if parts.peek().is_none() {
            node[part] = value;
            return;
        }
        if !node[part].is_object() {
            node[part] = serde_json::json!({});
        }
        node = &mut node[part];
    }
}

/// Read the config file (`None` means an empty config), apply overrides in
/// order, and deserialize into the subcommand's typed config.
pub fn resolve<T>(
    file: Option<&Path>,
    overrides: &[(String, serde_json::Value)],
) -> Result<Resolved<T>>
where
    T: Serialize + DeserializeOwned,
{
    let mut merged = match file {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => serde_json::json!({}),
    };
    if !merged.is_object() {
        return Err(invalid("config file must contain a JSON object"));
    }
    for (path, value) in overrides {
        set_key(&mut merged, path, value.clone());
    }
    let config: T = serde_json::from_value(merged)?;
    let json = serde_json::to_string_pretty(&config)?;
    let sha256 = sha256_hex(json.as_bytes());
    Ok(Resolved {
        config,
        json,
        sha256,
    })
}

/// Write one output file under `out_dir`, creating the directory.
pub fn write_output(out_dir: &Path, name: &str, content: &str) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join(name), content)?;
    Ok(())
}

/// Write the resolved-config echo beside the outputs.
pub fn write_resolved<T>(out_dir: &Path, resolved: &Resolved<T>) -> Result<()> {
    write_output(out_dir, "resolved_config.json", &resolved.json)
}

fn parse_decoder(name: &str) -> Result<DecoderKind> {
    match name {
        "ibdd" => Ok(DecoderKind::Ibdd),
        "ideal-ibdd" => Ok(DecoderKind::IdealIbdd),
        "ibdd-sr" => Ok(DecoderKind::IbddSr),
        other => Err(invalid(format!(
            "unknown decoder '{other}' (expected ibdd, ideal-ibdd or ibdd-sr)"
        ))),
    }
}

/// Parse a comma-separated decoder list into config-ready JSON.
pub fn decoders_to_value(names: &[String]) -> Result<serde_json::Value> {
    let kinds = names
        .iter()
        .map(|n| parse_decoder(n))
        .collect::<Result<Vec<_>>>()?;
    Ok(serde_json::to_value(kinds)?)
}

/// Parse a transfer-model name into the config's `transfer.model` tag.
pub fn model_to_value(name: &str) -> Result<serde_json::Value> {
    match name {
        "ideal" | "analytic-we" | "mc-estimated" => Ok(serde_json::json!(name)),
        other => Err(invalid(format!(
            "unknown transfer model '{other}' (expected ideal, analytic-we or mc-estimated)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

/// Config for the overhead-targeted code search.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeConfig {
    /// Inverse overhead targets (7 means a 1/7 = 14.3% overhead).
    pub oh_targets: Vec<u32>,
    pub decoders: Vec<DecoderKind>,
    pub transfer: ModelChoice,
    pub optimizer: OptimizerConfig,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            oh_targets: OhTarget::all().iter().map(|t| t.inverse()).collect(),
            decoders: vec![DecoderKind::Ibdd, DecoderKind::IbddSr],
            transfer: ModelChoice::default(),
            optimizer: OptimizerConfig::default(),
        }
    }
}

pub fn run_optimize(resolved: &Resolved<OptimizeConfig>, out_dir: &Path) -> Result<()> {
    let cfg = &resolved.config;
    if cfg.oh_targets.is_empty() {
        return Err(invalid("oh_targets must list at least one inverse overhead"));
    }
    if cfg.decoders.is_empty() {
        return Err(invalid("decoders must list at least one decoder"));
    }
    let targets = cfg
        .oh_targets
        .iter()
        .map(|&i| OhTarget::new(i))
        .collect::<Result<Vec<_>>>()?;
    let report = full_report(&targets, &cfg.decoders, &cfg.optimizer, &cfg.transfer)?;
    let csv = format!(
        "# pcfec-optimize/v1 config_sha256={}\n{}",
        resolved.sha256,
        report.to_csv()
    );
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "format": "pcfec-optimize/v1",
        "config_sha256": resolved.sha256,
        "report": report,
    }))?;
    write_resolved(out_dir, resolved)?;
    write_output(out_dir, "optimize.csv", &csv)?;
    write_output(out_dir, "optimize.json", &json)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// threshold
// ---------------------------------------------------------------------------

/// Config for evaluating explicit code parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdConfig {
    pub v: u32,
    pub t: u32,
    pub s: u32,
    pub decoders: Vec<DecoderKind>,
    pub transfer: ModelChoice,
    pub optimizer: OptimizerConfig,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            v: 9,
            t: 3,
            s: 0,
            decoders: vec![DecoderKind::Ibdd, DecoderKind::IbddSr],
            transfer: ModelChoice::default(),
            optimizer: OptimizerConfig::default(),
        }
    }
}

pub fn run_threshold(resolved: &Resolved<ThresholdConfig>, out_dir: &Path) -> Result<()> {
    let cfg = &resolved.config;
    if cfg.decoders.is_empty() {
        return Err(invalid("decoders must list at least one decoder"));
    }
    let params = CodeParams::new(cfg.v, cfg.t, cfg.s);
    let results = cfg
        .decoders
        .iter()
        .map(|&kind| evaluate_candidate(&params, kind, &cfg.optimizer, &cfg.transfer))
        .collect::<Result<Vec<Candidate>>>()?;
    #[derive(Serialize)]
    struct Row<'a> {
        decoder: DecoderKind,
        #[serde(flatten)]
        candidate: &'a Candidate,
    }
    let rows: Vec<Row> = cfg
        .decoders
        .iter()
        .zip(&results)
        .map(|(&decoder, candidate)| Row { decoder, candidate })
        .collect();
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "format": "pcfec-threshold/v1",
        "config_sha256": resolved.sha256,
        "results": rows,
    }))?;
    write_resolved(out_dir, resolved)?;
    write_output(out_dir, "threshold.json", &json)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

/// Config for Monte Carlo BER runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub v: u32,
    pub t: u32,
    pub s: u32,
    pub schedules: Vec<DecoderSchedule>,
    /// Fill empty weight lists of ibdd-sr schedules with DE-optimized
    /// weights computed at the schedule's own decoding threshold.
    pub auto_sr_weights: bool,
    pub ebn0_grid_db: Vec<f64>,
    pub stop: StopRule,
    pub options: SimOptions,
    pub master_seed: u64,
    /// DE settings used only when `auto_sr_weights` fills weights.
    pub de: DeConfig,
    pub transfer: ModelChoice,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            v: 9,
            t: 3,
            s: 0,
            schedules: vec![DecoderSchedule::ibdd(12), DecoderSchedule::ideal_ibdd(12)],
            auto_sr_weights: false,
            ebn0_grid_db: vec![4.6, 4.8, 5.0],
            stop: StopRule::default(),
            options: SimOptions::default(),
            master_seed: 1,
            de: DeConfig::default(),
            transfer: ModelChoice::default(),
        }
    }
}

pub fn run_simulate(resolved: &Resolved<SimulateConfig>, out_dir: &Path) -> Result<()> {
    let cfg = &resolved.config;
    let params = CodeParams::new(cfg.v, cfg.t, cfg.s);
    let code = crate::bch::ComponentCode::new(params)?;
    let spec = ProductCodeSpec::new(code);
    let mut schedules = cfg.schedules.clone();
    if cfg.auto_sr_weights {
        let model = cfg.transfer.instantiate(cfg.v, cfg.t)?;
        for sched in &mut schedules {
            if sched.kind == DecoderKind::IbddSr
                && sched.weights.is_empty()
                && sched.sr_iterations > 0
            {
                let thr = crate::de::de_ibdd_sr_threshold(&params, &cfg.de, &model)?;
                let chan = crate::de::ChannelModel::from_p(thr.threshold_p)?;
                sched.weights = crate::de::optimize_weights_padded(
                    &params,
                    &chan,
                    &cfg.de,
                    &model,
                    2 * sched.sr_iterations,
                )?
                .weights;
            }
        }
    }
    let points = run_ber(
        &spec,
        &schedules,
        &cfg.ebn0_grid_db,
        &cfg.stop,
        cfg.master_seed,
        &cfg.options,
    )?;
    let csv = sim_points_to_csv(&points, &resolved.sha256);
    let manifest = RunManifest::new(
        params,
        schedules,
        cfg.ebn0_grid_db.clone(),
        cfg.stop.clone(),
        cfg.options,
        cfg.master_seed,
        resolved.sha256.clone(),
        points,
    );
    write_resolved(out_dir, resolved)?;
    write_output(out_dir, "sim.csv", &csv)?;
    write_output(out_dir, "manifest.json", &manifest.to_json()?)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// floor
// ---------------------------------------------------------------------------

/// Config for stall-pattern error-floor estimates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FloorConfig {
    pub v: u32,
    pub t: u32,
    pub s: u32,
    /// Pre-FEC error rates to evaluate; empty selects a log-spaced grid
    /// over [threshold/2, threshold] from the iBDD DE threshold.
    pub p_grid: Vec<f64>,
    /// Number of auto-grid points.
    pub points: usize,
    pub de: DeConfig,
    pub transfer: ModelChoice,
}

impl Default for FloorConfig {
    fn default() -> Self {
        FloorConfig {
            v: 9,
            t: 3,
            s: 0,
            p_grid: Vec::new(),
            points: 25,
            de: DeConfig::default(),
            transfer: ModelChoice::default(),
        }
    }
}

pub fn run_floor(resolved: &Resolved<FloorConfig>, out_dir: &Path) -> Result<()> {
    let cfg = &resolved.config;
    let params = CodeParams::new(cfg.v, cfg.t, cfg.s);
    params.validate()?;
    let p_grid = if cfg.p_grid.is_empty() {
        if cfg.points < 2 {
            return Err(invalid("points must be >= 2 for the automatic grid"));
        }
        let model = cfg.transfer.instantiate(cfg.v, cfg.t)?;
        let thr = crate::de::de_ibdd_threshold(&params, &cfg.de, &model)?.threshold_p;
        let (lo, hi) = (thr / 2.0, thr);
        let step = (hi / lo).ln() / (cfg.points - 1) as f64;
        (0..cfg.points)
            .map(|i| lo * (step * i as f64).exp())
            .collect()
    } else {
        cfg.p_grid.clone()
    };
    let mut csv = format!(
        "# pcfec-floor/v1 config_sha256={}\np,stall_floor\n",
        resolved.sha256
    );
    for &p in &p_grid {
        let floor = stall_floor(&params, p)?;
        csv.push_str(&format!("{p},{floor}\n"));
    }
    write_resolved(out_dir, resolved)?;
    write_output(out_dir, "floor.csv", &csv)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// reach
// ---------------------------------------------------------------------------

/// Config for GN-model reach queries.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReachConfig {
    pub link: LinkSpec,
    /// Compute the farthest link meeting this SNR (dB).
    pub required_snr_db: Option<f64>,
    /// Convert this SNR-threshold improvement (dB) into reach gain.
    pub delta_snr_db: Option<f64>,
    /// Baseline link length for the gain conversion (km).
    pub baseline_km: Option<f64>,
    pub rounding: SpanRounding,
}

impl Default for ReachConfig {
    fn default() -> Self {
        ReachConfig {
            link: LinkSpec::default(),
            required_snr_db: None,
            delta_snr_db: None,
            baseline_km: None,
            rounding: SpanRounding::Nearest,
        }
    }
}

pub fn run_reach(resolved: &Resolved<ReachConfig>, out_dir: &Path) -> Result<()> {
    let cfg = &resolved.config;
    let reach_result: Option<ReachResult> = cfg
        .required_snr_db
        .map(|snr| reach(snr, &cfg.link))
        .transpose()?;
    let gain: Option<ReachGain> = match (cfg.delta_snr_db, cfg.baseline_km) {
        (Some(delta), Some(baseline)) => {
            Some(reach_gain_with(delta, baseline, &cfg.link, cfg.rounding)?)
        }
        (Some(_), None) | (None, Some(_)) => {
            return Err(invalid(
                "reach gain needs both delta_snr_db and baseline_km",
            ));
        }
        (None, None) => None,
    };
    if reach_result.is_none() && gain.is_none() {
        return Err(invalid(
            "nothing to compute: set required_snr_db and/or delta_snr_db with baseline_km",
        ));
    }
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "format": "pcfec-reach/v1",
        "config_sha256": resolved.sha256,
        "reach": reach_result,
        "gain": gain,
    }))?;
    write_resolved(out_dir, resolved)?;
    write_output(out_dir, "reach.json", &json)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// transfer-estimate
// ---------------------------------------------------------------------------

/// Config for Monte Carlo miscorrection-table estimation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferEstimateConfig {
    pub v: u32,
    pub t: u32,
    pub s: u32,
    /// Channel error rates to tabulate; empty selects the default grid.
    pub x_grid: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

impl Default for TransferEstimateConfig {
    fn default() -> Self {
        TransferEstimateConfig {
            v: 8,
            t: 3,
            s: 0,
            x_grid: Vec::new(),
            trials: 50_000,
            seed: 1,
        }
    }
}

pub fn run_transfer_estimate(
    resolved: &Resolved<TransferEstimateConfig>,
    out_dir: &Path,
) -> Result<()> {
    let cfg = &resolved.config;
    let params = CodeParams::new(cfg.v, cfg.t, cfg.s);
    params.validate()?;
    let x_grid = if cfg.x_grid.is_empty() {
        default_x_grid(cfg.v)
    } else {
        cfg.x_grid.clone()
    };
    let model = crate::transfer::mc_transfer_estimate(&params, &x_grid, cfg.trials, cfg.seed)?;
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "format": "pcfec-transfer/v1",
        "config_sha256": resolved.sha256,
        "transfer": model,
    }))?;
    write_resolved(out_dir, resolved)?;
    write_output(out_dir, "transfer.json", &json)?;
    Ok(())
}
