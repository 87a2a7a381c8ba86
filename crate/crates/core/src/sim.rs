//! BI-AWGN channel model and the seeded Monte Carlo BER harness.
//!
//! Frames are the unit of work: each frame encodes information bits,
//! transmits the codeword once, and hands the same channel realization to
//! every requested decoder (paired comparison, which sharpens small A/B
//! gaps). Every frame derives its own RNG stream from
//! `hash(master_seed, grid_index, frame_index)`, so results are
//! bit-identical regardless of how frames are scheduled across workers.
//!
//! Post-FEC BER counts information positions (k² per frame) by default,
//! matching post-FEC semantics of systematic codes; a whole-block option
//! exists for comparisons against density evolution. Pre-FEC BER always
//! counts all n² channel bits. CSV rows carry the spec'd columns plus a
//! trailing `pre_fec_ber` column as the alternative x-axis.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bch::CodeParams;
use crate::product::{
    hard_decision, ibdd_decode, ibdd_sr_decode, ideal_ibdd_decode, BitMatrix, DecoderKind,
    DecoderSchedule, LlrMatrix, ProductCodeSpec,
};
use crate::rng::{hash_parts, CounterRng};
use crate::{invalid, Result};

/// Frames processed between stop-rule checks; fixed so stopping decisions
/// are independent of worker count and timing.
const FRAME_BATCH: u64 = 256;

/// Antipodal transmit mapping: bit 0 sends +1, bit 1 sends −1.
#[inline]
pub fn map_bit(bit: u8) -> f64 {
    1.0 - 2.0 * f64::from(bit)
}

/// Noise standard deviation of the binary-input AWGN channel at a given
/// Eb/N0 (dB) and code rate: sigma = 1 / sqrt(2 * R * 10^(EbN0/10)).
pub fn ebn0_to_sigma(ebn0_db: f64, rate: f64) -> Result<f64> {
    if !ebn0_db.is_finite() {
        return Err(invalid("Eb/N0 must be finite"));
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(invalid("rate must lie in (0, 1]"));
    }
    Ok((2.0 * rate * 10f64.powf(ebn0_db / 10.0)).sqrt().recip())
}

/// Inverse of [`ebn0_to_sigma`]: the Eb/N0 (dB) at which a BI-AWGN channel
/// of the given rate has noise standard deviation `sigma`.
pub fn sigma_to_ebn0_db(sigma: f64, rate: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid("sigma must be positive and finite"));
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(invalid("rate must lie in (0, 1]"));
    }
    Ok(10.0 * (2.0 * rate * sigma * sigma).recip().log10())
}

/// Transmit a codeword over the BI-AWGN channel: y = map(c) + N(0, σ²)
/// i.i.d., reported as LLRs L = 2y/σ². Deterministic given the seed.
pub fn transmit(codeword: &BitMatrix, sigma: f64, seed: u64) -> Result<LlrMatrix> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(invalid("sigma must be positive and finite"));
    }
    let n = codeword.n();
    let mut rng = CounterRng::new(seed);
    let scale = 2.0 / (sigma * sigma);
    let mut llrs = Vec::with_capacity(n * n);
    for r in 0..n {
        for &b in codeword.row(r) {
            let y = map_bit(b) + sigma * rng.next_gaussian();
            llrs.push(scale * y);
        }
    }
    LlrMatrix::new(n, llrs)
}

/// When the accumulated evidence suffices to stop a grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StopRule {
    /// Keep simulating until every decoder has at least this many bit
    /// errors (0 disables the error target).
    pub min_bit_errors: u64,
    /// Hard frame budget per grid point.
    pub max_frames: u64,
    /// Optional wall-clock budget per grid point, checked between batches.
    /// Runs stopped by the clock are not reproducible across machines;
    /// leave unset wherever determinism matters.
    pub max_wall_seconds: Option<f64>,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_bit_errors: 100,
            max_frames: 10_000,
            max_wall_seconds: None,
        }
    }
}

impl StopRule {
    pub fn validate(&self) -> Result<()> {
        let finite_wall = self.max_wall_seconds.is_some_and(|w| w > 0.0);
        if self.max_frames == 0 && !finite_wall {
            return Err(invalid("stop rule needs max_frames or max_wall_seconds"));
        }
        if let Some(w) = self.max_wall_seconds {
            if !(w > 0.0) {
                return Err(invalid("max_wall_seconds must be positive"));
            }
        }
        Ok(())
    }
}

/// Frame-generation options.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SimOptions {
    /// Transmit the all-zero codeword instead of random information
    /// (statistically equivalent for these sign-symmetric decoders).
    pub all_zero_codeword: bool,
    /// Count post-FEC errors over all n² positions instead of the k²
    /// information positions.
    pub whole_block_ber: bool,
}

/// Per-decoder tallies of one simulated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderStats {
    pub decoder: DecoderKind,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// One simulated channel-quality point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPoint {
    pub ebn0_db: f64,
    pub sigma: f64,
    pub frames: u64,
    /// Post-FEC BER denominator contribution of one frame.
    pub bits_per_frame: u64,
    pub pre_fec_bit_errors: u64,
    pub pre_fec_ber: f64,
    pub decoders: Vec<DecoderStats>,
    pub master_seed: u64,
}

/// 95% Wilson score interval for x successes in n trials. Behaves like the
/// normal approximation at large counts and stays inside [0, 1] at the
/// edges (x = 0 gives [0, ~3.84/n], close to the rule of three).
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054f64; // Phi^-1(0.975)
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (
        ((center - half) / denom).max(0.0),
        ((center + half) / denom).min(1.0),
    )
}

#[derive(Clone)]
struct FrameTally {
    pre_fec: u64,
    per_decoder: Vec<u64>,
}

impl FrameTally {
    fn zero(decoders: usize) -> Self {
        FrameTally {
            pre_fec: 0,
            per_decoder: vec![0; decoders],
        }
    }

    fn add(mut self, other: &FrameTally) -> Self {
        self.pre_fec += other.pre_fec;
        for (a, b) in self.per_decoder.iter_mut().zip(&other.per_decoder) {
            *a += b;
        }
        self
    }
}

fn simulate_frame(
    spec: &ProductCodeSpec,
    schedules: &[DecoderSchedule],
    sigma: f64,
    frame_seed: u64,
    options: &SimOptions,
) -> Result<FrameTally> {
    let (n, k) = (spec.n(), spec.k());
    let mut rng = CounterRng::new(frame_seed);
    let codeword = if options.all_zero_codeword {
        BitMatrix::zero(n)
    } else {
        let mut info = BitMatrix::zero(k);
        for r in 0..k {
            for b in info.row_mut(r) {
                *b = u8::from(rng.next_bool(0.5));
            }
        }
        spec.encode(&info)?
    };
    // The channel stream is split off the frame stream so the codeword
    // draw cannot shift the noise realization.
    let llr = transmit(&codeword, sigma, hash_parts(&[frame_seed, 1]))?;
    let hard = hard_decision(&llr);

    let mut tally = FrameTally::zero(schedules.len());
    tally.pre_fec = hard.count_diff(&codeword) as u64;
    for (d, sched) in schedules.iter().enumerate() {
        let report = match sched.kind {
            DecoderKind::Ibdd => ibdd_decode(spec, &hard, sched.iterations)?,
            DecoderKind::IdealIbdd => {
                ideal_ibdd_decode(spec, &hard, &codeword, sched.iterations)?
            }
            DecoderKind::IbddSr => ibdd_sr_decode(spec, &llr, sched)?,
        };
        tally.per_decoder[d] = if options.whole_block_ber {
            report.bits.count_diff(&codeword) as u64
        } else {
            spec.info_block(&report.bits)
                .count_diff(&spec.info_block(&codeword)) as u64
        };
    }
    Ok(tally)
}

/// Simulate the BER of every schedule over an Eb/N0 grid with paired
/// channel realizations. Frame seeds derive from
/// `hash(master_seed, grid_index, frame_index)`; accumulation is a sum of
/// counters, so any frame scheduling yields identical results.
pub fn run_ber(
    spec: &ProductCodeSpec,
    schedules: &[DecoderSchedule],
    ebn0_grid: &[f64],
    stop: &StopRule,
    master_seed: u64,
    options: &SimOptions,
) -> Result<Vec<SimPoint>> {
    if schedules.is_empty() {
        return Err(invalid("at least one decoder schedule is required"));
    }
    for sched in schedules {
        sched.validate()?;
    }
    if ebn0_grid.is_empty() || ebn0_grid.iter().any(|e| !e.is_finite()) {
        return Err(invalid("Eb/N0 grid must be nonempty and finite"));
    }
    stop.validate()?;
    let rate = (spec.k() as f64 / spec.n() as f64).powi(2);
    let bits_per_frame = if options.whole_block_ber {
        (spec.n() * spec.n()) as u64
    } else {
        (spec.k() * spec.k()) as u64
    };
    let mut points = Vec::with_capacity(ebn0_grid.len());
    for (grid_idx, &ebn0_db) in ebn0_grid.iter().enumerate() {
        let sigma = ebn0_to_sigma(ebn0_db, rate)?;
        let started = std::time::Instant::now();
        let mut tally = FrameTally::zero(schedules.len());
        let mut frames = 0u64;
        loop {
            let enough_errors = stop.min_bit_errors > 0
                && frames > 0
                && tally
                    .per_decoder
                    .iter()
                    .all(|&e| e >= stop.min_bit_errors);
            let out_of_frames = stop.max_frames > 0 && frames >= stop.max_frames;
            let out_of_time = stop
                .max_wall_seconds
                .is_some_and(|w| started.elapsed().as_secs_f64() >= w);
            if enough_errors || out_of_frames || out_of_time {
                break;
            }
            let batch = if stop.max_frames > 0 {
                FRAME_BATCH.min(stop.max_frames - frames)
            } else {
                FRAME_BATCH
            };
            let batch_tally = (frames..frames + batch)
                .into_par_iter()
                .map(|frame_idx| {
                    let seed = hash_parts(&[master_seed, grid_idx as u64, frame_idx]);
                    simulate_frame(spec, schedules, sigma, seed, options)
                })
                .try_reduce(
                    || FrameTally::zero(schedules.len()),
                    |a, b| Ok(a.add(&b)),
                )?;
            tally = tally.add(&batch_tally);
            frames += batch;
        }
        let n2 = (spec.n() * spec.n()) as u64;
        let decoders = schedules
            .iter()
            .zip(&tally.per_decoder)
            .map(|(sched, &errors)| {
                let bits = frames * bits_per_frame;
                let (ci_low, ci_high) = wilson_interval(errors, bits);
                DecoderStats {
                    decoder: sched.kind,
                    bit_errors: errors,
                    ber: if bits == 0 { 0.0 } else { errors as f64 / bits as f64 },
                    ci_low,
                    ci_high,
                }
            })
            .collect();
        points.push(SimPoint {
            ebn0_db,
            sigma,
            frames,
            bits_per_frame,
            pre_fec_bit_errors: tally.pre_fec,
            pre_fec_ber: if frames == 0 {
                0.0
            } else {
                tally.pre_fec as f64 / (frames * n2) as f64
            },
            decoders,
            master_seed,
        });
    }
    Ok(points)
}

/// CSV schema version emitted in the header comment.
pub const SIM_CSV_VERSION: &str = "pcfec-sim/v1";

/// Render points as CSV: a version/config header comment, then one row per
/// (grid point, decoder).
pub fn sim_points_to_csv(points: &[SimPoint], config_sha256: &str) -> String {
    let mut out = format!("# {SIM_CSV_VERSION} config_sha256={config_sha256}\n");
    out.push_str("ebn0_db,sigma,decoder,frames,bit_errors,ber,ci_low,ci_high,seed,pre_fec_ber\n");
    for p in points {
        for d in &p.decoders {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                p.ebn0_db,
                p.sigma,
                d.decoder,
                p.frames,
                d.bit_errors,
                d.ber,
                d.ci_low,
                d.ci_high,
                p.master_seed,
                p.pre_fec_ber,
            ));
        }
    }
    out
}

/// Everything needed to reproduce and interpret a run, emitted as JSON
/// beside the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Manifest schema version.
    pub format: String,
    /// Pinned RNG algorithm; seeds only reproduce under this generator.
    pub rng: String,
    pub params: CodeParams,
    pub schedules: Vec<DecoderSchedule>,
    pub ebn0_grid: Vec<f64>,
    pub stop: StopRule,
    pub options: SimOptions,
    pub master_seed: u64,
    /// SHA-256 of the resolved run configuration.
    pub config_sha256: String,
    pub points: Vec<SimPoint>,
}

pub const MANIFEST_VERSION: &str = "pcfec-sim-manifest/v1";

impl RunManifest {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        params: CodeParams,
        schedules: Vec<DecoderSchedule>,
        ebn0_grid: Vec<f64>,
        stop: StopRule,
        options: SimOptions,
        master_seed: u64,
        config_sha256: String,
        points: Vec<SimPoint>,
    ) -> Self {
        RunManifest {
            format: MANIFEST_VERSION.to_string(),
            rng: CounterRng::ALGORITHM.to_string(),
            params,
            schedules,
            ebn0_grid,
            stop,
            options,
            master_seed,
            config_sha256,
            points,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(crate::Error::from)
    }
}
