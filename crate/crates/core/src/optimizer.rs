//! Parameter search over the (v, t, s) design space per target overhead,
//! and the stall-pattern error-floor estimate.
//!
//! For a target overhead the search picks, for every Galois order v and
//! correction capability t in the space, the shortening s whose realized
//! overhead lands nearest the target (exact rational arithmetic), drops
//! candidates whose best realizable overhead still misses the target by
//! more than a configurable slack, ranks the rest by decoding threshold,
//! and reports the winner plus runners-up.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use std::collections::HashMap;
use std::sync::Mutex;

use crate::bch::{CodeParams, ComponentCode};
use crate::de::{de_ibdd_sr_threshold, de_ibdd_threshold, ChannelModel, DeConfig};
use crate::product::DecoderKind;
use crate::sim::sigma_to_ebn0_db;
use crate::transfer::{default_x_grid, mc_transfer_estimate, TransferModel};
use crate::{invalid, Error, Result};

/// Galois orders searched per overhead target.
pub const SEARCH_GALOIS_ORDERS: [u32; 5] = [8, 9, 10, 11, 12];
/// Correction capabilities searched per overhead target.
pub const SEARCH_CORRECTION_CAPS: [u32; 2] = [3, 4];

/// A nominal overhead target 1/i for i in 3..=16, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OhTarget {
    inverse: u32,
}

impl OhTarget {
    pub fn new(inverse: u32) -> Result<Self> {
        if !(3..=16).contains(&inverse) {
            return Err(invalid(format!(
                "overhead target must be 1/i with i in 3..=16, got 1/{inverse}"
            )));
        }
        Ok(OhTarget { inverse })
    }

    /// Every target in the sweep, densest overhead first (1/3 .. 1/16).
    pub fn all() -> Vec<OhTarget> {
        (3..=16).map(|inverse| OhTarget { inverse }).collect()
    }

    pub fn inverse(&self) -> u32 {
        self.inverse
    }

    /// Human-readable label, e.g. "1/7".
    pub fn label(&self) -> String {
        format!("1/{}", self.inverse)
    }

    /// The target as a float (the exact ratio is 1/inverse).
    pub fn value(&self) -> f64 {
        1.0 / f64::from(self.inverse)
    }
}

/// Exact overhead ratio (n² − k²) / k², reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OhRatio {
    pub num: u64,
    pub den: u64,
}

impl OhRatio {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact overhead (n/k)² − 1 of the product code built from `params`,
/// using the component's realized dimension.
pub fn oh_of(params: &CodeParams) -> Result<OhRatio> {
    let code = ComponentCode::new(*params)?;
    let (n, k) = (code.n() as u64, code.k() as u64);
    if k < 2 {
        return Err(invalid("component dimension too small for a product code"));
    }
    let num = n * n - k * k;
    let den = k * k;
    let g = gcd(num, den).max(1);
    Ok(OhRatio {
        num: num / g,
        den: den / g,
    })
}

/// The shortening whose realized overhead lands nearest the target for the
/// (v, t) mother code, compared in exact rational arithmetic. On an exact
/// tie the larger overhead (larger s) wins. Always well-defined: when even
/// s = 0 overshoots the target (overhead grows with s), 0 is nearest.
pub fn s_for_oh(v: u32, t: u32, target: &OhTarget) -> Result<u32> {
    let mother = ComponentCode::new(CodeParams::new(v, t, 0))?;
    let (n0, k0) = (mother.mother_n() as i128, mother.k() as i128);
    let i = i128::from(target.inverse());
    let mut best_s = 0u32;
    // err(s) = |i(n² − k²) − k²| / (i k²); i cancels when cross-comparing.
    let mut best: Option<(i128, i128)> = None;
    let mut s = 0i128;
    while k0 - s >= 2 {
        let (n, k) = (n0 - s, k0 - s);
        let num = (i * (n * n - k * k) - k * k).abs();
        let den = k * k;
        // <= so an exact tie keeps the later (larger-overhead) candidate.
        if best.is_none_or(|(bn, bd)| num * bd <= bn * den) {
            best = Some((num, den));
            best_s = s as u32;
        }
        s += 1;
    }
    Ok(best_s)
}

/// Which miscorrection model threshold evaluations use. Transfer tables
/// belong to one mother code, so the choice is instantiated per (v, t) as
/// the search visits candidates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelChoice {
    /// Miscorrection-free analysis.
    Ideal,
    /// Tables from the binomial weight-enumerator approximation.
    AnalyticWe,
    /// Tables estimated by Monte Carlo component decoding.
    McEstimated { trials: u64, seed: u64 },
}

impl Default for ModelChoice {
    /// The analytic model is the default: miscorrection-blind analysis
    /// overrates t = 3 components at several overheads, while the
    /// weight-enumerator tables reproduce the full published parameter
    /// table for both decoders.
    fn default() -> Self {
        ModelChoice::AnalyticWe
    }
}

impl ModelChoice {
    /// Build the transfer model for one mother code.
    pub fn instantiate(&self, v: u32, t: u32) -> Result<TransferModel> {
        match *self {
            ModelChoice::Ideal => Ok(TransferModel::Ideal),
            ModelChoice::AnalyticWe => TransferModel::analytic_we(v, t, &default_x_grid(v)),
            ModelChoice::McEstimated { trials, seed } => {
                mc_transfer_estimate(&CodeParams::new(v, t, 0), &default_x_grid(v), trials, seed)
            }
        }
    }
}

/// Memo of instantiated models, shared across the targets of a report so
/// expensive Monte Carlo tables are built once per mother code.
#[derive(Default)]
struct ModelCache {
    map: Mutex<HashMap<(u32, u32), TransferModel>>,
}

impl ModelCache {
    fn get(&self, choice: &ModelChoice, v: u32, t: u32) -> Result<TransferModel> {
        if let Some(m) = self.map.lock().expect("cache lock").get(&(v, t)) {
            return Ok(m.clone());
        }
        // Built outside the lock; a racing duplicate is identical (the
        // estimators are deterministic), so insert-once keeps either.
        let model = choice.instantiate(v, t)?;
        Ok(self
            .map
            .lock()
            .expect("cache lock")
            .entry((v, t))
            .or_insert(model)
            .clone())
    }
}

/// Search and threshold-evaluation knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub de: DeConfig,
    /// Maximum relative deviation |realized − target| / target a candidate's
    /// overhead may have and still compete.
    pub admissibility_slack: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            de: DeConfig::default(),
            admissibility_slack: 0.085,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        self.de.validate()?;
        if !(0.0..1.0).contains(&self.admissibility_slack) {
            return Err(invalid("admissibility_slack must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// One evaluated candidate: the code and its decoding threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub params: CodeParams,
    pub n: usize,
    pub k: usize,
    /// Product-code block length n².
    pub n_c: u64,
    pub realized_oh: f64,
    pub threshold_p: f64,
    pub threshold_ebn0_db: f64,
    /// Scaling weights attaining the threshold (empty for plain decoders).
    pub weights: Vec<f64>,
}

/// The search outcome for one (target, decoder) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OhEntry {
    pub target_label: String,
    pub target_value: f64,
    pub decoder: DecoderKind,
    pub winner: Candidate,
    /// Admissible non-winners, best threshold first.
    pub runners_up: Vec<Candidate>,
}

/// Search outcomes across targets and decoders.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub entries: Vec<OhEntry>,
}

fn evaluate(
    params: CodeParams,
    realized_oh: f64,
    kind: DecoderKind,
    cfg: &OptimizerConfig,
    model: &TransferModel,
) -> Result<Candidate> {
    // `model` must already belong to this candidate's mother code.
    let code = ComponentCode::new(params)?;
    let (n, k) = (code.n(), code.k());
    let thr = match kind {
        DecoderKind::Ibdd => de_ibdd_threshold(&params, &cfg.de, model)?,
        // The genie decoder is the ideal transfer analysis by definition.
        DecoderKind::IdealIbdd => de_ibdd_threshold(&params, &cfg.de, &TransferModel::Ideal)?,
        DecoderKind::IbddSr => de_ibdd_sr_threshold(&params, &cfg.de, model)?,
    };
    let sigma = match thr.threshold_sigma {
        Some(s) => s,
        None => ChannelModel::from_p(thr.threshold_p)?.sigma(),
    };
    let rate = (k as f64 / n as f64).powi(2);
    Ok(Candidate {
        params,
        n,
        k,
        n_c: (n * n) as u64,
        realized_oh,
        threshold_p: thr.threshold_p,
        threshold_ebn0_db: sigma_to_ebn0_db(sigma, rate)?,
        weights: thr.weights,
    })
}

/// Evaluate one explicit code under one decoder: realized overhead plus
/// the DE threshold, in the same form the search reports candidates.
pub fn evaluate_candidate(
    params: &CodeParams,
    kind: DecoderKind,
    cfg: &OptimizerConfig,
    choice: &ModelChoice,
) -> Result<Candidate> {
    cfg.validate()?;
    let realized_oh = oh_of(params)?.value();
    let model = choice.instantiate(params.v, params.t)?;
    evaluate(*params, realized_oh, kind, cfg, &model)
}

/// Search the full (v, t) space for one target and decoder.
pub fn optimize(
    target: &OhTarget,
    kind: DecoderKind,
    cfg: &OptimizerConfig,
    choice: &ModelChoice,
) -> Result<OhEntry> {
    optimize_with_space(target, kind, cfg, choice, &ModelCache::default(), &full_space())
}

fn full_space() -> Vec<(u32, u32)> {
    SEARCH_CORRECTION_CAPS
        .iter()
        .flat_map(|&t| SEARCH_GALOIS_ORDERS.iter().map(move |&v| (v, t)))
        .collect()
}

fn optimize_with_space(
    target: &OhTarget,
    kind: DecoderKind,
    cfg: &OptimizerConfig,
    choice: &ModelChoice,
    models: &ModelCache,
    space: &[(u32, u32)],
) -> Result<OhEntry> {
    cfg.validate()?;
    let mut admissible = Vec::new();
    for &(v, t) in space {
        let s = s_for_oh(v, t, target)?;
        let params = CodeParams::new(v, t, s);
        let realized = oh_of(&params)?.value();
        if (realized - target.value()).abs() / target.value() <= cfg.admissibility_slack {
            admissible.push((params, realized));
        }
    }
    if admissible.is_empty() {
        return Err(invalid(format!(
            "no (v, t, s) in the search space realizes overhead {} within slack {}",
            target.label(),
            cfg.admissibility_slack
        )));
    }
    let mut candidates: Vec<Candidate> = admissible
        .par_iter()
        .map(|&(params, realized)| {
            let model = models.get(choice, params.v, params.t)?;
            evaluate(params, realized, kind, cfg, &model)
        })
        .collect::<Result<_>>()?;
    // Best threshold first; ties prefer cheaper hardware (smaller t, then
    // smaller v). The sort key is total, so candidate order cannot matter.
    candidates.sort_by(|a, b| {
        b.threshold_p
            .partial_cmp(&a.threshold_p)
            .expect("thresholds are finite")
            .then(a.params.t.cmp(&b.params.t))
            .then(a.params.v.cmp(&b.params.v))
    });
    let winner = candidates.remove(0);
    Ok(OhEntry {
        target_label: target.label(),
        target_value: target.value(),
        decoder: kind,
        winner,
        runners_up: candidates,
    })
}

/// Run [`optimize`] across many targets and decoder kinds, sharing
/// instantiated transfer models across the whole sweep.
pub fn full_report(
    targets: &[OhTarget],
    kinds: &[DecoderKind],
    cfg: &OptimizerConfig,
    choice: &ModelChoice,
) -> Result<OptimizationReport> {
    let models = ModelCache::default();
    let space = full_space();
    let mut entries = Vec::with_capacity(targets.len() * kinds.len());
    for target in targets {
        for &kind in kinds {
            entries.push(optimize_with_space(
                target, kind, cfg, choice, &models, &space,
            )?);
        }
    }
    Ok(OptimizationReport { entries })
}

impl OptimizationReport {
    pub const CSV_HEADER: &'static str =
        "oh_label,decoder,v,t,s,n,k,n_c,realized_oh,threshold_p,threshold_ebn0_db";

    /// Winners only, one row per (target, decoder).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for e in &self.entries {
            let w = &e.winner;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                e.target_label,
                e.decoder,
                w.params.v,
                w.params.t,
                w.params.s,
                w.n,
                w.k,
                w.n_c,
                w.realized_oh,
                w.threshold_p,
                w.threshold_ebn0_db,
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(Error::from)
    }
}

/// Bit-error-rate floor from minimal stall patterns: a (t+1)×(t+1) grid of
/// errors defeats bounded-distance decoding in every involved row and
/// column. The estimate is multiplicity C(n, t+1)² times pattern
/// probability p^((t+1)²), normalized per bit: ((t+1)²/n²) C(n,t+1)² p^((t+1)²).
/// Evaluated in log-space so deep floors (1e-40 and below) stay exact.
pub fn stall_floor(params: &CodeParams, p: f64) -> Result<f64> {
    params.validate()?;
    if !(0.0..1.0).contains(&p) {
        return Err(invalid("pre-FEC error rate must lie in [0, 1)"));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let n = params.n();
    let t1 = params.t as usize + 1;
    let ln = 2.0 * (t1 as f64).ln() - 2.0 * (n as f64).ln()
        + 2.0 * crate::de::ln_choose(n, t1)
        + (t1 * t1) as f64 * p.ln();
    Ok(ln.exp())
}
