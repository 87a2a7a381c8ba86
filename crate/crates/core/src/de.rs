//! Density evolution for product-code iterative decoding.
//!
//! DE tracks a scalar state x — the outbound error probability of the
//! component decoders — through the decoding iterations, always on the
//! non-shortened mother code of length 2^v - 1. The plain-iBDD recursion
//! is x' = p * T(x) where T is the component transfer function; the
//! scaled-reliability recursion additionally mixes Gaussian LLR tail
//! probabilities through the combining rule psi = B(w * mu + L).
//!
//! Thresholds are the largest pre-FEC error probability p whose DE
//! trajectory reaches the convergence target within the iteration budget,
//! located by bisection. Shortened codes inherit mother-code thresholds
//! through the average-error-count equivalence: a shortened component at
//! input BER x behaves like the mother component at x / gamma with
//! gamma = (2^v - 1) / (2^v - 1 - s), and thresholds scale by gamma
//! ([`shorten_adapt`]).

use std::sync::LazyLock;

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma;

use crate::bch::CodeParams;
use crate::transfer::TransferModel;
use crate::{invalid, no_convergence, Result};

/// Scalar DE state: the outbound error probability after a half-iteration.
pub type DeState = f64;

static STD_NORMAL: LazyLock<Normal> =
    LazyLock::new(|| Normal::new(0.0, 1.0).expect("unit normal"));

fn phi(x: f64) -> f64 {
    STD_NORMAL.cdf(x)
}

fn phi_inv(p: f64) -> f64 {
    STD_NORMAL.inverse_cdf(p)
}

#[inline]
fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Binary-input AWGN channel with unit-energy antipodal signaling.
///
/// Conditioned on a transmitted +1 (bit 0), the LLR L = 2y/sigma^2 is
/// Gaussian with mean mu_L = 2/sigma^2 and standard deviation 2/sigma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    sigma: f64,
}

impl ChannelModel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(invalid(format!("sigma must be positive, got {sigma}")));
        }
        Ok(ChannelModel { sigma })
    }

    /// Channel whose hard-decision error probability is `p`.
    pub fn from_p(p: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&p) || p == 0.0 {
            return Err(invalid(format!("p must lie in (0, 0.5), got {p}")));
        }
        ChannelModel::new(-1.0 / phi_inv(p))
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Pre-FEC hard-decision error probability Phi(-1/sigma).
    pub fn p(&self) -> f64 {
        phi(-1.0 / self.sigma)
    }

    /// LLR mean conditioned on transmitted +1.
    pub fn mu_l(&self) -> f64 {
        2.0 / (self.sigma * self.sigma)
    }

    /// LLR standard deviation conditioned on transmitted +1.
    pub fn sigma_l(&self) -> f64 {
        2.0 / self.sigma
    }

    /// P(L < a) conditioned on transmitted +1. The three cases the SR
    /// transfer needs are a = -w (correct verdict overruled), a = 0
    /// (which equals p), and a = +w (wrong verdict accepted).
    pub fn llr_tail(&self, a: f64) -> f64 {
        phi((a - self.mu_l()) / self.sigma_l())
    }
}

/// Knobs for DE runs and threshold bisection.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct DeConfig {
    /// Half-iteration budget per DE run.
    pub max_half_iters: usize,
    /// Residual error probability declaring a trajectory convergent.
    pub convergence_target: f64,
    /// Absolute bisection tolerance on p.
    pub bisection_tol: f64,
    /// Weight grid upper end as a multiple of mu_L.
    pub weight_grid_max_factor: f64,
    /// Number of grid steps (the grid has steps + 1 points from 0).
    pub weight_grid_steps: usize,
}

impl Default for DeConfig {
    fn default() -> Self {
        DeConfig {
            max_half_iters: 200,
            convergence_target: 1e-15,
            bisection_tol: 1e-6,
            weight_grid_max_factor: 3.0,
            weight_grid_steps: 150,
        }
    }
}

impl DeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_half_iters == 0 {
            return Err(invalid("max_half_iters must be positive"));
        }
        if !(self.convergence_target > 0.0 && self.convergence_target < 1.0) {
            return Err(invalid("convergence_target must lie in (0, 1)"));
        }
        if !(self.bisection_tol > 0.0 && self.bisection_tol < 0.5) {
            return Err(invalid("bisection_tol must lie in (0, 0.5)"));
        }
        if !(self.weight_grid_max_factor > 0.0) || self.weight_grid_steps == 0 {
            return Err(invalid("weight grid must be nonempty with positive span"));
        }
        Ok(())
    }

    /// Ascending weight grid 0 .. max_factor * mu_L for the given channel.
    pub fn weight_grid(&self, chan: &ChannelModel) -> Vec<f64> {
        let top = self.weight_grid_max_factor * chan.mu_l();
        (0..=self.weight_grid_steps)
            .map(|i| top * i as f64 / self.weight_grid_steps as f64)
            .collect()
    }
}

/// A DE threshold with the schedule that attains it.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ThresholdResult {
    pub params: CodeParams,
    pub kind: crate::product::DecoderKind,
    /// Largest certified-convergent pre-FEC error probability, already
    /// adapted to the shortened code.
    pub threshold_p: f64,
    /// AWGN sigma at the threshold (scaled-reliability decoder only).
    pub threshold_sigma: Option<f64>,
    /// Optimized weight per half-iteration (empty for plain iBDD).
    pub weights: Vec<f64>,
    /// Half-iterations the trajectory needs at the threshold.
    pub half_iterations: usize,
}

pub(crate) fn ln_choose(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma((n + 1) as f64) - ln_gamma((k + 1) as f64) - ln_gamma((n - k + 1) as f64)
}

pub(crate) fn binom_pmf_ln(n: usize, j: usize, x: f64) -> f64 {
    ln_choose(n, j) + (j as f64) * x.ln() + ((n - j) as f64) * (-x).ln_1p()
}

/// P[Bin(m, x) >= t], stable over the full range of x.
pub(crate) fn binom_sf(m: usize, t: usize, x: f64) -> f64 {
    if t == 0 {
        return 1.0;
    }
    if t > m || x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    if (m as f64) * x >= t as f64 {
        // The mode sits at or above t: the head is small, so the
        // complement loses no precision.
        let mut head = 0.0f64;
        for j in 0..t {
            head += binom_pmf_ln(m, j, x).exp();
        }
        return clamp01(1.0 - head);
    }
    // Mode below t: sum the tail directly; terms decrease monotonically.
    let mut term = binom_pmf_ln(m, t, x).exp();
    let ratio = x / (1.0 - x);
    let mut sum = term;
    let mut comp = 0.0f64; // Kahan compensation
    for j in t..m {
        term *= ((m - j) as f64) / ((j + 1) as f64) * ratio;
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        if term < sum * 1e-20 {
            break;
        }
    }
    clamp01(sum)
}

/// P[Bin(n, x) <= t].
pub(crate) fn binom_cdf(n: usize, t: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x >= 1.0 {
        return if t >= n { 1.0 } else { 0.0 };
    }
    let mut sum = 0.0f64;
    for j in 0..=t.min(n) {
        sum += binom_pmf_ln(n, j, x).exp();
    }
    clamp01(sum)
}

/// Miscorrection-free BDD transfer: the probability that a reference bit
/// sees at least t companion errors among the other n - 1 positions, so
/// bounded-distance decoding cannot guarantee correcting it.
pub fn f_bdd_ideal(n: usize, t: u32, x: f64) -> f64 {
    binom_sf(n - 1, t as usize, x)
}

/// Maps a mother-code error probability to the shortened code of the same
/// (v, t): p * (2^v - 1) / (2^v - 1 - s). Applies identically to input
/// and output BERs; s = 0 is the identity.
pub fn shorten_adapt(p: f64, v: u32, s: u32) -> Result<f64> {
    let mother = (1u64 << v) - 1;
    if (s as u64) >= mother {
        return Err(invalid(format!("s = {s} leaves no code length for v = {v}")));
    }
    let out = p * mother as f64 / (mother - s as u64) as f64;
    if out > 1.0 {
        return Err(invalid(format!(
            "shortening factor pushed probability out of range: {out}"
        )));
    }
    Ok(out)
}

/// One scaled-reliability half-iteration of the DE recursion.
///
/// P_succ(x) = P[Bin(n, x) <= t] is the component decode-success
/// probability. A successful decode emits the correct verdict for the
/// reference bit, which the combining rule overrules with probability
/// P(L < -w); a bounded-distance failure passes the channel decision
/// through (error probability p). Under miscorrection-aware models the
/// failure mass splits: a miscorrected component wrongly flips the
/// reference bit with the model's flip fraction (the combining rule then
/// errs with probability P(L < +w)), and leaves it on the channel
/// decision otherwise.
pub fn de_ibdd_sr_step(
    x: f64,
    w: f64,
    chan: &ChannelModel,
    n: usize,
    t: u32,
    model: &TransferModel,
) -> f64 {
    let x = clamp01(x);
    let p = chan.p();
    let p_succ = binom_cdf(n, t as usize, x);
    let (rho, flip, _left) = model.mc_split(x);
    let tail_neg = chan.llr_tail(-w);
    let tail_pos = chan.llr_tail(w);
    let mc_term = flip * tail_pos + (1.0 - flip) * p;
    clamp01(p_succ * tail_neg + (1.0 - p_succ) * ((1.0 - rho) * p + rho * mc_term))
}

/// One plain-iBDD half-iteration: x' = F(x) * ((1 - rho) p + rho e_mc),
/// where F is the miscorrection-free transfer and e_mc the per-position
/// error probability a miscorrection leaves behind (wrong flips plus
/// wrongly kept errors). The ideal model reduces to x' = p * F(x).
fn ibdd_step(x: f64, p: f64, mother_n: usize, t: u32, model: &TransferModel) -> f64 {
    let f = f_bdd_ideal(mother_n, t, x);
    let (rho, flip, left) = model.mc_split(x);
    let e_mc = (flip + left).min(1.0);
    clamp01(f * ((1.0 - rho) * p + rho * e_mc))
}

/// Runs the iBDD recursion at channel probability p on the mother code;
/// returns the half-iterations needed to reach the target, if reached.
fn de_run_ibdd(
    p: f64,
    mother_n: usize,
    t: u32,
    model: &TransferModel,
    cfg: &DeConfig,
) -> Option<usize> {
    let ideal = matches!(model, TransferModel::Ideal);
    let mut x = p;
    for i in 1..=cfg.max_half_iters {
        let nx = ibdd_step(x, p, mother_n, t, model);
        if nx <= cfg.convergence_target {
            return Some(i);
        }
        // The ideal transfer is monotone in x, so a non-decreasing step
        // certifies a fixed point above the target.
        if ideal && nx >= x {
            return None;
        }
        x = nx;
    }
    None
}

/// Finds (lo, hi) with converge(lo), !converge(hi), hi - lo <= tol.
fn bisect_p<F: Fn(f64) -> bool>(converge: F, tol: f64) -> Result<(f64, f64)> {
    let mut lo = 1e-4;
    if !converge(lo) {
        lo = 1e-6;
        if !converge(lo) {
            return Err(no_convergence(
                "DE does not converge even at p = 1e-6; no bisection bracket",
            ));
        }
    }
    let mut hi = (2.0 * lo).max(0.02);
    while converge(hi) {
        lo = hi;
        hi *= 1.6;
        if hi >= 0.5 {
            return Err(no_convergence(
                "DE converges all the way to p = 0.5; no upper bracket",
            ));
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if converge(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

fn gamma_factor(params: &CodeParams) -> f64 {
    let mother = params.mother_n() as f64;
    mother / (mother - params.s as f64)
}

/// Plain-iBDD DE threshold. Bisects on the mother code and converts the
/// result to the shortened code via [`shorten_adapt`].
pub fn de_ibdd_threshold(
    params: &CodeParams,
    cfg: &DeConfig,
    model: &TransferModel,
) -> Result<ThresholdResult> {
    params.validate()?;
    cfg.validate()?;
    let mother_n = params.mother_n();
    let t = params.t;
    let (lo, _hi) = bisect_p(
        |p| de_run_ibdd(p, mother_n, t, model, cfg).is_some(),
        cfg.bisection_tol,
    )?;
    let half_iterations =
        de_run_ibdd(lo, mother_n, t, model, cfg).expect("lo side of bracket converges");
    Ok(ThresholdResult {
        params: *params,
        kind: crate::product::DecoderKind::Ibdd,
        threshold_p: shorten_adapt(lo, params.v, params.s)?,
        threshold_sigma: None,
        weights: Vec::new(),
        half_iterations,
    })
}

/// A greedily optimized weight schedule with its DE trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSchedule {
    /// Chosen weight per half-iteration.
    pub weights: Vec<f64>,
    /// x before the first half-iteration (= p) and after each one;
    /// trajectory.len() == weights.len() + 1.
    pub trajectory: Vec<f64>,
    /// Whether x reached the convergence target.
    pub converged: bool,
}

/// Greedy SR weight optimization on the (possibly shortened) code at the
/// given channel. Shortening is handled by evaluating the mother-code
/// binomial statistics at x / gamma while LLR tails come from the real
/// channel. `fixed_len` forces the schedule to an exact half-iteration
/// count (optimization continues past convergence); `None` stops at the
/// target or the config budget.
fn sr_greedy(
    params: &CodeParams,
    chan: &ChannelModel,
    cfg: &DeConfig,
    model: &TransferModel,
    fixed_len: Option<usize>,
) -> WeightSchedule {
    let mother_n = params.mother_n();
    let t = params.t as usize;
    let gamma = gamma_factor(params);
    let p = chan.p();
    let grid = cfg.weight_grid(chan);
    let tails: Vec<(f64, f64)> = grid
        .iter()
        .map(|&w| (chan.llr_tail(-w), chan.llr_tail(w)))
        .collect();
    let len = fixed_len.unwrap_or(cfg.max_half_iters);
    let mut weights = Vec::with_capacity(len);
    let mut trajectory = Vec::with_capacity(len + 1);
    let mut x = p;
    trajectory.push(x);
    let mut converged = false;
    for _ in 0..len {
        let xm = (x / gamma).min(1.0);
        let p_succ = binom_cdf(mother_n, t, xm);
        let (rho, flip, _left) = model.mc_split(xm);
        let fail = 1.0 - p_succ;
        // x'(w) = p_succ * tail_neg(w) + base + fail * rho * flip * tail_pos(w)
        let base = fail * ((1.0 - rho) * p + rho * (1.0 - flip) * p);
        let mut best_val = f64::INFINITY;
        let mut best_w = grid[0];
        for (i, &w) in grid.iter().enumerate() {
            let val = p_succ * tails[i].0 + base + fail * rho * flip * tails[i].1;
            // Strict improvement keeps the smallest weight on exact ties.
            if val < best_val {
                best_val = val;
                best_w = w;
            }
        }
        x = clamp01(best_val);
        weights.push(best_w);
        trajectory.push(x);
        if x <= cfg.convergence_target {
            converged = true;
            if fixed_len.is_none() {
                break;
            }
        }
    }
    WeightSchedule {
        weights,
        trajectory,
        converged,
    }
}

/// Greedy per-half-iteration weight optimization: at each half-iteration
/// the weight minimizing the SR transfer output at the current state is
/// chosen from the config grid. Returns the schedule and trajectory;
/// stops at the convergence target or the half-iteration budget.
pub fn optimize_weights(
    params: &CodeParams,
    chan: &ChannelModel,
    cfg: &DeConfig,
    model: &TransferModel,
) -> Result<WeightSchedule> {
    params.validate()?;
    cfg.validate()?;
    Ok(sr_greedy(params, chan, cfg, model, None))
}

/// As [`optimize_weights`] but always returns exactly `half_iters`
/// weights, continuing the greedy choice past convergence — the form the
/// simulator needs for fixed decoder schedules.
pub fn optimize_weights_padded(
    params: &CodeParams,
    chan: &ChannelModel,
    cfg: &DeConfig,
    model: &TransferModel,
    half_iters: usize,
) -> Result<WeightSchedule> {
    params.validate()?;
    cfg.validate()?;
    Ok(sr_greedy(params, chan, cfg, model, Some(half_iters)))
}

/// Scaled-reliability DE threshold: bisects on the real-channel p,
/// rerunning the greedy weight optimization at every trial point. For
/// shortened codes the mother-code binomial statistics are evaluated at
/// the adapted probability x / gamma, so the reported threshold is
/// already in the shortened code's own scale.
pub fn de_ibdd_sr_threshold(
    params: &CodeParams,
    cfg: &DeConfig,
    model: &TransferModel,
) -> Result<ThresholdResult> {
    params.validate()?;
    cfg.validate()?;
    let converge = |p: f64| {
        let chan = ChannelModel::from_p(p).expect("bisection keeps p in (0, 0.5)");
        sr_greedy(params, &chan, cfg, model, None).converged
    };
    let (lo, _hi) = bisect_p(converge, cfg.bisection_tol)?;
    let chan = ChannelModel::from_p(lo)?;
    let sched = sr_greedy(params, &chan, cfg, model, None);
    Ok(ThresholdResult {
        params: *params,
        kind: crate::product::DecoderKind::IbddSr,
        threshold_p: lo,
        threshold_sigma: Some(chan.sigma()),
        weights: sched.weights.clone(),
        half_iterations: sched.weights.len(),
    })
}
