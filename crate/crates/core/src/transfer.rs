//! Component-decoder error-transfer models.
//!
//! Density evolution needs to know how a bounded-distance component decode
//! splits between success, failure, and miscorrection as a function of the
//! input bit-error probability, and how a miscorrection disturbs
//! individual positions. Three models are provided:
//!
//! * **Ideal** — miscorrection-free: every non-success is a failure.
//! * **MC-estimated** — tables measured by Monte Carlo decoding of random
//!   error patterns ([`mc_transfer_estimate`]), the empirical reference.
//! * **Analytic-WE** — tables derived from a binomial weight-enumerator
//!   approximation of the component code ([`we_approx`]): the expected
//!   number of codewords capturing a weight-j error pattern bounds the
//!   miscorrection probability, and the capture geometry fixes how many
//!   positions are wrongly flipped versus wrongly left.
//!
//! Both table variants share one serialized layout ([`McTables`]) so runs
//! are reproducible without re-estimating.

use rayon::prelude::*;

use crate::bch::{BddOutcome, CodeParams, ComponentCode};
use crate::de::{binom_cdf, binom_pmf_ln, ln_choose};
use crate::rng::{hash_parts, CounterRng};
use crate::{invalid, Result};

/// Version tag for serialized transfer tables.
pub const MC_TABLES_VERSION: &str = "mc-tables/v1";

/// Gridded component-transfer statistics over input bit-error rates.
///
/// At every grid point `p_succ + p_fail + p_mc = 1` exactly. The two
/// fraction columns are per-position probabilities conditioned on a
/// miscorrection: the chance the reference position is wrongly flipped
/// (was correct, decoder inverted it) or wrongly left (was an error the
/// decoder kept).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct McTables {
    pub version: String,
    /// "mc-estimated" or "analytic-we".
    pub variant: String,
    pub v: u32,
    pub t: u32,
    /// RNG seed (0 for analytic tables).
    pub seed: u64,
    /// Monte Carlo trials per grid point (0 for analytic tables).
    pub trials_per_point: u64,
    pub x_grid: Vec<f64>,
    pub p_succ: Vec<f64>,
    pub p_fail: Vec<f64>,
    pub p_mc: Vec<f64>,
    pub mc_wrong_flip_frac: Vec<f64>,
    pub mc_wrong_left_frac: Vec<f64>,
}

impl McTables {
    pub fn validate(&self) -> Result<()> {
        if self.version != MC_TABLES_VERSION {
            return Err(invalid(format!(
                "unsupported tables version {:?}, expected {MC_TABLES_VERSION:?}",
                self.version
            )));
        }
        let n = self.x_grid.len();
        if n == 0 {
            return Err(invalid("tables need a nonempty grid"));
        }
        for col in [
            &self.p_succ,
            &self.p_fail,
            &self.p_mc,
            &self.mc_wrong_flip_frac,
            &self.mc_wrong_left_frac,
        ] {
            if col.len() != n {
                return Err(invalid("table column lengths disagree with the grid"));
            }
            if col.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                return Err(invalid("table entries must lie in [0, 1]"));
            }
        }
        if self.x_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("x_grid must be strictly ascending"));
        }
        if self.x_grid.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(invalid("x_grid values must lie in [0, 1]"));
        }
        for i in 0..n {
            let sum = self.p_succ[i] + self.p_fail[i] + self.p_mc[i];
            if (sum - 1.0).abs() > 1e-9 {
                return Err(invalid(format!(
                    "rates at grid point {i} sum to {sum}, not 1"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let tables: McTables = serde_json::from_str(s)?;
        tables.validate()?;
        Ok(tables)
    }

    /// Index of the grid segment containing x and the interpolation
    /// fraction within it, clamped at both ends.
    fn locate(&self, x: f64) -> (usize, f64) {
        let g = &self.x_grid;
        if x <= g[0] {
            return (0, 0.0);
        }
        if x >= g[g.len() - 1] {
            return (g.len() - 1, 0.0);
        }
        let i = g.partition_point(|&gx| gx <= x) - 1;
        let frac = (x - g[i]) / (g[i + 1] - g[i]);
        (i, frac)
    }

    /// (rho, flip, left) at input BER x: rho = P(mc | decode not
    /// successful) and the per-position disturbance fractions, linearly
    /// interpolated node-wise with edge clamping.
    fn mc_split(&self, x: f64) -> (f64, f64, f64) {
        let node = |i: usize| -> (f64, f64, f64) {
            let non_succ = self.p_fail[i] + self.p_mc[i];
            let rho = if non_succ > 0.0 {
                self.p_mc[i] / non_succ
            } else {
                0.0
            };
            (rho, self.mc_wrong_flip_frac[i], self.mc_wrong_left_frac[i])
        };
        let (i, frac) = self.locate(x);
        if frac == 0.0 {
            return node(i);
        }
        let a = node(i);
        let b = node(i + 1);
        (
            a.0 + frac * (b.0 - a.0),
            a.1 + frac * (b.1 - a.1),
            a.2 + frac * (b.2 - a.2),
        )
    }
}

/// How the DE treats component-decoder miscorrections.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum TransferModel {
    /// Miscorrection-free: every non-success is a pass-through failure.
    Ideal,
    /// Tables measured by Monte Carlo ([`mc_transfer_estimate`]).
    McEstimated { tables: McTables },
    /// Tables derived from the weight-enumerator approximation.
    AnalyticWe { tables: McTables },
}

impl TransferModel {
    pub fn ideal() -> Self {
        TransferModel::Ideal
    }

    pub fn name(&self) -> &'static str {
        match self {
            TransferModel::Ideal => "ideal",
            TransferModel::McEstimated { .. } => "mc-estimated",
            TransferModel::AnalyticWe { .. } => "analytic-we",
        }
    }

    pub fn tables(&self) -> Option<&McTables> {
        match self {
            TransferModel::Ideal => None,
            TransferModel::McEstimated { tables } | TransferModel::AnalyticWe { tables } => {
                Some(tables)
            }
        }
    }

    /// (rho, flip, left) at input BER x; see [`McTables::mc_split`].
    pub(crate) fn mc_split(&self, x: f64) -> (f64, f64, f64) {
        match self {
            TransferModel::Ideal => (0.0, 0.0, 0.0),
            TransferModel::McEstimated { tables } | TransferModel::AnalyticWe { tables } => {
                tables.mc_split(x)
            }
        }
    }

    /// Builds the analytic weight-enumerator transfer for the mother code
    /// of the given (v, t) over an ascending input-BER grid.
    pub fn analytic_we(v: u32, t: u32, x_grid: &[f64]) -> Result<Self> {
        let tables = analytic_tables(v, t, x_grid)?;
        Ok(TransferModel::AnalyticWe { tables })
    }
}

/// Default input-BER grid for transfer tables of a (v, t) mother code:
/// log-spaced from below one expected error per word up to well above
/// any decoding threshold.
pub fn default_x_grid(v: u32) -> Vec<f64> {
    let n = ((1u64 << v) - 1) as f64;
    let lo = (0.3 / n).ln();
    let hi = 0.06f64.ln();
    let points = 25;
    (0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Binomial weight-enumerator approximation for the (v, t) mother code:
/// A_0 = 1, A_w = 0 below the design distance 2t + 1, and
/// A_w ≈ C(mother_n, w) / 2^(parity bits) at and above it, the expected
/// multiplicity if parity checks struck words uniformly.
pub fn we_approx(v: u32, t: u32, mother_n: usize, w: usize) -> f64 {
    if w > mother_n {
        return 0.0;
    }
    ln_we_terms(v, t, mother_n)
        .map(|lnas| lnas[w].exp())
        .unwrap_or(0.0)
}

/// ln A_w for all w under the binomial approximation; None if the code
/// parameters are invalid.
fn ln_we_terms(v: u32, t: u32, mother_n: usize) -> Option<Vec<f64>> {
    let code = ComponentCode::new(CodeParams::new(v, t, 0)).ok()?;
    if code.n() != mother_n {
        return None;
    }
    let parity = (code.n() - code.k()) as f64;
    let d_min = 2 * t as usize + 1;
    let mut lnas = vec![f64::NEG_INFINITY; mother_n + 1];
    lnas[0] = 0.0;
    for (w, lna) in lnas.iter_mut().enumerate().skip(d_min) {
        *lna = ln_choose(mother_n, w) - parity * std::f64::consts::LN_2;
    }
    Some(lnas)
}

/// Derives transfer tables for the (v, t) mother code from the
/// weight-enumerator approximation. For a weight-j error pattern the
/// expected number of codewords within distance t is
/// m_j = sum over (w, e) of A_w * C(w, a) * C(n-w, b) / C(n, j) with
/// a = (w - j + e)/2 and b = e - a; P(mc | j) = min(1, m_j). A capture at
/// (w, e) wrongly flips a positions and wrongly leaves (j + w - e)/2.
fn analytic_tables(v: u32, t: u32, x_grid: &[f64]) -> Result<McTables> {
    if x_grid.is_empty() {
        return Err(invalid("x_grid must be nonempty"));
    }
    if x_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("x_grid must be strictly ascending"));
    }
    let params = CodeParams::new(v, t, 0);
    params.validate()?;
    let n = params.mother_n();
    let lnas =
        ln_we_terms(v, t, n).ok_or_else(|| invalid("weight enumerator unavailable"))?;
    let tu = t as usize;
    let d_min = 2 * tu + 1;

    // Per-j capture statistics are x-independent: precompute m_j and the
    // expected flipped/left counts per capture for the j range the grid
    // can reach with non-negligible probability.
    let x_max = x_grid[x_grid.len() - 1];
    let mean_max = n as f64 * x_max;
    let j_cap = (mean_max + 12.0 * mean_max.sqrt().max(3.0)).ceil() as usize + tu + 1;
    let j_cap = j_cap.min(n);
    let mut m_of_j = vec![0.0f64; j_cap + 1];
    let mut flips_of_j = vec![0.0f64; j_cap + 1];
    let mut lefts_of_j = vec![0.0f64; j_cap + 1];
    for j in (tu + 1)..=j_cap {
        let ln_cnj = ln_choose(n, j);
        let w_lo = j.saturating_sub(tu).max(d_min);
        let w_hi = (j + tu).min(n);
        let mut m = 0.0f64;
        let mut flips = 0.0f64;
        let mut lefts = 0.0f64;
        for w in w_lo..=w_hi {
            let lna = lnas[w];
            if lna == f64::NEG_INFINITY {
                continue;
            }
            let e_lo = j.abs_diff(w);
            for e in e_lo..=tu {
                if (w + e).wrapping_sub(j) % 2 != 0 {
                    continue;
                }
                let a = (w + e - j) / 2; // wrongly flipped positions
                let b = e - a;
                if a > w || b > n - w {
                    continue;
                }
                let cnt = (lna + ln_choose(w, a) + ln_choose(n - w, b) - ln_cnj).exp();
                m += cnt;
                flips += cnt * a as f64;
                lefts += cnt * ((j + w - e) / 2) as f64;
            }
        }
        m_of_j[j] = m;
        flips_of_j[j] = flips;
        lefts_of_j[j] = lefts;
    }

    let mut tables = McTables {
        version: MC_TABLES_VERSION.to_string(),
        variant: "analytic-we".to_string(),
        v,
        t,
        seed: 0,
        trials_per_point: 0,
        x_grid: x_grid.to_vec(),
        p_succ: Vec::new(),
        p_fail: Vec::new(),
        p_mc: Vec::new(),
        mc_wrong_flip_frac: Vec::new(),
        mc_wrong_left_frac: Vec::new(),
    };
    for &x in x_grid {
        if !(0.0..=1.0).contains(&x) {
            return Err(invalid("grid probabilities must lie in [0, 1]"));
        }
        let p_succ = binom_cdf(n, tu, x);
        let mut p_mc = 0.0f64;
        let mut flip_acc = 0.0f64;
        let mut left_acc = 0.0f64;
        for j in (tu + 1)..=j_cap {
            let pmf = binom_pmf_ln(n, j, x).exp();
            if pmf == 0.0 {
                continue;
            }
            let m = m_of_j[j];
            if m <= 0.0 {
                continue;
            }
            let pmc_j = m.min(1.0);
            // Expected disturbance per capturing codeword, per position.
            let flip_j = flips_of_j[j] / (m * n as f64);
            let left_j = lefts_of_j[j] / (m * n as f64);
            p_mc += pmf * pmc_j;
            flip_acc += pmf * pmc_j * flip_j;
            left_acc += pmf * pmc_j * left_j;
        }
        let p_mc = p_mc.min(1.0 - p_succ);
        tables.p_succ.push(p_succ);
        tables.p_fail.push(1.0 - p_succ - p_mc);
        tables.p_mc.push(p_mc);
        let (flip, left) = if p_mc > 0.0 {
            ((flip_acc / p_mc).min(1.0), (left_acc / p_mc).min(1.0))
        } else {
            (0.0, 0.0)
        };
        tables.mc_wrong_flip_frac.push(flip);
        tables.mc_wrong_left_frac.push(left);
    }
    tables.validate()?;
    Ok(tables)
}

/// Monte Carlo estimate of the component transfer statistics.
///
/// For each grid BER x, error patterns with i.i.d. bit flips at rate x
/// are applied to random codewords and decoded; success (decoded equals
/// transmitted), failure, and miscorrection rates are tallied, plus the
/// average fractions of positions a miscorrection wrongly flips and
/// wrongly leaves. Deterministic given the seed: trials are partitioned
/// into fixed-size chunks with per-chunk derived RNG streams and reduced
/// in chunk order, so results are independent of the worker count.
pub fn mc_transfer_estimate(
    params: &CodeParams,
    x_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<TransferModel> {
    params.validate()?;
    if trials < 10_000 {
        return Err(invalid(format!(
            "need at least 10000 trials per grid point, got {trials}"
        )));
    }
    if x_grid.is_empty() {
        return Err(invalid("x_grid must be nonempty"));
    }
    if x_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("x_grid must be strictly ascending"));
    }
    if x_grid.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(invalid("grid probabilities must lie in [0, 1]"));
    }
    let code = ComponentCode::new(*params)?;
    let n = code.n();
    let k = code.k();
    const CHUNK: u64 = 512;

    let mut tables = McTables {
        version: MC_TABLES_VERSION.to_string(),
        variant: "mc-estimated".to_string(),
        v: params.v,
        t: params.t,
        seed,
        trials_per_point: trials,
        x_grid: x_grid.to_vec(),
        p_succ: Vec::new(),
        p_fail: Vec::new(),
        p_mc: Vec::new(),
        mc_wrong_flip_frac: Vec::new(),
        mc_wrong_left_frac: Vec::new(),
    };

    #[derive(Default, Clone, Copy)]
    struct Tally {
        succ: u64,
        fail: u64,
        mc: u64,
        flip_frac_sum: f64,
        left_frac_sum: f64,
    }

    for (gi, &x) in x_grid.iter().enumerate() {
        let n_chunks = trials.div_ceil(CHUNK);
        let chunk_tallies: Vec<Tally> = (0..n_chunks)
            .into_par_iter()
            .map(|ci| {
                let mut rng = CounterRng::new(hash_parts(&[seed, gi as u64, ci]));
                let mut tally = Tally::default();
                // Fresh random codeword per chunk.
                let mut msg = vec![0u8; k];
                for b in msg.iter_mut() {
                    *b = (rng.next_u64() & 1) as u8;
                }
                let cw = code.encode(&msg).expect("message length matches k");
                let mut word = vec![0u8; n];
                let chunk_trials = CHUNK.min(trials - ci * CHUNK);
                for _ in 0..chunk_trials {
                    word.copy_from_slice(&cw);
                    for b in word.iter_mut() {
                        if rng.next_bool(x) {
                            *b ^= 1;
                        }
                    }
                    match code.bdd_decode(&word).expect("word length matches n") {
                        BddOutcome::Failure => tally.fail += 1,
                        BddOutcome::Decoded(out) => {
                            if out == cw {
                                tally.succ += 1;
                            } else {
                                tally.mc += 1;
                                let mut flipped_wrong = 0usize;
                                let mut left_wrong = 0usize;
                                for i in 0..n {
                                    if out[i] != cw[i] {
                                        if word[i] == cw[i] {
                                            flipped_wrong += 1;
                                        } else {
                                            left_wrong += 1;
                                        }
                                    }
                                }
                                tally.flip_frac_sum += flipped_wrong as f64 / n as f64;
                                tally.left_frac_sum += left_wrong as f64 / n as f64;
                            }
                        }
                    }
                }
                tally
            })
            .collect();
        // Sequential in-order reduction keeps f64 sums worker-independent.
        let mut total = Tally::default();
        for t in chunk_tallies {
            total.succ += t.succ;
            total.fail += t.fail;
            total.mc += t.mc;
            total.flip_frac_sum += t.flip_frac_sum;
            total.left_frac_sum += t.left_frac_sum;
        }
        let tf = trials as f64;
        tables.p_succ.push(total.succ as f64 / tf);
        tables.p_fail.push(total.fail as f64 / tf);
        tables.p_mc.push(total.mc as f64 / tf);
        let (flip, left) = if total.mc > 0 {
            (
                total.flip_frac_sum / total.mc as f64,
                total.left_frac_sum / total.mc as f64,
            )
        } else {
            (0.0, 0.0)
        };
        tables.mc_wrong_flip_frac.push(flip);
        tables.mc_wrong_left_frac.push(left);
    }
    tables.validate()?;
    Ok(TransferModel::McEstimated { tables })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn we_approx_anchors() {
        assert_eq!(we_approx(4, 3, 15, 0), 1.0);
        for w in 1..7 {
            assert_eq!(we_approx(4, 3, 15, w), 0.0, "w={w}");
        }
        assert!(we_approx(4, 3, 15, 7) > 0.0);
        assert_eq!(we_approx(4, 3, 15, 16), 0.0);
    }

    #[test]
    fn we_approx_total_is_within_factor_two_of_exhaustive_count() {
        // The (15, 5) component code has exactly 2^5 = 32 codewords;
        // verify by enumerating all messages, then compare the summed
        // approximation.
        let code = ComponentCode::new(CodeParams::new(4, 3, 0)).unwrap();
        let mut exact = std::collections::HashSet::new();
        for m in 0u32..32 {
            let msg: Vec<u8> = (0..5).map(|i| ((m >> i) & 1) as u8).collect();
            exact.insert(code.encode(&msg).unwrap());
        }
        assert_eq!(exact.len(), 32);
        let approx: f64 = (0..=15).map(|w| we_approx(4, 3, 15, w)).sum();
        let ratio = 32.0 / approx;
        assert!(
            (0.5..=2.0).contains(&ratio),
            "approx total {approx}, ratio {ratio}"
        );
    }

    #[test]
    fn analytic_tables_satisfy_rate_partition() {
        let model = TransferModel::analytic_we(9, 3, &default_x_grid(9)).unwrap();
        let tables = model.tables().unwrap();
        for i in 0..tables.x_grid.len() {
            let sum = tables.p_succ[i] + tables.p_fail[i] + tables.p_mc[i];
            assert!((sum - 1.0).abs() < 1e-12);
        }
        // Success melts away as x grows; miscorrection stays a minority.
        assert!(tables.p_succ[0] > 0.99);
        let last = tables.x_grid.len() - 1;
        assert!(tables.p_succ[last] < 0.01);
        for i in 0..tables.x_grid.len() {
            assert!(tables.p_mc[i] <= tables.p_fail[i] + 1e-12);
        }
    }

    #[test]
    fn mc_estimate_is_deterministic_and_chunked() {
        let params = CodeParams::new(4, 3, 0);
        let grid = [0.01, 0.05];
        let a = mc_transfer_estimate(&params, &grid, 10_000, 77).unwrap();
        let b = mc_transfer_estimate(&params, &grid, 10_000, 77).unwrap();
        assert_eq!(a, b);
        let c = mc_transfer_estimate(&params, &grid, 10_000, 78).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn mc_estimate_matches_exhaustive_oracle_on_toy_code() {
        // For the (15, 5) code, enumerate every error pattern of weight
        // 4, 5, 6 to get exact conditional miscorrection rates, combine
        // them with binomial weights at x = 0.02 (patterns of weight >= 7
        // carry ~1e-9 of the mass), and check the Monte Carlo table
        // agrees within three binomial standard errors.
        let params = CodeParams::new(4, 3, 0);
        let code = ComponentCode::new(params).unwrap();
        let n = code.n();
        let x = 0.02f64;
        fn next_combination(pattern: &mut [usize], n: usize) -> bool {
            let j = pattern.len();
            let mut i = j;
            while i > 0 {
                i -= 1;
                if pattern[i] < n - j + i {
                    pattern[i] += 1;
                    for l in i + 1..j {
                        pattern[l] = pattern[l - 1] + 1;
                    }
                    return true;
                }
            }
            false
        }
        let mut predicted_mc = 0.0f64;
        for j in 4..=6usize {
            let mut mc = 0u64;
            let mut total = 0u64;
            let mut pattern: Vec<usize> = (0..j).collect();
            loop {
                let mut word = vec![0u8; n];
                for &pos in &pattern {
                    word[pos] = 1;
                }
                total += 1;
                if let BddOutcome::Decoded(out) = code.bdd_decode(&word).unwrap() {
                    if out.iter().any(|&b| b != 0) {
                        mc += 1;
                    }
                }
                if !next_combination(&mut pattern, n) {
                    break;
                }
            }
            if j == 4 {
                // Weight-4 patterns are captured exactly by the 525
                // supports inside the 15 weight-7 codewords.
                assert_eq!(total, 1365);
                assert_eq!(mc, 525);
            }
            let pmf = binom_pmf_ln(n, j, x).exp();
            predicted_mc += pmf * mc as f64 / total as f64;
        }
        let trials = 200_000u64;
        let model = mc_transfer_estimate(&params, &[x], trials, 0xfeed_beef).unwrap();
        let tables = model.tables().unwrap();
        let est = tables.p_mc[0];
        let se = (predicted_mc * (1.0 - predicted_mc) / trials as f64).sqrt();
        assert!(
            (est - predicted_mc).abs() < 3.0 * se + 1e-6,
            "estimated {est}, predicted {predicted_mc}, se {se}"
        );
        let sum = tables.p_succ[0] + tables.p_fail[0] + tables.p_mc[0];
        assert!((sum - 1.0).abs() < 1e-12);
        // Miscorrections on this toy code flip and leave roughly equal
        // small fractions; both must be nonzero where mc happens.
        assert!(tables.mc_wrong_flip_frac[0] > 0.0);
        assert!(tables.mc_wrong_left_frac[0] > 0.0);
    }

    #[test]
    fn tables_roundtrip_through_json() {
        let model = TransferModel::analytic_we(8, 3, &[0.002, 0.01, 0.03]).unwrap();
        let tables = model.tables().unwrap();
        let json = tables.to_json().unwrap();
        let back = McTables::from_json(&json).unwrap();
        assert_eq!(*tables, back);
        assert!(json.contains("mc-tables/v1"));
    }

    #[test]
    fn tables_validation_rejects_corruption() {
        let model = TransferModel::analytic_we(8, 3, &[0.002, 0.01, 0.03]).unwrap();
        let mut tables = model.tables().unwrap().clone();
        tables.p_succ[1] += 0.5;
        assert!(tables.validate().is_err());
        let mut tables2 = model.tables().unwrap().clone();
        tables2.x_grid.reverse();
        assert!(tables2.validate().is_err());
        let mut tables3 = model.tables().unwrap().clone();
        tables3.version = "mc-tables/v0".into();
        assert!(tables3.validate().is_err());
    }

    #[test]
    fn interpolation_clamps_and_blends() {
        let tables = McTables {
            version: MC_TABLES_VERSION.into(),
            variant: "mc-estimated".into(),
            v: 8,
            t: 3,
            seed: 1,
            trials_per_point: 10_000,
            x_grid: vec![0.01, 0.02],
            p_succ: vec![0.9, 0.5],
            p_fail: vec![0.08, 0.4],
            p_mc: vec![0.02, 0.1],
            mc_wrong_flip_frac: vec![0.010, 0.020],
            mc_wrong_left_frac: vec![0.005, 0.015],
        };
        tables.validate().unwrap();
        // Below/above the grid: clamp to end nodes.
        assert_eq!(tables.mc_split(0.001), tables.mc_split(0.01));
        assert_eq!(tables.mc_split(0.9), tables.mc_split(0.02));
        // Midpoint blends node-wise.
        let (rho, flip, left) = tables.mc_split(0.015);
        let rho_lo = 0.02 / 0.10;
        let rho_hi = 0.1 / 0.5;
        assert!((rho - 0.5 * (rho_lo + rho_hi)).abs() < 1e-12);
        assert!((flip - 0.015).abs() < 1e-12);
        assert!((left - 0.010).abs() < 1e-12);
    }
}
