//! Gaussian-noise model of a multi-span optical link, used to convert an
//! SNR-threshold improvement into transmission-reach gain.
//!
//! The link is a chain of identical fiber spans, each followed by an
//! amplifier that exactly compensates the span loss while adding ASE noise.
//! Nonlinear interference (NLI) is modeled as additive Gaussian noise whose
//! per-span power is eta * P^3 for launch power P (closed-form GN model for
//! Nyquist-spaced WDM). Accumulation over n spans is incoherent by default
//! (both noises scale with n); a coherence exponent epsilon scales NLI as
//! n^(1+epsilon) instead.
//!
//! At the optimal launch power P* = (P_ASE / (2 eta))^(1/3) the NLI equals
//! half the ASE, so the optimal SNR decays as n^-(1 + epsilon/3) and an SNR
//! margin of delta dB buys a factor 10^(delta / (10 (1 + epsilon/3))) in
//! span count.

use serde::{Deserialize, Serialize};

use crate::{invalid, Result};

/// Planck constant (J s).
const PLANCK: f64 = 6.62607015e-34;
/// Vacuum speed of light (m/s).
const LIGHT_SPEED: f64 = 299_792_458.0;

/// Physical description of one span and its WDM load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkSpec {
    /// Span length (km).
    pub span_km: f64,
    /// Number of Nyquist-spaced WDM channels.
    pub channels: u32,
    /// Per-channel symbol rate (GBaud).
    pub symbol_rate_gbaud: f64,
    /// Fiber power attenuation (dB/km).
    pub attenuation_db_per_km: f64,
    /// Chromatic dispersion (ps/(nm km)).
    pub dispersion_ps_nm_km: f64,
    /// Nonlinear coefficient (1/(W km)).
    pub nonlinear_per_w_km: f64,
    /// Amplifier noise figure (dB).
    pub noise_figure_db: f64,
    /// Center wavelength (nm).
    pub wavelength_nm: f64,
    /// NLI coherence exponent: 0 = incoherent span accumulation.
    pub coherence_epsilon: f64,
    /// Modulation label carried through to reports.
    pub modulation: String,
}

impl Default for LinkSpec {
    fn default() -> Self {
        LinkSpec {
            span_km: 80.0,
            channels: 81,
            symbol_rate_gbaud: 32.0,
            attenuation_db_per_km: 0.2,
            dispersion_ps_nm_km: 17.0,
            nonlinear_per_w_km: 1.3,
            noise_figure_db: 5.0,
            wavelength_nm: 1550.0,
            coherence_epsilon: 0.0,
            modulation: "QPSK".to_string(),
        }
    }
}

impl LinkSpec {
    pub fn validate(&self) -> Result<()> {
        let positives = [
            (self.span_km, "span_km"),
            (self.symbol_rate_gbaud, "symbol_rate_gbaud"),
            (self.attenuation_db_per_km, "attenuation_db_per_km"),
            (self.dispersion_ps_nm_km, "dispersion_ps_nm_km"),
            (self.nonlinear_per_w_km, "nonlinear_per_w_km"),
            (self.noise_figure_db, "noise_figure_db"),
            (self.wavelength_nm, "wavelength_nm"),
        ];
        for (value, name) in positives {
            if !(value > 0.0) || !value.is_finite() {
                return Err(invalid(format!("{name} must be positive and finite")));
            }
        }
        if self.channels == 0 {
            return Err(invalid("channels must be >= 1"));
        }
        if !self.coherence_epsilon.is_finite()
            || !(0.0..=1.0).contains(&self.coherence_epsilon)
        {
            return Err(invalid("coherence_epsilon must lie in [0, 1]"));
        }
        Ok(())
    }

    fn symbol_rate_hz(&self) -> f64 {
        self.symbol_rate_gbaud * 1e9
    }

    /// Power attenuation coefficient (1/m).
    fn alpha_per_m(&self) -> f64 {
        self.attenuation_db_per_km * std::f64::consts::LN_10 / 10.0 / 1e3
    }

    /// |beta2| group-velocity dispersion (s^2/m).
    fn beta2_abs(&self) -> f64 {
        let lambda_m = self.wavelength_nm * 1e-9;
        let d_si = self.dispersion_ps_nm_km * 1e-6; // s/m^2
        d_si * lambda_m * lambda_m / (2.0 * std::f64::consts::PI * LIGHT_SPEED)
    }

    /// Per-span ASE power in the matched (symbol-rate) bandwidth (W).
    pub fn ase_power_w(&self) -> f64 {
        let nf = 10f64.powf(self.noise_figure_db / 10.0);
        let gain = (self.alpha_per_m() * self.span_km * 1e3).exp();
        let photon = PLANCK * LIGHT_SPEED / (self.wavelength_nm * 1e-9);
        nf * photon * (gain - 1.0) * self.symbol_rate_hz()
    }

    /// Per-span NLI coefficient eta (1/W^2): P_NLI = eta * P^3.
    pub fn nli_eta(&self) -> f64 {
        let alpha = self.alpha_per_m();
        let span_m = self.span_km * 1e3;
        let l_eff = (1.0 - (-alpha * span_m).exp()) / alpha;
        let l_eff_a = 1.0 / alpha;
        let gamma = self.nonlinear_per_w_km * 1e-3;
        let beta2 = self.beta2_abs();
        let rs = self.symbol_rate_hz();
        let total_bw = f64::from(self.channels) * rs;
        let arg = 0.5 * std::f64::consts::PI.powi(2) * beta2 * l_eff_a * total_bw * total_bw;
        (8.0 / 27.0) * gamma * gamma * l_eff * l_eff * arg.asinh()
            / (std::f64::consts::PI * beta2 * l_eff_a * rs * rs)
    }

    /// Launch power maximizing the end-of-link SNR (W); independent of the
    /// span count when accumulation is incoherent.
    pub fn optimal_launch_w(&self, n_spans: u64) -> f64 {
        let n = n_spans as f64;
        (self.ase_power_w() / (2.0 * self.nli_eta())).cbrt()
            * n.powf(-self.coherence_epsilon / 3.0)
    }

    /// Linear SNR after `n_spans` at launch power `launch_w` per channel.
    pub fn snr_after(&self, n_spans: u64, launch_w: f64) -> Result<f64> {
        self.validate()?;
        if n_spans == 0 {
            return Err(invalid("n_spans must be >= 1"));
        }
        if !(launch_w > 0.0) || !launch_w.is_finite() {
            return Err(invalid("launch power must be positive and finite"));
        }
        let n = n_spans as f64;
        let ase = n * self.ase_power_w();
        let nli = n.powf(1.0 + self.coherence_epsilon) * self.nli_eta() * launch_w.powi(3);
        Ok(launch_w / (ase + nli))
    }

    /// Linear SNR after `n_spans` at the optimal launch power.
    pub fn optimal_snr(&self, n_spans: u64) -> Result<f64> {
        self.snr_after(n_spans, self.optimal_launch_w(n_spans))
    }

    /// Optimal SNR in dB.
    pub fn optimal_snr_db(&self, n_spans: u64) -> Result<f64> {
        Ok(10.0 * self.optimal_snr(n_spans)?.log10())
    }

    /// Optimal SNR decays as n^-(1 + epsilon/3); this is that exponent.
    fn decay_exponent(&self) -> f64 {
        1.0 + self.coherence_epsilon / 3.0
    }
}

/// Farthest link that still meets a required SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachResult {
    pub n_spans: u64,
    pub reach_km: f64,
    /// Optimal-launch SNR actually delivered at `n_spans` (dB).
    pub snr_db: f64,
    pub required_snr_db: f64,
}

/// Maximum number of spans whose optimal-launch SNR still meets
/// `required_snr_db`, with the distance floored to whole spans.
pub fn reach(required_snr_db: f64, link: &LinkSpec) -> Result<ReachResult> {
    link.validate()?;
    if !required_snr_db.is_finite() {
        return Err(invalid("required SNR must be finite"));
    }
    let required = 10f64.powf(required_snr_db / 10.0);
    let single = link.optimal_snr(1)?;
    if required > single * (1.0 + 1e-12) {
        return Err(invalid(format!(
            "required SNR {required_snr_db:.3} dB exceeds the single-span optimum \
             {:.3} dB",
            10.0 * single.log10()
        )));
    }
    // optimal_snr(n) = optimal_snr(1) * n^-q: invert, then settle boundary
    // ties exactly.
    let mut n = ((single / required).powf(1.0 / link.decay_exponent()) * (1.0 + 1e-12))
        .floor()
        .max(1.0) as u64;
    while link.optimal_snr(n + 1)? >= required * (1.0 - 1e-12) {
        n += 1;
    }
    while n > 1 && link.optimal_snr(n)? < required * (1.0 - 1e-12) {
        n -= 1;
    }
    Ok(ReachResult {
        n_spans: n,
        reach_km: n as f64 * link.span_km,
        snr_db: link.optimal_snr_db(n)?,
        required_snr_db,
    })
}

/// How span counts are quantized when reporting reach gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpanRounding {
    /// Round the ideal span count to the nearest whole span (default):
    /// reach figures are quoted to the span the link actually terminates on.
    Nearest,
    /// Floor, guaranteeing the requirement is met with margin.
    Floor,
}

/// Reach improvement bought by an SNR-threshold gain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachGain {
    pub delta_snr_db: f64,
    pub baseline_spans: u64,
    pub new_spans: u64,
    /// Ideal (unquantized) span count the delta supports.
    pub ideal_spans: f64,
    pub gained_spans: u64,
    pub gain_km: f64,
    /// Quantized relative reach increase, e.g. 0.058 for +5.8%.
    pub relative_gain: f64,
}

/// Convert an SNR-threshold improvement of `delta_snr_db` into added reach
/// over a baseline link of `baseline_km`, quantized to whole spans.
pub fn reach_gain(delta_snr_db: f64, baseline_km: f64, link: &LinkSpec) -> Result<ReachGain> {
    reach_gain_with(delta_snr_db, baseline_km, link, SpanRounding::Nearest)
}

/// [`reach_gain`] with an explicit span-quantization rule.
pub fn reach_gain_with(
    delta_snr_db: f64,
    baseline_km: f64,
    link: &LinkSpec,
    rounding: SpanRounding,
) -> Result<ReachGain> {
    link.validate()?;
    if !delta_snr_db.is_finite() || delta_snr_db < 0.0 {
        return Err(invalid("delta SNR must be finite and >= 0"));
    }
    let spans_real = baseline_km / link.span_km;
    let baseline_spans = spans_real.round();
    if baseline_spans < 1.0 || (spans_real - baseline_spans).abs() > 1e-6 {
        return Err(invalid(format!(
            "baseline {baseline_km} km is not a whole number of {} km spans",
            link.span_km
        )));
    }
    // SNR_opt ~ n^-q, so a delta-dB threshold improvement scales the
    // feasible span count by 10^(delta / (10 q)).
    let ideal_spans =
        baseline_spans * 10f64.powf(delta_snr_db / (10.0 * link.decay_exponent()));
    let new_spans = match rounding {
        SpanRounding::Nearest => ideal_spans.round(),
        SpanRounding::Floor => (ideal_spans * (1.0 + 1e-12)).floor(),
    }
    .max(baseline_spans) as u64;
    let baseline_spans = baseline_spans as u64;
    let gained_spans = new_spans - baseline_spans;
    Ok(ReachGain {
        delta_snr_db,
        baseline_spans,
        new_spans,
        ideal_spans,
        gained_spans,
        gain_km: gained_spans as f64 * link.span_km,
        relative_gain: gained_spans as f64 / baseline_spans as f64,
    })
}
