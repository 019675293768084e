//! Single-RIS link statistics: free-space path loss through the reflect
//! hop, Gaussian surrogate moments of the aggregate amplitude
//!
//! ```text
//! A = √P_L · Σ_{i=1..N} α_i^SR · α_i^RD · ζ_i^SR · ζ_i^RD
//! ```
//!
//! and the resulting non-central chi-square SNR machinery: MGF and BPSK
//! error probability by quadrature over the Craig form of Q.
//!
//! For large N the sum is treated as Gaussian with
//! `E[A] = N·√P_L·m₁` and `Var[A] = N·P_L·(m₂ − m₁²)` where m₁, m₂ are
//! the per-element moments of `α^SR α^RD ζ^SR ζ^RD`; the hops carry
//! independent, identically distributed fading and misalignment.

use crate::fading::{rician_mean_and_ms, RicianConfig};
use crate::misalignment::{misalignment_moments, AntennaConfig, MisalignmentParams};
use crate::numerics::{integrate_adaptive, shared_rule};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Boltzmann constant in J/K, for the thermal-noise convenience
/// constructor on [`SnrBudget`].
pub const BOLTZMANN_J_PER_K: f64 = 1.380_649e-23;

/// Below this array size the Gaussian surrogate for the element sum is
/// statistically questionable and downstream reports should carry a
/// warning.
pub const CLT_ELEMENT_THRESHOLD: u32 = 64;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Everything needed to price one source → RIS → destination reflection
/// path: antenna hardware, the two hop distances, the reflection
/// efficiency ε_p ∈ (0, 1], and the element count N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkBudget {
    pub antenna: AntennaConfig,
    pub d_sr_m: f64,
    pub d_rd_m: f64,
    pub ris_efficiency: f64,
    pub ris_elements: u32,
}

impl LinkBudget {
    /// Budget with both hops at the same distance, unit efficiency.
    pub fn symmetric_hops(antenna: AntennaConfig, hop_m: f64, ris_elements: u32) -> Self {
        LinkBudget {
            antenna,
            d_sr_m: hop_m,
            d_rd_m: hop_m,
            ris_efficiency: 1.0,
            ris_elements,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.antenna.validate()?;
        for (name, d) in [("d_sr_m", self.d_sr_m), ("d_rd_m", self.d_rd_m)] {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {d}"
                )));
            }
        }
        if !(self.ris_efficiency > 0.0 && self.ris_efficiency <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "ris_efficiency must lie in (0, 1], got {}",
                self.ris_efficiency
            )));
        }
        if self.ris_elements < 1 {
            return Err(Error::InvalidConfig(
                "ris_elements must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// True when the element count is too small for the Gaussian
    /// surrogate to be trustworthy; callers surface this as a warning,
    /// not an error.
    pub fn clt_questionable(&self) -> bool {
        self.ris_elements < CLT_ELEMENT_THRESHOLD
    }
}

/// First two moments of the aggregate amplitude A; the single object the
/// MGF, error-probability, and rate layers consume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeStats {
    pub mean: f64,
    pub variance: f64,
}

/// Transmit power over noise spectral density, the single SNR knob, kept
/// in dB so sweeps are linear in the natural axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnrBudget {
    pub pt_over_n0_db: f64,
}

impl SnrBudget {
    pub fn from_db(pt_over_n0_db: f64) -> Self {
        SnrBudget { pt_over_n0_db }
    }

    /// Convenience: derive the knob from transmit power and thermal
    /// noise k_B·T over a given bandwidth.
    pub fn from_thermal(pt_dbw: f64, bandwidth_hz: f64, noise_temperature_k: f64) -> Self {
        let noise_dbw = 10.0 * (BOLTZMANN_J_PER_K * noise_temperature_k * bandwidth_hz).log10();
        SnrBudget {
            pt_over_n0_db: pt_dbw - noise_dbw,
        }
    }

    pub fn linear(&self) -> f64 {
        10f64.powf(self.pt_over_n0_db / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.pt_over_n0_db.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "pt_over_n0_db must be finite, got {}",
                self.pt_over_n0_db
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Path loss
// ---------------------------------------------------------------------------

/// Free-space path loss of the two-hop reflection,
/// `P_L = (λ/4π)⁴ · G_i·G_r / (d_SR²·d_RD²) · ε_p`.
///
/// The distances multiply (far-field product form) rather than add, which
/// is what makes the reflect path so much weaker than a direct link of
/// the same total length.
pub fn free_space_path_loss(lb: &LinkBudget) -> Result<f64> {
    lb.validate()?;
    let lam_over_4pi = lb.antenna.wavelength_m() / (4.0 * std::f64::consts::PI);
    let gains = lb.antenna.gain_linear() * lb.antenna.gain_linear();
    Ok(
        lam_over_4pi.powi(4) * gains / (lb.d_sr_m * lb.d_sr_m * lb.d_rd_m * lb.d_rd_m)
            * lb.ris_efficiency,
    )
}

// ---------------------------------------------------------------------------
// Aggregate amplitude moments
// ---------------------------------------------------------------------------

/// Per-element amplitude moments (m₁, m₂) of `α^SR·α^RD·ζ^SR·ζ^RD` when
/// both hops share the same misalignment statistics and Rician shape.
pub(crate) fn element_moments(mis: &MisalignmentParams, ric: &RicianConfig) -> Result<(f64, f64)> {
    let (alpha_mean, alpha_ms) = rician_mean_and_ms(ric)?;
    let (zeta_mean, zeta_ms) = misalignment_moments(mis);
    let m1 = alpha_mean * alpha_mean * zeta_mean * zeta_mean;
    let m2 = alpha_ms * alpha_ms * zeta_ms * zeta_ms;
    Ok((m1, m2))
}

/// Gaussian surrogate moments of the aggregate amplitude for one RIS
/// whose hops share misalignment statistics: `E[A] = N·√P_L·m₁`,
/// `Var[A] = N·P_L·(m₂ − m₁²)`.
pub fn amplitude_stats_single(
    lb: &LinkBudget,
    mis: &MisalignmentParams,
    ric: &RicianConfig,
) -> Result<AmplitudeStats> {
    let p_l = free_space_path_loss(lb)?;
    let (m1, m2) = element_moments(mis, ric)?;
    let n = f64::from(lb.ris_elements);
    Ok(AmplitudeStats {
        mean: n * p_l.sqrt() * m1,
        variance: n * p_l * (m2 - m1 * m1),
    })
}

// ---------------------------------------------------------------------------
// SNR MGF and BPSK error probability
// ---------------------------------------------------------------------------

/// MGF of the instantaneous SNR `γ = c·A²` with `A ~ N(μ, σ²)` and
/// `c = P_t/N₀` — a non-central chi-square with one degree of freedom:
///
/// ```text
/// M(s) = exp(s·c·μ² / (1 − 2·s·c·σ²)) / √(1 − 2·s·c·σ²)
/// ```
///
/// Restricted to s ≤ 0, where the denominator is always positive.
pub fn snr_mgf(stats: &AmplitudeStats, snr: &SnrBudget, s: f64) -> Result<f64> {
    if !(s <= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "snr_mgf is defined here for s ≤ 0 only, got {s}"
        )));
    }
    snr.validate()?;
    let c = snr.linear();
    let denom = 1.0 - 2.0 * s * c * stats.variance;
    Ok((s * c * stats.mean * stats.mean / denom).exp() / denom.sqrt())
}

/// BPSK error-probability integrand at angle ω, in the cancellation-free
/// form of `M(−1/sin²ω)`:
///
/// ```text
/// exp(−c·μ² / (sin²ω + 2cσ²)) · √(sin²ω / (sin²ω + 2cσ²))
/// ```
fn ber_integrand(omega: f64, c_mu_sq: f64, two_c_var: f64) -> f64 {
    let s2 = omega.sin().powi(2);
    let denom = s2 + two_c_var;
    if denom == 0.0 {
        // Only at ω = 0 with zero variance; the μ > 0 limit is 0.
        return 0.0;
    }
    (-c_mu_sq / denom).exp() * (s2 / denom).sqrt()
}

/// Average BPSK error probability via the MGF identity
/// `P_e = (1/π) ∫₀^{π/2} M(−1/sin²ω) dω`, adaptive quadrature at
/// relative tolerance 1e-10.
pub fn bpsk_ber_single(stats: &AmplitudeStats, snr: &SnrBudget) -> Result<f64> {
    snr.validate()?;
    if stats.mean == 0.0 && stats.variance == 0.0 {
        return Ok(0.5);
    }
    let c = snr.linear();
    let c_mu_sq = c * stats.mean * stats.mean;
    let two_c_var = 2.0 * c * stats.variance;
    let mut f = |omega: f64| ber_integrand(omega, c_mu_sq, two_c_var);
    let integral = integrate_adaptive(&mut f, 0.0, std::f64::consts::FRAC_PI_2, 1e-10)?;
    Ok(integral / std::f64::consts::PI)
}

/// Invert the error curve: the P_t/N₀ at which the BPSK error
/// probability equals `target`, found by bisection in dB (the curve is
/// strictly decreasing in power).
pub fn pt_over_n0_for_target_ber(stats: &AmplitudeStats, target: f64) -> Result<SnrBudget> {
    if !(target > 0.0 && target < 0.5) {
        return Err(Error::InvalidConfig(format!(
            "target error probability must lie in (0, 0.5), got {target}"
        )));
    }
    if stats.mean <= 0.0 {
        return Err(Error::InvalidConfig(
            "target-BER inversion needs a positive amplitude mean".into(),
        ));
    }
    // Bracket by c·μ²: 1e-3 is deep in the coin-flip plateau, and the
    // upper end grows until the (possibly variance-flattened) curve
    // crosses the target.
    let mu_sq = stats.mean * stats.mean;
    let db_at = |c_mu_sq: f64| 10.0 * (c_mu_sq / mu_sq).log10();
    let mut lo = db_at(1e-3);
    let mut hi = db_at(1e2);
    if bpsk_ber_single(stats, &SnrBudget::from_db(lo))? <= target {
        return Err(Error::Numerical(format!(
            "error probability is already below {target} with no signal power"
        )));
    }
    while bpsk_ber_single(stats, &SnrBudget::from_db(hi))? > target {
        hi += 20.0;
        if hi > lo + 400.0 {
            return Err(Error::Numerical(format!(
                "error probability does not reach {target} within 400 dB of bracket"
            )));
        }
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if bpsk_ber_single(stats, &SnrBudget::from_db(mid))? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SnrBudget::from_db(0.5 * (lo + hi)))
}

/// Same error-probability integral on a fixed Gauss–Legendre rule, used
/// to demonstrate quadrature-order independence.
pub fn bpsk_ber_fixed_order(stats: &AmplitudeStats, snr: &SnrBudget, order: usize) -> f64 {
    let c = snr.linear();
    let c_mu_sq = c * stats.mean * stats.mean;
    let two_c_var = 2.0 * c * stats.variance;
    shared_rule(order).integrate(0.0, std::f64::consts::FRAC_PI_2, |omega| {
        ber_integrand(omega, c_mu_sq, two_c_var)
    }) / std::f64::consts::PI
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::misalignment::misalignment_params;
    use crate::numerics::q_function;

    // Closed intra-plane hop distances (metres) for the two reference
    // shells, pinned by the geometry tests.
    const STARLINK_INTRA_M: f64 = 945_374.0620333423;
    const IRIDIUM_INTRA_M: f64 = 4_033_846.7488555902;

    fn assert_rel(actual: f64, expected: f64, rel_tol: f64, what: &str) {
        let rel = (actual - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        assert!(
            rel <= rel_tol,
            "{what}: expected {expected:.17e}, got {actual:.17e} (rel err {rel:.2e})"
        );
    }

    fn starlink_budget(n: u32) -> LinkBudget {
        LinkBudget::symmetric_hops(AntennaConfig::default(), STARLINK_INTRA_M, n)
    }

    fn starlink_stats(n: u32, jitter_m2: f64, k: f64) -> AmplitudeStats {
        let lb = starlink_budget(n);
        let mis = misalignment_params(&lb.antenna, STARLINK_INTRA_M, jitter_m2).unwrap();
        amplitude_stats_single(&lb, &mis, &RicianConfig::new(k)).unwrap()
    }

    /// SNR knob placing the link at a prescribed c·μ², i.e. on the live
    /// part of the error curve regardless of how deep the path loss and
    /// misalignment attenuation are.
    fn snr_at(stats: &AmplitudeStats, c_mu_sq: f64) -> SnrBudget {
        SnrBudget::from_db(10.0 * (c_mu_sq / (stats.mean * stats.mean)).log10())
    }

    // -- path loss -------------------------------------------------------------

    #[test]
    fn path_loss_reference_values() {
        // Frozen from an independent evaluation of (λ/4π)⁴·G²/(d⁴)·ε_p
        // at 350 GHz, 30 dBi, equal hops at each shell's intra-plane
        // distance.
        assert_rel(
            free_space_path_loss(&starlink_budget(1)).unwrap(),
            2.702442412586078e-35,
            1e-12,
            "945 km hops",
        );
        let iridium = LinkBudget::symmetric_hops(AntennaConfig::default(), IRIDIUM_INTRA_M, 1);
        assert_rel(
            free_space_path_loss(&iridium).unwrap(),
            8.152552404689166e-38,
            1e-12,
            "4034 km hops",
        );
    }

    #[test]
    fn path_loss_is_linear_in_efficiency() {
        let mut lb = starlink_budget(1);
        let full = free_space_path_loss(&lb).unwrap();
        lb.ris_efficiency = 0.5;
        assert_eq!(free_space_path_loss(&lb).unwrap(), 0.5 * full);
    }

    #[test]
    fn halving_frequency_recovers_twelve_db() {
        let mut lb = starlink_budget(1);
        let base = free_space_path_loss(&lb).unwrap();
        lb.antenna.carrier_frequency_hz /= 2.0;
        let halved = free_space_path_loss(&lb).unwrap();
        // λ⁴ dependence: ×16, i.e. +12.04 dB of recovered budget.
        assert_rel(halved / base, 16.0, 1e-12, "λ⁴ scaling");
    }

    #[test]
    fn budget_validation_rejects_bad_fields() {
        let good = starlink_budget(16);
        for mutate in [
            (|lb: &mut LinkBudget| lb.d_sr_m = 0.0) as fn(&mut LinkBudget),
            |lb| lb.d_rd_m = -1.0,
            |lb| lb.d_sr_m = f64::INFINITY,
            |lb| lb.ris_efficiency = 0.0,
            |lb| lb.ris_efficiency = 1.5,
            |lb| lb.ris_elements = 0,
        ] {
            let mut lb = good.clone();
            mutate(&mut lb);
            assert!(lb.validate().is_err(), "mutation not rejected");
        }
        assert!(good.validate().is_ok());
    }

    #[test]
    fn small_arrays_flagged_for_clt_warning() {
        assert!(starlink_budget(63).clt_questionable());
        assert!(!starlink_budget(64).clt_questionable());
    }

    // -- SNR knob ----------------------------------------------------------------

    #[test]
    fn snr_linear_conversion() {
        assert_eq!(SnrBudget::from_db(0.0).linear(), 1.0);
        assert_rel(SnrBudget::from_db(10.0).linear(), 10.0, 1e-15, "10 dB");
        assert_rel(SnrBudget::from_db(-30.0).linear(), 1e-3, 1e-15, "−30 dB");
    }

    #[test]
    fn thermal_noise_convenience() {
        // Chosen so k_B·T·B = 1e-20 W exactly: 0 dBW over that noise
        // floor is 200 dB of P_t/N₀·B.
        let t = 1e-20 / BOLTZMANN_J_PER_K;
        let snr = SnrBudget::from_thermal(0.0, 1.0, t);
        assert_rel(snr.pt_over_n0_db, 200.0, 1e-12, "thermal knob");
    }

    // -- amplitude stats -----------------------------------------------------------

    #[test]
    fn stats_scale_linearly_in_element_count() {
        let a = starlink_stats(1024, 1.0, 10.0);
        let b = starlink_stats(2048, 1.0, 10.0);
        assert_eq!(b.mean, 2.0 * a.mean);
        assert_eq!(b.variance, 2.0 * a.variance);
        assert!(a.mean > 0.0 && a.variance > 0.0);
    }

    #[test]
    fn aligned_strong_los_limit_is_deterministic() {
        // κ → ∞, A₀ → 1, K → ∞: every element contributes unit gain, so
        // E[A] → N·√P_L and Var[A] → 0.
        let lb = starlink_budget(1024);
        let p_l = free_space_path_loss(&lb).unwrap();
        let stats = amplitude_stats_single(
            &lb,
            &MisalignmentParams::fully_aligned(),
            &RicianConfig::new(1e9),
        )
        .unwrap();
        assert_rel(stats.mean, 1024.0 * p_l.sqrt(), 1e-9, "deterministic mean");
        assert!(stats.variance >= 0.0);
        assert!(stats.variance / (1024.0 * p_l) < 1e-9, "variance vanishes");
    }

    #[test]
    fn per_element_variance_is_positive_for_random_channels() {
        let stats = starlink_stats(256, 10.0, 0.0);
        assert!(stats.variance > 0.0);
        assert!(stats.mean > 0.0);
    }

    // -- MGF ------------------------------------------------------------------------

    #[test]
    fn mgf_at_origin_is_one() {
        let stats = starlink_stats(1024, 1.0, 10.0);
        assert_eq!(
            snr_mgf(&stats, &SnrBudget::from_db(100.0), 0.0).unwrap(),
            1.0
        );
    }

    #[test]
    fn mgf_rejects_positive_argument() {
        let stats = starlink_stats(1024, 1.0, 10.0);
        assert!(snr_mgf(&stats, &SnrBudget::from_db(0.0), 1e-9).is_err());
    }

    #[test]
    fn mgf_closed_form_reference() {
        // (μ, σ², c, s) = (2, 1, 1, −1) → exp(−4/3)/√3, hand-evaluated.
        let stats = AmplitudeStats {
            mean: 2.0,
            variance: 1.0,
        };
        let m = snr_mgf(&stats, &SnrBudget::from_db(0.0), -1.0).unwrap();
        assert_rel(m, 0.15218787864872982, 1e-15, "noncentral χ² MGF");
        assert_rel(
            m,
            (-4.0_f64 / 3.0).exp() / 3.0_f64.sqrt(),
            1e-15,
            "algebraic form",
        );
    }

    #[test]
    fn mgf_centrality_collapse() {
        let stats = AmplitudeStats {
            mean: 0.0,
            variance: 0.7,
        };
        let snr = SnrBudget::from_db(3.0);
        let c = snr.linear();
        for s in [-5.0, -1.0, -0.1] {
            let expected = 1.0 / (1.0 - 2.0 * s * c * 0.7).sqrt();
            assert_rel(
                snr_mgf(&stats, &snr, s).unwrap(),
                expected,
                1e-15,
                "central χ²",
            );
        }
    }

    #[test]
    fn mgf_is_increasing_and_bounded_on_nonpositive_axis() {
        let stats = starlink_stats(1024, 1.0, 10.0);
        let snr = snr_at(&stats, 2.0);
        let mut prev = 0.0;
        for i in 0..=40 {
            let s = -10.0 + 0.25 * i as f64;
            let m = snr_mgf(&stats, &snr, s).unwrap();
            assert!(m > prev, "MGF not increasing at s = {s}");
            assert!(m <= 1.0);
            prev = m;
        }
        assert_eq!(prev, 1.0);
    }

    // -- BPSK error probability --------------------------------------------------------

    #[test]
    fn awgn_limit_matches_q_function() {
        // Deterministic amplitude: P_e = Q(√(2γ)). At γ = 9.6 dB the
        // closed form gives 9.7362e-6.
        let gamma_db = 9.6;
        let stats = AmplitudeStats {
            mean: 1.0,
            variance: 0.0,
        };
        let ber = bpsk_ber_single(&stats, &SnrBudget::from_db(gamma_db)).unwrap();
        let gamma = 10f64.powf(gamma_db / 10.0);
        assert_rel(ber, q_function((2.0 * gamma).sqrt()), 1e-9, "Craig vs erfc");
        assert_rel(ber, 9.736176018578607e-06, 1e-9, "frozen value");
    }

    #[test]
    fn no_signal_gives_coin_flip() {
        let stats = AmplitudeStats {
            mean: 0.0,
            variance: 0.0,
        };
        assert_eq!(
            bpsk_ber_single(&stats, &SnrBudget::from_db(50.0)).unwrap(),
            0.5
        );
    }

    #[test]
    fn ber_decreases_in_power_and_elements_increases_in_jitter() {
        // Three monotonicity properties, anchored to the live part of
        // the error curve via c·μ².
        let base = starlink_stats(1024, 1.0, 10.0);
        let mut prev = 0.5;
        for c_mu_sq in [0.5, 2.0, 8.0, 20.0] {
            let ber = bpsk_ber_single(&base, &snr_at(&base, c_mu_sq)).unwrap();
            assert!(
                ber < prev,
                "P_e not decreasing in pt_over_n0 at c·μ²={c_mu_sq}"
            );
            assert!(ber > 0.0);
            prev = ber;
        }
        // One shared knob: c·μ² = 1 at N = 256, growing16× by N = 2048
        // since μ is linear in N.
        let snr = snr_at(&starlink_stats(256, 1.0, 10.0), 1.0);
        let mut prev = 0.5;
        for n in [256, 512, 1024, 2048] {
            let ber = bpsk_ber_single(&starlink_stats(n, 1.0, 10.0), &snr).unwrap();
            assert!(ber < prev, "P_e not decreasing in N at {n}");
            assert!(ber > 0.0);
            prev = ber;
        }
        // One shared knob: c·μ² = 8 at 1 m² of jitter, shrinking as the
        // beam wanders more.
        let snr = snr_at(&base, 8.0);
        let mut prev = 0.0;
        for jitter in [1.0, 2.5, 5.0, 10.0] {
            let ber = bpsk_ber_single(&starlink_stats(1024, jitter, 10.0), &snr).unwrap();
            assert!(ber > prev, "P_e not increasing in jitter at {jitter} m²");
            assert!(ber <= 0.5);
            prev = ber;
        }
    }

    #[test]
    fn target_ber_inversion_round_trips() {
        for (jitter, target) in [(1.0, 1e-3), (1.0, 1e-5), (10.0, 1e-3), (10.0, 1e-5)] {
            let stats = starlink_stats(1024, jitter, 10.0);
            let snr = pt_over_n0_for_target_ber(&stats, target).unwrap();
            let ber = bpsk_ber_single(&stats, &snr).unwrap();
            assert_rel(ber, target, 1e-6, "inverted curve value");
        }
        let stats = starlink_stats(1024, 1.0, 10.0);
        assert!(pt_over_n0_for_target_ber(&stats, 0.0).is_err());
        assert!(pt_over_n0_for_target_ber(&stats, 0.7).is_err());
    }

    #[test]
    fn quadrature_order_independence() {
        // Fixed 64- and 128-node rules agree to 1e-9 relative on every
        // grid point, and the adaptive result agrees with both.
        for (jitter, k) in [(1.0, 10.0), (10.0, 10.0), (1.0, 0.0)] {
            let stats = starlink_stats(1024, jitter, k);
            for c_mu_sq in [0.5, 4.0, 9.0, 16.0] {
                let snr = snr_at(&stats, c_mu_sq);
                let p64 = bpsk_ber_fixed_order(&stats, &snr, 64);
                let p128 = bpsk_ber_fixed_order(&stats, &snr, 128);
                let adaptive = bpsk_ber_single(&stats, &snr).unwrap();
                assert_rel(p64, p128, 1e-9, "64 vs 128 nodes");
                assert_rel(adaptive, p128, 1e-9, "adaptive vs fixed");
            }
        }
    }
}
