//! Rician amplitude fading for the solar-scintillation component of each
//! hop, normalised to unit mean-square (Ω = E[α²] = 1) so every power
//! factor is carried by the link budget rather than the fading law.
//!
//! The amplitude mean uses the degree-1/2 Laguerre evaluation
//!
//! ```text
//! E[α] = √(π/(4(1+K))) · L_{1/2}(−K)
//! ```
//!
//! with `L_{1/2}(x) = e^{x/2}·[(1−x)I₀(−x/2) − x·I₁(−x/2)]`, computed via
//! exponentially scaled Bessel functions so any K is overflow-free.

use crate::numerics::{i0e, i1e};
use crate::{Error, Result};
use rand::RngExt;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Rician shape configuration. The power normalisation Ω = E[α²] = 1 is
/// fixed by construction and is not configurable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RicianConfig {
    /// Ratio of line-of-sight to scattered power, K ≥ 0.
    pub k_factor: f64,
}

impl RicianConfig {
    pub fn new(k_factor: f64) -> Self {
        RicianConfig { k_factor }
    }

    /// Pure line-of-sight idealization: α ≡ 1 with no scattered power.
    pub fn pure_los() -> Self {
        RicianConfig {
            k_factor: f64::INFINITY,
        }
    }

    /// Check the domain invariants; K = ∞ is the pure-LOS idealization.
    pub fn validate(&self) -> Result<()> {
        if self.k_factor.is_nan() || self.k_factor < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "Rician k_factor must be nonnegative, got {}",
                self.k_factor
            )));
        }
        Ok(())
    }
}

/// Scintillation severity band for a given K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScintillationRegime {
    /// K ≥ 7: line-of-sight dominates.
    Weak,
    /// 0 < K < 7.
    Transition,
    /// K = 0: pure scattered power (Rayleigh).
    Strong,
}

/// Band the shape factor exactly as quoted: weak for K ≥ 7, strong for
/// K = 0, transition between.
pub fn scintillation_regime(k_factor: f64) -> ScintillationRegime {
    debug_assert!(k_factor >= 0.0, "K cannot be negative");
    if k_factor >= 7.0 {
        ScintillationRegime::Weak
    } else if k_factor == 0.0 {
        ScintillationRegime::Strong
    } else {
        ScintillationRegime::Transition
    }
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

/// Laguerre polynomial of degree 1/2 at nonpositive argument:
/// `L_{1/2}(x) = e^{x/2}·[(1−x)·I₀(−x/2) − x·I₁(−x/2)]`.
///
/// Folding `e^{x/2}` into the scaled Bessel functions gives
/// `(1−x)·i0e(−x/2) − x·i1e(−x/2)`, finite for arbitrarily large −x.
pub fn laguerre_half(x: f64) -> Result<f64> {
    if !(x <= 0.0) || !x.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "laguerre_half domain is finite x ≤ 0 here, got {x}"
        )));
    }
    let z = -0.5 * x;
    Ok((1.0 - x) * i0e(z) - x * i1e(z))
}

/// Mean and mean-square of the unit-power Rician amplitude:
/// `E[α] = √(π/(4(1+K)))·L_{1/2}(−K)` and `E[α²] = 1`.
/// Pure LOS (K = ∞) degenerates to α ≡ 1 exactly.
pub fn rician_mean_and_ms(cfg: &RicianConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    let k = cfg.k_factor;
    if k.is_infinite() {
        return Ok((1.0, 1.0));
    }
    let mean = (std::f64::consts::PI / (4.0 * (1.0 + k))).sqrt() * laguerre_half(-k)?;
    Ok((mean, 1.0))
}

/// Density of the unit-power Rician amplitude,
/// `f(α) = 2(1+K)·α·exp(−K−(1+K)α²)·I₀(2α√(K(1+K)))`, evaluated in the
/// overflow-free form `2(1+K)·α·exp(−(α√(1+K)−√K)²)·i0e(2α√(K(1+K)))`.
pub fn rician_pdf(cfg: &RicianConfig, alpha: f64) -> f64 {
    debug_assert!(cfg.k_factor.is_finite(), "pure LOS has no density");
    if alpha < 0.0 {
        return 0.0;
    }
    let k = cfg.k_factor;
    let root = alpha * (1.0 + k).sqrt() - k.sqrt();
    let bessel_arg = 2.0 * alpha * (k * (1.0 + k)).sqrt();
    2.0 * (1.0 + k) * alpha * (-root * root).exp() * i0e(bessel_arg)
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Draw one unit-power Rician amplitude: the norm of a 2-D Gaussian with
/// line-of-sight offset ν = √(K/(1+K)) and per-component variance
/// σ² = 1/(2(1+K)), so E[α²] = ν² + 2σ² = 1.
pub fn sample_rician(cfg: &RicianConfig, rng: &mut impl RngExt) -> f64 {
    let k = cfg.k_factor;
    if k.is_infinite() {
        return 1.0;
    }
    let nu = (k / (1.0 + k)).sqrt();
    let sigma = (0.5 / (1.0 + k)).sqrt();
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    let in_phase = nu + sigma * z1;
    let quadrature = sigma * z2;
    (in_phase * in_phase + quadrature * quadrature).sqrt()
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_adaptive;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn assert_rel(actual: f64, expected: f64, rel_tol: f64, what: &str) {
        let rel = (actual - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        assert!(
            rel <= rel_tol,
            "{what}: expected {expected:.17e}, got {actual:.17e} (rel err {rel:.2e})"
        );
    }

    // -- Laguerre ---------------------------------------------------------------

    #[test]
    fn laguerre_at_zero_is_one() {
        assert_eq!(laguerre_half(0.0).unwrap(), 1.0);
    }

    #[test]
    fn laguerre_reference_values() {
        // Frozen from an independent high-precision evaluation.
        let cases = [
            (0.5, 1.235582057558263),
            (1.0, 1.446491344083172),
            (3.0, 2.12685259847941),
            (7.0, 3.094219340307583),
            (10.0, 3.658671608148035),
            (50.0, 8.018841116883907),
            (100.0, 11.312036680682414),
        ];
        for (k, expected) in cases {
            assert_rel(
                laguerre_half(-k).unwrap(),
                expected,
                1e-12,
                &format!("L_1/2(−{k})"),
            );
        }
    }

    #[test]
    fn laguerre_rejects_positive_argument() {
        assert!(laguerre_half(0.5).is_err());
    }

    #[test]
    fn laguerre_approaches_large_argument_asymptote() {
        // L_{1/2}(−K) → √(4K/π) as K → ∞; at K = 100 the ratio sits within
        // a fraction of a percent.
        let ratio = laguerre_half(-100.0).unwrap() / (400.0 / std::f64::consts::PI).sqrt();
        assert!(
            (0.99..=1.01).contains(&ratio),
            "asymptotic ratio {ratio} outside [0.99, 1.01]"
        );
    }

    // -- mean identity ------------------------------------------------------------

    #[test]
    fn rayleigh_mean_is_root_pi_over_two() {
        let (mean, ms) = rician_mean_and_ms(&RicianConfig::new(0.0)).unwrap();
        assert_rel(mean, (std::f64::consts::PI / 4.0).sqrt(), 1e-15, "K=0 mean");
        assert_eq!(ms, 1.0);
    }

    #[test]
    fn mean_reference_value_at_k10() {
        // Frozen from an independent high-precision evaluation.
        let (mean, _) = rician_mean_and_ms(&RicianConfig::new(10.0)).unwrap();
        assert_rel(mean, 0.9776243909046111, 1e-12, "E[α] at K=10");
    }

    #[test]
    fn mean_identity_matches_quadrature() {
        // E[α] and E[α²] against direct numerical integration of the pdf;
        // the density is numerically negligible beyond α = 6 for every K
        // tested (the exponent is ≤ −(6−1)² already at K = 0).
        for k in [0.0, 0.5, 1.0, 3.0, 7.0, 10.0, 50.0] {
            let cfg = RicianConfig::new(k);
            let mut mean_integrand = |a: f64| a * rician_pdf(&cfg, a);
            let mean_q = integrate_adaptive(&mut mean_integrand, 0.0, 6.0, 1e-11).unwrap();
            let (mean_cf, _) = rician_mean_and_ms(&cfg).unwrap();
            assert_rel(mean_q, mean_cf, 1e-9, &format!("E[α] identity, K={k}"));

            let mut ms_integrand = |a: f64| a * a * rician_pdf(&cfg, a);
            let ms_q = integrate_adaptive(&mut ms_integrand, 0.0, 6.0, 1e-11).unwrap();
            assert_rel(ms_q, 1.0, 1e-9, &format!("E[α²] = 1, K={k}"));
        }
    }

    #[test]
    fn pure_los_limit() {
        let (mean, ms) = rician_mean_and_ms(&RicianConfig::new(1e8)).unwrap();
        assert!(mean < 1.0, "Jensen: E[α] < √E[α²]");
        assert!(1.0 - mean < 1e-7, "mean → 1, got {mean}");
        assert!(ms - mean * mean < 1e-7, "variance → 0");
    }

    #[test]
    fn negative_k_rejected() {
        assert!(rician_mean_and_ms(&RicianConfig::new(-1.0)).is_err());
        assert!(RicianConfig::new(f64::NAN).validate().is_err());
    }

    #[test]
    fn pure_los_is_exactly_degenerate() {
        let cfg = RicianConfig::pure_los();
        assert!(cfg.validate().is_ok());
        assert_eq!(rician_mean_and_ms(&cfg).unwrap(), (1.0, 1.0));
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
        assert_eq!(sample_rician(&cfg, &mut rng), 1.0);
        assert_eq!(
            scintillation_regime(f64::INFINITY),
            ScintillationRegime::Weak
        );
        // The Laguerre factor alone diverges there; only the combined
        // mean has a limit.
        assert!(laguerre_half(f64::NEG_INFINITY).is_err());
    }

    // -- regimes -------------------------------------------------------------------

    #[test]
    fn regime_banding_is_exact() {
        assert_eq!(scintillation_regime(10.0), ScintillationRegime::Weak);
        assert_eq!(scintillation_regime(7.0), ScintillationRegime::Weak);
        assert_eq!(scintillation_regime(6.999), ScintillationRegime::Transition);
        assert_eq!(scintillation_regime(3.0), ScintillationRegime::Transition);
        assert_eq!(scintillation_regime(1e-12), ScintillationRegime::Transition);
        assert_eq!(scintillation_regime(0.0), ScintillationRegime::Strong);
    }

    // -- sampling ------------------------------------------------------------------

    #[test]
    fn sampler_moments_match_analytic() {
        for k in [0.0, 10.0] {
            let cfg = RicianConfig::new(k);
            let (mean_cf, _) = rician_mean_and_ms(&cfg).unwrap();
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(0xface_0001);
            let n = 1_000_000usize;
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..n {
                let a = sample_rician(&cfg, &mut rng);
                assert!(a > 0.0);
                sum += a;
                sum_sq += a * a;
            }
            let mean = sum / n as f64;
            let ms = sum_sq / n as f64;
            let var = 1.0 - mean_cf * mean_cf;
            let se_mean = (var / n as f64).sqrt();
            assert!(
                (mean - mean_cf).abs() < 3.0 * se_mean,
                "K={k}: empirical mean {mean} vs {mean_cf} (3 s.e. {:.1e})",
                3.0 * se_mean
            );
            // Var[α²] = (1+2K)/(1+K)² for the unit-power parameterisation.
            let var_ms = (1.0 + 2.0 * k) / ((1.0 + k) * (1.0 + k));
            let se_ms = (var_ms / n as f64).sqrt();
            assert!(
                (ms - 1.0).abs() < 3.0 * se_ms,
                "K={k}: empirical E[α²] {ms} vs 1 (3 s.e. {:.1e})",
                3.0 * se_ms
            );
        }
    }

    #[test]
    fn sampler_matches_density_chi_square() {
        // 32-bin goodness of fit at K = 10, fixed seed: one bin below
        // mean − 3.5σ, thirty across ±3.5σ, one above. The 1% critical
        // value of χ² with 31 degrees of freedom is 52.19.
        let cfg = RicianConfig::new(10.0);
        let (mean, _) = rician_mean_and_ms(&cfg).unwrap();
        let sd = (1.0 - mean * mean).sqrt();
        let (lo, hi) = (mean - 3.5 * sd, mean + 3.5 * sd);
        let inner = 30usize;
        let edges: Vec<f64> = std::iter::once(0.0)
            .chain((0..=inner).map(|i| lo + (hi - lo) * i as f64 / inner as f64))
            .chain(std::iter::once(f64::INFINITY))
            .collect();

        let n = 1_000_000usize;
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(0xface_0002);
        let mut observed = vec![0u64; edges.len() - 1];
        for _ in 0..n {
            let a = sample_rician(&cfg, &mut rng);
            let bin = edges.partition_point(|&e| e <= a) - 1;
            observed[bin] += 1;
        }

        let mut chi_sq = 0.0;
        let mut total_mass = 0.0;
        for (bin, &count) in observed.iter().enumerate() {
            let (a, b) = (edges[bin], edges[bin + 1].min(8.0));
            let mut f = |x: f64| rician_pdf(&cfg, x);
            let mass = integrate_adaptive(&mut f, a, b, 1e-10).unwrap();
            total_mass += mass;
            let expected = mass * n as f64;
            assert!(
                expected > 100.0,
                "bin {bin} too thin for χ² ({expected:.1})"
            );
            chi_sq += (count as f64 - expected).powi(2) / expected;
        }
        assert_rel(total_mass, 1.0, 1e-9, "bin masses sum to 1");
        assert!(
            chi_sq < 52.19139483319193,
            "χ²(31) = {chi_sq} exceeds 1% critical value"
        );
    }
}
