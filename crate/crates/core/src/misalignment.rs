//! Pointing-error (misalignment) fading of a Gaussian beam captured by a
//! circular effective aperture.
//!
//! A transmit beam of waist `w₀ = r_a` expands to footprint radius `r_d` at
//! the receiver, whose aperture of effective radius `r_a` is displaced from
//! the beam centre by a random radial pointing error. The collected power
//! fraction ζ ∈ (0, A₀] is approximately
//!
//! ```text
//! ζ(r) ≈ A₀ · exp(−2r²/w_eq²)
//! ```
//!
//! where `A₀ = erf(v)²` is the fraction collected under perfect alignment,
//! `v = √π·r_a/(√2·r_d)`, and `w_eq` is an equivalent beamwidth chosen so
//! the Gaussian approximation matches the true aperture integral. With the
//! pointing-displacement components jittering with per-axis variance σ_s²,
//! the severity ratio is `κ = w_eq²/(2σ_s²)` and ζ has density
//!
//! ```text
//! f_ζ(y) = (κ²/A₀^κ²) · y^(κ²−1)   on 0 ≤ y ≤ A₀
//! ```
//!
//! so large κ concentrates ζ near A₀ (well aligned). σ_s² = 0 is accepted
//! and represented by κ = ∞: the coefficient degenerates to the point mass
//! at A₀ (perfect pointing; the finite beam still collects only A₀).

use crate::numerics::erf;
use crate::{Error, Result};
use rand::RngExt;
use serde::{Deserialize, Serialize};

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT_M_S: f64 = 2.997_924_58e8;

/// Default carrier frequency, Hz.
pub const DEFAULT_CARRIER_FREQUENCY_HZ: f64 = 350e9;

/// Default antenna gain, dBi (applied to transmit and receive alike).
pub const DEFAULT_GAIN_DBI: f64 = 30.0;

/// Default full-link beam divergence (half-angle), radians.
///
/// Narrow-beam inter-satellite terminals collimate far below the diffraction
/// divergence of the bare effective aperture (which
/// [`AntennaConfig::diffraction_limited_divergence_rad`] provides, ~63 mrad
/// at the defaults — a footprint tens of kilometres wide at LEO
/// inter-satellite range, leaving no workable link budget). This default is
/// calibrated so the default geometry produces metre-scale footprints at
/// LEO inter-satellite distances, the regime where jitter of σ_s² ≈ 1 m²
/// is a meaningful impairment.
pub const DEFAULT_BEAM_DIVERGENCE_RAD: f64 = 2.66e-6;

// ---------------------------------------------------------------------------
// Antenna description
// ---------------------------------------------------------------------------

/// Carrier and antenna parameters shared by every hop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AntennaConfig {
    /// Carrier frequency, Hz.
    pub carrier_frequency_hz: f64,
    /// Antenna gain, dBi.
    pub gain_dbi: f64,
    /// Beam divergence half-angle, radians.
    pub beam_divergence_rad: f64,
}

impl Default for AntennaConfig {
    fn default() -> Self {
        AntennaConfig {
            carrier_frequency_hz: DEFAULT_CARRIER_FREQUENCY_HZ,
            gain_dbi: DEFAULT_GAIN_DBI,
            beam_divergence_rad: DEFAULT_BEAM_DIVERGENCE_RAD,
        }
    }
}

impl AntennaConfig {
    /// Carrier wavelength λ = c/f, metres.
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT_M_S / self.carrier_frequency_hz
    }

    /// Gain as a linear power ratio.
    pub fn gain_linear(&self) -> f64 {
        10f64.powf(self.gain_dbi / 10.0)
    }

    /// Diffraction-limited divergence λ/(π·w₀) of a beam waisted at the
    /// effective aperture radius — the physical lower bound for an
    /// unconditioned beam, available as an explicit override of
    /// [`DEFAULT_BEAM_DIVERGENCE_RAD`].
    pub fn diffraction_limited_divergence_rad(&self) -> f64 {
        self.wavelength_m() / (std::f64::consts::PI * effective_aperture_radius(self))
    }

    /// Check the domain invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_frequency_hz > 0.0 && self.carrier_frequency_hz.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "carrier_frequency_hz must be positive and finite, got {}",
                self.carrier_frequency_hz
            )));
        }
        if !self.gain_dbi.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "gain_dbi must be finite, got {}",
                self.gain_dbi
            )));
        }
        if !(self.beam_divergence_rad > 0.0 && self.beam_divergence_rad.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "beam_divergence_rad must be positive and finite, got {}",
                self.beam_divergence_rad
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Geometry-derived parameters
// ---------------------------------------------------------------------------

/// Effective aperture radius `r_a = (λ/2π)·√G`, metres — the circular
/// aperture whose area carries the configured gain at the configured
/// wavelength.
pub fn effective_aperture_radius(ant: &AntennaConfig) -> f64 {
    ant.wavelength_m() / std::f64::consts::TAU * ant.gain_linear().sqrt()
}

/// Beam footprint radius at distance `d`, metres, from Gaussian-beam
/// propagation with waist `w₀ = r_a`:
///
/// ```text
/// r_d(d) = w₀·√(1 + (d·θ_div/w₀)²)
/// ```
///
/// which tends to the waist as d → 0 and to `d·θ_div` in the far field.
pub fn footprint_radius(ant: &AntennaConfig, d_m: f64) -> Result<f64> {
    ant.validate()?;
    if !(d_m > 0.0 && d_m.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "footprint distance must be positive and finite, got {d_m} m"
        )));
    }
    let w0 = effective_aperture_radius(ant);
    let spread = d_m * ant.beam_divergence_rad / w0;
    Ok(w0 * (1.0 + spread * spread).sqrt())
}

/// The misalignment model of one hop: geometry, collected fraction, and the
/// severity ratio κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MisalignmentParams {
    /// Per-axis pointing-displacement variance at the receiver plane, m².
    pub jitter_variance_m2: f64,
    /// Power fraction collected under perfect alignment, in (0, 1].
    pub a0: f64,
    /// Equivalent beamwidth of the Gaussian collection approximation, m.
    pub w_eq_m: f64,
    /// Severity ratio κ = w_eq²/(2σ_s²); ∞ encodes perfect pointing.
    pub kappa: f64,
    /// Effective aperture radius, m.
    pub r_a_m: f64,
    /// Beam footprint radius at the hop distance, m.
    pub r_d_m: f64,
}

impl MisalignmentParams {
    /// κ², the exponent parameter of the fading density.
    pub fn kappa_sq(&self) -> f64 {
        self.kappa * self.kappa
    }

    /// Whether the coefficient is the degenerate point mass at A₀
    /// (σ_s² = 0).
    pub fn is_deterministic(&self) -> bool {
        self.kappa.is_infinite()
    }

    /// The idealisation used by aligned-reference analyses: the aperture
    /// collects the whole beam (A₀ = 1) and never mispoints (κ = ∞), so
    /// ζ ≡ 1 and misalignment drops out of the statistics entirely.
    pub fn fully_aligned() -> Self {
        MisalignmentParams {
            jitter_variance_m2: 0.0,
            a0: 1.0,
            w_eq_m: f64::INFINITY,
            kappa: f64::INFINITY,
            r_a_m: f64::INFINITY,
            r_d_m: f64::INFINITY,
        }
    }

    /// Build the parameters from raw radii: collected fraction
    /// `A₀ = erf(v)²` with `v = √π·r_a/(√2·r_d)`, and equivalent beamwidth
    /// `w_eq² = r_d²·√π·erf(v)/(2v·e^{−v²})`.
    ///
    /// `jitter_variance_m2 = 0` yields κ = ∞ (perfect pointing). For
    /// `r_a ≫ r_d` the erf saturates and `e^{−v²}` underflows, which this
    /// form maps to the correct limit (A₀ → 1, w_eq → ∞, κ → ∞) rather
    /// than NaN.
    pub fn from_geometry(r_a_m: f64, r_d_m: f64, jitter_variance_m2: f64) -> Result<Self> {
        if !(r_a_m > 0.0 && r_d_m > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "aperture and footprint radii must be positive, got r_a = {r_a_m} m, \
                 r_d = {r_d_m} m"
            )));
        }
        if !(jitter_variance_m2 >= 0.0 && jitter_variance_m2.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "jitter_variance_m2 must be nonnegative and finite, got {jitter_variance_m2}"
            )));
        }
        let v = std::f64::consts::PI.sqrt() * r_a_m / (std::f64::consts::SQRT_2 * r_d_m);
        let erf_v = erf(v);
        let a0 = erf_v * erf_v;
        let w_eq_sq =
            r_d_m * r_d_m * std::f64::consts::PI.sqrt() * erf_v / (2.0 * v * (-v * v).exp());
        let kappa = if jitter_variance_m2 == 0.0 {
            f64::INFINITY
        } else {
            w_eq_sq / (2.0 * jitter_variance_m2)
        };
        Ok(MisalignmentParams {
            jitter_variance_m2,
            a0,
            w_eq_m: w_eq_sq.sqrt(),
            kappa,
            r_a_m,
            r_d_m,
        })
    }

    /// Whether the jitter sits below the σ_s² ≈ 1 m² level where κ stops
    /// responding to further reductions; callers may want to surface this.
    pub fn jitter_below_saturation(&self) -> bool {
        self.jitter_variance_m2 > 0.0 && self.jitter_variance_m2 < 1.0
    }
}

/// Misalignment parameters of a hop of length `d_m` under the given antenna
/// and jitter level.
pub fn misalignment_params(
    ant: &AntennaConfig,
    d_m: f64,
    jitter_variance_m2: f64,
) -> Result<MisalignmentParams> {
    let r_a = effective_aperture_radius(ant);
    let r_d = footprint_radius(ant, d_m)?;
    MisalignmentParams::from_geometry(r_a, r_d, jitter_variance_m2)
}

// ---------------------------------------------------------------------------
// The coefficient, its distribution, and sampling
// ---------------------------------------------------------------------------

/// Collected power fraction at radial pointing displacement `r`:
/// `ζ(r) = A₀·exp(−2r²/w_eq²)`.
pub fn misalignment_coefficient(p: &MisalignmentParams, r_m: f64) -> f64 {
    debug_assert!(r_m >= 0.0, "radial displacement cannot be negative");
    p.a0 * (-2.0 * r_m * r_m / (p.w_eq_m * p.w_eq_m)).exp()
}

/// Density of ζ: `f_ζ(y) = (κ²/A₀^κ²)·y^(κ²−1)` on [0, A₀], zero outside
/// the support (so stray evaluations in rejection checks are harmless).
///
/// Rejects the σ_s² = 0 case: the point mass at A₀ has no density.
pub fn misalignment_pdf(p: &MisalignmentParams, y: f64) -> Result<f64> {
    if p.is_deterministic() {
        return Err(Error::InvalidConfig(
            "misalignment pdf undefined for zero jitter (point mass at A0)".into(),
        ));
    }
    if !(0.0..=p.a0).contains(&y) {
        return Ok(0.0);
    }
    let k2 = p.kappa_sq();
    // κ²·(y/A₀)^(κ²−1)/A₀, grouped to keep the powers in range for large κ².
    Ok(k2 / p.a0 * (y / p.a0).powf(k2 - 1.0))
}

/// Distribution function of ζ: `F_ζ(y) = (y/A₀)^κ²` on [0, A₀].
pub fn misalignment_cdf(p: &MisalignmentParams, y: f64) -> Result<f64> {
    if p.is_deterministic() {
        return Err(Error::InvalidConfig(
            "misalignment cdf undefined for zero jitter (point mass at A0)".into(),
        ));
    }
    if y <= 0.0 {
        return Ok(0.0);
    }
    if y >= p.a0 {
        return Ok(1.0);
    }
    Ok((y / p.a0).powf(p.kappa_sq()))
}

/// First and second moments of ζ:
/// `E[ζ] = κ²A₀/(κ²+1)` and `E[ζ²] = κ²A₀²/(κ²+2)`,
/// degenerating to (A₀, A₀²) for perfect pointing.
pub fn misalignment_moments(p: &MisalignmentParams) -> (f64, f64) {
    if p.is_deterministic() {
        return (p.a0, p.a0 * p.a0);
    }
    let k2 = p.kappa_sq();
    (p.a0 * k2 / (k2 + 1.0), p.a0 * p.a0 * k2 / (k2 + 2.0))
}

/// Draw one realisation of ζ by inverting the distribution function:
/// `ζ = A₀·U^(1/κ²)` with U uniform on (0, 1], so samples lie in (0, A₀].
pub fn sample_misalignment(p: &MisalignmentParams, rng: &mut impl RngExt) -> f64 {
    if p.is_deterministic() {
        return p.a0;
    }
    // rng yields U ∈ [0, 1); flip to (0, 1] so the sample stays positive.
    let u = 1.0 - rng.random::<f64>();
    p.a0 * (u.ln() / p.kappa_sq()).exp()
}

// ---------------------------------------------------------------------------
