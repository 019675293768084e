//! Inter-satellite distance geometry for a LEO constellation shell.
//!
//! Satellites are assumed evenly spaced on circular orbits of radius
//! `r = earth_radius + altitude`, with orbital planes evenly rotated about
//! the polar axis. Three time-invariant distances characterise the shell:
//!
//! - the constant separation of adjacent satellites within one orbit,
//! - the shortest separation between satellites of adjacent planes
//!   (attained when one satellite sits at the shared pole of the planes),
//! - the longest separation between *neighbouring* satellites of adjacent
//!   planes (attained at the equator of the pair, farthest from the shared
//!   pole).
//!
//! All angles are handled in radians internally; distances are kilometres.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Equatorial Earth radius in kilometres, the default for distance work.
pub const EARTH_RADIUS_KM: f64 = 6378.0;

// ---------------------------------------------------------------------------
// Constellation description
// ---------------------------------------------------------------------------

/// Orbital-shell parameters from which every distance derives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationSpec {
    /// Shell altitude above the Earth surface, km.
    pub altitude_km: f64,
    /// Number of satellites evenly spaced along one orbit.
    pub sats_per_orbit: u32,
    /// Number of orbital planes evenly rotated about the polar axis.
    pub orbit_count: u32,
    /// Earth radius, km. Defaults to the equatorial value.
    #[serde(default = "default_earth_radius")]
    pub earth_radius_km: f64,
}

fn default_earth_radius() -> f64 {
    EARTH_RADIUS_KM
}

impl ConstellationSpec {
    /// A shell with the default Earth radius.
    pub fn new(altitude_km: f64, sats_per_orbit: u32, orbit_count: u32) -> Self {
        ConstellationSpec {
            altitude_km,
            sats_per_orbit,
            orbit_count,
            earth_radius_km: EARTH_RADIUS_KM,
        }
    }

    /// The Starlink shell: 1150 km altitude, 50 satellites per orbit,
    /// 32 orbital planes.
    pub fn starlink() -> Self {
        ConstellationSpec::new(1150.0, 50, 32)
    }

    /// The Iridium shell: 781 km altitude, 11 satellites per orbit,
    /// 6 orbital planes.
    pub fn iridium() -> Self {
        ConstellationSpec::new(781.0, 11, 6)
    }

    /// Orbit radius `r = earth_radius + altitude`, km.
    pub fn orbital_radius_km(&self) -> f64 {
        self.earth_radius_km + self.altitude_km
    }

    /// Check the domain invariants, returning a descriptive error on the
    /// first violation.
    pub fn validate(&self) -> Result<()> {
        if !(self.altitude_km > 0.0 && self.altitude_km.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "altitude_km must be positive and finite, got {}",
                self.altitude_km
            )));
        }
        if self.sats_per_orbit < 2 {
            return Err(Error::InvalidConfig(format!(
                "sats_per_orbit must be at least 2, got {} (in-plane angle degenerate)",
                self.sats_per_orbit
            )));
        }
        if self.orbit_count < 2 {
            return Err(Error::InvalidConfig(format!(
                "orbit_count must be at least 2, got {}",
                self.orbit_count
            )));
        }
        if !(self.earth_radius_km > 0.0 && self.earth_radius_km.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "earth_radius_km must be positive and finite, got {}",
                self.earth_radius_km
            )));
        }
        Ok(())
    }

    /// In-plane angular slot θ = 2π / sats_per_orbit, radians.
    fn slot_angle(&self) -> f64 {
        std::f64::consts::TAU / self.sats_per_orbit as f64
    }

    /// Plane-to-plane rotation Ψ = π / orbit_count, radians.
    fn plane_angle(&self) -> f64 {
        std::f64::consts::PI / self.orbit_count as f64
    }
}

/// The three characteristic distances of a shell, km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceSet {
    /// Separation of adjacent satellites within one orbit.
    pub d_intra_km: f64,
    /// Shortest adjacent-plane separation.
    pub d_nearest_km: f64,
    /// Longest neighbouring adjacent-plane separation.
    pub d_farthest_km: f64,
}

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

/// Constant separation of adjacent satellites in one orbit.
///
/// By the law of sines on the isoceles triangle (centre, satellite,
/// satellite): `d = r·sin θ / sin φ` with `θ = 2π/N` and `φ = (π − θ)/2`,
/// which reduces to the chord `2r·sin(θ/2)`.
pub fn intra_plane_distance(spec: &ConstellationSpec) -> Result<f64> {
    spec.validate()?;
    let r = spec.orbital_radius_km();
    let theta = spec.slot_angle();
    // sin φ = sin((π − θ)/2) = cos(θ/2); the cosine form stays finite at the
    // antipodal edge θ = π, where the subtraction would round to sin 0 = 0.
    Ok(r * theta.sin() / (0.5 * theta).cos())
}

/// Shortest separation between satellites of adjacent orbital planes.
///
/// With one satellite directly above the pole shared by the two planes, the
/// nearest satellite of the adjacent plane sits half an in-plane slot away,
/// so the same law-of-sines triangle applies with θ/2 in place of θ:
/// `d = r·sin(θ/2) / sin((π − θ/2)/2)`. The result is independent of the
/// plane rotation because the pole lies on every plane's axis circle.
pub fn nearest_distance(spec: &ConstellationSpec) -> Result<f64> {
    spec.validate()?;
    let r = spec.orbital_radius_km();
    let half_theta = 0.5 * spec.slot_angle();
    // Same cosine form for the half-slot triangle: sin((π − θ/2)/2) = cos(θ/4).
    Ok(r * half_theta.sin() / (0.5 * half_theta).cos())
}

/// Longest separation between neighbouring satellites of adjacent planes,
/// attained farthest from the planes' shared pole.
///
/// Let P be the midpoint of the chord joining the two same-plane satellites
/// that straddle the equator of the pair; `|OP| = √(r² − (d_intra/2)²)` by
/// Pythagoras. The adjacent-plane satellite S sits on the equator at the
/// plane rotation Ψ, so `d_SP² = r² + |OP|² − 2r|OP|cos Ψ` by the law of
/// cosines, and the full distance closes the right triangle through P:
/// `d = √(d_SP² + (d_intra/2)²)`.
pub fn farthest_distance(spec: &ConstellationSpec) -> Result<f64> {
    spec.validate()?;
    let r = spec.orbital_radius_km();
    let half_chord = 0.5 * intra_plane_distance(spec)?;
    farthest_given_rotation(r, half_chord, spec.plane_angle())
}

/// Farthest-distance core, parameterised by the plane rotation directly so
/// the degenerate co-planar case (Ψ = 0) is testable.
fn farthest_given_rotation(r: f64, half_chord: f64, psi: f64) -> Result<f64> {
    let op_sq = r * r - half_chord * half_chord;
    if op_sq < -1e-9 * r * r {
        return Err(Error::InvalidConfig(format!(
            "half the intra-plane separation ({half_chord} km) exceeds the \
             orbital radius ({r} km); shell is non-physical"
        )));
    }
    // Clamp the tiny negative that exact half-circle spacing can round to.
    let op = op_sq.max(0.0).sqrt();
    let d_sp_sq = r * r + op * op - 2.0 * r * op * psi.cos();
    Ok((d_sp_sq + half_chord * half_chord).sqrt())
}

/// All three distances bundled.
pub fn distance_set(spec: &ConstellationSpec) -> Result<DistanceSet> {
    let set = DistanceSet {
        d_intra_km: intra_plane_distance(spec)?,
        d_nearest_km: nearest_distance(spec)?,
        d_farthest_km: farthest_distance(spec)?,
    };
    debug_assert!(set.d_nearest_km <= set.d_farthest_km);
    debug_assert!(set.d_intra_km > 0.0 && set.d_intra_km < 2.0 * spec.orbital_radius_km());
    Ok(set)
}

// ---------------------------------------------------------------------------
