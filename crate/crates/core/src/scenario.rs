//! Scenario-driven sweeps: one TOML document names a constellation
//! (preset or explicit shell), an antenna, the fading environment, a link
//! topology, a single sweep axis, and an optional Monte Carlo block;
//! [`run_sweep`] executes it into a [`SweepResult`] ready for CSV output.
//!
//! Reproducibility contract: a scenario plus a seed determines the
//! output byte-for-byte, independent of worker count — analytic rows are
//! closed-form and the simulator's trial tree is scheduling-invariant.
//! Every result embeds a hash of the canonically re-serialized scenario
//! so an artifact can be traced back to its exact configuration.
//!
//! Conventions baked into the resolution step:
//!
//! - misalignment statistics are always evaluated at the intra-plane
//!   distance of the chosen constellation, the reference geometry; the
//!   configured hop distances affect only the path loss (simultaneous
//!   branches then share one misalignment law, as the closed form
//!   requires);
//! - `jitter_variance_m2 = 0` selects the fully-aligned idealisation
//!   (ζ ≡ 1), not a point mass at A₀ — the aligned reference curves;
//! - consecutive chains model aligned terminals, so they require
//!   `jitter_variance_m2 = 0` and default their end-to-end path loss to
//!   the symmetric intra-plane single-surface value.

use crate::fading::RicianConfig;
use crate::geometry::{distance_set, ConstellationSpec, DistanceSet};
use crate::link::{free_space_path_loss, pt_over_n0_for_target_ber, LinkBudget, SnrBudget};
use crate::misalignment::{misalignment_params, AntennaConfig, MisalignmentParams};
use crate::monte_carlo::{semi_analytic_ber, semi_analytic_ber_multi, McConfig, Topology};
use crate::multi_ris::{ConsecutiveTopology, SimultaneousBranch, SimultaneousTopology};
use crate::output::{Cell, SweepResult};
use crate::rate::{rate_surface, RateGrid, RateMode};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Hard cap on generated sweep rows, guarding against step sizes that
/// would enumerate millions of points.
const MAX_SWEEP_ROWS: usize = 100_000;

// ---------------------------------------------------------------------------
// Scenario schema
// ---------------------------------------------------------------------------

/// A complete sweep description. Scalar knobs come before the nested
/// tables so the canonical TOML re-serialization is well-formed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Rician K-factor shared by every hop (the `rician_K` spelling is
    /// accepted on input).
    #[serde(default = "default_rician_k", alias = "rician_K")]
    pub rician_k: f64,

    /// Pointing-jitter variance per Cartesian axis at the receiver
    /// plane, m². Zero selects the fully-aligned idealisation (ζ ≡ 1).
    pub jitter_variance_m2: f64,

    /// Transmit power over noise density, dB·Hz. Required by every axis
    /// except the power sweep, which supplies it per row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pt_over_n0_db: Option<f64>,

    /// Rate functional used by distance sweeps.
    #[serde(default)]
    pub rate_mode: RateMode,

    /// Constellation preset name (`"starlink"`, `"iridium"`) or an
    /// explicit shell description.
    pub constellation: ConstellationChoice,

    /// Carrier and antenna parameters; an absent or partial table is
    /// filled from the defaults (350 GHz, 30 dBi).
    #[serde(default)]
    pub antenna: AntennaConfig,

    pub topology: TopologyConfig,

    pub sweep: SweepSpec,

    /// Monte Carlo estimation; the `mc_ber`/`mc_stderr` columns appear
    /// iff this block is present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McConfig>,
}

fn default_rician_k() -> f64 {
    10.0
}

/// Either a named preset embedded in the binary or a custom shell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstellationChoice {
    Preset(String),
    Custom(ConstellationSpec),
}

impl ConstellationChoice {
    /// The concrete shell, validated.
    pub fn resolve(&self) -> Result<ConstellationSpec> {
        match self {
            ConstellationChoice::Preset(name) => match name.as_str() {
                "starlink" => Ok(ConstellationSpec::starlink()),
                "iridium" => Ok(ConstellationSpec::iridium()),
                other => Err(Error::InvalidConfig(format!(
                    "unknown constellation preset {other:?}; known presets: starlink, iridium"
                ))),
            },
            ConstellationChoice::Custom(spec) => {
                spec.validate()?;
                Ok(*spec)
            }
        }
    }

    fn label(&self) -> String {
        match self {
            ConstellationChoice::Preset(name) => name.clone(),
            ConstellationChoice::Custom(_) => "custom".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyKind {
    Single,
    Simultaneous,
    Consecutive,
}

impl TopologyKind {
    fn name(self) -> &'static str {
        match self {
            TopologyKind::Single => "single",
            TopologyKind::Simultaneous => "simultaneous",
            TopologyKind::Consecutive => "consecutive",
        }
    }
}

/// Link layout. One flat table whose optional fields belong to specific
/// kinds; setting a field its kind does not use is an error, so a typoed
/// scenario fails loudly instead of being silently reinterpreted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    pub kind: TopologyKind,

    /// Elements per surface.
    pub ris_elements: u32,

    /// Reflection efficiency ε_p ∈ (0, 1] of each element.
    #[serde(default = "default_efficiency")]
    pub ris_efficiency: f64,

    /// `single` only: hop distances in km; each defaults to the
    /// intra-plane distance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_sr_km: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_rd_km: Option<f64>,

    /// `simultaneous` only: number of parallel branches.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_count: Option<u32>,

    /// `simultaneous` only: per-branch `[d_SR, d_RD]` in km; defaults to
    /// every branch at the intra-plane distance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_distances_km: Option<Vec<[f64; 2]>>,

    /// `consecutive` only: number of chained surfaces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hop_count: Option<u32>,

    /// `consecutive` only: end-to-end path-loss fraction; defaults to
    /// the symmetric intra-plane single-surface value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_to_end_path_loss: Option<f64>,
}

fn default_efficiency() -> f64 {
    1.0
}

impl TopologyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ris_elements < 1 {
            return Err(Error::InvalidConfig(
                "topology.ris_elements must be at least 1".into(),
            ));
        }
        if !(self.ris_efficiency > 0.0 && self.ris_efficiency <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "topology.ris_efficiency must be in (0, 1], got {}",
                self.ris_efficiency
            )));
        }
        self.reject_irrelevant_fields()?;
        match self.kind {
            TopologyKind::Single => {
                for (name, d) in [("d_sr_km", self.d_sr_km), ("d_rd_km", self.d_rd_km)] {
                    if let Some(d) = d {
                        if !(d > 0.0 && d.is_finite()) {
                            return Err(Error::InvalidConfig(format!(
                                "topology.{name} must be positive and finite, got {d}"
                            )));
                        }
                    }
                }
            }
            TopologyKind::Simultaneous => {
                let count = self.branch_count.ok_or_else(|| {
                    Error::InvalidConfig(
                        "topology.branch_count is required for kind = \"simultaneous\"".into(),
                    )
                })?;
                if count < 1 {
                    return Err(Error::InvalidConfig(
                        "topology.branch_count must be at least 1".into(),
                    ));
                }
                if let Some(distances) = &self.branch_distances_km {
                    if distances.len() != count as usize {
                        return Err(Error::InvalidConfig(format!(
                            "topology.branch_distances_km has {} entries but branch_count is {count}",
                            distances.len()
                        )));
                    }
                    for pair in distances {
                        for d in pair {
                            if !(*d > 0.0 && d.is_finite()) {
                                return Err(Error::InvalidConfig(format!(
                                    "topology.branch_distances_km entries must be positive \
                                     and finite, got {d}"
                                )));
                            }
                        }
                    }
                }
            }
            TopologyKind::Consecutive => {
                match self.hop_count {
                    None => {
                        return Err(Error::InvalidConfig(
                            "topology.hop_count is required for kind = \"consecutive\"".into(),
                        ))
                    }
                    Some(0) => {
                        return Err(Error::InvalidConfig(
                            "topology.hop_count must be at least 1".into(),
                        ))
                    }
                    Some(_) => {}
                }
                if let Some(p) = self.end_to_end_path_loss {
                    if !(p > 0.0 && p <= 1.0) {
                        return Err(Error::InvalidConfig(format!(
                            "topology.end_to_end_path_loss must be in (0, 1], got {p}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn reject_irrelevant_fields(&self) -> Result<()> {
        let mut stray: Vec<&str> = Vec::new();
        let mut check = |set: bool, name: &'static str| {
            if set {
                stray.push(name);
            }
        };
        match self.kind {
            TopologyKind::Single => {
                check(self.branch_count.is_some(), "branch_count");
                check(self.branch_distances_km.is_some(), "branch_distances_km");
                check(self.hop_count.is_some(), "hop_count");
                check(self.end_to_end_path_loss.is_some(), "end_to_end_path_loss");
            }
            TopologyKind::Simultaneous => {
                check(self.d_sr_km.is_some(), "d_sr_km (use branch_distances_km)");
                check(self.d_rd_km.is_some(), "d_rd_km (use branch_distances_km)");
                check(self.hop_count.is_some(), "hop_count");
                check(self.end_to_end_path_loss.is_some(), "end_to_end_path_loss");
            }
            TopologyKind::Consecutive => {
                check(self.d_sr_km.is_some(), "d_sr_km");
                check(self.d_rd_km.is_some(), "d_rd_km");
                check(self.branch_count.is_some(), "branch_count");
                check(self.branch_distances_km.is_some(), "branch_distances_km");
            }
        }
        if stray.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "topology kind \"{}\" does not accept: {}",
                self.kind.name(),
                stray.join(", ")
            )))
        }
    }
}

/// The sweep axes; spellings match the emitted column headers, with the
/// capitalized variants accepted as input aliases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    #[serde(alias = "pt_over_n0_dB")]
    PtOverN0Db,
    RisElements,
    JitterVarianceM2,
    #[serde(alias = "rician_K")]
    RicianK,
    Distance,
}

impl SweepVariable {
    /// Column-header spelling of the axis.
    pub fn column_name(self) -> &'static str {
        match self {
            SweepVariable::PtOverN0Db => "pt_over_n0_dB",
            SweepVariable::RisElements => "ris_elements",
            SweepVariable::JitterVarianceM2 => "jitter_variance_m2",
            SweepVariable::RicianK => "rician_K",
            SweepVariable::Distance => "distance",
        }
    }
}

/// One sweep axis. `step` is additive for the linear axes, a log₂
/// increment for `ris_elements` (default 1, i.e. doubling), and the
/// grid-point count per axis for `distance` (default 8).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// Free-text unit label, carried into the output metadata.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

// ---------------------------------------------------------------------------
// Parsing, validation, hashing
// ---------------------------------------------------------------------------

/// Parse a TOML scenario document and validate it, applying the
/// documented defaults. Unknown keys anywhere are errors.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let scenario: Scenario =
        toml::from_str(text).map_err(|e| Error::Parse(format!("scenario: {e}")))?;
    scenario.validate()?;
    Ok(scenario)
}

/// Hash of the canonically re-serialized scenario (16 hex digits), so
/// two differently-formatted files describing the same configuration
/// share an identifier.
pub fn scenario_hash(scenario: &Scenario) -> Result<String> {
    let canonical = toml::to_string(scenario)
        .map_err(|e| Error::Parse(format!("re-serializing scenario: {e}")))?;
    let digest = Sha256::digest(canonical.as_bytes());
    Ok(digest[..8].iter().map(|b| format!("{b:02x}")).collect())
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.constellation.resolve()?;
        self.antenna.validate()?;
        if !(self.jitter_variance_m2 >= 0.0 && self.jitter_variance_m2.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "jitter_variance_m2 must be nonnegative and finite, got {}",
                self.jitter_variance_m2
            )));
        }
        RicianConfig::new(self.rician_k).validate()?;
        if let Some(pt) = self.pt_over_n0_db {
            if !pt.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "pt_over_n0_db must be finite, got {pt}"
                )));
            }
        }
        self.topology.validate()?;
        if self.topology.kind == TopologyKind::Consecutive && self.jitter_variance_m2 != 0.0 {
            return Err(Error::InvalidConfig(
                "consecutive chains model aligned terminals; set jitter_variance_m2 = 0".into(),
            ));
        }
        if let Some(mc) = &self.mc {
            mc.validate()?;
        }
        self.validate_sweep()
    }

    fn validate_sweep(&self) -> Result<()> {
        let s = &self.sweep;
        let axis = s.variable.column_name();
        let need = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| {
                Error::InvalidConfig(format!("sweep.{name} is required for the {axis} axis"))
            })
        };
        let need_fixed_power = || {
            if self.pt_over_n0_db.is_none() {
                Err(Error::InvalidConfig(format!(
                    "pt_over_n0_db must be set when sweeping {axis}"
                )))
            } else {
                Ok(())
            }
        };
        match s.variable {
            SweepVariable::PtOverN0Db => {
                if self.pt_over_n0_db.is_some() {
                    return Err(Error::InvalidConfig(
                        "pt_over_n0_db must not be fixed when it is the sweep axis".into(),
                    ));
                }
                check_linear_axis(
                    axis,
                    need("start", s.start)?,
                    need("stop", s.stop)?,
                    need("step", s.step)?,
                )
            }
            SweepVariable::RisElements => {
                need_fixed_power()?;
                let (start, stop) = (need("start", s.start)?, need("stop", s.stop)?);
                let step = s.step.unwrap_or(1.0);
                if !(start >= 1.0 && start.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "sweep.start must be a positive element count, got {start}"
                    )));
                }
                if !(stop >= start && stop.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "sweep.stop must be ≥ sweep.start and finite, got {stop}"
                    )));
                }
                if !(step > 0.0 && step.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "sweep.step (log₂ increment) must be positive, got {step}"
                    )));
                }
                if (stop / start).log2() / step + 1.0 > MAX_SWEEP_ROWS as f64 {
                    return Err(Error::InvalidConfig(format!(
                        "sweep enumerates more than {MAX_SWEEP_ROWS} rows"
                    )));
                }
                Ok(())
            }
            SweepVariable::JitterVarianceM2 => {
                need_fixed_power()?;
                if self.topology.kind == TopologyKind::Consecutive {
                    return Err(Error::InvalidConfig(
                        "consecutive chains model aligned terminals; \
                         the jitter_variance_m2 axis does not apply"
                            .into(),
                    ));
                }
                let start = need("start", s.start)?;
                if start < 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "sweep.start must be a nonnegative variance, got {start}"
                    )));
                }
                check_linear_axis(axis, start, need("stop", s.stop)?, need("step", s.step)?)
            }
            SweepVariable::RicianK => {
                need_fixed_power()?;
                let start = need("start", s.start)?;
                if start < 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "sweep.start must be a nonnegative K-factor, got {start}"
                    )));
                }
                check_linear_axis(axis, start, need("stop", s.stop)?, need("step", s.step)?)
            }
            SweepVariable::Distance => {
                need_fixed_power()?;
                if self.topology.kind != TopologyKind::Simultaneous
                    || self.topology.branch_count != Some(2)
                {
                    return Err(Error::InvalidConfig(
                        "the distance axis sweeps the second branch of a two-branch \
                         simultaneous topology; set kind = \"simultaneous\" and \
                         branch_count = 2"
                            .into(),
                    ));
                }
                if let Some(points) = s.step {
                    if !((1.0..=256.0).contains(&points) && points.fract() == 0.0) {
                        return Err(Error::InvalidConfig(format!(
                            "sweep.step on the distance axis is the grid-point count per \
                             side and must be a whole number in 1..=256, got {points}"
                        )));
                    }
                }
                match (s.start, s.stop) {
                    (None, None) => Ok(()),
                    (Some(lo), Some(hi)) => {
                        if lo > 0.0 && lo <= hi && hi.is_finite() {
                            Ok(())
                        } else {
                            Err(Error::InvalidConfig(format!(
                                "distance span must satisfy 0 < start ≤ stop, got [{lo}, {hi}]"
                            )))
                        }
                    }
                    _ => Err(Error::InvalidConfig(
                        "sweep.start and sweep.stop must be set together on the \
                         distance axis (km overrides of the cross-plane span)"
                            .into(),
                    )),
                }
            }
        }
    }
}

fn check_linear_axis(axis: &str, start: f64, stop: f64, step: f64) -> Result<()> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "sweep bounds on {axis} must be finite, got start {start}, stop {stop}, step {step}"
        )));
    }
    if stop < start {
        return Err(Error::InvalidConfig(format!(
            "sweep.stop ({stop}) must be ≥ sweep.start ({start})"
        )));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "sweep.step must be positive, got {step}"
        )));
    }
    if (stop - start) / step + 1.0 > MAX_SWEEP_ROWS as f64 {
        return Err(Error::InvalidConfig(format!(
            "sweep enumerates more than {MAX_SWEEP_ROWS} rows"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Resolution
// ---------------------------------------------------------------------------

/// Constellation facts every row of a sweep shares.
struct Baseline {
    distances: DistanceSet,
    intra_m: f64,
}

impl Baseline {
    fn resolve(scenario: &Scenario) -> Result<Baseline> {
        let spec = scenario.constellation.resolve()?;
        let distances = distance_set(&spec)?;
        Ok(Baseline {
            distances,
            intra_m: distances.d_intra_km * 1e3,
        })
    }
}

impl Scenario {
    /// Misalignment at the reference (intra-plane) geometry; zero jitter
    /// selects the fully-aligned idealisation.
    fn misalignment_at_reference(
        &self,
        base: &Baseline,
        jitter_m2: f64,
    ) -> Result<MisalignmentParams> {
        if jitter_m2 == 0.0 {
            Ok(MisalignmentParams::fully_aligned())
        } else {
            misalignment_params(&self.antenna, base.intra_m, jitter_m2)
        }
    }

    /// The concrete topology at one point of the sweep: the axes that
    /// rebuild it (element count, jitter, K) come in as arguments, all
    /// other knobs from the scenario.
    fn topology_with(
        &self,
        base: &Baseline,
        elements: u32,
        jitter_m2: f64,
        k_factor: f64,
    ) -> Result<Topology> {
        let t = &self.topology;
        let misalignment = self.misalignment_at_reference(base, jitter_m2)?;
        let rician = RicianConfig::new(k_factor);
        let budget = |d_sr_m: f64, d_rd_m: f64| LinkBudget {
            antenna: self.antenna,
            d_sr_m,
            d_rd_m,
            ris_efficiency: t.ris_efficiency,
            ris_elements: elements,
        };
        let topology = match t.kind {
            TopologyKind::Single => Topology::Single {
                link_budget: budget(
                    t.d_sr_km.map_or(base.intra_m, |km| km * 1e3),
                    t.d_rd_km.map_or(base.intra_m, |km| km * 1e3),
                ),
                misalignment,
                rician,
            },
            TopologyKind::Simultaneous => {
                let count = t.branch_count.expect("validated") as usize;
                let intra_km = [base.intra_m / 1e3; 2];
                let branches = (0..count)
                    .map(|i| {
                        let [d_sr_km, d_rd_km] =
                            t.branch_distances_km.as_ref().map_or(intra_km, |d| d[i]);
                        SimultaneousBranch {
                            link_budget: budget(d_sr_km * 1e3, d_rd_km * 1e3),
                            misalignment_sr: misalignment,
                            misalignment_rd: misalignment,
                        }
                    })
                    .collect();
                Topology::Simultaneous(SimultaneousTopology { branches, rician })
            }
            TopologyKind::Consecutive => {
                let end_to_end_path_loss = match t.end_to_end_path_loss {
                    Some(p) => p,
                    None => free_space_path_loss(&budget(base.intra_m, base.intra_m))?,
                };
                Topology::Consecutive(ConsecutiveTopology {
                    hop_count: t.hop_count.expect("validated"),
                    elements_per_ris: elements,
                    end_to_end_path_loss,
                    rician,
                })
            }
        };
        topology.validate()?;
        Ok(topology)
    }
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

/// Execute a validated scenario into a result table. Rows come out in
/// ascending axis order; rows whose evaluation fails become error
/// markers rather than aborting the sweep.
pub fn run_sweep(scenario: &Scenario) -> Result<SweepResult> {
    scenario.validate()?;
    let base = Baseline::resolve(scenario)?;
    let mut result = match scenario.sweep.variable {
        SweepVariable::Distance => distance_sweep(scenario, &base)?,
        axis => ber_sweep(scenario, &base, axis)?,
    };

    let mut meta: Vec<(String, String)> = vec![
        ("tool_version".into(), env!("CARGO_PKG_VERSION").into()),
        ("scenario_hash".into(), scenario_hash(scenario)?),
        ("constellation".into(), scenario.constellation.label()),
        (
            "sweep_variable".into(),
            scenario.sweep.variable.column_name().into(),
        ),
    ];
    if let Some(unit) = &scenario.sweep.unit {
        meta.push(("sweep_unit".into(), unit.clone()));
    }
    if let Some(mc) = &scenario.mc {
        meta.push(("mc_trials".into(), mc.trials.to_string()));
        meta.push(("mc_seed".into(), mc.seed.to_string()));
    }
    result.metadata.splice(0..0, meta);
    Ok(result)
}

/// Linear grid start, start+step, … capped at stop (with a relative
/// tolerance so `stop` itself survives rounding).
fn linear_values(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let span = (stop - start) / step;
    let count = (span + 1e-9 * span.abs().max(1.0)).floor() as usize + 1;
    (0..count).map(|i| start + step * i as f64).collect()
}

/// Log₂-spaced element counts start·2^(i·step), as reals; conversion to
/// an integer count happens per row so out-of-range values become row
/// errors instead of killing the sweep.
fn element_values(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    while out.len() < MAX_SWEEP_ROWS {
        let v = start * 2f64.powf(step * out.len() as f64);
        if v > stop * (1.0 + 1e-12) {
            break;
        }
        out.push(v);
    }
    out
}

fn element_count(v: f64) -> Result<u32> {
    let n = v.round();
    if n >= 1.0 && n <= u32::MAX as f64 {
        Ok(n as u32)
    } else {
        Err(Error::InvalidConfig(format!(
            "ris_elements value {v} is outside the supported 1..={} range",
            u32::MAX
        )))
    }
}

fn ber_sweep(scenario: &Scenario, base: &Baseline, axis: SweepVariable) -> Result<SweepResult> {
    let s = &scenario.sweep;
    let with_mc = scenario.mc.is_some();
    let mut header = vec![axis.column_name().to_string(), "analytic_ber".to_string()];
    if with_mc {
        header.push("mc_ber".into());
        header.push("mc_stderr".into());
    }
    let mut result = SweepResult::new(header);
    // Validation guaranteed the fields each arm unwraps below.
    match axis {
        SweepVariable::PtOverN0Db => {
            let values = linear_values(s.start.unwrap(), s.stop.unwrap(), s.step.unwrap());
            let topology = scenario.topology_with(
                base,
                scenario.topology.ris_elements,
                scenario.jitter_variance_m2,
                scenario.rician_k,
            )?;
            let snrs: Vec<SnrBudget> = values.iter().map(|&db| SnrBudget::from_db(db)).collect();
            let analytic: Vec<Result<f64>> = snrs
                .par_iter()
                .map(|snr| topology.analytic_ber(snr))
                .collect();
            // The channel draws are power-independent, so the whole axis
            // shares one simulation pass.
            let estimates = match &scenario.mc {
                Some(mc) => Some(semi_analytic_ber_multi(&topology, &snrs, mc)?),
                None => None,
            };
            for (i, (&db, ber)) in values.iter().zip(analytic).enumerate() {
                let mut cells = vec![Cell::Float(db)];
                match ber {
                    Ok(p) => {
                        cells.push(Cell::Sci(p));
                        if let Some(est) = &estimates {
                            cells.push(Cell::Sci(est[i].value));
                            cells.push(Cell::Sci(est[i].std_error));
                        }
                        result.push_row(cells);
                    }
                    Err(e) => {
                        cells.resize(result.header.len(), Cell::Missing);
                        result.push_error_row(cells, e.to_string());
                    }
                }
            }
        }
        SweepVariable::RisElements | SweepVariable::JitterVarianceM2 | SweepVariable::RicianK => {
            let snr = SnrBudget::from_db(scenario.pt_over_n0_db.unwrap());
            let values = match axis {
                SweepVariable::RisElements => {
                    element_values(s.start.unwrap(), s.stop.unwrap(), s.step.unwrap_or(1.0))
                }
                _ => linear_values(s.start.unwrap(), s.stop.unwrap(), s.step.unwrap()),
            };
            let eval = |&v: &f64| -> Result<(f64, Option<crate::monte_carlo::McEstimate>)> {
                let (elements, jitter, k) = match axis {
                    SweepVariable::RisElements => (
                        element_count(v)?,
                        scenario.jitter_variance_m2,
                        scenario.rician_k,
                    ),
                    SweepVariable::JitterVarianceM2 => {
                        (scenario.topology.ris_elements, v, scenario.rician_k)
                    }
                    _ => (
                        scenario.topology.ris_elements,
                        scenario.jitter_variance_m2,
                        v,
                    ),
                };
                let topology = scenario.topology_with(base, elements, jitter, k)?;
                let analytic = topology.analytic_ber(&snr)?;
                let estimate = match &scenario.mc {
                    Some(mc) => Some(semi_analytic_ber(&topology, &snr, mc)?),
                    None => None,
                };
                Ok((analytic, estimate))
            };
            // With simulation each row is already parallel inside; without,
            // parallelize across rows. Either way values are
            // scheduling-invariant, so the output bytes do not depend on
            // the choice.
            let rows: Vec<Result<_>> = if with_mc {
                values.iter().map(eval).collect()
            } else {
                values.par_iter().map(eval).collect()
            };
            for (&v, row) in values.iter().zip(rows) {
                let axis_cell = if axis == SweepVariable::RisElements {
                    match element_count(v) {
                        Ok(n) => Cell::Int(n as i64),
                        Err(_) => Cell::Float(v),
                    }
                } else {
                    Cell::Float(v)
                };
                let mut cells = vec![axis_cell];
                match row {
                    Ok((analytic, estimate)) => {
                        cells.push(Cell::Sci(analytic));
                        if let Some(est) = estimate {
                            cells.push(Cell::Sci(est.value));
                            cells.push(Cell::Sci(est.std_error));
                        }
                        result.push_row(cells);
                    }
                    Err(e) => {
                        cells.resize(result.header.len(), Cell::Missing);
                        result.push_error_row(cells, e.to_string());
                    }
                }
            }
        }
        SweepVariable::Distance => unreachable!("routed to distance_sweep"),
    }
    Ok(result)
}

fn distance_sweep(scenario: &Scenario, base: &Baseline) -> Result<SweepResult> {
    let s = &scenario.sweep;
    let points = s.step.map_or(8, |p| p as usize);
    let grid = match (s.start, s.stop) {
        (Some(lo_km), Some(hi_km)) => {
            let (lo, hi) = (lo_km * 1e3, hi_km * 1e3);
            let values: Vec<f64> = if points <= 1 {
                vec![lo]
            } else {
                (0..points)
                    .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
                    .collect()
            };
            RateGrid {
                d_sr2_values_m: values.clone(),
                d_r2d_values_m: values,
                d_fixed_hop_m: base.intra_m,
                min_distance_m: lo,
                max_distance_m: hi,
            }
        }
        _ => RateGrid::from_distances(&base.distances, points),
    };
    let topology = scenario.topology_with(
        base,
        scenario.topology.ris_elements,
        scenario.jitter_variance_m2,
        scenario.rician_k,
    )?;
    let Topology::Simultaneous(sim) = topology else {
        return Err(Error::InvalidConfig(
            "the distance axis requires a simultaneous topology".into(),
        ));
    };
    let snr = SnrBudget::from_db(scenario.pt_over_n0_db.unwrap());
    rate_surface(&grid, &sim, &snr, scenario.rate_mode)
}

// ---------------------------------------------------------------------------
// Analytic-vs-simulation agreement suite
// ---------------------------------------------------------------------------

/// One agreement check: simulation re-estimates the error rate at the
/// power level the closed form says hits `analytic_ber`.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationCheck {
    pub scenario_id: String,
    pub pt_over_n0_db: f64,
    pub analytic_ber: f64,
    pub mc_ber: f64,
    /// Simulation ÷ analytic.
    pub ratio: f64,
    /// False when the estimator flagged its own tail resolution as too
    /// coarse for the target (too few trials) — such rows are reported
    /// but not judged.
    pub checkable: bool,
    pub pass: bool,
}

/// The agreement table plus the per-row verdicts behind it.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub result: SweepResult,
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Run the analytic-vs-simulation agreement suite: both presets ×
/// element counts {256, 1024} × jitter {1, 10} m² at K = 10 on
/// intra-plane hops; for each, the power levels hitting error-rate
/// targets 1e-2 … 1e-5 are found from the closed form and re-estimated
/// with `trials` simulation trials. A factor-of-two envelope is the
/// pass criterion.
pub fn validation_suite(trials: u64, seed: u64) -> Result<ValidationReport> {
    let targets = [1e-2, 1e-3, 1e-4, 1e-5];
    let mut result = SweepResult::new(vec![
        "scenario_id".into(),
        "pt_over_n0_dB".into(),
        "mc_ber".into(),
        "mc_stderr".into(),
        "analytic_ber".into(),
    ]);
    result.add_metadata("tool_version", env!("CARGO_PKG_VERSION"));
    result.add_metadata("trials", trials);
    result.add_metadata("seed", seed);
    let mut checks = Vec::new();
    let antenna = AntennaConfig::default();
    let presets = [
        ("starlink", ConstellationSpec::starlink()),
        ("iridium", ConstellationSpec::iridium()),
    ];
    for (name, spec) in presets {
        let intra_m = distance_set(&spec)?.d_intra_km * 1e3;
        for elements in [256u32, 1024] {
            for jitter_m2 in [1.0, 10.0] {
                let id = format!("{name}_n{elements}_j{jitter_m2}");
                let topology = Topology::Single {
                    link_budget: LinkBudget::symmetric_hops(antenna, intra_m, elements),
                    misalignment: misalignment_params(&antenna, intra_m, jitter_m2)?,
                    rician: RicianConfig::new(10.0),
                };
                let stats = topology.analytic_stats()?;
                let snrs = targets
                    .iter()
                    .map(|&t| pt_over_n0_for_target_ber(&stats, t))
                    .collect::<Result<Vec<_>>>()?;
                let mc = McConfig {
                    trials,
                    seed,
                    ..McConfig::default()
                };
                let estimates = semi_analytic_ber_multi(&topology, &snrs, &mc)?;
                for (snr, est) in snrs.iter().zip(estimates) {
                    let analytic = topology.analytic_ber(snr)?;
                    result.push_row(vec![
                        Cell::Text(id.clone()),
                        Cell::Float(snr.pt_over_n0_db),
                        Cell::Sci(est.value),
                        Cell::Sci(est.std_error),
                        Cell::Sci(analytic),
                    ]);
                    let ratio = est.value / analytic;
                    let checkable = !est.tail_unreliable;
                    checks.push(ValidationCheck {
                        scenario_id: id.clone(),
                        pt_over_n0_db: snr.pt_over_n0_db,
                        analytic_ber: analytic,
                        mc_ber: est.value,
                        ratio,
                        checkable,
                        pass: !checkable || (0.5..=2.0).contains(&ratio),
                    });
                }
            }
        }
    }
    Ok(ValidationReport { result, checks })
}

// ---------------------------------------------------------------------------
