//! Multi-RIS extensions of the single-reflection link: M satellites
//! reflecting *simultaneously* (independent parallel branches combined at
//! the receiver) and M satellites reflecting *consecutively* (one chained
//! path through every surface).
//!
//! Simultaneous combining keeps the per-element channel law of the
//! single-RIS case and only reweights the branch sums:
//!
//! ```text
//! E[A]   = (Σ_k N_k·√P_Lk) · m₁        Var[A] = (Σ_k N_k·P_Lk) · (m₂ − m₁²)
//! ```
//!
//! which requires every hop to share one misalignment law (κ, A₀) and one
//! Rician shape — heterogeneous branches are rejected rather than
//! silently averaged, because the closed form factors (κ, A₀) out of the
//! branch sum.
//!
//! The consecutive chain is modelled fully aligned (no misalignment by
//! construction) with moments
//!
//! ```text
//! E[A] = N^M·√P_L·E[α]        Var[A] = N^M·P_L·(1 − E[α]²)
//! ```
//!
//! Note the single Rician-mean factor regardless of M and the N^M (not
//! N^{2M}) variance weight: this is the published Gaussian-surrogate
//! convention, which treats the N^M product terms as independent even
//! though they share per-hop factors. The Monte Carlo tests quantify the
//! gap against the exact product-of-sums moments for small instances
//! instead of asserting it away.

use crate::fading::{rician_mean_and_ms, RicianConfig};
use crate::link::{
    bpsk_ber_single, element_moments, free_space_path_loss, AmplitudeStats, LinkBudget, SnrBudget,
};
use crate::misalignment::MisalignmentParams;
use crate::{Error, Result};
use serde::Serialize;

// ---------------------------------------------------------------------------
// Topologies
// ---------------------------------------------------------------------------

/// One parallel reflection path of a simultaneous topology: its link
/// budget plus the misalignment statistics of each hop.
#[derive(Debug, Clone, Serialize)]
pub struct SimultaneousBranch {
    pub link_budget: LinkBudget,
    pub misalignment_sr: MisalignmentParams,
    pub misalignment_rd: MisalignmentParams,
}

/// M reflection paths carrying the same signal at once, combined
/// coherently at the receiver; the Rician shape is common to all hops.
#[derive(Debug, Clone, Serialize)]
pub struct SimultaneousTopology {
    pub branches: Vec<SimultaneousBranch>,
    pub rician: RicianConfig,
}

impl SimultaneousTopology {
    pub fn validate(&self) -> Result<()> {
        if self.branches.is_empty() {
            return Err(Error::InvalidConfig(
                "simultaneous topology needs at least one branch".into(),
            ));
        }
        for branch in &self.branches {
            branch.link_budget.validate()?;
        }
        self.rician.validate()
    }
}

/// One signal reflected by M surfaces in sequence, each with N elements,
/// with the end-to-end path loss given as a single fraction; transmitter
/// and receiver are taken as fully aligned, so there is deliberately no
/// misalignment field.
#[derive(Debug, Clone, Serialize)]
pub struct ConsecutiveTopology {
    pub hop_count: u32,
    pub elements_per_ris: u32,
    pub end_to_end_path_loss: f64,
    pub rician: RicianConfig,
}

impl ConsecutiveTopology {
    pub fn validate(&self) -> Result<()> {
        if self.hop_count < 1 {
            return Err(Error::InvalidConfig(
                "consecutive topology needs hop_count ≥ 1".into(),
            ));
        }
        if self.elements_per_ris < 1 {
            return Err(Error::InvalidConfig(
                "consecutive topology needs elements_per_ris ≥ 1".into(),
            ));
        }
        let p_l = self.end_to_end_path_loss;
        if !(p_l > 0.0 && p_l <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "end_to_end_path_loss must lie in (0, 1], got {p_l}"
            )));
        }
        self.rician.validate()
    }

    /// N^M, guarded: errors instead of overflowing to infinity.
    fn element_product(&self) -> Result<f64> {
        let n = f64::from(self.elements_per_ris);
        let log2_nm = f64::from(self.hop_count) * n.log2();
        if log2_nm >= f64::MAX_EXP as f64 {
            return Err(Error::Numerical(format!(
                "N^M = {}^{} exceeds the representable range",
                self.elements_per_ris, self.hop_count
            )));
        }
        Ok(n.powi(self.hop_count as i32))
    }
}

// ---------------------------------------------------------------------------
// Simultaneous combining
// ---------------------------------------------------------------------------

/// Aggregate amplitude moments of the simultaneous topology. All hops
/// must share one misalignment law; the shapes factor out of the branch
/// sums, so the only per-branch quantities are N_k and P_Lk.
pub fn amplitude_stats_simultaneous(t: &SimultaneousTopology) -> Result<AmplitudeStats> {
    t.validate()?;
    let reference = &t.branches[0].misalignment_sr;
    for branch in &t.branches {
        for mis in [&branch.misalignment_sr, &branch.misalignment_rd] {
            if mis.kappa != reference.kappa || mis.a0 != reference.a0 {
                return Err(Error::InvalidConfig(format!(
                    "simultaneous combining requires identical misalignment statistics on \
                     every hop; the closed form does not support mixing (κ = {}, A₀ = {}) \
                     with (κ = {}, A₀ = {})",
                    reference.kappa, reference.a0, mis.kappa, mis.a0
                )));
            }
        }
    }
    let (m1, m2) = element_moments(reference, &t.rician)?;
    let mut mean_weight = 0.0;
    let mut var_weight = 0.0;
    for branch in &t.branches {
        let p_l = free_space_path_loss(&branch.link_budget)?;
        let n = f64::from(branch.link_budget.ris_elements);
        mean_weight += n * p_l.sqrt();
        var_weight += n * p_l;
    }
    Ok(AmplitudeStats {
        mean: mean_weight * m1,
        variance: var_weight * (m2 - m1 * m1),
    })
}

/// BPSK error probability of the simultaneous topology: the same MGF
/// integral as the single-RIS link, fed with the combined moments.
pub fn bpsk_ber_simultaneous(t: &SimultaneousTopology, snr: &SnrBudget) -> Result<f64> {
    bpsk_ber_single(&amplitude_stats_simultaneous(t)?, snr)
}

// ---------------------------------------------------------------------------
// Consecutive chaining
// ---------------------------------------------------------------------------

/// Aggregate amplitude moments of the consecutive chain, in the published
/// Gaussian-surrogate convention (see module docs for its independence
/// caveat): `E[A] = N^M·√P_L·E[α]`, `Var[A] = N^M·P_L·(1 − E[α]²)`.
pub fn amplitude_stats_consecutive(t: &ConsecutiveTopology) -> Result<AmplitudeStats> {
    t.validate()?;
    let nm = t.element_product()?;
    let (alpha_mean, alpha_ms) = rician_mean_and_ms(&t.rician)?;
    let p_l = t.end_to_end_path_loss;
    Ok(AmplitudeStats {
        mean: nm * p_l.sqrt() * alpha_mean,
        variance: nm * p_l * (alpha_ms - alpha_mean * alpha_mean),
    })
}

/// BPSK error probability of the consecutive chain via the shared MGF
/// integral.
pub fn bpsk_ber_consecutive(t: &ConsecutiveTopology, snr: &SnrBudget) -> Result<f64> {
    bpsk_ber_single(&amplitude_stats_consecutive(t)?, snr)
}

// ---------------------------------------------------------------------------
