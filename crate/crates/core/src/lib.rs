//! Analytic and Monte Carlo evaluation of reconfigurable-intelligent-surface
//! (RIS) assisted THz inter-satellite links in LEO constellations.
//!
//! The crate models the full chain from constellation geometry to link-level
//! performance:
//!
//! - [`geometry`] — inter-satellite distances (intra-plane neighbours and the
//!   nearest/farthest satellites of an adjacent orbital plane) from shell
//!   altitude and constellation dimensions;
//! - [`misalignment`] — pointing-error fading of a Gaussian beam captured by
//!   a circular effective aperture, parameterised by jitter variance and
//!   beam divergence;
//! - [`fading`] — Rician small-scale amplitude fading, its exact mean via a
//!   half-order Laguerre evaluation, and regime classification;
//! - [`link`] — free-space path loss through an RIS, aggregate-amplitude
//!   statistics across the surface's elements, the Gaussian-approximation
//!   SNR moment-generating function, BPSK bit error probability, and the
//!   achievable-rate helpers in [`rate`];
//! - [`multi_ris`] — simultaneous (parallel) and consecutive (serial)
//!   multi-surface topologies reduced to the same Gaussian machinery;
//! - [`monte_carlo`] — a semi-analytic simulator that redraws every random
//!   factor per trial and averages conditional error probabilities, used to
//!   validate each analytic result;
//! - [`scenario`] / [`output`] — TOML-driven sweep configuration and CSV
//!   emission for the `ris-isl` command-line front end.
//!
//! Numerical plumbing (error functions, scaled Bessel evaluations,
//! Gauss–Legendre rules and an adaptive integrator) lives in [`numerics`].

// Domain guards are written `if !(x <= bound)` on purpose: the negation
// rejects NaN (which fails every comparison) together with out-of-range
// values, where `x > bound` alone would let NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fading;
pub mod geometry;
pub mod link;
pub mod misalignment;
pub mod monte_carlo;
pub mod multi_ris;
pub mod numerics;
pub mod output;
pub mod rate;
pub mod scenario;

use std::path::PathBuf;

/// Crate-wide error type.
///
/// Variants map onto the process exit-code categories the CLI reports:
/// configuration and parse problems exit with 2, numerical failures with 3,
/// and I/O failures with 4.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A configuration value is outside its documented domain.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Input text (TOML, CLI argument) could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// An iterative numerical procedure failed to converge or produced a
    /// non-finite value.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A file could not be read or written.
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for this error's category: 2 for configuration and
    /// parse errors, 3 for numerical failures, 4 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::Parse(_) => 2,
            Error::Numerical(_) => 3,
            Error::Io { .. } => 4,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
