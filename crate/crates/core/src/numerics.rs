//! Shared numerical machinery: Gaussian error/tail functions, exponentially
//! scaled modified Bessel functions, and Gauss–Legendre quadrature in both
//! fixed-order and tolerance-driven adaptive forms.
//!
//! The Bessel functions are provided in the scaled form `e^{-x} I_n(x)` so
//! downstream formulas (notably the degree-1/2 Laguerre polynomial at large
//! negative argument) can be evaluated without overflow for any shape factor.

use crate::{Error, Result};
use std::sync::OnceLock;

// ---------------------------------------------------------------------------
// Error function and Gaussian tail
// ---------------------------------------------------------------------------

/// Error function erf(x).
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function erfc(x) = 1 − erf(x), accurate in the tail.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Gaussian tail probability Q(x) = P(Z > x) for Z ~ N(0, 1).
///
/// Evaluated as erfc(x/√2)/2, which stays accurate far into the tail where
/// `1 − Φ(x)` would cancel catastrophically.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

// ---------------------------------------------------------------------------
// Modified Bessel functions (exponentially scaled)
// ---------------------------------------------------------------------------

/// Where the power series hands over to the large-argument asymptotic series.
/// At x = 40 the series needs ~55 all-positive terms (no cancellation) and the
/// asymptotic expansion has already bottomed out near f64 epsilon, so both
/// branches are full-precision at the seam.
const BESSEL_SERIES_CUTOFF: f64 = 40.0;

/// Exponentially scaled modified Bessel function of order zero,
/// `i0e(x) = e^{-x}·I0(x)`, for x ≥ 0.
pub fn i0e(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "i0e defined here for x >= 0 only");
    if x <= BESSEL_SERIES_CUTOFF {
        // I0(x) = Σ_k (x²/4)^k / (k!)² — every term positive.
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > f64::EPSILON * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-x).exp()
    } else {
        // I0(x) ~ e^x/√(2πx) · Σ_k a_k with a_{k+1} = a_k·(2k+1)²/(8x(k+1)).
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        while term > f64::EPSILON * sum && k < 30.0 {
            term *= (2.0 * k + 1.0) * (2.0 * k + 1.0) / (8.0 * x * (k + 1.0));
            sum += term;
            k += 1.0;
        }
        sum / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

/// Exponentially scaled modified Bessel function of order one,
/// `i1e(x) = e^{-x}·I1(x)`, for x ≥ 0.
pub fn i1e(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "i1e defined here for x >= 0 only");
    if x <= BESSEL_SERIES_CUTOFF {
        // I1(x) = (x/2) Σ_k (x²/4)^k / (k!·(k+1)!) — every term positive.
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > f64::EPSILON * sum {
            term *= q / (k * (k + 1.0));
            sum += term;
            k += 1.0;
        }
        0.5 * x * sum * (-x).exp()
    } else {
        // I1(x) ~ e^x/√(2πx) · Σ_k b_k with b_{k+1} = b_k·((2k+1)²−4)/(8x(k+1));
        // after b_1 the terms are negative and shrink monotonically.
        let mut term: f64 = 1.0;
        let mut sum: f64 = 1.0;
        let mut k = 0.0;
        while term.abs() > f64::EPSILON * sum.abs() && k < 30.0 {
            let num = (2.0 * k + 1.0) * (2.0 * k + 1.0) - 4.0;
            term *= num / (8.0 * x * (k + 1.0));
            sum += term;
            k += 1.0;
        }
        sum / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

// ---------------------------------------------------------------------------
// Gauss–Legendre quadrature
// ---------------------------------------------------------------------------

/// A Gauss–Legendre rule: nodes and weights on the reference interval [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Build an n-point rule by Newton iteration on the Legendre polynomial
    /// Pₙ, seeded with the Chebyshev-based estimate of each root.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Evaluate Pₙ(x) and Pₙ′(x) by the three-term recurrence.
                let mut p0 = 1.0;
                let mut p1 = x;
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let p = if n == 1 { x } else { p1 };
                let pm1 = if n == 1 { 1.0 } else { p0 };
                dp = nf * (x * p - pm1) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() <= 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            // The middle root of an odd-order rule is exactly zero, with
            // weight 2 / P′ₙ(0)² where P′ₙ(0) = n·P_{n−1}(0).
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = (-(kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = nf * p0;
            nodes[n / 2] = 0.0;
            weights[n / 2] = 2.0 / (dp * dp);
        }
        GaussLegendre { nodes, weights }
    }

    /// Number of nodes in the rule.
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes on [−1, 1], ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights matching [`Self::nodes`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrate `f` over [a, b] with this rule.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }
}

/// Shared rules for the orders the adaptive integrator and the BER
/// evaluations use; built once and reused.
pub fn shared_rule(n: usize) -> &'static GaussLegendre {
    static RULES: OnceLock<Vec<(usize, GaussLegendre)>> = OnceLock::new();
    let rules = RULES.get_or_init(|| {
        [16usize, 32, 64, 128]
            .iter()
            .map(|&n| (n, GaussLegendre::new(n)))
            .collect()
    });
    rules
        .iter()
        .find(|(order, _)| *order == n)
        .map(|(_, rule)| rule)
        .unwrap_or_else(|| panic!("no shared rule of order {n}; use GaussLegendre::new"))
}

/// Adaptive Gauss–Legendre integration of `f` over [a, b] to a relative
/// tolerance, by recursive panel bisection with an embedded 16/32-point
/// error estimate.
///
/// The interval is first cut into a uniform mesh whose summed per-panel
/// magnitudes give a robust scale estimate (a single whole-interval rule can
/// miss a narrow feature entirely and return a meaningless magnitude). Each
/// mesh panel is then refined recursively: a panel is accepted when its 16-
/// vs 32-point discrepancy is below `rel_tol` times the larger of the panel
/// value and the panel's width-proportional share of that scale, so narrow
/// features are resolved while panels that contribute nothing exit early.
pub fn integrate_adaptive(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<f64> {
    const MESH: usize = 16;
    const MAX_DEPTH: u32 = 36;
    let coarse = shared_rule(16);
    let fine = shared_rule(32);
    let width = b - a;
    let edge = |k: usize| a + width * (k as f64 / MESH as f64);
    let mut whole = 0.0;
    for k in 0..MESH {
        whole += fine.integrate(edge(k), edge(k + 1), &mut *f).abs();
    }

    #[allow(clippy::too_many_arguments)] // internal recursion; the state is the argument list
    fn recurse(
        f: &mut impl FnMut(f64) -> f64,
        a: f64,
        b: f64,
        rel_tol: f64,
        whole: f64,
        total_width: f64,
        coarse: &GaussLegendre,
        fine: &GaussLegendre,
        depth: u32,
    ) -> Result<f64> {
        let i_coarse = coarse.integrate(a, b, &mut *f);
        let i_fine = fine.integrate(a, b, &mut *f);
        let scale = i_fine.abs().max(whole * (b - a) / total_width);
        if (i_fine - i_coarse).abs() <= rel_tol * scale {
            return Ok(i_fine);
        }
        if depth == 0 {
            return Err(Error::Numerical(format!(
                "adaptive quadrature failed to reach relative tolerance {rel_tol:.1e} \
                 on panel [{a:.6e}, {b:.6e}]"
            )));
        }
        let mid = 0.5 * (a + b);
        let left = recurse(
            f,
            a,
            mid,
            rel_tol,
            whole,
            total_width,
            coarse,
            fine,
            depth - 1,
        )?;
        let right = recurse(
            f,
            mid,
            b,
            rel_tol,
            whole,
            total_width,
            coarse,
            fine,
            depth - 1,
        )?;
        Ok(left + right)
    }

    let mut total = 0.0;
    for k in 0..MESH {
        total += recurse(
            f,
            edge(k),
            edge(k + 1),
            rel_tol,
            whole,
            width,
            coarse,
            fine,
            MAX_DEPTH,
        )?;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
