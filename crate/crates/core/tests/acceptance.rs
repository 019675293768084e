//! Acceptance suite: one test per headline claim, each checked end to end
//! against its published value or independent oracle, with the wall-clock
//! budget asserted so the suite stays runnable as a routine gate. Every
//! test prints a single PASS line (visible with `--nocapture`); a failure
//! aborts with the offending numbers.

use std::time::{Duration, Instant};

use ris_isl::fading::{rician_mean_and_ms, rician_pdf, RicianConfig};
use ris_isl::geometry::{distance_set, ConstellationSpec, DistanceSet};
use ris_isl::link::{
    bpsk_ber_single, pt_over_n0_for_target_ber, snr_mgf, AmplitudeStats, LinkBudget, SnrBudget,
};
use ris_isl::misalignment::{
    misalignment_params, misalignment_pdf, AntennaConfig, MisalignmentParams,
};
use ris_isl::monte_carlo::{semi_analytic_ber_multi, McConfig, Topology};
use ris_isl::multi_ris::{
    amplitude_stats_consecutive, amplitude_stats_simultaneous, ConsecutiveTopology,
    SimultaneousBranch, SimultaneousTopology,
};
use ris_isl::numerics::integrate_adaptive;
use ris_isl::output::Cell;
use ris_isl::rate::{rate_surface, RateGrid, RateMode};
use ris_isl::scenario::validation_suite;

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn assert_budget(t0: Instant, limit: Duration, what: &str) -> Duration {
    let elapsed = t0.elapsed();
    assert!(
        elapsed <= limit,
        "{what} took {elapsed:.2?}, over its {limit:.0?} budget"
    );
    elapsed
}

/// Single-surface link on symmetric intra-plane hops, K = 10.
fn single_topology(spec: &ConstellationSpec, elements: u32, jitter_m2: f64) -> Topology {
    let antenna = AntennaConfig::default();
    let intra_m = distance_set(spec).unwrap().d_intra_km * 1e3;
    Topology::Single {
        link_budget: LinkBudget::symmetric_hops(antenna, intra_m, elements),
        misalignment: misalignment_params(&antenna, intra_m, jitter_m2).unwrap(),
        rician: RicianConfig::new(10.0),
    }
}

fn single_stats(spec: &ConstellationSpec, elements: u32, jitter_m2: f64) -> AmplitudeStats {
    single_topology(spec, elements, jitter_m2)
        .analytic_stats()
        .unwrap()
}

/// Power level whose closed-form error probability equals `target`.
fn db_at(stats: &AmplitudeStats, target: f64) -> f64 {
    pt_over_n0_for_target_ber(stats, target)
        .unwrap()
        .pt_over_n0_db
}

/// Power level at which c·E[A]² equals `c_mu_sq` — places evaluations in
/// the live region of a curve without hard-coding dB values.
fn snr_at(stats: &AmplitudeStats, c_mu_sq: f64) -> SnrBudget {
    SnrBudget::from_db(10.0 * (c_mu_sq / (stats.mean * stats.mean)).log10())
}

// ---------------------------------------------------------------------------
// 1. Constellation distance table
// ---------------------------------------------------------------------------

#[test]
fn distance_table_matches_published_values() {
    let t0 = Instant::now();
    let cases = [
        (
            "starlink",
            ConstellationSpec::starlink(),
            [945.4, 472.93, 876.57],
        ),
        (
            "iridium",
            ConstellationSpec::iridium(),
            [4034.0, 2037.8, 4162.8],
        ),
    ];
    for (name, spec, published_km) in cases {
        let d = distance_set(&spec).unwrap();
        let actual = [
            ("d_intra", d.d_intra_km),
            ("d_nearest", d.d_nearest_km),
            ("d_farthest", d.d_farthest_km),
        ];
        for ((label, value), expected) in actual.into_iter().zip(published_km) {
            let rel = ((value - expected) / expected).abs();
            assert!(
                rel <= 0.005,
                "{name} {label}: {value:.4} km vs published {expected} km (rel {rel:.2e})"
            );
        }
    }
    let e = assert_budget(t0, Duration::from_secs(1), "distance table");
    println!("PASS: both constellation distance sets within 0.5% of the published table ({e:.2?})");
}

// ---------------------------------------------------------------------------
// 2. Distribution sanity suite
// ---------------------------------------------------------------------------

#[test]
fn distribution_sanity_suite() {
    let t0 = Instant::now();

    // Misalignment pdf mass is 1 across the (κ², A₀) grid. For κ² < 1 the
    // density has an integrable singularity at the origin; substituting
    // y = A₀·t⁴ regularizes it for the quadrature.
    for kappa_sq in [0.5f64, 1.0, 2.0, 10.0, 100.0] {
        for a0 in [0.1, 0.5, 0.99] {
            let kappa = kappa_sq.sqrt();
            let p = MisalignmentParams {
                jitter_variance_m2: 0.5 / kappa_sq,
                a0,
                w_eq_m: 1.0,
                kappa,
                r_a_m: 1.0,
                r_d_m: 1.0,
            };
            let m = if kappa_sq < 1.0 { 4 } else { 1 };
            let mut integrand = |t: f64| {
                let y = a0 * t.powi(m);
                misalignment_pdf(&p, y).unwrap() * a0 * m as f64 * t.powi(m - 1)
            };
            let mass = integrate_adaptive(&mut integrand, 0.0, 1.0, 1e-12).unwrap();
            assert!(
                (mass - 1.0).abs() <= 1e-9,
                "pdf mass at κ²={kappa_sq}, A₀={a0}: {mass:.15}"
            );
        }
    }

    // Closed-form Rician mean against direct quadrature of α·f_α(α).
    for k in [0.0, 0.5, 1.0, 3.0, 7.0, 10.0, 50.0] {
        let cfg = RicianConfig::new(k);
        let (mean, _) = rician_mean_and_ms(&cfg).unwrap();
        let mut integrand = |a: f64| a * rician_pdf(&cfg, a);
        let quad = integrate_adaptive(&mut integrand, 0.0, 6.0, 1e-11).unwrap();
        let rel = ((mean - quad) / quad).abs();
        assert!(
            rel <= 1e-9,
            "Rician mean at K={k}: {mean:.15} vs {quad:.15}"
        );
    }

    // The SNR moment generating function is exactly 1 at the origin.
    for (mean, variance) in [(1.0, 0.0), (2.0, 1.0), (1e-17, 1e-35)] {
        let stats = AmplitudeStats { mean, variance };
        for db in [0.0, 100.0, 300.0] {
            let m0 = snr_mgf(&stats, &SnrBudget::from_db(db), 0.0).unwrap();
            assert!(
                (m0 - 1.0).abs() <= 1e-12,
                "MGF(0) at stats ({mean}, {variance}), {db} dB: {m0:.17}"
            );
        }
    }

    let e = assert_budget(t0, Duration::from_secs(10), "distribution sanity");
    println!(
        "PASS: pdf normalization (1e-9), Rician mean identity (1e-9), MGF(0)=1 (1e-12) ({e:.2?})"
    );
}

// ---------------------------------------------------------------------------
// 3. Simulation agrees with the closed form
// ---------------------------------------------------------------------------

#[test]
fn simulation_tracks_closed_form_across_the_matrix() {
    let t0 = Instant::now();
    let targets = [0.4, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
    let mc = McConfig {
        trials: 1_000_000,
        seed: 0xacce_5501,
        ..McConfig::default()
    };
    let mut worst: (f64, String) = (1.0, String::new());
    let mut violations: Vec<String> = Vec::new();
    for (name, spec) in [
        ("starlink", ConstellationSpec::starlink()),
        ("iridium", ConstellationSpec::iridium()),
    ] {
        for elements in [256u32, 1024] {
            for jitter_m2 in [1.0, 10.0] {
                let topology = single_topology(&spec, elements, jitter_m2);
                let stats = topology.analytic_stats().unwrap();
                let snrs: Vec<SnrBudget> = targets
                    .iter()
                    .map(|&t| pt_over_n0_for_target_ber(&stats, t).unwrap())
                    .collect();
                let estimates = semi_analytic_ber_multi(&topology, &snrs, &mc).unwrap();
                for (snr, est) in snrs.iter().zip(estimates) {
                    let analytic = topology.analytic_ber(snr).unwrap();
                    let ratio = est.value / analytic;
                    let label =
                        format!("{name} N={elements} σ²={jitter_m2} at analytic {analytic:.2e}");
                    if !(0.5..=2.0).contains(&ratio) {
                        violations.push(format!(
                            "{label}: simulated {:.3e}, ratio {ratio:.3}",
                            est.value
                        ));
                    }
                    if (ratio - 1.0).abs() > (worst.0 - 1.0).abs() {
                        worst = (ratio, label);
                    }
                }
            }
        }
    }
    let e = assert_budget(t0, Duration::from_secs(300), "oracle agreement");
    // Known limitation: the closed form moment-matches a Gaussian to the
    // aggregate amplitude, and at κ² ≈ 0.1 (Starlink reference hop, σ² = 10 m²)
    // the per-element misalignment gain is heavy-tailed enough that the
    // aggregate's mean²/variance drops to ≈ 7 at N=256 (≈ 29 at N=1024). The
    // Gaussian model then owes most of its predicted deep-tail error rate to
    // mass at non-physical negative amplitudes, while the simulated
    // (nonnegative) amplitude waterfalls; the two diverge beyond ×2 below
    // P_e ≈ 1e-2 (N=256) / 1e-4 (N=1024) even though their first two moments
    // agree to Monte Carlo precision. The assertion is kept as stated so the
    // divergence is measured, not hidden.
    assert!(
        violations.is_empty(),
        "closed form vs simulation beyond ×2 at {} of 48 points:\n  {}",
        violations.len(),
        violations.join("\n  ")
    );
    println!(
        "PASS: 1e6-trial simulation within ×2 of the closed form over P_e ∈ [1e-5, 0.4] \
         on all 8 links; worst ratio {:.3} at {} ({e:.2?})",
        worst.0, worst.1
    );
}

// ---------------------------------------------------------------------------
// 4. Element-doubling power gain
// ---------------------------------------------------------------------------

#[test]
fn element_doubling_gains_six_db() {
    let t0 = Instant::now();
    let spec = ConstellationSpec::starlink();
    let at = |elements: u32| db_at(&single_stats(&spec, elements, 1.0), 1e-4);
    let gain_db = at(1024) - at(2048);
    assert!(
        (gain_db - 6.0).abs() <= 0.3,
        "N=1024→2048 at P_e = 1e-4 gains {gain_db:.4} dB, expected 6.0 ± 0.3"
    );
    let e = assert_budget(t0, Duration::from_secs(30), "element doubling");
    println!("PASS: doubling the surface 1024→2048 gains {gain_db:.3} dB (6.0 ± 0.3) ({e:.2?})");
}

// ---------------------------------------------------------------------------
// 5. Jitter penalty
// ---------------------------------------------------------------------------

#[test]
fn jitter_penalty_is_forty_db() {
    let t0 = Instant::now();
    let spec = ConstellationSpec::starlink();
    let penalty_db = db_at(&single_stats(&spec, 1024, 10.0), 1e-3)
        - db_at(&single_stats(&spec, 1024, 1.0), 1e-3);
    assert!(
        (penalty_db - 40.0).abs() <= 5.0,
        "σ² 1→10 m² at P_e = 1e-3 costs {penalty_db:.4} dB, expected 40 ± 5"
    );
    let e = assert_budget(t0, Duration::from_secs(30), "jitter penalty");
    println!("PASS: tenfold jitter costs {penalty_db:.3} dB at P_e = 1e-3 (40 ± 5) ({e:.2?})");
}

// ---------------------------------------------------------------------------
// 6. Two equal branches ≡ one surface of twice the size
// ---------------------------------------------------------------------------

#[test]
fn two_equal_branches_match_a_doubled_surface() {
    let t0 = Instant::now();
    let spec = ConstellationSpec::starlink();
    let antenna = AntennaConfig::default();
    let intra_m = distance_set(&spec).unwrap().d_intra_km * 1e3;
    let mis = misalignment_params(&antenna, intra_m, 1.0).unwrap();
    let elements = 1024u32;

    let branch = SimultaneousBranch {
        link_budget: LinkBudget::symmetric_hops(antenna, intra_m, elements),
        misalignment_sr: mis,
        misalignment_rd: mis,
    };
    let two_branches = SimultaneousTopology {
        branches: vec![branch.clone(), branch],
        rician: RicianConfig::new(10.0),
    };
    let stats_m2 = amplitude_stats_simultaneous(&two_branches).unwrap();
    let stats_2n = single_stats(&spec, 2 * elements, 1.0);

    // Identity: the error-rate curves coincide to 1e-12 relative across
    // the whole live region.
    for c_mu_sq in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 25.0] {
        let snr = snr_at(&stats_2n, c_mu_sq);
        let a = bpsk_ber_single(&stats_m2, &snr).unwrap();
        let b = bpsk_ber_single(&stats_2n, &snr).unwrap();
        assert!(
            (a - b).abs() <= 1e-12 * b,
            "curves split at c·μ² = {c_mu_sq}: {a:.17e} vs {b:.17e}"
        );
    }

    // Power advantage over the single surface of the same size.
    let gain_db = db_at(&single_stats(&spec, elements, 1.0), 1e-3) - db_at(&stats_m2, 1e-3);
    assert!(
        (gain_db - 6.0).abs() <= 0.3,
        "second branch saves {gain_db:.4} dB at P_e = 1e-3, expected 6.0 ± 0.3"
    );
    let e = assert_budget(t0, Duration::from_secs(30), "simultaneous identity");
    println!(
        "PASS: two equal branches ≡ doubled surface to 1e-12, and save {gain_db:.3} dB \
         (6.0 ± 0.3) ({e:.2?})"
    );
}

// ---------------------------------------------------------------------------
// 7. Consecutive-chain power scaling
// ---------------------------------------------------------------------------

#[test]
fn consecutive_chain_power_scaling() {
    let t0 = Instant::now();
    let antenna = AntennaConfig::default();
    let intra_m = distance_set(&ConstellationSpec::starlink())
        .unwrap()
        .d_intra_km
        * 1e3;
    // End-to-end loss of the reference geometry, shared by every (N, M)
    // combination so the gaps isolate the array-gain effect.
    let path_loss =
        ris_isl::link::free_space_path_loss(&LinkBudget::symmetric_hops(antenna, intra_m, 1))
            .unwrap();
    let at = |elements: u32, hops: u32| {
        let stats = amplitude_stats_consecutive(&ConsecutiveTopology {
            hop_count: hops,
            elements_per_ris: elements,
            end_to_end_path_loss: path_loss,
            rician: RicianConfig::new(10.0),
        })
        .unwrap();
        db_at(&stats, 1e-4)
    };

    let chain_gain_db = at(1024, 2) - at(1024, 4);
    assert!(
        (chain_gain_db - 120.0).abs() <= 10.0,
        "M = 2→4 at N = 1024 gains {chain_gain_db:.4} dB, expected 120 ± 10"
    );
    let doubling_m2 = at(1024, 2) - at(2048, 2);
    assert!(
        (doubling_m2 - 12.0).abs() <= 0.5,
        "N-doubling at M = 2 gains {doubling_m2:.4} dB, expected 12.0 ± 0.5"
    );
    let doubling_m4 = at(1024, 4) - at(2048, 4);
    assert!(
        (doubling_m4 - 24.0).abs() <= 1.0,
        "N-doubling at M = 4 gains {doubling_m4:.4} dB, expected 24.0 ± 1.0"
    );
    let e = assert_budget(t0, Duration::from_secs(60), "consecutive scaling");
    println!(
        "PASS: chain M 2→4 gains {chain_gain_db:.2} dB (120 ± 10); N-doubling gains \
         {doubling_m2:.3} dB at M=2 (12 ± 0.5) and {doubling_m4:.3} dB at M=4 (24 ± 1) ({e:.2?})"
    );
}

// ---------------------------------------------------------------------------
// 8. Rate-surface properties
// ---------------------------------------------------------------------------

/// Two-branch topology over `spec`: branch 0 pinned at the intra-plane
/// distance, branch 1 starting there too (the surface sweep moves it).
fn two_branch_base(spec: &ConstellationSpec, jitter_m2: f64) -> SimultaneousTopology {
    let antenna = AntennaConfig::default();
    let intra_m = distance_set(spec).unwrap().d_intra_km * 1e3;
    let mis = misalignment_params(&antenna, intra_m, jitter_m2).unwrap();
    let branch = SimultaneousBranch {
        link_budget: LinkBudget::symmetric_hops(antenna, intra_m, 1024),
        misalignment_sr: mis,
        misalignment_rd: mis,
    };
    SimultaneousTopology {
        branches: vec![branch.clone(), branch],
        rician: RicianConfig::new(10.0),
    }
}

/// Amplitude stats with branch 1 parked at the surface's peak corner.
fn peak_corner_stats(spec: &ConstellationSpec, jitter_m2: f64) -> AmplitudeStats {
    let mut topology = two_branch_base(spec, jitter_m2);
    let near_m = distance_set(spec).unwrap().d_nearest_km * 1e3;
    topology.branches[1].link_budget.d_sr_m = near_m;
    topology.branches[1].link_budget.d_rd_m = near_m;
    amplitude_stats_simultaneous(&topology).unwrap()
}

/// Row-major rate matrix out of the long-format sweep rows.
fn rate_matrix(grid: &RateGrid, base: &SimultaneousTopology, snr: &SnrBudget) -> Vec<Vec<f64>> {
    let result = rate_surface(grid, base, snr, RateMode::MeanSnr).unwrap();
    let n = grid.d_r2d_values_m.len();
    result
        .rows
        .chunks(n)
        .map(|chunk| {
            chunk
                .iter()
                .map(|row| match row.cells[2] {
                    Cell::Sci(v) => v,
                    ref other => panic!("expected a rate cell, got {other:?}"),
                })
                .collect()
        })
        .collect()
}

#[test]
fn rate_surface_properties() {
    let t0 = Instant::now();
    let starlink = ConstellationSpec::starlink();
    let iridium = ConstellationSpec::iridium();
    let d_star: DistanceSet = distance_set(&starlink).unwrap();

    // Power chosen so the low-jitter surface peaks at log₂(1+31) = 5
    // bits/s/Hz, a representative operating point.
    let peak1 = peak_corner_stats(&starlink, 1.0);
    let c = 31.0 / (peak1.mean * peak1.mean + peak1.variance);
    let snr = SnrBudget::from_db(10.0 * c.log10());

    let grid = RateGrid::from_distances(&d_star, 6);
    let surface1 = rate_matrix(&grid, &two_branch_base(&starlink, 1.0), &snr);
    let surface10 = rate_matrix(&grid, &two_branch_base(&starlink, 10.0), &snr);

    // Corner maximum and monotone decay along both axes, on both surfaces.
    for surface in [&surface1, &surface10] {
        let peak = surface[0][0];
        for (i, row) in surface.iter().enumerate() {
            for (j, &rate) in row.iter().enumerate() {
                assert!(rate <= peak, "rate at ({i},{j}) above the nearest corner");
                if i > 0 {
                    assert!(
                        rate <= surface[i - 1][j],
                        "rate rose along d_SR2 at ({i},{j})"
                    );
                }
                if j > 0 {
                    assert!(rate <= row[j - 1], "rate rose along d_R2D at ({i},{j})");
                }
            }
        }
    }

    let drop = surface1[0][0] - surface10[0][0];
    assert!(
        (drop - 5.0).abs() <= 1.5,
        "σ² 1→10 m² drops the peak by {drop:.4} bits/s/Hz, expected 5 ± 1.5"
    );

    // The longer-range constellation sits below pointwise (same power).
    let grid_iridium = RateGrid::from_distances(&distance_set(&iridium).unwrap(), 6);
    let surface_iridium = rate_matrix(&grid_iridium, &two_branch_base(&iridium, 1.0), &snr);
    for (row_s, row_i) in surface1.iter().zip(&surface_iridium) {
        for (&rs, &ri) in row_s.iter().zip(row_i) {
            assert!(ri < rs, "Iridium rate {ri:.4} not below Starlink {rs:.4}");
        }
    }

    let e = assert_budget(t0, Duration::from_secs(60), "rate surface");
    println!(
        "PASS: corner-peaked monotone rate surface; tenfold jitter drops the peak \
         {drop:.3} bits/s/Hz (5 ± 1.5); Iridium pointwise below Starlink ({e:.2?})"
    );
}

// ---------------------------------------------------------------------------
// 9. Deterministic output
// ---------------------------------------------------------------------------

#[test]
fn validation_output_is_byte_identical_across_worker_counts() {
    let t0 = Instant::now();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| validation_suite(2000, 17).unwrap().result.to_csv_string())
    };
    let narrow = run(1);
    assert_eq!(narrow, run(1), "same pool width, different bytes");
    assert_eq!(narrow, run(2), "two workers changed the bytes");
    assert_eq!(narrow, run(4), "four workers changed the bytes");
    let e = t0.elapsed();
    println!("PASS: agreement-suite CSV byte-identical across reruns and 1/2/4 workers ({e:.2?})");
}
