//! Monte Carlo checks of Haar-measure statistics and ensemble behavior.
//! Acceptance bands are 3 standard errors of the mean unless the quantity
//! compared is exact.

use qnet_core::brickwork::{default_depth_grid, depth_sweep};
use qnet_core::ensemble::{concentration_fraction, lemma1_expectation, mc_haar_qfi, theorem2_decay};
use qnet_core::qfi;
use qnet_core::rng::RngStream;
use qnet_core::unitary::{dft_matrix, sample_haar_unitary};
use std::f64::consts::{FRAC_PI_4, TAU};

fn mean_std_se(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt(), (var / n).sqrt())
}

#[test]
fn haar_column_moments_match_theory() {
    let m = 8;
    let samples = 2000;
    let mut abs11_sq = Vec::with_capacity(samples);
    let mut amp_sum_sq = Vec::with_capacity(samples);
    for i in 0..samples {
        let mut rng = RngStream::new(501, i as u64).rng();
        let u = sample_haar_unitary(m, &mut rng).unwrap();
        abs11_sq.push(u.entry(0, 0).norm_sqr());
        let s = u.column_abs_sum(0);
        amp_sum_sq.push(s * s);
    }

    // E |U_{11}|² = 1/M.
    let (mean, _, se) = mean_std_se(&abs11_sq);
    assert!(
        (mean - 1.0 / m as f64).abs() <= 3.0 * se,
        "|U11|^2 mean {mean} vs {} (3SE {})",
        1.0 / m as f64,
        3.0 * se
    );

    // E (Σₐ|U_{a1}|)² = 1 + (π/4)(M−1).
    let expected = 1.0 + FRAC_PI_4 * (m as f64 - 1.0);
    let (mean, _, se) = mean_std_se(&amp_sum_sq);
    assert!(
        (mean - expected).abs() <= 3.0 * se,
        "amplitude-sum moment {mean} vs {expected} (3SE {})",
        3.0 * se
    );
}

#[test]
fn haar_left_invariance_of_column_amplitudes() {
    // Multiplying by a fixed unitary must not shift the distribution of
    // Σₐ|U_{a1}|; compare means of the plain and rotated ensembles.
    let m = 8;
    let samples = 2000;
    let v = dft_matrix(m).unwrap();
    let mut plain = Vec::with_capacity(samples);
    let mut rotated = Vec::with_capacity(samples);
    for i in 0..samples {
        let mut rng = RngStream::new(502, i as u64).rng();
        let u = sample_haar_unitary(m, &mut rng).unwrap();
        plain.push(u.column_abs_sum(0));

        let mut rng2 = RngStream::new(503, i as u64).rng();
        let w = sample_haar_unitary(m, &mut rng2).unwrap();
        let vw = qnet_core::UnitaryMatrix::new(v.as_matrix() * w.as_matrix()).unwrap();
        rotated.push(vw.column_abs_sum(0));
    }
    let (mean_a, _, se_a) = mean_std_se(&plain);
    let (mean_b, _, se_b) = mean_std_se(&rotated);
    let gap = (mean_a - mean_b).abs();
    let band = 3.0 * (se_a * se_a + se_b * se_b).sqrt();
    assert!(gap <= band, "left-invariance gap {gap} exceeds {band}");
}

#[test]
fn lemma1_monte_carlo_agreement() {
    let r = mc_haar_qfi(10, 0.3, 1.0, 1000, 601).unwrap();
    let target = lemma1_expectation(10, 0.3);
    assert_eq!(r.closed_form_mean, target);
    let gap = (r.mean_h_lo - target).abs();
    assert!(
        gap <= 3.0 * r.se_h_lo(),
        "mean {} vs closed-form value {} (3SE {})",
        r.mean_h_lo,
        target,
        3.0 * r.se_h_lo()
    );
}

#[test]
fn relative_spread_contracts_with_size() {
    // Concentration: std/mean of h_lo shrinks as M grows.
    let small = mc_haar_qfi(10, 0.3, 1.0, 800, 602).unwrap();
    let large = mc_haar_qfi(20, 0.3, 1.0, 800, 603).unwrap();
    let rel_small = small.std_h_lo / small.mean_h_lo;
    let rel_large = large.std_h_lo / large.mean_h_lo;
    assert!(
        rel_large < rel_small,
        "relative std grew: {rel_small} -> {rel_large}"
    );
}

#[test]
fn tail_fraction_is_tiny_at_moderate_threshold() {
    // k = half of 2πn̄: at M = 10 every sample clears the threshold easily.
    let k = 0.5 * TAU * 0.3;
    let f = concentration_fraction(10, 0.3, k, 500, 604).unwrap();
    assert_eq!(f, 0.0);
}

#[test]
fn single_brickwork_gate_reproduces_global_haar_at_m2() {
    // At M = 2 a depth-1 brickwork circuit IS one Haar 2×2 gate, so h_lo
    // statistics must agree with the global-Haar ensemble.
    let configs = 1500;
    let rows = depth_sweep(2, 0.3, &[1], configs, 605).unwrap();
    let brick = &rows[0];
    let global = mc_haar_qfi(2, 0.3, 1.0, configs, 606).unwrap();
    let mean_brick = brick.mean_h_lo_over_m2 * 4.0;
    let se_brick = brick.se_h_lo_over_m2() * 4.0;
    let gap = (mean_brick - global.mean_h_lo).abs();
    let band = 3.0 * (se_brick * se_brick + global.se_h_lo() * global.se_h_lo()).sqrt();
    assert!(
        gap <= band,
        "brickwork mean {mean_brick} vs Haar mean {} (band {band})",
        global.mean_h_lo
    );
}

#[test]
fn depth_sweep_trend_is_non_decreasing_with_slack() {
    let m = 8;
    let rows = depth_sweep(m, 0.3, &default_depth_grid(m), 60, 607).unwrap();
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let slack = 3.0
            * (a.se_h_lo_over_m2() * a.se_h_lo_over_m2()
                + b.se_h_lo_over_m2() * b.se_h_lo_over_m2())
            .sqrt();
        assert!(
            b.mean_h_lo_over_m2 >= a.mean_h_lo_over_m2 - slack,
            "depth {} -> {}: mean fell {} -> {} beyond slack {slack}",
            a.depth,
            b.depth,
            a.mean_h_lo_over_m2,
            b.mean_h_lo_over_m2
        );
    }
}

#[test]
fn portless_scaling_decays_and_g1_mean_matches() {
    let rows = theorem2_decay(&[10, 20], 0.3, 500, 608).unwrap();
    assert!(
        rows[1].1 < rows[0].1,
        "h_mo/M² did not decay: {} -> {}",
        rows[0].1,
        rows[1].1
    );

    // E[g₁] = (4 + 8n̄)M from E|Σₐ U_{a1}|² = 1.
    let m = 10;
    let samples = 800;
    let mut g1 = Vec::with_capacity(samples);
    for i in 0..samples {
        let mut rng = RngStream::new(609, i as u64).rng();
        let u = sample_haar_unitary(m, &mut rng).unwrap();
        g1.push(qfi::g_i(&u, 0, 0.3).unwrap());
    }
    let (mean, _, se) = mean_std_se(&g1);
    let expected = (4.0 + 8.0 * 0.3) * m as f64;
    assert!(
        (mean - expected).abs() <= 3.0 * se,
        "g1 mean {mean} vs {expected} (3SE {})",
        3.0 * se
    );
}
