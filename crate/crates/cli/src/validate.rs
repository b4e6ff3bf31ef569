//! The `validate` subcommand: a fast self-test of the numerical core at
//! M ≤ 8 exercising every cross-module invariant the library promises.
//! Exit code 3 and the failing check names on any failure.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use serde_json::json;

use qnet_core::ensemble;
use qnet_core::gaussian::{
    apply_bsn, apply_loss, apply_phase_shifts, bsn_symplectic, classical_fisher_homodyne,
    make_input_state, qfi_displacement,
};
use qnet_core::qfi::{f_plus, h_lo, h_lossy, h_max, h_mlo, h_mo, optimal_phases, qfi_phase};
use qnet_core::unitary::{dft_matrix, sample_haar_unitary, unitarity_deviation};
use qnet_core::{
    brickwork, GaussianState, LossSpec, PhaseVector, RngStream, SqueezingSpec, UnitaryMatrix,
};

use crate::args::ValidateArgs;
use crate::error::{CliError, Result};

const NBAR: f64 = 0.3;

struct Check {
    name: &'static str,
    /// Ok(detail) on pass, Err(detail) on fail.
    outcome: std::result::Result<String, String>,
}

pub fn run(args: &ValidateArgs) -> Result<()> {
    let checks = run_checks(args.seed, args.break_symplectic);
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| c.outcome.is_err())
        .map(|c| c.name)
        .collect();

    if args.json {
        let rows: Vec<serde_json::Value> = checks
            .iter()
            .map(|c| {
                let (passed, detail) = match &c.outcome {
                    Ok(d) => (true, d),
                    Err(d) => (false, d),
                };
                json!({ "name": c.name, "passed": passed, "detail": detail })
            })
            .collect();
        let doc = json!({
            "seed": args.seed,
            "all_passed": failed.is_empty(),
            "checks": rows,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("json render")
        );
    } else {
        for c in &checks {
            match &c.outcome {
                Ok(d) => println!("PASS  {name:<44} {d}", name = c.name),
                Err(d) => println!("FAIL  {name:<44} {d}", name = c.name),
            }
        }
        println!(
            "{} of {} checks passed (seed {})",
            checks.len() - failed.len(),
            checks.len(),
            args.seed
        );
    }

    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

fn check<F>(name: &'static str, body: F) -> Check
where
    F: FnOnce() -> std::result::Result<String, String>,
{
    Check {
        name,
        outcome: body(),
    }
}

/// Shorthand: core errors inside a check are failures, not process errors.
fn core<T>(r: qnet_core::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn haar(m: usize, seed: u64, stream: u64) -> std::result::Result<UnitaryMatrix, String> {
    core(sample_haar_unitary(m, &mut RngStream::new(seed, stream).rng()))
}

/// Full moment pipeline with the quadrature transform applied by hand, so the
/// fault hook can corrupt one entry of it.
fn covariance_qfi_manual(
    u: &UnitaryMatrix,
    nbar: f64,
    fault: bool,
) -> std::result::Result<f64, String> {
    let m = u.dim();
    let input = core(make_input_state(m, &core(SqueezingSpec::new(0, nbar * m as f64))?))?;
    let mut s = bsn_symplectic(u);
    if fault {
        s[(0, 0)] += 0.01;
    }
    let mean = &s * input.mean();
    let cov = &s * input.cov() * s.transpose();
    let state = core(GaussianState::from_mean_cov(mean, cov))?;
    let state = core(apply_phase_shifts(&state, &core(optimal_phases(u, 0))?))?;
    core(qfi_displacement(&state))
}

fn run_checks(seed: u64, break_symplectic: bool) -> Vec<Check> {
    let mut checks = Vec::new();

    checks.push(check("haar_sampling_unitarity", || {
        let mut worst = 0.0f64;
        for m in 1..=8 {
            let u = haar(m, seed, m as u64)?;
            worst = worst.max(unitarity_deviation(u.as_matrix()));
        }
        if worst <= 1e-10 {
            Ok(format!("max deviation {worst:.2e} over M=1..8"))
        } else {
            Err(format!("deviation {worst:.2e} exceeds 1e-10"))
        }
    }));

    checks.push(check("haar_sampling_determinism", || {
        let a = haar(6, seed, 40)?;
        let b = haar(6, seed, 40)?;
        if a == b {
            Ok("same seed and stream give identical bits".to_string())
        } else {
            Err("replay diverged".to_string())
        }
    }));

    checks.push(check("dft_network_saturates_max_qfi", || {
        let u = core(dft_matrix(8))?;
        let lo = h_lo(&u, NBAR);
        let max = h_max(8, NBAR);
        let rel = (lo - max).abs() / max;
        if rel <= 1e-9 {
            Ok(format!("relative gap {rel:.2e}"))
        } else {
            Err(format!("h_lo {lo} vs h_max {max}, gap {rel:.2e}"))
        }
    }));

    checks.push(check("identity_network_closed_form", || {
        let m = 4;
        let lo = h_lo(&UnitaryMatrix::identity(m), NBAR);
        let expected = 2.0 * m as f64 + 4.0 * f_plus(NBAR * m as f64);
        let rel = (lo - expected).abs() / expected;
        if rel <= 1e-15 {
            Ok(format!("h_lo = {lo}"))
        } else {
            Err(format!("h_lo {lo} vs {expected}"))
        }
    }));

    checks.push(check("qfi_ordering_chain", || {
        for i in 0..50 {
            let u = haar(5, seed, 100 + i)?;
            let (lo, mo, mlo, max) = (
                h_lo(&u, NBAR),
                h_mo(&u, NBAR),
                h_mlo(&u, NBAR),
                h_max(5, NBAR),
            );
            let ok = 10.0 <= lo + 1e-9 && lo <= mlo + 1e-9 && mlo <= max + 1e-9 && mo <= mlo + 1e-9;
            if !ok {
                return Err(format!(
                    "sample {i}: 2M={}, h_lo={lo}, h_mo={mo}, h_mlo={mlo}, h_max={max}",
                    10.0
                ));
            }
        }
        Ok("2M <= h_lo <= h_mlo <= h_max and h_mo <= h_mlo on 50 samples".to_string())
    }));

    checks.push(check("optimal_phases_achieve_closed_form", || {
        let mut worst = 0.0f64;
        for i in 0..20 {
            let u = haar(6, seed, 200 + i)?;
            let achieved = core(qfi_phase(&u, &core(optimal_phases(&u, 0))?, NBAR))?;
            let lo = h_lo(&u, NBAR);
            worst = worst.max((achieved - lo).abs() / lo);
        }
        if worst <= 1e-10 {
            Ok(format!("max relative gap {worst:.2e} on 20 samples"))
        } else {
            Err(format!("relative gap {worst:.2e} exceeds 1e-10"))
        }
    }));

    checks.push(check("random_phases_never_exceed_closed_form", || {
        let mut rng = RngStream::new(seed, 300).rng();
        for i in 0..20 {
            let u = haar(6, seed, 320 + i)?;
            let lo = h_lo(&u, NBAR);
            for _ in 0..5 {
                let phases =
                    core(PhaseVector::new((0..6).map(|_| rng.gen_range(-PI..PI)).collect()))?;
                let value = core(qfi_phase(&u, &phases, NBAR))?;
                if value > lo + 1e-9 {
                    return Err(format!("random phases reached {value} above h_lo {lo}"));
                }
            }
        }
        Ok("100 random phase choices stayed at or below h_lo".to_string())
    }));

    checks.push(check("closed_form_matches_covariance_path", || {
        let mut worst = 0.0f64;
        for &m in &[2usize, 4, 8] {
            for i in 0..10 {
                let u = haar(m, seed, 400 + 16 * m as u64 + i)?;
                let closed = h_lo(&u, NBAR);
                let moment = covariance_qfi_manual(&u, NBAR, break_symplectic)?;
                worst = worst.max((moment - closed).abs() / closed);
            }
        }
        if worst <= 1e-8 {
            Ok(format!("max relative gap {worst:.2e} over M in {{2,4,8}}"))
        } else {
            Err(format!("relative gap {worst:.2e} exceeds 1e-8"))
        }
    }));

    checks.push(check("homodyne_matches_qfi_at_optimal_phases", || {
        let mut worst = 0.0f64;
        for i in 0..10 {
            let u = haar(6, seed, 500 + i)?;
            let state = probe(&u, &core(optimal_phases(&u, 0))?)?;
            let h = core(qfi_displacement(&state))?;
            let f = core(classical_fisher_homodyne(&state))?;
            worst = worst.max((f - h).abs() / h);
        }
        if worst <= 1e-8 {
            Ok(format!("max relative gap {worst:.2e} on 10 probes"))
        } else {
            Err(format!("relative gap {worst:.2e} exceeds 1e-8"))
        }
    }));

    checks.push(check("homodyne_bounded_by_qfi_when_suboptimal", || {
        let mut rng = RngStream::new(seed, 600).rng();
        for i in 0..10 {
            let u = haar(6, seed, 620 + i)?;
            let phases = core(PhaseVector::new(
                (0..6).map(|_| rng.gen_range(-PI..PI)).collect(),
            ))?;
            let state = probe(&u, &phases)?;
            let h = core(qfi_displacement(&state))?;
            let f = core(classical_fisher_homodyne(&state))?;
            if f > h + 1e-10 {
                return Err(format!("classical Fisher {f} above QFI {h}"));
            }
        }
        Ok("classical Fisher stayed at or below the QFI on 10 probes".to_string())
    }));

    checks.push(check("haar_moment_single_entry", || {
        let (m, n) = (6usize, 400u64);
        let values: Vec<f64> = (0..n)
            .map(|i| haar(m, seed, 700 + i).map(|u| u.entry(0, 0).norm_sqr()))
            .collect::<std::result::Result<_, String>>()?;
        moment_band(&values, 1.0 / m as f64, "E|U_00|^2")
    }));

    checks.push(check("haar_moment_column_abs_sum", || {
        let (m, n) = (6usize, 400u64);
        let values: Vec<f64> = (0..n)
            .map(|i| {
                haar(m, seed, 700 + i).map(|u| {
                    let s = u.column_abs_sum(0);
                    s * s
                })
            })
            .collect::<std::result::Result<_, String>>()?;
        moment_band(&values, 1.0 + PI / 4.0 * (m as f64 - 1.0), "E(sum|U_a0|)^2")
    }));

    checks.push(check("ensemble_mean_matches_closed_form", || {
        let r = core(ensemble::mc_haar_qfi(6, NBAR, 1.0, 400, seed))?;
        let gap = (r.mean_h_lo - r.closed_form_mean).abs();
        let band = 3.0 * r.se_h_lo();
        if gap <= band {
            Ok(format!(
                "mean {:.4} vs closed form {:.4}, gap {:.2} <= 3 SE {:.2}",
                r.mean_h_lo, r.closed_form_mean, gap, band
            ))
        } else {
            Err(format!("gap {gap:.3} exceeds 3 SE {band:.3}"))
        }
    }));

    checks.push(check("lossy_closed_form_matches_covariance_path", || {
        let eta = 0.6;
        let loss = core(LossSpec::new(eta))?;
        let mut worst = 0.0f64;
        for i in 0..10 {
            let u = haar(4, seed, 800 + i)?;
            let closed = core(h_lossy(&u, NBAR, eta))?;
            let state = apply_loss(&probe(&u, &core(optimal_phases(&u, 0))?)?, &loss);
            let moment = core(qfi_displacement(&state))?;
            worst = worst.max((moment - closed).abs() / closed);
        }
        if worst <= 1e-8 {
            Ok(format!("max relative gap {worst:.2e} at eta=0.6"))
        } else {
            Err(format!("relative gap {worst:.2e} exceeds 1e-8"))
        }
    }));

    checks.push(check("qfi_monotone_under_loss", || {
        for i in 0..5 {
            let u = haar(4, seed, 900 + i)?;
            let mut last = f64::INFINITY;
            for eta in [1.0, 0.8, 0.6, 0.4, 0.2, 0.0] {
                let value = core(h_lossy(&u, NBAR, eta))?;
                if value > last + 1e-12 {
                    return Err(format!("h rose to {value} when eta dropped to {eta}"));
                }
                last = value;
            }
        }
        Ok("h_lossy non-increasing along descending eta on 5 samples".to_string())
    }));

    checks.push(check("lossless_limit_bitwise_identical", || {
        for i in 0..10 {
            let u = haar(5, seed, 1000 + i)?;
            let lossless = h_lo(&u, NBAR);
            let eta_one = core(h_lossy(&u, NBAR, 1.0))?;
            if lossless.to_bits() != eta_one.to_bits() {
                return Err(format!("eta=1 gave {eta_one}, lossless gave {lossless}"));
            }
        }
        Ok("h_lossy at eta=1 reproduces h_lo bit for bit".to_string())
    }));

    checks.push(check("network_transform_is_symplectic", || {
        let u = haar(6, seed, 1100)?;
        let s = bsn_symplectic(&u);
        let m = u.dim();
        let mut j = DMatrix::<f64>::zeros(2 * m, 2 * m);
        for i in 0..m {
            j[(i, m + i)] = 1.0;
            j[(m + i, i)] = -1.0;
        }
        let sym = (s.transpose() * &j * &s - &j).amax();
        let orth = (s.transpose() * &s - DMatrix::<f64>::identity(2 * m, 2 * m)).amax();
        if sym <= 1e-10 && orth <= 1e-10 {
            Ok(format!("|S'JS-J| {sym:.2e}, |S'S-I| {orth:.2e}"))
        } else {
            Err(format!("symplectic defect {sym:.2e}, orthogonal defect {orth:.2e}"))
        }
    }));

    checks.push(check("passive_network_preserves_purity_and_photons", || {
        let mut rng = RngStream::new(seed, 1200).rng();
        let u = haar(5, seed, 1210)?;
        let phases = core(PhaseVector::new(
            (0..5).map(|_| rng.gen_range(-PI..PI)).collect(),
        ))?;
        let state = probe(&u, &phases)?;
        let det = nalgebra::Cholesky::new(state.cov() * 2.0)
            .map(|c| c.determinant())
            .ok_or("covariance lost positive definiteness")?;
        let photons = state.total_mean_photons();
        let expected = NBAR * 5.0;
        let photon_rel = (photons - expected).abs() / expected;
        if (det - 1.0).abs() <= 1e-8 && photon_rel <= 1e-10 {
            Ok(format!("det(2S) - 1 = {:.2e}, photon drift {photon_rel:.2e}", det - 1.0))
        } else {
            Err(format!("det(2S) = {det}, photon drift {photon_rel:.2e}"))
        }
    }));

    checks.push(check("brickwork_circuits_are_unitary", || {
        let spec = core(brickwork::BrickworkSpec::new(7, 9, seed))?;
        let u = core(brickwork::build_brickwork(&spec))?;
        let dev = unitarity_deviation(u.as_matrix());
        if dev <= 1e-10 {
            Ok(format!("deviation {dev:.2e} at M=7, depth 9"))
        } else {
            Err(format!("deviation {dev:.2e} exceeds 1e-10"))
        }
    }));

    checks.push(check("zero_depth_matches_identity_network", || {
        let m = 4usize;
        let stats = core(brickwork::depth_sweep(m, NBAR, &[0], 3, seed))?;
        let expected = h_lo(&UnitaryMatrix::identity(m), NBAR) / (m * m) as f64;
        let row = &stats[0];
        let rel = (row.mean_h_lo_over_m2 - expected).abs() / expected;
        // The spread across bitwise-identical values is summation noise only.
        if rel <= 1e-15 && row.std_h_lo_over_m2 <= 1e-13 {
            Ok(format!("depth 0 mean {:.6}, no spread", row.mean_h_lo_over_m2))
        } else {
            Err(format!(
                "mean {} vs identity value {expected}, std {}",
                row.mean_h_lo_over_m2, row.std_h_lo_over_m2
            ))
        }
    }));

    checks.push(check("optimal_phases_are_canonical", || {
        for i in 0..30 {
            let u = haar(5, seed, 1300 + i)?;
            for &phi in core(optimal_phases(&u, 0))?.as_slice() {
                if !(phi > -PI && phi <= PI) {
                    return Err(format!("phase {phi} outside (-pi, pi]"));
                }
            }
        }
        Ok("all phases lie in (-pi, pi] on 30 samples".to_string())
    }));

    checks.push(check("ensemble_runs_are_deterministic", || {
        let a = core(ensemble::mc_haar_qfi(5, NBAR, 1.0, 50, seed))?;
        let b = core(ensemble::mc_haar_qfi(5, NBAR, 1.0, 50, seed))?;
        let same = a.mean_h_lo.to_bits() == b.mean_h_lo.to_bits()
            && a.std_h_lo.to_bits() == b.std_h_lo.to_bits()
            && a.mean_h_mo.to_bits() == b.mean_h_mo.to_bits()
            && a.mean_h_mlo.to_bits() == b.mean_h_mlo.to_bits();
        if same {
            Ok("repeated ensemble run is bit-identical".to_string())
        } else {
            Err("repeated ensemble run diverged".to_string())
        }
    }));

    checks
}

/// Squeezed input on port 0 through `u`, then the given phase shifts.
fn probe(
    u: &UnitaryMatrix,
    phases: &PhaseVector,
) -> std::result::Result<GaussianState, String> {
    let m = u.dim();
    let input = core(make_input_state(m, &core(SqueezingSpec::new(0, NBAR * m as f64))?))?;
    let state = core(apply_bsn(&input, u))?;
    core(apply_phase_shifts(&state, phases))
}

fn moment_band(
    values: &[f64],
    expected: f64,
    label: &str,
) -> std::result::Result<String, String> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    let gap = (mean - expected).abs();
    if gap <= 3.0 * se {
        Ok(format!(
            "{label}: mean {mean:.4} vs {expected:.4}, within 3 SE"
        ))
    } else {
        Err(format!(
            "{label}: mean {mean:.4} vs {expected:.4}, gap {gap:.2e} exceeds 3 SE {:.2e}",
            3.0 * se
        ))
    }
}
