//! Monte Carlo statistics over Haar-random networks: ensemble averages of
//! the QFI family, tail fractions for concentration experiments, and the
//! closed-form Haar expectation they converge to,
//!
//! ```text
//! E[h_lo] = 2M + 4[(π/4)(M−1) + 1] f₊(n̄M),
//! ```
//!
//! from the Haar moment E[(Σₐ|U_{a1}|)²] = 1 + (π/4)(M−1).
//!
//! Sample `i` of an ensemble always draws from stream index `i` of the master
//! seed (see [`crate::rng::RngStream`]), and reductions run in index order,
//! so results are a pure function of (config, seed) no matter how many rayon
//! workers participate.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_4, TAU};

use crate::error::{Error, Result};
use crate::qfi::{self, f_plus, f_plus_lossy};
use crate::rng::RngStream;
use crate::unitary::sample_haar_unitary;

/// Haar-ensemble mean of `h_lo`: 2M + 4[(π/4)(M−1) + 1] f₊(n̄M).
pub fn lemma1_expectation(m: usize, nbar: f64) -> f64 {
    assert!(m >= 1, "mode count must be at least 1");
    let mf = m as f64;
    2.0 * mf + 4.0 * (FRAC_PI_4 * (mf - 1.0) + 1.0) * f_plus(nbar * mf)
}

/// Lossy counterpart: the f₊ factor is replaced by its lossy form.
pub fn lemma1_expectation_lossy(m: usize, nbar: f64, eta: f64) -> Result<f64> {
    assert!(m >= 1, "mode count must be at least 1");
    let mf = m as f64;
    Ok(2.0 * mf + 4.0 * (FRAC_PI_4 * (mf - 1.0) + 1.0) * f_plus_lossy(nbar * mf, eta)?)
}

/// One tail measurement: the fraction of samples with
/// h_lo ≤ (2πn̄ − k)·M².
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailFraction {
    pub k: f64,
    pub fraction: f64,
}

/// Aggregated Monte Carlo result over one Haar ensemble.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleResult {
    pub m: usize,
    pub nbar: f64,
    pub eta: f64,
    pub samples: usize,
    pub mean_h_lo: f64,
    pub std_h_lo: f64,
    pub mean_h_mo: f64,
    pub std_h_mo: f64,
    pub mean_h_mlo: f64,
    pub std_h_mlo: f64,
    /// The closed-form Haar mean the `h_lo` column converges to.
    pub closed_form_mean: f64,
    pub tail_fractions: Vec<TailFraction>,
}

impl EnsembleResult {
    pub fn se_h_lo(&self) -> f64 {
        self.std_h_lo / (self.samples as f64).sqrt()
    }

    pub fn se_h_mo(&self) -> f64 {
        self.std_h_mo / (self.samples as f64).sqrt()
    }

    pub fn se_h_mlo(&self) -> f64 {
        self.std_h_mlo / (self.samples as f64).sqrt()
    }
}

/// Sample mean and Bessel-corrected standard deviation, reduced in order.
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn validate_common(m: usize, nbar: f64, eta: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidDimension {
            what: "mode count",
            min: 1,
            got: 0,
        });
    }
    if !nbar.is_finite() || nbar < 0.0 {
        return Err(Error::OutOfRange {
            name: "nbar",
            value: nbar,
            range: "[0, ∞)",
        });
    }
    if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
        return Err(Error::OutOfRange {
            name: "transmittivity",
            value: eta,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Monte Carlo moments of (h_lo, h_mo, h_mlo) over `samples` Haar networks,
/// plus tail fractions of h_lo at each threshold in `k_values`
/// (each k must lie in (0, 2πn̄)).
pub fn mc_haar_qfi_with_tails(
    m: usize,
    nbar: f64,
    eta: f64,
    samples: usize,
    seed: u64,
    k_values: &[f64],
) -> Result<EnsembleResult> {
    validate_common(m, nbar, eta)?;
    if samples < 2 {
        return Err(Error::TooFew {
            what: "ensemble samples",
            min: 2,
            got: samples,
        });
    }
    for &k in k_values {
        if !k.is_finite() || k <= 0.0 || k >= TAU * nbar {
            return Err(Error::OutOfRange {
                name: "tail threshold k",
                value: k,
                range: "(0, 2πn̄)",
            });
        }
    }

    let triples: Vec<[f64; 3]> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<[f64; 3]> {
            let mut rng = RngStream::new(seed, i as u64).rng();
            let u = sample_haar_unitary(m, &mut rng)?;
            Ok([
                qfi::h_lossy(&u, nbar, eta)?,
                qfi::h_mo_lossy(&u, nbar, eta)?,
                qfi::h_mlo_lossy(&u, nbar, eta)?,
            ])
        })
        .collect::<Result<_>>()?;

    let h_lo: Vec<f64> = triples.iter().map(|t| t[0]).collect();
    let h_mo: Vec<f64> = triples.iter().map(|t| t[1]).collect();
    let h_mlo: Vec<f64> = triples.iter().map(|t| t[2]).collect();
    let (mean_h_lo, std_h_lo) = mean_std(&h_lo);
    let (mean_h_mo, std_h_mo) = mean_std(&h_mo);
    let (mean_h_mlo, std_h_mlo) = mean_std(&h_mlo);

    let m2 = (m * m) as f64;
    let tail_fractions = k_values
        .iter()
        .map(|&k| {
            let threshold = (TAU * nbar - k) * m2;
            let count = h_lo.iter().filter(|&&h| h <= threshold).count();
            TailFraction {
                k,
                fraction: count as f64 / samples as f64,
            }
        })
        .collect();

    Ok(EnsembleResult {
        m,
        nbar,
        eta,
        samples,
        mean_h_lo,
        std_h_lo,
        mean_h_mo,
        std_h_mo,
        mean_h_mlo,
        std_h_mlo,
        closed_form_mean: lemma1_expectation_lossy(m, nbar, eta)?,
        tail_fractions,
    })
}

/// Monte Carlo moments without tail thresholds.
pub fn mc_haar_qfi(
    m: usize,
    nbar: f64,
    eta: f64,
    samples: usize,
    seed: u64,
) -> Result<EnsembleResult> {
    mc_haar_qfi_with_tails(m, nbar, eta, samples, seed, &[])
}

/// Fraction of Haar samples with h_lo(U) ≤ (2πn̄ − k)·M². Uses the same
/// per-sample streams as [`mc_haar_qfi`], so the fraction is consistent with
/// an ensemble run at the same seed.
pub fn concentration_fraction(
    m: usize,
    nbar: f64,
    k: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let result = mc_haar_qfi_with_tails(m, nbar, 1.0, samples, seed, &[k])?;
    Ok(result.tail_fractions[0].fraction)
}

/// Ensemble mean of h_mo/M² for each network size, exhibiting the
/// sub-Heisenberg scaling of phase-insensitive strategies. Sample `i` of list
/// entry `j` draws from stream `j·samples + i`.
pub fn theorem2_decay(
    m_list: &[usize],
    nbar: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    if m_list.is_empty() {
        return Err(Error::TooFew {
            what: "network sizes",
            min: 1,
            got: 0,
        });
    }
    if samples < 1 {
        return Err(Error::TooFew {
            what: "ensemble samples",
            min: 1,
            got: 0,
        });
    }
    m_list
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            validate_common(m, nbar, 1.0)?;
            let base = (j * samples) as u64;
            let values: Vec<f64> = (0..samples)
                .into_par_iter()
                .map(|i| -> Result<f64> {
                    let mut rng = RngStream::new(seed, base + i as u64).rng();
                    let u = sample_haar_unitary(m, &mut rng)?;
                    Ok(qfi::h_mo(&u, nbar) / (m * m) as f64)
                })
                .collect::<Result<_>>()?;
            let mean = values.iter().sum::<f64>() / samples as f64;
            Ok((m, mean))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn lemma1_frozen_values() {
        assert_abs_diff_eq!(
            lemma1_expectation(10, 0.3),
            228.62457377612317,
            epsilon = 1e-10
        );
        // M = 1 reduces to the single-mode identity value.
        assert_abs_diff_eq!(
            lemma1_expectation(1, 0.7),
            2.0 + 4.0 * f_plus(0.7),
            epsilon = 1e-12
        );
        // Ratio to the maximum approaches π/4 for large M.
        let ratio = lemma1_expectation(400, 0.3) / qfi::h_max(400, 0.3);
        assert!((ratio - FRAC_PI_4).abs() / FRAC_PI_4 < 0.01);
        // Lossless limit of the lossy form is exact.
        assert_eq!(
            lemma1_expectation_lossy(10, 0.3, 1.0).unwrap(),
            lemma1_expectation(10, 0.3)
        );
    }

    #[test]
    fn vacuum_ensemble_is_deterministic_constant() {
        let r = mc_haar_qfi(5, 0.0, 1.0, 16, 3).unwrap();
        assert_eq!(r.mean_h_lo, 10.0);
        assert_eq!(r.std_h_lo, 0.0);
        assert_eq!(r.mean_h_mlo, 10.0);
        assert_eq!(r.closed_form_mean, 10.0);
    }

    #[test]
    fn same_seed_reproduces_bit_identical_results() {
        let a = mc_haar_qfi(4, 0.3, 0.9, 64, 123).unwrap();
        let b = mc_haar_qfi(4, 0.3, 0.9, 64, 123).unwrap();
        assert_eq!(a, b);
        let c = mc_haar_qfi(4, 0.3, 0.9, 64, 124).unwrap();
        assert_ne!(a.mean_h_lo, c.mean_h_lo);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let reference = mc_haar_qfi(4, 0.3, 1.0, 48, 7).unwrap();
        for threads in [1usize, 3] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let r = pool.install(|| mc_haar_qfi(4, 0.3, 1.0, 48, 7).unwrap());
            assert_eq!(r, reference);
        }
    }

    #[test]
    fn sample_count_and_threshold_validation() {
        assert!(matches!(
            mc_haar_qfi(4, 0.3, 1.0, 1, 0).unwrap_err(),
            Error::TooFew { .. }
        ));
        // k must sit strictly inside (0, 2πn̄); at n̄ = 0 no k is valid.
        assert!(concentration_fraction(4, 0.3, 0.0, 8, 0).is_err());
        assert!(concentration_fraction(4, 0.3, TAU * 0.3, 8, 0).is_err());
        assert!(concentration_fraction(4, 0.0, 0.1, 8, 0).is_err());
    }

    #[test]
    fn tail_fraction_counts_low_outliers() {
        // With k close to 2πn̄ the threshold drops near 2M + ε·M², which at
        // small M can still exceed every sample; measured empirically.
        let k = TAU * 0.3 - 0.01;
        let f = concentration_fraction(3, 0.3, k, 32, 5).unwrap();
        assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn theorem2_handles_vacuum_exactly() {
        let rows = theorem2_decay(&[4, 8], 0.0, 8, 9).unwrap();
        // h_mo = 2M at n̄ = 0, so h_mo/M² = 2/M.
        assert_relative_eq!(rows[0].1, 0.5, max_relative = 1e-12);
        assert_relative_eq!(rows[1].1, 0.25, max_relative = 1e-12);
        assert!(theorem2_decay(&[], 0.3, 8, 9).is_err());
    }

    #[test]
    fn mc_matches_lemma1_within_three_se_small_case() {
        let r = mc_haar_qfi(6, 0.3, 1.0, 400, 2024).unwrap();
        assert!(
            (r.mean_h_lo - r.closed_form_mean).abs() <= 3.0 * r.se_h_lo(),
            "mean {} vs closed form {} (3·SE = {})",
            r.mean_h_lo,
            r.closed_form_mean,
            3.0 * r.se_h_lo()
        );
    }
}
