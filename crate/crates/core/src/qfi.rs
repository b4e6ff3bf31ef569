//! Closed-form Fisher information for a single-mode squeezed vacuum sent
//! through an M-mode network `U`, with every output mode picking up the same
//! x-displacement.
//!
//! With N̄ = n̄M photons in the squeezed input and the variance factors
//! `f±(x) = x ± √(x² + x)`, the key quantities are
//!
//! * `h_lo`  = 2M + 4 (Σₐ|U_{a1}|)² f₊(N̄): local phases optimized, input
//!   fixed to port 1 (columns are 0-indexed in code),
//! * `h_mo`  = maxᵦ [2M + 4 |Σₐ U_{ab}|² f₊(N̄)]: input port optimized, no
//!   phase control,
//! * `h_mlo` = maxᵦ [2M + 4 (Σₐ|U_{ab}|)² f₊(N̄)]: both optimized,
//! * `h_max` = 2M + 4M f₊(N̄): the network-independent ceiling, reached by
//!   balanced networks with aligned column phases.
//!
//! Uniform photon loss of transmittivity η only replaces
//! `f₊(N̄) → η f₊(N̄) / (2(1−η) f₊(N̄) + 1)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::PhaseVector;
use crate::unitary::UnitaryMatrix;

/// Column amplitudes below this contribute nothing; their optimal phase is 0.
pub const PHASE_AMPLITUDE_TOL: f64 = 1e-14;

fn check_photon_arg(x: f64) -> f64 {
    assert!(
        x.is_finite() && x >= 0.0,
        "photon-number argument must be finite and nonnegative, got {x}"
    );
    x
}

/// f₊(x) = x + √(x² + x): the anti-squeezed variance offset.
pub fn f_plus(x: f64) -> f64 {
    let x = check_photon_arg(x);
    x + (x * x + x).sqrt()
}

/// f₋(x) = x − √(x² + x): the squeezed variance offset (≤ 0).
///
/// Identities: f₊(x)·f₋(x) = −x and f₊(x) + f₋(x) = 2x.
pub fn f_minus(x: f64) -> f64 {
    let x = check_photon_arg(x);
    x - (x * x + x).sqrt()
}

/// The lossy replacement for f₊: η f₊(x) / (2(1−η) f₊(x) + 1).
/// Reduces exactly to f₊(x) at η = 1 and to 0 at η = 0.
pub fn f_plus_lossy(x: f64, eta: f64) -> Result<f64> {
    if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
        return Err(Error::OutOfRange {
            name: "transmittivity",
            value: eta,
            range: "[0, 1]",
        });
    }
    let f = f_plus(x);
    Ok(eta * f / (2.0 * (1.0 - eta) * f + 1.0))
}

/// Phases that align every term of column `input_mode`:
/// e^{iφₐ} = U*_{a,b}/|U_{a,b}|, with φₐ = 0 wherever |U_{a,b}| < 1e-14.
pub fn optimal_phases(u: &UnitaryMatrix, input_mode: usize) -> Result<PhaseVector> {
    let m = u.dim();
    if input_mode >= m {
        return Err(Error::ModeIndex {
            index: input_mode,
            modes: m,
        });
    }
    let phases = (0..m)
        .map(|a| {
            let z = u.entry(a, input_mode);
            if z.norm() < PHASE_AMPLITUDE_TOL {
                0.0
            } else {
                -z.arg()
            }
        })
        .collect();
    PhaseVector::new(phases)
}

/// QFI at explicit local phases, squeezed input on port 0:
/// 2M + 4[(Re c)² f₊(N̄) + (Im c)² f₋(N̄)] with c = Σₐ e^{iφₐ} U_{a0}.
pub fn qfi_phase(u: &UnitaryMatrix, phases: &PhaseVector, nbar: f64) -> Result<f64> {
    let m = u.dim();
    if phases.len() != m {
        return Err(Error::DimensionMismatch {
            what: "phase count vs network modes",
            left: phases.len(),
            right: m,
        });
    }
    let nbar_total = check_photon_arg(nbar) * m as f64;
    let c: Complex64 = phases
        .as_slice()
        .iter()
        .enumerate()
        .map(|(a, &phi)| Complex64::from_polar(1.0, phi) * u.entry(a, 0))
        .sum();
    Ok(2.0 * m as f64
        + 4.0 * (c.re * c.re * f_plus(nbar_total) + c.im * c.im * f_minus(nbar_total)))
}

/// Phase-optimized QFI at fixed input port 0: 2M + 4 (Σₐ|U_{a0}|)² f₊(n̄M).
pub fn h_lo(u: &UnitaryMatrix, nbar: f64) -> f64 {
    let m = u.dim();
    let s = u.column_abs_sum(0);
    2.0 * m as f64 + 4.0 * s * s * f_plus(check_photon_arg(nbar) * m as f64)
}

/// Network-independent maximum 2M + 4M f₊(n̄M).
pub fn h_max(m: usize, nbar: f64) -> f64 {
    assert!(m >= 1, "mode count must be at least 1");
    let mf = m as f64;
    2.0 * mf + 4.0 * mf * f_plus(check_photon_arg(nbar) * mf)
}

fn best_column_by<F: Fn(usize) -> f64>(m: usize, weight: F) -> f64 {
    // Strict > keeps the smallest index among ties.
    let mut best = f64::NEG_INFINITY;
    for b in 0..m {
        let w = weight(b);
        if w > best {
            best = w;
        }
    }
    best
}

/// Input-port-optimized QFI without phase control:
/// maxᵦ [2M + 4 |Σₐ U_{ab}|² f₊(n̄M)]. Ties resolve to the smallest index.
pub fn h_mo(u: &UnitaryMatrix, nbar: f64) -> f64 {
    h_mo_lossy(u, nbar, 1.0).expect("eta = 1 is always valid")
}

/// QFI with both input port and local phases optimized:
/// maxᵦ [2M + 4 (Σₐ|U_{ab}|)² f₊(n̄M)].
pub fn h_mlo(u: &UnitaryMatrix, nbar: f64) -> f64 {
    h_mlo_lossy(u, nbar, 1.0).expect("eta = 1 is always valid")
}

/// `h_lo` under uniform loss: the f₊ factor is replaced, nothing else moves.
pub fn h_lossy(u: &UnitaryMatrix, nbar: f64, eta: f64) -> Result<f64> {
    let m = u.dim();
    let s = u.column_abs_sum(0);
    let f = f_plus_lossy(check_photon_arg(nbar) * m as f64, eta)?;
    Ok(2.0 * m as f64 + 4.0 * s * s * f)
}

/// `h_mo` under uniform loss.
pub fn h_mo_lossy(u: &UnitaryMatrix, nbar: f64, eta: f64) -> Result<f64> {
    let m = u.dim();
    let f = f_plus_lossy(check_photon_arg(nbar) * m as f64, eta)?;
    let w = best_column_by(m, |b| u.column_sum(b).norm_sqr());
    Ok(2.0 * m as f64 + 4.0 * w * f)
}

/// `h_mlo` under uniform loss.
pub fn h_mlo_lossy(u: &UnitaryMatrix, nbar: f64, eta: f64) -> Result<f64> {
    let m = u.dim();
    let f = f_plus_lossy(check_photon_arg(nbar) * m as f64, eta)?;
    let w = best_column_by(m, |b| {
        let s = u.column_abs_sum(b);
        s * s
    });
    Ok(2.0 * m as f64 + 4.0 * w * f)
}

/// Loss-rate threshold: if the per-mode loss 1−η stays below
/// β = (1−α)/(1 + 2 f₊(n̄M)), the lossy QFI retains at least the fraction α
/// of its Heisenberg term.
pub fn loss_threshold_beta(alpha: f64, nbar: f64, m: usize) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "(0, 1)",
        });
    }
    assert!(m >= 1, "mode count must be at least 1");
    Ok((1.0 - alpha) / (1.0 + 2.0 * f_plus(check_photon_arg(nbar) * m as f64)))
}

/// Column diagnostic gᵢ = 4M + 8N̄ |Σₐ U_{ai}|²; the achievable QFI of any
/// input is bounded by maxᵢ gᵢ.
pub fn g_i(u: &UnitaryMatrix, i: usize, nbar: f64) -> Result<f64> {
    let m = u.dim();
    if i >= m {
        return Err(Error::ModeIndex { index: i, modes: m });
    }
    let nbar_total = check_photon_arg(nbar) * m as f64;
    Ok(4.0 * m as f64 + 8.0 * nbar_total * u.column_sum(i).norm_sqr())
}

/// Nonnegative photon budget split across input ports.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PhotonAllocation {
    per_mode: Vec<f64>,
}

impl PhotonAllocation {
    pub fn new(per_mode: Vec<f64>) -> Result<Self> {
        for &n in &per_mode {
            if !n.is_finite() || n < 0.0 {
                return Err(Error::OutOfRange {
                    name: "per-mode photon number",
                    value: n,
                    range: "[0, ∞)",
                });
            }
        }
        Ok(Self { per_mode })
    }

    /// Entire budget on one port.
    pub fn concentrated(m: usize, total: f64, mode: usize) -> Result<Self> {
        if mode >= m {
            return Err(Error::ModeIndex {
                index: mode,
                modes: m,
            });
        }
        let mut per_mode = vec![0.0; m];
        per_mode[mode] = total;
        Self::new(per_mode)
    }

    pub fn uniform(m: usize, total: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDimension {
                what: "mode count",
                min: 1,
                got: 0,
            });
        }
        Self::new(vec![total / m as f64; m])
    }

    pub fn len(&self) -> usize {
        self.per_mode.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_mode.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.per_mode
    }

    pub fn total(&self) -> f64 {
        self.per_mode.iter().sum()
    }
}

/// QFI of a product of squeezed vacua with budget `alloc` under phases `φ`:
/// 2M + 4 Σᵦ |Σₐ e^{iφₐ} U_{ab}|² f₊(n̄ᵦ).
pub fn h_proper_squeezed(
    u: &UnitaryMatrix,
    phases: &PhaseVector,
    alloc: &PhotonAllocation,
) -> Result<f64> {
    let m = u.dim();
    if phases.len() != m {
        return Err(Error::DimensionMismatch {
            what: "phase count vs network modes",
            left: phases.len(),
            right: m,
        });
    }
    if alloc.len() != m {
        return Err(Error::DimensionMismatch {
            what: "allocation length vs network modes",
            left: alloc.len(),
            right: m,
        });
    }
    let mut sum = 0.0;
    for (b, &nb) in alloc.as_slice().iter().enumerate() {
        let c = phased_column_sum(u, phases, b);
        sum += c.norm_sqr() * f_plus(nb);
    }
    Ok(2.0 * m as f64 + 4.0 * sum)
}

/// Upper bound over all allocations at total budget N̄:
/// 2M + 4M f₊(p_ν N̄) with p_ν = maxᵦ |Σₐ e^{iφₐ} U_{ab}|²/M ≤ 1.
pub fn h_global_bound(u: &UnitaryMatrix, phases: &PhaseVector, nbar_total: f64) -> Result<f64> {
    let m = u.dim();
    if phases.len() != m {
        return Err(Error::DimensionMismatch {
            what: "phase count vs network modes",
            left: phases.len(),
            right: m,
        });
    }
    if !nbar_total.is_finite() || nbar_total < 0.0 {
        return Err(Error::OutOfRange {
            name: "total photon number",
            value: nbar_total,
            range: "[0, ∞)",
        });
    }
    let p = best_column_by(m, |b| phased_column_sum(u, phases, b).norm_sqr()) / m as f64;
    Ok(2.0 * m as f64 + 4.0 * m as f64 * f_plus(p * nbar_total))
}

fn phased_column_sum(u: &UnitaryMatrix, phases: &PhaseVector, b: usize) -> Complex64 {
    phases
        .as_slice()
        .iter()
        .enumerate()
        .map(|(a, &phi)| Complex64::from_polar(1.0, phi) * u.entry(a, b))
        .sum()
}

/// Diagnostic constant 8M f₊(n̄M) bounding |h_lo(U′) − h_lo(U)| by
/// bound · ‖U′ − U‖_HS.
pub fn lipschitz_bound(m: usize, nbar: f64) -> f64 {
    assert!(m >= 1, "mode count must be at least 1");
    8.0 * m as f64 * f_plus(check_photon_arg(nbar) * m as f64)
}

/// Lossy counterpart: 8M · η f₊(n̄M)/(2(1−η) f₊(n̄M) + 1).
pub fn lipschitz_bound_lossy(m: usize, nbar: f64, eta: f64) -> Result<f64> {
    assert!(m >= 1, "mode count must be at least 1");
    Ok(8.0 * m as f64 * f_plus_lossy(check_photon_arg(nbar) * m as f64, eta)?)
}

/// Everything worth knowing about one network at one photon budget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QfiBreakdown {
    pub m: usize,
    pub nbar: f64,
    pub h_lo: f64,
    pub h_mo: f64,
    pub h_mlo: f64,
    pub h_max: f64,
    pub optimal_phases: PhaseVector,
    /// Σₐ|U_{ab}| per column b.
    pub column_abs_sums: Vec<f64>,
    /// |Σₐ U_{ab}|² per column b.
    pub column_sums_abs2: Vec<f64>,
}

impl QfiBreakdown {
    pub fn from_unitary(u: &UnitaryMatrix, nbar: f64) -> Self {
        let m = u.dim();
        let column_abs_sums: Vec<f64> = (0..m).map(|b| u.column_abs_sum(b)).collect();
        let column_sums_abs2: Vec<f64> = (0..m).map(|b| u.column_sum(b).norm_sqr()).collect();
        Self {
            m,
            nbar,
            h_lo: h_lo(u, nbar),
            h_mo: h_mo(u, nbar),
            h_mlo: h_mlo(u, nbar),
            h_max: h_max(m, nbar),
            optimal_phases: optimal_phases(u, 0).expect("port 0 exists"),
            column_abs_sums,
            column_sums_abs2,
        }
    }
}
