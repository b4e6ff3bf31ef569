//! M-mode Gaussian states and their evolution through passive networks,
//! phase shifts, displacement encoding, and uniform photon loss; Fisher
//! information computed directly from moments.
//!
//! Quadrature convention: `x̂ = (â + â†)/√2`, `p̂ = (â − â†)/(i√2)`, so the
//! vacuum variance is 1/2. State vectors are ordered `(x₁ … x_M, p₁ … p_M)`;
//! the covariance matrix uses the same block ordering, which makes the x-x
//! block a contiguous M×M submatrix. A network unitary `U` acts on quadratures
//! through the symplectic
//!
//! ```text
//! S(U) = [ Re U   −Im U ]
//!        [ Im U    Re U ]
//! ```
//!
//! which is orthogonal as well as symplectic, so passive evolution preserves
//! both purity and total photon number.
//!
//! The estimation target everywhere is a common displacement `x` added to
//! every x-quadrature (generator Σⱼ p̂ⱼ), so the derivative of the mean vector
//! is the constant `(1, …, 1, 0, …, 0)` and the Fisher information of a
//! Gaussian probe reduces to `∂μᵀ Σ⁻¹ ∂μ`.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::qfi::{f_minus, f_plus};
use crate::unitary::UnitaryMatrix;

/// Gaussian state: mean vector and symmetric covariance, block-ordered.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    modes: usize,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Vacuum: zero mean, covariance I/2.
    pub fn vacuum(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDimension {
                what: "mode count",
                min: 1,
                got: 0,
            });
        }
        Ok(Self {
            modes: m,
            mean: DVector::zeros(2 * m),
            cov: DMatrix::identity(2 * m, 2 * m) * 0.5,
        })
    }

    /// Build from raw moments. The covariance is symmetrized on entry;
    /// positive definiteness is checked lazily by the solvers.
    pub fn from_mean_cov(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidDimension {
                what: "quadrature vector length (must be even)",
                min: 2,
                got: dim,
            });
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::DimensionMismatch {
                what: "covariance shape vs mean length",
                left: cov.nrows(),
                right: dim,
            });
        }
        if mean.iter().any(|v| !v.is_finite()) || cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry { row: 0, col: 0 });
        }
        Ok(Self {
            modes: dim / 2,
            mean,
            cov: symmetrized(cov),
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Total mean photon number Σⱼ⟨âⱼ†âⱼ⟩ = (Tr Σ + ‖μ‖²)/2 − M/2.
    pub fn total_mean_photons(&self) -> f64 {
        (self.cov.trace() + self.mean.norm_squared()) / 2.0 - self.modes as f64 / 2.0
    }
}

fn symmetrized(cov: DMatrix<f64>) -> DMatrix<f64> {
    let t = cov.transpose();
    (cov + t) * 0.5
}

/// Per-mode phase shifts, entries canonicalized to (−π, π].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PhaseVector {
    phases: Vec<f64>,
}

fn canonical_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

impl PhaseVector {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFiniteEntry { row: 0, col: 0 });
        }
        Ok(Self {
            phases: phases.into_iter().map(canonical_phase).collect(),
        })
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            phases: vec![0.0; m],
        }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.phases
    }
}

/// Single-mode squeezed vacuum injected into one input port.
///
/// `mean_photons` is the total N̄ of the squeezed mode; the squeezing
/// parameter is r = arcsinh(√N̄).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezingSpec {
    pub input_mode: usize,
    pub mean_photons: f64,
}

impl SqueezingSpec {
    pub fn new(input_mode: usize, mean_photons: f64) -> Result<Self> {
        if !mean_photons.is_finite() || mean_photons < 0.0 {
            return Err(Error::OutOfRange {
                name: "mean_photons",
                value: mean_photons,
                range: "[0, ∞)",
            });
        }
        Ok(Self {
            input_mode,
            mean_photons,
        })
    }

    pub fn squeezing_parameter(&self) -> f64 {
        self.mean_photons.sqrt().asinh()
    }
}

/// Uniform photon-loss channel of transmittivity η across all modes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossSpec {
    transmittivity: f64,
}

impl LossSpec {
    pub fn new(transmittivity: f64) -> Result<Self> {
        if !transmittivity.is_finite() || !(0.0..=1.0).contains(&transmittivity) {
            return Err(Error::OutOfRange {
                name: "transmittivity",
                value: transmittivity,
                range: "[0, 1]",
            });
        }
        Ok(Self { transmittivity })
    }

    pub fn transmittivity(&self) -> f64 {
        self.transmittivity
    }
}

/// Vacuum in all modes except `sq.input_mode`, which carries an x-squeezed
/// vacuum: x-variance f₋(N̄) + 1/2 = e^{−2r}/2, p-variance f₊(N̄) + 1/2 =
/// e^{2r}/2 (minimum-uncertainty, product 1/4).
pub fn make_input_state(m: usize, sq: &SqueezingSpec) -> Result<GaussianState> {
    let mut state = GaussianState::vacuum(m)?;
    if sq.input_mode >= m {
        return Err(Error::ModeIndex {
            index: sq.input_mode,
            modes: m,
        });
    }
    let b = sq.input_mode;
    let n = sq.mean_photons;
    state.cov[(b, b)] = f_minus(n) + 0.5;
    state.cov[(m + b, m + b)] = f_plus(n) + 0.5;
    Ok(state)
}

/// The 2M×2M symplectic implementing `U` on quadratures.
pub fn bsn_symplectic(u: &UnitaryMatrix) -> DMatrix<f64> {
    let m = u.dim();
    let mut s = DMatrix::zeros(2 * m, 2 * m);
    for j in 0..m {
        for i in 0..m {
            let z = u.entry(i, j);
            s[(i, j)] = z.re;
            s[(i, m + j)] = -z.im;
            s[(m + i, j)] = z.im;
            s[(m + i, m + j)] = z.re;
        }
    }
    s
}

/// mean → S·mean, cov → S·cov·Sᵀ.
pub fn apply_bsn(state: &GaussianState, u: &UnitaryMatrix) -> Result<GaussianState> {
    if u.dim() != state.modes() {
        return Err(Error::DimensionMismatch {
            what: "network modes vs state modes",
            left: u.dim(),
            right: state.modes(),
        });
    }
    let s = bsn_symplectic(u);
    let mean = &s * state.mean();
    let cov = &s * state.cov() * s.transpose();
    GaussianState::from_mean_cov(mean, cov)
}

/// Per-mode rotation of (xⱼ, pⱼ) by φⱼ: the quadrature action of the local
/// phase shift e^{iφⱼ} on âⱼ.
pub fn apply_phase_shifts(state: &GaussianState, phases: &PhaseVector) -> Result<GaussianState> {
    let m = state.modes();
    if phases.len() != m {
        return Err(Error::DimensionMismatch {
            what: "phase count vs state modes",
            left: phases.len(),
            right: m,
        });
    }
    let mut mean = state.mean().clone();
    let mut cov = state.cov().clone();
    for (j, &phi) in phases.as_slice().iter().enumerate() {
        let (sin, cos) = phi.sin_cos();
        let (mx, mp) = (mean[j], mean[m + j]);
        mean[j] = cos * mx - sin * mp;
        mean[m + j] = sin * mx + cos * mp;
        for col in 0..2 * m {
            let (a, b) = (cov[(j, col)], cov[(m + j, col)]);
            cov[(j, col)] = cos * a - sin * b;
            cov[(m + j, col)] = sin * a + cos * b;
        }
        for row in 0..2 * m {
            let (a, b) = (cov[(row, j)], cov[(row, m + j)]);
            cov[(row, j)] = cos * a - sin * b;
            cov[(row, m + j)] = sin * a + cos * b;
        }
    }
    GaussianState::from_mean_cov(mean, cov)
}

/// Shift every x-quadrature mean by `x`; covariance untouched.
pub fn apply_displacement(state: &GaussianState, x: f64) -> GaussianState {
    let m = state.modes();
    let mut mean = state.mean().clone();
    for j in 0..m {
        mean[j] += x;
    }
    GaussianState {
        modes: m,
        mean,
        cov: state.cov().clone(),
    }
}

/// cov → η·cov + (1−η)·I/2, mean → √η·mean.
pub fn apply_loss(state: &GaussianState, loss: &LossSpec) -> GaussianState {
    let eta = loss.transmittivity();
    let dim = 2 * state.modes();
    let mut cov = state.cov() * eta;
    for d in 0..dim {
        cov[(d, d)] += (1.0 - eta) * 0.5;
    }
    GaussianState {
        modes: state.modes(),
        mean: state.mean() * eta.sqrt(),
        cov,
    }
}

/// Quantum Fisher information of the common x-displacement for a Gaussian
/// probe: ∂μᵀ Σ⁻¹ ∂μ with ∂μ = (1,…,1,0,…,0), by positive-definite solve.
pub fn qfi_displacement(state: &GaussianState) -> Result<f64> {
    let m = state.modes();
    let chol = Cholesky::new(state.cov().clone()).ok_or(Error::NotPositiveDefinite {
        what: "covariance matrix",
    })?;
    let mut v = DVector::zeros(2 * m);
    for j in 0..m {
        v[j] = 1.0;
    }
    let y = chol.solve(&v);
    Ok(v.dot(&y))
}

/// Classical Fisher information of x-basis homodyne on every mode:
/// Σᵢⱼ [(Σˣˣ)⁻¹]ᵢⱼ over the upper-left M×M covariance block.
pub fn classical_fisher_homodyne(state: &GaussianState) -> Result<f64> {
    let m = state.modes();
    let xx = state.cov().view((0, 0), (m, m)).into_owned();
    let chol = Cholesky::new(xx).ok_or(Error::NotPositiveDefinite {
        what: "x-quadrature covariance block",
    })?;
    let ones = DVector::from_element(m, 1.0);
    let y = chol.solve(&ones);
    Ok(ones.dot(&y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::unitary::sample_haar_unitary;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn vacuum_has_unit_half_variances() {
        let v = GaussianState::vacuum(3).unwrap();
        assert_eq!(v.mean().norm(), 0.0);
        assert_eq!(v.cov(), &(DMatrix::identity(6, 6) * 0.5));
        assert_abs_diff_eq!(v.total_mean_photons(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn squeezed_input_variances_and_uncertainty_product() {
        // N̄ = 3 in mode 0: p-variance f₊(3)+1/2, x-variance f₋(3)+1/2.
        let sq = SqueezingSpec::new(0, 3.0).unwrap();
        let s = make_input_state(1, &sq).unwrap();
        assert_abs_diff_eq!(s.cov()[(1, 1)], 6.964101615137754, epsilon = 1e-12);
        assert_abs_diff_eq!(s.cov()[(0, 0)], 0.035_898_384_862_245_5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.cov()[(0, 0)] * s.cov()[(1, 1)], 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(s.total_mean_photons(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_squeezing_is_vacuum() {
        let sq = SqueezingSpec::new(0, 0.0).unwrap();
        assert_eq!(
            make_input_state(2, &sq).unwrap(),
            GaussianState::vacuum(2).unwrap()
        );
    }

    #[test]
    fn squeezing_touches_only_its_mode() {
        let sq = SqueezingSpec::new(2, 1.7).unwrap();
        let s = make_input_state(4, &sq).unwrap();
        for d in 0..8 {
            if d == 2 || d == 6 {
                continue;
            }
            assert_eq!(s.cov()[(d, d)], 0.5);
        }
        assert!(matches!(
            make_input_state(2, &sq).unwrap_err(),
            Error::ModeIndex { index: 2, modes: 2 }
        ));
    }

    #[test]
    fn symplectic_of_identity_is_identity() {
        let s = bsn_symplectic(&UnitaryMatrix::identity(3));
        assert_eq!(s, DMatrix::identity(6, 6));
    }

    #[test]
    fn symplectic_of_phase_is_rotation() {
        // M = 1, U = e^{iθ}: S must match the phase-shift rotation.
        let theta = 0.7313;
        let u = UnitaryMatrix::new(DMatrix::from_row_slice(
            1,
            1,
            &[num_complex::Complex64::from_polar(1.0, theta)],
        ))
        .unwrap();
        let s = bsn_symplectic(&u);
        assert_abs_diff_eq!(s[(0, 0)], theta.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(s[(0, 1)], -theta.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(s[(1, 0)], theta.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(s[(1, 1)], theta.cos(), epsilon = 1e-15);
    }

    #[test]
    fn symplectic_is_orthogonal_and_symplectic() {
        let m = 5;
        let u = sample_haar_unitary(m, &mut RngStream::new(77, 0).rng()).unwrap();
        let s = bsn_symplectic(&u);
        let eye = DMatrix::<f64>::identity(2 * m, 2 * m);
        assert!(((s.transpose() * &s) - &eye).amax() <= 1e-10);
        // J = [[0, I], [-I, 0]] in block (x..., p...) ordering.
        let mut j = DMatrix::<f64>::zeros(2 * m, 2 * m);
        for k in 0..m {
            j[(k, m + k)] = 1.0;
            j[(m + k, k)] = -1.0;
        }
        assert!(((&s * &j * s.transpose()) - &j).amax() <= 1e-10);
    }

    #[test]
    fn passive_network_preserves_vacuum_and_photons() {
        let u = sample_haar_unitary(4, &mut RngStream::new(5, 1).rng()).unwrap();
        let vac = GaussianState::vacuum(4).unwrap();
        let out = apply_bsn(&vac, &u).unwrap();
        assert!((out.cov() - vac.cov()).amax() <= 1e-12);

        let sq = SqueezingSpec::new(0, 2.4).unwrap();
        let probe = apply_bsn(&make_input_state(4, &sq).unwrap(), &u).unwrap();
        assert_abs_diff_eq!(probe.total_mean_photons(), 2.4, epsilon = 1e-10);
    }

    #[test]
    fn phase_shift_edge_cases() {
        let m = 2;
        let sq = SqueezingSpec::new(0, 1.0).unwrap();
        let s0 = make_input_state(m, &sq).unwrap();

        let unchanged = apply_phase_shifts(&s0, &PhaseVector::zeros(m)).unwrap();
        assert_eq!(&unchanged, &s0);

        // π/2 swaps the squeezed and anti-squeezed variances of mode 0.
        let quarter = PhaseVector::new(vec![FRAC_PI_2, 0.0]).unwrap();
        let rot = apply_phase_shifts(&s0, &quarter).unwrap();
        assert_abs_diff_eq!(rot.cov()[(0, 0)], s0.cov()[(m, m)], epsilon = 1e-12);
        assert_abs_diff_eq!(rot.cov()[(m, m)], s0.cov()[(0, 0)], epsilon = 1e-12);

        let vac = GaussianState::vacuum(m).unwrap();
        let vac_rot = apply_phase_shifts(&vac, &quarter).unwrap();
        assert!((vac_rot.cov() - vac.cov()).amax() <= 1e-15);
    }

    #[test]
    fn displacement_moves_means_only() {
        let vac = GaussianState::vacuum(3).unwrap();
        let d = apply_displacement(&vac, 1.5);
        assert_eq!(d.mean().as_slice(), &[1.5, 1.5, 1.5, 0.0, 0.0, 0.0]);
        assert_eq!(d.cov(), vac.cov());
        assert_eq!(apply_displacement(&vac, 0.0), vac);
    }

    #[test]
    fn loss_edge_cases_and_affine_map() {
        let sq = SqueezingSpec::new(0, 3.0).unwrap();
        let s = apply_displacement(&make_input_state(1, &sq).unwrap(), 2.0);

        let id = apply_loss(&s, &LossSpec::new(1.0).unwrap());
        assert!((id.cov() - s.cov()).amax() <= 1e-15);
        assert!((id.mean() - s.mean()).amax() <= 1e-15);

        let dark = apply_loss(&s, &LossSpec::new(0.0).unwrap());
        assert!((dark.cov() - GaussianState::vacuum(1).unwrap().cov()).amax() <= 1e-15);
        assert_eq!(dark.mean().amax(), 0.0);

        // η = 1/2 on the anti-squeezed variance: 0.5·f₊(3) + 0.5·0.5 + 0.25… = 3.7320…
        let half = apply_loss(&s, &LossSpec::new(0.5).unwrap());
        assert_abs_diff_eq!(half.cov()[(1, 1)], 3.732_050_807_568_877, epsilon = 1e-12);

        assert!(LossSpec::new(1.2).is_err());
        assert!(LossSpec::new(-0.1).is_err());
    }

    #[test]
    fn vacuum_fisher_is_twice_mode_count() {
        for m in [1, 3, 7] {
            let vac = GaussianState::vacuum(m).unwrap();
            assert_abs_diff_eq!(qfi_displacement(&vac).unwrap(), 2.0 * m as f64, epsilon = 1e-10);
            assert_abs_diff_eq!(
                classical_fisher_homodyne(&vac).unwrap(),
                2.0 * m as f64,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn nonpositive_covariance_is_rejected() {
        let mean = DVector::zeros(2);
        let cov = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, -0.5]);
        let bad = GaussianState::from_mean_cov(mean, cov).unwrap();
        assert!(matches!(
            qfi_displacement(&bad).unwrap_err(),
            Error::NotPositiveDefinite { .. }
        ));
    }

    #[test]
    fn phase_canonicalization() {
        let p = PhaseVector::new(vec![3.0 * PI, -PI, 0.0, PI]).unwrap();
        assert_abs_diff_eq!(p.as_slice()[0], PI, epsilon = 1e-12);
        assert_abs_diff_eq!(p.as_slice()[1], PI, epsilon = 1e-12);
        assert_eq!(p.as_slice()[2], 0.0);
        assert_eq!(p.as_slice()[3], PI);
        assert!(PhaseVector::new(vec![f64::NAN]).is_err());
    }
}
