//! Complex matrices, Haar-random unitaries, and matrix diagnostics.
//!
//! Haar samples come from the Ginibre construction: draw `Z` with iid standard
//! complex Gaussian entries (real and imaginary parts each of variance 1/2),
//! then orthonormalize its columns in order with modified Gram-Schmidt.
//! Column-ordered Gram-Schmidt with positive normalizers is exactly the
//! phase-fixed QR factor of `Z`, so [`unitarize`] doubles as the
//! re-unitarization step for long products of local gates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use crate::error::{Error, Result};

/// Anything claiming to be unitary must satisfy max |U†U - I| ≤ this.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Projected column norms below this count as rank deficiency in Gram-Schmidt.
pub const RANK_TOL: f64 = 1e-12;

/// Dense complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    mat: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Wrap a matrix, rejecting empty shapes and non-finite entries.
    pub fn from_matrix(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() == 0 || mat.ncols() == 0 {
            return Err(Error::InvalidDimension {
                what: "matrix",
                min: 1,
                got: 0,
            });
        }
        for j in 0..mat.ncols() {
            for i in 0..mat.nrows() {
                let z = mat[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
            }
        }
        Ok(Self { mat })
    }

    /// Build from row-major entries.
    pub fn from_rows(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "row-major entry count",
                left: entries.len(),
                right: rows * cols,
            });
        }
        Self::from_matrix(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn rows(&self) -> usize {
        self.mat.nrows()
    }

    pub fn cols(&self) -> usize {
        self.mat.ncols()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }
}

/// Square matrix guaranteed unitary within [`UNITARITY_TOL`] at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    inner: ComplexMatrix,
}

impl UnitaryMatrix {
    /// Validate shape, finiteness, and max |U†U - I| ≤ [`UNITARITY_TOL`].
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                what: "unitary matrix shape",
                left: mat.nrows(),
                right: mat.ncols(),
            });
        }
        let inner = ComplexMatrix::from_matrix(mat)?;
        let deviation = unitarity_deviation(inner.as_matrix());
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary {
                deviation,
                tol: UNITARITY_TOL,
            });
        }
        Ok(Self { inner })
    }

    pub fn from_complex(mat: ComplexMatrix) -> Result<Self> {
        Self::new(mat.as_matrix().clone())
    }

    pub fn identity(m: usize) -> Self {
        Self {
            inner: ComplexMatrix {
                mat: DMatrix::identity(m, m),
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.inner.entry(row, col)
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        self.inner.as_matrix()
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        &self.inner
    }

    /// Σₐ |U_{a,col}|. Panics on an out-of-range column.
    pub fn column_abs_sum(&self, col: usize) -> f64 {
        self.inner.mat.column(col).iter().map(|z| z.norm()).sum()
    }

    /// Σₐ U_{a,col}. Panics on an out-of-range column.
    pub fn column_sum(&self, col: usize) -> Complex64 {
        self.inner.mat.column(col).iter().sum()
    }
}

/// max |U†U - I| over all entries.
pub fn unitarity_deviation(mat: &DMatrix<Complex64>) -> f64 {
    let m = mat.ncols();
    let gram = mat.adjoint() * mat;
    let mut dev = 0.0f64;
    for j in 0..m {
        for i in 0..m {
            let target = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            dev = dev.max((gram[(i, j)] - target).norm());
        }
    }
    dev
}

/// M×M matrix of iid standard complex Gaussians, E|z|² = 1.
pub fn sample_ginibre<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if m == 0 {
        return Err(Error::InvalidDimension {
            what: "Ginibre matrix",
            min: 1,
            got: 0,
        });
    }
    // Column-major fill; the draw order is part of the determinism contract.
    let entries: Vec<Complex64> = (0..m * m)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
        })
        .collect();
    ComplexMatrix::from_matrix(DMatrix::from_vec(m, m, entries))
}

/// Modified Gram-Schmidt over columns, in place. Errors when a projected
/// column norm falls below [`RANK_TOL`].
pub(crate) fn mgs_in_place(mat: &mut DMatrix<Complex64>) -> Result<()> {
    let one = Complex64::new(1.0, 0.0);
    for j in 0..mat.ncols() {
        for k in 0..j {
            let qk: DVector<Complex64> = mat.column(k).into_owned();
            let proj = qk.dotc(&mat.column(j).into_owned());
            mat.column_mut(j).axpy(-proj, &qk, one);
        }
        let norm = mat.column(j).norm();
        if norm < RANK_TOL {
            return Err(Error::DegenerateInput {
                column: j,
                norm,
                tol: RANK_TOL,
            });
        }
        mat.column_mut(j).unscale_mut(norm);
    }
    Ok(())
}

/// Orthonormalize the columns of `Z` in order (column 1 = Z₁/‖Z₁‖, then each
/// later column minus its projections onto the earlier ones, normalized).
pub fn unitarize(z: &ComplexMatrix) -> Result<UnitaryMatrix> {
    if z.rows() != z.cols() {
        return Err(Error::DimensionMismatch {
            what: "unitarize input shape",
            left: z.rows(),
            right: z.cols(),
        });
    }
    let mut q = z.as_matrix().clone();
    mgs_in_place(&mut q)?;
    // Twice is enough: a second pass repairs ill-conditioned inputs.
    if unitarity_deviation(&q) > UNITARITY_TOL {
        mgs_in_place(&mut q)?;
    }
    UnitaryMatrix::new(q)
}

/// Haar-random M×M unitary: Ginibre sample followed by Gram-Schmidt.
pub fn sample_haar_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    let z = sample_ginibre(m, rng)?;
    unitarize(&z)
}

/// Haar-random 2×2 unitary (local beam-splitter gate).
pub fn sample_local_u2<R: Rng + ?Sized>(rng: &mut R) -> UnitaryMatrix {
    sample_haar_unitary(2, rng).expect("2x2 Ginibre sample cannot be rank-deficient")
}

/// Hilbert-Schmidt distance √Tr[(A-B)†(A-B)].
pub fn hs_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            what: "hs_distance operands",
            left: a.rows() * a.cols(),
            right: b.rows() * b.cols(),
        });
    }
    Ok((a.as_matrix() - b.as_matrix()).norm())
}

/// Discrete-Fourier (balanced) network: U_{ab} = e^{2πi·ab/M}/√M.
/// Its first column is constant positive, so it saturates the QFI maximum.
pub fn dft_matrix(m: usize) -> Result<UnitaryMatrix> {
    if m == 0 {
        return Err(Error::InvalidDimension {
            what: "DFT matrix",
            min: 1,
            got: 0,
        });
    }
    let scale = 1.0 / (m as f64).sqrt();
    let mat = DMatrix::from_fn(m, m, |a, b| {
        Complex64::from_polar(scale, TAU * (a * b) as f64 / m as f64)
    });
    UnitaryMatrix::new(mat)
}
