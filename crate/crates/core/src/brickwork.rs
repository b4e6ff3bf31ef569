//! Brickwork networks of Haar-random two-mode beam splitters.
//!
//! Layer t couples adjacent mode pairs starting at offset t mod 2 (open
//! boundary: an unpaired edge mode idles for that layer):
//!
//! ```text
//! layer 0:  (0,1) (2,3) (4,5) ...
//! layer 1:     (1,2) (3,4) ...
//! layer 2:  (0,1) (2,3) ...
//! ```
//!
//! Gates compose by left multiplication (U ← G·U), i.e. each gate is an O(M)
//! row operation on the accumulated matrix. Products are re-orthonormalized
//! every [`REUNITARIZE_INTERVAL`] layers so arbitrarily deep circuits stay
//! unitary to tolerance.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qfi;
use crate::rng::RngStream;
use crate::unitary::{mgs_in_place, sample_local_u2, UnitaryMatrix};

/// Layers between re-orthonormalization passes of the accumulated product.
pub const REUNITARIZE_INTERVAL: usize = 512;

/// A local-circuit description: M modes, D brickwork layers, and the seed
/// that determines every gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BrickworkSpec {
    pub modes: usize,
    pub depth: usize,
    pub seed: u64,
}

impl BrickworkSpec {
    pub fn new(modes: usize, depth: usize, seed: u64) -> Result<Self> {
        if modes < 2 {
            return Err(Error::InvalidDimension {
                what: "brickwork modes",
                min: 2,
                got: modes,
            });
        }
        Ok(Self { modes, depth, seed })
    }
}

/// Draw and apply one layer of independent Haar 2×2 gates.
fn apply_layer<R: Rng + ?Sized>(u: &mut DMatrix<Complex64>, m: usize, layer: usize, rng: &mut R) {
    let offset = layer % 2;
    let mut i = offset;
    while i + 1 < m {
        let g = sample_local_u2(rng);
        let (g00, g01) = (g.entry(0, 0), g.entry(0, 1));
        let (g10, g11) = (g.entry(1, 0), g.entry(1, 1));
        for col in 0..m {
            let a = u[(i, col)];
            let b = u[(i + 1, col)];
            u[(i, col)] = g00 * a + g01 * b;
            u[(i + 1, col)] = g10 * a + g11 * b;
        }
        i += 2;
    }
}

/// Build the depth-D brickwork unitary for `spec`. Depth 0 is the identity.
pub fn build_brickwork(spec: &BrickworkSpec) -> Result<UnitaryMatrix> {
    BrickworkSpec::new(spec.modes, spec.depth, spec.seed)?;
    let m = spec.modes;
    let mut rng = RngStream::new(spec.seed, 0).rng();
    let mut u = DMatrix::<Complex64>::identity(m, m);
    for layer in 0..spec.depth {
        apply_layer(&mut u, m, layer, &mut rng);
        if (layer + 1) % REUNITARIZE_INTERVAL == 0 {
            mgs_in_place(&mut u)?;
        }
    }
    UnitaryMatrix::new(u)
}

/// Depth-resolved ensemble statistics of h/M² over independent brickwork
/// circuits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DepthStats {
    pub depth: usize,
    pub configs: usize,
    pub mean_h_lo_over_m2: f64,
    pub mean_h_mlo_over_m2: f64,
    pub std_h_lo_over_m2: f64,
    pub std_h_mlo_over_m2: f64,
}

impl DepthStats {
    pub fn se_h_lo_over_m2(&self) -> f64 {
        self.std_h_lo_over_m2 / (self.configs as f64).sqrt()
    }

    pub fn se_h_mlo_over_m2(&self) -> f64 {
        self.std_h_mlo_over_m2 / (self.configs as f64).sqrt()
    }
}

/// Sweep circuit depth: for each requested depth, average h_lo/M² and
/// h_mlo/M² over `configs` independently drawn circuits. Config `c` draws its
/// gates from stream index `c`; each circuit is built once and snapshotted
/// incrementally at the requested depths (sorted, deduplicated).
pub fn depth_sweep(
    m: usize,
    nbar: f64,
    depths: &[usize],
    configs: usize,
    seed: u64,
) -> Result<Vec<DepthStats>> {
    if m < 2 {
        return Err(Error::InvalidDimension {
            what: "brickwork modes",
            min: 2,
            got: m,
        });
    }
    if configs < 2 {
        return Err(Error::TooFew {
            what: "circuit configs",
            min: 2,
            got: configs,
        });
    }
    if !nbar.is_finite() || nbar < 0.0 {
        return Err(Error::OutOfRange {
            name: "nbar",
            value: nbar,
            range: "[0, ∞)",
        });
    }
    let mut sorted: Vec<usize> = depths.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty() {
        return Ok(Vec::new());
    }
    let deepest = *sorted.last().expect("nonempty");
    let m2 = (m * m) as f64;

    let per_config: Vec<Vec<(f64, f64)>> = (0..configs)
        .into_par_iter()
        .map(|c| -> Result<Vec<(f64, f64)>> {
            let mut rng = RngStream::new(seed, c as u64).rng();
            let mut u = DMatrix::<Complex64>::identity(m, m);
            let mut snapshots = Vec::with_capacity(sorted.len());
            let mut next = 0;
            if sorted[next] == 0 {
                let id = UnitaryMatrix::identity(m);
                snapshots.push((qfi::h_lo(&id, nbar) / m2, qfi::h_mlo(&id, nbar) / m2));
                next += 1;
            }
            for layer in 0..deepest {
                apply_layer(&mut u, m, layer, &mut rng);
                if (layer + 1) % REUNITARIZE_INTERVAL == 0 {
                    mgs_in_place(&mut u)?;
                }
                if next < sorted.len() && sorted[next] == layer + 1 {
                    let snap = UnitaryMatrix::new(u.clone())?;
                    snapshots.push((qfi::h_lo(&snap, nbar) / m2, qfi::h_mlo(&snap, nbar) / m2));
                    next += 1;
                }
            }
            Ok(snapshots)
        })
        .collect::<Result<_>>()?;

    Ok(sorted
        .iter()
        .enumerate()
        .map(|(d_idx, &depth)| {
            let h_lo: Vec<f64> = per_config.iter().map(|cfg| cfg[d_idx].0).collect();
            let h_mlo: Vec<f64> = per_config.iter().map(|cfg| cfg[d_idx].1).collect();
            let (mean_lo, std_lo) = mean_std(&h_lo);
            let (mean_mlo, std_mlo) = mean_std(&h_mlo);
            DepthStats {
                depth,
                configs,
                mean_h_lo_over_m2: mean_lo,
                mean_h_mlo_over_m2: mean_mlo,
                std_h_lo_over_m2: std_lo,
                std_h_mlo_over_m2: std_mlo,
            }
        })
        .collect())
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// The depth grid used by the depth-sweep experiments: 8 geometrically spaced
/// values of D/M² spanning [0.01, 2].
pub fn depth_grid_fractions() -> [f64; 8] {
    let (lo, hi) = (0.01f64, 2.0f64);
    std::array::from_fn(|i| lo * (hi / lo).powf(i as f64 / 7.0))
}

/// [`depth_grid_fractions`] scaled to layer counts for M modes: each fraction
/// g becomes max(1, round(g·M²)), deduplicated.
pub fn default_depth_grid(m: usize) -> Vec<usize> {
    let m2 = (m * m) as f64;
    let mut grid: Vec<usize> = depth_grid_fractions()
        .iter()
        .map(|g| ((g * m2).round() as usize).max(1))
        .collect();
    grid.dedup();
    grid
}
