//! Dense complex linear algebra for exact circuit analysis.
//!
//! Everything in this crate works on full 2^n-dimensional objects: a
//! width-`n` register lives in a 2^n-dimensional space and every operator is
//! a dense 2^n × 2^n matrix. That is deliberate — detection probabilities
//! are read straight off matrix columns, so the representation has to be
//! exact, and the supported widths (≤ 12 lines) keep dense storage
//! affordable.
//!
//! Conventions, applied consistently across the crate:
//!
//! * Matrices act on column vectors; the output of a circuit for basis input
//!   `|i⟩` is column `i` of its total matrix.
//! * Line 0 is the **most significant** bit of a basis index, i.e. the
//!   leftmost factor of a tensor product.
//! * Floating-point comparisons use absolute tolerances: [`DEFAULT_TOL`]
//!   unless stated otherwise, [`UNITARY_TOL`] for unitarity checks
//!   (elementwise max modulus of `U†U − I`).

use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default absolute tolerance for floating-point comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Absolute tolerance for unitarity checks: `max_ij |(U†U − I)_ij|`.
pub const UNITARY_TOL: f64 = 1e-8;

/// Matrix dimension at which the data-parallel kernels take over. Below
/// this, per-row closures cost more than they save.
#[cfg(feature = "parallel")]
const PAR_DIM_THRESHOLD: usize = 64;

fn is_power_of_two(dim: usize) -> bool {
    dim != 0 && dim & (dim - 1) == 0
}

fn check_power_of_two(dim: usize) -> Result<()> {
    if is_power_of_two(dim) {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo(dim))
    }
}

fn all_finite(values: &[Complex64]) -> bool {
    values
        .iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
}

/// A dense, square, row-major complex matrix whose dimension is a power of
/// two.
///
/// The dimension restriction mirrors the state spaces this crate works
/// with; it is checked by every constructor. Entries are guaranteed finite
/// for matrices built through the public constructors.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// An all-zero `dim × dim` matrix.
    pub fn zeros(dim: usize) -> Result<Self> {
        check_power_of_two(dim)?;
        Ok(Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        })
    }

    /// The `dim × dim` identity.
    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        Ok(m)
    }

    /// Builds a matrix from explicit rows. Rejects non-square shapes,
    /// non-power-of-two dimensions and non-finite entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        check_power_of_two(dim)?;
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        if !all_finite(&entries) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, entries })
    }

    /// Matrix dimension (the matrix is `dim × dim`).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at `(row, col)`. Panics if either index is out of range.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        assert!(row < self.dim && col < self.dim, "matrix index out of range");
        self.entries[row * self.dim + col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(row < self.dim && col < self.dim, "matrix index out of range");
        self.entries[row * self.dim + col] = value;
    }

    /// Row `i` as a slice. Panics if out of range.
    pub fn row(&self, i: usize) -> &[Complex64] {
        assert!(i < self.dim, "row index out of range");
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    /// All entries in row-major order.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Column `i` as a state vector: the image of basis state `|i⟩` under
    /// this matrix. Fails if the index is out of range or the column is not
    /// normalized (e.g. for a non-unitary matrix).
    pub fn column(&self, i: usize) -> Result<StateVector> {
        if i >= self.dim {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: self.dim,
            });
        }
        let amps = (0..self.dim).map(|r| self.get(r, i)).collect();
        StateVector::new(amps)
    }

    /// Applies the matrix to a state vector (`self · v`).
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.dim(),
            });
        }
        let amps = (0..self.dim)
            .map(|i| {
                let row = self.row(i);
                let mut acc = Complex64::new(0.0, 0.0);
                for (a, b) in row.iter().zip(v.amps()) {
                    acc += a * b;
                }
                acc
            })
            .collect();
        StateVector::new(amps)
    }

    /// `max_ij |(U†U − I)_ij|` — how far this matrix is from unitary.
    pub fn unitarity_deviation(&self) -> f64 {
        let dim = self.dim;
        let entries = &self.entries;
        let row_deviation = |i: usize| -> f64 {
            let mut worst = 0.0f64;
            for j in 0..dim {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    s += entries[k * dim + i].conj() * entries[k * dim + j];
                }
                if i == j {
                    s -= Complex64::new(1.0, 0.0);
                }
                worst = worst.max(s.norm());
            }
            worst
        };
        #[cfg(feature = "parallel")]
        if dim >= PAR_DIM_THRESHOLD {
            return (0..dim)
                .into_par_iter()
                .map(row_deviation)
                .reduce(|| 0.0, f64::max);
        }
        (0..dim).map(row_deviation).fold(0.0, f64::max)
    }

    /// Whether the matrix is unitary within the elementwise tolerance `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    /// Largest entrywise modulus of `self − other`. Panics on shape
    /// mismatch — this is a diagnostic helper, not a checked operation.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Kronecker (tensor) product `a ⊗ b`.
///
/// With the line-0-leftmost convention, a gate on line 0 of a 2-line
/// register embeds as `gate ⊗ I`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let dim = da * db;
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    let fill_row = |row: usize, out: &mut [Complex64]| {
        let (ia, ib) = (row / db, row % db);
        for ja in 0..da {
            let fa = a.get(ia, ja);
            for jb in 0..db {
                out[ja * db + jb] = fa * b.get(ib, jb);
            }
        }
    };
    #[cfg(feature = "parallel")]
    if dim >= PAR_DIM_THRESHOLD {
        entries
            .par_chunks_mut(dim)
            .enumerate()
            .for_each(|(row, out)| fill_row(row, out));
        return ComplexMatrix { dim, entries };
    }
    for (row, out) in entries.chunks_mut(dim).enumerate() {
        fill_row(row, out);
    }
    ComplexMatrix { dim, entries }
}

/// Matrix product `a · b`. Fails on dimension mismatch.
///
/// Each output row is computed independently by the same scalar kernel, so
/// the result is bitwise identical whether or not the rows are distributed
/// over threads.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let dim = a.dim;
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    let fill_row = |i: usize, out: &mut [Complex64]| {
        let a_row = &a.entries[i * dim..(i + 1) * dim];
        for (k, coeff) in a_row.iter().enumerate() {
            let b_row = &b.entries[k * dim..(k + 1) * dim];
            for (o, &bv) in out.iter_mut().zip(b_row) {
                *o += coeff * bv;
            }
        }
    };
    #[cfg(feature = "parallel")]
    if dim >= PAR_DIM_THRESHOLD {
        entries
            .par_chunks_mut(dim)
            .enumerate()
            .for_each(|(i, out)| fill_row(i, out));
        return Ok(ComplexMatrix { dim, entries });
    }
    for (i, out) in entries.chunks_mut(dim).enumerate() {
        fill_row(i, out);
    }
    Ok(ComplexMatrix { dim, entries })
}

/// A normalized pure state over a power-of-two dimensional space.
///
/// Construction enforces the invariants: dimension is a power of two and at
/// least 2, all amplitudes finite, and `Σ|amp|² = 1` within [`DEFAULT_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps raw amplitudes, validating every invariant.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        check_power_of_two(dim)?;
        if dim < 2 {
            return Err(Error::NotPowerOfTwo(dim));
        }
        if !all_finite(&amps) {
            return Err(Error::NonFinite);
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amps })
    }

    /// The computational basis state `|index⟩` in a `dim`-dimensional space.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude of basis state `|i⟩`. Panics if out of range.
    pub fn amp(&self, i: usize) -> Complex64 {
        self.amps[i]
    }

    /// Inner product `⟨self|other⟩` (conjugate-linear in `self`).
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.amps.iter().zip(&other.amps) {
            acc += a.conj() * b;
        }
        Ok(acc)
    }
}

/// Fidelity `|⟨a|b⟩|²` between two normalized states.
///
/// Symmetric in its arguments and invariant under global phase; the result
/// is clamped into `[0, 1]` to absorb last-ulp rounding. For two 0/1
/// permutation-matrix columns the result is exactly 0 or 1.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    let inner = a.inner(b)?;
    Ok(inner.norm_sqr().clamp(0.0, 1.0))
}
