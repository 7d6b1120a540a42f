//! Dense complex matrix helpers and the numeric tolerances shared by every
//! module.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. All comparisons use the
//! elementwise max-modulus norm `‖m‖_max = max_ij |m_ij|`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Conditioning on an event whose probability is at or below this value is
/// treated as division by zero.
pub const TAU_ZERO: f64 = 1e-12;

/// Default compatibility threshold for commutator and Rehder margins.
pub const TAU_COMPAT: f64 = 1e-8;

/// Default pointwise tolerance on underlying-model pmfs.
pub const TAU_MODEL: f64 = 1e-9;

/// Hermiticity tolerance for a matrix: `1e-10 · (1 + ‖m‖_max)`.
pub fn hermitian_tol(m: &CMatrix) -> f64 {
    1e-10 * (1.0 + max_abs(m))
}

/// Numeric tolerance for quantities derived from an operator with the given
/// spectral radius.
pub fn numeric_tol(spectral_radius: f64) -> f64 {
    1e-9 * (1.0 + spectral_radius)
}

/// Default eigenvalue grouping tolerance.
pub fn default_group_tol(spectral_radius: f64) -> f64 {
    1e-8 * (1.0 + spectral_radius)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖a − b‖_max`. Panics on shape mismatch, which callers rule out.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_finite(m: &CMatrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// `‖m − m†‖_max`.
pub fn hermitian_deviation(m: &CMatrix) -> Result<f64> {
    let n = ensure_square(m)?;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    Ok(worst)
}

/// True iff `‖m − m†‖_max ≤ tol`.
pub fn validate_hermitian(m: &CMatrix, tol: f64) -> Result<bool> {
    Ok(hermitian_deviation(m)? <= tol)
}

/// `(m + m†) / 2`.
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// `|v⟩⟨w|`.
pub fn outer(v: &CVector, w: &CVector) -> CMatrix {
    v * w.adjoint()
}

/// `⟨v|w⟩`.
pub fn inner(v: &CVector, w: &CVector) -> C64 {
    v.dotc(w)
}

/// `⟨v|m|v⟩`, real part only (the callers pass Hermitian `m`).
pub fn expectation(m: &CMatrix, v: &CVector) -> f64 {
    inner(v, &(m * v)).re
}

/// Kronecker product of two square matrices.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Rotate the global phase of `v` so its largest-modulus entry (first one on
/// ties) is real and positive.
pub fn fix_phase(v: &mut CVector) {
    let mut pivot = 0;
    let mut best = -1.0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > best + 1e-14 {
            best = z.norm();
            pivot = i;
        }
    }
    if best > 0.0 {
        let phase = v[pivot] / best;
        *v /= phase;
        v[pivot] = c(v[pivot].re, 0.0);
    }
}

/// Clamp a computed probability into `[0, 1]`, accepting overshoot up to
/// `tol` on either side.
pub fn clamp_probability(p: f64, tol: f64) -> Result<f64> {
    if !p.is_finite() {
        return Err(Error::Numeric(format!("probability is not finite: {p}")));
    }
    if p < -tol || p > 1.0 + tol {
        return Err(Error::Numeric(format!(
            "probability {p:e} lies outside [0, 1] beyond tolerance {tol:e}"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Pauli matrices and other small fixtures used throughout the tests and
/// demos.
pub mod pauli {
    use super::{c, CMatrix};

    pub fn i2() -> CMatrix {
        CMatrix::identity(2, 2)
    }

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
    }
}
