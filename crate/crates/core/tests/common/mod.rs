#![allow(dead_code)]

use luders::linalg::{CMatrix, CVector, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(rows: &[&[f64]]) -> CMatrix {
    let n = rows.len();
    CMatrix::from_fn(n, rows[0].len(), |i, j| c(rows[i][j], 0.0))
}

pub fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&v| c(v, 0.0)),
    ))
}

pub fn ket(values: &[(f64, f64)]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&(re, im)| c(re, im)))
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `|v⟩⟨v|` written out entrywise.
pub fn ketbra(v: &CVector) -> CMatrix {
    CMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
}

/// `⟨ψ|M|ψ⟩` for a unit vector, summed by hand.
pub fn sandwich(psi: &CVector, m: &CMatrix) -> f64 {
    let mut acc = c(0.0, 0.0);
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            acc += psi[i].conj() * m[(i, j)] * psi[j];
        }
    }
    acc.re
}

pub fn complex_entries(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), len)
}

/// Random Hermitian `(M + M†)/2` of dimension `d`.
pub fn hermitian(d: usize) -> impl Strategy<Value = CMatrix> {
    complex_entries(d * d).prop_map(move |e| {
        let m = CMatrix::from_fn(d, d, |i, j| c(e[i * d + j].0, e[i * d + j].1));
        (&m + m.adjoint()) * c(0.5, 0.0)
    })
}

/// Random unit vector (rejects near-zero draws).
pub fn unit_vector(d: usize) -> impl Strategy<Value = CVector> {
    complex_entries(d)
        .prop_filter("nonzero", |e| {
            e.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3
        })
        .prop_map(|e| {
            let v = ket(&e);
            let n = v.norm();
            v / c(n, 0.0)
        })
}

/// Unitary from the QR factorization of a random complex matrix.
pub fn unitary(d: usize) -> impl Strategy<Value = CMatrix> {
    complex_entries(d * d)
        .prop_filter("well conditioned", move |e| {
            let m = DMatrix::from_fn(d, d, |i, j| c(e[i * d + j].0, e[i * d + j].1));
            m.determinant().norm() > 1e-2
        })
        .prop_map(move |e| {
            let m = DMatrix::from_fn(d, d, |i, j| c(e[i * d + j].0, e[i * d + j].1));
            m.qr().q()
        })
}

/// `U diag(values) U†`.
pub fn rotate(u: &CMatrix, values: &[f64]) -> CMatrix {
    let m = u * diag(values) * u.adjoint();
    (&m + m.adjoint()) * c(0.5, 0.0)
}

/// Small integer eigenvalues, so degeneracies are common.
pub fn int_spectrum(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2i32..=2, d).prop_map(|v| v.into_iter().map(f64::from).collect())
}
