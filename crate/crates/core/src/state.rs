//! Pure states, density operators and propositions `[A = α]`.

use nalgebra::linalg::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, ensure_square, hermitian_deviation, hermitian_tol, numeric_tol, outer, CMatrix, CVector,
};
use crate::spectral::Observable;

/// Accepted deviation of `‖ψ‖` from one.
pub const NORM_TOL: f64 = 1e-9;

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    /// Wraps `amplitudes`, which must already have unit norm within
    /// [`NORM_TOL`].
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("state vector is empty".into()));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidState(
                "state vector has non-finite entries".into(),
            ));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "state vector has norm {norm}, expected 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Scales a non-zero vector to unit norm.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidState(format!(
                "cannot normalize vector of norm {norm}"
            )));
        }
        Ok(Self {
            amplitudes: v / c(norm, 0.0),
        })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::normalized(CVector::from_iterator(
            values.len(),
            values.iter().map(|&x| c(x, 0.0)),
        ))
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = c(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            matrix: outer(&self.amplitudes, &self.amplitudes),
        }
    }

    pub(crate) fn from_unit_unchecked(amplitudes: CVector) -> Self {
        Self { amplitudes }
    }
}

/// A positive semidefinite operator of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        ensure_square(&matrix)?;
        let deviation = hermitian_deviation(&matrix)?;
        let tol = hermitian_tol(&matrix);
        if deviation > tol {
            return Err(Error::NotHermitian { deviation, tol });
        }
        let eig = SymmetricEigen::try_new(crate::linalg::symmetrize(&matrix), f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Numeric("density eigensolver did not converge".into()))?;
        let radius = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let tol = numeric_tol(radius);
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tol || trace.im.abs() > tol {
            return Err(Error::InvalidState(format!(
                "density operator has trace {trace}"
            )));
        }
        let min = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min < -tol {
            return Err(Error::InvalidState(format!(
                "density operator has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim) * c(1.0 / dim as f64, 0.0),
        }
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|`.
    pub fn from_mixture(components: &[(f64, PureState)]) -> Result<Self> {
        let first = components.first().ok_or(Error::EmptyStates)?;
        let dim = first.1.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (p, psi) in components {
            if psi.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: psi.dim(),
                });
            }
            m += outer(psi.amplitudes(), psi.amplitudes()) * c(*p, 0.0);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }
}

/// Either kind of quantum state.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl QuantumState {
    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Pure(p) => p.dim(),
            QuantumState::Mixed(r) => r.dim(),
        }
    }
}

impl From<PureState> for QuantumState {
    fn from(p: PureState) -> Self {
        QuantumState::Pure(p)
    }
}

impl From<DensityOperator> for QuantumState {
    fn from(r: DensityOperator) -> Self {
        QuantumState::Mixed(r)
    }
}

/// The proposition `[A = α]`: measuring `A` yields the canonical eigenvalue
/// `α`.
#[derive(Debug, Clone, Copy)]
pub struct Proposition<'a> {
    observable: &'a Observable,
    index: usize,
}

impl<'a> Proposition<'a> {
    pub fn new(observable: &'a Observable, value: f64) -> Result<Self> {
        let index = observable.index_of(value)?;
        Ok(Self { observable, index })
    }

    pub(crate) fn at(observable: &'a Observable, index: usize) -> Self {
        Self { observable, index }
    }

    pub fn observable(&self) -> &'a Observable {
        self.observable
    }

    pub fn value(&self) -> f64 {
        self.observable.spectrum()[self.index].value
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn projector(&self) -> &'a CMatrix {
        self.observable.projector_at(self.index)
    }
}

/// Serialized form of a vector: separate real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexVectorDoc {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

impl From<&PureState> for ComplexVectorDoc {
    fn from(psi: &PureState) -> Self {
        Self {
            re: psi.amplitudes().iter().map(|z| z.re).collect(),
            im: Some(psi.amplitudes().iter().map(|z| z.im).collect()),
        }
    }
}
