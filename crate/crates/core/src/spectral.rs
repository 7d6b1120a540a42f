//! Spectral decomposition of Hermitian observables into grouped eigenspace
//! projectors.
//!
//! Eigenvalues closer than the grouping tolerance are merged into one
//! outcome whose label is their mean, and whose projector is the sum of the
//! corresponding rank-one projectors. The grouped labels are canonical:
//! sample-space coordinates and reports use them verbatim, and lookups by a
//! nominal value (say `1.0` for a label computed as `1.0000000000000002`)
//! resolve to the unique label within the grouping tolerance.

use nalgebra::linalg::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg::{
    c, default_group_tol, ensure_finite, ensure_square, hermitian_deviation, hermitian_tol,
    max_abs_diff, numeric_tol, outer, symmetrize, CMatrix, CVector,
};

const EIGEN_MAX_ITER: usize = 10_000;

/// One grouped outcome of an observable: its eigenvalue and the orthogonal
/// projector onto the eigenspace.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub value: f64,
    pub projector: CMatrix,
    pub rank: usize,
}

/// A named Hermitian matrix together with its grouped spectral decomposition.
#[derive(Debug, Clone)]
pub struct Observable {
    name: String,
    matrix: CMatrix,
    spectrum: Vec<Eigenspace>,
    spectral_radius: f64,
    group_tol: f64,
}

impl Observable {
    /// Decompose with the default grouping tolerance.
    pub fn new(name: impl Into<String>, matrix: CMatrix) -> Result<Self> {
        spectral_decompose(name, matrix, None)
    }

    pub fn with_group_tol(
        name: impl Into<String>,
        matrix: CMatrix,
        group_tol: f64,
    ) -> Result<Self> {
        spectral_decompose(name, matrix, Some(group_tol))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Grouped eigenspaces in strictly increasing eigenvalue order.
    pub fn spectrum(&self) -> &[Eigenspace] {
        &self.spectrum
    }

    pub fn values(&self) -> Vec<f64> {
        self.spectrum.iter().map(|e| e.value).collect()
    }

    pub fn num_outcomes(&self) -> usize {
        self.spectrum.len()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    /// `1e-9 · (1 + spectral radius)`.
    pub fn tol_num(&self) -> f64 {
        numeric_tol(self.spectral_radius)
    }

    pub fn group_tol(&self) -> f64 {
        self.group_tol
    }

    /// Position of `value` in the spectrum: an exact label match, or else
    /// the single label within the grouping tolerance.
    pub fn index_of(&self, value: f64) -> Result<usize> {
        if let Some(i) = self.spectrum.iter().position(|e| e.value == value) {
            return Ok(i);
        }
        let mut near = self
            .spectrum
            .iter()
            .enumerate()
            .filter(|(_, e)| (e.value - value).abs() <= self.group_tol);
        match (near.next(), near.next()) {
            (Some((i, _)), None) => Ok(i),
            _ => Err(Error::UnknownOutcome {
                observable: self.name.clone(),
                value,
            }),
        }
    }

    /// `Π(A = value)`.
    pub fn projector(&self, value: f64) -> Result<&CMatrix> {
        Ok(&self.spectrum[self.index_of(value)?].projector)
    }

    /// Projector for the proposition `[A ≠ value]`, i.e. `I − Π(A = value)`.
    pub fn orthocomplement_projector(&self, value: f64) -> Result<CMatrix> {
        let p = self.projector(value)?;
        Ok(CMatrix::identity(self.dim(), self.dim()) - p)
    }

    pub(crate) fn projector_at(&self, index: usize) -> &CMatrix {
        &self.spectrum[index].projector
    }
}

/// Decompose a Hermitian matrix into grouped eigenspace projectors.
///
/// `group_tol` defaults to `1e-8 · (1 + spectral radius)`. Consecutive sorted
/// eigenvalues within `group_tol` of each other chain into one group.
pub fn spectral_decompose(
    name: impl Into<String>,
    matrix: CMatrix,
    group_tol: Option<f64>,
) -> Result<Observable> {
    let dim = ensure_square(&matrix)?;
    if dim == 0 {
        return Err(Error::NotSquare { rows: 0, cols: 0 });
    }
    ensure_finite(&matrix)?;
    let deviation = hermitian_deviation(&matrix)?;
    let tol = hermitian_tol(&matrix);
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }

    let eig = SymmetricEigen::try_new(symmetrize(&matrix), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numeric("Hermitian eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let spectral_radius = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let group_tol = group_tol.unwrap_or_else(|| default_group_tol(spectral_radius));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &i in &order {
        let value = eig.eigenvalues[i];
        match groups.last_mut() {
            Some(group) if value - last <= group_tol => group.push(i),
            _ => groups.push(vec![i]),
        }
        last = value;
    }

    let spectrum: Vec<Eigenspace> = groups
        .iter()
        .map(|group| {
            let value = group.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / group.len() as f64;
            let mut projector = CMatrix::zeros(dim, dim);
            for &i in group {
                let v: CVector = eig.eigenvectors.column(i).into_owned();
                projector += outer(&v, &v);
            }
            Eigenspace {
                value,
                projector: symmetrize(&projector),
                rank: group.len(),
            }
        })
        .collect();

    let observable = Observable {
        name: name.into(),
        matrix,
        spectrum,
        spectral_radius,
        group_tol,
    };
    check_decomposition(&observable)?;
    Ok(observable)
}

/// Checks idempotence, mutual orthogonality, completeness and reconstruction
/// of the stored decomposition within `tol_num`.
fn check_decomposition(obs: &Observable) -> Result<()> {
    let tol = obs.tol_num();
    let dim = obs.dim();
    let mut sum = CMatrix::zeros(dim, dim);
    let mut recon = CMatrix::zeros(dim, dim);
    for (i, e) in obs.spectrum.iter().enumerate() {
        let p = &e.projector;
        let idem = max_abs_diff(&(p * p), p);
        if idem > tol {
            return Err(Error::Numeric(format!(
                "projector for {} of `{}` is not idempotent ({idem:e})",
                e.value, obs.name
            )));
        }
        for f in &obs.spectrum[i + 1..] {
            let overlap = crate::linalg::max_abs(&(p * &f.projector));
            if overlap > tol {
                return Err(Error::Numeric(format!(
                    "projectors for {} and {} of `{}` are not orthogonal ({overlap:e})",
                    e.value, f.value, obs.name
                )));
            }
        }
        sum += p;
        recon += p * c(e.value, 0.0);
    }
    let completeness = max_abs_diff(&sum, &CMatrix::identity(dim, dim));
    let reconstruction = max_abs_diff(&recon, &obs.matrix);
    // merged eigenvalues sit up to (rank - 1) grouping steps from their label
    let spread = obs.group_tol * (dim - 1) as f64;
    if completeness > tol || reconstruction > tol + spread {
        return Err(Error::Numeric(format!(
            "spectral decomposition of `{}` is inaccurate (completeness {completeness:e}, reconstruction {reconstruction:e})",
            obs.name
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, pauli};

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            values.len(),
            values.iter().map(|&v| c(v, 0.0)),
        ))
    }

    #[test]
    fn degenerate_diagonal_groups() {
        let obs = Observable::new("D", diag(&[1.0, 1.0, -1.0])).unwrap();
        assert_eq!(obs.values(), vec![-1.0, 1.0]);
        assert_eq!(obs.spectrum()[0].rank, 1);
        assert_eq!(obs.spectrum()[1].rank, 2);
        assert!(max_abs_diff(obs.projector(1.0).unwrap(), &diag(&[1.0, 1.0, 0.0])) < 1e-12);
    }

    #[test]
    fn pauli_x_projectors() {
        let obs = Observable::new("X", pauli::x()).unwrap();
        let vals = obs.values();
        assert_eq!(vals.len(), 2);
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        let plus = CMatrix::from_element(2, 2, c(0.5, 0.0));
        assert!(max_abs_diff(obs.projector(vals[1]).unwrap(), &plus) < 1e-12);
        // I - |−⟩⟨−| = |+⟩⟨+|
        assert!(max_abs_diff(&obs.orthocomplement_projector(vals[0]).unwrap(), &plus) < 1e-12);
    }

    #[test]
    fn identity_has_one_outcome() {
        let obs = Observable::new("I", CMatrix::identity(3, 3)).unwrap();
        assert_eq!(obs.values(), vec![1.0]);
        assert_eq!(obs.spectrum()[0].rank, 3);
        assert!(max_abs_diff(obs.projector(1.0).unwrap(), &CMatrix::identity(3, 3)) < 1e-12);
        assert!(max_abs(&obs.orthocomplement_projector(1.0).unwrap()) < 1e-12);
    }

    #[test]
    fn pauli_z_lookup() {
        let obs = Observable::new("Z", pauli::z()).unwrap();
        assert!(max_abs_diff(obs.projector(1.0).unwrap(), &diag(&[1.0, 0.0])) < 1e-15);
        assert!(
            max_abs_diff(
                &obs.orthocomplement_projector(1.0).unwrap(),
                &diag(&[0.0, 1.0])
            ) < 1e-15
        );
        assert!(matches!(
            obs.projector(0.5),
            Err(Error::UnknownOutcome { .. })
        ));
    }

    #[test]
    fn nominal_value_finds_nearby_label() {
        let obs = Observable::new("A", diag(&[1.0 + 4e-16, 3.0])).unwrap();
        assert_eq!(obs.index_of(1.0).unwrap(), 0);
        assert!(obs.index_of(1.0 + 1e-6).is_err());
    }

    #[test]
    fn close_eigenvalues_merge_under_tolerance() {
        let obs = Observable::with_group_tol("A", diag(&[0.0, 1e-6, 2.0]), 1e-5).unwrap();
        assert_eq!(obs.num_outcomes(), 2);
        assert!((obs.values()[0] - 5e-7).abs() < 1e-15);
        let split = Observable::new("A", diag(&[0.0, 1e-6, 2.0])).unwrap();
        assert_eq!(split.num_outcomes(), 3);
    }

    #[test]
    fn rejects_non_hermitian_and_non_square() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert!(matches!(
            Observable::new("N", m),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            Observable::new("R", CMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        let mut inf = CMatrix::identity(2, 2);
        inf[(0, 1)] = c(f64::INFINITY, 0.0);
        assert!(matches!(
            Observable::new("F", inf),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn grouping_is_deterministic() {
        let m = pauli::x() + pauli::z() * c(0.3, 0.0);
        let a = Observable::new("A", m.clone()).unwrap();
        let b = Observable::new("A", m).unwrap();
        assert_eq!(a.values(), b.values());
        for (x, y) in a.spectrum().iter().zip(b.spectrum()) {
            assert_eq!(x.projector, y.projector);
        }
    }
}
