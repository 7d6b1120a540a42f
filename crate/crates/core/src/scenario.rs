//! Measurement scenarios and their JSON document format.
//!
//! ```json
//! {
//!   "id": "pauli-zx",
//!   "dimension": 2,
//!   "observables": [
//!     { "name": "Z", "matrix": { "re": [[1, 0], [0, -1]] } },
//!     { "name": "X", "matrix": { "re": [[0, 1], [1, 0]], "im": [[0, 0], [0, 0]] } }
//!   ],
//!   "states": [ { "name": "zero", "vector": { "re": [1, 0] } } ],
//!   "seed": 7,
//!   "options": { "tol_compat": 1e-8, "random_states": 50 }
//! }
//! ```
//!
//! Matrices are row-major grids; `im` parts are optional and default to
//! zero. State vectors within `1e-6` of unit norm are renormalized.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, TAU_COMPAT, TAU_MODEL};
use crate::spectral::{spectral_decompose, Observable};
use crate::state::{ComplexVectorDoc, PureState};

/// Probe vectors further than this from unit norm are rejected rather than
/// renormalized.
const PROBE_NORM_SLACK: f64 = 1e-6;

/// Tolerances and sizes that control a check run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    pub tol_compat: f64,
    pub tol_model: f64,
    /// Number of seeded random probe states added to the declared ones.
    pub random_states: usize,
    pub sample_space_cap: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_tol: Option<f64>,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            tol_compat: TAU_COMPAT,
            tol_model: TAU_MODEL,
            random_states: 50,
            sample_space_cap: 1_000_000,
            group_tol: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NamedState {
    pub name: String,
    pub psi: PureState,
}

/// A finite set of observables on one Hilbert space, with optional probe
/// states.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub dimension: usize,
    pub observables: Vec<Observable>,
    pub probe_states: Vec<NamedState>,
    pub seed: u64,
    pub options: Options,
}

impl Scenario {
    pub fn new(
        id: impl Into<String>,
        observables: Vec<Observable>,
        probe_states: Vec<NamedState>,
        seed: u64,
        options: Options,
    ) -> Result<Self> {
        let first = observables
            .first()
            .ok_or_else(|| Error::Scenario("a scenario needs at least one observable".into()))?;
        let dimension = first.dim();
        let mut names = HashSet::new();
        for (i, obs) in observables.iter().enumerate() {
            if obs.dim() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: obs.dim(),
                }
                .at(format!("observables[{i}] (`{}`)", obs.name())));
            }
            if !names.insert(obs.name().to_string()) {
                return Err(Error::Scenario(format!(
                    "observables[{i}]: duplicate observable name `{}`",
                    obs.name()
                )));
            }
        }
        let mut state_names = HashSet::new();
        for (i, s) in probe_states.iter().enumerate() {
            if s.psi.dim() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: s.psi.dim(),
                }
                .at(format!("states[{i}] (`{}`)", s.name)));
            }
            if !state_names.insert(s.name.clone()) {
                return Err(Error::Scenario(format!(
                    "states[{i}]: duplicate state name `{}`",
                    s.name
                )));
            }
        }
        Ok(Self {
            id: id.into(),
            dimension,
            observables,
            probe_states,
            seed,
            options,
        })
    }

    pub fn observable(&self, name: &str) -> Option<&Observable> {
        self.observables.iter().find(|o| o.name() == name)
    }

    pub fn to_document(&self) -> ScenarioDoc {
        ScenarioDoc {
            id: Some(self.id.clone()),
            dimension: self.dimension,
            observables: self
                .observables
                .iter()
                .map(|o| ObservableDoc {
                    name: o.name().to_string(),
                    matrix: ComplexMatrixDoc::from(o.matrix()),
                })
                .collect(),
            states: self
                .probe_states
                .iter()
                .map(|s| StateDoc {
                    name: s.name.clone(),
                    vector: ComplexVectorDoc::from(&s.psi),
                })
                .collect(),
            seed: Some(self.seed),
            options: Some(self.options),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("scenario documents serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexMatrixDoc {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl From<&CMatrix> for ComplexMatrixDoc {
    fn from(m: &CMatrix) -> Self {
        let grid = |f: fn(&crate::linalg::C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            re: grid(|z| z.re),
            im: Some(grid(|z| z.im)),
        }
    }
}

impl ComplexMatrixDoc {
    fn to_matrix(&self, dim: usize, field: &str) -> Result<CMatrix> {
        check_grid(&self.re, dim, &format!("{field}.re"))?;
        if let Some(im) = &self.im {
            check_grid(im, dim, &format!("{field}.im"))?;
        }
        Ok(CMatrix::from_fn(dim, dim, |i, j| {
            let im = self.im.as_ref().map_or(0.0, |g| g[i][j]);
            c(self.re[i][j], im)
        }))
    }
}

fn check_grid(grid: &[Vec<f64>], dim: usize, field: &str) -> Result<()> {
    if grid.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: grid.len(),
        }
        .at(format!("{field}: row count")));
    }
    for (r, row) in grid.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: row.len(),
            }
            .at(format!("{field}[{r}]: column count")));
        }
    }
    Ok(())
}

impl ComplexVectorDoc {
    fn to_vector(&self, dim: usize, field: &str) -> Result<CVector> {
        if self.re.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.re.len(),
            }
            .at(format!("{field}.re")));
        }
        if let Some(im) = &self.im {
            if im.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: im.len(),
                }
                .at(format!("{field}.im")));
            }
        }
        Ok(CVector::from_fn(dim, |i, _| {
            c(self.re[i], self.im.as_ref().map_or(0.0, |v| v[i]))
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableDoc {
    pub name: String,
    pub matrix: ComplexMatrixDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub name: String,
    pub vector: ComplexVectorDoc,
}

/// The on-disk scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub dimension: usize,
    pub observables: Vec<ObservableDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub states: Vec<StateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Options>,
}

impl ScenarioDoc {
    /// Validates the document and spectrally decomposes every observable.
    pub fn into_scenario(self, default_id: &str) -> Result<Scenario> {
        let dim = self.dimension;
        if dim == 0 {
            return Err(Error::Scenario("dimension: must be positive".into()));
        }
        if self.observables.is_empty() {
            return Err(Error::Scenario(
                "observables: at least one observable is required".into(),
            ));
        }
        let options = self.options.unwrap_or_default();
        let mut observables = Vec::with_capacity(self.observables.len());
        for (i, doc) in self.observables.iter().enumerate() {
            let field = format!("observables[{i}] (`{}`).matrix", doc.name);
            let m = doc.matrix.to_matrix(dim, &field)?;
            let obs = spectral_decompose(doc.name.clone(), m, options.group_tol)
                .map_err(|e| e.at(&field))?;
            observables.push(obs);
        }
        let mut states = Vec::with_capacity(self.states.len());
        for (i, doc) in self.states.iter().enumerate() {
            let field = format!("states[{i}] (`{}`).vector", doc.name);
            let v = doc.vector.to_vector(dim, &field)?;
            let norm = v.norm();
            if (norm - 1.0).abs() > PROBE_NORM_SLACK {
                return Err(Error::InvalidState(format!("norm {norm} is not 1")).at(field));
            }
            states.push(NamedState {
                name: doc.name.clone(),
                psi: PureState::normalized(v).map_err(|e| e.at(&field))?,
            });
        }
        Scenario::new(
            self.id.unwrap_or_else(|| default_id.to_string()),
            observables,
            states,
            self.seed.unwrap_or(0),
            options,
        )
    }
}

/// Parses and validates a JSON scenario document.
pub fn parse_scenario(document: &str) -> Result<Scenario> {
    parse_scenario_with_id(document, "scenario")
}

/// As [`parse_scenario`], naming the scenario `default_id` when the document
/// carries no `id`.
pub fn parse_scenario_with_id(document: &str, default_id: &str) -> Result<Scenario> {
    let doc: ScenarioDoc = serde_json::from_str(document)
        .map_err(|e| Error::Scenario(format!("malformed document: {e}")))?;
    doc.into_scenario(default_id)
}
