//! Lüders state update, order-independence of sequential measurements, and
//! state-updating deterministic underlying-state models for finite sets of
//! finite-dimensional observables.
//!
//! A set of observables admits an underlying-state model in which the
//! Lüders update acts as Bayesian conditioning exactly when its observables
//! are pairwise compatible. This crate decides pairwise compatibility,
//! builds and verifies the model when it exists, and otherwise produces a
//! concrete state on which sequential predictions depend on measurement
//! order.
//!
//! ```
//! use luders::{linalg::pauli, Observable, PureState, sequential_distribution};
//!
//! let z = Observable::new("Z", pauli::z()).unwrap();
//! let x = Observable::new("X", pauli::x()).unwrap();
//! let zero = PureState::basis(2, 0);
//! let zx = sequential_distribution(&zero, (&z, 1.0), (&x, 1.0)).unwrap();
//! let xz = sequential_distribution(&zero, (&x, 1.0), (&z, 1.0)).unwrap();
//! assert!((zx - 0.5).abs() < 1e-12 && (xz - 0.25).abs() < 1e-12);
//! ```

pub mod compat;
pub mod error;
pub mod generate;
pub mod linalg;
pub mod measurement;
pub mod model;
pub mod report;
pub mod scenario;
pub mod spectral;
pub mod state;

pub use compat::{
    commutator_test, find_witness, order_independence_test, rehder_test, scenario_pairwise_check,
    CompatReport, PairTest, Verdict, Witness,
};
pub use error::{Error, Result};
pub use measurement::{
    born_probability, luders_update_density, luders_update_pure, mixture_update_weights,
    sequential_distribution, sequential_joint,
};
pub use model::{
    build_measure, build_sample_space, condition_measure, demonstrate_obstruction,
    verify_born_agreement, verify_model_laws, verify_update_diagram, SampleSpace,
    UnderlyingMeasure, UnderlyingModel,
};
pub use report::{run_check, RunReport, Status};
pub use scenario::{parse_scenario, Scenario};
pub use spectral::{spectral_decompose, Observable};
pub use state::{DensityOperator, Proposition, PureState, QuantumState};
