//! State-updating deterministic underlying-state models for finite
//! scenarios.
//!
//! For a pairwise-compatible scenario `{A₁, …, A_m}` the sample space is the
//! Cartesian product `Λ = σ(A₁) × ⋯ × σ(A_m)`, observable `A_k` is
//! represented by the coordinate function `f_k(λ) = λ_k`, and a pure state
//! `ψ` is represented by the pmf
//!
//! ```text
//! μ_ψ({λ}) = P_ψ[A₁ = λ₁, …, A_m = λ_m]
//! ```
//!
//! computed as a sequential joint in the scenario's declared order. Nothing
//! about that order is assumed: [`verify_model_laws`] checks permutation
//! invariance and marginal consistency, [`verify_born_agreement`] checks
//! `P_ψ[A=α] = μ_ψ(Ω(A=α))`, and [`verify_update_diagram`] checks that the
//! Lüders update corresponds to conditioning, `μ_{T(ψ)} = μ_ψ(· | Ω(A=α))`.
//!
//! For incompatible scenarios the construction is refused;
//! [`demonstrate_obstruction`] instead reports the Bayes-rule violation and
//! which laws the fixed-order pmf breaks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::compat::{
    find_witness, lexicographic_pairs, rehder_test, scenario_pairwise_check, CompatReport, Witness,
};
use crate::error::{Error, Result};
use crate::linalg::{numeric_tol, TAU_ZERO};
use crate::measurement::{born_pure, chain_probability, joint_table, luders_update_pure};
use crate::scenario::{NamedState, Scenario};
use crate::spectral::Observable;
use crate::state::{Proposition, PureState};

/// `Λ = ∏ σ(A_k)`, enumerated row-major (last observable fastest) over
/// spectrum-sorted values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpace {
    observables: Vec<String>,
    values: Vec<Vec<f64>>,
    strides: Vec<usize>,
    size: usize,
}

impl SampleSpace {
    pub fn new(observables: &[Observable], cap: usize) -> Result<Self> {
        let mut size: usize = 1;
        for obs in observables {
            size = size
                .checked_mul(obs.num_outcomes())
                .ok_or(Error::Capacity {
                    size: usize::MAX,
                    cap,
                })?;
        }
        if size > cap {
            return Err(Error::Capacity { size, cap });
        }
        let values: Vec<Vec<f64>> = observables.iter().map(|o| o.values()).collect();
        let mut strides = vec![1; values.len()];
        for k in (0..values.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * values[k + 1].len();
        }
        Ok(Self {
            observables: observables.iter().map(|o| o.name().to_string()).collect(),
            values,
            strides,
            size,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn observables(&self) -> &[String] {
        &self.observables
    }

    pub fn arity(&self) -> usize {
        self.observables.len()
    }

    /// Spectrum of the `k`-th coordinate.
    pub fn values(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    pub fn observable_index(&self, name: &str) -> Option<usize> {
        self.observables.iter().position(|o| o == name)
    }

    /// Outcome index of coordinate `k` at point `point`.
    pub fn coordinate_index(&self, point: usize, k: usize) -> usize {
        (point / self.strides[k]) % self.values[k].len()
    }

    /// `f_k(λ)`: the value observable `k` takes at point `λ`.
    pub fn coordinate(&self, point: usize, k: usize) -> f64 {
        self.values[k][self.coordinate_index(point, k)]
    }

    /// The value tuple of a point.
    pub fn point(&self, point: usize) -> Vec<f64> {
        (0..self.arity())
            .map(|k| self.coordinate(point, k))
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.size).map(|p| self.point(p))
    }

    /// Index of the point with the given per-coordinate outcome indices.
    pub fn index_of(&self, outcome_indices: &[usize]) -> usize {
        outcome_indices
            .iter()
            .zip(&self.strides)
            .map(|(i, s)| i * s)
            .sum()
    }

    /// `Ω(A_k = α)` as a membership predicate.
    pub fn in_event(&self, point: usize, k: usize, outcome: usize) -> bool {
        self.coordinate_index(point, k) == outcome
    }

    /// Resolves `[A = α]` to `(coordinate, outcome index)`.
    pub fn event(&self, observable: &str, value: f64) -> Result<(usize, usize)> {
        let k = self.observable_index(observable).ok_or_else(|| {
            Error::Scenario(format!(
                "observable `{observable}` is not a coordinate of the sample space"
            ))
        })?;
        let j = self.values[k]
            .iter()
            .position(|&v| v == value)
            .ok_or_else(|| Error::UnknownOutcome {
                observable: observable.to_string(),
                value,
            })?;
        Ok((k, j))
    }
}

/// Builds `Λ` for the scenario, refusing spaces beyond the configured cap.
pub fn build_sample_space(scenario: &Scenario) -> Result<SampleSpace> {
    SampleSpace::new(&scenario.observables, scenario.options.sample_space_cap)
}

/// A probability mass function on a sample space.
#[derive(Debug, Clone)]
pub struct UnderlyingMeasure {
    space: Arc<SampleSpace>,
    pmf: Vec<f64>,
}

impl UnderlyingMeasure {
    /// Accepts weights that are non-negative and sum to one within `tol`;
    /// entries in `[−tol, 0)` are clamped to zero and the result is
    /// renormalized.
    pub fn from_weights(space: Arc<SampleSpace>, mut weights: Vec<f64>, tol: f64) -> Result<Self> {
        if weights.len() != space.size() {
            return Err(Error::DimensionMismatch {
                expected: space.size(),
                found: weights.len(),
            });
        }
        for (i, w) in weights.iter_mut().enumerate() {
            if !w.is_finite() || *w < -tol {
                return Err(Error::Numeric(format!("pmf entry {i} is {w:e}")));
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::Numeric(format!("pmf sums to {total}, not 1")));
        }
        for w in &mut weights {
            *w /= total;
        }
        Ok(Self {
            space,
            pmf: weights,
        })
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// `μ(Ω(A_k = α_j))`.
    pub fn event_probability(&self, k: usize, outcome: usize) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .filter(|&(p, _)| self.space.in_event(p, k, outcome))
            .map(|(_, w)| w)
            .sum()
    }

    /// `μ(∩_i Ω(A_{k_i} = α_{j_i}))` for `(coordinate, outcome index)` pairs.
    pub fn intersection_probability(&self, events: &[(usize, usize)]) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .filter(|&(p, _)| events.iter().all(|&(k, j)| self.space.in_event(p, k, j)))
            .map(|(_, w)| w)
            .sum()
    }

    /// Marginal on the coordinates `subset` (ascending), laid out row-major
    /// in that order.
    pub fn marginal(&self, subset: &[usize]) -> Vec<f64> {
        let sizes: Vec<usize> = subset.iter().map(|&k| self.space.values(k).len()).collect();
        let mut table = vec![0.0; sizes.iter().product()];
        for (p, w) in self.pmf.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let mut index = 0;
            for (&k, &n) in subset.iter().zip(&sizes) {
                index = index * n + self.space.coordinate_index(p, k);
            }
            table[index] += w;
        }
        table
    }

    /// Largest pointwise difference with another measure on the same space.
    pub fn distance(&self, other: &UnderlyingMeasure) -> f64 {
        self.pmf
            .iter()
            .zip(&other.pmf)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `μ(· | Ω(A = α)) = μ(· ∩ Ω(A = α)) / μ(Ω(A = α))`.
pub fn condition_measure(
    mu: &UnderlyingMeasure,
    event: &Proposition<'_>,
) -> Result<UnderlyingMeasure> {
    let (k, j) = mu.space.event(event.observable().name(), event.value())?;
    let mass = mu.event_probability(k, j);
    if mass <= TAU_ZERO {
        return Err(Error::ZeroProbability {
            observable: event.observable().name().to_string(),
            value: event.value(),
            probability: mass,
        });
    }
    let pmf = mu
        .pmf
        .iter()
        .enumerate()
        .map(|(p, w)| {
            if mu.space.in_event(p, k, j) {
                w / mass
            } else {
                0.0
            }
        })
        .collect();
    Ok(UnderlyingMeasure {
        space: Arc::clone(&mu.space),
        pmf,
    })
}

/// Proof that every pair of a scenario's observables passed the Rehder test.
#[derive(Debug, Clone)]
pub struct CompatibleScenario<'a> {
    scenario: &'a Scenario,
    report: CompatReport,
}

impl<'a> CompatibleScenario<'a> {
    /// Fails with [`Error::Incompatible`] carrying the witness.
    pub fn certify(scenario: &'a Scenario) -> Result<Self> {
        let report = scenario_pairwise_check(scenario)?;
        match report.witness {
            Some(w) => Err(Error::Incompatible(Box::new(w))),
            None => Ok(Self { scenario, report }),
        }
    }

    pub fn scenario(&self) -> &'a Scenario {
        self.scenario
    }

    pub fn report(&self) -> &CompatReport {
        &self.report
    }
}

fn scenario_tol(scenario: &Scenario) -> f64 {
    let radius = scenario
        .observables
        .iter()
        .map(Observable::spectral_radius)
        .fold(0.0, f64::max);
    numeric_tol(radius)
}

/// `μ_ψ` for a certified scenario: the pmf at `λ` is the sequential joint
/// `P_ψ[A₁ = λ₁, …, A_m = λ_m]` in declared order.
pub fn build_measure(
    space: &Arc<SampleSpace>,
    scenario: &CompatibleScenario<'_>,
    psi: &PureState,
) -> Result<UnderlyingMeasure> {
    attempt_measure(space, scenario.scenario(), psi)
}

/// The same fixed-order pmf without any compatibility certificate. For an
/// incompatible scenario this is the candidate whose law violations
/// [`demonstrate_obstruction`] reports.
pub fn attempt_measure(
    space: &Arc<SampleSpace>,
    scenario: &Scenario,
    psi: &PureState,
) -> Result<UnderlyingMeasure> {
    if space.observables().len() != scenario.observables.len()
        || space
            .observables()
            .iter()
            .zip(&scenario.observables)
            .any(|(n, o)| n != o.name())
    {
        return Err(Error::Scenario(
            "sample space does not belong to this scenario".into(),
        ));
    }
    let observables: Vec<&Observable> = scenario.observables.iter().collect();
    let table = joint_table(psi, &observables)?;
    UnderlyingMeasure::from_weights(Arc::clone(space), table, scenario_tol(scenario))
}

#[derive(Debug, Clone)]
pub struct ModelEntry {
    pub state_id: String,
    pub psi: PureState,
    pub measure: UnderlyingMeasure,
}

/// The sample space, coordinate value functions and one measure per probe
/// state.
#[derive(Debug, Clone)]
pub struct UnderlyingModel {
    pub scenario_id: String,
    pub space: Arc<SampleSpace>,
    pub entries: Vec<ModelEntry>,
}

impl UnderlyingModel {
    /// Certifies the scenario and builds a measure for every state.
    pub fn build(scenario: &Scenario, states: &[NamedState]) -> Result<Self> {
        let certified = CompatibleScenario::certify(scenario)?;
        let space = Arc::new(build_sample_space(scenario)?);
        let entries = states
            .iter()
            .map(|s| {
                Ok(ModelEntry {
                    state_id: s.name.clone(),
                    psi: s.psi.clone(),
                    measure: build_measure(&space, &certified, &s.psi)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            scenario_id: scenario.id.clone(),
            space,
            entries,
        })
    }

    /// Fixed-order measures with no compatibility check.
    pub fn attempt(scenario: &Scenario, states: &[NamedState]) -> Result<Self> {
        let space = Arc::new(build_sample_space(scenario)?);
        let entries = states
            .iter()
            .map(|s| {
                Ok(ModelEntry {
                    state_id: s.name.clone(),
                    psi: s.psi.clone(),
                    measure: attempt_measure(&space, scenario, &s.psi)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            scenario_id: scenario.id.clone(),
            space,
            entries,
        })
    }

    pub fn measure(&self, state_id: &str) -> Option<&UnderlyingMeasure> {
        self.entries
            .iter()
            .find(|e| e.state_id == state_id)
            .map(|e| &e.measure)
    }
}

const MAX_RECORDED_FAILURES: usize = 10;

/// Outcome of one verification sweep.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub name: &'static str,
    pub checks: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// The first few failing checks, for diagnostics.
    pub failures: Vec<String>,
}

impl VerificationReport {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            checks: 0,
            max_deviation: 0.0,
            tolerance,
            passed: true,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, deviation: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        if deviation > self.max_deviation || deviation.is_nan() {
            self.max_deviation = if deviation.is_nan() {
                f64::INFINITY
            } else {
                deviation
            };
        }
        if deviation.is_nan() || deviation > self.tolerance {
            self.passed = false;
            if self.failures.len() < MAX_RECORDED_FAILURES {
                self.failures
                    .push(format!("{} (deviation {deviation:e})", what()));
            }
        }
    }
}

fn check_model_matches(model: &UnderlyingModel, scenario: &Scenario) -> Result<()> {
    let names = model.space.observables();
    if names.len() != scenario.observables.len()
        || names
            .iter()
            .zip(&scenario.observables)
            .any(|(n, o)| n != o.name())
    {
        return Err(Error::Scenario(format!(
            "model `{}` was not built for scenario `{}`",
            model.scenario_id, scenario.id
        )));
    }
    Ok(())
}

/// Checks `P_ψ[A=α] = μ_ψ(Ω(A=α))` for every probe state, observable and
/// value.
pub fn verify_born_agreement(
    model: &UnderlyingModel,
    scenario: &Scenario,
) -> Result<VerificationReport> {
    check_model_matches(model, scenario)?;
    let mut report = VerificationReport::new("born", scenario.options.tol_model);
    for entry in &model.entries {
        for (k, obs) in scenario.observables.iter().enumerate() {
            let marginal = entry.measure.marginal(&[k]);
            for (j, e) in obs.spectrum().iter().enumerate() {
                let born = born_pure(&entry.psi, &Proposition::at(obs, j))?;
                report.record((born - marginal[j]).abs(), || {
                    format!(
                        "state `{}`: P[{} = {}]",
                        entry.state_id,
                        obs.name(),
                        e.value
                    )
                });
            }
        }
    }
    Ok(report)
}

/// Checks the commutative diagram `μ_{T_[A=α](ψ)} = μ_ψ(· | Ω(A=α))`
/// pointwise, for every probe state and every `[A=α]` of non-zero
/// probability.
pub fn verify_update_diagram(
    model: &UnderlyingModel,
    scenario: &Scenario,
) -> Result<VerificationReport> {
    check_model_matches(model, scenario)?;
    let mut report = VerificationReport::new("diagram", scenario.options.tol_model);
    for entry in &model.entries {
        for obs in &scenario.observables {
            for j in 0..obs.num_outcomes() {
                let prop = Proposition::at(obs, j);
                if born_pure(&entry.psi, &prop)? <= TAU_ZERO {
                    continue;
                }
                let updated = luders_update_pure(&entry.psi, &prop)?;
                let pushed = attempt_measure(&model.space, scenario, &updated)?;
                let conditioned = match condition_measure(&entry.measure, &prop) {
                    Ok(m) => m,
                    Err(Error::ZeroProbability { probability, .. }) => {
                        // The model gives the event no mass although the
                        // quantum state does.
                        report.record(1.0 - probability, || {
                            format!(
                                "state `{}`: Ω({} = {}) is null",
                                entry.state_id,
                                obs.name(),
                                prop.value()
                            )
                        });
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                report.record(pushed.distance(&conditioned), || {
                    format!(
                        "state `{}`: update on [{} = {}]",
                        entry.state_id,
                        obs.name(),
                        prop.value()
                    )
                });
            }
        }
    }
    Ok(report)
}

/// Permutation invariance, non-disturbance and joint agreement.
#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub permutation_invariance: VerificationReport,
    pub non_disturbance: VerificationReport,
    pub joint_agreement: VerificationReport,
    pub nonnegativity: VerificationReport,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.permutation_invariance.passed
            && self.non_disturbance.passed
            && self.joint_agreement.passed
            && self.nonnegativity.passed
    }

    pub fn max_deviation(&self) -> f64 {
        [
            &self.permutation_invariance,
            &self.non_disturbance,
            &self.joint_agreement,
            &self.nonnegativity,
        ]
        .iter()
        .map(|r| r.max_deviation)
        .fold(0.0, f64::max)
    }

    pub fn reports(&self) -> [&VerificationReport; 4] {
        [
            &self.permutation_invariance,
            &self.non_disturbance,
            &self.joint_agreement,
            &self.nonnegativity,
        ]
    }
}

/// Number of sampled full chains per state for the permutation check.
const SAMPLED_CHAINS: usize = 8;
/// Random reorderings applied to each sampled chain.
const PERMUTATIONS_PER_CHAIN: usize = 20;
/// Sampled (ordered sub-collection, values) pairs per state for joint
/// agreement.
const SAMPLED_JOINTS: usize = 16;
/// Beyond this many observables the non-disturbance check samples subsets
/// instead of enumerating all of them.
const EXHAUSTIVE_SUBSETS_MAX_ARITY: usize = 10;
const SAMPLED_SUBSETS: usize = 256;

const LAW_SEED_SALT: u64 = 0x6c61_7773;

/// Draws a point index from `pmf` half of the time and uniformly otherwise.
fn sample_point(rng: &mut ChaCha8Rng, pmf: &[f64]) -> usize {
    if rng.random_bool(0.5) {
        let mut u: f64 = rng.random();
        for (p, w) in pmf.iter().enumerate() {
            if u < *w {
                return p;
            }
            u -= w;
        }
    }
    rng.random_range(0..pmf.len())
}

fn subsets(arity: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    if arity <= EXHAUSTIVE_SUBSETS_MAX_ARITY {
        (1u32..(1u32 << arity))
            .map(|mask| (0..arity).filter(|k| mask & (1 << k) != 0).collect())
            .collect()
    } else {
        (0..SAMPLED_SUBSETS)
            .map(|_| {
                let mut s: Vec<usize> = (0..arity).filter(|_| rng.random_bool(0.5)).collect();
                if s.is_empty() {
                    s.push(rng.random_range(0..arity));
                }
                s
            })
            .collect()
    }
}

/// Verifies, for every probe state:
/// (i) sequential joints of sampled full chains are invariant under seeded
/// random permutations of the chain;
/// (ii) marginalizing the pmf onto any sub-collection of observables gives
/// that sub-collection's sequential joint (non-disturbance);
/// (iii) `P_ψ[A₁=α₁, …] = μ_ψ(∩ Ω(A_i=α_i))` for sampled ordered
/// sub-collections and values;
/// and that every pmf entry is non-negative.
pub fn verify_model_laws(model: &UnderlyingModel, scenario: &Scenario) -> Result<LawReport> {
    check_model_matches(model, scenario)?;
    let tol = scenario.options.tol_model;
    let mut perm = VerificationReport::new("permutation-invariance", tol);
    let mut marg = VerificationReport::new("non-disturbance", tol);
    let mut joint = VerificationReport::new("joint-agreement", tol);
    let mut nonneg = VerificationReport::new("nonnegativity", tol);
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed ^ LAW_SEED_SALT);
    let space = &model.space;
    let arity = space.arity();
    let observables = &scenario.observables;

    for entry in &model.entries {
        let pmf = entry.measure.pmf();
        let worst_negative = pmf.iter().fold(0.0_f64, |acc, &w| acc.max(-w));
        nonneg.record(worst_negative, || {
            format!("state `{}`: negative pmf entry", entry.state_id)
        });

        // (i)
        for _ in 0..SAMPLED_CHAINS {
            let point = sample_point(&mut rng, pmf);
            let chain: Vec<Proposition<'_>> = (0..arity)
                .map(|k| Proposition::at(&observables[k], space.coordinate_index(point, k)))
                .collect();
            let reference = chain_probability(&entry.psi, &chain)?;
            for _ in 0..PERMUTATIONS_PER_CHAIN {
                let mut permuted = chain.clone();
                permuted.shuffle(&mut rng);
                let p = chain_probability(&entry.psi, &permuted)?;
                perm.record((p - reference).abs(), || {
                    let order: Vec<&str> = permuted.iter().map(|c| c.observable().name()).collect();
                    format!(
                        "state `{}`: point {:?} in order {:?}",
                        entry.state_id,
                        space.point(point),
                        order
                    )
                });
            }
        }

        // (ii)
        for subset in subsets(arity, &mut rng) {
            let marginal = entry.measure.marginal(&subset);
            let sub_obs: Vec<&Observable> = subset.iter().map(|&k| &observables[k]).collect();
            let direct = joint_table(&entry.psi, &sub_obs)?;
            let deviation = marginal
                .iter()
                .zip(&direct)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            marg.record(deviation, || {
                let names: Vec<&str> = sub_obs.iter().map(|o| o.name()).collect();
                format!("state `{}`: marginal on {:?}", entry.state_id, names)
            });
        }

        // (iii)
        for _ in 0..SAMPLED_JOINTS {
            let point = sample_point(&mut rng, pmf);
            let mut coords: Vec<usize> = (0..arity).collect();
            coords.shuffle(&mut rng);
            coords.truncate(rng.random_range(1..=arity));
            let chain: Vec<Proposition<'_>> = coords
                .iter()
                .map(|&k| Proposition::at(&observables[k], space.coordinate_index(point, k)))
                .collect();
            let events: Vec<(usize, usize)> = coords
                .iter()
                .map(|&k| (k, space.coordinate_index(point, k)))
                .collect();
            let p = chain_probability(&entry.psi, &chain)?;
            let mu = entry.measure.intersection_probability(&events);
            joint.record((p - mu).abs(), || {
                let desc: Vec<String> = chain
                    .iter()
                    .map(|c| format!("{}={}", c.observable().name(), c.value()))
                    .collect();
                format!("state `{}`: joint {:?}", entry.state_id, desc)
            });
        }
    }
    Ok(LawReport {
        permutation_invariance: perm,
        non_disturbance: marg,
        joint_agreement: joint,
        nonnegativity: nonneg,
    })
}

/// Probabilities a state-updating model would be forced to equate on one
/// declared probe state, for the witness pair.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeGap {
    pub state: String,
    pub values: (f64, f64),
    pub p_ab: f64,
    pub p_ba: f64,
    pub gap: f64,
}

/// Why no state-updating model exists for an incompatible scenario.
#[derive(Debug, Clone)]
pub struct ObstructionRecord {
    pub witness: Witness,
    /// Worst-case order gap of the witness pair on each declared probe
    /// state.
    pub probe_gaps: Vec<ProbeGap>,
    /// Observable order used for the attempted fixed-order pmf.
    pub attempted_order: Vec<String>,
    /// Law names the attempted pmf violates.
    pub failed_laws: Vec<&'static str>,
    pub attempted_reports: Vec<VerificationReport>,
}

/// For an incompatible scenario: the witness, the probe-state gaps, and the
/// laws broken by the fixed-order candidate pmf evaluated on the witness
/// state, its two updates, and the declared probe states.
pub fn demonstrate_obstruction(scenario: &Scenario) -> Result<ObstructionRecord> {
    let tol = scenario.options.tol_compat;
    let observables = &scenario.observables;
    let mut found = None;
    for (i, j) in lexicographic_pairs(observables) {
        if !rehder_test(&observables[i], &observables[j], tol)?.compatible {
            found = Some((i, j));
            break;
        }
    }
    let (i, j) = found.ok_or_else(|| Error::NoObstruction(scenario.id.clone()))?;
    let (a, b) = (&observables[i], &observables[j]);
    let witness = find_witness(a, b, tol)?;

    let mut probe_gaps = Vec::new();
    for s in &scenario.probe_states {
        let ab = joint_table(&s.psi, &[a, b])?;
        let ba = joint_table(&s.psi, &[b, a])?;
        let (nb, na) = (b.num_outcomes(), a.num_outcomes());
        let mut best: Option<ProbeGap> = None;
        for x in 0..na {
            for y in 0..nb {
                let (p_ab, p_ba) = (ab[x * nb + y], ba[y * na + x]);
                let gap = (p_ab - p_ba).abs();
                if best.as_ref().is_none_or(|g| gap > g.gap) {
                    best = Some(ProbeGap {
                        state: s.name.clone(),
                        values: (a.spectrum()[x].value, b.spectrum()[y].value),
                        p_ab,
                        p_ba,
                        gap,
                    });
                }
            }
        }
        probe_gaps.extend(best);
    }

    let mut states = vec![NamedState {
        name: "witness".into(),
        psi: witness.psi.clone(),
    }];
    for (label, obs, value) in [
        ("witness|A", a, witness.values.0),
        ("witness|B", b, witness.values.1),
    ] {
        if let Ok(updated) = luders_update_pure(&witness.psi, &Proposition::new(obs, value)?) {
            states.push(NamedState {
                name: label.into(),
                psi: updated,
            });
        }
    }
    states.extend(scenario.probe_states.iter().cloned());
    let attempted = UnderlyingModel::attempt(scenario, &states)?;
    let laws = verify_model_laws(&attempted, scenario)?;
    let mut reports = vec![
        verify_born_agreement(&attempted, scenario)?,
        verify_update_diagram(&attempted, scenario)?,
    ];
    reports.extend(laws.reports().into_iter().cloned());
    let failed_laws = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name)
        .collect();

    Ok(ObstructionRecord {
        witness,
        probe_gaps,
        attempted_order: observables.iter().map(|o| o.name().to_string()).collect(),
        failed_laws,
        attempted_reports: reports,
    })
}

/// Probe states for a run: the declared ones followed by `count` seeded
/// random states named `random-<i>`.
pub fn probe_states_with_random(scenario: &Scenario, count: usize) -> Vec<NamedState> {
    let mut states = scenario.probe_states.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    for i in 0..count {
        states.push(NamedState {
            name: format!("random-{i}"),
            psi: crate::generate::random_state(scenario.dimension, &mut rng),
        });
    }
    states
}
