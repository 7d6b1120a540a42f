//! Born probabilities, the Lüders update map and sequential-measurement
//! distributions.
//!
//! The update `T_[A=α]` sends `ψ ↦ Πψ / ‖Πψ‖` and `ρ ↦ ΠρΠ / tr(ρΠ)`, where
//! `Π = Π(A = α)`. Both are undefined when the conditioning probability is
//! zero; probabilities at or below [`TAU_ZERO`] are reported as
//! [`Error::ZeroProbability`].
//!
//! Sequential joints `P_ψ[A₁=α₁, …, A_m=α_m]` are products of conditionals
//! along a chain of updates. A link whose probability is at or below
//! `TAU_ZERO` makes the whole chain zero.

use crate::error::{Error, Result};
use crate::linalg::{c, clamp_probability, max_abs_diff, symmetrize, CMatrix, CVector, TAU_ZERO};
use crate::spectral::Observable;
use crate::state::{DensityOperator, Proposition, PureState, QuantumState, NORM_TOL};

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn zero_probability(prop: &Proposition<'_>, probability: f64) -> Error {
    Error::ZeroProbability {
        observable: prop.observable().name().to_string(),
        value: prop.value(),
        probability,
    }
}

/// One link of a measurement chain on an unnormalized-safe state vector:
/// returns the Born probability of `projector` and the updated unit vector
/// (`None` when the probability is at or below `TAU_ZERO`).
fn measure_step(psi: &CVector, projector: &CMatrix, tol: f64) -> Result<(f64, Option<CVector>)> {
    let projected = projector * psi;
    let norm_sq = projected.norm_squared();
    let p = clamp_probability(norm_sq, tol)?;
    if p <= TAU_ZERO {
        return Ok((0.0, None));
    }
    let norm = norm_sq.sqrt();
    Ok((p, Some(projected / c(norm, 0.0))))
}

/// `P_ρ[A = α] = tr(ρ Π(A = α))`; for pure states `⟨ψ|Π|ψ⟩`.
pub fn born_probability(state: &QuantumState, obs: &Observable, value: f64) -> Result<f64> {
    let prop = Proposition::new(obs, value)?;
    match state {
        QuantumState::Pure(psi) => born_pure(psi, &prop),
        QuantumState::Mixed(rho) => born_density(rho, &prop),
    }
}

pub fn born_pure(psi: &PureState, prop: &Proposition<'_>) -> Result<f64> {
    check_dim(prop.observable().dim(), psi.dim())?;
    let projected = prop.projector() * psi.amplitudes();
    clamp_probability(projected.norm_squared(), prop.observable().tol_num())
}

pub fn born_density(rho: &DensityOperator, prop: &Proposition<'_>) -> Result<f64> {
    check_dim(prop.observable().dim(), rho.dim())?;
    let p = (rho.matrix() * prop.projector()).trace().re;
    clamp_probability(p, prop.observable().tol_num())
}

/// `T_[A=α](ψ) = Πψ / ‖Πψ‖`.
pub fn luders_update_pure(psi: &PureState, prop: &Proposition<'_>) -> Result<PureState> {
    check_dim(prop.observable().dim(), psi.dim())?;
    let (p, next) = measure_step(
        psi.amplitudes(),
        prop.projector(),
        prop.observable().tol_num(),
    )?;
    next.map(PureState::from_unit_unchecked)
        .ok_or_else(|| zero_probability(prop, p))
}

/// `T_[A=α](ρ) = ΠρΠ / tr(ρΠ)`.
pub fn luders_update_density(
    rho: &DensityOperator,
    prop: &Proposition<'_>,
) -> Result<DensityOperator> {
    let p = born_density(rho, prop)?;
    if p <= TAU_ZERO {
        return Err(zero_probability(prop, p));
    }
    let proj = prop.projector();
    let updated = proj * rho.matrix() * proj / c(p, 0.0);
    Ok(DensityOperator::from_matrix_unchecked(symmetrize(&updated)))
}

/// Updates a convex decomposition `ρ = Σ p_i |ψ_i⟩⟨ψ_i|` componentwise:
/// each surviving component becomes `T(ψ_i)` with weight
/// `p_i P_{ψ_i}[A=α] / P_ρ[A=α]`. Components annihilated by the projector
/// are dropped.
pub fn mixture_update_weights(
    components: &[(f64, PureState)],
    prop: &Proposition<'_>,
) -> Result<Vec<(f64, PureState)>> {
    if components.is_empty() {
        return Err(Error::EmptyStates);
    }
    let total: f64 = components.iter().map(|(w, _)| w).sum();
    if components.iter().any(|(w, _)| w.is_nan() || *w <= 0.0) || (total - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidState(format!(
            "mixture weights must be positive and sum to 1 (sum = {total})"
        )));
    }
    check_dim(prop.observable().dim(), components[0].1.dim())?;
    let projected: Vec<(f64, CVector)> = components
        .iter()
        .map(|(w, psi)| {
            check_dim(prop.observable().dim(), psi.dim())?;
            let v = prop.projector() * psi.amplitudes();
            Ok((w * v.norm_squared(), v))
        })
        .collect::<Result<_>>()?;
    let aggregate: f64 = projected.iter().map(|(pj, _)| pj).sum();
    if aggregate <= TAU_ZERO {
        return Err(zero_probability(prop, aggregate));
    }
    // a component with a tiny but nonzero overlap still contributes to ΠρΠ,
    // so only exact annihilation drops it
    let mut out = Vec::new();
    for (pj, v) in projected {
        if pj == 0.0 {
            continue;
        }
        let norm = v.norm();
        out.push((
            pj / aggregate,
            PureState::from_unit_unchecked(v / c(norm, 0.0)),
        ));
    }
    Ok(out)
}

/// Probability of obtaining `α` then `β` when measuring `A` then `B`:
/// `⟨ψ|Π_A Π_B Π_A|ψ⟩`, computed as `P_ψ[A=α] · P_{T(ψ)}[B=β]`.
pub fn sequential_distribution(
    psi: &PureState,
    first: (&Observable, f64),
    second: (&Observable, f64),
) -> Result<f64> {
    sequential_joint(psi, &[first, second])
}

/// `P_ψ[A₁=α₁, …, A_m=α_m]` by iterated Lüders updates.
pub fn sequential_joint(psi: &PureState, chain: &[(&Observable, f64)]) -> Result<f64> {
    let props = chain
        .iter()
        .map(|&(obs, v)| Proposition::new(obs, v))
        .collect::<Result<Vec<_>>>()?;
    chain_probability(psi, &props)
}

/// [`sequential_joint`] on already-resolved propositions.
pub fn chain_probability(psi: &PureState, chain: &[Proposition<'_>]) -> Result<f64> {
    if chain.is_empty() {
        return Err(Error::Scenario(
            "measurement chain must have at least one link".into(),
        ));
    }
    for prop in chain {
        check_dim(prop.observable().dim(), psi.dim())?;
    }
    let mut probability = 1.0;
    let mut current = psi.amplitudes().clone();
    for prop in chain {
        let (p, next) = measure_step(&current, prop.projector(), prop.observable().tol_num())?;
        match next {
            Some(v) => {
                probability *= p;
                current = v;
            }
            None => return Ok(0.0),
        }
    }
    Ok(probability)
}

/// The same joint via the explicit operator `Π₁⋯Π_m⋯Π₁` sandwiched in `ψ`.
/// Independent of the iterated route; used to cross-check it.
pub fn sequential_joint_operator(psi: &PureState, chain: &[(&Observable, f64)]) -> Result<f64> {
    let first = chain
        .first()
        .ok_or_else(|| Error::Scenario("measurement chain must have at least one link".into()))?;
    let dim = first.0.dim();
    check_dim(dim, psi.dim())?;
    let mut left = CMatrix::identity(dim, dim);
    let mut tol: f64 = 0.0;
    for &(obs, v) in chain {
        check_dim(dim, obs.dim())?;
        left *= obs.projector(v)?;
        tol = tol.max(obs.tol_num());
    }
    // left = Π₁Π₂⋯Π_m; the sandwich is left · left†.
    let sandwich = &left * left.adjoint();
    let v = psi.amplitudes();
    clamp_probability(v.dotc(&(sandwich * v)).re, tol)
}

/// Full joint table of `observables` measured in the given order, laid out
/// row-major over the product of their spectra (last observable fastest).
///
/// Shares update prefixes between outcomes and skips zero-probability
/// branches, so it costs far less than one `sequential_joint` per entry
/// while producing identical values.
pub fn joint_table(psi: &PureState, observables: &[&Observable]) -> Result<Vec<f64>> {
    for obs in observables {
        check_dim(obs.dim(), psi.dim())?;
    }
    let size: usize = observables.iter().map(|o| o.num_outcomes()).product();
    let mut table = vec![0.0; size];
    if observables.is_empty() {
        return Ok(table);
    }
    fill_table(psi.amplitudes(), 1.0, observables, 0, 0, &mut table)?;
    Ok(table)
}

fn fill_table(
    current: &CVector,
    probability: f64,
    observables: &[&Observable],
    depth: usize,
    offset: usize,
    table: &mut [f64],
) -> Result<()> {
    let obs = observables[depth];
    let stride: usize = observables[depth + 1..]
        .iter()
        .map(|o| o.num_outcomes())
        .product();
    for k in 0..obs.num_outcomes() {
        let (p, next) = measure_step(current, obs.projector_at(k), obs.tol_num())?;
        let Some(next) = next else { continue };
        let index = offset + k * stride;
        if depth + 1 == observables.len() {
            table[index] = probability * p;
        } else {
            fill_table(&next, probability * p, observables, depth + 1, index, table)?;
        }
    }
    Ok(())
}

/// `‖ρ₁ − ρ₂‖_max` for density operators of equal dimension.
pub fn density_distance(a: &DensityOperator, b: &DensityOperator) -> f64 {
    max_abs_diff(a.matrix(), b.matrix())
}
