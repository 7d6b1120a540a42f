//! Pairwise compatibility of observables, decided three ways, and explicit
//! Bayes-rule violation witnesses for incompatible pairs.
//!
//! * the commutator test compares `Π_A Π_B` with `Π_B Π_A`;
//! * the Rehder test compares `Π_A Π_B Π_A` with `Π_B Π_A Π_B`, which is the
//!   operator form of order-independent sequential predictions and is the
//!   authoritative decider;
//! * the order-independence test evaluates both sequential orders on a list
//!   of states. It can only ever certify incompatibility.
//!
//! All margins are `max_(α,β) ‖·‖_max` over every pair of outcomes.

use nalgebra::linalg::SymmetricEigen;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{fix_phase, max_abs_diff, numeric_tol, CMatrix, CVector};
use crate::measurement::{joint_table, sequential_distribution};
use crate::scenario::Scenario;
use crate::spectral::Observable;
use crate::state::PureState;

/// Verdict and margin of an operator-level compatibility test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairTest {
    pub compatible: bool,
    pub margin: f64,
}

fn check_same_dim(a: &Observable, b: &Observable) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

fn projector_pairs<'a>(
    a: &'a Observable,
    b: &'a Observable,
) -> impl Iterator<Item = (usize, usize, &'a CMatrix, &'a CMatrix)> + 'a {
    a.spectrum().iter().enumerate().flat_map(move |(i, ea)| {
        b.spectrum()
            .iter()
            .enumerate()
            .map(move |(j, eb)| (i, j, &ea.projector, &eb.projector))
    })
}

/// `max ‖Π_A Π_B − Π_B Π_A‖_max`.
pub fn commutator_test(a: &Observable, b: &Observable, tol: f64) -> Result<PairTest> {
    check_same_dim(a, b)?;
    let margin = projector_pairs(a, b)
        .map(|(_, _, pa, pb)| max_abs_diff(&(pa * pb), &(pb * pa)))
        .fold(0.0, f64::max);
    Ok(PairTest {
        compatible: margin <= tol,
        margin,
    })
}

/// `Π_A Π_B Π_A − Π_B Π_A Π_B` for one outcome pair.
fn rehder_difference(pa: &CMatrix, pb: &CMatrix) -> CMatrix {
    pa * pb * pa - pb * pa * pb
}

/// `max ‖Π_A Π_B Π_A − Π_B Π_A Π_B‖_max`.
pub fn rehder_test(a: &Observable, b: &Observable, tol: f64) -> Result<PairTest> {
    check_same_dim(a, b)?;
    let margin = projector_pairs(a, b)
        .map(|(_, _, pa, pb)| crate::linalg::max_abs(&rehder_difference(pa, pb)))
        .fold(0.0, f64::max);
    Ok(PairTest {
        compatible: margin <= tol,
        margin,
    })
}

/// Largest sequential-order gap found over a list of states.
#[derive(Debug, Clone)]
pub struct OrderGap {
    pub state_index: usize,
    pub psi: PureState,
    pub alpha: f64,
    pub beta: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct OrderTest {
    /// Advisory only: no gap was found on the sampled states.
    pub compatible: bool,
    pub worst: OrderGap,
}

/// `max_ψ max_(α,β) |P_ψ[A=α, B=β] − P_ψ[B=β, A=α]|`.
pub fn order_independence_test(
    a: &Observable,
    b: &Observable,
    states: &[PureState],
    tol: f64,
) -> Result<OrderTest> {
    check_same_dim(a, b)?;
    let first = states.first().ok_or(Error::EmptyStates)?;
    let nb = b.num_outcomes();
    let na = a.num_outcomes();
    let mut worst = OrderGap {
        state_index: 0,
        psi: first.clone(),
        alpha: a.values()[0],
        beta: b.values()[0],
        gap: -1.0,
    };
    for (s, psi) in states.iter().enumerate() {
        let ab = joint_table(psi, &[a, b])?;
        let ba = joint_table(psi, &[b, a])?;
        for i in 0..na {
            for j in 0..nb {
                let gap = (ab[i * nb + j] - ba[j * na + i]).abs();
                // ties within one state go to the larger outcome labels
                let tied = s == worst.state_index && gap >= worst.gap - TIE_TOL;
                if gap > worst.gap + TIE_TOL || tied {
                    worst = OrderGap {
                        state_index: s,
                        psi: psi.clone(),
                        alpha: a.spectrum()[i].value,
                        beta: b.spectrum()[j].value,
                        gap,
                    };
                }
            }
        }
    }
    Ok(OrderTest {
        compatible: worst.gap <= tol,
        worst,
    })
}

/// A pure state on which measuring `A` then `B` and `B` then `A` disagree.
#[derive(Debug, Clone)]
pub struct Witness {
    pub psi: PureState,
    pub pair: (String, String),
    pub values: (f64, f64),
    /// `P_ψ[A=α, B=β]`.
    pub p_ab: f64,
    /// `P_ψ[B=β, A=α]`.
    pub p_ba: f64,
    /// `|p_ab − p_ba|`.
    pub violation: f64,
    /// Eigenvalue of the Rehder difference operator that `psi` belongs to.
    pub operator_eigenvalue: f64,
}

impl Witness {
    /// Recomputes both sequential probabilities for the stored state and
    /// returns the largest discrepancy with the recorded values.
    pub fn recheck(&self, a: &Observable, b: &Observable) -> Result<f64> {
        let p_ab = sequential_distribution(&self.psi, (a, self.values.0), (b, self.values.1))?;
        let p_ba = sequential_distribution(&self.psi, (b, self.values.1), (a, self.values.0))?;
        let violation = (p_ab - p_ba).abs();
        Ok((p_ab - self.p_ab)
            .abs()
            .max((p_ba - self.p_ba).abs())
            .max((violation - self.violation).abs()))
    }
}

const TIE_TOL: f64 = 1e-12;

/// Builds a witness from the extremal eigenvector of the Rehder difference
/// `D = Π_AΠ_BΠ_A − Π_BΠ_AΠ_B` for the outcome pair maximizing `‖D‖₂`
/// (ties resolved towards the lexicographically smallest `(α, β)`).
/// Since `⟨ψ|D|ψ⟩ = P_ψ[A=α,B=β] − P_ψ[B=β,A=α]`, the violation equals the
/// spectral radius of `D`.
pub fn find_witness(a: &Observable, b: &Observable, tol: f64) -> Result<Witness> {
    check_same_dim(a, b)?;
    let mut best: Option<(usize, usize, f64, f64, CVector)> = None;
    for (i, j, pa, pb) in projector_pairs(a, b) {
        let d = rehder_difference(pa, pb);
        let d = crate::linalg::symmetrize(&d);
        let eig = SymmetricEigen::try_new(d, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Numeric("eigensolver failed on Rehder difference".into()))?;
        let radius = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
        // ties go to the later, larger-valued pair
        if best.as_ref().is_some_and(|b| radius < b.2 - TIE_TOL) {
            continue;
        }
        // among eigenvalues of maximal modulus prefer the largest
        let k = (0..eig.eigenvalues.len())
            .filter(|&k| eig.eigenvalues[k].abs() >= radius - TIE_TOL)
            .max_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]))
            .expect("non-empty spectrum");
        let mut v: CVector = eig.eigenvectors.column(k).into_owned();
        v /= crate::linalg::c(v.norm(), 0.0);
        fix_phase(&mut v);
        best = Some((i, j, radius, eig.eigenvalues[k], v));
    }
    let (i, j, radius, lambda, v) = best.expect("observables have non-empty spectra");
    if radius <= tol {
        return Err(Error::NoWitness {
            a: a.name().to_string(),
            b: b.name().to_string(),
        });
    }
    let psi = PureState::normalized(v)?;
    let alpha = a.spectrum()[i].value;
    let beta = b.spectrum()[j].value;
    let p_ab = sequential_distribution(&psi, (a, alpha), (b, beta))?;
    let p_ba = sequential_distribution(&psi, (b, beta), (a, alpha))?;
    let violation = (p_ab - p_ba).abs();
    let check_tol = numeric_tol(a.spectral_radius().max(b.spectral_radius()));
    if (violation - radius).abs() > check_tol {
        return Err(Error::Numeric(format!(
            "witness violation {violation:e} disagrees with operator norm {radius:e}"
        )));
    }
    Ok(Witness {
        psi,
        pair: (a.name().to_string(), b.name().to_string()),
        values: (alpha, beta),
        p_ab,
        p_ba,
        violation,
        operator_eigenvalue: lambda,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    AllPairwiseCompatible,
    Incompatible,
}

/// Outcome of the Rehder test on one unordered pair.
#[derive(Debug, Clone, Serialize)]
pub struct PairResult {
    pub a: String,
    pub b: String,
    pub method: &'static str,
    pub margin: f64,
    pub compatible: bool,
    pub commutator_margin: f64,
}

#[derive(Debug, Clone)]
pub struct CompatReport {
    pub scenario_id: String,
    pub verdict: Verdict,
    pub pairs: Vec<PairResult>,
    /// Present iff the verdict is `Incompatible`; built from the first
    /// failing pair.
    pub witness: Option<Witness>,
}

impl CompatReport {
    pub fn is_compatible(&self) -> bool {
        self.verdict == Verdict::AllPairwiseCompatible
    }
}

/// Indices of the scenario's observables sorted by name, paired `(i, j)` in
/// lexicographic order.
pub(crate) fn lexicographic_pairs(observables: &[Observable]) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..observables.len()).collect();
    order.sort_by(|&x, &y| observables[x].name().cmp(observables[y].name()));
    let mut pairs = Vec::new();
    for (p, &i) in order.iter().enumerate() {
        for &j in &order[p + 1..] {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Runs the Rehder test on every unordered pair and attaches a witness for
/// the first failure.
pub fn scenario_pairwise_check(scenario: &Scenario) -> Result<CompatReport> {
    let tol = scenario.options.tol_compat;
    let observables = &scenario.observables;
    let mut pairs = Vec::new();
    let mut witness = None;
    for (i, j) in lexicographic_pairs(observables) {
        let (a, b) = (&observables[i], &observables[j]);
        let rehder = rehder_test(a, b, tol)?;
        let commutator = commutator_test(a, b, tol)?;
        if !rehder.compatible && witness.is_none() {
            witness = Some(find_witness(a, b, tol)?);
        }
        pairs.push(PairResult {
            a: a.name().to_string(),
            b: b.name().to_string(),
            method: "rehder",
            margin: rehder.margin,
            compatible: rehder.compatible,
            commutator_margin: commutator.margin,
        });
    }
    let verdict = if witness.is_some() {
        Verdict::Incompatible
    } else {
        Verdict::AllPairwiseCompatible
    };
    Ok(CompatReport {
        scenario_id: scenario.id.clone(),
        verdict,
        pairs,
        witness,
    })
}
