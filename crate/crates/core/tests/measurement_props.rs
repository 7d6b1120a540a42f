mod common;

use common::*;
use luders::linalg::{CMatrix, CVector};
use luders::measurement::{
    born_density, born_pure, chain_probability, density_distance, joint_table,
    luders_update_density, luders_update_pure, mixture_update_weights, sequential_distribution,
    sequential_joint, sequential_joint_operator,
};
use luders::spectral::Observable;
use luders::state::{DensityOperator, Proposition, PureState, QuantumState};
use luders::{born_probability, Error};
use proptest::prelude::*;

fn qubit(theta: f64, phi: f64) -> CVector {
    ket(&[
        ((theta / 2.0).cos(), 0.0),
        (
            (theta / 2.0).sin() * phi.cos(),
            (theta / 2.0).sin() * phi.sin(),
        ),
    ])
}

fn z() -> Observable {
    Observable::new("Z", diag(&[1.0, -1.0])).unwrap()
}

fn x() -> Observable {
    Observable::new("X", real(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap()
}

#[test]
fn born_on_bloch_sphere() {
    // P[Z=+1] = cos²(θ/2), P[X=+1] = (1 + sin θ cos φ)/2
    let (z, x) = (z(), x());
    for i in 0..12 {
        for j in 0..12 {
            let (theta, phi) = (i as f64 * 0.27, j as f64 * 0.53);
            let psi = PureState::new(qubit(theta, phi)).unwrap();
            let pz = born_pure(&psi, &Proposition::new(&z, 1.0).unwrap()).unwrap();
            let px = born_pure(&psi, &Proposition::new(&x, 1.0).unwrap()).unwrap();
            assert!((pz - (theta / 2.0).cos().powi(2)).abs() < 1e-14);
            assert!((px - 0.5 * (1.0 + theta.sin() * phi.cos())).abs() < 1e-14);
        }
    }
}

#[test]
fn zero_then_x_versus_x_then_zero() {
    // |0⟩: Z=+1 is certain, then X=+1 has probability ½. X=+1 first gives ½, leaving |+⟩, where Z=+1 has ½.
    let (z, x) = (z(), x());
    let zero = PureState::basis(2, 0);
    let zx = sequential_distribution(&zero, (&z, 1.0), (&x, 1.0)).unwrap();
    let xz = sequential_distribution(&zero, (&x, 1.0), (&z, 1.0)).unwrap();
    assert!((zx - 0.5).abs() < 1e-12);
    assert!((xz - 0.25).abs() < 1e-12);
    assert!(((zx - xz) - 0.25).abs() < 1e-12);
}

#[test]
fn updated_state_by_hand() {
    let x = x();
    let psi = PureState::new(qubit(1.1, 0.4)).unwrap();
    let updated = luders_update_pure(&psi, &Proposition::new(&x, -1.0).unwrap()).unwrap();
    // the −1 eigenvector (1, −1)/√2 up to phase
    let s = 1.0 / 2f64.sqrt();
    let overlap = updated
        .amplitudes()
        .dotc(&ket(&[(s, 0.0), (-s, 0.0)]))
        .norm();
    assert!((overlap - 1.0).abs() < 1e-14);
}

#[test]
fn zero_probability_update_is_an_error() {
    let z = z();
    let zero = PureState::basis(2, 0);
    let err = luders_update_pure(&zero, &Proposition::new(&z, -1.0).unwrap()).unwrap_err();
    assert!(matches!(err, Error::ZeroProbability { .. }));
    let rho = zero.to_density();
    assert!(luders_update_density(&rho, &Proposition::new(&z, -1.0).unwrap()).is_err());
    // a chain through an impossible link has probability zero
    assert_eq!(
        sequential_distribution(&zero, (&z, -1.0), (&z, -1.0)).unwrap(),
        0.0
    );
}

#[test]
fn maximally_mixed_gives_rank_over_dimension() {
    let obs = Observable::new("A", diag(&[3.0, 3.0, 1.0])).unwrap();
    let rho = DensityOperator::maximally_mixed(3);
    let p = born_density(&rho, &Proposition::new(&obs, 3.0).unwrap()).unwrap();
    assert!((p - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn three_step_chain_by_hand() {
    // Z, X, Z on |0⟩ with all outcomes +1: 1 · ½ · ½
    let (z, x) = (z(), x());
    let zero = PureState::basis(2, 0);
    let p = sequential_joint(&zero, &[(&z, 1.0), (&x, 1.0), (&z, 1.0)]).unwrap();
    assert!((p - 0.25).abs() < 1e-15);
}

fn observable_pair(d: usize) -> impl Strategy<Value = (CMatrix, CMatrix)> {
    (unitary(d), int_spectrum(d), hermitian(d)).prop_map(|(u, vals, h)| (rotate(&u, &vals), h))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn born_sums_to_one(m in hermitian(4), psi in unit_vector(4)) {
        let obs = Observable::new("A", m).unwrap();
        let state = PureState::new(psi.clone()).unwrap();
        let total: f64 = obs.values().iter()
            .map(|&v| born_pure(&state, &Proposition::new(&obs, v).unwrap()).unwrap())
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for e in obs.spectrum() {
            let p = born_pure(&state, &Proposition::new(&obs, e.value).unwrap()).unwrap();
            prop_assert!((p - sandwich(&psi, &e.projector)).abs() < 1e-12);
        }
    }

    #[test]
    fn update_is_idempotent_and_certain((a, _) in observable_pair(3), psi in unit_vector(3)) {
        let obs = Observable::new("A", a).unwrap();
        let state = PureState::new(psi).unwrap();
        for v in obs.values() {
            let prop = Proposition::new(&obs, v).unwrap();
            let Ok(once) = luders_update_pure(&state, &prop) else { continue };
            prop_assert!((once.amplitudes().norm() - 1.0).abs() < 1e-12);
            prop_assert!((born_pure(&once, &prop).unwrap() - 1.0).abs() < 1e-12);
            let twice = luders_update_pure(&once, &prop).unwrap();
            prop_assert!((once.amplitudes() - twice.amplitudes()).norm() < 1e-12);
            // repeating the same measurement reproduces the outcome
            let repeat = sequential_distribution(&state, (&obs, v), (&obs, v)).unwrap();
            prop_assert!((repeat - born_pure(&state, &prop).unwrap()).abs() < 1e-12);
            for w in obs.values().into_iter().filter(|&w| w != v) {
                prop_assert!(sequential_distribution(&state, (&obs, v), (&obs, w)).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sequential_marginal_is_first_outcome((a, b) in observable_pair(3), psi in unit_vector(3)) {
        let (a, b) = (Observable::new("A", a).unwrap(), Observable::new("B", b).unwrap());
        let state = PureState::new(psi).unwrap();
        for alpha in a.values() {
            let first = born_pure(&state, &Proposition::new(&a, alpha).unwrap()).unwrap();
            let total: f64 = b.values().iter()
                .map(|&beta| sequential_distribution(&state, (&a, alpha), (&b, beta)).unwrap())
                .sum();
            prop_assert!((total - first).abs() < 1e-12);
        }
    }

    #[test]
    fn iterated_and_operator_chains_agree(a in hermitian(3), b in hermitian(3), c3 in hermitian(3), psi in unit_vector(3), picks in prop::collection::vec(0usize..3, 3)) {
        let obs = [Observable::new("A", a).unwrap(), Observable::new("B", b).unwrap(), Observable::new("C", c3).unwrap()];
        let state = PureState::new(psi.clone()).unwrap();
        let chain: Vec<(&Observable, f64)> = obs.iter().zip(&picks)
            .map(|(o, &k)| (o, o.values()[k.min(o.num_outcomes() - 1)]))
            .collect();
        let iterated = sequential_joint(&state, &chain).unwrap();
        let operator = sequential_joint_operator(&state, &chain).unwrap();
        // ‖Π_C Π_B Π_A ψ‖² written out
        let mut v = psi.clone();
        for (o, val) in &chain {
            v = o.projector(*val).unwrap() * v;
        }
        prop_assert!((iterated - operator).abs() < 1e-12);
        prop_assert!((iterated - v.norm_squared()).abs() < 1e-12);
        let props: Vec<Proposition> = chain.iter().map(|(o, val)| Proposition::new(o, *val).unwrap()).collect();
        prop_assert!((chain_probability(&state, &props).unwrap() - iterated).abs() < 1e-15);
    }

    #[test]
    fn joint_table_matches_chains(a in hermitian(3), b in hermitian(3), psi in unit_vector(3)) {
        let (a, b) = (Observable::new("A", a).unwrap(), Observable::new("B", b).unwrap());
        let state = PureState::new(psi).unwrap();
        let table = joint_table(&state, &[&a, &b]).unwrap();
        prop_assert_eq!(table.len(), a.num_outcomes() * b.num_outcomes());
        for (i, alpha) in a.values().into_iter().enumerate() {
            for (j, beta) in b.values().into_iter().enumerate() {
                let seq = sequential_joint(&state, &[(&a, alpha), (&b, beta)]).unwrap();
                prop_assert!((table[i * b.num_outcomes() + j] - seq).abs() < 1e-15);
            }
        }
        prop_assert!((table.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_state_as_density(m in hermitian(4), psi in unit_vector(4)) {
        let obs = Observable::new("A", m).unwrap();
        let state = PureState::new(psi).unwrap();
        let rho = state.to_density();
        for v in obs.values() {
            let prop = Proposition::new(&obs, v).unwrap();
            let pure = born_probability(&QuantumState::from(state.clone()), &obs, v).unwrap();
            let mixed = born_probability(&QuantumState::from(rho.clone()), &obs, v).unwrap();
            prop_assert!((pure - mixed).abs() < 1e-12);
            if pure > 1e-9 {
                let via_pure = luders_update_pure(&state, &prop).unwrap().to_density();
                let via_density = luders_update_density(&rho, &prop).unwrap();
                prop_assert!(density_distance(&via_pure, &via_density) < 1e-12);
            }
        }
    }

    #[test]
    fn mixture_update_reassembles(m in hermitian(3), comps in prop::collection::vec((0.05..1.0f64, unit_vector(3)), 1..5)) {
        let obs = Observable::new("A", m).unwrap();
        let total: f64 = comps.iter().map(|(w, _)| w).sum();
        let components: Vec<(f64, PureState)> = comps.iter()
            .map(|(w, v)| (w / total, PureState::new(v.clone()).unwrap()))
            .collect();
        let rho = DensityOperator::from_mixture(&components).unwrap();
        for v in obs.values() {
            let prop = Proposition::new(&obs, v).unwrap();
            if born_density(&rho, &prop).unwrap() <= 1e-6 {
                continue;
            }
            let updated = mixture_update_weights(&components, &prop).unwrap();
            let weight_sum: f64 = updated.iter().map(|(w, _)| w).sum();
            prop_assert!((weight_sum - 1.0).abs() < 1e-12);
            let reassembled = DensityOperator::from_mixture(&updated).unwrap();
            let direct = luders_update_density(&rho, &prop).unwrap();
            prop_assert!(max_diff(reassembled.matrix(), direct.matrix()) < 1e-12);
        }
    }
}
