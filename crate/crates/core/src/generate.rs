//! Seeded fixtures: random states, unitaries and Hermitian matrices, random
//! scenarios, and the standing/travelling-wave demo.

use nalgebra::linalg::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::compat::scenario_pairwise_check;
use crate::error::{Error, Result};
use crate::linalg::{c, outer, symmetrize, CMatrix, CVector, C64};
use crate::measurement::{born_pure, luders_update_pure, sequential_distribution};
use crate::scenario::{NamedState, Options, Scenario};
use crate::spectral::Observable;
use crate::state::{Proposition, PureState};

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Normalized complex Gaussian vector (uniform on the unit sphere).
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let v = CVector::from_fn(dim, |_, _| gaussian_c64(rng));
        if let Ok(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal absorbed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian_c64(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// GUE-style random Hermitian matrix `(G + G†) / 2`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian_c64(rng));
    symmetrize(&g)
}

/// `U diag(values) U†`, made exactly Hermitian.
pub fn conjugated_diagonal(u: &CMatrix, values: &[f64]) -> CMatrix {
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&v| c(v, 0.0)),
    ));
    symmetrize(&(u * d * u.adjoint()))
}

/// Range of the integer eigenvalues drawn for commuting fixtures. Small
/// integers give frequent degeneracies and well-separated spectra.
const COMMUTING_EIGENVALUE_RANGE: std::ops::RangeInclusive<i32> = -3..=3;

/// Random scenario of `count` observables on a `dimension`-dimensional
/// space.
///
/// `compatible = true` draws integer diagonals conjugated by one shared Haar
/// unitary, so every pair commutes. Otherwise observables are independent
/// random Hermitian matrices, redrawn until the pairwise check fails; this
/// needs `count ≥ 2`.
pub fn generate_random_scenario(
    dimension: usize,
    count: usize,
    compatible: bool,
    seed: u64,
) -> Result<Scenario> {
    if dimension < 2 || count < 1 {
        return Err(Error::Scenario(format!(
            "random scenarios need dimension >= 2 and count >= 1 (got {dimension}, {count})"
        )));
    }
    if !compatible && count < 2 {
        return Err(Error::Scenario(
            "an incompatible scenario needs at least two observables".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = if compatible { "compatible" } else { "generic" };
    let id = format!("random-{kind}-d{dimension}-k{count}-s{seed}");
    loop {
        let matrices: Vec<CMatrix> = if compatible {
            let u = random_unitary(dimension, &mut rng);
            (0..count)
                .map(|_| {
                    let values: Vec<f64> = (0..dimension)
                        .map(|_| rng.random_range(COMMUTING_EIGENVALUE_RANGE) as f64)
                        .collect();
                    conjugated_diagonal(&u, &values)
                })
                .collect()
        } else {
            (0..count)
                .map(|_| random_hermitian(dimension, &mut rng))
                .collect()
        };
        let observables = matrices
            .into_iter()
            .enumerate()
            .map(|(i, m)| Observable::new(format!("A{i}"), m))
            .collect::<Result<Vec<_>>>()?;
        let scenario = Scenario::new(
            id.clone(),
            observables,
            Vec::new(),
            seed,
            Options::default(),
        )?;
        if compatible || !scenario_pairwise_check(&scenario)?.is_compatible() {
            return Ok(scenario);
        }
    }
}

/// Phase velocity assigned to travelling modes in the wave demo.
pub const WAVE_SPEED: f64 = 1.0;

/// Discrete Fourier mode `f_k`, `(f_k)_j = e^{2πi jk/n} / √n`.
pub fn fourier_mode(n: usize, k: usize) -> CVector {
    let scale = 1.0 / (n as f64).sqrt();
    CVector::from_fn(n, |j, _| {
        let angle = 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
        c(angle.cos() * scale, angle.sin() * scale)
    })
}

/// Phase velocity of Fourier mode `k` among `n`: conjugate modes `k` and
/// `n − k` carry `+v` and `−v`. For even `n` the two self-conjugate modes
/// `0` and `n/2` form one more `±v` pair; for odd `n` the zero mode is at
/// rest.
pub fn mode_velocity(n: usize, k: usize) -> f64 {
    if k == 0 {
        return if n.is_multiple_of(2) { WAVE_SPEED } else { 0.0 };
    }
    if 2 * k == n {
        return -WAVE_SPEED;
    }
    if 2 * k < n {
        WAVE_SPEED
    } else {
        -WAVE_SPEED
    }
}

/// Finite-mode surrogate of a wave on a string: `N` (number of nodes) is
/// diagonal with eigenvalues `1..=n` in the standing-wave basis; `V` (phase
/// velocity) is diagonal in the Fourier basis with `±v` eigenvalues. The
/// probe `psi_plus` is a `+v` travelling mode.
pub fn generate_wave_demo(n_modes: usize) -> Result<Scenario> {
    if n_modes < 2 {
        return Err(Error::Scenario(format!(
            "the wave demo needs at least 2 modes (got {n_modes})"
        )));
    }
    let n = n_modes;
    let nodes = CMatrix::from_diagonal(&CVector::from_fn(n, |j, _| c((j + 1) as f64, 0.0)));
    let mut velocity = CMatrix::zeros(n, n);
    for k in 0..n {
        let f = fourier_mode(n, k);
        velocity += outer(&f, &f) * c(mode_velocity(n, k), 0.0);
    }
    let velocity = symmetrize(&velocity);
    let plus_mode = if n >= 3 { 1 } else { 0 };
    let psi_plus = PureState::normalized(fourier_mode(n, plus_mode))?;
    let observables = vec![
        Observable::new("V", velocity)?,
        Observable::new("N", nodes)?,
    ];
    Scenario::new(
        format!("wave-{n}"),
        observables,
        vec![NamedState {
            name: "psi_plus".into(),
            psi: psi_plus,
        }],
        0,
        Options::default(),
    )
}

/// One row of the wave demo's two sequential chains, for node count `n`.
#[derive(Debug, Clone, Serialize)]
pub struct WaveChainRow {
    pub n: f64,
    /// `P_{ψ+}[N = n]`.
    pub p_n: f64,
    /// `P_{ψ+}[V = +v, N = n]`.
    pub p_v_then_n: f64,
    /// `P_{ψ+}[N = n, V = +v]`.
    pub p_n_then_v: f64,
    /// `P_{ψ_n}[V = +v]` with `ψ_n = T_[N=n](ψ+)`.
    pub p_v_given_n: f64,
}

/// The two chains `P[V=+v, N=n] = P[N=n]` and
/// `P[N=n, V=+v] = P[N=n] · P_{ψ_n}[V=+v]` for every `n`.
pub fn wave_chains(scenario: &Scenario) -> Result<Vec<WaveChainRow>> {
    let v = scenario
        .observable("V")
        .ok_or_else(|| Error::Scenario("wave demo needs an observable `V`".into()))?;
    let nodes = scenario
        .observable("N")
        .ok_or_else(|| Error::Scenario("wave demo needs an observable `N`".into()))?;
    let psi = &scenario
        .probe_states
        .iter()
        .find(|s| s.name == "psi_plus")
        .ok_or_else(|| Error::Scenario("wave demo needs the probe state `psi_plus`".into()))?
        .psi;
    let mut rows = Vec::new();
    for n in nodes.values() {
        let prop_n = Proposition::new(nodes, n)?;
        let p_n = born_pure(psi, &prop_n)?;
        let p_v_given_n = match luders_update_pure(psi, &prop_n) {
            Ok(psi_n) => born_pure(&psi_n, &Proposition::new(v, WAVE_SPEED)?)?,
            Err(Error::ZeroProbability { .. }) => 0.0,
            Err(e) => return Err(e),
        };
        rows.push(WaveChainRow {
            n,
            p_n,
            p_v_then_n: sequential_distribution(psi, (v, WAVE_SPEED), (nodes, n))?,
            p_n_then_v: sequential_distribution(psi, (nodes, n), (v, WAVE_SPEED))?,
            p_v_given_n,
        });
    }
    Ok(rows)
}

/// Dimension of the largest joint eigenspace `Π_A(H) ∩ Π_B(H)` over all
/// outcome pairs; zero means the observables share no eigenvector.
pub fn common_eigenspace_dimension(a: &Observable, b: &Observable) -> Result<usize> {
    let mut best = 0;
    for ea in a.spectrum() {
        for eb in b.spectrum() {
            let sandwich = symmetrize(&(&ea.projector * &eb.projector * &ea.projector));
            let eig = SymmetricEigen::try_new(sandwich, f64::EPSILON, 10_000)
                .ok_or_else(|| Error::Numeric("eigensolver failed on projector sandwich".into()))?;
            let count = eig
                .eigenvalues
                .iter()
                .filter(|&&x| (x - 1.0).abs() < 1e-8)
                .count();
            best = best.max(count);
        }
    }
    Ok(best)
}
