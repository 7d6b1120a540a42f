//! End-to-end checks of a scenario and the reports they produce.
//!
//! A compatible scenario gets a model built on its probe states plus seeded
//! random states, followed by the three verification sweeps. An
//! incompatible one gets a witness and an obstruction record.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::compat::{scenario_pairwise_check, PairResult, Verdict, Witness};
use crate::error::Result;
use crate::generate::{common_eigenspace_dimension, generate_wave_demo, wave_chains, WaveChainRow};
use crate::linalg::numeric_tol;
use crate::model::{
    demonstrate_obstruction, probe_states_with_random, verify_born_agreement, verify_model_laws,
    verify_update_diagram, LawReport, ProbeGap, UnderlyingModel, VerificationReport,
};
use crate::scenario::Scenario;
use crate::state::ComplexVectorDoc;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Process exit status of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Pairwise compatible and every verification passed.
    Compatible = 0,
    /// Incompatible; a witness was emitted.
    Incompatible = 1,
    /// The input could not be read or validated.
    InputError = 2,
    /// An internal consistency check failed.
    VerificationFailure = 3,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessDoc {
    pub state: ComplexVectorDoc,
    pub pair: [String; 2],
    pub values: [f64; 2],
    pub p_ab: f64,
    pub p_ba: f64,
    pub violation: f64,
}

impl From<&Witness> for WitnessDoc {
    fn from(w: &Witness) -> Self {
        Self {
            state: ComplexVectorDoc::from(&w.psi),
            pair: [w.pair.0.clone(), w.pair.1.clone()],
            values: [w.values.0, w.values.1],
            p_ab: w.p_ab,
            p_ba: w.p_ba,
            violation: w.violation,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StatePmf {
    pub state: String,
    pub pmf: Vec<f64>,
}

/// Exported model: observable order, point enumeration and one pmf table
/// per state.
#[derive(Debug, Clone, Serialize)]
pub struct ModelDoc {
    pub scenario: String,
    pub observables: Vec<String>,
    pub points: Vec<Vec<f64>>,
    pub pmf_per_state: Vec<StatePmf>,
}

impl From<&UnderlyingModel> for ModelDoc {
    fn from(model: &UnderlyingModel) -> Self {
        Self {
            scenario: model.scenario_id.clone(),
            observables: model.space.observables().to_vec(),
            points: model.space.points().collect(),
            pmf_per_state: model
                .entries
                .iter()
                .map(|e| StatePmf {
                    state: e.state_id.clone(),
                    pmf: e.measure.pmf().to_vec(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verifications {
    pub born: VerificationReport,
    pub diagram: VerificationReport,
    pub laws: LawReport,
}

impl Verifications {
    pub fn passed(&self) -> bool {
        self.born.passed && self.diagram.passed && self.laws.passed()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionDoc {
    /// `P_ψ[A=α, B=β]` and `P_ψ[B=β, A=α]` on the witness state: any
    /// state-updating model would force these to be equal.
    pub forced_equal: [f64; 2],
    pub gap: f64,
    pub probe_gaps: Vec<ProbeGap>,
    pub attempted_order: Vec<String>,
    pub failed_laws: Vec<&'static str>,
    pub attempted: Vec<VerificationReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WaveDoc {
    pub modes: usize,
    pub note: &'static str,
    pub common_eigenvectors: usize,
    pub rows: Vec<WaveChainRow>,
}

pub const WAVE_NOTE: &str =
    "finite-mode surrogate: N is diagonal in the standing-wave basis with eigenvalues 1..n; \
V is diagonal in the discrete Fourier basis, conjugate modes k and n-k carry +v and -v, \
for even n the modes 0 and n/2 form one more pair, for odd n the zero mode has velocity 0";

/// Everything a check produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub timing_ms: f64,
    pub scenario: String,
    pub verdict: Verdict,
    pub status: Status,
    pub seed: u64,
    pub version: &'static str,
    pub pairs: Vec<PairResult>,
    pub witness: Option<WitnessDoc>,
    pub obstruction: Option<ObstructionDoc>,
    pub model: Option<ModelDoc>,
    pub verifications: Option<Verifications>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wave: Option<WaveDoc>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Decides compatibility, then either builds and verifies the model or
/// records the obstruction.
pub fn run_check(scenario: &Scenario) -> Result<RunReport> {
    let start = Instant::now();
    let compat = scenario_pairwise_check(scenario)?;
    let mut report = RunReport {
        timing_ms: 0.0,
        scenario: scenario.id.clone(),
        verdict: compat.verdict,
        status: Status::Compatible,
        seed: scenario.seed,
        version: VERSION,
        pairs: compat.pairs.clone(),
        witness: None,
        obstruction: None,
        model: None,
        verifications: None,
        wave: None,
    };

    match &compat.witness {
        None => {
            let states = probe_states_with_random(scenario, scenario.options.random_states);
            let model = UnderlyingModel::build(scenario, &states)?;
            let verifications = Verifications {
                born: verify_born_agreement(&model, scenario)?,
                diagram: verify_update_diagram(&model, scenario)?,
                laws: verify_model_laws(&model, scenario)?,
            };
            if !verifications.passed() {
                report.status = Status::VerificationFailure;
            }
            report.model = Some(ModelDoc::from(&model));
            report.verifications = Some(verifications);
        }
        Some(witness) => {
            let record = demonstrate_obstruction(scenario)?;
            let a = scenario
                .observable(&witness.pair.0)
                .expect("witness names a scenario observable");
            let b = scenario
                .observable(&witness.pair.1)
                .expect("witness names a scenario observable");
            let drift = witness.recheck(a, b)?;
            let tol = numeric_tol(a.spectral_radius().max(b.spectral_radius()));
            report.status = if witness.violation > scenario.options.tol_compat && drift <= tol {
                Status::Incompatible
            } else {
                Status::VerificationFailure
            };
            report.witness = Some(WitnessDoc::from(witness));
            report.obstruction = Some(ObstructionDoc {
                forced_equal: [record.witness.p_ab, record.witness.p_ba],
                gap: record.witness.violation,
                probe_gaps: record.probe_gaps,
                attempted_order: record.attempted_order,
                failed_laws: record.failed_laws,
                attempted: record.attempted_reports,
            });
        }
    }
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// Runs the wave demo with `n_modes` modes and attaches both sequential
/// chains to the report.
pub fn run_wave_demo(n_modes: usize, random_states: usize) -> Result<RunReport> {
    let mut scenario = generate_wave_demo(n_modes)?;
    scenario.options.random_states = random_states;
    let mut report = run_check(&scenario)?;
    let v = scenario.observable("V").expect("demo defines V");
    let n = scenario.observable("N").expect("demo defines N");
    report.wave = Some(WaveDoc {
        modes: n_modes,
        note: WAVE_NOTE,
        common_eigenvectors: common_eigenspace_dimension(v, n)?,
        rows: wave_chains(&scenario)?,
    });
    Ok(report)
}

fn verification_line(out: &mut String, r: &VerificationReport) {
    let _ = writeln!(
        out,
        "  {:<24} {} ({} checks, max deviation {:.3e}, tolerance {:.1e})",
        r.name,
        if r.passed { "pass" } else { "FAIL" },
        r.checks,
        r.max_deviation,
        r.tolerance
    );
    for f in &r.failures {
        let _ = writeln!(out, "    - {f}");
    }
}

/// Human-readable rendering.
pub fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenario {} (seed {}, version {})",
        report.scenario, report.seed, report.version
    );
    let verdict = match report.verdict {
        Verdict::AllPairwiseCompatible => "all pairwise compatible",
        Verdict::Incompatible => "incompatible",
    };
    let _ = writeln!(out, "verdict: {verdict} (status {})", report.status.code());
    if !report.pairs.is_empty() {
        let _ = writeln!(out, "pairs:");
        for p in &report.pairs {
            let _ = writeln!(
                out,
                "  {} / {}: {} (rehder margin {:.3e}, commutator margin {:.3e})",
                p.a,
                p.b,
                if p.compatible {
                    "compatible"
                } else {
                    "incompatible"
                },
                p.margin,
                p.commutator_margin
            );
        }
    }
    if let Some(w) = &report.witness {
        let _ = writeln!(
            out,
            "witness on ({}, {}) at values ({}, {}):",
            w.pair[0], w.pair[1], w.values[0], w.values[1]
        );
        let _ = writeln!(
            out,
            "  P[{}={}, {}={}] = {:.12}",
            w.pair[0], w.values[0], w.pair[1], w.values[1], w.p_ab
        );
        let _ = writeln!(
            out,
            "  P[{}={}, {}={}] = {:.12}",
            w.pair[1], w.values[1], w.pair[0], w.values[0], w.p_ba
        );
        let _ = writeln!(out, "  violation = {:.12}", w.violation);
        let im = w
            .state
            .im
            .clone()
            .unwrap_or_else(|| vec![0.0; w.state.re.len()]);
        let amps: Vec<String> = w
            .state
            .re
            .iter()
            .zip(&im)
            .map(|(re, im)| format!("{re:+.6}{im:+.6}i"))
            .collect();
        let _ = writeln!(out, "  state = [{}]", amps.join(", "));
    }
    if let Some(o) = &report.obstruction {
        for g in &o.probe_gaps {
            let _ = writeln!(
                out,
                "probe `{}`: P[AB] = {:.12}, P[BA] = {:.12}, gap {:.12} at values ({}, {})",
                g.state, g.p_ab, g.p_ba, g.gap, g.values.0, g.values.1
            );
        }
        let _ = writeln!(
            out,
            "fixed-order pmf over {:?} violates: {}",
            o.attempted_order,
            if o.failed_laws.is_empty() {
                "nothing".to_string()
            } else {
                o.failed_laws.join(", ")
            }
        );
    }
    if let Some(m) = &report.model {
        let _ = writeln!(
            out,
            "model over {:?}: {} points, {} states",
            m.observables,
            m.points.len(),
            m.pmf_per_state.len()
        );
        for s in m
            .pmf_per_state
            .iter()
            .filter(|s| !s.state.starts_with("random-"))
        {
            let _ = writeln!(out, "  pmf[{}]:", s.state);
            for (point, w) in m.points.iter().zip(&s.pmf) {
                if *w != 0.0 {
                    let _ = writeln!(out, "    {point:?} -> {w:.12}");
                }
            }
        }
    }
    if let Some(v) = &report.verifications {
        let _ = writeln!(out, "verifications:");
        verification_line(&mut out, &v.born);
        verification_line(&mut out, &v.diagram);
        for r in v.laws.reports() {
            verification_line(&mut out, r);
        }
    }
    if let Some(w) = &report.wave {
        let _ = writeln!(
            out,
            "wave demo, {} modes ({} common eigenvectors)",
            w.modes, w.common_eigenvectors
        );
        let _ = writeln!(out, "  note: {}", w.note);
        let _ = writeln!(
            out,
            "  {:>4} {:>14} {:>14} {:>14} {:>14}",
            "n", "P[N=n]", "P[V=+v,N=n]", "P[N=n,V=+v]", "P_n[V=+v]"
        );
        for r in &w.rows {
            let _ = writeln!(
                out,
                "  {:>4} {:>14.10} {:>14.10} {:>14.10} {:>14.10}",
                r.n, r.p_n, r.p_v_then_n, r.p_n_then_v, r.p_v_given_n
            );
        }
    }
    let _ = writeln!(out, "elapsed: {:.3} ms", report.timing_ms);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    #[test]
    fn single_observable_run() {
        let doc = r#"{ "dimension": 2, "observables": [ { "name": "Z", "matrix": { "re": [[1, 0], [0, -1]] } } ],
            "states": [ { "name": "zero", "vector": { "re": [1, 0] } } ], "options": { "random_states": 3 } }"#;
        let s = parse_scenario(doc).unwrap();
        let r = run_check(&s).unwrap();
        assert_eq!(r.status, Status::Compatible);
        let m = r.model.as_ref().unwrap();
        assert_eq!(m.pmf_per_state.len(), 4);
        assert_eq!(m.pmf_per_state[0].pmf, vec![0.0, 1.0]);
        assert!(render_text(&r).contains("verdict: all pairwise compatible"));
    }

    #[test]
    fn incompatible_run_has_witness() {
        let doc = r#"{ "dimension": 2, "observables": [
              { "name": "Z", "matrix": { "re": [[1, 0], [0, -1]] } },
              { "name": "X", "matrix": { "re": [[0, 1], [1, 0]] } } ],
            "states": [ { "name": "zero", "vector": { "re": [1, 0] } } ] }"#;
        let r = run_check(&parse_scenario(doc).unwrap()).unwrap();
        assert_eq!(r.status, Status::Incompatible);
        assert!(r.witness.is_some() && r.model.is_none());
        let o = r.obstruction.as_ref().unwrap();
        assert!((o.probe_gaps[0].gap - 0.25).abs() < 1e-12);
        assert!(!o.failed_laws.is_empty());
    }
}
