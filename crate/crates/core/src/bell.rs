//! Bell-state generation with the post-selected CNOT and two-qubit
//! tomography of the output, giving the `Φ⁺` fidelity as a function of the
//! emitters' parameters.
//!
//! The control photon enters `1_C` and is rotated into `(|0⟩ + |1⟩)/√2`; the
//! target photon enters `0_T`. For each tomography basis `XX` the coincidence
//! `1_C`/`1_T` behind `U_tom^XX · U_CNOT · U_prep` yields `p_XX`.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::emitter::{
    normalized_params, EmitterParams, LinewidthSpec, NormalizedParams, PhotonPair,
};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::gates::{
    bell_circuit, cascade, cnot_gate, cnot_modes, gate_quad, prep_gate, GateQuad, Modes,
    TomographyBasis,
};
use crate::interference::{hom_visibility, identical_pair, interference_factor, ParameterMap};

/// Threshold on `|sin Φ_U|·|Q|` above which a basis is flagged: the
/// phase-sensitive term then has a component the coincidence rate ignores.
pub const IMAGINARY_PART_THRESHOLD: f64 = 1e-9;

/// Lifetime used to realize normalized parameters; the fidelity does not
/// depend on it.
const REFERENCE_LIFETIME: f64 = 1e-9;

/// Gate coefficients of the full tomography circuit, computed once.
#[derive(Debug, Clone)]
pub struct BellCircuit {
    bases: Vec<(TomographyBasis, GateQuad)>,
    /// Coincidences between each control rail and each target rail behind
    /// `U_CNOT · U_prep`; their sum is the post-selection probability.
    qubit_coincidences: Vec<GateQuad>,
}

impl BellCircuit {
    pub fn new() -> Self {
        use cnot_modes::*;
        let modes = Modes::bell();
        let bases = TomographyBasis::ALL
            .iter()
            .map(|&b| {
                (
                    b,
                    gate_quad(&bell_circuit(b), modes).expect("valid Bell modes"),
                )
            })
            .collect();
        let core = cascade(&[&prep_gate(), &cnot_gate()]).expect("equal dims");
        let mut qubit_coincidences = Vec::with_capacity(4);
        for k in [CONTROL_0, CONTROL_1] {
            for l in [TARGET_0, TARGET_1] {
                qubit_coincidences.push(
                    gate_quad(&core, Modes::new(modes.i, modes.j, k, l)).expect("valid modes"),
                );
            }
        }
        Self {
            bases,
            qubit_coincidences,
        }
    }

    /// Shared instance.
    pub fn standard() -> &'static Self {
        static CIRCUIT: OnceLock<BellCircuit> = OnceLock::new();
        CIRCUIT.get_or_init(Self::new)
    }

    pub fn quad(&self, basis: TomographyBasis) -> &GateQuad {
        &self
            .bases
            .iter()
            .find(|(b, _)| *b == basis)
            .expect("all bases present")
            .1
    }

    /// Fidelity for a pair whose interference factor is `m`.
    pub fn evaluate(&self, m: f64) -> (BTreeMap<TomographyBasis, f64>, f64, f64) {
        let p = |q: &GateQuad| q.p0() + 2.0 * q.interference_weight() * m;
        let probabilities: BTreeMap<_, _> = self.bases.iter().map(|(b, q)| (*b, p(q))).collect();
        let success: f64 = self.qubit_coincidences.iter().map(p).sum();
        let fidelity = fidelity_from(&probabilities, success);
        (probabilities, success, fidelity)
    }
}

impl Default for BellCircuit {
    fn default() -> Self {
        Self::new()
    }
}

fn fidelity_from(probabilities: &BTreeMap<TomographyBasis, f64>, success: f64) -> f64 {
    let signed: f64 = TomographyBasis::ALL
        .iter()
        .map(|b| b.fidelity_sign() * probabilities.get(b).copied().unwrap_or(f64::NAN))
        .sum();
    signed / (2.0 * success)
}

/// Bell-state fidelity with the raw coincidence probabilities behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult {
    pub fidelity: f64,
    /// Raw `p_XX`, including the post-selection factor of the gate.
    pub basis_probabilities: BTreeMap<TomographyBasis, f64>,
    /// Probability that each qubit carries exactly one photon.
    pub success_probability: f64,
    /// Present when both photons come from identical, resonant emitters.
    pub normalized_params: Option<NormalizedParams>,
    /// Bases whose gate phase leaves a non-negligible imaginary part.
    pub diagnostics: Vec<String>,
}

impl FidelityResult {
    /// `(pHH + pVV + pDD + pAA − pRR − pLL) / 2`, normalized by the
    /// post-selection probability.
    pub fn recompute(&self) -> f64 {
        fidelity_from(&self.basis_probabilities, self.success_probability)
    }
}

/// Fidelity of the post-selected output with `Φ⁺`.
pub fn bell_fidelity(pair: &PhotonPair) -> Result<FidelityResult> {
    let circuit = BellCircuit::standard();
    let m = interference_factor(pair)?;
    let (basis_probabilities, success_probability, fidelity) = circuit.evaluate(m);
    let diagnostics = circuit
        .bases
        .iter()
        .filter(|(_, q)| (q.phase.sin() * q.magnitude).abs() > IMAGINARY_PART_THRESHOLD)
        .map(|(b, q)| {
            format!(
                "basis {b}: |sin Φ_U|·|Q| = {:e}",
                (q.phase.sin() * q.magnitude).abs()
            )
        })
        .collect();
    Ok(FidelityResult {
        fidelity,
        basis_probabilities,
        success_probability,
        normalized_params: identical_emitters(pair).map(normalized_params),
        diagnostics,
    })
}

fn identical_emitters(pair: &PhotonPair) -> Option<&EmitterParams> {
    let (a, b) = (pair.emitter_i(), pair.emitter_j());
    (a.lifetime() == b.lifetime()
        && a.dephasing_rate() == b.dephasing_rate()
        && a.inhomogeneous_fwhm() == b.inhomogeneous_fwhm()
        && pair.delta_nu() == 0.0)
        .then_some(a)
}

/// Identical-emitter fidelity in terms of the normalized linewidths.
pub fn normalized_fidelity(theta_pd: f64, theta_sd: f64) -> Result<f64> {
    let pair = identical_pair(theta_pd, theta_sd, REFERENCE_LIFETIME)?;
    Ok(BellCircuit::standard()
        .evaluate(interference_factor(&pair)?)
        .2)
}

pub fn fidelity_map(theta_pd: &[f64], theta_sd: &[f64]) -> Result<ParameterMap> {
    fidelity_map_with(theta_pd, theta_sd, Execution::default())
}

pub fn fidelity_map_with(
    theta_pd: &[f64],
    theta_sd: &[f64],
    exec: Execution,
) -> Result<ParameterMap> {
    ParameterMap::evaluate(theta_pd, theta_sd, exec, normalized_fidelity)
}

/// An emitter described by its lifetime and a linewidth specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterSpec {
    /// Radiative lifetime in seconds.
    pub lifetime: f64,
    pub linewidth: LinewidthSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    fn of(values: impl IntoIterator<Item = f64>) -> Self {
        values.into_iter().fold(
            Self {
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
            },
            |r, v| Self {
                min: r.min.min(v),
                max: r.max.max(v),
            },
        )
    }

    pub fn contains(&self, v: f64) -> bool {
        self.min <= v && v <= self.max
    }
}

/// Visibility and fidelity ranges over all parameter sets compatible with
/// the specified linewidths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub visibility: Range,
    pub fidelity: Range,
    /// Number of emitter pairs evaluated.
    pub combinations: usize,
}

/// Assesses one emitter type (two identical copies) or two different
/// emitters. Each linewidth specification is decomposed into `points`
/// `(Γ*, σ′)` combinations; for two emitters every combination of the two
/// curves is evaluated.
pub fn emitter_assessment(emitters: &[EmitterSpec], points: usize) -> Result<Assessment> {
    emitter_assessment_with(emitters, points, Execution::default())
}

pub fn emitter_assessment_with(
    emitters: &[EmitterSpec],
    points: usize,
    exec: Execution,
) -> Result<Assessment> {
    let curves = emitters
        .iter()
        .map(|e| {
            e.linewidth
                .decompose(e.lifetime, points)?
                .into_iter()
                .map(|lp| lp.emitter(e.lifetime))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<PhotonPair> = match curves.as_slice() {
        [one] => one.iter().map(|&e| PhotonPair::identical(e)).collect(),
        [a, b] => a
            .iter()
            .flat_map(|&x| b.iter().map(move |&y| PhotonPair::new(x, y)))
            .collect(),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "assessment takes one or two emitters, got {}",
                emitters.len()
            )))
        }
    };
    let circuit = BellCircuit::standard();
    let values = map_indexed(pairs.len(), exec, |n| -> Result<(f64, f64)> {
        let v = hom_visibility(&pairs[n])?.visibility;
        let f = circuit.evaluate(interference_factor(&pairs[n])?).2;
        Ok((v, f))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(Assessment {
        visibility: Range::of(values.iter().map(|v| v.0)),
        fidelity: Range::of(values.iter().map(|v| v.1)),
        combinations: values.len(),
    })
}
