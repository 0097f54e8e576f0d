//! Run configuration as read from JSON. Units are part of every field name:
//! lifetimes in ps, rates and linewidths in MHz, detunings in GHz.

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

use tpi_core::bell::EmitterSpec;
use tpi_core::emitter::{EmitterParams, EmitterRecord, LinewidthSpec, PhotonPair};
use tpi_core::gates::{beam_splitter, bell_circuit, cnot_gate, GateMatrix, Modes, TomographyBasis};
use tpi_core::interference::linspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// One emitter (used for both photons) or two.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub emitters: Vec<EmitterRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateConfig>,
    /// One-based `[i, j, k, l]`; defaults to the gate's natural modes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<[usize; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_ps: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_ghz: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_pd: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_sd: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decompose: Option<DecomposeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assess: Option<AssessConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Either an explicit list of values or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum GridSpec {
    Values(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        points: usize,
    },
}

impl GridSpec {
    pub fn values(&self, what: &str) -> Result<Vec<f64>> {
        self.checked_values(what).map_err(invalid)
    }

    fn checked_values(&self, what: &str) -> Result<Vec<f64>> {
        let v = match self {
            GridSpec::Values(v) => v.clone(),
            GridSpec::Range {
                start,
                stop,
                points,
            } => {
                ensure!(
                    start.is_finite() && stop.is_finite(),
                    "{what}: range bounds must be finite"
                );
                linspace(*start, *stop, *points)
            }
        };
        ensure!(!v.is_empty(), "{what}: grid is empty");
        ensure!(
            v.iter().all(|x| x.is_finite()),
            "{what}: grid values must be finite"
        );
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GateConfig {
    BeamSplitter {
        reflectivity: f64,
    },
    Cnot,
    BellCircuit {
        basis: String,
    },
    /// Rows of `[re, im]` pairs.
    Matrix {
        elements: Vec<Vec<[f64; 2]>>,
    },
}

impl GateConfig {
    pub fn build(&self) -> Result<(GateMatrix, Modes)> {
        Ok(match self {
            GateConfig::BeamSplitter { reflectivity } => (
                beam_splitter(*reflectivity, 1.0 - reflectivity)?,
                Modes::hom(),
            ),
            GateConfig::Cnot => (cnot_gate(), Modes::bell()),
            GateConfig::BellCircuit { basis } => {
                let basis: TomographyBasis = basis.parse()?;
                (bell_circuit(basis), Modes::bell())
            }
            GateConfig::Matrix { elements } => (GateMatrix::from_pairs(elements)?, Modes::hom()),
        })
    }
}

/// Linewidth of an emitter as reported in the literature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LinewidthRecord {
    CoherenceTimePs(f64),
    VoigtFwhmMhz(f64),
    Components {
        lorentzian_fwhm_mhz: f64,
        gaussian_fwhm_mhz: f64,
    },
    HomogeneousBound {
        lorentzian_fwhm_max_mhz: f64,
        gaussian_fwhm_mhz: f64,
    },
}

impl From<LinewidthRecord> for LinewidthSpec {
    fn from(r: LinewidthRecord) -> Self {
        match r {
            LinewidthRecord::CoherenceTimePs(t) => LinewidthSpec::CoherenceTime(t * 1e-12),
            LinewidthRecord::VoigtFwhmMhz(f) => LinewidthSpec::VoigtFwhm(f * 1e6),
            LinewidthRecord::Components {
                lorentzian_fwhm_mhz,
                gaussian_fwhm_mhz,
            } => LinewidthSpec::Components {
                lorentzian_fwhm: lorentzian_fwhm_mhz * 1e6,
                gaussian_fwhm: gaussian_fwhm_mhz * 1e6,
            },
            LinewidthRecord::HomogeneousBound {
                lorentzian_fwhm_max_mhz,
                gaussian_fwhm_mhz,
            } => LinewidthSpec::HomogeneousBound {
                lorentzian_fwhm_max: lorentzian_fwhm_max_mhz * 1e6,
                gaussian_fwhm: gaussian_fwhm_mhz * 1e6,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterSpecRecord {
    pub lifetime_ps: f64,
    pub linewidth: LinewidthRecord,
}

impl From<EmitterSpecRecord> for EmitterSpec {
    fn from(r: EmitterSpecRecord) -> Self {
        EmitterSpec {
            lifetime: r.lifetime_ps * 1e-12,
            linewidth: r.linewidth.into(),
        }
    }
}

fn default_points() -> usize {
    200
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeConfig {
    #[serde(flatten)]
    pub emitter: EmitterSpecRecord,
    #[serde(default = "default_points")]
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssessConfig {
    pub emitters: Vec<EmitterSpecRecord>,
    #[serde(default = "default_points")]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Random (pair, unitary, modes) instances for the coincidence check.
    #[serde(default = "VerifyConfig::default_instances")]
    pub coincidence_instances: usize,
    /// Random instances for the jittered G² check (5 delays each).
    #[serde(default = "VerifyConfig::default_g2_instances")]
    pub g2_instances: usize,
    #[serde(default = "VerifyConfig::default_realizations")]
    pub realizations: usize,
    #[serde(default = "VerifyConfig::default_trials")]
    pub trials: usize,
}

impl VerifyConfig {
    fn default_instances() -> usize {
        100
    }
    fn default_g2_instances() -> usize {
        10
    }
    fn default_realizations() -> usize {
        1000
    }
    fn default_trials() -> usize {
        tpi_core::oracle::DEFAULT_TRIALS
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            coincidence_instances: Self::default_instances(),
            g2_instances: Self::default_g2_instances(),
            realizations: Self::default_realizations(),
            trials: Self::default_trials(),
        }
    }
}

/// A problem with the configuration itself rather than with the computation;
/// reported with its own exit status.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn invalid(e: anyhow::Error) -> anyhow::Error {
    if e.is::<ConfigError>() {
        e
    } else {
        ConfigError(format!("{e:#}")).into()
    }
}

/// Pass thresholds used by `verify`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Largest accepted `|P_closed − P_quadrature|`.
    #[serde(default = "Tolerances::default_coincidence")]
    pub coincidence: f64,
    /// Width of the Monte-Carlo acceptance band in standard errors.
    #[serde(default = "Tolerances::default_sigmas")]
    pub sigmas: f64,
}

impl Tolerances {
    fn default_coincidence() -> f64 {
        1e-6
    }
    fn default_sigmas() -> f64 {
        3.0
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            coincidence: Self::default_coincidence(),
            sigmas: Self::default_sigmas(),
        }
    }
}

pub const DEFAULT_SEED: u64 = 20_180_101;

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Self::read(path).map_err(invalid)
    }

    fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn pair(&self) -> Result<PhotonPair> {
        self.build_pair().map_err(invalid)
    }

    fn build_pair(&self) -> Result<PhotonPair> {
        let emitters = self
            .emitters
            .iter()
            .map(|&r| EmitterParams::try_from(r).map_err(anyhow::Error::from))
            .collect::<Result<Vec<_>>>()?;
        match emitters.as_slice() {
            [one] => Ok(PhotonPair::identical(*one)),
            [a, b] => Ok(PhotonPair::new(*a, *b)),
            [] => bail!("config needs `emitters` (one or two entries)"),
            _ => bail!(
                "config lists {} emitters; one or two expected",
                emitters.len()
            ),
        }
    }

    /// The gate (a symmetric beam splitter by default) and the zero-based modes.
    pub fn gate(&self) -> Result<(GateMatrix, Modes)> {
        self.build_gate().map_err(invalid)
    }

    fn build_gate(&self) -> Result<(GateMatrix, Modes)> {
        let (u, natural) = match &self.gate {
            Some(g) => g.build()?,
            None => (beam_splitter(0.5, 0.5)?, Modes::hom()),
        };
        let modes = match self.modes {
            Some([i, j, k, l]) => Modes::one_based(i, j, k, l)?,
            None => natural,
        };
        modes.validate(u.dim())?;
        Ok((u, modes))
    }

    pub fn require<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T> {
        field
            .as_ref()
            .ok_or_else(|| ConfigError(format!("config needs `{name}`")).into())
    }
}
