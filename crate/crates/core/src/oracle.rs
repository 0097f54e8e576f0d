//! Brute-force cross-checks for the closed forms: Monte-Carlo sampling of
//! the phase and frequency jitter, and direct numerical integration.
//!
//! Random streams are derived from a single 64-bit seed: chunk `c` of a run
//! draws from a ChaCha8 generator seeded with `seed` on stream `c`. Chunks are
//! reduced in index order, so estimates are bit-identical regardless of the
//! number of threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::emitter::{EmitterParams, PhotonPair};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::gates::{GateMatrix, Modes};
use crate::interference::{
    g2_value, joint_density, ExponentialPacket, Normalized, PhaseTrajectory, WaveFunction,
};
use crate::numerics::Integrator;

pub const MIN_TRIALS: usize = 10_000;
pub const DEFAULT_TRIALS: usize = 100_000;
const TRIALS_PER_CHUNK: usize = 4096;
const REALIZATIONS_PER_CHUNK: usize = 16;

/// Random generator for chunk `stream` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    /// Bound on the deterministic bias of each sample (quadrature error);
    /// zero for plain sampling.
    #[serde(default)]
    pub discretization: f64,
}

impl McEstimate {
    /// Distance from `target`, beyond the discretization bound, in units of
    /// the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = ((self.mean - target).abs() - self.discretization).max(0.0);
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }

    /// True when `target` lies within `sigmas` standard errors plus the
    /// discretization bound (and a few ulps) of the estimate.
    pub fn agrees_with(&self, target: f64, sigmas: f64) -> bool {
        let slack = 4.0 * f64::EPSILON * target.abs().max(self.mean.abs());
        (self.mean - target).abs() <= sigmas * self.stderr + self.discretization + slack
    }
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(a: Self, b: Self) -> Self {
        if a.n == 0 {
            return b;
        }
        if b.n == 0 {
            return a;
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        Self {
            n,
            mean: a.mean + d * b.n as f64 / n as f64,
            m2: a.m2 + b.m2 + d * d * (a.n as f64 * b.n as f64 / n as f64),
        }
    }

    /// Pairwise reduction in index order.
    fn reduce(parts: &[Self]) -> Self {
        match parts.len() {
            0 => Self::default(),
            1 => parts[0],
            n => Self::merge(Self::reduce(&parts[..n / 2]), Self::reduce(&parts[n / 2..])),
        }
    }

    fn estimate(self) -> McEstimate {
        let var = if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        };
        McEstimate {
            mean: self.mean,
            stderr: (var / self.n as f64).sqrt(),
            samples: self.n,
            discretization: 0.0,
        }
    }
}

/// Runs `chunk(c, n)` for consecutive chunks of at most `per_chunk` samples.
/// Each chunk returns the moments of its samples and of their bias bounds.
fn run_chunks<F>(samples: usize, per_chunk: usize, exec: Execution, chunk: F) -> Result<McEstimate>
where
    F: Fn(usize, usize) -> Result<(Moments, Moments)> + Send + Sync,
{
    let chunks = samples.div_ceil(per_chunk);
    let parts = map_indexed(chunks, exec, |c| {
        chunk(c, per_chunk.min(samples - c * per_chunk))
    });
    let parts: Vec<(Moments, Moments)> = parts.into_iter().collect::<Result<_>>()?;
    let values: Vec<Moments> = parts.iter().map(|p| p.0).collect();
    let bias: Vec<Moments> = parts.iter().map(|p| p.1).collect();
    let mut est = Moments::reduce(&values).estimate();
    est.discretization = Moments::reduce(&bias).mean;
    Ok(est)
}

/// One draw of the jitter entering the phase-sensitive term at delay `τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterSample {
    /// `νi − νj` in Hz.
    pub delta_nu_sample: f64,
    /// Accumulated phase `φi(t0+τ) − φi(t0)`.
    pub phase_increment_i: f64,
    pub phase_increment_j: f64,
}

struct JitterSampler {
    nu_i: Normal<f64>,
    nu_j: Normal<f64>,
    phi_i: Normal<f64>,
    phi_j: Normal<f64>,
}

impl JitterSampler {
    fn new(pair: &PhotonPair, tau: f64) -> Result<Self> {
        let (a, b) = (pair.emitter_i(), pair.emitter_j());
        let normal = |mean: f64, sd: f64| {
            Normal::new(mean, sd).map_err(|e| Error::InvalidParameter(e.to_string()))
        };
        Ok(Self {
            nu_i: normal(a.detuning(), a.sigma())?,
            nu_j: normal(b.detuning(), b.sigma())?,
            phi_i: normal(0.0, (2.0 * a.dephasing_rate() * tau.abs()).sqrt())?,
            phi_j: normal(0.0, (2.0 * b.dephasing_rate() * tau.abs()).sqrt())?,
        })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> JitterSample {
        JitterSample {
            delta_nu_sample: self.nu_i.sample(rng) - self.nu_j.sample(rng),
            phase_increment_i: self.phi_i.sample(rng),
            phase_increment_j: self.phi_j.sample(rng),
        }
    }
}

/// Monte-Carlo estimate of `⟨2 cos(2πΔν τ + Δφi − Δφj − Φ_U)⟩`.
pub fn mc_averaged_phase_factor(
    pair: &PhotonPair,
    gate_phase: f64,
    tau: f64,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    mc_averaged_phase_factor_with(pair, gate_phase, tau, trials, seed, Execution::default())
}

pub fn mc_averaged_phase_factor_with(
    pair: &PhotonPair,
    gate_phase: f64,
    tau: f64,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<McEstimate> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidParameter(format!(
            "{trials} trials; at least {MIN_TRIALS} required"
        )));
    }
    if !tau.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "delay {tau} must be finite"
        )));
    }
    let sampler = JitterSampler::new(pair, tau)?;
    run_chunks(trials, TRIALS_PER_CHUNK, exec, |c, n| {
        let mut rng = stream_rng(seed, c as u64);
        let mut m = Moments::default();
        for _ in 0..n {
            let s = sampler.sample(&mut rng);
            let arg = 2.0 * PI * s.delta_nu_sample * tau + s.phase_increment_i
                - s.phase_increment_j
                - gate_phase;
            m.push(2.0 * arg.cos());
        }
        Ok((m, Moments::default()))
    })
}

/// `p_coinc` by adaptive integration of the closed-form `G²(τ)` over τ,
/// split at the origin and truncated at 40 times the slowest decay time.
pub fn quadrature_p_coinc(u: &GateMatrix, modes: Modes, pair: &PhotonPair) -> Result<f64> {
    modes.validate(u.dim())?;
    let scale = decay_scale(pair);
    let q = Integrator::new(1e-10);
    // Integrate in units of the decay scale so the tolerance is absolute in p.
    let g = |s: f64| -> f64 { g2_value(u, modes, pair, s * scale).unwrap_or(f64::NAN) * scale };
    Ok(q.integrate(g, f64::NEG_INFINITY, 0.0)? + q.integrate(g, 0.0, f64::INFINITY)?)
}

fn decay_scale(pair: &PhotonPair) -> f64 {
    let (a, b) = (pair.emitter_i(), pair.emitter_j());
    a.lifetime().max(b.lifetime()).max(1.0 / pair.gamma())
}

/// `G²(τ) = ∫ P_joint(t0, τ) dt0` for deterministic wave functions, by
/// adaptive quadrature split where either packet switches on.
pub fn g2_from_wavefunctions<A: WaveFunction, B: WaveFunction>(
    u: &GateMatrix,
    modes: Modes,
    zeta_i: &Normalized<A>,
    zeta_j: &Normalized<B>,
    tau: f64,
) -> Result<f64> {
    modes.validate(u.dim())?;
    let scale = zeta_i
        .inner()
        .decay_scale()
        .max(zeta_j.inner().decay_scale());
    let q = Integrator::new(1e-11);
    // Dimensionless integrand: G²·scale is of order one.
    let f = |s: f64| {
        joint_density(u, modes, zeta_i.inner(), zeta_j.inner(), s * scale, tau) * scale * scale
    };
    let start = 0.0f64.max(-tau) / scale;
    Ok(q.integrate(f, start, f64::INFINITY)? / scale)
}

/// Piecewise-linear phase trajectory sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct SampledPhase {
    step: f64,
    values: Vec<f64>,
}

impl SampledPhase {
    /// Wiener path with `φ(0) = 0` and increments of variance `2Γ* h`.
    pub fn wiener<R: Rng>(rate: f64, step: f64, nodes: usize, rng: &mut R) -> Self {
        let sd = (2.0 * rate * step).sqrt();
        let mut values = Vec::with_capacity(nodes);
        let mut phi = 0.0;
        for _ in 0..nodes {
            values.push(phi);
            if sd > 0.0 {
                let z: f64 = StandardNormal.sample(rng);
                phi += sd * z;
            }
        }
        Self { step, values }
    }
}

impl PhaseTrajectory for SampledPhase {
    fn phase(&self, t: f64) -> f64 {
        let x = (t / self.step).max(0.0);
        let k = x.floor() as usize;
        match (self.values.get(k), self.values.get(k + 1)) {
            (Some(&a), Some(&b)) => a + (b - a) * (x - k as f64),
            (Some(&a), None) => a,
            _ => *self.values.last().unwrap_or(&0.0),
        }
    }
}

/// Discretization of the jittered `G²(τ)` estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathIntegralConfig {
    pub realizations: usize,
    /// Grid nodes per `T+` (the decay time of the integrand in t0).
    pub steps_per_decay: usize,
    /// Integration range in units of `T+`.
    pub truncation: f64,
    pub seed: u64,
}

impl Default for PathIntegralConfig {
    fn default() -> Self {
        Self {
            realizations: 2000,
            steps_per_decay: 40,
            truncation: 40.0,
            seed: 0,
        }
    }
}

/// `G²(τ)` averaged over jitter realizations: each realization draws carrier
/// frequencies from the Gaussian inhomogeneous lines and Wiener phase paths,
/// then integrates `P_joint(t0, τ)` over t0 by composite Simpson on a grid
/// commensurate with `τ`, Richardson-extrapolated against the rule on every
/// other node. `|S_h − S_2h| / 15`, the error of the unextrapolated rule, is
/// reported as the estimate's discretization bound.
pub fn quadrature_g2(
    u: &GateMatrix,
    modes: Modes,
    pair: &PhotonPair,
    tau: f64,
    cfg: &PathIntegralConfig,
) -> Result<McEstimate> {
    quadrature_g2_with(u, modes, pair, tau, cfg, Execution::default())
}

pub fn quadrature_g2_with(
    u: &GateMatrix,
    modes: Modes,
    pair: &PhotonPair,
    tau: f64,
    cfg: &PathIntegralConfig,
    exec: Execution,
) -> Result<McEstimate> {
    modes.validate(u.dim())?;
    if cfg.realizations < 2
        || cfg.steps_per_decay < 2
        || cfg.truncation.is_nan()
        || cfg.truncation <= 0.0
    {
        return Err(Error::InvalidParameter(format!(
            "unusable path-integral settings {cfg:?}"
        )));
    }
    if !tau.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "delay {tau} must be finite"
        )));
    }
    let t_plus = pair.t_plus();
    let mut step = t_plus / cfg.steps_per_decay as f64;
    let lag = if tau == 0.0 {
        0
    } else {
        let m = (tau.abs() / step).ceil() as usize;
        step = tau.abs() / m as f64;
        m
    };
    // A multiple of four so that every other node also forms a Simpson grid.
    let intervals = (cfg.truncation * t_plus / step / 4.0).ceil() as usize * 4;
    let start = if tau < 0.0 { lag } else { 0 };
    // The delay as represented on the grid. For τ < 0 the first node must sit
    // exactly where the delayed packet switches on; `lag·h + τ` can round to
    // a tiny negative time and silently drop that node.
    let tau_grid = if tau < 0.0 { -(lag as f64 * step) } else { tau };
    let nodes = start + intervals + 1 + if tau > 0.0 { lag } else { 0 };

    let (a, b) = (pair.emitter_i(), pair.emitter_j());
    let nu_i =
        Normal::new(a.detuning(), a.sigma()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let nu_j =
        Normal::new(b.detuning(), b.sigma()).map_err(|e| Error::InvalidParameter(e.to_string()))?;

    run_chunks(cfg.realizations, REALIZATIONS_PER_CHUNK, exec, |c, n| {
        let mut rng = stream_rng(cfg.seed, c as u64);
        let mut m = Moments::default();
        let mut bias = Moments::default();
        let mut density = vec![0.0; intervals + 1];
        for _ in 0..n {
            let zi = ExponentialPacket {
                lifetime: a.lifetime(),
                frequency: nu_i.sample(&mut rng),
                phase: SampledPhase::wiener(a.dephasing_rate(), step, nodes, &mut rng),
            };
            let zj = ExponentialPacket {
                lifetime: b.lifetime(),
                frequency: nu_j.sample(&mut rng),
                phase: SampledPhase::wiener(b.dephasing_rate(), step, nodes, &mut rng),
            };
            for (k, d) in density.iter_mut().enumerate() {
                *d = joint_density(u, modes, &zi, &zj, (start + k) as f64 * step, tau_grid);
            }
            let fine = simpson(&density, step);
            let coarse = simpson(
                &density.iter().step_by(2).copied().collect::<Vec<_>>(),
                2.0 * step,
            );
            bias.push((fine - coarse).abs() / 15.0);
            m.push(fine + (fine - coarse) / 15.0);
        }
        Ok((m, bias))
    })
}

/// Composite Simpson rule over equally spaced samples (even interval count).
fn simpson(values: &[f64], step: f64) -> f64 {
    let last = values.len() - 1;
    let inner: f64 = values[1..last]
        .iter()
        .enumerate()
        .map(|(k, v)| if k % 2 == 0 { 4.0 * v } else { 2.0 * v })
        .sum();
    (values[0] + values[last] + inner) * step / 3.0
}

/// Haar-random `dim × dim` unitary (Gram–Schmidt on a complex Gaussian
/// matrix).
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> Result<GateMatrix> {
    if dim == 0 {
        return Err(Error::InvalidParameter(
            "unitary dimension must be >= 1".into(),
        ));
    }
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        // Two passes of modified Gram–Schmidt keep orthogonality at 1e-15.
        for _ in 0..2 {
            for c in &cols {
                let proj: Complex64 = c.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (y, x) in v.iter_mut().zip(c) {
                    *y -= proj * x;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let elements = (0..dim * dim)
        .map(|idx| cols[idx % dim][idx / dim])
        .collect();
    GateMatrix::new(dim, elements, 1e-12)
}

/// Random emitter pair spanning the parameter ranges of solid-state sources:
/// lifetimes 0.1–2 ns, Γ* up to 2 GHz, σ′ up to 3 GHz (zero with
/// probability 1/4), δν within ±3 GHz.
pub fn random_pair<R: Rng>(rng: &mut R) -> Result<PhotonPair> {
    let emitter = |rng: &mut R| -> Result<EmitterParams> {
        let lifetime = rng.random_range(100e-12..2e-9);
        let dephasing = rng.random_range(0.0..2e9);
        let fwhm = if rng.random_bool(0.25) {
            0.0
        } else {
            rng.random_range(0.0..3e9)
        };
        let detuning = rng.random_range(-3e9..3e9);
        EmitterParams::new(lifetime, dephasing, fwhm, detuning)
    };
    Ok(PhotonPair::new(emitter(rng)?, emitter(rng)?))
}

/// Random distinct `(i, j)` inputs and distinct `(k, l)` outputs.
pub fn random_modes<R: Rng>(dim: usize, rng: &mut R) -> Result<Modes> {
    if dim < 2 {
        return Err(Error::InvalidParameter("need at least two modes".into()));
    }
    let distinct = |rng: &mut R| {
        let a = rng.random_range(0..dim);
        let b = (a + rng.random_range(1..dim)) % dim;
        (a, b)
    };
    let (i, j) = distinct(rng);
    let (k, l) = distinct(rng);
    Ok(Modes::new(i, j, k, l))
}
