//! Two-photon interference through a linear optical gate.
//!
//! Photons from emitters `i` and `j` enter inputs `i`, `j`; coincidences are
//! recorded between outputs `k` and `l`. The averaged cross-correlation is
//! `G²(τ) = G₀²(τ) + G_int²(τ)`, and its integral is the coincidence
//! probability, whose interference part follows a Voigt profile in the
//! detuning and is evaluated through `Re w(z)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use crate::emitter::{EmitterParams, PhotonPair};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, map_slice, Execution};
use crate::gates::{beam_splitter, gate_quad, GateMatrix, GateQuad, Modes};
use crate::numerics::{faddeeva_w, Integrator};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Below this value of `Σ·(τi + τj)` the Lorentzian (pure-dephasing) closed
/// form replaces the Faddeeva expression, whose `1/Σ` prefactor is singular.
pub const SIGMA_LIMIT_THRESHOLD: f64 = 1e-6;

/// Half-width of the default τ grid in units of the longer lifetime.
pub const DEFAULT_TAU_SPAN: f64 = 10.0;
pub const DEFAULT_TAU_POINTS: usize = 4001;

/// A single-photon field mode `ζ(t)`.
pub trait WaveFunction {
    fn amplitude(&self, t: f64) -> Complex64;
    /// Time scale over which `|ζ|²` decays; bounds numerical integration.
    fn decay_scale(&self) -> f64;
}

/// Pure-dephasing phase trajectory `φ(t)`.
pub trait PhaseTrajectory {
    fn phase(&self, t: f64) -> f64;
}

/// No phase noise.
#[derive(Debug, Clone, Copy, Default)]
pub struct Coherent;

impl PhaseTrajectory for Coherent {
    fn phase(&self, _t: f64) -> f64 {
        0.0
    }
}

/// `ζ(t) = H(t)/√τ · exp(−t/2τ − i[2πνt + φ(t)])`.
#[derive(Debug, Clone)]
pub struct ExponentialPacket<P = Coherent> {
    pub lifetime: f64,
    pub frequency: f64,
    pub phase: P,
}

impl ExponentialPacket<Coherent> {
    pub fn coherent(lifetime: f64, frequency: f64) -> Self {
        Self {
            lifetime,
            frequency,
            phase: Coherent,
        }
    }
}

impl<P: PhaseTrajectory> WaveFunction for ExponentialPacket<P> {
    fn amplitude(&self, t: f64) -> Complex64 {
        if t < 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let arg = 2.0 * PI * self.frequency * t + self.phase.phase(t);
        Complex64::from_polar(
            (-0.5 * t / self.lifetime).exp() / self.lifetime.sqrt(),
            -arg,
        )
    }

    fn decay_scale(&self) -> f64 {
        self.lifetime
    }
}

impl<W: WaveFunction + ?Sized> WaveFunction for &W {
    fn amplitude(&self, t: f64) -> Complex64 {
        (**self).amplitude(t)
    }

    fn decay_scale(&self) -> f64 {
        (**self).decay_scale()
    }
}

/// A wave function whose norm has been checked to lie within 1e-8 of one.
#[derive(Debug, Clone)]
pub struct Normalized<W>(W);

impl<W: WaveFunction> Normalized<W> {
    pub fn new(wave: W) -> Result<Self> {
        let scale = wave.decay_scale();
        let q = Integrator::new(1e-11).decay_scale(scale);
        let density = |t: f64| wave.amplitude(t).norm_sqr() * scale;
        // Split at the origin, where packets typically switch on.
        let norm = (q.integrate(density, f64::NEG_INFINITY, 0.0)?
            + q.integrate(density, 0.0, f64::INFINITY)?)
            / scale;
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::Unnormalized { norm });
        }
        Ok(Self(wave))
    }

    pub fn inner(&self) -> &W {
        &self.0
    }
}

/// Joint density of detections in output `k` at `t0` and output `l` at
/// `t0 + τ`:
/// `|U_li U_kj ζi(t0+τ)ζj(t0) + U_lj U_ki ζj(t0+τ)ζi(t0)|²`.
pub fn joint_detection_probability<A: WaveFunction, B: WaveFunction>(
    u: &GateMatrix,
    modes: Modes,
    zeta_i: &Normalized<A>,
    zeta_j: &Normalized<B>,
    t0: f64,
    tau: f64,
) -> Result<f64> {
    modes.validate(u.dim())?;
    Ok(joint_density(u, modes, &zeta_i.0, &zeta_j.0, t0, tau))
}

pub(crate) fn joint_density<A: WaveFunction, B: WaveFunction>(
    u: &GateMatrix,
    modes: Modes,
    zeta_i: &A,
    zeta_j: &B,
    t0: f64,
    tau: f64,
) -> f64 {
    let Modes { i, j, k, l } = modes;
    let direct = u.get(l, i) * u.get(k, j) * zeta_i.amplitude(t0 + tau) * zeta_j.amplitude(t0);
    let exchange = u.get(l, j) * u.get(k, i) * zeta_j.amplitude(t0 + tau) * zeta_i.amplitude(t0);
    (direct + exchange).norm_sqr()
}

/// Ensemble average of the phase-sensitive term,
/// `2 exp[−(Γ*i + Γ*j)|τ| − 2π²Σ²τ²] cos(2πδντ − Φ_U)`.
pub fn averaged_phase_factor(pair: &PhotonPair, gate_phase: f64, tau: f64) -> f64 {
    let dephasing = pair.emitter_i().dephasing_rate() + pair.emitter_j().dephasing_rate();
    let envelope =
        (-dephasing * tau.abs() - 2.0 * PI * PI * pair.sigma_squared() * tau * tau).exp();
    2.0 * envelope * (2.0 * PI * pair.delta_nu() * tau - gate_phase).cos()
}

/// Sampled cross-correlation function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTrace {
    /// Delays in seconds, strictly increasing.
    pub tau_grid: Vec<f64>,
    /// `G²(τ)` in 1/s.
    pub g2_values: Vec<f64>,
    /// `G₀²(τ)`, the fully distinguishable reference, in 1/s.
    pub g2_distinguishable: Vec<f64>,
}

/// `G₀²(τ)` and `G_int²(τ)` at a single delay.
///
/// The Heaviside step is taken as 1/2 at the origin, which makes `G₀²`
/// continuous there.
pub fn g2_components(quad: &GateQuad, pair: &PhotonPair, tau: f64) -> (f64, f64) {
    let ti = pair.emitter_i().lifetime();
    let tj = pair.emitter_j().lifetime();
    let step = |x: f64| {
        if x > 0.0 {
            1.0
        } else if x < 0.0 {
            0.0
        } else {
            0.5
        }
    };
    let (a, b) = quad.p0_terms;
    let sum = ti + tj;
    let g0 = (a * (step(tau) * (-tau / ti).exp() + step(-tau) * (tau / tj).exp())
        + b * (step(tau) * (-tau / tj).exp() + step(-tau) * (tau / ti).exp()))
        / sum;
    let envelope =
        (-pair.gamma() * tau.abs() - 2.0 * PI * PI * pair.sigma_squared() * tau * tau).exp();
    let g_int = 2.0 * quad.magnitude / sum
        * envelope
        * (2.0 * PI * pair.delta_nu() * tau - quad.phase).cos();
    (g0, g_int)
}

/// `G²(τ)` for a single delay.
pub fn g2_value(u: &GateMatrix, modes: Modes, pair: &PhotonPair, tau: f64) -> Result<f64> {
    let quad = gate_quad(u, modes)?;
    let (g0, gi) = g2_components(&quad, pair, tau);
    Ok(g0 + gi)
}

/// Symmetric grid of `DEFAULT_TAU_POINTS` delays spanning ±10 of the longer
/// lifetime.
pub fn default_tau_grid(pair: &PhotonPair) -> Vec<f64> {
    let span = DEFAULT_TAU_SPAN * pair.emitter_i().lifetime().max(pair.emitter_j().lifetime());
    linspace(-span, span, DEFAULT_TAU_POINTS)
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let mid = (n - 1) as f64 / 2.0;
            (0..n)
                .map(|k| {
                    let t = k as f64 / (n - 1) as f64;
                    // Exact zero at the centre of symmetric grids.
                    if lo == -hi && k as f64 == mid {
                        0.0
                    } else {
                        lo + t * (hi - lo)
                    }
                })
                .collect()
        }
    }
}

/// Evaluates `G²(τ)` and `G₀²(τ)` on a delay grid.
pub fn g2_trace(
    u: &GateMatrix,
    modes: Modes,
    pair: &PhotonPair,
    tau_grid: &[f64],
) -> Result<CorrelationTrace> {
    let quad = gate_quad(u, modes)?;
    if tau_grid.is_empty() {
        return Err(Error::InvalidParameter("empty τ grid".into()));
    }
    if tau_grid.windows(2).any(|w| w[1] <= w[0]) || tau_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter(
            "τ grid must be finite and strictly increasing".into(),
        ));
    }
    let (g2_values, g2_distinguishable) = tau_grid
        .iter()
        .map(|&t| {
            let (g0, gi) = g2_components(&quad, pair, t);
            (g0 + gi, g0)
        })
        .unzip();
    Ok(CorrelationTrace {
        tau_grid: tau_grid.to_vec(),
        g2_values,
        g2_distinguishable,
    })
}

/// `G₀²(τ)`, the correlation of fully distinguishable photons.
pub fn g2_distinguishable(
    u: &GateMatrix,
    modes: Modes,
    pair: &PhotonPair,
    tau: f64,
) -> Result<f64> {
    let quad = gate_quad(u, modes)?;
    Ok(g2_components(&quad, pair, tau).0)
}

/// The normalized interference integral
/// `∫ exp(−γ|τ| − 2π²Σ²τ²) cos(2πδντ) dτ / (τi + τj)`,
/// equal to the HOM visibility of the pair.
///
/// Evaluated as `Re w(z) / (√(2π) Σ (τi+τj))` with
/// `z = (2πδν + iγ) / (2π√2 Σ)`, or in closed Lorentzian form when
/// `Σ(τi+τj)` falls below [`SIGMA_LIMIT_THRESHOLD`].
pub fn interference_factor(pair: &PhotonPair) -> Result<f64> {
    let sum = pair.lifetime_sum();
    let sigma = pair.sigma_total();
    let gamma = pair.gamma();
    let omega = 2.0 * PI * pair.delta_nu();
    if sigma * sum < SIGMA_LIMIT_THRESHOLD {
        return Ok(2.0 * gamma / ((gamma * gamma + omega * omega) * sum));
    }
    let scale = 2.0 * PI * std::f64::consts::SQRT_2 * sigma;
    let w = faddeeva_w(Complex64::new(omega / scale, gamma / scale))?;
    Ok(w.re / (SQRT_2PI * sigma * sum))
}

/// Probability of a coincidence between outputs `k` and `l`:
/// `p0 + 2|Q| cos Φ_U · interference_factor`.
pub fn coincidence_probability(u: &GateMatrix, modes: Modes, pair: &PhotonPair) -> Result<f64> {
    let quad = gate_quad(u, modes)?;
    coincidence_from_quad(&quad, pair)
}

pub fn coincidence_from_quad(quad: &GateQuad, pair: &PhotonPair) -> Result<f64> {
    Ok(quad.p0() + 2.0 * quad.interference_weight() * interference_factor(pair)?)
}

/// Outcome of a two-photon interference measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityResult {
    pub visibility: f64,
    pub p_coinc: f64,
    pub p_coinc_classical: f64,
    pub pair: PhotonPair,
}

/// Visibility `1 − p_coinc / p_coinc,0` of a HOM experiment on a symmetric
/// beam splitter.
pub fn hom_visibility(pair: &PhotonPair) -> Result<VisibilityResult> {
    let bs = beam_splitter(0.5, 0.5)?;
    let quad = gate_quad(&bs, Modes::hom())?;
    let p_coinc = coincidence_from_quad(&quad, pair)?;
    let p0 = quad.p0();
    let visibility = 1.0 - p_coinc / p0;
    if !(-1e-9..=1.0 + 1e-9).contains(&visibility) {
        return Err(Error::VisibilityOutOfRange(visibility));
    }
    Ok(VisibilityResult {
        visibility,
        p_coinc,
        p_coinc_classical: p0,
        pair: *pair,
    })
}

/// HOM visibility without inhomogeneous broadening (Lorentzian tuning curve).
pub fn visibility_pd_only(pair: &PhotonPair) -> Result<f64> {
    if pair.emitter_i().inhomogeneous_fwhm() != 0.0 || pair.emitter_j().inhomogeneous_fwhm() != 0.0
    {
        return Err(Error::InvalidParameter(
            "pure-dephasing limit requires zero inhomogeneous broadening".into(),
        ));
    }
    let ti = pair.emitter_i().lifetime();
    let tj = pair.emitter_j().lifetime();
    let g = 1.0 / ti
        + 1.0 / tj
        + 2.0 * pair.emitter_i().dephasing_rate()
        + 2.0 * pair.emitter_j().dephasing_rate();
    let dn = pair.delta_nu();
    Ok(4.0 / (ti + tj) * g / (g * g + 16.0 * PI * PI * dn * dn))
}

/// HOM visibility at each detuning `δν` of the grid (emitter j kept fixed).
pub fn tuning_curve(pair: &PhotonPair, delta_nu_grid: &[f64]) -> Result<Vec<VisibilityResult>> {
    tuning_curve_with(pair, delta_nu_grid, Execution::default())
}

pub fn tuning_curve_with(
    pair: &PhotonPair,
    delta_nu_grid: &[f64],
    exec: Execution,
) -> Result<Vec<VisibilityResult>> {
    if delta_nu_grid.is_empty() {
        return Err(Error::InvalidParameter("empty detuning grid".into()));
    }
    map_slice(delta_nu_grid, exec, |&dn| {
        hom_visibility(&pair.with_delta_nu(dn))
    })
    .into_iter()
    .collect()
}

/// Identical-emitter HOM visibility in terms of the normalized linewidths.
pub fn normalized_visibility(theta_pd: f64, theta_sd: f64) -> Result<f64> {
    if !(theta_pd >= 1.0 && theta_pd.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "theta_pd {theta_pd} must be >= 1"
        )));
    }
    if !(theta_sd >= 0.0 && theta_sd.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "theta_sd {theta_sd} must be >= 0"
        )));
    }
    // Σ(τi+τj) = ϑ_SD / √ln2 for identical emitters.
    if theta_sd / LN_2.sqrt() < SIGMA_LIMIT_THRESHOLD {
        return Ok(1.0 / theta_pd);
    }
    let z = Complex64::new(0.0, (LN_2 / (2.0 * PI * PI)).sqrt() * theta_pd / theta_sd);
    Ok((2.0 * LN_2 / PI).sqrt() * faddeeva_w(z)?.re / (2.0 * theta_sd))
}

/// Values of a function on a rectangular `(ϑ_PD, ϑ_SD)` grid;
/// `values[a][b]` belongs to `(theta_pd[a], theta_sd[b])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterMap {
    pub theta_pd: Vec<f64>,
    pub theta_sd: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl ParameterMap {
    pub(crate) fn evaluate<F>(
        theta_pd: &[f64],
        theta_sd: &[f64],
        exec: Execution,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<f64> + Send + Sync,
    {
        if theta_pd.is_empty() || theta_sd.is_empty() {
            return Err(Error::InvalidParameter("empty parameter grid".into()));
        }
        let cols = theta_sd.len();
        let flat = map_indexed(theta_pd.len() * cols, exec, |idx| {
            f(theta_pd[idx / cols], theta_sd[idx % cols])
        });
        let flat: Vec<f64> = flat.into_iter().collect::<Result<_>>()?;
        Ok(Self {
            theta_pd: theta_pd.to_vec(),
            theta_sd: theta_sd.to_vec(),
            values: flat.chunks(cols).map(|c| c.to_vec()).collect(),
        })
    }
}

pub fn visibility_map(theta_pd: &[f64], theta_sd: &[f64]) -> Result<ParameterMap> {
    visibility_map_with(theta_pd, theta_sd, Execution::default())
}

pub fn visibility_map_with(
    theta_pd: &[f64],
    theta_sd: &[f64],
    exec: Execution,
) -> Result<ParameterMap> {
    ParameterMap::evaluate(theta_pd, theta_sd, exec, normalized_visibility)
}

/// `ϑ_SD` of a dephasing-free emitter (`ϑ_PD = 1`) with normalized coherence
/// time `x_c`.
pub fn theta_sd_without_dephasing(x_c: f64) -> Result<f64> {
    if !(x_c > 0.0 && x_c <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "x_c {x_c} must lie in (0, 1]"
        )));
    }
    // τr = 1, Γh = 1/2: σ′² = (1/τc − Γh)·4 ln2 / (π² τc) with τc = 2x_c.
    let tc = 2.0 * x_c;
    Ok(((1.0 / tc - 0.5).max(0.0) * 4.0 * LN_2 / (PI * PI * tc)).sqrt())
}

/// `V_noPD(x_c)`: visibility of purely inhomogeneously broadened emitters.
pub fn visibility_without_dephasing(x_c: f64) -> Result<f64> {
    normalized_visibility(1.0, theta_sd_without_dephasing(x_c)?)
}

/// `V_noSD(x_c)`: visibility of purely dephasing emitters, equal to `x_c`.
pub fn visibility_without_diffusion(x_c: f64) -> Result<f64> {
    if !(x_c > 0.0 && x_c <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "x_c {x_c} must lie in (0, 1]"
        )));
    }
    normalized_visibility(1.0 / x_c, 0.0)
}

/// Identical pair built from normalized linewidths at lifetime `lifetime`.
pub fn identical_pair(theta_pd: f64, theta_sd: f64, lifetime: f64) -> Result<PhotonPair> {
    let e = crate::emitter::NormalizedParams::new(theta_pd, theta_sd)?.to_emitter(lifetime)?;
    Ok(PhotonPair::identical(e))
}

#[doc(hidden)]
pub fn fourier_limited_pair(lifetime: f64) -> Result<PhotonPair> {
    Ok(PhotonPair::identical(EmitterParams::fourier_limited(
        lifetime,
    )?))
}
