//! Emitter parameterization, coherence time and linewidth decomposition.
//!
//! All quantities are SI: lifetimes in seconds, the pure-dephasing rate
//! `Γ*` as an exponential decay rate in 1/s, linewidths and detunings in Hz.
//! A homogeneous rate `Γh = 1/(2τr) + Γ*` corresponds to a Lorentzian line of
//! FWHM `Γh/π`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::numerics::voigt_fwhm;

/// `σ′ / σ` for a Gaussian line.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

/// Default number of samples on a decomposition curve.
pub const DEFAULT_CURVE_POINTS: usize = 200;

/// Spectral and temporal parameters of one emitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterParams {
    lifetime: f64,
    dephasing_rate: f64,
    inhomogeneous_fwhm: f64,
    detuning: f64,
}

impl EmitterParams {
    pub fn new(
        lifetime: f64,
        dephasing_rate: f64,
        inhomogeneous_fwhm: f64,
        detuning: f64,
    ) -> Result<Self> {
        if !(lifetime > 0.0 && lifetime.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lifetime {lifetime} s must be finite and > 0"
            )));
        }
        if !(dephasing_rate >= 0.0 && dephasing_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dephasing rate {dephasing_rate} must be finite and >= 0"
            )));
        }
        if !(inhomogeneous_fwhm >= 0.0 && inhomogeneous_fwhm.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "inhomogeneous FWHM {inhomogeneous_fwhm} must be finite and >= 0"
            )));
        }
        if !detuning.is_finite() {
            return Err(Error::InvalidParameter("detuning must be finite".into()));
        }
        Ok(Self {
            lifetime,
            dephasing_rate,
            inhomogeneous_fwhm,
            detuning,
        })
    }

    /// A lifetime-limited emitter at zero detuning.
    pub fn fourier_limited(lifetime: f64) -> Result<Self> {
        Self::new(lifetime, 0.0, 0.0, 0.0)
    }

    pub fn lifetime(&self) -> f64 {
        self.lifetime
    }

    pub fn dephasing_rate(&self) -> f64 {
        self.dephasing_rate
    }

    pub fn inhomogeneous_fwhm(&self) -> f64 {
        self.inhomogeneous_fwhm
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    /// Standard deviation of the carrier-frequency distribution.
    pub fn sigma(&self) -> f64 {
        self.inhomogeneous_fwhm / FWHM_PER_SIGMA
    }

    /// `Γh = 1/(2τ) + Γ*`, the coherence decay rate of the field amplitude.
    pub fn homogeneous_rate(&self) -> f64 {
        0.5 / self.lifetime + self.dephasing_rate
    }

    /// FWHM of the homogeneous (Lorentzian) line, `Γh/π`.
    pub fn lorentzian_fwhm(&self) -> f64 {
        self.homogeneous_rate() / PI
    }

    pub fn coherence_time(&self) -> f64 {
        coherence_time_homogeneous(self.homogeneous_rate(), self.inhomogeneous_fwhm)
    }

    /// FWHM of the full Voigt emission line.
    pub fn voigt_linewidth(&self) -> Result<f64> {
        voigt_fwhm(self.sigma(), 0.5 * self.lorentzian_fwhm())
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn with_dephasing_rate(self, rate: f64) -> Result<Self> {
        Self::new(self.lifetime, rate, self.inhomogeneous_fwhm, self.detuning)
    }

    pub fn with_inhomogeneous_fwhm(self, fwhm: f64) -> Result<Self> {
        Self::new(self.lifetime, self.dephasing_rate, fwhm, self.detuning)
    }
}

/// The two photons entering the gate; joint quantities are always derived on
/// demand from the emitters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonPair {
    emitter_i: EmitterParams,
    emitter_j: EmitterParams,
}

impl PhotonPair {
    pub fn new(emitter_i: EmitterParams, emitter_j: EmitterParams) -> Self {
        Self {
            emitter_i,
            emitter_j,
        }
    }

    /// Two copies of the same emitter.
    pub fn identical(emitter: EmitterParams) -> Self {
        Self::new(emitter, emitter)
    }

    pub fn emitter_i(&self) -> &EmitterParams {
        &self.emitter_i
    }

    pub fn emitter_j(&self) -> &EmitterParams {
        &self.emitter_j
    }

    /// `Σ² = σi² + σj²`.
    pub fn sigma_squared(&self) -> f64 {
        self.emitter_i.sigma().powi(2) + self.emitter_j.sigma().powi(2)
    }

    pub fn sigma_total(&self) -> f64 {
        self.emitter_i.sigma().hypot(self.emitter_j.sigma())
    }

    /// `γ = γi + γj`.
    pub fn gamma(&self) -> f64 {
        self.emitter_i.homogeneous_rate() + self.emitter_j.homogeneous_rate()
    }

    /// Mean carrier-frequency offset `δν = νi − νj`.
    pub fn delta_nu(&self) -> f64 {
        self.emitter_i.detuning - self.emitter_j.detuning
    }

    /// `T+` with `1/T+ = 1/τi + 1/τj`.
    pub fn t_plus(&self) -> f64 {
        1.0 / (1.0 / self.emitter_i.lifetime + 1.0 / self.emitter_j.lifetime)
    }

    pub fn lifetime_sum(&self) -> f64 {
        self.emitter_i.lifetime + self.emitter_j.lifetime
    }

    /// Same pair with the relative detuning set to `delta_nu` (carried by
    /// emitter i).
    pub fn with_delta_nu(&self, delta_nu: f64) -> Self {
        Self {
            emitter_i: self
                .emitter_i
                .with_detuning(self.emitter_j.detuning + delta_nu),
            emitter_j: self.emitter_j,
        }
    }
}

/// Linewidths normalized to the radiative lifetime, for identical emitters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedParams {
    /// `ϑ_PD = γ·τr`
    pub theta_pd: f64,
    /// `ϑ_SD = σ′·τr`
    pub theta_sd: f64,
    /// `x_c = τc / 2τr`
    pub x_c: f64,
}

impl NormalizedParams {
    pub fn new(theta_pd: f64, theta_sd: f64) -> Result<Self> {
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
        // With τr = 1: Γh = ϑ_PD / 2 and σ′ = ϑ_SD.
        let x_c = 0.5 * coherence_time_homogeneous(0.5 * theta_pd, theta_sd);
        Ok(Self {
            theta_pd,
            theta_sd,
            x_c,
        })
    }

    /// The emitter with these normalized linewidths and the given lifetime.
    pub fn to_emitter(&self, lifetime: f64) -> Result<EmitterParams> {
        let dephasing = ((self.theta_pd - 1.0) / (2.0 * lifetime)).max(0.0);
        EmitterParams::new(lifetime, dephasing, self.theta_sd / lifetime, 0.0)
    }
}

/// Normalized parameters of an identical-emitter pair built from `emitter`.
pub fn normalized_params(emitter: &EmitterParams) -> NormalizedParams {
    let tr = emitter.lifetime;
    NormalizedParams {
        theta_pd: (2.0 * emitter.dephasing_rate + 1.0 / tr) * tr,
        theta_sd: emitter.inhomogeneous_fwhm * tr,
        x_c: emitter.coherence_time() / (2.0 * tr),
    }
}

/// Coherence time of an emitter with lifetime `lifetime`, pure-dephasing rate
/// `dephasing_rate` and inhomogeneous FWHM `inhomogeneous_fwhm`.
pub fn coherence_time(lifetime: f64, dephasing_rate: f64, inhomogeneous_fwhm: f64) -> Result<f64> {
    Ok(EmitterParams::new(lifetime, dephasing_rate, inhomogeneous_fwhm, 0.0)?.coherence_time())
}

/// Coherence time from the homogeneous rate `Γh` and the Gaussian FWHM `σ′`.
///
/// Evaluated as `b / (a + sqrt(a² + b))`, which is the positive root of
/// `τc² + 2aτc − b = 0` without the cancellation of the textbook form.
pub fn coherence_time_homogeneous(gamma_h: f64, inhomogeneous_fwhm: f64) -> f64 {
    if inhomogeneous_fwhm == 0.0 {
        return 1.0 / gamma_h;
    }
    let s2 = inhomogeneous_fwhm * inhomogeneous_fwhm;
    let a = 2.0 * LN_2 / (PI * PI) * gamma_h / s2;
    let b = 4.0 * LN_2 / (PI * PI * s2);
    b / (a + (a * a + b).sqrt())
}

/// One point on a decomposition curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinewidthPair {
    pub dephasing_rate: f64,
    pub inhomogeneous_fwhm: f64,
}

impl LinewidthPair {
    pub fn emitter(&self, lifetime: f64) -> Result<EmitterParams> {
        EmitterParams::new(lifetime, self.dephasing_rate, self.inhomogeneous_fwhm, 0.0)
    }
}

/// `0` followed by `n − 1` log-spaced samples up to `max` (inclusive).
fn curve_abscissae(max: f64, n: usize) -> Vec<f64> {
    const DYNAMIC_RANGE: f64 = 1e-4;
    let mut xs = Vec::with_capacity(n);
    xs.push(0.0);
    if n < 2 {
        return xs;
    }
    let m = n - 1;
    let lo = (max * DYNAMIC_RANGE).ln();
    let hi = max.ln();
    for k in 0..m {
        let t = if m == 1 {
            1.0
        } else {
            k as f64 / (m - 1) as f64
        };
        xs.push((lo + t * (hi - lo)).exp());
    }
    *xs.last_mut().unwrap() = max;
    xs
}

/// All `(Γ*, σ′)` combinations that reproduce the coherence time `tau_c` for
/// an emitter of the given lifetime.
///
/// The curve runs from `(Γ*_max, 0)` to `(0, σ′_max)`.
pub fn decompose_linewidth(lifetime: f64, tau_c: f64, points: usize) -> Result<Vec<LinewidthPair>> {
    if !(lifetime > 0.0 && lifetime.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lifetime {lifetime} must be > 0"
        )));
    }
    if !(tau_c > 0.0 && tau_c.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "coherence time {tau_c} must be > 0"
        )));
    }
    let fourier = 2.0 * lifetime;
    if tau_c > fourier * (1.0 + 1e-12) {
        return Err(Error::Infeasible(format!(
            "coherence time {tau_c:e} s exceeds the Fourier limit 2τr = {fourier:e} s"
        )));
    }
    let excess = 1.0 / tau_c - 0.5 / lifetime;
    if excess <= 1e-12 / tau_c || points < 2 {
        return Ok(vec![LinewidthPair {
            dephasing_rate: excess.max(0.0),
            inhomogeneous_fwhm: 0.0,
        }]);
    }
    let sigma_max = (4.0 * LN_2 * excess / (PI * PI * tau_c)).sqrt();
    let pairs = curve_abscissae(sigma_max, points)
        .into_iter()
        .enumerate()
        .map(|(idx, s)| {
            let dephasing = if idx == points - 1 {
                0.0
            } else {
                // Γh(τc, σ′) = 1/τc − π²σ′²τc / (4 ln 2)
                let gamma_h = 1.0 / tau_c - PI * PI * s * s * tau_c / (4.0 * LN_2);
                (gamma_h - 0.5 / lifetime).max(0.0)
            };
            LinewidthPair {
                dephasing_rate: dephasing,
                inhomogeneous_fwhm: s,
            }
        })
        .collect();
    Ok(pairs)
}

/// All `(Γ*, σ′)` combinations whose Voigt line has FWHM `total_fwhm`.
pub fn decompose_voigt_fwhm(
    lifetime: f64,
    total_fwhm: f64,
    points: usize,
) -> Result<Vec<LinewidthPair>> {
    decompose_voigt_fwhm_with(lifetime, total_fwhm, points, Execution::default())
}

pub fn decompose_voigt_fwhm_with(
    lifetime: f64,
    total_fwhm: f64,
    points: usize,
    exec: Execution,
) -> Result<Vec<LinewidthPair>> {
    if !(lifetime > 0.0 && lifetime.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lifetime {lifetime} must be > 0"
        )));
    }
    let fourier_fwhm = 1.0 / (2.0 * PI * lifetime);
    if !(total_fwhm.is_finite()) || total_fwhm < fourier_fwhm * (1.0 - 1e-12) {
        return Err(Error::Infeasible(format!(
            "linewidth {total_fwhm:e} Hz is below the Fourier limit {fourier_fwhm:e} Hz"
        )));
    }
    if total_fwhm <= fourier_fwhm * (1.0 + 1e-12) || points < 2 {
        let dephasing = (PI * total_fwhm - 0.5 / lifetime).max(0.0);
        return Ok(vec![LinewidthPair {
            dephasing_rate: dephasing,
            inhomogeneous_fwhm: 0.0,
        }]);
    }
    let fourier_hwhm = 0.5 * fourier_fwhm;

    // σ′_max: pure Gaussian broadening on top of the natural line.
    let sigma_max = bisect(0.0, total_fwhm, |s| {
        Ok(voigt_fwhm(s / FWHM_PER_SIGMA, fourier_hwhm)? - total_fwhm)
    })?;

    let abscissae = curve_abscissae(sigma_max, points);
    let last = abscissae.len() - 1;
    let solved = map_slice(&abscissae, exec, |&s| -> Result<f64> {
        if s == 0.0 {
            return Ok(0.5 * total_fwhm);
        }
        if s == sigma_max {
            return Ok(fourier_hwhm);
        }
        bisect(fourier_hwhm, 0.5 * total_fwhm, |h| {
            Ok(voigt_fwhm(s / FWHM_PER_SIGMA, h)? - total_fwhm)
        })
    });
    let mut pairs = Vec::with_capacity(points);
    for (idx, (s, hwhm)) in abscissae.iter().zip(solved).enumerate() {
        let gamma_h = 2.0 * PI * hwhm?;
        let dephasing = if idx == last {
            0.0
        } else {
            (gamma_h - 0.5 / lifetime).max(0.0)
        };
        pairs.push(LinewidthPair {
            dephasing_rate: dephasing,
            inhomogeneous_fwhm: *s,
        });
    }
    Ok(pairs)
}

/// Root of an increasing function on `[lo, hi]` by bisection.
fn bisect<F>(mut lo: f64, mut hi: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// How an emitter's linewidth is specified in the literature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinewidthSpec {
    /// Coherence time in seconds.
    CoherenceTime(f64),
    /// Total Voigt FWHM in Hz.
    VoigtFwhm(f64),
    /// Separately known Lorentzian and Gaussian FWHMs in Hz.
    Components {
        lorentzian_fwhm: f64,
        gaussian_fwhm: f64,
    },
    /// Upper bound on the homogeneous FWHM with a known inhomogeneous FWHM (Hz).
    HomogeneousBound {
        lorentzian_fwhm_max: f64,
        gaussian_fwhm: f64,
    },
}

impl LinewidthSpec {
    /// All `(Γ*, σ′)` combinations compatible with the specification.
    pub fn decompose(&self, lifetime: f64, points: usize) -> Result<Vec<LinewidthPair>> {
        let fourier_fwhm = 1.0 / (2.0 * PI * lifetime);
        let dephasing_for = |lorentzian: f64| -> Result<f64> {
            if lorentzian < fourier_fwhm * (1.0 - 1e-12) {
                return Err(Error::Infeasible(format!(
                    "Lorentzian FWHM {lorentzian:e} Hz is below the Fourier limit {fourier_fwhm:e} Hz"
                )));
            }
            Ok((PI * lorentzian - 0.5 / lifetime).max(0.0))
        };
        match *self {
            LinewidthSpec::CoherenceTime(tc) => decompose_linewidth(lifetime, tc, points),
            LinewidthSpec::VoigtFwhm(total) => decompose_voigt_fwhm(lifetime, total, points),
            LinewidthSpec::Components {
                lorentzian_fwhm,
                gaussian_fwhm,
            } => Ok(vec![LinewidthPair {
                dephasing_rate: dephasing_for(lorentzian_fwhm)?,
                inhomogeneous_fwhm: gaussian_fwhm,
            }]),
            LinewidthSpec::HomogeneousBound {
                lorentzian_fwhm_max,
                gaussian_fwhm,
            } => {
                let top = dephasing_for(lorentzian_fwhm_max)?;
                let n = points.max(2);
                Ok((0..n)
                    .map(|k| LinewidthPair {
                        dephasing_rate: top * k as f64 / (n - 1) as f64,
                        inhomogeneous_fwhm: gaussian_fwhm,
                    })
                    .collect())
            }
        }
    }
}

/// Emitter parameters as written in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterRecord {
    pub lifetime_ps: f64,
    #[serde(default)]
    pub dephasing_rate_mhz: f64,
    #[serde(default)]
    pub inhomogeneous_fwhm_mhz: f64,
    #[serde(default)]
    pub detuning_ghz: f64,
}

impl TryFrom<EmitterRecord> for EmitterParams {
    type Error = Error;

    fn try_from(r: EmitterRecord) -> Result<Self> {
        EmitterParams::new(
            r.lifetime_ps * 1e-12,
            r.dephasing_rate_mhz * 1e6,
            r.inhomogeneous_fwhm_mhz * 1e6,
            r.detuning_ghz * 1e9,
        )
    }
}

impl From<&EmitterParams> for EmitterRecord {
    fn from(e: &EmitterParams) -> Self {
        Self {
            lifetime_ps: e.lifetime * 1e12,
            dephasing_rate_mhz: e.dephasing_rate * 1e-6,
            inhomogeneous_fwhm_mhz: e.inhomogeneous_fwhm * 1e-6,
            detuning_ghz: e.detuning * 1e-9,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PS: f64 = 1e-12;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn fourier_limited_coherence_time() {
        let tc = coherence_time(410.0 * PS, 0.0, 0.0).unwrap();
        assert!(rel(tc, 820.0 * PS) < 1e-15);
    }

    #[test]
    fn slow_pair_dephasing_only() {
        // 670 ps lifetime with Γ* = 2.28e9 /s gives τc ≈ 330 ps.
        let tc = coherence_time(670.0 * PS, 2.28e9, 0.0).unwrap();
        assert!((tc / PS - 330.0).abs() < 0.5, "{}", tc / PS);
    }

    #[test]
    fn gaussian_only_limit() {
        let s = 1.3e9;
        let expected = 2.0 * LN_2.sqrt() / (PI * s);
        assert!(rel(coherence_time_homogeneous(0.0, s), expected) < 1e-15);
    }

    #[test]
    fn dephasing_only_is_exact() {
        for &g in &[0.0, 1e6, 3.7e8, 2.2e9, 1e11] {
            let tr = 530.0 * PS;
            let tc = coherence_time(tr, g, 0.0).unwrap();
            assert_eq!(tc, 1.0 / (0.5 / tr + g));
        }
    }

    #[test]
    fn coherence_time_monotone() {
        let tr = 700.0 * PS;
        let mut prev = f64::INFINITY;
        for k in 0..200 {
            let tc = coherence_time(tr, k as f64 * 2e7, 5e8).unwrap();
            assert!(tc < prev);
            prev = tc;
        }
        prev = f64::INFINITY;
        for k in 0..200 {
            let tc = coherence_time(tr, 3e8, k as f64 * 2e7).unwrap();
            assert!(tc < prev);
            prev = tc;
        }
    }

    #[test]
    fn table_one_endpoints() {
        let curve = decompose_linewidth(670.0 * PS, 330.0 * PS, 200).unwrap();
        assert_eq!(curve.len(), 200);
        let first = curve.first().unwrap();
        let last = curve.last().unwrap();
        assert_eq!(first.inhomogeneous_fwhm, 0.0);
        assert!((first.dephasing_rate / 1e9 - 2.28).abs() < 0.005);
        assert_eq!(last.dephasing_rate, 0.0);
        assert!((last.inhomogeneous_fwhm / 1e9 - 1.39).abs() < 0.005);

        let fast = decompose_linewidth(155.0 * PS, 153.0 * PS, 200).unwrap();
        assert!((fast[0].dephasing_rate / 1e9 - 3.31).abs() < 0.005);
    }

    #[test]
    fn decomposition_round_trip() {
        for &(tr, tc) in &[
            (670.0, 330.0),
            (660.0, 420.0),
            (256.0, 256.0),
            (187.0, 123.0),
            (1000.0, 1999.0),
        ] {
            for p in decompose_linewidth(tr * PS, tc * PS, 200).unwrap() {
                let back = coherence_time(tr * PS, p.dephasing_rate, p.inhomogeneous_fwhm).unwrap();
                assert!(rel(back, tc * PS) < 1e-9, "{tr}/{tc}: {p:?} -> {back:e}");
            }
        }
    }

    #[test]
    fn decomposition_at_fourier_limit() {
        let c = decompose_linewidth(400.0 * PS, 800.0 * PS, 200).unwrap();
        assert_eq!(
            c,
            vec![LinewidthPair {
                dephasing_rate: 0.0,
                inhomogeneous_fwhm: 0.0
            }]
        );
        assert!(matches!(
            decompose_linewidth(400.0 * PS, 801.0 * PS, 200),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn fourier_linewidths() {
        let qd = EmitterParams::fourier_limited(410.0 * PS).unwrap();
        assert!((qd.lorentzian_fwhm() / 1e6 - 388.18).abs() < 0.01);
        assert!((qd.voigt_linewidth().unwrap() / 1e6 - 388.18).abs() < 0.01);
        let nv = EmitterParams::fourier_limited(12e-9).unwrap();
        assert!((nv.voigt_linewidth().unwrap() / 1e6 - 13.26).abs() < 0.01);
    }

    #[test]
    fn components_combine_to_voigt_width() {
        // Lorentzian 480 MHz with Gaussian 550 MHz.
        let v = crate::numerics::voigt_fwhm(550e6 / FWHM_PER_SIGMA, 240e6).unwrap();
        assert!((v / 1e6 - 850.0).abs() < 1.0, "{}", v / 1e6);
    }

    #[test]
    fn voigt_decomposition_round_trip() {
        for &(tr, total) in &[(1.72e-9, 119e6), (0.85e-9, 270e6), (9.5e-9, 19e6)] {
            let curve = decompose_voigt_fwhm(tr, total, 60).unwrap();
            assert_eq!(curve.len(), 60);
            assert_eq!(curve.last().unwrap().dephasing_rate, 0.0);
            assert_eq!(curve[0].inhomogeneous_fwhm, 0.0);
            for p in curve {
                let w = p.emitter(tr).unwrap().voigt_linewidth().unwrap();
                assert!(rel(w, total) < 1e-6, "{tr} {total}: {p:?} -> {w}");
            }
        }
        assert!(matches!(
            decompose_voigt_fwhm(12e-9, 10e6, 10),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn normalized_examples() {
        let tr = 600.0 * PS;
        let n = normalized_params(&EmitterParams::fourier_limited(tr).unwrap());
        assert_eq!((n.theta_pd, n.theta_sd), (1.0, 0.0));
        assert!(rel(n.x_c, 1.0) < 1e-15);

        let n = normalized_params(&EmitterParams::new(tr, 0.5 / tr, 0.0, 0.0).unwrap());
        assert!(rel(n.theta_pd, 2.0) < 1e-15);
        assert!(rel(n.x_c, 0.5) < 1e-15);

        let n = normalized_params(&EmitterParams::new(tr, 0.0, 1.0 / tr, 0.0).unwrap());
        assert!(rel(n.theta_sd, 1.0) < 1e-15);

        let m = NormalizedParams::new(n.theta_pd, n.theta_sd).unwrap();
        assert!(rel(m.x_c, n.x_c) < 1e-14);
        let e = m.to_emitter(tr).unwrap();
        assert!(rel(e.inhomogeneous_fwhm(), 1.0 / tr) < 1e-15);
        assert!(NormalizedParams::new(0.9, 0.0).is_err());
    }

    #[test]
    fn record_units() {
        let r: EmitterRecord = serde_json::from_str(
            r#"{"lifetime_ps": 700, "dephasing_rate_mhz": 600, "inhomogeneous_fwhm_mhz": 1400, "detuning_ghz": -0.25}"#,
        )
        .unwrap();
        let e = EmitterParams::try_from(r).unwrap();
        assert!(rel(e.lifetime(), 700e-12) < 1e-15);
        assert!(rel(e.dephasing_rate(), 6e8) < 1e-15);
        assert!(rel(e.inhomogeneous_fwhm(), 1.4e9) < 1e-15);
        assert!(rel(e.detuning(), -2.5e8) < 1e-15);
        assert!(
            serde_json::from_str::<EmitterRecord>(r#"{"lifetime_ps": 1, "bogus": 2}"#).is_err()
        );
        assert!(EmitterParams::try_from(EmitterRecord {
            lifetime_ps: -1.0,
            ..r
        })
        .is_err());
    }

    #[test]
    fn pair_derived_quantities() {
        let a = EmitterParams::new(700.0 * PS, 6e8, 1.4e9, 3e9).unwrap();
        let b = EmitterParams::new(650.0 * PS, 3e8, 0.8e9, 0.0).unwrap();
        let p = PhotonPair::new(a, b);
        assert!(rel(p.gamma(), 0.5 / 700e-12 + 0.5 / 650e-12 + 9e8) < 1e-15);
        assert!(
            rel(
                p.sigma_squared(),
                (1.4e9f64.powi(2) + 0.8e9f64.powi(2)) / FWHM_PER_SIGMA.powi(2)
            ) < 1e-14
        );
        assert_eq!(p.delta_nu(), 3e9);
        assert!(rel(p.t_plus(), 700e-12 * 650e-12 / 1350e-12) < 1e-15);
        assert_eq!(p.with_delta_nu(-1e9).delta_nu(), -1e9);
    }
}
