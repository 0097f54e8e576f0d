//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

#![allow(clippy::excessive_precision)]

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae and weights, G7/K15, as tabulated.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Configurable adaptive integrator.
///
/// Infinite endpoints are truncated at `truncation_multiple * decay_scale`
/// from the finite endpoint (or from 0 for doubly infinite ranges).
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub tol: f64,
    pub max_intervals: usize,
    pub decay_scale: f64,
    pub truncation_multiple: f64,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_intervals: 4096,
            decay_scale: 1.0,
            truncation_multiple: 40.0,
        }
    }
}

impl Integrator {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn decay_scale(mut self, scale: f64) -> Self {
        self.decay_scale = scale;
        self
    }

    pub fn truncation_multiple(mut self, multiple: f64) -> Self {
        self.truncation_multiple = multiple;
        self
    }

    pub fn max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n.max(1);
        self
    }

    /// Integrates `f` over `[a, b]`; returns the value and the error estimate.
    pub fn integrate_with_error<F>(&self, f: F, a: f64, b: f64) -> Result<(f64, f64)>
    where
        F: Fn(f64) -> f64,
    {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tolerance {} must be > 0",
                self.tol
            )));
        }
        if a.is_nan() || b.is_nan() {
            return Err(Error::InvalidParameter("NaN integration bound".into()));
        }
        if !(self.decay_scale > 0.0 && self.decay_scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "decay scale {} must be finite and > 0",
                self.decay_scale
            )));
        }
        if a == b {
            return Ok((0.0, 0.0));
        }
        if a > b {
            let (v, e) = self.integrate_with_error(f, b, a)?;
            return Ok((-v, e));
        }
        let reach = self.truncation_multiple * self.decay_scale;
        let (lo, hi) = match (a.is_finite(), b.is_finite()) {
            (true, true) => (a, b),
            (true, false) => (a, a + reach),
            (false, true) => (b - reach, b),
            (false, false) => (-reach, reach),
        };

        self.adapt(&f, lo, hi)
    }

    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        self.integrate_with_error(f, a, b).map(|(v, _)| v)
    }

    /// Global adaptive strategy: repeatedly bisects the interval with the
    /// largest error estimate until the summed estimate meets `tol`.
    /// Intervals that can no longer be split in floating point are frozen.
    fn adapt<F>(&self, f: &F, lo: f64, hi: f64) -> Result<(f64, f64)>
    where
        F: Fn(f64) -> f64,
    {
        let mut heap = BinaryHeap::new();
        let mut frozen_value = 0.0;
        let mut frozen_error = 0.0;
        let whole = gk15(f, lo, hi);
        check_finite(&whole, lo, hi)?;
        heap.push(Piece {
            a: lo,
            b: hi,
            seg: whole,
        });
        let mut err = whole.error;
        loop {
            if err <= self.tol {
                break;
            }
            let Some(worst) = heap.pop() else { break };
            let Piece { a, b, seg } = worst;
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b || (b - a) <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
                frozen_value += seg.value;
                frozen_error += seg.error;
                continue;
            }
            if heap.len() + 1 >= self.max_intervals {
                return Err(Error::NoConvergence {
                    a: lo,
                    b: hi,
                    estimate: err,
                    tol: self.tol,
                });
            }
            let left = gk15(f, a, mid);
            let right = gk15(f, mid, b);
            check_finite(&left, a, mid)?;
            check_finite(&right, mid, b)?;
            err += left.error + right.error - seg.error;
            heap.push(Piece {
                a,
                b: mid,
                seg: left,
            });
            heap.push(Piece {
                a: mid,
                b,
                seg: right,
            });
            if heap.len() % 64 == 0 {
                // Resum to shed the rounding drift of the running total.
                err = frozen_error + heap.iter().map(|p| p.seg.error).sum::<f64>();
            }
        }
        // Final value summed from the pieces in position order.
        let mut pieces = heap.into_vec();
        pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
        let value = frozen_value + pieces.iter().map(|p| p.seg.value).sum::<f64>();
        let error = frozen_error + pieces.iter().map(|p| p.seg.error).sum::<f64>();
        if error > self.tol && !(frozen_error > 0.0 && error - frozen_error <= self.tol) {
            return Err(Error::NoConvergence {
                a: lo,
                b: hi,
                estimate: error,
                tol: self.tol,
            });
        }
        Ok((value, error))
    }
}

fn check_finite(seg: &Segment, a: f64, b: f64) -> Result<()> {
    if seg.value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("integrand not finite on [{a}, {b}]")))
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    seg: Segment,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.seg.error == other.seg.error
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.seg.error.total_cmp(&other.seg.error)
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` with the default
/// truncation rule for infinite endpoints (40 units of decay scale 1).
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    Integrator::new(tol).integrate(f, a, b)
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    value: f64,
    error: f64,
}

fn gk15<F>(f: &F, a: f64, b: f64) -> Segment
where
    F: Fn(f64) -> f64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for (idx, &x) in XGK.iter().take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[idx] = f1;
        fv2[idx] = f2;
        kronrod += WGK[idx] * (f1 + f2);
        abs_sum += WGK[idx] * (f1.abs() + f2.abs());
        if idx % 2 == 1 {
            gauss += WG[idx / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for idx in 0..7 {
        asc += WGK[idx] * ((fv1[idx] - mean).abs() + (fv2[idx] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { value, error }
}
