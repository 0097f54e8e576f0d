//! Unit-normalized Voigt profile and its full width at half maximum.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::faddeeva::faddeeva_w;
use crate::error::{Error, Result};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Voigt density at offset `x` (Hz) for a Gaussian of standard deviation
/// `gaussian_sigma` and a Lorentzian of half width `lorentzian_hwhm`.
pub fn voigt_value(x: f64, gaussian_sigma: f64, lorentzian_hwhm: f64) -> Result<f64> {
    check_widths(gaussian_sigma, lorentzian_hwhm)?;
    if lorentzian_hwhm == 0.0 {
        let u = x / gaussian_sigma;
        return Ok((-0.5 * u * u).exp() / (gaussian_sigma * SQRT_2PI));
    }
    if gaussian_sigma == 0.0 {
        return Ok(lorentzian_hwhm / PI / (x * x + lorentzian_hwhm * lorentzian_hwhm));
    }
    let scale = gaussian_sigma * std::f64::consts::SQRT_2;
    let z = Complex64::new(x / scale, lorentzian_hwhm / scale);
    Ok(faddeeva_w(z)?.re / (gaussian_sigma * SQRT_2PI))
}

/// Full width at half maximum of the Voigt profile, found by bisection on
/// the half-maximum crossing.
pub fn voigt_fwhm(gaussian_sigma: f64, lorentzian_hwhm: f64) -> Result<f64> {
    check_widths(gaussian_sigma, lorentzian_hwhm)?;
    let peak = voigt_value(0.0, gaussian_sigma, lorentzian_hwhm)?;
    let half = 0.5 * peak;
    let gaussian_fwhm = 2.0 * (2.0 * std::f64::consts::LN_2).sqrt() * gaussian_sigma;
    // The Voigt FWHM never exceeds the sum of the component FWHMs.
    let mut lo = 0.0;
    let mut hi = 0.5 * (gaussian_fwhm + 2.0 * lorentzian_hwhm) * 1.000_001;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if voigt_value(mid, gaussian_sigma, lorentzian_hwhm)? > half {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(lo + hi)
}

fn check_widths(sigma: f64, hwhm: f64) -> Result<()> {
    if !(sigma >= 0.0 && hwhm >= 0.0 && sigma.is_finite() && hwhm.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Voigt widths must be finite and >= 0 (sigma {sigma}, hwhm {hwhm})"
        )));
    }
    if sigma == 0.0 && hwhm == 0.0 {
        return Err(Error::Degenerate("both Voigt widths are zero".into()));
    }
    Ok(())
}
