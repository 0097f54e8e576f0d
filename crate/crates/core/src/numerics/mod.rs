//! Special functions and integration kernels.

mod faddeeva;
mod quadrature;
mod voigt;

pub use faddeeva::{erfcx, faddeeva_w};
pub use quadrature::{integrate, Integrator};
pub use voigt::{voigt_fwhm, voigt_value};
