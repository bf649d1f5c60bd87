//! Integration primitives and special functions shared by the physics modules.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

mod autocorr;
mod fourier;
mod gamma;
pub mod quadrature;

pub use autocorr::autocorrelation;
pub use fourier::{spherical_fourier, wynn_epsilon};
pub use gamma::{gamma, gamma_upper};

/// Accuracy request for adaptive routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel > 0.0) || !(abs >= 0.0) || max_subdivisions < 1 {
            return Err(Error::domain(format!(
                "invalid tolerance rel={rel}, abs={abs}, max_subdivisions={max_subdivisions}"
            )));
        }
        Ok(Self {
            rel,
            abs,
            max_subdivisions,
        })
    }

    /// Same budget with a different relative target.
    pub fn with_rel(self, rel: f64) -> Result<Self> {
        Self::new(rel, self.abs, self.max_subdivisions)
    }

    /// Absolute error allowed for an integral of magnitude `value`.
    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

/// A real radial profile r ↦ f(r) on r > 0.
///
/// `decay_scale` is the radius beyond which the profile is negligible; for
/// power-law tails it only sets the initial panel width.
#[derive(Clone)]
pub struct RadialFunction {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    decay_scale: f64,
}

impl RadialFunction {
    pub fn new<F>(decay_scale: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(decay_scale > 0.0) || !decay_scale.is_finite() {
            return Err(Error::domain(format!(
                "decay scale must be positive and finite, got {decay_scale}"
            )));
        }
        Ok(Self {
            eval: Arc::new(f),
            decay_scale,
        })
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        (self.eval)(r)
    }

    pub fn decay_scale(&self) -> f64 {
        self.decay_scale
    }
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("decay_scale", &self.decay_scale)
            .finish_non_exhaustive()
    }
}

/// Breakpoints on `[0, scale]` graded geometrically towards the origin so that
/// integrable power-law behaviour at r = 0 is resolved cheaply.
pub(crate) fn origin_graded_points(scale: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut x = scale * 1e-12;
    while x < 0.5 * scale {
        pts.push(x);
        x *= 10.0;
    }
    pts.push(scale);
    pts
}

/// ∫₀^∞ f(r) dr.
pub fn integrate_semiline(f: &RadialFunction, tol: &Tolerance) -> Result<f64> {
    let scale = f.decay_scale();
    quadrature::integrate_tail_from(&|r: f64| f.eval(r), &origin_graded_points(scale), scale, tol)
}
