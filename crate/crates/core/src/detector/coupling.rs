//! Coupling models and their spatial smearing.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::atom::{phi_fourier_closed, OrbitalProfile};
use crate::error::{Error, Result};
use crate::numerics::{spherical_fourier, RadialFunction, Tolerance};

type Transform = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Spatial profile of a coupling together with its 3D Fourier transform.
#[derive(Clone)]
pub struct Smearing {
    profile: RadialFunction,
    transform: Option<Transform>,
    k_scale: f64,
}

impl Smearing {
    /// Smearing known only through its radial profile; the transform is
    /// computed numerically. `k_scale` is the wavenumber over which the
    /// transform varies, of order one over the profile's radius.
    pub fn numeric(profile: RadialFunction, k_scale: f64) -> Result<Self> {
        if !(k_scale > 0.0) || !k_scale.is_finite() {
            return Err(Error::domain(format!("k_scale must be positive, got {k_scale}")));
        }
        Ok(Self {
            profile,
            transform: None,
            k_scale,
        })
    }

    /// Smearing with a known transform.
    pub fn with_transform<F>(profile: RadialFunction, k_scale: f64, transform: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        let mut s = Self::numeric(profile, k_scale)?;
        s.transform = Some(Arc::new(transform));
        Ok(s)
    }

    /// The orbital's φ(r). The closed-form transform is used for closed-form
    /// orbitals.
    pub fn from_orbital(orbital: &OrbitalProfile) -> Result<Self> {
        let k_scale = 2.0 * orbital.params.z as f64;
        if orbital.is_closed_form() {
            let params = orbital.params;
            Self::with_transform(orbital.phi.clone(), k_scale, move |k| phi_fourier_closed(&params, k))
        } else {
            Self::numeric(orbital.phi.clone(), k_scale)
        }
    }

    /// The same profile with the transform forced through numerical quadrature.
    pub fn without_closed_transform(&self) -> Self {
        Self {
            profile: self.profile.clone(),
            transform: None,
            k_scale: self.k_scale,
        }
    }

    pub fn profile(&self) -> &RadialFunction {
        &self.profile
    }

    pub fn k_scale(&self) -> f64 {
        self.k_scale
    }

    pub fn has_closed_transform(&self) -> bool {
        self.transform.is_some()
    }

    /// s̃(k).
    pub fn transform(&self, k: f64, tol: &Tolerance) -> Result<f64> {
        match &self.transform {
            Some(f) => f(k),
            None => spherical_fourier(&self.profile, k, tol),
        }
    }
}

impl fmt::Debug for Smearing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Smearing")
            .field("profile", &self.profile)
            .field("closed_transform", &self.transform.is_some())
            .field("k_scale", &self.k_scale)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingKind {
    /// Spin coupled to the magnetic field through the smeared Zeeman term.
    SpinMagnetic,
    /// Unruh–DeWitt monopole coupled to the field amplitude.
    UdwAmplitude,
    /// Unruh–DeWitt monopole coupled to the field's time derivative.
    UdwDerivative,
}

impl CouplingKind {
    pub fn name(self) -> &'static str {
        match self {
            CouplingKind::SpinMagnetic => "spin",
            CouplingKind::UdwAmplitude => "udw-amplitude",
            CouplingKind::UdwDerivative => "udw-derivative",
        }
    }

    pub fn is_udw(self) -> bool {
        !matches!(self, CouplingKind::SpinMagnetic)
    }
}

/// A detector coupling: model kind, strength and smearing.
#[derive(Debug, Clone)]
pub struct CouplingModel {
    kind: CouplingKind,
    coupling: f64,
    smearing: Smearing,
}

impl CouplingModel {
    pub fn new(kind: CouplingKind, coupling: f64, smearing: Smearing) -> Result<Self> {
        if !coupling.is_finite() {
            return Err(Error::domain("coupling constant must be finite"));
        }
        Ok(Self {
            kind,
            coupling,
            smearing,
        })
    }

    /// Spin model with charge `q`.
    pub fn spin_magnetic(q: f64, smearing: Smearing) -> Result<Self> {
        Self::new(CouplingKind::SpinMagnetic, q, smearing)
    }

    pub fn udw_amplitude(lambda: f64, smearing: Smearing) -> Result<Self> {
        Self::new(CouplingKind::UdwAmplitude, lambda, smearing)
    }

    pub fn udw_derivative(lambda: f64, smearing: Smearing) -> Result<Self> {
        Self::new(CouplingKind::UdwDerivative, lambda, smearing)
    }

    pub fn kind(&self) -> CouplingKind {
        self.kind
    }

    /// q for the spin model, λ for the Unruh–DeWitt models.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn smearing(&self) -> &Smearing {
        &self.smearing
    }

    /// Power of |k| in the response integrands.
    pub fn gamma(&self) -> i32 {
        match self.kind {
            CouplingKind::UdwAmplitude => 1,
            _ => 3,
        }
    }

    /// Prefactor multiplying the functionals in the state map:
    /// (4π/3)(q/2π)² for the spin, πλ² otherwise.
    pub fn prefactor(&self) -> f64 {
        match self.kind {
            CouplingKind::SpinMagnetic => 4.0 * PI / 3.0 * (self.coupling / (2.0 * PI)).powi(2),
            _ => PI * self.coupling * self.coupling,
        }
    }
}

/// Default electron charge q = √(4πα) (Heaviside–Lorentz units).
pub fn default_charge(alpha: f64) -> f64 {
    (4.0 * PI * alpha).sqrt()
}
