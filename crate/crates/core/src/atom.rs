//! Dirac hydrogen-like ground orbital and its smearing profile.
//!
//! The ground s-orbital has large and small radial components
//! g(r) = k₁ e^{−Zr} r^{β−1} and f(r) = k₂ e^{−Zr} r^{β−1} with
//! β = √(1 − Z²α²). The spin couples to the magnetic field through the
//! smearing φ(r) = −∫ᵣ^∞ f g dr′, which is positive because k₂ < 0.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate_tail_from;
use crate::numerics::{gamma, gamma_upper, integrate_semiline, spherical_fourier, RadialFunction, Tolerance};

/// Constants of a hydrogen-like s-orbital in units where a₀ = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitalParams {
    pub z: u32,
    pub n0: u32,
    pub alpha: f64,
    /// √(1 − Z²α²)
    pub beta: f64,
    /// Bohr radius, the unit of length.
    pub a0: f64,
    pub k1: f64,
    pub k2: f64,
    /// Electron mass 1/α.
    pub me: f64,
}

impl OrbitalParams {
    pub fn new(z: u32, n0: u32, alpha: f64) -> Result<Self> {
        if n0 != 1 {
            return Err(Error::UnsupportedOrbital { n0 });
        }
        if z == 0 {
            return Err(Error::domain("nuclear charge Z must be at least 1"));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
        }
        let za = z as f64 * alpha;
        if za >= 1.0 {
            return Err(Error::domain(format!(
                "Z·alpha = {za} >= 1: no normalizable Dirac ground state"
            )));
        }
        let beta = (1.0 - za * za).sqrt();
        let zf = z as f64;
        let k1 = (2f64.powf(2.0 * beta) * zf.powf(2.0 * beta + 1.0) * (1.0 + beta) / gamma(1.0 + 2.0 * beta)).sqrt();
        // √((1−β)/(1+β)) = Zα/(1+β) without cancellation
        let k2 = -k1 * za / (1.0 + beta);
        Ok(Self {
            z,
            n0,
            alpha,
            beta,
            a0: 1.0,
            k1,
            k2,
            me: 1.0 / alpha,
        })
    }

    fn zf(&self) -> f64 {
        self.z as f64
    }

    /// Zα = √(1 − β²).
    pub fn z_alpha(&self) -> f64 {
        self.zf() * self.alpha
    }

    /// 1 − β evaluated without cancellation.
    pub fn one_minus_beta(&self) -> f64 {
        let za = self.z_alpha();
        za * za / (1.0 + self.beta)
    }

    /// −k₁k₂ = 2^{2β} Z^{2β+1} √(1−β²) / Γ(2β+1), positive.
    fn minus_k1k2(&self) -> f64 {
        let b = self.beta;
        2f64.powf(2.0 * b) * self.zf().powf(2.0 * b + 1.0) * self.z_alpha() / gamma(2.0 * b + 1.0)
    }

    /// Large radial component g(r).
    pub fn g(&self, r: f64) -> f64 {
        self.k1 * (-self.zf() * r).exp() * r.powf(self.beta - 1.0)
    }

    /// Small radial component f(r).
    pub fn f(&self, r: f64) -> f64 {
        self.k2 * (-self.zf() * r).exp() * r.powf(self.beta - 1.0)
    }

    /// Closed form of φ(r) = 2Z²√(1−β²)/Γ(2β+1) · Γ(2β−1, 2Zr).
    pub fn phi(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain(format!("smearing needs r > 0, got {r}")));
        }
        let b = self.beta;
        let pre = 2.0 * self.zf().powi(2) * self.z_alpha() / gamma(2.0 * b + 1.0);
        Ok(pre * gamma_upper(2.0 * b - 1.0, 2.0 * self.zf() * r)?)
    }

    /// Radius beyond which the orbital densities are below double precision.
    pub fn decay_scale(&self) -> f64 {
        40.0 / self.zf()
    }
}

/// Orbital data bundled as radial profiles for the numeric routines.
#[derive(Debug, Clone)]
pub struct OrbitalProfile {
    pub params: OrbitalParams,
    pub g: RadialFunction,
    pub f: RadialFunction,
    pub phi: RadialFunction,
    closed_form: bool,
}

impl OrbitalProfile {
    /// A profile with user-supplied radial functions. Closed-form shortcuts
    /// are disabled for such profiles.
    pub fn custom(params: OrbitalParams, g: RadialFunction, f: RadialFunction, phi: RadialFunction) -> Self {
        Self {
            params,
            g,
            f,
            phi,
            closed_form: false,
        }
    }

    /// Whether `phi`, `g`, `f` are the closed forms of `params`.
    pub fn is_closed_form(&self) -> bool {
        self.closed_form
    }
}

/// Builds the ground-orbital profile for nuclear charge `z`.
///
/// The smearing's closed form involves Γ(2β − 1, ·), so charges with
/// β ≤ 1/2 (Zα ≥ √3/2) are rejected as well.
pub fn make_orbital(z: u32, n0: u32, alpha: f64) -> Result<OrbitalProfile> {
    let params = OrbitalParams::new(z, n0, alpha)?;
    if params.beta <= 0.5 {
        return Err(Error::domain(format!(
            "beta = {} <= 1/2: the smearing function is not finite at the origin",
            params.beta
        )));
    }
    let scale = params.decay_scale();
    let g = RadialFunction::new(scale, move |r| params.g(r))?;
    let f = RadialFunction::new(scale, move |r| params.f(r))?;
    // φ(r) for r > 0 cannot fail once β > 1/2
    let phi = RadialFunction::new(scale, move |r| params.phi(r).unwrap_or(f64::NAN))?;
    Ok(OrbitalProfile {
        params,
        g,
        f,
        phi,
        closed_form: true,
    })
}

/// Dirac bound-state energy E_{nj} (rest mass included), with j = two_j / 2.
pub fn energy_level(z: u32, n: u32, two_j: u32, alpha: f64) -> Result<f64> {
    if n == 0 || two_j.is_multiple_of(2) || two_j > 2 * n - 1 {
        return Err(Error::domain(format!("invalid quantum numbers n = {n}, j = {two_j}/2")));
    }
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    let za = z as f64 * alpha;
    let jh = 0.5 * (two_j as f64 + 1.0);
    if za >= jh {
        return Err(Error::domain(format!(
            "Z·alpha = {za} >= j + 1/2 = {jh}: level not bound"
        )));
    }
    let me = 1.0 / alpha;
    let denom = n as f64 - jh + (jh * jh - za * za).sqrt();
    Ok(me / (1.0 + (za / denom).powi(2)).sqrt())
}

/// φ(r) from the closed form.
pub fn smearing_phi(profile: &OrbitalProfile, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("smearing needs r > 0, got {r}")));
    }
    let v = profile.phi.eval(r);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(format!("smearing is not finite at r = {r}")))
    }
}

/// φ(r) from its defining integral −∫ᵣ^∞ f g dr′.
pub fn phi_by_quadrature(profile: &OrbitalProfile, r: f64, tol: &Tolerance) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("smearing needs r > 0, got {r}")));
    }
    let scale = profile.f.decay_scale().max(r);
    let v: f64 = integrate_tail_from(
        &|x: f64| profile.f.eval(x) * profile.g.eval(x),
        &[r, r + scale],
        scale,
        tol,
    )?;
    Ok(-v)
}

/// ∫₀^∞ r² (f² + g²) dr.
pub fn normalization(profile: &OrbitalProfile, tol: &Tolerance) -> Result<f64> {
    let (g, f) = (profile.g.clone(), profile.f.clone());
    let h = RadialFunction::new(profile.g.decay_scale(), move |r| {
        r * r * (f.eval(r).powi(2) + g.eval(r).powi(2))
    })?;
    integrate_semiline(&h, tol)
}

/// ∫₀^∞ r² f² dr, the small-component weight.
pub fn small_component_weight(profile: &OrbitalProfile, tol: &Tolerance) -> Result<f64> {
    let f = profile.f.clone();
    let h = RadialFunction::new(profile.f.decay_scale(), move |r| r * r * f.eval(r).powi(2))?;
    integrate_semiline(&h, tol)
}

/// ∫d³x φ(|x|) by direct radial quadrature.
pub fn phi_volume_integral(profile: &OrbitalProfile, tol: &Tolerance) -> Result<f64> {
    let phi = profile.phi.clone();
    let h = RadialFunction::new(profile.phi.decay_scale(), move |r| r * r * phi.eval(r))?;
    Ok(4.0 * PI * integrate_semiline(&h, tol)?)
}

/// Factor 1 − (4/3)∫r²f² by which the orbital reduces the spin's magnetic
/// coupling relative to a point electron.
pub fn g_factor_correction(profile: &OrbitalProfile, tol: &Tolerance) -> Result<f64> {
    Ok(1.0 - 4.0 / 3.0 * small_component_weight(profile, tol)?)
}

/// φ̃(k) by numerical transform of the smearing profile.
pub fn phi_fourier(profile: &OrbitalProfile, k: f64, tol: &Tolerance) -> Result<f64> {
    spherical_fourier(&profile.phi, k, tol)
}

/// φ̃(k) in closed form.
///
/// With ω = 2β arctan(k/2Z),
/// φ̃(k) = 4πZ√(1−β²)(Z sin ω − βk cos ω) / (β(2β−1) k³ (1 + k²/4Z²)^β).
/// For k < Z/4 the expression cancels catastrophically and the even power
/// series of the transform is summed instead.
pub fn phi_fourier_closed(params: &OrbitalParams, k: f64) -> Result<f64> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::domain(format!("wavenumber must be finite and >= 0, got {k}")));
    }
    let b = params.beta;
    if b <= 0.5 {
        return Err(Error::domain(format!("beta = {b} <= 1/2 has no finite transform")));
    }
    let z = params.zf();
    if k < 0.25 * z {
        return Ok(phi_fourier_series(params, k));
    }
    let w = 2.0 * b * (k / (2.0 * z)).atan();
    let num = 4.0 * PI * z * params.z_alpha() * (z * w.sin() - b * k * w.cos());
    let den = b * (2.0 * b - 1.0) * k.powi(3) * (1.0 + k * k / (4.0 * z * z)).powf(b);
    Ok(num / den)
}

// φ̃(k) = 4π(−k₁k₂) Σ_{n≥1} (−1)^{n+1} 2n/(2n+1)! k^{2n−2} Γ(2n+2β)/(2Z)^{2n+2β},
// convergent for k < 2Z.
fn phi_fourier_series(params: &OrbitalParams, k: f64) -> f64 {
    let b = params.beta;
    let two_z = 2.0 * params.zf();
    // n = 1 term, then the ratio of consecutive terms
    let mut term = 2.0 / 6.0 * gamma(2.0 + 2.0 * b) / two_z.powf(2.0 + 2.0 * b);
    let mut sum = term;
    let x = (k / two_z).powi(2);
    for n in 1..200 {
        let nf = n as f64;
        // term_{n+1}/term_n
        let ratio = -(nf + 1.0) / nf / ((2.0 * nf + 2.0) * (2.0 * nf + 3.0))
            * (2.0 * nf + 2.0 * b)
            * (2.0 * nf + 2.0 * b + 1.0)
            * x;
        term *= ratio;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    4.0 * PI * params.minus_k1k2() * sum
}
