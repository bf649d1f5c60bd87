//! Switching functions, their Fourier transforms and the Q kernel.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate_partitioned, oscillation_breakpoints};
use crate::numerics::{autocorrelation, Tolerance};

/// Time profile χ(t) of the interaction.
#[derive(Debug, Clone, PartialEq)]
pub enum SwitchingFunction {
    /// χ(t) = exp(−π(t − center)² / (2 width²)).
    Gaussian { width: f64, center: f64 },
    /// χ = 1 on [start, end], 0 elsewhere.
    Window { start: f64, end: f64 },
    /// Linear interpolation of `values` on the increasing grid `times`, zero outside.
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

impl SwitchingFunction {
    pub fn gaussian(width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::domain(format!("Gaussian width must be positive, got {width}")));
        }
        Ok(Self::Gaussian { width, center: 0.0 })
    }

    pub fn window(start: f64, end: f64) -> Result<Self> {
        if !(end > start) || !start.is_finite() || !end.is_finite() {
            return Err(Error::domain(format!("window needs start < end, got [{start}, {end}]")));
        }
        Ok(Self::Window { start, end })
    }

    pub fn sampled(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times.len() != values.len() {
            return Err(Error::domain("sampled switching needs at least two (t, value) pairs"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::domain("sample times must be finite and strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("sample values must be finite"));
        }
        Ok(Self::Sampled { times, values })
    }

    /// The same profile delayed by `t0`, i.e. χ(t − t0).
    pub fn shifted(&self, t0: f64) -> Self {
        match self {
            Self::Gaussian { width, center } => Self::Gaussian {
                width: *width,
                center: center + t0,
            },
            Self::Window { start, end } => Self::Window {
                start: start + t0,
                end: end + t0,
            },
            Self::Sampled { times, values } => Self::Sampled {
                times: times.iter().map(|t| t + t0).collect(),
                values: values.clone(),
            },
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Gaussian { width, center } => {
                let d = t - center;
                (-PI * d * d / (2.0 * width * width)).exp()
            }
            Self::Window { start, end } => {
                if t >= *start && t <= *end {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Sampled { times, values } => {
                let n = times.len();
                if t < times[0] || t > times[n - 1] {
                    return 0.0;
                }
                let i = times.partition_point(|&x| x <= t).clamp(1, n - 1);
                let (t0, t1) = (times[i - 1], times[i]);
                let w = (t - t0) / (t1 - t0);
                values[i - 1] + w * (values[i] - values[i - 1])
            }
        }
    }

    /// Characteristic duration: T for the Gaussian, the length otherwise.
    pub fn duration(&self) -> f64 {
        match self {
            Self::Gaussian { width, .. } => *width,
            Self::Window { start, end } => end - start,
            Self::Sampled { times, .. } => times[times.len() - 1] - times[0],
        }
    }
}

/// χ̃(ω) = ∫dt χ(t) e^{iωt}.
pub fn chi_fourier(chi: &SwitchingFunction, omega: f64) -> Result<Complex64> {
    match chi {
        SwitchingFunction::Gaussian { width, center } => {
            let amp = 2f64.sqrt() * width * (-width * width * omega * omega / (2.0 * PI)).exp();
            Ok(Complex64::from_polar(amp, omega * center))
        }
        SwitchingFunction::Window { start, end } => {
            let len = end - start;
            let amp = if omega == 0.0 {
                len
            } else {
                2.0 * (0.5 * omega * len).sin() / omega
            };
            Ok(Complex64::from_polar(1.0, 0.5 * omega * (start + end)) * amp)
        }
        SwitchingFunction::Sampled { times, .. } => {
            let lo = times[0];
            let hi = times[times.len() - 1];
            let mut pts: Vec<f64> = oscillation_breakpoints(lo, hi, omega.abs(), hi - lo);
            pts.extend_from_slice(times);
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            integrate_partitioned(
                |t: f64| Complex64::from_polar(chi.eval(t), omega * t),
                &pts,
                &Tolerance::default(),
            )
        }
    }
}

/// |χ̃(ω)|², evaluated without forming the phase where a closed form exists.
pub fn chi_fourier_abs2(chi: &SwitchingFunction, omega: f64) -> Result<f64> {
    match chi {
        SwitchingFunction::Gaussian { width, .. } => {
            Ok(2.0 * width * width * (-width * width * omega * omega / PI).exp())
        }
        SwitchingFunction::Window { start, end } => {
            let len = end - start;
            if omega == 0.0 {
                Ok(len * len)
            } else {
                let s = (0.5 * omega * len).sin();
                Ok(4.0 * s * s / (omega * omega))
            }
        }
        SwitchingFunction::Sampled { .. } => Ok(chi_fourier(chi, omega)?.norm_sqr()),
    }
}

/// Q(k, Ω) = ∫dt dt′ χ(t)χ(t′) e^{iΩ|t−t′|} e^{−ik(t−t′)}
///         = 2∫₀^∞ du W(u) e^{iΩu} cos(ku),
/// with W the autocorrelation of χ. At Ω = 0 this is |χ̃(k)|² exactly.
pub fn q_kernel(chi: &SwitchingFunction, k: f64, omega: f64) -> Result<Complex64> {
    if !(k >= 0.0) || !k.is_finite() || !omega.is_finite() {
        return Err(Error::domain(format!(
            "q_kernel needs finite k >= 0 and Ω, got k = {k}, Ω = {omega}"
        )));
    }
    if omega == 0.0 {
        return Ok(Complex64::new(chi_fourier_abs2(chi, k)?, 0.0));
    }
    match chi {
        SwitchingFunction::Gaussian { width, .. } => {
            let t = *width;
            let re = 0.5 * (chi_fourier_abs2(chi, k + omega)? + chi_fourier_abs2(chi, k - omega)?);
            let s = t / PI.sqrt();
            let im = 2.0 * t * t / PI.sqrt() * (dawson(s * (omega + k)) + dawson(s * (omega - k)));
            Ok(Complex64::new(re, im))
        }
        SwitchingFunction::Window { start, end } => {
            let len = end - start;
            Ok(triangle_transform(len, omega + k) + triangle_transform(len, omega - k))
        }
        SwitchingFunction::Sampled { .. } => q_kernel_by_autocorrelation(chi, k, omega),
    }
}

/// Q(k, Ω) by direct quadrature of 2∫₀^U W(u) e^{iΩu} cos(ku) du with the
/// autocorrelation evaluated numerically where needed. Slow; the closed forms
/// in [`q_kernel`] are checked against it.
pub fn q_kernel_by_autocorrelation(chi: &SwitchingFunction, k: f64, omega: f64) -> Result<Complex64> {
    let upper = match chi {
        // W(u)/W(0) < 1e-17 beyond this
        SwitchingFunction::Gaussian { width, .. } => width * (4.0 * 40.0 / PI).sqrt(),
        _ => chi.duration(),
    };
    let fastest = k + omega.abs();
    let pts = oscillation_breakpoints(0.0, upper, fastest, upper / 16.0);
    let w_err = std::cell::RefCell::new(None);
    let v = integrate_partitioned(
        |u: f64| {
            let w = autocorrelation(chi, u).unwrap_or_else(|e| {
                w_err.borrow_mut().get_or_insert(e);
                0.0
            });
            Complex64::from_polar(2.0 * w * (k * u).cos(), omega * u)
        },
        &pts,
        &Tolerance::default(),
    );
    if let Some(e) = w_err.into_inner() {
        return Err(e);
    }
    v
}

// ∫₀^L (L − u) e^{ibu} du = 2 sin²(bL/2)/b² + i (bL − sin bL)/b²
fn triangle_transform(len: f64, b: f64) -> Complex64 {
    let x = b * len;
    if x.abs() < 1e-3 {
        let x2 = x * x;
        let re = len * len * (0.5 - x2 / 24.0 + x2 * x2 / 720.0);
        let im = len * len * x * (1.0 / 6.0 - x2 / 120.0 + x2 * x2 / 5040.0);
        return Complex64::new(re, im);
    }
    let s = (0.5 * x).sin();
    Complex64::new(2.0 * s * s / (b * b), (x - x.sin()) / (b * b))
}

/// Dawson's integral F(x) = e^{−x²} ∫₀^x e^{t²} dt.
///
/// Maclaurin series near the origin, Rybicki's exponentially convergent
/// sampling sum elsewhere.
pub fn dawson(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 0.2 {
        // Σ (−1)ⁿ 2ⁿ x^{2n+1} / (2n+1)!!
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        for n in 1..30 {
            term *= -2.0 * x2 / (2 * n + 1) as f64;
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    if ax > 1e8 {
        return 0.5 / x;
    }
    const H: f64 = 0.2;
    let n0 = 2.0 * (0.5 * ax / H).round();
    let mut sum = 0.0;
    let mut n = -41.0;
    while n <= 41.0 {
        let m = n0 + n;
        let d = ax - m * H;
        sum += (-d * d).exp() / m;
        n += 2.0;
    }
    (sum / PI.sqrt()).copysign(x)
}
