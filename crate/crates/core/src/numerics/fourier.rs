//! Three-dimensional Fourier transform of spherically symmetric profiles.

use std::f64::consts::PI;

use super::quadrature::{integrate, integrate_tail_from};
use super::{origin_graded_points, RadialFunction, Tolerance};
use crate::error::{Error, Result};

// Partial sums kept for the epsilon table.
const WYNN_WINDOW: usize = 24;

/// φ̃(k) = ∫d³x f(|x|) e^{ik·x} = (4π/k) ∫₀^∞ r sin(kr) f(r) dr.
///
/// When half a period π/k is shorter than the profile's decay scale the
/// integral is split at the zeros of sin(kr); the resulting alternating series
/// is summed directly when its terms die out and accelerated with Wynn's
/// epsilon algorithm otherwise. Failing both, a non-convergence error is
/// returned rather than a truncated sum.
pub fn spherical_fourier(f: &RadialFunction, k: f64, tol: &Tolerance) -> Result<f64> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::domain(format!("wavenumber must be finite and >= 0, got {k}")));
    }
    let scale = f.decay_scale();
    if k == 0.0 {
        let v = integrate_tail_from(&|r: f64| r * r * f.eval(r), &origin_graded_points(scale), scale, tol)?;
        return Ok(4.0 * PI * v);
    }

    let integrand = |r: f64| r * (k * r).sin() * f.eval(r);
    let half_period = PI / k;
    if half_period >= scale {
        let v = integrate_tail_from(&integrand, &origin_graded_points(scale), scale, tol)?;
        return Ok(4.0 * PI * v / k);
    }

    let mut partial = Vec::with_capacity(64);
    let mut sum = 0.0;
    let mut quiet = 0;
    let mut last_estimate: Option<f64> = None;
    let mut agreed = 0;
    let max_panels = tol.max_subdivisions.max(16);
    for n in 0..max_panels {
        let a = n as f64 * half_period;
        let b = a + half_period;
        let term = integrate(integrand, a, b, tol)?;
        sum += term;
        partial.push(sum);
        let target = tol.target(sum);

        if term.abs() <= 1e-3 * target {
            quiet += 1;
            if quiet >= 3 {
                return Ok(4.0 * PI * sum / k);
            }
        } else {
            quiet = 0;
        }

        if partial.len() >= 8 {
            let start = partial.len().saturating_sub(WYNN_WINDOW);
            let estimate = wynn_epsilon(&partial[start..]);
            if let Some(prev) = last_estimate {
                if (estimate - prev).abs() <= 0.1 * tol.target(estimate) {
                    agreed += 1;
                    if agreed >= 2 {
                        return Ok(4.0 * PI * estimate / k);
                    }
                } else {
                    agreed = 0;
                }
            }
            last_estimate = Some(estimate);
        }
    }
    Err(Error::non_convergence(
        "spherical Fourier transform",
        format!("k = {k}: {max_panels} half-period panels without a converged sum (last partial sum {sum:e})"),
    ))
}

/// Limit estimate of a sequence of partial sums by Wynn's epsilon algorithm.
///
/// Returns the deepest even-column entry; for fewer than three terms the last
/// partial sum is returned unchanged.
pub fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    if n < 3 {
        return sums.last().copied().unwrap_or(0.0);
    }
    // prev holds column j-1, cur column j; column -1 is zero.
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = sums[n - 1];
    let mut column = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff == 0.0 {
                // sequence already converged at this depth
                return if column % 2 == 0 { cur[i + 1] } else { best };
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        column += 1;
        if column % 2 == 0 {
            if let Some(&v) = next.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
        prev = cur;
        cur = next;
    }
    best
}
