//! Transition rate in the adiabatic limit.

use std::f64::consts::PI;

use super::coupling::CouplingModel;
use super::evolve::{flip_probability, InitialState};
use super::switching::SwitchingFunction;
use crate::atom::{phi_fourier_closed, OrbitalParams};
use crate::error::{Error, Result};
use crate::numerics::Tolerance;

/// Closed-form adiabatic flip rate of the excited spin,
/// Ṗ(Ω) = q²|Ω|³ φ̃(|Ω|)² / (6π³) for Ω < 0 and 0 otherwise.
///
/// Written out with ω = 2β arctan(|Ω|/2Z) this is
/// 8q²Z²(1−β²)(Z sin ω − β|Ω| cos ω)² / (3πβ²(2β−1)²|Ω|³(1+Ω²/4Z²)^{2β}).
/// The limit Ω → 0⁻ is zero.
pub fn adiabatic_rate_closed(params: &OrbitalParams, q: f64, omega: f64) -> Result<f64> {
    if !omega.is_finite() {
        return Err(Error::domain(format!("gap must be finite, got {omega}")));
    }
    if omega >= 0.0 {
        return Ok(0.0);
    }
    let k = -omega;
    let phi = phi_fourier_closed(params, k)?;
    Ok(q * q * k.powi(3) * phi * phi / (6.0 * PI.powi(3)))
}

/// Numerical adiabatic rate with its supporting data.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    /// Extrapolated lim P/T.
    pub rate: f64,
    /// (T, P/T) on the probed durations.
    pub sequence: Vec<(f64, f64)>,
}

/// Excited-state flip probability per unit time for Gaussian switchings of
/// widths `widths`, extrapolated to infinite width.
///
/// P/T is a Gaussian smoothing, of variance π/(2T²), of a smooth spectrum, so
/// it approaches its limit with corrections in powers of 1/T². The sequence is
/// extrapolated by polynomial interpolation in 1/T² evaluated at 0. The
/// sequence must approach its limit monotonically; otherwise the raw
/// sequence is returned inside the error.
pub fn adiabatic_rate_numeric(
    model: &CouplingModel,
    omega: f64,
    widths: &[f64],
    tol: &Tolerance,
) -> Result<RateEstimate> {
    if widths.len() < 3 {
        return Err(Error::domain("need at least three switching widths"));
    }
    if widths.windows(2).any(|w| !(w[1] > w[0])) || !(widths[0] > 0.0) {
        return Err(Error::domain(
            "switching widths must be positive and strictly increasing",
        ));
    }
    let mut sequence = Vec::with_capacity(widths.len());
    for &t in widths {
        let chi = SwitchingFunction::gaussian(t)?;
        let p = flip_probability(model, &chi, omega, InitialState::Excited, tol)?;
        sequence.push((t, p / t));
    }

    let diffs: Vec<f64> = sequence.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let scale = sequence.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
    // differences at rounding level carry no sign information
    let noise = 1e-12 * scale;
    let signs: Vec<f64> = diffs.iter().filter(|d| d.abs() > noise).map(|d| d.signum()).collect();
    if signs.windows(2).any(|s| s[0] != s[1]) {
        return Err(Error::Extrapolation {
            reason: "P/T is not monotone in T".into(),
            sequence,
        });
    }
    if diffs.windows(2).any(|d| d[1].abs() > d[0].abs() && d[1].abs() > noise) {
        return Err(Error::Extrapolation {
            reason: "successive changes of P/T are not shrinking".into(),
            sequence,
        });
    }

    let h: Vec<f64> = widths.iter().map(|t| 1.0 / (t * t)).collect();
    let y: Vec<f64> = sequence.iter().map(|s| s.1).collect();
    let rate = neville_at_zero(&h, &y);
    if !rate.is_finite() {
        return Err(Error::Extrapolation {
            reason: "extrapolated value is not finite".into(),
            sequence,
        });
    }
    Ok(RateEstimate { rate, sequence })
}

/// Value at x = 0 of the polynomial through (xs[i], ys[i]).
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    let mut p = ys.to_vec();
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (xs[i], xs[i + m]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::make_orbital;
    use crate::detector::coupling::Smearing;
    use crate::FINE_STRUCTURE;

    #[test]
    fn neville_reproduces_polynomials() {
        let xs = [0.5, 0.25, 0.125, 0.0625];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + 0.5 * x * x - x * x * x).collect();
        assert!((neville_at_zero(&xs, &ys) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn closed_rate_vanishes_for_non_negative_gap() {
        let p = OrbitalParams::new(1, 1, FINE_STRUCTURE).unwrap();
        assert_eq!(adiabatic_rate_closed(&p, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(adiabatic_rate_closed(&p, 1.0, 0.0).unwrap(), 0.0);
        assert!(adiabatic_rate_closed(&p, 1.0, -1.0).unwrap() > 0.0);
    }

    #[test]
    fn closed_rate_tends_to_zero_at_small_gap() {
        let p = OrbitalParams::new(1, 1, FINE_STRUCTURE).unwrap();
        let mut last = f64::INFINITY;
        for w in [1e-1, 1e-2, 1e-3, 1e-4] {
            let r = adiabatic_rate_closed(&p, 1.0, -w).unwrap();
            assert!(r < last && r >= 0.0);
            last = r;
        }
        assert!(last < 1e-15);
    }

    #[test]
    fn closed_rate_is_quadratic_in_charge() {
        let p = OrbitalParams::new(1, 1, FINE_STRUCTURE).unwrap();
        let a = adiabatic_rate_closed(&p, 0.3, -0.7).unwrap();
        let b = adiabatic_rate_closed(&p, 0.6, -0.7).unwrap();
        assert!((b / a - 4.0).abs() < 1e-14);
    }

    #[test]
    fn numeric_rate_input_validation() {
        let o = make_orbital(1, 1, FINE_STRUCTURE).unwrap();
        let m = CouplingModel::spin_magnetic(1.0, Smearing::from_orbital(&o).unwrap()).unwrap();
        let tol = Tolerance::default();
        assert!(adiabatic_rate_numeric(&m, -1.0, &[10.0, 20.0], &tol).is_err());
        assert!(adiabatic_rate_numeric(&m, -1.0, &[10.0, 5.0, 20.0], &tol).is_err());
    }
}
