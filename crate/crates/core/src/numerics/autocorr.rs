//! Switching-function autocorrelation W(u) = ∫dt χ(t) χ(t − u).

use crate::detector::SwitchingFunction;
use crate::error::Result;

use super::quadrature::integrate_partitioned;
use super::Tolerance;

/// W(u) = ∫dt χ(t)χ(t−u); even in u, maximal at u = 0, independent of any
/// time shift of χ. Closed forms are used for the Gaussian and window
/// profiles; sampled profiles are integrated numerically.
pub fn autocorrelation(chi: &SwitchingFunction, u: f64) -> Result<f64> {
    match chi {
        SwitchingFunction::Gaussian { width, .. } => {
            let t = *width;
            Ok(t * (-std::f64::consts::PI * u * u / (4.0 * t * t)).exp())
        }
        SwitchingFunction::Window { start, end } => Ok(((end - start) - u.abs()).max(0.0)),
        SwitchingFunction::Sampled { times, .. } => {
            let lo = times[0];
            let hi = times[times.len() - 1];
            let a = lo.max(lo + u);
            let b = hi.min(hi + u);
            if b <= a {
                return Ok(0.0);
            }
            // the product is piecewise quadratic between the merged knots
            let mut pts: Vec<f64> = times
                .iter()
                .flat_map(|&t| [t, t + u])
                .filter(|&t| t >= a && t <= b)
                .collect();
            pts.push(a);
            pts.push(b);
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            integrate_partitioned(|t: f64| chi.eval(t) * chi.eval(t - u), &pts, &Tolerance::default())
        }
    }
}
