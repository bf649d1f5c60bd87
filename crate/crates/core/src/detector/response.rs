//! Vacuum response functionals L, M and K̄.
//!
//! Each is a single wavenumber integral
//! (1/(2π)³) ∫₀^∞ dk k^γ |s̃(k)|² S(k), where s̃ is the smearing transform and
//! S a switching factor: |χ̃(k+Ω)|² for L, Q(k, Ω) for M and
//! χ̃*(k−Ω)χ̃(k+Ω) for K̄.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::coupling::CouplingModel;
use super::switching::{chi_fourier, chi_fourier_abs2, q_kernel, SwitchingFunction};
use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate_tail_from, oscillation_breakpoints, QuadValue};
use crate::numerics::Tolerance;

/// The functionals that determine the leading-order state map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseSet {
    /// L(Ω)
    pub l_plus: f64,
    /// L(−Ω)
    pub l_minus: f64,
    /// L(0)
    pub l_zero: f64,
    /// M(Ω)
    pub m: Complex64,
    /// K̄(Ω), Unruh–DeWitt models only.
    pub k: Option<Complex64>,
}

// Breakpoints for the k integral. They depend on |Ω| only, so L(±Ω), L(0)
// and M(Ω) at Ω = 0 follow identical refinement paths.
fn k_breakpoints(model: &CouplingModel, chi: &SwitchingFunction, omega: f64) -> (Vec<f64>, f64) {
    let k_scale = model.smearing().k_scale();
    let w = omega.abs();
    let mut end = 8.0 * k_scale;
    let mut pts = vec![0.0];
    match chi {
        SwitchingFunction::Gaussian { width, .. } => {
            let sigma = (0.5 * PI).sqrt() / width;
            for center in [0.0, w] {
                for j in -12..=12 {
                    let p = center + j as f64 * sigma;
                    if p > 0.0 {
                        pts.push(p);
                    }
                }
            }
            end = end.max(w + 13.0 * sigma);
            let coarse = oscillation_breakpoints(0.0, end, 0.0, 0.25 * k_scale);
            pts.extend(coarse);
        }
        _ => {
            end = end.max(w + 8.0 * k_scale);
            let len = chi.duration();
            pts.extend(oscillation_breakpoints(0.0, end, len, 0.25 * k_scale));
        }
    }
    pts.push(end);
    pts.retain(|&p| p <= end);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    (pts, k_scale)
}

fn k_integral<T, F>(
    model: &CouplingModel,
    chi: &SwitchingFunction,
    omega: f64,
    tol: &Tolerance,
    switching: F,
) -> Result<T>
where
    T: QuadValue,
    F: Fn(f64) -> Result<T>,
{
    let (pts, scale) = k_breakpoints(model, chi, omega);
    let gamma = model.gamma();
    let smearing = model.smearing();
    let first_err: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |k: f64| -> T {
        let weight = smearing.transform(k, tol).and_then(|s| {
            let kg = k.powi(gamma);
            switching(k).map(|sw| sw * (kg * s * s))
        });
        match weight {
            Ok(v) => v,
            Err(e) => {
                first_err.borrow_mut().get_or_insert(e);
                T::zero()
            }
        }
    };
    let v: T = integrate_tail_from(&integrand, &pts, scale, tol)?;
    if let Some(e) = first_err.into_inner() {
        return Err(e);
    }
    Ok(v * (1.0 / (2.0 * PI).powi(3)))
}

fn check_gap(omega: f64) -> Result<()> {
    if omega.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("gap must be finite, got {omega}")))
    }
}

/// L(Ω) = (1/(2π)³) ∫ dk k^γ |s̃|² |χ̃(k+Ω)|².
pub fn response_l(model: &CouplingModel, chi: &SwitchingFunction, omega: f64, tol: &Tolerance) -> Result<f64> {
    check_gap(omega)?;
    k_integral(model, chi, omega, tol, |k| chi_fourier_abs2(chi, k + omega))
}

/// M(Ω) = (1/(2π)³) ∫ dk k^γ |s̃|² Q(k, Ω).
pub fn response_m(model: &CouplingModel, chi: &SwitchingFunction, omega: f64, tol: &Tolerance) -> Result<Complex64> {
    check_gap(omega)?;
    k_integral(model, chi, omega, tol, |k| q_kernel(chi, k, omega))
}

/// K̄(Ω) = (1/(2π)³) ∫ dk k^γ |s̃|² χ̃*(k−Ω) χ̃(k+Ω). Only the Unruh–DeWitt
/// models have this term.
pub fn response_k(model: &CouplingModel, chi: &SwitchingFunction, omega: f64, tol: &Tolerance) -> Result<Complex64> {
    if !model.kind().is_udw() {
        return Err(Error::ModelMismatch(
            "the K functional exists only for Unruh-DeWitt couplings".into(),
        ));
    }
    check_gap(omega)?;
    k_integral(model, chi, omega, tol, |k| {
        Ok(chi_fourier(chi, k - omega)?.conj() * chi_fourier(chi, k + omega)?)
    })
}

/// All functionals needed by the state map of `model`.
pub fn response_set(
    model: &CouplingModel,
    chi: &SwitchingFunction,
    omega: f64,
    tol: &Tolerance,
) -> Result<ResponseSet> {
    let l_plus = response_l(model, chi, omega, tol)?;
    let l_minus = response_l(model, chi, -omega, tol)?;
    let l_zero = response_l(model, chi, 0.0, tol)?;
    let m = response_m(model, chi, omega, tol)?;
    let k = if model.kind().is_udw() {
        Some(response_k(model, chi, omega, tol)?)
    } else {
        None
    };
    Ok(ResponseSet {
        l_plus,
        l_minus,
        l_zero,
        m,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::make_orbital;
    use crate::detector::coupling::Smearing;
    use crate::FINE_STRUCTURE;

    fn spin() -> CouplingModel {
        let o = make_orbital(1, 1, FINE_STRUCTURE).unwrap();
        CouplingModel::spin_magnetic(1.0, Smearing::from_orbital(&o).unwrap()).unwrap()
    }

    #[test]
    fn m_at_zero_gap_equals_l_exactly() {
        let model = spin();
        let tol = Tolerance::default();
        for chi in [
            SwitchingFunction::gaussian(10.0).unwrap(),
            SwitchingFunction::window(0.0, 5.0).unwrap(),
        ] {
            let l = response_l(&model, &chi, 0.0, &tol).unwrap();
            let m = response_m(&model, &chi, 0.0, &tol).unwrap();
            assert_eq!(m.re, l);
            assert_eq!(m.im, 0.0);
        }
    }

    #[test]
    fn k_rejected_for_spin() {
        let chi = SwitchingFunction::gaussian(10.0).unwrap();
        let r = response_k(&spin(), &chi, 0.5, &Tolerance::default());
        assert!(matches!(r, Err(Error::ModelMismatch(_))));
    }

    #[test]
    fn positive_gap_is_suppressed() {
        let model = spin();
        let chi = SwitchingFunction::gaussian(20.0).unwrap();
        let tol = Tolerance::default();
        let up = response_l(&model, &chi, 5.0, &tol).unwrap();
        let down = response_l(&model, &chi, -1.0, &tol).unwrap();
        assert!(up >= 0.0 && down > 0.0);
        assert!(up < 1e-6 * down);
    }

    #[test]
    fn real_part_of_m_averages_l() {
        let model = spin();
        let tol = Tolerance::default();
        for chi in [
            SwitchingFunction::gaussian(10.0).unwrap(),
            SwitchingFunction::window(0.0, 8.0).unwrap(),
        ] {
            let w = -0.8;
            let m = response_m(&model, &chi, w, &tol).unwrap();
            let lp = response_l(&model, &chi, w, &tol).unwrap();
            let lm = response_l(&model, &chi, -w, &tol).unwrap();
            assert!(((m.re - 0.5 * (lp + lm)) / m.re).abs() < 1e-9);
        }
    }
}
