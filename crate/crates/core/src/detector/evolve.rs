//! Qubit states and the leading-order state maps.

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;

use super::coupling::{CouplingKind, CouplingModel};
use super::response::{response_l, response_set, ResponseSet};
use super::switching::SwitchingFunction;
use crate::error::{Error, Result};
use crate::fieldgeom::bloch_density;
use crate::numerics::Tolerance;

/// Size of the Bloch-vector change beyond which the leading-order map is
/// no longer trusted.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;

/// A qubit state given by its Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    a: Vector3<f64>,
}

impl QubitState {
    /// Rejects vectors outside the Bloch ball.
    pub fn new(a: Vector3<f64>) -> Result<Self> {
        if !(a.norm() <= 1.0 + 1e-12) {
            return Err(Error::domain(format!("Bloch vector norm {} exceeds 1", a.norm())));
        }
        Ok(Self { a })
    }

    /// |↑⟩, the ground state for a negative gap.
    pub fn up() -> Self {
        Self { a: Vector3::z() }
    }

    /// |↓⟩, the excited state for a negative gap.
    pub fn down() -> Self {
        Self { a: -Vector3::z() }
    }

    pub fn bloch(&self) -> Vector3<f64> {
        self.a
    }

    /// ρ = (𝟙 + a·σ)/2. Hermitian with unit trace by construction.
    pub fn density_matrix(&self) -> Matrix2<Complex64> {
        bloch_density(&self.a)
    }
}

/// Result of [`evolve_leading_order`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evolution {
    /// State after the interaction. Outside the perturbative regime the
    /// Bloch vector may leave the unit ball.
    pub state: QubitState,
    pub responses: ResponseSet,
    /// Change of the Bloch vector.
    pub delta: Vector3<f64>,
    /// Whether |δa| stayed below [`PERTURBATIVE_LIMIT`].
    pub perturbative: bool,
}

/// Change of the Bloch vector produced by the leading-order map of `kind`
/// with prefactor `c` (see [`CouplingModel::prefactor`]).
pub fn bloch_update(kind: CouplingKind, c: f64, a: &Vector3<f64>, r: &ResponseSet) -> Result<Vector3<f64>> {
    let (m, lz) = (r.m, r.l_zero);
    // grouped so the poles a_z = ±1 avoid cancellation between L₊ and L₋
    let z = -2.0 * c * ((a.z - 1.0) * r.l_plus + (a.z + 1.0) * r.l_minus);
    let (x, y) = match kind {
        CouplingKind::SpinMagnetic => (
            -2.0 * c * (a.x * (lz + m.re) + a.y * m.im),
            -2.0 * c * (a.y * (lz + m.re) - a.x * m.im),
        ),
        _ => {
            let k =
                r.k.ok_or_else(|| Error::ModelMismatch("Unruh-DeWitt map needs the K functional".into()))?;
            let (diff, sum) = (m - k, m + k);
            (
                -2.0 * c * (a.x * diff.re + a.y * sum.im),
                -2.0 * c * (a.y * sum.re - a.x * diff.im),
            )
        }
    };
    Ok(Vector3::new(x, y, z))
}

/// Leading-order evolution of `state` under `model` with switching `chi` and
/// gap `omega`.
pub fn evolve_leading_order(
    model: &CouplingModel,
    chi: &SwitchingFunction,
    omega: f64,
    state: &QubitState,
    tol: &Tolerance,
) -> Result<Evolution> {
    let responses = response_set(model, chi, omega, tol)?;
    let delta = bloch_update(model.kind(), model.prefactor(), &state.a, &responses)?;
    let perturbative = delta.norm() <= PERTURBATIVE_LIMIT;
    if !perturbative {
        log::warn!(
            "coupling too large for the leading-order map: |δa| = {:.3e} > {PERTURBATIVE_LIMIT}",
            delta.norm()
        );
    }
    Ok(Evolution {
        state: QubitState { a: state.a + delta },
        responses,
        delta,
        perturbative,
    })
}

/// Initial eigenstate for a flip probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// a = +e_z (spin up)
    Ground,
    /// a = −e_z (spin down)
    Excited,
}

impl InitialState {
    pub fn state(self) -> QubitState {
        match self {
            InitialState::Ground => QubitState::up(),
            InitialState::Excited => QubitState::down(),
        }
    }
}

/// Probability that the spin ends in the other eigenstate:
/// 2C·L(−Ω) from the ground state and 2C·L(Ω) from the excited state, where
/// C is the model's prefactor.
pub fn flip_probability(
    model: &CouplingModel,
    chi: &SwitchingFunction,
    omega: f64,
    initial: InitialState,
    tol: &Tolerance,
) -> Result<f64> {
    let gap = match initial {
        InitialState::Ground => -omega,
        InitialState::Excited => omega,
    };
    Ok(2.0 * model.prefactor() * response_l(model, chi, gap, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::make_orbital;
    use crate::detector::coupling::Smearing;
    use crate::FINE_STRUCTURE;
    use std::f64::consts::PI;

    fn smearing() -> Smearing {
        Smearing::from_orbital(&make_orbital(1, 1, FINE_STRUCTURE).unwrap()).unwrap()
    }

    #[test]
    fn state_validation() {
        assert!(QubitState::new(Vector3::new(0.8, 0.7, 0.0)).is_err());
        assert!(QubitState::new(Vector3::new(0.6, 0.8, 0.0)).is_ok());
    }

    #[test]
    fn density_matrix_structure() {
        let s = QubitState::new(Vector3::new(0.3, -0.2, 0.5)).unwrap();
        let rho = s.density_matrix();
        assert_eq!(rho.trace(), Complex64::new(1.0, 0.0));
        assert_eq!(rho, rho.adjoint());
    }

    #[test]
    fn maximally_mixed_state_is_fixed_without_gap() {
        let model = CouplingModel::spin_magnetic(0.5, smearing()).unwrap();
        let chi = SwitchingFunction::gaussian(5.0).unwrap();
        let e = evolve_leading_order(
            &model,
            &chi,
            0.0,
            &QubitState::new(Vector3::zeros()).unwrap(),
            &Tolerance::default(),
        )
        .unwrap();
        assert_eq!(e.state.bloch(), Vector3::zeros());
        assert!(e.perturbative);
    }

    #[test]
    fn zero_coupling_never_flips() {
        let model = CouplingModel::spin_magnetic(0.0, smearing()).unwrap();
        let chi = SwitchingFunction::gaussian(10.0).unwrap();
        let p = flip_probability(&model, &chi, -1.0, InitialState::Ground, &Tolerance::default()).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn switching_can_excite_the_ground_state() {
        let model = CouplingModel::spin_magnetic(1.0, smearing()).unwrap();
        let chi = SwitchingFunction::gaussian(10.0).unwrap();
        let p = flip_probability(&model, &chi, -1.0, InitialState::Ground, &Tolerance::default()).unwrap();
        assert!(p > 0.0);
    }

    #[test]
    fn large_coupling_is_flagged() {
        let model = CouplingModel::spin_magnetic(2000.0, smearing()).unwrap();
        let chi = SwitchingFunction::gaussian(10.0).unwrap();
        let e = evolve_leading_order(&model, &chi, -1.0, &QubitState::down(), &Tolerance::default()).unwrap();
        assert!(!e.perturbative);
    }

    #[test]
    fn udw_update_needs_k() {
        let r = ResponseSet {
            l_plus: 1.0,
            l_minus: 1.0,
            l_zero: 1.0,
            m: Complex64::new(1.0, 0.0),
            k: None,
        };
        assert!(bloch_update(CouplingKind::UdwAmplitude, PI, &Vector3::x(), &r).is_err());
    }
}
