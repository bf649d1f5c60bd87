//! Polarization geometry of the magnetic field and the angular integrals of
//! the second-order qubit map.
//!
//! For a wavevector direction k̂(θ, φ) the transverse electric polarizations
//! are E₁ = (cosθ cosφ, cosθ sinφ, −sinθ) and E₂ = (−sinφ, cosφ, 0); the
//! magnetic ones follow from εₛ = k̂ × Eₛ, so ε₁ = E₂ and ε₂ = −E₁.
//!
//! The second part of the module integrates εₛⁱεₛʲ Xᵢⱼ over the sphere of
//! directions, where X is one of the three operator orderings produced by the
//! Dyson expansion with interaction-picture Pauli matrices
//! σₓ(t) = cos(Ωt)σₓ − sin(Ωt)σ_y, σ_y(t) = sin(Ωt)σₓ + cos(Ωt)σ_y, σ_z(t) = σ_z.
//! Quadrature and closed forms are both exposed so each checks the other.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::quadrature::gauss_legendre;

/// Orthonormal frame attached to a propagation direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationFrame {
    pub khat: Vector3<f64>,
    pub e1: Vector3<f64>,
    pub e2: Vector3<f64>,
    pub eps1: Vector3<f64>,
    pub eps2: Vector3<f64>,
}

impl PolarizationFrame {
    /// Magnetic polarization vector for s ∈ {1, 2}.
    pub fn eps(&self, s: u8) -> Vector3<f64> {
        if s == 1 {
            self.eps1
        } else {
            self.eps2
        }
    }
}

/// Frame for the direction with polar angle `theta` and azimuth `phi`.
/// The poles are rejected because the azimuthal basis is undefined there.
pub fn polarization_frame(theta: f64, phi: f64) -> Result<PolarizationFrame> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::domain(format!(
            "polar angle must lie strictly inside (0, π), got {theta}"
        )));
    }
    if !phi.is_finite() {
        return Err(Error::domain("azimuth must be finite"));
    }
    Ok(frame_unchecked(theta, phi))
}

fn frame_unchecked(theta: f64, phi: f64) -> PolarizationFrame {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let khat = Vector3::new(st * cp, st * sp, ct);
    let e1 = Vector3::new(ct * cp, ct * sp, -st);
    let e2 = Vector3::new(-sp, cp, 0.0);
    PolarizationFrame {
        khat,
        e1,
        e2,
        eps1: khat.cross(&e1),
        eps2: khat.cross(&e2),
    }
}

/// Operator ordering of a second-order Dyson term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AngularTerm {
    /// σᵢ(t) σⱼ(t′) ρ θ(t − t′)
    U2Rho,
    /// ρ σᵢ(t) σⱼ(t′) θ(t′ − t)
    RhoU2,
    /// σⱼ(t′) ρ σᵢ(t)
    U1RhoU1,
}

impl AngularTerm {
    pub const ALL: [AngularTerm; 3] = [AngularTerm::U2Rho, AngularTerm::RhoU2, AngularTerm::U1RhoU1];

    pub fn name(self) -> &'static str {
        match self {
            AngularTerm::U2Rho => "U2rho",
            AngularTerm::RhoU2 => "rhoU2",
            AngularTerm::U1RhoU1 => "U1rhoU1",
        }
    }
}

/// Heaviside step with θ(0) = 1/2.
pub fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli() -> [Matrix2<Complex64>; 3] {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        Matrix2::new(o, one, one, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(one, o, o, -one),
    ]
}

/// Interaction-picture Pauli matrices at time `t` for gap `omega`.
pub fn pauli_at(omega: f64, t: f64) -> [Matrix2<Complex64>; 3] {
    let [sx, sy, sz] = pauli();
    let (s, co) = (omega * t).sin_cos();
    [sx * c(co, 0.0) - sy * c(s, 0.0), sx * c(s, 0.0) + sy * c(co, 0.0), sz]
}

/// ρ = (𝟙 + a·σ)/2.
pub fn bloch_density(a: &Vector3<f64>) -> Matrix2<Complex64> {
    let [sx, sy, sz] = pauli();
    (Matrix2::identity() + sx * c(a.x, 0.0) + sy * c(a.y, 0.0) + sz * c(a.z, 0.0)) * c(0.5, 0.0)
}

fn check_inputs(s: u8, a: &Vector3<f64>, values: &[f64]) -> Result<()> {
    if s != 1 && s != 2 {
        return Err(Error::domain(format!("polarization index must be 1 or 2, got {s}")));
    }
    if !(a.norm() <= 1.0 + 1e-12) {
        return Err(Error::domain(format!("Bloch vector norm {} exceeds 1", a.norm())));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("frequency and times must be finite"));
    }
    Ok(())
}

/// Quadrature grid over directions: Gauss–Legendre in θ, trapezoid in φ.
#[derive(Debug, Clone)]
pub struct AngularGrid {
    nodes: Vec<(f64, f64, f64)>,
}

impl AngularGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 1 || n_phi < 1 {
            return Err(Error::domain("angular grid needs at least one node per axis"));
        }
        let (x, w) = gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        for (xi, wi) in x.iter().zip(&w) {
            let theta = 0.5 * PI * (xi + 1.0);
            let wt = 0.5 * PI * wi * theta.sin();
            for j in 0..n_phi {
                nodes.push((theta, j as f64 * dphi, wt * dphi));
            }
        }
        Ok(Self { nodes })
    }

    /// ∫dθ dφ sinθ εₛ ⊗ εₛ.
    pub fn polarization_tensor(&self, s: u8) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        for &(theta, phi, w) in &self.nodes {
            let e = frame_unchecked(theta, phi).eps(s);
            m += e * e.transpose() * w;
        }
        m
    }
}

impl Default for AngularGrid {
    fn default() -> Self {
        Self::new(64, 64).expect("static grid size")
    }
}

/// ∫dθ dφ sinθ εₛⁱεₛʲ Xᵢⱼ(t, t′) by quadrature on `grid`.
pub fn angular_pauli_integral_on(
    grid: &AngularGrid,
    term: AngularTerm,
    s: u8,
    omega: f64,
    t: f64,
    tprime: f64,
    a: &Vector3<f64>,
) -> Result<Matrix2<Complex64>> {
    check_inputs(s, a, &[omega, t, tprime])?;
    let tensor = grid.polarization_tensor(s);
    Ok(contract(&tensor, term, omega, t, tprime, a))
}

/// [`angular_pauli_integral_on`] with the default 64 × 64 grid.
pub fn angular_pauli_integral(
    term: AngularTerm,
    s: u8,
    omega: f64,
    t: f64,
    tprime: f64,
    a: &Vector3<f64>,
) -> Result<Matrix2<Complex64>> {
    angular_pauli_integral_on(&AngularGrid::default(), term, s, omega, t, tprime, a)
}

// The angular integral only touches the polarization tensor, so the operator
// products are contracted with the integrated tensor.
fn contract(
    tensor: &Matrix3<f64>,
    term: AngularTerm,
    omega: f64,
    t: f64,
    tprime: f64,
    a: &Vector3<f64>,
) -> Matrix2<Complex64> {
    let st = pauli_at(omega, t);
    let sp = pauli_at(omega, tprime);
    let rho = bloch_density(a);
    let mut out = Matrix2::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let w = tensor[(i, j)];
            if w == 0.0 {
                continue;
            }
            let x = match term {
                AngularTerm::U2Rho => st[i] * sp[j] * rho * c(heaviside(t - tprime), 0.0),
                AngularTerm::RhoU2 => rho * st[i] * sp[j] * c(heaviside(tprime - t), 0.0),
                AngularTerm::U1RhoU1 => sp[j] * rho * st[i],
            };
            out += x * c(w, 0.0);
        }
    }
    out
}

/// Closed form of [`angular_pauli_integral`].
pub fn angular_pauli_closed(
    term: AngularTerm,
    s: u8,
    omega: f64,
    t: f64,
    tprime: f64,
    a: &Vector3<f64>,
) -> Result<Matrix2<Complex64>> {
    check_inputs(s, a, &[omega, t, tprime])?;
    let d = t - tprime;
    let e = Complex64::from_polar(1.0, omega * d);
    let ei = e.conj();
    let two = c(2.0, 0.0);
    let up = c(1.0 + a.z, 0.0);
    let dn = c(1.0 - a.z, 0.0);
    let minus = c(a.x, -a.y);
    let plus = c(a.x, a.y);
    let m = match (term, s) {
        (AngularTerm::U2Rho, 1) => {
            Matrix2::new(up * e, minus * e, plus * ei, dn * ei) * c(2.0 * PI * heaviside(d), 0.0)
        }
        (AngularTerm::RhoU2, 1) => {
            Matrix2::new(up * e, minus * ei, plus * e, dn * ei) * c(2.0 * PI * heaviside(-d), 0.0)
        }
        (AngularTerm::U1RhoU1, 1) => Matrix2::new(dn * ei, c(0.0, 0.0), c(0.0, 0.0), up * e) * c(2.0 * PI, 0.0),
        (AngularTerm::U2Rho, _) => {
            let (f, g) = (two + e, two + ei);
            Matrix2::new(up * f, minus * f, plus * g, dn * g) * c(2.0 * PI / 3.0 * heaviside(d), 0.0)
        }
        (AngularTerm::RhoU2, _) => {
            let (f, g) = (two + e, two + ei);
            Matrix2::new(up * f, minus * g, plus * f, dn * g) * c(2.0 * PI / 3.0 * heaviside(-d), 0.0)
        }
        (AngularTerm::U1RhoU1, _) => {
            Matrix2::new(two * up + dn * ei, -two * minus, -two * plus, two * dn + up * e) * c(2.0 * PI / 3.0, 0.0)
        }
    };
    Ok(m)
}

/// Σₛ ∫dθ dφ sinθ εₛⁱεₛʲ Rᵢⱼ with R = σⱼ(t′)ρσᵢ(t) − σᵢ(t)σⱼ(t′)ρ θ(t−t′) − ρσᵢ(t)σⱼ(t′) θ(t′−t),
/// in closed form.
pub fn combined_r_matrix(omega: f64, t: f64, tprime: f64, a: &Vector3<f64>) -> Result<Matrix2<Complex64>> {
    check_inputs(1, a, &[omega, t, tprime])?;
    let d = t - tprime;
    let e = Complex64::from_polar(1.0, omega * d);
    let ei = e.conj();
    // e^{iΩ|Δ|}; at Δ = 0 both orderings give 1
    let ea = Complex64::from_polar(1.0, omega * d.abs());
    let one = c(1.0, 0.0);
    let diag = c(a.z, 0.0) * (e + ei) + e - ei;
    Ok(Matrix2::new(
        -diag,
        -c(a.x, -a.y) * (one + ea),
        -c(a.x, a.y) * (one + ea.conj()),
        diag,
    ) * c(8.0 * PI / 3.0, 0.0))
}

/// The same sum assembled from quadrature of the individual terms.
pub fn combined_r_by_quadrature(
    grid: &AngularGrid,
    omega: f64,
    t: f64,
    tprime: f64,
    a: &Vector3<f64>,
) -> Result<Matrix2<Complex64>> {
    check_inputs(1, a, &[omega, t, tprime])?;
    let mut total = Matrix2::zeros();
    for s in [1u8, 2] {
        let tensor = grid.polarization_tensor(s);
        total += contract(&tensor, AngularTerm::U1RhoU1, omega, t, tprime, a)
            - contract(&tensor, AngularTerm::U2Rho, omega, t, tprime, a)
            - contract(&tensor, AngularTerm::RhoU2, omega, t, tprime, a);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_abs(m: &Matrix2<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn equator_frame() {
        let f = polarization_frame(PI / 2.0, 0.0).unwrap();
        assert!((f.khat - Vector3::x()).norm() < 1e-15);
        assert!((f.e1 + Vector3::z()).norm() < 1e-15);
        assert!((f.e2 - Vector3::y()).norm() < 1e-15);
    }

    #[test]
    fn poles_rejected() {
        assert!(polarization_frame(0.0, 1.0).is_err());
        assert!(polarization_frame(PI, 1.0).is_err());
    }

    #[test]
    fn heaviside_midpoint() {
        assert_eq!(heaviside(0.0), 0.5);
        assert_eq!(heaviside(1e-300), 1.0);
        assert_eq!(heaviside(-1e-300), 0.0);
        assert_eq!(heaviside(0.0) + heaviside(-0.0), 1.0);
    }

    #[test]
    fn integrated_tensors() {
        let g = AngularGrid::default();
        let t1 = g.polarization_tensor(1);
        let t2 = g.polarization_tensor(2);
        let e1 = Matrix3::from_diagonal(&Vector3::new(2.0 * PI, 2.0 * PI, 0.0));
        let e2 = Matrix3::from_diagonal(&Vector3::new(2.0 * PI / 3.0, 2.0 * PI / 3.0, 8.0 * PI / 3.0));
        assert!((t1 - e1).norm() < 1e-12);
        assert!((t2 - e2).norm() < 1e-12);
        assert!((t1 + t2 - Matrix3::identity() * (8.0 * PI / 3.0)).norm() < 1e-12);
    }

    #[test]
    fn gapless_spin_flip_term() {
        // s = 1, σρσ with Ω = 0 and a = e_z: the (2,2) entry carries 2π·(1 + a_z)
        let m = angular_pauli_integral(AngularTerm::U1RhoU1, 1, 0.0, 0.3, -0.2, &Vector3::z()).unwrap();
        let expect = Matrix2::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(4.0 * PI, 0.0));
        assert!(max_abs(&(m - expect)) < 1e-12);
    }

    #[test]
    fn coincident_times_use_half_step() {
        let m = angular_pauli_integral(AngularTerm::U2Rho, 2, 0.0, 0.4, 0.4, &Vector3::zeros()).unwrap();
        let expect = Matrix2::identity() * c(PI, 0.0);
        assert!(max_abs(&(m - expect)) < 1e-12);
    }

    #[test]
    fn combined_without_bloch_vector() {
        let (w, t, tp) = (0.8, 1.1, -0.3);
        let m = combined_r_matrix(w, t, tp, &Vector3::zeros()).unwrap();
        let sine = c(0.0, 2.0 * (w * (t - tp)).sin());
        assert!((m[(0, 0)] + sine * c(8.0 * PI / 3.0, 0.0)).norm() < 1e-13);
        assert!((m[(1, 1)] - sine * c(8.0 * PI / 3.0, 0.0)).norm() < 1e-13);
        assert_eq!(m[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn gapless_combined_is_isotropic_contraction() {
        let a = Vector3::new(0.1, -0.4, 0.3);
        let m = combined_r_matrix(0.0, 0.7, 0.2, &a).unwrap();
        let k = 8.0 * PI / 3.0;
        assert!((m[(0, 0)] - c(-2.0 * a.z * k, 0.0)).norm() < 1e-13);
        assert!((m[(0, 1)] - c(-2.0 * a.x, 2.0 * a.y) * k).norm() < 1e-13);
    }

    #[test]
    fn rejects_bad_inputs() {
        let big = Vector3::new(1.0, 1.0, 0.0);
        assert!(angular_pauli_integral(AngularTerm::U2Rho, 1, 0.1, 0.0, 0.0, &big).is_err());
        assert!(angular_pauli_closed(AngularTerm::U2Rho, 3, 0.1, 0.0, 0.0, &Vector3::zeros()).is_err());
        assert!(combined_r_matrix(0.1, 0.0, 0.0, &big).is_err());
    }

    fn bloch() -> impl Strategy<Value = Vector3<f64>> {
        (0.0f64..1.0, -1.0f64..1.0, 0.0f64..(2.0 * PI)).prop_map(|(r, ct, p)| {
            let st = (1.0 - ct * ct).sqrt();
            Vector3::new(st * p.cos(), st * p.sin(), ct) * r.cbrt()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn frame_is_orthonormal_and_complete(theta in 1e-3f64..(PI - 1e-3), phi in 0.0f64..(2.0 * PI)) {
            let f = polarization_frame(theta, phi).unwrap();
            for v in [f.khat, f.e1, f.e2, f.eps1, f.eps2] {
                prop_assert!((v.norm() - 1.0).abs() < 1e-14);
            }
            prop_assert!(f.e1.dot(&f.e2).abs() < 1e-14);
            prop_assert!(f.khat.dot(&f.e1).abs() < 1e-14);
            prop_assert!(f.khat.dot(&f.eps1).abs() < 1e-14);
            prop_assert!(f.khat.dot(&f.eps2).abs() < 1e-14);
            prop_assert!((f.eps1 - f.e2).norm() < 1e-14);
            prop_assert!((f.eps2 + f.e1).norm() < 1e-14);
            let sum = f.eps1 * f.eps1.transpose() + f.eps2 * f.eps2.transpose() + f.khat * f.khat.transpose();
            prop_assert!((sum - Matrix3::identity()).norm() < 1e-14);
        }

        #[test]
        fn closed_forms_match_quadrature(
            w in -3.0f64..3.0, t in -4.0f64..4.0, tp in -4.0f64..4.0, a in bloch()
        ) {
            let grid = AngularGrid::new(16, 16).unwrap();
            for term in AngularTerm::ALL {
                for s in [1u8, 2] {
                    let q = angular_pauli_integral_on(&grid, term, s, w, t, tp, &a).unwrap();
                    let cf = angular_pauli_closed(term, s, w, t, tp, &a).unwrap();
                    prop_assert!(max_abs(&(q - cf)) < 1e-12, "{:?} s={}", term, s);
                }
            }
            let q = combined_r_by_quadrature(&grid, w, t, tp, &a).unwrap();
            let cf = combined_r_matrix(w, t, tp, &a).unwrap();
            prop_assert!(max_abs(&(q - cf)) < 1e-12);
        }
    }
}
