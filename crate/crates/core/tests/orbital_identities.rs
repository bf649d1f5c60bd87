//! Orbital integrals and smearing identities against independent quadrature.

use std::f64::consts::PI;

use spinprobe::atom::{
    g_factor_correction, make_orbital, normalization, phi_by_quadrature, phi_fourier, phi_fourier_closed,
    phi_volume_integral, small_component_weight, smearing_phi,
};
use spinprobe::detector::adiabatic_rate_closed;
use spinprobe::numerics::quadrature::integrate_to_infinity;
use spinprobe::numerics::{gamma_upper, integrate_semiline, RadialFunction, Tolerance};
use spinprobe::FINE_STRUCTURE;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

#[test]
fn normalized_for_several_charges() {
    let tol = Tolerance::default();
    for z in [1, 2, 10, 20] {
        let o = make_orbital(z, 1, FINE_STRUCTURE).unwrap();
        let n = normalization(&o, &tol).unwrap();
        assert!((n - 1.0).abs() < 1e-8, "Z = {z}: {n}");
    }
}

#[test]
fn small_component_weight_is_half_of_one_minus_beta() {
    let tol = Tolerance::default();
    for z in [1, 20] {
        let o = make_orbital(z, 1, FINE_STRUCTURE).unwrap();
        let w = small_component_weight(&o, &tol).unwrap();
        assert!(rel(w, 0.5 * o.params.one_minus_beta()) < 1e-8, "Z = {z}");
    }
}

#[test]
fn closed_smearing_matches_defining_integral() {
    let o = make_orbital(1, 1, FINE_STRUCTURE).unwrap();
    // φ(20) ~ 1e-18, so the comparison is purely relative
    let tol = Tolerance::new(1e-12, 0.0, 2000).unwrap();
    for r in log_grid(1e-3, 20.0, 50) {
        let closed = smearing_phi(&o, r).unwrap();
        let integral = phi_by_quadrature(&o, r, &tol).unwrap();
        assert!(rel(closed, integral) < 1e-8, "r = {r}: {closed} vs {integral}");
    }
}

#[test]
fn smearing_derivative_is_product_of_components() {
    let o = make_orbital(1, 1, FINE_STRUCTURE).unwrap();
    let h = 1e-4;
    for r in log_grid(0.1, 10.0, 25) {
        let d = (smearing_phi(&o, r + h).unwrap() - smearing_phi(&o, r - h).unwrap()) / (2.0 * h);
        let fg = o.f.eval(r) * o.g.eval(r);
        assert!(rel(d, fg) < 1e-6, "r = {r}");
    }
}

#[test]
fn smearing_follows_from_radial_equations() {
    // φ = (f² + g²)/(4mₑ) − (1/mₑ) ∫ᵣ^∞ f²/r′ dr′
    let o = make_orbital(1, 1, FINE_STRUCTURE).unwrap();
    let me = o.params.me;
    let tol = Tolerance::default();
    for r in [0.05, 0.3, 1.0, 2.5, 7.0] {
        let f = o.f.clone();
        let tail: f64 = integrate_to_infinity(|x: f64| f.eval(x).powi(2) / x, r, 40.0, &tol).unwrap();
        let rhs = (o.f.eval(r).powi(2) + o.g.eval(r).powi(2)) / (4.0 * me) - tail / me;
        assert!(rel(smearing_phi(&o, r).unwrap(), rhs) < 1e-7, "r = {r}");
    }
}

#[test]
fn region_swap_identity() {
    // ∫₀^∞ dr ∫ᵣ^∞ dr′ (r²/r′) f²(r′) = (1/3) ∫₀^∞ r² f² dr
    let o = make_orbital(1, 1, FINE_STRUCTURE).unwrap();
    let tol = Tolerance::default();
    let f = o.f.clone();
    let inner = move |r: f64| -> f64 {
        let f = f.clone();
        integrate_to_infinity(move |x: f64| f.eval(x).powi(2) / x, r, 40.0, &Tolerance::default()).unwrap()
    };
    let outer = RadialFunction::new(40.0, move |r| r * r * inner(r)).unwrap();
    let lhs = integrate_semiline(&outer, &tol).unwrap();
    let rhs = small_component_weight(&o, &tol).unwrap() / 3.0;
    assert!(rel(lhs, rhs) < 1e-8, "{lhs} vs {rhs}");
}

#[test]
fn volume_integral_and_magnetic_moment_correction() {
    let o = make_orbital(1, 1, FINE_STRUCTURE).unwrap();
    let tol = Tolerance::default();
    let p = o.params;
    let vol = phi_volume_integral(&o, &tol).unwrap();
    let expected = PI / p.me * (1.0 - 2.0 / 3.0 * p.one_minus_beta());
    assert!(rel(vol, expected) < 1e-8);
    let via_weight = PI / p.me * (1.0 - 4.0 / 3.0 * small_component_weight(&o, &tol).unwrap());
    assert!(rel(vol, via_weight) < 1e-8);
    assert!(rel(vol, PI / p.me * g_factor_correction(&o, &tol).unwrap()) < 1e-8);
    assert!(rel(phi_fourier(&o, 0.0, &tol).unwrap(), vol) < 1e-8);
    assert!(rel(phi_fourier_closed(&p, 0.0).unwrap(), vol) < 1e-8);
}

#[test]
fn volume_integral_tends_to_point_value_without_small_component() {
    // as α → 0 the correction vanishes and ∫φ → π/mₑ
    let tol = Tolerance::default();
    let o = make_orbital(1, 1, 1e-4).unwrap();
    let vol = phi_volume_integral(&o, &tol).unwrap();
    assert!(rel(vol, PI / o.params.me) < 1e-8);
}

#[test]
fn incomplete_gamma_against_defining_integral() {
    let o = make_orbital(1, 1, FINE_STRUCTURE).unwrap();
    let s = 2.0 * o.params.beta - 1.0;
    for x in [0.02, 2.0, 9.0] {
        let v = gamma_upper(s, x).unwrap();
        let q: f64 =
            integrate_to_infinity(|t: f64| t.powf(s - 1.0) * (-t).exp(), x, 40.0, &Tolerance::default()).unwrap();
        assert!(rel(v, q) < 1e-10, "x = {x}");
    }
}

#[test]
fn smearing_transform_consistent_with_rate_formula() {
    let o = make_orbital(1, 1, FINE_STRUCTURE).unwrap();
    let tol = Tolerance::default();
    let q = 0.7;
    for k in [1.0, 2.0] {
        let rate = adiabatic_rate_closed(&o.params, q, -k).unwrap();
        let implied = (6.0 * PI.powi(3) * rate / (q * q * k.powi(3))).sqrt();
        let numeric = phi_fourier(&o, k, &tol).unwrap();
        assert!(rel(numeric, implied) < 1e-8, "k = {k}");
    }
}

#[test]
fn smearing_transform_positive_on_probe_window() {
    let o = make_orbital(1, 1, FINE_STRUCTURE).unwrap();
    for i in 1..=80 {
        let k = 0.05 * i as f64;
        assert!(phi_fourier_closed(&o.params, k).unwrap() > 0.0, "k = {k}");
    }
}
