//! Adaptive Gauss–Kronrod integration.
//!
//! The integrator is generic over the integrand's value type so the same
//! subdivision logic serves real and complex integrands. For identical
//! integrand values the refinement path is identical, which keeps results
//! bit-reproducible across call sites.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::Tolerance;
use crate::error::{Error, Result};

/// Values an integrand may return.
pub trait QuadValue: Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn modulus(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_037,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
    // err is already at the floating-point floor; bisecting cannot help
    saturated: bool,
}

/// Single application of the 21-point Kronrod rule on `[a, b]`.
///
/// Returns the Kronrod estimate and a QUADPACK-style error estimate.
pub fn gauss_kronrod_21<T, F>(f: &F, a: f64, b: f64) -> (T, f64, bool)
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut kronrod = f_center * WGK[10];
    let mut gauss = T::zero();
    let mut res_abs = f_center.modulus() * WGK[10];

    let mut samples = [(T::zero(), T::zero()); 10];
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod = kronrod + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.modulus() + f2.modulus());
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
        *sample = (f1, f2);
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).modulus();
    for (j, (f1, f2)) in samples.iter().enumerate() {
        res_asc += WGK[j] * ((*f1 - mean).modulus() + (*f2 - mean).modulus());
    }

    let scale = half.abs();
    let value = kronrod * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut err = ((kronrod - gauss) * half).modulus();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    let saturated = err <= floor;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (value, err, saturated)
}

struct HeapEntry {
    err: f64,
    index: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// Adaptive integration over `[a, b]`.
pub fn integrate<T, F>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    integrate_partitioned(f, &[a, b], tol)
}

/// Adaptive integration over the union of the consecutive panels given by
/// `points` (sorted breakpoints, at least two).
///
/// Refinement is global: the panel with the largest error estimate is bisected
/// until the summed error meets `tol`. The subdivision budget is at least
/// `tol.max_subdivisions` and grows with the number of initial panels.
pub fn integrate_partitioned<T, F>(f: F, points: &[f64], tol: &Tolerance) -> Result<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if points.len() < 2 {
        return Err(Error::domain("integration needs at least two breakpoints"));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::domain("integration breakpoints must be finite"));
    }

    let mut panels: Vec<Panel<T>> = Vec::with_capacity(points.len() + 16);
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        if w[1] < w[0] {
            return Err(Error::domain("integration breakpoints must be sorted"));
        }
        let (value, err, saturated) = gauss_kronrod_21(&f, w[0], w[1]);
        check_finite(value, w[0], w[1])?;
        heap.push(HeapEntry {
            err,
            index: panels.len(),
        });
        panels.push(Panel {
            a: w[0],
            b: w[1],
            value,
            err,
            saturated,
        });
    }
    if panels.is_empty() {
        return Ok(T::zero());
    }

    let budget = tol.max_subdivisions.max(4 * panels.len());
    let mut total = sum_values(&panels);
    let mut total_err: f64 = panels.iter().map(|p| p.err).sum();

    loop {
        let target = tol.target(total.modulus());
        if total_err <= target {
            break;
        }
        // largest refinable panel
        let entry = loop {
            match heap.pop() {
                Some(e) if panels[e.index].saturated => continue,
                other => break other,
            }
        };
        let Some(entry) = entry else {
            // every remaining panel sits at the rounding floor
            log::debug!("quadrature limited by rounding: err {total_err:e} vs target {target:e}");
            break;
        };
        if panels.len() >= budget {
            return Err(Error::non_convergence(
                "adaptive quadrature",
                format!(
                    "subdivision budget {budget} exhausted on [{}, {}]: error {total_err:e} > target {target:e}",
                    points[0],
                    points[points.len() - 1]
                ),
            ));
        }

        let old = panels[entry.index];
        let mid = 0.5 * (old.a + old.b);
        if mid <= old.a || mid >= old.b {
            panels[entry.index].saturated = true;
            continue;
        }
        let (v1, e1, s1) = gauss_kronrod_21(&f, old.a, mid);
        let (v2, e2, s2) = gauss_kronrod_21(&f, mid, old.b);
        check_finite(v1, old.a, mid)?;
        check_finite(v2, mid, old.b)?;

        total = total - old.value + v1 + v2;
        total_err += e1 + e2 - old.err;

        panels[entry.index] = Panel {
            a: old.a,
            b: mid,
            value: v1,
            err: e1,
            saturated: s1,
        };
        heap.push(HeapEntry {
            err: e1,
            index: entry.index,
        });
        heap.push(HeapEntry {
            err: e2,
            index: panels.len(),
        });
        panels.push(Panel {
            a: mid,
            b: old.b,
            value: v2,
            err: e2,
            saturated: s2,
        });
    }

    Ok(sum_values(&panels))
}

fn sum_values<T: QuadValue>(panels: &[Panel<T>]) -> T {
    let mut ordered: Vec<&Panel<T>> = panels.iter().collect();
    ordered.sort_by(|x, y| x.a.total_cmp(&y.a));
    ordered.iter().fold(T::zero(), |acc, p| acc + p.value)
}

fn check_finite<T: QuadValue>(value: T, a: f64, b: f64) -> Result<()> {
    if value.modulus().is_finite() {
        Ok(())
    } else {
        Err(Error::non_convergence(
            "adaptive quadrature",
            format!("non-finite integrand on [{a}, {b}]"),
        ))
    }
}

/// Integral over `[a, ∞)` for integrands that are negligible beyond a few
/// multiples of `scale`.
///
/// `[a, a + scale]` is integrated adaptively, then panels of doubling width
/// are appended until two consecutive panels contribute nothing measurable.
pub fn integrate_to_infinity<T, F>(f: F, a: f64, scale: f64, tol: &Tolerance) -> Result<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    integrate_tail_from(&f, &[a, a + scale], scale, tol)
}

/// Like [`integrate_to_infinity`] but with an explicit initial partition whose
/// last point starts the tail.
pub fn integrate_tail_from<T, F>(f: &F, points: &[f64], scale: f64, tol: &Tolerance) -> Result<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if !(scale > 0.0) {
        return Err(Error::domain("tail scale must be positive"));
    }
    let mut total: T = integrate_partitioned(f, points, tol)?;
    let mut start = points[points.len() - 1];
    let mut width = scale;
    let mut quiet = 0;
    for _ in 0..200 {
        let end = start + width;
        let (probe_value, _, _) = gauss_kronrod_21(f, start, end);
        let panel: T = if probe_value.modulus() == 0.0 {
            probe_value
        } else {
            integrate(f, start, end, tol)?
        };
        total = total + panel;
        let mut abs_probe = 0.0;
        let h = (end - start) / 16.0;
        for i in 0..=16 {
            abs_probe += f(start + h * i as f64).modulus();
        }
        abs_probe *= h;
        let target = tol.target(total.modulus());
        if panel.modulus() <= 1e-3 * target && abs_probe <= 1e-3 * target {
            quiet += 1;
            if quiet >= 2 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        start = end;
        width *= 2.0;
    }
    Err(Error::non_convergence(
        "semi-infinite quadrature",
        format!("tail still contributing at r = {start:e}"),
    ))
}

/// Breakpoints splitting `[a, b]` into panels no longer than half a period of
/// an oscillation with angular frequency `freq`, and no longer than `max_width`.
pub fn oscillation_breakpoints(a: f64, b: f64, freq: f64, max_width: f64) -> Vec<f64> {
    let mut width = if freq > 0.0 {
        std::f64::consts::PI / freq
    } else {
        f64::INFINITY
    };
    width = width.min(max_width);
    let n = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let mut pts: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
    pts.push(b);
    pts
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
