//! One function per subcommand. Each returns a [`Table`]; rows are computed
//! in parallel and kept in grid order.

use std::f64::consts::PI;

use anyhow::{bail, Context, Result};
use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use spinprobe::atom::{
    g_factor_correction, make_orbital, normalization, phi_by_quadrature, phi_volume_integral, smearing_phi,
    OrbitalProfile,
};
use spinprobe::detector::{
    adiabatic_rate_closed, adiabatic_rate_numeric, evolve_leading_order, flip_probability, response_set, CouplingKind,
    CouplingModel, QubitState, Smearing, SwitchingFunction,
};
use spinprobe::fieldgeom::{
    angular_pauli_closed, angular_pauli_integral, combined_r_by_quadrature, combined_r_matrix, AngularGrid, AngularTerm,
};
use spinprobe::numerics::Tolerance;

use crate::config::{Command, RunConfig, SwitchingSpec};

/// Closed and integrated φ must agree to this relative error.
pub const ORBITAL_REL_TOL: f64 = 1e-8;
/// Normalization must be 1 to this.
pub const NORMALIZATION_TOL: f64 = 1e-8;
/// Extrapolated against closed-form rate.
pub const RATE_REL_TOL: f64 = 0.01;
/// Model-equivalence checks in `udw-compare`.
pub const EQUIVALENCE_TOL: f64 = 1e-12;
/// Closed against quadrature angular matrices.
pub const ORACLE_ABS_TOL: f64 = 1e-6;

/// CSV body plus trailing comment lines and the count of rows that failed a
/// check.
#[derive(Debug, Default)]
pub struct Table {
    pub columns: &'static str,
    pub rows: Vec<String>,
    pub notes: Vec<String>,
    pub failures: usize,
}

impl Table {
    fn new(columns: &'static str) -> Self {
        Table {
            columns,
            ..Default::default()
        }
    }

    fn note(&mut self, text: String) {
        self.notes.push(format!("# {text}"));
    }

    /// Renders the table under `header`, LF line endings.
    pub fn render(&self, header: &str) -> String {
        let mut out = String::new();
        for line in std::iter::once(header)
            .chain(std::iter::once(self.columns))
            .chain(self.rows.iter().map(String::as_str))
            .chain(self.notes.iter().map(String::as_str))
        {
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

fn e(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(fields: &[String]) -> String {
    fields.join(",")
}

/// Maps `f` over `items` on a pool sized by `SPINPROBE_THREADS`, keeping order.
fn par_map<T, U, F>(items: Vec<T>, f: F) -> Result<Vec<U>>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Send + Sync,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("SPINPROBE_THREADS") {
        let n: usize = v.parse().with_context(|| format!("SPINPROBE_THREADS=`{v}`"))?;
        builder = builder.num_threads(n);
    }
    let pool = builder.build().context("building worker pool")?;
    Ok(pool.install(|| items.into_par_iter().map(f).collect()))
}

fn orbital(cfg: &RunConfig) -> Result<OrbitalProfile> {
    make_orbital(cfg.z, cfg.n0, cfg.alpha)
        .with_context(|| format!("orbital Z={} n0={} alpha={}", cfg.z, cfg.n0, cfg.alpha))
}

/// The model of `kind` for this run; Unruh–DeWitt couplings use λ = q/2π.
pub fn build_model(cfg: &RunConfig, kind: CouplingKind) -> Result<CouplingModel> {
    let smearing = Smearing::from_orbital(&orbital(cfg)?)?;
    let strength = if kind.is_udw() {
        cfg.charge / (2.0 * PI)
    } else {
        cfg.charge
    };
    Ok(CouplingModel::new(kind, strength, smearing)?)
}

pub fn run_command(cfg: &RunConfig) -> Result<Table> {
    match cfg.command {
        Command::Orbital => run_orbital(cfg),
        Command::Response => run_response(cfg),
        Command::PflipSweep => run_pflip_sweep(cfg),
        Command::Rate => run_rate(cfg),
        Command::UdwCompare => run_udw_compare(cfg),
        Command::Oracle => run_oracle(cfg),
    }
}

pub fn run_orbital(cfg: &RunConfig) -> Result<Table> {
    let orb = orbital(cfg)?;
    let p = orb.params;
    // φ falls like e^{−2Zr}; an absolute floor would swamp it at large r
    let tol = Tolerance::new(cfg.tol.rel, 0.0, cfg.tol.max_subdivisions)?;
    let radii = cfg.grid.context("orbital needs a grid")?.points();
    let rows = par_map(radii, |r| -> Result<_> {
        let phi = smearing_phi(&orb, r)?;
        let quad = phi_by_quadrature(&orb, r, &tol)?;
        Ok((r, phi, phi - quad))
    })?;
    let mut table = Table::new("r_over_a0,g,f,phi,phi_closed_minus_integral");
    for (i, res) in rows.into_iter().enumerate() {
        let (r, phi, diff) = res.with_context(|| format!("orbital row {i}"))?;
        if !(diff.abs() <= ORBITAL_REL_TOL * phi.abs()) {
            table.failures += 1;
        }
        table.rows.push(row(&[e(r), e(p.g(r)), e(p.f(r)), e(phi), e(diff)]));
    }
    let norm = normalization(&orb, &cfg.tol)?;
    if !((norm - 1.0).abs() <= NORMALIZATION_TOL) {
        table.failures += 1;
    }
    table.note(format!(
        "summary,normalization={},phi_volume_integral={},g_factor_correction={}",
        e(norm),
        e(phi_volume_integral(&orb, &cfg.tol)?),
        e(g_factor_correction(&orb, &cfg.tol)?)
    ));
    Ok(table)
}

pub fn run_response(cfg: &RunConfig) -> Result<Table> {
    let model = build_model(cfg, cfg.coupling)?;
    let chi = cfg.switching.build()?;
    let rows = par_map(cfg.gaps(), |w| response_set(&model, &chi, w, &cfg.tol).map(|r| (w, r)))?;
    let mut table = Table::new("Omega_a0,L_plus,L_minus,L_zero,M_re,M_im,K_re,K_im");
    for res in rows {
        let (w, r) = res?;
        let (kre, kim) = match r.k {
            Some(k) => (e(k.re), e(k.im)),
            None => (String::new(), String::new()),
        };
        table.rows.push(row(&[
            e(w),
            e(r.l_plus),
            e(r.l_minus),
            e(r.l_zero),
            e(r.m.re),
            e(r.m.im),
            kre,
            kim,
        ]));
    }
    Ok(table)
}

/// Flip probability over the gap grid for each Gaussian width in the
/// T list; the `switching` key is not used.
pub fn run_pflip_sweep(cfg: &RunConfig) -> Result<Table> {
    let model = build_model(cfg, cfg.coupling)?;
    let gaps = cfg.grid.context("pflip-sweep needs a grid")?.points();
    let mut jobs = Vec::new();
    for &t in &cfg.t_list {
        for &w in &gaps {
            jobs.push((t, w));
        }
    }
    let rows = par_map(jobs, |(t, w)| -> Result<_> {
        let chi = SwitchingFunction::gaussian(t)?;
        Ok((t, w, flip_probability(&model, &chi, w, cfg.initial, &cfg.tol)?))
    })?;
    let mut table = Table::new("Omega_a0,T_over_a0,P_flip");
    let mut peaks: Vec<(f64, f64, f64)> = Vec::new();
    for res in rows {
        let (t, w, p) = res.with_context(|| "pflip-sweep row")?;
        if !(p >= 0.0) || !p.is_finite() {
            table.failures += 1;
        }
        match peaks.last_mut() {
            Some(last) if last.0 == t => {
                if p > last.2 {
                    *last = (t, w, p);
                }
            }
            _ => peaks.push((t, w, p)),
        }
        table.rows.push(row(&[e(w), e(t), e(p)]));
    }
    for (t, w, p) in peaks {
        table.note(format!("peak,T_over_a0={},Omega_a0={},P_flip={}", e(t), e(w), e(p)));
    }
    Ok(table)
}

/// Closed-form rate against the extrapolated P/T. Rows where the closed
/// rate vanishes report |numeric| relative to the largest closed rate on the
/// grid (or at Ω a₀ = −2 when the grid has none).
pub fn run_rate(cfg: &RunConfig) -> Result<Table> {
    if cfg.coupling != CouplingKind::SpinMagnetic {
        bail!("rate is defined for the spin coupling only");
    }
    let model = build_model(cfg, cfg.coupling)?;
    let params = model_params(cfg)?;
    let gaps = cfg.grid.context("rate needs a grid")?.points();
    let rows = par_map(gaps, |w| -> Result<_> {
        let closed = adiabatic_rate_closed(&params, cfg.charge, w)?;
        let numeric = adiabatic_rate_numeric(&model, w, &cfg.t_list, &cfg.tol);
        Ok((w, closed, numeric))
    })?;
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut scale = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    if scale == 0.0 {
        scale = adiabatic_rate_closed(&params, cfg.charge, -2.0)?;
    }
    let mut table = Table::new("Omega_a0,rate_closed,rate_numeric,rel_err");
    for (w, closed, numeric) in rows {
        match numeric {
            Ok(est) => {
                let denom = if closed > 0.0 { closed } else { scale };
                let rel = (est.rate - closed).abs() / denom;
                if !(rel < RATE_REL_TOL) {
                    table.failures += 1;
                }
                table.rows.push(row(&[e(w), e(closed), e(est.rate), e(rel)]));
            }
            Err(err) => {
                table.failures += 1;
                log::error!("rate at Omega={w}: {err}");
                table.rows.push(row(&[e(w), e(closed), e(f64::NAN), e(f64::NAN)]));
                table.note(format!("error,Omega_a0={},{}", e(w), err.to_string().replace(',', ";")));
            }
        }
    }
    Ok(table)
}

fn model_params(cfg: &RunConfig) -> Result<spinprobe::atom::OrbitalParams> {
    Ok(orbital(cfg)?.params)
}

/// Spin, amplitude and derivative models side by side, with matched
/// smearing and λ = q/2π, and their leading-order Bloch vectors.
pub fn run_udw_compare(cfg: &RunConfig) -> Result<Table> {
    const KINDS: [CouplingKind; 3] = [
        CouplingKind::SpinMagnetic,
        CouplingKind::UdwAmplitude,
        CouplingKind::UdwDerivative,
    ];
    let models = KINDS.iter().map(|&k| build_model(cfg, k)).collect::<Result<Vec<_>>>()?;
    let chi = cfg.switching.build()?;
    let state = QubitState::new(cfg.bloch.unwrap_or_else(|| Vector3::new(0.6, 0.0, 0.8)))?;
    let mut jobs = Vec::new();
    for w in cfg.gaps() {
        for m in &models {
            jobs.push((w, m));
        }
    }
    let results = par_map(jobs, |(w, m)| {
        evolve_leading_order(m, &chi, w, &state, &cfg.tol).map(|ev| (w, m.kind(), ev))
    })?;
    let mut table = Table::new(
        "Omega_a0,model,L_plus,L_minus,L_zero,M_re,M_im,K_re,K_im,L_minus_spin_L,M_minus_spin_M,delta_z_over_spin,ax,ay,az",
    );
    let a0 = state.bloch();
    let mut spin = None;
    for res in results {
        let (w, kind, ev) = res?;
        let r = ev.responses;
        if kind == CouplingKind::SpinMagnetic {
            spin = Some(ev);
        }
        let s = spin.as_ref().expect("spin row comes first");
        let sr = s.responses;
        let dl = r.l_plus - sr.l_plus;
        let dm = (r.m - sr.m).norm();
        let ratio = if s.delta.z != 0.0 {
            ev.delta.z / s.delta.z
        } else {
            f64::NAN
        };
        let a = ev.state.bloch();
        let mut ok = true;
        if kind == CouplingKind::UdwDerivative {
            let scale = |x: f64| EQUIVALENCE_TOL * x.abs().max(f64::MIN_POSITIVE);
            ok &= dl.abs() <= scale(sr.l_plus)
                && (r.l_minus - sr.l_minus).abs() <= scale(sr.l_minus)
                && (r.l_zero - sr.l_zero).abs() <= scale(sr.l_zero)
                && dm <= scale(sr.m.norm());
            if ratio.is_finite() {
                ok &= (ratio - 0.75).abs() <= EQUIVALENCE_TOL;
            }
        }
        if kind == CouplingKind::UdwAmplitude && w == 0.0 {
            ok &= a.x == a0.x;
        }
        if !ok {
            table.failures += 1;
        }
        let k = r.k.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        let (kre, kim) = if r.k.is_some() {
            (e(k.re), e(k.im))
        } else {
            (String::new(), String::new())
        };
        table.rows.push(row(&[
            e(w),
            kind.name().to_string(),
            e(r.l_plus),
            e(r.l_minus),
            e(r.l_zero),
            e(r.m.re),
            e(r.m.im),
            kre,
            kim,
            e(dl),
            e(dm),
            e(ratio),
            e(a.x),
            e(a.y),
            e(a.z),
        ]));
    }
    Ok(table)
}

/// One randomized evaluation point for the angular oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleDraw {
    pub omega: f64,
    pub t: f64,
    pub tprime: f64,
    pub a: Vector3<f64>,
}

/// `count` draws from a ChaCha8 stream seeded with `seed`: Ω a₀ in [−3, 3],
/// times in [−span, span] and a uniform in the Bloch ball unless `fixed`.
pub fn oracle_draws(seed: u64, count: usize, span: f64, fixed: Option<Vector3<f64>>) -> Vec<OracleDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let omega = rng.random_range(-3.0..3.0);
            let t = rng.random_range(-span..span);
            let tprime = rng.random_range(-span..span);
            let a = fixed.unwrap_or_else(|| loop {
                let v = Vector3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                if v.norm() <= 1.0 {
                    break v;
                }
            });
            OracleDraw { omega, t, tprime, a }
        })
        .collect()
}

/// Every closed-form angular matrix and the combined R matrix against
/// quadrature, entry by entry.
pub fn run_oracle(cfg: &RunConfig) -> Result<Table> {
    // times span ±2T of the configured switching
    let scale = match cfg.switching {
        SwitchingSpec::Gaussian { width } => width,
        SwitchingSpec::Window { start, end } => end - start,
    };
    let draws = oracle_draws(cfg.seed, cfg.draws, 2.0 * scale, cfg.bloch);
    let grid = AngularGrid::default();
    let rows = par_map(draws.into_iter().enumerate().collect(), |(i, d)| -> Result<Vec<_>> {
        let mut out = Vec::new();
        for term in AngularTerm::ALL {
            for s in [1u8, 2] {
                let closed = angular_pauli_closed(term, s, d.omega, d.t, d.tprime, &d.a)?;
                let quad = angular_pauli_integral(term, s, d.omega, d.t, d.tprime, &d.a)?;
                out.push((i, d, term.name(), s.to_string(), closed, quad));
            }
        }
        let closed = combined_r_matrix(d.omega, d.t, d.tprime, &d.a)?;
        let quad = combined_r_by_quadrature(&grid, d.omega, d.t, d.tprime, &d.a)?;
        out.push((i, d, "R", "sum".to_string(), closed, quad));
        Ok(out)
    })?;
    let mut table = Table::new(
        "draw,Omega_a0,t,tprime,ax,ay,az,term,s,entry,closed_re,closed_im,quadrature_re,quadrature_im,abs_err",
    );
    let mut worst: f64 = 0.0;
    for res in rows {
        for (i, d, term, s, closed, quad) in res? {
            for (entry, idx) in [("00", (0, 0)), ("01", (0, 1)), ("10", (1, 0)), ("11", (1, 1))] {
                let (c, q) = (closed[idx], quad[idx]);
                let err = (c - q).norm();
                worst = worst.max(err);
                if !(err < ORACLE_ABS_TOL) {
                    table.failures += 1;
                }
                table.rows.push(row(&[
                    i.to_string(),
                    e(d.omega),
                    e(d.t),
                    e(d.tprime),
                    e(d.a.x),
                    e(d.a.y),
                    e(d.a.z),
                    term.to_string(),
                    s.clone(),
                    entry.to_string(),
                    e(c.re),
                    e(c.im),
                    e(q.re),
                    e(q.im),
                    e(err),
                ]));
            }
        }
    }
    table.note(format!("max_abs_err={}", e(worst)));
    Ok(table)
}
