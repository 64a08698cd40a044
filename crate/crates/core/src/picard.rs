//! Fixed-point iteration of the integral equation
//! `u = eps u^0 + L(A|u_t|^p|u|^q + B|u|^r)`, `u_t = eps u^0_t + L'(...)`.
//!
//! Two schemes are provided. [`picard_nonzero`] iterates `(u, w)` directly and
//! measures differences in `‖·‖₁ + ‖·‖₂`. [`picard_zero`] iterates the
//! perturbation `(U, W) = (u - eps u^0, w - eps u^0_t)` of zero-mean data and
//! measures differences in `‖·‖₃ + ‖·‖₄`.

use std::fmt;
use std::io::Write;

use crate::data::InitialData;
use crate::duhamel::{sweep_derivatives, sweep_l};
use crate::error::{Error, Result};
use crate::exponents::ModelParams;
use crate::lattice::{Field, FreeFields, Lattice, LatticeFn};
use crate::norms::{norms_of, NormReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    NonzeroMean,
    ZeroMean,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::NonzeroMean => "nonzero-mean",
            Scheme::ZeroMean => "zero-mean",
        })
    }
}

/// Diagnostics of one Picard run.
///
/// `norms[j-1]` belongs to iterate `j` (the zero-mean scheme reports the
/// perturbation pair). `diffs[j-1] = d_j` is the distance between iterates
/// `j+1` and `j`, and `ratios[j-1] = d_{j+1}/d_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub scheme: Scheme,
    pub norms: Vec<NormReport>,
    pub diffs: Vec<f64>,
    pub ratios: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `M eps` or `N eps^min(p+q, r)`; the stopping rule is `d_j <= tol * scale`.
    pub scale: f64,
    /// Data size `M`, nonzero-mean scheme only.
    pub m_const: Option<f64>,
    /// `N`, zero-mean scheme only.
    pub n_const: Option<f64>,
    /// Empirical linear a priori constant entering `N`.
    pub e_const: Option<f64>,
}

impl IterationTrace {
    fn new(scheme: Scheme, scale: f64) -> Self {
        Self {
            scheme,
            norms: Vec::new(),
            diffs: Vec::new(),
            ratios: Vec::new(),
            iterations: 0,
            converged: false,
            scale,
            m_const: None,
            n_const: None,
            e_const: None,
        }
    }

    /// Largest contraction ratio among `rho_j` with `j >= from`.
    pub fn max_ratio_from(&self, from: usize) -> f64 {
        self.ratios.iter().skip(from.saturating_sub(1)).fold(0.0f64, |m, &r| m.max(r))
    }

    /// Largest pair of scheme norms over all iterates: `(n1, n2)` or `(n3, n4)`.
    pub fn max_scheme_norms(&self) -> (f64, f64) {
        self.norms.iter().fold((0.0f64, 0.0f64), |(a, b), n| match self.scheme {
            Scheme::NonzeroMean => (a.max(n.n1), b.max(n.n2)),
            Scheme::ZeroMean => (a.max(n.n3), b.max(n.n4)),
        })
    }

    /// CSV with columns `j,d_j,rho_j,n1,n2,n3,n4`; missing entries are left empty.
    pub fn write_csv(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "# scheme = {}", self.scheme)?;
        writeln!(out, "# scale = {:.12e}", self.scale)?;
        writeln!(out, "# converged = {}", self.converged)?;
        writeln!(out, "j,d_j,rho_j,n1,n2,n3,n4")?;
        for (k, n) in self.norms.iter().enumerate() {
            let d = self.diffs.get(k).map(|d| format!("{d:.12e}")).unwrap_or_default();
            let rho = self.ratios.get(k).map(|r| format!("{r:.12e}")).unwrap_or_default();
            writeln!(out, "{},{d},{rho},{:.12e},{:.12e},{:.12e},{:.12e}", k + 1, n.n1, n.n2, n.n3, n.n4)?;
        }
        Ok(())
    }
}

/// Settings shared by both schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { max_iter: 60, tol: 1e-10 }
    }
}

struct Tracker {
    trace: IterationTrace,
    growth_streak: usize,
}

enum Step {
    Continue,
    Converged,
}

impl Tracker {
    fn record(&mut self, d: f64, next_norms: NormReport, tol: f64) -> Result<Step> {
        let trace = &mut self.trace;
        trace.iterations += 1;
        if let Some(&prev) = trace.diffs.last() {
            let rho = if prev > 0.0 { d / prev } else { 0.0 };
            trace.ratios.push(rho);
            self.growth_streak = if d > 10.0 * prev { self.growth_streak + 1 } else { 0 };
        }
        trace.diffs.push(d);
        trace.norms.push(next_norms);
        if !d.is_finite() || self.growth_streak >= 3 {
            return Err(Error::Diverged(Box::new(trace.clone())));
        }
        if d <= tol * trace.scale {
            trace.converged = true;
            return Ok(Step::Converged);
        }
        Ok(Step::Continue)
    }
}

fn source_field(params: &ModelParams, u: &LatticeFn, w: &LatticeFn) -> LatticeFn {
    u.zip_map(w, |a, b| params.source(a, b))
}

fn check_lattice(data: &InitialData, lattice: &Lattice) -> Result<()> {
    let needed = lattice.horizon() + data.radius;
    if lattice.x_max() < needed + lattice.dx() {
        return Err(Error::ConeTouchesBoundary { needed, available: lattice.x_max() });
    }
    Ok(())
}

pub fn picard_nonzero(
    data: &InitialData,
    params: &ModelParams,
    lattice: Lattice,
    opts: PicardOptions,
) -> Result<(Field, IterationTrace)> {
    params.validate()?;
    check_lattice(data, &lattice)?;
    let t_window = lattice.horizon();
    let radius = data.radius;
    let free = FreeFields::sample(data, lattice);
    let u_lin = free.u.scale(data.eps);
    let w_lin = free.u_t.scale(data.eps);
    let m = data.data_size();
    let mut trace = IterationTrace::new(Scheme::NonzeroMean, m * data.eps);
    trace.m_const = Some(m);
    trace.norms.push(norms_of(&u_lin, &w_lin, radius, t_window));
    let mut tracker = Tracker { trace, growth_streak: 0 };

    let (mut u, mut w) = (u_lin.clone(), w_lin.clone());
    for _ in 0..opts.max_iter {
        let s = source_field(params, &u, &w);
        let u_next = u_lin.add(&sweep_l(&s));
        let w_next = w_lin.add(&sweep_derivatives(&s).0);
        let diff = norms_of(&u_next.sub(&u), &w_next.sub(&w), radius, t_window);
        let d = diff.n1 + diff.n2;
        let nrm = norms_of(&u_next, &w_next, radius, t_window);
        let d = if u_next.all_finite() && w_next.all_finite() { d } else { f64::NAN };
        u = u_next;
        w = w_next;
        if let Step::Converged = tracker.record(d, nrm, opts.tol)? {
            break;
        }
    }
    Ok((Field::new(u, w)?, tracker.trace))
}

/// Empirical constant of the linear a priori estimates with `m = 0`, measured on
/// the free solution of the given data: the largest of
/// `‖L(v)‖₃ / ‖v‖_∞`, `‖L'(v)‖₄ / ‖v‖_∞` and `‖L'(v)‖₃ / ‖v‖_∞` over the
/// products `v = |u^0_t|^p |u^0|^q` and `v = |u^0|^r`.
pub fn empirical_e(free: &FreeFields, params: &ModelParams, radius: f64, t_window: f64) -> f64 {
    let prod = free.u.zip_map(&free.u_t, |u, ut| (params.p * ut.abs().ln() + params.q * u.abs().ln()).exp());
    let power = free.u.map(|u| u.abs().powf(params.r));
    let mut e: f64 = 0.0;
    for v in [prod, power] {
        let sup = norms_of(&v, &v, radius, t_window).n1;
        if !(sup > 0.0) {
            continue;
        }
        let lv = sweep_l(&v);
        let (lpv, _) = sweep_derivatives(&v);
        let a = norms_of(&lv, &lpv, radius, t_window);
        let b = norms_of(&lpv, &lpv, radius, t_window);
        e = e.max(a.n3 / sup).max(a.n4 / sup).max(b.n3 / sup);
    }
    e
}

/// `N` for the zero-mean scheme, with sup norms of the free solution measured on
/// the lattice and `E` from [`empirical_e`].
pub fn zero_mean_constant(free: &FreeFields, params: &ModelParams, radius: f64, t_window: f64, e: f64) -> f64 {
    let sup = |f: &LatticeFn| norms_of(f, f, radius, t_window).n1;
    let (u, ut, ux, utx) = (sup(&free.u), sup(&free.u_t), sup(&free.u_x), sup(&free.u_tx));
    let (p, q, r) = (params.p, params.q, params.r);
    let mut n = 0.0;
    for gamma in [0.0, 1.0] {
        n += 2f64.powf(p + q - 1.0)
            * params.a
            * e
            * (ut.powf(p - gamma) * utx.powf(gamma) * u.powf(q) + ut.powf(p) * u.powf(q - gamma) * ux.powf(gamma));
        n += 2f64.powf(r - gamma) * params.b * e * u.powf(r - gamma) * ux.powf(gamma);
    }
    n
}

pub fn picard_zero(
    data: &InitialData,
    params: &ModelParams,
    lattice: Lattice,
    opts: PicardOptions,
) -> Result<(Field, IterationTrace)> {
    params.validate()?;
    if !data.mean_zero() {
        return Err(Error::InvalidData("the zero-mean scheme needs data with ∫g = 0".into()));
    }
    check_lattice(data, &lattice)?;
    let t_window = lattice.horizon();
    let radius = data.radius;
    let eps = data.eps;
    let free = FreeFields::sample(data, lattice);
    let e = empirical_e(&free, params, radius, t_window);
    let n_const = zero_mean_constant(&free, params, radius, t_window, e);
    let power = params.pq().min(params.r);
    let mut trace = IterationTrace::new(Scheme::ZeroMean, n_const * eps.powf(power));
    trace.n_const = Some(n_const);
    trace.e_const = Some(e);
    let u_lin = free.u.scale(eps);
    let w_lin = free.u_t.scale(eps);
    let mut big_u = LatticeFn::zeros(lattice);
    let mut big_w = LatticeFn::zeros(lattice);
    trace.norms.push(norms_of(&big_u, &big_w, radius, t_window));
    let mut tracker = Tracker { trace, growth_streak: 0 };

    for _ in 0..opts.max_iter {
        let s = source_field(params, &big_u.add(&u_lin), &big_w.add(&w_lin));
        let u_next = sweep_l(&s);
        let w_next = sweep_derivatives(&s).0;
        let diff = norms_of(&u_next.sub(&big_u), &w_next.sub(&big_w), radius, t_window);
        let d = if u_next.all_finite() && w_next.all_finite() { diff.n3 + diff.n4 } else { f64::NAN };
        let nrm = norms_of(&u_next, &w_next, radius, t_window);
        big_u = u_next;
        big_w = w_next;
        // With A = B = 0 the scale is zero and the first difference is exactly zero.
        let step = if d == 0.0 {
            tracker.trace.iterations += 1;
            tracker.trace.diffs.push(0.0);
            tracker.trace.norms.push(nrm);
            tracker.trace.converged = true;
            Step::Converged
        } else {
            tracker.record(d, nrm, opts.tol)?
        };
        if let Step::Converged = step {
            break;
        }
    }
    let field = Field::new(big_u.add(&u_lin), big_w.add(&w_lin))?;
    Ok((field, tracker.trace))
}

/// `max |w - (u(t+dt) - u(t-dt)) / (2 dt)|` over interior lattice times.
pub fn consistency_wu(field: &Field) -> Result<f64> {
    let lat = *field.lattice();
    if lat.n_steps() < 2 {
        return Err(Error::InvalidLattice(format!("horizon of {} steps is too short", lat.n_steps())));
    }
    let inv = 0.5 / lat.dx();
    let mut worst: f64 = 0.0;
    for n in 1..lat.n_steps() {
        let (up, um, w) = (field.u.row(n + 1), field.u.row(n - 1), field.w.row(n));
        for i in 0..lat.nx() {
            worst = worst.max((w[i] - (up[i] - um[i]) * inv).abs());
        }
    }
    Ok(worst)
}
