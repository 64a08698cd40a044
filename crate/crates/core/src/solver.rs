//! Time marching on the characteristic lattice and numerical lifespans.
//!
//! One step is the diamond identity
//! `u(x,t+h) = u(x+h,t) + u(x-h,t) - u(x,t-h) + (h²/2)(S(x-h,t) + S(x+h,t))`,
//! with `S = A|u_t|^p|u|^q + B|u|^r`. The first step adds `(h²/2) S` at `t = 0`
//! to the exact free solution at `t = h`. The velocity `w = (a + b)/2` is
//! carried through the invariants `a = u_t + u_x` and `b = u_t - u_x`, which
//! satisfy `(∂_t - ∂_x) a = S` and `(∂_t + ∂_x) b = S`; on the lattice these are
//! ODEs along single characteristic steps, integrated with Heun's method.

use std::io::Write;

use crate::data::{free_solution, InitialData};
use crate::error::{Error, Result};
use crate::exponents::ModelParams;
use crate::lattice::{Field, Lattice, LatticeFn};

/// `|x|^e` with shortcuts for integer and half-integer exponents.
#[derive(Debug, Clone, Copy)]
enum Power {
    Int(i32),
    Half(i32),
    General(f64),
}

impl Power {
    fn new(e: f64) -> Self {
        if e == e.round() && e.abs() <= 16.0 {
            Power::Int(e as i32)
        } else if 2.0 * e == (2.0 * e).round() && e.abs() <= 16.0 {
            Power::Half(e.floor() as i32)
        } else {
            Power::General(e)
        }
    }

    #[inline]
    fn of(self, x: f64) -> f64 {
        let a = x.abs();
        match self {
            Power::Int(n) => a.powi(n),
            Power::Half(n) => a.powi(n) * a.sqrt(),
            Power::General(e) => a.powf(e),
        }
    }
}

/// Fast evaluation of the nonlinearity for fixed parameters.
#[derive(Debug, Clone, Copy)]
struct Source {
    a: f64,
    b: f64,
    p: Power,
    q: Power,
    r: Power,
}

impl Source {
    fn new(params: &ModelParams) -> Self {
        Self { a: params.a, b: params.b, p: Power::new(params.p), q: Power::new(params.q), r: Power::new(params.r) }
    }

    #[inline]
    fn eval(&self, u: f64, w: f64) -> f64 {
        let mut s = 0.0;
        if self.a != 0.0 {
            s += self.a * self.p.of(w) * self.q.of(u);
        }
        if self.b != 0.0 {
            s += self.b * self.r.of(u);
        }
        s
    }
}

/// Per-row diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub t: f64,
    pub max_u: f64,
    pub max_w: f64,
    /// `F(t) = h Σ u`, the lattice version of `∫ u dx`.
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Time at which `max(|u|, |w|)` reaches the threshold (log-linear interpolation).
    pub t: f64,
    /// The crossing was declared because a value stopped being finite.
    pub nonfinite: bool,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub lattice: Lattice,
    /// Full space-time record, when requested; truncated at the last computed row.
    pub field: Option<Field>,
    pub stats: Vec<StepStats>,
    pub crossing: Option<Crossing>,
    /// Last time reached.
    pub horizon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub t_max: f64,
    pub threshold: f64,
    pub record: bool,
}

/// Default blow-up threshold `max(1e6 eps |f|_inf, 1e3)`.
pub fn default_threshold(data: &InitialData) -> f64 {
    (1e6 * data.eps * data.f.sup_norm(0)).max(1e3)
}

pub fn evolve(data: &InitialData, params: &ModelParams, lattice: Lattice, opts: EvolveOptions) -> Result<Evolution> {
    params.validate()?;
    let h = lattice.dx();
    let radius = data.radius;
    let n_total = ((opts.t_max / h) - 1e-9).ceil().max(0.0) as usize;
    if n_total > lattice.n_steps() {
        return Err(Error::BeyondHorizon { t: opts.t_max, horizon: lattice.horizon() });
    }
    let needed = lattice.t(n_total) + radius + 2.0 * h;
    if lattice.x_max() < needed {
        return Err(Error::ConeTouchesBoundary { needed, available: lattice.x_max() });
    }
    let nx = lattice.nx();
    let src = Source::new(params);
    let eps = data.eps;
    let margin = 2.0 * h;
    let half_h = 0.5 * h;

    let mut record_u = Vec::new();
    let mut record_w = Vec::new();
    let mut stats = Vec::with_capacity(n_total + 1);

    // Rows n-1 and n of u; row n of the invariants a = u_t + u_x, b = u_t - u_x,
    // of w = (a + b)/2 and of the source.
    let mut u_prev = vec![0.0; nx];
    let mut u_cur = vec![0.0; nx];
    let mut a_cur = vec![0.0; nx];
    let mut b_cur = vec![0.0; nx];
    let mut w_cur = vec![0.0; nx];
    let mut s_row = vec![0.0; nx];
    let mut u_next = vec![0.0; nx];
    let mut a_next = vec![0.0; nx];
    let mut b_next = vec![0.0; nx];
    let mut w_next = vec![0.0; nx];

    for i in lattice.columns_within(radius + margin) {
        let x = lattice.x(i);
        let (g, df) = (data.g.value(x), data.f.d1(x));
        u_cur[i] = eps * data.f.value(x);
        a_cur[i] = eps * (g + df);
        b_cur[i] = eps * (g - df);
        w_cur[i] = eps * g;
    }
    let row_stats = |t: f64, u: &[f64], w: &[f64]| -> StepStats {
        let mut st = StepStats { t, max_u: 0.0, max_w: 0.0, mass: 0.0 };
        for (&a, &b) in u.iter().zip(w) {
            st.max_u = st.max_u.max(a.abs());
            st.max_w = st.max_w.max(b.abs());
            st.mass += a;
        }
        st.mass *= h;
        st
    };
    let size = |st: &StepStats| st.max_u.max(st.max_w);
    stats.push(row_stats(0.0, &u_cur, &w_cur));
    if opts.record {
        record_u.extend_from_slice(&u_cur);
        record_w.extend_from_slice(&w_cur);
    }

    let mut crossing = None;
    let mut last = 0usize;
    let first_size = size(&stats[0]);
    if !(first_size.is_finite()) {
        crossing = Some(Crossing { t: 0.0, nonfinite: true });
    } else if first_size > opts.threshold {
        crossing = Some(Crossing { t: 0.0, nonfinite: false });
    }

    let mut n = 0usize;
    while crossing.is_none() && n < n_total {
        let t_next = lattice.t(n + 1);
        let cols = lattice.columns_within(t_next + radius + margin);
        let src_cols = lattice.columns_within(lattice.t(n) + radius + margin);
        for i in src_cols {
            s_row[i] = src.eval(u_cur[i], w_cur[i]);
        }
        let (lo, hi) = (*cols.start(), *cols.end());
        let inner = lo.max(1)..=hi.min(nx - 2);
        if n == 0 {
            for i in inner.clone() {
                u_next[i] = eps * free_solution(data, lattice.x(i), h).u + 0.5 * h * h * s_row[i];
            }
        } else {
            for i in inner.clone() {
                u_next[i] = u_cur[i + 1] + u_cur[i - 1] - u_prev[i] + 0.5 * h * h * (s_row[i - 1] + s_row[i + 1]);
            }
        }
        // Heun step for the invariants along the two characteristics.
        for i in inner {
            let a_pred = a_cur[i + 1] + h * s_row[i + 1];
            let b_pred = b_cur[i - 1] + h * s_row[i - 1];
            let s_pred = src.eval(u_next[i], 0.5 * (a_pred + b_pred));
            a_next[i] = a_cur[i + 1] + half_h * (s_row[i + 1] + s_pred);
            b_next[i] = b_cur[i - 1] + half_h * (s_row[i - 1] + s_pred);
            w_next[i] = 0.5 * (a_next[i] + b_next[i]);
        }
        let st = row_stats(t_next, &u_next[cols.clone()], &w_next[cols.clone()]);
        let before = size(stats.last().expect("row 0 recorded"));
        let after = size(&st);
        stats.push(st);
        if opts.record {
            record_u.extend_from_slice(&u_next);
            record_w.extend_from_slice(&w_next);
        }
        n += 1;
        last = n;
        if !after.is_finite() || !st.mass.is_finite() {
            crossing = Some(Crossing { t: t_next, nonfinite: true });
        } else if after > opts.threshold {
            let (l0, l1) = (before.max(f64::MIN_POSITIVE).ln(), after.ln());
            let frac = if l1 > l0 { ((opts.threshold.ln() - l0) / (l1 - l0)).clamp(0.0, 1.0) } else { 1.0 };
            crossing = Some(Crossing { t: lattice.t(n - 1) + frac * h, nonfinite: false });
        }
        std::mem::swap(&mut u_prev, &mut u_cur);
        std::mem::swap(&mut u_cur, &mut u_next);
        std::mem::swap(&mut a_cur, &mut a_next);
        std::mem::swap(&mut b_cur, &mut b_next);
        std::mem::swap(&mut w_cur, &mut w_next);
    }

    let run_lattice = lattice.truncated(last);
    let field = if opts.record {
        Some(Field::new(LatticeFn::from_rows(run_lattice, record_u)?, LatticeFn::from_rows(run_lattice, record_w)?)?)
    } else {
        None
    };
    Ok(Evolution { lattice: run_lattice, field, stats, crossing, horizon: run_lattice.horizon() })
}

/// Convenience wrapper: builds a lattice that fits `t_max` and records the full field.
pub fn evolve_recorded(data: &InitialData, params: &ModelParams, dx: f64, t_max: f64) -> Result<Evolution> {
    let lattice = Lattice::for_horizon(dx, t_max, data.radius)?;
    evolve(data, params, lattice, EvolveOptions { t_max, threshold: f64::INFINITY, record: true })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifespanOptions {
    pub dx: f64,
    /// `None` selects [`default_threshold`].
    pub threshold: Option<f64>,
    pub tol_refine: f64,
    pub t_max: f64,
}

impl Default for LifespanOptions {
    fn default() -> Self {
        Self { dx: 0.02, threshold: None, tol_refine: 0.05, t_max: 2000.0 }
    }
}

/// Thresholded lifespan at `dx` and `dx/2`. A missing time means no crossing
/// happened before `t_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifespanMeasurement {
    pub eps: f64,
    pub t_num: Option<f64>,
    pub threshold: f64,
    pub dx: f64,
    pub refined_t_num: Option<f64>,
    pub rel_change: Option<f64>,
    pub accepted: bool,
    /// A crossing in either run was triggered by non-finite values.
    pub nonfinite: bool,
}

impl LifespanMeasurement {
    pub const CSV_HEADER: &'static str = "eps,dx,T_num,refined_T_num,rel_change,accepted";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "inf".to_string(), |x| format!("{x:.9e}"));
        format!(
            "{:.9e},{:.6e},{},{},{},{}",
            self.eps,
            self.dx,
            opt(self.t_num),
            opt(self.refined_t_num),
            self.rel_change.map_or_else(|| "nan".to_string(), |x| format!("{x:.6e}")),
            self.accepted
        )
    }

    pub fn write_csv<'a>(out: &mut impl Write, rows: impl IntoIterator<Item = &'a LifespanMeasurement>) -> Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for m in rows {
            writeln!(out, "{}", m.csv_row())?;
        }
        Ok(())
    }
}

fn crossing_time(
    data: &InitialData,
    params: &ModelParams,
    dx: f64,
    t_max: f64,
    threshold: f64,
) -> Result<Option<Crossing>> {
    let lattice = Lattice::for_horizon(dx, t_max, data.radius)?;
    let ev = evolve(data, params, lattice, EvolveOptions { t_max, threshold, record: false })?;
    Ok(ev.crossing)
}

pub fn measure_lifespan(
    data: &InitialData,
    params: &ModelParams,
    opts: LifespanOptions,
) -> Result<LifespanMeasurement> {
    if !(opts.tol_refine > 0.0) {
        return Err(Error::InvalidParams(format!("refinement tolerance {} must be positive", opts.tol_refine)));
    }
    let threshold = opts.threshold.unwrap_or_else(|| default_threshold(data));
    let coarse = crossing_time(data, params, opts.dx, opts.t_max, threshold)?;
    let mut m = LifespanMeasurement {
        eps: data.eps,
        t_num: coarse.map(|c| c.t),
        threshold,
        dx: opts.dx,
        refined_t_num: None,
        rel_change: None,
        accepted: false,
        nonfinite: coarse.is_some_and(|c| c.nonfinite),
    };
    if coarse.is_none() {
        return Ok(m);
    }
    let fine = crossing_time(data, params, 0.5 * opts.dx, opts.t_max, threshold)?;
    m.refined_t_num = fine.map(|c| c.t);
    m.nonfinite |= fine.is_some_and(|c| c.nonfinite);
    if let (Some(a), Some(b)) = (m.t_num, m.refined_t_num) {
        let rel = (a - b).abs() / a;
        m.rel_change = Some(rel);
        m.accepted = rel <= opts.tol_refine;
    }
    Ok(m)
}
