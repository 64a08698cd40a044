//! Named property suites with fixed seeds, each producing a pass/fail table.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blowup::{
    c41_for, check_pointwise_seed, comparison_blowup_abscissa, f_functional_checks, s_closed, s_series, upper_bound_t,
    z_root, z_root_bisect, zhou_characteristic, BlowupSequences,
};
use crate::data::{free_solution, make_data, Family};
use crate::duhamel::{op_l, sweep_derivatives, sweep_l};
use crate::error::{Error, Result};
use crate::exponents::{lifespan_exponent, ModelParams};
use crate::lattice::{Lattice, LatticeFn};
use crate::norms::huygens_residual;
use crate::picard::{consistency_wu, picard_nonzero, picard_zero, IterationTrace, PicardOptions};
use crate::solver::{evolve_recorded, measure_lifespan, LifespanOptions};
use crate::sweep::least_squares;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Operators,
    Huygens,
    Picard,
    Blowup,
    SolverOrder,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Operators, Suite::Huygens, Suite::Picard, Suite::Blowup, Suite::SolverOrder];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Operators => "operators",
            Suite::Huygens => "huygens",
            Suite::Picard => "picard",
            Suite::Blowup => "blowup",
            Suite::SolverOrder => "solver-order",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|suite| suite.name() == s).ok_or_else(|| {
            Error::Config(format!(
                "unknown suite `{s}` (expected one of operators, huygens, picard, blowup, solver-order)"
            ))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        })
    }
}

/// One checked quantity: `value relation bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, relation: Relation::AtMost, bound, pass: value <= bound }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, relation: Relation::AtLeast, bound, pass: value >= bound }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub const CSV_HEADER: &'static str = "suite,check,value,relation,bound,pass";

    pub fn write_rows(&self, out: &mut impl Write) -> Result<()> {
        for c in &self.checks {
            writeln!(out, "{},{},{:.9e},{},{:.3e},{}", self.suite, c.name, c.value, c.relation, c.bound, c.pass)?;
        }
        Ok(())
    }
}

pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Operators => operators()?,
        Suite::Huygens => huygens()?,
        Suite::Picard => picard()?,
        Suite::Blowup => blowup()?,
        Suite::SolverOrder => solver_order()?,
    };
    Ok(SuiteReport { suite, checks })
}

fn operators() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let lat = Lattice::for_horizon(0.05, 2.0, 1.0)?;
    let one = LatticeFn::from_fn(lat, |_, _| 1.0);
    let l = sweep_l(&one);
    let (lp, lb) = sweep_derivatives(&one);
    let (mut el, mut ep, mut eb) = (0.0f64, 0.0f64, 0.0f64);
    for n in 0..lat.nt() {
        let t = lat.t(n);
        // Keep the backward cone inside the lattice.
        for i in lat.columns_within(lat.x_max() - t - 2.0 * lat.dx()) {
            el = el.max((l.get(i, n) - 0.5 * t * t).abs());
            ep = ep.max((lp.get(i, n) - t).abs());
            eb = eb.max(lb.get(i, n).abs());
        }
    }
    checks.push(Check::at_most("L(1)-t^2/2", el, 1e-12));
    checks.push(Check::at_most("L'(1)-t", ep, 1e-12));
    checks.push(Check::at_most("Lbar'(1)", eb, 1e-12));

    let s = LatticeFn::from_fn(lat, |_, s| s);
    checks.push(Check::at_most("L(t)-t^3/6", (sweep_l(&s).at(0.25, 1.5)? - 1.5f64.powi(3) / 6.0).abs(), 1e-12));

    let order = smooth_integrand_orders()?;
    for (name, o) in ["L", "L'", "Lbar'"].iter().zip(order) {
        checks.push(Check::at_least(format!("order {name}"), o, 1.9));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let lat = Lattice::for_horizon(0.25, 2.0, 1.0)?;
    let mut v = LatticeFn::zeros(lat);
    for n in 0..lat.nt() {
        for i in 0..lat.nx() {
            v.set(i, n, rng.gen_range(-1.0..1.0));
        }
    }
    let swept = sweep_l(&v);
    let mut worst: f64 = 0.0;
    for n in 0..lat.nt() {
        for i in lat.columns_within(1.5) {
            worst = worst.max((swept.get(i, n) - op_l(&v, lat.x(i), lat.t(n))?).abs());
        }
    }
    checks.push(Check::at_most("sweep vs tiling", worst, 1e-12));
    Ok(checks)
}

/// Observed orders of `L`, `L'` on `cos y cos s` and of `Lbar'` on `e^{y/2} cos s`
/// (for which the trapezoid errors do not cancel), between `dx = 0.05` and `0.025`.
pub fn smooth_integrand_orders() -> Result<[f64; 3]> {
    let skew = |y: f64, s: f64| (0.5 * y).exp() * s.cos();
    let errors = |dx: f64| -> Result<[f64; 3]> {
        let lat = Lattice::for_horizon(dx, 2.0, 1.0)?;
        let v = LatticeFn::from_fn(lat, |y, s| y.cos() * s.cos());
        let l = sweep_l(&v);
        let (lp, _) = sweep_derivatives(&v);
        let (_, lb) = sweep_derivatives(&LatticeFn::from_fn(lat, skew));
        let mut e = [0.0f64; 3];
        for (x, t) in [(0.0f64, 2.0f64), (0.5, 1.5), (-1.0, 1.0)] {
            e[0] = e[0].max((l.at(x, t)? - x.cos() * t * t.sin() / 2.0).abs());
            e[1] = e[1].max((lp.at(x, t)? - x.cos() * (t * t.cos() + t.sin()) / 2.0).abs());
            let exact = simpson(|s| 0.5 * (skew(x + t - s, s) - skew(x - t + s, s)), t, 4000);
            e[2] = e[2].max((lb.at(x, t)? - exact).abs());
        }
        Ok(e)
    };
    let (c, f) = (errors(0.05)?, errors(0.025)?);
    Ok([0, 1, 2].map(|k| (c[k] / f[k]).log2()))
}

fn simpson(f: impl Fn(f64) -> f64, t: f64, intervals: usize) -> f64 {
    let h = t / intervals as f64;
    let inner: f64 = (1..intervals).map(|k| if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h)).sum();
    h / 3.0 * (f(0.0) + inner + f(t))
}

fn huygens() -> Result<Vec<Check>> {
    let dip = make_data(Family::Dipole, 1.0, 1.0)?;
    let res = huygens_residual(&dip, 10.0, 0.05)?;
    let scale = dip.eps * dip.data_size();
    let mut checks = vec![
        Check::at_most("dipole residual/scale", res.residual / scale, 1e-14),
        Check::at_least("dipole points in D", res.points as f64, 1000.0),
    ];
    let bump = make_data(Family::Bump, 1.0, 1.0)?;
    let res = huygens_residual(&bump, 10.0, 0.05)?;
    checks.push(Check::at_most("bump residual - G", (res.residual - bump.half_mass()).abs(), 1e-12));
    Ok(checks)
}

/// Outcome of a Picard run at half of an empirically located convergence boundary.
#[derive(Debug, Clone)]
pub struct ContractionCase {
    pub family: Family,
    /// Smallest amplitude found not to converge.
    pub eps_boundary: f64,
    pub eps: f64,
    pub t_window: f64,
    pub trace: IterationTrace,
    /// `3 M eps` or `5 N eps^min(p+q, r)`.
    pub band: f64,
}

impl ContractionCase {
    pub fn max_ratio(&self) -> f64 {
        self.trace.max_ratio_from(2)
    }

    pub fn max_norm(&self) -> f64 {
        let (a, b) = self.trace.max_scheme_norms();
        a.max(b)
    }
}

/// Scaled window `c eps^{-k}` with the lifespan exponent of the data family.
pub fn scaled_window(params: &ModelParams, family: Family, c: f64, eps: f64) -> Result<f64> {
    let k = lifespan_exponent(params, family.mean_zero())?.exponent_k;
    Ok(c * eps.powf(-k))
}

/// `Some(trace)` when the run converged on the scaled window.
fn picard_run(
    params: &ModelParams,
    family: Family,
    c: f64,
    dx: f64,
    eps: f64,
) -> Result<(f64, Option<IterationTrace>)> {
    let data = make_data(family, 1.0, eps)?;
    let t_window = scaled_window(params, family, c, eps)?;
    let lattice = Lattice::for_horizon(dx, t_window, data.radius)?;
    let run = if family.mean_zero() {
        picard_zero(&data, params, lattice, PicardOptions::default())
    } else {
        picard_nonzero(&data, params, lattice, PicardOptions::default())
    };
    let trace = match run {
        Ok((_, trace)) => Some(trace).filter(|t| t.converged),
        Err(Error::Diverged(_)) => None,
        Err(e) => return Err(e),
    };
    Ok((t_window, trace))
}

/// Bisects (geometrically, `steps` times) for the amplitude at which Picard
/// stops converging on the window `c eps^{-k}`, then reruns at half of it.
pub fn contraction_case(
    params: &ModelParams,
    family: Family,
    c: f64,
    dx: f64,
    steps: usize,
) -> Result<ContractionCase> {
    const MAX_WINDOW: f64 = 40.0;
    let mut hi = 4.0f64;
    if picard_run(params, family, c, dx, hi)?.1.is_some() {
        return Err(Error::Domain(format!("Picard still converges at eps = {hi}")));
    }
    let mut lo = 0.5 * hi;
    while picard_run(params, family, c, dx, lo)?.1.is_none() {
        hi = lo;
        lo *= 0.5;
        if scaled_window(params, family, c, lo)? > MAX_WINDOW {
            return Err(Error::Domain(format!("no convergence found with windows up to {MAX_WINDOW}")));
        }
    }
    for _ in 0..steps {
        let mid = (lo * hi).sqrt();
        if picard_run(params, family, c, dx, mid)?.1.is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eps = 0.5 * hi;
    let (t_window, trace) = picard_run(params, family, c, dx, eps)?;
    let trace = trace.ok_or_else(|| Error::Domain(format!("Picard does not converge at eps = {eps}")))?;
    let band = match (trace.m_const, trace.n_const) {
        (Some(m), _) => 3.0 * m * eps,
        (_, Some(_)) => 5.0 * trace.scale,
        _ => unreachable!("every trace records its scheme constant"),
    };
    Ok(ContractionCase { family, eps_boundary: hi, eps, t_window, trace, band })
}

/// Parameters of the contraction checks: `(2, 2, 3)` with `A = B = 1`.
pub const CONTRACTION_WINDOW: f64 = 0.5;
pub const CONTRACTION_DX: f64 = 0.05;

fn picard() -> Result<Vec<Check>> {
    let params = ModelParams::exponents(2.0, 2.0, 3.0)?;
    let mut checks = Vec::new();
    for family in [Family::Bump, Family::Dipole] {
        let case = contraction_case(&params, family, CONTRACTION_WINDOW, CONTRACTION_DX, 10)?;
        checks.push(Check::at_most(format!("{family} max rho_j (j>=2)"), case.max_ratio(), 0.55));
        checks.push(Check::at_most(format!("{family} iterate norm / band"), case.max_norm() / case.band, 1.0));
    }
    let data = make_data(Family::Dipole, 1.0, 0.2)?;
    let lat = Lattice::for_horizon(0.05, 4.0, 1.0)?;
    let (a, _) = picard_nonzero(&data, &params, lat, PicardOptions::default())?;
    let (b, _) = picard_zero(&data, &params, lat, PicardOptions::default())?;
    checks.push(Check::at_most("scheme agreement / eps", a.u.sub(&b.u).max_abs() / data.eps, 1e-9));

    let bump = make_data(Family::Bump, 1.0, 0.1)?;
    let err = |dx: f64| -> Result<f64> {
        let (field, _) = picard_nonzero(&bump, &params, Lattice::for_horizon(dx, 2.0, 1.0)?, PicardOptions::default())?;
        consistency_wu(&field)
    };
    checks.push(Check::at_least("w vs du/dt order", (err(0.01)? / err(0.005)?).log2(), 1.9));
    Ok(checks)
}

fn blowup() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let (mut a_err, mut bc_err, mut sum_err, mut s_err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (p, q) in [(1.3, 1.3), (1.5, 1.5), (2.0, 2.0), (1.5, 2.5), (3.0, 1.2)] {
        let params = ModelParams::exponents(p, q, 3.0)?;
        let seq = BlowupSequences::new(&params, 60, None)?;
        a_err = a_err.max(seq.a_closed_form_error(p + q));
        bc_err = bc_err.max(seq.bc_closed_form_error(q, p + q));
        if p == q {
            sum_err = sum_err.max(seq.sum_identity_error());
        }
    }
    for k in 0..40 {
        let r = 1.05 * 1.1f64.powi(k);
        let exact = s_closed(r)?;
        s_err = s_err.max((s_series(r)? - exact).abs() / exact);
    }
    checks.push(Check::at_most("a_n closed form", a_err, 1e-12));
    checks.push(Check::at_most("b_n, c_n closed forms", bc_err, 1e-12));
    checks.push(Check::at_most("b_n + c_n = a_n (p = q)", sum_err, 1e-12));
    checks.push(Check::at_most("S_r series", s_err, 1e-12));
    checks.push(Check::at_most("C41(p+q=2) - 256", (c41_for(2.0, 1.0, 1.0, 1.0)? - 256.0).abs(), 1e-10));
    checks.push(Check::at_most(
        "x* reference - 11",
        (comparison_blowup_abscissa(2.0, 1.0, 0.1, 1.0) - 11.0).abs(),
        1e-12,
    ));

    let seed = make_data(Family::BlowupSeed, 1.0, 1e-9)?;
    let mut slope_err: f64 = 0.0;
    let mut root_err: f64 = 0.0;
    let mut bound_gap: f64 = f64::INFINITY;
    for pq_half in [1.05, 1.3, 1.5, 2.0] {
        let params = ModelParams::new(pq_half, pq_half, 3.0, 1.0, 0.0)?;
        let eps: Vec<f64> = (0..5).map(|k| 1e-9 * 2f64.powi(k)).collect();
        let mut roots = Vec::new();
        for &e in &eps {
            let t = z_root(&params, &seed, e)?;
            root_err = root_err.max((t - z_root_bisect(&params, &seed, e)?).abs() / t);
            bound_gap = bound_gap.min(upper_bound_t(&params, &seed, e)? / t - 1.0);
            roots.push(t.ln());
        }
        let fit = least_squares(&eps.iter().map(|e| e.ln()).collect::<Vec<_>>(), &roots)?;
        slope_err = slope_err.max((fit.slope + (params.pq() - 1.0)).abs());
    }
    checks.push(Check::at_most("Z-root slope + (p+q-1)", slope_err, 1e-6));
    checks.push(Check::at_most("Z-root bisection", root_err, 1e-12));
    checks.push(Check::at_least("upper bound / Z-root - 1", bound_gap, 0.0));

    let params = ModelParams::exponents(2.0, 2.0, 3.0)?;
    let data = make_data(Family::BlowupSeed, 1.0, 0.3)?;
    let ev = evolve_recorded(&data, &params, 0.025, 6.0)?;
    let field = ev.field.as_ref().expect("recorded evolution");
    let scale = 0.5 * data.f0.unwrap_or(1.0) * data.eps;
    checks.push(Check::at_least("seed bound in Sigma / scale", check_pointwise_seed(field, &data)? / scale, -1e-6));
    for row in f_functional_checks(&ev.stats, &data, &params)?.rows() {
        checks.push(Check::at_least(format!("{} residual / tolerance", row.name), row.residual / row.tolerance, -1.0));
    }
    let bump = make_data(Family::Bump, 1.0, 0.3)?;
    let bparams = ModelParams::new(1.5, 1.5, 3.0, 1.0, 0.0)?;
    let ev = evolve_recorded(&bump, &bparams, 0.025, 8.0)?;
    let z = zhou_characteristic(ev.field.as_ref().expect("recorded evolution"), &bump, &bparams)?;
    checks.push(Check::at_least("characteristic residual / scale", z.min_residual / z.scale, -1e-6));
    Ok(checks)
}

/// Maximum difference between the solver at `dx` and a reference at `dx_ref`
/// over the shared lattice points up to `t_end`.
pub fn solver_error(
    data: &crate::data::InitialData,
    params: &ModelParams,
    dx: f64,
    dx_ref: f64,
    t_end: f64,
) -> Result<f64> {
    let coarse = evolve_recorded(data, params, dx, t_end)?;
    let fine = evolve_recorded(data, params, dx_ref, t_end)?;
    let (c, f) = (coarse.field.expect("recorded"), fine.field.expect("recorded"));
    let lat = *c.lattice();
    let mut worst: f64 = 0.0;
    for n in 0..lat.nt() {
        let t = lat.t(n);
        for i in lat.columns_within(t + data.radius) {
            let x = lat.x(i);
            worst = worst.max((c.u.get(i, n) - f.u.at(x, t)?).abs());
        }
    }
    Ok(worst)
}

fn solver_order() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let linear = ModelParams::new(2.0, 2.0, 3.0, 0.0, 0.0)?;
    let data = make_data(Family::Bump, 1.0, 0.5)?;
    let ev = evolve_recorded(&data, &linear, 0.05, 4.0)?;
    let field = ev.field.expect("recorded");
    let lat = *field.lattice();
    let mut worst: f64 = 0.0;
    for n in 0..lat.nt() {
        for i in 0..lat.nx() {
            let exact = free_solution(&data, lat.x(i), lat.t(n));
            worst = worst.max((field.u.get(i, n) - data.eps * exact.u).abs());
        }
    }
    checks.push(Check::at_most("linear evolution vs d'Alembert", worst, 1e-13));

    let params = ModelParams::exponents(2.0, 2.0, 3.0)?;
    let data = make_data(Family::Bump, 1.0, 0.5)?;
    let (e1, e2) = (solver_error(&data, &params, 0.04, 0.005, 2.0)?, solver_error(&data, &params, 0.02, 0.005, 2.0)?);
    checks.push(Check::at_least("solver order", (e1 / e2).log2(), 1.8));

    let lat = Lattice::for_horizon(0.02, 2.0, 1.0)?;
    let (picard_field, _) = picard_nonzero(&data, &params, lat, PicardOptions::default())?;
    let ev = evolve_recorded(&data, &params, 0.02, 2.0)?;
    let ev_field = ev.field.expect("recorded");
    let gap = ev_field.u.sub(&picard_field.u).max_abs();
    checks.push(Check::at_most("solver vs Picard / (5 x discretisation)", gap / (5.0 * (e1 + e2)), 1.0));

    let data = make_data(Family::Bump, 1.0, 0.5)?;
    let m = measure_lifespan(&data, &ModelParams::new(1.5, 1.5, 3.0, 1.0, 0.0)?, LifespanOptions::default())?;
    checks.push(Check::at_most("lifespan refinement change", m.rel_change.unwrap_or(f64::INFINITY), 0.05));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn fast_suites_pass() {
        for suite in [Suite::Operators, Suite::Huygens, Suite::Blowup] {
            let report = run_suite(suite).unwrap();
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn failing_check_fails_report() {
        let report = SuiteReport { suite: Suite::Huygens, checks: vec![Check::at_most("x", 2.0, 1.0)] };
        assert!(!report.passed());
        let mut buf = Vec::new();
        report.write_rows(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim(), "huygens,x,2.000000000e0,<=,1.000e0,false");
    }
}
