//! Blow-up machinery for zero-mean data with a positive seed: the iterated
//! pointwise bounds on the strip `Σ`, the threshold function `Z`, the upper
//! lifespan bound, and residuals of the lower-bound inequalities evaluated on
//! evolved solutions.

use std::io::Write;

use crate::data::InitialData;
use crate::error::{Error, Result};
use crate::exponents::ModelParams;
use crate::lattice::Field;
use crate::solver::StepStats;

/// `S_r = Σ_{j>=0} (j+1)/r^{j+1} = r/(r-1)²`.
pub fn s_closed(r: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::Domain(format!("S_r needs r > 1, got {r}")));
    }
    Ok(r / ((r - 1.0) * (r - 1.0)))
}

/// Partial sums of the series defining `S_r`, stopped once terms drop below
/// `1e-18` of the running sum.
pub fn s_series(r: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::Domain(format!("S_r needs r > 1, got {r}")));
    }
    let x = 1.0 / r;
    let (mut sum, mut pow) = (0.0, 1.0);
    for j in 0..1_000_000u64 {
        pow *= x;
        let term = (j + 1) as f64 * pow;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    Ok(sum)
}

/// Sequences of the iteration argument on `Σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupSequences {
    /// `a[n-1] = a_n`, and likewise for `b`, `c`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    /// `log M_n` when an amplitude was supplied.
    pub log_m: Vec<f64>,
    pub n_max: usize,
    /// The recursion left the floating-point range before `n_max`.
    pub truncated: bool,
    pub c5: f64,
    /// `S_{p+q}`
    pub s: f64,
    pub c6: f64,
}

/// `a_n = ((p+q)^{n-1} - 1)/(p+q-1)`.
pub fn a_closed(pq: f64, n: usize) -> f64 {
    (pq.powi(n as i32 - 1) - 1.0) / (pq - 1.0)
}

/// `log M_n` in closed form, for `n >= 1`.
pub fn log_m_closed(params: &ModelParams, log_m1: f64, n: usize) -> f64 {
    let pq = params.pq();
    if n == 1 {
        return log_m1;
    }
    let k = n - 1;
    let c5 = 0.25 * (pq - 1.0) * (pq - 1.0);
    let weighted: f64 = (0..k).map(|j| (j + 1) as f64 / pq.powi(j as i32)).sum();
    (pq.powi(k as i32) - 1.0) / (pq - 1.0) * (params.a * c5).ln() - 2.0 * pq.powi(k as i32 - 1) * pq.ln() * weighted
        + pq.powi(k as i32) * log_m1
}

impl BlowupSequences {
    /// `a_n`, `b_n`, `c_n` up to `n_max`; with `m1 = Some(M_1)` also `log M_n`.
    pub fn new(params: &ModelParams, n_max: usize, m1: Option<f64>) -> Result<Self> {
        params.validate()?;
        if n_max == 0 {
            return Err(Error::Domain("n_max must be positive".into()));
        }
        let (p, q) = (params.p, params.q);
        let pq = params.pq();
        let c5 = 0.25 * (pq - 1.0) * (pq - 1.0);
        let s = s_closed(pq)?;
        let log_ac5 = (params.a * c5).ln();
        let c6 = (-2.0 / (pq - 1.0) * log_ac5).exp();
        let mut out =
            Self { a: vec![0.0], b: vec![0.0], c: vec![0.0], log_m: Vec::new(), n_max, truncated: false, c5, s, c6 };
        if let Some(m1) = m1 {
            if !(m1 > 0.0) {
                return Err(Error::Domain(format!("M_1 = {m1} must be positive")));
            }
            out.log_m.push(m1.ln());
        }
        for n in 1..n_max {
            let (a, b, c) = (out.a[n - 1], out.b[n - 1], out.c[n - 1]);
            let next = (pq * a + 1.0, q * b + p * c + 1.0, q * b + p * c);
            if !next.0.is_finite() || !next.1.is_finite() {
                out.truncated = true;
                break;
            }
            out.a.push(next.0);
            out.b.push(next.1);
            out.c.push(next.2);
            if let Some(&lm) = out.log_m.last() {
                out.log_m.push(log_ac5 - 2.0 * n as f64 * pq.ln() + pq * lm);
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Largest relative deviation of `a_n` from its closed form.
    pub fn a_closed_form_error(&self, pq: f64) -> f64 {
        self.a.iter().enumerate().skip(1).map(|(k, &a)| (a - a_closed(pq, k + 1)).abs() / a).fold(0.0, f64::max)
    }

    /// Largest relative deviation of `b_n` and `c_n` from `q a_{n-1} + 1` and `q a_{n-1}`.
    pub fn bc_closed_form_error(&self, q: f64, pq: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 2..self.len() {
            let a_prev = a_closed(pq, k);
            worst = worst.max((self.b[k] - (q * a_prev + 1.0)).abs() / self.b[k]);
            worst = worst.max((self.c[k] - q * a_prev).abs() / self.c[k]);
        }
        worst
    }

    /// Largest relative deviation of `b_n + c_n` from `a_n`; zero only when `p = q`.
    pub fn sum_identity_error(&self) -> f64 {
        self.a
            .iter()
            .zip(self.b.iter().zip(&self.c))
            .skip(1)
            .map(|(&a, (&b, &c))| (b + c - a).abs() / a)
            .fold(0.0, f64::max)
    }
}

/// `Σ = {x >= 0, t + x >= R, 0 < t - x < R/2}`.
pub fn in_sigma(x: f64, t: f64, radius: f64) -> bool {
    x >= 0.0 && t + x >= radius && t - x > 0.0 && t - x < 0.5 * radius
}

fn seed_constant(data: &InitialData) -> Result<f64> {
    data.f0.ok_or_else(|| Error::InvalidData(format!("{} data has no seed constant f0", data.family)))
}

fn require_product_term(params: &ModelParams) -> Result<()> {
    if !(params.a > 0.0) {
        return Err(Error::Domain("the bound needs A > 0".into()));
    }
    Ok(())
}

/// The part of `Z` that does not depend on `(x, t)`.
fn z_offset(params: &ModelParams, f0: f64, eps: f64) -> Result<f64> {
    let pq = params.pq();
    let c5 = 0.25 * (pq - 1.0) * (pq - 1.0);
    let s = s_closed(pq)?;
    Ok(2.0 / (pq - 1.0) * (params.a * c5).ln() - 4.0 * s * pq.ln() + 2.0 * (0.5 * f0 * eps).ln())
}

pub fn z_function(params: &ModelParams, data: &InitialData, eps: f64, x: f64, t: f64) -> Result<f64> {
    require_product_term(params)?;
    let f0 = seed_constant(data)?;
    let r = data.radius;
    if !in_sigma(x, t, r) {
        return Err(Error::Domain(format!("({x}, {t}) lies outside the blow-up strip")));
    }
    let pq = params.pq();
    let geometric = (t + x - r).powi(2) * (t - x);
    Ok(geometric.ln() / (pq - 1.0) + z_offset(params, f0, eps)?)
}

/// Root of `Z` along the ray `t = x + R/4`, in closed form.
pub fn z_root(params: &ModelParams, data: &InitialData, eps: f64) -> Result<f64> {
    require_product_term(params)?;
    let f0 = seed_constant(data)?;
    let r = data.radius;
    let k = z_offset(params, f0, eps)?;
    // (2t - 5R/4)^2 (R/4) = exp(-(p+q-1) K)
    let log_half_gap = -std::f64::consts::LN_2 + 0.5 * ((4.0 / r).ln() - (params.pq() - 1.0) * k);
    Ok(0.625 * r + log_half_gap.exp())
}

/// Root of `Z` along the ray `t = x + R/4` by bisection on `log(t + x - R)`.
pub fn z_root_bisect(params: &ModelParams, data: &InitialData, eps: f64) -> Result<f64> {
    require_product_term(params)?;
    let f0 = seed_constant(data)?;
    let r = data.radius;
    let offset = z_offset(params, f0, eps)?;
    let pq = params.pq();
    // Along the ray t - x = R/4, so Z depends on s = t + x - R only.
    let z_at = |log_s: f64| (2.0 * log_s + (0.25 * r).ln()) / (pq - 1.0) + offset;
    let (mut lo, mut hi) = (-700.0f64, 700.0f64);
    if z_at(lo) > 0.0 || z_at(hi) < 0.0 {
        return Err(Error::Domain("Z has no sign change on the searched ray segment".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if z_at(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    // s = 2t - 5R/4
    Ok(0.5 * ((0.5 * (lo + hi)).exp() + 1.25 * r))
}

/// `C₄₁` for a given `p+q`, coefficient `A`, radius and seed constant.
pub fn c41_for(pq: f64, a: f64, radius: f64, f0: f64) -> Result<f64> {
    if !(pq > 1.0) || !(a > 0.0) || !(radius > 0.0) || !(f0 > 0.0) {
        return Err(Error::Domain("C41 needs p+q > 1 and positive A, R, f0".into()));
    }
    let c5 = 0.25 * (pq - 1.0) * (pq - 1.0);
    let s = s_closed(pq)?;
    Ok(2.0 / radius.sqrt() * pq.powf(2.0 * (pq - 1.0) * s) / (a * c5 * (0.5 * f0).powf(pq - 1.0)))
}

/// `max(C₄₁ eps^{-(p+q-1)}, 5R/4)`.
pub fn upper_bound_t(params: &ModelParams, data: &InitialData, eps: f64) -> Result<f64> {
    require_product_term(params)?;
    let f0 = seed_constant(data)?;
    let c41 = c41_for(params.pq(), params.a, data.radius, f0)?;
    Ok((c41 * eps.powf(-(params.pq() - 1.0))).max(1.25 * data.radius))
}

/// Minimum over lattice points of `Σ` of `min(u, w) - f0 eps/2`.
pub fn check_pointwise_seed(field: &Field, data: &InitialData) -> Result<f64> {
    let f0 = seed_constant(data)?;
    let lat = *field.lattice();
    let bound = 0.5 * f0 * data.eps;
    let mut worst = f64::INFINITY;
    for n in 0..lat.nt() {
        let t = lat.t(n);
        for i in lat.columns_within(t) {
            let x = lat.x(i);
            if in_sigma(x, t, data.radius) {
                worst = worst.min(field.u.get(i, n).min(field.w.get(i, n)) - bound);
            }
        }
    }
    if worst.is_infinite() {
        return Err(Error::Domain("the field does not reach the blow-up strip".into()));
    }
    Ok(worst)
}

/// One residual check; passes when `residual >= -tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        Self { name: name.to_string(), residual, tolerance, pass: residual >= -tolerance }
    }
}

pub fn write_checks(out: &mut impl Write, rows: &[CheckRow]) -> Result<()> {
    writeln!(out, "check,residual,tolerance,pass")?;
    for row in rows {
        writeln!(out, "{},{:.9e},{:.3e},{}", row.name, row.residual, row.tolerance, row.pass)?;
    }
    Ok(())
}

/// Residuals of the spatial-mean inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct FChecks {
    /// `F(0) = eps ∫ f` on the lattice.
    pub f_initial: f64,
    /// One-sided estimate of `F'(0)`.
    pub f_slope_initial: f64,
    /// `min_t [F'' - 2^{1-r} B (t+R)^{-(r-1)} |F|^r]`, `None` when `B = 0`.
    pub odi_min: Option<f64>,
    pub odi_scale: f64,
    /// `min_{t >= 2R} [F - A R f0^{p+q} eps^{p+q} t² / 2^{p+q+4}]`, `None` when
    /// the horizon stays below `2R` or `A = 0`.
    pub quadratic_min: Option<f64>,
    pub quadratic_scale: f64,
}

impl FChecks {
    pub fn rows(&self) -> Vec<CheckRow> {
        let mut rows = Vec::new();
        if let Some(r) = self.odi_min {
            rows.push(CheckRow::new("odi", r, 1e-6 * self.odi_scale));
        }
        if let Some(r) = self.quadratic_min {
            rows.push(CheckRow::new("quadratic", r, 1e-6 * self.quadratic_scale));
        }
        rows
    }
}

/// Works on the per-row statistics of an evolution (which carry `F(t)`).
pub fn f_functional_checks(stats: &[StepStats], data: &InitialData, params: &ModelParams) -> Result<FChecks> {
    if stats.len() < 3 {
        return Err(Error::Domain("at least three time rows are needed".into()));
    }
    let f0 = seed_constant(data)?;
    let h = stats[1].t - stats[0].t;
    let r = data.radius;
    let eps = data.eps;
    let mut out = FChecks {
        f_initial: stats[0].mass,
        f_slope_initial: (stats[1].mass - stats[0].mass) / h,
        odi_min: None,
        odi_scale: 0.0,
        quadratic_min: None,
        quadratic_scale: 0.0,
    };
    if params.b > 0.0 {
        let mut worst = f64::INFINITY;
        for k in 1..stats.len() - 1 {
            let f2 = (stats[k + 1].mass - 2.0 * stats[k].mass + stats[k - 1].mass) / (h * h);
            let t = stats[k].t;
            let rhs = 2f64.powf(1.0 - params.r)
                * params.b
                * (t + r).powf(1.0 - params.r)
                * stats[k].mass.abs().powf(params.r);
            worst = worst.min(f2 - rhs);
            out.odi_scale = out.odi_scale.max(f2.abs()).max(rhs);
        }
        out.odi_min = Some(worst);
    }
    if params.a > 0.0 {
        let pq = params.pq();
        let coef = params.a * r * f0.powf(pq) / 2f64.powf(pq + 4.0) * eps.powf(pq);
        let mut worst = f64::INFINITY;
        for st in stats.iter().filter(|st| st.t >= 2.0 * r) {
            worst = worst.min(st.mass - coef * st.t * st.t);
            out.quadratic_scale = out.quadratic_scale.max(st.mass.abs());
        }
        if worst.is_finite() {
            out.quadratic_min = Some(worst);
        }
    }
    Ok(out)
}

/// Residual of the characteristic inequality for positive-mean data.
#[derive(Debug, Clone, PartialEq)]
pub struct ZhouCheck {
    /// `min_{x >= R} [P(x) - G eps - C₇ ∫_R^x |P|^{p+q}]`
    pub min_residual: f64,
    /// `G eps`
    pub scale: f64,
    pub c7: f64,
    /// Blow-up abscissa of `y' = C₇ y^{p+q}`, `y(R) = G eps`.
    pub x_star: f64,
    pub points: usize,
}

/// `C₇ = (A/2)(p/(p+q))^p (2R)^{1-p}`.
pub fn c7(params: &ModelParams, radius: f64) -> f64 {
    0.5 * params.a * (params.p / params.pq()).powf(params.p) * (2.0 * radius).powf(1.0 - params.p)
}

/// `x* = R + 1/((p+q-1) C₇ (G eps)^{p+q-1})`.
pub fn comparison_blowup_abscissa(pq: f64, c7: f64, g_eps: f64, radius: f64) -> f64 {
    radius + 1.0 / ((pq - 1.0) * c7 * g_eps.powf(pq - 1.0))
}

pub fn zhou_characteristic(field: &Field, data: &InitialData, params: &ModelParams) -> Result<ZhouCheck> {
    let g = data.half_mass();
    if !(g > 0.0) {
        return Err(Error::InvalidData(format!("the characteristic check needs ∫g > 0, got G = {g}")));
    }
    require_product_term(params)?;
    let lat = *field.lattice();
    let h = lat.dx();
    let shift = data.radius / h;
    if (shift - shift.round()).abs() > 1e-9 {
        return Err(Error::Domain(format!("R = {} is not a multiple of dx = {h}", data.radius)));
    }
    let shift = shift.round() as usize;
    let c7 = c7(params, data.radius);
    let pq = params.pq();
    let g_eps = g * data.eps;
    let mut min_residual = f64::INFINITY;
    let mut integral = 0.0;
    let mut prev: Option<f64> = None;
    let mut points = 0;
    // x = R + k h sits at column half + shift + k and row 2 shift + k.
    for k in 0.. {
        let n = 2 * shift + k;
        let i = lat.half() + shift + k;
        if n > lat.n_steps() || i >= lat.nx() {
            break;
        }
        let p = field.u.get(i, n);
        let pw = p.abs().powf(pq);
        if let Some(prev_pw) = prev {
            integral += 0.5 * h * (prev_pw + pw);
        }
        prev = Some(pw);
        min_residual = min_residual.min(p - g_eps - c7 * integral);
        points += 1;
    }
    if points == 0 {
        return Err(Error::Domain("the field does not reach t = 2R".into()));
    }
    Ok(ZhouCheck {
        min_residual,
        scale: g_eps,
        c7,
        x_star: comparison_blowup_abscissa(pq, c7, g_eps, data.radius),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_data, Family};
    use crate::solver::evolve_recorded;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn first_terms_of_a() {
        let seq = BlowupSequences::new(&ModelParams::exponents(2.0, 2.0, 3.0).unwrap(), 3, None).unwrap();
        assert_eq!(seq.a, vec![0.0, 1.0, 5.0]);
        assert_eq!(seq.sum_identity_error(), 0.0);
    }

    #[test]
    fn s_of_two() {
        assert_eq!(s_closed(2.0).unwrap(), 2.0);
        assert_relative_eq!(s_series(2.0).unwrap(), 2.0, max_relative = 1e-14);
        assert!(s_closed(1.0).is_err());
    }

    #[test]
    fn sum_identity_needs_equal_exponents() {
        // b_3 + c_3 = 2q + 1 = 7 but a_3 = p + q + 1 = 6.
        let seq = BlowupSequences::new(&ModelParams::exponents(2.0, 3.0, 3.0).unwrap(), 3, None).unwrap();
        assert_eq!((seq.b[2], seq.c[2], seq.a[2]), (4.0, 3.0, 6.0));
        assert!(seq.sum_identity_error() > 0.1);
        assert!(seq.bc_closed_form_error(3.0, 5.0) < 1e-15);
    }

    #[test]
    fn closed_forms_to_sixty_terms() {
        for (p, q) in [(1.3, 1.3), (2.0, 2.0), (1.5, 2.5), (3.0, 1.2)] {
            let params = ModelParams::exponents(p, q, 3.0).unwrap();
            let seq = BlowupSequences::new(&params, 60, Some(0.05)).unwrap();
            assert_eq!(seq.len(), 60);
            assert!(seq.a_closed_form_error(p + q) <= 1e-12);
            assert!(seq.bc_closed_form_error(q, p + q) <= 1e-12);
            if p == q {
                assert!(seq.sum_identity_error() <= 1e-12);
            }
            for n in [1, 2, 5, 30, 60] {
                let closed = log_m_closed(&params, 0.05f64.ln(), n);
                assert!((seq.log_m[n - 1] - closed).abs() <= 1e-12 * closed.abs(), "n = {n}");
            }
        }
    }

    #[test]
    fn overflow_truncates() {
        let seq = BlowupSequences::new(&ModelParams::exponents(10.0, 10.0, 3.0).unwrap(), 400, None).unwrap();
        assert!(seq.truncated);
        assert!(seq.len() < 400);
    }

    #[test]
    fn sigma_membership() {
        assert!(in_sigma(0.6, 0.8, 1.0));
        assert!(!in_sigma(-0.1, 0.3, 1.0));
        assert!(!in_sigma(0.3, 0.5, 1.0));
        assert!(!in_sigma(1.0, 1.5, 1.0));
        assert!(!in_sigma(1.0, 1.0, 1.0));
    }

    #[test]
    fn c41_reference_value() {
        assert_relative_eq!(c41_for(2.0, 1.0, 1.0, 1.0).unwrap(), 256.0, max_relative = 1e-14);
    }

    #[test]
    fn upper_bound_scaling_and_floor() {
        let data = make_data(Family::BlowupSeed, 1.0, 0.01).unwrap();
        let params = ModelParams::new(1.5, 1.5, 3.0, 1.0, 0.0).unwrap();
        let a = upper_bound_t(&params, &data, 0.01).unwrap();
        let b = upper_bound_t(&params, &data, 0.02).unwrap();
        assert_relative_eq!(a / b, 2f64.powf(2.0), max_relative = 1e-12);
        assert_eq!(upper_bound_t(&params, &data, 1e6).unwrap(), 1.25);
        let no_a = ModelParams::new(1.5, 1.5, 3.0, 0.0, 1.0).unwrap();
        assert!(upper_bound_t(&no_a, &data, 0.01).is_err());
    }

    #[test]
    fn z_root_matches_bisection_and_bound() {
        let data = make_data(Family::BlowupSeed, 1.0, 1e-3).unwrap();
        for (p, q) in [(1.0001, 1.0001), (1.5, 1.5), (2.0, 1.5)] {
            let Ok(params) = ModelParams::new(p, q, 3.0, 1.0, 0.0) else { continue };
            for eps in [1e-3, 1e-2] {
                let t_closed = z_root(&params, &data, eps).unwrap();
                let t_bis = z_root_bisect(&params, &data, eps).unwrap();
                assert_relative_eq!(t_closed, t_bis, max_relative = 1e-12);
                let bound = upper_bound_t(&params, &data, eps).unwrap();
                assert!(t_closed <= bound * (1.0 + 1e-12));
                // Z increases along the ray and vanishes at the root.
                if t_closed < 1e12 {
                    let z = |t: f64| z_function(&params, &data, eps, t - 0.25, t).unwrap();
                    assert!(z(0.9 * t_closed) < 0.0 && z(1.1 * t_closed) > 0.0);
                    assert!(z(bound * 1.01) > 0.0);
                }
            }
        }
    }

    #[test]
    fn z_outside_sigma_is_rejected() {
        let data = make_data(Family::BlowupSeed, 1.0, 0.1).unwrap();
        let params = ModelParams::exponents(1.5, 1.5, 3.0).unwrap();
        assert!(z_function(&params, &data, 0.1, 0.0, 0.1).is_err());
    }

    #[test]
    fn zhou_abscissa_reference() {
        assert_relative_eq!(comparison_blowup_abscissa(2.0, 1.0, 0.1, 1.0), 11.0, max_relative = 1e-14);
    }

    #[test]
    fn seed_bound_for_linear_and_nonlinear_evolution() {
        let data = make_data(Family::BlowupSeed, 1.0, 0.3).unwrap();
        for params in
            [ModelParams::new(2.0, 2.0, 3.0, 0.0, 0.0).unwrap(), ModelParams::exponents(2.0, 2.0, 3.0).unwrap()]
        {
            let ev = evolve_recorded(&data, &params, 0.025, 3.0).unwrap();
            let res = check_pointwise_seed(ev.field.as_ref().unwrap(), &data).unwrap();
            assert!(res >= -1e-12, "{res}");
        }
        let ev = evolve_recorded(&data, &ModelParams::exponents(2.0, 2.0, 3.0).unwrap(), 0.025, 0.2).unwrap();
        assert!(check_pointwise_seed(ev.field.as_ref().unwrap(), &data).is_err());
    }

    #[test]
    fn mean_functional_of_free_evolution_is_constant() {
        let data = make_data(Family::BlowupSeed, 1.0, 0.3).unwrap();
        let ev = evolve_recorded(&data, &ModelParams::new(2.0, 2.0, 3.0, 0.0, 0.0).unwrap(), 0.025, 4.0).unwrap();
        let f0 = ev.stats[0].mass;
        assert_relative_eq!(f0, 0.3 * data.f.integral(), max_relative = 1e-3);
        for st in &ev.stats {
            assert!((st.mass - f0).abs() < 1e-12);
        }
        let checks =
            f_functional_checks(&ev.stats, &data, &ModelParams::new(2.0, 2.0, 3.0, 0.0, 0.0).unwrap()).unwrap();
        assert!(checks.odi_min.is_none() && checks.quadratic_min.is_none());
        assert!(checks.f_slope_initial.abs() < 1e-12);
    }

    #[test]
    fn mean_functional_inequalities_hold() {
        let data = make_data(Family::BlowupSeed, 1.0, 0.3).unwrap();
        let params = ModelParams::exponents(2.0, 2.0, 3.0).unwrap();
        let ev = evolve_recorded(&data, &params, 0.025, 6.0).unwrap();
        let checks = f_functional_checks(&ev.stats, &data, &params).unwrap();
        for row in checks.rows() {
            assert!(row.pass, "{row:?}");
        }
        assert_eq!(checks.rows().len(), 2);
    }

    #[test]
    fn characteristic_inequality_holds() {
        let data = make_data(Family::Bump, 1.0, 0.3).unwrap();
        let params = ModelParams::new(1.5, 1.5, 3.0, 1.0, 0.0).unwrap();
        let ev = evolve_recorded(&data, &params, 0.025, 8.0).unwrap();
        let z = zhou_characteristic(ev.field.as_ref().unwrap(), &data, &params).unwrap();
        assert!(z.points > 100);
        assert!(z.min_residual >= -1e-6 * z.scale, "{z:?}");
        let dip = make_data(Family::Dipole, 1.0, 0.3).unwrap();
        assert!(zhou_characteristic(ev.field.as_ref().unwrap(), &dip, &params).is_err());
    }

    proptest! {
        #[test]
        fn s_series_matches_closed_form(r in 1.05f64..20.0) {
            let (a, b) = (s_closed(r).unwrap(), s_series(r).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }

        #[test]
        fn z_root_slope(pq_half in 1.01f64..2.5) {
            let params = ModelParams::new(pq_half, pq_half, 3.0, 1.0, 0.0);
            prop_assume!(params.is_ok());
            let params = params.unwrap();
            let data = make_data(Family::BlowupSeed, 1.0, 1e-9).unwrap();
            let (e1, e2) = (1e-9f64, 1e-8f64);
            let (t1, t2) = (z_root(&params, &data, e1).unwrap(), z_root(&params, &data, e2).unwrap());
            let slope = (t2.ln() - t1.ln()) / (e2.ln() - e1.ln());
            prop_assert!((slope + (params.pq() - 1.0)).abs() <= 1e-6, "{}", slope);
        }
    }
}
