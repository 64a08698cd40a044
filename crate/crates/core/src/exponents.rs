//! Lifespan exponents for `u_tt - u_xx = A|u_t|^p|u|^q + B|u|^r` in one space
//! dimension.
//!
//! A lifespan law `T(eps) ~ C eps^{-k}` is summarised by its exponent `k`.
//! Everything here is closed-form arithmetic on `(p, q, r)`.

use std::fmt;

use crate::error::{Error, Result};

/// Relative tolerance used to decide whether `p+q` sits on a regime boundary.
pub const BOUNDARY_RTOL: f64 = 1e-12;

/// Exponents and coefficients of the nonlinearity `A|u_t|^p|u|^q + B|u|^r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    /// Coefficient of the product term `|u_t|^p |u|^q`.
    pub a: f64,
    /// Coefficient of the power term `|u|^r`.
    pub b: f64,
}

impl ModelParams {
    pub fn new(p: f64, q: f64, r: f64, a: f64, b: f64) -> Result<Self> {
        let params = Self { p, q, r, a, b };
        params.validate()?;
        Ok(params)
    }

    /// Exponents with `A = B = 1`.
    pub fn exponents(p: f64, q: f64, r: f64) -> Result<Self> {
        Self::new(p, q, r, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p", self.p), ("q", self.q), ("r", self.r)] {
            if !v.is_finite() || v <= 1.0 {
                return Err(Error::InvalidParams(format!("{name} = {v} must exceed 1")));
            }
        }
        for (name, v) in [("A", self.a), ("B", self.b)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParams(format!("{name} = {v} must be nonnegative")));
            }
        }
        Ok(())
    }

    /// `p + q`, the total homogeneity of the product term.
    pub fn pq(&self) -> f64 {
        self.p + self.q
    }

    /// Lower edge `(r+1)/2` of the combined-effect window.
    pub fn lower_edge(&self) -> f64 {
        0.5 * (self.r + 1.0)
    }

    /// The nonlinearity `A|w|^p|u|^q + B|u|^r` evaluated at `(u, w)`.
    #[inline]
    pub fn source(&self, u: f64, w: f64) -> f64 {
        let (au, aw) = (u.abs(), w.abs());
        let mut s = 0.0;
        if self.a != 0.0 && au != 0.0 && aw != 0.0 {
            s += self.a * (self.p * aw.ln() + self.q * au.ln()).exp();
        }
        if self.b != 0.0 && au != 0.0 {
            s += self.b * (self.r * au.ln()).exp();
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeTag {
    /// `p+q <= (r+1)/2`
    BelowThreshold,
    /// `(r+1)/2 <= p+q <= r`
    CombinedEffect,
    /// `p+q >= r`
    AboveR,
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegimeTag::BelowThreshold => "below-threshold",
            RegimeTag::CombinedEffect => "combined",
            RegimeTag::AboveR => "above-r",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Regime {
    pub tag: RegimeTag,
    pub mean_zero: bool,
    /// Set when `p+q` equals `(r+1)/2` or `r`; the tag is then the left one.
    pub boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawSource {
    ThisPaper,
    GeneralTheory,
    HighDim,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifespanLaw {
    /// `T(eps) ~ C eps^{-exponent_k}`.
    pub exponent_k: f64,
    pub source: LawSource,
    pub regime: Regime,
    /// Only meaningful for [`LawSource::GeneralTheory`]: the general theory is
    /// stated for integer exponents and was evaluated on non-integer input.
    pub non_integer: bool,
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= BOUNDARY_RTOL * a.abs().max(b.abs()).max(1.0)
}

pub fn classify_regime(params: &ModelParams, mean_zero: bool) -> Result<Regime> {
    params.validate()?;
    let s = params.pq();
    let lo = params.lower_edge();
    let r = params.r;
    let (tag, boundary) = if near(s, lo) {
        (RegimeTag::BelowThreshold, true)
    } else if near(s, r) {
        (RegimeTag::CombinedEffect, true)
    } else if s < lo {
        (RegimeTag::BelowThreshold, false)
    } else if s < r {
        (RegimeTag::CombinedEffect, false)
    } else {
        (RegimeTag::AboveR, false)
    };
    Ok(Regime { tag, mean_zero, boundary })
}

/// Exponent of the sharp lifespan law.
///
/// With both coefficients positive this is `min(p+q-1, (r-1)/2)` for data with
/// nonzero mean, and for zero-mean data `(p+q)(r-1)/(r+1)` in the combined
/// window and `min(p+q-1, r(r-1)/(r+1))` outside it. When one coefficient
/// vanishes the single-nonlinearity law is returned instead.
pub fn lifespan_exponent(params: &ModelParams, mean_zero: bool) -> Result<LifespanLaw> {
    let regime = classify_regime(params, mean_zero)?;
    let s = params.pq();
    let r = params.r;
    let product_law = s - 1.0;
    let power_law = if mean_zero { r * (r - 1.0) / (r + 1.0) } else { 0.5 * (r - 1.0) };
    let k = match (params.a > 0.0, params.b > 0.0) {
        (false, false) => {
            return Err(Error::InvalidParams("A = B = 0: the problem is linear and the lifespan is infinite".into()))
        }
        (true, false) => product_law,
        (false, true) => power_law,
        (true, true) => {
            if mean_zero && regime.tag == RegimeTag::CombinedEffect {
                s * (r - 1.0) / (r + 1.0)
            } else {
                product_law.min(power_law)
            }
        }
    };
    Ok(LifespanLaw { exponent_k: k, source: LawSource::ThisPaper, regime, non_integer: false })
}

/// Lower-bound exponent delivered by the general theory for smooth nonlinearities
/// of order `1 + alpha`, specialised to `u_t^p u^q + u^r`.
pub fn general_theory_exponent(params: &ModelParams, mean_zero: bool) -> Result<LifespanLaw> {
    let regime = classify_regime(params, mean_zero)?;
    let s = params.pq();
    let r = params.r;
    let k = match regime.tag {
        RegimeTag::BelowThreshold => s - 1.0,
        RegimeTag::CombinedEffect if mean_zero => (0.5 * (r - 1.0)).max(s * (s - 1.0) / (s + 1.0)),
        RegimeTag::CombinedEffect | RegimeTag::AboveR if !mean_zero => 0.5 * (r - 1.0),
        _ => r * (r - 1.0) / (r + 1.0),
    };
    let non_integer = [params.p, params.q, params.r].iter().any(|v| v.fract() != 0.0);
    Ok(LifespanLaw { exponent_k: k, source: LawSource::GeneralTheory, regime, non_integer })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub value: f64,
    /// False when `p+q` is outside the open window `((r+1)/2, r)`; `value` is then 0.
    pub in_strict_regime: bool,
}

/// How much the zero-mean lifespan exponent exceeds the general-theory bound.
pub fn improvement_gap(params: &ModelParams) -> Result<Gap> {
    let regime = classify_regime(params, true)?;
    if regime.tag != RegimeTag::CombinedEffect || regime.boundary {
        return Ok(Gap { value: 0.0, in_strict_regime: false });
    }
    let paper = lifespan_exponent(&ModelParams { a: 1.0, b: 1.0, ..*params }, true)?;
    let general = general_theory_exponent(params, true)?;
    Ok(Gap { value: paper.exponent_k - general.exponent_k, in_strict_regime: true })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighDimExponent {
    pub exponent_k: f64,
    /// `(r-1)((n-1)p - 2) < 4`
    pub condition_holds: bool,
}

/// Combined-effect exponent `2p(r-1) / (2(r+1) - (n-1)p(r-1))` known in `n` dimensions.
pub fn highdim_reference_exponent(p: f64, r: f64, n: u32) -> Result<HighDimExponent> {
    let nm1 = f64::from(n) - 1.0;
    let denom = 2.0 * (r + 1.0) - nm1 * p * (r - 1.0);
    if !(denom > 0.0) {
        return Err(Error::Domain(format!("denominator 2(r+1)-(n-1)p(r-1) = {denom} is not positive")));
    }
    Ok(HighDimExponent { exponent_k: 2.0 * p * (r - 1.0) / denom, condition_holds: (r - 1.0) * (nm1 * p - 2.0) < 4.0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemarkIdentities {
    /// `(r^2+1)/(r+1)`: the value of `p+q` where `p+q-1 = r(r-1)/(r+1)`.
    pub crossover: f64,
    pub above_lower_edge: bool,
    pub below_r: bool,
}

pub fn remark_identities(r: f64) -> Result<RemarkIdentities> {
    if !(r > 1.0) {
        return Err(Error::Domain(format!("r = {r} must exceed 1")));
    }
    let crossover = (r * r + 1.0) / (r + 1.0);
    Ok(RemarkIdentities { crossover, above_lower_edge: 0.5 * (r + 1.0) < crossover, below_r: crossover < r })
}

/// One row of the exponent comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentReport {
    pub params: ModelParams,
    pub mean_zero: bool,
    pub regime: Regime,
    pub this_paper: f64,
    pub general_theory: f64,
    pub general_non_integer: bool,
    pub gap: Gap,
    pub crossover: f64,
    /// `n = 1` value of the higher-dimensional formula with `p` replaced by `p+q`.
    pub highdim_n1: Option<f64>,
}

pub fn exponent_report(params: &ModelParams, mean_zero: bool) -> Result<ExponentReport> {
    let law = lifespan_exponent(params, mean_zero)?;
    let general = general_theory_exponent(params, mean_zero)?;
    let gap = if mean_zero { improvement_gap(params)? } else { Gap { value: 0.0, in_strict_regime: false } };
    Ok(ExponentReport {
        params: *params,
        mean_zero,
        regime: law.regime,
        this_paper: law.exponent_k,
        general_theory: general.exponent_k,
        general_non_integer: general.non_integer,
        gap,
        crossover: remark_identities(params.r)?.crossover,
        highdim_n1: highdim_reference_exponent(params.pq(), params.r, 1).ok().map(|h| h.exponent_k),
    })
}

impl ExponentReport {
    pub const HEADER: &'static str = "p\tq\tr\tmean\tregime\tk_paper\tk_general\tgap\tcrossover\tk_highdim_n1";

    pub fn row(&self) -> String {
        let regime = if self.regime.boundary { format!("{}*", self.regime.tag) } else { self.regime.tag.to_string() };
        let general = if self.general_non_integer {
            format!("{:.6}?", self.general_theory)
        } else {
            format!("{:.6}", self.general_theory)
        };
        let gap = if self.gap.in_strict_regime { format!("{:.6}", self.gap.value) } else { "-".to_string() };
        let hd = self.highdim_n1.map_or("-".to_string(), |v| format!("{v:.6}"));
        format!(
            "{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\t{}\t{:.6}\t{}",
            self.params.p,
            self.params.q,
            self.params.r,
            if self.mean_zero { "zero" } else { "nonzero" },
            regime,
            self.this_paper,
            general,
            gap,
            self.crossover,
            hd
        )
    }
}
