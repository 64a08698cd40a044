//! Initial-data families and the free (d'Alembert) solution.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::profile::{PiecewisePoly, Poly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `f = (1-(x/R)^2)^3`, `g = (1-(x/R)^2)^2`; `int g = 16R/15 > 0`.
    Bump,
    /// `f = (1-(x/R)^2)^3`, `g = R d/dx (1-(x/R)^2)^3`; `int g = 0`.
    Dipole,
    /// `g = 0`, `f >= 0` decreasing with slope `-f0` on `(-R/2, 0)`.
    BlowupSeed,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Bump, Family::Dipole, Family::BlowupSeed];

    pub fn name(self) -> &'static str {
        match self {
            Family::Bump => "bump",
            Family::Dipole => "dipole",
            Family::BlowupSeed => "blowup-seed",
        }
    }

    /// Whether `int g = 0` for this family.
    pub fn mean_zero(self) -> bool {
        !matches!(self, Family::Bump)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidData(format!("unknown family `{s}` (bump, dipole, blowup-seed)")))
    }
}

/// Initial data `(eps f, eps g)` with `supp f, supp g` inside `[-R, R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub family: Family,
    pub f: PiecewisePoly,
    pub g: PiecewisePoly,
    pub radius: f64,
    pub eps: f64,
    /// Exact `int g dx` (unscaled).
    pub g_integral: f64,
    /// Plateau constant of the blow-up seed: `f >= f0` and `-f' >= f0` on `(-R/2, 0)`.
    pub f0: Option<f64>,
}

/// Values of the free solution `u^0` and its first derivatives, without the `eps` factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeValues {
    pub u: f64,
    pub u_t: f64,
    pub u_x: f64,
    pub u_tx: f64,
}

fn bump_power(radius: f64, n: u32) -> Poly {
    Poly::new(vec![1.0, 0.0, -1.0 / (radius * radius)]).powi(n)
}

pub fn make_data(family: Family, radius: f64, eps: f64) -> Result<InitialData> {
    if !(radius >= 1.0) || !radius.is_finite() {
        return Err(Error::InvalidData(format!("support radius R = {radius} must be >= 1")));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidData(format!("amplitude eps = {eps} must be positive")));
    }
    let r = radius;
    let cubic = bump_power(r, 3);
    let (f, g, g_integral, f0) = match family {
        Family::Bump => {
            let f = PiecewisePoly::single_global(-r, r, &cubic);
            let g = PiecewisePoly::single_global(-r, r, &bump_power(r, 2));
            (f, g, 16.0 * r / 15.0, None)
        }
        Family::Dipole => {
            let f = PiecewisePoly::single_global(-r, r, &cubic);
            let g = PiecewisePoly::single_global(-r, r, &cubic.derivative().scale(r));
            (f, g, 0.0, None)
        }
        Family::BlowupSeed => {
            let f0 = 1.0;
            // Linear ramp f0 (R - x) on [-R/2, 0], blended to zero with C^2 quintics.
            let left = Poly::hermite5(0.5 * r, [0.0; 3], [f0 * 1.5 * r, -f0, 0.0]);
            let ramp = Poly::linear(f0 * 1.5 * r, -f0);
            let right = Poly::hermite5(r, [f0 * r, -f0, 0.0], [0.0; 3]);
            let f = PiecewisePoly::new(&[-r, -0.5 * r, 0.0, r], vec![left, ramp, right]);
            (f, PiecewisePoly::zero(), 0.0, Some(f0))
        }
    };
    Ok(InitialData { family, f, g, radius, eps, g_integral, f0 })
}

impl InitialData {
    pub fn mean_zero(&self) -> bool {
        self.g_integral == 0.0
    }

    /// `G = (1/2) int g`.
    pub fn half_mass(&self) -> f64 {
        0.5 * self.g_integral
    }

    /// `sum_{a<=2} |f^(a)|_inf + |g|_L1 + sum_{b<=1} |g^(b)|_inf`.
    pub fn data_size(&self) -> f64 {
        (0..=2).map(|k| self.f.sup_norm(k)).sum::<f64>()
            + self.g.l1_norm()
            + (0..=1).map(|k| self.g.sup_norm(k)).sum::<f64>()
    }
}

/// d'Alembert solution with data `(f, g)` (no `eps` factor), together with
/// `u^0_t`, `u^0_x` and `u^0_tx`. The `g` integral uses the exact antiderivative.
pub fn free_solution(data: &InitialData, x: f64, t: f64) -> FreeValues {
    let (xp, xm) = (x + t, x - t);
    let (f, g) = (&data.f, &data.g);
    FreeValues {
        u: 0.5 * (f.value(xp) + f.value(xm)) + 0.5 * (g.antiderivative(xp) - g.antiderivative(xm)),
        u_t: 0.5 * (f.d1(xp) - f.d1(xm) + g.value(xp) + g.value(xm)),
        u_x: 0.5 * (f.d1(xp) + f.d1(xm) + g.value(xp) - g.value(xm)),
        u_tx: 0.5 * (f.d2(xp) - f.d2(xm) + g.d1(xp) + g.d1(xm)),
    }
}
