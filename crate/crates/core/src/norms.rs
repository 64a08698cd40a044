//! Weighted sup-norms over the support cone and the Huygens residual.

use crate::data::{free_solution, InitialData};
use crate::error::Result;
use crate::lattice::{in_huygens_region, Field, Lattice, LatticeFn};

/// The four weighted suprema of a pair `(u, w)` over `0 <= t <= t_window`, `|x| <= t + R`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormReport {
    /// `sup |u|`
    pub n1: f64,
    /// `sup (t - |x| + 2R) |w|`
    pub n2: f64,
    /// `sup |u| / (t + |x| + R)`
    pub n3: f64,
    /// `sup [χ_D + (1 - χ_D)/(t + |x| + R)] |w|` with `D = {t - |x| >= R}`
    pub n4: f64,
    pub t_window: f64,
}

/// Norms of an arbitrary pair of lattice functions; `u` carries `n1`, `n3` and `w` carries `n2`, `n4`.
pub fn norms_of(u: &LatticeFn, w: &LatticeFn, radius: f64, t_window: f64) -> NormReport {
    let lat = *u.lattice();
    let mut rep = NormReport { t_window, ..NormReport::default() };
    let last = ((t_window / lat.dx()) + 1e-9).floor().max(0.0) as usize;
    for n in 0..=last.min(lat.n_steps()) {
        let t = lat.t(n);
        let (ur, wr) = (u.row(n), w.row(n));
        for i in lat.columns_within(t + radius) {
            let ax = lat.x(i).abs();
            let (au, aw) = (ur[i].abs(), wr[i].abs());
            let growth = t + ax + radius;
            rep.n1 = rep.n1.max(au);
            rep.n2 = rep.n2.max((t - ax + 2.0 * radius) * aw);
            rep.n3 = rep.n3.max(au / growth);
            let weight = if in_huygens_region(ax, t, radius) { 1.0 } else { 1.0 / growth };
            rep.n4 = rep.n4.max(weight * aw);
        }
    }
    rep
}

pub fn norms(field: &Field, data: &InitialData, t_window: f64) -> NormReport {
    norms_of(&field.u, &field.w, data.radius, t_window)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HuygensResidual {
    /// `max |eps u^0|` over lattice points of `D` with `t <= T`.
    pub residual: f64,
    /// Set when the data does not have zero mean, so no cancellation is expected.
    pub nonzero_mean: bool,
    pub points: usize,
}

pub fn huygens_residual(data: &InitialData, horizon: f64, dx: f64) -> Result<HuygensResidual> {
    let lat = Lattice::for_horizon(dx, horizon, data.radius)?;
    let mut residual: f64 = 0.0;
    let mut points = 0;
    for n in 0..lat.nt() {
        let t = lat.t(n);
        for i in lat.columns_within(t - data.radius) {
            let x = lat.x(i);
            if !in_huygens_region(x, t, data.radius) {
                continue;
            }
            points += 1;
            residual = residual.max((data.eps * free_solution(data, x, t).u).abs());
        }
    }
    Ok(HuygensResidual { residual, nonzero_mean: !data.mean_zero(), points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_data, Family};
    use approx::assert_relative_eq;

    #[test]
    fn unit_fields() {
        let lat = Lattice::for_horizon(0.25, 2.0, 1.0).unwrap();
        let one = LatticeFn::from_fn(lat, |_, _| 1.0);
        let rep = norms_of(&one, &one, 1.0, 2.0);
        assert_eq!(rep.n1, 1.0);
        assert_relative_eq!(rep.n2, 4.0);
        let at_zero = norms_of(&one, &one, 1.0, 0.0);
        assert_relative_eq!(at_zero.n2, 2.0);
        assert_eq!(at_zero.n4, 1.0);
        let growth = LatticeFn::from_fn(lat, |x, t| t + x.abs() + 1.0);
        assert_relative_eq!(norms_of(&growth, &one, 1.0, 2.0).n3, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn huygens_residuals() {
        let dip = make_data(Family::Dipole, 1.0, 1.0).unwrap();
        let res = huygens_residual(&dip, 6.0, 0.05).unwrap();
        assert!(res.points > 1000);
        assert!(res.residual <= 1e-14, "{}", res.residual);
        assert!(!res.nonzero_mean);

        let bump = make_data(Family::Bump, 1.5, 1.0).unwrap();
        let res = huygens_residual(&bump, 4.0, 0.05).unwrap();
        assert!(res.nonzero_mean);
        assert_relative_eq!(res.residual, 8.0 * 1.5 / 15.0, epsilon = 1e-13);

        let seed = make_data(Family::BlowupSeed, 1.0, 1.0).unwrap();
        assert_eq!(huygens_residual(&seed, 4.0, 0.05).unwrap().residual, 0.0);
    }
}
