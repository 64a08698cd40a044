//! Duhamel operators on the characteristic lattice.
//!
//! For a lattice function `v`:
//!
//! * `L(v)(x,t) = 1/2 ∫_0^t ds ∫_{x-t+s}^{x+t-s} v(y,s) dy`
//! * `L'(v)(x,t) = 1/2 ∫_0^t {v(x+t-s,s) + v(x-t+s,s)} ds`
//! * `Lbar'(v)(x,t) = 1/2 ∫_0^t {v(x+t-s,s) - v(x-t+s,s)} ds`
//!
//! The backward light triangle of a lattice point is tiled exactly by lattice
//! diamonds plus one row of half-diamonds at `t = 0`; each tile is integrated
//! with the vertex average, so every operator is exact for `v` affine in `(y, s)`.
//! The sweeps fill a whole lattice by recursion; the point evaluations sum the
//! tiles directly and serve as an independent route.

use crate::error::Result;
use crate::lattice::LatticeFn;

fn at(v: &LatticeFn, i: isize, n: usize) -> f64 {
    let nx = v.lattice().nx() as isize;
    if i < 0 || i >= nx {
        0.0
    } else {
        v.get(i as usize, n)
    }
}

/// `L(v)` at every lattice point.
pub fn sweep_l(v: &LatticeFn) -> LatticeFn {
    let lat = *v.lattice();
    let h2 = lat.dx() * lat.dx();
    let nx = lat.nx();
    let mut out = LatticeFn::zeros(lat);
    if lat.n_steps() == 0 {
        return out;
    }
    for i in 0..nx {
        let ii = i as isize;
        let tri = at(v, ii - 1, 0) + at(v, ii + 1, 0) + v.get(i, 1);
        out.set(i, 1, h2 * tri / 6.0);
    }
    for n in 1..lat.n_steps() {
        for i in 0..nx {
            let ii = i as isize;
            let diamond = v.get(i, n + 1) + at(v, ii + 1, n) + at(v, ii - 1, n) + v.get(i, n - 1);
            let value = at(&out, ii + 1, n) + at(&out, ii - 1, n) - out.get(i, n - 1) + 0.25 * h2 * diamond;
            out.set(i, n + 1, value);
        }
    }
    out
}

/// Integrals of `v` along the two backward characteristics through every lattice
/// point, `(∫ v(x+t-s,s) ds, ∫ v(x-t+s,s) ds)`, by the trapezoid rule.
fn characteristic_integrals(v: &LatticeFn) -> (LatticeFn, LatticeFn) {
    let lat = *v.lattice();
    let half_h = 0.5 * lat.dx();
    let mut right = LatticeFn::zeros(lat);
    let mut left = LatticeFn::zeros(lat);
    for n in 0..lat.n_steps() {
        for i in 0..lat.nx() {
            let ii = i as isize;
            let here = v.get(i, n + 1);
            right.set(i, n + 1, at(&right, ii + 1, n) + half_h * (at(v, ii + 1, n) + here));
            left.set(i, n + 1, at(&left, ii - 1, n) + half_h * (at(v, ii - 1, n) + here));
        }
    }
    (right, left)
}

/// `(L'(v), Lbar'(v))` at every lattice point.
pub fn sweep_derivatives(v: &LatticeFn) -> (LatticeFn, LatticeFn) {
    let (right, left) = characteristic_integrals(v);
    let sum = right.zip_map(&left, |a, b| 0.5 * (a + b));
    let diff = right.zip_map(&left, |a, b| 0.5 * (a - b));
    (sum, diff)
}

/// `L(v)(x, t)` at a single lattice point by direct tiling of the light triangle.
pub fn op_l(v: &LatticeFn, x: f64, t: f64) -> Result<f64> {
    let (i, n) = v.lattice().locate(x, t)?;
    if n == 0 {
        return Ok(0.0);
    }
    let h2 = v.lattice().dx().powi(2);
    let i = i as isize;
    let n_i = n as isize;
    let mut diamonds = 0.0;
    for m in 1..n_i {
        let reach = n_i - 1 - m;
        for k in (i - reach..=i + reach).step_by(2) {
            let m = m as usize;
            diamonds += at(v, k, m + 1) + at(v, k + 1, m) + at(v, k - 1, m) + at(v, k, m - 1);
        }
    }
    let mut triangles = 0.0;
    let reach = n_i - 1;
    for k in (i - reach..=i + reach).step_by(2) {
        triangles += at(v, k, 1) + at(v, k - 1, 0) + at(v, k + 1, 0);
    }
    Ok(0.25 * h2 * diamonds + h2 * triangles / 6.0)
}

fn characteristic_pair(v: &LatticeFn, x: f64, t: f64) -> Result<(f64, f64)> {
    let (i, n) = v.lattice().locate(x, t)?;
    if n == 0 {
        return Ok((0.0, 0.0));
    }
    let h = v.lattice().dx();
    let i = i as isize;
    let mut right = 0.0;
    let mut left = 0.0;
    for m in 0..n {
        let shift = (n - m) as isize;
        let w = if m == 0 { 0.5 } else { 1.0 };
        right += w * at(v, i + shift, m);
        left += w * at(v, i - shift, m);
    }
    let top = 0.5 * at(v, i, n);
    Ok((h * (right + top), h * (left + top)))
}

/// `L'(v)(x, t)` at a single lattice point.
pub fn op_lprime(v: &LatticeFn, x: f64, t: f64) -> Result<f64> {
    let (r, l) = characteristic_pair(v, x, t)?;
    Ok(0.5 * (r + l))
}

/// `Lbar'(v)(x, t)` at a single lattice point.
pub fn op_lbar(v: &LatticeFn, x: f64, t: f64) -> Result<f64> {
    let (r, l) = characteristic_pair(v, x, t)?;
    Ok(0.5 * (r - l))
}
