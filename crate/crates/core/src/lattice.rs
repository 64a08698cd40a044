//! Characteristic space-time lattice (`dt = dx`) and functions sampled on it.

use std::io::Write;

use crate::data::{free_solution, InitialData};
use crate::error::{Error, Result};

/// Uniform lattice `x_i = (i - half) dx`, `t_n = n dx`, `0 <= i <= 2 half`, `0 <= n <= n_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    dx: f64,
    half: usize,
    n_steps: usize,
}

impl Lattice {
    pub fn new(dx: f64, half: usize, n_steps: usize) -> Result<Self> {
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(Error::InvalidLattice(format!("dx = {dx} must be positive")));
        }
        if half == 0 {
            return Err(Error::InvalidLattice("lattice needs at least one cell each side".into()));
        }
        Ok(Self { dx, half, n_steps })
    }

    /// Smallest lattice reaching time `horizon` whose spatial extent contains the
    /// cone `|x| <= t + radius` with two spare cells.
    pub fn for_horizon(dx: f64, horizon: f64, radius: f64) -> Result<Self> {
        if !(horizon >= 0.0) {
            return Err(Error::InvalidLattice(format!("horizon {horizon} must be nonnegative")));
        }
        let n_steps = (horizon / dx - 1e-9).ceil().max(0.0) as usize;
        let half = ((n_steps as f64 * dx + radius) / dx - 1e-9).ceil() as usize + 2;
        Self::new(dx, half, n_steps)
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn half(&self) -> usize {
        self.half
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn nx(&self) -> usize {
        2 * self.half + 1
    }

    pub fn nt(&self) -> usize {
        self.n_steps + 1
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.half as f64) * self.dx
    }

    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.half as f64 * self.dx
    }

    pub fn horizon(&self) -> f64 {
        self.t(self.n_steps)
    }

    /// Same spacing, truncated to `n_steps` steps.
    pub fn truncated(&self, n_steps: usize) -> Lattice {
        Lattice { n_steps: n_steps.min(self.n_steps), ..*self }
    }

    /// Index range of columns with `|x| <= reach`, clipped to the lattice.
    pub fn columns_within(&self, reach: f64) -> std::ops::RangeInclusive<usize> {
        let k = ((reach / self.dx) + 1e-9).floor().max(0.0) as usize;
        let k = k.min(self.half);
        (self.half - k)..=(self.half + k)
    }

    /// Lattice indices of `(x, t)`, or an error when the point is off-lattice
    /// or outside the sampled window.
    pub fn locate(&self, x: f64, t: f64) -> Result<(usize, usize)> {
        let snap = |v: f64| -> Option<i64> {
            let k = (v / self.dx).round();
            ((v / self.dx - k).abs() <= 1e-7).then_some(k as i64)
        };
        let (Some(i), Some(n)) = (snap(x), snap(t)) else {
            return Err(Error::NotOnLattice { x, t });
        };
        if n < 0 {
            return Err(Error::NotOnLattice { x, t });
        }
        if n as usize > self.n_steps {
            return Err(Error::BeyondHorizon { t, horizon: self.horizon() });
        }
        let i = i + self.half as i64;
        if i < 0 || i as usize >= self.nx() {
            return Err(Error::NotOnLattice { x, t });
        }
        Ok((i as usize, n as usize))
    }
}

/// A real function sampled at every lattice point, stored row by row in time.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFn {
    lattice: Lattice,
    values: Vec<f64>,
}

impl LatticeFn {
    pub fn zeros(lattice: Lattice) -> Self {
        Self { values: vec![0.0; lattice.nx() * lattice.nt()], lattice }
    }

    pub fn from_fn(lattice: Lattice, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(lattice);
        for n in 0..lattice.nt() {
            let t = lattice.t(n);
            for (i, v) in out.row_mut(n).iter_mut().enumerate() {
                *v = f(lattice.x(i), t);
            }
        }
        out
    }

    /// Like [`LatticeFn::from_fn`] but zero outside the cone `|x| <= t + radius`.
    pub fn from_fn_in_cone(lattice: Lattice, radius: f64, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(lattice);
        for n in 0..lattice.nt() {
            let t = lattice.t(n);
            let cols = lattice.columns_within(t + radius);
            let row = out.row_mut(n);
            for i in cols {
                row[i] = f(lattice.x(i), t);
            }
        }
        out
    }

    pub fn from_rows(lattice: Lattice, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.nx() * lattice.nt() {
            return Err(Error::InvalidLattice(format!(
                "{} values for a {}x{} lattice",
                values.len(),
                lattice.nt(),
                lattice.nx()
            )));
        }
        Ok(Self { lattice, values })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, n: usize) -> f64 {
        self.values[n * self.lattice.nx() + i]
    }

    pub fn set(&mut self, i: usize, n: usize, v: f64) {
        let nx = self.lattice.nx();
        self.values[n * nx + i] = v;
    }

    pub fn row(&self, n: usize) -> &[f64] {
        let nx = self.lattice.nx();
        &self.values[n * nx..(n + 1) * nx]
    }

    pub fn row_mut(&mut self, n: usize) -> &mut [f64] {
        let nx = self.lattice.nx();
        &mut self.values[n * nx..(n + 1) * nx]
    }

    /// Value at the lattice point `(x, t)`.
    pub fn at(&self, x: f64, t: f64) -> Result<f64> {
        let (i, n) = self.lattice.locate(x, t)?;
        Ok(self.get(i, n))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> LatticeFn {
        LatticeFn { lattice: self.lattice, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &LatticeFn, f: impl Fn(f64, f64) -> f64) -> LatticeFn {
        debug_assert_eq!(self.lattice, other.lattice);
        LatticeFn {
            lattice: self.lattice,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn sub(&self, other: &LatticeFn) -> LatticeFn {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn add(&self, other: &LatticeFn) -> LatticeFn {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn scale(&self, k: f64) -> LatticeFn {
        self.map(|v| k * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// The free solution and its derivatives sampled on a lattice (no `eps` factor).
#[derive(Debug, Clone)]
pub struct FreeFields {
    pub u: LatticeFn,
    pub u_t: LatticeFn,
    pub u_x: LatticeFn,
    pub u_tx: LatticeFn,
}

impl FreeFields {
    pub fn sample(data: &InitialData, lattice: Lattice) -> Self {
        let mut out = Self {
            u: LatticeFn::zeros(lattice),
            u_t: LatticeFn::zeros(lattice),
            u_x: LatticeFn::zeros(lattice),
            u_tx: LatticeFn::zeros(lattice),
        };
        for n in 0..lattice.nt() {
            let t = lattice.t(n);
            for i in lattice.columns_within(t + data.radius) {
                let v = free_solution(data, lattice.x(i), t);
                out.u.set(i, n, v.u);
                out.u_t.set(i, n, v.u_t);
                out.u_x.set(i, n, v.u_x);
                out.u_tx.set(i, n, v.u_tx);
            }
        }
        out
    }
}

/// Solution pair `(u, w)` where `w` plays the role of `u_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub u: LatticeFn,
    pub w: LatticeFn,
}

impl Field {
    pub fn new(u: LatticeFn, w: LatticeFn) -> Result<Self> {
        if u.lattice() != w.lattice() {
            return Err(Error::InvalidLattice("u and w live on different lattices".into()));
        }
        Ok(Self { u, w })
    }

    pub fn lattice(&self) -> &Lattice {
        self.u.lattice()
    }

    /// Largest time reached.
    pub fn horizon(&self) -> f64 {
        self.lattice().horizon()
    }

    /// Largest `|u| + |w|` found outside `|x| <= t + radius + cells dx`.
    pub fn outside_cone(&self, radius: f64, cells: usize) -> f64 {
        let lat = *self.lattice();
        let mut worst: f64 = 0.0;
        for n in 0..lat.nt() {
            let reach = lat.t(n) + radius + cells as f64 * lat.dx();
            let inside = lat.columns_within(reach);
            for i in (0..lat.nx()).filter(|i| !inside.contains(i)) {
                worst = worst.max(self.u.get(i, n).abs() + self.w.get(i, n).abs());
            }
        }
        worst
    }

    /// CSV snapshot with columns `x,t,u,w`; every `stride`-th row and column
    /// inside `|x| <= t + radius` is written.
    pub fn write_csv(&self, out: &mut impl Write, radius: f64, stride: usize) -> Result<()> {
        let lat = *self.lattice();
        let stride = stride.max(1);
        writeln!(out, "# dx = {}", lat.dx())?;
        writeln!(out, "# n_steps = {}", lat.n_steps())?;
        writeln!(out, "# x_max = {}", lat.x_max())?;
        writeln!(out, "# radius = {radius}")?;
        writeln!(out, "x,t,u,w")?;
        for n in (0..lat.nt()).step_by(stride) {
            let t = lat.t(n);
            for i in lat.columns_within(t + radius).step_by(stride) {
                writeln!(out, "{:.6},{:.6},{:.12e},{:.12e}", lat.x(i), t, self.u.get(i, n), self.w.get(i, n))?;
            }
        }
        Ok(())
    }
}

/// Backward light-cone support `|x| <= t + R` of a solution with data supported in `[-R, R]`.
pub fn in_support_cone(x: f64, t: f64, radius: f64) -> bool {
    x.abs() <= t + radius
}

/// Interior region `t - |x| >= R` where the free solution of zero-mean data vanishes.
pub fn in_huygens_region(x: f64, t: f64, radius: f64) -> bool {
    t - x.abs() >= radius
}
