//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations are exposed: exponent curves over `p+q`, a space-time
//! field for heat-map drawing, and a short lifespan scan with its fitted slope.

use semiwave::data::{make_data, Family};
use semiwave::exponents::{general_theory_exponent, lifespan_exponent, ModelParams};
use semiwave::lattice::Lattice;
use semiwave::solver::{default_threshold, evolve, EvolveOptions};
use semiwave::sweep::least_squares;
use wasm_bindgen::prelude::*;

fn js_err(e: semiwave::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn family(name: &str) -> Result<Family, JsError> {
    name.parse().map_err(js_err)
}

/// Samples `p = q = s/2` for `s` in `[s_min, s_max]` at fixed `r`. Returns
/// `[s, k_this, k_general, ...]`; entries where an exponent is undefined are NaN.
#[wasm_bindgen]
pub fn exponent_curves(r: f64, mean_zero: bool, s_min: f64, s_max: f64, samples: usize) -> Vec<f64> {
    let samples = samples.max(2);
    let mut out = Vec::with_capacity(3 * samples);
    for j in 0..samples {
        let s = s_min + (s_max - s_min) * j as f64 / (samples - 1) as f64;
        let params = ModelParams::exponents(0.5 * s, 0.5 * s, r);
        let (a, b) = match params {
            Ok(p) => (
                lifespan_exponent(&p, mean_zero).map_or(f64::NAN, |l| l.exponent_k),
                general_theory_exponent(&p, mean_zero).map_or(f64::NAN, |l| l.exponent_k),
            ),
            Err(_) => (f64::NAN, f64::NAN),
        };
        out.extend([s, a, b]);
    }
    out
}

/// Sampled `u` on a `width x height` grid of `|x| <= t_max + R`, `0 <= t <= t_end`.
#[wasm_bindgen]
pub struct FieldImage {
    width: usize,
    height: usize,
    values: Vec<f64>,
    t_end: f64,
    x_max: f64,
    crossing: f64,
}

#[wasm_bindgen]
impl FieldImage {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major, first row at `t = 0`.
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    #[wasm_bindgen(getter, js_name = tEnd)]
    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    #[wasm_bindgen(getter, js_name = xMax)]
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Threshold crossing time, NaN when none occurred.
    #[wasm_bindgen(getter)]
    pub fn crossing(&self) -> f64 {
        self.crossing
    }
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn simulate_field(
    p: f64,
    q: f64,
    r: f64,
    a: f64,
    b: f64,
    family_name: &str,
    eps: f64,
    t_max: f64,
    dx: f64,
    width: usize,
    height: usize,
) -> Result<FieldImage, JsError> {
    let params = ModelParams::new(p, q, r, a, b).map_err(js_err)?;
    let data = make_data(family(family_name)?, 1.0, eps).map_err(js_err)?;
    let lattice = Lattice::for_horizon(dx, t_max, data.radius).map_err(js_err)?;
    let opts = EvolveOptions { t_max, threshold: default_threshold(&data), record: true };
    let ev = evolve(&data, &params, lattice, opts).map_err(js_err)?;
    let field = ev.field.ok_or_else(|| JsError::new("no field recorded"))?;
    let lat = *field.lattice();
    let (width, height) = (width.max(2), height.max(2));
    let x_max = t_max + data.radius;
    let mut values = Vec::with_capacity(width * height);
    for row in 0..height {
        let n = row * lat.n_steps() / (height - 1);
        for col in 0..width {
            let x = -x_max + 2.0 * x_max * col as f64 / (width - 1) as f64;
            let i = ((x / lat.dx()).round() as isize + lat.half() as isize).clamp(0, lat.nx() as isize - 1) as usize;
            values.push(field.u.get(i, n));
        }
    }
    Ok(FieldImage {
        width,
        height,
        values,
        t_end: lat.horizon(),
        x_max,
        crossing: ev.crossing.map_or(f64::NAN, |c| c.t),
    })
}

/// Thresholded lifespans on `eps_max * ratio^k`, single resolution.
/// Returns `[eps, T, ...]` followed by `[slope, k_theory]` (NaN when undefined).
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn lifespan_scan(
    p: f64,
    q: f64,
    r: f64,
    a: f64,
    b: f64,
    family_name: &str,
    eps_max: f64,
    ratio: f64,
    count: usize,
    dx: f64,
    t_max: f64,
) -> Result<Vec<f64>, JsError> {
    let params = ModelParams::new(p, q, r, a, b).map_err(js_err)?;
    let fam = family(family_name)?;
    let mut out = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for k in 0..count {
        let eps = eps_max * ratio.powi(k as i32);
        let data = make_data(fam, 1.0, eps).map_err(js_err)?;
        let lattice = Lattice::for_horizon(dx, t_max, data.radius).map_err(js_err)?;
        let opts = EvolveOptions { t_max, threshold: default_threshold(&data), record: false };
        let t = evolve(&data, &params, lattice, opts).map_err(js_err)?.crossing.map_or(f64::NAN, |c| c.t);
        if t.is_finite() {
            xs.push(eps.ln());
            ys.push(t.ln());
        }
        out.extend([eps, t]);
    }
    let slope = least_squares(&xs, &ys).map_or(f64::NAN, |f| f.slope);
    let k_theory = lifespan_exponent(&params, fam.mean_zero()).map_or(f64::NAN, |l| l.exponent_k);
    out.extend([slope, k_theory]);
    Ok(out)
}
