//! Lifespan sweeps over geometric amplitude grids and power-law fits.

use std::io::Write;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::data::{make_data, Family};
use crate::error::{Error, Result};
use crate::exponents::{lifespan_exponent, ModelParams};
use crate::solver::{measure_lifespan, LifespanMeasurement, LifespanOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub params: ModelParams,
    pub family: Family,
    pub radius: f64,
    pub eps_max: f64,
    pub eps_ratio: f64,
    pub eps_count: usize,
    pub dx: f64,
    /// `None` selects the default threshold of each run.
    pub threshold: Option<f64>,
    pub tol_refine: f64,
    pub t_max: f64,
    /// Number of largest amplitudes left out of the fit.
    pub fit_skip_largest: usize,
    pub seed: u64,
}

impl SweepConfig {
    pub fn new(params: ModelParams, family: Family) -> Self {
        Self {
            params,
            family,
            radius: 1.0,
            eps_max: 0.5,
            eps_ratio: 0.8,
            eps_count: 8,
            dx: 0.02,
            threshold: None,
            tol_refine: 0.05,
            t_max: 2000.0,
            fit_skip_largest: 1,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.eps_count < 4 + self.fit_skip_largest {
            return Err(Error::Config(format!(
                "eps_count = {} leaves fewer than 4 points after skipping the {} largest",
                self.eps_count, self.fit_skip_largest
            )));
        }
        if !(self.eps_ratio > 0.0 && self.eps_ratio < 1.0) {
            return Err(Error::Config(format!("eps_ratio = {} must lie in (0, 1)", self.eps_ratio)));
        }
        if !(self.eps_max > 0.0) || !(self.dx > 0.0) || !(self.t_max > 0.0) || !(self.tol_refine > 0.0) {
            return Err(Error::Config("eps_max, dx, t_max and tol_refine must be positive".into()));
        }
        Ok(())
    }

    /// `eps_max * ratio^k` for `k = 0..count`, largest first.
    pub fn eps_grid(&self) -> Vec<f64> {
        (0..self.eps_count).map(|k| self.eps_max * self.eps_ratio.powi(k as i32)).collect()
    }
}

/// Least-squares line `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
}

pub fn least_squares(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return Err(Error::Fit(format!("need at least two paired points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if n > 2 {
        let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit { slope, intercept, stderr })
}

/// Fit of `log T = slope log eps + intercept`; the measured exponent is `-slope`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub k_theory: f64,
    /// `|slope + k_theory| / k_theory`
    pub rel_err: f64,
    pub points: usize,
}

impl FitResult {
    pub fn k_fit(&self) -> f64 {
        -self.slope
    }

    pub fn write(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "slope = {:.9e}", self.slope)?;
        writeln!(out, "intercept = {:.9e}", self.intercept)?;
        writeln!(out, "stderr = {:.9e}", self.stderr)?;
        writeln!(out, "k_fit = {:.9e}", self.k_fit())?;
        writeln!(out, "k_theory = {:.9e}", self.k_theory)?;
        writeln!(out, "rel_err = {:.9e}", self.rel_err)?;
        writeln!(out, "points = {}", self.points)?;
        Ok(())
    }
}

/// Power-law fit over accepted measurements; at least four are required.
pub fn fit_lifespans(measurements: &[LifespanMeasurement], k_theory: f64) -> Result<FitResult> {
    let (x, y): (Vec<f64>, Vec<f64>) =
        measurements.iter().filter(|m| m.accepted).filter_map(|m| m.t_num.map(|t| (m.eps.ln(), t.ln()))).unzip();
    if x.len() < 4 {
        let summary: Vec<String> =
            measurements.iter().map(|m| format!("eps={:.4e} T={:?} accepted={}", m.eps, m.t_num, m.accepted)).collect();
        return Err(Error::Fit(format!("{} accepted points (need 4): {}", x.len(), summary.join("; "))));
    }
    let line = least_squares(&x, &y)?;
    Ok(FitResult {
        slope: line.slope,
        intercept: line.intercept,
        stderr: line.stderr,
        k_theory,
        rel_err: (line.slope + k_theory).abs() / k_theory,
        points: x.len(),
    })
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub measurements: Vec<LifespanMeasurement>,
    pub fit: Result<FitResult>,
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let opts = LifespanOptions {
        dx: config.dx,
        threshold: config.threshold,
        tol_refine: config.tol_refine,
        t_max: config.t_max,
    };
    let measure = |eps: &f64| -> Result<LifespanMeasurement> {
        let data = make_data(config.family, config.radius, *eps)?;
        measure_lifespan(&data, &config.params, opts)
    };
    let grid = config.eps_grid();
    #[cfg(feature = "parallel")]
    let results: Vec<Result<LifespanMeasurement>> = grid.par_iter().map(measure).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<LifespanMeasurement>> = grid.iter().map(measure).collect();
    let measurements = results.into_iter().collect::<Result<Vec<_>>>()?;
    let k_theory = lifespan_exponent(&config.params, config.family.mean_zero())?.exponent_k;
    let fit = fit_lifespans(&measurements[config.fit_skip_largest..], k_theory);
    Ok(SweepOutcome { measurements, fit })
}

/// Whitespace-separated `eps T_num` pairs of the accepted measurements.
pub fn write_plot(out: &mut impl Write, measurements: &[LifespanMeasurement], fit: Option<&FitResult>) -> Result<()> {
    writeln!(out, "# eps T_num")?;
    if let Some(f) = fit {
        writeln!(out, "# fit: log T = {:.6} log eps + {:.6}", f.slope, f.intercept)?;
    }
    for m in measurements.iter().filter(|m| m.accepted) {
        if let Some(t) = m.t_num {
            writeln!(out, "{:.9e} {:.9e}", m.eps, t)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn measurement(eps: f64, t: f64) -> LifespanMeasurement {
        LifespanMeasurement {
            eps,
            t_num: Some(t),
            threshold: 1e3,
            dx: 0.02,
            refined_t_num: Some(t),
            rel_change: Some(0.0),
            accepted: true,
            nonfinite: false,
        }
    }

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = least_squares(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14);
        assert!(f.stderr < 1e-14);
        assert!(least_squares(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn noisy_power_law_recovers_exponent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in [0.975, 1.5, 2.0, 2.857] {
            let ms: Vec<_> = (0..8)
                .map(|j| {
                    let eps = 0.5 * 0.8f64.powi(j);
                    let noise = 1.0 + rng.gen_range(-0.02..=0.02);
                    measurement(eps, 3.0 * eps.powf(-k) * noise)
                })
                .collect();
            let fit = fit_lifespans(&ms, k).unwrap();
            assert!(fit.rel_err <= 0.03, "k = {k}: {fit:?}");
        }
    }

    #[test]
    fn fit_refuses_sparse_data() {
        let mut ms: Vec<_> = (0..6).map(|j| measurement(0.5 * 0.8f64.powi(j), 10.0 + j as f64)).collect();
        for m in ms.iter_mut().skip(3) {
            m.accepted = false;
        }
        assert!(matches!(fit_lifespans(&ms, 1.0), Err(Error::Fit(_))));
    }

    #[test]
    fn config_validation_and_grid() {
        let p = ModelParams::exponents(2.0, 2.0, 3.0).unwrap();
        let mut c = SweepConfig::new(p, Family::Bump);
        let g = c.eps_grid();
        assert_eq!(g.len(), 8);
        assert!((g[1] / g[0] - 0.8).abs() < 1e-15);
        c.eps_count = 3;
        assert!(c.validate().is_err());
        c.eps_count = 8;
        c.eps_ratio = 1.2;
        assert!(c.validate().is_err());
    }

    #[test]
    fn plot_lists_accepted_points() {
        let mut ms = vec![measurement(0.5, 10.0), measurement(0.4, 20.0)];
        ms[1].accepted = false;
        let mut buf = Vec::new();
        write_plot(&mut buf, &ms, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1);
    }
}
