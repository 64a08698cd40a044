mod config;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use semiwave::data::{make_data, Family};
use semiwave::exponents::{exponent_report, ExponentReport};
use semiwave::lattice::Lattice;
use semiwave::picard::{picard_nonzero, picard_zero, PicardOptions};
use semiwave::solver::{default_threshold, evolve, EvolveOptions, LifespanMeasurement};
use semiwave::sweep::{run_sweep, write_plot, SweepConfig};
use semiwave::verify::{run_suite, Suite, SuiteReport};

use config::{parse_threshold, Settings};

/// Bad input from the user; reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

enum Failure {
    Usage(String),
    /// A check or fit did not pass; exit code 1.
    Verification(String),
    Runtime(semiwave::Error),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<semiwave::Error> for Failure {
    fn from(e: semiwave::Error) -> Self {
        use semiwave::Error::*;
        match e {
            InvalidParams(_) | InvalidData(_) | InvalidLattice(_) | Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "semiwave",
    version,
    about = "Lifespan experiments for 1D semilinear wave equations with combined nonlinearities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the predicted lifespan exponents and regime comparison.
    Exponent(Common),
    /// Evolve one solution and write the space-time field.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Amplitude (defaults to --eps-max).
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long = "t-max")]
        t_max: Option<f64>,
        /// Write every `stride`-th lattice point.
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Measure lifespans over a geometric amplitude grid and fit the exponent.
    Sweep(Common),
    /// Run the Picard iteration on a fixed window and write its trace.
    Picard {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eps: Option<f64>,
        /// Window length T.
        #[arg(long = "t-max")]
        t_max: Option<f64>,
    },
    /// Run a property suite: operators, huygens, picard, blowup, solver-order or all.
    Verify {
        suite: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    /// Coefficient of |u_t|^p |u|^q.
    #[arg(long = "A")]
    a: Option<f64>,
    /// Coefficient of |u|^r.
    #[arg(long = "B")]
    b: Option<f64>,
    /// bump, dipole or blowup-seed.
    #[arg(long)]
    family: Option<Family>,
    #[arg(long = "eps-max")]
    eps_max: Option<f64>,
    #[arg(long = "eps-ratio")]
    eps_ratio: Option<f64>,
    #[arg(long = "eps-count")]
    eps_count: Option<usize>,
    #[arg(long)]
    dx: Option<f64>,
    /// Blow-up threshold, or `auto`.
    #[arg(long, value_parser = parse_threshold)]
    threshold: Option<Option<f64>>,
    /// Flat key = value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of largest amplitudes left out of the fit.
    #[arg(long = "fit-skip")]
    fit_skip: Option<usize>,
}

impl Common {
    fn resolve(self, eps: Option<f64>, t_max: Option<f64>, stride: Option<usize>) -> Result<Settings, UsageError> {
        let base = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        Ok(base.overlay(Settings {
            p: self.p,
            q: self.q,
            r: self.r,
            a: self.a,
            b: self.b,
            family: self.family,
            eps_max: self.eps_max,
            eps_ratio: self.eps_ratio,
            eps_count: self.eps_count,
            dx: self.dx,
            threshold: self.threshold,
            out: self.out,
            seed: self.seed,
            fit_skip: self.fit_skip,
            eps,
            t_max,
            stride,
        }))
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn exponent(settings: Settings) -> Result<(), Failure> {
    let params = settings.params()?;
    let means: Vec<bool> = match settings.family {
        Some(f) => vec![f.mean_zero()],
        None => vec![false, true],
    };
    println!("{}", ExponentReport::HEADER);
    for mean_zero in means {
        println!("{}", exponent_report(&params, mean_zero)?.row());
    }
    Ok(())
}

fn sweep_config(settings: &Settings) -> Result<SweepConfig, Failure> {
    let mut cfg = SweepConfig::new(settings.params()?, settings.family());
    cfg.eps_max = settings.eps_max.unwrap_or(cfg.eps_max);
    cfg.eps_ratio = settings.eps_ratio.unwrap_or(cfg.eps_ratio);
    cfg.eps_count = settings.eps_count.unwrap_or(cfg.eps_count);
    cfg.dx = settings.dx.unwrap_or(cfg.dx);
    cfg.threshold = settings.threshold.unwrap_or(cfg.threshold);
    cfg.t_max = settings.t_max.unwrap_or(cfg.t_max);
    cfg.seed = settings.seed.unwrap_or(cfg.seed);
    cfg.fit_skip_largest = settings.fit_skip.unwrap_or(cfg.fit_skip_largest);
    cfg.validate()?;
    Ok(cfg)
}

fn sweep(settings: Settings) -> Result<(), Failure> {
    let cfg = sweep_config(&settings)?;
    let dir = settings.out_dir();
    let outcome = run_sweep(&cfg)?;
    let mut csv = create(&dir, "sweep.csv")?;
    LifespanMeasurement::write_csv(&mut csv, &outcome.measurements)?;
    csv.flush()?;
    let mut plot = create(&dir, "plot.dat")?;
    write_plot(&mut plot, &outcome.measurements, outcome.fit.as_ref().ok())?;
    plot.flush()?;
    let mut fit_out = create(&dir, "fit.txt")?;
    for m in &outcome.measurements {
        println!("{}", m.csv_row());
    }
    match &outcome.fit {
        Ok(fit) => {
            fit.write(&mut fit_out)?;
            fit_out.flush()?;
            println!(
                "k_fit = {:.4} (theory {:.4}, relative error {:.2}%)",
                fit.k_fit(),
                fit.k_theory,
                100.0 * fit.rel_err
            );
            Ok(())
        }
        Err(e) => {
            writeln!(fit_out, "error = {e}")?;
            fit_out.flush()?;
            Err(Failure::Verification(e.to_string()))
        }
    }
}

fn simulate(settings: Settings) -> Result<(), Failure> {
    let params = settings.params()?;
    let eps = settings.eps.or(settings.eps_max).unwrap_or(0.5);
    let data = make_data(settings.family(), 1.0, eps)?;
    let dx = settings.dx.unwrap_or(0.02);
    let t_max = settings.t_max.unwrap_or(10.0);
    let threshold = settings.threshold.flatten().unwrap_or_else(|| default_threshold(&data));
    let lattice = Lattice::for_horizon(dx, t_max, data.radius)?;
    let ev = evolve(&data, &params, lattice, EvolveOptions { t_max, threshold, record: true })?;
    let dir = settings.out_dir();
    let mut out = create(&dir, "field.csv")?;
    if let Some(field) = &ev.field {
        field.write_csv(&mut out, data.radius, settings.stride.unwrap_or(1).max(1))?;
    }
    out.flush()?;
    let mut stats = create(&dir, "stats.csv")?;
    writeln!(stats, "t,max_u,max_w,mass")?;
    for s in &ev.stats {
        writeln!(stats, "{:.9e},{:.9e},{:.9e},{:.9e}", s.t, s.max_u, s.max_w, s.mass)?;
    }
    stats.flush()?;
    match ev.crossing {
        Some(c) => println!(
            "threshold {threshold:.3e} crossed at t = {:.6}{}",
            c.t,
            if c.nonfinite { " (non-finite values)" } else { "" }
        ),
        None => println!("no crossing of {threshold:.3e} up to t = {:.6}", ev.horizon),
    }
    Ok(())
}

fn picard(settings: Settings) -> Result<(), Failure> {
    let params = settings.params()?;
    let family = settings.family();
    let data = make_data(family, 1.0, settings.eps.or(settings.eps_max).unwrap_or(0.1))?;
    let lattice = Lattice::for_horizon(settings.dx.unwrap_or(0.05), settings.t_max.unwrap_or(4.0), data.radius)?;
    let opts = PicardOptions::default();
    let run = if family.mean_zero() {
        picard_zero(&data, &params, lattice, opts)
    } else {
        picard_nonzero(&data, &params, lattice, opts)
    };
    let trace = match run {
        Ok((_, trace)) => trace,
        Err(semiwave::Error::Diverged(trace)) => *trace,
        Err(e) => return Err(e.into()),
    };
    let mut out = create(&settings.out_dir(), "picard.csv")?;
    trace.write_csv(&mut out)?;
    out.flush()?;
    println!(
        "{} scheme: {} iterations, converged = {}, max rho_j (j>=2) = {:.4}",
        trace.scheme,
        trace.iterations,
        trace.converged,
        trace.max_ratio_from(2)
    );
    if trace.converged {
        Ok(())
    } else {
        Err(Failure::Verification("the iteration did not converge".into()))
    }
}

fn verify(suite: &str, settings: Settings) -> Result<(), Failure> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse().map_err(|e: semiwave::Error| Failure::Usage(e.to_string()))?]
    };
    let reports = suites.into_iter().map(run_suite).collect::<Result<Vec<SuiteReport>, _>>()?;
    let mut text = Vec::new();
    writeln!(text, "{}", SuiteReport::CSV_HEADER)?;
    for r in &reports {
        r.write_rows(&mut text)?;
    }
    io::stdout().write_all(&text)?;
    if let Some(dir) = &settings.out {
        let mut out = create(dir, "verify.csv")?;
        out.write_all(&text)?;
        out.flush()?;
    }
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed()).map(|r| r.suite.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("failed suites: {}", failed.join(", "))))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Exponent(c) => exponent(c.resolve(None, None, None)?),
        Command::Simulate { common, eps, t_max, stride } => simulate(common.resolve(eps, t_max, stride)?),
        Command::Sweep(c) => sweep(c.resolve(None, None, None)?),
        Command::Picard { common, eps, t_max } => picard(common.resolve(eps, t_max, None)?),
        Command::Verify { suite, common } => verify(&suite, common.resolve(None, None, None)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("semiwave: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("semiwave: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("semiwave: {e}");
            ExitCode::from(1)
        }
    }
}
