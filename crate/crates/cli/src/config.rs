//! Flat `key = value` configuration files. Keys mirror the long command-line
//! flags; values given on the command line win.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use semiwave::data::Family;
use semiwave::exponents::ModelParams;

use crate::UsageError;

pub const KEYS: &[&str] = &[
    "p",
    "q",
    "r",
    "A",
    "B",
    "family",
    "eps-max",
    "eps-ratio",
    "eps-count",
    "dx",
    "threshold",
    "out",
    "seed",
    "eps",
    "t-max",
    "stride",
    "fit-skip",
];

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Settings {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub family: Option<Family>,
    pub eps_max: Option<f64>,
    pub eps_ratio: Option<f64>,
    pub eps_count: Option<usize>,
    pub dx: Option<f64>,
    /// `Some(None)` means the automatic threshold was requested explicitly.
    pub threshold: Option<Option<f64>>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub eps: Option<f64>,
    pub t_max: Option<f64>,
    pub stride: Option<usize>,
    pub fit_skip: Option<usize>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, UsageError> {
    value.parse().map_err(|_| UsageError(format!("cannot parse `{value}` for key `{key}`")))
}

pub fn parse_threshold(value: &str) -> Result<Option<f64>, String> {
    if value == "auto" {
        return Ok(None);
    }
    value.parse::<f64>().map(Some).map_err(|_| format!("expected a number or `auto`, got `{value}`"))
}

impl Settings {
    pub fn from_text(text: &str) -> Result<Self, UsageError> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(UsageError(format!("line {}: unknown key `{key}`", lineno + 1)));
            }
            if map.insert(key.to_string(), value.to_string()).is_some() {
                return Err(UsageError(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        let mut s = Settings::default();
        for (key, value) in &map {
            let v = value.as_str();
            match key.as_str() {
                "p" => s.p = Some(parse(key, v)?),
                "q" => s.q = Some(parse(key, v)?),
                "r" => s.r = Some(parse(key, v)?),
                "A" => s.a = Some(parse(key, v)?),
                "B" => s.b = Some(parse(key, v)?),
                "family" => s.family = Some(v.parse().map_err(|e| UsageError(format!("{e}")))?),
                "eps-max" => s.eps_max = Some(parse(key, v)?),
                "eps-ratio" => s.eps_ratio = Some(parse(key, v)?),
                "eps-count" => s.eps_count = Some(parse(key, v)?),
                "dx" => s.dx = Some(parse(key, v)?),
                "threshold" => s.threshold = Some(parse_threshold(v).map_err(UsageError)?),
                "out" => s.out = Some(PathBuf::from(v)),
                "seed" => s.seed = Some(parse(key, v)?),
                "eps" => s.eps = Some(parse(key, v)?),
                "t-max" => s.t_max = Some(parse(key, v)?),
                "stride" => s.stride = Some(parse(key, v)?),
                "fit-skip" => s.fit_skip = Some(parse(key, v)?),
                _ => unreachable!("keys are checked against KEYS"),
            }
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            p: over.p.or(self.p),
            q: over.q.or(self.q),
            r: over.r.or(self.r),
            a: over.a.or(self.a),
            b: over.b.or(self.b),
            family: over.family.or(self.family),
            eps_max: over.eps_max.or(self.eps_max),
            eps_ratio: over.eps_ratio.or(self.eps_ratio),
            eps_count: over.eps_count.or(self.eps_count),
            dx: over.dx.or(self.dx),
            threshold: over.threshold.or(self.threshold),
            out: over.out.or(self.out),
            seed: over.seed.or(self.seed),
            eps: over.eps.or(self.eps),
            t_max: over.t_max.or(self.t_max),
            stride: over.stride.or(self.stride),
            fit_skip: over.fit_skip.or(self.fit_skip),
        }
    }

    /// Model parameters, defaulting to `p = q = 2`, `r = 3`, `A = B = 1`.
    pub fn params(&self) -> Result<ModelParams, UsageError> {
        ModelParams::new(
            self.p.unwrap_or(2.0),
            self.q.unwrap_or(2.0),
            self.r.unwrap_or(3.0),
            self.a.unwrap_or(1.0),
            self.b.unwrap_or(1.0),
        )
        .map_err(|e| UsageError(e.to_string()))
    }

    pub fn family(&self) -> Family {
        self.family.unwrap_or(Family::Bump)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("semiwave-out"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let file =
            Settings::from_text("# sweep\np = 1.5\nA=1 # product term\nB = 0\nfamily = dipole\nthreshold = auto\n")
                .unwrap();
        assert_eq!(file.p, Some(1.5));
        assert_eq!(file.family, Some(Family::Dipole));
        assert_eq!(file.threshold, Some(None));
        let cli = Settings { p: Some(2.5), ..Settings::default() };
        let merged = file.overlay(cli);
        assert_eq!(merged.p, Some(2.5));
        assert_eq!(merged.b, Some(0.0));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(Settings::from_text("p 1.5").is_err());
        assert!(Settings::from_text("colour = red").is_err());
        assert!(Settings::from_text("p = x").is_err());
        assert!(Settings::from_text("p = 1\np = 2").is_err());
    }
}
