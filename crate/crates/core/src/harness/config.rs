//! Run configuration: a flat `key = value` file, overridden by flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::filters::StepMethod;
use crate::format::sig17;
use crate::params::{ModelParams, Preset, DEFAULT_DEGENERACY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Simulate,
    Filter,
    Price,
    Verify,
    Sensitivity,
    Calibrate,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::Filter => "filter",
            Experiment::Price => "price",
            Experiment::Verify => "verify",
            Experiment::Sensitivity => "sensitivity",
            Experiment::Calibrate => "calibrate",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "simulate" => Experiment::Simulate,
            "filter" => Experiment::Filter,
            "price" => Experiment::Price,
            "verify" => Experiment::Verify,
            "sensitivity" => Experiment::Sensitivity,
            "calibrate" => Experiment::Calibrate,
            other => return Err(Error::config("experiment", format!("unknown experiment `{other}`"))),
        })
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const KEYS: &[&str] = &[
    "experiment",
    "preset",
    "pi0",
    "lambda",
    "mu1",
    "mu2",
    "beta",
    "degeneracy_tol",
    "horizon",
    "dt",
    "n_paths",
    "seed",
    "r",
    "deltas",
    "scheme",
    "verify_scale",
    "input",
    "out",
];

/// Unresolved settings: file entries, then overrides on top.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut s = Self::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::config(
                    format!("{origin}:{}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                ));
            };
            s.set(k.trim(), v.trim())
                .map_err(|e| Error::config(format!("{origin}:{}", lineno + 1), e.to_string()))?;
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let key = key.replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::config(key, "unknown key"));
        }
        self.values.insert(key, value.into());
        Ok(())
    }

    /// Entries of `other` win.
    pub fn merge(&mut self, other: &Settings) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &'static str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| Error::config(key, format!("cannot parse `{v}`: {e}"))),
        }
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        RunConfig::from_settings(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub preset: Preset,
    pub params: ModelParams,
    pub horizon: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub r: f64,
    /// Recovery fractions for the `price` experiment.
    pub deltas: Vec<f64>,
    pub scheme: StepMethod,
    /// Multiplies the path counts of `verify`.
    pub verify_scale: f64,
    /// Rate series for `calibrate`.
    pub input: Option<PathBuf>,
    pub out: PathBuf,
}

impl RunConfig {
    fn from_settings(s: &Settings) -> Result<Self> {
        let experiment: Experiment = match s.get("experiment") {
            Some(v) => v.parse()?,
            None => return Err(Error::config("experiment", "missing")),
        };
        let default_preset = match experiment {
            Experiment::Sensitivity => Preset::EstimateComparison,
            _ => Preset::CreditPricing,
        };
        let preset = match s.get("preset") {
            None => default_preset,
            Some(name) => Preset::from_name(name)
                .ok_or_else(|| Error::config("preset", format!("unknown preset `{name}` (table1, table2)")))?,
        };
        let base = preset.params();
        let num = |key: &'static str, default: f64| -> Result<f64> { Ok(s.parsed::<f64>(key)?.unwrap_or(default)) };
        let params = ModelParams::new(
            num("pi0", base.pi0())?,
            num("lambda", base.lambda())?,
            num("mu1", base.mu1())?,
            num("mu2", base.mu2())?,
            num("beta", base.beta())?,
            num("degeneracy_tol", DEFAULT_DEGENERACY_TOL)?,
        )
        .map_err(|e| match e {
            Error::Domain { field, reason } => Error::config(field, reason),
            other => other,
        })?;

        let horizon = num("horizon", preset.horizon())?;
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::config("horizon", format!("{horizon} must be > 0")));
        }
        let dt = num("dt", 1e-3)?;
        if !(dt > 0.0 && dt <= horizon) {
            return Err(Error::config("dt", format!("{dt} must lie in (0, horizon]")));
        }
        let default_paths = match experiment {
            Experiment::Sensitivity => 1000,
            _ => 1,
        };
        let n_paths = s.parsed::<usize>("n_paths")?.unwrap_or(default_paths);
        if n_paths < 1 {
            return Err(Error::config("n_paths", "must be >= 1"));
        }
        let seed = s.parsed::<u64>("seed")?.unwrap_or(18);
        let r = num("r", preset.rate())?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::config("r", format!("{r} must be > 0")));
        }
        let deltas = match s.get("deltas") {
            None => vec![0.0, 0.5],
            Some(list) => list
                .split(',')
                .map(|d| {
                    let v: f64 = d
                        .trim()
                        .parse()
                        .map_err(|e| Error::config("deltas", format!("cannot parse `{d}`: {e}")))?;
                    if (0.0..=1.0).contains(&v) {
                        Ok(v)
                    } else {
                        Err(Error::config("deltas", format!("{v} is not in [0, 1]")))
                    }
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let scheme = match s.get("scheme").unwrap_or("milstein") {
            "milstein" => StepMethod::Milstein,
            "euler" => StepMethod::Euler,
            other => return Err(Error::config("scheme", format!("unknown scheme `{other}` (milstein, euler)"))),
        };
        let verify_scale = num("verify_scale", 1.0)?;
        if !(verify_scale > 0.0 && verify_scale.is_finite()) {
            return Err(Error::config("verify_scale", "must be > 0"));
        }
        let input = s.get("input").map(PathBuf::from);
        let out = PathBuf::from(s.get("out").unwrap_or("out"));
        Ok(Self {
            experiment,
            preset,
            params,
            horizon,
            dt,
            n_paths,
            seed,
            r,
            deltas,
            scheme,
            verify_scale,
            input,
            out,
        })
    }

    /// Canonical `key=value` listing of every resolved setting except the
    /// output directory.
    pub fn canonical(&self) -> String {
        let p = &self.params;
        let mut lines = vec![
            format!("experiment={}", self.experiment),
            format!("preset={}", self.preset.name()),
            format!("pi0={}", sig17(p.pi0())),
            format!("lambda={}", sig17(p.lambda())),
            format!("mu1={}", sig17(p.mu1())),
            format!("mu2={}", sig17(p.mu2())),
            format!("beta={}", sig17(p.beta())),
            format!("degeneracy_tol={}", sig17(p.degeneracy_tol())),
            format!("horizon={}", sig17(self.horizon)),
            format!("dt={}", sig17(self.dt)),
            format!("n_paths={}", self.n_paths),
            format!("seed={}", self.seed),
            format!("r={}", sig17(self.r)),
            format!(
                "deltas={}",
                self.deltas.iter().map(|d| sig17(*d)).collect::<Vec<_>>().join(",")
            ),
            format!(
                "scheme={}",
                match self.scheme {
                    StepMethod::Milstein => "milstein",
                    StepMethod::Euler => "euler",
                }
            ),
            format!("verify_scale={}", sig17(self.verify_scale)),
        ];
        if let Some(input) = &self.input {
            lines.push(format!("input={}", input.display()));
        }
        lines.sort();
        lines.join("\n")
    }

    /// SHA-256 of [`RunConfig::canonical`], hex encoded.
    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(text: &str) -> Settings {
        Settings::parse(text, "test").unwrap()
    }

    #[test]
    fn defaults_follow_the_preset() {
        let c = settings("experiment = price").resolve().unwrap();
        assert_eq!(c.preset, Preset::CreditPricing);
        assert_eq!(c.horizon, 10.0);
        assert_eq!(c.r, 0.0263);
        assert_eq!(c.deltas, vec![0.0, 0.5]);
        let s = settings("experiment = sensitivity").resolve().unwrap();
        assert_eq!(s.preset, Preset::EstimateComparison);
        assert_eq!(s.n_paths, 1000);
    }

    #[test]
    fn overrides_win() {
        let mut s = settings("experiment = simulate\nseed = 3 # comment\n\nbeta = 0.2");
        let mut flags = Settings::new();
        flags.set("seed", "9").unwrap();
        flags.set("n-paths", "4").unwrap();
        s.merge(&flags);
        let c = s.resolve().unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.n_paths, 4);
        assert_eq!(c.params.beta(), 0.2);
    }

    #[test]
    fn errors_name_the_field() {
        let bad = |text: &str| match settings(text).resolve() {
            Err(Error::Config { path, .. }) => path,
            other => panic!("{other:?}"),
        };
        assert_eq!(bad("experiment = simulate\ndt = -1"), "dt");
        assert_eq!(bad("experiment = simulate\nbeta = 0"), "beta");
        assert_eq!(bad("experiment = simulate\nn_paths = x"), "n_paths");
        assert_eq!(bad("experiment = nope"), "experiment");
        assert_eq!(bad("preset = table2"), "experiment");
        assert_eq!(bad("experiment = price\ndeltas = 0,1.5"), "deltas");
        assert!(matches!(Settings::parse("bogus = 1", "f.cfg"), Err(Error::Config { path, .. }) if path == "f.cfg:1"));
        assert!(matches!(Settings::parse("line without equals", "f.cfg"), Err(Error::Config { .. })));
    }

    #[test]
    fn hash_tracks_inputs_not_output_dir() {
        let a = settings("experiment = simulate\nout = a").resolve().unwrap();
        let b = settings("experiment = simulate\nout = b").resolve().unwrap();
        let c = settings("experiment = simulate\nseed = 19").resolve().unwrap();
        assert_eq!(a.config_hash(), b.config_hash());
        assert_ne!(a.config_hash(), c.config_hash());
        assert_eq!(a.config_hash().len(), 64);
    }
}
