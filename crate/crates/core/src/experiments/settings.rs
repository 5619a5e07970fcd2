//! Flat `key = value` settings shared by config files and command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{Axis, SweepSpec};
use crate::config::{CellMode, Scenario, ScenarioConfig};
use crate::error::{Error, Result};

/// Keys accepted in config files.
pub const KEYS: &[&str] = &[
    "scenario", "n", "lambda", "mu", "ratio", "trials", "epochs", "seed", "out", "plot", "mode",
    "w_bandwidth", "b_content", "cell_scale", "axis", "points", "workers",
];

/// Raw, unvalidated settings. Later layers override earlier ones key by key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment, blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::param(format!("line {}: expected key=value, got {raw:?}", no + 1)));
            };
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::param(format!("line {}: unknown key {key:?}", no + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Settings { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Drops the given keys.
    pub fn without(mut self, keys: &[&str]) -> Self {
        for k in keys {
            self.values.remove(*k);
        }
        self
    }

    /// `other` wins wherever both define a key.
    pub fn overlay(mut self, other: &Settings) -> Self {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
        self
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Error::param(format!("{key} = {v:?}: {e}")))
            })
            .transpose()
    }

    pub fn scenarios(&self) -> Result<Vec<Scenario>> {
        match self.get("scenario") {
            None => Ok(vec![Scenario::GridPathwise]),
            Some("all") => Ok(Scenario::ALL.to_vec()),
            Some(list) => list.split(',').map(|s| s.trim().parse()).collect(),
        }
    }

    pub fn workers(&self) -> Result<Option<usize>> {
        self.parsed("workers")
    }

    pub fn out(&self) -> Option<PathBuf> {
        self.get("out").map(PathBuf::from)
    }

    /// Builds a configuration for the first listed scenario. `ratio` sets
    /// `lambda = ratio * mu` and conflicts with an explicit `lambda`.
    pub fn scenario_config(&self) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::new(self.scenarios()?[0], ScenarioConfig::default().n);
        if let Some(n) = self.parsed("n")? {
            cfg.n = n;
        }
        if let Some(mu) = self.parsed("mu")? {
            cfg.mu = mu;
        }
        match (self.parsed::<f64>("lambda")?, self.parsed::<f64>("ratio")?) {
            (Some(_), Some(_)) => return Err(Error::param("set either lambda or ratio, not both")),
            (Some(l), None) => cfg.lambda = l,
            (None, Some(r)) => cfg.lambda = r * cfg.mu,
            (None, None) => {}
        }
        if let Some(t) = self.parsed("trials")? {
            cfg.trials = t;
        }
        if let Some(s) = self.parsed("seed")? {
            cfg.seed = s;
        }
        if let Some(m) = self.parsed::<CellMode>("mode")? {
            cfg.mode = m;
        }
        if let Some(w) = self.parsed("w_bandwidth")? {
            cfg.w_bandwidth = w;
        }
        if let Some(b) = self.parsed("b_content")? {
            cfg.b_content = b;
        }
        if let Some(c) = self.parsed("cell_scale")? {
            cfg.cell_scale = c;
        }
        Ok(cfg)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let base = self.scenario_config()?;
        let axis = self.parsed::<Axis>("axis")?.unwrap_or(Axis::N);
        let points = match self.get("points") {
            Some(list) => list
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::param(format!("sweep point {p:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?,
            None => match axis {
                Axis::N => vec![base.n as f64],
                Axis::RatioLambdaMu => vec![base.lambda / base.mu],
                Axis::Rho => vec![base.rho()],
            },
        };
        let mut spec = SweepSpec::new(base, axis, points);
        spec.scenarios = self.scenarios()?;
        if let Some(e) = self.parsed("epochs")? {
            spec.epochs = e;
        }
        spec.csv = self.out();
        spec.plot = self.get("plot").map(PathBuf::from);
        Ok(spec)
    }
}
