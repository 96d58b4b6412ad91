//! Run settings from flags and an optional `key = value` file.
//!
//! File lines are `key = value`; blank lines and lines starting with `#` are
//! skipped. A flag given on the command line replaces the file's value.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use ccr::heisenberg::ForceLaw;
use ccr::opalg::{ParamValues, Polynomial};
use ccr::propagator::{AffineFlowExact, Model};
use ccr::wavefunction::Grid;
use thiserror::Error;

use crate::parse::{parse_polynomial, ParseError};

pub const KEYS: &[&str] = &[
    "model", "force", "m", "omega", "f0", "x_min", "x_max", "n", "t", "steps", "order", "x0", "p0", "sigma", "output",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: PathBuf, line: usize },
    #[error("unknown setting `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {value:?}")]
    BadValue { key: String, value: String },
    #[error("invalid force polynomial: {0}")]
    Force(#[from] ParseError),
    #[error("{0}")]
    Invalid(String),
}

/// Raw settings before validation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let mut s = Self::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    path: path.to_path_buf(),
                    line: k + 1,
                });
            };
            s.set(key.trim(), value.trim())?;
        }
        Ok(s)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        self.0.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Values in `over` replace those in `self`.
    pub fn overlay(mut self, over: Settings) -> Self {
        self.0.extend(over.0);
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                value: v.to_string(),
            }),
        }
    }
}

/// Which force law a run uses.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    Free,
    Harmonic,
    Linear,
    /// Force polynomial in `X`; no closed form.
    Custom(Polynomial),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub mass: f64,
    pub omega: f64,
    pub f0: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub t: f64,
    pub steps: Vec<usize>,
    pub order: usize,
    pub x0: f64,
    pub p0: f64,
    pub sigma: f64,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Fills defaults and validates.
    pub fn from_settings(s: &Settings) -> Result<Self, ConfigError> {
        let model = match (s.get("force"), s.get("model")) {
            (Some(f), _) => ModelSpec::Custom(parse_polynomial(f)?),
            (None, None | Some("free")) => ModelSpec::Free,
            (None, Some("harmonic")) => ModelSpec::Harmonic,
            (None, Some("linear")) => ModelSpec::Linear,
            (None, Some(other)) => {
                return Err(ConfigError::BadValue {
                    key: "model".into(),
                    value: other.into(),
                })
            }
        };
        let steps = match s.get("steps") {
            None => vec![4, 8, 16, 32],
            Some(v) => v
                .split(',')
                .map(|p| p.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| ConfigError::BadValue {
                    key: "steps".into(),
                    value: v.into(),
                })?,
        };
        let cfg = Self {
            model,
            mass: s.parsed("m", 1.0)?,
            omega: s.parsed("omega", 1.0)?,
            f0: s.parsed("f0", 1.0)?,
            x_min: s.parsed("x_min", -10.0)?,
            x_max: s.parsed("x_max", 10.0)?,
            n: s.parsed("n", 512)?,
            t: s.parsed("t", 1.0)?,
            steps,
            order: s.parsed("order", ccr::heisenberg::DEFAULT_ORDER)?,
            x0: s.parsed("x0", 0.0)?,
            p0: s.parsed("p0", 0.0)?,
            sigma: s.parsed("sigma", 1.0)?,
            output: s.get("output").map(PathBuf::from),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!("{name} must be > 0, got {v}")))
            }
        };
        positive("m", self.mass)?;
        positive("t", self.t)?;
        positive("sigma", self.sigma)?;
        if self.model == ModelSpec::Harmonic {
            positive("omega", self.omega)?;
        }
        for (name, v) in [("f0", self.f0), ("x0", self.x0), ("p0", self.p0)] {
            if !v.is_finite() {
                return Err(ConfigError::Invalid(format!("{name} must be finite, got {v}")));
            }
        }
        if self.n < 2 {
            return Err(ConfigError::Invalid(format!("n must be at least 2, got {}", self.n)));
        }
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            return Err(ConfigError::Invalid(format!("need x_min < x_max, got [{}, {}]", self.x_min, self.x_max)));
        }
        if self.steps.is_empty() || self.steps[0] == 0 || self.steps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::Invalid("steps must be positive and strictly increasing".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.x_min, self.x_max, self.n).expect("validated grid")
    }

    pub fn params(&self) -> ParamValues {
        use ccr::heisenberg::{FORCE, MASS, OMEGA};
        ParamValues::new().with(MASS, self.mass).with(OMEGA, self.omega).with(FORCE, self.f0)
    }

    pub fn force_law(&self) -> ForceLaw {
        match &self.model {
            ModelSpec::Free => ForceLaw::free(),
            ModelSpec::Harmonic => ForceLaw::harmonic(),
            ModelSpec::Linear => ForceLaw::linear(),
            ModelSpec::Custom(f) => ForceLaw::new(f.clone(), "custom"),
        }
    }

    /// Closed-form flow, if the model has one.
    pub fn exact_flow(&self) -> Option<AffineFlowExact> {
        let model = match self.model {
            ModelSpec::Free => Model::Free,
            ModelSpec::Harmonic => Model::Harmonic { omega: self.omega },
            ModelSpec::Linear => Model::Linear { force: self.f0 },
            ModelSpec::Custom(_) => return None,
        };
        AffineFlowExact::new(model, self.mass).ok()
    }
}
