use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::DEFAULT_BARRIER_CAP;
use crate::error::{Error, Result};
use crate::samplers::{parse_sampler, SamplerSpec};
use crate::tree::TreeParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    DensitySweep,
    BoundsCurve,
    Coverage,
    Barrier,
    Copies,
    Marginal,
    Survival,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::DensitySweep => "density-sweep",
            ExperimentKind::BoundsCurve => "bounds-curve",
            ExperimentKind::Coverage => "coverage",
            ExperimentKind::Barrier => "barrier",
            ExperimentKind::Copies => "copies",
            ExperimentKind::Marginal => "marginal",
            ExperimentKind::Survival => "survival",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("--format must be csv or json, got '{other}'"))),
        }
    }
}

/// `start:stop:step`, start included, stop excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step - 1e-9).ceil().max(0.0) as u64;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("grid '{s}' is not start:stop:step"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let nums = parts
            .iter()
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        let grid = Grid {
            start: nums[0],
            stop: nums[1],
            step: nums[2],
        };
        if grid.step.is_nan()
            || grid.step <= 0.0
            || grid.start.is_nan()
            || grid.stop.is_nan()
            || grid.stop <= grid.start
        {
            return Err(Error::Config(format!("grid '{s}' needs step > 0 and stop > start")));
        }
        Ok(grid)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

impl Serialize for Grid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

fn default_sampler() -> String {
    "bernoulli(0.5)".to_owned()
}
fn default_d() -> u32 {
    3
}
fn default_horizons() -> Vec<u32> {
    vec![16]
}
fn default_trials() -> u64 {
    1000
}
fn default_p() -> f64 {
    0.5
}
fn default_grid() -> Grid {
    Grid {
        start: 0.001,
        stop: 0.999,
        step: 0.001,
    }
}
fn default_k_max() -> u32 {
    64
}
fn default_step() -> f64 {
    1e-4
}
fn default_a() -> f64 {
    0.5
}
fn default_cap() -> u64 {
    DEFAULT_BARRIER_CAP
}

/// One experiment. Also the JSON config file schema; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_sampler")]
    pub sampler: String,
    #[serde(default = "default_d")]
    pub d: u32,
    #[serde(default = "default_horizons")]
    pub horizons: Vec<u32>,
    /// Trial `i` uses seed `seed + i`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Bernoulli marginal for exact (survival) tables.
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_grid")]
    pub p_grid: Grid,
    #[serde(default = "default_k_max")]
    pub k_max: u32,
    #[serde(default = "default_step")]
    pub step: f64,
    /// Barrier slope.
    #[serde(default = "default_a")]
    pub a: f64,
    /// Barrier slack.
    #[serde(default)]
    pub c: f64,
    #[serde(default = "default_cap")]
    pub cap: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub threads: Option<usize>,
    /// Record wall-clock seconds; off by default so output is reproducible byte for byte.
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            sampler: default_sampler(),
            d: default_d(),
            horizons: default_horizons(),
            seed: 0,
            trials: default_trials(),
            p: default_p(),
            p_grid: default_grid(),
            k_max: default_k_max(),
            step: default_step(),
            a: default_a(),
            c: 0.0,
            cap: default_cap(),
            output: None,
            format: Format::Csv,
            threads: None,
            timing: false,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_owned(),
            message: e.to_string(),
        })
    }

    pub fn tree(&self) -> Result<TreeParams> {
        TreeParams::new(self.d).map_err(|e| Error::Config(format!("--d: {e}")))
    }

    pub fn sampler_spec(&self) -> Result<SamplerSpec> {
        parse_sampler(&self.sampler).map_err(|e| Error::Config(format!("--sampler: {e}")))
    }

    /// Checks every field the experiment kind reads.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        self.tree()?;
        if self.threads == Some(0) {
            return fail("--threads must be at least 1".into());
        }
        use ExperimentKind::*;
        if matches!(self.kind, DensitySweep | Barrier | Copies | Marginal | Survival) {
            if self.horizons.is_empty() {
                return fail("--n: at least one horizon is required".into());
            }
            if self.horizons[0] == 0 || self.horizons.windows(2).any(|w| w[0] >= w[1]) {
                return fail("--n: horizons must be positive and strictly increasing".into());
            }
        }
        if matches!(self.kind, DensitySweep | Barrier | Copies | Marginal) {
            if self.trials == 0 {
                return fail("--trials must be at least 1".into());
            }
            let spec = self.sampler_spec()?;
            if self.kind == Copies && !matches!(spec, SamplerSpec::MaxOfK { .. }) {
                return fail(format!("--sampler: copies needs a max(...) sampler, got {spec}"));
            }
            if matches!(self.kind, Barrier | Copies) && spec.mode() != crate::samplers::Mode::Edge {
                return fail(format!("--sampler: {} needs an edge process", self.kind));
            }
        }
        match self.kind {
            Survival if !(0.0..=1.0).contains(&self.p) => fail(format!("--p {} outside [0, 1]", self.p)),
            BoundsCurve if !(self.p_grid.start > 0.0 && self.p_grid.stop <= 1.0) => {
                fail(format!("--p-grid {} must lie inside (0, 1)", self.p_grid))
            }
            Coverage if self.k_max == 0 => fail("--k-max must be at least 1".into()),
            Coverage if !(self.step > 0.0 && self.step < 1.0) => fail(format!("--step {} outside (0, 1)", self.step)),
            Barrier if !(0.0..=1.0).contains(&self.a) => fail(format!("--a {} outside [0, 1]", self.a)),
            Barrier if self.c.is_nan() || self.c < 0.0 => fail(format!("--c {} must be non-negative", self.c)),
            Barrier if self.cap == 0 => fail("--cap must be at least 1".into()),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rows() {
        let g: Grid = "0.001:0.999:0.001".parse().unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 998);
        assert!((pts[449] - 0.45).abs() < 1e-12);
        let g: Grid = "0:1:0.25".parse().unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75]);
        assert!("0:1".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
        assert!("1:0:0.1".parse::<Grid>().is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(ExperimentConfig::from_json_str(r#"{"kind":"coverage","d":4}"#).is_ok());
        let err = ExperimentConfig::from_json_str(r#"{"kind":"coverage","dd":4}"#).unwrap_err();
        assert!(err.to_string().contains("dd"), "{err}");
    }

    #[test]
    fn config_defaults_and_validation() {
        let cfg = ExperimentConfig::from_json_str(r#"{"kind":"density-sweep","horizons":[4,8]}"#).unwrap();
        assert_eq!(cfg.d, 3);
        assert_eq!(cfg.sampler, "bernoulli(0.5)");
        cfg.validate().unwrap();
        let mut bad = cfg.clone();
        bad.horizons = vec![8, 4];
        assert!(bad.validate().is_err());
        let mut bad = cfg.clone();
        bad.trials = 0;
        assert!(bad.validate().unwrap_err().to_string().contains("--trials"));
        let mut bad = cfg.clone();
        bad.sampler = "bernoulli(2)".into();
        assert!(bad.validate().unwrap_err().to_string().contains("--sampler"));
        let mut bad = cfg;
        bad.kind = ExperimentKind::Copies;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn config_json_roundtrip() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Barrier);
        cfg.output = Some("out.csv".into());
        cfg.p_grid = "0.1:0.9:0.1".parse().unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json_str(&text).unwrap(), cfg);
    }
}
