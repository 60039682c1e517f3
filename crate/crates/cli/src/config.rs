//! Experiment configuration as read from JSON and command-line flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Sweep,
    Chain,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Fig5 => "fig5",
            Experiment::Sweep => "sweep",
            Experiment::Chain => "chain",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" | "lin" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            other => Err(format!("unknown scale `{other}` (expected linear or log)")),
        }
    }
}

/// One swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl SweepAxis {
    pub fn new(name: &str, min: f64, max: f64, points: usize, scale: Scale) -> Self {
        SweepAxis {
            name: name.to_string(),
            min,
            max,
            points,
            scale,
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |msg: String| {
            Err(RunError::Config(format!(
                "sweep axis `{}`: {msg}",
                self.name
            )))
        };
        if !(self.min.is_finite() && self.max.is_finite()) {
            return bad("bounds must be finite".into());
        }
        if self.min > self.max {
            return bad(format!("min {} exceeds max {}", self.min, self.max));
        }
        if self.points == 0 {
            return bad("needs at least one point".into());
        }
        if self.points == 1 && self.min != self.max {
            return bad("a single point needs min == max".into());
        }
        if self.scale == Scale::Log && self.min <= 0.0 {
            return bad("log scale needs min > 0".into());
        }
        Ok(())
    }

    /// Grid values from `min` to `max`, endpoints exact.
    pub fn values(&self) -> Result<Vec<f64>, RunError> {
        self.validate()?;
        if self.points == 1 {
            return Ok(vec![self.min]);
        }
        Ok(match self.scale {
            Scale::Linear => untrusted_relay::numerics::lin_space(self.min, self.max, self.points),
            Scale::Log => untrusted_relay::numerics::log_space(self.min, self.max, self.points),
        })
    }
}

/// Every setting an experiment can take. Unset fields fall back to the
/// defaults of the experiment being run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepAxis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Where to write the table. Not part of the echoed configuration.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment: Some(experiment),
            ..Default::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Config(format!("config file: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
            context: format!("reading {}", path.display()),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merged(self, over: ExperimentConfig) -> Self {
        ExperimentConfig {
            experiment: over.experiment.or(self.experiment),
            ps: over.ps.or(self.ps),
            pd: over.pd.or(self.pd),
            sigma2: over.sigma2.or(self.sigma2),
            eps1: over.eps1.or(self.eps1),
            eps2: over.eps2.or(self.eps2),
            g1: over.g1.or(self.g1),
            g2: over.g2.or(self.g2),
            rd: over.rd.or(self.rd),
            rs: over.rs.or(self.rs),
            rho: over.rho.or(self.rho),
            sweep: over.sweep.or(self.sweep),
            mc_samples: over.mc_samples.or(self.mc_samples),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
        }
    }

    /// Compact JSON of everything except the output path.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(crate::DEFAULT_SEED)
    }
}
