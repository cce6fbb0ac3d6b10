//! Experiment configuration shared by the batch drivers and the CLI.

use serde::{Deserialize, Serialize};

use crate::closedform::quad::QuadSpec;
use crate::cohom::builder::Variant;
use crate::error::{Error, Result};
use crate::models::Sign;

pub const DEFAULT_SCHEDULE: [f64; 5] = [32.0, 64.0, 128.0, 256.0, 512.0];

fn default_n() -> usize {
    2
}
fn default_j() -> usize {
    1
}
fn default_i() -> usize {
    2
}
fn default_s() -> usize {
    1
}
fn default_variant() -> Variant {
    Variant::Twist
}
fn default_schedule() -> Vec<f64> {
    DEFAULT_SCHEDULE.to_vec()
}
fn default_beta() -> u32 {
    1
}
fn default_points() -> usize {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_j")]
    pub j: usize,
    #[serde(default = "default_i")]
    pub i: usize,
    #[serde(default)]
    pub sign: Sign,
    #[serde(default = "default_s")]
    pub s: usize,
    #[serde(default)]
    pub sigma: usize,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    /// Twist parameter; defaults to 1.
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Map step; defaults to 1.
    #[serde(default, rename = "L")]
    pub l: Option<f64>,
    #[serde(default = "default_schedule")]
    pub nu_schedule: Vec<f64>,
    /// Quadrature settings; when absent, chosen by dimension (see `quad_spec`).
    #[serde(default)]
    pub quad: Option<QuadSpec>,
    #[serde(default)]
    pub seed: u64,
    /// Power β for the T/B split.
    #[serde(default = "default_beta")]
    pub beta: u32,
    /// Sample points per t for pointwise checks.
    #[serde(default = "default_points")]
    pub points: usize,
    /// Direction for the tame check, e.g. "u3,1".
    #[serde(default)]
    pub direction: Option<String>,
    /// Highest Sobolev order used on g by the tame check; the loss is min(12, s_max − s).
    #[serde(default)]
    pub s_max: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_value(serde_json::json!({})).expect("defaults deserialize")
    }
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.i > self.j && self.j >= 1 && self.i <= self.n && self.n >= 2) {
            return Err(Error::Config(format!(
                "need n ≥ i > j ≥ 1, got n={} j={} i={}",
                self.n, self.j, self.i
            )));
        }
        if self.sigma > self.s {
            return Err(Error::Config(format!("σ = {} exceeds s = {}", self.sigma, self.s)));
        }
        if self.nu_schedule.is_empty() {
            return Err(Error::Config("empty t schedule".into()));
        }
        if self.nu_schedule.iter().any(|t| !(*t >= 4.0)) {
            return Err(Error::Config("every t in the schedule must be ≥ 4".into()));
        }
        if self.nu_schedule.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("t schedule must be strictly increasing".into()));
        }
        for (name, v) in [("lambda", self.lambda), ("L", self.l)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Config(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if let Some(m) = self.s_max {
            if m < self.s {
                return Err(Error::Config(format!("s_max = {m} is below s = {}", self.s)));
            }
        }
        Ok(())
    }

    /// λ for the twist variant or L for the map variant.
    pub fn parameter(&self) -> f64 {
        match self.variant {
            Variant::Twist => self.lambda.unwrap_or(1.0),
            Variant::Map => self.l.unwrap_or(1.0),
        }
    }

    /// Explicit settings, or 12 panels per unit frequency in one variable and
    /// one per unit frequency with 32 smooth panels in two or more.
    pub fn quad_spec(&self) -> QuadSpec {
        match &self.quad {
            Some(q) => q.clone(),
            None if self.n == 2 => QuadSpec::default(),
            None => QuadSpec {
                panels_per_unit_frequency: 1.0,
                smooth_panels: 32,
                ..QuadSpec::default()
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_parsing() {
        let c = ExperimentConfig::default();
        assert_eq!((c.n, c.j, c.i, c.s, c.sigma), (2, 1, 2, 1, 0));
        assert_eq!(c.nu_schedule, DEFAULT_SCHEDULE.to_vec());
        let c = ExperimentConfig::from_json_str(r#"{"n":3,"j":2,"i":3,"variant":"map","L":1.0}"#).unwrap();
        assert_eq!(c.variant, Variant::Map);
        assert_eq!(c.parameter(), 1.0);
        assert_eq!(c.quad_spec().panels_per_unit_frequency, 1.0);
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            r#"{"sigma":2}"#,
            r#"{"nu_schedule":[64,32]}"#,
            r#"{"nu_schedule":[2,32]}"#,
            r#"{"j":2,"i":2}"#,
            r#"{"lambda":-1}"#,
            r#"{"unknown":1}"#,
        ] {
            assert!(
                matches!(ExperimentConfig::from_json_str(bad), Err(Error::Config(_))),
                "{bad}"
            );
        }
    }
}
