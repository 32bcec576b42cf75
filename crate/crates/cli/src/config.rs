//! Run configuration: texture exponent, combination weight (fixed or
//! tuned), SVR hyperparameters and grid steps. Every output artifact
//! carries a hash of the effective configuration.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use vqfuse_core::eadm::DEFAULT_ALPHA;
use vqfuse_core::fusion::SvrHyper;

/// A parameter that is either pinned to a value or tuned by the training
/// harness ("tune").
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Tunable {
    Fixed(f64),
    Mode(String),
}

impl Tunable {
    pub fn fixed(&self) -> Option<f64> {
        match self {
            Tunable::Fixed(v) => Some(*v),
            Tunable::Mode(_) => None,
        }
    }

    pub fn is_tune(&self) -> bool {
        matches!(self, Tunable::Mode(m) if m == "tune")
    }

    fn validate(&self, name: &str) -> Result<()> {
        match self {
            Tunable::Fixed(v) if v.is_finite() => Ok(()),
            Tunable::Fixed(v) => bail!("{name}: non-finite value {v}"),
            Tunable::Mode(m) if m == "tune" => Ok(()),
            Tunable::Mode(m) => bail!("{name}: expected a number or \"tune\", got \"{m}\""),
        }
    }
}

fn default_alpha() -> Tunable {
    Tunable::Fixed(DEFAULT_ALPHA)
}

fn default_alpha_grid() -> Vec<f64> {
    vec![0.1, 0.2, 0.3, 0.5, 0.8, 1.2]
}

fn default_beta() -> Tunable {
    Tunable::Mode("tune".into())
}

fn default_beta_grid_step() -> f64 {
    0.05
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_alpha")]
    pub alpha: Tunable,
    #[serde(default = "default_alpha_grid")]
    pub alpha_grid: Vec<f64>,
    #[serde(default = "default_beta")]
    pub beta: Tunable,
    #[serde(default = "default_beta_grid_step")]
    pub beta_grid_step: f64,
    #[serde(default)]
    pub svr: SvrHyper,
    #[serde(default)]
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: default_alpha(),
            alpha_grid: default_alpha_grid(),
            beta: default_beta(),
            beta_grid_step: default_beta_grid_step(),
            svr: SvrHyper::default(),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let config = match path {
            None => RunConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", p.display()))?
            }
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.alpha.validate("alpha")?;
        self.beta.validate("beta")?;
        if let Some(a) = self.alpha.fixed() {
            if a <= 0.0 {
                bail!("alpha must be positive, got {a}");
            }
        }
        if let Some(b) = self.beta.fixed() {
            if !(0.0..=1.0).contains(&b) {
                bail!("beta must be in [0,1], got {b}");
            }
        }
        if !(self.beta_grid_step > 0.0 && self.beta_grid_step <= 1.0) {
            bail!(
                "beta_grid_step must be in (0,1], got {}",
                self.beta_grid_step
            );
        }
        if self.alpha.is_tune() && self.alpha_grid.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            bail!("alpha_grid must contain positive finite values");
        }
        self.svr.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(())
    }

    /// Texture exponent used at extraction time; the tuning mode extracts
    /// at the default and re-derives the detail-loss column during
    /// training.
    pub fn extraction_alpha(&self) -> f64 {
        self.alpha.fixed().unwrap_or(DEFAULT_ALPHA)
    }

    /// FNV-1a over the canonical serialized configuration; stamped onto
    /// every artifact this run produces.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serialization cannot fail");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in canonical.bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(c.hash(), back.hash());
    }

    #[test]
    fn tune_keyword_is_recognized() {
        let c: RunConfig = serde_json::from_str(r#"{"alpha": "tune", "beta": 0.5}"#).unwrap();
        c.validate().unwrap();
        assert!(c.alpha.is_tune());
        assert_eq!(c.beta.fixed(), Some(0.5));
    }

    #[test]
    fn bad_mode_is_rejected() {
        let c: RunConfig = serde_json::from_str(r#"{"beta": "auto"}"#).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn hash_changes_with_content() {
        let a = RunConfig::default();
        let b = RunConfig {
            seed: 1,
            ..RunConfig::default()
        };
        assert_ne!(a.hash(), b.hash());
    }
}
