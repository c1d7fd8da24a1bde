use std::path::{Path, PathBuf};

use qnc_core::analysis::{DEFAULT_BIN_WIDTH, ENTANGLEMENT_THRESHOLD, SINGLE_QUBIT_THRESHOLD};
use qnc_core::noise::{NoiseModel, SourceParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    #[default]
    State,
    Entanglement,
    Baseline,
    Classical,
    Rates,
}

impl RunMode {
    pub fn name(self) -> &'static str {
        match self {
            RunMode::State => "state",
            RunMode::Entanglement => "entanglement",
            RunMode::Baseline => "baseline",
            RunMode::Classical => "classical",
            RunMode::Rates => "rates",
        }
    }
}

impl std::str::FromStr for RunMode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase()))
            .map_err(|_| CliError::Config(format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub single: f64,
    pub ent: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            single: SINGLE_QUBIT_THRESHOLD,
            ent: ENTANGLEMENT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub bin_width: f64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("qnc-out"),
            bin_width: DEFAULT_BIN_WIDTH,
        }
    }
}

/// Everything a run needs. Missing sections take the experiment's defaults,
/// so an empty `{}` reproduces the noisy table-top setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: RunMode,
    pub noise: NoiseModel,
    pub source: SourceParams,
    pub counts_per_situation: u64,
    pub seed: u64,
    pub thresholds: Thresholds,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: RunMode::default(),
            noise: NoiseModel::default(),
            source: SourceParams::default(),
            counts_per_situation: 720,
            seed: 0,
            thresholds: Thresholds::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.counts_per_situation == 0 {
            return bad("counts_per_situation must be at least 1".into());
        }
        for (name, t) in [("single", self.thresholds.single), ("ent", self.thresholds.ent)] {
            if !(t > 0.0 && t < 1.0) {
                return bad(format!("thresholds.{name} = {t} must lie in (0, 1)"));
            }
        }
        if !(self.output.bin_width > 0.0 && self.output.bin_width.is_finite()) {
            return bad(format!("output.bin_width = {} must be positive", self.output.bin_width));
        }
        self.noise.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.source.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_takes_experiment_defaults() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.counts_per_situation, 720);
        assert_eq!(c.noise.shared_pair_fidelity, 0.993);
        assert_eq!(c.thresholds.single, 0.9503);
        assert_eq!(c.thresholds.ent, 0.9256);
    }

    #[test]
    fn partial_sections_merge_with_defaults() {
        let c = RunConfig::from_json(r#"{"mode": "entanglement", "noise": {"depolarizing_p": 0.1}}"#).unwrap();
        assert_eq!(c.mode, RunMode::Entanglement);
        assert_eq!(c.noise.depolarizing_p, 0.1);
        assert_eq!(c.noise.source_pair_fidelity, 0.993);
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            r#"{"counts_per_situation": 0}"#,
            r#"{"thresholds": {"single": 1.0}}"#,
            r#"{"noise": {"shared_pair_fidelity": 0.2}}"#,
            r#"{"mode": "teleport"}"#,
            r#"{"colour": 1}"#,
            "not json",
        ] {
            assert!(matches!(RunConfig::from_json(text), Err(CliError::Config(_))), "{text}");
        }
    }

    #[test]
    fn mode_names_round_trip() {
        for mode in [RunMode::State, RunMode::Entanglement, RunMode::Baseline, RunMode::Classical, RunMode::Rates] {
            assert_eq!(mode.name().parse::<RunMode>().unwrap(), mode);
        }
        assert!("bogus".parse::<RunMode>().is_err());
    }
}
