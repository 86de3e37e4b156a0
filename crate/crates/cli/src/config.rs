//! Experiment configuration: built-in defaults, overridden by an optional
//! TOML file, overridden in turn by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use openm::baselines::Sense;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AlgoName {
    OenM,
    OpenM,
    MospStyle,
    MalmStyle,
}

impl AlgoName {
    pub const ALL: [AlgoName; 4] = [AlgoName::OenM, AlgoName::OpenM, AlgoName::MospStyle, AlgoName::MalmStyle];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgoName::OenM => "oen-m",
            AlgoName::OpenM => "open-m",
            AlgoName::MospStyle => "mosp-style",
            AlgoName::MalmStyle => "malm-style",
        }
    }
}

impl fmt::Display for AlgoName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Unknown algorithm name; reported as a usage error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownAlgorithm(pub String);

impl fmt::Display for UnknownAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown algorithm {:?} (expected one of oen-m, open-m, mosp-style, malm-style)",
            self.0
        )
    }
}

impl std::error::Error for UnknownAlgorithm {}

impl FromStr for AlgoName {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgoName::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Radial network flow with exponential arc costs.
    Network,
    /// Drifting quadratics under one fixed constraint.
    QuadraticFixed,
    /// Drifting quadratics with a new `(A_t, b_t)` every round.
    QuadraticVarying,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Network => "network",
            Scenario::QuadraticFixed => "quadratic-fixed",
            Scenario::QuadraticVarying => "quadratic-varying",
        }
    }
}

/// Direction in which the baselines relax `A x = b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Relaxation {
    /// `A x ≥ b`: every node receives at least its demand.
    AtLeast,
    /// `A x ≤ b`
    AtMost,
}

impl From<Relaxation> for Sense {
    fn from(r: Relaxation) -> Self {
        match r {
            Relaxation::AtLeast => Sense::AtLeast,
            Relaxation::AtMost => Sense::AtMost,
        }
    }
}

pub const DEFAULT_HORIZON: usize = 2500;
/// Baseline step constant; steps are `c / √T`.
pub const DEFAULT_BASELINE_STEP: f64 = 1e-50;
pub const DEFAULT_START_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub algorithms: Vec<AlgoName>,
    pub scenario: Scenario,
    pub horizon: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub baseline_primal_step: f64,
    pub baseline_dual_step: f64,
    pub relaxation: Relaxation,
    /// `‖x0 − x1*‖` as a fraction of the estimated contraction radius.
    pub start_fraction: f64,
    #[serde(skip)]
    pub out_dir: PathBuf,
    pub plot: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            algorithms: AlgoName::ALL.to_vec(),
            scenario: Scenario::Network,
            horizon: DEFAULT_HORIZON,
            seed: 0,
            epsilon: openm::benchmark::DEFAULT_EPSILON,
            baseline_primal_step: DEFAULT_BASELINE_STEP,
            baseline_dual_step: DEFAULT_BASELINE_STEP,
            relaxation: Relaxation::AtLeast,
            start_fraction: DEFAULT_START_FRACTION,
            out_dir: PathBuf::from("results"),
            plot: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.horizon == 0 {
            bail!("horizon must be at least 1");
        }
        if self.algorithms.is_empty() {
            bail!("select at least one algorithm");
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            bail!("epsilon must be positive, got {}", self.epsilon);
        }
        for (name, v) in [
            ("baseline primal step", self.baseline_primal_step),
            ("baseline dual step", self.baseline_dual_step),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive, got {v}");
            }
        }
        if !(self.start_fraction >= 0.0 && self.start_fraction <= 1.0) {
            bail!("start fraction must lie in [0, 1], got {}", self.start_fraction);
        }
        Ok(())
    }

    /// Applies the settings present in `file`.
    pub fn apply_file(&mut self, file: FileConfig) -> Result<(), ConfigError> {
        if let Some(names) = file.algorithms {
            self.algorithms = parse_algorithms(&names)?;
        }
        macro_rules! take {
            ($($field:ident),*) => { $(if let Some(v) = file.$field { self.$field = v; })* };
        }
        if let Some(c) = file.baseline_step {
            self.baseline_primal_step = c;
            self.baseline_dual_step = c;
        }
        take!(scenario, horizon, seed, epsilon, baseline_primal_step, baseline_dual_step, relaxation, start_fraction, out_dir, plot);
        Ok(())
    }
}

/// Deduplicates while keeping the canonical algorithm order.
pub fn parse_algorithms<S: AsRef<str>>(names: &[S]) -> Result<Vec<AlgoName>, ConfigError> {
    let mut out = names
        .iter()
        .map(|s| s.as_ref().parse::<AlgoName>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(ConfigError::Algorithm)?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// On-disk configuration; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub algorithms: Option<Vec<String>>,
    pub scenario: Option<Scenario>,
    pub horizon: Option<usize>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    /// Sets both baseline step constants.
    pub baseline_step: Option<f64>,
    pub baseline_primal_step: Option<f64>,
    pub baseline_dual_step: Option<f64>,
    pub relaxation: Option<Relaxation>,
    pub start_fraction: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub plot: Option<bool>,
}

#[derive(Debug)]
pub enum ConfigError {
    Algorithm(UnknownAlgorithm),
    Other(anyhow::Error),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Algorithm(e) => e.fmt(f),
            ConfigError::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(ConfigError::Other)?;
        toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))
            .map_err(ConfigError::Other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_overrides_defaults() {
        let file: FileConfig = toml::from_str(
            r#"
            algorithms = ["open-m", "oen-m", "open-m"]
            horizon = 10
            seed = 7
            baseline-step = 1e-3
            scenario = "quadratic-varying"
            "#,
        )
        .unwrap();
        let mut c = ExperimentConfig::default();
        c.apply_file(file).unwrap();
        assert_eq!(c.algorithms, vec![AlgoName::OenM, AlgoName::OpenM]);
        assert_eq!((c.horizon, c.seed), (10, 7));
        assert_eq!((c.baseline_primal_step, c.baseline_dual_step), (1e-3, 1e-3));
        assert_eq!(c.scenario, Scenario::QuadraticVarying);
        assert_eq!(c.epsilon, 1e-3);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_keys_and_algorithms_rejected() {
        assert!(toml::from_str::<FileConfig>("horizn = 3").is_err());
        let file: FileConfig = toml::from_str(r#"algorithms = ["newton"]"#).unwrap();
        let err = ExperimentConfig::default().apply_file(file).unwrap_err();
        assert!(matches!(err, ConfigError::Algorithm(_)));
    }

    #[test]
    fn validation() {
        let ok = ExperimentConfig::default();
        ok.validate().unwrap();
        for bad in [
            ExperimentConfig { horizon: 0, ..ok.clone() },
            ExperimentConfig { algorithms: vec![], ..ok.clone() },
            ExperimentConfig { epsilon: 0.0, ..ok.clone() },
            ExperimentConfig { baseline_dual_step: -1.0, ..ok.clone() },
            ExperimentConfig { start_fraction: 1.5, ..ok.clone() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in AlgoName::ALL {
            assert_eq!(a.as_str().parse::<AlgoName>().unwrap(), a);
        }
        assert!("OPEN-M".parse::<AlgoName>().is_err());
    }
}
