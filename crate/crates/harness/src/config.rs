//! Harness configuration: budgets and the TOML config file with
//! `[scenario]`, `[[agents]]`, `[budget]`, and `[tournament]` sections.

use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use skirm_core::search::SearchBudget;

use crate::agent::AgentConfig;
use crate::scenario::ScenarioConfig;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Serializable planning budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetMode {
    Wallclock,
    Nodecount,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetSpec {
    pub mode: BudgetMode,
    /// Milliseconds per decision in wall-clock mode.
    #[serde(default = "default_ms")]
    pub ms: u64,
    /// Evaluation calls per decision in node-count mode.
    #[serde(default = "default_evals")]
    pub evals: u64,
}

fn default_ms() -> u64 {
    40
}

fn default_evals() -> u64 {
    300
}

impl Default for BudgetSpec {
    fn default() -> BudgetSpec {
        BudgetSpec::wallclock_ms(default_ms())
    }
}

impl BudgetSpec {
    pub fn wallclock_ms(ms: u64) -> BudgetSpec {
        BudgetSpec { mode: BudgetMode::Wallclock, ms, evals: default_evals() }
    }

    pub fn nodecount(evals: u64) -> BudgetSpec {
        BudgetSpec { mode: BudgetMode::Nodecount, ms: default_ms(), evals }
    }

    pub fn to_budget(self) -> SearchBudget {
        match self.mode {
            BudgetMode::Wallclock => SearchBudget::WallClock(Duration::from_millis(self.ms)),
            BudgetMode::Nodecount => SearchBudget::NodeCount(self.evals),
        }
    }

    pub fn is_wallclock(self) -> bool {
        self.mode == BudgetMode::Wallclock
    }
}

/// `[tournament]` section.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TournamentSection {
    /// Matches per pairing in each scenario (sides swap on alternate
    /// matches, so even values keep things fair).
    #[serde(default = "default_matches")]
    pub matches_per_pairing: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Worker threads; the SKIRM_WORKERS environment variable overrides.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Explicit pairings by agent name; all unordered pairs when omitted.
    #[serde(default)]
    pub pairings: Option<Vec<[String; 2]>>,
    /// Grace on wall-clock budgets before a forfeit, in milliseconds.
    #[serde(default = "default_grace_ms")]
    pub forfeit_grace_ms: u64,
}

fn default_matches() -> usize {
    40
}

fn default_grace_ms() -> u64 {
    50
}

impl Default for TournamentSection {
    fn default() -> TournamentSection {
        TournamentSection {
            matches_per_pairing: default_matches(),
            master_seed: 0,
            workers: None,
            pairings: None,
            forfeit_grace_ms: default_grace_ms(),
        }
    }
}

/// The full config file.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct HarnessConfig {
    /// Single scenario, for `run-match`.
    #[serde(default)]
    pub scenario: Option<ScenarioConfig>,
    /// Scenario list, for tournaments.
    #[serde(default)]
    pub scenarios: Vec<ScenarioConfig>,
    #[serde(default)]
    pub agents: Vec<AgentConfig>,
    #[serde(default)]
    pub budget: Option<BudgetSpec>,
    #[serde(default)]
    pub tournament: Option<TournamentSection>,
    /// Path to an alternative unit stat table.
    #[serde(default)]
    pub kinds_file: Option<String>,
}

impl HarnessConfig {
    pub fn from_path(path: &Path) -> Result<HarnessConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Ok(toml::from_str(&text)?)
    }
}
