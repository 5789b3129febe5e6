//! Agents: a decision function behind a name, built from a config record.
//!
//! Algorithm specs: `pgs | sss | gas | gab | sab | gab_p | sab_p |
//! script:<name>`. Search agents own their selection state and tie-break
//! rng, so a fresh agent is built per match from the same config.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use skirm_core::abstraction::{SelectionState, SelectionStrategy};
use skirm_core::engine::{GameState, Player, PlayerAction};
use skirm_core::scripts::{script_action, Portfolio, Script};
use skirm_core::search::{
    gab, gab_p, gas, pgs, sab, sab_p, sss, BudgetTracker, PlayoutEvaluator, SearchBudget,
    SearchError, TypeSystem,
};
use skirm_core::Value;

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("unknown algorithm spec `{0}`")]
    UnknownSpec(String),
    #[error("unknown selection strategy `{0}`")]
    UnknownSelection(String),
    #[error("unknown type system `{0}`")]
    UnknownTypeSystem(String),
    #[error("unknown script `{0}`")]
    UnknownScript(String),
    #[error("empty or invalid portfolio")]
    BadPortfolio,
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Declarative agent description, as written in configs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AgentConfig {
    /// Algorithm spec, e.g. `gab` or `script:nokav`.
    pub spec: String,
    /// Display name; defaults to the spec.
    #[serde(default)]
    pub name: Option<String>,
    /// Unrestricted-unit selection: `av+ | av- | random`.
    #[serde(default = "default_selection")]
    pub selection: String,
    /// Unrestricted set size N; defaults to 4 (9 for the `_p` variants).
    #[serde(default)]
    pub unrestricted_n: Option<usize>,
    /// `single | per-unit | kind-health`.
    #[serde(default = "default_type_system")]
    pub type_system: String,
    #[serde(default = "default_steps")]
    pub playout_steps: u32,
    /// Depth cap for the second-step tree search; unbounded when omitted.
    #[serde(default)]
    pub abcd_max_depth: Option<usize>,
    /// Script names, in order; defaults to `["nokav", "kiter"]`.
    #[serde(default)]
    pub portfolio: Option<Vec<String>>,
}

fn default_selection() -> String {
    "av+".into()
}

fn default_type_system() -> String {
    "kind-health".into()
}

fn default_steps() -> u32 {
    PlayoutEvaluator::DEFAULT_STEPS
}

impl AgentConfig {
    pub fn from_spec(spec: &str) -> AgentConfig {
        AgentConfig {
            spec: spec.to_string(),
            name: None,
            selection: default_selection(),
            unrestricted_n: None,
            type_system: default_type_system(),
            playout_steps: default_steps(),
            abcd_max_depth: None,
            portfolio: None,
        }
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.spec.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Algorithm {
    Script(Script),
    Pgs,
    Sss,
    Gas,
    Gab,
    Sab,
    GabP,
    SabP,
}

/// A ready-to-play agent bound to one match.
pub struct Agent {
    name: String,
    algorithm: Algorithm,
    portfolio: Portfolio,
    selection: SelectionState,
    type_system: TypeSystem,
    evaluator: PlayoutEvaluator,
    abcd_max_depth: Option<usize>,
}

/// One decision: the chosen action plus diagnostics for logging.
#[derive(Clone, Debug)]
pub struct Decision {
    pub action: PlayerAction,
    /// The search's value estimate, when it computed one.
    pub value: Option<Value>,
    pub step1_elapsed: Duration,
    pub step2_elapsed: Duration,
}

impl Agent {
    /// Builds an agent from its config; `seed` drives all of its tie-break
    /// and selection randomness.
    pub fn build(config: &AgentConfig, seed: u64) -> Result<Agent, AgentError> {
        let algorithm = match config.spec.to_ascii_lowercase().as_str() {
            "pgs" => Algorithm::Pgs,
            "sss" => Algorithm::Sss,
            "gas" => Algorithm::Gas,
            "gab" => Algorithm::Gab,
            "sab" => Algorithm::Sab,
            "gab_p" | "gabp" => Algorithm::GabP,
            "sab_p" | "sabp" => Algorithm::SabP,
            other => match other.strip_prefix("script:") {
                Some(name) => Algorithm::Script(
                    Script::from_name(name).ok_or_else(|| AgentError::UnknownScript(name.into()))?,
                ),
                None => return Err(AgentError::UnknownSpec(config.spec.clone())),
            },
        };
        let strategy = SelectionStrategy::from_name(&config.selection)
            .ok_or_else(|| AgentError::UnknownSelection(config.selection.clone()))?;
        let n = config.unrestricted_n.unwrap_or(match algorithm {
            Algorithm::GabP | Algorithm::SabP => 9,
            _ => 4,
        });
        let type_system = TypeSystem::from_name(&config.type_system)
            .ok_or_else(|| AgentError::UnknownTypeSystem(config.type_system.clone()))?;
        let portfolio = match &config.portfolio {
            None => Portfolio::default(),
            Some(names) => {
                let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
                Portfolio::from_names(&refs).ok_or(AgentError::BadPortfolio)?
            }
        };
        Ok(Agent {
            name: config.display_name(),
            algorithm,
            portfolio,
            selection: SelectionState::new(strategy, n, seed),
            type_system,
            evaluator: PlayoutEvaluator::new(config.playout_steps),
            abcd_max_depth: config.abcd_max_depth,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Decides the action for `player` at `state` within `budget`.
    pub fn decide(
        &mut self,
        state: &GameState,
        player: Player,
        budget: SearchBudget,
    ) -> Result<Decision, AgentError> {
        let mut tracker = BudgetTracker::new(budget);
        let eval = self.evaluator;
        let quick = |action: PlayerAction, value| Decision {
            action,
            value,
            step1_elapsed: Duration::ZERO,
            step2_elapsed: Duration::ZERO,
        };
        let decision = match self.algorithm {
            Algorithm::Script(script) => quick(script_action(state, player, script), None),
            Algorithm::Pgs => {
                let r = pgs::<Value, _>(state, player, &self.portfolio, &mut tracker, &eval)?;
                quick(r.action, r.value)
            }
            Algorithm::Sss => {
                let r = sss::<Value, _>(
                    state,
                    player,
                    &self.portfolio,
                    self.type_system,
                    &mut tracker,
                    &eval,
                )?;
                quick(r.action, r.value)
            }
            Algorithm::Gas => {
                let r = gas::<Value, _>(
                    state,
                    player,
                    &self.portfolio,
                    &mut tracker,
                    &eval,
                    &mut self.selection,
                )?;
                quick(r.action, r.value)
            }
            Algorithm::Gab | Algorithm::GabP => {
                let run = if self.algorithm == Algorithm::Gab { gab } else { gab_p };
                let r = run(
                    state,
                    player,
                    &self.portfolio,
                    &mut tracker,
                    &eval,
                    &mut self.selection,
                    self.abcd_max_depth,
                )?;
                Decision {
                    action: r.action,
                    value: r.value,
                    step1_elapsed: r.step1_elapsed,
                    step2_elapsed: r.step2_elapsed,
                }
            }
            Algorithm::Sab | Algorithm::SabP => {
                let run = if self.algorithm == Algorithm::Sab { sab } else { sab_p };
                let r = run(
                    state,
                    player,
                    &self.portfolio,
                    self.type_system,
                    &mut tracker,
                    &eval,
                    &mut self.selection,
                    self.abcd_max_depth,
                )?;
                Decision {
                    action: r.action,
                    value: r.value,
                    step1_elapsed: r.step1_elapsed,
                    step2_elapsed: r.step2_elapsed,
                }
            }
        };
        Ok(decision)
    }
}
