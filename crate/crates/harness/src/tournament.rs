//! Tournament execution: matches per pairing per scenario, with fresh seeds
//! every match, sides swapped on alternate matches, and draws counted as
//! half a win for each side. Matches run in parallel workers; per-match
//! seeds derive from the master seed and match index, so the worker count
//! never changes results.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use skirm_core::engine::StatTable;

use crate::agent::{Agent, AgentConfig};
use crate::config::{BudgetSpec, TournamentSection};
use crate::match_runner::{run_match, MatchRecord, Outcome};
use crate::mix_seed;
use crate::scenario::ScenarioConfig;

#[derive(Debug, thiserror::Error)]
pub enum TournamentError {
    #[error("tournament needs at least one scenario and two agents")]
    TooSmall,
    #[error("pairing references unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Clone, Debug)]
pub struct TournamentConfig {
    pub scenarios: Vec<ScenarioConfig>,
    pub agents: Vec<AgentConfig>,
    /// Pairs of agent display names.
    pub pairings: Vec<(String, String)>,
    /// Matches per pairing in each scenario.
    pub matches_per_pairing: usize,
    pub budget: BudgetSpec,
    pub master_seed: u64,
    pub workers: Option<usize>,
    pub forfeit_grace_ms: u64,
}

impl TournamentConfig {
    /// Assembles a config from file sections, defaulting the pairings to
    /// all unordered pairs of agents.
    pub fn assemble(
        scenarios: Vec<ScenarioConfig>,
        agents: Vec<AgentConfig>,
        section: TournamentSection,
        budget: BudgetSpec,
    ) -> TournamentConfig {
        let pairings = match section.pairings {
            Some(pairs) => pairs.into_iter().map(|[a, b]| (a, b)).collect(),
            None => {
                let mut pairs = Vec::new();
                for i in 0..agents.len() {
                    for j in i + 1..agents.len() {
                        pairs.push((agents[i].display_name(), agents[j].display_name()));
                    }
                }
                pairs
            }
        };
        TournamentConfig {
            scenarios,
            agents,
            pairings,
            matches_per_pairing: section.matches_per_pairing,
            budget,
            master_seed: section.master_seed,
            workers: section.workers,
            forfeit_grace_ms: section.forfeit_grace_ms,
        }
    }
}

/// Aggregated result of one scenario x pairing cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingRow {
    pub scenario: String,
    pub agent_a: String,
    pub agent_b: String,
    pub matches: usize,
    pub wins_a: usize,
    pub draws: usize,
    pub rate_a: f64,
    /// Matches lost to errors; nonzero marks the row as partial.
    pub errors: usize,
}

#[derive(Clone, Debug, Default)]
pub struct TournamentReport {
    pub rows: Vec<PairingRow>,
}

impl TournamentReport {
    /// CSV with one row per scenario x pairing.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scenario,agent_a,agent_b,matches,wins_a,draws,rate_a\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{:.4}\n",
                r.scenario, r.agent_a, r.agent_b, r.matches, r.wins_a, r.draws, r.rate_a
            ));
        }
        out
    }

    /// Winning rate of `a` against `b` aggregated across scenarios, with
    /// draws counted half. `None` when the pairing never played.
    pub fn rate(&self, a: &str, b: &str) -> Option<f64> {
        let mut matches = 0usize;
        let mut score = 0.0f64;
        for r in &self.rows {
            if r.agent_a == a && r.agent_b == b {
                matches += r.matches;
                score += r.wins_a as f64 + 0.5 * r.draws as f64;
            } else if r.agent_a == b && r.agent_b == a {
                matches += r.matches;
                score += (r.matches - r.wins_a - r.draws) as f64 + 0.5 * r.draws as f64;
            }
        }
        if matches == 0 {
            None
        } else {
            Some(score / matches as f64)
        }
    }
}

struct MatchTask {
    scenario_idx: usize,
    pairing_idx: usize,
    match_idx: usize,
}

enum TaskOutcome {
    /// Score for agent a: 1 win, 0.5 draw, 0 loss.
    Played { win_a: bool, draw: bool },
    Failed(String),
}

fn play_task(
    cfg: &TournamentConfig,
    table: &Arc<StatTable>,
    by_name: &[(String, AgentConfig)],
    task: &MatchTask,
) -> TaskOutcome {
    let (name_a, name_b) = &cfg.pairings[task.pairing_idx];
    let config_of = |name: &str| by_name.iter().find(|(n, _)| n == name).map(|(_, c)| c).unwrap();
    let base = mix_seed(&[
        cfg.master_seed,
        task.scenario_idx as u64,
        task.pairing_idx as u64,
        task.match_idx as u64,
    ]);
    let scenario = cfg.scenarios[task.scenario_idx].with_seed(mix_seed(&[base, 1]));
    let swap = task.match_idx % 2 == 1;
    let (cfg_one, cfg_two) =
        if swap { (config_of(name_b), config_of(name_a)) } else { (config_of(name_a), config_of(name_b)) };
    let build = |c: &AgentConfig, salt: u64| Agent::build(c, mix_seed(&[base, salt]));
    let grace = if cfg.budget.is_wallclock() {
        Some(std::time::Duration::from_millis(cfg.forfeit_grace_ms))
    } else {
        None
    };
    let result: Result<MatchRecord, String> = (|| {
        let mut one = build(cfg_one, 2).map_err(|e| e.to_string())?;
        let mut two = build(cfg_two, 3).map_err(|e| e.to_string())?;
        run_match(&mut one, &mut two, &scenario, table, cfg.budget, grace)
            .map_err(|e| e.to_string())
    })();
    match result {
        Err(e) => TaskOutcome::Failed(e),
        Ok(record) => {
            let a_is_one = !swap;
            let win_a = matches!(
                (record.outcome, a_is_one),
                (Outcome::WinOne, true) | (Outcome::WinTwo, false)
            );
            TaskOutcome::Played { win_a, draw: record.outcome == Outcome::Draw }
        }
    }
}

/// Runs every pairing on every scenario and aggregates winning rates.
pub fn run_tournament(
    cfg: &TournamentConfig,
    table: &Arc<StatTable>,
) -> Result<TournamentReport, TournamentError> {
    if cfg.scenarios.is_empty() || cfg.agents.len() < 2 || cfg.pairings.is_empty() {
        return Err(TournamentError::TooSmall);
    }
    let by_name: Vec<(String, AgentConfig)> =
        cfg.agents.iter().map(|a| (a.display_name(), a.clone())).collect();
    for (a, b) in &cfg.pairings {
        for name in [a, b] {
            if !by_name.iter().any(|(n, _)| n == name) {
                return Err(TournamentError::UnknownAgent(name.clone()));
            }
        }
    }

    let mut tasks = Vec::new();
    for scenario_idx in 0..cfg.scenarios.len() {
        for pairing_idx in 0..cfg.pairings.len() {
            for match_idx in 0..cfg.matches_per_pairing {
                tasks.push(MatchTask { scenario_idx, pairing_idx, match_idx });
            }
        }
    }

    let workers = std::env::var("SKIRM_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .or(cfg.workers);
    let run = || -> Vec<(usize, usize, TaskOutcome)> {
        tasks
            .par_iter()
            .map(|t| (t.scenario_idx, t.pairing_idx, play_task(cfg, table, &by_name, t)))
            .collect()
    };
    let outcomes = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| TournamentError::Pool(e.to_string()))?
            .install(run),
        None => run(),
    };

    let mut rows: Vec<PairingRow> = Vec::new();
    for (scenario_idx, scenario) in cfg.scenarios.iter().enumerate() {
        for (pairing_idx, (a, b)) in cfg.pairings.iter().enumerate() {
            let mut row = PairingRow {
                scenario: scenario.name.clone(),
                agent_a: a.clone(),
                agent_b: b.clone(),
                matches: 0,
                wins_a: 0,
                draws: 0,
                rate_a: 0.0,
                errors: 0,
            };
            for (si, pi, outcome) in &outcomes {
                if *si != scenario_idx || *pi != pairing_idx {
                    continue;
                }
                match outcome {
                    TaskOutcome::Played { win_a, draw } => {
                        row.matches += 1;
                        if *draw {
                            row.draws += 1;
                        } else if *win_a {
                            row.wins_a += 1;
                        }
                    }
                    TaskOutcome::Failed(message) => {
                        row.errors += 1;
                        eprintln!(
                            "match error in {} {} vs {}: {message}",
                            row.scenario, row.agent_a, row.agent_b
                        );
                    }
                }
            }
            if row.matches > 0 {
                row.rate_a = (row.wins_a as f64 + 0.5 * row.draws as f64) / row.matches as f64;
            }
            rows.push(row);
        }
    }
    Ok(TournamentReport { rows })
}
