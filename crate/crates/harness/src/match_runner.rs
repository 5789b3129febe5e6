//! Match execution and replayable records.
//!
//! A match steps from decision point to decision point: every player with
//! ready units queries its agent, the joint action is applied, and the
//! decision is logged. Records serialize as newline-delimited structured
//! records and replay exactly through the engine.

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use skirm_core::engine::{
    apply, ltd2, ready_units, GameState, Player, PlayerAction, StatTable, Unit,
};
use skirm_core::search::SearchBudget;
use skirm_core::Value;

use crate::agent::{Agent, AgentError};
use crate::config::BudgetSpec;
use crate::scenario::{generate_scenario, ScenarioConfig, ScenarioError};

/// Outcomes are drawn when the final utility is within this band of zero.
pub const DRAW_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum MatchError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("agent failure: {0}")]
    Agent(#[from] AgentError),
    #[error("engine rejected a logged action: {0}")]
    Engine(#[from] skirm_core::engine::EngineError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    WinOne,
    WinTwo,
    Draw,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub frame: i32,
    pub player: Player,
    pub action: PlayerAction,
    pub value: Option<Value>,
    pub elapsed_us: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitSnapshot {
    pub id: u32,
    pub owner: Player,
    pub kind: String,
    pub x: i32,
    pub y: i32,
    pub hp: i32,
    pub ready_frame: i32,
    pub cooldown_frame: i32,
}

impl UnitSnapshot {
    fn of(state: &GameState, unit: &Unit) -> UnitSnapshot {
        UnitSnapshot {
            id: unit.id.0,
            owner: unit.owner,
            kind: state.kind_of(unit).name.clone(),
            x: unit.x,
            y: unit.y,
            hp: unit.hp,
            ready_frame: unit.ready_frame,
            cooldown_frame: unit.cooldown_frame,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub scenario: ScenarioConfig,
    pub agents: [String; 2],
    pub budget: BudgetSpec,
    pub decisions: Vec<DecisionRecord>,
    pub outcome: Outcome,
    /// Player that blew the wall-clock budget past the grace, if any.
    pub forfeited_by: Option<Player>,
    pub final_ltd2: Value,
    pub final_frame: i32,
    pub final_units: Vec<UnitSnapshot>,
}

/// One line of the newline-delimited record format.
#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum ReplayLine {
    Header { scenario: ScenarioConfig, agents: [String; 2], budget: BudgetSpec },
    Decision(DecisionRecord),
    Final {
        outcome: Outcome,
        forfeited_by: Option<Player>,
        final_ltd2: Value,
        final_frame: i32,
        final_units: Vec<UnitSnapshot>,
    },
}

impl MatchRecord {
    /// Newline-delimited structured records: header, decisions, final.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        let header = ReplayLine::Header {
            scenario: self.scenario.clone(),
            agents: self.agents.clone(),
            budget: self.budget,
        };
        out.push_str(&serde_json::to_string(&header).unwrap());
        out.push('\n');
        for d in &self.decisions {
            out.push_str(&serde_json::to_string(&ReplayLine::Decision(d.clone())).unwrap());
            out.push('\n');
        }
        let fin = ReplayLine::Final {
            outcome: self.outcome,
            forfeited_by: self.forfeited_by,
            final_ltd2: self.final_ltd2,
            final_frame: self.final_frame,
            final_units: self.final_units.clone(),
        };
        out.push_str(&serde_json::to_string(&fin).unwrap());
        out.push('\n');
        out
    }

    pub fn from_ndjson(text: &str) -> Result<MatchRecord, serde_json::Error> {
        let mut scenario = None;
        let mut agents = None;
        let mut budget = None;
        let mut decisions = Vec::new();
        let mut tail = None;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            match serde_json::from_str::<ReplayLine>(line)? {
                ReplayLine::Header { scenario: s, agents: a, budget: b } => {
                    scenario = Some(s);
                    agents = Some(a);
                    budget = Some(b);
                }
                ReplayLine::Decision(d) => decisions.push(d),
                ReplayLine::Final { outcome, forfeited_by, final_ltd2, final_frame, final_units } => {
                    tail = Some((outcome, forfeited_by, final_ltd2, final_frame, final_units));
                }
            }
        }
        let missing = || serde_json::Error::io(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            "record is missing header or final line",
        ));
        let (outcome, forfeited_by, final_ltd2, final_frame, final_units) =
            tail.ok_or_else(missing)?;
        Ok(MatchRecord {
            scenario: scenario.ok_or_else(missing)?,
            agents: agents.ok_or_else(missing)?,
            budget: budget.ok_or_else(missing)?,
            decisions,
            outcome,
            forfeited_by,
            final_ltd2,
            final_frame,
            final_units,
        })
    }
}

/// Classifies a terminal (or abandoned) state by the sign of its utility.
fn classify(value: Value) -> Outcome {
    if value > DRAW_TOL {
        Outcome::WinOne
    } else if value < -DRAW_TOL {
        Outcome::WinTwo
    } else {
        Outcome::Draw
    }
}

/// Match loop on a prebuilt state: advances from decision point to decision
/// point until the state is terminal (or a forfeit stops play). A terminal
/// input yields an immediate outcome with no decisions.
pub fn play_state(
    agent_one: &mut Agent,
    agent_two: &mut Agent,
    mut state: GameState,
    budget: BudgetSpec,
    forfeit_grace: Option<Duration>,
) -> Result<(Vec<DecisionRecord>, Option<Player>, GameState), MatchError> {
    let mut decisions = Vec::new();
    let mut forfeited_by = None;

    'game: while !state.is_terminal() {
        let mut action_one = PlayerAction::empty();
        let mut action_two = PlayerAction::empty();
        for player in [Player::One, Player::Two] {
            if ready_units(&state, player).is_empty() {
                continue;
            }
            let agent: &mut Agent =
                if player == Player::One { &mut *agent_one } else { &mut *agent_two };
            let start = Instant::now();
            let decision = agent.decide(&state, player, budget.to_budget())?;
            let elapsed = start.elapsed();
            decisions.push(DecisionRecord {
                frame: state.frame(),
                player,
                action: decision.action.clone(),
                value: decision.value,
                elapsed_us: elapsed.as_micros() as u64,
            });
            if let (SearchBudget::WallClock(limit), Some(grace)) =
                (budget.to_budget(), forfeit_grace)
            {
                if elapsed > limit + grace {
                    forfeited_by = Some(player);
                    break 'game;
                }
            }
            match player {
                Player::One => action_one = decision.action,
                Player::Two => action_two = decision.action,
            }
        }
        state = apply(&state, &action_one, &action_two)?;
    }
    Ok((decisions, forfeited_by, state))
}

/// Classifies a finished match: forfeits hand the win to the opponent,
/// otherwise the utility sign decides.
pub fn outcome_of(forfeited_by: Option<Player>, final_ltd2: Value) -> Outcome {
    match forfeited_by {
        Some(Player::One) => Outcome::WinTwo,
        Some(Player::Two) => Outcome::WinOne,
        None => classify(final_ltd2),
    }
}

/// Runs one match between two freshly built agents.
///
/// Wall-clock budgets enforce a forfeit when a decision overruns the budget
/// by more than `forfeit_grace` (`None` disables forfeits).
pub fn run_match(
    agent_one: &mut Agent,
    agent_two: &mut Agent,
    scenario: &ScenarioConfig,
    table: &Arc<StatTable>,
    budget: BudgetSpec,
    forfeit_grace: Option<Duration>,
) -> Result<MatchRecord, MatchError> {
    let initial = generate_scenario(scenario, table)?;
    let (decisions, forfeited_by, state) =
        play_state(agent_one, agent_two, initial, budget, forfeit_grace)?;
    let final_ltd2 = ltd2::<Value>(&state, Player::One);
    Ok(MatchRecord {
        scenario: scenario.clone(),
        agents: [agent_one.name().to_string(), agent_two.name().to_string()],
        budget,
        decisions,
        outcome: outcome_of(forfeited_by, final_ltd2),
        forfeited_by,
        final_ltd2,
        final_frame: state.frame(),
        final_units: state.units().iter().map(|u| UnitSnapshot::of(&state, u)).collect(),
    })
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("logged decision at frame {logged} but the replay is at frame {actual}")]
    FrameMismatch { logged: i32, actual: i32 },
    #[error("replay diverged: {0}")]
    Diverged(String),
    #[error(transparent)]
    Engine(#[from] skirm_core::engine::EngineError),
}

/// Replays the record's logged actions through the engine and checks that
/// the reconstruction reproduces the logged final state exactly.
pub fn verify_record(record: &MatchRecord, table: &Arc<StatTable>) -> Result<(), VerifyError> {
    let mut state = generate_scenario(&record.scenario, table)?;
    let mut idx = 0;
    while idx < record.decisions.len() {
        let frame = record.decisions[idx].frame;
        if frame != state.frame() {
            return Err(VerifyError::FrameMismatch { logged: frame, actual: state.frame() });
        }
        let mut action_one = PlayerAction::empty();
        let mut action_two = PlayerAction::empty();
        while idx < record.decisions.len() && record.decisions[idx].frame == frame {
            let d = &record.decisions[idx];
            match d.player {
                Player::One => action_one = d.action.clone(),
                Player::Two => action_two = d.action.clone(),
            }
            idx += 1;
        }
        // a forfeited match stops before applying its last decision group
        if record.forfeited_by.is_some() && idx == record.decisions.len() {
            break;
        }
        state = apply(&state, &action_one, &action_two)?;
    }
    let reconstructed: Vec<UnitSnapshot> =
        state.units().iter().map(|u| UnitSnapshot::of(&state, u)).collect();
    if state.frame() != record.final_frame {
        return Err(VerifyError::Diverged(format!(
            "final frame {} vs logged {}",
            state.frame(),
            record.final_frame
        )));
    }
    if reconstructed != record.final_units {
        return Err(VerifyError::Diverged("final unit snapshots differ".into()));
    }
    let v = ltd2::<Value>(&state, Player::One);
    if (v - record.final_ltd2).abs() > 0.0 {
        return Err(VerifyError::Diverged(format!(
            "final ltd2 {v} vs logged {}",
            record.final_ltd2
        )));
    }
    Ok(())
}

/// Human-oriented one-line summary of a match.
pub fn summarize(record: &MatchRecord) -> String {
    let [a, b] = &record.agents;
    let head = match record.outcome {
        Outcome::WinOne => format!("{a} defeats {b}"),
        Outcome::WinTwo => format!("{b} defeats {a}"),
        Outcome::Draw => format!("{a} draws {b}"),
    };
    let forfeit = match record.forfeited_by {
        Some(p) => format!(" (forfeit by {p:?})"),
        None => String::new(),
    };
    format!(
        "{} on {} at frame {} (ltd2 {:.4}){}",
        head, record.scenario.name, record.final_frame, record.final_ltd2, forfeit
    )
}
