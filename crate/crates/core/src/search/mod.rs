//! Real-time decision procedures: the playout evaluation, portfolio greedy
//! search and its asymmetric variant, stratified strategy selection,
//! alpha-beta over move-fixed trees, and the two-step GAB/SAB families.

mod greedy;
mod mft;
mod stratified;
mod two_step;

pub use greedy::{gas, pgs};
pub use mft::{abcd_mft, MftParams};
pub use stratified::sss;
pub use two_step::{gab, gab_p, sab, sab_p, TwoStepReport};

use std::time::{Duration, Instant};

use crate::engine::{apply, ltd2, GameState, Move, Player, PlayerAction, UnitId};
use crate::real::Real;
use crate::scripts::{script_action, Script};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SearchError {
    #[error("player {0:?} has no ready units")]
    NoReadyUnits(Player),
    #[error(transparent)]
    Engine(#[from] crate::engine::EngineError),
}

/// Planning budget for one decision point. `NodeCount` caps the number of
/// evaluation calls and is bit-reproducible; `WallClock` is a deadline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchBudget {
    WallClock(Duration),
    NodeCount(u64),
}

/// Tracks consumption of a [`SearchBudget`] across one decision.
///
/// Every evaluation call must go through [`try_eval`]; a reservation lets a
/// caller hold back a fixed number of evaluations for later use.
#[derive(Debug)]
pub struct BudgetTracker {
    budget: SearchBudget,
    start: Instant,
    evals: u64,
    reserved: u64,
}

impl BudgetTracker {
    pub fn new(budget: SearchBudget) -> BudgetTracker {
        BudgetTracker { budget, start: Instant::now(), evals: 0, reserved: 0 }
    }

    pub fn exhausted(&self) -> bool {
        match self.budget {
            SearchBudget::WallClock(limit) => self.start.elapsed() >= limit,
            SearchBudget::NodeCount(cap) => self.evals + self.reserved >= cap,
        }
    }

    pub fn evals_used(&self) -> u64 {
        self.evals
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    /// Budget left, as a budget value of the same mode.
    pub fn remaining(&self) -> SearchBudget {
        match self.budget {
            SearchBudget::WallClock(limit) => {
                SearchBudget::WallClock(limit.saturating_sub(self.start.elapsed()))
            }
            SearchBudget::NodeCount(cap) => {
                SearchBudget::NodeCount(cap.saturating_sub(self.evals + self.reserved))
            }
        }
    }

    /// Holds back `n` evaluations (no-op under wall-clock budgets).
    pub fn reserve(&mut self, n: u64) {
        self.reserved += n;
    }

    pub fn release(&mut self, n: u64) {
        self.reserved = self.reserved.saturating_sub(n);
    }

    fn note_eval(&mut self) {
        self.evals += 1;
    }
}

/// State evaluation from one player's perspective.
pub trait Evaluator<F: Real> {
    fn evaluate(&self, state: &GameState, player: Player) -> F;
}

impl<F: Real, T: Fn(&GameState, Player) -> F> Evaluator<F> for T {
    fn evaluate(&self, state: &GameState, player: Player) -> F {
        self(state, player)
    }
}

/// Evaluates `state` if budget remains, consuming one evaluation.
pub fn try_eval<F: Real, E: Evaluator<F>>(
    tracker: &mut BudgetTracker,
    eval: &E,
    state: &GameState,
    player: Player,
) -> Option<F> {
    if tracker.exhausted() {
        return None;
    }
    tracker.note_eval();
    Some(eval.evaluate(state, player))
}

/// Simulates the game forward from `state` with both players on NOKAV for up
/// to `steps` transitions (stopping at terminal states) and scores the
/// reached state with LTD2 for `player`.
pub fn evaluate<F: Real>(state: &GameState, player: Player, steps: u32) -> F {
    let mut s = state.clone();
    for _ in 0..steps {
        if s.is_terminal() {
            break;
        }
        let a_one = script_action(&s, Player::One, Script::Nokav);
        let a_two = script_action(&s, Player::Two, Script::Nokav);
        s = apply(&s, &a_one, &a_two).expect("script playout actions are legal");
    }
    ltd2(&s, player)
}

/// The default playout evaluation.
#[derive(Clone, Copy, Debug)]
pub struct PlayoutEvaluator {
    pub steps: u32,
}

impl PlayoutEvaluator {
    pub const DEFAULT_STEPS: u32 = 100;

    pub fn new(steps: u32) -> PlayoutEvaluator {
        PlayoutEvaluator { steps }
    }
}

impl Default for PlayoutEvaluator {
    fn default() -> PlayoutEvaluator {
        PlayoutEvaluator::new(PlayoutEvaluator::DEFAULT_STEPS)
    }
}

impl<F: Real> Evaluator<F> for PlayoutEvaluator {
    fn evaluate(&self, state: &GameState, player: Player) -> F {
        evaluate(state, player, self.steps)
    }
}

/// Partition of units into types; stratified search assigns one script per
/// type instead of one per unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeSystem {
    /// Every unit shares one type.
    Single,
    /// Every unit is its own type (degenerates to per-unit search).
    PerUnit,
    /// Unit kind crossed with hp above/below half of full.
    KindHealth,
}

impl Default for TypeSystem {
    fn default() -> TypeSystem {
        TypeSystem::KindHealth
    }
}

impl TypeSystem {
    pub fn from_name(name: &str) -> Option<TypeSystem> {
        match name.to_ascii_lowercase().as_str() {
            "single" => Some(TypeSystem::Single),
            "per-unit" | "perunit" => Some(TypeSystem::PerUnit),
            "kind-health" | "kindhealth" => Some(TypeSystem::KindHealth),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TypeSystem::Single => "single",
            TypeSystem::PerUnit => "per-unit",
            TypeSystem::KindHealth => "kind-health",
        }
    }

    pub fn label(self, state: &GameState, unit: UnitId) -> u64 {
        match self {
            TypeSystem::Single => 0,
            TypeSystem::PerUnit => unit.0 as u64,
            TypeSystem::KindHealth => {
                let u = state.unit(unit).expect("typed unit is living");
                let kind = state.kind_of(u);
                (u.kind.0 as u64) * 2 + u64::from(2 * u.hp >= kind.hp0)
            }
        }
    }
}

/// Outcome of a first-step search (PGS, SSS, GAS).
#[derive(Clone, Debug)]
pub struct FirstStepResult<F> {
    pub action: PlayerAction,
    /// True when a full improvement pass changed nothing before the budget
    /// ran out.
    pub hit_local_max: bool,
    pub remaining: SearchBudget,
    /// Evaluation of the returned action against the fixed opponent action,
    /// when the budget allowed computing one.
    pub value: Option<F>,
}

/// Applies `(action, opponent_action)` with the correct player orientation.
pub(crate) fn apply_for(
    state: &GameState,
    player: Player,
    action: &PlayerAction,
    opponent_action: &PlayerAction,
) -> Result<GameState, crate::engine::EngineError> {
    match player {
        Player::One => apply(state, action, opponent_action),
        Player::Two => apply(state, opponent_action, action),
    }
}

/// Candidate moves one script proposes for `unit` given the rest of the
/// candidate action, in portfolio order with duplicates dropped.
pub(crate) fn script_candidates(
    state: &GameState,
    unit: UnitId,
    portfolio: &crate::scripts::Portfolio,
    action: &PlayerAction,
) -> Vec<Move> {
    let ledger = crate::scripts::DamageLedger::from_action(state, action, unit);
    let mut moves = Vec::with_capacity(portfolio.scripts().len());
    for script in portfolio.scripts() {
        let mv = script.choose(state, unit, &ledger);
        if !moves.contains(&mv) {
            moves.push(mv);
        }
    }
    moves
}
