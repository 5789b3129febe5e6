//! Two-step searches: a hill-climbing first step in the uniformly
//! abstracted space, then — only when the first step ends at a local
//! maximum with budget to spare — a move-fixed-tree search that refines the
//! unrestricted units' moves. Whichever of the two actions evaluates better
//! against the fixed NOKAV opponent is returned, so the first step's value
//! is a lower bound on the result.

use std::time::{Duration, Instant};

use crate::abstraction::SelectionState;
use crate::engine::{GameState, Player, PlayerAction};
use crate::real::Real;
use crate::scripts::{script_action, Portfolio, Script};

use super::{
    abcd_mft, apply_for, pgs, sss, try_eval, BudgetTracker, Evaluator, FirstStepResult, MftParams,
    SearchError, TypeSystem,
};

/// What a two-step search did and decided.
#[derive(Clone, Debug)]
pub struct TwoStepReport<F> {
    pub action: PlayerAction,
    /// Evaluation of `action` against the fixed opponent, when computed.
    pub value: Option<F>,
    pub first: FirstStepResult<F>,
    /// Whether the second step ran (first step hit a local maximum).
    pub ran_second_step: bool,
    /// Whether the returned action came from the second step.
    pub chose_second: bool,
    pub step1_elapsed: Duration,
    pub step2_elapsed: Duration,
}

fn second_step<F: Real, E: Evaluator<F>>(
    state: &GameState,
    player: Player,
    portfolio: &Portfolio,
    tracker: &mut BudgetTracker,
    eval: &E,
    selection: &mut SelectionState,
    first: FirstStepResult<F>,
    restrict_moves: bool,
    max_depth: Option<usize>,
    step1_elapsed: Duration,
) -> Result<TwoStepReport<F>, SearchError> {
    if !first.hit_local_max {
        return Ok(TwoStepReport {
            action: first.action.clone(),
            value: first.value,
            first,
            ran_second_step: false,
            chose_second: false,
            step1_elapsed,
            step2_elapsed: Duration::ZERO,
        });
    }

    let step2_start = Instant::now();
    let unrestricted = selection.select(state, player);
    let params = MftParams {
        portfolio,
        default_script: Script::Nokav,
        restrict_moves,
        max_depth,
    };
    // Hold back the two evaluations the final comparison needs.
    tracker.reserve(2);
    let second_action =
        abcd_mft(state, player, &first.action, &unrestricted, &params, tracker, eval)?;
    tracker.release(2);

    if second_action == first.action {
        return Ok(TwoStepReport {
            action: first.action.clone(),
            value: first.value,
            first,
            ran_second_step: true,
            chose_second: false,
            step1_elapsed,
            step2_elapsed: step2_start.elapsed(),
        });
    }

    let opponent_action = script_action(state, player.opponent(), Script::Nokav);
    let s1 = apply_for(state, player, &first.action, &opponent_action)?;
    let s2 = apply_for(state, player, &second_action, &opponent_action)?;
    let v1 = try_eval(tracker, eval, &s1, player);
    let v2 = try_eval(tracker, eval, &s2, player);
    let (action, value, chose_second) = match (v1, v2) {
        (Some(a), Some(b)) if a > b => (first.action.clone(), Some(a), false),
        (Some(_), Some(b)) => (second_action, Some(b), true),
        // Comparison impossible within budget: keep the first step's bound.
        _ => (first.action.clone(), first.value, false),
    };
    Ok(TwoStepReport {
        action,
        value,
        first,
        ran_second_step: true,
        chose_second,
        step1_elapsed,
        step2_elapsed: step2_start.elapsed(),
    })
}

/// Greedy alpha-beta search: PGS, then a move-fixed-tree search over the
/// unrestricted units' full legal moves.
pub fn gab<F: Real, E: Evaluator<F>>(
    state: &GameState,
    player: Player,
    portfolio: &Portfolio,
    tracker: &mut BudgetTracker,
    eval: &E,
    selection: &mut SelectionState,
    max_depth: Option<usize>,
) -> Result<TwoStepReport<F>, SearchError> {
    let start = Instant::now();
    let first = pgs(state, player, portfolio, tracker, eval)?;
    let step1_elapsed = start.elapsed();
    second_step(state, player, portfolio, tracker, eval, selection, first, false, max_depth, step1_elapsed)
}

/// GAB's uniform-abstraction variant: the second step draws unrestricted
/// units' moves from the portfolio instead of the full legal sets.
pub fn gab_p<F: Real, E: Evaluator<F>>(
    state: &GameState,
    player: Player,
    portfolio: &Portfolio,
    tracker: &mut BudgetTracker,
    eval: &E,
    selection: &mut SelectionState,
    max_depth: Option<usize>,
) -> Result<TwoStepReport<F>, SearchError> {
    let start = Instant::now();
    let first = pgs(state, player, portfolio, tracker, eval)?;
    let step1_elapsed = start.elapsed();
    second_step(state, player, portfolio, tracker, eval, selection, first, true, max_depth, step1_elapsed)
}

/// Stratified alpha-beta search: SSS first, then GAB's second step.
pub fn sab<F: Real, E: Evaluator<F>>(
    state: &GameState,
    player: Player,
    portfolio: &Portfolio,
    type_system: TypeSystem,
    tracker: &mut BudgetTracker,
    eval: &E,
    selection: &mut SelectionState,
    max_depth: Option<usize>,
) -> Result<TwoStepReport<F>, SearchError> {
    let start = Instant::now();
    let first = sss(state, player, portfolio, type_system, tracker, eval)?;
    let step1_elapsed = start.elapsed();
    second_step(state, player, portfolio, tracker, eval, selection, first, false, max_depth, step1_elapsed)
}

/// SAB's uniform-abstraction variant.
pub fn sab_p<F: Real, E: Evaluator<F>>(
    state: &GameState,
    player: Player,
    portfolio: &Portfolio,
    type_system: TypeSystem,
    tracker: &mut BudgetTracker,
    eval: &E,
    selection: &mut SelectionState,
    max_depth: Option<usize>,
) -> Result<TwoStepReport<F>, SearchError> {
    let start = Instant::now();
    let first = sss(state, player, portfolio, type_system, tracker, eval)?;
    let step1_elapsed = start.elapsed();
    second_step(state, player, portfolio, tracker, eval, selection, first, true, max_depth, step1_elapsed)
}
