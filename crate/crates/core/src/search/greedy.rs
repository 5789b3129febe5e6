//! Portfolio greedy search and its asymmetric variant.
//!
//! PGS seeds both players with the portfolio script that scores best against
//! a NOKAV opponent, then hill-climbs over per-unit script replacements,
//! keeping a replacement only when it strictly improves the evaluation. The
//! opponent's action never changes after initialization. GAS runs the same
//! loop but considers every legal move for the unrestricted units.

use crate::abstraction::SelectionState;
use crate::engine::{legal_moves, ready_units, GameState, Move, Player, PlayerAction, UnitId};
use crate::real::Real;
use crate::scripts::{script_action, Portfolio, Script};

use super::{
    apply_for, script_candidates, try_eval, BudgetTracker, Evaluator, FirstStepResult, SearchError,
};

/// Seeds one player's action: the portfolio script whose whole-army action
/// evaluates best against an all-NOKAV opponent, ties to the earlier script.
/// Falls back to the first script when the budget allows no evaluation.
fn seed_action<F: Real, E: Evaluator<F>>(
    state: &GameState,
    player: Player,
    portfolio: &Portfolio,
    tracker: &mut BudgetTracker,
    eval: &E,
) -> Result<PlayerAction, SearchError> {
    let scripts = portfolio.scripts();
    if ready_units(state, player).is_empty() || scripts.len() == 1 {
        return Ok(script_action(state, player, scripts[0]));
    }
    let opponent_action = script_action(state, player.opponent(), Script::Nokav);
    let mut best = script_action(state, player, scripts[0]);
    let mut best_value: Option<F> = None;
    for script in scripts {
        if tracker.exhausted() {
            break;
        }
        let candidate = script_action(state, player, *script);
        let next = apply_for(state, player, &candidate, &opponent_action)?;
        let value = match try_eval(tracker, eval, &next, player) {
            Some(v) => v,
            None => break,
        };
        if best_value.map_or(true, |b| value > b) {
            best = candidate;
            best_value = Some(value);
        }
    }
    Ok(best)
}

/// Shared hill-climbing loop over per-unit candidate moves.
///
/// Returns mid-pass as soon as the budget runs out; `hit_local_max` is set
/// only when a complete pass accepted no replacement.
pub(crate) fn greedy_climb<F: Real, E: Evaluator<F>>(
    state: &GameState,
    player: Player,
    mut action: PlayerAction,
    opponent_action: PlayerAction,
    candidates: &dyn Fn(&GameState, UnitId, &PlayerAction) -> Vec<Move>,
    tracker: &mut BudgetTracker,
    eval: &E,
) -> Result<FirstStepResult<F>, SearchError> {
    let units = ready_units(state, player);
    let finish = |action: PlayerAction, local_max: bool, value, tracker: &BudgetTracker| {
        Ok(FirstStepResult { action, hit_local_max: local_max, remaining: tracker.remaining(), value })
    };

    let baseline = apply_for(state, player, &action, &opponent_action)?;
    let mut current = match try_eval(tracker, eval, &baseline, player) {
        Some(v) => v,
        None => return finish(action, false, None, tracker),
    };

    loop {
        let mut changed = false;
        for unit in &units {
            for mv in candidates(state, *unit, &action) {
                if action.move_for(*unit) == Some(mv) {
                    continue;
                }
                if tracker.exhausted() {
                    return finish(action, false, Some(current), tracker);
                }
                let mut candidate = action.clone();
                candidate.set_move(*unit, mv);
                let next = apply_for(state, player, &candidate, &opponent_action)?;
                let value = match try_eval(tracker, eval, &next, player) {
                    Some(v) => v,
                    None => return finish(action, false, Some(current), tracker),
                };
                if value > current {
                    action = candidate;
                    current = value;
                    changed = true;
                }
            }
            if tracker.exhausted() {
                return finish(action, false, Some(current), tracker);
            }
        }
        if !changed {
            return finish(action, true, Some(current), tracker);
        }
    }
}

/// Portfolio greedy search: hill-climbing over per-unit script moves.
pub fn pgs<F: Real, E: Evaluator<F>>(
    state: &GameState,
    player: Player,
    portfolio: &Portfolio,
    tracker: &mut BudgetTracker,
    eval: &E,
) -> Result<FirstStepResult<F>, SearchError> {
    if ready_units(state, player).is_empty() {
        return Err(SearchError::NoReadyUnits(player));
    }
    let action = seed_action(state, player, portfolio, tracker, eval)?;
    let opponent_action = seed_action(state, player.opponent(), portfolio, tracker, eval)?;
    let pf = portfolio.clone();
    greedy_climb(
        state,
        player,
        action,
        opponent_action,
        &move |s, u, a| script_candidates(s, u, &pf, a),
        tracker,
        eval,
    )
}

/// Greedy asymmetric search: PGS whose candidate moves for the unrestricted
/// units are the full legal move sets.
pub fn gas<F: Real, E: Evaluator<F>>(
    state: &GameState,
    player: Player,
    portfolio: &Portfolio,
    tracker: &mut BudgetTracker,
    eval: &E,
    selection: &mut SelectionState,
) -> Result<FirstStepResult<F>, SearchError> {
    if ready_units(state, player).is_empty() {
        return Err(SearchError::NoReadyUnits(player));
    }
    let unrestricted = selection.select(state, player);
    let action = seed_action(state, player, portfolio, tracker, eval)?;
    let opponent_action = seed_action(state, player.opponent(), portfolio, tracker, eval)?;
    let pf = portfolio.clone();
    greedy_climb(
        state,
        player,
        action,
        opponent_action,
        &move |s, u, a| {
            if unrestricted.contains(&u) {
                legal_moves(s, u).expect("ready unit has legal moves")
            } else {
                script_candidates(s, u, &pf, a)
            }
        },
        tracker,
        eval,
    )
}
