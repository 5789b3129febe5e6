//! Stratified strategy selection: hill-climbing over unit types.
//!
//! Like PGS but both players seed with NOKAV and the improvement loop
//! iterates over type labels, reassigning every unit of one type through
//! the same script before evaluating.

use std::collections::BTreeMap;

use crate::engine::{ready_units, GameState, Player, PlayerAction, UnitId};
use crate::real::Real;
use crate::scripts::{script_action, DamageLedger, Portfolio, Script};

use super::{
    apply_for, try_eval, BudgetTracker, Evaluator, FirstStepResult, SearchError, TypeSystem,
};

/// The action with every unit of one group reassigned by `script`, in id
/// order, threading the candidate's own attacks through the ledger.
fn reassign_group(
    state: &GameState,
    base: &PlayerAction,
    group: &[UnitId],
    script: Script,
) -> PlayerAction {
    let mut candidate = base.clone();
    for unit in group {
        let ledger = DamageLedger::from_action(state, &candidate, *unit);
        candidate.set_move(*unit, script.choose(state, *unit, &ledger));
    }
    candidate
}

/// Stratified strategy selection over `type_system`'s partition.
pub fn sss<F: Real, E: Evaluator<F>>(
    state: &GameState,
    player: Player,
    portfolio: &Portfolio,
    type_system: TypeSystem,
    tracker: &mut BudgetTracker,
    eval: &E,
) -> Result<FirstStepResult<F>, SearchError> {
    let units = ready_units(state, player);
    if units.is_empty() {
        return Err(SearchError::NoReadyUnits(player));
    }
    let mut groups: BTreeMap<u64, Vec<UnitId>> = BTreeMap::new();
    for unit in &units {
        groups.entry(type_system.label(state, *unit)).or_default().push(*unit);
    }

    let mut action = script_action(state, player, Script::Nokav);
    let opponent_action = script_action(state, player.opponent(), Script::Nokav);
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
        for group in groups.values() {
            for script in portfolio.scripts() {
                let candidate = reassign_group(state, &action, group, *script);
                if candidate == action {
                    continue;
                }
                if tracker.exhausted() {
                    return finish(action, false, Some(current), tracker);
                }
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
