//! Depth-first search with iterative deepening over a move-fixed tree.
//!
//! The move-fixed tree fixes restricted units' moves (to the first-step
//! action at the root, to the default script below it) and fixes the
//! opponent to the default script everywhere, leaving only the unrestricted
//! units' moves to search. With the opponent fixed the search is a pure
//! maximization, so no cut is sound; iterative deepening keeps it anytime
//! and the answer is always the root action of the deepest iteration that
//! finished within budget.

use std::collections::BTreeSet;

use crate::abstraction::ActionEnumeration;
use crate::engine::{legal_moves, ready_units, EngineError, GameState, Move, Player, PlayerAction, UnitId};
use crate::real::Real;
use crate::scripts::{script_action, DamageLedger, Portfolio, Script};

use super::{apply_for, try_eval, BudgetTracker, Evaluator, SearchError};

/// Move-fixed-tree search parameters.
#[derive(Clone, Debug)]
pub struct MftParams<'p> {
    pub portfolio: &'p Portfolio,
    /// Script fixing restricted units below the root and the whole opponent.
    pub default_script: Script,
    /// When set, unrestricted units draw from their script moves instead of
    /// all legal moves.
    pub restrict_moves: bool,
    /// Depth cap in decision points; `None` deepens until the budget ends.
    pub max_depth: Option<usize>,
}

enum Stop {
    Budget,
    Engine(EngineError),
}

impl From<EngineError> for Stop {
    fn from(e: EngineError) -> Stop {
        Stop::Engine(e)
    }
}

/// Candidate moves for an unrestricted unit, ordered for partial scans:
/// the preferred move (the first-step assignment, at the root) first, then
/// attacks, then the canonical remainder. The enumeration varies later
/// units fastest, so scans cut short by the budget still cover the
/// neighborhood of the first-step action.
fn candidate_moves(
    state: &GameState,
    unit: UnitId,
    params: &MftParams,
    preferred: Option<Move>,
) -> Vec<Move> {
    let mut moves = if params.restrict_moves {
        crate::abstraction::script_moves(state, unit, params.portfolio)
    } else {
        legal_moves(state, unit).expect("ready unit has legal moves")
    };
    moves.sort_by_key(|m| match m {
        m if Some(*m) == preferred => 0,
        Move::Attack(_) => 1,
        _ => 2,
    });
    moves
}

/// Per-unit factors at a descendant state: restricted ready units fixed to
/// the default script (sharing a ledger in id order), unrestricted ready
/// units free over their candidate moves.
fn descendant_factors(
    state: &GameState,
    player: Player,
    unrestricted: &BTreeSet<UnitId>,
    params: &MftParams,
) -> Vec<(UnitId, Vec<Move>)> {
    let mut ledger = DamageLedger::new();
    let mut factors = Vec::new();
    for unit in ready_units(state, player) {
        if unrestricted.contains(&unit) {
            factors.push((unit, candidate_moves(state, unit, params, None)));
        } else {
            let mv = params.default_script.choose(state, unit, &ledger);
            if let Move::Attack(target) = mv {
                let attacker = state.unit(unit).unwrap();
                ledger.commit(target, state.kind_of(attacker).damage);
            }
            factors.push((unit, vec![mv]));
        }
    }
    factors
}

struct Searcher<'a, F: Real, E: Evaluator<F>> {
    player: Player,
    unrestricted: &'a BTreeSet<UnitId>,
    params: &'a MftParams<'a>,
    eval: &'a E,
    saw_cutoff: bool,
    _marker: std::marker::PhantomData<F>,
}

impl<'a, F: Real, E: Evaluator<F>> Searcher<'a, F, E> {
    fn subtree(
        &mut self,
        state: &GameState,
        depth: usize,
        tracker: &mut BudgetTracker,
    ) -> Result<F, Stop> {
        if state.is_terminal() || depth == 0 {
            if !state.is_terminal() {
                self.saw_cutoff = true;
            }
            return try_eval(tracker, self.eval, state, self.player).ok_or(Stop::Budget);
        }
        let opponent_action = script_action(state, self.player.opponent(), self.params.default_script);
        let factors = descendant_factors(state, self.player, self.unrestricted, self.params);
        let mut best: Option<F> = None;
        for action in ActionEnumeration::from_factors(factors) {
            let child = apply_for(state, self.player, &action, &opponent_action)?;
            let value = self.subtree(&child, depth - 1, tracker)?;
            if best.map_or(true, |b| value > b) {
                best = Some(value);
            }
        }
        Ok(best.expect("move-fixed tree nodes always have at least one action"))
    }

    /// One deepening iteration over the root actions. When the budget dies
    /// mid-scan the partial best is reported through `partial` so the
    /// first iteration can still answer with what it saw.
    fn root_iteration(
        &mut self,
        state: &GameState,
        root_factors: &[(UnitId, Vec<Move>)],
        depth: usize,
        tracker: &mut BudgetTracker,
        partial: &mut Option<PlayerAction>,
    ) -> Result<PlayerAction, Stop> {
        let opponent_action = script_action(state, self.player.opponent(), self.params.default_script);
        let mut best: Option<(PlayerAction, F)> = None;
        for action in ActionEnumeration::from_factors(root_factors.to_vec()) {
            let child = apply_for(state, self.player, &action, &opponent_action)?;
            match self.subtree(&child, depth - 1, tracker) {
                Ok(value) => {
                    if best.as_ref().map_or(true, |(_, b)| value > *b) {
                        best = Some((action, value));
                    }
                }
                Err(stop) => {
                    *partial = best.map(|(a, _)| a);
                    return Err(stop);
                }
            }
        }
        Ok(best.expect("root of the move-fixed tree has at least one action").0)
    }
}

/// Searches the move-fixed tree rooted at `state` and returns the best root
/// action found, or `first_action` when the unrestricted set gives nothing
/// to search or the budget allows no completed iteration.
pub fn abcd_mft<F: Real, E: Evaluator<F>>(
    state: &GameState,
    player: Player,
    first_action: &PlayerAction,
    unrestricted: &BTreeSet<UnitId>,
    params: &MftParams,
    tracker: &mut BudgetTracker,
    eval: &E,
) -> Result<PlayerAction, SearchError> {
    let ready = ready_units(state, player);
    let unrestricted_ready: BTreeSet<UnitId> =
        unrestricted.iter().filter(|u| ready.contains(u)).copied().collect();
    if unrestricted_ready.is_empty() {
        return Ok(first_action.clone());
    }

    // Root factors: restricted units pinned to the first-step action,
    // unrestricted units ordered so the scan radiates out from it.
    let root_factors: Vec<(UnitId, Vec<Move>)> = ready
        .iter()
        .map(|&unit| {
            let first = first_action
                .move_for(unit)
                .expect("first-step action covers every ready unit");
            if unrestricted_ready.contains(&unit) {
                (unit, candidate_moves(state, unit, params, Some(first)))
            } else {
                (unit, vec![first])
            }
        })
        .collect();

    let mut searcher = Searcher {
        player,
        unrestricted: &unrestricted_ready,
        params,
        eval,
        saw_cutoff: false,
        _marker: std::marker::PhantomData::<F>,
    };

    let mut incumbent: Option<PlayerAction> = None;
    let mut depth = 1;
    loop {
        if params.max_depth.is_some_and(|cap| depth > cap) || tracker.exhausted() {
            break;
        }
        searcher.saw_cutoff = false;
        let mut partial = None;
        match searcher.root_iteration(state, &root_factors, depth, tracker, &mut partial) {
            Ok(action) => {
                incumbent = Some(action);
                if !searcher.saw_cutoff {
                    break; // tree fully resolved; deeper passes are identical
                }
            }
            Err(Stop::Budget) => {
                // A later iteration cut short keeps the last completed
                // answer; a first iteration cut short answers with the best
                // of the root prefix it scanned (the two-step searches
                // re-check it against the first step's action anyway).
                if incumbent.is_none() {
                    incumbent = partial;
                }
                break;
            }
            Err(Stop::Engine(e)) => return Err(SearchError::Engine(e)),
        }
        depth += 1;
    }
    Ok(incumbent.unwrap_or_else(|| first_action.clone()))
}
