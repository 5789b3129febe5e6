//! Script-induced move sets, uniform and asymmetric action abstractions,
//! and the strategies for selecting unrestricted units.
//!
//! A uniform abstraction restricts every ready unit to the moves its
//! portfolio scripts return; an asymmetric abstraction leaves a chosen
//! subset of units (the unrestricted units) with their full legal move
//! sets. The empty unrestricted set recovers the uniform abstraction and
//! the full set recovers the un-abstracted space.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{
    attack_value, legal_moves, ready_units, GameState, Move, Player, PlayerAction, UnitId,
};
use crate::scripts::{DamageLedger, Portfolio};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum AbstractionError {
    #[error("player {0:?} has no ready units")]
    NoReadyUnits(Player),
}

/// Which per-unit move sets action enumeration draws from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AbstractionMode {
    /// Every unit restricted to its script moves.
    Uniform,
    /// Units in the set keep all legal moves; the rest are restricted.
    Asymmetric(BTreeSet<UnitId>),
    /// Full legal move sets for every unit.
    Unabstracted,
}

/// Portfolio plus abstraction mode: defines which actions are legal in search.
#[derive(Clone, Debug)]
pub struct AbstractionSpec {
    pub portfolio: Portfolio,
    pub mode: AbstractionMode,
}

impl AbstractionSpec {
    pub fn uniform(portfolio: Portfolio) -> AbstractionSpec {
        AbstractionSpec { portfolio, mode: AbstractionMode::Uniform }
    }

    pub fn asymmetric(portfolio: Portfolio, unrestricted: BTreeSet<UnitId>) -> AbstractionSpec {
        AbstractionSpec { portfolio, mode: AbstractionMode::Asymmetric(unrestricted) }
    }

    pub fn unabstracted() -> AbstractionSpec {
        AbstractionSpec { portfolio: Portfolio::default(), mode: AbstractionMode::Unabstracted }
    }
}

/// Deduplicated set of moves the portfolio's scripts return for one unit,
/// in canonical move order. Each script sees an empty damage ledger.
pub fn script_moves(state: &GameState, unit: UnitId, portfolio: &Portfolio) -> Vec<Move> {
    script_moves_with_ledger(state, unit, portfolio, &DamageLedger::new())
}

/// Like [`script_moves`] but with damage already committed by the rest of a
/// candidate action, for use inside the hill-climbing searches.
pub fn script_moves_with_ledger(
    state: &GameState,
    unit: UnitId,
    portfolio: &Portfolio,
    ledger: &DamageLedger,
) -> Vec<Move> {
    let mut moves: Vec<Move> =
        portfolio.scripts().iter().map(|s| s.choose(state, unit, ledger)).collect();
    moves.sort();
    moves.dedup();
    moves
}

/// Lazy Cartesian product over per-unit move factors. The empty factor list
/// yields exactly one empty action.
pub struct ActionEnumeration {
    factors: Vec<(UnitId, Vec<Move>)>,
    indices: Vec<usize>,
    done: bool,
}

impl ActionEnumeration {
    pub fn from_factors(factors: Vec<(UnitId, Vec<Move>)>) -> ActionEnumeration {
        let done = factors.iter().any(|(_, moves)| moves.is_empty());
        let indices = vec![0; factors.len()];
        ActionEnumeration { factors, indices, done }
    }

    /// Exact number of actions: the product of factor sizes.
    pub fn action_count(&self) -> u128 {
        self.factors.iter().map(|(_, m)| m.len() as u128).product()
    }

    pub fn factors(&self) -> &[(UnitId, Vec<Move>)] {
        &self.factors
    }
}

impl Iterator for ActionEnumeration {
    type Item = PlayerAction;

    fn next(&mut self) -> Option<PlayerAction> {
        if self.done {
            return None;
        }
        let action = PlayerAction::from_moves(
            self.factors
                .iter()
                .zip(&self.indices)
                .map(|((unit, moves), &i)| (*unit, moves[i]))
                .collect(),
        );
        for k in (0..self.factors.len()).rev() {
            self.indices[k] += 1;
            if self.indices[k] < self.factors[k].1.len() {
                return Some(action);
            }
            self.indices[k] = 0;
        }
        self.done = true;
        Some(action)
    }
}

/// Enumerates the player's abstracted legal actions at `state` as the
/// Cartesian product of per-unit factors: script moves for restricted units
/// and full legal moves for unrestricted ones, by mode.
pub fn enumerate_actions(
    state: &GameState,
    player: Player,
    spec: &AbstractionSpec,
) -> Result<ActionEnumeration, AbstractionError> {
    let ready = ready_units(state, player);
    if ready.is_empty() {
        return Err(AbstractionError::NoReadyUnits(player));
    }
    let factors = ready
        .into_iter()
        .map(|unit| {
            let moves = match &spec.mode {
                AbstractionMode::Unabstracted => legal_moves(state, unit).unwrap(),
                AbstractionMode::Uniform => script_moves(state, unit, &spec.portfolio),
                AbstractionMode::Asymmetric(unrestricted) => {
                    if unrestricted.contains(&unit) {
                        legal_moves(state, unit).unwrap()
                    } else {
                        script_moves(state, unit, &spec.portfolio)
                    }
                }
            };
            (unit, moves)
        })
        .collect();
    Ok(ActionEnumeration::from_factors(factors))
}

/// How unrestricted units are picked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionStrategy {
    /// AV+: the N ready units with the largest `dpf / hp`.
    MoreAttackValue,
    /// AV-: the N ready units with the smallest `dpf / hp`.
    LessAttackValue,
    /// R: N units fixed at the start of the match, dead members replaced.
    Random,
}

impl SelectionStrategy {
    pub fn from_name(name: &str) -> Option<SelectionStrategy> {
        match name.to_ascii_lowercase().as_str() {
            "av+" | "avplus" => Some(SelectionStrategy::MoreAttackValue),
            "av-" | "avminus" => Some(SelectionStrategy::LessAttackValue),
            "r" | "random" => Some(SelectionStrategy::Random),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SelectionStrategy::MoreAttackValue => "av+",
            SelectionStrategy::LessAttackValue => "av-",
            SelectionStrategy::Random => "random",
        }
    }
}

/// Per-agent state of the unrestricted-unit selection: the strategy, the
/// set size N, a seeded tie-breaking rng, and the persistent set for R.
#[derive(Clone, Debug)]
pub struct SelectionState {
    strategy: SelectionStrategy,
    n: usize,
    rng: ChaCha8Rng,
    persistent: BTreeSet<UnitId>,
    initialized: bool,
}

impl SelectionState {
    pub fn new(strategy: SelectionStrategy, n: usize, seed: u64) -> SelectionState {
        SelectionState {
            strategy,
            n,
            rng: ChaCha8Rng::seed_from_u64(seed),
            persistent: BTreeSet::new(),
            initialized: false,
        }
    }

    pub fn strategy(&self) -> SelectionStrategy {
        self.strategy
    }

    pub fn set_size(&self) -> usize {
        self.n
    }

    /// Unrestricted units for the current decision point.
    ///
    /// AV+/AV- rank the ready units (the only ones receiving moves) and are
    /// re-evaluated at every decision point; ties break randomly. R draws
    /// from the living units once, then replaces eliminated members with
    /// random living ones.
    pub fn select(&mut self, state: &GameState, player: Player) -> BTreeSet<UnitId> {
        match self.strategy {
            SelectionStrategy::MoreAttackValue => self.by_attack_value(state, player, true),
            SelectionStrategy::LessAttackValue => self.by_attack_value(state, player, false),
            SelectionStrategy::Random => self.persisted_random(state, player),
        }
    }

    fn by_attack_value(
        &mut self,
        state: &GameState,
        player: Player,
        largest: bool,
    ) -> BTreeSet<UnitId> {
        let mut ranked: Vec<(UnitId, f64)> = ready_units(state, player)
            .into_iter()
            .map(|id| {
                let unit = state.unit(id).unwrap();
                (id, attack_value::<f64>(state.kind_of(unit), unit.hp))
            })
            .collect();
        ranked.shuffle(&mut self.rng); // random order among equal av-values
        ranked.sort_by(|a, b| {
            if largest {
                b.1.partial_cmp(&a.1).unwrap()
            } else {
                a.1.partial_cmp(&b.1).unwrap()
            }
        });
        ranked.into_iter().take(self.n).map(|(id, _)| id).collect()
    }

    fn persisted_random(&mut self, state: &GameState, player: Player) -> BTreeSet<UnitId> {
        let living: Vec<UnitId> = state.units_of(player).map(|u| u.id).collect();
        if !self.initialized {
            let mut pool = living.clone();
            pool.shuffle(&mut self.rng);
            self.persistent = pool.into_iter().take(self.n).collect();
            self.initialized = true;
        } else {
            self.persistent.retain(|id| living.contains(id));
            let want = self.n.min(living.len());
            while self.persistent.len() < want {
                let candidates: Vec<UnitId> = living
                    .iter()
                    .filter(|id| !self.persistent.contains(id))
                    .copied()
                    .collect();
                let pick = *candidates.choose(&mut self.rng).unwrap();
                self.persistent.insert(pick);
            }
        }
        self.persistent.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{apply, Arena, KindId, StatTable, Unit, UnitKind};
    use std::collections::HashSet;
    use std::sync::Arc;

    fn gun(name: &str, damage: i32, hp0: i32) -> UnitKind {
        UnitKind {
            name: name.into(),
            alias: None,
            hp0,
            damage,
            cooldown: 10,
            range: 120,
            speed: 4,
            width: 16,
            height: 16,
        }
    }

    fn state(kinds: Vec<UnitKind>, units: Vec<Unit>, arena: Arena) -> GameState {
        GameState::new(arena, 1000, Arc::new(StatTable::from_kinds(kinds)), units).unwrap()
    }

    /// Both scripts agree (attack the sole target) -> singleton set.
    #[test]
    fn script_moves_dedupes_agreeing_scripts() {
        let s = state(
            vec![gun("g", 6, 40)],
            vec![
                Unit::new(UnitId(0), Player::One, KindId(0), 100, 100, 40),
                Unit::new(UnitId(1), Player::Two, KindId(0), 180, 100, 40),
            ],
            Arena::new(400, 200),
        );
        assert_eq!(
            script_moves(&s, UnitId(0), &Portfolio::default()),
            vec![Move::Attack(UnitId(1))]
        );
    }

    /// Out of range while reloading: NOKAV advances, Kiter retreats.
    #[test]
    fn script_moves_diverge_out_of_range_on_cooldown() {
        let shooter = Unit {
            cooldown_frame: 50,
            ..Unit::new(UnitId(0), Player::One, KindId(0), 200, 100, 40)
        };
        let s = state(
            vec![gun("g", 6, 40)],
            vec![shooter, Unit::new(UnitId(1), Player::Two, KindId(0), 360, 100, 40)],
            Arena::new(500, 200),
        );
        let moves = script_moves(&s, UnitId(0), &Portfolio::default());
        assert_eq!(moves, vec![Move::Left, Move::Right]);
    }

    fn three_v_one() -> GameState {
        // three reloading shooters out of range: each has {toward, away}
        let mk = |id, x| Unit {
            cooldown_frame: 50,
            ..Unit::new(UnitId(id), Player::One, KindId(0), x, 100, 40)
        };
        state(
            vec![gun("g", 6, 40)],
            vec![
                mk(0, 200),
                mk(1, 220),
                mk(2, 240),
                Unit::new(UnitId(3), Player::Two, KindId(0), 500, 100, 40),
            ],
            Arena::new(600, 200),
        )
    }

    #[test]
    fn uniform_enumeration_is_product_of_factors() {
        let s = three_v_one();
        let spec = AbstractionSpec::uniform(Portfolio::default());
        let en = enumerate_actions(&s, Player::One, &spec).unwrap();
        assert_eq!(en.action_count(), 8);
        let actions: Vec<PlayerAction> = en.collect();
        assert_eq!(actions.len(), 8);
        let distinct: HashSet<&PlayerAction> = actions.iter().collect();
        assert_eq!(distinct.len(), 8);
    }

    #[test]
    fn asymmetric_boundaries_match_uniform_and_full() {
        let s = three_v_one();
        let portfolio = Portfolio::default();
        let collect = |spec: &AbstractionSpec| -> HashSet<PlayerAction> {
            enumerate_actions(&s, Player::One, spec).unwrap().collect()
        };
        let uniform = collect(&AbstractionSpec::uniform(portfolio.clone()));
        let full = collect(&AbstractionSpec::unabstracted());
        let none: BTreeSet<UnitId> = BTreeSet::new();
        let all: BTreeSet<UnitId> = ready_units(&s, Player::One).into_iter().collect();
        assert_eq!(collect(&AbstractionSpec::asymmetric(portfolio.clone(), none)), uniform);
        assert_eq!(collect(&AbstractionSpec::asymmetric(portfolio.clone(), all)), full);
        // subset chain on a middle set
        let middle: BTreeSet<UnitId> = [UnitId(1)].into_iter().collect();
        let asym = collect(&AbstractionSpec::asymmetric(portfolio, middle));
        assert!(uniform.is_subset(&asym));
        assert!(asym.is_subset(&full));
    }

    #[test]
    fn enumeration_requires_ready_units() {
        let busy = Unit { ready_frame: 9, ..Unit::new(UnitId(0), Player::One, KindId(0), 100, 100, 40) };
        let s = state(
            vec![gun("g", 6, 40)],
            vec![busy, Unit::new(UnitId(1), Player::Two, KindId(0), 300, 100, 40)],
            Arena::new(400, 200),
        );
        let spec = AbstractionSpec::uniform(Portfolio::default());
        assert_eq!(
            enumerate_actions(&s, Player::One, &spec).err(),
            Some(AbstractionError::NoReadyUnits(Player::One))
        );
    }

    fn mixed_av_state() -> GameState {
        // av = dpf/hp: frail(6,20) = 0.0273, sturdy(6,80) = 0.0068
        state(
            vec![gun("frail", 6, 20), gun("sturdy", 6, 80)],
            vec![
                Unit::new(UnitId(0), Player::One, KindId(1), 100, 100, 80),
                Unit::new(UnitId(1), Player::One, KindId(0), 140, 100, 20),
                Unit::new(UnitId(2), Player::Two, KindId(0), 300, 100, 20),
            ],
            Arena::new(400, 200),
        )
    }

    #[test]
    fn av_plus_takes_largest_av_minus_smallest() {
        let s = mixed_av_state();
        let mut plus = SelectionState::new(SelectionStrategy::MoreAttackValue, 1, 7);
        let mut minus = SelectionState::new(SelectionStrategy::LessAttackValue, 1, 7);
        assert_eq!(plus.select(&s, Player::One), [UnitId(1)].into_iter().collect());
        assert_eq!(minus.select(&s, Player::One), [UnitId(0)].into_iter().collect());
    }

    #[test]
    fn av_extremes_are_disjoint_with_distinct_values() {
        let s = mixed_av_state();
        let mut plus = SelectionState::new(SelectionStrategy::MoreAttackValue, 1, 3);
        let mut minus = SelectionState::new(SelectionStrategy::LessAttackValue, 1, 3);
        let a = plus.select(&s, Player::One);
        let b = minus.select(&s, Player::One);
        assert!(a.is_disjoint(&b));
    }

    #[test]
    fn av_ties_break_randomly_but_seeded() {
        // two identical units: over several decision points both get picked
        let s = state(
            vec![gun("g", 6, 40)],
            vec![
                Unit::new(UnitId(0), Player::One, KindId(0), 100, 100, 40),
                Unit::new(UnitId(1), Player::One, KindId(0), 140, 100, 40),
                Unit::new(UnitId(2), Player::Two, KindId(0), 300, 100, 40),
            ],
            Arena::new(400, 200),
        );
        let mut sel = SelectionState::new(SelectionStrategy::MoreAttackValue, 1, 11);
        let picks: HashSet<UnitId> =
            (0..32).map(|_| *sel.select(&s, Player::One).iter().next().unwrap()).collect();
        assert_eq!(picks.len(), 2);
        // same seed, same sequence
        let mut a = SelectionState::new(SelectionStrategy::MoreAttackValue, 1, 42);
        let mut b = SelectionState::new(SelectionStrategy::MoreAttackValue, 1, 42);
        for _ in 0..8 {
            assert_eq!(a.select(&s, Player::One), b.select(&s, Player::One));
        }
    }

    #[test]
    fn random_selection_persists_and_replaces_dead() {
        let s = state(
            vec![gun("g", 40, 40)],
            vec![
                Unit::new(UnitId(0), Player::One, KindId(0), 100, 100, 40),
                Unit::new(UnitId(1), Player::One, KindId(0), 140, 100, 40),
                Unit::new(UnitId(2), Player::One, KindId(0), 180, 60, 40),
                Unit::new(UnitId(3), Player::Two, KindId(0), 260, 100, 40),
            ],
            Arena::new(400, 200),
        );
        let mut sel = SelectionState::new(SelectionStrategy::Random, 2, 5);
        let first = sel.select(&s, Player::One);
        assert_eq!(first.len(), 2);
        assert_eq!(sel.select(&s, Player::One), first); // persists

        // eliminate one selected unit via a real transition
        let victim = *first.iter().next().unwrap();
        let a = PlayerAction::from_moves(
            ready_units(&s, Player::One).into_iter().map(|u| (u, Move::Wait)).collect(),
        );
        let b = PlayerAction::from_moves(vec![(UnitId(3), Move::Attack(victim))]);
        let next = apply(&s, &a, &b).unwrap();
        assert!(next.unit(victim).is_none());

        let second = sel.select(&next, Player::One);
        assert_eq!(second.len(), 2);
        assert!(!second.contains(&victim));
        let survivor = *first.iter().find(|u| **u != victim).unwrap();
        assert!(second.contains(&survivor));
    }

    #[test]
    fn script_moves_subset_of_legal() {
        let s = three_v_one();
        for unit in ready_units(&s, Player::One) {
            let legal = legal_moves(&s, unit).unwrap();
            for mv in script_moves(&s, unit, &Portfolio::default()) {
                assert!(legal.contains(&mv));
            }
        }
    }
}
