//! Scripted unit policies: NOKAV and Kiter.
//!
//! A script maps (state, unit) to a single legal move. Scripts applied to
//! build a whole action share a [`DamageLedger`] so that no target is
//! assigned more damage than needed to eliminate it (no overkill); when a
//! script is queried for one unit in isolation, the caller passes a ledger
//! holding the rest of the candidate action's attacks.

use serde::{Deserialize, Serialize};

use crate::engine::{
    check_move_legal, in_attack_range, GameState, Move, Player, PlayerAction, Unit, UnitId,
};

/// Damage already committed against each target within one decision point.
/// Entry counts stay tiny, so a flat vector beats a map.
#[derive(Clone, Debug, Default)]
pub struct DamageLedger(Vec<(UnitId, i32)>);

impl DamageLedger {
    pub fn new() -> DamageLedger {
        DamageLedger::default()
    }

    pub fn commit(&mut self, target: UnitId, damage: i32) {
        match self.0.iter_mut().find(|(t, _)| *t == target) {
            Some((_, total)) => *total += damage,
            None => self.0.push((target, damage)),
        }
    }

    pub fn committed(&self, target: UnitId) -> i32 {
        self.0.iter().find(|(t, _)| *t == target).map_or(0, |(_, d)| *d)
    }

    /// Target hp minus damage already committed this decision point.
    pub fn remaining_hp(&self, target: &Unit) -> i32 {
        target.hp - self.committed(target.id)
    }

    /// Ledger holding the attacks of `action`, except `exclude`'s own move.
    pub fn from_action(state: &GameState, action: &PlayerAction, exclude: UnitId) -> DamageLedger {
        let mut ledger = DamageLedger::new();
        for (unit, mv) in action.iter() {
            if unit == exclude {
                continue;
            }
            if let Move::Attack(target) = mv {
                if let Some(attacker) = state.unit(unit) {
                    ledger.commit(target, state.kind_of(attacker).damage);
                }
            }
        }
        ledger
    }
}

/// The shipped scripts.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Script {
    Nokav,
    Kiter,
}

impl Script {
    pub fn name(self) -> &'static str {
        match self {
            Script::Nokav => "nokav",
            Script::Kiter => "kiter",
        }
    }

    pub fn from_name(name: &str) -> Option<Script> {
        match name.to_ascii_lowercase().as_str() {
            "nokav" => Some(Script::Nokav),
            "kiter" => Some(Script::Kiter),
            _ => None,
        }
    }

    /// Move for a living, ready unit. Always legal in `state`.
    pub fn choose(self, state: &GameState, unit_id: UnitId, ledger: &DamageLedger) -> Move {
        let unit = state.unit(unit_id).expect("script queried for a living unit");
        debug_assert!(state.is_ready(unit));
        match self {
            Script::Nokav => nokav(state, unit, ledger),
            Script::Kiter => kiter(state, unit, ledger),
        }
    }
}

/// Nonempty ordered set of scripts inducing an action abstraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Portfolio(Vec<Script>);

impl Portfolio {
    pub fn new(scripts: Vec<Script>) -> Portfolio {
        assert!(!scripts.is_empty(), "portfolio must be nonempty");
        let mut seen = Vec::new();
        for s in &scripts {
            assert!(!seen.contains(s), "portfolio scripts must be unique");
            seen.push(*s);
        }
        Portfolio(scripts)
    }

    pub fn from_names(names: &[&str]) -> Option<Portfolio> {
        let scripts: Option<Vec<Script>> = names.iter().map(|n| Script::from_name(n)).collect();
        scripts.map(Portfolio::new)
    }

    pub fn scripts(&self) -> &[Script] {
        &self.0
    }
}

impl Default for Portfolio {
    fn default() -> Portfolio {
        Portfolio::new(vec![Script::Nokav, Script::Kiter])
    }
}

/// Builds a full action for `player` by applying `script` to every ready
/// unit in id order, threading the shared no-overkill ledger.
pub fn script_action(state: &GameState, player: Player, script: Script) -> PlayerAction {
    let mut ledger = DamageLedger::new();
    let mut moves = Vec::new();
    for unit in state.units_of(player) {
        if !state.is_ready(unit) {
            continue;
        }
        let mv = script.choose(state, unit.id, &ledger);
        if let Move::Attack(target) = mv {
            ledger.commit(target, state.kind_of(unit).damage);
        }
        moves.push((unit.id, mv));
    }
    PlayerAction::from_moves(moves)
}

fn sq_dist(ax: i32, ay: i32, bx: i32, by: i32) -> i64 {
    let dx = (ax - bx) as i64;
    let dy = (ay - by) as i64;
    dx * dx + dy * dy
}

/// Exact attack-value comparison: `dpf(a)/hp(a) > dpf(b)/hp(b)` by integer
/// cross-multiplication (`dpf = d / (cd + 1)`).
fn av_greater(state: &GameState, a: &Unit, b: &Unit) -> bool {
    let ka = state.kind_of(a);
    let kb = state.kind_of(b);
    let lhs = ka.damage as i64 * ((kb.cooldown + 1) as i64) * b.hp as i64;
    let rhs = kb.damage as i64 * ((ka.cooldown + 1) as i64) * a.hp as i64;
    lhs > rhs
}

/// Everything one pass over the enemies yields for a unit's decision.
struct EnemyScan {
    /// In-range target with the highest attack value and positive remaining
    /// ledger hp; ties by lowest id. Only set while the weapon is loaded.
    target: Option<UnitId>,
    /// Closest enemy with positive remaining ledger hp, ties by lowest id.
    closest_remaining: Option<UnitId>,
    /// Closest enemy outright.
    closest: Option<UnitId>,
}

fn scan_enemies(state: &GameState, unit: &Unit, ledger: &DamageLedger) -> EnemyScan {
    let weapon_ready = state.weapon_ready(unit);
    let mut target: Option<&Unit> = None;
    let mut closest_remaining: Option<(i64, UnitId)> = None;
    let mut closest: Option<(i64, UnitId)> = None;
    for enemy in state.units_of(unit.owner.opponent()) {
        let d = sq_dist(unit.x, unit.y, enemy.x, enemy.y);
        if closest.map_or(true, |(best, _)| d < best) {
            closest = Some((d, enemy.id));
        }
        let remaining = ledger.remaining_hp(enemy) > 0;
        if remaining && closest_remaining.map_or(true, |(best, _)| d < best) {
            closest_remaining = Some((d, enemy.id));
        }
        if weapon_ready && remaining && in_attack_range(state, unit, enemy) {
            // strict comparison keeps the lowest id on ties (id order scan)
            if target.map_or(true, |t| av_greater(state, enemy, t)) {
                target = Some(enemy);
            }
        }
    }
    EnemyScan {
        target: target.map(|t| t.id),
        closest_remaining: closest_remaining.map(|(_, id)| id),
        closest: closest.map(|(_, id)| id),
    }
}

const DIRECTION_PRIORITY: [Move; 4] = [Move::Up, Move::Down, Move::Left, Move::Right];

/// The legal directional move minimizing (`toward`) or maximizing (not
/// `toward`) squared distance to `target`, ties by U > D > L > R.
fn directional_move(state: &GameState, unit: &Unit, target: UnitId, toward: bool) -> Option<Move> {
    let target = state.unit(target).expect("movement target is living");
    let step = state.kind_of(unit).step();
    let mut best: Option<(Move, i64)> = None;
    for mv in DIRECTION_PRIORITY {
        if check_move_legal(state, unit, mv).is_err() {
            continue;
        }
        let (dx, dy) = match mv {
            Move::Up => (0, -step),
            Move::Down => (0, step),
            Move::Left => (-step, 0),
            Move::Right => (step, 0),
            _ => unreachable!(),
        };
        let d = sq_dist(unit.x + dx, unit.y + dy, target.x, target.y);
        let better = match best {
            None => true,
            Some((_, cur)) => {
                if toward {
                    d < cur
                } else {
                    d > cur
                }
            }
        };
        if better {
            best = Some((mv, d));
        }
    }
    best.map(|(mv, _)| mv)
}

/// NOKAV: attack the best no-overkill target in range; otherwise advance on
/// the closest enemy that still needs damage; otherwise wait.
fn nokav(state: &GameState, unit: &Unit, ledger: &DamageLedger) -> Move {
    let scan = scan_enemies(state, unit, ledger);
    if let Some(target) = scan.target {
        return Move::Attack(target);
    }
    if let Some(enemy) = scan.closest_remaining.or(scan.closest) {
        if let Some(mv) = directional_move(state, unit, enemy, true) {
            return mv;
        }
    }
    Move::Wait
}

/// Kiter: attack like NOKAV when loaded; retreat from the closest enemy
/// while reloading; otherwise advance; otherwise wait.
fn kiter(state: &GameState, unit: &Unit, ledger: &DamageLedger) -> Move {
    let scan = scan_enemies(state, unit, ledger);
    if let Some(target) = scan.target {
        return Move::Attack(target);
    }
    if !state.weapon_ready(unit) {
        if let Some(enemy) = scan.closest {
            if let Some(mv) = directional_move(state, unit, enemy, false) {
                return mv;
            }
        }
        return Move::Wait;
    }
    if let Some(enemy) = scan.closest_remaining.or(scan.closest) {
        if let Some(mv) = directional_move(state, unit, enemy, true) {
            return mv;
        }
    }
    Move::Wait
}
