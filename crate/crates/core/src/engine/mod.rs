//! Deterministic forward model of a combat: states, legal moves, durative
//! simultaneous transitions, terminal detection, and the LTD2 utility.
//!
//! Coordinates are pixels with y growing downward; `Move::Up` decreases y.
//! All geometry is integer arithmetic so transitions are bit-exact across
//! platforms.

mod config;

pub use config::{ConfigError, StatTable};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::real::{from_i32, Real};

/// Frames a directional move occupies a unit.
pub const MOVE_FRAMES: i32 = 4;
/// Frames a wait occupies a unit.
pub const WAIT_FRAMES: i32 = 4;
/// Frames an attack occupies a unit.
pub const ATTACK_FRAMES: i32 = 5;
/// Bounding-box gap (pixels) within which a melee (range 0) attack connects.
pub const MELEE_REACH: i32 = 8;
/// Default match length bound in frames.
pub const DEFAULT_FRAME_CAP: i32 = 3000;

/// Unique unit identifier, stable for the lifetime of a match.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UnitId(pub u32);

impl std::fmt::Debug for UnitId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "u{}", self.0)
    }
}

/// Index into the match's stat table.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct KindId(pub u16);

/// The two players. `One` is the player whose perspective signed utilities
/// default to; `Two` is the opponent.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

/// Static combat stats of a unit kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitKind {
    pub name: String,
    /// Optional short alias for configs and CLI scenario strings.
    #[serde(default)]
    pub alias: Option<String>,
    /// Initial hit points, >= 1.
    pub hp0: i32,
    /// Damage per attack, >= 0.
    pub damage: i32,
    /// Frames between attacks, >= 0.
    pub cooldown: i32,
    /// Attack range in pixels; 0 means melee.
    pub range: i32,
    /// Pixels moved per frame, >= 1.
    pub speed: i32,
    /// Bounding box in pixels.
    pub width: i32,
    pub height: i32,
}

impl UnitKind {
    pub fn half_width(&self) -> i32 {
        self.width / 2
    }

    pub fn half_height(&self) -> i32 {
        self.height / 2
    }

    /// Pixels a directional move displaces the unit.
    pub fn step(&self) -> i32 {
        self.speed * MOVE_FRAMES
    }
}

/// A living unit. `hp` is always in `1..=hp0`; eliminated units are removed
/// from the state rather than kept at zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unit {
    pub id: UnitId,
    pub owner: Player,
    pub kind: KindId,
    pub x: i32,
    pub y: i32,
    pub hp: i32,
    /// Frame at which the unit may next receive a move.
    pub ready_frame: i32,
    /// Frame at which the unit may next attack.
    pub cooldown_frame: i32,
}

impl Unit {
    pub fn new(id: UnitId, owner: Player, kind: KindId, x: i32, y: i32, hp: i32) -> Unit {
        Unit { id, owner, kind, x, y, hp, ready_frame: 0, cooldown_frame: 0 }
    }
}

/// A single unit move. Directional moves displace the unit by
/// `speed * MOVE_FRAMES` pixels; `Attack` damages a living enemy in range.
///
/// The derived ordering (directions, then `Wait`, then attacks by target id)
/// is the canonical enumeration order used everywhere moves are listed.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Move {
    Up,
    Down,
    Left,
    Right,
    Wait,
    Attack(UnitId),
}

/// One move per ready unit of the acting player, kept sorted by unit id so
/// positional indexing matches the ready-unit order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct PlayerAction(Vec<(UnitId, Move)>);

impl PlayerAction {
    pub fn empty() -> PlayerAction {
        PlayerAction(Vec::new())
    }

    /// Builds an action from (unit, move) pairs; sorts by unit id.
    pub fn from_moves(mut moves: Vec<(UnitId, Move)>) -> PlayerAction {
        moves.sort_by_key(|(u, _)| *u);
        PlayerAction(moves)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Move of the k-th ready unit.
    pub fn at(&self, k: usize) -> Option<(UnitId, Move)> {
        self.0.get(k).copied()
    }

    /// Move assigned to `unit`, if any.
    pub fn move_for(&self, unit: UnitId) -> Option<Move> {
        self.0
            .binary_search_by_key(&unit, |(u, _)| *u)
            .ok()
            .map(|k| self.0[k].1)
    }

    /// Replaces the move of `unit`; panics if the unit has no entry.
    pub fn set_move(&mut self, unit: UnitId, mv: Move) {
        let k = self
            .0
            .binary_search_by_key(&unit, |(u, _)| *u)
            .expect("unit has an entry in the action");
        self.0[k].1 = mv;
    }

    pub fn iter(&self) -> impl Iterator<Item = (UnitId, Move)> + '_ {
        self.0.iter().copied()
    }
}

/// Walled rectangular arena; positions are valid while the unit's bounding
/// box stays inside `[0, width] x [0, height]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arena {
    pub width: i32,
    pub height: i32,
}

impl Arena {
    pub fn new(width: i32, height: i32) -> Arena {
        Arena { width, height }
    }

    fn contains(&self, x: i32, y: i32, kind: &UnitKind) -> bool {
        x - kind.half_width() >= 0
            && x + kind.half_width() <= self.width
            && y - kind.half_height() >= 0
            && y + kind.half_height() <= self.height
    }
}

/// Immutable-after-construction game state; `apply` produces fresh states.
/// Units are kept sorted by id. Cloning is cheap (the stat table is shared).
#[derive(Clone, Debug)]
pub struct GameState {
    frame: i32,
    units: Vec<Unit>,
    arena: Arena,
    frame_cap: i32,
    kinds: Arc<StatTable>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EngineError {
    #[error("unknown or eliminated unit {0:?}")]
    UnknownUnit(UnitId),
    #[error("unit {0:?} is busy until frame {1}")]
    UnitNotReady(UnitId, i32),
    #[error("illegal move {mv:?} for unit {unit:?}: {why}")]
    IllegalMove { unit: UnitId, mv: Move, why: &'static str },
    #[error("action for {player:?} does not cover exactly the ready units (unit {unit:?})")]
    ActionMismatch { player: Player, unit: UnitId },
    #[error("state is terminal")]
    Terminal,
    #[error("invalid state: {0}")]
    InvalidState(String),
}

impl GameState {
    /// Validates and constructs a state at frame 0.
    pub fn new(
        arena: Arena,
        frame_cap: i32,
        kinds: Arc<StatTable>,
        units: Vec<Unit>,
    ) -> Result<GameState, EngineError> {
        let mut units = units;
        units.sort_by_key(|u| u.id);
        for pair in units.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(EngineError::InvalidState(format!("duplicate id {:?}", pair[0].id)));
            }
        }
        for u in &units {
            let kind = kinds
                .get(u.kind)
                .ok_or_else(|| EngineError::InvalidState(format!("unknown kind {:?}", u.kind)))?;
            if u.hp < 1 || u.hp > kind.hp0 {
                return Err(EngineError::InvalidState(format!("unit {:?} hp {} out of range", u.id, u.hp)));
            }
            if !arena.contains(u.x, u.y, kind) {
                return Err(EngineError::InvalidState(format!("unit {:?} out of bounds", u.id)));
            }
        }
        Ok(GameState { frame: 0, units, arena, frame_cap, kinds })
    }

    pub fn frame(&self) -> i32 {
        self.frame
    }

    pub fn frame_cap(&self) -> i32 {
        self.frame_cap
    }

    pub fn arena(&self) -> Arena {
        self.arena
    }

    pub fn stat_table(&self) -> &Arc<StatTable> {
        &self.kinds
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn unit(&self, id: UnitId) -> Option<&Unit> {
        self.units.binary_search_by_key(&id, |u| u.id).ok().map(|k| &self.units[k])
    }

    pub fn kind_of(&self, unit: &Unit) -> &UnitKind {
        self.kinds.get(unit.kind).expect("unit kind validated at construction")
    }

    pub fn units_of(&self, player: Player) -> impl Iterator<Item = &Unit> {
        self.units.iter().filter(move |u| u.owner == player)
    }

    pub fn is_ready(&self, unit: &Unit) -> bool {
        unit.ready_frame <= self.frame
    }

    /// True when the attacker's weapon has reloaded.
    pub fn weapon_ready(&self, unit: &Unit) -> bool {
        unit.cooldown_frame <= self.frame
    }

    pub fn is_terminal(&self) -> bool {
        self.frame >= self.frame_cap
            || self.units_of(Player::One).next().is_none()
            || self.units_of(Player::Two).next().is_none()
    }
}

/// Damage-per-frame: `damage / (cooldown + 1)`.
pub fn dpf<F: Real>(kind: &UnitKind) -> F {
    from_i32::<F>(kind.damage) / from_i32::<F>(kind.cooldown + 1)
}

/// Attack value of a unit at its current hp: `dpf / hp`.
pub fn attack_value<F: Real>(kind: &UnitKind, hp: i32) -> F {
    dpf::<F>(kind) / from_i32::<F>(hp)
}

/// LTD2 utility for `player`: sum over own units of `sqrt(hp) * dpf`, minus
/// the same sum for the opponent. Exactly antisymmetric in the player.
pub fn ltd2<F: Real>(state: &GameState, player: Player) -> F {
    let side = |p: Player| -> F {
        let mut sum = F::zero();
        for u in state.units_of(p) {
            sum = sum + from_i32::<F>(u.hp).sqrt() * dpf::<F>(state.kind_of(u));
        }
        sum
    };
    side(player) - side(player.opponent())
}

/// Terminal flag plus utility: `Some(ltd2)` for `player` when the state is
/// terminal, `None` otherwise.
pub fn terminal_value<F: Real>(state: &GameState, player: Player) -> Option<F> {
    if state.is_terminal() {
        Some(ltd2(state, player))
    } else {
        None
    }
}

/// Ready units of `player` in ascending id order.
pub fn ready_units(state: &GameState, player: Player) -> Vec<UnitId> {
    state
        .units_of(player)
        .filter(|u| state.is_ready(u))
        .map(|u| u.id)
        .collect()
}

fn displacement(mv: Move, step: i32) -> Option<(i32, i32)> {
    match mv {
        Move::Up => Some((0, -step)),
        Move::Down => Some((0, step)),
        Move::Left => Some((-step, 0)),
        Move::Right => Some((step, 0)),
        _ => None,
    }
}

/// Range predicate on absolute center deltas.
///
/// Ranged: Euclidean center distance within `range` plus the target's larger
/// half-extent. Melee: bounding boxes within `MELEE_REACH` on both axes.
pub(crate) fn range_check(ak: &UnitKind, tk: &UnitKind, dx: i64, dy: i64) -> bool {
    if ak.range > 0 {
        let reach = (ak.range + tk.half_width().max(tk.half_height())) as i64;
        dx * dx + dy * dy <= reach * reach
    } else {
        let gap_x = dx - (ak.half_width() + tk.half_width()) as i64;
        let gap_y = dy - (ak.half_height() + tk.half_height()) as i64;
        gap_x <= MELEE_REACH as i64 && gap_y <= MELEE_REACH as i64
    }
}

/// Whether `attacker` can hit `target` from the current positions.
pub fn in_attack_range(state: &GameState, attacker: &Unit, target: &Unit) -> bool {
    let dx = (attacker.x - target.x).abs() as i64;
    let dy = (attacker.y - target.y).abs() as i64;
    range_check(state.kind_of(attacker), state.kind_of(target), dx, dy)
}

pub(crate) fn check_move_legal(state: &GameState, unit: &Unit, mv: Move) -> Result<(), EngineError> {
    let kind = state.kind_of(unit);
    match mv {
        Move::Wait => Ok(()),
        Move::Up | Move::Down | Move::Left | Move::Right => {
            let (dx, dy) = displacement(mv, kind.step()).unwrap();
            if state.arena.contains(unit.x + dx, unit.y + dy, kind) {
                Ok(())
            } else {
                Err(EngineError::IllegalMove { unit: unit.id, mv, why: "leaves the arena" })
            }
        }
        Move::Attack(target_id) => {
            if !state.weapon_ready(unit) {
                return Err(EngineError::IllegalMove { unit: unit.id, mv, why: "weapon on cooldown" });
            }
            let target = state
                .unit(target_id)
                .ok_or(EngineError::IllegalMove { unit: unit.id, mv, why: "target eliminated" })?;
            if target.owner == unit.owner {
                return Err(EngineError::IllegalMove { unit: unit.id, mv, why: "target is friendly" });
            }
            if !in_attack_range(state, unit, target) {
                return Err(EngineError::IllegalMove { unit: unit.id, mv, why: "target out of range" });
            }
            Ok(())
        }
    }
}

fn ready_unit(state: &GameState, unit_id: UnitId) -> Result<&Unit, EngineError> {
    let unit = state.unit(unit_id).ok_or(EngineError::UnknownUnit(unit_id))?;
    if !state.is_ready(unit) {
        return Err(EngineError::UnitNotReady(unit_id, unit.ready_frame));
    }
    Ok(unit)
}

/// Legal moves of a living, ready unit, in canonical order: in-bounds
/// directions, `Wait`, then attacks on living enemies in range (weapon
/// permitting). Never empty: `Wait` is always legal.
pub fn legal_moves(state: &GameState, unit_id: UnitId) -> Result<Vec<Move>, EngineError> {
    let unit = ready_unit(state, unit_id)?;
    let mut moves = Vec::with_capacity(6);
    for mv in [Move::Up, Move::Down, Move::Left, Move::Right] {
        if check_move_legal(state, unit, mv).is_ok() {
            moves.push(mv);
        }
    }
    moves.push(Move::Wait);
    if state.weapon_ready(unit) {
        for target in state.units_of(unit.owner.opponent()) {
            if in_attack_range(state, unit, target) {
                moves.push(Move::Attack(target.id));
            }
        }
    }
    Ok(moves)
}

/// Checks a single move for a ready unit without building the full move set.
pub fn is_move_legal(state: &GameState, unit_id: UnitId, mv: Move) -> Result<(), EngineError> {
    let unit = ready_unit(state, unit_id)?;
    check_move_legal(state, unit, mv)
}

fn validate_action(
    state: &GameState,
    player: Player,
    action: &PlayerAction,
) -> Result<(), EngineError> {
    // walk the sorted action entries in lockstep with the ready units
    let mut k = 0;
    for unit in state.units_of(player) {
        if !state.is_ready(unit) {
            continue;
        }
        match action.at(k) {
            Some((id, mv)) if id == unit.id => {
                check_move_legal(state, unit, mv)?;
                k += 1;
            }
            _ => return Err(EngineError::ActionMismatch { player, unit: unit.id }),
        }
    }
    if k != action.len() {
        let unit = action.at(k).map(|(id, _)| id).unwrap_or(UnitId(u32::MAX));
        return Err(EngineError::ActionMismatch { player, unit });
    }
    Ok(())
}

/// Applies both players' actions simultaneously and advances the clock to
/// the next decision point.
///
/// Attack damage is resolved against pre-transition hit points, so mutual
/// kills are possible. Units at or below zero hp are removed. The new frame
/// is the minimum ready frame over living units, capped at `frame_cap`.
pub fn apply(
    state: &GameState,
    action_one: &PlayerAction,
    action_two: &PlayerAction,
) -> Result<GameState, EngineError> {
    if state.is_terminal() {
        return Err(EngineError::Terminal);
    }
    validate_action(state, Player::One, action_one)?;
    validate_action(state, Player::Two, action_two)?;
    Ok(apply_unchecked(state, action_one, action_two))
}

/// Transition without validation, for callers whose actions are legal by
/// construction (script-built playouts on non-terminal states).
pub(crate) fn apply_unchecked(
    state: &GameState,
    action_one: &PlayerAction,
    action_two: &PlayerAction,
) -> GameState {
    let mut next = state.clone();
    let mut damage: Vec<(UnitId, i32)> = Vec::new();
    for (unit_id, mv) in action_one.iter().chain(action_two.iter()) {
        let k = next.units.binary_search_by_key(&unit_id, |u| u.id).unwrap();
        let kind = state.kind_of(&next.units[k]);
        let (kind_step, kind_cd, kind_damage) = (kind.step(), kind.cooldown, kind.damage);
        let unit = &mut next.units[k];
        match mv {
            Move::Wait => unit.ready_frame = state.frame + WAIT_FRAMES,
            Move::Up | Move::Down | Move::Left | Move::Right => {
                let (dx, dy) = displacement(mv, kind_step).unwrap();
                unit.x += dx;
                unit.y += dy;
                unit.ready_frame = state.frame + MOVE_FRAMES;
            }
            Move::Attack(target) => {
                unit.ready_frame = state.frame + ATTACK_FRAMES;
                unit.cooldown_frame = state.frame + kind_cd;
                match damage.iter_mut().find(|(t, _)| *t == target) {
                    Some((_, total)) => *total += kind_damage,
                    None => damage.push((target, kind_damage)),
                }
            }
        }
    }
    for (target, total) in damage {
        if let Ok(k) = next.units.binary_search_by_key(&target, |u| u.id) {
            next.units[k].hp -= total;
        }
    }
    next.units.retain(|u| u.hp > 0);

    let min_ready = next.units.iter().map(|u| u.ready_frame).min().unwrap_or(state.frame + 1);
    next.frame = min_ready.min(next.frame_cap);
    debug_assert!(next.frame > state.frame, "clock must advance");
    next
}
