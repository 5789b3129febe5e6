//! Shared builders for integration tests.

use std::cell::Cell;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skirm_core::engine::{Arena, GameState, KindId, Player, StatTable, Unit, UnitId, UnitKind};
use skirm_core::search::Evaluator;

pub fn melee_kind() -> UnitKind {
    UnitKind {
        name: "rat".into(),
        alias: None,
        hp0: 35,
        damage: 5,
        cooldown: 8,
        range: 0,
        speed: 5,
        width: 16,
        height: 16,
    }
}

pub fn gun_kind() -> UnitKind {
    UnitKind {
        name: "gun".into(),
        alias: None,
        hp0: 40,
        damage: 6,
        cooldown: 10,
        range: 120,
        speed: 4,
        width: 16,
        height: 16,
    }
}

/// Corridor one melee unit tall: only L/R/W (plus attacks) are ever legal.
/// Unit ids count up from 0 in the order given, player One first.
pub fn corridor(length: i32, xs_one: &[i32], xs_two: &[i32]) -> GameState {
    let table = Arc::new(StatTable::from_kinds(vec![melee_kind()]));
    let mut units = Vec::new();
    let mut id = 0;
    for &x in xs_one {
        units.push(Unit::new(UnitId(id), Player::One, KindId(0), x, 8, 35));
        id += 1;
    }
    for &x in xs_two {
        units.push(Unit::new(UnitId(id), Player::Two, KindId(0), x, 8, 35));
        id += 1;
    }
    GameState::new(Arena::new(length, 16), 600, table, units).unwrap()
}

/// Random small state on the builtin kinds: 1..=3 units per side, random
/// positions and health, everyone ready. Deterministic in the seed.
pub fn random_small_state(seed: u64) -> GameState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = Arc::new(StatTable::builtin());
    let arena = Arena::new(600, 400);
    let mut units = Vec::new();
    let mut id = 0u32;
    for player in [Player::One, Player::Two] {
        let count = rng.gen_range(1..=3);
        for _ in 0..count {
            let kind = KindId(rng.gen_range(0..table.kinds().len() as u16));
            let k = table.get(kind).unwrap();
            let x = rng.gen_range(k.half_width()..=arena.width - k.half_width());
            let y = rng.gen_range(k.half_height()..=arena.height - k.half_height());
            let hp = rng.gen_range(1..=k.hp0);
            units.push(Unit::new(UnitId(id), player, kind, x, y, hp));
            id += 1;
        }
    }
    GameState::new(arena, 600, table, units).unwrap()
}

/// Open-arena skirmish with `per_side` units per side on the builtin kinds,
/// arranged in facing columns. Deterministic in the seed.
pub fn skirmish(per_side: usize, kinds: &[&str], seed: u64) -> GameState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = Arc::new(StatTable::builtin());
    let arena = Arena::new(1280, 780);
    let mut units = Vec::new();
    let mut id = 0u32;
    for (player, base_x) in [(Player::One, 860), (Player::Two, 420)] {
        for i in 0..per_side {
            let kind = table.id_by_name(kinds[i % kinds.len()]).unwrap();
            let k = table.get(kind).unwrap();
            let x = base_x + rng.gen_range(0..=32) * if player == Player::One { 1 } else { -1 };
            let y = 120 + (i as i32 % 10) * 60 + rng.gen_range(0..=16);
            units.push(Unit::new(UnitId(id), player, kind, x, y, k.hp0));
            id += 1;
        }
    }
    GameState::new(arena, 3000, table, units).unwrap()
}

/// Two formations already inside weapon range, with every other unit
/// reloading, so NOKAV and Kiter genuinely disagree on most units.
pub fn engaged_skirmish(per_side: usize, seed: u64) -> GameState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = Arc::new(StatTable::builtin());
    let arena = Arena::new(1280, 780);
    let kinds = ["dg", "mr"];
    let mut units = Vec::new();
    let mut id = 0u32;
    for (player, base_x) in [(Player::One, 700), (Player::Two, 580)] {
        for i in 0..per_side {
            let kind = table.id_by_name(kinds[i % kinds.len()]).unwrap();
            let k = table.get(kind).unwrap();
            let x = base_x + rng.gen_range(-8..=8);
            let y = 200 + (i as i32 % 8) * 50 + rng.gen_range(0..=12);
            let mut unit = Unit::new(UnitId(id), player, kind, x, y, k.hp0);
            if i % 2 == 1 {
                unit.cooldown_frame = 30;
            }
            units.push(unit);
            id += 1;
        }
    }
    GameState::new(arena, 3000, table, units).unwrap()
}

/// Playout evaluator that counts its calls.
pub struct CountingEval {
    pub steps: u32,
    pub calls: Cell<u64>,
}

impl CountingEval {
    pub fn new(steps: u32) -> CountingEval {
        CountingEval { steps, calls: Cell::new(0) }
    }
}

impl Evaluator<f64> for CountingEval {
    fn evaluate(&self, state: &GameState, player: Player) -> f64 {
        self.calls.set(self.calls.get() + 1);
        skirm_core::search::evaluate(state, player, self.steps)
    }
}
