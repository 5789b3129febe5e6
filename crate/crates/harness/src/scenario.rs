//! Scenario generation: mirrored formations in a walled arena, named
//! presets, and the cramped tiny instances the oracle can solve exactly.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use skirm_core::engine::{
    Arena, GameState, KindId, Player, StatTable, Unit, UnitId, DEFAULT_FRAME_CAP,
};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("unknown unit kind {0}")]
    UnknownKind(String),
    #[error("units per side ({units}) must divide evenly among {kinds} kinds")]
    UnevenSplit { units: usize, kinds: usize },
    #[error("arena too small for this placement ({0}); use a larger arena")]
    ArenaTooSmall(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// Placement and composition of one combat scenario. Both sides field the
/// same mix, mirrored across the vertical center line of the arena.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Display name, used in results tables.
    #[serde(default)]
    pub name: String,
    /// Unit kind names (or aliases), cycled over the units of each side.
    pub kinds: Vec<String>,
    pub units_per_side: usize,
    #[serde(default = "default_arena_width")]
    pub arena_width: i32,
    #[serde(default = "default_arena_height")]
    pub arena_height: i32,
    /// Maximum random offset (pixels) from the side's anchor position.
    #[serde(default = "default_jitter")]
    pub placement_jitter: i32,
    /// Pixels added to each side's distance from the center.
    #[serde(default = "default_separation")]
    pub separation_offset: i32,
    #[serde(default = "default_frame_cap")]
    pub frame_cap: i32,
    #[serde(default)]
    pub seed: u64,
}

fn default_arena_width() -> i32 {
    1280
}

fn default_arena_height() -> i32 {
    780
}

fn default_jitter() -> i32 {
    128
}

fn default_separation() -> i32 {
    220
}

fn default_frame_cap() -> i32 {
    DEFAULT_FRAME_CAP
}

impl ScenarioConfig {
    pub fn new(name: &str, kinds: &[&str], units_per_side: usize) -> ScenarioConfig {
        ScenarioConfig {
            name: name.to_string(),
            kinds: kinds.iter().map(|s| s.to_string()).collect(),
            units_per_side,
            arena_width: default_arena_width(),
            arena_height: default_arena_height(),
            placement_jitter: default_jitter(),
            separation_offset: default_separation(),
            frame_cap: default_frame_cap(),
            seed: 0,
        }
    }

    pub fn with_seed(&self, seed: u64) -> ScenarioConfig {
        ScenarioConfig { seed, ..self.clone() }
    }

    /// Parses compact preset names: kind codes followed by the per-side unit
    /// count, e.g. `zl8`, `dg50`, `zldg8`, `zldglg6`, `zldglgmr8`.
    pub fn from_preset(name: &str) -> Option<ScenarioConfig> {
        let lower = name.to_ascii_lowercase();
        let digits_at = lower.find(|c: char| c.is_ascii_digit())?;
        let (codes, count) = lower.split_at(digits_at);
        let units_per_side: usize = count.parse().ok()?;
        if codes.is_empty() || codes.len() % 2 != 0 {
            return None;
        }
        let kinds: Vec<&str> = (0..codes.len())
            .step_by(2)
            .map(|i| &codes[i..i + 2])
            .collect();
        if !kinds.iter().all(|k| ["zl", "dg", "lg", "mr"].contains(k)) {
            return None;
        }
        Some(ScenarioConfig::new(&lower, &kinds, units_per_side))
    }

    /// The five smallest standard combat configurations.
    pub fn desk_presets() -> Vec<ScenarioConfig> {
        ["zl8", "dg8", "zldg8", "zldglg6", "zldglgmr8"]
            .iter()
            .map(|n| ScenarioConfig::from_preset(n).unwrap())
            .collect()
    }
}

/// Generates the start state: each of player One's units at a seeded random
/// offset right of center, its mirror twin on the left, both pushed apart by
/// the separation offset. Deterministic in the seed.
pub fn generate_scenario(
    config: &ScenarioConfig,
    table: &Arc<StatTable>,
) -> Result<GameState, ScenarioError> {
    if config.kinds.is_empty() || config.units_per_side == 0 {
        return Err(ScenarioError::Invalid("kinds and units_per_side must be nonempty".into()));
    }
    if config.units_per_side % config.kinds.len() != 0 {
        return Err(ScenarioError::UnevenSplit {
            units: config.units_per_side,
            kinds: config.kinds.len(),
        });
    }
    let kind_ids: Vec<KindId> = config
        .kinds
        .iter()
        .map(|name| table.id_by_name(name).ok_or_else(|| ScenarioError::UnknownKind(name.clone())))
        .collect::<Result<_, _>>()?;

    let (max_w, max_h) = kind_ids.iter().fold((0, 0), |(w, h), id| {
        let k = table.get(*id).unwrap();
        (w.max(k.width), h.max(k.height))
    });
    let cx = config.arena_width / 2;
    let cy = config.arena_height / 2;
    let reach_x = config.separation_offset + config.placement_jitter + max_w / 2;
    let reach_y = config.placement_jitter + max_h / 2;
    if cx - reach_x < 0 || cx + reach_x > config.arena_width || cy - reach_y < 0
        || cy + reach_y > config.arena_height
    {
        return Err(ScenarioError::ArenaTooSmall(format!(
            "placement reaches {reach_x} x {reach_y} px from center in a {} x {} arena",
            config.arena_width, config.arena_height
        )));
    }
    let unit_area = 2 * config.units_per_side as i64 * (max_w as i64 * max_h as i64);
    if unit_area > config.arena_width as i64 * config.arena_height as i64 {
        return Err(ScenarioError::ArenaTooSmall(format!(
            "{} units of up to {max_w} x {max_h} px exceed the arena area",
            2 * config.units_per_side
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut units = Vec::with_capacity(2 * config.units_per_side);
    let n = config.units_per_side as u32;
    for i in 0..config.units_per_side {
        let kind = kind_ids[i % kind_ids.len()];
        let hp0 = table.get(kind).unwrap().hp0;
        let dx = if config.placement_jitter > 0 { rng.gen_range(0..=config.placement_jitter) } else { 0 };
        let dy = if config.placement_jitter > 0 {
            rng.gen_range(-config.placement_jitter..=config.placement_jitter)
        } else {
            0
        };
        let x_off = dx + config.separation_offset;
        units.push(Unit::new(UnitId(i as u32), Player::One, kind, cx + x_off, cy + dy, hp0));
        units.push(Unit::new(UnitId(n + i as u32), Player::Two, kind, cx - x_off, cy + dy, hp0));
    }
    GameState::new(
        Arena::new(config.arena_width, config.arena_height),
        config.frame_cap,
        Arc::clone(table),
        units,
    )
    .map_err(|e| ScenarioError::Invalid(e.to_string()))
}

/// Cramped corridor instance for the exact oracle: zergling sides in a
/// one-unit-tall corridor, random positions, health and reload timers.
/// `units_per_side` of `None` samples small asymmetric shapes.
pub fn tiny_instance(
    seed: u64,
    units_per_side: Option<usize>,
    table: &Arc<StatTable>,
) -> GameState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = table.id_by_name("lg").expect("builtin zergling");
    let k = table.get(kind).unwrap();
    let arena = Arena::new(300, k.height);
    let (n_one, n_two) = match units_per_side {
        Some(n) => (n, n),
        None => {
            let shapes = [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (1, 3)];
            shapes[rng.gen_range(0..shapes.len())]
        }
    };
    let mut units = Vec::new();
    let mut id = 0u32;
    for (player, count) in [(Player::One, n_one), (Player::Two, n_two)] {
        for _ in 0..count {
            let x = rng.gen_range(k.half_width()..=arena.width - k.half_width());
            let hp = rng.gen_range(1..=k.hp0);
            let mut unit = Unit::new(UnitId(id), player, kind, x, k.height / 2, hp);
            if rng.gen_bool(0.3) {
                unit.cooldown_frame = rng.gen_range(1..=20);
            }
            units.push(unit);
            id += 1;
        }
    }
    GameState::new(arena, 400, Arc::clone(table), units).unwrap()
}
