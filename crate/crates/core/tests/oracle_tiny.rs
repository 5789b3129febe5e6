//! Randomized tiny-instance checks of the abstraction value ordering and
//! the oracle-node subset chain.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{gun_kind, melee_kind};
use skirm_core::engine::{Arena, GameState, KindId, Player, StatTable, Unit, UnitId};
use skirm_core::oracle::{game_value, theorem1_check, OracleError};
use skirm_core::scripts::Portfolio;
use skirm_core::abstraction::AbstractionSpec;

/// Cramped corridor instance: melee sides of 1..=2 units (sometimes a lone
/// gunner), random positions, health, and reload timers.
pub fn tiny_instance(seed: u64) -> GameState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = Arc::new(StatTable::from_kinds(vec![melee_kind(), gun_kind()]));
    let arena = Arena::new(300, 16);
    let shapes = [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1)];
    let (n_one, n_two) = shapes[rng.gen_range(0..shapes.len())];
    let lone_gun = n_one == 1 && n_two == 1 && rng.gen_bool(0.3);
    let mut units = Vec::new();
    let mut id = 0u32;
    for (player, count) in [(Player::One, n_one), (Player::Two, n_two)] {
        for _ in 0..count {
            let kind = if lone_gun { KindId(1) } else { KindId(0) };
            let k = table.get(kind).unwrap();
            let x = rng.gen_range(k.half_width()..=arena.width - k.half_width());
            let hp = rng.gen_range(1..=k.hp0);
            let mut unit = Unit::new(UnitId(id), player, kind, x, 8, hp);
            if rng.gen_bool(0.3) {
                unit.cooldown_frame = rng.gen_range(1..=30);
            }
            units.push(unit);
            id += 1;
        }
    }
    GameState::new(arena, 400, table, units).unwrap()
}

#[test]
fn value_ordering_holds_on_random_tiny_instances() {
    let portfolio = Portfolio::default();
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 25 {
        seed += 1;
        let state = tiny_instance(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
        let unrestricted: BTreeSet<UnitId> = state
            .units_of(Player::One)
            .filter(|_| rng.gen_bool(0.5))
            .map(|u| u.id)
            .collect();
        match theorem1_check::<f64>(&state, Player::One, &portfolio, &unrestricted, 2, 512) {
            Ok(report) => {
                assert!(
                    report.holds,
                    "seed {seed}: uniform {} asym {} full {}",
                    report.v_uniform, report.v_asymmetric, report.v_full
                );
                checked += 1;
            }
            Err(OracleError::ActionExplosion { .. }) => continue,
            Err(other) => panic!("seed {seed}: {other}"),
        }
    }
}

#[test]
fn deeper_horizons_stay_ordered() {
    // same ordering at depth 3 on the very smallest instances
    let portfolio = Portfolio::default();
    let mut checked = 0;
    let mut seed = 1000u64;
    while checked < 5 {
        seed += 1;
        let state = tiny_instance(seed);
        if state.units().len() > 2 {
            continue;
        }
        let unrestricted: BTreeSet<UnitId> =
            state.units_of(Player::One).map(|u| u.id).take(1).collect();
        match theorem1_check::<f64>(&state, Player::One, &portfolio, &unrestricted, 3, 512) {
            Ok(report) => {
                assert!(report.holds, "seed {seed}");
                checked += 1;
            }
            Err(OracleError::ActionExplosion { .. }) => continue,
            Err(other) => panic!("seed {seed}: {other}"),
        }
    }
}

#[test]
fn player_swap_is_antisymmetric_on_tiny_instances() {
    // with both sides un-abstracted the game value for One is the negative
    // of the value for Two
    for seed in [3u64, 8, 21] {
        let state = tiny_instance(seed);
        let spec = AbstractionSpec::unabstracted();
        let one = game_value::<f64>(&state, Player::One, &spec, 2, 512);
        let two = game_value::<f64>(&state, Player::Two, &spec, 2, 512);
        match (one, two) {
            (Ok(a), Ok(b)) => {
                // both sides un-abstracted: the same zero-sum game
                assert!((a + b).abs() < 1e-6, "seed {seed}: {a} vs {b}");
            }
            (Err(OracleError::ActionExplosion { .. }), _)
            | (_, Err(OracleError::ActionExplosion { .. })) => continue,
            (Err(e), _) | (_, Err(e)) => panic!("seed {seed}: {e}"),
        }
    }
}
