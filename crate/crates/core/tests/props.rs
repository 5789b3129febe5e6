//! Property tests: engine invariants under randomized playouts, script
//! legality, the no-overkill guarantee, and the abstraction subset chain.

mod common;

use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_small_state, skirmish};
use skirm_core::abstraction::{enumerate_actions, script_moves, AbstractionSpec};
use skirm_core::engine::{
    apply, in_attack_range, legal_moves, ltd2, ready_units, GameState, Move, Player, PlayerAction,
};
use skirm_core::scripts::{script_action, DamageLedger, Portfolio, Script};

fn start_state(seed: u64) -> GameState {
    if seed % 3 == 0 {
        skirmish(4 + (seed % 5) as usize, &["zl", "dg", "lg", "mr"], seed)
    } else {
        random_small_state(seed)
    }
}

fn random_action(state: &GameState, player: Player, rng: &mut ChaCha8Rng) -> PlayerAction {
    PlayerAction::from_moves(
        ready_units(state, player)
            .into_iter()
            .map(|u| {
                let moves = legal_moves(state, u).unwrap();
                (u, *moves.choose(rng).unwrap())
            })
            .collect(),
    )
}

/// Walks a random playout, calling `check` on every visited non-terminal
/// state. Mixes random legal actions with script actions.
fn random_playout(seed: u64, steps: usize, mut check: impl FnMut(&GameState)) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
    let mut state = start_state(seed);
    for _ in 0..steps {
        if state.is_terminal() {
            break;
        }
        check(&state);
        let pick = |s: &GameState, p: Player, rng: &mut ChaCha8Rng| {
            if rng.gen_bool(0.5) {
                random_action(s, p, rng)
            } else {
                let script = if rng.gen_bool(0.5) { Script::Nokav } else { Script::Kiter };
                script_action(s, p, script)
            }
        };
        let a = pick(&state, Player::One, &mut rng);
        let b = pick(&state, Player::Two, &mut rng);
        state = apply(&state, &a, &b).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn zero_sum_holds_exactly_along_playouts(seed in any::<u64>()) {
        random_playout(seed, 12, |s| {
            let one = ltd2::<f64>(s, Player::One);
            let two = ltd2::<f64>(s, Player::Two);
            assert!((one + two).abs() == 0.0, "zero-sum violated: {one} vs {two}");
        });
    }

    #[test]
    fn apply_is_deterministic_and_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = start_state(seed);
        for _ in 0..10 {
            if state.is_terminal() {
                break;
            }
            let a = random_action(&state, Player::One, &mut rng);
            let b = random_action(&state, Player::Two, &mut rng);
            let next = apply(&state, &a, &b).unwrap();
            let again = apply(&state.clone(), &a, &b).unwrap();
            prop_assert_eq!(next.units(), again.units());
            prop_assert_eq!(next.frame(), again.frame());
            prop_assert!(next.frame() > state.frame(), "clock must strictly advance");
            // hp bounds and no resurrection
            let old_ids: HashSet<_> = state.units().iter().map(|u| u.id).collect();
            for u in next.units() {
                prop_assert!(u.hp > 0);
                prop_assert!(old_ids.contains(&u.id), "unit reappeared");
            }
            // progress: someone is ready at the new decision point
            if !next.is_terminal() {
                prop_assert!(
                    !ready_units(&next, Player::One).is_empty()
                        || !ready_units(&next, Player::Two).is_empty()
                );
            }
            state = next;
        }
    }

    #[test]
    fn script_moves_are_always_legal(seed in any::<u64>()) {
        random_playout(seed, 10, |s| {
            for player in [Player::One, Player::Two] {
                for unit in ready_units(s, player) {
                    let legal = legal_moves(s, unit).unwrap();
                    for script in [Script::Nokav, Script::Kiter] {
                        let mv = script.choose(s, unit, &DamageLedger::new());
                        assert!(legal.contains(&mv), "{script:?} gave illegal {mv:?}");
                    }
                }
            }
        });
    }

    #[test]
    fn nokav_whole_actions_never_overkill(seed in any::<u64>()) {
        random_playout(seed, 10, |s| {
            for player in [Player::One, Player::Two] {
                let action = script_action(s, player, Script::Nokav);
                let mut committed = std::collections::HashMap::new();
                for (unit, mv) in action.iter() {
                    if let Move::Attack(target) = mv {
                        let hp = s.unit(target).unwrap().hp;
                        let before = *committed.get(&target).unwrap_or(&0);
                        assert!(before < hp, "attacker {unit:?} piles onto dead {target:?}");
                        *committed.entry(target).or_insert(0) +=
                            s.kind_of(s.unit(unit).unwrap()).damage;
                    }
                }
            }
        });
    }

    #[test]
    fn kiter_never_attacks_while_reloading(seed in any::<u64>()) {
        random_playout(seed, 10, |s| {
            for player in [Player::One, Player::Two] {
                for unit in ready_units(s, player) {
                    let u = s.unit(unit).unwrap();
                    let ranged = s.kind_of(u).range > 0;
                    let reloading = !s.weapon_ready(u);
                    let enemy_in_range =
                        s.units_of(player.opponent()).any(|e| in_attack_range(s, u, e));
                    if ranged && reloading && enemy_in_range {
                        let mv = Script::Kiter.choose(s, unit, &DamageLedger::new());
                        assert!(!matches!(mv, Move::Attack(_)));
                    }
                }
            }
        });
    }

    #[test]
    fn abstraction_chain_is_a_subset_chain(seed in any::<u64>()) {
        let state = random_small_state(seed);
        let portfolio = Portfolio::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for player in [Player::One, Player::Two] {
            let ready = ready_units(&state, player);
            if ready.is_empty() {
                continue;
            }
            // per-unit move-set inclusion
            for &unit in &ready {
                let scripted = script_moves(&state, unit, &portfolio);
                let legal = legal_moves(&state, unit).unwrap();
                prop_assert!(scripted.iter().all(|m| legal.contains(m)));
            }
            let unrestricted: BTreeSet<_> =
                ready.iter().filter(|_| rng.gen_bool(0.5)).copied().collect();
            let uniform = enumerate_actions(&state, player, &AbstractionSpec::uniform(portfolio.clone()));
            let asym = enumerate_actions(
                &state,
                player,
                &AbstractionSpec::asymmetric(portfolio.clone(), unrestricted),
            );
            let full = enumerate_actions(&state, player, &AbstractionSpec::unabstracted());
            let (uniform, asym, full) = (uniform.unwrap(), asym.unwrap(), full.unwrap());
            prop_assert!(full.action_count() <= 4096, "state too large for set check");
            let expect_uniform = uniform.action_count();
            let expect_asym = asym.action_count();
            let expect_full = full.action_count();
            let uniform: HashSet<PlayerAction> = uniform.collect();
            let asym: HashSet<PlayerAction> = asym.collect();
            let full: HashSet<PlayerAction> = full.collect();
            // counts equal products, no duplicates
            prop_assert_eq!(uniform.len() as u128, expect_uniform);
            prop_assert_eq!(asym.len() as u128, expect_asym);
            prop_assert_eq!(full.len() as u128, expect_full);
            prop_assert!(uniform.is_subset(&asym));
            prop_assert!(asym.is_subset(&full));
        }
    }
}
