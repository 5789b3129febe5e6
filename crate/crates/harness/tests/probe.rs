use std::sync::Arc;
use std::time::Duration;
use skirm_core::engine::{Player, StatTable, ready_units};
use skirm_core::scripts::{script_action, Script, Portfolio};
use skirm_core::search::*;
use skirm_core::abstraction::{SelectionState, SelectionStrategy};
use skirm_harness::{generate_scenario, ScenarioConfig};

#[test]
fn probe_gab_steps() {
    let table = Arc::new(StatTable::builtin());
    let cfg = ScenarioConfig::from_preset("zl8").unwrap().with_seed(1);
    let mut state = generate_scenario(&cfg, &table).unwrap();
    let eval = PlayoutEvaluator::default();
    let mut ran = 0; let mut chose = 0; let mut total = 0; let mut pgs_evals = 0u64; let mut total_evals = 0u64;
    // walk the match with gab vs pgs at 40ms
    let mut sel = SelectionState::new(SelectionStrategy::MoreAttackValue, 4, 9);
    for _ in 0..60 {
        if state.is_terminal() { break; }
        if !ready_units(&state, Player::One).is_empty() {
            let mut t = BudgetTracker::new(SearchBudget::WallClock(Duration::from_millis(40)));
            let r = gab::<f64, _>(&state, Player::One, &Portfolio::default(), &mut t, &eval, &mut sel, None).unwrap();
            total += 1;
            if r.ran_second_step { ran += 1; }
            if r.chose_second { chose += 1; }
            pgs_evals += (r.first.remaining == t.remaining()) as u64;
            total_evals += t.evals_used();
            // play it + opponent nokav-ish pgs
            let mut t2 = BudgetTracker::new(SearchBudget::WallClock(Duration::from_millis(40)));
            let opp = if ready_units(&state, Player::Two).is_empty() { skirm_core::engine::PlayerAction::empty() }
                      else { pgs::<f64, _>(&state, Player::Two, &Portfolio::default(), &mut t2, &eval).unwrap().action };
            state = skirm_core::engine::apply(&state, &r.action, &opp).unwrap();
        } else {
            let opp = if ready_units(&state, Player::Two).is_empty() { skirm_core::engine::PlayerAction::empty() }
                      else { script_action(&state, Player::Two, Script::Nokav) };
            state = skirm_core::engine::apply(&state, &skirm_core::engine::PlayerAction::empty(), &opp).unwrap();
        }
    }
    println!("decisions {total} ran_second {ran} chose_second {chose} avg_evals {}", total_evals / total.max(1));
}
