//! Match runner, record replay, and tournament behavior.

use std::sync::Arc;

use skirm_core::engine::{Arena, GameState, Player, StatTable, Unit, UnitId};
use skirm_harness::agent::AgentConfig;
use skirm_harness::config::TournamentSection;
use skirm_harness::match_runner::{outcome_of, play_state, summarize, Outcome};
use skirm_harness::tournament::TournamentConfig;
use skirm_harness::{
    generate_scenario, mix_seed, run_match, run_tournament, verify_record, Agent, BudgetSpec,
    MatchRecord, ScenarioConfig,
};

fn table() -> Arc<StatTable> {
    Arc::new(StatTable::builtin())
}

fn agent(spec: &str, seed: u64) -> Agent {
    Agent::build(&AgentConfig::from_spec(spec), seed).unwrap()
}

fn fast_agent(spec: &str, seed: u64) -> Agent {
    let mut cfg = AgentConfig::from_spec(spec);
    cfg.playout_steps = 30;
    Agent::build(&cfg, seed).unwrap()
}

#[test]
fn mirror_nokav_match_is_a_draw_by_mutual_elimination() {
    let t = table();
    let mut cfg = ScenarioConfig::from_preset("zl2").unwrap().with_seed(5);
    cfg.placement_jitter = 0;
    let mut one = agent("script:nokav", 1);
    let mut two = agent("script:nokav", 2);
    let r = run_match(&mut one, &mut two, &cfg, &t, BudgetSpec::nodecount(10), None).unwrap();
    assert_eq!(r.outcome, Outcome::Draw);
    assert_eq!(r.final_ltd2, 0.0);
    // frozen from the deterministic reference run
    assert_eq!(r.final_frame, 403);
    assert_eq!(r.decisions.len(), 196);
    assert!(r.final_units.is_empty());
}

#[test]
fn empty_enemy_army_wins_immediately() {
    let t = table();
    let kind = t.id_by_name("zl").unwrap();
    let state = GameState::new(
        Arena::new(400, 400),
        1000,
        Arc::clone(&t),
        vec![Unit::new(UnitId(0), Player::One, kind, 200, 200, 160)],
    )
    .unwrap();
    let mut one = agent("gab", 1);
    let mut two = agent("gab", 2);
    let (decisions, forfeited, final_state) =
        play_state(&mut one, &mut two, state, BudgetSpec::nodecount(10), None).unwrap();
    assert!(decisions.is_empty());
    assert!(forfeited.is_none());
    let v = skirm_core::ltd2::<f64>(&final_state, Player::One);
    assert_eq!(outcome_of(None, v), Outcome::WinOne);
}

/// Clears the wall-clock diagnostics, which are the one nondeterministic
/// part of a record.
fn strip_timing(mut record: MatchRecord) -> MatchRecord {
    for d in &mut record.decisions {
        d.elapsed_us = 0;
    }
    record
}

#[test]
fn nodecount_matches_are_bit_identical() {
    let t = table();
    let cfg = ScenarioConfig::from_preset("zldg4").unwrap().with_seed(11);
    let run = || {
        let mut one = fast_agent("gab", 41);
        let mut two = fast_agent("pgs", 42);
        let record =
            run_match(&mut one, &mut two, &cfg, &t, BudgetSpec::nodecount(40), None).unwrap();
        strip_timing(record)
    };
    let a = run();
    let b = run();
    assert_eq!(a, b);
    assert_eq!(a.to_ndjson(), b.to_ndjson());
}

#[test]
fn records_replay_and_round_trip() {
    let t = table();
    for (spec_one, spec_two, seed) in
        [("gab", "pgs", 3u64), ("sab", "sss", 4), ("gas", "script:kiter", 5)]
    {
        let cfg = ScenarioConfig::from_preset("zldg4").unwrap().with_seed(seed);
        let mut one = fast_agent(spec_one, seed);
        let mut two = fast_agent(spec_two, seed + 100);
        let record =
            run_match(&mut one, &mut two, &cfg, &t, BudgetSpec::nodecount(30), None).unwrap();
        verify_record(&record, &t).unwrap();
        let parsed = MatchRecord::from_ndjson(&record.to_ndjson()).unwrap();
        assert_eq!(parsed, record);
        assert!(!summarize(&record).is_empty());
    }
}

#[test]
fn tampered_records_fail_verification() {
    let t = table();
    let cfg = ScenarioConfig::from_preset("zl2").unwrap().with_seed(9);
    let mut one = agent("script:nokav", 1);
    let mut two = agent("script:kiter", 2);
    let mut record =
        run_match(&mut one, &mut two, &cfg, &t, BudgetSpec::nodecount(10), None).unwrap();
    record.final_frame += 4;
    assert!(verify_record(&record, &t).is_err());
}

#[test]
fn forfeit_is_recorded_when_the_budget_is_blown() {
    let t = table();
    let cfg = ScenarioConfig::from_preset("zl2").unwrap().with_seed(2);
    let mut one = fast_agent("pgs", 1);
    let mut two = fast_agent("pgs", 2);
    // zero budget, zero grace: the very first decision overruns
    let budget = BudgetSpec::wallclock_ms(0);
    let record =
        run_match(&mut one, &mut two, &cfg, &t, budget, Some(std::time::Duration::ZERO))
            .unwrap();
    assert_eq!(record.forfeited_by, Some(Player::One));
    assert_eq!(record.outcome, Outcome::WinTwo);
    verify_record(&record, &t).unwrap();
}

#[test]
fn side_swap_with_mirrored_scenario_mirrors_the_outcome() {
    // placement is mirror-symmetric by construction, so swapping the agent
    // slots on the same seed plays the mirrored match
    let t = table();
    for seed in 0..8u64 {
        let cfg = ScenarioConfig::from_preset("zldg4").unwrap().with_seed(seed);
        let play = |a: &str, b: &str| {
            let mut one = agent(a, 7);
            let mut two = agent(b, 7);
            run_match(&mut one, &mut two, &cfg, &t, BudgetSpec::nodecount(10), None).unwrap()
        };
        let fwd = play("script:nokav", "script:kiter");
        let rev = play("script:kiter", "script:nokav");
        let mirrored = match fwd.outcome {
            Outcome::WinOne => Outcome::WinTwo,
            Outcome::WinTwo => Outcome::WinOne,
            Outcome::Draw => Outcome::Draw,
        };
        assert_eq!(rev.outcome, mirrored, "seed {seed}");
        assert_eq!(rev.final_ltd2, -fwd.final_ltd2, "seed {seed}");
        assert_eq!(rev.final_frame, fwd.final_frame, "seed {seed}");
    }
}

fn small_tournament(master_seed: u64, pairings: Option<Vec<[String; 2]>>) -> TournamentConfig {
    let mut agents = Vec::new();
    for spec in ["script:nokav", "script:kiter"] {
        agents.push(AgentConfig::from_spec(spec));
    }
    let section = TournamentSection {
        matches_per_pairing: 10,
        master_seed,
        workers: Some(2),
        pairings,
        forfeit_grace_ms: 50,
    };
    TournamentConfig::assemble(
        vec![ScenarioConfig::from_preset("zl2").unwrap(), ScenarioConfig::from_preset("zldg4").unwrap()],
        agents,
        section,
        BudgetSpec::nodecount(10),
    )
}

#[test]
fn tournament_totals_are_consistent_and_csv_is_stable() {
    let t = table();
    let cfg = small_tournament(77, None);
    let report = run_tournament(&cfg, &t).unwrap();
    assert_eq!(report.rows.len(), 2); // 2 scenarios x 1 pairing
    for row in &report.rows {
        assert_eq!(row.matches, 10);
        assert_eq!(row.errors, 0);
        assert!(row.wins_a + row.draws <= row.matches);
        let implied = (row.wins_a as f64 + 0.5 * row.draws as f64) / row.matches as f64;
        assert_eq!(row.rate_a, implied);
    }
    let csv = report.to_csv();
    assert!(csv.starts_with("scenario,agent_a,agent_b,matches,wins_a,draws,rate_a\n"));
    assert_eq!(csv.lines().count(), 3);

    // byte-identical on a rerun with the same master seed
    let again = run_tournament(&cfg, &t).unwrap();
    assert_eq!(again.to_csv(), csv);

    // worker count must not change results
    std::env::set_var("SKIRM_WORKERS", "1");
    let serial = run_tournament(&cfg, &t).unwrap();
    std::env::remove_var("SKIRM_WORKERS");
    assert_eq!(serial.to_csv(), csv);
}

#[test]
fn self_play_rate_is_near_half() {
    let t = table();
    let mut cfg = small_tournament(123, Some(vec![["a".into(), "b".into()]]));
    // the same decision procedure under two names
    cfg.agents = vec![
        AgentConfig { name: Some("a".into()), ..AgentConfig::from_spec("script:nokav") },
        AgentConfig { name: Some("b".into()), ..AgentConfig::from_spec("script:nokav") },
    ];
    cfg.matches_per_pairing = 20;
    let report = run_tournament(&cfg, &t).unwrap();
    let rate = report.rate("a", "b").unwrap();
    assert!((rate - 0.5).abs() <= 0.2, "self-play rate {rate}");
}

#[test]
fn aggregated_rate_handles_orientation() {
    let t = table();
    let cfg = small_tournament(5, None);
    let report = run_tournament(&cfg, &t).unwrap();
    let ab = report.rate("script:nokav", "script:kiter").unwrap();
    let ba = report.rate("script:kiter", "script:nokav").unwrap();
    assert!((ab + ba - 1.0).abs() < 1e-12);
    assert!(report.rate("script:nokav", "missing").is_none());
}

#[test]
fn unknown_pairing_agent_is_rejected() {
    let t = table();
    let cfg = small_tournament(1, Some(vec![["script:nokav".into(), "ghost".into()]]));
    assert!(run_tournament(&cfg, &t).is_err());
}

#[test]
fn per_match_seeds_are_independent_of_task_order() {
    // seeds derive from indices, not execution order
    let a = mix_seed(&[9, 0, 1, 2]);
    let b = mix_seed(&[9, 0, 1, 3]);
    assert_ne!(a, b);
    assert_eq!(a, mix_seed(&[9, 0, 1, 2]));
}
