//! Quick performance probes: evaluation throughput and decision latency.

use std::sync::Arc;
use std::time::{Duration, Instant};

use skirm_core::engine::{Player, StatTable};
use skirm_core::search::evaluate;
use skirm_core::Value;

use crate::agent::{Agent, AgentConfig};
use crate::config::BudgetSpec;
use crate::match_runner::run_match;
use crate::scenario::{generate_scenario, ScenarioConfig};

pub struct BenchReport {
    pub evals_per_sec: f64,
    pub latencies_us: Vec<u64>,
}

impl BenchReport {
    pub fn percentile_us(&self, p: f64) -> u64 {
        if self.latencies_us.is_empty() {
            return 0;
        }
        let mut sorted = self.latencies_us.clone();
        sorted.sort_unstable();
        let idx = ((sorted.len() as f64 - 1.0) * p / 100.0).round() as usize;
        sorted[idx]
    }

    pub fn histogram(&self) -> String {
        let buckets = [10_000u64, 20_000, 30_000, 40_000, 45_000, 60_000];
        let mut counts = vec![0usize; buckets.len() + 1];
        for &l in &self.latencies_us {
            let slot = buckets.iter().position(|&b| l < b).unwrap_or(buckets.len());
            counts[slot] += 1;
        }
        let mut out = String::new();
        let labels =
            ["< 10 ms", "< 20 ms", "< 30 ms", "< 40 ms", "< 45 ms", "< 60 ms", ">= 60 ms"];
        for (label, count) in labels.iter().zip(&counts) {
            out.push_str(&format!("{label:>9}  {count}\n"));
        }
        out
    }
}

/// Measures evaluation throughput on the scenario's start state and decision
/// latency over one recorded match.
pub fn bench(
    scenario: &ScenarioConfig,
    table: &Arc<StatTable>,
    agent_spec: &str,
    budget: BudgetSpec,
    playout_steps: u32,
) -> anyhow::Result<BenchReport> {
    let state = generate_scenario(scenario, table)?;

    let deadline = Instant::now() + Duration::from_secs(2);
    let mut evals = 0u64;
    while Instant::now() < deadline {
        std::hint::black_box(evaluate::<Value>(&state, Player::One, playout_steps));
        evals += 1;
    }
    let evals_per_sec = evals as f64 / 2.0;

    let config = AgentConfig::from_spec(agent_spec);
    let mut one = Agent::build(&config, 1)?;
    let mut two = Agent::build(&config, 2)?;
    let record = run_match(&mut one, &mut two, scenario, table, budget, None)?;
    let latencies_us = record.decisions.iter().map(|d| d.elapsed_us).collect();
    Ok(BenchReport { evals_per_sec, latencies_us })
}
