//! Scenario generation, agents, match and tournament execution, statistics,
//! replays, and the `skirm` command-line interface.

pub mod agent;
pub mod bench;
pub mod cli;
pub mod config;
pub mod match_runner;
pub mod scenario;
pub mod tournament;

pub use agent::{Agent, AgentConfig};
pub use config::{BudgetSpec, HarnessConfig};
pub use match_runner::{play_state, run_match, verify_record, MatchRecord, Outcome};
pub use scenario::{generate_scenario, tiny_instance, ScenarioConfig};
pub use tournament::{run_tournament, TournamentConfig, TournamentReport};

/// splitmix64 over a part list, used to derive independent seeds from a
/// master seed so parallel execution never changes results.
pub fn mix_seed(parts: &[u64]) -> u64 {
    let mut state = 0x9e3779b97f4a7c15u64;
    for &p in parts {
        state = state.wrapping_add(p).wrapping_mul(0xbf58476d1ce4e5b9);
        state ^= state >> 31;
        state = state.wrapping_mul(0x94d049bb133111eb);
        state ^= state >> 27;
    }
    state
}
