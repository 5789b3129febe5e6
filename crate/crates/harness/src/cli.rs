//! The `skirm` command line: run matches and tournaments, solve tiny
//! instances exactly, replay recorded matches, and benchmark.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skirm_core::engine::{Player, StatTable, UnitId};
use skirm_core::oracle::{theorem1_check, OracleError, DEFAULT_EXPLOSION_LIMIT};
use skirm_core::scripts::Portfolio;
use skirm_core::Value;

use crate::agent::{Agent, AgentConfig};
use crate::bench::bench;
use crate::config::{BudgetSpec, HarnessConfig, TournamentSection};
use crate::match_runner::{run_match, summarize, verify_record, MatchRecord};
use crate::scenario::{tiny_instance, ScenarioConfig};
use crate::tournament::{run_tournament, TournamentConfig};

#[derive(Parser)]
#[command(name = "skirm", about = "Multi-unit combat simulator and search lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one match between two agents and write its record.
    RunMatch(RunMatchArgs),
    /// Run a tournament and write a CSV of winning rates.
    RunTournament(RunTournamentArgs),
    /// Exactly solve tiny instances and check the abstraction ordering.
    SolveTiny(SolveTinyArgs),
    /// Pretty-print (and optionally verify) a recorded match.
    Replay(ReplayArgs),
    /// Measure evaluation throughput and decision latency.
    Bench(BenchArgs),
}

#[derive(Args)]
struct CommonOpts {
    /// Config file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Alternative unit stat table (TOML).
    #[arg(long)]
    kinds: Option<PathBuf>,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RunMatchArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Two comma-separated agent specs, e.g. `gab,pgs`.
    #[arg(long)]
    agents: Option<String>,
    /// Scenario preset such as `zl8`, `zldg8`, `zldglgmr8`.
    #[arg(long)]
    scenario: Option<String>,
    /// Wall-clock budget per decision in milliseconds.
    #[arg(long, conflicts_with = "budget_evals")]
    budget_ms: Option<u64>,
    /// Node-count budget per decision in evaluation calls.
    #[arg(long)]
    budget_evals: Option<u64>,
    /// Output record path (newline-delimited JSON).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Forfeit grace over the wall-clock budget, in milliseconds.
    #[arg(long, default_value_t = 50)]
    grace_ms: u64,
}

#[derive(Args)]
struct RunTournamentArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Matches per pairing per scenario (overrides the config).
    #[arg(long)]
    matches: Option<usize>,
    #[arg(long, conflicts_with = "budget_evals")]
    budget_ms: Option<u64>,
    #[arg(long)]
    budget_evals: Option<u64>,
    /// Worker threads (SKIRM_WORKERS overrides).
    #[arg(long)]
    workers: Option<usize>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveTinyArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Units per side; small mixed shapes when omitted.
    #[arg(long)]
    units: Option<usize>,
    /// Backward-induction depth in decision points.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Number of solved instances.
    #[arg(long, default_value_t = 100)]
    checks: usize,
    /// Unrestricted-unit count for the asymmetric abstraction.
    #[arg(long, default_value_t = 1)]
    unrestricted: usize,
    /// Joint-action explosion limit per node.
    #[arg(long, default_value_t = DEFAULT_EXPLOSION_LIMIT)]
    limit: u128,
}

#[derive(Args)]
struct ReplayArgs {
    /// Recorded match (newline-delimited JSON).
    record: PathBuf,
    /// Re-simulate and check the record reproduces its final state.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    kinds: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long, default_value = "zl50")]
    scenario: String,
    #[arg(long, default_value = "gab")]
    agent: String,
    #[arg(long, default_value_t = 40)]
    budget_ms: u64,
}

/// Entry point; returns the process exit code.
pub fn run<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::RunMatch(args) => cmd_run_match(args),
        Command::RunTournament(args) => cmd_run_tournament(args),
        Command::SolveTiny(args) => cmd_solve_tiny(args),
        Command::Replay(args) => cmd_replay(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> anyhow::Result<HarnessConfig> {
    match path {
        None => Ok(HarnessConfig::default()),
        Some(p) => HarnessConfig::from_path(p).map_err(|e| anyhow!(e)),
    }
}

fn load_table(flag: &Option<PathBuf>, config: &HarnessConfig) -> anyhow::Result<Arc<StatTable>> {
    let path = flag.clone().or_else(|| config.kinds_file.clone().map(PathBuf::from));
    match path {
        None => Ok(Arc::new(StatTable::builtin())),
        Some(p) => {
            let text = std::fs::read_to_string(&p)
                .with_context(|| format!("reading stat table {}", p.display()))?;
            Ok(Arc::new(StatTable::from_toml(&text)?))
        }
    }
}

fn budget_from_flags(
    ms: Option<u64>,
    evals: Option<u64>,
    config: &HarnessConfig,
) -> BudgetSpec {
    match (ms, evals) {
        (Some(ms), _) => BudgetSpec::wallclock_ms(ms),
        (None, Some(evals)) => BudgetSpec::nodecount(evals),
        (None, None) => config.budget.unwrap_or_default(),
    }
}

fn resolve_scenario(
    name: &Option<String>,
    config: &HarnessConfig,
) -> anyhow::Result<ScenarioConfig> {
    if let Some(name) = name {
        return ScenarioConfig::from_preset(name)
            .ok_or_else(|| anyhow!("unknown scenario preset `{name}`"));
    }
    if let Some(s) = &config.scenario {
        return Ok(s.clone());
    }
    if let Some(s) = config.scenarios.first() {
        return Ok(s.clone());
    }
    Ok(ScenarioConfig::from_preset("zl8").unwrap())
}

fn cmd_run_match(args: RunMatchArgs) -> anyhow::Result<i32> {
    let config = load_config(&args.common.config)?;
    let table = load_table(&args.kinds_from_common(), &config)?;
    let budget = budget_from_flags(args.budget_ms, args.budget_evals, &config);
    let scenario = resolve_scenario(&args.scenario, &config)?.with_seed(args.common.seed);

    let agent_configs: Vec<AgentConfig> = match &args.agents {
        Some(list) => {
            let parts: Vec<&str> = list.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                bail!("--agents expects exactly two comma-separated specs");
            }
            parts
                .iter()
                .map(|spec| {
                    config
                        .agents
                        .iter()
                        .find(|a| a.display_name() == *spec)
                        .cloned()
                        .unwrap_or_else(|| AgentConfig::from_spec(spec))
                })
                .collect()
        }
        None if config.agents.len() >= 2 => config.agents[..2].to_vec(),
        None => bail!("pass --agents or a config with at least two agents"),
    };

    let seed = args.common.seed;
    let mut one = Agent::build(&agent_configs[0], crate::mix_seed(&[seed, 2]))?;
    let mut two = Agent::build(&agent_configs[1], crate::mix_seed(&[seed, 3]))?;
    let grace = budget
        .is_wallclock()
        .then(|| std::time::Duration::from_millis(args.grace_ms));
    let record = run_match(&mut one, &mut two, &scenario, &table, budget, grace)?;

    let out = args.out.unwrap_or_else(|| {
        PathBuf::from(format!("match-{}-{}-{}.jsonl", one.name(), two.name(), seed))
    });
    std::fs::write(&out, record.to_ndjson())
        .with_context(|| format!("writing {}", out.display()))?;
    println!("{}", summarize(&record));
    println!("record: {}", out.display());
    Ok(0)
}

impl RunMatchArgs {
    fn kinds_from_common(&self) -> Option<PathBuf> {
        self.common.kinds.clone()
    }
}

/// Default desk-scale tournament: the five smallest standard scenarios and
/// the standard pairings.
fn desk_tournament(seed: u64) -> TournamentConfig {
    let agents: Vec<AgentConfig> =
        ["gab", "pgs", "sab", "sss", "gab_p", "gas"].iter().map(|s| AgentConfig::from_spec(s)).collect();
    let section = TournamentSection {
        matches_per_pairing: 40,
        master_seed: seed,
        workers: None,
        pairings: Some(vec![
            ["gab".into(), "pgs".into()],
            ["sab".into(), "sss".into()],
            ["gab".into(), "gab_p".into()],
            ["gas".into(), "pgs".into()],
            ["gas".into(), "gab".into()],
        ]),
        forfeit_grace_ms: 50,
    };
    TournamentConfig::assemble(
        ScenarioConfig::desk_presets(),
        agents,
        section,
        BudgetSpec::default(),
    )
}

fn cmd_run_tournament(args: RunTournamentArgs) -> anyhow::Result<i32> {
    let config = load_config(&args.common.config)?;
    let table = load_table(&args.common.kinds, &config)?;

    let mut tournament = if config.scenarios.is_empty() && config.agents.is_empty() {
        desk_tournament(args.common.seed)
    } else {
        if config.scenarios.is_empty() || config.agents.len() < 2 {
            bail!("config needs [[scenarios]] and at least two [[agents]]");
        }
        TournamentConfig::assemble(
            config.scenarios.clone(),
            config.agents.clone(),
            config.tournament.clone().unwrap_or_default(),
            config.budget.unwrap_or_default(),
        )
    };
    if args.common.seed != 0 {
        tournament.master_seed = args.common.seed;
    }
    if let Some(m) = args.matches {
        tournament.matches_per_pairing = m;
    }
    if args.budget_ms.is_some() || args.budget_evals.is_some() {
        tournament.budget = budget_from_flags(args.budget_ms, args.budget_evals, &config);
    }
    if args.workers.is_some() {
        tournament.workers = args.workers;
    }

    let report = run_tournament(&tournament, &table)?;
    let csv = report.to_csv();
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    let partial: Vec<&str> = report
        .rows
        .iter()
        .filter(|r| r.errors > 0)
        .map(|r| r.scenario.as_str())
        .collect();
    if !partial.is_empty() {
        eprintln!("warning: partial results (match errors) in: {}", partial.join(", "));
        return Ok(1);
    }
    Ok(0)
}

fn cmd_solve_tiny(args: SolveTinyArgs) -> anyhow::Result<i32> {
    let config = load_config(&args.common.config)?;
    let table = load_table(&args.common.kinds, &config)?;
    let portfolio = Portfolio::default();
    let mut held = 0usize;
    let mut checked = 0usize;
    let mut refused = 0usize;
    let mut seed = args.common.seed;
    while checked < args.checks {
        let state = tiny_instance(seed, args.units, &table);
        let mut rng = ChaCha8Rng::seed_from_u64(crate::mix_seed(&[seed, 77]));
        let own: Vec<UnitId> = state.units_of(Player::One).map(|u| u.id).collect();
        let mut unrestricted: BTreeSet<UnitId> = BTreeSet::new();
        while unrestricted.len() < args.unrestricted.min(own.len()) {
            unrestricted.insert(own[rng.gen_range(0..own.len())]);
        }
        seed = seed.wrapping_add(1);
        match theorem1_check::<Value>(
            &state,
            Player::One,
            &portfolio,
            &unrestricted,
            args.depth,
            args.limit,
        ) {
            Ok(report) => {
                checked += 1;
                if report.holds {
                    held += 1;
                }
                println!(
                    "{}",
                    serde_json::json!({
                        "seed": seed - 1,
                        "units": state.units().len(),
                        "unrestricted": unrestricted.len(),
                        "depth": args.depth,
                        "v_uniform": report.v_uniform,
                        "v_asymmetric": report.v_asymmetric,
                        "v_full": report.v_full,
                        "holds": report.holds,
                    })
                );
            }
            Err(OracleError::ActionExplosion { rows, cols, joint, limit }) => {
                refused += 1;
                eprintln!(
                    "seed {}: refused ({rows} x {cols} = {joint} joint actions > {limit})",
                    seed - 1
                );
                if refused > 50 * (args.checks + 1) {
                    bail!("too many refusals; lower --units or raise --limit");
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
    println!("{held}/{checked} theorem1 holds");
    Ok(if held == checked { 0 } else { 1 })
}

fn cmd_replay(args: ReplayArgs) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&args.record)
        .with_context(|| format!("reading {}", args.record.display()))?;
    let record = MatchRecord::from_ndjson(&text)?;
    let table = load_table(&args.kinds, &HarnessConfig::default())?;

    println!(
        "{} vs {} on {} (seed {})",
        record.agents[0], record.agents[1], record.scenario.name, record.scenario.seed
    );
    for d in &record.decisions {
        let moves: Vec<String> =
            d.action.iter().map(|(u, m)| format!("u{}:{:?}", u.0, m)).collect();
        println!(
            "frame {:>5}  {:?}  {:>8.3}  [{}]",
            d.frame,
            d.player,
            d.value.unwrap_or(f64::NAN),
            moves.join(" ")
        );
    }
    println!("{}", summarize(&record));

    if args.verify {
        verify_record(&record, &table)?;
        println!("replay verified: reconstruction matches the logged final state");
    }
    Ok(0)
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<i32> {
    let config = load_config(&args.common.config)?;
    let table = load_table(&args.common.kinds, &config)?;
    let scenario = ScenarioConfig::from_preset(&args.scenario)
        .ok_or_else(|| anyhow!("unknown scenario preset `{}`", args.scenario))?
        .with_seed(args.common.seed);
    let report = bench(
        &scenario,
        &table,
        &args.agent,
        BudgetSpec::wallclock_ms(args.budget_ms),
        100,
    )?;
    println!("evals/sec ({}): {:.0}", scenario.name, report.evals_per_sec);
    println!(
        "decision latency over {} decisions (agent {}, {} ms budget):",
        report.latencies_us.len(),
        args.agent,
        args.budget_ms
    );
    print!("{}", report.histogram());
    println!("p50 {:.1} ms", report.percentile_us(50.0) as f64 / 1000.0);
    println!("p99 {:.1} ms", report.percentile_us(99.0) as f64 / 1000.0);
    Ok(0)
}
