//! Deterministic multi-unit combat engine with script-induced action
//! abstractions (uniform and asymmetric), a family of real-time search
//! algorithms built on them, and a brute-force game-value oracle for
//! verifying the abstraction guarantees on tiny matches.
//!
//! Modules:
//! - [`engine`]: states, units, moves, simultaneous durative transitions,
//!   terminal detection, and the LTD2 utility.
//! - [`scripts`]: the NOKAV and Kiter unit policies behind a common
//!   interface, plus the shared no-overkill damage ledger.
//! - [`abstraction`]: script-induced move sets, uniform/asymmetric action
//!   enumeration, and the AV+/AV-/R unrestricted-unit selection strategies.
//! - [`search`]: playout evaluation, PGS, SSS, GAS, alpha-beta over
//!   move-fixed trees, and the two-step GAB/SAB families.
//! - [`oracle`]: exact zero-sum matrix-game solving and backward-induction
//!   game values under each abstraction.
//!
//! Evaluation math is generic over the scalar type via [`real::Real`];
//! [`Value`] is the concrete alias used by default.

pub mod abstraction;
pub mod engine;
pub mod oracle;
pub mod real;
pub mod scripts;
pub mod search;

/// Default scalar for all evaluation math (LTD2, playout values, game values).
pub type Value = f64;

pub use engine::{
    apply, dpf, legal_moves, ltd2, ready_units, terminal_value, Arena, EngineError, GameState,
    KindId, Move, Player, PlayerAction, StatTable, Unit, UnitId, UnitKind,
};
pub use scripts::{script_action, DamageLedger, Portfolio, Script};
