//! Stat table loading: one record per unit kind from a TOML file.

use serde::Deserialize;

use super::{KindId, UnitKind};

/// Stat table shared by all units of a match.
#[derive(Clone, Debug, PartialEq)]
pub struct StatTable {
    kinds: Vec<UnitKind>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("stat table parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid stat table: {0}")]
    Invalid(String),
}

#[derive(Deserialize)]
struct StatFile {
    kinds: Vec<UnitKind>,
}

const BUILTIN: &str = include_str!("../../data/kinds.toml");

impl StatTable {
    /// Parses a TOML stat table and validates every record.
    pub fn from_toml(text: &str) -> Result<StatTable, ConfigError> {
        let file: StatFile = toml::from_str(text)?;
        StatTable::from_kinds_checked(file.kinds)
    }

    /// The default shipped table (zealot, dragoon, zergling, marine).
    pub fn builtin() -> StatTable {
        StatTable::from_toml(BUILTIN).expect("builtin stat table is valid")
    }

    pub fn from_kinds_checked(kinds: Vec<UnitKind>) -> Result<StatTable, ConfigError> {
        for k in &kinds {
            if k.hp0 < 1 {
                return Err(ConfigError::Invalid(format!("{}: hp0 must be >= 1", k.name)));
            }
            if k.speed < 1 {
                return Err(ConfigError::Invalid(format!("{}: speed must be >= 1", k.name)));
            }
            if k.damage < 0 || k.cooldown < 0 || k.range < 0 || k.width < 1 || k.height < 1 {
                return Err(ConfigError::Invalid(format!("{}: negative or zero-size stat", k.name)));
            }
        }
        for (i, a) in kinds.iter().enumerate() {
            for b in &kinds[i + 1..] {
                if a.name == b.name {
                    return Err(ConfigError::Invalid(format!("duplicate kind name {}", a.name)));
                }
            }
        }
        Ok(StatTable { kinds })
    }

    /// Builds a table without validation; intended for tests with ad-hoc kinds.
    pub fn from_kinds(kinds: Vec<UnitKind>) -> StatTable {
        StatTable { kinds }
    }

    pub fn get(&self, id: KindId) -> Option<&UnitKind> {
        self.kinds.get(id.0 as usize)
    }

    pub fn kinds(&self) -> &[UnitKind] {
        &self.kinds
    }

    /// Looks a kind up by name or alias (case-insensitive).
    pub fn id_by_name(&self, name: &str) -> Option<KindId> {
        let lower = name.to_ascii_lowercase();
        self.kinds
            .iter()
            .position(|k| {
                k.name == lower || k.alias.as_deref() == Some(lower.as_str())
            })
            .map(|i| KindId(i as u16))
    }
}
