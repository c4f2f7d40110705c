//! Experiment configuration: one JSON document drives a run, a
//! comparison, or a sweep. Every dynamics default can be overridden
//! globally or per algorithm, and the effective values are echoed into
//! each run's summary so results are self-describing.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use arena_core::dynamics::{Algorithm, DynamicsConfig};

use crate::gamesel::GameSelector;
use crate::{CliError, Result};

/// A full experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub game: GameSelector,
    pub algorithms: Vec<Algorithm>,
    /// Base dynamics settings; the per-run seed comes from `seeds`.
    #[serde(default)]
    pub dynamics: DynamicsConfig,
    /// Per-algorithm dynamics replacements (full configs).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub dynamics_overrides: BTreeMap<Algorithm, DynamicsConfig>,
    pub seeds: Vec<u64>,
    /// Compute the enumeration oracle when the game is small enough.
    #[serde(default = "default_true")]
    pub oracle: bool,
    /// Also write per-iteration sampled profiles next to each trace.
    #[serde(default)]
    pub emit_profiles: bool,
    /// Also write per-iteration action occupancy counts.
    #[serde(default)]
    pub emit_occupancy: bool,
    /// Axis specification; present only for sweep experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

fn default_true() -> bool {
    true
}

/// Which generator parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Players,
    Resources,
    Agents,
    Targets,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            Self::Players => "players",
            Self::Resources => "resources",
            Self::Agents => "agents",
            Self::Targets => "targets",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<usize>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config '{}': {e}", path.display())))?;
        let config: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad config '{}': {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(CliError::Config("at least one seed is required".into()));
        }
        if self.algorithms.is_empty() {
            return Err(CliError::Config("at least one algorithm is required".into()));
        }
        self.dynamics.validate()?;
        for config in self.dynamics_overrides.values() {
            config.validate()?;
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(CliError::Config("sweep needs at least one axis value".into()));
            }
            match (&self.game, sweep.axis) {
                (GameSelector::Resource(_), SweepAxis::Players | SweepAxis::Resources) => {}
                (GameSelector::Task(_), SweepAxis::Agents | SweepAxis::Targets) => {}
                (game, axis) => {
                    return Err(CliError::Config(format!(
                        "axis '{}' does not apply to game '{}'",
                        axis.name(),
                        game.label()
                    )));
                }
            }
        }
        Ok(())
    }

    /// The dynamics settings for one algorithm with the run seed applied.
    pub fn dynamics_for(&self, algorithm: Algorithm, seed: u64) -> DynamicsConfig {
        let mut config = self
            .dynamics_overrides
            .get(&algorithm)
            .cloned()
            .unwrap_or_else(|| self.dynamics.clone());
        config.seed = seed;
        config
    }

    /// The selector with a sweep axis value substituted.
    pub fn game_at(&self, axis: SweepAxis, value: usize) -> Result<GameSelector> {
        match (&self.game, axis) {
            (GameSelector::Resource(params), SweepAxis::Players) => {
                let mut params = params.clone();
                params.n_players = value;
                Ok(GameSelector::Resource(params))
            }
            (GameSelector::Resource(params), SweepAxis::Resources) => {
                let mut params = params.clone();
                params.n_resources = value;
                Ok(GameSelector::Resource(params))
            }
            (GameSelector::Task(params), SweepAxis::Agents) => {
                let mut params = params.clone();
                params.n_agents = value;
                Ok(GameSelector::Task(params))
            }
            (GameSelector::Task(params), SweepAxis::Targets) => {
                let mut params = params.clone();
                params.n_targets = value;
                Ok(GameSelector::Task(params))
            }
            (game, axis) => Err(CliError::Config(format!(
                "axis '{}' does not apply to game '{}'",
                axis.name(),
                game.label()
            ))),
        }
    }
}

/// Parses `--seeds`: comma-separated values and inclusive `A..B` ranges.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = lo
                .parse()
                .map_err(|_| CliError::Config(format!("bad seed range '{part}'")))?;
            let hi: u64 = hi
                .parse()
                .map_err(|_| CliError::Config(format!("bad seed range '{part}'")))?;
            if hi < lo {
                return Err(CliError::Config(format!("empty seed range '{part}'")));
            }
            seeds.extend(lo..=hi);
        } else {
            seeds.push(
                part.parse()
                    .map_err(|_| CliError::Config(format!("bad seed '{part}'")))?,
            );
        }
    }
    if seeds.is_empty() {
        return Err(CliError::Config("no seeds given".into()));
    }
    Ok(seeds)
}

/// Parses `--algo`: comma-separated algorithm names.
pub fn parse_algorithms(text: &str) -> Result<Vec<Algorithm>> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<Algorithm>().map_err(CliError::Config))
        .collect::<Result<Vec<_>>>()
        .and_then(|algos| {
            if algos.is_empty() {
                Err(CliError::Config("no algorithms given".into()))
            } else {
                Ok(algos)
            }
        })
}

/// Parses `--axis`, e.g. `resources=5,10,15,20`.
pub fn parse_axis(text: &str) -> Result<SweepSpec> {
    let (axis, values) = text
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("expected axis=v1,v2,... in '{text}'")))?;
    let axis = match axis.trim() {
        "players" => SweepAxis::Players,
        "resources" => SweepAxis::Resources,
        "agents" => SweepAxis::Agents,
        "targets" => SweepAxis::Targets,
        other => {
            return Err(CliError::Config(format!(
                "unknown axis '{other}' (players, resources, agents, targets)"
            )))
        }
    };
    let values = values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse::<usize>()
                .map_err(|_| CliError::Config(format!("bad axis value '{v}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(CliError::Config("axis needs at least one value".into()));
    }
    Ok(SweepSpec { axis, values })
}
