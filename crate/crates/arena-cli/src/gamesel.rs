//! Game selection: named fixtures, seeded generators, and instance files.
//!
//! A selector resolves to a [`PreparedGame`]: the game itself plus the
//! canonical instance JSON (so a run can be replayed exactly), its SHA-256
//! hash, and the enumeration oracle's optimum when the game is small
//! enough to enumerate.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use arena_core::equilibria::social_optimum_with_guard;
use arena_core::game::{
    from_matrix, resource_2x2_fixture, stag_hunt_fixture, GameSpec, MatrixGame,
};
use arena_core::models::{
    gen_task_game, ResourceGameParams, ResourceInstance, TaskGameParams, TaskInstance,
};

use crate::{CliError, Result};

/// Profile-count ceiling for automatic oracle computation.
pub const ORACLE_GUARD: u64 = 200_000;

/// How an experiment names its game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameSelector {
    /// A named fixture: `stag_hunt` or `resource_2x2`.
    Fixture(String),
    /// Seeded proportional-fair resource allocation generator.
    Resource(ResourceGameParams),
    /// Seeded task assignment generator.
    Task(TaskGameParams),
    /// Path to an instance JSON file (matrix, resource, or task).
    File(String),
}

impl GameSelector {
    /// Parses the `--game` flag: a fixture name, `resource:NxM[,seed=S]`,
    /// `task:NxM[,seed=S]`, or a path to a JSON file.
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "stag_hunt" | "staghunt" => return Ok(Self::Fixture("stag_hunt".into())),
            "resource_2x2" => return Ok(Self::Fixture("resource_2x2".into())),
            _ => {}
        }
        if let Some(spec) = text.strip_prefix("resource:") {
            let (n, m, seed) = parse_generator_spec(spec)?;
            return Ok(Self::Resource(ResourceGameParams::new(n, m, seed)));
        }
        if let Some(spec) = text.strip_prefix("task:") {
            let (n, m, seed) = parse_generator_spec(spec)?;
            return Ok(Self::Task(TaskGameParams::new(n, m, seed)));
        }
        if Path::new(text).exists() || text.ends_with(".json") {
            return Ok(Self::File(text.into()));
        }
        Err(CliError::Config(format!(
            "unknown game '{text}': expected a fixture name (stag_hunt, resource_2x2), \
             resource:NxM[,seed=S], task:NxM[,seed=S], or a JSON instance file"
        )))
    }

    pub fn label(&self) -> String {
        match self {
            Self::Fixture(name) => format!("fixture:{name}"),
            Self::Resource(p) => {
                format!("resource:{}x{},seed={}", p.n_players, p.n_resources, p.seed)
            }
            Self::Task(p) => format!("task:{}x{},seed={}", p.n_agents, p.n_targets, p.seed),
            Self::File(path) => format!("file:{path}"),
        }
    }
}

fn parse_generator_spec(spec: &str) -> Result<(usize, usize, u64)> {
    let mut parts = spec.split(',');
    let dims = parts
        .next()
        .ok_or_else(|| CliError::Config("empty generator spec".into()))?;
    let (n, m) = dims
        .split_once(['x', 'X'])
        .ok_or_else(|| CliError::Config(format!("expected NxM in '{spec}'")))?;
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("bad player count in '{spec}'")))?;
    let m: usize = m
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("bad action count in '{spec}'")))?;
    let mut seed = 0u64;
    for part in parts {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected key=value in '{part}'")))?;
        match key.trim() {
            "seed" => {
                seed = value
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad seed in '{part}'")))?;
            }
            other => {
                return Err(CliError::Config(format!("unknown generator option '{other}'")));
            }
        }
    }
    Ok((n, m, seed))
}

/// The canonical serializable form of a concrete game instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceData {
    Matrix(MatrixGame),
    Resource(ResourceInstance),
    Task(TaskInstance),
}

impl InstanceData {
    pub fn to_game(&self) -> Result<GameSpec> {
        match self {
            Self::Matrix(tensor) => Ok(from_matrix(tensor.clone())?),
            Self::Resource(instance) => {
                instance.validate()?;
                Ok(instance.to_game())
            }
            Self::Task(instance) => {
                instance.validate()?;
                Ok(instance.to_game())
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Matrix(_) => "matrix",
            Self::Resource(_) => "resource",
            Self::Task(_) => "task",
        }
    }
}

/// A resolved game ready to run: evaluator, replayable instance JSON, its
/// hash, and the enumerated optimum when affordable.
pub struct PreparedGame {
    pub game: GameSpec,
    pub label: String,
    pub kind: &'static str,
    /// Canonical JSON of the instance; written next to the traces.
    pub instance_json: String,
    pub instance_sha256: String,
    /// Welfare of the social optimum, when the game is enumerable.
    pub oracle_welfare: Option<f64>,
}

/// Resolves a selector, computing the oracle for enumerable games when
/// `want_oracle` is set.
pub fn prepare_game(selector: &GameSelector, want_oracle: bool) -> Result<PreparedGame> {
    let (instance, label) = match selector {
        GameSelector::Fixture(name) => {
            let tensor = fixture_tensor(name)?;
            (InstanceData::Matrix(tensor), selector.label())
        }
        GameSelector::Resource(params) => {
            let instance = ResourceInstance::generate(params)?;
            (InstanceData::Resource(instance), selector.label())
        }
        GameSelector::Task(params) => {
            let (_, instance) = gen_task_game(params)?;
            (InstanceData::Task(instance), selector.label())
        }
        GameSelector::File(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read game file '{path}': {e}"))
            })?;
            let instance = parse_instance(&text)
                .map_err(|e| CliError::Config(format!("bad game file '{path}': {e}")))?;
            (instance, selector.label())
        }
    };
    let game = instance.to_game()?;
    let instance_json = serde_json::to_string_pretty(&instance)?;
    let instance_sha256 = hex::encode(Sha256::digest(instance_json.as_bytes()));
    let oracle_welfare = if want_oracle {
        social_optimum_with_guard(&game, ORACLE_GUARD)
            .ok()
            .map(|(_, w)| w)
    } else {
        None
    };
    Ok(PreparedGame {
        game,
        label,
        kind: instance.kind(),
        instance_json,
        instance_sha256,
        oracle_welfare,
    })
}

/// Detects the instance flavor by its fields: `payoffs` for matrix games,
/// `rates` for resource games, `agent_positions` for task games.
pub fn parse_instance(text: &str) -> Result<InstanceData> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let object = value
        .as_object()
        .ok_or_else(|| CliError::Config("instance file must hold a JSON object".into()))?;
    let instance = if object.contains_key("payoffs") {
        InstanceData::Matrix(serde_json::from_value(value.clone())?)
    } else if object.contains_key("rates") {
        InstanceData::Resource(serde_json::from_value(value.clone())?)
    } else if object.contains_key("agent_positions") {
        InstanceData::Task(serde_json::from_value(value.clone())?)
    } else {
        return Err(CliError::Config(
            "instance object needs 'payoffs', 'rates', or 'agent_positions'".into(),
        ));
    };
    Ok(instance)
}

fn fixture_tensor(name: &str) -> Result<MatrixGame> {
    let game = match name {
        "stag_hunt" | "staghunt" => stag_hunt_fixture(),
        "resource_2x2" => resource_2x2_fixture(),
        other => {
            return Err(CliError::Config(format!(
                "unknown fixture '{other}' (expected stag_hunt or resource_2x2)"
            )))
        }
    };
    // materialize the fixture as a dense tensor so instance files are
    // self-contained
    let counts = game.action_counts().to_vec();
    let profiles: usize = counts.iter().product();
    let mut payoffs = Vec::with_capacity(counts.len() * profiles);
    for player in 0..counts.len() {
        let mut actions = vec![0usize; counts.len()];
        loop {
            payoffs.push(
                game.payoff(player, &arena_core::game::ActionProfile::new(actions.clone()))
                    .expect("fixture profiles are valid"),
            );
            let mut axis = counts.len();
            let mut done = true;
            while axis > 0 {
                axis -= 1;
                actions[axis] += 1;
                if actions[axis] < counts[axis] {
                    done = false;
                    break;
                }
                actions[axis] = 0;
            }
            if done {
                break;
            }
        }
    }
    Ok(MatrixGame::new(counts, payoffs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fixture_names() {
        assert_eq!(
            GameSelector::parse("stag_hunt").unwrap(),
            GameSelector::Fixture("stag_hunt".into())
        );
        assert!(matches!(
            GameSelector::parse("resource:20x5,seed=42").unwrap(),
            GameSelector::Resource(p) if p.n_players == 20 && p.n_resources == 5 && p.seed == 42
        ));
        assert!(matches!(
            GameSelector::parse("task:10x20").unwrap(),
            GameSelector::Task(p) if p.n_agents == 10 && p.n_targets == 20
        ));
        assert!(GameSelector::parse("nonsense").is_err());
        assert!(GameSelector::parse("resource:axb").is_err());
    }

    #[test]
    fn fixture_tensor_round_trips() {
        let prepared = prepare_game(&GameSelector::Fixture("resource_2x2".into()), true).unwrap();
        assert_eq!(prepared.kind, "matrix");
        assert_eq!(prepared.oracle_welfare, Some(10.0));
        let reparsed = parse_instance(&prepared.instance_json).unwrap();
        let game = reparsed.to_game().unwrap();
        let profile = arena_core::game::ActionProfile::new(vec![1, 0]);
        assert_eq!(game.global_utility(&profile).unwrap(), 10.0);
    }

    #[test]
    fn instance_sniffing_rejects_unknown_shapes() {
        assert!(parse_instance("{\"foo\": 1}").is_err());
        assert!(parse_instance("[1, 2]").is_err());
    }

    #[test]
    fn resource_instance_round_trip_is_exact() {
        let params = ResourceGameParams::new(6, 3, 9);
        let prepared = prepare_game(&GameSelector::Resource(params.clone()), false).unwrap();
        let reparsed = parse_instance(&prepared.instance_json).unwrap();
        let direct = ResourceInstance::generate(&params).unwrap();
        match reparsed {
            InstanceData::Resource(instance) => assert_eq!(instance, direct),
            other => panic!("wrong flavor: {other:?}"),
        }
    }
}
