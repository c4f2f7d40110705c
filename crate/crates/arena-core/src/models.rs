//! Parametric game generators for the two experiment families.
//!
//! Resource allocation: `n` players pick one of `m` shared resources; a
//! player's utility is its physical rate on the chosen resource divided by
//! the number of players on it.
//!
//! Task assignment: `n` agents pick one of `m` targets scattered in the
//! unit cube; a target's utility is its value times the probability that
//! the agents assigned to it destroy it, and the global utility is the sum
//! over targets.
//!
//! Generators are deterministic functions of their seed, and instances
//! carry all data needed to rebuild the exact game (the CLI serializes
//! them to JSON for replay).

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::game::{ActionProfile, GameError, GameSpec};
use crate::rand_util;

/// Errors from generator parameter validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    InvalidParams(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidParams(msg) => write!(f, "invalid model parameters: {msg}"),
        }
    }
}

impl core::error::Error for ModelError {}

/// Parameters for the proportional-fair resource allocation game.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ResourceGameParams {
    pub n_players: usize,
    pub n_resources: usize,
    /// Lower bound of the per-(player, resource) rate draw, in Mbps.
    pub rate_min: f64,
    /// Upper bound of the rate draw, in Mbps.
    pub rate_max: f64,
    pub seed: u64,
}

impl ResourceGameParams {
    /// Rates default to the `[1, 100]` Mbps range.
    pub fn new(n_players: usize, n_resources: usize, seed: u64) -> Self {
        Self {
            n_players,
            n_resources,
            rate_min: 1.0,
            rate_max: 100.0,
            seed,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        if self.n_players == 0 {
            return Err(ModelError::InvalidParams("n_players must be positive".into()));
        }
        if self.n_resources == 0 {
            return Err(ModelError::InvalidParams("n_resources must be positive".into()));
        }
        if !(self.rate_min > 0.0 && self.rate_min <= self.rate_max && self.rate_max.is_finite()) {
            return Err(ModelError::InvalidParams(
                "need 0 < rate_min <= rate_max, finite".into(),
            ));
        }
        Ok(())
    }
}

/// A concrete resource game: the per-(player, resource) physical rates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ResourceInstance {
    /// `rates[player][resource]` in Mbps.
    pub rates: Vec<Vec<f64>>,
}

impl ResourceInstance {
    /// Draws the rate matrix from the seed, player-major then resource.
    pub fn generate(params: &ResourceGameParams) -> Result<Self, ModelError> {
        params.validate()?;
        let mut rng = rand_util::seeded_rng(params.seed);
        let rates = (0..params.n_players)
            .map(|_| {
                (0..params.n_resources)
                    .map(|_| rand_util::uniform(&mut rng, params.rate_min, params.rate_max))
                    .collect()
            })
            .collect();
        Ok(Self { rates })
    }

    pub fn n_players(&self) -> usize {
        self.rates.len()
    }

    pub fn n_resources(&self) -> usize {
        self.rates.first().map_or(0, Vec::len)
    }

    /// Validates a deserialized instance: rectangular and positive rates.
    pub fn validate(&self) -> Result<(), ModelError> {
        let m = self.n_resources();
        if self.rates.is_empty() || m == 0 {
            return Err(ModelError::InvalidParams("empty rate matrix".into()));
        }
        for row in &self.rates {
            if row.len() != m {
                return Err(ModelError::InvalidParams("ragged rate matrix".into()));
            }
            if row.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                return Err(ModelError::InvalidParams("rates must be finite and positive".into()));
            }
        }
        Ok(())
    }

    /// Builds the game: `u_i(a) = rates[i][a_i] / |{j : a_j = a_i}|`.
    pub fn to_game(&self) -> GameSpec {
        let rates = Arc::new(self.rates.clone());
        let counts = vec![self.n_resources(); self.n_players()];
        GameSpec::new(counts, move |player, actions| {
            let chosen = actions[player];
            let load = actions.iter().filter(|&&a| a == chosen).count();
            rates[player][chosen] / load as f64
        })
        .expect("validated instance yields a well-formed game")
    }
}

/// Generates a proportional-fair resource allocation game.
pub fn gen_resource_game(params: &ResourceGameParams) -> Result<GameSpec, ModelError> {
    Ok(ResourceInstance::generate(params)?.to_game())
}

/// Parameters for the combinatorial task assignment game.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TaskGameParams {
    pub n_agents: usize,
    pub n_targets: usize,
    /// Distance sensitivity of the survival probability.
    pub alpha: f64,
    /// Offset of the survival probability.
    pub beta: f64,
    pub value_min: f64,
    pub value_max: f64,
    pub seed: u64,
}

impl TaskGameParams {
    /// Defaults: `alpha = 2`, `beta = 1`, values in `[10, 100]`.
    pub fn new(n_agents: usize, n_targets: usize, seed: u64) -> Self {
        Self {
            n_agents,
            n_targets,
            alpha: 2.0,
            beta: 1.0,
            value_min: 10.0,
            value_max: 100.0,
            seed,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        if self.n_agents == 0 || self.n_targets == 0 {
            return Err(ModelError::InvalidParams("agent and target counts must be positive".into()));
        }
        if !(self.alpha.is_finite() && self.beta.is_finite()) {
            return Err(ModelError::InvalidParams("alpha and beta must be finite".into()));
        }
        if !(self.value_min > 0.0 && self.value_min <= self.value_max && self.value_max.is_finite())
        {
            return Err(ModelError::InvalidParams(
                "need 0 < value_min <= value_max, finite".into(),
            ));
        }
        Ok(())
    }
}

/// A concrete task game: agent/target positions in `[0, 1]^3`, target
/// values, and the survival-probability parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TaskInstance {
    pub agent_positions: Vec<[f64; 3]>,
    pub target_positions: Vec<[f64; 3]>,
    /// `values[k]` is target k's value `V(k)`.
    pub values: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl TaskInstance {
    /// Draws positions and values from the seed.
    ///
    /// Draw order is fixed as (agent positions, target positions, values),
    /// each point as (x, y, z), so a seed pins the instance exactly.
    pub fn generate(params: &TaskGameParams) -> Result<Self, ModelError> {
        params.validate()?;
        let mut rng = rand_util::seeded_rng(params.seed);
        let point = |rng: &mut _| {
            [
                rand_util::next_f64(rng),
                rand_util::next_f64(rng),
                rand_util::next_f64(rng),
            ]
        };
        let agent_positions = (0..params.n_agents).map(|_| point(&mut rng)).collect();
        let target_positions = (0..params.n_targets).map(|_| point(&mut rng)).collect();
        let values = (0..params.n_targets)
            .map(|_| rand_util::uniform(&mut rng, params.value_min, params.value_max))
            .collect();
        Ok(Self {
            agent_positions,
            target_positions,
            values,
            alpha: params.alpha,
            beta: params.beta,
        })
    }

    pub fn n_agents(&self) -> usize {
        self.agent_positions.len()
    }

    pub fn n_targets(&self) -> usize {
        self.target_positions.len()
    }

    /// Euclidean distance between agent `i` and target `k`.
    pub fn distance(&self, agent: usize, target: usize) -> f64 {
        let a = self.agent_positions[agent];
        let t = self.target_positions[target];
        let dx = a[0] - t[0];
        let dy = a[1] - t[1];
        let dz = a[2] - t[2];
        libm::sqrt(dx * dx + dy * dy + dz * dz)
    }

    /// Survival probability of target `k` against agent `i`.
    pub fn survival(&self, agent: usize, target: usize) -> f64 {
        survival_prob(self.distance(agent, target), self.alpha, self.beta)
    }

    /// Validates a deserialized instance.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.agent_positions.is_empty() || self.target_positions.is_empty() {
            return Err(ModelError::InvalidParams("need at least one agent and one target".into()));
        }
        if self.values.len() != self.target_positions.len() {
            return Err(ModelError::InvalidParams("one value per target required".into()));
        }
        let coords_ok = self
            .agent_positions
            .iter()
            .chain(self.target_positions.iter())
            .flatten()
            .all(|c| (0.0..=1.0).contains(c));
        if !coords_ok {
            return Err(ModelError::InvalidParams("positions must lie in the unit cube".into()));
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(ModelError::InvalidParams("values must be finite and positive".into()));
        }
        if !(self.alpha.is_finite() && self.beta.is_finite()) {
            return Err(ModelError::InvalidParams("alpha and beta must be finite".into()));
        }
        Ok(())
    }

    /// Builds the game. Agent `i`'s local utility is its chosen target's
    /// utility split equally among the agents assigned to it, so local
    /// utilities sum exactly to the per-target global utility.
    ///
    /// Survival probabilities are precomputed once; the closure evaluates
    /// the same formula as [`target_utility`] with products taken in
    /// ascending agent order.
    pub fn to_game(&self) -> GameSpec {
        let n = self.n_agents();
        let m = self.n_targets();
        let mut survival = Vec::with_capacity(n);
        for i in 0..n {
            let row: Vec<f64> = (0..m).map(|k| self.survival(i, k)).collect();
            survival.push(row);
        }
        let shared = Arc::new((survival, self.values.clone()));
        GameSpec::new(vec![m; n], move |player, actions| {
            let (survival, values) = &*shared;
            let target = actions[player];
            let mut product = 1.0;
            let mut load = 0usize;
            for (agent, &a) in actions.iter().enumerate() {
                if a == target {
                    product *= survival[agent][target];
                    load += 1;
                }
            }
            values[target] * (1.0 - product) / load as f64
        })
        .expect("validated instance yields a well-formed game")
    }
}

/// Generates a task assignment game together with its instance data.
pub fn gen_task_game(params: &TaskGameParams) -> Result<(GameSpec, TaskInstance), ModelError> {
    let instance = TaskInstance::generate(params)?;
    let game = instance.to_game();
    Ok((game, instance))
}

/// Probability that a target survives an agent at the given distance:
/// `1 / (1 + exp(-alpha * distance + beta))`.
///
/// Strictly increasing in distance for `alpha > 0` and strictly inside
/// `(0, 1)` for finite inputs.
pub fn survival_prob(distance: f64, alpha: f64, beta: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-alpha * distance + beta))
}

/// Expected destroyed value of one target under an assignment profile:
/// 0 when nobody selects it, else `V(k) * (1 - prod of survivals)` over
/// the agents assigned to it.
pub fn target_utility(
    instance: &TaskInstance,
    target: usize,
    profile: &ActionProfile,
) -> Result<f64, GameError> {
    if target >= instance.n_targets() {
        return Err(GameError::ActionOutOfRange {
            player: 0,
            action: target,
            count: instance.n_targets(),
        });
    }
    check_profile(instance, profile)?;
    let mut product = 1.0;
    let mut assigned = false;
    for (agent, &a) in profile.actions().iter().enumerate() {
        if a == target {
            product *= instance.survival(agent, target);
            assigned = true;
        }
    }
    if !assigned {
        return Ok(0.0);
    }
    Ok(instance.values[target] * (1.0 - product))
}

/// Total expected destroyed value over all targets.
///
/// This is an independent route to the same quantity as summing the
/// game's local utilities, grouped per target instead of per agent.
pub fn task_global_utility(
    instance: &TaskInstance,
    profile: &ActionProfile,
) -> Result<f64, GameError> {
    check_profile(instance, profile)?;
    let mut total = 0.0;
    for target in 0..instance.n_targets() {
        total += target_utility(instance, target, profile)?;
    }
    Ok(total)
}

fn check_profile(instance: &TaskInstance, profile: &ActionProfile) -> Result<(), GameError> {
    if profile.len() != instance.n_agents() {
        return Err(GameError::ProfileLength {
            expected: instance.n_agents(),
            actual: profile.len(),
        });
    }
    for (player, &action) in profile.actions().iter().enumerate() {
        if action >= instance.n_targets() {
            return Err(GameError::ActionOutOfRange {
                player,
                action,
                count: instance.n_targets(),
            });
        }
    }
    Ok(())
}
