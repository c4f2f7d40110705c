//! Ground-truth verification oracles: exhaustive PSNE, social-optimum and
//! Pareto enumeration, a cheap unilateral-deviation PSNE check that scales
//! to large games, and CCE regret evaluation of empirical play.
//!
//! Enumeration is guarded: the profile count must stay below an explicit
//! bound (default 10^7) or the call reports the size instead of grinding.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::dynamics::RunTrace;
use crate::game::{ActionProfile, GameError, GameSpec};
use crate::rand_util;

/// Absolute tolerance on utility differences in equilibrium checks.
pub const UTILITY_TOL: f64 = 1e-9;

/// Default ceiling on the number of profiles an oracle will enumerate.
pub const DEFAULT_ENUMERATION_GUARD: u64 = 10_000_000;

/// Errors from the enumeration oracles.
#[derive(Debug, Clone, PartialEq)]
pub enum EquilibriaError {
    /// The game has more profiles than the enumeration guard allows.
    TooLarge { profiles: u128, guard: u64 },
    /// An empirical distribution with no observations.
    EmptyDistribution,
    /// Burn-in removed every iteration of the trace.
    EmptyWindow,
    /// Burn-in fraction outside `[0, 1)`.
    InvalidBurnIn(f64),
    Game(GameError),
}

impl fmt::Display for EquilibriaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooLarge { profiles, guard } => {
                write!(f, "game has {profiles} profiles, above the enumeration guard {guard}")
            }
            Self::EmptyDistribution => write!(f, "empirical distribution is empty"),
            Self::EmptyWindow => write!(f, "no iterations remain after burn-in"),
            Self::InvalidBurnIn(b) => write!(f, "burn-in fraction {b} outside [0, 1)"),
            Self::Game(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for EquilibriaError {}

impl From<GameError> for EquilibriaError {
    fn from(e: GameError) -> Self {
        Self::Game(e)
    }
}

/// Visit counts over joint action profiles.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    counts: BTreeMap<ActionProfile, u64>,
    total: u64,
}

impl EmpiricalDistribution {
    pub fn from_profiles<'a, I: IntoIterator<Item = &'a ActionProfile>>(profiles: I) -> Self {
        let mut counts = BTreeMap::new();
        let mut total = 0;
        for p in profiles {
            *counts.entry(p.clone()).or_insert(0) += 1;
            total += 1;
        }
        Self { counts, total }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    pub fn probability(&self, profile: &ActionProfile) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        *self.counts.get(profile).unwrap_or(&0) as f64 / self.total as f64
    }

    /// Profiles and probabilities in lexicographic profile order.
    pub fn iter(&self) -> impl Iterator<Item = (&ActionProfile, f64)> {
        let total = self.total as f64;
        self.counts.iter().map(move |(p, &c)| (p, c as f64 / total))
    }

    /// The profile with the highest visit count (lexicographic tie-break).
    pub fn mode(&self) -> Option<&ActionProfile> {
        self.counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(p, _)| p)
    }
}

/// Normalized visit counts over the post-burn-in tail of a trace.
pub fn empirical_distribution(
    trace: &RunTrace,
    burn_in: f64,
) -> Result<EmpiricalDistribution, EquilibriaError> {
    if !(0.0..1.0).contains(&burn_in) {
        return Err(EquilibriaError::InvalidBurnIn(burn_in));
    }
    let len = trace.records.len();
    let start = (len as f64 * burn_in) as usize;
    if start >= len {
        return Err(EquilibriaError::EmptyWindow);
    }
    Ok(EmpiricalDistribution::from_profiles(
        trace.records[start..].iter().map(|r| &r.profile),
    ))
}

/// Result of full-game verification.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct EquilibriumReport {
    pub psne_set: Vec<ActionProfile>,
    pub social_optimum: Option<(ActionProfile, f64)>,
    pub pareto_set: Vec<ActionProfile>,
    /// Whether the sets above came from full enumeration.
    pub is_exhaustive: bool,
}

impl EquilibriumReport {
    /// Enumerates everything; errors when the game exceeds the guard.
    pub fn compute(game: &GameSpec, guard: u64) -> Result<Self, EquilibriaError> {
        Ok(Self {
            psne_set: psne_set_with_guard(game, guard)?,
            social_optimum: Some(social_optimum_with_guard(game, guard)?),
            pareto_set: pareto_set_with_guard(game, guard)?,
            is_exhaustive: true,
        })
    }

    /// A report for games too large to enumerate.
    pub fn not_exhaustive() -> Self {
        Self {
            psne_set: Vec::new(),
            social_optimum: None,
            pareto_set: Vec::new(),
            is_exhaustive: false,
        }
    }
}

fn check_guard(game: &GameSpec, guard: u64) -> Result<(), EquilibriaError> {
    let profiles = game.profile_count();
    if profiles > guard as u128 {
        return Err(EquilibriaError::TooLarge { profiles, guard });
    }
    Ok(())
}

/// Calls `f` on every joint profile in lexicographic order (the last
/// player's action varies fastest).
fn visit_profiles<F: FnMut(&[usize])>(action_counts: &[usize], mut f: F) {
    let mut current = vec![0usize; action_counts.len()];
    loop {
        f(&current);
        let mut axis = action_counts.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            current[axis] += 1;
            if current[axis] < action_counts[axis] {
                break;
            }
            current[axis] = 0;
        }
    }
}

/// Whether no player has a strictly improving unilateral deviation.
///
/// Costs one payoff query per (player, action) pair, so it stays usable
/// on games far beyond the enumeration guard.
pub fn is_psne(game: &GameSpec, profile: &ActionProfile) -> Result<bool, GameError> {
    profile.validate_for(game)?;
    let mut scratch = profile.actions().to_vec();
    for player in 0..game.n_players() {
        let played = scratch[player];
        let baseline = game.payoff_raw(player, &scratch);
        for alt in 0..game.action_count(player) {
            if alt == played {
                continue;
            }
            scratch[player] = alt;
            let deviated = game.payoff_raw(player, &scratch);
            scratch[player] = played;
            if deviated > baseline + UTILITY_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Exact PSNE set by exhaustive enumeration, in lexicographic order.
pub fn psne_set(game: &GameSpec) -> Result<Vec<ActionProfile>, EquilibriaError> {
    psne_set_with_guard(game, DEFAULT_ENUMERATION_GUARD)
}

pub fn psne_set_with_guard(
    game: &GameSpec,
    guard: u64,
) -> Result<Vec<ActionProfile>, EquilibriaError> {
    check_guard(game, guard)?;
    let mut found = Vec::new();
    let mut scratch = Vec::new();
    visit_profiles(game.action_counts(), |actions| {
        scratch.clear();
        scratch.extend_from_slice(actions);
        let mut is_eq = true;
        'players: for player in 0..game.n_players() {
            let played = scratch[player];
            let baseline = game.payoff_raw(player, &scratch);
            for alt in 0..game.action_count(player) {
                if alt == played {
                    continue;
                }
                scratch[player] = alt;
                let deviated = game.payoff_raw(player, &scratch);
                scratch[player] = played;
                if deviated > baseline + UTILITY_TOL {
                    is_eq = false;
                    break 'players;
                }
            }
        }
        if is_eq {
            found.push(ActionProfile::new(actions.to_vec()));
        }
    });
    Ok(found)
}

/// The welfare-maximizing profile and its welfare, ties broken toward the
/// lexicographically smallest profile.
pub fn social_optimum(game: &GameSpec) -> Result<(ActionProfile, f64), EquilibriaError> {
    social_optimum_with_guard(game, DEFAULT_ENUMERATION_GUARD)
}

pub fn social_optimum_with_guard(
    game: &GameSpec,
    guard: u64,
) -> Result<(ActionProfile, f64), EquilibriaError> {
    check_guard(game, guard)?;
    let mut best: Option<(Vec<usize>, f64)> = None;
    visit_profiles(game.action_counts(), |actions| {
        let w = game.welfare_raw(actions);
        match &best {
            Some((_, best_w)) if w <= *best_w => {}
            _ => best = Some((actions.to_vec(), w)),
        }
    });
    let (actions, w) = best.expect("a finite game has at least one profile");
    Ok((ActionProfile::new(actions), w))
}

/// Whether no other profile makes some player strictly better off without
/// making another strictly worse off.
pub fn is_pareto_optimal(
    game: &GameSpec,
    profile: &ActionProfile,
) -> Result<bool, EquilibriaError> {
    is_pareto_optimal_with_guard(game, profile, DEFAULT_ENUMERATION_GUARD)
}

pub fn is_pareto_optimal_with_guard(
    game: &GameSpec,
    profile: &ActionProfile,
    guard: u64,
) -> Result<bool, EquilibriaError> {
    check_guard(game, guard)?;
    profile.validate_for(game).map_err(EquilibriaError::Game)?;
    let n = game.n_players();
    let base: Vec<f64> = (0..n)
        .map(|i| game.payoff_raw(i, profile.actions()))
        .collect();
    let mut dominated = false;
    visit_profiles(game.action_counts(), |actions| {
        if dominated {
            return;
        }
        let mut weakly_better = true;
        let mut strictly_better = false;
        for (player, &b) in base.iter().enumerate() {
            let u = game.payoff_raw(player, actions);
            if u < b - UTILITY_TOL {
                weakly_better = false;
                break;
            }
            if u > b + UTILITY_TOL {
                strictly_better = true;
            }
        }
        if weakly_better && strictly_better {
            dominated = true;
        }
    });
    Ok(!dominated)
}

/// All Pareto-optimal profiles, in lexicographic order. Quadratic in the
/// profile count, so intended for desk-scale games.
pub fn pareto_set_with_guard(
    game: &GameSpec,
    guard: u64,
) -> Result<Vec<ActionProfile>, EquilibriaError> {
    check_guard(game, guard)?;
    let mut profiles: Vec<Vec<usize>> = Vec::new();
    visit_profiles(game.action_counts(), |actions| profiles.push(actions.to_vec()));
    let n = game.n_players();
    let payoffs: Vec<Vec<f64>> = profiles
        .iter()
        .map(|a| (0..n).map(|i| game.payoff_raw(i, a)).collect())
        .collect();
    let mut front = Vec::new();
    for (idx, candidate) in payoffs.iter().enumerate() {
        let dominated = payoffs.iter().enumerate().any(|(other, u)| {
            if other == idx {
                return false;
            }
            let mut strictly = false;
            for player in 0..n {
                if u[player] < candidate[player] - UTILITY_TOL {
                    return false;
                }
                if u[player] > candidate[player] + UTILITY_TOL {
                    strictly = true;
                }
            }
            strictly
        });
        if !dominated {
            front.push(ActionProfile::new(profiles[idx].clone()));
        }
    }
    Ok(front)
}

/// Maximum expected gain any player could obtain by committing to a fixed
/// action against the empirical joint distribution. At most `epsilon` iff
/// the distribution is an `epsilon`-CCE; non-positive on a point mass iff
/// that profile is a PSNE.
pub fn cce_regret(
    game: &GameSpec,
    dist: &EmpiricalDistribution,
) -> Result<f64, EquilibriaError> {
    if dist.total == 0 {
        return Err(EquilibriaError::EmptyDistribution);
    }
    for (profile, _) in dist.iter() {
        profile.validate_for(game).map_err(EquilibriaError::Game)?;
    }
    let mut worst = f64::NEG_INFINITY;
    let mut scratch = Vec::new();
    for player in 0..game.n_players() {
        for alt in 0..game.action_count(player) {
            let mut expected_gain = 0.0;
            for (profile, prob) in dist.iter() {
                scratch.clear();
                scratch.extend_from_slice(profile.actions());
                let realized = game.payoff_raw(player, &scratch);
                let played = scratch[player];
                scratch[player] = alt;
                let deviated = game.payoff_raw(player, &scratch);
                scratch[player] = played;
                expected_gain += prob * (deviated - realized);
            }
            if expected_gain > worst {
                worst = expected_gain;
            }
        }
    }
    Ok(worst)
}

/// Verifies the welfare-aligned construction on a game.
///
/// Builds the variant whose every local utility equals the original
/// game's welfare, then checks (a) on `samples` random unilateral
/// deviations, a local improvement in the aligned game implies a welfare
/// improvement in the original, and (b) the aligned game's PSNE set is
/// non-empty and contains its social optimum.
pub fn alignment_check(
    game: &GameSpec,
    samples: usize,
    seed: u64,
) -> Result<bool, EquilibriaError> {
    let aligned = game.welfare_aligned();
    let mut rng = rand_util::seeded_rng(seed);
    let mut scratch = vec![0usize; game.n_players()];
    for _ in 0..samples {
        for (slot, &count) in scratch.iter_mut().zip(game.action_counts()) {
            *slot = rand_util::uniform_index(&mut rng, count);
        }
        let player = rand_util::uniform_index(&mut rng, game.n_players());
        let alt = rand_util::uniform_index(&mut rng, game.action_count(player));
        let profile = ActionProfile::new(scratch.clone());
        let local_gain = aligned.payoff(player, &profile)?
            - aligned.counterfactual_payoff(&profile, player, alt)?;
        let welfare_gain = game.global_utility(&profile)?
            - game.counterfactual_global(&profile, player, alt)?;
        if local_gain > 0.0 && !(welfare_gain > 0.0) {
            return Ok(false);
        }
    }
    let psne = psne_set(&aligned)?;
    if psne.is_empty() {
        return Ok(false);
    }
    let (optimum, _) = social_optimum(&aligned)?;
    Ok(psne.contains(&optimum))
}
