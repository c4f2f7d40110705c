//! Finite repeated normal-form games: payoff queries, counterfactual
//! queries, dense matrix games, and the two 2x2 fixtures used throughout
//! the tests and the CLI.
//!
//! A game is `(players, action sets, payoff evaluator)`. The evaluator is
//! an arbitrary pure function, so games may be backed by a dense tensor
//! ([`MatrixGame`]) or computed on the fly by the generators in
//! [`crate::models`].

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Errors from game construction and payoff queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameError {
    /// Player index not below the player count.
    PlayerOutOfRange { player: usize, n_players: usize },
    /// Action index not below the player's action count.
    ActionOutOfRange {
        player: usize,
        action: usize,
        count: usize,
    },
    /// Profile length does not match the player count.
    ProfileLength { expected: usize, actual: usize },
    /// Malformed construction parameters.
    InvalidSpec(String),
}

impl fmt::Display for GameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PlayerOutOfRange { player, n_players } => {
                write!(f, "player index {player} out of range (n_players = {n_players})")
            }
            Self::ActionOutOfRange { player, action, count } => {
                write!(f, "action {action} out of range for player {player} (count = {count})")
            }
            Self::ProfileLength { expected, actual } => {
                write!(f, "profile has {actual} actions, expected {expected}")
            }
            Self::InvalidSpec(msg) => write!(f, "invalid game specification: {msg}"),
        }
    }
}

impl core::error::Error for GameError {}

/// One pure action per player; entries are 0-based action indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ActionProfile(pub Vec<usize>);

impl ActionProfile {
    pub fn new(actions: Vec<usize>) -> Self {
        Self(actions)
    }

    pub fn actions(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks length and per-player action ranges against a game.
    pub fn validate_for(&self, game: &GameSpec) -> Result<(), GameError> {
        if self.0.len() != game.n_players() {
            return Err(GameError::ProfileLength {
                expected: game.n_players(),
                actual: self.0.len(),
            });
        }
        for (player, (&action, &count)) in
            self.0.iter().zip(game.action_counts().iter()).enumerate()
        {
            if action >= count {
                return Err(GameError::ActionOutOfRange { player, action, count });
            }
        }
        Ok(())
    }
}

impl From<Vec<usize>> for ActionProfile {
    fn from(actions: Vec<usize>) -> Self {
        Self(actions)
    }
}

type PayoffFn = dyn Fn(usize, &[usize]) -> f64 + Send + Sync;

/// A finite normal-form game: player count, per-player action counts, and
/// a pure payoff evaluator `(player, profile) -> utility`.
///
/// The evaluator must be deterministic and side-effect-free; all payoffs
/// must be finite. `GameSpec` is immutable after construction and cheap to
/// clone (the evaluator is shared), so independent runs can evaluate the
/// same game concurrently.
#[derive(Clone)]
pub struct GameSpec {
    action_counts: Vec<usize>,
    payoff_fn: Arc<PayoffFn>,
}

impl fmt::Debug for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GameSpec")
            .field("n_players", &self.n_players())
            .field("action_counts", &self.action_counts)
            .finish_non_exhaustive()
    }
}

impl GameSpec {
    /// Builds a game from action counts and a payoff evaluator.
    ///
    /// Requires at least one player and at least one action per player.
    pub fn new<F>(action_counts: Vec<usize>, payoff_fn: F) -> Result<Self, GameError>
    where
        F: Fn(usize, &[usize]) -> f64 + Send + Sync + 'static,
    {
        if action_counts.is_empty() {
            return Err(GameError::InvalidSpec("game needs at least one player".into()));
        }
        if action_counts.iter().any(|&c| c == 0) {
            return Err(GameError::InvalidSpec(
                "every player needs at least one action".into(),
            ));
        }
        Ok(Self {
            action_counts,
            payoff_fn: Arc::new(payoff_fn),
        })
    }

    pub fn n_players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn action_count(&self, player: usize) -> usize {
        self.action_counts[player]
    }

    /// Number of joint action profiles, saturating at `u128::MAX`.
    pub fn profile_count(&self) -> u128 {
        self.action_counts
            .iter()
            .fold(1u128, |acc, &c| acc.saturating_mul(c as u128))
    }

    /// Local payoff `u_i(a)` for one player at a joint profile.
    pub fn payoff(&self, player: usize, profile: &ActionProfile) -> Result<f64, GameError> {
        self.check_player(player)?;
        profile.validate_for(self)?;
        Ok(self.payoff_raw(player, profile.actions()))
    }

    /// Social welfare `W(a)`: the sum of all players' local payoffs.
    pub fn global_utility(&self, profile: &ActionProfile) -> Result<f64, GameError> {
        profile.validate_for(self)?;
        Ok(self.welfare_raw(profile.actions()))
    }

    /// `u_i(alt, a_-i)`: the payoff `player` would have received had it
    /// played `alt` while everyone else kept their action.
    pub fn counterfactual_payoff(
        &self,
        profile: &ActionProfile,
        player: usize,
        alt: usize,
    ) -> Result<f64, GameError> {
        self.check_player(player)?;
        self.check_action(player, alt)?;
        profile.validate_for(self)?;
        let mut scratch = profile.actions().to_vec();
        scratch[player] = alt;
        Ok(self.payoff_raw(player, &scratch))
    }

    /// `u^g(alt, a_-i)`: social welfare at the profile with `player`'s
    /// action replaced by `alt`. Equals [`Self::global_utility`] exactly
    /// when `alt` is the played action.
    pub fn counterfactual_global(
        &self,
        profile: &ActionProfile,
        player: usize,
        alt: usize,
    ) -> Result<f64, GameError> {
        self.check_player(player)?;
        self.check_action(player, alt)?;
        profile.validate_for(self)?;
        let mut scratch = profile.actions().to_vec();
        scratch[player] = alt;
        Ok(self.welfare_raw(&scratch))
    }

    /// The game whose every local utility is this game's social welfare.
    ///
    /// Unilateral improvement in the aligned game coincides with welfare
    /// improvement in the original game, so the aligned game's PSNE set is
    /// the set of welfare-local-maximal profiles.
    pub fn welfare_aligned(&self) -> GameSpec {
        let inner = self.clone();
        GameSpec {
            action_counts: self.action_counts.clone(),
            payoff_fn: Arc::new(move |_, actions| inner.welfare_raw(actions)),
        }
    }

    /// Unvalidated payoff evaluation; callers guarantee in-range indices.
    pub(crate) fn payoff_raw(&self, player: usize, actions: &[usize]) -> f64 {
        (self.payoff_fn)(player, actions)
    }

    /// Unvalidated welfare evaluation, summed in ascending player order.
    ///
    /// Every welfare value in the crate flows through this function so that
    /// equal profiles always produce bit-identical sums.
    pub(crate) fn welfare_raw(&self, actions: &[usize]) -> f64 {
        let mut w = 0.0;
        for player in 0..self.n_players() {
            w += (self.payoff_fn)(player, actions);
        }
        w
    }

    fn check_player(&self, player: usize) -> Result<(), GameError> {
        if player >= self.n_players() {
            return Err(GameError::PlayerOutOfRange {
                player,
                n_players: self.n_players(),
            });
        }
        Ok(())
    }

    fn check_action(&self, player: usize, action: usize) -> Result<(), GameError> {
        let count = self.action_counts[player];
        if action >= count {
            return Err(GameError::ActionOutOfRange { player, action, count });
        }
        Ok(())
    }
}

/// A dense payoff tensor: one utility per `(player, profile)` pair.
///
/// The flat layout is player-major, then profile-lexicographic with the
/// last player's action varying fastest, which matches the JSON schema
/// used by the CLI (`n_players`, `action_counts`, `payoffs`).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MatrixGame {
    pub n_players: usize,
    pub action_counts: Vec<usize>,
    pub payoffs: Vec<f64>,
}

impl MatrixGame {
    /// Validates shape and finiteness: `payoffs.len()` must equal
    /// `n_players * prod(action_counts)`.
    pub fn new(action_counts: Vec<usize>, payoffs: Vec<f64>) -> Result<Self, GameError> {
        let n_players = action_counts.len();
        if n_players == 0 {
            return Err(GameError::InvalidSpec("tensor needs at least one player".into()));
        }
        if action_counts.iter().any(|&c| c == 0) {
            return Err(GameError::InvalidSpec(
                "every player needs at least one action".into(),
            ));
        }
        let profiles = action_counts
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .ok_or_else(|| GameError::InvalidSpec("profile count overflows".into()))?;
        let expected = n_players
            .checked_mul(profiles)
            .ok_or_else(|| GameError::InvalidSpec("entry count overflows".into()))?;
        if payoffs.len() != expected {
            return Err(GameError::InvalidSpec(format!(
                "tensor has {} entries, expected {}",
                payoffs.len(),
                expected
            )));
        }
        if payoffs.iter().any(|v| !v.is_finite()) {
            return Err(GameError::InvalidSpec("payoffs must be finite".into()));
        }
        Ok(Self {
            n_players,
            action_counts,
            payoffs,
        })
    }

    /// Random tensor with payoffs drawn uniformly from `[lo, hi)`.
    ///
    /// Draw order is player-major then profile-lexicographic, so a seed
    /// fully determines the game.
    pub fn random(
        action_counts: Vec<usize>,
        lo: f64,
        hi: f64,
        seed: u64,
    ) -> Result<Self, GameError> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(GameError::InvalidSpec("need finite lo < hi".into()));
        }
        let n_players = action_counts.len();
        let profiles: usize = action_counts.iter().product();
        let mut rng = crate::rand_util::seeded_rng(seed);
        let payoffs = (0..n_players * profiles)
            .map(|_| crate::rand_util::uniform(&mut rng, lo, hi))
            .collect();
        Self::new(action_counts, payoffs)
    }

    /// Lexicographic rank of a profile (last player's action fastest).
    pub fn profile_rank(&self, actions: &[usize]) -> usize {
        let mut rank = 0;
        for (&a, &c) in actions.iter().zip(self.action_counts.iter()) {
            rank = rank * c + a;
        }
        rank
    }

    /// Direct tensor lookup.
    pub fn entry(&self, player: usize, actions: &[usize]) -> f64 {
        let profiles = self.payoffs.len() / self.n_players;
        self.payoffs[player * profiles + self.profile_rank(actions)]
    }
}

/// Wraps a validated tensor as a [`GameSpec`] whose evaluator is lookup.
pub fn from_matrix(tensor: MatrixGame) -> Result<GameSpec, GameError> {
    // Re-validate so hand-built or deserialized tensors are checked too.
    let tensor = MatrixGame::new(tensor.action_counts, tensor.payoffs)?;
    let counts = tensor.action_counts.clone();
    let shared = Arc::new(tensor);
    GameSpec::new(counts, move |player, actions| shared.entry(player, actions))
}

/// Action labels for the Stag Hunt fixture, in index order.
pub const STAG_HUNT_LABELS: [&str; 2] = ["stag", "hare"];

/// Action labels for the 2x2 resource fixture, in index order.
pub const RESOURCE_2X2_LABELS: [&str; 2] = ["R1", "R2"];

/// The classic 2x2 Stag Hunt. Action 0 = stag, action 1 = hare.
///
/// Payoffs: (stag, stag) = (3, 3); a lone stag hunter gets 0; a hare
/// hunter always gets 1. PSNE set {(stag, stag), (hare, hare)}; the
/// social optimum (stag, stag) has welfare 6.
pub fn stag_hunt_fixture() -> GameSpec {
    let tensor = MatrixGame::new(
        vec![2, 2],
        vec![
            // row player: (s,s) (s,h) (h,s) (h,h)
            3.0, 0.0, 1.0, 1.0, //
            // column player
            3.0, 1.0, 0.0, 1.0,
        ],
    )
    .expect("fixture tensor is well-formed");
    from_matrix(tensor).expect("fixture tensor is well-formed")
}

/// The 2x2 shared-resource selection game. Action 0 = R1, action 1 = R2.
///
/// Each player's utility is its physical rate on the chosen resource
/// divided by the number of players on it; row rates are (5, 6) Mbps and
/// column rates are (4, 3) Mbps. PSNE set {(R1, R2), (R2, R1)} with
/// welfare 8 and 10; the social optimum (R2, R1) pays (6, 4).
pub fn resource_2x2_fixture() -> GameSpec {
    let row_rates = [5.0, 6.0];
    let col_rates = [4.0, 3.0];
    GameSpec::new(vec![2, 2], move |player, actions| {
        let rates = if player == 0 { &row_rates } else { &col_rates };
        let share = if actions[0] == actions[1] { 2.0 } else { 1.0 };
        rates[actions[player]] / share
    })
    .expect("fixture parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(actions: &[usize]) -> ActionProfile {
        ActionProfile::new(actions.to_vec())
    }

    #[test]
    fn stag_hunt_payoffs() {
        let game = stag_hunt_fixture();
        assert_eq!(game.payoff(0, &profile(&[0, 0])).unwrap(), 3.0);
        assert_eq!(game.payoff(1, &profile(&[0, 0])).unwrap(), 3.0);
        assert_eq!(game.payoff(0, &profile(&[1, 1])).unwrap(), 1.0);
        // lone stag hunter gets nothing, lone hare hunter still gets 1
        assert_eq!(game.payoff(0, &profile(&[0, 1])).unwrap(), 0.0);
        assert_eq!(game.payoff(1, &profile(&[0, 1])).unwrap(), 1.0);
    }

    #[test]
    fn stag_hunt_welfare() {
        let game = stag_hunt_fixture();
        assert_eq!(game.global_utility(&profile(&[0, 0])).unwrap(), 6.0);
        assert_eq!(game.global_utility(&profile(&[1, 1])).unwrap(), 2.0);
    }

    #[test]
    fn resource_fixture_payoffs() {
        let game = resource_2x2_fixture();
        // social optimum (R2, R1) pays (6, 4) for welfare 10
        assert_eq!(game.payoff(0, &profile(&[1, 0])).unwrap(), 6.0);
        assert_eq!(game.payoff(1, &profile(&[1, 0])).unwrap(), 4.0);
        assert_eq!(game.global_utility(&profile(&[1, 0])).unwrap(), 10.0);
        // the other PSNE (R1, R2) yields 8
        assert_eq!(game.global_utility(&profile(&[0, 1])).unwrap(), 8.0);
        // shared resource splits the rate
        assert_eq!(game.payoff(0, &profile(&[0, 0])).unwrap(), 2.5);
        assert_eq!(game.payoff(1, &profile(&[0, 0])).unwrap(), 2.0);
    }

    #[test]
    fn constant_game_payoff() {
        let game = GameSpec::new(vec![2, 3], |_, _| 4.25).unwrap();
        assert_eq!(game.payoff(1, &profile(&[1, 2])).unwrap(), 4.25);
        assert_eq!(game.global_utility(&profile(&[0, 0])).unwrap(), 8.5);
    }

    #[test]
    fn counterfactual_payoff_matches_fixture() {
        let game = stag_hunt_fixture();
        // from (hare, hare), the row player switching to stag drops 1 -> 0
        assert_eq!(game.counterfactual_payoff(&profile(&[1, 1]), 0, 0).unwrap(), 0.0);
        // identity deviation reproduces the realized payoff
        assert_eq!(
            game.counterfactual_payoff(&profile(&[1, 1]), 0, 1).unwrap(),
            game.payoff(0, &profile(&[1, 1])).unwrap()
        );
        let res = resource_2x2_fixture();
        assert_eq!(
            res.counterfactual_payoff(&profile(&[0, 1]), 0, 1).unwrap(),
            res.payoff(0, &profile(&[1, 1])).unwrap()
        );
    }

    #[test]
    fn counterfactual_global_matches_fixture() {
        let res = resource_2x2_fixture();
        // from (R1, R1), the row player switching to R2 reaches welfare 10
        assert_eq!(res.counterfactual_global(&profile(&[0, 0]), 0, 1).unwrap(), 10.0);
        // identity deviation equals the realized welfare exactly
        let w = res.global_utility(&profile(&[0, 0])).unwrap();
        assert_eq!(res.counterfactual_global(&profile(&[0, 0]), 0, 0).unwrap(), w);
        let hunt = stag_hunt_fixture();
        // from (hare, stag), the column player switching to hare gives W(hare, hare) = 2
        assert_eq!(hunt.counterfactual_global(&profile(&[1, 0]), 1, 1).unwrap(), 2.0);
    }

    #[test]
    fn invalid_indices_are_rejected() {
        let game = stag_hunt_fixture();
        assert!(matches!(
            game.payoff(2, &profile(&[0, 0])),
            Err(GameError::PlayerOutOfRange { .. })
        ));
        assert!(matches!(
            game.payoff(0, &profile(&[0, 2])),
            Err(GameError::ActionOutOfRange { .. })
        ));
        assert!(matches!(
            game.payoff(0, &profile(&[0])),
            Err(GameError::ProfileLength { .. })
        ));
        assert!(matches!(
            game.counterfactual_global(&profile(&[0, 0]), 0, 5),
            Err(GameError::ActionOutOfRange { .. })
        ));
    }

    #[test]
    fn from_matrix_transfers_shape() {
        let tensor = MatrixGame::new(vec![2, 2], vec![0.0; 8]).unwrap();
        let game = from_matrix(tensor).unwrap();
        assert_eq!(game.n_players(), 2);
        assert_eq!(game.action_counts(), &[2, 2]);
    }

    #[test]
    fn from_matrix_degenerate_single_actions() {
        let tensor = MatrixGame::new(vec![1, 1], vec![1.0, 2.0]).unwrap();
        let game = from_matrix(tensor).unwrap();
        assert_eq!(game.global_utility(&profile(&[0, 0])).unwrap(), 3.0);
    }

    #[test]
    fn from_matrix_rejects_wrong_entry_count() {
        assert!(matches!(
            MatrixGame::new(vec![2, 2], vec![0.0; 7]),
            Err(GameError::InvalidSpec(_))
        ));
        let bad = MatrixGame {
            n_players: 2,
            action_counts: vec![2, 2],
            payoffs: vec![0.0; 3],
        };
        assert!(from_matrix(bad).is_err());
    }

    #[test]
    fn matrix_lookup_agrees_with_payoff_everywhere() {
        let tensor = MatrixGame::random(vec![2, 3, 2], -5.0, 5.0, 11).unwrap();
        let game = from_matrix(tensor.clone()).unwrap();
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..2 {
                    let p = profile(&[a, b, c]);
                    for player in 0..3 {
                        assert_eq!(
                            game.payoff(player, &p).unwrap(),
                            tensor.entry(player, &[a, b, c])
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn payoff_eval_is_pure() {
        let game = resource_2x2_fixture();
        let p = profile(&[1, 0]);
        let first = game.payoff(0, &p).unwrap();
        for _ in 0..10 {
            assert_eq!(game.payoff(0, &p).unwrap(), first);
        }
    }

    #[test]
    fn welfare_aligned_payoff_is_welfare() {
        let game = resource_2x2_fixture();
        let aligned = game.welfare_aligned();
        for a in 0..2 {
            for b in 0..2 {
                let p = profile(&[a, b]);
                let w = game.global_utility(&p).unwrap();
                assert_eq!(aligned.payoff(0, &p).unwrap(), w);
                assert_eq!(aligned.payoff(1, &p).unwrap(), w);
            }
        }
    }
}
