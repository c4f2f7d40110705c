//! Accounting for the counterfactual-payoff exchange between players.
//!
//! Each iteration, every player sends every other player a vector of its
//! own local payoffs under each of the receiver's alternative actions.
//! Messages here are computed straight from the game oracle; the ledger
//! counts what a distributed deployment would actually send: one logical
//! message per ordered player pair, carrying one payoff query per entry.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::game::{ActionProfile, GameError, GameSpec};

/// Query and message counters for one run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct CommsLedger {
    /// Messages sent in the most recent iteration: one per ordered pair.
    pub messages_this_iter: u64,
    /// Payoff entries exchanged in the most recent iteration.
    pub queries_this_iter: u64,
    /// Total payoff entries exchanged so far.
    pub cumulative_queries: u64,
    /// Iterations recorded so far.
    pub iterations: u64,
}

impl CommsLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one iteration of a uniform game: `n` players with `m`
    /// actions each exchange `n(n-1)m` payoff entries.
    pub fn record_iteration(&mut self, n: usize, m: usize) {
        self.messages_this_iter = (n as u64) * (n as u64).saturating_sub(1);
        self.queries_this_iter = queries_per_iteration(n, m);
        self.cumulative_queries += self.queries_this_iter;
        self.iterations += 1;
    }

    /// Records one iteration with per-player action counts; each receiver
    /// `j` costs `|A_j|` entries per sender, so the total is
    /// `(n - 1) * sum_j |A_j|`. Reduces to `n(n-1)m` when uniform.
    pub fn record_iteration_mixed(&mut self, action_counts: &[usize]) {
        let n = action_counts.len() as u64;
        let total_actions: u64 = action_counts.iter().map(|&c| c as u64).sum();
        self.messages_this_iter = n * n.saturating_sub(1);
        self.queries_this_iter = n.saturating_sub(1) * total_actions;
        self.cumulative_queries += self.queries_this_iter;
        self.iterations += 1;
    }
}

/// Payoff entries exchanged per iteration: `n * (n - 1) * m`.
pub fn queries_per_iteration(n: usize, m: usize) -> u64 {
    (n as u64) * (n as u64).saturating_sub(1) * (m as u64)
}

/// Ratio of per-iteration queries to payoff-tensor entries:
/// `(n - 1) / m^(n - 1)`.
///
/// Evaluated in log space so large games neither overflow nor lose the
/// zero limit.
pub fn query_ratio(n: usize, m: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let k = (n - 1) as f64;
    let m = m as f64;
    let log_ratio = libm::log(k) - k * libm::log(m);
    libm::exp(log_ratio)
}

/// The counterfactual message from `sender` to `receiver`: the sender's
/// local payoff under each alternative action of the receiver, with all
/// other actions held at the current profile.
pub fn build_message(
    game: &GameSpec,
    profile: &ActionProfile,
    sender: usize,
    receiver: usize,
) -> Result<Vec<f64>, GameError> {
    if sender == receiver {
        return Err(GameError::InvalidSpec(
            "a player does not message itself".into(),
        ));
    }
    if sender >= game.n_players() {
        return Err(GameError::PlayerOutOfRange {
            player: sender,
            n_players: game.n_players(),
        });
    }
    if receiver >= game.n_players() {
        return Err(GameError::PlayerOutOfRange {
            player: receiver,
            n_players: game.n_players(),
        });
    }
    profile.validate_for(game)?;
    let mut scratch = profile.actions().to_vec();
    let message = (0..game.action_count(receiver))
        .map(|k| {
            scratch[receiver] = k;
            game.payoff_raw(sender, &scratch)
        })
        .collect();
    Ok(message)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{from_matrix, stag_hunt_fixture, MatrixGame};
    use alloc::vec;

    #[test]
    fn query_formula() {
        assert_eq!(queries_per_iteration(2, 2), 4);
        assert_eq!(queries_per_iteration(100, 10), 99_000);
        assert_eq!(queries_per_iteration(1, 7), 0);
    }

    #[test]
    fn query_ratio_values() {
        assert!((query_ratio(2, 2) - 0.5).abs() < 1e-12);
        assert!((query_ratio(3, 4) - 0.125).abs() < 1e-12);
        assert_eq!(query_ratio(1, 5), 0.0);
        // the huge-game limit neither overflows nor goes negative
        let tiny = query_ratio(1000, 20);
        assert!(tiny >= 0.0 && tiny < 1e-300);
    }

    #[test]
    fn query_ratio_below_one_on_grid() {
        for n in 2..=100 {
            for m in 2..=20 {
                assert!(query_ratio(n, m) < 1.0, "ratio >= 1 at n={n} m={m}");
            }
        }
    }

    #[test]
    fn ledger_accumulates() {
        let mut ledger = CommsLedger::new();
        ledger.record_iteration(2, 2);
        ledger.record_iteration(2, 2);
        assert_eq!(ledger.cumulative_queries, 8);
        assert_eq!(ledger.iterations, 2);
        assert_eq!(ledger.messages_this_iter, 2);

        let mut case_one = CommsLedger::new();
        for _ in 0..500 {
            case_one.record_iteration(20, 40);
        }
        assert_eq!(case_one.cumulative_queries, 7_600_000);

        let empty = CommsLedger::new();
        assert_eq!(empty.cumulative_queries, 0);
    }

    #[test]
    fn mixed_counts_reduce_to_uniform() {
        let mut a = CommsLedger::new();
        let mut b = CommsLedger::new();
        a.record_iteration(3, 4);
        b.record_iteration_mixed(&[4, 4, 4]);
        assert_eq!(a, b);

        let mut c = CommsLedger::new();
        c.record_iteration_mixed(&[2, 3, 5]);
        assert_eq!(c.queries_this_iter, 2 * (2 + 3 + 5));
    }

    #[test]
    fn message_contents_on_stag_hunt() {
        let game = stag_hunt_fixture();
        let profile = ActionProfile::new(vec![1, 1]);
        // a hare hunter's payoff ignores the opponent, so the vector is flat
        let msg = build_message(&game, &profile, 0, 1).unwrap();
        assert_eq!(msg, vec![1.0, 1.0]);
        // the column player's payoffs depend on its own action
        let msg = build_message(&game, &profile, 1, 0).unwrap();
        assert_eq!(msg, vec![1.0, 1.0]);
        let profile = ActionProfile::new(vec![0, 0]);
        let msg = build_message(&game, &profile, 0, 1).unwrap();
        assert_eq!(msg, vec![3.0, 0.0]);
    }

    #[test]
    fn self_message_is_rejected() {
        let game = stag_hunt_fixture();
        let profile = ActionProfile::new(vec![0, 0]);
        assert!(build_message(&game, &profile, 1, 1).is_err());
    }

    #[test]
    fn single_action_receiver_gets_realized_payoff() {
        let tensor = MatrixGame::new(vec![2, 1], vec![4.0, 7.0, 1.0, 2.0]).unwrap();
        let game = from_matrix(tensor).unwrap();
        let profile = ActionProfile::new(vec![1, 0]);
        let msg = build_message(&game, &profile, 0, 1).unwrap();
        assert_eq!(msg.len(), 1);
        assert_eq!(msg[0], game.payoff(0, &profile).unwrap());
    }

    #[test]
    fn messages_reconstruct_counterfactual_global() {
        let tensor = MatrixGame::random(vec![3, 2, 4], 0.0, 10.0, 42).unwrap();
        let game = from_matrix(tensor).unwrap();
        let profile = ActionProfile::new(vec![2, 1, 0]);
        for receiver in 0..3 {
            for k in 0..game.action_count(receiver) {
                let mut total = game.counterfactual_payoff(&profile, receiver, k).unwrap();
                for sender in 0..3 {
                    if sender != receiver {
                        total += build_message(&game, &profile, sender, receiver).unwrap()[k];
                    }
                }
                let direct = game.counterfactual_global(&profile, receiver, k).unwrap();
                let scale = direct.abs().max(1.0);
                assert!((total - direct).abs() <= 1e-9 * scale);
            }
        }
    }
}
