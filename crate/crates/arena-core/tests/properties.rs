//! Property tests for the structural invariants: strategies are always
//! distributions, welfare decomposes into local payoffs, the incremental
//! regret average matches a batch recomputation, and message vectors
//! reconstruct counterfactual welfare.

use proptest::collection::vec;
use proptest::prelude::*;

use arena_core::comms::build_message;
use arena_core::dynamics::{prune_strategy, DynamicsConfig, LearnerState};
use arena_core::equilibria::EmpiricalDistribution;
use arena_core::game::{from_matrix, ActionProfile, MatrixGame};

fn profile_strategy(action_counts: Vec<usize>) -> impl Strategy<Value = Vec<usize>> {
    action_counts
        .into_iter()
        .map(|c| (0..c).boxed())
        .collect::<Vec<_>>()
}

fn small_game() -> impl Strategy<Value = (MatrixGame, Vec<usize>)> {
    (2usize..=4, 1usize..=4, 1usize..=4, any::<u64>())
        .prop_flat_map(|(n, lo, extra, seed)| {
            let counts: Vec<usize> = (0..n).map(|i| 1 + (lo + i * extra) % 4).collect();
            let tensor = MatrixGame::random(counts.clone(), -10.0, 10.0, seed).unwrap();
            (Just(tensor), profile_strategy(counts))
        })
}

proptest! {
    #[test]
    fn strategies_are_distributions(
        regrets in vec(-50.0f64..50.0, 1..8),
        t in 1u64..100_000,
        lock in any::<bool>(),
        explore in any::<bool>(),
    ) {
        let mut state = LearnerState::new(regrets.len());
        state.avg_regret = regrets;
        state.last_action = 0;
        let config = DynamicsConfig::default();
        let (probs, _) = state.next_strategy(t, &config, lock, explore);
        prop_assert_eq!(probs.len(), state.avg_regret.len());
        prop_assert!(probs.iter().all(|&p| p >= 0.0));
        let sum: f64 = probs.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9, "sum = {}", sum);
        if !lock && explore {
            // in the exploratory branch every action keeps the uniform floor
            let positive: f64 = state.avg_regret.iter().map(|r| r.max(0.0)).sum();
            if positive > 0.0 {
                let floor = config.exploration_rate(t) / probs.len() as f64;
                prop_assert!(probs.iter().all(|&p| p >= floor));
            }
        }
    }

    #[test]
    fn pruning_keeps_a_distribution(
        probs in vec(0.0f64..1.0, 1..8),
        eps in 0.0f64..0.5,
    ) {
        let total: f64 = probs.iter().sum();
        prop_assume!(total > 1e-6);
        let normalized: Vec<f64> = probs.iter().map(|p| p / total).collect();
        let pruned = prune_strategy(&normalized, eps);
        prop_assert_eq!(pruned.len(), normalized.len());
        let sum: f64 = pruned.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
        // pruned entries are exactly zero and survivors kept their ratios
        for (&before, &after) in normalized.iter().zip(&pruned) {
            if before <= eps {
                prop_assert!(after == 0.0 || pruned.iter().filter(|&&p| p > 0.0).count() == 1);
            }
        }
    }

    #[test]
    fn welfare_decomposes_into_payoffs((tensor, actions) in small_game()) {
        let game = from_matrix(tensor).unwrap();
        let profile = ActionProfile::new(actions);
        let welfare = game.global_utility(&profile).unwrap();
        let sum: f64 = (0..game.n_players())
            .map(|i| game.payoff(i, &profile).unwrap())
            .sum();
        let scale = sum.abs().max(1.0);
        prop_assert!((welfare - sum).abs() <= 1e-9 * scale);
    }

    #[test]
    fn identity_deviation_is_exact((tensor, actions) in small_game()) {
        let game = from_matrix(tensor).unwrap();
        let profile = ActionProfile::new(actions.clone());
        let w = game.global_utility(&profile).unwrap();
        for (player, &played) in actions.iter().enumerate() {
            prop_assert_eq!(game.counterfactual_global(&profile, player, played).unwrap(), w);
            prop_assert_eq!(
                game.counterfactual_payoff(&profile, player, played).unwrap(),
                game.payoff(player, &profile).unwrap()
            );
        }
    }

    #[test]
    fn incremental_regret_matches_batch(
        steps in vec((-5.0f64..5.0, vec(-5.0f64..5.0, 3)), 1..400),
    ) {
        let mut state = LearnerState::new(3);
        let mut history: Vec<Vec<f64>> = Vec::new();
        for (realized, mut cf) in steps {
            cf[0] = realized; // action 0 plays the realized payoff
            history.push(cf.iter().map(|c| c - realized).collect());
            state.update_regrets(realized, &cf).unwrap();
        }
        let t = history.len() as f64;
        for k in 0..3 {
            let batch: f64 = history.iter().map(|h| h[k]).sum::<f64>() / t;
            let scale = batch.abs().max(1.0);
            prop_assert!((state.avg_regret[k] - batch).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn regrets_bounded_by_payoff_range(
        steps in vec(vec(-7.0f64..7.0, 4), 1..200),
        played in 0usize..4,
    ) {
        // with all payoffs in [-M, M], every average regret stays in [-2M, 2M]
        let mut state = LearnerState::new(4);
        for mut cf in steps {
            cf[played] = cf[played].clamp(-7.0, 7.0);
            let realized = cf[played];
            state.update_regrets(realized, &cf).unwrap();
        }
        for &r in &state.avg_regret {
            prop_assert!(r.abs() <= 14.0 + 1e-9);
        }
    }

    #[test]
    fn messages_reconstruct_counterfactual_welfare((tensor, actions) in small_game()) {
        let game = from_matrix(tensor).unwrap();
        let profile = ActionProfile::new(actions);
        for receiver in 0..game.n_players() {
            for k in 0..game.action_count(receiver) {
                let mut total = game.counterfactual_payoff(&profile, receiver, k).unwrap();
                for sender in 0..game.n_players() {
                    if sender != receiver {
                        total += build_message(&game, &profile, sender, receiver).unwrap()[k];
                    }
                }
                let direct = game.counterfactual_global(&profile, receiver, k).unwrap();
                let scale = direct.abs().max(1.0);
                prop_assert!((total - direct).abs() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn empirical_distribution_normalizes(
        raw in vec(vec(0usize..3, 2), 1..60),
    ) {
        let profiles: Vec<ActionProfile> =
            raw.into_iter().map(ActionProfile::new).collect();
        let dist = EmpiricalDistribution::from_profiles(&profiles);
        prop_assert_eq!(dist.total(), profiles.len() as u64);
        let sum: f64 = dist.iter().map(|(_, p)| p).sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
    }
}
