//! The learning loops: SORM (welfare-seeking regret matching with decaying
//! exploration and an adaptive satisfaction threshold), and the two
//! baselines LURM (standard regret matching on local utilities) and GURM
//! (regret matching on the global utility).
//!
//! One iteration proceeds in lockstep: every player samples an action,
//! counterfactual payoffs are computed for every player's alternatives,
//! the shared threshold is raised to the best counterfactual welfare seen,
//! regrets are updated as running time-averages, and strategies are
//! rebuilt. A player whose realized welfare meets the threshold locks onto
//! its current action; the run ends when the satisfaction ratio reaches
//! one, and restarts with a raised threshold when a round converges short
//! of it.
//!
//! All randomness flows through a single seeded generator in a fixed draw
//! order, so `(game, config, seed)` pins the whole trace bit-for-bit.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::comms::CommsLedger;
use crate::game::{ActionProfile, GameError, GameSpec};
use crate::rand_util;

/// A strategy is treated as pure when one action holds this much mass.
pub const PURE_MASS_TOL: f64 = 1e-6;

/// Errors from configuration validation and the learning loops.
#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    InvalidConfig(String),
    /// Counterfactual vector length does not match the action count.
    RegretLength { expected: usize, actual: usize },
    Game(GameError),
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidConfig(msg) => write!(f, "invalid dynamics configuration: {msg}"),
            Self::RegretLength { expected, actual } => {
                write!(f, "counterfactual vector has {actual} entries, expected {expected}")
            }
            Self::Game(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for DynamicsError {}

impl From<GameError> for DynamicsError {
    fn from(e: GameError) -> Self {
        Self::Game(e)
    }
}

/// The three learning rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Algorithm {
    /// Welfare-seeking regret matching: global regrets, decaying
    /// exploration, adaptive threshold with lock-in, multi-round restarts.
    Sorm,
    /// Standard regret matching on local utilities.
    Lurm,
    /// Standard regret matching on the global utility.
    Gurm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Sorm, Algorithm::Lurm, Algorithm::Gurm];

    pub fn name(self) -> &'static str {
        match self {
            Self::Sorm => "sorm",
            Self::Lurm => "lurm",
            Self::Gurm => "gurm",
        }
    }

    /// Runs this algorithm on a game.
    pub fn run(self, game: &GameSpec, config: &DynamicsConfig) -> Result<RunOutcome, DynamicsError> {
        match self {
            Self::Sorm => sorm_run(game, config),
            Self::Lurm => lurm_run(game, config),
            Self::Gurm => gurm_run(game, config),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sorm" | "SORM" => Ok(Self::Sorm),
            "lurm" | "LURM" => Ok(Self::Lurm),
            "gurm" | "GURM" => Ok(Self::Gurm),
            other => Err(alloc::format!("unknown algorithm '{other}'")),
        }
    }
}

/// Tunables shared by all three learning rules.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct DynamicsConfig {
    /// Exploration scale; the exploration rate at iteration `t` is
    /// `delta / t^gamma`, split uniformly over the player's actions.
    pub delta: f64,
    /// Exploration decay exponent.
    pub gamma: f64,
    /// Maximum iterations per round.
    pub max_iterations: usize,
    /// Maximum rounds of the outer threshold-raising loop.
    pub max_rounds: usize,
    /// Extra threshold escalation applied after a round freezes on a pure
    /// profile short of satisfaction. The observation ratchet raises the
    /// threshold on its own, so the default adds nothing; a positive step
    /// forces frozen runs to chase strictly better welfare.
    pub delta_u: f64,
    /// Whether small strategy probabilities are pruned (large games).
    pub prune: bool,
    /// Probabilities at or below this are pruned when pruning is on.
    pub prune_eps: f64,
    /// Consecutive identical pure profiles required to call convergence.
    pub convergence_window: usize,
    /// Consecutive timed-out rounds tolerated after a satisfied lock
    /// before the threshold ladder is declared exhausted. Each retry round
    /// is another chance to beat the recorded lock.
    pub ladder_patience: usize,
    /// Iterations at the start of the first round during which the
    /// satisfaction lock stays disengaged, letting the threshold observe
    /// a sample of play before any verdict. Without it, a run whose very
    /// first profile is a welfare-local-maximum would freeze there. Later
    /// rounds inherit a mature threshold and lock from the start.
    pub lock_warmup: usize,
    pub seed: u64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            delta: 0.5,
            gamma: 0.5,
            max_iterations: 10_000,
            max_rounds: 50,
            delta_u: 0.0,
            prune: false,
            prune_eps: 0.03,
            convergence_window: 50,
            ladder_patience: 1,
            lock_warmup: 50,
            seed: 0,
        }
    }
}

impl DynamicsConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(DynamicsError::InvalidConfig("delta must lie in (0, 1]".into()));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(DynamicsError::InvalidConfig("gamma must lie in (0, 1]".into()));
        }
        if self.max_iterations == 0 {
            return Err(DynamicsError::InvalidConfig("max_iterations must be positive".into()));
        }
        if self.max_rounds == 0 {
            return Err(DynamicsError::InvalidConfig("max_rounds must be positive".into()));
        }
        if !(self.delta_u >= 0.0 && self.delta_u.is_finite()) {
            return Err(DynamicsError::InvalidConfig(
                "delta_u must be non-negative and finite".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.prune_eps) {
            return Err(DynamicsError::InvalidConfig("prune_eps must lie in [0, 1)".into()));
        }
        if self.convergence_window == 0 {
            return Err(DynamicsError::InvalidConfig(
                "convergence_window must be positive".into(),
            ));
        }
        if self.ladder_patience == 0 {
            return Err(DynamicsError::InvalidConfig(
                "ladder_patience must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Exploration rate `delta / t^gamma` at a 1-based iteration.
    pub fn exploration_rate(&self, t: u64) -> f64 {
        self.delta / libm::pow(t as f64, self.gamma)
    }
}

/// One player's regret vector, mixed strategy, and lock state.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    /// Running time-average regret per own action, in utility units.
    pub avg_regret: Vec<f64>,
    /// Current mixed strategy over own actions.
    pub strategy: Vec<f64>,
    /// Whether the satisfaction threshold froze this player last update.
    pub locked: bool,
    /// Number of regret updates applied.
    pub t: u64,
    /// The action sampled this iteration.
    pub last_action: usize,
}

impl LearnerState {
    pub fn new(n_actions: usize) -> Self {
        Self {
            avg_regret: vec![0.0; n_actions],
            strategy: vec![1.0 / n_actions as f64; n_actions],
            locked: false,
            t: 0,
            last_action: 0,
        }
    }

    /// Back to uniform strategy and zero regrets (round restart).
    pub fn reset(&mut self) {
        let n = self.avg_regret.len();
        self.avg_regret.fill(0.0);
        self.strategy.fill(1.0 / n as f64);
        self.locked = false;
        self.t = 0;
        self.last_action = 0;
    }

    /// Folds one iteration into the average regrets:
    /// `R(k) <- R(k) + (instant(k) - R(k)) / t` with
    /// `instant(k) = counterfactual[k] - realized`.
    ///
    /// The caller supplies `counterfactual[last_action] == realized`, so
    /// the played action contributes zero this step.
    pub fn update_regrets(&mut self, realized: f64, counterfactual: &[f64]) -> Result<(), DynamicsError> {
        if counterfactual.len() != self.avg_regret.len() {
            return Err(DynamicsError::RegretLength {
                expected: self.avg_regret.len(),
                actual: counterfactual.len(),
            });
        }
        self.t += 1;
        let t = self.t as f64;
        for (r, &cf) in self.avg_regret.iter_mut().zip(counterfactual) {
            let instant = cf - realized;
            *r += (instant - *r) / t;
        }
        Ok(())
    }

    /// Builds the next strategy from the current regrets.
    ///
    /// Locked players put probability one on their current action. With no
    /// positive regret the strategy resets to uniform. Otherwise the
    /// positive parts are normalized, and when `explore` is set the result
    /// is mixed with a uniform component of weight `delta / t^gamma`.
    pub fn next_strategy(
        &self,
        t: u64,
        config: &DynamicsConfig,
        lock: bool,
        explore: bool,
    ) -> (Vec<f64>, StrategyBranch) {
        let n = self.avg_regret.len();
        if lock {
            let mut probs = vec![0.0; n];
            probs[self.last_action] = 1.0;
            return (probs, StrategyBranch::Locked);
        }
        let positive_sum: f64 = self.avg_regret.iter().map(|&r| r.max(0.0)).sum();
        if positive_sum == 0.0 {
            return (vec![1.0 / n as f64; n], StrategyBranch::UniformReset);
        }
        let probs = if explore {
            let rate = config.exploration_rate(t);
            let floor = rate / n as f64;
            self.avg_regret
                .iter()
                .map(|&r| (1.0 - rate) * (r.max(0.0) / positive_sum) + floor)
                .collect()
        } else {
            self.avg_regret
                .iter()
                .map(|&r| r.max(0.0) / positive_sum)
                .collect()
        };
        (probs, StrategyBranch::RegretMatching)
    }
}

/// Which rule produced a strategy update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyBranch {
    Locked,
    UniformReset,
    RegretMatching,
}

/// Zeroes probabilities at or below `eps` and renormalizes. If nothing
/// survives, the largest entry (lowest index on ties) is kept at one.
pub fn prune_strategy(strategy: &[f64], eps: f64) -> Vec<f64> {
    let kept_mass: f64 = strategy.iter().filter(|&&p| p > eps).sum();
    if kept_mass > 0.0 {
        return strategy
            .iter()
            .map(|&p| if p > eps { p / kept_mass } else { 0.0 })
            .collect();
    }
    let mut best = 0;
    for (k, &p) in strategy.iter().enumerate() {
        if p > strategy[best] {
            best = k;
        }
    }
    let mut probs = vec![0.0; strategy.len()];
    probs[best] = 1.0;
    probs
}

/// The synchronized satisfaction threshold and best-so-far tracker.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ThresholdMonitor {
    /// The satisfaction threshold `U`; never decreases over a run.
    pub threshold: f64,
    /// Escalation step applied after unsatisfied freezes.
    pub delta_u: f64,
    /// Ratio of realized welfare to the threshold, zero while `U` is zero.
    pub omega: f64,
    /// Highest-welfare profile visited so far.
    pub best_profile: Option<ActionProfile>,
    /// Welfare of `best_profile`.
    pub best_welfare: f64,
}

impl ThresholdMonitor {
    pub fn new(step: f64) -> Self {
        Self {
            threshold: 0.0,
            delta_u: step,
            omega: 0.0,
            best_profile: None,
            best_welfare: f64::NEG_INFINITY,
        }
    }

    /// Raises the threshold past its current value, applied after a round
    /// ends satisfied so the next round must find strictly better welfare.
    /// A configured step is added as-is; the zero default moves one ulp.
    pub fn raise_step(&mut self) {
        if self.delta_u > 0.0 {
            self.threshold += self.delta_u;
        } else {
            self.threshold = self.threshold.next_up();
        }
    }

    /// Raises the threshold to the best counterfactual welfare observed
    /// this iteration; never lowers it.
    pub fn observe(&mut self, max_counterfactual: f64) {
        if max_counterfactual > self.threshold {
            self.threshold = max_counterfactual;
        }
    }

    /// Updates and returns the satisfaction ratio for realized welfare.
    pub fn satisfaction(&mut self, realized_welfare: f64) -> f64 {
        self.omega = if self.threshold > 0.0 {
            realized_welfare / self.threshold
        } else {
            0.0
        };
        self.omega
    }

    /// Tracks the highest-welfare profile visited.
    pub fn track_best(&mut self, actions: &[usize], welfare: f64) {
        if self.best_profile.is_none() || welfare > self.best_welfare {
            self.best_profile = Some(ActionProfile::new(actions.to_vec()));
            self.best_welfare = welfare;
        }
    }
}

/// The pure profile induced by near-one-hot strategies, or `None` if any
/// player still mixes. Ties in the argmax resolve to the lowest index.
pub fn induced_pure_profile(strategies: &[Vec<f64>]) -> Option<Vec<usize>> {
    let mut profile = Vec::with_capacity(strategies.len());
    for strategy in strategies {
        let mut best = 0;
        for (k, &p) in strategy.iter().enumerate() {
            if p > strategy[best] {
                best = k;
            }
        }
        if strategy[best] < 1.0 - PURE_MASS_TOL {
            return None;
        }
        profile.push(best);
    }
    Some(profile)
}

/// Streaming pure-convergence detector: fires once the induced pure
/// profile has been identical for `window` consecutive observations.
#[derive(Debug, Clone)]
pub struct ConvergenceDetector {
    window: usize,
    streak: usize,
    last: Option<Vec<usize>>,
}

impl ConvergenceDetector {
    pub fn new(window: usize) -> Self {
        Self {
            window,
            streak: 0,
            last: None,
        }
    }

    /// Feeds one iteration's strategies; returns true on convergence.
    pub fn observe(&mut self, strategies: &[Vec<f64>]) -> bool {
        match induced_pure_profile(strategies) {
            None => {
                self.streak = 0;
                self.last = None;
                false
            }
            Some(profile) => {
                if self.last.as_deref() == Some(profile.as_slice()) {
                    self.streak += 1;
                } else {
                    self.last = Some(profile);
                    self.streak = 1;
                }
                self.streak >= self.window
            }
        }
    }
}

/// One iteration of a run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct IterationRecord {
    /// Outer-loop round, 1-based.
    pub round: u32,
    /// Iteration within the round, 1-based.
    pub t: u32,
    pub profile: ActionProfile,
    /// Realized social welfare at the sampled profile.
    pub global_utility: f64,
    /// Threshold `U` after this iteration (zero for the baselines).
    pub threshold: f64,
    /// Satisfaction ratio after this iteration (zero for the baselines).
    pub omega: f64,
    /// Largest average regret over all players and actions.
    pub max_avg_regret: f64,
    /// Whether every strategy was pure after this iteration's update.
    pub pure_profile: bool,
    /// Counterfactual payoff entries exchanged so far.
    pub cumulative_queries: u64,
}

/// Per-iteration history of one run.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RunTrace {
    pub records: Vec<IterationRecord>,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_profile(&self) -> Option<&ActionProfile> {
        self.records.last().map(|r| &r.profile)
    }

    pub fn final_welfare(&self) -> Option<f64> {
        self.records.last().map(|r| r.global_utility)
    }
}

/// Result of one run of any of the three algorithms.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub algorithm: Algorithm,
    /// The best satisfied lock, or the best visited profile when the run
    /// stopped without satisfaction; for the baselines, the last profile.
    pub final_profile: ActionProfile,
    /// Social welfare of `final_profile`.
    pub final_welfare: f64,
    pub final_strategies: Vec<Vec<f64>>,
    pub trace: RunTrace,
    /// SORM: satisfaction reached; baselines: pure convergence detected.
    pub converged: bool,
    /// Total iteration count at the terminal convergence detection.
    pub iterations_to_convergence: Option<u64>,
    /// Rounds actually played (always 1 for the baselines).
    pub rounds: u32,
    /// Threshold state; `None` for the baselines.
    pub monitor: Option<ThresholdMonitor>,
    pub ledger: CommsLedger,
}

struct EngineOpts {
    algorithm: Algorithm,
    global_signal: bool,
    explore: bool,
    threshold: bool,
    prune: bool,
    multi_round: bool,
}

/// Runs the full two-phase welfare-seeking procedure.
///
/// Rounds of threshold-guided regret matching climb a ladder of certified
/// locks: whenever a round ends satisfied (the locked profile matches the
/// best welfare any observed deviation could reach), the lock is recorded
/// and the threshold is raised strictly, so the next round must do
/// better. The run returns the best recorded lock once a full round times
/// out with nothing reaching the bar, or when `max_rounds` is exhausted.
/// If no round ever satisfied the threshold, the best visited profile is
/// returned with `converged = false`.
pub fn sorm_run(game: &GameSpec, config: &DynamicsConfig) -> Result<RunOutcome, DynamicsError> {
    run_engine(
        game,
        config,
        EngineOpts {
            algorithm: Algorithm::Sorm,
            global_signal: true,
            explore: true,
            threshold: true,
            prune: config.prune,
            multi_round: true,
        },
    )
}

/// Standard regret matching on local utilities: no exploration, no
/// threshold, no lock, a single round.
pub fn lurm_run(game: &GameSpec, config: &DynamicsConfig) -> Result<RunOutcome, DynamicsError> {
    run_engine(
        game,
        config,
        EngineOpts {
            algorithm: Algorithm::Lurm,
            global_signal: false,
            explore: false,
            threshold: false,
            prune: false,
            multi_round: false,
        },
    )
}

/// Standard regret matching driven by the global utility.
pub fn gurm_run(game: &GameSpec, config: &DynamicsConfig) -> Result<RunOutcome, DynamicsError> {
    run_engine(
        game,
        config,
        EngineOpts {
            algorithm: Algorithm::Gurm,
            global_signal: true,
            explore: false,
            threshold: false,
            prune: false,
            multi_round: false,
        },
    )
}

fn run_engine(
    game: &GameSpec,
    config: &DynamicsConfig,
    opts: EngineOpts,
) -> Result<RunOutcome, DynamicsError> {
    config.validate()?;
    let n = game.n_players();
    let counts = game.action_counts().to_vec();
    let mut rng = rand_util::seeded_rng(config.seed);

    let mut monitor = ThresholdMonitor::new(config.delta_u);
    let mut ledger = CommsLedger::new();
    let mut trace = RunTrace::default();
    let mut states: Vec<LearnerState> = counts.iter().map(|&m| LearnerState::new(m)).collect();

    let mut profile = vec![0usize; n];
    let mut scratch = vec![0usize; n];
    let mut counterfactuals: Vec<Vec<f64>> = counts.iter().map(|&m| vec![0.0; m]).collect();

    let rounds_cap = if opts.multi_round { config.max_rounds } else { 1 };
    let mut total_iterations: u64 = 0;
    let mut converged = false;
    let mut convergence_at: Option<u64> = None;
    let mut rounds_used: u32 = 0;
    // Best satisfied lock so far: (profile, strategies, welfare).
    let mut best_lock: Option<(ActionProfile, Vec<Vec<f64>>, f64)> = None;
    // Best visited profile with no welfare-improving unilateral deviation;
    // the fallback answer when no round ever satisfies the threshold.
    let mut best_local_max: Option<(ActionProfile, f64)> = None;
    let mut idle_rounds = 0usize;

    'rounds: for round in 1..=rounds_cap {
        rounds_used = round as u32;
        for state in &mut states {
            state.reset();
        }
        let mut detector = ConvergenceDetector::new(config.convergence_window);
        let mut froze = false;

        for t in 1..=config.max_iterations {
            total_iterations += 1;

            // Sample the joint profile, players in index order.
            for (i, state) in states.iter_mut().enumerate() {
                profile[i] = rand_util::sample_index(&mut rng, &state.strategy);
                state.last_action = profile[i];
            }

            // Counterfactual payoffs for every player's alternatives.
            scratch.copy_from_slice(&profile);
            for i in 0..n {
                let played = scratch[i];
                for k in 0..counts[i] {
                    scratch[i] = k;
                    counterfactuals[i][k] = if opts.global_signal {
                        game.welfare_raw(&scratch)
                    } else {
                        game.payoff_raw(i, &scratch)
                    };
                }
                scratch[i] = played;
            }
            let realized_welfare = game.welfare_raw(&profile);

            // Threshold ratchet and lock condition. The identity deviation
            // is among the counterfactuals, so U >= W(a) always holds and
            // the lock fires exactly when this profile matches the best
            // welfare seen. The lock stays off during the warmup.
            let mut lock = false;
            if opts.threshold {
                let mut max_cf = f64::NEG_INFINITY;
                for row in &counterfactuals {
                    for &v in row {
                        if v > max_cf {
                            max_cf = v;
                        }
                    }
                }
                monitor.observe(max_cf);
                monitor.track_best(&profile, realized_welfare);
                if realized_welfare >= max_cf
                    && best_local_max.as_ref().is_none_or(|(_, w)| realized_welfare > *w)
                {
                    best_local_max = Some((ActionProfile::new(profile.clone()), realized_welfare));
                }
                let warm = round > 1 || t > config.lock_warmup;
                lock = warm && realized_welfare >= monitor.threshold;
            }

            // Time-averaged regret updates.
            for (i, state) in states.iter_mut().enumerate() {
                let realized = if opts.global_signal {
                    realized_welfare
                } else {
                    counterfactuals[i][profile[i]]
                };
                state.update_regrets(realized, &counterfactuals[i])?;
            }

            // Strategy updates.
            for state in states.iter_mut() {
                let (mut next, branch) = state.next_strategy(t as u64, config, lock, opts.explore);
                if opts.prune && branch == StrategyBranch::RegretMatching {
                    next = prune_strategy(&next, config.prune_eps);
                }
                state.strategy = next;
                state.locked = branch == StrategyBranch::Locked;
            }

            let omega = if opts.threshold {
                monitor.satisfaction(realized_welfare)
            } else {
                0.0
            };

            if opts.global_signal {
                ledger.record_iteration_mixed(&counts);
            }

            let mut max_avg_regret = f64::NEG_INFINITY;
            for state in &states {
                for &r in &state.avg_regret {
                    if r > max_avg_regret {
                        max_avg_regret = r;
                    }
                }
            }

            let strategies: Vec<Vec<f64>> = states.iter().map(|s| s.strategy.clone()).collect();
            let pure = induced_pure_profile(&strategies).is_some();
            trace.records.push(IterationRecord {
                round: round as u32,
                t: t as u32,
                profile: ActionProfile::new(profile.clone()),
                global_utility: realized_welfare,
                threshold: if opts.threshold { monitor.threshold } else { 0.0 },
                omega,
                max_avg_regret,
                pure_profile: pure,
                cumulative_queries: ledger.cumulative_queries,
            });

            let verdicts_active = !opts.threshold || round > 1 || t > config.lock_warmup;
            if verdicts_active && detector.observe(&strategies) {
                froze = true;
                if convergence_at.is_none() {
                    convergence_at = Some(total_iterations);
                }
                break;
            }
        }

        if opts.threshold {
            let last = trace.records.last().expect("at least one iteration ran");
            let warm = round > 1 || (last.t as usize) > config.lock_warmup;
            let satisfied = monitor.omega >= 1.0 && warm;
            if satisfied {
                // A certified rung: the locked profile attains the best
                // welfare any observed deviation could reach. Record it,
                // demand strictly more, and let the next round try to beat
                // it; the satisfied locks over a run only improve.
                let strategies = states.iter().map(|s| s.strategy.clone()).collect();
                best_lock = Some((last.profile.clone(), strategies, last.global_utility));
                monitor.raise_step();
                idle_rounds = 0;
            } else if !froze {
                // A full round timed out with nothing reaching the bar.
                // Once enough consecutive rounds go idle after a recorded
                // lock, the ladder is exhausted.
                if best_lock.is_some() {
                    idle_rounds += 1;
                    if idle_rounds >= config.ladder_patience {
                        break 'rounds;
                    }
                }
            } else {
                // An unsatisfied freeze (pruned play collapsing early)
                // restarts at the same bar.
                idle_rounds = 0;
            }
        } else {
            converged = convergence_at.is_some();
        }
    }

    let last_record = trace.records.last().expect("at least one iteration ran");
    let (final_profile, final_welfare, final_strategies) = match (best_lock, best_local_max) {
        (Some((profile, strategies, welfare)), _) if opts.threshold => {
            converged = true;
            (profile, welfare, strategies)
        }
        (None, Some((profile, welfare))) if opts.threshold => {
            // Unsatisfied run: fall back to the best equilibrium candidate
            // seen, a visited profile none of whose unilateral deviations
            // improved welfare.
            let strategies = states.iter().map(|s| s.strategy.clone()).collect();
            (profile, welfare, strategies)
        }
        _ => {
            let strategies: Vec<Vec<f64>> = states.iter().map(|s| s.strategy.clone()).collect();
            if opts.threshold && monitor.best_profile.is_some() {
                let profile = monitor.best_profile.clone().expect("tracked above");
                (profile, monitor.best_welfare, strategies)
            } else {
                (last_record.profile.clone(), last_record.global_utility, strategies)
            }
        }
    };

    Ok(RunOutcome {
        algorithm: opts.algorithm,
        final_profile,
        final_welfare,
        final_strategies,
        trace,
        converged,
        iterations_to_convergence: convergence_at,
        rounds: rounds_used,
        monitor: if opts.threshold { Some(monitor) } else { None },
        ledger,
    })
}
