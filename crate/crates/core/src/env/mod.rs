//! Sources of (context, feedback) rounds.

mod classification;
mod replay;
mod synthetic;

pub use classification::{load_classification_csv, two_class_with_bumps, ClassificationBanditEnv};
pub(crate) use replay::open_error as csv_open_error;
pub use replay::{
    load_news_csv, replay_step, LogRow, ReplayLogEnv, ReplayProtocol, NEWS_ARMS, NEWS_COLUMNS,
};
pub use synthetic::{synthetic_hybrid, Bump, SyntheticHybridEnv, SyntheticParams};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::types::Context;

/// What the environment returns after an arm is played.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundFeedback {
    pub reward: f64,
    /// False when the round produced no usable feedback (replay mismatch or
    /// exhausted log); the policy must not be updated.
    pub step_consumed: bool,
    /// Realized reward of the best arm this round, when an oracle exists.
    pub oracle_reward: Option<f64>,
    /// Expected reward of the played arm, when known.
    pub expected_reward: Option<f64>,
    /// The context the reward belongs to, when it differs from the one shown
    /// before selection (scan replay).
    pub observed_context: Option<Context>,
}

impl RoundFeedback {
    pub fn rejected() -> Self {
        RoundFeedback {
            reward: 0.0,
            step_consumed: false,
            oracle_reward: None,
            expected_reward: None,
            observed_context: None,
        }
    }
}

/// A bandit problem. Environments are immutable; each run draws its own
/// [`Episode`] so runs can execute concurrently.
pub trait Environment: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn arms(&self) -> usize;

    /// Closed interval every reward lies in.
    fn reward_range(&self) -> (f64, f64);

    /// Whether feedback carries `oracle_reward`, making regret exact.
    fn has_oracle(&self) -> bool;

    /// Number of rounds available, if finite.
    fn max_rounds(&self) -> Option<usize> {
        None
    }

    fn episode(&self, seed: u64) -> Result<Box<dyn Episode + '_>>;

    /// Descriptive fields echoed into result metadata.
    fn metadata(&self) -> serde_json::Value {
        serde_json::json!({ "name": self.name(), "dim": self.dim(), "arms": self.arms() })
    }
}

/// One pass through an environment.
pub trait Episode {
    /// The next context, or `None` once the environment is exhausted.
    fn next_context(&mut self) -> Result<Option<Context>>;

    /// Plays `arm` against the most recent context.
    fn feedback(&mut self, arm: usize) -> Result<RoundFeedback>;
}
