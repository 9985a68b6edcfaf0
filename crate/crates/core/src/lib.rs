//! Contextual bandits with a hybrid linear + adaptive k-NN reward model and
//! temporal-attention exploration, the usual baseline suite, bandit
//! environments and a benchmark harness.

pub mod attention;
pub mod env;
pub mod error;
pub mod harness;
pub mod knn;
pub mod linear;
pub mod metrics;
pub mod policies;
pub mod policy;
pub mod types;

pub use error::{BanditError, Result};
pub use policies::{build_policy, HybridUcb, PolicyConfig, PolicySpec};
pub use policy::{Decision, Policy, ScoreBreakdown, TieBreak};
pub use types::{Context, RngState, RoundRecord};
