//! LNUCB-TA, its ablation variants, the baseline suite and the enhanced
//! baselines, all behind [`crate::policy::Policy`].

mod baselines;
mod enhanced;
mod hybrid;
mod registry;

pub use baselines::{
    BetaThompson, EpsilonGreedy, KlUcb, KnnIndex, KnnUcb, LinThompson, LinUcb, Ucb1,
};
pub use enhanced::{EnhancedBase, EnhancedPolicy};
pub use hybrid::{hybrid_score, ArmModel, HybridUcb};
pub use registry::{
    accepts_param, build_policy, canonical_param, PolicyParams, PolicySpec, POLICY_IDS,
};

use serde::{Deserialize, Serialize};

use crate::error::{BanditError, Result};
use crate::policy::TieBreak;

/// How the width bonus of the hybrid score is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exploration {
    /// `α₀/(N+1)·(κg + (1−κ)n)` per arm.
    Attention,
    /// Constant `α₀`.
    Fixed,
}

/// Which nonlinear component the hybrid score carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KnnMode {
    Off,
    /// `k` interpolated between the thresholds from the reward variance.
    Adaptive,
    /// Constant `k = theta_max`.
    Fixed,
}

/// Tunables of the hybrid UCB family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub lambda: f64,
    pub alpha0: f64,
    pub kappa: f64,
    pub theta_min: usize,
    pub theta_max: usize,
    pub gamma_cov: f64,
    pub variance_scale: f64,
    pub floor_alpha_at_zero: bool,
    pub tie_break: TieBreak,
    pub store_capacity: Option<usize>,
    pub exploration: Exploration,
    pub knn: KnnMode,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            lambda: 1.0,
            alpha0: 1.0,
            kappa: 0.5,
            theta_min: 1,
            theta_max: 5,
            gamma_cov: 0.0,
            variance_scale: 1.0,
            floor_alpha_at_zero: false,
            tie_break: TieBreak::LowestIndex,
            store_capacity: None,
            exploration: Exploration::Attention,
            knn: KnnMode::Adaptive,
        }
    }
}

impl PolicyConfig {
    /// Plain LinUCB expressed in the hybrid family: fixed `α`, no k-NN.
    pub fn linucb(alpha: f64) -> Self {
        PolicyConfig {
            alpha0: alpha,
            exploration: Exploration::Fixed,
            knn: KnnMode::Off,
            ..PolicyConfig::default()
        }
    }

    /// Ablation variant (b): LinUCB with the attention schedule.
    pub fn linucb_attention(alpha0: f64) -> Self {
        PolicyConfig {
            exploration: Exploration::Attention,
            ..PolicyConfig::linucb(alpha0)
        }
    }

    /// Ablation variant (c): LinUCB with the adaptive k-NN component.
    pub fn linucb_adaptive_knn(alpha: f64) -> Self {
        PolicyConfig {
            knn: KnnMode::Adaptive,
            ..PolicyConfig::linucb(alpha)
        }
    }

    /// Full LNUCB-TA with base exploration `alpha0`.
    pub fn lnucb_ta(alpha0: f64) -> Self {
        PolicyConfig {
            alpha0,
            ..PolicyConfig::default()
        }
    }

    /// The no-attention, non-adaptive combination: fixed `α`, fixed `k = theta_max`.
    pub fn lin_knn(alpha: f64) -> Self {
        PolicyConfig {
            knn: KnnMode::Fixed,
            ..PolicyConfig::linucb(alpha)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(BanditError::param(
                    name,
                    format!("must be finite and >= 0, got {v}"),
                ))
            }
        };
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(BanditError::param(
                "lambda",
                format!("must be > 0, got {}", self.lambda),
            ));
        }
        finite_nonneg("alpha0", self.alpha0)?;
        finite_nonneg("gamma_cov", self.gamma_cov)?;
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(BanditError::param(
                "kappa",
                format!("must lie in [0, 1], got {}", self.kappa),
            ));
        }
        if self.theta_min == 0 || self.theta_min > self.theta_max {
            return Err(BanditError::param(
                "theta",
                format!(
                    "need 1 <= theta_min <= theta_max, got ({}, {})",
                    self.theta_min, self.theta_max
                ),
            ));
        }
        if !(self.variance_scale.is_finite() && self.variance_scale > 0.0) {
            return Err(BanditError::param(
                "variance_scale",
                format!("must be > 0, got {}", self.variance_scale),
            ));
        }
        if self.store_capacity == Some(0) {
            return Err(BanditError::param("store_capacity", "must be at least 1"));
        }
        Ok(())
    }
}
