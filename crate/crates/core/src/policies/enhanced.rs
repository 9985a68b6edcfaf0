//! Classic baselines augmented with the adaptive k-NN estimate and a
//! count-based softmax attention weight on their exploration knob.

use serde::{Deserialize, Serialize};

use super::baselines::{epsilon_choice, from_unit, BetaThompson, EpsilonGreedy, LinThompson};
use crate::attention::softmax_attention;
use crate::error::{BanditError, Result};
use crate::knn::{select_k, NeighborStore};
use crate::policy::{argmax, Decision, Policy};
use crate::types::Context;

/// The policy being enhanced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EnhancedBase {
    EpsilonGreedy(EpsilonGreedy),
    BetaThompson(BetaThompson),
    LinThompson(LinThompson),
}

impl EnhancedBase {
    fn inner(&self) -> &dyn Policy {
        match self {
            EnhancedBase::EpsilonGreedy(p) => p,
            EnhancedBase::BetaThompson(p) => p,
            EnhancedBase::LinThompson(p) => p,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn Policy {
        match self {
            EnhancedBase::EpsilonGreedy(p) => p,
            EnhancedBase::BetaThompson(p) => p,
            EnhancedBase::LinThompson(p) => p,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EnhancedBase::EpsilonGreedy(_) => "eps-greedy",
            EnhancedBase::BetaThompson(_) => "beta-thompson",
            EnhancedBase::LinThompson(_) => "linthompson",
        }
    }
}

/// An enhanced baseline.
///
/// Values are `base value + knn` with the k-NN term chosen adaptively as in
/// the hybrid policy. The exploration knob of arm `a` (ε for the greedy arm,
/// the posterior spread otherwise) is scaled by its softmax attention weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnhancedPolicy {
    id: String,
    base: EnhancedBase,
    gamma_sm: f64,
    theta_min: usize,
    theta_max: usize,
    variance_scale: f64,
    stores: Vec<NeighborStore>,
    updates: u64,
}

impl EnhancedPolicy {
    pub fn new(
        base: EnhancedBase,
        gamma_sm: f64,
        theta_min: usize,
        theta_max: usize,
        variance_scale: f64,
        store_capacity: Option<usize>,
    ) -> Result<Self> {
        if !(gamma_sm.is_finite() && gamma_sm > 0.0) {
            return Err(BanditError::param(
                "gamma_sm",
                format!("must be > 0, got {gamma_sm}"),
            ));
        }
        if theta_min == 0 || theta_min > theta_max {
            return Err(BanditError::param(
                "theta",
                format!("need 1 <= theta_min <= theta_max, got ({theta_min}, {theta_max})"),
            ));
        }
        if !(variance_scale.is_finite() && variance_scale > 0.0) {
            return Err(BanditError::param(
                "variance_scale",
                format!("must be > 0, got {variance_scale}"),
            ));
        }
        let (arms, dim) = (base.inner().arms(), base.inner().dim());
        let stores = (0..arms)
            .map(|_| NeighborStore::new(dim, store_capacity))
            .collect::<Result<_>>()?;
        Ok(EnhancedPolicy {
            id: format!("enhanced-{}", base.name()),
            base,
            gamma_sm,
            theta_min,
            theta_max,
            variance_scale,
            stores,
            updates: 0,
        })
    }

    pub fn base(&self) -> &EnhancedBase {
        &self.base
    }

    pub fn store(&self, arm: usize) -> &NeighborStore {
        &self.stores[arm]
    }

    /// Current softmax attention weights over arms.
    pub fn attention_weights(&self) -> Result<Vec<f64>> {
        let counts: Vec<u64> = (0..self.arms()).map(|a| self.pulls(a)).collect();
        softmax_attention(&counts, self.gamma_sm)
    }

    /// Adaptive k-NN score of every arm (0 where the gate is not met).
    pub fn knn_scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.stores
            .iter()
            .map(|s| {
                let k = select_k(
                    s.reward_variance() * self.variance_scale,
                    self.theta_min,
                    self.theta_max,
                )?;
                Ok(s.score(x, k)?.score)
            })
            .collect()
    }
}

impl Policy for EnhancedPolicy {
    fn id(&self) -> &str {
        &self.id
    }

    fn arms(&self) -> usize {
        self.base.inner().arms()
    }

    fn dim(&self) -> usize {
        self.base.inner().dim()
    }

    fn decide(&self, context: &Context, round: u64) -> Result<Decision> {
        self.check_context(context)?;
        let weights = self.attention_weights()?;
        let knn = self.knn_scores(context)?;
        let (arm, scores) = match &self.base {
            EnhancedBase::EpsilonGreedy(p) => {
                let values: Vec<f64> = p.means().iter().zip(&knn).map(|(m, k)| m + k).collect();
                let greedy = argmax(&values, p.tie_break, round)?;
                let arm = epsilon_choice(
                    &values,
                    p.epsilon * weights[greedy],
                    p.rng,
                    p.tie_break,
                    round,
                )?;
                (arm, values)
            }
            EnhancedBase::BetaThompson(p) => {
                let scores: Vec<f64> = p
                    .draw(round)
                    .into_iter()
                    .zip(weights.iter().zip(&knn))
                    .map(|((sample, mean), (w, k))| {
                        from_unit(mean + w * (sample - mean), p.range()) + k
                    })
                    .collect();
                (argmax(&scores, p.tie_break, round)?, scores)
            }
            EnhancedBase::LinThompson(p) => {
                let scores: Vec<f64> = p
                    .draw(context, round)?
                    .into_iter()
                    .zip(weights.iter().zip(&knn))
                    .map(|((m, z, width), (w, k))| m + p.v() * w * width * z + k)
                    .collect();
                (argmax(&scores, p.tie_break, round)?, scores)
            }
        };
        Ok(Decision {
            arm,
            scores,
            breakdown: None,
        })
    }

    fn update(&mut self, arm: usize, context: &Context, reward: f64) -> Result<()> {
        self.check_update(arm, context, reward)?;
        self.base.inner_mut().update(arm, context, reward)?;
        self.stores[arm].insert(context, reward, self.updates)?;
        self.updates += 1;
        Ok(())
    }

    fn pulls(&self, arm: usize) -> u64 {
        self.base.inner().pulls(arm)
    }

    fn box_clone(&self) -> Box<dyn Policy> {
        Box::new(self.clone())
    }
}
