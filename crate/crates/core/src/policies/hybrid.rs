use serde::{Deserialize, Serialize};

use super::{Exploration, KnnMode, PolicyConfig};
use crate::attention::{AttentionParams, RewardStats};
use crate::error::Result;
use crate::knn::{select_k, KnnScore, NeighborStore};
use crate::linear::RidgeState;
use crate::policy::{argmax, Decision, Policy, ScoreBreakdown};
use crate::types::Context;

/// Everything one arm of the hybrid model knows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmModel {
    pub ridge: RidgeState,
    pub neighbors: NeighborStore,
    pub pulls: u64,
}

impl ArmModel {
    pub fn new(dim: usize, config: &PolicyConfig) -> Result<Self> {
        Ok(ArmModel {
            ridge: RidgeState::new(dim, config.lambda, config.gamma_cov)?,
            neighbors: NeighborStore::new(dim, config.store_capacity)?,
            pulls: 0,
        })
    }
}

/// Hybrid UCB score of one arm: `linear + knn + alpha·width`.
///
/// Returns the breakdown together with the raw k-NN query so the caller can
/// reuse the neighbor radius.
pub fn hybrid_score(
    model: &ArmModel,
    arm: usize,
    stats: &RewardStats,
    config: &PolicyConfig,
    x: &[f64],
) -> Result<(ScoreBreakdown, KnnScore)> {
    let linear = model.ridge.predict(x)?;
    let width = model.ridge.width(x)?;
    let knn = match config.knn {
        KnnMode::Off => KnnScore::inactive(),
        KnnMode::Adaptive => {
            let var = model.neighbors.reward_variance() * config.variance_scale;
            let k = select_k(var, config.theta_min, config.theta_max)?;
            model.neighbors.score(x, k)?
        }
        KnnMode::Fixed => model.neighbors.score(x, config.theta_max)?,
    };
    let mut alpha = match config.exploration {
        Exploration::Fixed => config.alpha0,
        Exploration::Attention => AttentionParams {
            alpha0: config.alpha0,
            kappa: config.kappa,
        }
        .exploration_rate(model.pulls, stats.global_mean(), stats.local_mean(arm)?),
    };
    if config.floor_alpha_at_zero {
        alpha = alpha.max(0.0);
    }
    Ok((ScoreBreakdown::new(linear, knn.score, alpha, width), knn))
}

/// LNUCB-TA and every member of its family (LinUCB, the ablation variants,
/// the fixed-k combination), distinguished only by [`PolicyConfig`].
///
/// The ridge part of each arm fits `reward − knn`, where the k-NN term is the
/// one that scored the arm when it was selected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridUcb {
    id: String,
    dim: usize,
    config: PolicyConfig,
    models: Vec<ArmModel>,
    stats: RewardStats,
    updates: u64,
}

impl HybridUcb {
    pub fn new(
        id: impl Into<String>,
        arms: usize,
        dim: usize,
        config: PolicyConfig,
    ) -> Result<Self> {
        config.validate()?;
        let stats = RewardStats::new(arms)?;
        let models = (0..arms)
            .map(|_| ArmModel::new(dim, &config))
            .collect::<Result<Vec<_>>>()?;
        Ok(HybridUcb {
            id: id.into(),
            dim,
            config,
            models,
            stats,
            updates: 0,
        })
    }

    /// LNUCB-TA with the given configuration.
    pub fn lnucb_ta(arms: usize, dim: usize, config: PolicyConfig) -> Result<Self> {
        HybridUcb::new("lnucb-ta", arms, dim, config)
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn model(&self, arm: usize) -> &ArmModel {
        &self.models[arm]
    }

    pub fn stats(&self) -> &RewardStats {
        &self.stats
    }

    pub fn breakdown(&self, context: &Context) -> Result<Vec<ScoreBreakdown>> {
        self.check_context(context)?;
        (0..self.models.len())
            .map(|a| {
                hybrid_score(&self.models[a], a, &self.stats, &self.config, context).map(|(b, _)| b)
            })
            .collect()
    }
}

impl Policy for HybridUcb {
    fn id(&self) -> &str {
        &self.id
    }

    fn arms(&self) -> usize {
        self.models.len()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn decide(&self, context: &Context, round: u64) -> Result<Decision> {
        let breakdown = self.breakdown(context)?;
        let scores: Vec<f64> = breakdown.iter().map(|b| b.ucb).collect();
        let arm = argmax(&scores, self.config.tie_break, round)?;
        Ok(Decision {
            arm,
            scores,
            breakdown: Some(breakdown),
        })
    }

    fn update(&mut self, arm: usize, context: &Context, reward: f64) -> Result<()> {
        self.check_update(arm, context, reward)?;
        // The store is unchanged since selection, so this reproduces the
        // k-NN term that scored the arm this round.
        let (_, knn) = hybrid_score(&self.models[arm], arm, &self.stats, &self.config, context)?;
        let residual = reward - knn.score;
        let e_knn = knn.u_max * knn.u_max;
        let model = &mut self.models[arm];
        model.ridge.update(context, residual, e_knn)?;
        model.neighbors.insert(context, reward, self.updates)?;
        model.pulls += 1;
        self.stats.record(arm, reward)?;
        self.updates += 1;
        Ok(())
    }

    fn pulls(&self, arm: usize) -> u64 {
        self.models[arm].pulls
    }

    fn box_clone(&self) -> Box<dyn Policy> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::BanditError;

    fn ctx(v: &[f64]) -> Context {
        Context::new(v.to_vec()).unwrap()
    }

    #[test]
    fn cold_start_scores_zero_and_picks_arm_zero() {
        let p = HybridUcb::lnucb_ta(3, 2, PolicyConfig::default()).unwrap();
        let d = p.decide(&ctx(&[0.6, 0.8]), 0).unwrap();
        assert_eq!(d.arm, 0);
        for b in d.breakdown.unwrap() {
            assert_eq!((b.linear, b.knn, b.alpha, b.ucb), (0.0, 0.0, 0.0, 0.0));
            assert!((b.width - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn breakdown_arithmetic() {
        let b = ScoreBreakdown::new(0.2, 0.3, 0.5, 1.0);
        assert!((b.ucb - 1.0).abs() < 1e-15);
    }

    #[test]
    fn update_counts_and_isolation() {
        let mut p = HybridUcb::lnucb_ta(3, 2, PolicyConfig::default()).unwrap();
        let untouched = p.model(2).clone();
        p.update(0, &ctx(&[1.0, 0.0]), 1.0).unwrap();
        assert_eq!(p.pulls(0), 1);
        assert_eq!(p.pulls(1), 0);
        assert_eq!(p.model(0).neighbors.len(), 1);
        p.update(1, &ctx(&[0.0, 1.0]), 1.0).unwrap();
        p.update(1, &ctx(&[0.0, 1.0]), 0.0).unwrap();
        assert_eq!(p.stats().local_mean(1).unwrap(), 0.5);
        assert_eq!(
            serde_json::to_string(p.model(2)).unwrap(),
            serde_json::to_string(&untouched).unwrap()
        );
        assert!(matches!(
            p.update(3, &ctx(&[0.0, 1.0]), 1.0),
            Err(BanditError::InvalidArm { arm: 3, arms: 3 })
        ));
        assert!(p.update(0, &ctx(&[0.0]), 1.0).is_err());
        assert!(p.update(0, &ctx(&[0.0, 1.0]), f64::NAN).is_err());
    }

    #[test]
    fn first_pull_fits_the_whole_reward() {
        let mut p = HybridUcb::lnucb_ta(1, 2, PolicyConfig::default()).unwrap();
        p.update(0, &ctx(&[1.0, 0.0]), 1.0).unwrap();
        // knn inactive on the first pull: residual = reward, mu = (0.5, 0)
        assert_eq!(p.model(0).ridge.b().as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn residual_subtracts_selection_time_knn() {
        let config = PolicyConfig {
            knn: KnnMode::Fixed,
            theta_min: 1,
            theta_max: 1,
            ..PolicyConfig::default()
        };
        let mut p = HybridUcb::lnucb_ta(1, 2, config).unwrap();
        p.update(0, &ctx(&[1.0, 0.0]), 0.4).unwrap();
        let b_before = p.model(0).ridge.b().clone();
        let x = ctx(&[0.0, 1.0]);
        let shown = p.breakdown(&x).unwrap()[0];
        assert_eq!(shown.knn, 0.4);
        p.update(0, &x, 1.0).unwrap();
        let db = p.model(0).ridge.b() - b_before;
        assert!((db[1] - 0.6).abs() < 1e-15);
        assert_eq!(db[0], 0.0);
    }

    #[test]
    fn inactive_knn_leaves_linear_plus_bonus() {
        let config = PolicyConfig {
            theta_min: 3,
            theta_max: 3,
            ..PolicyConfig::default()
        };
        let mut p = HybridUcb::lnucb_ta(2, 2, config).unwrap();
        p.update(0, &ctx(&[1.0, 0.0]), 1.0).unwrap();
        let b = p.breakdown(&ctx(&[1.0, 0.0])).unwrap()[0];
        assert_eq!(b.knn, 0.0);
        assert_eq!(b.ucb, b.linear + b.alpha * b.width);
    }

    #[test]
    fn select_is_pure() {
        let mut p = HybridUcb::lnucb_ta(3, 2, PolicyConfig::default()).unwrap();
        p.update(1, &ctx(&[0.3, 0.1]), 0.7).unwrap();
        let before = p.clone();
        let x = ctx(&[0.2, 0.9]);
        let a = p.decide(&x, 5).unwrap();
        let b = p.decide(&x, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(p, before);
    }

    #[test]
    fn floor_alpha_clamps_negative_bonus() {
        let mut config = PolicyConfig::default();
        let mut p = HybridUcb::lnucb_ta(2, 1, config.clone()).unwrap();
        p.update(0, &ctx(&[1.0]), -1.0).unwrap();
        assert!(p.breakdown(&ctx(&[1.0])).unwrap()[0].alpha < 0.0);
        config.floor_alpha_at_zero = true;
        let mut q = HybridUcb::lnucb_ta(2, 1, config).unwrap();
        q.update(0, &ctx(&[1.0]), -1.0).unwrap();
        assert_eq!(q.breakdown(&ctx(&[1.0])).unwrap()[0].alpha, 0.0);
    }
}
