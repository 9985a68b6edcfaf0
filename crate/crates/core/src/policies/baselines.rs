//! Standard baselines. Context-free policies ignore the context except for
//! its dimension check.

use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::attention::RewardStats;
use crate::error::{BanditError, Result};
use crate::knn::NeighborStore;
use crate::linear::RidgeState;
use crate::policy::{argmax, Decision, Policy, TieBreak};
use crate::types::{Context, RngState};

/// KL-UCB bisection stops once the bracket is narrower than this.
pub const KL_TOLERANCE: f64 = 1e-9;
pub const KL_MAX_ITERATIONS: usize = 64;

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(BanditError::param(name, format!("must be > 0, got {v}")))
    }
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(BanditError::param(name, format!("must be >= 0, got {v}")))
    }
}

fn check_range(range: (f64, f64)) -> Result<()> {
    if range.0.is_finite() && range.1.is_finite() && range.0 < range.1 {
        Ok(())
    } else {
        Err(BanditError::param(
            "reward_range",
            format!("invalid interval {range:?}"),
        ))
    }
}

/// Maps a reward into `[0, 1]` given its declared interval.
pub(super) fn unit(reward: f64, range: (f64, f64)) -> f64 {
    ((reward - range.0) / (range.1 - range.0)).clamp(0.0, 1.0)
}

pub(super) fn from_unit(p: f64, range: (f64, f64)) -> f64 {
    range.0 + p * (range.1 - range.0)
}

/// Bernoulli KL divergence `kl(p, q)`.
pub fn bernoulli_kl(p: f64, q: f64) -> f64 {
    const EPS: f64 = 1e-15;
    let p = p.clamp(EPS, 1.0 - EPS);
    let q = q.clamp(EPS, 1.0 - EPS);
    p * (p / q).ln() + (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln()
}

/// Largest `q ∈ [p, 1]` with `n · kl(p, q) ≤ level`, found by bisection.
pub fn kl_upper_bound(p: f64, n: f64, level: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    if n <= 0.0 {
        return 1.0;
    }
    let budget = level.max(0.0) / n;
    if budget == 0.0 {
        return p;
    }
    let (mut lo, mut hi) = (p, 1.0);
    for _ in 0..KL_MAX_ITERATIONS {
        if hi - lo < KL_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if bernoulli_kl(p, mid) > budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

macro_rules! policy_common {
    () => {
        fn id(&self) -> &str {
            &self.id
        }

        fn arms(&self) -> usize {
            self.stats.arms()
        }

        fn dim(&self) -> usize {
            self.dim
        }

        fn pulls(&self, arm: usize) -> u64 {
            self.stats.count(arm)
        }

        fn box_clone(&self) -> Box<dyn Policy> {
            Box::new(self.clone())
        }
    };
}

fn decision(scores: Vec<f64>, tie_break: TieBreak, round: u64) -> Result<Decision> {
    let arm = argmax(&scores, tie_break, round)?;
    Ok(Decision {
        arm,
        scores,
        breakdown: None,
    })
}

/// UCB1 with bonus `ρ √(ln t / N_a)`; unpulled arms score `+∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ucb1 {
    pub(super) id: String,
    pub(super) dim: usize,
    pub(super) rho: f64,
    pub(super) stats: RewardStats,
    pub(super) tie_break: TieBreak,
}

impl Ucb1 {
    pub fn new(arms: usize, dim: usize, rho: f64, tie_break: TieBreak) -> Result<Self> {
        nonneg("rho", rho)?;
        Ok(Ucb1 {
            id: "ucb".into(),
            dim,
            rho,
            stats: RewardStats::new(arms)?,
            tie_break,
        })
    }
}

impl Policy for Ucb1 {
    policy_common!();

    fn decide(&self, context: &Context, round: u64) -> Result<Decision> {
        self.check_context(context)?;
        let t = self.stats.total_count().max(1) as f64;
        let scores = (0..self.arms())
            .map(|a| match self.stats.count(a) {
                0 => f64::INFINITY,
                n => self.stats.local_mean(a).unwrap() + self.rho * (t.ln() / n as f64).sqrt(),
            })
            .collect();
        decision(scores, self.tie_break, round)
    }

    fn update(&mut self, arm: usize, context: &Context, reward: f64) -> Result<()> {
        self.check_update(arm, context, reward)?;
        self.stats.record(arm, reward)
    }
}

/// Bernoulli KL-UCB with exploration level `ln t + c ln ln t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlUcb {
    pub(super) id: String,
    pub(super) dim: usize,
    pub(super) c: f64,
    pub(super) range: (f64, f64),
    pub(super) stats: RewardStats,
    pub(super) tie_break: TieBreak,
}

impl KlUcb {
    pub fn new(
        arms: usize,
        dim: usize,
        c: f64,
        range: (f64, f64),
        tie_break: TieBreak,
    ) -> Result<Self> {
        nonneg("c", c)?;
        check_range(range)?;
        Ok(KlUcb {
            id: "kl-ucb".into(),
            dim,
            c,
            range,
            stats: RewardStats::new(arms)?,
            tie_break,
        })
    }

    fn level(&self, t: f64) -> f64 {
        let ln_t = t.ln();
        if ln_t > 1.0 {
            ln_t + self.c * ln_t.ln()
        } else {
            ln_t.max(0.0)
        }
    }
}

impl Policy for KlUcb {
    policy_common!();

    fn decide(&self, context: &Context, round: u64) -> Result<Decision> {
        self.check_context(context)?;
        let level = self.level(self.stats.total_count().max(1) as f64);
        let scores = (0..self.arms())
            .map(|a| match self.stats.count(a) {
                0 => f64::INFINITY,
                n => {
                    let p = unit(self.stats.local_mean(a).unwrap(), self.range);
                    from_unit(kl_upper_bound(p, n as f64, level), self.range)
                }
            })
            .collect();
        decision(scores, self.tie_break, round)
    }

    fn update(&mut self, arm: usize, context: &Context, reward: f64) -> Result<()> {
        self.check_update(arm, context, reward)?;
        self.stats.record(arm, reward)
    }
}

/// ε-greedy on empirical means (unpulled arms count as mean 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonGreedy {
    pub(super) id: String,
    pub(super) dim: usize,
    pub(super) epsilon: f64,
    pub(super) rng: RngState,
    pub(super) stats: RewardStats,
    pub(super) tie_break: TieBreak,
}

impl EpsilonGreedy {
    pub fn new(
        arms: usize,
        dim: usize,
        epsilon: f64,
        seed: u64,
        tie_break: TieBreak,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(BanditError::param(
                "epsilon",
                format!("must lie in [0, 1], got {epsilon}"),
            ));
        }
        Ok(EpsilonGreedy {
            id: "eps-greedy".into(),
            dim,
            epsilon,
            rng: RngState::new(seed),
            stats: RewardStats::new(arms)?,
            tie_break,
        })
    }

    pub fn means(&self) -> Vec<f64> {
        (0..self.arms())
            .map(|a| self.stats.local_mean(a).unwrap())
            .collect()
    }
}

/// Explore with probability `epsilon` (uniform arm), otherwise take the
/// argmax of `values`. Draw order is fixed: one uniform, then one arm index.
pub(crate) fn epsilon_choice(
    values: &[f64],
    epsilon: f64,
    rng: RngState,
    tie_break: TieBreak,
    round: u64,
) -> Result<usize> {
    let mut draws = rng.stream(round);
    let u: f64 = draws.random();
    let explore_arm = draws.random_range(0..values.len());
    if u < epsilon {
        Ok(explore_arm)
    } else {
        argmax(values, tie_break, round)
    }
}

impl Policy for EpsilonGreedy {
    policy_common!();

    fn decide(&self, context: &Context, round: u64) -> Result<Decision> {
        self.check_context(context)?;
        let scores = self.means();
        let arm = epsilon_choice(&scores, self.epsilon, self.rng, self.tie_break, round)?;
        Ok(Decision {
            arm,
            scores,
            breakdown: None,
        })
    }

    fn update(&mut self, arm: usize, context: &Context, reward: f64) -> Result<()> {
        self.check_update(arm, context, reward)?;
        self.stats.record(arm, reward)
    }
}

/// Beta–Bernoulli Thompson sampling. Rewards are mapped to `[0, 1]` and
/// added fractionally to the success/failure pseudo-counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaThompson {
    pub(super) id: String,
    pub(super) dim: usize,
    pub(super) prior: (f64, f64),
    pub(super) range: (f64, f64),
    pub(super) successes: Vec<f64>,
    pub(super) failures: Vec<f64>,
    pub(super) rng: RngState,
    pub(super) stats: RewardStats,
    pub(super) tie_break: TieBreak,
}

impl BetaThompson {
    pub fn new(
        arms: usize,
        dim: usize,
        prior: (f64, f64),
        range: (f64, f64),
        seed: u64,
        tie_break: TieBreak,
    ) -> Result<Self> {
        positive("prior_a", prior.0)?;
        positive("prior_b", prior.1)?;
        check_range(range)?;
        Ok(BetaThompson {
            id: "beta-thompson".into(),
            dim,
            prior,
            range,
            successes: vec![0.0; arms],
            failures: vec![0.0; arms],
            rng: RngState::new(seed),
            stats: RewardStats::new(arms)?,
            tie_break,
        })
    }

    /// Posterior `(a, b)` of `arm`.
    pub fn posterior(&self, arm: usize) -> (f64, f64) {
        (
            self.prior.0 + self.successes[arm],
            self.prior.1 + self.failures[arm],
        )
    }

    /// One posterior draw per arm (unit scale) from the round's stream.
    pub(crate) fn draw(&self, round: u64) -> Vec<(f64, f64)> {
        let mut rng = self.rng.stream(round);
        (0..self.arms())
            .map(|a| {
                let (pa, pb) = self.posterior(a);
                let sample = Beta::new(pa, pb)
                    .expect("positive parameters")
                    .sample(&mut rng);
                (sample, pa / (pa + pb))
            })
            .collect()
    }

    pub(crate) fn range(&self) -> (f64, f64) {
        self.range
    }
}

impl Policy for BetaThompson {
    policy_common!();

    fn decide(&self, context: &Context, round: u64) -> Result<Decision> {
        self.check_context(context)?;
        let scores = self
            .draw(round)
            .into_iter()
            .map(|(s, _)| from_unit(s, self.range))
            .collect();
        decision(scores, self.tie_break, round)
    }

    fn update(&mut self, arm: usize, context: &Context, reward: f64) -> Result<()> {
        self.check_update(arm, context, reward)?;
        let p = unit(reward, self.range);
        self.successes[arm] += p;
        self.failures[arm] += 1.0 - p;
        self.stats.record(arm, reward)
    }
}

/// Disjoint LinUCB: ridge on the raw reward, bonus `α √(xᵀΣ⁻¹x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinUcb {
    pub(super) id: String,
    pub(super) dim: usize,
    pub(super) alpha: f64,
    pub(super) ridges: Vec<RidgeState>,
    pub(super) stats: RewardStats,
    pub(super) tie_break: TieBreak,
}

impl LinUcb {
    pub fn new(
        arms: usize,
        dim: usize,
        alpha: f64,
        lambda: f64,
        tie_break: TieBreak,
    ) -> Result<Self> {
        nonneg("alpha", alpha)?;
        Ok(LinUcb {
            id: "linucb".into(),
            dim,
            alpha,
            ridges: (0..arms)
                .map(|_| RidgeState::new(dim, lambda, 0.0))
                .collect::<Result<_>>()?,
            stats: RewardStats::new(arms)?,
            tie_break,
        })
    }

    pub fn ridge(&self, arm: usize) -> &RidgeState {
        &self.ridges[arm]
    }
}

impl Policy for LinUcb {
    policy_common!();

    fn decide(&self, context: &Context, round: u64) -> Result<Decision> {
        self.check_context(context)?;
        let scores = self
            .ridges
            .iter()
            .map(|r| Ok(r.predict(context)? + self.alpha * r.width(context)?))
            .collect::<Result<Vec<_>>>()?;
        decision(scores, self.tie_break, round)
    }

    fn update(&mut self, arm: usize, context: &Context, reward: f64) -> Result<()> {
        self.check_update(arm, context, reward)?;
        self.ridges[arm].update(context, reward, 0.0)?;
        self.stats.record(arm, reward)
    }
}

/// Linear Thompson sampling with Gaussian posterior `N(μ̂, v² Σ⁻¹)`.
///
/// With one shared context per round the sampled score of an arm is exactly
/// `N(μ̂ᵀx, v² xᵀΣ⁻¹x)`, which is what is drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinThompson {
    pub(super) id: String,
    pub(super) dim: usize,
    pub(super) v: f64,
    pub(super) ridges: Vec<RidgeState>,
    pub(super) rng: RngState,
    pub(super) stats: RewardStats,
    pub(super) tie_break: TieBreak,
}

impl LinThompson {
    pub fn new(
        arms: usize,
        dim: usize,
        v: f64,
        lambda: f64,
        seed: u64,
        tie_break: TieBreak,
    ) -> Result<Self> {
        nonneg("v", v)?;
        Ok(LinThompson {
            id: "linthompson".into(),
            dim,
            v,
            ridges: (0..arms)
                .map(|_| RidgeState::new(dim, lambda, 0.0))
                .collect::<Result<_>>()?,
            rng: RngState::new(seed),
            stats: RewardStats::new(arms)?,
            tie_break,
        })
    }

    /// `(mean, std-normal draw, width)` per arm for this round.
    pub(crate) fn draw(&self, context: &Context, round: u64) -> Result<Vec<(f64, f64, f64)>> {
        let mut rng = self.rng.stream(round);
        self.ridges
            .iter()
            .map(|r| {
                let z: f64 = StandardNormal.sample(&mut rng);
                Ok((r.predict(context)?, z, r.width(context)?))
            })
            .collect()
    }

    pub(crate) fn v(&self) -> f64 {
        self.v
    }
}

impl Policy for LinThompson {
    policy_common!();

    fn decide(&self, context: &Context, round: u64) -> Result<Decision> {
        self.check_context(context)?;
        let scores = self
            .draw(context, round)?
            .into_iter()
            .map(|(m, z, w)| m + self.v * w * z)
            .collect();
        decision(scores, self.tie_break, round)
    }

    fn update(&mut self, arm: usize, context: &Context, reward: f64) -> Result<()> {
        self.check_update(arm, context, reward)?;
        self.ridges[arm].update(context, reward, 0.0)?;
        self.stats.record(arm, reward)
    }
}

/// Index used on top of the k-NN estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KnnIndex {
    /// `knn + ρ·u_k`.
    Ucb { rho: f64 },
    /// KL upper bound of the neighbor mean with `k` samples at level
    /// `c ln t`, plus `u_k`.
    KlUcb { c: f64 },
}

/// Nonparametric k-NN bandit with a fixed `k`. Arms with fewer than `k`
/// stored observations score `+∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnUcb {
    pub(super) id: String,
    pub(super) dim: usize,
    pub(super) k: usize,
    pub(super) index: KnnIndex,
    pub(super) range: (f64, f64),
    pub(super) stores: Vec<NeighborStore>,
    pub(super) stats: RewardStats,
    pub(super) tie_break: TieBreak,
    pub(super) updates: u64,
}

impl KnnUcb {
    pub fn new(
        arms: usize,
        dim: usize,
        k: usize,
        index: KnnIndex,
        range: (f64, f64),
        capacity: Option<usize>,
        tie_break: TieBreak,
    ) -> Result<Self> {
        if k == 0 {
            return Err(BanditError::param("k", "must be at least 1"));
        }
        let id = match index {
            KnnIndex::Ucb { rho } => {
                nonneg("rho", rho)?;
                "knn-ucb"
            }
            KnnIndex::KlUcb { c } => {
                nonneg("c", c)?;
                "knn-kl-ucb"
            }
        };
        check_range(range)?;
        Ok(KnnUcb {
            id: id.into(),
            dim,
            k,
            index,
            range,
            stores: (0..arms)
                .map(|_| NeighborStore::new(dim, capacity))
                .collect::<Result<_>>()?,
            stats: RewardStats::new(arms)?,
            tie_break,
            updates: 0,
        })
    }
}

impl Policy for KnnUcb {
    policy_common!();

    fn decide(&self, context: &Context, round: u64) -> Result<Decision> {
        self.check_context(context)?;
        let t = (self.stats.total_count() + 1) as f64;
        let scores = self
            .stores
            .iter()
            .map(|s| {
                let q = s.score(context, self.k)?;
                if !q.applied {
                    return Ok(f64::INFINITY);
                }
                Ok(match self.index {
                    KnnIndex::Ucb { rho } => q.score + rho * q.u_max,
                    KnnIndex::KlUcb { c } => {
                        let p = unit(q.score, self.range);
                        from_unit(kl_upper_bound(p, self.k as f64, c * t.ln()), self.range)
                            + q.u_max
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        decision(scores, self.tie_break, round)
    }

    fn update(&mut self, arm: usize, context: &Context, reward: f64) -> Result<()> {
        self.check_update(arm, context, reward)?;
        self.stores[arm].insert(context, reward, self.updates)?;
        self.updates += 1;
        self.stats.record(arm, reward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::new(vec![1.0]).unwrap()
    }

    #[test]
    fn kl_divergence_basics() {
        assert!(bernoulli_kl(0.5, 0.5).abs() < 1e-12);
        assert!(bernoulli_kl(0.2, 0.8) > 0.0);
        // kl(0.5, q) at the found bound equals level/n
        let q = kl_upper_bound(0.5, 10.0, 1.0);
        assert!((bernoulli_kl(0.5, q) - 0.1).abs() < 1e-7);
        assert!(q > 0.5 && q < 1.0);
        assert_eq!(kl_upper_bound(0.3, 0.0, 1.0), 1.0);
        assert!((kl_upper_bound(0.3, 5.0, 0.0) - 0.3).abs() < 1e-9);
    }

    #[test]
    fn ucb_single_arm_and_cold_arms() {
        let mut p = Ucb1::new(1, 1, 1.0, TieBreak::LowestIndex).unwrap();
        for r in 0..5 {
            assert_eq!(p.select(&ctx(), r).unwrap(), 0);
            p.update(0, &ctx(), 0.3).unwrap();
        }
        let mut q = Ucb1::new(3, 1, 1.0, TieBreak::LowestIndex).unwrap();
        q.update(0, &ctx(), 1.0).unwrap();
        assert_eq!(q.select(&ctx(), 1).unwrap(), 1);
        assert!(Ucb1::new(2, 1, -1.0, TieBreak::LowestIndex).is_err());
    }

    #[test]
    fn ucb_bonus_value() {
        let mut p = Ucb1::new(2, 1, 2.0, TieBreak::LowestIndex).unwrap();
        p.update(0, &ctx(), 1.0).unwrap();
        p.update(1, &ctx(), 0.0).unwrap();
        p.update(1, &ctx(), 1.0).unwrap();
        let d = p.decide(&ctx(), 3).unwrap();
        let t = 3f64.ln();
        assert!((d.scores[0] - (1.0 + 2.0 * t.sqrt())).abs() < 1e-12);
        assert!((d.scores[1] - (0.5 + 2.0 * (t / 2.0).sqrt())).abs() < 1e-12);
    }

    #[test]
    fn zero_epsilon_is_greedy() {
        let mut p = EpsilonGreedy::new(3, 1, 0.0, 4, TieBreak::LowestIndex).unwrap();
        p.update(2, &ctx(), 0.9).unwrap();
        p.update(1, &ctx(), 0.4).unwrap();
        for r in 0..50 {
            assert_eq!(p.select(&ctx(), r).unwrap(), 2);
        }
        assert!(EpsilonGreedy::new(3, 1, 1.5, 0, TieBreak::LowestIndex).is_err());
    }

    #[test]
    fn full_epsilon_explores_everything() {
        let p = EpsilonGreedy::new(4, 1, 1.0, 4, TieBreak::LowestIndex).unwrap();
        let picks: Vec<usize> = (0..100).map(|r| p.select(&ctx(), r).unwrap()).collect();
        for a in 0..4 {
            assert!(picks.contains(&a));
        }
    }

    #[test]
    fn beta_thompson_posterior_and_determinism() {
        let mut p =
            BetaThompson::new(2, 1, (0.5, 0.5), (0.0, 1.0), 3, TieBreak::LowestIndex).unwrap();
        p.update(0, &ctx(), 1.0).unwrap();
        p.update(0, &ctx(), 0.0).unwrap();
        p.update(1, &ctx(), 0.25).unwrap();
        assert_eq!(p.posterior(0), (1.5, 1.5));
        assert_eq!(p.posterior(1), (0.75, 1.25));
        assert_eq!(p.decide(&ctx(), 9).unwrap(), p.decide(&ctx(), 9).unwrap());
        assert!(BetaThompson::new(2, 1, (0.0, 1.0), (0.0, 1.0), 0, TieBreak::LowestIndex).is_err());
    }

    #[test]
    fn beta_thompson_prefers_better_arm() {
        let mut p =
            BetaThompson::new(2, 1, (1.0, 1.0), (0.0, 1.0), 3, TieBreak::LowestIndex).unwrap();
        for _ in 0..50 {
            p.update(0, &ctx(), 0.0).unwrap();
            p.update(1, &ctx(), 1.0).unwrap();
        }
        let ones = (0..100)
            .filter(|&r| p.select(&ctx(), r).unwrap() == 1)
            .count();
        assert!(ones > 95);
    }

    #[test]
    fn linucb_matches_hand_values() {
        let mut p = LinUcb::new(2, 2, 0.5, 1.0, TieBreak::LowestIndex).unwrap();
        let x = Context::new(vec![1.0, 0.0]).unwrap();
        p.update(0, &x, 1.0).unwrap();
        let d = p.decide(&x, 1).unwrap();
        // arm 0: 0.5 + 0.5·√(1/2); arm 1: 0 + 0.5·1
        assert!((d.scores[0] - (0.5 + 0.5 * 0.5f64.sqrt())).abs() < 1e-12);
        assert!((d.scores[1] - 0.5).abs() < 1e-12);
        assert_eq!(d.arm, 0);
    }

    #[test]
    fn linthompson_zero_scale_is_greedy() {
        let mut p = LinThompson::new(2, 2, 0.0, 1.0, 1, TieBreak::LowestIndex).unwrap();
        let x = Context::new(vec![0.0, 1.0]).unwrap();
        p.update(1, &x, 1.0).unwrap();
        for r in 0..20 {
            assert_eq!(p.select(&x, r).unwrap(), 1);
        }
    }

    #[test]
    fn knn_ucb_explores_until_k_then_scores() {
        let mut p = KnnUcb::new(
            2,
            1,
            2,
            KnnIndex::Ucb { rho: 1.0 },
            (0.0, 1.0),
            None,
            TieBreak::LowestIndex,
        )
        .unwrap();
        let a = Context::new(vec![0.0]).unwrap();
        let b = Context::new(vec![1.0]).unwrap();
        p.update(0, &a, 1.0).unwrap();
        p.update(0, &b, 0.0).unwrap();
        let d = p.decide(&a, 2).unwrap();
        assert_eq!(d.scores[1], f64::INFINITY);
        // neighbors {0, 1}: mean 0.5, u_max 1
        assert!((d.scores[0] - 1.5).abs() < 1e-12);
        let kl = KnnUcb::new(
            1,
            1,
            1,
            KnnIndex::KlUcb { c: 1.0 },
            (0.0, 1.0),
            None,
            TieBreak::LowestIndex,
        )
        .unwrap();
        assert_eq!(kl.id(), "knn-kl-ucb");
        assert!(KnnUcb::new(
            1,
            1,
            0,
            KnnIndex::Ucb { rho: 1.0 },
            (0.0, 1.0),
            None,
            TieBreak::LowestIndex
        )
        .is_err());
    }

    #[test]
    fn kl_ucb_rescales_bounds() {
        let mut p = KlUcb::new(2, 1, 0.0, (-1.0, 1.0), TieBreak::LowestIndex).unwrap();
        for _ in 0..20 {
            p.update(0, &ctx(), -1.0).unwrap();
            p.update(1, &ctx(), 1.0).unwrap();
        }
        let d = p.decide(&ctx(), 40).unwrap();
        assert!(d.scores[0] < 0.0 && d.scores[0] >= -1.0);
        assert!(d.scores[1] <= 1.0 + 1e-12);
        assert_eq!(d.arm, 1);
        assert!(KlUcb::new(2, 1, 1.0, (1.0, 1.0), TieBreak::LowestIndex).is_err());
    }
}
