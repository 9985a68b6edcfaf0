use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Environment, Episode, RoundFeedback};
use crate::error::{BanditError, Result};
use crate::policy::{argmax, TieBreak};
use crate::types::{Context, RngState};

/// Rejection attempts before the truncated noise falls back to 0, which is
/// always inside the admissible interval.
const NOISE_ATTEMPTS: usize = 1000;

/// Shape of a synthetic hybrid problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticParams {
    pub seed: u64,
    pub dim: usize,
    pub arms: usize,
    pub bump_count: usize,
    pub noise_sigma: f64,
    /// Norm of every arm's linear coefficient vector.
    pub linear_scale: f64,
    /// Euclidean radius of each bump on the unit sphere.
    pub bump_radius: f64,
    /// Cap on `Σ_j |v_j|` per arm.
    pub bump_total: f64,
    /// Draw contexts, coefficient directions and bump centers from the
    /// nonnegative orthant of the sphere, which makes mean rewards positive.
    #[serde(default)]
    pub positive: bool,
}

impl SyntheticParams {
    pub fn new(seed: u64, dim: usize, arms: usize, bump_count: usize, noise_sigma: f64) -> Self {
        SyntheticParams {
            seed,
            dim,
            arms,
            bump_count,
            noise_sigma,
            linear_scale: 0.4,
            bump_radius: 0.55,
            bump_total: 0.6,
            positive: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(BanditError::param("dim", "must be at least 1"));
        }
        if self.arms < 2 {
            return Err(BanditError::param(
                "arms",
                format!("need at least 2, got {}", self.arms),
            ));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(BanditError::param(
                "noise_sigma",
                format!("must be >= 0, got {}", self.noise_sigma),
            ));
        }
        if !(self.linear_scale >= 0.0
            && self.bump_total >= 0.0
            && self.linear_scale + self.bump_total <= 1.0)
        {
            return Err(BanditError::param(
                "linear_scale",
                "linear_scale and bump_total must be >= 0 and sum to at most 1",
            ));
        }
        if !(self.bump_radius.is_finite() && self.bump_radius > 0.0) {
            return Err(BanditError::param("bump_radius", "must be > 0"));
        }
        Ok(())
    }
}

/// Indicator bump `value · 1[‖x − center‖ < radius]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub value: f64,
}

impl Bump {
    fn at(&self, x: &[f64]) -> f64 {
        let dist_sq: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if dist_sq < self.radius * self.radius {
            self.value
        } else {
            0.0
        }
    }
}

/// Contexts uniform on the unit sphere (or its nonnegative orthant); arm `a` pays
/// `μ_aᵀx + Σ_j v_aj·1[‖x − c_aj‖ < r]` plus noise shared by all arms in a
/// round. The noise is a Gaussian truncated so every arm's reward stays in
/// `[−1, 1]`; since it is shared, realized regret equals the expected gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticHybridEnv {
    params: SyntheticParams,
    linear: Vec<Vec<f64>>,
    bumps: Vec<Vec<Bump>>,
}

/// Builds a synthetic hybrid environment with default shape constants.
pub fn synthetic_hybrid(
    seed: u64,
    dim: usize,
    arms: usize,
    bump_count: usize,
    noise_sigma: f64,
) -> Result<SyntheticHybridEnv> {
    SyntheticHybridEnv::new(SyntheticParams::new(
        seed,
        dim,
        arms,
        bump_count,
        noise_sigma,
    ))
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize, positive: bool) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                if positive {
                    z.abs()
                } else {
                    z
                }
            })
            .collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

impl SyntheticHybridEnv {
    pub fn new(params: SyntheticParams) -> Result<Self> {
        params.validate()?;
        let mut rng = RngState::new(params.seed).rng();
        let mut linear = Vec::with_capacity(params.arms);
        let mut bumps = Vec::with_capacity(params.arms);
        for _ in 0..params.arms {
            let mu = unit_vector(&mut rng, params.dim, params.positive);
            linear.push(mu.into_iter().map(|a| a * params.linear_scale).collect());
            let cap = if params.bump_count == 0 {
                0.0
            } else {
                params.bump_total / params.bump_count as f64
            };
            bumps.push(
                (0..params.bump_count)
                    .map(|_| Bump {
                        center: unit_vector(&mut rng, params.dim, params.positive),
                        radius: params.bump_radius,
                        value: rng.random_range(-1.0..=1.0) * cap,
                    })
                    .collect(),
            );
        }
        Ok(SyntheticHybridEnv {
            params,
            linear,
            bumps,
        })
    }

    pub fn params(&self) -> &SyntheticParams {
        &self.params
    }

    pub fn linear_part(&self, arm: usize) -> &[f64] {
        &self.linear[arm]
    }

    pub fn bumps(&self, arm: usize) -> &[Bump] {
        &self.bumps[arm]
    }

    /// Expected reward of every arm at `x`.
    pub fn expected_rewards(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.params.dim {
            return Err(BanditError::DimensionMismatch {
                expected: self.params.dim,
                got: x.len(),
            });
        }
        Ok((0..self.params.arms)
            .map(|a| {
                let lin: f64 = self.linear[a].iter().zip(x).map(|(m, v)| m * v).sum();
                lin + self.bumps[a].iter().map(|b| b.at(x)).sum::<f64>()
            })
            .collect())
    }

    /// Arm with the highest expected reward at `x` (lowest index on ties).
    pub fn oracle_arm(&self, x: &[f64]) -> Result<usize> {
        argmax(&self.expected_rewards(x)?, TieBreak::LowestIndex, 0)
    }
}

struct SyntheticEpisode<'a> {
    env: &'a SyntheticHybridEnv,
    rng: RngState,
    round: u64,
    current: Option<(Vec<f64>, f64)>,
}

impl SyntheticEpisode<'_> {
    fn truncated_noise(&self, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
        let sigma = self.env.params.noise_sigma;
        if sigma == 0.0 || hi - lo < 1e-12 {
            return 0.0f64.clamp(lo, hi);
        }
        for _ in 0..NOISE_ATTEMPTS {
            let z: f64 = StandardNormal.sample(rng);
            let e = sigma * z;
            if (lo..=hi).contains(&e) {
                return e;
            }
        }
        0.0
    }
}

impl Episode for SyntheticEpisode<'_> {
    fn next_context(&mut self) -> Result<Option<Context>> {
        let mut rng = self.rng.stream(self.round);
        self.round += 1;
        let x = unit_vector(&mut rng, self.env.params.dim, self.env.params.positive);
        let expected = self.env.expected_rewards(&x)?;
        let max = expected.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = expected.iter().cloned().fold(f64::INFINITY, f64::min);
        let noise = self.truncated_noise(&mut rng, -1.0 - min, 1.0 - max);
        self.current = Some((expected, noise));
        Ok(Some(Context::new(x)?))
    }

    fn feedback(&mut self, arm: usize) -> Result<RoundFeedback> {
        let (expected, noise) = self.current.take().ok_or_else(|| {
            BanditError::Experiment("feedback requested before a context was drawn".into())
        })?;
        if arm >= expected.len() {
            return Err(BanditError::InvalidArm {
                arm,
                arms: expected.len(),
            });
        }
        let best = expected.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(RoundFeedback {
            reward: expected[arm] + noise,
            step_consumed: true,
            oracle_reward: Some(best + noise),
            expected_reward: Some(expected[arm]),
            observed_context: None,
        })
    }
}

impl Environment for SyntheticHybridEnv {
    fn name(&self) -> &str {
        "synthetic"
    }

    fn dim(&self) -> usize {
        self.params.dim
    }

    fn arms(&self) -> usize {
        self.params.arms
    }

    fn reward_range(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    fn has_oracle(&self) -> bool {
        true
    }

    fn episode(&self, seed: u64) -> Result<Box<dyn Episode + '_>> {
        Ok(Box::new(SyntheticEpisode {
            env: self,
            rng: RngState::new(seed ^ 0x656e_7669_726f_6e00),
            round: 0,
            current: None,
        }))
    }

    fn metadata(&self) -> serde_json::Value {
        serde_json::json!({
            "name": "synthetic",
            "dim": self.params.dim,
            "arms": self.params.arms,
            "params": self.params,
        })
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(synthetic_hybrid(0, 0, 3, 1, 0.1).is_err());
        assert!(synthetic_hybrid(0, 3, 1, 1, 0.1).is_err());
        assert!(synthetic_hybrid(0, 3, 3, 1, -0.1).is_err());
    }

    #[test]
    fn no_bumps_is_linear() {
        let env = synthetic_hybrid(3, 4, 3, 0, 0.1).unwrap();
        let x = [0.5, -0.5, 0.5, 0.5];
        let e = env.expected_rewards(&x).unwrap();
        for (a, v) in e.iter().enumerate() {
            let lin: f64 = env.linear_part(a).iter().zip(&x).map(|(m, v)| m * v).sum();
            assert_eq!(*v, lin);
        }
    }

    #[test]
    fn zero_noise_pays_expected_reward() {
        let env = synthetic_hybrid(1, 5, 4, 3, 0.0).unwrap();
        let mut ep = env.episode(9).unwrap();
        for _ in 0..50 {
            let x = ep.next_context().unwrap().unwrap();
            let f = ep.feedback(2).unwrap();
            assert_eq!(f.reward, env.expected_rewards(&x).unwrap()[2]);
        }
    }

    #[test]
    fn oracle_policy_has_zero_regret() {
        let env = synthetic_hybrid(2, 6, 5, 3, 0.3).unwrap();
        let mut ep = env.episode(4).unwrap();
        let mut regret = 0.0;
        for _ in 0..500 {
            let x = ep.next_context().unwrap().unwrap();
            let f = ep.feedback(env.oracle_arm(&x).unwrap()).unwrap();
            regret += f.oracle_reward.unwrap() - f.reward;
        }
        assert_eq!(regret, 0.0);
    }

    #[test]
    fn feedback_needs_a_context() {
        let env = synthetic_hybrid(2, 2, 2, 1, 0.3).unwrap();
        let mut ep = env.episode(4).unwrap();
        assert!(ep.feedback(0).is_err());
        ep.next_context().unwrap();
        assert!(ep.feedback(7).is_err());
    }

    #[test]
    fn episodes_are_reproducible() {
        let env = synthetic_hybrid(5, 3, 3, 2, 0.5).unwrap();
        let draw = |seed| {
            let mut ep = env.episode(seed).unwrap();
            (0..20)
                .map(|_| {
                    let x = ep.next_context().unwrap().unwrap();
                    (x, ep.feedback(0).unwrap().reward)
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(1), draw(1));
        assert_ne!(draw(1), draw(2));
    }

    proptest! {
        #[test]
        fn rewards_bounded_and_oracle_dominates(seed in 0u64..1000, d in 1usize..12, arms in 2usize..7, bumps in 0usize..5, sigma in 0.0f64..2.0) {
            let env = synthetic_hybrid(seed, d, arms, bumps, sigma).unwrap();
            let mut ep = env.episode(seed).unwrap();
            for _ in 0..20 {
                let x = ep.next_context().unwrap().unwrap();
                prop_assert!((x.norm() - 1.0).abs() < 1e-12);
                let e = env.expected_rewards(&x).unwrap();
                let best = env.oracle_arm(&x).unwrap();
                for v in &e {
                    prop_assert!(*v >= -1.0 - 1e-12 && *v <= 1.0 + 1e-12);
                    prop_assert!(e[best] >= *v);
                }
                let f = ep.feedback(arms - 1).unwrap();
                prop_assert!(f.reward >= -1.0 - 1e-12 && f.reward <= 1.0 + 1e-12);
                prop_assert!(f.oracle_reward.unwrap() >= f.reward);
            }
        }
    }
}
