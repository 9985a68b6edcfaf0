//! Temporal-attention exploration schedule and reward statistics.

use serde::{Deserialize, Serialize};

use crate::error::{BanditError, Result};

/// Base exploration `alpha0` and the global/local blend `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttentionParams {
    pub alpha0: f64,
    pub kappa: f64,
}

impl AttentionParams {
    pub fn new(alpha0: f64, kappa: f64) -> Result<Self> {
        if !(alpha0.is_finite() && alpha0 >= 0.0) {
            return Err(BanditError::param(
                "alpha0",
                format!("must be >= 0, got {alpha0}"),
            ));
        }
        if !(0.0..=1.0).contains(&kappa) {
            return Err(BanditError::param(
                "kappa",
                format!("must lie in [0, 1], got {kappa}"),
            ));
        }
        Ok(AttentionParams { alpha0, kappa })
    }

    /// `α₀/(N+1) · (κ g + (1−κ) n)`. Negative blends pass through unchanged.
    pub fn exploration_rate(&self, pulls: u64, global: f64, local: f64) -> f64 {
        self.alpha0 / (pulls as f64 + 1.0) * (self.kappa * global + (1.0 - self.kappa) * local)
    }

    /// `rate(N+1) − rate(N)`: the discrete derivative with respect to pulls.
    pub fn forward_difference(&self, pulls: u64, global: f64, local: f64) -> f64 {
        self.exploration_rate(pulls + 1, global, local)
            - self.exploration_rate(pulls, global, local)
    }
}

/// Per-arm reward sums and pull counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardStats {
    sums: Vec<f64>,
    counts: Vec<u64>,
}

impl RewardStats {
    pub fn new(arms: usize) -> Result<Self> {
        if arms == 0 {
            return Err(BanditError::NoArms);
        }
        Ok(RewardStats {
            sums: vec![0.0; arms],
            counts: vec![0; arms],
        })
    }

    pub fn arms(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn check_arm(&self, arm: usize) -> Result<()> {
        if arm >= self.counts.len() {
            return Err(BanditError::InvalidArm {
                arm,
                arms: self.counts.len(),
            });
        }
        Ok(())
    }

    pub fn record(&mut self, arm: usize, reward: f64) -> Result<()> {
        self.check_arm(arm)?;
        if !reward.is_finite() {
            return Err(BanditError::NonFinite("reward"));
        }
        self.sums[arm] += reward;
        self.counts[arm] += 1;
        Ok(())
    }

    /// Mean reward of `arm`, or 0 if it was never pulled.
    pub fn local_mean(&self, arm: usize) -> Result<f64> {
        self.check_arm(arm)?;
        Ok(self.mean_unchecked(arm))
    }

    fn mean_unchecked(&self, arm: usize) -> f64 {
        match self.counts[arm] {
            0 => 0.0,
            n => self.sums[arm] / n as f64,
        }
    }

    /// Average of the per-arm means; unpulled arms contribute 0.
    pub fn global_mean(&self) -> f64 {
        let arms = self.counts.len();
        (0..arms).map(|a| self.mean_unchecked(a)).sum::<f64>() / arms as f64
    }
}

/// Softmax over negated, scaled pull counts: `exp(−γ N_a) / Σ_b exp(−γ N_b)`.
/// Computed relative to the smallest count so large counts cannot overflow.
pub fn softmax_attention(counts: &[u64], gamma_sm: f64) -> Result<Vec<f64>> {
    if counts.is_empty() {
        return Err(BanditError::NoArms);
    }
    if !(gamma_sm.is_finite() && gamma_sm > 0.0) {
        return Err(BanditError::param(
            "gamma_sm",
            format!("must be > 0, got {gamma_sm}"),
        ));
    }
    let min = *counts.iter().min().expect("nonempty");
    let raw: Vec<f64> = counts
        .iter()
        .map(|&n| (-gamma_sm * (n - min) as f64).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn local_mean_conventions() {
        let mut s = RewardStats::new(3).unwrap();
        assert_eq!(s.local_mean(0).unwrap(), 0.0);
        s.record(1, 1.0).unwrap();
        s.record(1, 0.0).unwrap();
        assert_eq!(s.local_mean(1).unwrap(), 0.5);
        s.record(2, 0.3).unwrap();
        assert_eq!(s.local_mean(2).unwrap(), 0.3);
        assert!(s.local_mean(3).is_err());
        assert!(s.record(3, 1.0).is_err());
        assert!(s.record(0, f64::NAN).is_err());
    }

    #[test]
    fn global_mean_conventions() {
        let mut s = RewardStats::new(2).unwrap();
        assert_eq!(s.global_mean(), 0.0);
        s.record(0, 0.5).unwrap();
        s.record(1, 0.3).unwrap();
        assert!((s.global_mean() - 0.4).abs() < 1e-15);
        let mut one = RewardStats::new(1).unwrap();
        one.record(0, 0.9).unwrap();
        assert_eq!(one.global_mean(), 0.9);
        assert!(RewardStats::new(0).is_err());
    }

    #[test]
    fn exploration_rate_values() {
        for (a0, k) in [(1.0, 0.0), (3.0, 0.5), (0.2, 1.0)] {
            let p = AttentionParams::new(a0, k).unwrap();
            assert_eq!(p.exploration_rate(7, 0.0, 0.0), 0.0);
        }
        let p = AttentionParams::new(1.0, 1.0).unwrap();
        assert!((p.exploration_rate(1, 0.8, 0.0) - 0.4).abs() < 1e-15);
        let p = AttentionParams::new(1.0, 0.0).unwrap();
        assert!((p.exploration_rate(0, 0.0, 0.6) - 0.6).abs() < 1e-15);
        // negative blend passes through
        assert!(p.exploration_rate(0, 0.0, -0.5) < 0.0);
    }

    #[test]
    fn forward_difference_values() {
        let p = AttentionParams::new(1.0, 1.0).unwrap();
        assert!((p.forward_difference(0, 1.0, 0.0) + 0.5).abs() < 1e-15);
        assert_eq!(p.forward_difference(5, 0.0, 0.0), 0.0);
        let q = AttentionParams::new(2.0, 0.3).unwrap();
        assert!(q.forward_difference(3, 0.2, 0.0) < 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(AttentionParams::new(-1.0, 0.5).is_err());
        assert!(AttentionParams::new(1.0, 1.5).is_err());
        assert!(AttentionParams::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn softmax_cases() {
        assert_eq!(
            softmax_attention(&[4, 4, 4, 4], 0.7).unwrap(),
            vec![0.25; 4]
        );
        let w = softmax_attention(&[0, 50], 1.0).unwrap();
        assert!(w[0] > 0.999);
        assert_eq!(softmax_attention(&[12], 2.0).unwrap(), vec![1.0]);
        assert!(softmax_attention(&[], 1.0).is_err());
        assert!(softmax_attention(&[1, 2], 0.0).is_err());
        // huge counts do not overflow
        let w = softmax_attention(&[1_000_000, 1_000_001], 0.5).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn decays_monotonically(n in 0u64..10_000, a0 in 0.01f64..10.0, k in 0.0f64..=1.0, g in 0.01f64..1.0, l in 0.01f64..1.0) {
            let p = AttentionParams::new(a0, k).unwrap();
            prop_assert!(p.exploration_rate(n + 1, g, l) < p.exploration_rate(n, g, l));
            prop_assert!(p.forward_difference(n, g, l) < 0.0);
        }

        #[test]
        fn linear_in_alpha0(n in 0u64..1000, a0 in 0.0f64..10.0, k in 0.0f64..=1.0, g in -1.0f64..1.0, l in -1.0f64..1.0) {
            let p1 = AttentionParams::new(1.0, k).unwrap();
            let p = AttentionParams::new(a0, k).unwrap();
            let lhs = p.exploration_rate(n, g, l);
            let rhs = a0 * p1.exploration_rate(n, g, l);
            prop_assert!((lhs - rhs).abs() <= 1e-12);
            // affine in (g, n): midpoint property
            let mid = p.exploration_rate(n, (g + 0.5) / 2.0, (l - 0.25) / 2.0);
            let avg = (p.exploration_rate(n, g, l) + p.exploration_rate(n, 0.5, -0.25)) / 2.0;
            prop_assert!((mid - avg).abs() <= 1e-12);
        }

        #[test]
        fn softmax_on_simplex(counts in prop::collection::vec(0u64..200, 1..12), gamma in 0.01f64..3.0) {
            let w = softmax_attention(&counts, gamma).unwrap();
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            for v in w {
                prop_assert!(v > 0.0 && v <= 1.0);
            }
        }
    }
}
