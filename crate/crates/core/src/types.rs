//! Shared domain types and deterministic randomness.

use std::ops::Deref;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{BanditError, Result};

/// A finite feature vector observed before an arm is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Context(Vec<f64>);

impl Context {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(BanditError::NonFinite("context"));
        }
        Ok(Context(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Fails unless the context has exactly `dim` entries.
    pub fn expect_dim(&self, dim: usize) -> Result<()> {
        if self.0.len() != dim {
            return Err(BanditError::DimensionMismatch {
                expected: dim,
                got: self.0.len(),
            });
        }
        Ok(())
    }
}

impl Deref for Context {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Context {
    type Error = BanditError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Context::new(values)
    }
}

/// A single observed reward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardSample {
    pub value: f64,
    pub round: u64,
}

impl RewardSample {
    /// Checks finiteness and membership in the closed interval `bounds`.
    pub fn new(value: f64, round: u64, bounds: (f64, f64)) -> Result<Self> {
        if !value.is_finite() {
            return Err(BanditError::NonFinite("reward"));
        }
        if value < bounds.0 || value > bounds.1 {
            return Err(BanditError::param(
                "reward",
                format!("{value} outside [{}, {}]", bounds.0, bounds.1),
            ));
        }
        Ok(RewardSample { value, round })
    }
}

/// One interaction between a policy and an environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u64,
    pub context: Context,
    pub chosen_arm: usize,
    pub reward: f64,
    pub per_arm_scores: Option<Vec<f64>>,
}

/// Identifier of the generator behind every seeded stream in the crate.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Seed plus generator identity. Equal seeds give equal streams on every
/// platform because ChaCha8 output is defined bit-exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngState {
    pub seed: u64,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState { seed }
    }

    pub fn algorithm(&self) -> &'static str {
        RNG_ALGORITHM
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// An independent stream keyed by `stream`; used for per-round draws so
    /// that selection can stay a pure function of (state, context, round).
    pub fn stream(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;

    #[test]
    fn context_rejects_nan() {
        assert!(Context::new(vec![1.0, f64::NAN]).is_err());
        assert!(Context::new(vec![1.0, f64::INFINITY]).is_err());
        assert_eq!(Context::new(vec![3.0, 4.0]).unwrap().norm(), 5.0);
    }

    #[test]
    fn dimension_check() {
        let c = Context::new(vec![0.0; 3]).unwrap();
        assert!(c.expect_dim(3).is_ok());
        assert!(matches!(
            c.expect_dim(4),
            Err(BanditError::DimensionMismatch {
                expected: 4,
                got: 3
            })
        ));
    }

    #[test]
    fn reward_bounds() {
        assert!(RewardSample::new(0.5, 0, (0.0, 1.0)).is_ok());
        assert!(RewardSample::new(1.5, 0, (0.0, 1.0)).is_err());
        assert!(RewardSample::new(f64::NAN, 0, (0.0, 1.0)).is_err());
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let s = RngState::new(42);
        let a: Vec<u64> = (0..4).map(|_| s.rng().random()).collect();
        let b: Vec<u64> = (0..4).map(|_| s.rng().random()).collect();
        assert_eq!(a, b);
        let x: u64 = s.stream(1).random();
        let y: u64 = s.stream(2).random();
        assert_ne!(x, y);
        assert_eq!(x, s.stream(1).random::<u64>());
    }

    #[test]
    fn chacha8_stream_is_pinned() {
        // Frozen outputs for seed 7; a change here breaks cross-version reproducibility.
        assert_eq!(
            RngState::new(7).rng().random::<u64>(),
            0x2865_5334_23d7_43bb
        );
        assert_eq!(
            RngState::new(7).stream(3).random::<u64>(),
            0x2e79_8710_8688_b271
        );
        assert_eq!(RngState::new(7).algorithm(), "chacha8");
    }
}
