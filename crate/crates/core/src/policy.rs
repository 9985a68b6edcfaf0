//! The interface every bandit algorithm implements.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{BanditError, Result};
use crate::types::{Context, RngState};

/// Per-arm decomposition of the hybrid UCB score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub linear: f64,
    pub knn: f64,
    pub alpha: f64,
    pub width: f64,
    pub ucb: f64,
}

impl ScoreBreakdown {
    pub fn new(linear: f64, knn: f64, alpha: f64, width: f64) -> Self {
        ScoreBreakdown {
            linear,
            knn,
            alpha,
            width,
            ucb: linear + knn + alpha * width,
        }
    }
}

/// Outcome of a selection: the chosen arm, the score of every arm and,
/// for the hybrid family, the per-arm breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub arm: usize,
    pub scores: Vec<f64>,
    pub breakdown: Option<Vec<ScoreBreakdown>>,
}

/// How ties in the argmax are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TieBreak {
    #[default]
    LowestIndex,
    /// Uniform among the tied arms, drawn from a stream keyed by the round.
    SeededRandom(u64),
}

impl TieBreak {
    pub fn parse(s: &str, seed: u64) -> Result<Self> {
        match s {
            "lowest-index" | "lowest" => Ok(TieBreak::LowestIndex),
            "seeded-random" | "random" => Ok(TieBreak::SeededRandom(seed)),
            other => Err(BanditError::param(
                "tie_break",
                format!("unknown rule `{other}`"),
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TieBreak::LowestIndex => "lowest-index",
            TieBreak::SeededRandom(_) => "seeded-random",
        }
    }
}

/// Scores within this distance of the maximum (scaled by `max(1, |max|)`)
/// count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Index of the largest score. NaN scores never win; `+inf` beats every
/// finite score. Scores that agree with the maximum to [`TIE_TOLERANCE`]
/// are tied and resolved by `tie_break`.
pub fn argmax(scores: &[f64], tie_break: TieBreak, round: u64) -> Result<usize> {
    if scores.is_empty() {
        return Err(BanditError::NoArms);
    }
    let best = scores
        .iter()
        .copied()
        .filter(|s| !s.is_nan())
        .fold(f64::NEG_INFINITY, f64::max);
    let tol = if best.is_finite() {
        TIE_TOLERANCE * best.abs().max(1.0)
    } else {
        0.0
    };
    let tied: Vec<usize> = scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == best || (best.is_finite() && (best - s).abs() <= tol))
        .map(|(i, _)| i)
        .collect();
    if tied.is_empty() {
        // every score NaN
        return Ok(0);
    }
    Ok(match tie_break {
        TieBreak::LowestIndex => tied[0],
        TieBreak::SeededRandom(seed) if tied.len() > 1 => {
            let mut rng = RngState::new(seed).stream(round.wrapping_add(1 << 40));
            tied[rng.random_range(0..tied.len())]
        }
        TieBreak::SeededRandom(_) => tied[0],
    })
}

/// A contextual bandit policy.
///
/// `decide` must not mutate state: two calls with the same arguments return
/// the same decision. `update` touches only the chosen arm's model and the
/// global reward statistics.
pub trait Policy: Send + Sync {
    /// Canonical lowercase identifier, e.g. `lnucb-ta`.
    fn id(&self) -> &str;

    fn arms(&self) -> usize;

    fn dim(&self) -> usize;

    fn decide(&self, context: &Context, round: u64) -> Result<Decision>;

    fn update(&mut self, arm: usize, context: &Context, reward: f64) -> Result<()>;

    /// Number of times `arm` has been updated.
    fn pulls(&self, arm: usize) -> u64;

    fn box_clone(&self) -> Box<dyn Policy>;

    fn select(&self, context: &Context, round: u64) -> Result<usize> {
        Ok(self.decide(context, round)?.arm)
    }

    /// Shared argument validation for `decide`.
    fn check_context(&self, context: &Context) -> Result<()> {
        if self.arms() == 0 {
            return Err(BanditError::NoArms);
        }
        context.expect_dim(self.dim())
    }

    /// Shared argument validation for `update`.
    fn check_update(&self, arm: usize, context: &Context, reward: f64) -> Result<()> {
        if arm >= self.arms() {
            return Err(BanditError::InvalidArm {
                arm,
                arms: self.arms(),
            });
        }
        if !reward.is_finite() {
            return Err(BanditError::NonFinite("reward"));
        }
        context.expect_dim(self.dim())
    }
}

impl Clone for Box<dyn Policy> {
    fn clone(&self) -> Self {
        self.box_clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_picks_largest() {
        assert_eq!(
            argmax(&[0.1, 0.9, 0.3], TieBreak::LowestIndex, 0).unwrap(),
            1
        );
    }

    #[test]
    fn ties_go_to_lowest_index() {
        assert_eq!(
            argmax(&[0.5, 0.5, 0.5], TieBreak::LowestIndex, 0).unwrap(),
            0
        );
        assert_eq!(
            argmax(&[-3.0, -1.0, -1.0], TieBreak::LowestIndex, 0).unwrap(),
            1
        );
        // equal to 12 decimal places: tie, lower index wins
        let a = 0.123456789012;
        let b = a + 1e-14;
        assert_eq!(argmax(&[a, b], TieBreak::LowestIndex, 0).unwrap(), 0);
        assert_eq!(argmax(&[b, a], TieBreak::LowestIndex, 0).unwrap(), 0);
        // a real gap still wins
        assert_eq!(argmax(&[a, a + 1e-9], TieBreak::LowestIndex, 0).unwrap(), 1);
    }

    #[test]
    fn infinities_and_nan() {
        assert_eq!(
            argmax(
                &[1.0, f64::INFINITY, f64::INFINITY],
                TieBreak::LowestIndex,
                0
            )
            .unwrap(),
            1
        );
        assert_eq!(
            argmax(&[f64::NAN, -5.0], TieBreak::LowestIndex, 0).unwrap(),
            1
        );
        assert_eq!(
            argmax(
                &[f64::NEG_INFINITY, f64::NEG_INFINITY],
                TieBreak::LowestIndex,
                0
            )
            .unwrap(),
            0
        );
        assert!(argmax(&[], TieBreak::LowestIndex, 0).is_err());
    }

    #[test]
    fn seeded_tie_break_is_deterministic_and_spreads() {
        let scores = [1.0; 4];
        let tb = TieBreak::SeededRandom(9);
        let picks: Vec<usize> = (0..200).map(|r| argmax(&scores, tb, r).unwrap()).collect();
        let again: Vec<usize> = (0..200).map(|r| argmax(&scores, tb, r).unwrap()).collect();
        assert_eq!(picks, again);
        for arm in 0..4 {
            assert!(picks.contains(&arm));
        }
        // a unique maximum is never randomized
        assert_eq!(argmax(&[0.0, 2.0, 1.0], tb, 3).unwrap(), 1);
    }
}
