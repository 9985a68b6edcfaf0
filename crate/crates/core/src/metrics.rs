//! Reward and regret accounting, cross-seed aggregation and the theoretical
//! bound curves used as diagnostics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{BanditError, Result};
use crate::policy::ScoreBreakdown;

/// Time series of one (policy, parameters, seed) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub policy: String,
    /// Canonical `k=v;k=v` rendering of the explicit policy parameters.
    pub params: String,
    pub seed: u64,
    pub arms: Vec<usize>,
    pub cumulative_reward: Vec<f64>,
    pub mean_reward: Vec<f64>,
    pub cumulative_regret: Option<Vec<f64>>,
    /// Rounds that produced feedback. Differs from the horizon only under
    /// replay, where unmatched rows are skipped.
    pub matched_steps: u64,
    /// Rows or draws inspected to obtain the matched steps.
    pub attempts: u64,
    /// Breakdown of the chosen arm per round, when traced.
    pub trace: Option<Vec<ScoreBreakdown>>,
    /// Wall-clock seconds; never part of determinism comparisons.
    #[serde(skip)]
    pub runtime_s: f64,
}

impl RunResult {
    /// Builds the series from per-round rewards and, when available, the
    /// oracle's rewards.
    pub fn from_rewards(
        policy: impl Into<String>,
        params: impl Into<String>,
        seed: u64,
        arms: Vec<usize>,
        rewards: &[f64],
        oracle: Option<&[f64]>,
    ) -> Result<Self> {
        if arms.len() != rewards.len() {
            return Err(BanditError::LengthMismatch {
                left: arms.len(),
                right: rewards.len(),
            });
        }
        let cumulative_reward = prefix_sums(rewards);
        let mean_reward = mean_series(&cumulative_reward);
        let cumulative_regret = oracle.map(|o| regret_series(rewards, o)).transpose()?;
        Ok(RunResult {
            policy: policy.into(),
            params: params.into(),
            seed,
            arms,
            matched_steps: rewards.len() as u64,
            attempts: rewards.len() as u64,
            cumulative_reward,
            mean_reward,
            cumulative_regret,
            trace: None,
            runtime_s: 0.0,
        })
    }

    pub fn horizon(&self) -> usize {
        self.cumulative_reward.len()
    }

    pub fn final_cumulative_reward(&self) -> f64 {
        self.cumulative_reward.last().copied().unwrap_or(0.0)
    }

    pub fn final_mean_reward(&self) -> f64 {
        self.mean_reward.last().copied().unwrap_or(0.0)
    }

    pub fn final_regret(&self) -> Option<f64> {
        self.cumulative_regret
            .as_ref()
            .map(|r| r.last().copied().unwrap_or(0.0))
    }
}

fn prefix_sums(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// `cumulative[t] / (t + 1)`.
pub fn mean_series(cumulative: &[f64]) -> Vec<f64> {
    cumulative
        .iter()
        .enumerate()
        .map(|(t, c)| c / (t + 1) as f64)
        .collect()
}

/// Prefix sums of `oracle − obtained`.
pub fn regret_series(rewards: &[f64], oracle: &[f64]) -> Result<Vec<f64>> {
    if rewards.len() != oracle.len() {
        return Err(BanditError::LengthMismatch {
            left: rewards.len(),
            right: oracle.len(),
        });
    }
    let gaps: Vec<f64> = oracle.iter().zip(rewards).map(|(o, r)| o - r).collect();
    Ok(prefix_sums(&gaps))
}

/// Minimum series length accepted by [`sublinearity_exponent`].
pub const MIN_EXPONENT_LEN: usize = 100;

/// Least-squares slope of `ln R_t` against `ln t` (`t` 1-based) over the
/// last half of the series. Nonpositive entries are skipped.
pub fn sublinearity_exponent(regret: &[f64]) -> Result<f64> {
    if regret.len() < MIN_EXPONENT_LEN {
        return Err(BanditError::param(
            "regret",
            format!(
                "need at least {MIN_EXPONENT_LEN} rounds, got {}",
                regret.len()
            ),
        ));
    }
    let start = regret.len() / 2;
    let points: Vec<(f64, f64)> = regret[start..]
        .iter()
        .enumerate()
        .filter(|(_, r)| **r > 0.0 && r.is_finite())
        .map(|(i, r)| (((start + i + 1) as f64).ln(), r.ln()))
        .collect();
    if points.len() < 2 {
        return Err(BanditError::param(
            "regret",
            "fewer than two positive entries in the fitted range",
        ));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation.
pub fn std_population(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Cross-seed summary of one (policy, parameters) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub policy: String,
    pub params: String,
    pub seeds: usize,
    pub horizon: usize,
    pub final_cum_reward_mean: f64,
    pub final_cum_reward_std: f64,
    pub final_mean_reward_mean: f64,
    pub final_mean_reward_std: f64,
    pub final_regret_mean: Option<f64>,
    pub final_regret_std: Option<f64>,
    #[serde(skip)]
    pub runtime_s_mean: f64,
}

/// Spread of a policy's final mean reward across its parameter settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRow {
    pub policy: String,
    /// `(params, final mean reward averaged over seeds)` per setting.
    pub settings: Vec<(String, f64)>,
    pub mean_reward_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub rows: Vec<AggregateRow>,
    pub robustness: Vec<RobustnessRow>,
}

/// Groups runs by (policy, params) and summarizes each group.
///
/// Groups come out sorted by (policy, params) and are summed in seed order,
/// so the result does not depend on the order of `results`.
pub fn aggregate(results: &[RunResult]) -> Result<AggregateResult> {
    if results.is_empty() {
        return Err(BanditError::Experiment("nothing to aggregate".into()));
    }
    let mut groups: BTreeMap<(&str, &str), Vec<&RunResult>> = BTreeMap::new();
    for r in results {
        groups.entry((&r.policy, &r.params)).or_default().push(r);
    }
    let mut rows = Vec::with_capacity(groups.len());
    for ((policy, params), mut runs) in groups {
        runs.sort_by_key(|r| r.seed);
        let horizon = runs[0].horizon();
        if let Some(other) = runs.iter().find(|r| r.horizon() != horizon) {
            return Err(BanditError::Experiment(format!(
                "{policy} [{params}]: mixed horizons {horizon} and {}",
                other.horizon()
            )));
        }
        let column =
            |f: &dyn Fn(&RunResult) -> f64| runs.iter().map(|r| f(r)).collect::<Vec<f64>>();
        let cum = column(&|r| r.final_cumulative_reward());
        let mr = column(&|r| r.final_mean_reward());
        let rt = column(&|r| r.runtime_s);
        let regrets: Option<Vec<f64>> = runs.iter().map(|r| r.final_regret()).collect();
        rows.push(AggregateRow {
            policy: policy.to_string(),
            params: params.to_string(),
            seeds: runs.len(),
            horizon,
            final_cum_reward_mean: mean(&cum),
            final_cum_reward_std: std_population(&cum),
            final_mean_reward_mean: mean(&mr),
            final_mean_reward_std: std_population(&mr),
            final_regret_mean: regrets.as_deref().map(mean),
            final_regret_std: regrets.as_deref().map(std_population),
            runtime_s_mean: mean(&rt),
        });
    }
    let robustness = robustness_table(&rows);
    Ok(AggregateResult { rows, robustness })
}

/// Std of the seed-averaged final mean reward across each policy's settings.
pub fn robustness_table(rows: &[AggregateRow]) -> Vec<RobustnessRow> {
    let mut by_policy: BTreeMap<&str, Vec<(String, f64)>> = BTreeMap::new();
    for row in rows {
        by_policy
            .entry(&row.policy)
            .or_default()
            .push((row.params.clone(), row.final_mean_reward_mean));
    }
    by_policy
        .into_iter()
        .map(|(policy, settings)| {
            let values: Vec<f64> = settings.iter().map(|s| s.1).collect();
            RobustnessRow {
                policy: policy.to_string(),
                mean_reward_std: std_population(&values),
                settings,
            }
        })
        .collect()
}

/// Constants of the high-probability regret bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsParams {
    /// Noise bound σ.
    pub sigma: f64,
    /// Failure probability δ.
    pub delta: f64,
    /// Context norm bound.
    pub context_bound: f64,
    /// Parameter norm bound.
    pub param_bound: f64,
    pub dim: usize,
    /// Absolute constant in front of the regret bound; not pinned down by
    /// the theory, 1 by default.
    pub b: f64,
    /// `Σ_a T^a u²`, the accumulated squared k-NN radii.
    pub u_sum: f64,
}

impl Default for DiagnosticsParams {
    fn default() -> Self {
        DiagnosticsParams {
            sigma: 1.0,
            delta: 0.1,
            context_bound: 1.0,
            param_bound: 1.0,
            dim: 10,
            b: 1.0,
            u_sum: 0.0,
        }
    }
}

impl DiagnosticsParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(BanditError::param(name, format!("must be > 0, got {v}")))
            }
        };
        positive("sigma", self.sigma)?;
        positive("delta", self.delta)?;
        positive("context_bound", self.context_bound)?;
        positive("param_bound", self.param_bound)?;
        positive("b", self.b)?;
        if self.delta >= 1.0 {
            return Err(BanditError::param(
                "delta",
                format!("must be < 1, got {}", self.delta),
            ));
        }
        if self.dim == 0 {
            return Err(BanditError::param("dim", "must be at least 1"));
        }
        if !(self.u_sum.is_finite() && self.u_sum >= 0.0) {
            return Err(BanditError::param(
                "u_sum",
                format!("must be >= 0, got {}", self.u_sum),
            ));
        }
        Ok(())
    }
}

/// Confidence radius `σ²(2 + 4d ln(1 + T B²W²/d + u/d) + 8 ln(4/δ))`.
///
/// Evaluated as written for any inputs; call [`DiagnosticsParams::validate`]
/// first when the result must be meaningful.
pub fn beta_bound(p: &DiagnosticsParams, horizon: u64) -> f64 {
    let d = p.dim as f64;
    let t = horizon as f64;
    let bw = p.context_bound * p.context_bound * p.param_bound * p.param_bound;
    p.sigma
        * p.sigma
        * (2.0 + 4.0 * d * (1.0 + t * bw / d + p.u_sum / d).ln() + 8.0 * (4.0 / p.delta).ln())
}

/// Regret bound `bσ √(T (d ln(1 + T B²W²/(dσ²) + u/(dσ²)) + ln(4/δ)))` at
/// horizon `t`.
pub fn regret_bound(p: &DiagnosticsParams, t: u64) -> f64 {
    let d = p.dim as f64;
    let t = t as f64;
    let s2 = p.sigma * p.sigma;
    let bw = p.context_bound * p.context_bound * p.param_bound * p.param_bound;
    let inner = d * (1.0 + t * bw / (d * s2) + p.u_sum / (d * s2)).ln() + (4.0 / p.delta).ln();
    p.b * p.sigma * (t * inner).sqrt()
}

/// [`regret_bound`] at `t = 1..=horizon`.
pub fn regret_bound_curve(p: &DiagnosticsParams, horizon: u64) -> Result<Vec<f64>> {
    p.validate()?;
    if horizon == 0 {
        return Err(BanditError::param("horizon", "must be at least 1"));
    }
    Ok((1..=horizon).map(|t| regret_bound(p, t)).collect())
}

/// Upper bound `d ln(1 + (T B² + Σγu²)/(dλ))` on `ln det Σ_T − ln det Σ_0`.
pub fn potential_bound(
    dim: usize,
    lambda: f64,
    horizon: u64,
    context_bound: f64,
    inflation_sum: f64,
) -> f64 {
    let d = dim as f64;
    d * (1.0 + (horizon as f64 * context_bound * context_bound + inflation_sum) / (d * lambda)).ln()
}
