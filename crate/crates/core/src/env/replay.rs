use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Environment, Episode, RoundFeedback};
use crate::error::{BanditError, Result};
use crate::types::Context;

/// Columns per row of the news log: arm id, click, 100 features.
pub const NEWS_COLUMNS: usize = 102;
pub const NEWS_ARMS: usize = 10;

/// One logged impression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub arm: usize,
    pub click: f64,
    pub context: Context,
}

/// How logged rows are turned into rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ReplayProtocol {
    /// The policy chooses on every row; only rows where its choice equals the
    /// logged arm produce feedback and count as steps.
    #[default]
    PerRow,
    /// The policy chooses once per step on the row at the cursor, then the log
    /// is scanned forward to the first row logging that arm.
    Scan,
}

impl ReplayProtocol {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "per-row" | "per_row" | "row" => Ok(ReplayProtocol::PerRow),
            "scan" => Ok(ReplayProtocol::Scan),
            other => Err(BanditError::param(
                "replay",
                format!("expected per-row|scan, got {other:?}"),
            )),
        }
    }
}

/// Logged bandit feedback evaluated offline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayLogEnv {
    rows: Vec<LogRow>,
    arms: usize,
    dim: usize,
    protocol: ReplayProtocol,
}

impl ReplayLogEnv {
    pub fn from_rows(rows: Vec<LogRow>, arms: usize, protocol: ReplayProtocol) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| BanditError::Experiment("replay log is empty".into()))?;
        let dim = first.context.dim();
        for (i, row) in rows.iter().enumerate() {
            let bad = |message: String| BanditError::Parse {
                path: "<rows>".into(),
                row: i + 1,
                message,
            };
            if row.arm >= arms {
                return Err(bad(format!("logged arm {} outside [0, {arms})", row.arm)));
            }
            if row.click != 0.0 && row.click != 1.0 {
                return Err(bad(format!("click {} is not 0 or 1", row.click)));
            }
            if row.context.dim() != dim {
                return Err(bad(format!(
                    "context has {} features, expected {dim}",
                    row.context.dim()
                )));
            }
        }
        Ok(ReplayLogEnv {
            rows,
            arms,
            dim,
            protocol,
        })
    }

    pub fn rows(&self) -> &[LogRow] {
        &self.rows
    }

    pub fn protocol(&self) -> ReplayProtocol {
        self.protocol
    }

    pub fn with_protocol(mut self, protocol: ReplayProtocol) -> Self {
        self.protocol = protocol;
        self
    }
}

/// Loads a headerless news log: column 0 is the article id in `1..=10`,
/// column 1 the click, the remaining 100 columns the context.
pub fn load_news_csv(path: impl AsRef<Path>) -> Result<ReplayLogEnv> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| open_error(path, e))?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let bad = |message: String| BanditError::Parse {
            path: shown.clone(),
            row,
            message,
        };
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() != NEWS_COLUMNS {
            return Err(bad(format!(
                "expected {NEWS_COLUMNS} columns, found {}",
                record.len()
            )));
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(c, s)| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(format!("column {c}: {s:?} is not a finite number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let arm_id = values[0];
        if arm_id.fract() != 0.0 || !(1.0..=NEWS_ARMS as f64).contains(&arm_id) {
            return Err(bad(format!("arm id {arm_id} outside 1..={NEWS_ARMS}")));
        }
        let click = values[1];
        if click != 0.0 && click != 1.0 {
            return Err(bad(format!("click {click} is not 0 or 1")));
        }
        rows.push(LogRow {
            arm: arm_id as usize - 1,
            click,
            context: Context::new(values[2..].to_vec())?,
        });
    }
    if rows.is_empty() {
        return Err(BanditError::Parse {
            path: shown,
            row: 0,
            message: "file has no rows".into(),
        });
    }
    ReplayLogEnv::from_rows(rows, NEWS_ARMS, ReplayProtocol::default())
}

pub(crate) fn open_error(path: &Path, e: csv::Error) -> BanditError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => BanditError::io(path, source),
        other => BanditError::Parse {
            path: path.display().to_string(),
            row: 0,
            message: format!("{other:?}"),
        },
    }
}

/// Scans forward from `cursor` to the first row logging `chosen_arm`.
///
/// On a match the feedback carries that row's click and context and the
/// returned cursor points just past it. If the log runs out first the step
/// is not consumed and the cursor is the log length.
pub fn replay_step(env: &ReplayLogEnv, chosen_arm: usize, cursor: usize) -> (RoundFeedback, usize) {
    let start = cursor.min(env.rows.len());
    match env.rows[start..].iter().position(|r| r.arm == chosen_arm) {
        Some(offset) => {
            let row = &env.rows[start + offset];
            let feedback = RoundFeedback {
                reward: row.click,
                step_consumed: true,
                oracle_reward: None,
                expected_reward: None,
                observed_context: Some(row.context.clone()),
            };
            (feedback, start + offset + 1)
        }
        None => (RoundFeedback::rejected(), env.rows.len()),
    }
}

struct ReplayEpisode<'a> {
    env: &'a ReplayLogEnv,
    cursor: usize,
    shown: Option<usize>,
}

impl Episode for ReplayEpisode<'_> {
    fn next_context(&mut self) -> Result<Option<Context>> {
        let Some(row) = self.env.rows.get(self.cursor) else {
            return Ok(None);
        };
        self.shown = Some(self.cursor);
        if self.env.protocol == ReplayProtocol::PerRow {
            self.cursor += 1;
        }
        Ok(Some(row.context.clone()))
    }

    fn feedback(&mut self, arm: usize) -> Result<RoundFeedback> {
        if arm >= self.env.arms {
            return Err(BanditError::InvalidArm {
                arm,
                arms: self.env.arms,
            });
        }
        let shown = self.shown.take().ok_or_else(|| {
            BanditError::Experiment("feedback requested before a context was drawn".into())
        })?;
        match self.env.protocol {
            ReplayProtocol::PerRow => {
                let row = &self.env.rows[shown];
                if row.arm != arm {
                    return Ok(RoundFeedback::rejected());
                }
                Ok(RoundFeedback {
                    reward: row.click,
                    step_consumed: true,
                    oracle_reward: None,
                    expected_reward: None,
                    observed_context: None,
                })
            }
            ReplayProtocol::Scan => {
                let (feedback, next) = replay_step(self.env, arm, shown);
                self.cursor = next;
                Ok(feedback)
            }
        }
    }
}

impl Environment for ReplayLogEnv {
    fn name(&self) -> &str {
        "news"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn arms(&self) -> usize {
        self.arms
    }

    fn reward_range(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn has_oracle(&self) -> bool {
        false
    }

    fn max_rounds(&self) -> Option<usize> {
        Some(self.rows.len())
    }

    fn episode(&self, _seed: u64) -> Result<Box<dyn Episode + '_>> {
        Ok(Box::new(ReplayEpisode {
            env: self,
            cursor: 0,
            shown: None,
        }))
    }

    fn metadata(&self) -> serde_json::Value {
        serde_json::json!({
            "name": "news",
            "dim": self.dim,
            "arms": self.arms,
            "rows": self.rows.len(),
            "replay": match self.protocol {
                ReplayProtocol::PerRow => "per-row",
                ReplayProtocol::Scan => "scan",
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(arm: usize, click: f64, x: f64) -> LogRow {
        LogRow {
            arm,
            click,
            context: Context::new(vec![x, 1.0]).unwrap(),
        }
    }

    fn log() -> ReplayLogEnv {
        ReplayLogEnv::from_rows(
            vec![
                row(3, 1.0, 0.0),
                row(2, 0.0, 1.0),
                row(3, 0.0, 2.0),
                row(2, 1.0, 3.0),
            ],
            10,
            ReplayProtocol::Scan,
        )
        .unwrap()
    }

    #[test]
    fn match_consumes_the_row() {
        let env = log();
        let (f, next) = replay_step(&env, 3, 0);
        assert!(f.step_consumed);
        assert_eq!((f.reward, next), (1.0, 1));
    }

    #[test]
    fn mismatch_skips_ahead() {
        let env = log();
        let (f, next) = replay_step(&env, 2, 0);
        assert!(f.step_consumed);
        assert_eq!((f.reward, next), (0.0, 2));
        assert_eq!(f.observed_context.unwrap()[0], 1.0);
        let (f, next) = replay_step(&env, 2, 2);
        assert_eq!((f.reward, next), (1.0, 4));
    }

    #[test]
    fn exhausted_log_is_not_consumed() {
        let env = log();
        let (f, next) = replay_step(&env, 7, 0);
        assert!(!f.step_consumed);
        assert_eq!(next, 4);
        let (f, _) = replay_step(&env, 3, 10);
        assert!(!f.step_consumed);
    }

    #[test]
    fn per_row_episode_counts_only_matches() {
        let env = log().with_protocol(ReplayProtocol::PerRow);
        let mut ep = env.episode(0).unwrap();
        let mut consumed = Vec::new();
        while ep.next_context().unwrap().is_some() {
            let f = ep.feedback(3).unwrap();
            if f.step_consumed {
                consumed.push(f.reward);
            }
        }
        assert_eq!(consumed, vec![1.0, 0.0]);
    }

    #[test]
    fn scan_episode_walks_the_log() {
        let env = log();
        let mut ep = env.episode(0).unwrap();
        ep.next_context().unwrap().unwrap();
        assert_eq!(ep.feedback(2).unwrap().reward, 0.0);
        let x = ep.next_context().unwrap().unwrap();
        assert_eq!(x[0], 2.0);
        assert!(!ep.feedback(9).unwrap().step_consumed);
        assert!(ep.next_context().unwrap().is_none());
    }

    #[test]
    fn from_rows_validates() {
        assert!(ReplayLogEnv::from_rows(vec![], 10, ReplayProtocol::Scan).is_err());
        assert!(
            ReplayLogEnv::from_rows(vec![row(10, 1.0, 0.0)], 10, ReplayProtocol::Scan).is_err()
        );
        assert!(ReplayLogEnv::from_rows(vec![row(1, 0.5, 0.0)], 10, ReplayProtocol::Scan).is_err());
    }
}
