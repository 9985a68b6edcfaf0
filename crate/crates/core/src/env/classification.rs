use std::path::Path;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::replay::open_error;
use super::{Environment, Episode, RoundFeedback};
use crate::error::{BanditError, Result};
use crate::types::{Context, RngState};

/// A labeled dataset played as a bandit: one arm per class, reward 1 for the
/// true class and 0 otherwise, so regret counts misclassifications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationBanditEnv {
    contexts: Vec<Context>,
    labels: Vec<usize>,
    classes: Vec<String>,
    shuffle_seed: u64,
}

impl ClassificationBanditEnv {
    /// Builds the environment from raw feature rows and class names.
    ///
    /// Classes map to arms in order of first appearance, rows are
    /// ℓ2-normalized and then shuffled with `shuffle_seed`.
    pub fn from_rows(
        features: Vec<Vec<f64>>,
        labels: Vec<String>,
        shuffle_seed: u64,
    ) -> Result<Self> {
        Self::from_rows_at("<rows>", features, labels, shuffle_seed, &[])
    }

    fn from_rows_at(
        source: &str,
        features: Vec<Vec<f64>>,
        labels: Vec<String>,
        shuffle_seed: u64,
        row_numbers: &[usize],
    ) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(BanditError::LengthMismatch {
                left: features.len(),
                right: labels.len(),
            });
        }
        if features.is_empty() {
            return Err(BanditError::Parse {
                path: source.into(),
                row: 0,
                message: "no data rows".into(),
            });
        }
        let dim = features[0].len();
        let mut classes: Vec<String> = Vec::new();
        let mut rows = Vec::with_capacity(features.len());
        for (i, (x, label)) in features.into_iter().zip(labels).enumerate() {
            let row = row_numbers.get(i).copied().unwrap_or(i + 1);
            let bad = |message: String| BanditError::Parse {
                path: source.into(),
                row,
                message,
            };
            if x.len() != dim || dim == 0 {
                return Err(bad(format!("expected {dim} features, found {}", x.len())));
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !norm.is_finite() {
                return Err(bad("non-finite feature".into()));
            }
            if norm == 0.0 {
                return Err(bad("all-zero feature row cannot be normalized".into()));
            }
            let arm = match classes.iter().position(|c| *c == label) {
                Some(a) => a,
                None => {
                    classes.push(label);
                    classes.len() - 1
                }
            };
            rows.push((
                Context::new(x.into_iter().map(|v| v / norm).collect())?,
                arm,
            ));
        }
        rows.shuffle(&mut RngState::new(shuffle_seed).rng());
        let (contexts, labels) = rows.into_iter().unzip();
        Ok(ClassificationBanditEnv {
            contexts,
            labels,
            classes,
            shuffle_seed,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Class names indexed by arm.
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

/// Reads a comma-separated numeric dataset whose class sits in column
/// `label_column` (0-based). Every other column must be numeric.
pub fn load_classification_csv(
    path: impl AsRef<Path>,
    label_column: usize,
    header: bool,
    shuffle_seed: u64,
) -> Result<ClassificationBanditEnv> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| open_error(path, e))?;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut row_numbers = Vec::new();
    let mut width = None;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1 + usize::from(header);
        let bad = |message: String| BanditError::Parse {
            path: shown.clone(),
            row,
            message,
        };
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(bad(format!(
                "expected {expected} columns, found {}",
                record.len()
            )));
        }
        if label_column >= record.len() {
            return Err(bad(format!(
                "label column {label_column} missing ({} columns)",
                record.len()
            )));
        }
        let mut x = Vec::with_capacity(record.len() - 1);
        for (c, s) in record.iter().enumerate() {
            if c == label_column {
                labels.push(s.to_string());
            } else {
                let v = s
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(format!("column {c}: {s:?} is not a finite number")))?;
                x.push(v);
            }
        }
        features.push(x);
        row_numbers.push(row);
    }
    ClassificationBanditEnv::from_rows_at(&shown, features, labels, shuffle_seed, &row_numbers)
}

/// A two-class problem on the unit sphere: the label is the side of a random
/// hyperplane, flipped inside `bump_count` random caps of Euclidean radius
/// `bump_radius`. Linear models get most of it; the caps need local memory.
pub fn two_class_with_bumps(
    seed: u64,
    rows: usize,
    dim: usize,
    bump_count: usize,
    bump_radius: f64,
) -> Result<ClassificationBanditEnv> {
    if dim == 0 || rows == 0 {
        return Err(BanditError::param("dim", "rows and dim must be at least 1"));
    }
    let mut rng = RngState::new(seed).rng();
    let mut unit = || loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-12 {
            break v.into_iter().map(|a| a / n).collect::<Vec<f64>>();
        }
    };
    let normal = unit();
    let centers: Vec<Vec<f64>> = (0..bump_count).map(|_| unit()).collect();
    let mut features = Vec::with_capacity(rows);
    let mut labels = Vec::with_capacity(rows);
    for _ in 0..rows {
        let x = unit();
        let side = x.iter().zip(&normal).map(|(a, b)| a * b).sum::<f64>() > 0.0;
        let flips = centers
            .iter()
            .filter(|c| {
                x.iter()
                    .zip(c.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    < bump_radius * bump_radius
            })
            .count();
        labels.push(if side ^ (flips % 2 == 1) { "1" } else { "0" }.to_string());
        features.push(x);
    }
    ClassificationBanditEnv::from_rows(features, labels, seed)
}

struct ClassificationEpisode<'a> {
    env: &'a ClassificationBanditEnv,
    order: Vec<usize>,
    next: usize,
    current: Option<usize>,
}

impl Episode for ClassificationEpisode<'_> {
    fn next_context(&mut self) -> Result<Option<Context>> {
        let Some(&row) = self.order.get(self.next) else {
            return Ok(None);
        };
        self.next += 1;
        self.current = Some(row);
        Ok(Some(self.env.contexts[row].clone()))
    }

    fn feedback(&mut self, arm: usize) -> Result<RoundFeedback> {
        let arms = self.env.classes.len();
        if arm >= arms {
            return Err(BanditError::InvalidArm { arm, arms });
        }
        let row = self.current.take().ok_or_else(|| {
            BanditError::Experiment("feedback requested before a context was drawn".into())
        })?;
        let reward = if self.env.labels[row] == arm {
            1.0
        } else {
            0.0
        };
        Ok(RoundFeedback {
            reward,
            step_consumed: true,
            oracle_reward: Some(1.0),
            expected_reward: Some(reward),
            observed_context: None,
        })
    }
}

impl Environment for ClassificationBanditEnv {
    fn name(&self) -> &str {
        "classification"
    }

    fn dim(&self) -> usize {
        self.contexts[0].dim()
    }

    fn arms(&self) -> usize {
        self.classes.len()
    }

    fn reward_range(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn has_oracle(&self) -> bool {
        true
    }

    fn max_rounds(&self) -> Option<usize> {
        Some(self.len())
    }

    /// Rows come in load order permuted again by `seed`.
    fn episode(&self, seed: u64) -> Result<Box<dyn Episode + '_>> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut RngState::new(seed).stream(0x0063_6c61_7373));
        Ok(Box::new(ClassificationEpisode {
            env: self,
            order,
            next: 0,
            current: None,
        }))
    }

    fn metadata(&self) -> serde_json::Value {
        serde_json::json!({
            "name": "classification",
            "dim": self.dim(),
            "arms": self.arms(),
            "rows": self.len(),
            "shuffle_seed": self.shuffle_seed,
            "class_to_arm": self.classes,
        })
    }
}
