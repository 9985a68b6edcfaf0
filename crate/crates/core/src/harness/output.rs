//! Result files and the all-or-nothing writer.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{BanditError, Result};
use crate::metrics::{AggregateRow, RunResult};

pub const RESULT_COLUMNS: &[&str] = &[
    "round",
    "cumulative_reward",
    "mean_reward",
    "cumulative_regret",
];
pub const TRACE_COLUMNS: &[&str] = &["linear", "knn", "alpha", "width", "ucb"];
pub const AGGREGATE_COLUMNS: &[&str] = &[
    "policy",
    "params",
    "final_cum_reward_mean",
    "final_cum_reward_std",
    "final_mean_reward_mean",
    "final_mean_reward_std",
    "final_regret_mean",
    "final_regret_std",
    "runtime_s_mean",
];

/// Files staged in memory and written together.
///
/// Every file is first written to a hidden temporary next to its target and
/// only renamed into place once all of them were written, so a failure
/// leaves no result file behind.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl OutputSet {
    pub fn new() -> Self {
        OutputSet::default()
    }

    pub fn add(&mut self, relative: impl Into<PathBuf>, bytes: impl Into<Vec<u8>>) {
        self.files.push((relative.into(), bytes.into()));
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    /// Writes everything under `dir`; returns the final paths.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut unique = std::collections::BTreeSet::new();
        if let Some((dup, _)) = self.files.iter().find(|(p, _)| !unique.insert(p)) {
            return Err(BanditError::Experiment(format!(
                "output {} would be written twice",
                dup.display()
            )));
        }
        let mut staged: Vec<(PathBuf, PathBuf)> = Vec::with_capacity(self.files.len());
        // Directories this commit creates, outermost first, for rollback.
        let mut created: Vec<PathBuf> = Vec::new();
        let result = (|| {
            for (relative, bytes) in &self.files {
                let target = dir.join(relative);
                let parent = target.parent().unwrap_or(dir);
                let mut missing: Vec<PathBuf> = parent
                    .ancestors()
                    .take_while(|p| !p.exists())
                    .map(Path::to_path_buf)
                    .collect();
                missing.reverse();
                fs::create_dir_all(parent).map_err(|e| BanditError::io(parent, e))?;
                created.extend(missing);
                let name = target.file_name().and_then(|n| n.to_str()).unwrap_or("out");
                let temp = parent.join(format!(".{name}.tmp-{}", std::process::id()));
                fs::write(&temp, bytes).map_err(|e| BanditError::io(&temp, e))?;
                staged.push((temp, target));
            }
            Ok(())
        })();
        if let Err(e) = result {
            for (temp, _) in &staged {
                let _ = fs::remove_file(temp);
            }
            remove_created(&created);
            return Err(e);
        }
        let mut written: Vec<PathBuf> = Vec::with_capacity(staged.len());
        for (i, (temp, target)) in staged.iter().enumerate() {
            if let Err(e) = fs::rename(temp, target) {
                // Roll back so the directory never holds a partial set.
                for done in &written {
                    let _ = fs::remove_file(done);
                }
                for (rest, _) in &staged[i..] {
                    let _ = fs::remove_file(rest);
                }
                remove_created(&created);
                return Err(BanditError::io(target, e));
            }
            written.push(target.clone());
        }
        Ok(written)
    }
}

/// Innermost first; only directories left empty are removed.
fn remove_created(created: &[PathBuf]) {
    for d in created.iter().rev() {
        let _ = fs::remove_dir(d);
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| BanditError::Experiment(format!("csv encoding failed: {e}"));
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(&row).map_err(err)?;
    }
    w.into_inner()
        .map_err(|e| BanditError::Experiment(format!("csv encoding failed: {e}")))
}

/// Per-round series of one run; trace columns are appended when `trace` is
/// set (empty cells for policies without a score breakdown).
pub fn result_csv(run: &RunResult, trace: bool) -> Result<Vec<u8>> {
    let mut header: Vec<&str> = RESULT_COLUMNS.to_vec();
    if trace {
        header.extend_from_slice(TRACE_COLUMNS);
    }
    let rows = (0..run.horizon()).map(|t| {
        let mut row = vec![
            t.to_string(),
            run.cumulative_reward[t].to_string(),
            run.mean_reward[t].to_string(),
            opt(run.cumulative_regret.as_ref().map(|r| r[t])),
        ];
        if trace {
            match run.trace.as_ref().map(|b| b[t]) {
                Some(b) => row.extend(
                    [b.linear, b.knn, b.alpha, b.width, b.ucb]
                        .iter()
                        .map(f64::to_string),
                ),
                None => row.extend(std::iter::repeat_n(String::new(), TRACE_COLUMNS.len())),
            }
        }
        row
    });
    csv_bytes(&header, rows)
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> Result<Vec<u8>> {
    csv_bytes(
        AGGREGATE_COLUMNS,
        rows.iter().map(|r| {
            vec![
                r.policy.clone(),
                r.params.clone(),
                r.final_cum_reward_mean.to_string(),
                r.final_cum_reward_std.to_string(),
                r.final_mean_reward_mean.to_string(),
                r.final_mean_reward_std.to_string(),
                opt(r.final_regret_mean),
                opt(r.final_regret_std),
                r.runtime_s_mean.to_string(),
            ]
        }),
    )
}

pub fn table_csv(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    csv_bytes(header, rows.into_iter())
}

pub fn json_bytes(value: &serde_json::Value) -> Result<Vec<u8>> {
    let mut bytes =
        serde_json::to_vec_pretty(value).map_err(|e| BanditError::Experiment(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// File-name friendly rendering of a parameter string.
pub fn slug(s: &str) -> String {
    if s.is_empty() {
        return "default".into();
    }
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commit_writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputSet::new();
        out.add("a.txt", "1");
        out.add("sub/b.txt", "2");
        let written = out.commit(dir.path()).unwrap();
        assert_eq!(written.len(), 2);
        assert_eq!(
            fs::read_to_string(dir.path().join("sub/b.txt")).unwrap(),
            "2"
        );
        let leftovers: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name().to_string_lossy().contains(".tmp-"))
            .collect();
        assert!(leftovers.is_empty());
    }

    #[test]
    fn failed_commit_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("blocker"), "file, not a directory").unwrap();
        let mut out = OutputSet::new();
        out.add("ok.txt", "1");
        out.add("fresh/deeper/x.txt", "3");
        out.add("blocker/inner.txt", "2");
        assert!(out.commit(dir.path()).is_err());
        let names: Vec<String> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, vec!["blocker".to_string()]);
    }

    #[test]
    fn duplicate_paths_are_refused_before_writing() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputSet::new();
        out.add("runs/a.csv", "1");
        out.add("runs/a.csv", "2");
        assert!(out.commit(dir.path()).is_err());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn failed_rename_rolls_back() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir_all(dir.path().join("z.txt/inner")).unwrap();
        let mut out = OutputSet::new();
        out.add("a.txt", "1");
        out.add("z.txt", "2");
        assert!(out.commit(dir.path()).is_err());
        let mut names: Vec<String> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        assert_eq!(names, vec!["z.txt".to_string()]);
    }

    #[test]
    fn result_schema() {
        let run = RunResult::from_rewards("p", "", 0, vec![0, 1], &[1.0, 0.0], Some(&[1.0, 1.0]))
            .unwrap();
        let text = String::from_utf8(result_csv(&run, true).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "round,cumulative_reward,mean_reward,cumulative_regret,linear,knn,alpha,width,ucb"
        );
        assert_eq!(lines.next().unwrap(), "0,1,1,0,,,,,");
        assert_eq!(lines.next().unwrap(), "1,1,0.5,1,,,,,");
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("alpha0=0.1;kappa=1"), "alpha0_0.1_kappa_1");
        assert_eq!(slug(""), "default");
    }
}
