//! Experiment orchestration behind the `bandit` command: environment and
//! policy specs, the run loop, parallel fan-out and result emission.

pub mod config;
pub mod output;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::env::{
    load_classification_csv, load_news_csv, two_class_with_bumps, Environment, ReplayProtocol,
    SyntheticHybridEnv, SyntheticParams,
};
use crate::error::{BanditError, Result};
use crate::metrics::{
    aggregate, beta_bound, regret_bound, AggregateResult, DiagnosticsParams, RunResult,
};
use crate::policies::{build_policy, canonical_param, PolicySpec};
use crate::types::RNG_ALGORITHM;

pub use config::{parse_seeds, PolicyEntry, RawConfig};
pub use output::OutputSet;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where rounds come from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnvSpec {
    /// Synthetic hybrid problem. Without `env_seed` a fresh instance is drawn
    /// from each run seed, so results average over problem instances.
    Synthetic {
        dim: usize,
        arms: usize,
        bumps: usize,
        noise: f64,
        linear_scale: f64,
        bump_radius: f64,
        bump_total: f64,
        positive: bool,
        env_seed: Option<u64>,
    },
    /// Generated two-class dataset with label-flipping caps.
    TwoClass {
        rows: usize,
        dim: usize,
        bumps: usize,
        bump_radius: f64,
        env_seed: u64,
    },
    Classification {
        path: PathBuf,
        label_column: usize,
        header: bool,
        shuffle_seed: u64,
    },
    News {
        path: PathBuf,
        replay: ReplayProtocol,
    },
}

fn get_parsed<T: std::str::FromStr>(
    keys: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Result<T> {
    match keys.get(key) {
        None => Ok(default),
        Some(raw) => raw
            .parse()
            .map_err(|_| BanditError::param(key, format!("cannot parse {raw:?}"))),
    }
}

impl EnvSpec {
    /// Default synthetic suite: d = 10, five arms, three bumps per arm.
    pub fn synthetic_default() -> Self {
        let p = SyntheticParams::new(0, 10, 5, 3, 0.1);
        EnvSpec::Synthetic {
            dim: p.dim,
            arms: p.arms,
            bumps: p.bump_count,
            noise: p.noise_sigma,
            linear_scale: p.linear_scale,
            bump_radius: p.bump_radius,
            bump_total: p.bump_total,
            positive: p.positive,
            env_seed: None,
        }
    }

    /// Reads the environment keys of a config (`env`, `data`, `dim`, ...).
    pub fn from_keys(keys: &BTreeMap<String, String>) -> Result<Self> {
        let kind = keys.get("env").map(String::as_str).unwrap_or("synthetic");
        let data = || {
            keys.get("data")
                .map(PathBuf::from)
                .ok_or_else(|| BanditError::param("data", format!("env {kind} needs a data path")))
        };
        match kind {
            "synthetic" => {
                let EnvSpec::Synthetic {
                    dim,
                    arms,
                    bumps,
                    noise,
                    linear_scale,
                    bump_radius,
                    bump_total,
                    positive,
                    ..
                } = EnvSpec::synthetic_default()
                else {
                    unreachable!()
                };
                Ok(EnvSpec::Synthetic {
                    dim: get_parsed(keys, "dim", dim)?,
                    arms: get_parsed(keys, "arms", arms)?,
                    bumps: get_parsed(keys, "bumps", bumps)?,
                    noise: get_parsed(keys, "noise", noise)?,
                    linear_scale: get_parsed(keys, "linear_scale", linear_scale)?,
                    bump_radius: get_parsed(keys, "bump_radius", bump_radius)?,
                    bump_total: get_parsed(keys, "bump_total", bump_total)?,
                    positive: get_parsed(keys, "positive", positive)?,
                    env_seed: keys
                        .get("env_seed")
                        .map(|s| {
                            s.parse().map_err(|_| {
                                BanditError::param("env_seed", format!("cannot parse {s:?}"))
                            })
                        })
                        .transpose()?,
                })
            }
            "two-class" => Ok(EnvSpec::TwoClass {
                rows: get_parsed(keys, "rows", 5000)?,
                dim: get_parsed(keys, "dim", 5)?,
                bumps: get_parsed(keys, "bumps", 3)?,
                bump_radius: get_parsed(keys, "bump_radius", 1.0)?,
                env_seed: get_parsed(keys, "env_seed", 0)?,
            }),
            "classification" => Ok(EnvSpec::Classification {
                path: data()?,
                label_column: get_parsed(keys, "label_column", 0)?,
                header: get_parsed(keys, "header", false)?,
                shuffle_seed: get_parsed(keys, "shuffle_seed", 0)?,
            }),
            "news" => Ok(EnvSpec::News {
                path: data()?,
                replay: ReplayProtocol::parse(
                    keys.get("replay").map(String::as_str).unwrap_or("per-row"),
                )?,
            }),
            other => Err(BanditError::param(
                "env",
                format!("expected synthetic|two-class|classification|news, got {other:?}"),
            )),
        }
    }

    fn synthetic_params(&self, seed: u64) -> Option<SyntheticParams> {
        match *self {
            EnvSpec::Synthetic {
                dim,
                arms,
                bumps,
                noise,
                linear_scale,
                bump_radius,
                bump_total,
                positive,
                env_seed,
            } => Some(SyntheticParams {
                seed: env_seed.unwrap_or(seed),
                dim,
                arms,
                bump_count: bumps,
                noise_sigma: noise,
                linear_scale,
                bump_radius,
                bump_total,
                positive,
            }),
            _ => None,
        }
    }

    /// Loads files or builds the fixed instance, once per experiment.
    pub fn prepare(&self) -> Result<PreparedEnv> {
        let spec_hash =
            || output::sha256_hex(serde_json::to_string(self).unwrap_or_default().as_bytes());
        let file_hash = |path: &Path| -> Result<String> {
            let bytes = std::fs::read(path).map_err(|e| BanditError::io(path, e))?;
            Ok(output::sha256_hex(&bytes))
        };
        let (env, input_sha256): (Option<Box<dyn Environment>>, String) = match self {
            EnvSpec::Synthetic { env_seed: None, .. } => {
                // Validate the shape now so errors surface before any run.
                SyntheticHybridEnv::new(self.synthetic_params(0).expect("synthetic"))?;
                (None, spec_hash())
            }
            EnvSpec::Synthetic {
                env_seed: Some(s), ..
            } => (
                Some(Box::new(SyntheticHybridEnv::new(
                    self.synthetic_params(*s).expect("synthetic"),
                )?)),
                spec_hash(),
            ),
            EnvSpec::TwoClass {
                rows,
                dim,
                bumps,
                bump_radius,
                env_seed,
            } => (
                Some(Box::new(two_class_with_bumps(
                    *env_seed,
                    *rows,
                    *dim,
                    *bumps,
                    *bump_radius,
                )?)),
                spec_hash(),
            ),
            EnvSpec::Classification {
                path,
                label_column,
                header,
                shuffle_seed,
            } => {
                let hash = file_hash(path)?;
                (
                    Some(Box::new(load_classification_csv(
                        path,
                        *label_column,
                        *header,
                        *shuffle_seed,
                    )?)),
                    hash,
                )
            }
            EnvSpec::News { path, replay } => {
                let hash = file_hash(path)?;
                (
                    Some(Box::new(load_news_csv(path)?.with_protocol(*replay))),
                    hash,
                )
            }
        };
        Ok(PreparedEnv {
            spec: self.clone(),
            env,
            input_sha256,
        })
    }
}

/// An environment ready to run: either one shared instance or a synthetic
/// recipe instantiated per run seed.
pub struct PreparedEnv {
    spec: EnvSpec,
    env: Option<Box<dyn Environment>>,
    input_sha256: String,
}

impl PreparedEnv {
    pub fn input_sha256(&self) -> &str {
        &self.input_sha256
    }

    /// Calls `f` with the environment used for run seed `seed`.
    pub fn with_env<R>(
        &self,
        seed: u64,
        f: impl FnOnce(&dyn Environment) -> Result<R>,
    ) -> Result<R> {
        match &self.env {
            Some(env) => f(env.as_ref()),
            None => {
                let env = SyntheticHybridEnv::new(
                    self.spec.synthetic_params(seed).expect("synthetic recipe"),
                )?;
                f(&env)
            }
        }
    }

    pub fn metadata(&self) -> serde_json::Value {
        match &self.env {
            Some(env) => env.metadata(),
            None => json!({ "name": "synthetic", "instance": "per-seed", "spec": self.spec }),
        }
    }
}

/// Plays `spec` against `env` for up to `horizon` matched steps.
///
/// Rows without usable feedback (replay mismatches) are skipped without
/// updating the policy. The run ends early if the environment runs out.
pub fn run_policy(
    env: &dyn Environment,
    spec: &PolicySpec,
    seed: u64,
    horizon: usize,
    trace: bool,
) -> Result<RunResult> {
    let start = Instant::now();
    let mut policy = build_policy(spec, env.arms(), env.dim(), seed, env.reward_range())?;
    let mut episode = env.episode(seed)?;
    let mut rewards = Vec::with_capacity(horizon);
    let mut oracle = Vec::with_capacity(horizon);
    let mut arms = Vec::with_capacity(horizon);
    let mut breakdowns = Vec::new();
    let mut attempts = 0u64;
    while rewards.len() < horizon {
        let Some(context) = episode.next_context()? else {
            break;
        };
        let decision = policy.decide(&context, attempts)?;
        attempts += 1;
        let feedback = episode.feedback(decision.arm)?;
        if !feedback.step_consumed {
            continue;
        }
        let learned_from = feedback.observed_context.as_ref().unwrap_or(&context);
        policy.update(decision.arm, learned_from, feedback.reward)?;
        rewards.push(feedback.reward);
        if let Some(o) = feedback.oracle_reward {
            oracle.push(o);
        }
        arms.push(decision.arm);
        if trace {
            if let Some(b) = &decision.breakdown {
                breakdowns.push(b[decision.arm]);
            }
        }
    }
    let oracle = (env.has_oracle() && oracle.len() == rewards.len()).then_some(oracle.as_slice());
    let mut result = RunResult::from_rewards(
        spec.id.clone(),
        spec.canonical_params(),
        seed,
        arms,
        &rewards,
        oracle,
    )?;
    result.attempts = attempts;
    if trace && !breakdowns.is_empty() {
        result.trace = Some(breakdowns);
    }
    result.runtime_s = start.elapsed().as_secs_f64();
    Ok(result)
}

/// Output formats requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
}

impl Formats {
    pub fn parse(s: &str) -> Result<Self> {
        let mut f = Formats {
            csv: false,
            json: false,
        };
        for item in config::split_list(s) {
            match item.to_ascii_lowercase().as_str() {
                "csv" => f.csv = true,
                "json" => f.json = true,
                other => {
                    return Err(BanditError::param(
                        "format",
                        format!("expected csv and/or json, got {other:?}"),
                    ))
                }
            }
        }
        if !(f.csv || f.json) {
            return Err(BanditError::param("format", "no format selected"));
        }
        Ok(f)
    }
}

impl Default for Formats {
    fn default() -> Self {
        Formats {
            csv: true,
            json: true,
        }
    }
}

/// Everything one invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub env: EnvSpec,
    pub policies: Vec<PolicyEntry>,
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub jobs: usize,
    pub out: PathBuf,
    pub formats: Formats,
    pub trace: bool,
}

impl ExperimentSpec {
    /// Builds a spec from parsed config keys. Policies come from the
    /// config's sections.
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let g = &raw.global;
        let spec = ExperimentSpec {
            env: EnvSpec::from_keys(g)?,
            policies: raw.policies.clone(),
            horizon: get_parsed(g, "t", 1000)?,
            seeds: g
                .get("seeds")
                .map(|s| parse_seeds(s))
                .transpose()?
                .unwrap_or_else(|| vec![0]),
            jobs: get_parsed(g, "jobs", 1)?,
            out: g
                .get("out")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("results")),
            formats: g
                .get("format")
                .map(|s| Formats::parse(s))
                .transpose()?
                .unwrap_or_default(),
            trace: get_parsed(g, "trace", false)?,
        };
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.policies.is_empty() {
            return Err(BanditError::param(
                "policy",
                "at least one policy is required",
            ));
        }
        if self.seeds.is_empty() {
            return Err(BanditError::param("seeds", "at least one seed is required"));
        }
        if self.horizon == 0 {
            return Err(BanditError::param("T", "horizon must be at least 1"));
        }
        if self.jobs == 0 {
            return Err(BanditError::param("jobs", "must be at least 1"));
        }
        Ok(())
    }

    /// Every policy crossed with its parameter grid, in listing order with
    /// grid keys varying in key order (last key fastest).
    pub fn expand_policies(&self) -> Result<Vec<PolicySpec>> {
        let mut specs: Vec<PolicySpec> = Vec::new();
        for entry in &self.policies {
            let mut partial = vec![PolicySpec::new(&entry.id)?];
            let mut seen = BTreeMap::new();
            for key in entry.params.keys() {
                let canonical = canonical_param(&entry.id, key).unwrap_or_else(|| key.clone());
                if let Some(other) = seen.insert(canonical, key) {
                    return Err(BanditError::param(
                        key.clone(),
                        format!(
                            "{} sets the same parameter twice ({other} and {key})",
                            entry.id
                        ),
                    ));
                }
            }
            for (key, values) in &entry.params {
                if values.is_empty() {
                    return Err(BanditError::param(key.clone(), "empty grid"));
                }
                let mut next = Vec::with_capacity(partial.len() * values.len());
                for spec in &partial {
                    for v in values {
                        let mut s = spec.clone();
                        s.set(key, v.clone())?;
                        next.push(s);
                    }
                }
                partial = next;
            }
            for spec in partial {
                if specs.contains(&spec) {
                    return Err(BanditError::param(
                        "policies",
                        format!("{spec} is listed twice"),
                    ));
                }
                specs.push(spec);
            }
        }
        Ok(specs)
    }

    /// The reproducibility echo: everything except worker count and output
    /// location, which must not change results.
    pub fn echo(&self) -> serde_json::Value {
        json!({
            "env": self.env,
            "policies": self.policies.iter().map(|p| json!({ "id": p.id, "params": p.params })).collect::<Vec<_>>(),
            "T": self.horizon,
            "seeds": self.seeds,
            "trace": self.trace,
            "formats": self.formats,
        })
    }

    fn header(&self, command: &str, env: &PreparedEnv) -> serde_json::Value {
        json!({
            "command": command,
            "version": VERSION,
            "rng": RNG_ALGORITHM,
            "input_sha256": env.input_sha256(),
            "env": env.metadata(),
            "config": self.echo(),
        })
    }
}

/// Runs every (policy spec, seed) cell on a pool of `jobs` workers. The
/// output is in canonical (spec, seed) order regardless of scheduling.
pub fn run_cells(
    env: &PreparedEnv,
    specs: &[PolicySpec],
    seeds: &[u64],
    horizon: usize,
    trace: bool,
    jobs: usize,
) -> Result<Vec<RunResult>> {
    let cells: Vec<(&PolicySpec, u64)> = specs
        .iter()
        .flat_map(|s| seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BanditError::Experiment(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        cells
            .par_iter()
            .map(|(spec, seed)| env.with_env(*seed, |e| run_policy(e, spec, *seed, horizon, trace)))
            .collect::<Vec<Result<RunResult>>>()
    })
    .into_iter()
    .collect()
}

fn summary(run: &RunResult) -> serde_json::Value {
    json!({
        "policy": run.policy,
        "params": run.params,
        "seed": run.seed,
        "rounds": run.horizon(),
        "attempts": run.attempts,
        "final_cum_reward": run.final_cumulative_reward(),
        "final_mean_reward": run.final_mean_reward(),
        "final_regret": run.final_regret(),
    })
}

fn timing(runs: &[RunResult]) -> serde_json::Value {
    json!({
        "runs": runs.iter().map(|r| json!({
            "policy": r.policy,
            "params": r.params,
            "seed": r.seed,
            "runtime_s": r.runtime_s,
        })).collect::<Vec<_>>(),
        "total_s": runs.iter().map(|r| r.runtime_s).sum::<f64>(),
    })
}

/// `bandit run`: one policy setting, one seed.
pub fn cmd_run(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    spec.validate()?;
    let policies = spec.expand_policies()?;
    if policies.len() != 1 || spec.seeds.len() != 1 {
        return Err(BanditError::Experiment(format!(
            "run takes exactly one policy setting and one seed, got {} and {}; use compare or sweep",
            policies.len(),
            spec.seeds.len()
        )));
    }
    let env = spec.env.prepare()?;
    let run = run_cells(
        &env,
        &policies,
        &spec.seeds,
        spec.horizon,
        spec.trace,
        spec.jobs,
    )?
    .remove(0);
    let mut out = OutputSet::new();
    if spec.formats.csv {
        out.add("result.csv", output::result_csv(&run, spec.trace)?);
    }
    if spec.formats.json {
        let mut doc = spec.header("run", &env);
        doc["seed"] = json!(run.seed);
        doc["summary"] = summary(&run);
        doc["arms"] = json!(run.arms);
        out.add("result.json", output::json_bytes(&doc)?);
    }
    out.add(
        "timing.json",
        output::json_bytes(&timing(std::slice::from_ref(&run)))?,
    );
    out.commit(&spec.out)
}

/// Outcome of `compare` and `sweep`.
#[derive(Debug)]
pub struct CompareOutcome {
    pub runs: Vec<RunResult>,
    pub aggregate: AggregateResult,
    pub best: Vec<BestSetting>,
    pub files: Vec<PathBuf>,
}

/// Best parameter setting of one policy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestSetting {
    pub policy: String,
    pub params: String,
    pub mean_reward: f64,
    pub cum_reward: f64,
}

/// Orders parameter strings `k=v;k=v` value by value, numerically where
/// both sides parse.
fn param_order(a: &str, b: &str) -> Ordering {
    let values = |s: &str| -> Vec<String> {
        s.split(';')
            .map(|kv| kv.split_once('=').map_or(kv, |p| p.1).to_string())
            .collect()
    };
    for (x, y) in values(a).iter().zip(values(b).iter()) {
        let ord = match (x.parse::<f64>(), y.parse::<f64>()) {
            (Ok(p), Ok(q)) => p.total_cmp(&q),
            _ => x.cmp(y),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    a.cmp(b)
}

/// Highest seed-averaged final mean reward per policy; exact ties go to the
/// smaller parameter setting.
pub fn best_settings(agg: &AggregateResult) -> Vec<BestSetting> {
    let mut best: BTreeMap<&str, BestSetting> = BTreeMap::new();
    for row in &agg.rows {
        let candidate = BestSetting {
            policy: row.policy.clone(),
            params: row.params.clone(),
            mean_reward: row.final_mean_reward_mean,
            cum_reward: row.final_cum_reward_mean,
        };
        match best.get(row.policy.as_str()) {
            Some(current)
                if current.mean_reward > candidate.mean_reward
                    || (current.mean_reward == candidate.mean_reward
                        && param_order(&current.params, &candidate.params)
                            != Ordering::Greater) => {}
            _ => {
                best.insert(&row.policy, candidate);
            }
        }
    }
    best.into_values().collect()
}

fn compare_like(spec: &ExperimentSpec, command: &str) -> Result<CompareOutcome> {
    spec.validate()?;
    let policies = spec.expand_policies()?;
    let env = spec.env.prepare()?;
    let runs = run_cells(
        &env,
        &policies,
        &spec.seeds,
        spec.horizon,
        spec.trace,
        spec.jobs,
    )?;
    let agg = aggregate(&runs)?;
    let best = best_settings(&agg);

    let mut out = OutputSet::new();
    for run in &runs {
        let stem = format!(
            "runs/{}__{}__seed{}",
            run.policy,
            output::slug(&run.params),
            run.seed
        );
        if spec.formats.csv {
            out.add(format!("{stem}.csv"), output::result_csv(run, spec.trace)?);
        } else {
            out.add(format!("{stem}.json"), output::json_bytes(&summary(run))?);
        }
    }
    if spec.formats.csv {
        out.add("aggregate.csv", output::aggregate_csv(&agg.rows)?);
    }
    if spec.formats.json {
        let mut doc = spec.header(command, &env);
        doc["aggregate"] = json!(agg.rows);
        doc["robustness"] = json!(agg.robustness);
        if command == "sweep" {
            doc["best"] = json!(best);
        }
        out.add("aggregate.json", output::json_bytes(&doc)?);
    }
    if command == "sweep" && spec.formats.csv {
        out.add(
            "best.csv",
            output::table_csv(
                &[
                    "policy",
                    "best_params",
                    "best_mean_reward",
                    "best_cum_reward",
                ],
                best.iter()
                    .map(|b| {
                        vec![
                            b.policy.clone(),
                            b.params.clone(),
                            b.mean_reward.to_string(),
                            b.cum_reward.to_string(),
                        ]
                    })
                    .collect(),
            )?,
        );
        out.add(
            "robustness.csv",
            output::table_csv(
                &[
                    "policy",
                    "params",
                    "final_mean_reward_mean",
                    "mean_reward_std_across_params",
                ],
                agg.robustness
                    .iter()
                    .flat_map(|r| {
                        r.settings.iter().map(|(p, m)| {
                            vec![
                                r.policy.clone(),
                                p.clone(),
                                m.to_string(),
                                r.mean_reward_std.to_string(),
                            ]
                        })
                    })
                    .collect(),
            )?,
        );
    }
    out.add("timing.json", output::json_bytes(&timing(&runs))?);
    let files = out.commit(&spec.out)?;
    Ok(CompareOutcome {
        runs,
        aggregate: agg,
        best,
        files,
    })
}

/// `bandit compare`: several policies and/or seeds, aggregated.
pub fn cmd_compare(spec: &ExperimentSpec) -> Result<CompareOutcome> {
    let cells = spec.expand_policies()?.len() * spec.seeds.len();
    if cells < 2 {
        return Err(BanditError::Experiment(
            "compare needs at least two policies, settings or seeds".into(),
        ));
    }
    compare_like(spec, "compare")
}

/// `bandit sweep`: parameter grids crossed with seeds, plus the best
/// setting per policy.
pub fn cmd_sweep(spec: &ExperimentSpec) -> Result<CompareOutcome> {
    if spec
        .policies
        .iter()
        .all(|p| p.params.values().all(|v| v.len() < 2))
    {
        return Err(BanditError::Experiment(
            "sweep needs a parameter grid (a comma-separated value)".into(),
        ));
    }
    compare_like(spec, "sweep")
}

/// `bandit bound`: the regret-bound curve, optionally next to the regret
/// column of an existing `result.csv` (one row per round of that run).
pub fn cmd_bound(
    params: &DiagnosticsParams,
    horizon: u64,
    overlay: Option<&Path>,
    out: &Path,
) -> Result<Vec<PathBuf>> {
    params.validate()?;
    let overlay = overlay.map(read_regret_column).transpose()?;
    let rows = match &overlay {
        Some(regret) => regret.len() as u64,
        None => horizon,
    };
    if rows == 0 {
        return Err(BanditError::param("T", "horizon must be at least 1"));
    }
    let mut header = vec!["t", "regret_bound", "beta"];
    if overlay.is_some() {
        header.push("cumulative_regret");
    }
    let table = (1..=rows)
        .map(|t| {
            let mut row = vec![
                t.to_string(),
                regret_bound(params, t).to_string(),
                beta_bound(params, t).to_string(),
            ];
            if let Some(regret) = &overlay {
                row.push(regret[(t - 1) as usize].clone());
            }
            row
        })
        .collect();
    let mut set = OutputSet::new();
    set.add("bound.csv", output::table_csv(&header, table)?);
    set.add(
        "bound.json",
        output::json_bytes(&json!({ "version": VERSION, "params": params, "rows": rows }))?,
    );
    set.commit(out)
}

fn read_regret_column(path: &Path) -> Result<Vec<String>> {
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| crate::env::csv_open_error(path, e))?;
    let shown = path.display().to_string();
    let headers = reader
        .headers()
        .map_err(|e| BanditError::Parse {
            path: shown.clone(),
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = headers
        .iter()
        .position(|h| h == "cumulative_regret")
        .ok_or_else(|| BanditError::Parse {
            path: shown.clone(),
            row: 1,
            message: "no cumulative_regret column".into(),
        })?;
    reader
        .records()
        .enumerate()
        .map(|(i, r)| {
            r.map(|rec| rec.get(col).unwrap_or("").to_string())
                .map_err(|e| BanditError::Parse {
                    path: shown.clone(),
                    row: i + 2,
                    message: e.to_string(),
                })
        })
        .collect()
}
