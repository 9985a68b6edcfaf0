use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lnucb::harness::{self, ExperimentSpec, PolicyEntry, RawConfig};
use lnucb::metrics::DiagnosticsParams;
use lnucb::policies::canonical_param;
use lnucb::BanditError;

#[derive(Parser)]
#[command(name = "bandit", version, about = "Contextual bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One policy setting on one seed.
    Run(ExperimentArgs),
    /// Several policies or seeds, aggregated.
    Compare(ExperimentArgs),
    /// Parameter grids crossed with seeds, with the best setting per policy.
    Sweep(ExperimentArgs),
    /// Regret-bound curve, optionally overlaid on a run's regret.
    Bound(BoundArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment file (`key = value` lines, `[policy]` sections).
    #[arg(long)]
    config: Option<PathBuf>,
    /// synthetic | two-class | classification | news
    #[arg(long)]
    env: Option<String>,
    /// Dataset for classification and news.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Policy id; repeat for several.
    #[arg(long = "policy")]
    policies: Vec<String>,
    /// Horizon (matched steps).
    #[arg(long = "T", short = 'T')]
    horizon: Option<usize>,
    /// `7`, `1,2,3` or `0..20`.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv, json or csv,json.
    #[arg(long)]
    format: Option<String>,
    /// Add per-round score components to the result CSVs.
    #[arg(long)]
    trace: bool,

    /// Policy parameter as `key=value` or `policy:key=value`; comma lists
    /// make a grid.
    #[arg(long = "param")]
    params: Vec<String>,
    #[arg(long, alias = "alpha")]
    alpha0: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    theta_min: Option<String>,
    #[arg(long)]
    theta_max: Option<String>,
    #[arg(long)]
    gamma_cov: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    gamma_sm: Option<String>,

    /// Environment setting as `key=value` (dim, arms, bumps, noise,
    /// env_seed, rows, label_column, header, shuffle_seed, replay, ...).
    #[arg(long = "env-param")]
    env_params: Vec<String>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long = "T", short = 'T', default_value_t = 1000)]
    horizon: u64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Context norm bound.
    #[arg(long = "B", default_value_t = 1.0)]
    context_bound: f64,
    /// Parameter norm bound.
    #[arg(long = "W", default_value_t = 1.0)]
    param_bound: f64,
    #[arg(long = "d", default_value_t = 10)]
    dim: usize,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Accumulated squared k-NN radii.
    #[arg(long, default_value_t = 0.0)]
    u_sum: f64,
    /// result.csv whose cumulative_regret column is printed alongside.
    #[arg(long)]
    overlay: Option<PathBuf>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

fn split_kv(raw: &str) -> Result<(&str, &str), BanditError> {
    raw.split_once('=')
        .ok_or_else(|| BanditError::InvalidParameter {
            name: raw.to_string(),
            reason: "expected key=value".into(),
        })
}

impl ExperimentArgs {
    fn into_spec(self) -> Result<ExperimentSpec, BanditError> {
        let mut raw = match &self.config {
            Some(path) => RawConfig::load(path)?,
            None => RawConfig::default(),
        };
        let mut global = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                raw.global.insert(key.to_string(), v);
            }
        };
        global("env", self.env);
        global("data", self.data.map(|p| p.display().to_string()));
        global("t", self.horizon.map(|t| t.to_string()));
        global("seeds", self.seeds);
        global("jobs", self.jobs.map(|j| j.to_string()));
        global("out", self.out.map(|p| p.display().to_string()));
        global("format", self.format);
        if self.trace {
            global("trace", Some("true".into()));
        }
        for kv in &self.env_params {
            let (k, v) = split_kv(kv)?;
            raw.global
                .insert(harness::config::normalize_key(k), v.trim().to_string());
        }

        if !self.policies.is_empty() {
            // Listed policies replace the config's, keeping a section's
            // parameters when its id is listed again.
            let mut sections = std::mem::take(&mut raw.policies);
            raw.policies = self
                .policies
                .iter()
                .map(|id| {
                    let id = id.trim().to_ascii_lowercase();
                    match sections.iter().position(|s| s.id == id) {
                        Some(i) => sections.remove(i),
                        None => PolicyEntry::new(id),
                    }
                })
                .collect();
        }
        if raw.policies.is_empty() {
            raw.policies.push(PolicyEntry::new("lnucb-ta"));
        }

        let shorthand = [
            ("alpha0", self.alpha0),
            ("kappa", self.kappa),
            ("lambda", self.lambda),
            ("theta_min", self.theta_min),
            ("theta_max", self.theta_max),
            ("gamma_cov", self.gamma_cov),
            ("k", self.k),
            ("epsilon", self.epsilon),
            ("rho", self.rho),
            ("gamma_sm", self.gamma_sm),
        ];
        let mut assignments: Vec<(Option<String>, String, String)> = shorthand
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (None, k.to_string(), v)))
            .collect();
        for raw_param in &self.params {
            let (target, kv) = match raw_param.split_once(':') {
                Some((policy, rest)) if !policy.contains('=') => {
                    (Some(policy.trim().to_ascii_lowercase()), rest)
                }
                _ => (None, raw_param.as_str()),
            };
            let (k, v) = split_kv(kv)?;
            assignments.push((target, k.to_string(), v.to_string()));
        }
        for (target, key, value) in assignments {
            let mut applied = false;
            for entry in raw.policies.iter_mut() {
                if target.as_deref().is_some_and(|t| t != entry.id) {
                    continue;
                }
                // Stored under the canonical name so a later assignment
                // through an alias replaces the earlier one.
                match canonical_param(&entry.id, &key) {
                    Some(canonical) => {
                        entry.params.retain(|k, _| {
                            canonical_param(&entry.id, k).as_deref() != Some(canonical.as_str())
                        });
                        entry.set(&canonical, &value);
                        applied = true;
                    }
                    None if target.is_some() => {
                        return Err(BanditError::InvalidParameter {
                            name: key,
                            reason: format!("not a parameter of {}", entry.id),
                        });
                    }
                    None => {}
                }
            }
            if !applied {
                return Err(BanditError::InvalidParameter {
                    name: key,
                    reason: "no selected policy takes this parameter".into(),
                });
            }
        }
        ExperimentSpec::from_raw(&raw)
    }
}

fn execute(cli: Cli) -> Result<(), BanditError> {
    let files = match cli.command {
        Command::Run(args) => harness::cmd_run(&args.into_spec()?)?,
        Command::Compare(args) => report(harness::cmd_compare(&args.into_spec()?)?),
        Command::Sweep(args) => report(harness::cmd_sweep(&args.into_spec()?)?),
        Command::Bound(args) => {
            let params = DiagnosticsParams {
                sigma: args.sigma,
                delta: args.delta,
                context_bound: args.context_bound,
                param_bound: args.param_bound,
                dim: args.dim,
                b: args.b,
                u_sum: args.u_sum,
            };
            harness::cmd_bound(&params, args.horizon, args.overlay.as_deref(), &args.out)?
        }
    };
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn report(outcome: harness::CompareOutcome) -> Vec<PathBuf> {
    for row in &outcome.aggregate.rows {
        let params = if row.params.is_empty() {
            "-"
        } else {
            &row.params
        };
        print!(
            "{:<24} {:<32} mean reward {:.4} ± {:.4}",
            row.policy, params, row.final_mean_reward_mean, row.final_mean_reward_std
        );
        match row.final_regret_mean {
            Some(r) => println!("  regret {r:.2}"),
            None => println!(),
        }
    }
    for best in &outcome.best {
        if outcome
            .aggregate
            .rows
            .iter()
            .filter(|r| r.policy == best.policy)
            .count()
            > 1
        {
            println!(
                "best {}: {} ({:.4})",
                best.policy, best.params, best.mean_reward
            );
        }
    }
    outcome.files
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                BanditError::Io { .. } => 2,
                _ => 1,
            })
        }
    }
}
