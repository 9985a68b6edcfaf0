//! Every registered policy at its default parameters, averaged over seeds.

use lnucb::harness::{run_cells, EnvSpec};
use lnucb::metrics::aggregate;
use lnucb::policies::POLICY_IDS;
use lnucb::PolicySpec;

fn main() -> lnucb::Result<()> {
    let env = EnvSpec::synthetic_default().prepare()?;
    let specs: Vec<PolicySpec> = POLICY_IDS
        .iter()
        .map(|id| PolicySpec::new(id))
        .collect::<lnucb::Result<_>>()?;
    let runs = run_cells(&env, &specs, &[0, 1, 2, 3, 4], 1000, false, 1)?;
    let mut rows = aggregate(&runs)?.rows;
    rows.sort_by(|a, b| {
        b.final_mean_reward_mean
            .total_cmp(&a.final_mean_reward_mean)
    });
    println!("{:<24} {:>12} {:>10}", "policy", "mean reward", "regret");
    for r in rows {
        println!(
            "{:<24} {:>12.4} {:>10.1}",
            r.policy,
            r.final_mean_reward_mean,
            r.final_regret_mean.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
