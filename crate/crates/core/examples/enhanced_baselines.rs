//! ε-greedy, Beta Thompson and linear Thompson with and without the k-NN term
//! and softmax attention.

use lnucb::harness::{run_cells, EnvSpec};
use lnucb::metrics::aggregate;
use lnucb::PolicySpec;

fn main() -> lnucb::Result<()> {
    let env = EnvSpec::synthetic_default().prepare()?;
    let ids = [
        "eps-greedy",
        "enhanced-eps-greedy",
        "beta-thompson",
        "enhanced-beta-thompson",
        "linthompson",
        "enhanced-linthompson",
    ];
    let specs: Vec<PolicySpec> = ids
        .iter()
        .map(|id| PolicySpec::new(id))
        .collect::<lnucb::Result<_>>()?;
    let runs = run_cells(&env, &specs, &[0, 1, 2], 1000, false, 1)?;
    for row in aggregate(&runs)?.rows {
        println!(
            "{:<24} mean reward {:.4} ± {:.4}",
            row.policy, row.final_mean_reward_mean, row.final_mean_reward_std
        );
    }
    Ok(())
}
