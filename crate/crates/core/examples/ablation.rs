//! The four ablation variants (linear base, +attention, +adaptive k-NN, full)
//! across exploration scales.

use lnucb::harness::{run_cells, EnvSpec};
use lnucb::metrics::{aggregate, mean, std_population};
use lnucb::PolicySpec;

fn main() -> lnucb::Result<()> {
    let env = EnvSpec::synthetic_default().prepare()?;
    let seeds: Vec<u64> = (0..5).collect();
    for (name, exploration, knn) in [
        ("base", "fixed", "off"),
        ("+attention", "attention", "off"),
        ("+knn", "fixed", "adaptive"),
        ("full", "attention", "adaptive"),
    ] {
        let mut per_alpha = Vec::new();
        for alpha0 in [0.1, 1.0, 10.0] {
            let spec = PolicySpec::new("lnucb-ta")?
                .with("exploration", exploration)?
                .with("knn", knn)?
                .with("alpha0", alpha0)?;
            let runs = run_cells(&env, &[spec], &seeds, 1000, false, 1)?;
            per_alpha.push(aggregate(&runs)?.rows[0].final_mean_reward_mean);
        }
        println!(
            "{name:<11} mean reward by α₀ {:.4?}  mean {:.4}  std {:.4}",
            per_alpha,
            mean(&per_alpha),
            std_population(&per_alpha)
        );
    }
    Ok(())
}
