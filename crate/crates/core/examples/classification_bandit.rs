//! Classification as a bandit: one arm per class, reward 1 for the right
//! label. Uses the generated two-class dataset unless a CSV path (label in
//! the last column, header row) is given.

use lnucb::env::{load_classification_csv, two_class_with_bumps, Environment};
use lnucb::harness::run_policy;
use lnucb::PolicySpec;

fn main() -> lnucb::Result<()> {
    let env = match std::env::args().nth(1) {
        Some(path) => {
            let cols = std::fs::read_to_string(&path)
                .map_err(|e| lnucb::BanditError::Experiment(format!("{path}: {e}")))?
                .lines()
                .next()
                .map_or(1, |l| l.split(',').count());
            load_classification_csv(&path, cols - 1, true, 0)?
        }
        None => two_class_with_bumps(0, 3000, 5, 3, 1.0)?,
    };
    println!(
        "{} rows, {} classes {:?}",
        env.len(),
        env.arms(),
        env.classes()
    );
    for id in ["lnucb-ta", "linucb", "eps-greedy", "beta-thompson"] {
        let run = run_policy(&env, &PolicySpec::new(id)?, 0, env.len(), false)?;
        println!(
            "{id:<14} misclassifications (regret) {:>7.0}",
            run.final_regret().unwrap()
        );
    }
    Ok(())
}
