//! LNUCB-TA on the synthetic hybrid environment, with the per-round score
//! breakdown of the chosen arm.

use lnucb::env::{synthetic_hybrid, Environment};
use lnucb::harness::run_policy;
use lnucb::PolicySpec;

fn main() -> lnucb::Result<()> {
    let env = synthetic_hybrid(0, 10, 5, 3, 0.1)?;
    let spec = PolicySpec::new("lnucb-ta")?.with("alpha0", 1)?;
    let run = run_policy(&env, &spec, 7, 2000, true)?;
    println!("{} arms, d = {}", env.arms(), env.dim());
    for t in [0, 9, 99, 999, 1999] {
        let b = run.trace.as_ref().unwrap()[t];
        println!(
            "round {t:>4}: arm {}  linear {:+.3} knn {:+.3} α {:.4} width {:.3} → ucb {:+.3}  regret so far {:.1}",
            run.arms[t],
            b.linear,
            b.knn,
            b.alpha,
            b.width,
            b.ucb,
            run.cumulative_regret.as_ref().unwrap()[t]
        );
    }
    println!("final mean reward {:.4}", run.final_mean_reward());
    Ok(())
}
