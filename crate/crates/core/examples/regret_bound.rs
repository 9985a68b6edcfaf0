//! The high-probability regret bound next to an observed regret curve.

use lnucb::env::synthetic_hybrid;
use lnucb::harness::run_policy;
use lnucb::metrics::{beta_bound, regret_bound_curve, sublinearity_exponent, DiagnosticsParams};
use lnucb::PolicySpec;

fn main() -> lnucb::Result<()> {
    let horizon = 5000;
    let params = DiagnosticsParams {
        dim: 10,
        ..DiagnosticsParams::default()
    };
    let curve = regret_bound_curve(&params, horizon)?;
    let env = synthetic_hybrid(0, 10, 5, 3, 0.1)?;
    let run = run_policy(
        &env,
        &PolicySpec::new("lnucb-ta")?,
        0,
        horizon as usize,
        false,
    )?;
    let regret = run.cumulative_regret.as_ref().unwrap();
    println!("β at T = {horizon}: {:.2}", beta_bound(&params, horizon));
    for t in [10, 100, 1000, 5000] {
        println!(
            "t = {t:>5}: bound {:>9.1}  observed {:>7.1}",
            curve[t - 1],
            regret[t - 1]
        );
    }
    println!(
        "fitted regret exponent {:.3}",
        sublinearity_exponent(regret)?
    );
    Ok(())
}
