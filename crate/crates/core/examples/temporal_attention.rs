//! The attention-scaled exploration rate and the softmax arm weights used by
//! the enhanced baselines.

use lnucb::attention::{softmax_attention, AttentionParams, RewardStats};

fn main() -> lnucb::Result<()> {
    let mut stats = RewardStats::new(3)?;
    for (arm, reward) in [(0, 1.0), (0, 0.0), (0, 1.0), (1, 0.2)] {
        stats.record(arm, reward)?;
    }
    let g = stats.global_mean();
    println!("global mean g = {g:.3}");
    for kappa in [0.0, 0.5, 1.0] {
        let p = AttentionParams::new(1.0, kappa)?;
        let rates: Vec<String> = (0..3)
            .map(|a| {
                let rate = p.exploration_rate(stats.count(a), g, stats.local_mean(a).unwrap());
                format!("{rate:.3}")
            })
            .collect();
        println!("κ = {kappa}: α per arm = {}", rates.join(", "));
    }
    let p = AttentionParams::new(1.0, 0.5)?;
    let decay: Vec<String> = [0, 1, 10, 100]
        .iter()
        .map(|&n| format!("N={n}: {:.4}", p.exploration_rate(n, 0.5, 0.5)))
        .collect();
    println!("decay with pulls: {}", decay.join("  "));
    println!(
        "softmax weights for counts [0, 5, 50]: {:.4?}",
        softmax_attention(&[0, 5, 50], 0.1)?
    );
    Ok(())
}
