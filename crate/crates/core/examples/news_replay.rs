//! Offline replay on a click log in the 102-column news format.
//!
//! Pass a log path, or let the example write a small generated one.

use std::fmt::Write as _;

use lnucb::env::{load_news_csv, ReplayProtocol};
use lnucb::harness::run_policy;
use lnucb::PolicySpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn generated_log() -> std::path::PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut text = String::new();
    for _ in 0..10_000 {
        let arm: usize = rng.random_range(1..=10);
        let features: Vec<f64> = (0..100).map(|_| rng.random_range(0.0..1.0)).collect();
        // article `arm` is clicked more often when feature `arm` is high
        let p = 0.05 + 0.4 * features[arm];
        let click = u8::from(rng.random_bool(p));
        write!(text, "{arm},{click}").unwrap();
        for f in features {
            write!(text, ",{f:.4}").unwrap();
        }
        text.push('\n');
    }
    let path = std::env::temp_dir().join("lnucb_news_example.csv");
    std::fs::write(&path, text).expect("write generated log");
    path
}

fn main() -> lnucb::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(generated_log);
    for protocol in [ReplayProtocol::PerRow, ReplayProtocol::Scan] {
        let env = load_news_csv(&path)?.with_protocol(protocol);
        println!("{protocol:?} replay");
        for id in ["lnucb-ta", "linucb", "ucb", "eps-greedy"] {
            let run = run_policy(&env, &PolicySpec::new(id)?, 0, 800, false)?;
            println!(
                "  {id:<12} matched {:>4} of {:>5} rows, clicks {:>4.0}, CTR {:.3}",
                run.horizon(),
                run.attempts,
                run.final_cumulative_reward(),
                run.final_mean_reward()
            );
        }
    }
    Ok(())
}
