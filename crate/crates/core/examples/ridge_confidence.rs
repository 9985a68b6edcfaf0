//! Incremental ridge regression and its confidence ellipsoid.
//!
//! Streams noisy linear observations into a `RidgeState`, then compares the
//! estimate with the batch solve and shows the width shrinking.

use lnucb::linear::{ridge_solve_batch, RidgeState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> lnucb::Result<()> {
    let truth = [0.5, -0.3, 0.8];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut state = RidgeState::new(3, 1.0, 0.0)?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let probe = [0.0, 0.0, 1.0];
    for t in 1..=200 {
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y = truth.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() + rng.random_range(-0.1..0.1);
        state.update(&x, y, 0.0)?;
        xs.push(x);
        ys.push(y);
        if [1, 10, 50, 200].contains(&t) {
            println!(
                "t={t:>3}  width at e3 = {:.4}  log det Σ = {:.3}",
                state.width(&probe)?,
                state.log_det()
            );
        }
    }
    let batch = ridge_solve_batch(&xs, &ys, 1.0, 3)?;
    println!("incremental μ̂ = {:.4?}", state.mu_hat().as_slice());
    println!("batch       μ̂ = {:.4?}", batch.as_slice());

    let ball = state.ball(4.0)?;
    let x = [0.3, 0.3, 0.3];
    println!(
        "max |(μ − μ̂)ᵀx| over the β = 4 ball: {:.4}",
        ball.max_deviation(&x)
    );
    Ok(())
}
