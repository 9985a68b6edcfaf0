//! Variance-adaptive k-NN scoring on a single neighbor store.

use lnucb::knn::{select_k, NeighborStore};

fn main() -> lnucb::Result<()> {
    let mut store = NeighborStore::new(2, None)?;
    let points = [
        ([1.0, 0.0], 1.0),
        ([0.9, 0.1], 1.0),
        ([0.0, 1.0], 0.0),
        ([0.1, 0.9], 0.0),
        ([0.7, 0.7], 1.0),
        ([0.6, 0.8], 0.0),
    ];
    for (round, (x, r)) in points.iter().enumerate() {
        store.insert(x, *r, round as u64)?;
    }
    let var = store.reward_variance();
    println!("reward variance {var:.3}");
    for (theta_min, theta_max) in [(1, 5), (2, 4), (3, 3)] {
        let k = select_k(var, theta_min, theta_max)?;
        let s = store.score(&[0.95, 0.05], k)?;
        println!(
            "θ ∈ [{theta_min}, {theta_max}] → k = {k}: score {:.3}, radius {:.3}, neighbors {:?}",
            s.score, s.u_max, s.neighbors
        );
        assert_eq!(s, store.score_bruteforce(&[0.95, 0.05], k)?);
    }
    Ok(())
}
