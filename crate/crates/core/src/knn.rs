//! Per-arm neighbor store and the variance-adaptive k-NN reward estimator.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{BanditError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborEntry {
    pub context: Vec<f64>,
    pub reward: f64,
    pub round: u64,
}

/// Contexts and rewards observed for one arm, ordered by round.
///
/// With a capacity the store behaves as a ring: inserting into a full store
/// evicts the oldest entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborStore {
    dim: usize,
    capacity: Option<usize>,
    entries: VecDeque<NeighborEntry>,
}

impl NeighborStore {
    pub fn new(dim: usize, capacity: Option<usize>) -> Result<Self> {
        if capacity == Some(0) {
            return Err(BanditError::param("store_capacity", "must be at least 1"));
        }
        Ok(NeighborStore {
            dim,
            capacity,
            entries: VecDeque::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn capacity(&self) -> Option<usize> {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl ExactSizeIterator<Item = &NeighborEntry> {
        self.entries.iter()
    }

    pub fn insert(&mut self, context: &[f64], reward: f64, round: u64) -> Result<()> {
        if context.len() != self.dim {
            return Err(BanditError::DimensionMismatch {
                expected: self.dim,
                got: context.len(),
            });
        }
        if !reward.is_finite() {
            return Err(BanditError::NonFinite("reward"));
        }
        if let Some(last) = self.entries.back() {
            if round <= last.round {
                return Err(BanditError::param(
                    "round",
                    format!("{round} does not follow last stored round {}", last.round),
                ));
            }
        }
        if let Some(cap) = self.capacity {
            while self.entries.len() >= cap {
                self.entries.pop_front();
            }
        }
        self.entries.push_back(NeighborEntry {
            context: context.to_vec(),
            reward,
            round,
        });
        Ok(())
    }

    /// Population variance of the stored rewards; 0 with fewer than two entries.
    pub fn reward_variance(&self) -> f64 {
        let n = self.entries.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.entries.iter().map(|e| e.reward).sum::<f64>() / n as f64;
        let ss: f64 = self.entries.iter().map(|e| (e.reward - mean).powi(2)).sum();
        (ss / n as f64).max(0.0)
    }

    fn check_query(&self, x: &[f64], k: usize) -> Result<()> {
        if k == 0 {
            return Err(BanditError::param("k", "must be at least 1"));
        }
        if x.len() != self.dim {
            return Err(BanditError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Mean reward of the `k` entries nearest to `x` (Euclidean; ties go to
    /// the earlier round). Not applied while the store holds fewer than `k`
    /// entries.
    pub fn score(&self, x: &[f64], k: usize) -> Result<KnnScore> {
        self.check_query(x, k)?;
        if self.entries.len() < k {
            return Ok(KnnScore::inactive());
        }
        // max-heap on (distance², position): the root is the worst kept neighbor
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        for (pos, entry) in self.entries.iter().enumerate() {
            let dist_sq = squared_distance(&entry.context, x);
            let cand = Candidate { dist_sq, pos };
            if heap.len() < k {
                heap.push(cand);
            } else if let Some(worst) = heap.peek() {
                if cand < *worst {
                    heap.pop();
                    heap.push(cand);
                }
            }
        }
        let mut chosen: Vec<Candidate> = heap.into_vec();
        Ok(self.summarize(&mut chosen))
    }

    /// Full-sort reference implementation of [`NeighborStore::score`].
    pub fn score_bruteforce(&self, x: &[f64], k: usize) -> Result<KnnScore> {
        self.check_query(x, k)?;
        if self.entries.len() < k {
            return Ok(KnnScore::inactive());
        }
        let mut all: Vec<Candidate> = self
            .entries
            .iter()
            .enumerate()
            .map(|(pos, e)| Candidate {
                dist_sq: squared_distance(&e.context, x),
                pos,
            })
            .collect();
        all.sort();
        all.truncate(k);
        Ok(self.summarize(&mut all))
    }

    fn summarize(&self, chosen: &mut [Candidate]) -> KnnScore {
        // sum in store order so both search paths produce identical bits
        chosen.sort_by_key(|c| c.pos);
        let sum: f64 = chosen.iter().map(|c| self.entries[c.pos].reward).sum();
        let max_sq = chosen.iter().map(|c| c.dist_sq).fold(0.0, f64::max);
        KnnScore {
            score: sum / chosen.len() as f64,
            k_used: chosen.len(),
            u_max: max_sq.sqrt(),
            applied: true,
            neighbors: chosen.iter().map(|c| self.entries[c.pos].round).collect(),
        }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    dist_sq: f64,
    pos: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist_sq
            .total_cmp(&other.dist_sq)
            .then(self.pos.cmp(&other.pos))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of a k-NN query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnScore {
    pub score: f64,
    pub k_used: usize,
    /// Largest distance among the selected neighbors.
    pub u_max: f64,
    pub applied: bool,
    /// Rounds of the selected neighbors in store order.
    pub neighbors: Vec<u64>,
}

impl KnnScore {
    pub fn inactive() -> Self {
        KnnScore {
            score: 0.0,
            k_used: 0,
            u_max: 0.0,
            applied: false,
            neighbors: Vec::new(),
        }
    }
}

/// Neighbor count interpolated between the thresholds by reward variance:
/// `round_half_up(θ_min + (θ_max − θ_min) · clamp(var, 0, 1))`.
pub fn select_k(variance: f64, theta_min: usize, theta_max: usize) -> Result<usize> {
    if theta_min == 0 || theta_min > theta_max {
        return Err(BanditError::param(
            "theta",
            format!("need 1 <= theta_min <= theta_max, got ({theta_min}, {theta_max})"),
        ));
    }
    let v = if variance.is_nan() {
        0.0
    } else {
        variance.clamp(0.0, 1.0)
    };
    let raw = theta_min as f64 + (theta_max - theta_min) as f64 * v;
    let k = (raw + 0.5).floor() as usize;
    Ok(k.clamp(theta_min, theta_max))
}
