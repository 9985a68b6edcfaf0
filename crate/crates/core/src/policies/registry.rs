//! Policy identifiers, textual parameters and construction by id.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::baselines::{
    BetaThompson, EpsilonGreedy, KlUcb, KnnIndex, KnnUcb, LinThompson, LinUcb, Ucb1,
};
use super::enhanced::{EnhancedBase, EnhancedPolicy};
use super::hybrid::HybridUcb;
use super::{Exploration, KnnMode, PolicyConfig};
use crate::error::{BanditError, Result};
use crate::policy::{Policy, TieBreak};

pub const POLICY_IDS: &[&str] = &[
    "lnucb-ta",
    "ucb",
    "kl-ucb",
    "eps-greedy",
    "beta-thompson",
    "linucb",
    "linthompson",
    "knn-ucb",
    "knn-kl-ucb",
    "lin-knn-ucb",
    "enhanced-eps-greedy",
    "enhanced-beta-thompson",
    "enhanced-linthompson",
];

/// Parameters accepted by a policy id, with their defaults.
fn accepted(id: &str) -> Option<&'static [(&'static str, &'static str)]> {
    const LNUCB: &[(&str, &str)] = &[
        ("alpha0", "1"),
        ("kappa", "0.5"),
        ("lambda", "1"),
        ("theta_min", "1"),
        ("theta_max", "5"),
        ("gamma_cov", "0"),
        ("variance_scale", "1"),
        ("floor_alpha", "false"),
        ("store_capacity", "none"),
        ("exploration", "attention"),
        ("knn", "adaptive"),
    ];
    Some(match id {
        "lnucb-ta" => LNUCB,
        "ucb" => &[("rho", "1")],
        "kl-ucb" => &[("c", "0")],
        "eps-greedy" => &[("epsilon", "0.1")],
        "beta-thompson" => &[("prior_a", "1"), ("prior_b", "1")],
        "linucb" => &[("alpha", "1"), ("lambda", "1")],
        "linthompson" => &[("v", "1"), ("lambda", "1")],
        "knn-ucb" => &[("k", "5"), ("rho", "1")],
        "knn-kl-ucb" => &[("k", "5"), ("c", "0")],
        "lin-knn-ucb" => &[("alpha", "1"), ("lambda", "1"), ("k", "5")],
        "enhanced-eps-greedy" => &[
            ("epsilon", "0.1"),
            ("gamma_sm", "0.1"),
            ("theta_min", "1"),
            ("theta_max", "5"),
            ("variance_scale", "1"),
        ],
        "enhanced-beta-thompson" => &[
            ("prior_a", "1"),
            ("prior_b", "1"),
            ("gamma_sm", "0.1"),
            ("theta_min", "1"),
            ("theta_max", "5"),
            ("variance_scale", "1"),
        ],
        "enhanced-linthompson" => &[
            ("v", "1"),
            ("lambda", "1"),
            ("gamma_sm", "0.1"),
            ("theta_min", "1"),
            ("theta_max", "5"),
            ("variance_scale", "1"),
        ],
        _ => return None,
    })
}

/// The name policy `id` stores `key` under, with case, `-` and the
/// `alpha`/`alpha0` alias folded; `None` if the policy does not take it.
pub fn canonical_param(id: &str, key: &str) -> Option<String> {
    let keys = accepted(&id.trim().to_ascii_lowercase())?;
    let key = key.trim().to_ascii_lowercase().replace('-', "_");
    let key = match key.as_str() {
        "alpha" if keys.iter().any(|(k, _)| *k == "alpha0") => "alpha0".to_string(),
        "alpha0" if keys.iter().any(|(k, _)| *k == "alpha") => "alpha".to_string(),
        _ => key,
    };
    (keys.iter().any(|(k, _)| *k == key) || COMMON.contains(&key.as_str())).then_some(key)
}

pub fn accepts_param(id: &str, key: &str) -> bool {
    canonical_param(id, key).is_some()
}

/// Keys every policy accepts on top of its own.
const COMMON: &[&str] = &["tie_break"];

/// Explicitly set parameters of one policy, keyed by name.
pub type PolicyParams = BTreeMap<String, String>;

/// A policy id together with its explicitly set parameters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PolicySpec {
    pub id: String,
    pub params: PolicyParams,
}

impl PolicySpec {
    pub fn new(id: &str) -> Result<Self> {
        let id = id.trim().to_ascii_lowercase();
        if accepted(&id).is_none() {
            return Err(BanditError::UnknownPolicy(id));
        }
        Ok(PolicySpec {
            id,
            params: PolicyParams::new(),
        })
    }

    /// Sets one parameter after checking the key is known to this policy.
    /// `alpha` and `alpha0` are accepted interchangeably.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<&mut Self> {
        let Some(key) = canonical_param(&self.id, key) else {
            let key = key.trim().to_ascii_lowercase().replace('-', "_");
            return Err(BanditError::param(
                key,
                format!("not a parameter of {}", self.id),
            ));
        };
        self.params.insert(key, value.into().trim().to_string());
        Ok(self)
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Result<Self> {
        self.set(key, value.to_string())?;
        Ok(self)
    }

    /// Canonical `k=v;k=v` rendering of the explicit parameters, sorted by key.
    pub fn canonical_params(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    fn raw(&self, key: &str) -> &str {
        if let Some(v) = self.params.get(key) {
            return v;
        }
        accepted(&self.id)
            .and_then(|keys| keys.iter().find(|(k, _)| *k == key))
            .map(|(_, v)| *v)
            .unwrap_or("")
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.raw(key);
        raw.parse()
            .map_err(|_| BanditError::param(key, format!("cannot parse {raw:?} for {}", self.id)))
    }

    fn optional_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.raw(key) {
            "" | "none" => Ok(None),
            _ => self.get(key).map(Some),
        }
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.params.is_empty() {
            write!(f, "{}", self.id)
        } else {
            write!(f, "{}[{}]", self.id, self.canonical_params())
        }
    }
}

/// SplitMix64 finalizer, so policies seeded from nearby run seeds get
/// unrelated streams that are also distinct from the environment's.
fn policy_seed(seed: u64) -> u64 {
    let mut z = (seed ^ 0x706f_6c69_6379_0000).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Builds the policy described by `spec` for `arms` arms over `dim`
/// dimensional contexts. `reward_range` is the environment's declared reward
/// interval, used by policies that rescale rewards to `[0, 1]`.
pub fn build_policy(
    spec: &PolicySpec,
    arms: usize,
    dim: usize,
    seed: u64,
    reward_range: (f64, f64),
) -> Result<Box<dyn Policy>> {
    let seed = policy_seed(seed);
    let tie_break = match spec.params.get("tie_break") {
        Some(s) => TieBreak::parse(s, seed)?,
        None => TieBreak::LowestIndex,
    };
    let enhanced = |base: EnhancedBase| -> Result<Box<dyn Policy>> {
        Ok(Box::new(EnhancedPolicy::new(
            base,
            spec.get("gamma_sm")?,
            spec.get("theta_min")?,
            spec.get("theta_max")?,
            spec.get("variance_scale")?,
            None,
        )?))
    };
    let policy: Box<dyn Policy> = match spec.id.as_str() {
        "lnucb-ta" => {
            let exploration = match spec.raw("exploration") {
                "attention" => Exploration::Attention,
                "fixed" => Exploration::Fixed,
                other => {
                    return Err(BanditError::param(
                        "exploration",
                        format!("expected attention|fixed, got {other:?}"),
                    ))
                }
            };
            let knn = match spec.raw("knn") {
                "off" => KnnMode::Off,
                "adaptive" => KnnMode::Adaptive,
                "fixed" => KnnMode::Fixed,
                other => {
                    return Err(BanditError::param(
                        "knn",
                        format!("expected off|adaptive|fixed, got {other:?}"),
                    ))
                }
            };
            let config = PolicyConfig {
                lambda: spec.get("lambda")?,
                alpha0: spec.get("alpha0")?,
                kappa: spec.get("kappa")?,
                theta_min: spec.get("theta_min")?,
                theta_max: spec.get("theta_max")?,
                gamma_cov: spec.get("gamma_cov")?,
                variance_scale: spec.get("variance_scale")?,
                floor_alpha_at_zero: spec.get("floor_alpha")?,
                tie_break,
                store_capacity: spec.optional_usize("store_capacity")?,
                exploration,
                knn,
            };
            Box::new(HybridUcb::lnucb_ta(arms, dim, config)?)
        }
        "ucb" => Box::new(Ucb1::new(arms, dim, spec.get("rho")?, tie_break)?),
        "kl-ucb" => Box::new(KlUcb::new(
            arms,
            dim,
            spec.get("c")?,
            reward_range,
            tie_break,
        )?),
        "eps-greedy" => Box::new(EpsilonGreedy::new(
            arms,
            dim,
            spec.get("epsilon")?,
            seed,
            tie_break,
        )?),
        "beta-thompson" => Box::new(BetaThompson::new(
            arms,
            dim,
            (spec.get("prior_a")?, spec.get("prior_b")?),
            reward_range,
            seed,
            tie_break,
        )?),
        "linucb" => Box::new(LinUcb::new(
            arms,
            dim,
            spec.get("alpha")?,
            spec.get("lambda")?,
            tie_break,
        )?),
        "linthompson" => Box::new(LinThompson::new(
            arms,
            dim,
            spec.get("v")?,
            spec.get("lambda")?,
            seed,
            tie_break,
        )?),
        "knn-ucb" => Box::new(KnnUcb::new(
            arms,
            dim,
            spec.get("k")?,
            KnnIndex::Ucb {
                rho: spec.get("rho")?,
            },
            reward_range,
            None,
            tie_break,
        )?),
        "knn-kl-ucb" => Box::new(KnnUcb::new(
            arms,
            dim,
            spec.get("k")?,
            KnnIndex::KlUcb { c: spec.get("c")? },
            reward_range,
            None,
            tie_break,
        )?),
        "lin-knn-ucb" => {
            let k: usize = spec.get("k")?;
            let config = PolicyConfig {
                lambda: spec.get("lambda")?,
                theta_min: 1,
                theta_max: k,
                tie_break,
                ..PolicyConfig::lin_knn(spec.get("alpha")?)
            };
            Box::new(HybridUcb::new("lin-knn-ucb", arms, dim, config)?)
        }
        "enhanced-eps-greedy" => enhanced(EnhancedBase::EpsilonGreedy(EpsilonGreedy::new(
            arms,
            dim,
            spec.get("epsilon")?,
            seed,
            tie_break,
        )?))?,
        "enhanced-beta-thompson" => enhanced(EnhancedBase::BetaThompson(BetaThompson::new(
            arms,
            dim,
            (spec.get("prior_a")?, spec.get("prior_b")?),
            reward_range,
            seed,
            tie_break,
        )?))?,
        "enhanced-linthompson" => enhanced(EnhancedBase::LinThompson(LinThompson::new(
            arms,
            dim,
            spec.get("v")?,
            spec.get("lambda")?,
            seed,
            tie_break,
        )?))?,
        other => return Err(BanditError::UnknownPolicy(other.to_string())),
    };
    Ok(policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Context;

    #[test]
    fn every_id_builds_with_defaults() {
        for id in POLICY_IDS {
            let p = build_policy(&PolicySpec::new(id).unwrap(), 3, 2, 1, (0.0, 1.0)).unwrap();
            assert_eq!(p.id(), *id);
            let arm = p.select(&Context::new(vec![0.1, 0.2]).unwrap(), 0).unwrap();
            assert!(arm < 3);
        }
    }

    #[test]
    fn unknown_ids_and_keys_are_rejected() {
        assert!(matches!(
            PolicySpec::new("neural-ucb"),
            Err(BanditError::UnknownPolicy(_))
        ));
        let mut s = PolicySpec::new("ucb").unwrap();
        assert!(s.set("epsilon", "0.1").is_err());
        assert!(s.set("rho", "0.5").is_ok());
        s.set("rho", "abc").unwrap();
        assert!(build_policy(&s, 2, 1, 0, (0.0, 1.0)).is_err());
    }

    #[test]
    fn alpha_alias_and_canonical_rendering() {
        let s = PolicySpec::new("lnucb-ta")
            .unwrap()
            .with("alpha", 0.1)
            .unwrap()
            .with("kappa", 0.3)
            .unwrap();
        assert_eq!(s.canonical_params(), "alpha0=0.1;kappa=0.3");
        assert_eq!(s.to_string(), "lnucb-ta[alpha0=0.1;kappa=0.3]");
        let l = PolicySpec::new("LinUCB")
            .unwrap()
            .with("alpha0", 2)
            .unwrap();
        assert_eq!(l.canonical_params(), "alpha=2");
    }

    #[test]
    fn lnucb_flags_select_variants() {
        let s = PolicySpec::new("lnucb-ta")
            .unwrap()
            .with("exploration", "fixed")
            .unwrap()
            .with("knn", "off")
            .unwrap();
        assert!(build_policy(&s, 2, 1, 0, (0.0, 1.0)).is_ok());
        let bad = PolicySpec::new("lnucb-ta")
            .unwrap()
            .with("knn", "sometimes")
            .unwrap();
        assert!(build_policy(&bad, 2, 1, 0, (0.0, 1.0)).is_err());
    }

    #[test]
    fn policy_seed_spreads_neighbors() {
        assert_ne!(policy_seed(0), policy_seed(1));
        assert_ne!(policy_seed(7), 7);
    }
}
