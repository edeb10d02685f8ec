//! Choosing `k` users whose innate opinions are set to 1 so that the
//! equilibrium discord grows.
//!
//! Full-information algorithms see the innate opinions. Limited-information
//! algorithms go through [`select_limited`], whose inputs are the graph, its
//! discord operator and the attack spec only.

mod baselines;
mod greedy;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use baselines::{
    baseline_degree, baseline_influence_max, baseline_random, CascadeWorlds, DEFAULT_SIMULATIONS,
};
pub use greedy::{adaptive_greedy, gain, nonadaptive_greedy, GreedyPath};

use crate::discord::{index_value, relative_increase_from, DiscordOperator, Kernel};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::maxcut::{solve_alpha_balanced_maxcut, SolverConfig};
use crate::opinion::OpinionVector;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Information {
    Full,
    Limited,
}

impl fmt::Display for Information {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Full => "full",
            Self::Limited => "limited",
        })
    }
}

impl FromStr for Information {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" | "f" => Ok(Self::Full),
            "limited" | "l" => Ok(Self::Limited),
            other => Err(Error::Validation(format!(
                "unknown information mode `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Sdp,
    AdaptiveGreedy,
    NonadaptiveGreedy,
    Degree,
    Random,
    InfluenceMax,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Self::Sdp,
        Self::AdaptiveGreedy,
        Self::NonadaptiveGreedy,
        Self::Degree,
        Self::Random,
        Self::InfluenceMax,
    ];

    /// Only the greedy algorithms have a full-information variant.
    pub fn supports(self, info: Information) -> bool {
        match info {
            Information::Limited => true,
            Information::Full => matches!(self, Self::AdaptiveGreedy | Self::NonadaptiveGreedy),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sdp => "sdp",
            Self::AdaptiveGreedy => "adaptive_greedy",
            Self::NonadaptiveGreedy => "nonadaptive_greedy",
            Self::Degree => "degree",
            Self::Random => "random",
            Self::InfluenceMax => "influence_max",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "sdp" => Ok(Self::Sdp),
            "adaptive_greedy" | "ag" => Ok(Self::AdaptiveGreedy),
            "nonadaptive_greedy" | "nag" => Ok(Self::NonadaptiveGreedy),
            "degree" => Ok(Self::Degree),
            "random" => Ok(Self::Random),
            "influence_max" | "im" => Ok(Self::InfluenceMax),
            other => Err(Error::Validation(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackSpec {
    pub k: usize,
    pub info: Information,
    pub algorithm: Algorithm,
    pub seed: u64,
    /// Cascade simulations per spread estimate.
    pub simulations: usize,
    /// Settings for the max-cut based attack; `alpha` and `seed` are
    /// overwritten from `k` and `seed`.
    pub solver: SolverConfig,
}

impl AttackSpec {
    pub fn new(k: usize, info: Information, algorithm: Algorithm, seed: u64) -> Self {
        Self {
            k,
            info,
            algorithm,
            seed,
            simulations: DEFAULT_SIMULATIONS,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AttackResult {
    /// Chosen nodes, ascending.
    pub chosen: Vec<usize>,
    pub s_after: OpinionVector,
    /// `s₀ᵀAs₀`.
    pub before: f64,
    /// `sᵀAs` after the attack.
    pub after: f64,
    pub score: f64,
    /// Time spent choosing the set.
    pub runtime: Duration,
}

/// Sets the opinions of `set` to 1.
pub fn radicalize(s0: &OpinionVector, set: &[usize]) -> Result<OpinionVector> {
    if s0.range() != (0.0, 1.0) {
        return Err(Error::Validation(
            "attacks require opinions in [0, 1]".into(),
        ));
    }
    let mut values = s0.values().to_vec();
    for &u in set {
        if u >= values.len() {
            return Err(Error::Validation(format!(
                "node {u} out of range for {} nodes",
                values.len()
            )));
        }
        values[u] = 1.0;
    }
    OpinionVector::unit(values)
}

/// Max-cut based choice on `4A` with `α = k/n`; the `+1` side is chosen.
/// `a` must be dense.
pub fn sdp_limited_info(
    a: &DiscordOperator<'_>,
    k: usize,
    config: &SolverConfig,
) -> Result<Vec<usize>> {
    let n = a.dim();
    if k > n {
        return Err(Error::Validation(format!("k = {k} exceeds {n} nodes")));
    }
    if k == n {
        return Ok((0..n).collect());
    }
    let dense = a.as_dense().ok_or_else(|| {
        Error::Validation(format!(
            "the max-cut attack needs a dense discord matrix; {n} nodes is above the dense limit"
        ))
    })?;
    let config = SolverConfig {
        alpha: k as f64 / n as f64,
        ..*config
    };
    let outcome = solve_alpha_balanced_maxcut(&dense.scaled(4.0), &config)?;
    Ok(outcome.solution.side())
}

fn check_spec(g: &Graph, spec: &AttackSpec) -> Result<()> {
    let n = g.node_count();
    if spec.k < 1 || spec.k > n {
        return Err(Error::Validation(format!("k = {} not in [1, {n}]", spec.k)));
    }
    if !spec.algorithm.supports(spec.info) {
        return Err(Error::Validation(format!(
            "{} has no {} information variant",
            spec.algorithm, spec.info
        )));
    }
    Ok(())
}

/// Chooses a set from topology alone.
pub fn select_limited(g: &Graph, a: &DiscordOperator<'_>, spec: &AttackSpec) -> Result<Vec<usize>> {
    check_spec(
        g,
        &AttackSpec {
            info: Information::Limited,
            ..*spec
        },
    )?;
    let n = g.node_count();
    let algo_seed = seed::derive_labeled(spec.seed, "attack", 0);
    let mut set = match spec.algorithm {
        Algorithm::Sdp => {
            let config = SolverConfig {
                seed: algo_seed,
                ..spec.solver
            };
            sdp_limited_info(a, spec.k, &config)?
        }
        Algorithm::AdaptiveGreedy => adaptive_greedy(a, &vec![0.0; n], spec.k)?.order,
        Algorithm::NonadaptiveGreedy => nonadaptive_greedy(a, &vec![0.0; n], spec.k)?.order,
        Algorithm::Degree => baseline_degree(g, spec.k)?,
        Algorithm::Random => baseline_random(g, spec.k, algo_seed)?,
        Algorithm::InfluenceMax => baseline_influence_max(g, spec.k, algo_seed, spec.simulations)?,
    };
    set.sort_unstable();
    Ok(set)
}

/// Chooses a set using the innate opinions.
pub fn select_full(
    g: &Graph,
    a: &DiscordOperator<'_>,
    s0: &OpinionVector,
    spec: &AttackSpec,
) -> Result<Vec<usize>> {
    check_spec(
        g,
        &AttackSpec {
            info: Information::Full,
            ..*spec
        },
    )?;
    s0.check_len(g.node_count())?;
    let mut set = match spec.algorithm {
        Algorithm::AdaptiveGreedy => adaptive_greedy(a, s0.values(), spec.k)?.order,
        Algorithm::NonadaptiveGreedy => nonadaptive_greedy(a, s0.values(), spec.k)?.order,
        other => unreachable!("{other} rejected by check_spec"),
    };
    set.sort_unstable();
    Ok(set)
}

/// Chooses a set per `spec`, radicalizes it and scores the result against
/// the true innate opinions.
pub fn attack(
    g: &Graph,
    a: &DiscordOperator<'_>,
    s0: &OpinionVector,
    spec: &AttackSpec,
) -> Result<AttackResult> {
    s0.check_len(g.node_count())?;
    let start = Instant::now();
    let chosen = match spec.info {
        Information::Full => select_full(g, a, s0, spec)?,
        Information::Limited => select_limited(g, a, spec)?,
    };
    let runtime = start.elapsed();
    let s_after = radicalize(s0, &chosen)?;
    let before = index_value(a, s0)?;
    let after = index_value(a, &s_after)?;
    Ok(AttackResult {
        score: relative_increase_from(before, after)?,
        chosen,
        s_after,
        before,
        after,
        runtime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discord::{discord_operator, DiscordKind};
    use crate::graph::generate_sbm;

    #[test]
    fn radicalize_examples() {
        let s0 = OpinionVector::unit(vec![0.2, 0.7]).unwrap();
        assert_eq!(radicalize(&s0, &[]).unwrap(), s0);
        assert_eq!(radicalize(&s0, &[1]).unwrap().values(), &[0.2, 1.0]);
        let z = OpinionVector::zeros(3);
        assert_eq!(radicalize(&z, &[0, 1, 2]).unwrap().values(), &[1.0; 3]);
        assert!(radicalize(&s0, &[2]).is_err());
    }

    #[test]
    fn parse_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.to_string().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!(
            "ag".parse::<Algorithm>().unwrap(),
            Algorithm::AdaptiveGreedy
        );
        assert_eq!(
            "Limited".parse::<Information>().unwrap(),
            Information::Limited
        );
        assert!("best".parse::<Algorithm>().is_err());
    }

    #[test]
    fn every_algorithm_returns_k_nodes() {
        let (g, _) = generate_sbm(&[8, 8], 0.4, 0.05, 3).unwrap();
        let a = discord_operator(&g, DiscordKind::Disagreement);
        let s0 = OpinionVector::unit((0..16).map(|i| (i as f64 * 0.29) % 1.0).collect()).unwrap();
        for algorithm in Algorithm::ALL {
            for info in [Information::Full, Information::Limited] {
                let spec = AttackSpec {
                    simulations: 20,
                    ..AttackSpec::new(4, info, algorithm, 7)
                };
                if !algorithm.supports(info) {
                    assert!(attack(&g, &a, &s0, &spec).is_err());
                    continue;
                }
                let r = attack(&g, &a, &s0, &spec).unwrap();
                assert_eq!(r.chosen.len(), 4);
                assert_eq!(r.s_after, radicalize(&s0, &r.chosen).unwrap());
                assert!((r.score - (r.after - r.before) / r.before).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn all_nodes_gives_consensus_score() {
        let (g, _) = generate_sbm(&[5, 5], 0.5, 0.1, 1).unwrap();
        let a = discord_operator(&g, DiscordKind::Polarization);
        let s0 = OpinionVector::unit((0..10).map(|i| i as f64 / 10.0).collect()).unwrap();
        for algorithm in [Algorithm::Sdp, Algorithm::AdaptiveGreedy, Algorithm::Degree] {
            let r = attack(
                &g,
                &a,
                &s0,
                &AttackSpec::new(10, Information::Limited, algorithm, 0),
            )
            .unwrap();
            assert_eq!(r.chosen, (0..10).collect::<Vec<_>>());
            assert!((r.score + 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sdp_choice_relates_to_cut_value() {
        let (g, _) = generate_sbm(&[6, 6], 0.5, 0.1, 5).unwrap();
        let a = discord_operator(&g, DiscordKind::Disagreement);
        let set = sdp_limited_info(&a, 4, &SolverConfig::new(0.5, 2)).unwrap();
        assert_eq!(set.len(), 4);
        let s: Vec<f64> = (0..12)
            .map(|u| if set.contains(&u) { 1.0 } else { 0.0 })
            .collect();
        let x: Vec<f64> = s.iter().map(|v| 2.0 * v - 1.0).collect();
        assert!((a.quad_form(&s) - 0.25 * a.quad_form(&x)).abs() < 1e-10);
    }
}
