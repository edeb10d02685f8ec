//! A seeded battery of oracle comparisons, small enough to run in seconds.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::{attack, radicalize, select_limited, Algorithm, AttackSpec, Information};
use crate::discord::{discord_matrix, discord_operator, index_value, DiscordKind, Kernel};
use crate::dynamics::{equilibrium_raw, iterate_to_fixed_point};
use crate::error::Result;
use crate::graph::{generate_sbm, random_graph, Graph};
use crate::linalg::{max_row_sum, min_eigenvalue, spectral_norm};
use crate::maxcut::{
    greedy_rebalance, part_size, rebalance_lower_bound, solve_alpha_balanced_maxcut, solve_sdp,
    CutSolution, SolverConfig,
};
use crate::opinion::{rescale_opinions, sample_opinions, OpinionVector};
use crate::oracle::{
    brute_force_opt, check_ratio_conditions, implied_ratio, random_centered_psd, ratio_bound,
    verify_extreme_optimum, verify_local_move_bound, ConditionOptions, Domain,
};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub instances: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

type Check = fn(u64) -> Result<(bool, usize, String)>;

const CHECKS: [(&str, Check); 12] = [
    ("closed_form_indices", closed_form),
    ("discord_psd_centered", psd_centered),
    ("dynamics_agreement", dynamics),
    ("rescaling_law", rescaling),
    ("local_move_bound", local_move),
    ("rebalance_bound", rebalance),
    ("extreme_point", extreme_point),
    ("relaxation_dominance", relaxation_dominance),
    ("maxcut_ratio", maxcut_ratio),
    ("attack_dominance", attack_dominance),
    ("condition_bound", condition_bound),
    ("limited_blindness", blindness),
];

/// Runs every check; a check that errors counts as failed.
pub fn run_checks(seed: u64) -> CheckReport {
    let checks: Vec<CheckOutcome> = CHECKS
        .par_iter()
        .map(
            |&(name, check)| match check(seed::derive_labeled(seed, name, 0)) {
                Ok((passed, instances, detail)) => CheckOutcome {
                    name,
                    passed,
                    instances,
                    detail,
                },
                Err(e) => CheckOutcome {
                    name,
                    passed: false,
                    instances: 0,
                    detail: format!("error: {e}"),
                },
            },
        )
        .collect();
    CheckReport {
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn instance_rng(seed: u64, i: usize) -> rand_chacha::ChaCha8Rng {
    seed::rng(seed::derive_seed(seed, i as u64))
}

fn random_instance(seed: u64, i: usize, max_n: usize) -> Result<(Graph, Vec<f64>)> {
    let mut rng = instance_rng(seed, i);
    let n = rng.random_range(2..=max_n);
    let p = rng.random_range(0.1..0.8);
    let g = random_graph(n, p, 2.0, rng.random())?;
    let s = (0..n).map(|_| rng.random::<f64>()).collect();
    Ok((g, s))
}

fn closed_form(_: u64) -> Result<(bool, usize, String)> {
    let g = Graph::new(2, [(0, 1, 1.0)])?;
    let s = OpinionVector::unit(vec![0.0, 1.0])?;
    let d = index_value(&discord_matrix(&g, DiscordKind::Disagreement)?, &s)?;
    let p = index_value(&discord_matrix(&g, DiscordKind::Polarization)?, &s)?;
    let gap = (d - 1.0 / 9.0).abs().max((p - 1.0 / 18.0).abs());
    Ok((gap <= 1e-12, 1, format!("max gap {gap:.3e}")))
}

fn psd_centered(seed: u64) -> Result<(bool, usize, String)> {
    let count = 25;
    let mut worst_eig: f64 = 0.0;
    let mut worst_row: f64 = 0.0;
    for i in 0..count {
        let (g, _) = random_instance(seed, i, 40)?;
        for kind in [DiscordKind::Disagreement, DiscordKind::Polarization] {
            let a = discord_matrix(&g, kind)?.matrix;
            let norm = spectral_norm(&a).max(f64::MIN_POSITIVE);
            worst_eig = worst_eig.min(min_eigenvalue(&a) / norm);
            worst_row = worst_row.max(max_row_sum(&a));
        }
    }
    Ok((
        worst_eig >= -1e-8 && worst_row <= 1e-8,
        count,
        format!("min relative eigenvalue {worst_eig:.3e}, max row sum {worst_row:.3e}"),
    ))
}

fn dynamics(seed: u64) -> Result<(bool, usize, String)> {
    let count = 25;
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let (g, s) = random_instance(seed, i, 120)?;
        let direct = equilibrium_raw(&g, &s);
        let (iterated, _) = iterate_to_fixed_point(&g, &s, 1e-13, 1_000_000)?;
        let gap = direct
            .iter()
            .zip(&iterated)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(gap);
    }
    Ok((
        worst <= 1e-8,
        count,
        format!("max sup-norm gap {worst:.3e}"),
    ))
}

fn rescaling(seed: u64) -> Result<(bool, usize, String)> {
    let count = 20;
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let (g, s) = random_instance(seed, i, 30)?;
        let s = OpinionVector::unit(s)?;
        let signed = rescale_opinions(&s, (0.0, 1.0), (-1.0, 1.0))?;
        for kind in [DiscordKind::Disagreement, DiscordKind::Polarization] {
            let a = discord_matrix(&g, kind)?;
            let base = index_value(&a, &signed)?;
            if base <= 1e-12 {
                continue;
            }
            for (to, factor) in [((0.0, 1.0), 0.25), ((0.2, 0.8), 0.09)] {
                let mapped = rescale_opinions(&signed, (-1.0, 1.0), to)?;
                let ratio = index_value(&a, &mapped)? / base;
                worst = worst.max((ratio - factor).abs() / factor);
            }
        }
    }
    Ok((
        worst <= 1e-10,
        count,
        format!("max relative error {worst:.3e}"),
    ))
}

fn random_signs(rng: &mut impl Rng, n: usize) -> Vec<i8> {
    (0..n)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect()
}

fn local_move(seed: u64) -> Result<(bool, usize, String)> {
    let count = 300;
    for i in 0..count {
        let mut rng = instance_rng(seed, i);
        let n = rng.random_range(2..=30);
        let a = random_centered_psd(n, rng.random_range(1..=n), rng.random());
        let mut x = random_signs(&mut rng, n);
        if x.iter().all(|&v| v == x[0]) {
            x[0] = -x[0];
        }
        verify_local_move_bound(&a, &x)?;
    }
    Ok((true, count, "a cheap move exists in every instance".into()))
}

fn rebalance(seed: u64) -> Result<(bool, usize, String)> {
    let count = 100;
    let n = 12;
    let mut worst = f64::INFINITY;
    for i in 0..count {
        let mut rng = instance_rng(seed, i);
        let a = random_centered_psd(n, rng.random_range(1..=n), rng.random());
        let start = CutSolution::new(&a, random_signs(&mut rng, n));
        let target = rng.random_range(1..=n / 2);
        let out = greedy_rebalance(&a, &start, target)?;
        let bound = rebalance_lower_bound(n, start.size(), target, start.value);
        worst = worst.min(out.solution.value - bound + 1e-9 * (1.0 + start.value.abs()));
    }
    Ok((worst >= 0.0, count, format!("smallest slack {worst:.3e}")))
}

fn extreme_point(seed: u64) -> Result<(bool, usize, String)> {
    let count = 10;
    let mut held = 0;
    for i in 0..count {
        let a = random_centered_psd(8, 8, seed::derive_seed(seed, i as u64));
        if verify_extreme_optimum(&a, 2000, seed::derive_labeled(seed, "samples", i as u64))?.holds
        {
            held += 1;
        }
    }
    Ok((
        held == count,
        count,
        format!("{held}/{count} vertex optima confirmed"),
    ))
}

fn relaxation_dominance(seed: u64) -> Result<(bool, usize, String)> {
    let count = 30;
    let mut worst = f64::INFINITY;
    for i in 0..count {
        let mut rng = instance_rng(seed, i);
        let n = rng.random_range(4..=10);
        let a = random_centered_psd(n, rng.random_range(1..=n), rng.random());
        let alpha = [0.25, 0.5][i % 2];
        let opt = brute_force_opt(
            &a,
            Domain::Signed {
                part: part_size(n, alpha),
            },
        )?
        .value;
        let sdp = solve_sdp(&a, &SolverConfig::new(alpha, rng.random()))?;
        worst = worst.min(sdp.objective - opt + 1e-6 * (1.0 + opt.abs()));
    }
    Ok((worst >= 0.0, count, format!("smallest slack {worst:.3e}")))
}

fn maxcut_ratio(seed: u64) -> Result<(bool, usize, String)> {
    let count = 20;
    let mut met = 0;
    for i in 0..count {
        let mut rng = instance_rng(seed, i);
        let n = rng.random_range(8..=12);
        let g = random_graph(n, rng.random_range(0.2..0.6), 2.0, rng.random())?;
        let a = discord_matrix(&g, DiscordKind::Disagreement)?.scaled(4.0);
        let alpha = [0.25, 0.5][i % 2];
        let config = SolverConfig::new(alpha, rng.random());
        let value = solve_alpha_balanced_maxcut(&a, &config)?.solution.value;
        let opt = brute_force_opt(
            &a,
            Domain::Signed {
                part: part_size(n, alpha),
            },
        )?
        .value;
        if value >= ratio_bound(alpha) * opt - 1e-9 * (1.0 + opt.abs()) {
            met += 1;
        }
    }
    Ok((
        met * 100 >= 95 * count,
        count,
        format!("{met}/{count} within the ratio bound"),
    ))
}

fn attack_dominance(seed: u64) -> Result<(bool, usize, String)> {
    let count = 20;
    for i in 0..count {
        let (g, s) = random_instance(seed, i, 10)?;
        let n = g.node_count();
        let s0 = OpinionVector::unit(s)?;
        let a = discord_operator(&g, DiscordKind::Disagreement);
        let k = 1 + i % n;
        let opt = brute_force_opt(
            &discord_matrix(&g, DiscordKind::Disagreement)?.matrix,
            Domain::Radicalize { s0: s0.values(), k },
        )?
        .value;
        for algorithm in Algorithm::ALL {
            for info in [Information::Full, Information::Limited] {
                if !algorithm.supports(info) {
                    continue;
                }
                let spec = AttackSpec {
                    simulations: 20,
                    solver: SolverConfig {
                        trials: 10,
                        ..SolverConfig::default()
                    },
                    ..AttackSpec::new(k, info, algorithm, seed::derive_seed(seed, i as u64))
                };
                let after = match attack(&g, &a, &s0, &spec) {
                    Ok(r) => r.after,
                    Err(crate::Error::UndefinedScore) => {
                        a.quad_form(radicalize(&s0, &select_limited(&g, &a, &spec)?)?.values())
                    }
                    Err(e) => return Err(e),
                };
                if after > opt + 1e-9 * (1.0 + opt.abs()) {
                    return Ok((
                        false,
                        count,
                        format!("{algorithm} ({info}) beat the optimum on instance {i}"),
                    ));
                }
            }
        }
    }
    Ok((true, count, "no algorithm exceeds the optimum".into()))
}

fn condition_bound(seed: u64) -> Result<(bool, usize, String)> {
    let count = 120;
    let mut applicable = 0;
    let mut qualifying = 0;
    for i in 0..count {
        let mut rng = instance_rng(seed, i);
        let half = rng.random_range(5..=7);
        let (g, labels) = generate_sbm(&[half, half], 0.7, 0.1, rng.random())?;
        if g.edge_count() == 0 {
            continue;
        }
        let kind = [DiscordKind::Disagreement, DiscordKind::Polarization][i % 2];
        let s0 = sample_opinions(&labels, &[(0.05, 0.05), (0.95, 0.05)], rng.random())?;
        let dense = discord_matrix(&g, kind)?;
        let a = &dense.matrix;
        let report = match check_ratio_conditions(a, &s0, 1, &ConditionOptions::default()) {
            Ok(r) => r,
            Err(crate::Error::Undefined(_)) => continue,
            Err(e) => return Err(e),
        };
        let operator = discord_operator(&g, kind);
        let chosen = select_limited(
            &g,
            &operator,
            &AttackSpec::new(1, Information::Limited, Algorithm::Sdp, rng.random()),
        )?;
        let spread = brute_force_opt(a, Domain::ZeroOne { k: 1 })?.value;
        let indicator: Vec<f64> = (0..g.node_count())
            .map(|u| if chosen.contains(&u) { 1.0 } else { 0.0 })
            .collect();
        let beta = if spread > 0.0 {
            a.quad_form(&indicator) / spread
        } else {
            1.0
        };
        let ratio = implied_ratio(
            report.gamma1.max(0.0),
            report.gamma2,
            report.gamma3,
            report.c,
            beta.min(1.0),
        );
        if report.gamma1.max(report.gamma2).max(report.gamma3) <= 0.2 {
            qualifying += 1;
        }
        if ratio <= 0.0 {
            continue;
        }
        applicable += 1;
        let opt = brute_force_opt(
            a,
            Domain::Radicalize {
                s0: s0.values(),
                k: 1,
            },
        )?
        .value;
        let got = a.quad_form(radicalize(&s0, &chosen)?.values());
        if got < ratio * opt - 1e-9 * (1.0 + opt.abs()) {
            return Ok((
                false,
                count,
                format!("bound violated on instance {i}: {got:.6e} < {ratio:.4} x {opt:.6e}"),
            ));
        }
    }
    Ok((
        true,
        count,
        format!("{applicable} instances with a positive implied ratio, {qualifying} with all conditions at most 1/5, no violations"),
    ))
}

fn blindness(seed: u64) -> Result<(bool, usize, String)> {
    let count = 10;
    for i in 0..count {
        let (g, s) = random_instance(seed, i, 16)?;
        let a = discord_operator(&g, DiscordKind::Polarization);
        let s1 = OpinionVector::unit(s)?;
        let s2 = OpinionVector::unit(s1.values().iter().map(|v| 1.0 - v).collect())?;
        let k = 1 + i % g.node_count();
        for algorithm in Algorithm::ALL {
            let spec = AttackSpec {
                simulations: 20,
                solver: SolverConfig {
                    trials: 10,
                    ..SolverConfig::default()
                },
                ..AttackSpec::new(
                    k,
                    Information::Limited,
                    algorithm,
                    seed::derive_seed(seed, i as u64),
                )
            };
            let pick = |s: &OpinionVector| match attack(&g, &a, s, &spec) {
                Ok(r) => Ok(r.chosen),
                Err(crate::Error::UndefinedScore) => select_limited(&g, &a, &spec),
                Err(e) => Err(e),
            };
            if pick(&s1)? != pick(&s2)? {
                return Ok((
                    false,
                    count,
                    format!("{algorithm} depends on opinions on instance {i}"),
                ));
            }
        }
    }
    Ok((
        true,
        count,
        "limited-information choices ignore opinions".into(),
    ))
}
