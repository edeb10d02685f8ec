//! Balanced max-cut over PSD matrices with zero row sums: maximize `¼ xᵀAx`
//! over `x ∈ {−1, 1}ⁿ` with exactly `round(α·n)` entries equal to `+1`.
//!
//! The solver relaxes to unit vectors, rounds with random hyperplanes and
//! greedily moves nodes until the size constraint holds, keeping the best of
//! several independent trials.

mod rebalance;
mod sdp;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use rebalance::{greedy_rebalance, rebalance_lower_bound, Rebalanced};
pub use sdp::{default_rank, solve_relaxation, SdpOptions, SdpSolution};

use crate::error::{Error, Result};
use crate::seed;

/// A sign vector with its cut value `¼ xᵀAx`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutSolution {
    pub signs: Vec<i8>,
    pub value: f64,
}

impl CutSolution {
    pub fn new(a: &DMatrix<f64>, signs: Vec<i8>) -> Self {
        let x: Vec<f64> = signs.iter().map(|&s| s as f64).collect();
        Self {
            value: cut_value(a, &x),
            signs,
        }
    }

    /// Nodes with sign `+1`, ascending.
    pub fn side(&self) -> Vec<usize> {
        (0..self.signs.len())
            .filter(|&i| self.signs[i] == 1)
            .collect()
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.signs.len())
            .filter(|&i| self.signs[i] != 1)
            .collect()
    }

    pub fn size(&self) -> usize {
        self.signs.iter().filter(|&&s| s == 1).count()
    }
}

/// `¼ xᵀAx`.
pub fn cut_value(a: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len();
    let mut total = 0.0;
    for j in 0..n {
        if x[j] != 0.0 {
            let col: f64 = a.column(j).iter().zip(x).map(|(v, xi)| v * xi).sum();
            total += col * x[j];
        }
    }
    0.25 * total
}

/// Right-hand side of the relaxed balance constraint,
/// `Σ_{i<j} ⟨v_i, v_j⟩ = ½n²(1 − 2α)² − n/2`.
pub fn balance_constraint_target(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    0.5 * nf * nf * (1.0 - 2.0 * alpha).powi(2) - 0.5 * nf
}

/// `round(α·n)`.
pub fn part_size(n: usize, alpha: f64) -> usize {
    (alpha * n as f64).round().max(0.0) as usize
}

/// Parameters of the full solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub alpha: f64,
    /// Number of independent (round, rebalance) trials.
    pub trials: usize,
    /// Target failure probability; diagnostic only unless `trials` is derived
    /// from it with [`trials_for_failure_probability`].
    pub epsilon: Option<f64>,
    pub rank: Option<usize>,
    pub tolerance: f64,
    pub seed: u64,
    /// Weight of the balance term in the trial score; `None` looks it up
    /// from `alpha`.
    pub beta: Option<f64>,
    pub max_outer: usize,
    pub max_inner: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let sdp = SdpOptions::default();
        Self {
            alpha: 0.5,
            trials: 50,
            epsilon: None,
            rank: sdp.rank,
            tolerance: sdp.tolerance,
            seed: 0,
            beta: None,
            max_outer: sdp.max_outer,
            max_inner: sdp.max_inner,
        }
    }
}

impl SolverConfig {
    pub fn new(alpha: f64, seed: u64) -> Self {
        Self {
            alpha,
            seed,
            ..Self::default()
        }
    }

    pub fn sdp_options(&self) -> SdpOptions {
        SdpOptions {
            rank: self.rank,
            tolerance: self.tolerance,
            max_outer: self.max_outer,
            max_inner: self.max_inner,
            seed: seed::derive_labeled(self.seed, "relaxation", 0),
        }
    }

    /// Size of the `+1` side for `n` nodes, checked to lie in `[1, n − 1]`.
    pub fn part_size(&self, n: usize) -> Result<usize> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Validation(format!(
                "alpha {} not in (0, 1)",
                self.alpha
            )));
        }
        let m = part_size(n, self.alpha);
        if m < 1 || m + 1 > n {
            return Err(Error::Validation(format!(
                "round({} * {n}) = {m} not in [1, {}]",
                self.alpha,
                n.saturating_sub(1)
            )));
        }
        Ok(m)
    }
}

/// Relaxation for `round(α·n)` nodes on the `+1` side.
pub fn solve_sdp(a: &DMatrix<f64>, config: &SolverConfig) -> Result<SdpSolution> {
    let m = part_size(a.nrows(), config.alpha);
    solve_relaxation(a, m, &config.sdp_options())
}

/// `x_i = +1` iff `⟨v_i, r⟩ ≥ 0` for a Gaussian `r` drawn from `trial_seed`.
pub fn hyperplane_signs(sdp: &SdpSolution, trial_seed: u64) -> Vec<i8> {
    let mut rng = seed::rng(trial_seed);
    let r: Vec<f64> = (0..sdp.rank())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    (0..sdp.node_count())
        .map(|i| {
            let d: f64 = sdp.vector(i).iter().zip(&r).map(|(a, b)| a * b).sum();
            if d >= 0.0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

pub fn hyperplane_round(a: &DMatrix<f64>, sdp: &SdpSolution, trial_seed: u64) -> CutSolution {
    CutSolution::new(a, hyperplane_signs(sdp, trial_seed))
}

/// Per-trial record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialStats {
    pub trial: usize,
    pub seed: u64,
    /// Cut value right after rounding.
    pub rounded_value: f64,
    pub rounded_size: usize,
    /// `|S|·|S̄|` after rounding.
    pub balance_product: f64,
    pub final_value: f64,
    pub moves: usize,
    /// Guaranteed final value given the rounded cut.
    pub lower_bound: f64,
    /// `rounded_value / relaxation + balance_product · β / n²`.
    pub score: f64,
    pub beta: f64,
}

#[derive(Debug, Clone)]
pub struct MaxCutOutcome {
    pub solution: CutSolution,
    pub trials: Vec<TrialStats>,
    pub best_trial: usize,
    pub sdp: SdpSolution,
}

/// Relaxation once, then independent trials of rounding and rebalancing.
/// Returns the trial with the largest balanced value; ties go to the lowest
/// trial index.
pub fn solve_alpha_balanced_maxcut(
    a: &DMatrix<f64>,
    config: &SolverConfig,
) -> Result<MaxCutOutcome> {
    let n = a.nrows();
    let m = config.part_size(n)?;
    if config.trials == 0 {
        return Err(Error::Validation("at least one trial is required".into()));
    }
    let sdp = solve_relaxation(a, m, &config.sdp_options())?;
    let beta = config.beta.unwrap_or_else(|| beta_for_alpha(config.alpha));
    let nf = n as f64;
    let results = (0..config.trials)
        .into_par_iter()
        .map(|p| {
            let trial_seed = seed::derive_seed(config.seed, p as u64);
            let rounded = hyperplane_round(a, &sdp, trial_seed);
            let size = rounded.size();
            let balanced = greedy_rebalance(a, &rounded, m)?;
            let product = (size * (n - size)) as f64;
            let relaxed = if sdp.objective > 0.0 {
                rounded.value / sdp.objective
            } else {
                0.0
            };
            let stats = TrialStats {
                trial: p,
                seed: trial_seed,
                rounded_value: rounded.value,
                rounded_size: size,
                balance_product: product,
                final_value: balanced.solution.value,
                moves: balanced.moves,
                lower_bound: rebalance_lower_bound(n, size, m, rounded.value),
                score: relaxed + product * beta / (nf * nf),
                beta,
            };
            Ok((stats, balanced.solution))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (p, (stats, _)) in results.iter().enumerate() {
        if stats.final_value > results[best].0.final_value {
            best = p;
        }
    }
    let solution = results[best].1.clone();
    Ok(MaxCutOutcome {
        solution,
        trials: results.into_iter().map(|(s, _)| s).collect(),
        best_trial: best,
        sdp,
    })
}

/// `(α, approximation ratio, β)` rows from the numerical analysis of the
/// trial score.
pub const RATIO_TABLE: [(f64, f64, f64); 25] = [
    (0.01, 0.0002, 0.01),
    (0.05, 0.0063, 0.01),
    (0.09, 0.0205, 0.01),
    (0.13, 0.0429, 0.01),
    (0.17, 0.0734, 0.01),
    (0.21, 0.1121, 0.01),
    (0.25, 0.1589, 0.01),
    (0.29, 0.2139, 0.01),
    (0.33, 0.2770, 0.01),
    (0.37, 0.3268, 0.877),
    (0.41, 0.3754, 2.081),
    (0.45, 0.4076, 4.075),
    (0.49, 0.3635, 5.390),
    (0.525, 0.3837, 5.341),
    (0.565, 0.4017, 3.088),
    (0.605, 0.3570, 1.598),
    (0.645, 0.3090, 0.478),
    (0.685, 0.2524, 0.01),
    (0.725, 0.1923, 0.01),
    (0.765, 0.1404, 0.01),
    (0.805, 0.0966, 0.01),
    (0.845, 0.0610, 0.01),
    (0.885, 0.0335, 0.01),
    (0.925, 0.0142, 0.01),
    (0.965, 0.0031, 0.01),
];

/// β of the table row with the nearest α (lower α on ties).
pub fn beta_for_alpha(alpha: f64) -> f64 {
    let mut best = RATIO_TABLE[0];
    for row in RATIO_TABLE {
        if (row.0 - alpha).abs() < (best.0 - alpha).abs() {
            best = row;
        }
    }
    best.2
}

/// `c = (2/π + 0.878·α(1−α)·β) / (1 + β/4)`.
pub fn score_constant(alpha: f64, beta: f64) -> f64 {
    (2.0 / PI + 0.878 * alpha * (1.0 - alpha) * beta) / (1.0 + beta / 4.0)
}

/// Smallest trial count with `κ ≥ (1 − c + εc)/(εc) · ln(1/ε)`, which makes
/// the best trial score reach `(1−ε)(2/π + 0.878·α(1−α)·β)` with probability
/// at least `1 − ε`.
pub fn trials_for_failure_probability(epsilon: f64, alpha: f64, beta: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Validation(format!(
            "epsilon {epsilon} not in (0, 1)"
        )));
    }
    if !(beta > 0.0 && beta <= 7.0) {
        return Err(Error::Validation(format!("beta {beta} not in (0, 7]")));
    }
    let c = score_constant(alpha, beta);
    let kappa = (1.0 - c + epsilon * c) / (epsilon * c) * (1.0 / epsilon).ln();
    Ok(kappa.ceil().max(1.0) as usize)
}
