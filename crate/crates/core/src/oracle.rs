//! Exhaustive oracles and checkers for the guarantees the solvers rely on.

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::discord::Kernel;
use crate::error::{Error, Result};
use crate::opinion::OpinionVector;
use crate::seed;

pub use crate::maxcut::rebalance_lower_bound;

/// Largest number of candidate sets [`brute_force_opt`] will enumerate.
pub const ENUMERATION_LIMIT: f64 = 1e7;
/// Largest number of size-k sets for which condition checks are exact.
pub const EXACT_CONDITION_LIMIT: f64 = 1e6;
pub const CONDITION_SAMPLES: usize = 100_000;

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Feasible sets for [`brute_force_opt`].
#[derive(Debug, Clone, Copy)]
pub enum Domain<'a> {
    /// `s ∈ {0, 1}ⁿ` with exactly `k` ones.
    ZeroOne { k: usize },
    /// `x ∈ {−1, 1}ⁿ` with exactly `part` entries `+1`; value `¼ xᵀAx`.
    Signed { part: usize },
    /// `s₀` with exactly `k` entries raised to 1.
    Radicalize { s0: &'a [f64], k: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub vector: Vec<f64>,
    pub set: Vec<usize>,
    pub value: f64,
}

/// Exact optimum by enumeration; the first set in lexicographic order wins
/// ties.
pub fn brute_force_opt(a: &DMatrix<f64>, domain: Domain<'_>) -> Result<Optimum> {
    let n = a.nrows();
    let k = match domain {
        Domain::ZeroOne { k } | Domain::Radicalize { k, .. } => k,
        Domain::Signed { part } => part,
    };
    if k > n {
        return Err(Error::Validation(format!("set size {k} exceeds {n} nodes")));
    }
    if let Domain::Radicalize { s0, .. } = domain {
        if s0.len() != n {
            return Err(Error::Validation(format!(
                "opinion vector has length {}, matrix has {n} rows",
                s0.len()
            )));
        }
    }
    let count = binomial(n, k);
    if count > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    let build = |set: &[usize]| -> Vec<f64> {
        match domain {
            Domain::ZeroOne { .. } => {
                let mut v = vec![0.0; n];
                set.iter().for_each(|&u| v[u] = 1.0);
                v
            }
            Domain::Signed { .. } => {
                let mut v = vec![-1.0; n];
                set.iter().for_each(|&u| v[u] = 1.0);
                v
            }
            Domain::Radicalize { s0, .. } => {
                let mut v = s0.to_vec();
                set.iter().for_each(|&u| v[u] = 1.0);
                v
            }
        }
    };
    let factor = if matches!(domain, Domain::Signed { .. }) {
        0.25
    } else {
        1.0
    };
    let mut best: Option<Optimum> = None;
    for set in (0..n).combinations(k) {
        let vector = build(&set);
        let value = factor * a.quad_form(&vector);
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(Optimum { vector, set, value });
        }
    }
    Ok(best.expect("at least one set"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantifierMode {
    ExactEnumeration,
    Sampled,
}

/// Closeness of `s₀` to a consensus `c·1` as seen by every size-`k` set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub c: f64,
    /// Loss of the first-order term when radicalizing; always exact.
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    /// Exact maxima, or lower bounds from sampled sets.
    pub mode: QuantifierMode,
    pub sets_checked: usize,
    pub initial: f64,
}

impl ConditionReport {
    pub fn implied_ratio(&self, beta: f64) -> f64 {
        implied_ratio(self.gamma1, self.gamma2, self.gamma3, self.c, beta)
    }

    pub fn is_exact(&self) -> bool {
        self.mode == QuantifierMode::ExactEnumeration
    }
}

/// `¼·min{β, (1 − 2γ₁ − 2(1−c)γ₃) / (1 + 2(1−c)γ₃ + γ₂)}`.
pub fn implied_ratio(gamma1: f64, gamma2: f64, gamma3: f64, c: f64, beta: f64) -> f64 {
    let num = 1.0 - 2.0 * gamma1 - 2.0 * (1.0 - c) * gamma3;
    let den = 1.0 + 2.0 * (1.0 - c) * gamma3 + gamma2;
    0.25 * beta.min(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionOptions {
    /// Consensus level; `None` uses the mean of `s₀`.
    pub c: Option<f64>,
    pub seed: u64,
    pub samples: usize,
    pub exact_limit: f64,
}

impl Default for ConditionOptions {
    fn default() -> Self {
        Self {
            c: None,
            seed: 0,
            samples: CONDITION_SAMPLES,
            exact_limit: EXACT_CONDITION_LIMIT,
        }
    }
}

/// With `ε = s₀ − c·1` and `D₀ = s₀ᵀAs₀`, computes over size-`k` sets `X`
///
/// ```text
/// γ₁ = max −(s_X − s₀)ᵀ A s₀ / D₀
/// γ₂ = max ε|_Xᵀ A ε|_X / D₀
/// γ₃ = max |ε|_Xᵀ A 1|_X| / D₀
/// ```
///
/// `γ₁` is linear in the indicator of `X` and is maximized exactly by its
/// top `k` terms. `γ₂` and `γ₃` are enumerated when there are at most
/// `exact_limit` sets and sampled otherwise.
pub fn check_ratio_conditions(
    a: &DMatrix<f64>,
    s0: &OpinionVector,
    k: usize,
    options: &ConditionOptions,
) -> Result<ConditionReport> {
    let n = a.nrows();
    s0.check_len(n)?;
    if s0.range() != (0.0, 1.0) {
        return Err(Error::Validation(
            "conditions are stated for opinions in [0, 1]".into(),
        ));
    }
    if k > n {
        return Err(Error::Validation(format!("k = {k} exceeds {n} nodes")));
    }
    let s = s0.values();
    let c = options.c.unwrap_or_else(|| s0.mean());
    if !(0.0..1.0).contains(&c) {
        return Err(Error::Validation(format!(
            "consensus level {c} not in [0, 1)"
        )));
    }
    let initial = a.quad_form(s);
    let s_norm2: f64 = s.iter().map(|v| v * v).sum();
    if initial <= 1e-12 * crate::linalg::max_abs(a) * s_norm2 * (n as f64) {
        return Err(Error::Undefined(format!(
            "condition ratios need a positive initial index (got {initial:e})"
        )));
    }
    let as0 = a.apply(s);
    let mut terms: Vec<f64> = (0..n).map(|u| -(1.0 - s[u]) * as0[u]).collect();
    terms.sort_by(|x, y| y.total_cmp(x));
    let gamma1 = terms[..k].iter().sum::<f64>() / initial;

    let eps: Vec<f64> = s.iter().map(|v| v - c).collect();
    let pair = |set: &[usize]| -> (f64, f64) {
        let mut g2 = 0.0;
        let mut g3 = 0.0;
        for &u in set {
            let mut row_eps = 0.0;
            let mut row_one = 0.0;
            for &v in set {
                row_eps += a[(u, v)] * eps[v];
                row_one += a[(u, v)];
            }
            g2 += eps[u] * row_eps;
            g3 += eps[u] * row_one;
        }
        (g2, g3.abs())
    };
    let count = binomial(n, k);
    let (mut g2, mut g3) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let (mode, sets_checked) = if count <= options.exact_limit {
        for set in (0..n).combinations(k) {
            let (x, y) = pair(&set);
            g2 = g2.max(x);
            g3 = g3.max(y);
        }
        (QuantifierMode::ExactEnumeration, count as usize)
    } else {
        let mut rng = seed::rng(options.seed);
        for _ in 0..options.samples {
            let set = index::sample(&mut rng, n, k).into_vec();
            let (x, y) = pair(&set);
            g2 = g2.max(x);
            g3 = g3.max(y);
        }
        (QuantifierMode::Sampled, options.samples)
    };
    Ok(ConditionReport {
        c,
        gamma1,
        gamma2: g2 / initial,
        gamma3: g3 / initial,
        mode,
        sets_checked,
        initial,
    })
}

/// Finds a node on the `+1` side whose flip loses at most `2M/|S|` of
/// `M = ¼ xᵀAx`. Returns the cheapest such node and its loss.
pub fn verify_local_move_bound(a: &DMatrix<f64>, x: &[i8]) -> Result<(usize, f64)> {
    let n = x.len();
    let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
    let ax = a.apply(&xf);
    let m = 0.25 * crate::linalg::dot(&xf, &ax);
    let side: Vec<usize> = (0..n).filter(|&i| x[i] == 1).collect();
    if side.is_empty() {
        return Err(Error::Validation("the +1 side is empty".into()));
    }
    let (i, loss) = side
        .iter()
        .map(|&i| (i, xf[i] * ax[i] - a[(i, i)]))
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("non-empty");
    let scale = (0..n).fold(1.0_f64, |s, i| s.max(a[(i, i)].abs()));
    let limit = 2.0 * m / side.len() as f64;
    if loss > limit + 1e-9 * scale {
        return Err(Error::InvariantViolation(format!(
            "cheapest flip (node {i}) loses {loss:e} > 2M/|S| = {limit:e}"
        )));
    }
    Ok((i, loss))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremeCheck {
    pub vertex_value: f64,
    pub interior_best: f64,
    pub holds: bool,
}

/// Compares `max sᵀAs` over the vertices of `[−1, 1]ⁿ` with the best value
/// reached from `samples` uniform interior points, each followed by
/// projected gradient ascent.
pub fn verify_extreme_optimum(a: &DMatrix<f64>, samples: usize, seed: u64) -> Result<ExtremeCheck> {
    const ASCENT_STEPS: usize = 50;
    let n = a.nrows();
    if n > 20 {
        return Err(Error::TooLarge {
            count: 2f64.powi(n as i32),
            limit: 2f64.powi(20),
        });
    }
    let mut vertex_value = f64::NEG_INFINITY;
    let mut x = vec![0.0; n];
    for mask in 0u64..(1u64 << n) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
        }
        vertex_value = vertex_value.max(a.quad_form(&x));
    }
    if n == 0 {
        vertex_value = 0.0;
    }
    let norm = crate::linalg::spectral_norm(a);
    let step = if norm > 0.0 { 0.5 / norm } else { 0.0 };
    let mut rng = seed::rng(seed);
    let mut interior_best = f64::NEG_INFINITY;
    for _ in 0..samples {
        let mut s: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        interior_best = interior_best.max(a.quad_form(&s));
        for _ in 0..ASCENT_STEPS {
            let g = a.apply(&s);
            for (si, gi) in s.iter_mut().zip(&g) {
                *si = (*si + 2.0 * step * gi).clamp(-1.0, 1.0);
            }
        }
        interior_best = interior_best.max(a.quad_form(&s));
    }
    if samples == 0 {
        interior_best = vertex_value;
    }
    let holds = interior_best <= vertex_value + 1e-9 * (1.0 + vertex_value.abs());
    Ok(ExtremeCheck {
        vertex_value,
        interior_best,
        holds,
    })
}

/// Approximation guarantee of the balanced max-cut solver as a function of
/// the part fraction.
pub fn ratio_bound(alpha: f64) -> f64 {
    if alpha < 0.448 {
        2.059 * alpha * alpha
    } else if alpha < 0.5 {
        1.36 * (1.0 - alpha).powi(2)
    } else if alpha < 0.552 {
        1.36 * alpha * alpha
    } else {
        2.059 * (1.0 - alpha).powi(2)
    }
}

/// `P BᵀB P` with `B` a `rank × n` Gaussian matrix and `P = I − J/n`: PSD
/// with zero row sums.
pub fn random_centered_psd(n: usize, rank: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = seed::rng(seed);
    let mut bc: DMatrix<f64> = DMatrix::from_fn(rank, n, |_, _| StandardNormal.sample(&mut rng));
    for mut row in bc.row_iter_mut() {
        let mean = row.mean();
        row.add_scalar_mut(-mean);
    }
    let mut a = bc.transpose() * bc;
    crate::linalg::symmetrize(&mut a);
    a
}
