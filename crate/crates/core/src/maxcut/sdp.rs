//! Low-rank solver for the balanced max-cut relaxation
//!
//! ```text
//! maximize   ¼ Σ_ij A_ij ⟨v_i, v_j⟩
//! subject to ‖v_i‖ = 1,   Σ_{i<j} ⟨v_i, v_j⟩ = ½n²(1−2α)² − n/2
//! ```
//!
//! With unit rows the balance constraint is `‖Σ_i v_i‖² = n²(1−2α)²`. The
//! vectors are kept on the product of spheres and the single constraint is
//! handled by an augmented Lagrangian.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Relaxation solution. Column `i` of `vectors` is `v_i`.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub vectors: DMatrix<f64>,
    pub objective: f64,
    pub constraint_residual: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn node_count(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn rank(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        let r = self.rank();
        &self.vectors.as_slice()[i * r..(i + 1) * r]
    }

    /// `Σ_{i<j} ⟨v_i, v_j⟩`.
    pub fn pair_sum(&self) -> f64 {
        let w: DVector<f64> = self.vectors.column_sum();
        let sq: f64 = self.vectors.iter().map(|v| v * v).sum();
        0.5 * (w.norm_squared() - sq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SdpOptions {
    /// Factorization rank; `None` picks `⌈√(2n)⌉ + 2`.
    pub rank: Option<usize>,
    /// Bound on the Riemannian gradient norm; the constraint residual must be
    /// at most `tolerance · n²`.
    pub tolerance: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub seed: u64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            rank: None,
            tolerance: 1e-6,
            max_outer: 60,
            max_inner: 20_000,
            seed: 0,
        }
    }
}

pub fn default_rank(n: usize) -> usize {
    ((2.0 * n as f64).sqrt().ceil() as usize) + 2
}

/// Symmetry, PSD and zero-row-sum checks. Returns the spectral norm.
pub(crate) fn check_preconditions(a: &DMatrix<f64>) -> Result<f64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Precondition(format!(
            "matrix is {}x{}, expected square",
            n,
            a.ncols()
        )));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let scale = crate::linalg::max_abs(a);
    let asym = crate::linalg::max_asymmetry(a);
    if asym > 1e-9 * (1.0 + scale) {
        return Err(Error::Precondition(format!(
            "matrix is not symmetric (gap {asym:e})"
        )));
    }
    let eig = SymmetricEigen::new(a.clone()).eigenvalues;
    let norm = eig.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-6 * norm {
        return Err(Error::Precondition(format!(
            "matrix is not positive semidefinite (min eigenvalue {min:e}, norm {norm:e})"
        )));
    }
    let rows = crate::linalg::max_row_sum(a);
    if rows > 1e-7 * norm * (n as f64).sqrt() && rows > 1e-12 * (1.0 + scale) {
        return Err(Error::Precondition(format!(
            "matrix rows do not sum to zero (max |row sum| {rows:e})"
        )));
    }
    Ok(norm)
}

struct Point {
    v: DMatrix<f64>,
    va: DMatrix<f64>,
    w: DVector<f64>,
    h: f64,
    trace: f64,
}

impl Point {
    fn new(a: &DMatrix<f64>, v: DMatrix<f64>, target: f64, n2: f64) -> Self {
        let va = &v * a;
        let w = v.column_sum();
        let h = (w.norm_squared() - target) / n2;
        let trace = v.dot(&va);
        Self { v, va, w, h, trace }
    }

    fn merit(&self, scale: f64, lambda: f64, rho: f64) -> f64 {
        -0.25 * self.trace / scale + lambda * self.h + 0.5 * rho * self.h * self.h
    }

    /// Riemannian gradient of the merit function.
    fn gradient(&self, scale: f64, lambda: f64, rho: f64, n2: f64) -> DMatrix<f64> {
        let mu = 2.0 * (lambda + rho * self.h) / n2;
        let mut g = &self.va * (-0.5 / scale);
        for (i, mut col) in g.column_iter_mut().enumerate() {
            col.axpy(mu, &self.w, 1.0);
            let vi = self.v.column(i);
            let radial = col.dot(&vi);
            col.axpy(-radial, &vi, 1.0);
        }
        g
    }
}

fn normalize_columns(v: &mut DMatrix<f64>) {
    for mut col in v.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        } else {
            col.fill(0.0);
            col[0] = 1.0;
        }
    }
}

struct Inner {
    point: Point,
    gradient_norm: f64,
    iterations: usize,
}

#[allow(clippy::too_many_arguments)]
fn minimize(
    a: &DMatrix<f64>,
    start: Point,
    target: f64,
    n2: f64,
    scale: f64,
    lambda: f64,
    rho: f64,
    tol: f64,
    max_iter: usize,
) -> Inner {
    const MEMORY: usize = 8;
    let mut x = start;
    let mut f = x.merit(scale, lambda, rho);
    let mut g = x.gradient(scale, lambda, rho, n2);
    let mut gn = g.norm();
    let mut history = vec![f];
    let mut step = 1.0 / gn.max(1.0);
    let mut iterations = 0;
    while gn > tol && iterations < max_iter {
        iterations += 1;
        let reference = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut t = step;
        let mut accepted = None;
        for _ in 0..60 {
            let mut v = &x.v - &g * t;
            normalize_columns(&mut v);
            let cand = Point::new(a, v, target, n2);
            let fc = cand.merit(scale, lambda, rho);
            if fc <= reference - 1e-4 * t * gn * gn {
                accepted = Some((cand, fc));
                break;
            }
            t *= 0.5;
        }
        let Some((next, fnext)) = accepted else { break };
        let gnext = next.gradient(scale, lambda, rho, n2);
        let s = &next.v - &x.v;
        let y = &gnext - &g;
        let sy = s.dot(&y);
        let ss = s.norm_squared();
        step = if sy > 0.0 {
            (ss / sy).clamp(1e-12, 1e12)
        } else {
            (2.0 * t).min(1e12)
        };
        x = next;
        f = fnext;
        g = gnext;
        gn = g.norm();
        history.push(f);
        if history.len() > MEMORY {
            history.remove(0);
        }
    }
    Inner {
        point: x,
        gradient_norm: gn,
        iterations,
    }
}

/// Solves the relaxation for a part of size `part` out of `n = a.nrows()`.
pub fn solve_relaxation(
    a: &DMatrix<f64>,
    part: usize,
    options: &SdpOptions,
) -> Result<SdpSolution> {
    check_preconditions(a)?;
    let n = a.nrows();
    if n == 0 || part > n {
        return Err(Error::Validation(format!(
            "part size {part} infeasible for {n} nodes"
        )));
    }
    let rank = options.rank.unwrap_or_else(|| default_rank(n)).max(1);
    let target = ((n - 2 * part.min(n - part)) as f64).powi(2);
    let n2 = (n * n) as f64;

    if part == 0 || part == n {
        // only the all-equal configuration is feasible
        let mut v = DMatrix::zeros(rank, n);
        v.row_mut(0).fill(1.0);
        return Ok(finish(a, v, target, 0.0, 0));
    }

    let mut rng = seed::rng(seed::derive_labeled(options.seed, "sdp-start", 0));
    let mut v = DMatrix::from_fn(rank, n, |_, _| StandardNormal.sample(&mut rng));
    normalize_columns(&mut v);

    let trace = a.trace();
    let scale = if trace > 0.0 { trace / 4.0 } else { 1.0 };
    let h_tol = 2.0 * options.tolerance;
    let mut lambda = 0.0;
    let mut rho = 10.0;
    let mut point = Point::new(a, v, target, n2);
    let mut previous_h = f64::INFINITY;
    let mut iterations = 0;
    let mut gradient_norm = f64::INFINITY;
    for _ in 0..options.max_outer {
        let inner = minimize(
            a,
            point,
            target,
            n2,
            scale,
            lambda,
            rho,
            options.tolerance,
            options.max_inner,
        );
        point = inner.point;
        iterations += inner.iterations;
        gradient_norm = inner.gradient_norm;
        let h = point.h;
        if h.abs() <= h_tol && gradient_norm <= options.tolerance {
            return Ok(finish(a, point.v, target, gradient_norm, iterations));
        }
        lambda += rho * h;
        if h.abs() > 0.25 * previous_h.abs() {
            rho = (rho * 10.0).min(1e12);
        }
        previous_h = h;
    }
    Err(Error::Convergence {
        iterations,
        gradient_norm,
        constraint_residual: 0.5 * point.h.abs() * n2,
    })
}

fn finish(
    a: &DMatrix<f64>,
    v: DMatrix<f64>,
    target: f64,
    gradient_norm: f64,
    iterations: usize,
) -> SdpSolution {
    let n = v.ncols();
    let point = Point::new(a, v, target, (n * n) as f64);
    SdpSolution {
        objective: 0.25 * point.trace,
        constraint_residual: 0.5 * (point.w.norm_squared() - target).abs(),
        gradient_norm,
        iterations,
        vectors: point.v,
    }
}
