//! Friedkin–Johnsen dynamics: the synchronous update rule and its equilibrium
//! `z* = (I + L)⁻¹ s`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::graph::{laplacian, Graph};
use crate::opinion::OpinionVector;

/// Graphs above this size never get a dense `n × n` matrix.
pub const DENSE_LIMIT: usize = 5000;

/// Sup-norm step size at which the iterated update counts as converged.
pub const FJ_STEP_TOLERANCE: f64 = 1e-10;

const CG_RELATIVE_TOLERANCE: f64 = 1e-14;

/// Solves `(I + L) z = b`. Small graphs use a dense Cholesky factor; large
/// ones run conjugate gradients against the sparse Laplacian. `(I + L)` has
/// spectrum in `[1, 1 + 2·max degree]`, so CG converges quickly.
pub enum FjSolver<'g> {
    Dense(Cholesky<f64, Dyn>),
    Sparse(&'g Graph),
}

impl<'g> FjSolver<'g> {
    pub fn new(g: &'g Graph) -> Self {
        if g.node_count() <= DENSE_LIMIT {
            Self::dense(g)
        } else {
            Self::Sparse(g)
        }
    }

    pub fn dense(g: &Graph) -> Self {
        let n = g.node_count();
        let m = laplacian(g).matrix + DMatrix::identity(n, n);
        Self::Dense(Cholesky::new(m).expect("I + L is positive definite"))
    }

    pub fn sparse(g: &'g Graph) -> Self {
        Self::Sparse(g)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        match self {
            Self::Dense(chol) => chol
                .solve(&DVector::from_column_slice(b))
                .as_slice()
                .to_vec(),
            Self::Sparse(g) => conjugate_gradient(g, b),
        }
    }

    /// `(I + L)⁻¹` as a dense matrix. Only for the dense path.
    pub(crate) fn inverse(&self) -> Option<DMatrix<f64>> {
        match self {
            Self::Dense(chol) => Some(chol.inverse()),
            Self::Sparse(_) => None,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn apply_shifted(g: &Graph, x: &[f64]) -> Vec<f64> {
    let mut y = g.laplacian_apply(x);
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += xi;
    }
    y
}

fn conjugate_gradient(g: &Graph, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let b_norm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return x;
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let max_iter = 10 * n + 100;
    for _ in 0..max_iter {
        if rr.sqrt() <= CG_RELATIVE_TOLERANCE * b_norm {
            break;
        }
        let ap = apply_shifted(g, &p);
        let step = rr / dot(&p, &ap);
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
    }
    x
}

/// Expressed opinions at equilibrium.
pub fn equilibrium(g: &Graph, s: &OpinionVector) -> Result<OpinionVector> {
    s.check_len(g.node_count())?;
    let z = FjSolver::new(g).solve(s.values());
    let (lo, hi) = s.range();
    // z* is a convex combination of s; clamp round-off at the range ends
    OpinionVector::new(z.into_iter().map(|v| v.clamp(lo, hi)).collect(), lo, hi)
}

/// Equilibrium without range bookkeeping, for arbitrary real vectors.
pub fn equilibrium_raw(g: &Graph, s: &[f64]) -> Vec<f64> {
    FjSolver::new(g).solve(s)
}

/// One synchronous application of the update rule to all nodes:
/// `z'_u = (s_u + Σ_v w_uv z_v) / (1 + Σ_v w_uv)`.
pub fn fj_step(g: &Graph, s: &OpinionVector, z: &OpinionVector) -> Result<OpinionVector> {
    s.check_len(g.node_count())?;
    z.check_len(g.node_count())?;
    let next = fj_step_raw(g, s.values(), z.values());
    let (lo, hi) = z.range();
    OpinionVector::new(next.into_iter().map(|v| v.clamp(lo, hi)).collect(), lo, hi)
}

pub fn fj_step_raw(g: &Graph, s: &[f64], z: &[f64]) -> Vec<f64> {
    (0..g.node_count())
        .map(|u| {
            let (num, den) = g
                .neighbors(u)
                .fold((s[u], 1.0), |(num, den), (v, w)| (num + w * z[v], den + w));
            num / den
        })
        .collect()
}

/// Iterates the update from `z⁽⁰⁾ = s` until the sup-norm step is at most
/// `tolerance`. Returns the final iterate and the number of steps.
pub fn iterate_to_fixed_point(
    g: &Graph,
    s: &[f64],
    tolerance: f64,
    max_steps: usize,
) -> Result<(Vec<f64>, usize)> {
    let mut z = s.to_vec();
    for step in 1..=max_steps {
        let next = fj_step_raw(g, s, &z);
        let gap = next
            .iter()
            .zip(&z)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        z = next;
        if gap <= tolerance {
            return Ok((z, step));
        }
    }
    Err(Error::Convergence {
        iterations: max_steps,
        gradient_norm: f64::NAN,
        constraint_residual: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_sbm;

    #[test]
    fn empty_graph_equilibrium_is_innate() {
        let g = Graph::empty(3);
        let s = OpinionVector::unit(vec![0.1, 0.5, 0.9]).unwrap();
        assert_eq!(equilibrium(&g, &s).unwrap(), s);
    }

    #[test]
    fn two_node_equilibrium() {
        let g = Graph::new(2, [(0, 1, 1.0)]).unwrap();
        let s = OpinionVector::unit(vec![0.0, 1.0]).unwrap();
        let z = equilibrium(&g, &s).unwrap();
        assert!((z.values()[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((z.values()[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn consensus_is_fixed() {
        let (g, _) = generate_sbm(&[5, 5], 0.6, 0.2, 1).unwrap();
        let s = OpinionVector::constant(10, 0.4).unwrap();
        let z = equilibrium(&g, &s).unwrap();
        assert!(z.values().iter().all(|v| (v - 0.4).abs() < 1e-14));
    }

    #[test]
    fn step_examples() {
        let g = Graph::new(2, [(0, 1, 1.0)]).unwrap();
        let s = OpinionVector::unit(vec![0.0, 1.0]).unwrap();
        let z = fj_step(&g, &s, &s).unwrap();
        assert_eq!(z.values(), &[0.5, 0.5]);

        let star = equilibrium(&g, &s).unwrap();
        let again = fj_step(&g, &s, &star).unwrap();
        for (a, b) in again.values().iter().zip(star.values()) {
            assert!((a - b).abs() < 1e-12);
        }

        let g = Graph::new(3, [(0, 1, 2.0)]).unwrap();
        let s = OpinionVector::unit(vec![0.2, 0.4, 0.7]).unwrap();
        let z = OpinionVector::unit(vec![0.9, 0.1, 0.3]).unwrap();
        assert_eq!(fj_step(&g, &s, &z).unwrap().values()[2], 0.7);
    }

    #[test]
    fn sparse_and_dense_solvers_agree() {
        let (g, _) = generate_sbm(&[20, 20, 20], 0.3, 0.05, 11).unwrap();
        let b: Vec<f64> = (0..60).map(|i| ((i * 7919) % 101) as f64 / 101.0).collect();
        let dense = FjSolver::dense(&g).solve(&b);
        let sparse = FjSolver::sparse(&g).solve(&b);
        for (a, c) in dense.iter().zip(&sparse) {
            assert!((a - c).abs() < 1e-12);
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let g = Graph::empty(3);
        let s = OpinionVector::unit(vec![0.1]).unwrap();
        assert!(equilibrium(&g, &s).is_err());
    }
}
