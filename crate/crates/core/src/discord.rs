//! Discord indices as quadratic forms of the innate opinions.
//!
//! Disagreement: `sᵀ A_D s` with `A_D = (I+L)⁻¹ L (I+L)⁻¹`.
//! Polarization: `sᵀ A_P s` with `A_P = (I+L)⁻¹ (I − 11ᵀ/n) (I+L)⁻¹`.
//! Both matrices are PSD and annihilate the all-ones vector.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{FjSolver, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::graph::{laplacian, Graph};
use crate::linalg::{self, dot};
use crate::opinion::OpinionVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscordKind {
    Disagreement,
    Polarization,
}

impl fmt::Display for DiscordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Disagreement => "disagreement",
            Self::Polarization => "polarization",
        })
    }
}

impl FromStr for DiscordKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "disagreement" | "d" => Ok(Self::Disagreement),
            "polarization" | "p" => Ok(Self::Polarization),
            other => Err(Error::Validation(format!("unknown discord kind `{other}`"))),
        }
    }
}

/// A symmetric quadratic-form kernel. Implemented by dense matrices and by the
/// matrix-free discord operator used for large graphs.
pub trait Kernel: Sync {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[f64]) -> Vec<f64>;

    fn column(&self, j: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.dim()];
        e[j] = 1.0;
        self.apply(&e)
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.column(j)[j]).collect()
    }

    fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.apply(x))
    }
}

impl Kernel for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.nrows();
        let mut y = vec![0.0; n];
        // column-major storage: accumulate columns
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let col = self.column(j);
            for i in 0..n {
                y[i] += col[i] * xj;
            }
        }
        y
    }

    fn column(&self, j: usize) -> Vec<f64> {
        self.column(j).iter().copied().collect()
    }

    fn diagonal(&self) -> Vec<f64> {
        self.diagonal().iter().copied().collect()
    }

    fn quad_form(&self, x: &[f64]) -> f64 {
        let n = self.nrows();
        let mut total = 0.0;
        for j in 0..n {
            if x[j] == 0.0 {
                continue;
            }
            let col = self.column(j);
            let mut acc = 0.0;
            for i in 0..n {
                acc += col[i] * x[i];
            }
            total += acc * x[j];
        }
        total
    }
}

/// Dense discord matrix.
#[derive(Debug, Clone)]
pub struct DiscordMatrix {
    pub matrix: DMatrix<f64>,
    pub kind: DiscordKind,
}

impl DiscordMatrix {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn scaled(&self, factor: f64) -> DMatrix<f64> {
        &self.matrix * factor
    }
}

impl Kernel for DiscordMatrix {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.apply(x)
    }
    fn column(&self, j: usize) -> Vec<f64> {
        Kernel::column(&self.matrix, j)
    }
    fn diagonal(&self) -> Vec<f64> {
        Kernel::diagonal(&self.matrix)
    }
    fn quad_form(&self, x: &[f64]) -> f64 {
        self.matrix.quad_form(x)
    }
}

/// Dense construction. Fails above [`DENSE_LIMIT`] nodes; use
/// [`discord_operator`] there.
pub fn discord_matrix(g: &Graph, kind: DiscordKind) -> Result<DiscordMatrix> {
    let n = g.node_count();
    if n > DENSE_LIMIT {
        return Err(Error::Precondition(format!(
            "dense discord matrix limited to {DENSE_LIMIT} nodes, graph has {n}"
        )));
    }
    let inv = FjSolver::dense(g).inverse().expect("dense solver");
    let mut a = match kind {
        DiscordKind::Disagreement => &inv * laplacian(g).matrix * &inv,
        DiscordKind::Polarization => {
            // (I+L)⁻¹ 1 = 1, so the centering term collapses to 11ᵀ/n
            let mut m = &inv * &inv;
            let c = 1.0 / n as f64;
            m.add_scalar_mut(-c);
            m
        }
    };
    linalg::symmetrize(&mut a);
    Ok(DiscordMatrix { matrix: a, kind })
}

/// Matrix-free discord operator: every product costs two `(I+L)` solves.
pub struct MatrixFreeDiscord<'g> {
    graph: &'g Graph,
    kind: DiscordKind,
    solver: FjSolver<'g>,
}

impl<'g> MatrixFreeDiscord<'g> {
    pub fn new(graph: &'g Graph, kind: DiscordKind) -> Self {
        Self {
            graph,
            kind,
            solver: FjSolver::new(graph),
        }
    }

    pub fn sparse(graph: &'g Graph, kind: DiscordKind) -> Self {
        Self {
            graph,
            kind,
            solver: FjSolver::sparse(graph),
        }
    }

    pub fn kind(&self) -> DiscordKind {
        self.kind
    }

    fn middle(&self, z: &[f64]) -> Vec<f64> {
        match self.kind {
            DiscordKind::Disagreement => self.graph.laplacian_apply(z),
            DiscordKind::Polarization => {
                let mean = z.iter().sum::<f64>() / z.len().max(1) as f64;
                z.iter().map(|v| v - mean).collect()
            }
        }
    }
}

impl Kernel for MatrixFreeDiscord<'_> {
    fn dim(&self) -> usize {
        self.graph.node_count()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let z = self.solver.solve(x);
        self.solver.solve(&self.middle(&z))
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.dim())
            .into_par_iter()
            .map(|u| {
                let mut e = vec![0.0; self.dim()];
                e[u] = 1.0;
                let c = self.solver.solve(&e);
                dot(&c, &self.middle(&c))
            })
            .collect()
    }

    fn quad_form(&self, x: &[f64]) -> f64 {
        let z = self.solver.solve(x);
        dot(&z, &self.middle(&z))
    }
}

/// Either representation, chosen by graph size.
pub enum DiscordOperator<'g> {
    Dense(DiscordMatrix),
    MatrixFree(MatrixFreeDiscord<'g>),
}

impl DiscordOperator<'_> {
    pub fn kind(&self) -> DiscordKind {
        match self {
            Self::Dense(m) => m.kind,
            Self::MatrixFree(m) => m.kind,
        }
    }

    pub fn as_dense(&self) -> Option<&DiscordMatrix> {
        match self {
            Self::Dense(m) => Some(m),
            Self::MatrixFree(_) => None,
        }
    }
}

impl Kernel for DiscordOperator<'_> {
    fn dim(&self) -> usize {
        match self {
            Self::Dense(m) => m.dim(),
            Self::MatrixFree(m) => m.dim(),
        }
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Self::Dense(m) => m.apply(x),
            Self::MatrixFree(m) => m.apply(x),
        }
    }
    fn column(&self, j: usize) -> Vec<f64> {
        match self {
            Self::Dense(m) => m.column(j),
            Self::MatrixFree(m) => m.column(j),
        }
    }
    fn diagonal(&self) -> Vec<f64> {
        match self {
            Self::Dense(m) => m.diagonal(),
            Self::MatrixFree(m) => m.diagonal(),
        }
    }
    fn quad_form(&self, x: &[f64]) -> f64 {
        match self {
            Self::Dense(m) => m.quad_form(x),
            Self::MatrixFree(m) => m.quad_form(x),
        }
    }
}

pub fn discord_operator(g: &Graph, kind: DiscordKind) -> DiscordOperator<'_> {
    if g.node_count() <= DENSE_LIMIT {
        DiscordOperator::Dense(discord_matrix(g, kind).expect("within dense limit"))
    } else {
        DiscordOperator::MatrixFree(MatrixFreeDiscord::new(g, kind))
    }
}

/// `sᵀ A s`.
pub fn index_value<K: Kernel + ?Sized>(a: &K, s: &OpinionVector) -> Result<f64> {
    s.check_len(a.dim())?;
    Ok(a.quad_form(s.values()))
}

/// Disagreement as a sum over edges of the equilibrium: `Σ w (z_u − z_v)²`.
pub fn disagreement_direct(g: &Graph, s: &[f64]) -> f64 {
    let z = FjSolver::new(g).solve(s);
    g.edge_quadratic(&z)
}

/// Polarization as the spread of the equilibrium: `Σ (z_u − mean z)²`.
pub fn polarization_direct(g: &Graph, s: &[f64]) -> f64 {
    let z = FjSolver::new(g).solve(s);
    let mean = z.iter().sum::<f64>() / z.len().max(1) as f64;
    z.iter().map(|v| (v - mean).powi(2)).sum()
}

/// Scales an index for comparison across graphs: disagreement per edge and
/// polarization per node, both times 10⁵.
pub fn normalize(value: f64, kind: DiscordKind, g: &Graph) -> Result<f64> {
    match kind {
        DiscordKind::Disagreement => {
            if g.edge_count() == 0 {
                return Err(Error::DivisionByZero(
                    "normalized disagreement of a graph without edges".into(),
                ));
            }
            Ok(value * 1e5 / g.edge_count() as f64)
        }
        DiscordKind::Polarization => {
            if g.node_count() == 0 {
                return Err(Error::DivisionByZero("empty graph".into()));
            }
            Ok(value * 1e5 / g.node_count() as f64)
        }
    }
}

pub fn normalized_index(a: &DiscordOperator<'_>, s: &OpinionVector, g: &Graph) -> Result<f64> {
    normalize(index_value(a, s)?, a.kind(), g)
}

/// `(s'ᵀAs' − s₀ᵀAs₀) / s₀ᵀAs₀`.
pub fn relative_increase<K: Kernel + ?Sized>(
    a: &K,
    before: &OpinionVector,
    after: &OpinionVector,
) -> Result<f64> {
    let initial = index_value(a, before)?;
    let fin = index_value(a, after)?;
    relative_increase_from(initial, fin)
}

pub fn relative_increase_from(initial: f64, fin: f64) -> Result<f64> {
    if initial == 0.0 {
        return Err(Error::UndefinedScore);
    }
    Ok((fin - initial) / initial)
}
