use nalgebra::DMatrix;

use super::CutSolution;
use crate::error::{Error, Result};
use crate::linalg::tie_key;

const REFRESH_EVERY: usize = 1000;
const STEP_SLACK: f64 = 1e-9;

/// Outcome of rebalancing, with the number of nodes moved.
#[derive(Debug, Clone)]
pub struct Rebalanced {
    pub solution: CutSolution,
    pub moves: usize,
}

fn product(a: &DMatrix<f64>, x: &[i8]) -> Vec<f64> {
    let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
    let mut out = vec![0.0; x.len()];
    for (j, &xj) in xf.iter().enumerate() {
        if xj != 0.0 {
            for (o, &aij) in out.iter_mut().zip(a.column(j).iter()) {
                *o += aij * xj;
            }
        }
    }
    out
}

fn quarter_form(ax: &[f64], x: &[i8]) -> f64 {
    0.25 * ax.iter().zip(x).map(|(v, &s)| v * s as f64).sum::<f64>()
}

/// Moves nodes one at a time across the cut until the `+1` side has
/// `target` members. Each move takes the node, from the side that must
/// shrink, whose flip loses the least cut value (lowest id on ties).
///
/// Every move is checked against `2·M / |side|`, which holds whenever `A` is
/// PSD with zero row sums; a violation is reported as an error.
pub fn greedy_rebalance(
    a: &DMatrix<f64>,
    start: &CutSolution,
    target: usize,
) -> Result<Rebalanced> {
    let n = start.signs.len();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::Validation(format!(
            "matrix is {}x{}, cut has {n} nodes",
            a.nrows(),
            a.ncols()
        )));
    }
    if target > n {
        return Err(Error::Validation(format!(
            "target size {target} exceeds {n} nodes"
        )));
    }
    let mut x = start.signs.clone();
    let mut ax = product(a, &x);
    let mut value = quarter_form(&ax, &x);
    let mut size = x.iter().filter(|&&s| s == 1).count();
    let mut moves = 0;
    let diag_scale = (0..n).fold(0.0_f64, |m, i| m.max(a[(i, i)].abs()));

    while size != target {
        let from: i8 = if size > target { 1 } else { -1 };
        let side = if from == 1 { size } else { n - size };
        let mut best: Option<(usize, i64, f64)> = None;
        for i in (0..n).filter(|&i| x[i] == from) {
            let loss = x[i] as f64 * ax[i] - a[(i, i)];
            let key = tie_key(loss, diag_scale);
            if best.is_none_or(|(_, b, _)| key < b) {
                best = Some((i, key, loss));
            }
        }
        let (i, _, loss) = best.expect("side being shrunk is non-empty");
        let limit = 2.0 * value / side as f64 + STEP_SLACK * (1.0 + value.abs() + diag_scale);
        if loss > limit {
            return Err(Error::InvariantViolation(format!(
                "cheapest move of node {i} loses {loss:e}, above 2M/|side| = {:e}; \
                 matrix is not PSD with zero row sums",
                2.0 * value / side as f64
            )));
        }
        let xi = x[i] as f64;
        for (o, &aki) in ax.iter_mut().zip(a.column(i).iter()) {
            *o -= 2.0 * xi * aki;
        }
        x[i] = -x[i];
        value -= loss;
        size = if from == 1 { size - 1 } else { size + 1 };
        moves += 1;
        if moves % REFRESH_EVERY == 0 {
            ax = product(a, &x);
            value = quarter_form(&ax, &x);
        }
    }
    let ax = product(a, &x);
    let value = quarter_form(&ax, &x);
    Ok(Rebalanced {
        solution: CutSolution { signs: x, value },
        moves,
    })
}

/// Guaranteed fraction of the starting value `m0` after rebalancing a side
/// of `start` nodes to `target` nodes out of `n`.
///
/// Shrinking uses `(t² − t/n)/(s² − s/n)`; growing uses
/// `((1−t)² − 7(1−t)/n + 12/n²)/((1−s)² + (1−s)/n)`, with `s = start/n` and
/// `t = target/n`. The growing form is stated for `t ≤ 1/2`.
pub fn rebalance_lower_bound(n: usize, start: usize, target: usize, m0: f64) -> f64 {
    if target == start {
        return m0;
    }
    if target == 0 || target == n {
        return 0.0;
    }
    let nf = n as f64;
    let s = start as f64 / nf;
    let t = target as f64 / nf;
    if t < s {
        (t * t - t / nf) / (s * s - s / nf) * m0
    } else {
        let (u, v) = (1.0 - t, 1.0 - s);
        (u * u - 7.0 * u / nf + 12.0 / (nf * nf)) / (v * v + v / nf) * m0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxcut::cut_value;

    fn k4() -> DMatrix<f64> {
        DMatrix::from_fn(4, 4, |i, j| if i == j { 3.0 } else { -1.0 })
    }

    #[test]
    fn balanced_input_is_unchanged() {
        let a = k4();
        let cut = CutSolution::new(&a, vec![1, -1, 1, -1]);
        let out = greedy_rebalance(&a, &cut, 2).unwrap();
        assert_eq!(out.solution.signs, cut.signs);
        assert_eq!(out.moves, 0);
    }

    #[test]
    fn k4_single_move() {
        let a = k4();
        let cut = CutSolution::new(&a, vec![1, 1, 1, -1]);
        assert_eq!(cut.value, 3.0);
        let out = greedy_rebalance(&a, &cut, 2).unwrap();
        assert_eq!(out.solution.signs, vec![-1, 1, 1, -1]);
        assert_eq!(out.solution.value, 4.0);
        assert_eq!(out.moves, 1);
    }

    #[test]
    fn growing_and_shrinking() {
        let a = k4();
        let cut = CutSolution::new(&a, vec![-1, -1, -1, -1]);
        let out = greedy_rebalance(&a, &cut, 3).unwrap();
        assert_eq!(out.solution.size(), 3);
        assert_eq!(out.solution.signs, vec![1, 1, 1, -1]);
        assert!((out.solution.value - cut_value(&a, &[1.0, 1.0, 1.0, -1.0])).abs() < 1e-12);
    }

    #[test]
    fn detects_broken_precondition() {
        // indefinite, rows do not sum to zero
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 5.0, 5.0, 5.0, 0.0, 5.0, 5.0, 5.0, 0.0]);
        let cut = CutSolution::new(&a, vec![1, 1, 1]);
        assert!(matches!(
            greedy_rebalance(&a, &cut, 1),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn bound_formulas() {
        assert_eq!(rebalance_lower_bound(10, 4, 4, 2.5), 2.5);
        let shrink = rebalance_lower_bound(10, 6, 4, 1.0);
        assert!((shrink - (4.0 * 3.0) / (6.0 * 5.0)).abs() < 1e-12);
        let grow = rebalance_lower_bound(10, 2, 5, 1.0);
        let u: f64 = 0.5;
        let v: f64 = 0.8;
        let expected = (u * u - 0.7 * u + 0.12) / (v * v + 0.1 * v);
        assert!((grow - expected).abs() < 1e-12);
    }
}
