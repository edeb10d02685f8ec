use crate::discord::Kernel;
use crate::error::{Error, Result};
use crate::linalg::tie_key;

/// Nodes in the order they were committed, with `sᵀAs` after each commit.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyPath {
    pub order: Vec<usize>,
    pub values: Vec<f64>,
}

/// Change of `sᵀAs` when `s_u` moves from its current value to 1.
#[inline]
pub fn gain(diag: f64, as_u: f64, s_u: f64) -> f64 {
    let d = 1.0 - s_u;
    d * d * diag + 2.0 * d * as_u
}

fn check(n: usize, s0: &[f64], k: usize) -> Result<()> {
    if s0.len() != n {
        return Err(Error::Validation(format!(
            "opinion vector has length {}, operator has dimension {n}",
            s0.len()
        )));
    }
    if k > n {
        return Err(Error::Validation(format!("k = {k} exceeds {n} nodes")));
    }
    Ok(())
}

fn diag_scale(diag: &[f64]) -> f64 {
    diag.iter().fold(0.0, |m, d| m.max(d.abs()))
}

struct State {
    s: Vec<f64>,
    as_: Vec<f64>,
    value: f64,
}

impl State {
    fn new<K: Kernel + ?Sized>(a: &K, s0: &[f64]) -> Self {
        let as_ = a.apply(s0);
        let value = s0.iter().zip(&as_).map(|(x, y)| x * y).sum();
        Self {
            s: s0.to_vec(),
            as_,
            value,
        }
    }

    fn commit<K: Kernel + ?Sized>(&mut self, a: &K, diag: &[f64], u: usize) {
        let d = 1.0 - self.s[u];
        self.value += gain(diag[u], self.as_[u], self.s[u]);
        if d != 0.0 {
            let col = a.column(u);
            for (x, c) in self.as_.iter_mut().zip(col) {
                *x += d * c;
            }
        }
        self.s[u] = 1.0;
    }
}

/// `k` rounds; each commits the unchosen node with the largest gain, lowest
/// id on ties.
pub fn adaptive_greedy<K: Kernel + ?Sized>(a: &K, s0: &[f64], k: usize) -> Result<GreedyPath> {
    let n = a.dim();
    check(n, s0, k)?;
    let diag = a.diagonal();
    let scale = diag_scale(&diag);
    let mut state = State::new(a, s0);
    let mut chosen = vec![false; n];
    let mut path = GreedyPath {
        order: Vec::with_capacity(k),
        values: Vec::with_capacity(k),
    };
    for _ in 0..k {
        let mut best: Option<(usize, i64)> = None;
        for u in (0..n).filter(|&u| !chosen[u]) {
            let g = tie_key(gain(diag[u], state.as_[u], state.s[u]), scale);
            if best.is_none_or(|(_, b)| g > b) {
                best = Some((u, g));
            }
        }
        let (u, _) = best.expect("k <= n leaves a candidate");
        state.commit(a, &diag, u);
        chosen[u] = true;
        path.order.push(u);
        path.values.push(state.value);
    }
    Ok(path)
}

/// Scores every node once against `s0` and visits them in non-increasing
/// score order (lowest id on ties), committing a node only if it raises
/// the current objective. If fewer than `k` nodes qualify, the set is filled
/// with the best-scoring unchosen nodes.
pub fn nonadaptive_greedy<K: Kernel + ?Sized>(a: &K, s0: &[f64], k: usize) -> Result<GreedyPath> {
    let n = a.dim();
    check(n, s0, k)?;
    let diag = a.diagonal();
    let mut state = State::new(a, s0);
    let scale = diag_scale(&diag);
    let scores: Vec<i64> = (0..n)
        .map(|u| tie_key(gain(diag[u], state.as_[u], s0[u]), scale))
        .collect();
    let mut ranking: Vec<usize> = (0..n).collect();
    ranking.sort_by(|&u, &v| scores[v].cmp(&scores[u]).then(u.cmp(&v)));

    let mut chosen = vec![false; n];
    let mut path = GreedyPath {
        order: Vec::with_capacity(k),
        values: Vec::with_capacity(k),
    };
    for &u in &ranking {
        if path.order.len() == k {
            break;
        }
        if gain(diag[u], state.as_[u], state.s[u]) > 0.0 {
            state.commit(a, &diag, u);
            chosen[u] = true;
            path.order.push(u);
            path.values.push(state.value);
        }
    }
    for &u in &ranking {
        if path.order.len() == k {
            break;
        }
        if !chosen[u] {
            state.commit(a, &diag, u);
            chosen[u] = true;
            path.order.push(u);
            path.values.push(state.value);
        }
    }
    Ok(path)
}
