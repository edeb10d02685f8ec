use std::fs;
use std::path::Path;

use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::graph::{data_lines, CommunityLabels, Graph};
use crate::seed;

/// Opinion values with the interval they are declared to live in.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionVector {
    values: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl OpinionVector {
    pub fn new(values: Vec<f64>, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Validation(format!(
                "empty opinion range [{lo}, {hi}]"
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(lo..=hi).contains(*v))
        {
            return Err(Error::Validation(format!(
                "opinion {v} at node {i} outside [{lo}, {hi}]"
            )));
        }
        Ok(Self { values, lo, hi })
    }

    /// Opinions in the default `[0, 1]` range.
    pub fn unit(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 0.0, 1.0)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
            lo: 0.0,
            hi: 1.0,
        }
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::unit(vec![c; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Population standard deviation.
    pub fn std_dev(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        let m = self.mean();
        (self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / self.values.len() as f64).sqrt()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.values.len() != n {
            return Err(Error::Validation(format!(
                "opinion vector has length {}, graph has {n} nodes",
                self.values.len()
            )));
        }
        Ok(())
    }
}

/// Reads `node_id value` lines for the nodes of `g`. Every node must be covered
/// and values must lie in `[lo, hi]`; out-of-range values are rejected rather
/// than clipped.
pub fn load_opinions(path: impl AsRef<Path>, g: &Graph, lo: f64, hi: f64) -> Result<OpinionVector> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let index = g.label_index();
    let mut values: Vec<Option<f64>> = vec![None; g.node_count()];
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    for (line, fields) in data_lines(&text) {
        if fields.len() != 2 {
            return Err(err(line, "expected `node value`".into()));
        }
        let node: u64 = fields[0]
            .parse()
            .map_err(|_| err(line, format!("bad node id `{}`", fields[0])))?;
        let value: f64 = fields[1]
            .parse()
            .map_err(|_| err(line, format!("bad opinion `{}`", fields[1])))?;
        if !(lo..=hi).contains(&value) {
            return Err(Error::Validation(format!(
                "{}:{line}: opinion {value} outside [{lo}, {hi}]",
                path.display()
            )));
        }
        let &u = index
            .get(&node)
            .ok_or_else(|| err(line, format!("node {node} not in graph")))?;
        values[u] = Some(value);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(u, v)| {
            v.ok_or_else(|| Error::Validation(format!("node {} has no opinion", g.label(u))))
        })
        .collect::<Result<Vec<_>>>()?;
    OpinionVector::new(values, lo, hi)
}

pub fn write_opinions(g: &Graph, s: &OpinionVector) -> String {
    let mut out = String::new();
    for (u, v) in s.values().iter().enumerate() {
        out.push_str(&format!("{} {}\n", g.label(u), v));
    }
    out
}

/// Affine map of `[from.0, from.1]` onto `[to.0, to.1]`, applied entrywise.
/// Both discord indices scale by `((y − x)/(b − a))²` under this map.
pub fn rescale_opinions(
    s: &OpinionVector,
    from: (f64, f64),
    to: (f64, f64),
) -> Result<OpinionVector> {
    let (a, b) = from;
    let (x, y) = to;
    if !(a < b) || !(x < y) {
        return Err(Error::Validation(format!(
            "degenerate interval in rescale [{a}, {b}] -> [{x}, {y}]"
        )));
    }
    if let Some(v) = s.values().iter().find(|v| !(a..=b).contains(*v)) {
        return Err(Error::Validation(format!("opinion {v} outside [{a}, {b}]")));
    }
    let scale = (y - x) / (b - a);
    let shift = 0.5 * (x + y - (a + b) / (b - a) * (y - x));
    let values = s
        .values()
        .iter()
        .map(|&v| {
            if v == a {
                x
            } else if v == b {
                y
            } else {
                (scale * v + shift).clamp(x, y)
            }
        })
        .collect();
    OpinionVector::new(values, x, y)
}

/// Per-community Gaussian opinions clipped to `[0, 1]`. Nodes are drawn in id
/// order from one seeded stream.
pub fn sample_opinions(
    labels: &CommunityLabels,
    params: &[(f64, f64)],
    seed: u64,
) -> Result<OpinionVector> {
    if params.len() < labels.community_count() {
        return Err(Error::Validation(format!(
            "{} communities but only {} (mean, std) pairs",
            labels.community_count(),
            params.len()
        )));
    }
    let dists = params
        .iter()
        .map(|&(mean, std)| {
            Normal::new(mean, std)
                .map_err(|e| Error::Validation(format!("bad Gaussian N({mean}, {std}): {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rng = seed::rng(seed);
    let values = labels
        .as_slice()
        .iter()
        .map(|&c| dists[c].sample(&mut rng).clamp(0.0, 1.0))
        .collect();
    OpinionVector::unit(values)
}

/// `s ↦ 1 − s`. Requires the `[0, 1]` range.
pub fn flip_opinions(s: &OpinionVector) -> Result<OpinionVector> {
    if s.range() != (0.0, 1.0) {
        return Err(Error::Validation("flip requires opinions in [0, 1]".into()));
    }
    OpinionVector::unit(s.values().iter().map(|v| 1.0 - v).collect())
}
