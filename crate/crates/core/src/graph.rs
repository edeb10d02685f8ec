//! Undirected weighted graphs: ingestion, synthetic generation, BFS sampling and
//! the Laplacian `L = D - W`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::seed;

/// An undirected graph with strictly positive edge weights.
///
/// Nodes are dense ids `0..n`; `labels[i]` keeps the external label node `i`
/// was loaded under so results can be reported in the caller's id space.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
    labels: Vec<u64>,
}

impl Graph {
    /// Builds a graph from `(u, v, w)` triples. Each unordered pair may appear
    /// several times; weights are summed.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        Self::with_labels((0..n as u64).collect(), edges)
    }

    pub fn with_labels(
        labels: Vec<u64>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::Validation(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                return Err(Error::Validation(format!("self-loop on node {u}")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::Validation(format!(
                    "edge ({u}, {v}) has non-positive weight {w}"
                )));
            }
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let edges: Vec<(usize, usize, f64)> =
            merged.into_iter().map(|((u, v), w)| (u, v, w)).collect();

        let mut degree = vec![0usize; n];
        for &(u, v, _) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0usize; offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        for &(u, v, w) in &edges {
            neighbors[cursor[u]] = v;
            weights[cursor[u]] = w;
            cursor[u] += 1;
            neighbors[cursor[v]] = u;
            weights[cursor[v]] = w;
            cursor[v] += 1;
        }
        // edges are visited in (u, v) order, so each neighbor list is already sorted

        Ok(Self {
            n,
            edges,
            offsets,
            neighbors,
            weights,
            labels,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, std::iter::empty()).expect("empty graph is valid")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[u]..self.offsets[u + 1];
        self.neighbors[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn weighted_degree(&self, u: usize) -> f64 {
        self.weights[self.offsets[u]..self.offsets[u + 1]]
            .iter()
            .sum()
    }

    pub fn max_weighted_degree(&self) -> f64 {
        (0..self.n)
            .map(|u| self.weighted_degree(u))
            .fold(0.0, f64::max)
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, u: usize) -> u64 {
        self.labels[u]
    }

    /// Dense id of an external label.
    pub fn index_of(&self, label: u64) -> Option<usize> {
        // labels are sorted for loaded graphs but not for BFS samples
        self.labels.iter().position(|&l| l == label)
    }

    pub fn label_index(&self) -> BTreeMap<u64, usize> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i))
            .collect()
    }

    /// `y = L x` without forming `L`.
    pub fn laplacian_apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for &(u, v, w) in &self.edges {
            let d = w * (x[u] - x[v]);
            y[u] += d;
            y[v] -= d;
        }
        y
    }

    /// `Σ_{(u,v)∈E} w (x_u − x_v)²`.
    pub fn edge_quadratic(&self, x: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|&(u, v, w)| w * (x[u] - x[v]).powi(2))
            .sum()
    }

    /// The same graph written as an edge list using external labels, with
    /// one single-label line per isolated node.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for u in (0..self.n).filter(|&u| self.degree(u) == 0) {
            let _ = writeln!(out, "{}", self.labels[u]);
        }
        for &(u, v, w) in &self.edges {
            let _ = writeln!(out, "{} {} {}", self.labels[u], self.labels[v], w);
        }
        out
    }
}

/// Dense Laplacian `L = D − W`.
#[derive(Debug, Clone)]
pub struct LaplacianView {
    pub matrix: DMatrix<f64>,
}

impl LaplacianView {
    pub fn degrees(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().copied().collect()
    }

    /// `W = D − L`.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let n = self.matrix.nrows();
        let mut w = -self.matrix.clone();
        for i in 0..n {
            w[(i, i)] = 0.0;
        }
        w
    }
}

pub fn laplacian(g: &Graph) -> LaplacianView {
    let n = g.node_count();
    let mut m = DMatrix::zeros(n, n);
    for &(u, v, w) in g.edges() {
        m[(u, v)] -= w;
        m[(v, u)] -= w;
        m[(u, u)] += w;
        m[(v, v)] += w;
    }
    LaplacianView { matrix: m }
}

/// Community index per node, contiguous from 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityLabels(Vec<usize>);

impl CommunityLabels {
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; k];
        for &l in &labels {
            seen[l] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Validation(
                "community labels must be contiguous from 0".into(),
            ));
        }
        Ok(Self(labels))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.0.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Restrict to the nodes of a BFS sample, relabelling communities densely.
    pub fn restrict(&self, nodes: &[usize]) -> Result<Self> {
        let mut remap = BTreeMap::new();
        for &u in nodes {
            let next = remap.len();
            remap.entry(self.0[u]).or_insert(next);
        }
        // keep the original community order
        let mut order: Vec<usize> = remap.keys().copied().collect();
        order.sort_unstable();
        let index: BTreeMap<usize, usize> =
            order.into_iter().enumerate().map(|(i, c)| (c, i)).collect();
        Self::new(nodes.iter().map(|&u| index[&self.0[u]]).collect())
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line.split_whitespace().collect()))
        }
    })
}

/// Loads a whitespace-separated edge list: `u v` or `u v w`, `#` comments.
/// A line holding a single label declares a node without edges.
///
/// Labels are arbitrary non-negative integers, remapped to dense ids in
/// ascending label order. Duplicate pairs have their weights summed.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_edge_list(&text, path)
}

pub fn parse_edge_list(text: &str, path: &Path) -> Result<Graph> {
    let mut raw = Vec::new();
    let mut lone = Vec::new();
    for (line, fields) in data_lines(text) {
        if fields.len() == 1 {
            let u: u64 = fields[0]
                .parse()
                .map_err(|_| parse_err(path, line, format!("bad node id `{}`", fields[0])))?;
            lone.push(u);
            continue;
        }
        if fields.len() > 3 {
            return Err(parse_err(
                path,
                line,
                format!("expected `u v [w]`, found {} fields", fields.len()),
            ));
        }
        let u: u64 = fields[0]
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad node id `{}`", fields[0])))?;
        let v: u64 = fields[1]
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad node id `{}`", fields[1])))?;
        let w: f64 = match fields.get(2) {
            Some(f) => f
                .parse()
                .map_err(|_| parse_err(path, line, format!("bad weight `{f}`")))?,
            None => 1.0,
        };
        if u == v {
            return Err(Error::Validation(format!(
                "{}:{line}: self-loop on node {u}",
                path.display()
            )));
        }
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::Validation(format!(
                "{}:{line}: weight must be positive, found {w}",
                path.display()
            )));
        }
        raw.push((u, v, w));
    }
    let mut labels: Vec<u64> = raw
        .iter()
        .flat_map(|&(u, v, _)| [u, v])
        .chain(lone)
        .collect();
    labels.sort_unstable();
    labels.dedup();
    let index: BTreeMap<u64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    Graph::with_labels(
        labels,
        raw.into_iter().map(|(u, v, w)| (index[&u], index[&v], w)),
    )
}

/// Loads `node community` pairs for an already loaded graph. Community ids in
/// the file may be arbitrary integers; they are relabelled in ascending order.
pub fn load_communities(path: impl AsRef<Path>, g: &Graph) -> Result<CommunityLabels> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let index = g.label_index();
    let mut raw: Vec<Option<i64>> = vec![None; g.node_count()];
    for (line, fields) in data_lines(&text) {
        if fields.len() != 2 {
            return Err(parse_err(path, line, "expected `node community`"));
        }
        let node: u64 = fields[0]
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad node id `{}`", fields[0])))?;
        let community: i64 = fields[1]
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad community `{}`", fields[1])))?;
        let &u = index
            .get(&node)
            .ok_or_else(|| parse_err(path, line, format!("node {node} not in graph")))?;
        raw[u] = Some(community);
    }
    let mut ids: Vec<i64> = raw.iter().flatten().copied().collect();
    ids.sort_unstable();
    ids.dedup();
    let dense: BTreeMap<i64, usize> = ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let labels = raw
        .iter()
        .enumerate()
        .map(|(u, c)| {
            c.map(|c| dense[&c]).ok_or_else(|| {
                Error::Validation(format!("node {} has no community label", g.label(u)))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CommunityLabels::new(labels)
}

/// Erdős–Rényi graph with edge probability `p` and weights uniform in
/// `(0, max_weight]`.
pub fn random_graph(n: usize, p: f64, max_weight: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Validation(format!("probability {p} not in [0, 1]")));
    }
    if !(max_weight > 0.0) || !max_weight.is_finite() {
        return Err(Error::Validation(format!(
            "maximum weight {max_weight} must be positive"
        )));
    }
    let mut rng = seed::rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let draw: f64 = rng.random();
            let w: f64 = rng.random();
            if draw < p {
                edges.push((u, v, (1.0 - w) * max_weight));
            }
        }
    }
    Graph::new(n, edges)
}

/// Stochastic block model with unit weights. Node ids are assigned block by
/// block; pairs are visited in lexicographic order so the edge set is a pure
/// function of the arguments.
pub fn generate_sbm(
    sizes: &[usize],
    p_intra: f64,
    p_inter: f64,
    seed: u64,
) -> Result<(Graph, CommunityLabels)> {
    if sizes.contains(&0) {
        return Err(Error::Validation("community sizes must be positive".into()));
    }
    for p in [p_intra, p_inter] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Validation(format!("probability {p} not in [0, 1]")));
        }
    }
    let labels: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
        .collect();
    let n = labels.len();
    let mut rng = seed::rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if labels[u] == labels[v] {
                p_intra
            } else {
                p_inter
            };
            // one draw per pair regardless of p keeps streams aligned across parameters
            let draw: f64 = rng.random();
            if draw < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    Ok((Graph::new(n, edges)?, CommunityLabels::new(labels)?))
}

/// Result of BFS sampling: the induced subgraph plus the original ids of its
/// nodes (ascending; `nodes[i]` is the original id of sample node `i`).
#[derive(Debug, Clone)]
pub struct Subsample {
    pub graph: Graph,
    pub nodes: Vec<usize>,
}

/// Induced subgraph on the first `target_n` nodes reached by BFS from a
/// uniformly random start node. When a component is exhausted early the search
/// restarts from a random unvisited node.
pub fn bfs_subsample(g: &Graph, target_n: usize, seed: u64) -> Result<Subsample> {
    if g.node_count() == 0 {
        return Err(Error::Validation("cannot subsample an empty graph".into()));
    }
    let mut rng = seed::rng(seed);
    let start = rng.random_range(0..g.node_count());
    bfs_subsample_inner(g, target_n, start, &mut rng)
}

/// As [`bfs_subsample`] with a fixed start node; `seed` only drives restarts.
pub fn bfs_subsample_from(
    g: &Graph,
    target_n: usize,
    start: usize,
    seed: u64,
) -> Result<Subsample> {
    if start >= g.node_count() {
        return Err(Error::Validation(format!(
            "start node {start} out of range"
        )));
    }
    let mut rng = seed::rng(seed);
    bfs_subsample_inner(g, target_n, start, &mut rng)
}

fn bfs_subsample_inner(
    g: &Graph,
    target_n: usize,
    start: usize,
    rng: &mut impl Rng,
) -> Result<Subsample> {
    let n = g.node_count();
    if target_n == 0 {
        return Err(Error::Validation("target_n must be positive".into()));
    }
    if target_n > n {
        return Err(Error::Validation(format!(
            "target_n {target_n} exceeds node count {n}"
        )));
    }
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(target_n);
    let mut queue = VecDeque::new();
    visited[start] = true;
    queue.push_back(start);
    while order.len() < target_n {
        let u = match queue.pop_front() {
            Some(u) => u,
            None => {
                let unvisited: Vec<usize> = (0..n).filter(|&u| !visited[u]).collect();
                let u = unvisited[rng.random_range(0..unvisited.len())];
                visited[u] = true;
                u
            }
        };
        order.push(u);
        for (v, _) in g.neighbors(u) {
            if !visited[v] {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    }
    order.sort_unstable();
    let mut position = vec![usize::MAX; n];
    for (i, &u) in order.iter().enumerate() {
        position[u] = i;
    }
    let edges = g
        .edges()
        .iter()
        .filter(|&&(u, v, w)| (position[u] != usize::MAX && position[v] != usize::MAX))
        .map(|&(u, v, w)| (position[u], position[v], w));
    let labels = order.iter().map(|&u| g.label(u)).collect();
    Ok(Subsample {
        graph: Graph::with_labels(labels, edges)?,
        nodes: order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Graph> {
        parse_edge_list(text, Path::new("test.txt"))
    }

    #[test]
    fn default_weight_is_one() {
        let g = parse("0 1\n1 2").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), &[(0, 1, 1.0), (1, 2, 1.0)]);
    }

    #[test]
    fn duplicate_edges_are_summed() {
        let g = parse("0 1 2.5\n0 1 0.5").unwrap();
        assert_eq!(g.edges(), &[(0, 1, 3.0)]);
        let g = parse("0 1 2.5\n1 0 0.5").unwrap();
        assert_eq!(g.edges(), &[(0, 1, 3.0)]);
    }

    #[test]
    fn self_loop_rejected() {
        assert!(matches!(parse("0 0 1.0"), Err(Error::Validation(_))));
    }

    #[test]
    fn bad_lines_report_line_number() {
        match parse("# header\n0 1\n0 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("0 1 -2"), Err(Error::Validation(_))));
        assert!(matches!(parse("0 1 0"), Err(Error::Validation(_))));
        assert!(matches!(parse("0 1 2 3"), Err(Error::Parse { .. })));
        assert!(matches!(parse("x"), Err(Error::Parse { .. })));
    }

    #[test]
    fn random_graph_weights_in_range() {
        let g = random_graph(30, 0.5, 2.0, 4).unwrap();
        assert!(g.edge_count() > 0);
        assert!(g.edges().iter().all(|&(_, _, w)| w > 0.0 && w <= 2.0));
        assert_eq!(random_graph(30, 0.5, 2.0, 4).unwrap().edges(), g.edges());
        assert_eq!(random_graph(5, 0.0, 1.0, 1).unwrap().edge_count(), 0);
        assert!(random_graph(5, 0.5, 0.0, 1).is_err());
    }

    #[test]
    fn isolated_nodes_round_trip() {
        let g = parse("4\n0 1\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.degree(2), 0);
        let again = parse(&g.to_edge_list()).unwrap();
        assert_eq!(again.labels(), g.labels());
        assert_eq!(again.edges(), g.edges());
    }

    #[test]
    fn sparse_labels_are_remapped() {
        let g = parse("10 500\n500 7 # trailing comment\n").unwrap();
        assert_eq!(g.labels(), &[7, 10, 500]);
        assert_eq!(g.edges(), &[(0, 2, 1.0), (1, 2, 1.0)]);
        assert_eq!(g.index_of(500), Some(2));
    }

    #[test]
    fn laplacian_examples() {
        let g = Graph::new(2, [(0, 1, 1.0)]).unwrap();
        let l = laplacian(&g).matrix;
        assert_eq!(l, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));

        let l = laplacian(&Graph::empty(3)).matrix;
        assert_eq!(l, DMatrix::zeros(3, 3));

        let g = Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let view = laplacian(&g);
        assert_eq!(view.degrees(), vec![1.0, 2.0, 1.0]);
        assert_eq!(view.matrix[(0, 1)], -1.0);
        assert_eq!(view.matrix[(1, 2)], -1.0);
        assert_eq!(view.matrix[(0, 2)], 0.0);
        assert_eq!(view.adjacency()[(0, 1)], 1.0);
    }

    #[test]
    fn laplacian_apply_matches_dense() {
        let (g, _) = generate_sbm(&[6, 6], 0.6, 0.2, 3).unwrap();
        let x: Vec<f64> = (0..12).map(|i| (i as f64 * 0.37).sin()).collect();
        let dense = laplacian(&g).matrix * nalgebra::DVector::from_vec(x.clone());
        let sparse = g.laplacian_apply(&x);
        for i in 0..12 {
            assert!((dense[i] - sparse[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn sbm_complete_and_empty() {
        let (g, labels) = generate_sbm(&[4], 1.0, 0.0, 1).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert_eq!(labels.as_slice(), &[0, 0, 0, 0]);

        let (g, labels) = generate_sbm(&[2, 2], 0.0, 0.0, 1).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(labels.community_count(), 2);
    }

    #[test]
    fn sbm_edge_count_within_three_sigma() {
        let (g, _) = generate_sbm(&[250, 250, 250, 250], 0.4, 0.1, 2024).unwrap();
        let intra_pairs = 4.0 * (250.0 * 249.0 / 2.0);
        let inter_pairs = 1000.0 * 999.0 / 2.0 - intra_pairs;
        let mean = intra_pairs * 0.4 + inter_pairs * 0.1;
        let var = intra_pairs * 0.4 * 0.6 + inter_pairs * 0.1 * 0.9;
        let got = g.edge_count() as f64;
        assert!((got - mean).abs() <= 3.0 * var.sqrt(), "{got} vs {mean}");
    }

    #[test]
    fn sbm_is_deterministic() {
        let a = generate_sbm(&[10, 15], 0.3, 0.05, 9).unwrap();
        let b = generate_sbm(&[10, 15], 0.3, 0.05, 9).unwrap();
        assert_eq!(a, b);
        let c = generate_sbm(&[10, 15], 0.3, 0.05, 10).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn sbm_rejects_bad_parameters() {
        assert!(generate_sbm(&[0, 3], 0.5, 0.5, 1).is_err());
        assert!(generate_sbm(&[3], 1.5, 0.5, 1).is_err());
    }

    #[test]
    fn bfs_on_path_from_start() {
        let g = Graph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let s = bfs_subsample_from(&g, 2, 0, 0).unwrap();
        assert_eq!(s.nodes, vec![0, 1]);
        assert_eq!(s.graph.edges(), &[(0, 1, 1.0)]);
    }

    #[test]
    fn bfs_identity_and_singleton() {
        let (g, _) = generate_sbm(&[8, 8], 0.5, 0.2, 5).unwrap();
        let s = bfs_subsample(&g, 16, 1).unwrap();
        assert_eq!(s.nodes, (0..16).collect::<Vec<_>>());
        assert_eq!(s.graph.edges(), g.edges());

        let s = bfs_subsample(&g, 1, 1).unwrap();
        assert_eq!(s.graph.node_count(), 1);
        assert_eq!(s.graph.edge_count(), 0);

        assert!(bfs_subsample(&g, 0, 1).is_err());
        assert!(bfs_subsample(&g, 17, 1).is_err());
    }

    #[test]
    fn bfs_restarts_on_exhausted_component() {
        // two disjoint edges; any start exhausts its component after 2 nodes
        let g = Graph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let s = bfs_subsample_from(&g, 3, 0, 4).unwrap();
        assert_eq!(s.graph.node_count(), 3);
        assert!(s.nodes.contains(&0) && s.nodes.contains(&1));
    }

    #[test]
    fn community_labels_validation() {
        assert!(CommunityLabels::new(vec![0, 2]).is_err());
        let c = CommunityLabels::new(vec![1, 0, 1, 2]).unwrap();
        assert_eq!(c.restrict(&[0, 3]).unwrap().as_slice(), &[0, 1]);
    }
}
