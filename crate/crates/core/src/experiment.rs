//! Attack sweeps over datasets, opinion samples, algorithms and budgets,
//! with CSV records, regression of limited/full ratios and repeat statistics.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{
    attack, Algorithm, AttackResult, AttackSpec, Information, DEFAULT_SIMULATIONS,
};
use crate::discord::{discord_operator, normalize, DiscordKind};
use crate::error::{Error, Result};
use crate::graph::{
    bfs_subsample, generate_sbm, load_communities, load_edge_list, CommunityLabels, Graph,
};
use crate::maxcut::SolverConfig;
use crate::opinion::{load_opinions, rescale_opinions, sample_opinions, OpinionVector};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DatasetSpec {
    EdgeList {
        name: String,
        path: PathBuf,
        #[serde(default)]
        communities: Option<PathBuf>,
    },
    Sbm {
        name: String,
        sizes: Vec<usize>,
        p_intra: f64,
        p_inter: f64,
        seed: u64,
    },
}

/// A dataset spec plus an optional BFS subsample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    #[serde(flatten)]
    pub spec: DatasetSpec,
    #[serde(default)]
    pub bfs_sample: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub graph: Graph,
    pub communities: Option<CommunityLabels>,
}

pub fn load_dataset(entry: &DatasetEntry) -> Result<Dataset> {
    let (name, graph, communities) = match &entry.spec {
        DatasetSpec::EdgeList {
            name,
            path,
            communities,
        } => {
            let g = load_edge_list(path)?;
            let c = communities
                .as_ref()
                .map(|p| load_communities(p, &g))
                .transpose()?;
            (name.clone(), g, c)
        }
        DatasetSpec::Sbm {
            name,
            sizes,
            p_intra,
            p_inter,
            seed,
        } => {
            let (g, c) = generate_sbm(sizes, *p_intra, *p_inter, *seed)?;
            (name.clone(), g, Some(c))
        }
    };
    match entry.bfs_sample {
        None => Ok(Dataset {
            name,
            graph,
            communities,
        }),
        Some(target) => {
            let sample = bfs_subsample(&graph, target, seed::derive_labeled(0, &name, 0))?;
            let communities = communities.map(|c| c.restrict(&sample.nodes)).transpose()?;
            Ok(Dataset {
                name,
                graph: sample.graph,
                communities,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OpinionSpec {
    /// `node value` lines in `[lo, hi]`, mapped affinely onto `[0, 1]`.
    File {
        path: PathBuf,
        #[serde(default)]
        lo: Option<f64>,
        #[serde(default)]
        hi: Option<f64>,
    },
    /// Clipped Gaussian per community, `(mean, std)` in community order.
    Communities {
        params: Vec<(f64, f64)>,
    },
    Zero,
}

pub fn make_opinions(spec: &OpinionSpec, data: &Dataset, seed: u64) -> Result<OpinionVector> {
    let n = data.graph.node_count();
    match spec {
        OpinionSpec::File { path, lo, hi } => {
            let (lo, hi) = (lo.unwrap_or(0.0), hi.unwrap_or(1.0));
            let s = load_opinions(path, &data.graph, lo, hi)?;
            if (lo, hi) == (0.0, 1.0) {
                Ok(s)
            } else {
                rescale_opinions(&s, (lo, hi), (0.0, 1.0))
            }
        }
        OpinionSpec::Communities { params } => {
            let labels = data.communities.as_ref().ok_or_else(|| {
                Error::Validation(format!("dataset `{}` has no community labels", data.name))
            })?;
            if labels.len() != n {
                return Err(Error::Validation(format!(
                    "{} community labels for {n} nodes",
                    labels.len()
                )));
            }
            sample_opinions(labels, params, seed)
        }
        OpinionSpec::Zero => Ok(OpinionVector::zeros(n)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AlgorithmChoice {
    pub algorithm: Algorithm,
    pub info: Information,
}

fn default_repeats() -> usize {
    1
}

fn default_simulations() -> usize {
    DEFAULT_SIMULATIONS
}

fn default_trials() -> usize {
    SolverConfig::default().trials
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetEntry>,
    pub opinions: OpinionSpec,
    pub kind: DiscordKind,
    pub algorithms: Vec<AlgorithmChoice>,
    #[serde(default)]
    pub k_counts: Vec<usize>,
    /// Budgets as fractions of `n`, rounded with `max(1, round(f·n))`.
    #[serde(default)]
    pub k_fractions: Vec<f64>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_simulations")]
    pub simulations: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Fill the runtime column. Off by default so output is reproducible.
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut text = String::new();
        std::fs::File::open(path)?.read_to_string(&mut text)?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::Validation("no datasets".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Validation("no algorithms".into()));
        }
        if self.k_counts.is_empty() && self.k_fractions.is_empty() {
            return Err(Error::Validation(
                "no budgets (k_counts or k_fractions)".into(),
            ));
        }
        if let Some(f) = self.k_fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
            return Err(Error::Validation(format!("k fraction {f} not in (0, 1]")));
        }
        if self.repeats < 1 {
            return Err(Error::Validation("repeats must be at least 1".into()));
        }
        for choice in &self.algorithms {
            if !choice.algorithm.supports(choice.info) {
                return Err(Error::Validation(format!(
                    "{} has no {} information variant",
                    choice.algorithm, choice.info
                )));
            }
        }
        Ok(())
    }

    /// Distinct budgets for `n` nodes, ascending.
    pub fn budgets(&self, n: usize) -> Vec<usize> {
        let mut ks: Vec<usize> = self
            .k_counts
            .iter()
            .copied()
            .chain(self.k_fractions.iter().map(|&f| k_from_fraction(f, n)))
            .collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    }
}

pub fn k_from_fraction(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64).round() as usize).max(1)
}

pub fn opinion_seed(master: u64, repeat: usize) -> u64 {
    seed::derive_labeled(master, "opinions", repeat as u64)
}

pub fn algorithm_seed(master: u64, repeat: usize) -> u64 {
    seed::derive_labeled(master, "algorithm", repeat as u64)
}

/// One attack outcome. Column order is the CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub dataset: String,
    pub nodes: usize,
    pub edges: usize,
    pub kind: DiscordKind,
    pub normalized_initial: f64,
    pub opinion_mean: f64,
    pub opinion_std: f64,
    pub algorithm: Algorithm,
    pub info: Information,
    pub k: usize,
    pub repeat: usize,
    pub seed: u64,
    pub initial_index: f64,
    pub final_index: f64,
    pub relative_increase: f64,
    pub runtime_ms: Option<f64>,
}

fn sort_records(records: &mut [ExperimentRecord]) {
    records.sort_by(|a, b| {
        (&a.dataset, a.algorithm, a.info, a.k, a.seed, a.repeat).cmp(&(
            &b.dataset,
            b.algorithm,
            b.info,
            b.k,
            b.seed,
            b.repeat,
        ))
    });
}

/// The record for one finished attack.
#[allow(clippy::too_many_arguments)]
pub fn build_record(
    dataset: &str,
    g: &Graph,
    kind: DiscordKind,
    s0: &OpinionVector,
    choice: AlgorithmChoice,
    repeat: usize,
    spec: &AttackSpec,
    result: &AttackResult,
    timing: bool,
) -> Result<ExperimentRecord> {
    Ok(ExperimentRecord {
        dataset: dataset.to_string(),
        nodes: g.node_count(),
        edges: g.edge_count(),
        kind,
        normalized_initial: normalize(result.before, kind, g)?,
        opinion_mean: s0.mean(),
        opinion_std: s0.std_dev(),
        algorithm: choice.algorithm,
        info: choice.info,
        k: spec.k,
        repeat,
        seed: spec.seed,
        initial_index: result.before,
        final_index: result.after,
        relative_increase: result.score,
        runtime_ms: timing.then_some(result.runtime.as_secs_f64() * 1e3),
    })
}

struct Cell<'d> {
    data: &'d Dataset,
    repeat: usize,
    choice: AlgorithmChoice,
    k: usize,
}

/// Runs every (dataset, repeat, algorithm, k) cell. Records come back in
/// canonical order regardless of scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let datasets = config
        .datasets
        .iter()
        .map(load_dataset)
        .collect::<Result<Vec<_>>>()?;
    let mut records = Vec::new();
    for data in &datasets {
        let g = &data.graph;
        let a = discord_operator(g, config.kind);
        let opinions = (0..config.repeats)
            .map(|r| make_opinions(&config.opinions, data, opinion_seed(config.seed, r)))
            .collect::<Result<Vec<_>>>()?;
        let mut cells = Vec::new();
        for repeat in 0..config.repeats {
            for &choice in &config.algorithms {
                for k in config.budgets(g.node_count()) {
                    cells.push(Cell {
                        data,
                        repeat,
                        choice,
                        k,
                    });
                }
            }
        }
        let chunk = cells
            .par_iter()
            .map(|cell| {
                let s0 = &opinions[cell.repeat];
                let seed = algorithm_seed(config.seed, cell.repeat);
                let spec = AttackSpec {
                    simulations: config.simulations,
                    solver: SolverConfig {
                        trials: config.trials,
                        ..SolverConfig::default()
                    },
                    ..AttackSpec::new(cell.k, cell.choice.info, cell.choice.algorithm, seed)
                };
                let result = attack(g, &a, s0, &spec)?;
                build_record(
                    &cell.data.name,
                    g,
                    config.kind,
                    s0,
                    cell.choice,
                    cell.repeat,
                    &spec,
                    &result,
                    config.timing,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        records.extend(chunk);
    }
    sort_records(&mut records);
    Ok(records)
}

pub fn write_records<W: Write>(out: W, records: &[ExperimentRecord]) -> Result<()> {
    write_csv(out, records)
}

/// Header row from the field names, then one row per item.
pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<ExperimentRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// Run metadata written next to the records.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata<'c> {
    pub config: &'c ExperimentConfig,
    pub version: &'static str,
    pub opinion_seeds: Vec<u64>,
    pub algorithm_seeds: Vec<u64>,
    pub records: usize,
}

impl<'c> RunMetadata<'c> {
    pub fn new(config: &'c ExperimentConfig, records: usize) -> Self {
        Self {
            config,
            version: env!("CARGO_PKG_VERSION"),
            opinion_seeds: (0..config.repeats)
                .map(|r| opinion_seed(config.seed, r))
                .collect(),
            algorithm_seeds: (0..config.repeats)
                .map(|r| algorithm_seed(config.seed, r))
                .collect(),
            records,
        }
    }
}

/// Least-squares line `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares. A constant response gives `R² = 0`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<Fit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Validation(format!(
            "regression needs at least 2 paired points (got {} and {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return Err(Error::Undefined("regressor has zero variance".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    let r_squared = if ss_tot <= 1e-300 {
        0.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(Fit {
        slope,
        intercept,
        r_squared,
        points: x.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Regression {
    pub parameter: String,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Per (dataset, k, seed) group, the ratio of the best limited-information
/// score to the best full-information score, regressed on the normalized
/// initial index, the opinion mean and the opinion standard deviation.
pub fn regression_analysis(records: &[ExperimentRecord]) -> Result<Vec<Regression>> {
    #[derive(Default)]
    struct Group {
        limited: Option<f64>,
        full: Option<f64>,
        x: [f64; 3],
    }
    let mut groups: BTreeMap<(String, usize, u64), Group> = BTreeMap::new();
    for r in records {
        let g = groups.entry((r.dataset.clone(), r.k, r.seed)).or_default();
        g.x = [r.normalized_initial, r.opinion_mean, r.opinion_std];
        let slot = match r.info {
            Information::Limited => &mut g.limited,
            Information::Full => &mut g.full,
        };
        *slot = Some(slot.map_or(r.relative_increase, |v: f64| v.max(r.relative_increase)));
    }
    let points: Vec<(&str, [f64; 3], f64)> = groups
        .iter()
        .filter_map(|((name, _, _), g)| match (g.limited, g.full) {
            (Some(l), Some(f)) if f != 0.0 => Some((name.as_str(), g.x, l / f)),
            _ => None,
        })
        .collect();
    let mut names: Vec<&str> = points.iter().map(|p| p.0).collect();
    names.dedup();
    if names.len() < 3 {
        return Err(Error::Validation(format!(
            "regression needs at least 3 datasets with both limited and full scores (got {})",
            names.len()
        )));
    }
    let kind = records
        .first()
        .map(|r| r.kind)
        .unwrap_or(DiscordKind::Disagreement);
    let initial_name = match kind {
        DiscordKind::Disagreement => "normalized_disagreement",
        DiscordKind::Polarization => "normalized_polarization",
    };
    let y: Vec<f64> = points.iter().map(|p| p.2).collect();
    [initial_name, "opinion_mean", "opinion_std"]
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let x: Vec<f64> = points.iter().map(|p| p.1[j]).collect();
            let fit = ols(&x, &y)?;
            Ok(Regression {
                parameter: name.to_string(),
                slope: fit.slope,
                intercept: fit.intercept,
                r_squared: fit.r_squared,
                points: fit.points,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityRow {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub info: Information,
    pub k: usize,
    pub repeats: usize,
    pub mean_final_index: f64,
    pub std_final_index: f64,
    pub mean_relative_increase: f64,
    pub std_relative_increase: f64,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Repeats each algorithm on one fixed opinion sample with different
/// algorithm seeds and reports mean and sample standard deviation.
pub fn stability_run(config: &ExperimentConfig, repeats: usize) -> Result<Vec<StabilityRow>> {
    if repeats < 2 {
        return Err(Error::Validation(
            "stability needs at least 2 repeats".into(),
        ));
    }
    config.validate()?;
    let mut rows = Vec::new();
    for entry in &config.datasets {
        let data = load_dataset(entry)?;
        let g = &data.graph;
        let a = discord_operator(g, config.kind);
        let s0 = make_opinions(&config.opinions, &data, opinion_seed(config.seed, 0))?;
        for &choice in &config.algorithms {
            for k in config.budgets(g.node_count()) {
                let results = (0..repeats)
                    .into_par_iter()
                    .map(|r| {
                        let spec = AttackSpec {
                            simulations: config.simulations,
                            solver: SolverConfig {
                                trials: config.trials,
                                ..SolverConfig::default()
                            },
                            ..AttackSpec::new(
                                k,
                                choice.info,
                                choice.algorithm,
                                algorithm_seed(config.seed, r),
                            )
                        };
                        attack(g, &a, &s0, &spec).map(|res| (res.after, res.score))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let fin: Vec<f64> = results.iter().map(|r| r.0).collect();
                let score: Vec<f64> = results.iter().map(|r| r.1).collect();
                let (mf, sf) = mean_std(&fin);
                let (ms, ss) = mean_std(&score);
                rows.push(StabilityRow {
                    dataset: data.name.clone(),
                    algorithm: choice.algorithm,
                    info: choice.info,
                    k,
                    repeats,
                    mean_final_index: mf,
                    std_final_index: sf,
                    mean_relative_increase: ms,
                    std_relative_increase: ss,
                });
            }
        }
    }
    Ok(rows)
}
