use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use fj_discord::adversary::{
    attack, select_limited, Algorithm, AttackSpec, Information, DEFAULT_SIMULATIONS,
};
use fj_discord::checks::run_checks;
use fj_discord::discord::{discord_matrix, discord_operator, index_value, normalize, DiscordKind};
use fj_discord::experiment::{
    build_record, k_from_fraction, opinion_seed, read_records, regression_analysis, run_experiment,
    stability_run, write_csv, write_records, AlgorithmChoice, ExperimentConfig, RunMetadata,
};
use fj_discord::graph::{
    bfs_subsample, generate_sbm, load_communities, load_edge_list, CommunityLabels, Graph,
};
use fj_discord::linalg::load_dense_matrix;
use fj_discord::maxcut::{solve_alpha_balanced_maxcut, SolverConfig};
use fj_discord::opinion::{load_opinions, rescale_opinions, sample_opinions, OpinionVector};
use fj_discord::Error;

#[derive(Parser)]
#[command(
    name = "fj-discord",
    version,
    about = "Discord maximization in the Friedkin-Johnsen model"
)]
struct Cli {
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Fill runtime columns (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Disagreement and polarization indices of an opinion vector.
    Indices(IndicesArgs),
    /// Choose k nodes to radicalize and report the effect.
    Attack(AttackArgs),
    /// Balanced max-cut on a discord matrix or a dense matrix file.
    Maxcut(MaxcutArgs),
    /// Stochastic block model edge list.
    GenerateSbm(SbmArgs),
    /// Induced subgraph on nodes reached by breadth-first search.
    SampleBfs(BfsArgs),
    /// Run the oracle suite and print a JSON report.
    Check,
    /// Regress limited/full score ratios on dataset parameters.
    Regress(RegressArgs),
    /// Run an experiment config (datasets x algorithms x budgets x repeats).
    Sweep(SweepArgs),
    /// Mean and standard deviation over repeated algorithm seeds.
    Stability(StabilityArgs),
}

#[derive(Args)]
struct OpinionArgs {
    /// `node value` lines.
    #[arg(long)]
    opinions: Option<PathBuf>,
    /// Lower end of the opinion file's range, mapped to 0.
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    /// Upper end of the opinion file's range, mapped to 1.
    #[arg(long, default_value_t = 1.0)]
    hi: f64,
    /// `node community` lines.
    #[arg(long)]
    communities: Option<PathBuf>,
    /// Per-community `mean:std` pairs, comma separated, e.g. `0.1:0.1,0.3:0.1`.
    #[arg(long)]
    gaussians: Option<String>,
}

#[derive(Args)]
struct IndicesArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    opinions: OpinionArgs,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    opinions: OpinionArgs,
    #[arg(long, default_value = "disagreement")]
    kind: DiscordKind,
    #[arg(long)]
    algorithm: Algorithm,
    #[arg(long, default_value = "limited")]
    info: Information,
    #[arg(long, conflicts_with = "k_fraction")]
    k: Option<usize>,
    #[arg(long)]
    k_fraction: Option<f64>,
    /// Cascade simulations for the influence baseline.
    #[arg(long, default_value_t = DEFAULT_SIMULATIONS)]
    simulations: usize,
    /// Rounding trials for the max-cut attack.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Also write the chosen node labels here.
    #[arg(long)]
    chosen_out: Option<PathBuf>,
}

#[derive(Args)]
struct MaxcutArgs {
    #[arg(long, conflicts_with = "matrix")]
    graph: Option<PathBuf>,
    #[arg(long, default_value = "disagreement")]
    kind: DiscordKind,
    /// Square matrix, one row per line.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Multiplier applied to the matrix.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Write the `+1` side as node labels here.
    #[arg(long)]
    nodes_out: Option<PathBuf>,
}

#[derive(Args)]
struct SbmArgs {
    /// Community sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long)]
    p_intra: f64,
    #[arg(long)]
    p_inter: f64,
    #[arg(long)]
    communities_out: Option<PathBuf>,
}

#[derive(Args)]
struct BfsArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    target: usize,
    #[arg(long)]
    communities: Option<PathBuf>,
    #[arg(long, requires = "communities")]
    communities_out: Option<PathBuf>,
}

#[derive(Args)]
struct RegressArgs {
    /// Records CSV written by `sweep`.
    #[arg(long)]
    records: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Run metadata JSON; defaults to `<out>.meta.json` when writing to a file.
    #[arg(long)]
    metadata: Option<PathBuf>,
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn csv_bytes<T: serde::Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(buf)
}

fn parse_gaussians(text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(',')
        .map(|pair| {
            let (m, s) = pair
                .split_once(':')
                .with_context(|| format!("expected `mean:std`, found `{pair}`"))?;
            Ok((m.trim().parse()?, s.trim().parse()?))
        })
        .collect()
}

fn load_labels(path: &Option<PathBuf>, g: &Graph) -> Result<Option<CommunityLabels>> {
    Ok(path.as_ref().map(|p| load_communities(p, g)).transpose()?)
}

/// Opinions from a file or community Gaussians; `None` when neither is given.
fn opinions_for(args: &OpinionArgs, g: &Graph, seed: u64) -> Result<Option<OpinionVector>> {
    match (&args.opinions, &args.gaussians) {
        (Some(_), Some(_)) => bail!("give either --opinions or --gaussians, not both"),
        (Some(path), None) => {
            let s = load_opinions(path, g, args.lo, args.hi)?;
            if (args.lo, args.hi) == (0.0, 1.0) {
                Ok(Some(s))
            } else {
                Ok(Some(rescale_opinions(&s, (args.lo, args.hi), (0.0, 1.0))?))
            }
        }
        (None, Some(spec)) => {
            let labels =
                load_labels(&args.communities, g)?.context("--gaussians needs --communities")?;
            Ok(Some(sample_opinions(
                &labels,
                &parse_gaussians(spec)?,
                seed,
            )?))
        }
        (None, None) => Ok(None),
    }
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".into())
}

fn labels_text(g: &Graph, nodes: &[usize]) -> String {
    nodes.iter().map(|&u| format!("{}\n", g.label(u))).collect()
}

fn communities_text(g: &Graph, labels: &CommunityLabels) -> String {
    labels
        .as_slice()
        .iter()
        .enumerate()
        .map(|(u, c)| format!("{} {c}\n", g.label(u)))
        .collect()
}

fn indices(cli: &Cli, args: &IndicesArgs) -> Result<()> {
    let g = load_edge_list(&args.graph)?;
    let s = opinions_for(&args.opinions, &g, opinion_seed(cli.seed.unwrap_or(0), 0))?
        .context("indices need --opinions or --gaussians")?;
    let mut text = String::from("kind,index,normalized_index\n");
    for kind in [DiscordKind::Disagreement, DiscordKind::Polarization] {
        let value = index_value(&discord_operator(&g, kind), &s)?;
        let normalized = normalize(value, kind, &g)
            .map(|v| v.to_string())
            .unwrap_or_default();
        text.push_str(&format!("{kind},{value},{normalized}\n"));
    }
    emit(cli.out.as_deref(), text.as_bytes())
}

fn attack_cmd(cli: &Cli, args: &AttackArgs) -> Result<()> {
    let seed = cli.seed.unwrap_or(0);
    let g = load_edge_list(&args.graph)?;
    let n = g.node_count();
    let k = match (args.k, args.k_fraction) {
        (Some(k), None) => k,
        (None, Some(f)) if f > 0.0 && f <= 1.0 => k_from_fraction(f, n),
        (None, Some(f)) => bail!("--k-fraction {f} not in (0, 1]"),
        _ => bail!("give --k or --k-fraction"),
    };
    let spec = AttackSpec {
        simulations: args.simulations,
        solver: SolverConfig {
            trials: args.trials,
            ..SolverConfig::default()
        },
        ..AttackSpec::new(k, args.info, args.algorithm, seed)
    };
    let a = discord_operator(&g, args.kind);
    let s0 = opinions_for(&args.opinions, &g, opinion_seed(seed, 0))?;
    let (bytes, chosen) = match s0 {
        Some(s0) => {
            let result = attack(&g, &a, &s0, &spec)?;
            let choice = AlgorithmChoice {
                algorithm: args.algorithm,
                info: args.info,
            };
            let record = build_record(
                &dataset_name(&args.graph),
                &g,
                args.kind,
                &s0,
                choice,
                0,
                &spec,
                &result,
                cli.timing,
            )?;
            let mut buf = Vec::new();
            write_records(&mut buf, &[record])?;
            (buf, result.chosen)
        }
        None => {
            if args.info == Information::Full {
                bail!("full-information attacks need --opinions or --gaussians");
            }
            let chosen = select_limited(&g, &a, &spec)?;
            (
                format!("node\n{}", labels_text(&g, &chosen)).into_bytes(),
                chosen,
            )
        }
    };
    if let Some(path) = &args.chosen_out {
        fs::write(path, labels_text(&g, &chosen))?;
    }
    emit(cli.out.as_deref(), &bytes)
}

fn maxcut_cmd(cli: &Cli, args: &MaxcutArgs) -> Result<()> {
    let (matrix, graph) = match (&args.graph, &args.matrix) {
        (Some(path), None) => {
            let g = load_edge_list(path)?;
            (discord_matrix(&g, args.kind)?.matrix, Some(g))
        }
        (None, Some(path)) => (load_dense_matrix(path)?, None),
        _ => bail!("give --graph or --matrix"),
    };
    let matrix = matrix * args.scale;
    let config = SolverConfig {
        trials: args.trials,
        ..SolverConfig::new(args.alpha, cli.seed.unwrap_or(0))
    };
    let outcome = solve_alpha_balanced_maxcut(&matrix, &config)?;
    let side = outcome.solution.side();
    let nodes = match &graph {
        Some(g) => labels_text(g, &side),
        None => side.iter().map(|u| format!("{u}\n")).collect(),
    };
    match &args.nodes_out {
        Some(path) => fs::write(path, nodes)?,
        None => eprint!(
            "best trial {} value {}\nchosen:\n{nodes}",
            outcome.best_trial, outcome.solution.value
        ),
    }
    emit(cli.out.as_deref(), &csv_bytes(&outcome.trials)?)
}

fn generate_sbm_cmd(cli: &Cli, args: &SbmArgs) -> Result<()> {
    let (g, labels) = generate_sbm(
        &args.sizes,
        args.p_intra,
        args.p_inter,
        cli.seed.unwrap_or(0),
    )?;
    if let Some(path) = &args.communities_out {
        fs::write(path, communities_text(&g, &labels))?;
    }
    emit(cli.out.as_deref(), g.to_edge_list().as_bytes())
}

fn sample_bfs_cmd(cli: &Cli, args: &BfsArgs) -> Result<()> {
    let g = load_edge_list(&args.graph)?;
    let labels = load_labels(&args.communities, &g)?;
    let sample = bfs_subsample(&g, args.target, cli.seed.unwrap_or(0))?;
    if let (Some(labels), Some(path)) = (labels, &args.communities_out) {
        fs::write(
            path,
            communities_text(&sample.graph, &labels.restrict(&sample.nodes)?),
        )?;
    }
    emit(cli.out.as_deref(), sample.graph.to_edge_list().as_bytes())
}

fn load_config(cli: &Cli, path: &Path) -> Result<ExperimentConfig> {
    let mut config =
        ExperimentConfig::load(path).with_context(|| format!("reading {}", path.display()))?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.timing |= cli.timing;
    Ok(config)
}

fn sweep_cmd(cli: &Cli, args: &SweepArgs) -> Result<()> {
    let config = load_config(cli, &args.config)?;
    let records = run_experiment(&config)?;
    let out = cli.out.clone().or_else(|| config.output.clone());
    let mut buf = Vec::new();
    write_records(&mut buf, &records)?;
    let metadata = args.metadata.clone().or_else(|| {
        out.as_ref().map(|p| {
            let mut name = p.clone().into_os_string();
            name.push(".meta.json");
            PathBuf::from(name)
        })
    });
    if let Some(path) = metadata {
        let meta = serde_json::to_string_pretty(&RunMetadata::new(&config, records.len()))?;
        fs::write(path, meta + "\n")?;
    }
    emit(out.as_deref(), &buf)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Indices(args) => indices(cli, args)?,
        Command::Attack(args) => attack_cmd(cli, args)?,
        Command::Maxcut(args) => maxcut_cmd(cli, args)?,
        Command::GenerateSbm(args) => generate_sbm_cmd(cli, args)?,
        Command::SampleBfs(args) => sample_bfs_cmd(cli, args)?,
        Command::Check => {
            let report = run_checks(cli.seed.unwrap_or(0));
            let text = serde_json::to_string_pretty(&report)? + "\n";
            emit(cli.out.as_deref(), text.as_bytes())?;
            if !report.passed {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Regress(args) => {
            let records = read_records(fs::File::open(&args.records)?)?;
            emit(
                cli.out.as_deref(),
                &csv_bytes(&regression_analysis(&records)?)?,
            )?;
        }
        Command::Sweep(args) => sweep_cmd(cli, args)?,
        Command::Stability(args) => {
            let config = load_config(cli, &args.config)?;
            emit(
                cli.out.as_deref(),
                &csv_bytes(&stability_run(&config, args.repeats)?)?,
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            match e.downcast_ref::<Error>() {
                Some(Error::UndefinedScore) => {
                    eprintln!("error: {e} (the opinions are at consensus; relative increase is undefined)")
                }
                _ => eprintln!("error: {e:#}"),
            }
            ExitCode::FAILURE
        }
    }
}
