use std::fs;

use fj_discord::adversary::{Algorithm, Information};
use fj_discord::discord::DiscordKind;
use fj_discord::experiment::{
    read_records, regression_analysis, run_experiment, write_records, AlgorithmChoice,
    DatasetEntry, DatasetSpec, ExperimentConfig, ExperimentRecord, OpinionSpec, RunMetadata,
};
use fj_discord::Error;

fn sbm(name: &str, seed: u64) -> DatasetEntry {
    DatasetEntry {
        spec: DatasetSpec::Sbm {
            name: name.into(),
            sizes: vec![8, 8],
            p_intra: 0.5,
            p_inter: 0.05,
            seed,
        },
        bfs_sample: None,
    }
}

fn config() -> ExperimentConfig {
    ExperimentConfig {
        datasets: vec![sbm("b", 1), sbm("a", 2)],
        opinions: OpinionSpec::Communities {
            params: vec![(0.1, 0.1), (0.3, 0.1)],
        },
        kind: DiscordKind::Polarization,
        algorithms: vec![
            AlgorithmChoice {
                algorithm: Algorithm::Random,
                info: Information::Limited,
            },
            AlgorithmChoice {
                algorithm: Algorithm::AdaptiveGreedy,
                info: Information::Full,
            },
        ],
        k_counts: vec![2],
        k_fractions: vec![0.25],
        repeats: 2,
        seed: 99,
        output: None,
        simulations: 20,
        trials: 10,
        timing: false,
    }
}

fn csv(records: &[ExperimentRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_records(&mut buf, records).unwrap();
    buf
}

#[test]
fn reruns_give_identical_csv() {
    let first = csv(&run_experiment(&config()).unwrap());
    assert_eq!(first, csv(&run_experiment(&config()).unwrap()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    assert_eq!(
        first,
        pool.install(|| csv(&run_experiment(&config()).unwrap()))
    );
    let header = String::from_utf8(first)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert_eq!(
        header,
        "dataset,nodes,edges,kind,normalized_initial,opinion_mean,opinion_std,algorithm,info,k,\
         repeat,seed,initial_index,final_index,relative_increase,runtime_ms"
    );
}

#[test]
fn records_are_canonically_ordered_and_consistent() {
    let records = run_experiment(&config()).unwrap();
    // 2 datasets x 2 algorithms x 2 budgets x 2 repeats
    assert_eq!(records.len(), 16);
    assert_eq!(records[0].dataset, "a");
    for w in records.windows(2) {
        let key = |r: &ExperimentRecord| (r.dataset.clone(), r.algorithm, r.info, r.k, r.seed);
        assert!(key(&w[0]) <= key(&w[1]));
    }
    for r in &records {
        let recomputed = (r.final_index - r.initial_index) / r.initial_index;
        assert!((recomputed - r.relative_increase).abs() <= 1e-9 * (1.0 + recomputed.abs()));
    }
    let round_trip = read_records(csv(&records).as_slice()).unwrap();
    assert_eq!(round_trip, records);
}

#[test]
fn timing_fills_runtime_column() {
    let mut c = config();
    c.timing = true;
    assert!(run_experiment(&c)
        .unwrap()
        .iter()
        .all(|r| r.runtime_ms.is_some_and(|t| t >= 0.0)));
}

#[test]
fn opinion_file_length_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("g.edges");
    let opinions = dir.path().join("s.txt");
    fs::write(&edges, "0 1\n1 2\n").unwrap();
    fs::write(&opinions, "0 0.5\n1 0.2\n").unwrap();
    let mut c = config();
    c.datasets = vec![DatasetEntry {
        spec: DatasetSpec::EdgeList {
            name: "g".into(),
            path: edges,
            communities: None,
        },
        bfs_sample: None,
    }];
    c.opinions = OpinionSpec::File {
        path: opinions,
        lo: None,
        hi: None,
    };
    assert!(matches!(
        run_experiment(&c),
        Err(Error::Validation(_) | Error::Parse { .. })
    ));
}

#[test]
fn bfs_samples_shrink_datasets() {
    let mut c = config();
    c.datasets = vec![DatasetEntry {
        bfs_sample: Some(10),
        ..sbm("sampled", 4)
    }];
    let records = run_experiment(&c).unwrap();
    assert!(records.iter().all(|r| r.nodes == 10));
}

fn synthetic(dataset: &str, std: f64, limited: f64, full: f64) -> Vec<ExperimentRecord> {
    let base = ExperimentRecord {
        dataset: dataset.into(),
        nodes: 10,
        edges: 20,
        kind: DiscordKind::Disagreement,
        normalized_initial: 1.0 + std * 3.0,
        opinion_mean: 0.2 + std,
        opinion_std: std,
        algorithm: Algorithm::AdaptiveGreedy,
        info: Information::Limited,
        k: 1,
        repeat: 0,
        seed: 0,
        initial_index: 1.0,
        final_index: 1.0 + limited,
        relative_increase: limited,
        runtime_ms: None,
    };
    vec![
        base.clone(),
        ExperimentRecord {
            info: Information::Full,
            final_index: 1.0 + full,
            relative_increase: full,
            ..base
        },
    ]
}

#[test]
fn collinear_ratios_fit_exactly() {
    let records: Vec<_> = [(0.1, 0.5), (0.2, 0.6), (0.3, 0.7), (0.4, 0.8)]
        .iter()
        .enumerate()
        .flat_map(|(i, &(std, ratio))| synthetic(&format!("d{i}"), std, ratio * 2.0, 2.0))
        .collect();
    let fits = regression_analysis(&records).unwrap();
    assert_eq!(fits.len(), 3);
    for fit in &fits {
        assert!((fit.r_squared - 1.0).abs() < 1e-9, "{fit:?}");
        assert_eq!(fit.points, 4);
    }
    assert!((fits[2].slope - 1.0).abs() < 1e-9);
}

#[test]
fn constant_ratio_has_zero_r_squared() {
    let records: Vec<_> = (0..3)
        .flat_map(|i| synthetic(&format!("d{i}"), 0.1 * (i + 1) as f64, 1.0, 2.0))
        .collect();
    assert!(regression_analysis(&records)
        .unwrap()
        .iter()
        .all(|f| f.r_squared == 0.0));
}

#[test]
fn regression_preconditions() {
    let two: Vec<_> = (0..2)
        .flat_map(|i| synthetic(&format!("d{i}"), 0.1 * i as f64, 1.0, 2.0))
        .collect();
    assert!(matches!(
        regression_analysis(&two),
        Err(Error::Validation(_))
    ));
    let flat: Vec<_> = (0..3)
        .flat_map(|i| synthetic(&format!("d{i}"), 0.1, i as f64, 2.0))
        .collect();
    assert!(matches!(
        regression_analysis(&flat),
        Err(Error::Undefined(_))
    ));
}

#[test]
fn metadata_echoes_config_and_seeds() {
    let c = config();
    let text = serde_json::to_string(&RunMetadata::new(&c, 16)).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["records"], 16);
    assert_eq!(value["config"]["seed"], 99);
    assert_eq!(value["opinion_seeds"].as_array().unwrap().len(), 2);
}
