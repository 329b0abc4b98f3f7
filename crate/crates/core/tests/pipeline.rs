mod common;

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use sha2::{Digest, Sha256};

use impact_core::impact::entities::read_fit_table;
use impact_core::report::config::PipelineConfig;
use impact_core::report::pipeline::{read_manifest, run_pipeline, MANIFEST};
use impact_core::report::split::DatasetSplit;

fn run(cfg: &PipelineConfig, out: &Path) -> BTreeMap<String, String> {
    run_pipeline(cfg, out).unwrap();
    read_manifest(&out.join(MANIFEST)).unwrap()
}

#[test]
fn fixture_run_writes_every_listed_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig::load(&common::fixture_in(dir.path())).unwrap();
    let out = dir.path().join("out");
    let m = run(&cfg, &out);
    assert_eq!(m["status"], "ok");
    assert_eq!(m["stream.days"], "75");
    assert_eq!(m["output.metaorders.csv.rows"], "7500");
    // one sample lost per day to the last-tick rule
    assert_eq!(m["output.samples.csv.rows"], "7425");
    assert_eq!(m["stock.n"], "5");
    assert_eq!(m["trader.n"], "20");
    assert_eq!(m["config_hash"], cfg.hash().unwrap());

    let files: Vec<&str> = m
        .keys()
        .filter_map(|k| k.strip_prefix("output.")?.strip_suffix(".sha256"))
        .collect();
    assert!(files.len() > 20);
    for f in files {
        let bytes = std::fs::read(out.join(f)).unwrap();
        assert_eq!(
            hex::encode(Sha256::digest(&bytes)),
            m[&format!("output.{f}.sha256")],
            "{f}"
        );
    }
}

#[test]
fn summary_lines_match_the_fit_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig::load(&common::fixture_in(dir.path())).unwrap();
    let out = dir.path().join("out");
    let m = run(&cfg, &out);
    for level in ["stock", "trader"] {
        let rows = read_fit_table(&out.join(format!("fits/{level}.csv"))).unwrap();
        let mean = rows.iter().map(|r| r.delta).sum::<f64>() / rows.len() as f64;
        let reported: f64 = m[&format!("{level}.mean_delta")].parse().unwrap();
        assert!(
            (mean - reported).abs() < 1e-12,
            "{level}: {mean} vs {reported}"
        );
        let bias: f64 = m[&format!("corrected.{level}.bias")].parse().unwrap();
        let corrected: f64 = m[&format!("corrected.{level}.mean_delta")].parse().unwrap();
        assert!((corrected - (reported - bias)).abs() < 1e-12);
    }
}

#[test]
fn splitting_the_period_doubles_the_stocks() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = PipelineConfig::load(&common::fixture_in(dir.path())).unwrap();
    let d = |m, dd| NaiveDate::from_ymd_opt(2016, m, dd).unwrap();
    let stream = std::fs::read_to_string(dir.path().join("stream.csv")).unwrap();
    let days: std::collections::BTreeSet<&str> = stream.lines().skip(1).map(|l| &l[..10]).collect();
    assert_eq!(days.len(), 15);
    // 15 trading days from 2016-01-04; the first seven in one half
    cfg.splits = vec![
        DatasetSplit {
            label: "early".into(),
            start: d(1, 1),
            end: d(1, 12),
        },
        DatasetSplit {
            label: "late".into(),
            start: d(1, 13),
            end: d(12, 31),
        },
    ];
    cfg.estimator.liquid_threshold = 100;
    cfg.montecarlo.trials = 2;
    let out = dir.path().join("out");
    let m = run(&cfg, &out);
    assert_eq!(m["stocks.total"], "10");
    let rows = read_fit_table(&out.join("fits/stock.csv")).unwrap();
    assert!(rows
        .iter()
        .all(|r| r.entity.starts_with("early:") || r.entity.starts_with("late:")));
    let crossval = std::fs::read_to_string(out.join("crossval.csv")).unwrap();
    assert!(crossval.contains("early") && crossval.contains("late"));
}

#[test]
fn days_outside_every_split_are_counted() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = PipelineConfig::load(&common::fixture_in(dir.path())).unwrap();
    cfg.splits = vec![DatasetSplit {
        label: "none".into(),
        start: NaiveDate::from_ymd_opt(2000, 1, 1).unwrap(),
        end: NaiveDate::from_ymd_opt(2000, 12, 31).unwrap(),
    }];
    let err = run_pipeline(&cfg, &dir.path().join("out")).unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
    let m = read_manifest(&dir.path().join("out").join(MANIFEST)).unwrap();
    assert_eq!(m["status"], "FAILED");
    assert_eq!(m["input.out_of_split_days"], "75");
}
