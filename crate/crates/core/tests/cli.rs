mod common;

use std::path::Path;
use std::process::{Command, Output};

fn impact(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_impact"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = impact(dir, args);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn stagewise_commands_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg_path = dir.join("config.toml");
    std::fs::copy(common::fixture_config(), &cfg_path).unwrap();
    fn with<'a>(rest: &[&'a str]) -> Vec<&'a str> {
        [&["--config", "config.toml"][..], rest].concat()
    }

    let out = ok(
        dir,
        &with(&["--out", ".", "simulate", "--schedule", "synth", "--render"]),
    );
    assert!(out.contains("5 stocks, 75 days"), "{out}");

    let out = ok(dir, &with(&["--out", "m", "metaorders"]));
    assert!(out.starts_with("7500 metaorders, 7425 samples"), "{out}");

    ok(dir, &with(&["--out", "fs", "impact", "fit", "--in", "m"]));
    ok(
        dir,
        &with(&[
            "--out", "ft", "impact", "fit", "--level", "trader", "--in", "m",
        ]),
    );
    for f in ["fits.csv", "binned.csv", "scaling.csv", "estimator.txt"] {
        assert!(dir.join("fs").join(f).exists(), "{f}");
    }

    ok(
        dir,
        &with(&["--out", "t", "tails", "--in", "m/metaorders.csv"]),
    );
    let out = ok(
        dir,
        &with(&[
            "--out",
            "p",
            "test-predictions",
            "--fits",
            "fs/fits.csv",
            "--tails",
            "t/tails.csv",
            "--permutations",
            "19",
        ]),
    );
    assert!(out.contains("r(delta, beta - 1)"), "{out}");

    ok(
        dir,
        &with(&[
            "--out",
            "s",
            "simulate",
            "--schedule",
            "real",
            "--trials",
            "2",
        ]),
    );
    assert!(dir.join("s/trial_0001_stock.csv").exists());
    ok(
        dir,
        &with(&["--out", "corr", "mc", "--trials", "s", "--fits", "fs"]),
    );
    assert!(dir.join("corr/corrected.csv").exists());

    // fits restricted to a window carry a different estimator fingerprint
    ok(
        dir,
        &with(&[
            "--out",
            "fw",
            "impact",
            "fit",
            "--horizon-window",
            "0,60",
            "--in",
            "m",
        ]),
    );
    let o = impact(
        dir,
        &with(&["--out", "corr2", "mc", "--trials", "s", "--fits", "fw"]),
    );
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("estimator mismatch"));

    ok(
        dir,
        &with(&["--out", "r", "report", "--fits", "ft/fits.csv"]),
    );
    for f in ["hist_delta.csv", "hist_c.csv", "crossval.csv"] {
        assert!(dir.join("r").join(f).exists(), "{f}");
    }
}

#[test]
fn seed_flag_changes_the_rendered_stream() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::copy(common::fixture_config(), dir.join("config.toml")).unwrap();
    let render = |out: &str, seed: &str| {
        ok(
            dir,
            &[
                "--config",
                "config.toml",
                "--seed",
                seed,
                "--out",
                out,
                "simulate",
                "--schedule",
                "synth",
                "--render",
            ],
        );
        std::fs::read(dir.join(out).join("stream.csv")).unwrap()
    };
    let a = render("a", "1");
    assert_eq!(a, render("b", "1"));
    assert_ne!(a, render("c", "2"));
}

#[test]
fn desks_from_a_small_event_log() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    // V1 and V2 share order o2, so they are one desk; V3 stands alone
    let events = "\
day,stock,virtual_server,order_id,action,side,price,volume,phys_time,best_bid,best_ask
2017-03-01,AAA,V1,o1,submit,buy,100,10,10.0,,
2017-03-01,AAA,V1,o2,submit,buy,100,10,20.0,,
2017-03-01,AAA,V2,o2,modify,buy,101,10,30.0,,
2017-03-01,AAA,V2,o3,execute,buy,101,10,40.0,100,102
2017-03-01,AAA,V3,o4,execute,sell,100,5,50.0,100,102
2017-03-01,AAA,V1,o5,execute,buy,102,5,60.0,101,103
";
    std::fs::write(dir.join("events.csv"), events).unwrap();
    ok(dir, &["--out", "d", "desks", "--events", "events.csv"]);
    let desks = std::fs::read_to_string(dir.join("d/desks.csv")).unwrap();
    let rows: Vec<&str> = desks.lines().skip(1).collect();
    assert_eq!(rows.len(), 3, "{desks}");
    let desk_of = |s: &str| {
        rows.iter()
            .find(|r| r.contains(&format!(",{s},")))
            .unwrap()
            .rsplit(',')
            .next()
            .unwrap()
    };
    assert_eq!(desk_of("V1"), desk_of("V2"));
    assert_ne!(desk_of("V1"), desk_of("V3"));

    ok(dir, &["--out", "i", "ingest", "--events", "events.csv"]);
    let stream = std::fs::read_to_string(dir.join("i/stream.csv")).unwrap();
    assert_eq!(stream.lines().count(), 4, "{stream}");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(code(&impact(dir, &["no-such-command"])), 1);
    assert_eq!(code(&impact(dir, &["ingest"])), 1);
    assert_eq!(code(&impact(dir, &["tails", "--in", "missing.csv"])), 2);
    std::fs::write(
        dir.join("bad.toml"),
        "[estimator]\nmin_bin_count = \"many\"\n",
    )
    .unwrap();
    assert_eq!(code(&impact(dir, &["--config", "bad.toml", "pipeline"])), 1);
    std::fs::write(dir.join("m.csv"), "wrong,header\n1,2\n").unwrap();
    assert_eq!(code(&impact(dir, &["tails", "--in", "m.csv"])), 2);
}
