//! `impact` command line. Each subcommand runs one stage and writes CSV
//! under `--out`; `pipeline` runs them all.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use impact_core::impact::entities::{
    fit_all_stocks, fit_all_traders, read_fit_table, write_binned, write_fit_table, EntityFits,
    Level,
};
use impact_core::impact::samples::{read_samples, HorizonWindow};
use impact_core::impact::scaling::{aggregate_scaling, write_scaling};
use impact_core::metaorder::{read_metaorders, write_daily_stats, write_metaorders, StockCatalog};
use impact_core::nullmodel::montecarlo::{
    read_key_values, read_trial_deltas, render_summary, summarize_level, write_trials,
    MonteCarloSummary,
};
use impact_core::nullmodel::simulate::render_streams;
use impact_core::nullmodel::{
    bias_correct, run_monte_carlo, schedules_from_streams, synth_schedules, DeltaMean,
};
use impact_core::orderflow::stream::write_stream;
use impact_core::powerlaw::predictions::{
    fit_tails, join_rows, permutation_pvalue, read_tail_fits, test_predictions, write_scatter,
    write_tails,
};
use impact_core::report::config::PipelineConfig;
use impact_core::report::histogram::{histogram, write_histogram};
use impact_core::report::pipeline::{
    load_input, measure, run_pipeline, stock_prefactors, write_desks, write_dropped,
};
use impact_core::report::split::{all_split, crossvalidate};
use impact_core::{Error, Result};

#[derive(Parser)]
#[command(name = "impact", version, about = "Metaorder price-impact measurement")]
struct Cli {
    /// TOML config; defaults apply to anything it leaves out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `montecarlo.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Order events to market-order streams, desks and dropped days.
    Ingest(InputArgs),
    /// Desk reconstruction only.
    Desks(InputArgs),
    /// Daily stats, metaorders and impact samples from a stream.
    Metaorders(InputArgs),
    /// Entity-level power-law fits.
    Impact {
        #[command(subcommand)]
        cmd: ImpactCmd,
    },
    /// Tail exponents of metaorder sizes and lengths.
    Tails {
        /// metaorders.csv
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Correlate stock exponents with the tail predictions.
    TestPredictions {
        /// Stock-level fit table.
        #[arg(long)]
        fits: PathBuf,
        #[arg(long)]
        tails: PathBuf,
        /// Shuffles for a permutation p-value; 0 skips it.
        #[arg(long, default_value_t = 0)]
        permutations: usize,
    },
    /// Null-model Monte Carlo.
    Simulate(SimulateArgs),
    /// Recompute a Monte Carlo summary from trial tables and bias-correct.
    Mc {
        /// Directory written by `simulate`.
        #[arg(long)]
        trials: PathBuf,
        /// Directory written by `impact fit`.
        #[arg(long)]
        fits: PathBuf,
    },
    /// Histograms and per-split summaries of a fit table.
    Report {
        #[arg(long)]
        fits: PathBuf,
    },
    /// Everything, end to end.
    Pipeline(InputArgs),
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    events: Option<PathBuf>,
    #[arg(long)]
    stream: Option<PathBuf>,
    /// csv or ndjson
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    flags: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ImpactCmd {
    Fit {
        #[arg(long, default_value = "stock")]
        level: String,
        #[arg(long)]
        min_horizon_sec: Option<f64>,
        /// `LO,HI` in minutes.
        #[arg(long)]
        horizon_window: Option<String>,
        /// Directory written by `metaorders`.
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleKind {
    Real,
    Synth,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    schedule: ScheduleKind,
    /// Stream for `--schedule real`.
    #[arg(long)]
    stream: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    noise_scale: Option<f64>,
    /// Write the schedules once as stream.csv instead of running trials.
    #[arg(long)]
    render: bool,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.montecarlo.seed = s;
        cfg.synth.seed = s;
    }
    Ok(cfg)
}

fn apply_input(cfg: &mut PipelineConfig, a: &InputArgs) {
    if a.events.is_some() || a.stream.is_some() {
        cfg.input.events = a.events.clone();
        cfg.input.stream = a.stream.clone();
    }
    if a.format.is_some() {
        cfg.input.format = a.format.clone();
    }
    if a.flags.is_some() {
        cfg.input.flags = a.flags.clone();
    }
}

fn out_file(dir: &Path, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir.join(name))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn print_summary(label: &str, fits: &EntityFits) {
    match fits.summary() {
        Some(s) => println!(
            "{label}: n = {}, mean delta = {:.4} +/- {:.4}, std = {:.4}",
            s.n, s.mean, s.sem, s.std
        ),
        None => println!("{label}: no fits"),
    }
}

fn ingest(cfg: &PipelineConfig, out: &Path, desks_only: bool) -> Result<()> {
    if cfg.input.events.is_none() {
        return Err(Error::Config(
            "missing input path: set `input.events` or pass --events".into(),
        ));
    }
    let loaded = load_input(cfg)?;
    write_desks(&out_file(out, "desks.csv")?, &loaded.desks)?;
    let n_desks: usize = loaded.desks.values().map(|m| m.desks().len()).sum();
    println!("{n_desks} desks over {} stocks", loaded.desks.len());
    if desks_only {
        return Ok(());
    }
    write_stream(&out_file(out, "stream.csv")?, &loaded.days)?;
    write_dropped(&out_file(out, "dropped_days.csv")?, &loaded.dropped)?;
    for (k, v) in &loaded.counters {
        println!("{k} = {v}");
    }
    println!("dropped_days = {}", loaded.dropped.len());
    Ok(())
}

fn metaorders(cfg: &PipelineConfig, out: &Path) -> Result<()> {
    let loaded = load_input(cfg)?;
    let m = measure(&loaded.days, cfg.estimator().liquid_threshold);
    write_daily_stats(
        &out_file(out, "daily_stats.csv")?,
        m.stats.iter().map(|((s, _), st)| (s.as_str(), st)),
    )?;
    write_metaorders(&out_file(out, "metaorders.csv")?, &m.metaorders)?;
    impact_core::impact::samples::write_samples(&out_file(out, "samples.csv")?, &m.samples)?;
    println!(
        "{} metaorders, {} samples ({} dropped at the last tick), {} days excluded",
        m.metaorders.len(),
        m.samples.len(),
        m.dropped_last_tick,
        m.excluded.len() + loaded.dropped.len()
    );
    Ok(())
}

fn catalog_from(dir: &Path, liquid_threshold: usize) -> Result<StockCatalog> {
    let rows = read_metaorders(&dir.join("metaorders.csv"))?;
    let mut cat = StockCatalog {
        liquid_threshold,
        ..Default::default()
    };
    for r in rows {
        *cat.per_stock.entry(r.stock.clone()).or_default() += 1;
        *cat.per_trader.entry((r.stock, r.trader)).or_default() += 1;
    }
    Ok(cat)
}

fn impact_fit(
    cfg: &PipelineConfig,
    out: &Path,
    level: &str,
    min_t: Option<f64>,
    window: Option<&str>,
    input: &Path,
) -> Result<()> {
    let level: Level = level.parse()?;
    let mut est = cfg.estimator();
    if let Some(t) = min_t {
        est.min_horizon_sec = t;
    }
    est.window = window.map(str::parse::<HorizonWindow>).transpose()?;
    let samples = read_samples(&input.join("samples.csv"))?;
    let catalog = catalog_from(input, est.liquid_threshold)?;
    let fits = match level {
        Level::Stock => fit_all_stocks(&samples, &catalog, &est),
        Level::Trader => fit_all_traders(&samples, &catalog, &est),
    };
    write_fit_table(&out_file(out, "fits.csv")?, &fits)?;
    write_binned(&out_file(out, "binned.csv")?, &fits)?;
    let curve = aggregate_scaling(
        est.binning,
        fits.fits.keys().map(|k| (k.as_str(), &fits.binned[k])),
        est.min_bin_count,
    );
    write_scaling(&out_file(out, "scaling.csv")?, &curve)?;
    write_text(
        &out_file(out, "estimator.txt")?,
        &format!("estimator = {}\n", est.fingerprint()),
    )?;
    print_summary(&format!("{level:?}").to_lowercase(), &fits);
    if fits.fits.is_empty() {
        return Err(Error::Data("no entity passed the filters".into()));
    }
    Ok(())
}

fn predictions(
    cfg: &PipelineConfig,
    out: &Path,
    fits: &Path,
    tails: &Path,
    permutations: usize,
) -> Result<()> {
    let rows = read_fit_table(fits)?;
    let tails = read_tail_fits(tails)?;
    let t = test_predictions(join_rows(
        rows.iter().map(|r| (r.entity.as_str(), r.delta)),
        &tails,
    ))?;
    write_scatter(&out_file(out, "predictions.csv")?, &t)?;
    let fmt = |r: Option<f64>| {
        r.map(|v| format!("{v:.4}"))
            .unwrap_or_else(|| "undefined".into())
    };
    println!(
        "n = {}, r(delta, beta - 1) = {}, r(delta, alpha - 1) = {}",
        t.rows.len(),
        fmt(t.r_beta),
        fmt(t.r_alpha)
    );
    if permutations > 0 {
        let delta: Vec<f64> = t.rows.iter().map(|r| r.delta).collect();
        for (name, col) in [
            (
                "beta",
                t.rows.iter().map(|r| r.beta - 1.0).collect::<Vec<_>>(),
            ),
            ("alpha", t.rows.iter().map(|r| r.alpha - 1.0).collect()),
        ] {
            let mut rng = impact_core::nullmodel::rng::stream_rng(
                cfg.montecarlo.seed,
                name,
                0,
                impact_core::nullmodel::rng::purpose::SHUFFLE,
            );
            println!(
                "p_{name} = {}",
                fmt(permutation_pvalue(&delta, &col, permutations, &mut rng))
            );
        }
    }
    Ok(())
}

fn simulate(cfg: &PipelineConfig, out: &Path, a: &SimulateArgs) -> Result<()> {
    let est = cfg.estimator();
    let mut sim = cfg.sim();
    if let Some(n) = a.trials {
        sim.n_trials = n;
    }
    if let Some(x) = a.noise_scale {
        sim.noise_scale = x;
    }
    let schedules = match a.schedule {
        ScheduleKind::Synth => synth_schedules(&cfg.synth, est.binning)?,
        ScheduleKind::Real => {
            let mut cfg = cfg.clone();
            if let Some(s) = &a.stream {
                cfg.input.events = None;
                cfg.input.stream = Some(s.clone());
            }
            let loaded = load_input(&cfg)?;
            let m = measure(&loaded.days, est.liquid_threshold);
            let fits = fit_all_stocks(&m.samples, &m.catalog, &est);
            let prefactors = stock_prefactors(&fits, est.min_bin_count);
            schedules_from_streams(&loaded.days, &m.stats, &prefactors)
        }
    };
    if a.render {
        let days = render_streams(&schedules, sim.seed, sim.noise_scale);
        write_stream(&out_file(out, "stream.csv")?, &days)?;
        println!("{} stocks, {} days rendered", schedules.len(), days.len());
        return Ok(());
    }
    let (trials, summary) = run_monte_carlo(&schedules, &sim, &est)?;
    write_trials(out, &trials)?;
    let text = render_summary(&summary);
    write_text(&out_file(out, "summary.txt")?, &text)?;
    print!("{text}");
    Ok(())
}

fn parse_num<T: std::str::FromStr>(kv: &BTreeMap<String, String>, key: &str) -> Result<T> {
    kv.get(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Data(format!("summary.txt: missing or bad `{key}`")))
}

fn mc(out: &Path, trials_dir: &Path, fits_dir: &Path) -> Result<()> {
    let kv = read_key_values(&trials_dir.join("summary.txt"))?;
    let sim = impact_core::nullmodel::SimConfig {
        seed: parse_num(&kv, "seed")?,
        noise_scale: parse_num(&kv, "noise_scale")?,
        n_trials: parse_num(&kv, "trials")?,
    };
    let (stock, trader) = read_trial_deltas(trials_dir, sim.n_trials)?;
    let summary = MonteCarloSummary {
        sim,
        estimator: kv.get("estimator").cloned().unwrap_or_default(),
        rng: kv.get("rng").cloned().unwrap_or_default(),
        stock: summarize_level(&stock),
        trader: summarize_level(&trader),
    };
    let text = render_summary(&summary);
    write_text(&out_file(out, "summary.txt")?, &text)?;
    print!("{text}");

    let est = read_key_values(&fits_dir.join("estimator.txt"))?
        .remove("estimator")
        .ok_or_else(|| Error::Data("estimator.txt has no `estimator` line".into()))?;
    let rows = read_fit_table(&fits_dir.join("fits.csv"))?;
    let deltas: Vec<f64> = rows.iter().map(|r| r.delta).collect();
    let s = impact_core::stats::Summary::of(&deltas)
        .ok_or_else(|| Error::Data("fit table is empty".into()))?;
    // trader entities are named stock/trader
    let level = if rows.iter().any(|r| r.entity.contains('/')) {
        Level::Trader
    } else {
        Level::Stock
    };
    let c = bias_correct(
        &DeltaMean {
            level,
            mean: s.mean,
            sem: s.sem,
            estimator: est,
        },
        &summary,
    )?;
    let p = out_file(out, "corrected.csv")?;
    let mut w = impact_core::io::csv_writer(
        &p,
        &[
            "level",
            "measured",
            "measured_sem",
            "bias",
            "corrected",
            "corrected_se",
        ],
    )?;
    w.write_record([
        format!("{level:?}").to_lowercase(),
        s.mean.to_string(),
        s.sem.to_string(),
        c.bias.to_string(),
        c.mean.to_string(),
        c.se.to_string(),
    ])?;
    impact_core::io::finish(&p, w)?;
    println!(
        "corrected mean delta = {:.4} +/- {:.4} (bias {:.4})",
        c.mean, c.se, c.bias
    );
    Ok(())
}

fn report(cfg: &PipelineConfig, out: &Path, fits_path: &Path) -> Result<()> {
    let rows = read_fit_table(fits_path)?;
    let mut fits = EntityFits::default();
    for r in rows {
        fits.fits.insert(
            r.entity,
            impact_core::impact::PowerFit {
                delta: r.delta,
                c: r.c,
                n_bin: r.n_bin,
                objective: r.objective,
                converged: r.converged,
            },
        );
    }
    let [lo, hi, w] = cfg.report.delta_hist;
    write_histogram(
        &out_file(out, "hist_delta.csv")?,
        &histogram(&fits.deltas(), lo, hi, w)?,
    )?;
    let [lo, hi, w] = cfg.report.c_hist;
    write_histogram(
        &out_file(out, "hist_c.csv")?,
        &histogram(&fits.prefactors(), lo, hi, w)?,
    )?;
    let splits = if cfg.splits.is_empty() {
        vec![all_split()]
    } else {
        cfg.splits.clone()
    };
    let p = out_file(out, "crossval.csv")?;
    let mut wr =
        impact_core::io::csv_writer(&p, &["group", "n", "mean_delta", "std_delta", "sem_delta"])?;
    for s in crossvalidate(&fits, &splits) {
        let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        wr.write_record([
            s.label.clone(),
            s.n_entities.to_string(),
            f(s.summary.map(|x| x.mean)),
            f(s.summary.map(|x| x.std)),
            f(s.summary.map(|x| x.sem)),
        ])?;
        match s.summary {
            Some(x) => println!(
                "{}: n = {}, mean delta = {:.4} +/- {:.4}",
                s.label, x.n, x.mean, x.sem
            ),
            None => println!("{}: empty", s.label),
        }
    }
    impact_core::io::finish(&p, wr)?;
    print_summary("all", &fits);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("--threads: {e}")))?;
    }
    let mut cfg = load_config(&cli)?;
    let out = cli.out.as_path();
    match &cli.cmd {
        Cmd::Ingest(a) | Cmd::Desks(a) => {
            apply_input(&mut cfg, a);
            ingest(&cfg, out, matches!(cli.cmd, Cmd::Desks(_)))
        }
        Cmd::Metaorders(a) => {
            apply_input(&mut cfg, a);
            metaorders(&cfg, out)
        }
        Cmd::Impact {
            cmd:
                ImpactCmd::Fit {
                    level,
                    min_horizon_sec,
                    horizon_window,
                    input,
                },
        } => impact_fit(
            &cfg,
            out,
            level,
            *min_horizon_sec,
            horizon_window.as_deref(),
            input,
        ),
        Cmd::Tails { input } => {
            let tails = fit_tails(&read_metaorders(input)?);
            write_tails(&out_file(out, "tails.csv")?, &tails)?;
            println!("{} stocks", tails.len());
            Ok(())
        }
        Cmd::TestPredictions {
            fits,
            tails,
            permutations,
        } => predictions(&cfg, out, fits, tails, *permutations),
        Cmd::Simulate(a) => simulate(&cfg, out, a),
        Cmd::Mc { trials, fits } => mc(out, trials, fits),
        Cmd::Report { fits } => report(&cfg, out, fits),
        Cmd::Pipeline(a) => {
            apply_input(&mut cfg, a);
            let r = run_pipeline(&cfg, out)?;
            print_summary("stock", &r.stock_fits);
            print_summary("trader", &r.trader_fits);
            for (level, c) in &r.corrected {
                println!(
                    "{level}: corrected mean delta = {:.4} +/- {:.4}",
                    c.mean, c.se
                );
            }
            println!("manifest: {}", r.manifest.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
