//! End-to-end run: input -> desks -> metaorders -> fits -> tails ->
//! prediction test -> Monte Carlo -> bias-corrected summary. Every output
//! is listed in `manifest.txt` with its row count and SHA-256.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::config::PipelineConfig;
use super::histogram::{histogram, write_histogram};
use super::robustness::horizon_robustness;
use super::split::{all_split, crossvalidate, label_of, scoped_stock, split_of, DatasetSplit};
use crate::error::{Error, Result};
use crate::impact::entities::{
    fit_all_stocks, fit_all_traders, write_binned, write_fit_table, EntityFits, EstimatorConfig,
    Level,
};
use crate::impact::fit::fit_sqrt_prefactor;
use crate::impact::samples::{compute_impact_samples, write_samples, ImpactSample};
use crate::impact::scaling::{aggregate_scaling, write_scaling};
use crate::metaorder::{
    build_catalog, compute_daily_stats, extract_metaorders, write_daily_stats, write_metaorders,
    DailyStats, Metaorder, MetaorderRow, StockCatalog,
};
use crate::nullmodel::montecarlo::{render_summary, write_trials, Corrected};
use crate::nullmodel::rng::{purpose, stream_rng, RNG_ALGORITHM};
use crate::nullmodel::{
    bias_correct, run_monte_carlo, schedules_from_streams, DeltaMean, MonteCarloSummary,
};
use crate::orderflow::stream::{
    read_flags, read_stream, write_stream, DayFlags, DropReason, DroppedDay, FlagTable,
};
use crate::orderflow::{
    build_desk_map, build_market_order_stream, ingest_events, DayStream, DeskMap, OrderEvent,
};
use crate::powerlaw::predictions::{
    fit_tails, join_rows, permutation_pvalue, test_predictions, write_scatter, write_tails,
};
use crate::stats::Summary;

pub const MANIFEST: &str = "manifest.txt";

const SEM_NOTE: &str = "iid sem = std / sqrt(n); cross-stock dependence is not modelled";

fn stage<T>(name: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    f().map_err(|e| Error::Stage {
        stage: name,
        source: Box::new(e),
    })
}

fn effective_splits(cfg: &PipelineConfig) -> Vec<DatasetSplit> {
    if cfg.splits.is_empty() {
        vec![all_split()]
    } else {
        cfg.splits.clone()
    }
}

/// Scoped name of `stock` on `day`, or `None` outside every split. Names
/// that are already scoped to the right split are kept.
pub fn scope(splits: &[DatasetSplit], stock: &str, day: NaiveDate) -> Option<String> {
    if let Some(l) = label_of(stock) {
        if splits.iter().any(|s| s.label == l && s.contains(day)) {
            return Some(stock.to_string());
        }
    }
    split_of(splits, day).map(|s| scoped_stock(&s.label, stock))
}

/// Market-order streams for every scoped (day, stock), plus what was lost
/// on the way.
#[derive(Debug, Default)]
pub struct Loaded {
    pub days: Vec<DayStream>,
    pub dropped: Vec<DroppedDay>,
    /// One map per scoped stock; empty for stream input.
    pub desks: BTreeMap<String, DeskMap>,
    pub counters: BTreeMap<&'static str, usize>,
}

fn scoped_flags(path: Option<&Path>, splits: &[DatasetSplit]) -> Result<FlagTable> {
    let Some(path) = path else {
        return Ok(FlagTable::default());
    };
    let flags = read_flags(path)?;
    Ok(FlagTable::from_flags(flags.into_iter().filter_map(|f| {
        Some(DayFlags {
            stock: scope(splits, &f.stock, f.day)?,
            ..f
        })
    })))
}

pub fn load_input(cfg: &PipelineConfig) -> Result<Loaded> {
    let splits = effective_splits(cfg);
    let flags = scoped_flags(cfg.input.flags.as_deref(), &splits)?;
    let mut out = Loaded::default();
    if let Some(path) = &cfg.input.events {
        let ing = ingest_events(path, cfg.event_format()?)?;
        out.counters.insert("input.rows", ing.rows);
        out.counters.insert("input.malformed", ing.malformed);
        out.counters
            .insert("input.out_of_session", ing.out_of_session);
        let mut outside = 0;
        let events: Vec<OrderEvent> = ing
            .events
            .into_iter()
            .filter_map(|mut e| match scope(&splits, &e.stock, e.day) {
                Some(s) => {
                    e.stock = s;
                    Some(e)
                }
                None => {
                    outside += 1;
                    None
                }
            })
            .collect();
        out.counters.insert("input.out_of_split", outside);
        let mut by_stock: BTreeMap<&str, Vec<&OrderEvent>> = BTreeMap::new();
        for e in &events {
            by_stock.entry(e.stock.as_str()).or_default().push(e);
        }
        out.desks = by_stock
            .into_iter()
            .map(|(s, evs)| (s.to_string(), build_desk_map(evs)))
            .collect();
        let desks = &out.desks;
        let build = build_market_order_stream(
            &events,
            |stock, server| desks.get(stock)?.desk_of(server).map(str::to_string),
            &flags,
        );
        out.days = build.days;
        out.dropped = build.dropped;
    } else if let Some(path) = &cfg.input.stream {
        let build = read_stream(path, &FlagTable::default())?;
        let mut outside = 0;
        let mut days = Vec::with_capacity(build.days.len());
        for mut ds in build.days {
            match scope(&splits, &ds.stock, ds.day) {
                Some(s) => {
                    if let Some(r) = flags.reason(ds.day, &s) {
                        out.dropped.push(DroppedDay {
                            day: ds.day,
                            stock: s,
                            reason: DropReason::Flagged(r),
                        });
                        continue;
                    }
                    ds.stock = s;
                    days.push(ds);
                }
                None => outside += 1,
            }
        }
        out.counters.insert("input.out_of_split_days", outside);
        out.dropped.extend(build.dropped);
        days.sort_by(|a, b| (&a.stock, a.day).cmp(&(&b.stock, b.day)));
        out.days = days;
    } else {
        return Err(Error::Config(
            "missing input path: set `input.events` or `input.stream`".into(),
        ));
    }
    out.dropped
        .sort_by(|a, b| (&a.stock, a.day).cmp(&(&b.stock, b.day)));
    out.counters.insert("stream.days", out.days.len());
    out.counters
        .insert("stream.ticks", out.days.iter().map(DayStream::len).sum());
    Ok(out)
}

/// Per-day stats, metaorders and impact samples for the kept days.
#[derive(Debug, Default)]
pub struct Measured {
    pub stats: BTreeMap<(String, NaiveDate), DailyStats>,
    pub metaorders: Vec<Metaorder>,
    pub samples: Vec<ImpactSample>,
    pub catalog: StockCatalog,
    /// Days excluded for zero volume or zero range.
    pub excluded: Vec<DroppedDay>,
    pub dropped_last_tick: usize,
}

pub fn measure(days: &[DayStream], liquid_threshold: usize) -> Measured {
    let per_day: Vec<_> = days
        .par_iter()
        .map(|ds| {
            let st = compute_daily_stats(ds)?;
            if let Some(r) = st.exclusion() {
                return Some(Err(r));
            }
            let mos = extract_metaorders(ds);
            let sb = compute_impact_samples(&mos, &st, ds);
            Some(Ok((st, mos, sb)))
        })
        .collect();
    let mut out = Measured::default();
    for (ds, r) in days.iter().zip(per_day) {
        match r {
            None => {}
            Some(Err(reason)) => out.excluded.push(DroppedDay {
                day: ds.day,
                stock: ds.stock.clone(),
                reason: DropReason::Flagged(reason),
            }),
            Some(Ok((st, mos, sb))) => {
                out.stats.insert((ds.stock.clone(), ds.day), st);
                out.metaorders.extend(mos);
                out.samples.extend(sb.samples);
                out.dropped_last_tick += sb.dropped_last_tick;
            }
        }
    }
    out.catalog = build_catalog(&out.metaorders, liquid_threshold);
    out
}

/// Square-root prefactor of each fitted stock, from its valid bins.
pub fn stock_prefactors(fits: &EntityFits, min_bin_count: usize) -> BTreeMap<String, f64> {
    fits.fits
        .keys()
        .filter_map(|s| {
            let pts: Vec<(f64, f64)> = fits.binned[s]
                .valid(min_bin_count)
                .map(|(_, x, y)| (x, y))
                .collect();
            Some((s.clone(), fit_sqrt_prefactor(&pts)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    /// Relative to the artifact directory, `/`-separated.
    pub file: String,
    pub rows: usize,
    pub sha256: String,
}

/// Result of a successful run.
#[derive(Debug, Default)]
pub struct PipelineReport {
    pub stock_fits: EntityFits,
    pub trader_fits: EntityFits,
    pub monte_carlo: Option<MonteCarloSummary>,
    pub corrected: BTreeMap<&'static str, Corrected>,
    pub outputs: Vec<OutputRecord>,
    pub manifest: PathBuf,
}

struct Artifacts {
    dir: PathBuf,
    outputs: Vec<OutputRecord>,
    lines: Vec<(String, String)>,
}

impl Artifacts {
    fn path(&self, rel: &str) -> Result<PathBuf> {
        let p = self.dir.join(rel);
        if let Some(parent) = p.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        Ok(p)
    }

    fn csv(&mut self, rel: &str, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
        let p = self.path(rel)?;
        write(&p)?;
        self.record(rel)
    }

    fn record(&mut self, rel: &str) -> Result<()> {
        let p = self.dir.join(rel);
        let bytes = std::fs::read(&p).map_err(|e| Error::io(&p, e))?;
        let rows = if rel.ends_with(".csv") {
            csv::Reader::from_reader(bytes.as_slice()).records().count()
        } else {
            bytes.iter().filter(|&&b| b == b'\n').count()
        };
        self.outputs.push(OutputRecord {
            file: rel.to_string(),
            rows,
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(())
    }

    fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.lines.push((key.into(), value.to_string()));
    }

    fn summary(&mut self, prefix: &str, s: Option<Summary>) {
        match s {
            Some(s) => {
                self.note(format!("{prefix}.n"), s.n);
                self.note(format!("{prefix}.mean_delta"), s.mean);
                self.note(format!("{prefix}.std_delta"), s.std);
                self.note(format!("{prefix}.sem_delta"), s.sem);
            }
            None => self.note(format!("{prefix}.n"), 0),
        }
    }
}

pub fn write_desks(path: &Path, desks: &BTreeMap<String, DeskMap>) -> Result<()> {
    let mut w = crate::io::csv_writer(path, &["stock", "server", "desk"])?;
    for (stock, map) in desks {
        for (server, desk) in map.iter() {
            w.write_record([stock, server, desk])?;
        }
    }
    crate::io::finish(path, w)
}

pub fn write_dropped(path: &Path, dropped: &[DroppedDay]) -> Result<()> {
    let mut w = crate::io::csv_writer(path, &["stock", "day", "reason"])?;
    for d in dropped {
        w.write_record([d.stock.clone(), d.day.to_string(), d.reason.to_string()])?;
    }
    crate::io::finish(path, w)
}

fn write_skipped(path: &Path, levels: &[(&str, &EntityFits)]) -> Result<()> {
    let mut w = crate::io::csv_writer(path, &["level", "entity", "reason"])?;
    for (level, fits) in levels {
        for (entity, skip) in &fits.skipped {
            w.write_record([level.to_string(), entity.clone(), skip.to_string()])?;
        }
    }
    crate::io::finish(path, w)
}

/// Fits whose exponent or prefactor falls outside the histogram ranges.
fn write_outliers(path: &Path, cfg: &PipelineConfig, levels: &[(&str, &EntityFits)]) -> Result<()> {
    let mut w = crate::io::csv_writer(path, &["level", "entity", "quantity", "value"])?;
    let outside = |v: f64, h: [f64; 3]| !(v >= h[0] && v < h[1]);
    for (level, fits) in levels {
        for (entity, f) in &fits.fits {
            for (q, v, h) in [
                ("delta", f.delta, cfg.report.delta_hist),
                ("c", f.c, cfg.report.c_hist),
            ] {
                if outside(v, h) {
                    w.write_record([
                        level.to_string(),
                        entity.clone(),
                        q.to_string(),
                        v.to_string(),
                    ])?;
                }
            }
        }
    }
    crate::io::finish(path, w)
}

fn write_summary_table(path: &Path, rows: &[(String, usize, Option<Summary>)]) -> Result<()> {
    let mut w = crate::io::csv_writer(
        path,
        &["group", "n", "mean_delta", "std_delta", "sem_delta"],
    )?;
    for (group, n, s) in rows {
        let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            group.clone(),
            n.to_string(),
            f(s.map(|s| s.mean)),
            f(s.map(|s| s.std)),
            f(s.map(|s| s.sem)),
        ])?;
    }
    crate::io::finish(path, w)
}

fn write_corrected(
    path: &Path,
    rows: &BTreeMap<&'static str, (DeltaMean, Corrected)>,
) -> Result<()> {
    let mut w = crate::io::csv_writer(
        path,
        &[
            "level",
            "measured",
            "measured_sem",
            "bias",
            "corrected",
            "corrected_se",
        ],
    )?;
    for (level, (m, c)) in rows {
        w.write_record([
            level.to_string(),
            m.mean.to_string(),
            m.sem.to_string(),
            c.bias.to_string(),
            c.mean.to_string(),
            c.se.to_string(),
        ])?;
    }
    crate::io::finish(path, w)
}

fn hist(art: &mut Artifacts, rel: &str, values: &[f64], h: [f64; 3]) -> Result<()> {
    let hh = histogram(values, h[0], h[1], h[2])?;
    art.csv(rel, |p| write_histogram(p, &hh))
}

fn run_stages(cfg: &PipelineConfig, art: &mut Artifacts) -> Result<PipelineReport> {
    let est: EstimatorConfig = cfg.estimator();
    let splits = effective_splits(cfg);

    let loaded = stage("ingest", || {
        let loaded = load_input(cfg)?;
        art.csv("stream.csv", |p| write_stream(p, &loaded.days))?;
        if cfg.input.events.is_some() {
            art.csv("desks.csv", |p| write_desks(p, &loaded.desks))?;
            let n_desks: usize = loaded.desks.values().map(|d| d.desks().len()).sum();
            art.note("desks.count", n_desks);
        }
        for (k, v) in &loaded.counters {
            art.note(*k, v);
        }
        Ok(loaded)
    })?;

    let measured = stage("metaorders", || {
        let m = measure(&loaded.days, est.liquid_threshold);
        let mut dropped = loaded.dropped.clone();
        dropped.extend(m.excluded.iter().cloned());
        dropped.sort_by(|a, b| (&a.stock, a.day).cmp(&(&b.stock, b.day)));
        art.csv("dropped_days.csv", |p| write_dropped(p, &dropped))?;
        art.csv("daily_stats.csv", |p| {
            write_daily_stats(p, m.stats.iter().map(|((s, _), st)| (s.as_str(), st)))
        })?;
        art.csv("metaorders.csv", |p| write_metaorders(p, &m.metaorders))?;
        art.csv("samples.csv", |p| write_samples(p, &m.samples))?;
        art.note("samples.dropped_last_tick", m.dropped_last_tick);
        art.note("stocks.total", m.catalog.per_stock.len());
        art.note("stocks.liquid", m.catalog.liquid_stocks().count());
        Ok(m)
    })?;

    let (stock_fits, trader_fits) = stage("fits", || {
        let stocks = fit_all_stocks(&measured.samples, &measured.catalog, &est);
        let traders = fit_all_traders(&measured.samples, &measured.catalog, &est);
        let levels = [("stock", &stocks), ("trader", &traders)];
        art.csv("fits/stock.csv", |p| write_fit_table(p, &stocks))?;
        art.csv("fits/trader.csv", |p| write_fit_table(p, &traders))?;
        art.csv("fits/binned_stock.csv", |p| write_binned(p, &stocks))?;
        art.csv("fits/binned_trader.csv", |p| write_binned(p, &traders))?;
        art.csv("fits/skipped.csv", |p| write_skipped(p, &levels))?;
        art.csv("fits/outliers.csv", |p| write_outliers(p, cfg, &levels))?;
        for (level, fits) in levels {
            hist(
                art,
                &format!("hist/delta_{level}.csv"),
                &fits.deltas(),
                cfg.report.delta_hist,
            )?;
            hist(
                art,
                &format!("hist/c_{level}.csv"),
                &fits.prefactors(),
                cfg.report.c_hist,
            )?;
            let curve = aggregate_scaling(
                est.binning,
                fits.fits.keys().map(|k| (k.as_str(), &fits.binned[k])),
                est.min_bin_count,
            );
            art.csv(&format!("scaling/{level}.csv"), |p| {
                write_scaling(p, &curve)
            })?;
            art.summary(level, fits.summary());
        }
        art.note("sem_note", SEM_NOTE);
        if stocks.fits.is_empty() {
            return Err(Error::Data(format!(
                "no stock passed the filters ({} stocks, liquidity threshold {})",
                measured.catalog.per_stock.len(),
                est.liquid_threshold
            )));
        }
        Ok((stocks, traders))
    })?;

    let tails = stage("tails", || {
        let rows: Vec<MetaorderRow> = measured.metaorders.iter().map(MetaorderRow::from).collect();
        let tails = fit_tails(&rows);
        art.csv("tails.csv", |p| write_tails(p, &tails))?;
        Ok(tails)
    })?;

    stage("predictions", || {
        let rows = join_rows(
            stock_fits.fits.iter().map(|(s, f)| (s.as_str(), f.delta)),
            &tails,
        );
        match test_predictions(rows) {
            Ok(t) => {
                art.csv("predictions.csv", |p| write_scatter(p, &t))?;
                let fmt = |r: Option<f64>| {
                    r.map(|v| v.to_string())
                        .unwrap_or_else(|| "undefined".into())
                };
                art.note("predictions.n", t.rows.len());
                art.note("predictions.r_beta", fmt(t.r_beta));
                art.note("predictions.r_alpha", fmt(t.r_alpha));
                if cfg.report.permutations > 0 {
                    let delta: Vec<f64> = t.rows.iter().map(|r| r.delta).collect();
                    for (name, col) in [
                        (
                            "beta",
                            t.rows.iter().map(|r| r.beta - 1.0).collect::<Vec<_>>(),
                        ),
                        ("alpha", t.rows.iter().map(|r| r.alpha - 1.0).collect()),
                    ] {
                        let mut rng = stream_rng(cfg.montecarlo.seed, name, 0, purpose::SHUFFLE);
                        let p = permutation_pvalue(&delta, &col, cfg.report.permutations, &mut rng);
                        art.note(format!("predictions.p_{name}"), fmt(p));
                    }
                }
            }
            Err(Error::Data(msg)) => art.note("predictions", format!("unavailable: {msg}")),
            Err(e) => return Err(e),
        }
        Ok(())
    })?;

    stage("robustness", || {
        let cv = crossvalidate(&stock_fits, &splits);
        let rows: Vec<_> = cv
            .iter()
            .map(|s| (s.label.clone(), s.n_entities, s.summary))
            .collect();
        art.csv("crossval.csv", |p| write_summary_table(p, &rows))?;
        let windows = horizon_robustness(
            &measured.samples,
            &est,
            &cfg.windows(),
            cfg.robustness.window_min_samples,
        );
        let mut rows = Vec::new();
        for (i, w) in windows.iter().enumerate() {
            art.csv(&format!("robustness/window_{}.csv", i + 1), |p| {
                write_fit_table(p, &w.fits)
            })?;
            hist(
                art,
                &format!("robustness/delta_window_{}.csv", i + 1),
                &w.fits.deltas(),
                cfg.report.delta_hist,
            )?;
            rows.push((
                format!("{}-{}min", w.window.lo_min, w.window.hi_min),
                w.fits.fits.len(),
                w.fits.summary(),
            ));
        }
        art.csv("robustness/summary.csv", |p| write_summary_table(p, &rows))?;
        Ok(())
    })?;

    let mut report = PipelineReport::default();
    if cfg.montecarlo.enabled {
        stage("montecarlo", || {
            let prefactors = stock_prefactors(&stock_fits, est.min_bin_count);
            let schedules = schedules_from_streams(&loaded.days, &measured.stats, &prefactors);
            let sim = cfg.sim();
            let (trials, summary) = run_monte_carlo(&schedules, &sim, &est)?;
            write_trials(&art.dir.join("mc"), &trials)?;
            for l in 0..trials.len() {
                for level in ["stock", "trader"] {
                    art.record(&format!("mc/trial_{l:04}_{level}.csv"))?;
                }
            }
            let text = render_summary(&summary);
            let p = art.path("mc/summary.txt")?;
            std::fs::write(&p, &text).map_err(|e| Error::io(&p, e))?;
            art.record("mc/summary.txt")?;

            let mut rows = BTreeMap::new();
            for (name, level, fits) in [
                ("stock", Level::Stock, &stock_fits),
                ("trader", Level::Trader, &trader_fits),
            ] {
                let Some(s) = fits.summary() else { continue };
                let measured = DeltaMean {
                    level,
                    mean: s.mean,
                    sem: s.sem,
                    estimator: est.fingerprint(),
                };
                match bias_correct(&measured, &summary) {
                    Ok(c) => {
                        art.note(format!("corrected.{name}.mean_delta"), c.mean);
                        art.note(format!("corrected.{name}.se"), c.se);
                        art.note(format!("corrected.{name}.bias"), c.bias);
                        rows.insert(name, (measured, c));
                    }
                    Err(Error::Data(msg)) => {
                        art.note(format!("corrected.{name}"), format!("unavailable: {msg}"))
                    }
                    Err(e) => return Err(e),
                }
            }
            art.csv("corrected.csv", |p| write_corrected(p, &rows))?;
            report.corrected = rows.into_iter().map(|(k, (_, c))| (k, c)).collect();
            report.monte_carlo = Some(summary);
            Ok(())
        })?;
    }
    report.stock_fits = stock_fits;
    report.trader_fits = trader_fits;
    Ok(report)
}

fn render_manifest(header: &[(String, String)], art: &Artifacts, status: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "status = {status}");
    for (k, v) in header.iter().chain(&art.lines) {
        let _ = writeln!(out, "{k} = {v}");
    }
    for o in &art.outputs {
        let _ = writeln!(out, "output.{}.rows = {}", o.file, o.rows);
        let _ = writeln!(out, "output.{}.sha256 = {}", o.file, o.sha256);
    }
    out
}

/// Run everything and write the artifact directory. On failure the
/// manifest is still written, marked FAILED with the stage and cause, and
/// the outputs produced so far are kept.
pub fn run_pipeline(cfg: &PipelineConfig, out_dir: &Path) -> Result<PipelineReport> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let header = vec![
        ("config_hash".to_string(), cfg.hash()?),
        (
            "code_version".to_string(),
            env!("CARGO_PKG_VERSION").to_string(),
        ),
        ("rng".to_string(), RNG_ALGORITHM.to_string()),
        ("estimator".to_string(), cfg.estimator().fingerprint()),
    ];
    let mut art = Artifacts {
        dir: out_dir.to_path_buf(),
        outputs: Vec::new(),
        lines: Vec::new(),
    };
    let result = run_stages(cfg, &mut art);
    let manifest = out_dir.join(MANIFEST);
    let text = match &result {
        Ok(_) => render_manifest(&header, &art, "ok"),
        Err(e) => {
            let (name, cause) = match e {
                Error::Stage { stage, source } => (*stage, source.to_string()),
                other => ("unknown", other.to_string()),
            };
            art.note("failed_stage", name);
            art.note("cause", cause.replace('\n', " "));
            render_manifest(&header, &art, "FAILED")
        }
    };
    std::fs::write(&manifest, text).map_err(|e| Error::io(&manifest, e))?;
    let mut report = result?;
    report.outputs = art.outputs;
    report.manifest = manifest;
    Ok(report)
}

/// Parse `key = value` lines of a manifest.
pub fn read_manifest(path: &Path) -> Result<BTreeMap<String, String>> {
    crate::nullmodel::montecarlo::read_key_values(path)
}
