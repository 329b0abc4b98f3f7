use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::binning::{bin_samples, BinnedImpact, Binning};
use super::fit::{fit_power_law, FitError, PowerFit, DEFAULT_MIN_BIN_COUNT};
use super::samples::{keep_sample, HorizonWindow, ImpactSample};
use crate::error::{Error, Result};
use crate::metaorder::{StockCatalog, DEFAULT_LIQUID_THRESHOLD};
use crate::stats::Summary;

/// Everything that decides which samples and bins enter a fit. Two results
/// are comparable only when their configs match.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub min_horizon_sec: f64,
    pub window: Option<HorizonWindow>,
    pub binning: Binning,
    /// Bins need strictly more samples than this.
    pub min_bin_count: usize,
    /// Stocks need strictly more metaorders than this.
    pub liquid_threshold: usize,
    /// Traders need at least this many metaorders.
    pub active_min_metaorders: usize,
    /// Traders need strictly more valid bins than this.
    pub active_min_bins: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            min_horizon_sec: 60.0,
            window: None,
            binning: Binning::default(),
            min_bin_count: DEFAULT_MIN_BIN_COUNT,
            liquid_threshold: DEFAULT_LIQUID_THRESHOLD,
            active_min_metaorders: 10_000,
            active_min_bins: 10,
        }
    }
}

impl EstimatorConfig {
    pub fn fingerprint(&self) -> String {
        let w = self
            .window
            .map(|w| format!("{},{}", w.lo_min, w.hi_min))
            .unwrap_or_else(|| "none".into());
        format!(
            "min_T={};window={};bins={}:{}:{};nk>{};liquid>{};active>={};nbin>{}",
            self.min_horizon_sec,
            w,
            self.binning.first_exp,
            self.binning.delta,
            self.binning.k_max,
            self.min_bin_count,
            self.liquid_threshold,
            self.active_min_metaorders,
            self.active_min_bins,
        )
    }

    pub fn keeps(&self, horizon: f64) -> bool {
        keep_sample(horizon, self.min_horizon_sec, self.window)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Stock,
    Trader,
}

impl std::str::FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stock" => Ok(Level::Stock),
            "trader" => Ok(Level::Trader),
            other => Err(Error::Config(format!("unknown level `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Skip {
    NotLiquid(usize),
    Inactive(usize),
    TooFewBins(usize),
    Fit(FitError),
}

impl std::fmt::Display for Skip {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Skip::NotLiquid(m) => write!(f, "not liquid ({m} metaorders)"),
            Skip::Inactive(m) => write!(f, "inactive trader ({m} metaorders)"),
            Skip::TooFewBins(n) => write!(f, "too few valid bins ({n})"),
            Skip::Fit(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct EntityFits {
    pub fits: BTreeMap<String, PowerFit>,
    pub binned: BTreeMap<String, BinnedImpact>,
    pub skipped: BTreeMap<String, Skip>,
}

impl EntityFits {
    pub fn deltas(&self) -> Vec<f64> {
        self.fits.values().map(|f| f.delta).collect()
    }

    pub fn prefactors(&self) -> Vec<f64> {
        self.fits.values().map(|f| f.c).collect()
    }

    /// Mean, population std and SEM of the exponents.
    pub fn summary(&self) -> Option<Summary> {
        Summary::of(&self.deltas())
    }

    /// Entities whose exponent falls outside `[0, 1]`.
    pub fn outliers(&self) -> Vec<(&str, f64)> {
        self.fits
            .iter()
            .filter(|(_, f)| !(0.0..=1.0).contains(&f.delta))
            .map(|(k, f)| (k.as_str(), f.delta))
            .collect()
    }
}

/// Bin and fit one entity's `(q, impact)` points. `min_valid_bins` is the
/// inclusive lower bound on valid bins (2 for stocks).
pub fn fit_group(
    points: &[(f64, f64)],
    cfg: &EstimatorConfig,
    min_valid_bins: usize,
) -> (BinnedImpact, std::result::Result<PowerFit, Skip>) {
    let binned = bin_samples(cfg.binning, points.iter().copied());
    let n_valid = binned.n_valid(cfg.min_bin_count);
    if n_valid < min_valid_bins.max(2) {
        return (binned, Err(Skip::TooFewBins(n_valid)));
    }
    let fit = fit_power_law(&binned, cfg.min_bin_count).map_err(Skip::Fit);
    (binned, fit)
}

/// Fit every named group in parallel; results come back in name order.
pub fn fit_groups(
    groups: Vec<(String, Vec<(f64, f64)>)>,
    cfg: &EstimatorConfig,
    min_valid_bins: usize,
) -> EntityFits {
    let results: Vec<_> = groups
        .into_par_iter()
        .map(|(name, pts)| {
            let (binned, fit) = fit_group(&pts, cfg, min_valid_bins);
            (name, binned, fit)
        })
        .collect();
    let mut out = EntityFits::default();
    for (name, binned, fit) in results {
        match fit {
            Ok(f) => {
                out.fits.insert(name.clone(), f);
            }
            Err(s) => {
                out.skipped.insert(name.clone(), s);
            }
        }
        out.binned.insert(name, binned);
    }
    out
}

pub fn trader_entity(stock: &str, trader: &str) -> String {
    format!("{stock}/{trader}")
}

/// Stock-level fits over liquid stocks, pooling every trader's metaorders.
pub fn fit_all_stocks(
    samples: &[ImpactSample],
    catalog: &StockCatalog,
    cfg: &EstimatorConfig,
) -> EntityFits {
    let mut groups: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    let mut skipped = BTreeMap::new();
    for (stock, &m) in &catalog.per_stock {
        if m > cfg.liquid_threshold {
            groups.insert(stock.as_str(), Vec::new());
        } else {
            skipped.insert(stock.clone(), Skip::NotLiquid(m));
        }
    }
    for s in samples.iter().filter(|s| cfg.keeps(s.horizon)) {
        if let Some(g) = groups.get_mut(s.stock.as_str()) {
            g.push((s.q, s.impact));
        }
    }
    let groups = groups
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    let mut out = fit_groups(groups, cfg, 2);
    out.skipped.extend(skipped);
    out
}

/// Trader-level fits over active traders: at least `active_min_metaorders`
/// metaorders and strictly more than `active_min_bins` valid bins.
pub fn fit_all_traders(
    samples: &[ImpactSample],
    catalog: &StockCatalog,
    cfg: &EstimatorConfig,
) -> EntityFits {
    let mut groups: BTreeMap<(&str, &str), Vec<(f64, f64)>> = BTreeMap::new();
    let mut skipped = BTreeMap::new();
    for ((stock, trader), &m) in &catalog.per_trader {
        if m >= cfg.active_min_metaorders {
            groups.insert((stock.as_str(), trader.as_str()), Vec::new());
        } else {
            skipped.insert(trader_entity(stock, trader), Skip::Inactive(m));
        }
    }
    for s in samples.iter().filter(|s| cfg.keeps(s.horizon)) {
        if let Some(g) = groups.get_mut(&(s.stock.as_str(), s.trader.as_str())) {
            g.push((s.q, s.impact));
        }
    }
    let groups = groups
        .into_iter()
        .map(|((s, t), v)| (trader_entity(s, t), v))
        .collect();
    let mut out = fit_groups(groups, cfg, cfg.active_min_bins + 1);
    out.skipped.extend(skipped);
    out
}

#[derive(Serialize)]
struct FitRow<'a> {
    entity: &'a str,
    delta: f64,
    c: f64,
    n_bin: usize,
    objective: f64,
    converged: bool,
}

pub const FIT_HEADER: &[&str] = &["entity", "delta", "c", "n_bin", "objective", "converged"];

pub fn write_fit_table(path: &Path, fits: &EntityFits) -> Result<()> {
    let mut w = crate::io::csv_writer(path, FIT_HEADER)?;
    for (entity, f) in &fits.fits {
        w.serialize(FitRow {
            entity,
            delta: f.delta,
            c: f.c,
            n_bin: f.n_bin,
            objective: f.objective,
            converged: f.converged,
        })?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct FitTableRow {
    pub entity: String,
    pub delta: f64,
    pub c: f64,
    pub n_bin: usize,
    pub objective: f64,
    pub converged: bool,
}

pub fn read_fit_table(path: &Path) -> Result<Vec<FitTableRow>> {
    crate::io::read_table(path, FIT_HEADER)
}

/// Every entity's binned impact in one long table, skipped entities
/// included, empty bins left out.
pub fn write_binned(path: &Path, fits: &EntityFits) -> Result<()> {
    let mut w = crate::io::csv_writer(
        path,
        &["entity", "k", "q_center", "mean_impact", "count", "sem"],
    )?;
    for (entity, binned) in &fits.binned {
        for (k, b) in binned.bins.iter().enumerate().filter(|(_, b)| b.count > 0) {
            w.write_record([
                entity.clone(),
                k.to_string(),
                binned.binning.center(k).to_string(),
                b.mean.to_string(),
                b.count.to_string(),
                b.sem.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn samples_for(
        stock: &str,
        trader: &str,
        c: f64,
        per_bin: usize,
        bins: std::ops::Range<usize>,
    ) -> Vec<ImpactSample> {
        let b = Binning::default();
        let day = NaiveDate::from_ymd_opt(2019, 1, 4).unwrap();
        bins.flat_map(|k| {
            let q = b.center(k);
            (0..per_bin).map(move |r| ImpactSample {
                stock: stock.into(),
                trader: trader.into(),
                day,
                r: r as u32,
                q,
                impact: c * q.sqrt(),
                horizon: 600.0,
            })
        })
        .collect()
    }

    fn catalog(entries: &[(&str, &str, usize)]) -> StockCatalog {
        let mut cat = StockCatalog::default();
        for &(s, t, m) in entries {
            *cat.per_stock.entry(s.into()).or_default() += m;
            cat.per_trader.insert((s.into(), t.into()), m);
        }
        cat
    }

    #[test]
    fn active_trader_boundaries() {
        let cfg = EstimatorConfig::default();
        let mut samples = samples_for("S", "in", 1.0, 101, 0..11);
        samples.extend(samples_for("S", "few_bins", 1.0, 101, 0..10));
        samples.extend(samples_for("S", "small", 1.0, 101, 0..20));
        let cat = catalog(&[
            ("S", "in", 10_000),
            ("S", "few_bins", 20_000),
            ("S", "small", 9_999),
        ]);
        let fits = fit_all_traders(&samples, &cat, &cfg);
        assert_eq!(fits.fits.keys().collect::<Vec<_>>(), vec!["S/in"]);
        assert_eq!(fits.fits["S/in"].n_bin, 11);
        assert_eq!(fits.skipped["S/few_bins"], Skip::TooFewBins(10));
        assert_eq!(fits.skipped["S/small"], Skip::Inactive(9_999));
    }

    #[test]
    fn noiseless_ensemble_of_stocks() {
        let cfg = EstimatorConfig {
            liquid_threshold: 0,
            ..Default::default()
        };
        let mut samples = Vec::new();
        let mut entries = Vec::new();
        let names: Vec<String> = (0..50).map(|s| format!("S{s:02}")).collect();
        for (s, name) in names.iter().enumerate() {
            samples.extend(samples_for(name, "t", 0.5 + s as f64 / 50.0, 101, 5..40));
            entries.push((name.as_str(), "t", 1));
        }
        let fits = fit_all_stocks(&samples, &catalog(&entries), &cfg);
        assert_eq!(fits.fits.len(), 50);
        let s = fits.summary().unwrap();
        assert!((s.mean - 0.5).abs() < 1e-6);
        assert!(s.std < 1e-6);
        for (s, f) in fits.fits.values().enumerate() {
            assert!((f.c - (0.5 + s as f64 / 50.0)).abs() < 1e-6);
        }
    }

    #[test]
    fn illiquid_stocks_listed_and_short_horizons_filtered() {
        let cfg = EstimatorConfig {
            liquid_threshold: 5,
            ..Default::default()
        };
        let mut samples = samples_for("A", "t", 1.0, 101, 0..5);
        for s in samples.iter_mut().take(200) {
            s.horizon = 59.0;
        }
        samples.extend(samples_for("B", "t", 1.0, 101, 0..5));
        let cat = catalog(&[("A", "t", 6), ("B", "t", 5)]);
        let fits = fit_all_stocks(&samples, &cat, &cfg);
        assert_eq!(fits.skipped["B"], Skip::NotLiquid(5));
        // 200 filtered samples empty the first bin and leave 3 valid ones
        assert_eq!(fits.fits["A"].n_bin, 3);
    }

    #[test]
    fn fingerprint_tracks_thresholds() {
        let a = EstimatorConfig::default();
        let b = EstimatorConfig {
            min_horizon_sec: 120.0,
            ..a
        };
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), EstimatorConfig::default().fingerprint());
    }
}
