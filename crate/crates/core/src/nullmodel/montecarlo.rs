//! Monte Carlo harness: re-sign, simulate and re-fit every stock for every
//! trial, then summarize the spread of the fitted exponents.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::{purpose, stream_rng, RNG_ALGORITHM};
use super::schedule::StockSchedule;
use super::simulate::{day_samples, shuffle_signs, simulate_day};
use crate::error::{Error, Result};
use crate::impact::binning::BinnedImpact;
use crate::impact::entities::{
    fit_group, read_fit_table, trader_entity, write_fit_table, EntityFits, EstimatorConfig, Level,
    Skip,
};
use crate::impact::fit::PowerFit;
use crate::stats::{mean, std_sample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    /// Multiplier on the diffusion term; 0 switches noise off.
    pub noise_scale: f64,
    pub n_trials: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 0,
            noise_scale: 1.0,
            n_trials: 100,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct TrialFits {
    pub stocks: EntityFits,
    pub traders: EntityFits,
}

type Group = (String, BinnedImpact, std::result::Result<PowerFit, Skip>);

struct StockTrial {
    stock: Group,
    traders: Vec<Group>,
    skipped_traders: Vec<(String, Skip)>,
}

/// Simulate one stock for one trial and fit it with the estimator settings
/// used on real data. Metaorders come from the schedule, not from re-running
/// run extraction on the simulated stream.
fn stock_trial(
    sched: &StockSchedule,
    trial: usize,
    sim: &SimConfig,
    est: &EstimatorConfig,
) -> StockTrial {
    let trial = trial as u64;
    let signs = shuffle_signs(
        sched,
        &mut stream_rng(sim.seed, &sched.stock, trial, purpose::SHUFFLE),
    );
    let mut noise = stream_rng(sim.seed, &sched.stock, trial, purpose::NOISE);
    let counts = sched.trader_counts();
    let active: Vec<bool> = counts
        .iter()
        .map(|&m| m >= est.active_min_metaorders)
        .collect();
    let mut stock_pts = Vec::new();
    let mut trader_pts: Vec<Vec<(f64, f64)>> = vec![Vec::new(); sched.traders.len()];
    for (day, day_signs) in sched.days.iter().zip(&signs) {
        if !day.is_calibrated() {
            continue;
        }
        let path = simulate_day(day, day_signs, sched.c, sim.noise_scale, &mut noise);
        for (i, q, impact) in day_samples(day, day_signs, &path) {
            let m = &day.metaorders[i];
            if !est.keeps(m.horizon) {
                continue;
            }
            stock_pts.push((q, impact));
            if active[m.trader as usize] {
                trader_pts[m.trader as usize].push((q, impact));
            }
        }
    }

    let n = sched.n_metaorders();
    let stock = if n > est.liquid_threshold {
        let (b, f) = fit_group(&stock_pts, est, 2);
        (sched.stock.clone(), b, f)
    } else {
        let b = crate::impact::binning::bin_samples(est.binning, std::iter::empty());
        (sched.stock.clone(), b, Err(Skip::NotLiquid(n)))
    };
    let mut traders = Vec::new();
    let mut skipped_traders = Vec::new();
    for (t, name) in sched.traders.iter().enumerate() {
        let entity = trader_entity(&sched.stock, name);
        if active[t] {
            let (b, f) = fit_group(&trader_pts[t], est, est.active_min_bins + 1);
            traders.push((entity, b, f));
        } else {
            skipped_traders.push((entity, Skip::Inactive(counts[t])));
        }
    }
    StockTrial {
        stock,
        traders,
        skipped_traders,
    }
}

fn collect(into: &mut EntityFits, (name, binned, fit): Group) {
    match fit {
        Ok(f) => {
            into.fits.insert(name.clone(), f);
        }
        Err(s) => {
            into.skipped.insert(name.clone(), s);
        }
    }
    into.binned.insert(name, binned);
}

/// All trials, in trial order. Every (stock, trial) pair draws from its own
/// streams, so the thread count never changes a result.
pub fn run_trials(
    schedules: &[StockSchedule],
    sim: &SimConfig,
    est: &EstimatorConfig,
) -> Vec<TrialFits> {
    let jobs: Vec<(usize, usize)> = (0..sim.n_trials)
        .flat_map(|l| (0..schedules.len()).map(move |s| (l, s)))
        .collect();
    let results: Vec<StockTrial> = jobs
        .par_iter()
        .map(|&(l, s)| stock_trial(&schedules[s], l, sim, est))
        .collect();
    let mut trials = vec![TrialFits::default(); sim.n_trials];
    for ((l, _), r) in jobs.into_iter().zip(results) {
        let t = &mut trials[l];
        collect(&mut t.stocks, r.stock);
        for g in r.traders {
            collect(&mut t.traders, g);
        }
        t.traders.skipped.extend(r.skipped_traders);
    }
    trials
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSummary {
    /// Mean over trials of the per-trial mean exponent.
    pub mean: f64,
    /// Standard error of `mean` across trials.
    pub mean_se: f64,
    /// Root of the mean per-trial population variance.
    pub sigma: f64,
    pub sigma_se: f64,
    /// `mean - 1/2`.
    pub bias: f64,
    pub trial_means: Vec<f64>,
    pub trial_variances: Vec<f64>,
    /// Trials without a single fitted entity.
    pub dropped_trials: usize,
}

/// Summarize per-trial exponent lists. Trials with no fits are dropped;
/// `None` when every trial is empty.
pub fn summarize_level(per_trial: &[Vec<f64>]) -> Option<LevelSummary> {
    let used: Vec<&Vec<f64>> = per_trial.iter().filter(|d| !d.is_empty()).collect();
    if used.is_empty() {
        return None;
    }
    let trial_means: Vec<f64> = used.iter().map(|d| mean(d).expect("nonempty")).collect();
    let trial_variances: Vec<f64> = used
        .iter()
        .zip(&trial_means)
        .map(|(d, m)| d.iter().map(|x| (x - m).powi(2)).sum::<f64>() / d.len() as f64)
        .collect();
    let n = used.len() as f64;
    let m = mean(&trial_means).expect("nonempty");
    let mean_se = std_sample(&trial_means).map_or(f64::NAN, |s| s / n.sqrt());
    let var = mean(&trial_variances).expect("nonempty");
    let sigma = var.sqrt();
    // delta method on the square root
    let var_se = std_sample(&trial_variances).map_or(f64::NAN, |s| s / n.sqrt());
    let sigma_se = if sigma > 0.0 {
        var_se / (2.0 * sigma)
    } else {
        0.0
    };
    Some(LevelSummary {
        mean: m,
        mean_se,
        sigma,
        sigma_se,
        bias: m - 0.5,
        trial_means,
        trial_variances,
        dropped_trials: per_trial.len() - used.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub sim: SimConfig,
    pub estimator: String,
    pub rng: String,
    pub stock: Option<LevelSummary>,
    pub trader: Option<LevelSummary>,
}

pub fn summarize(
    trials: &[TrialFits],
    sim: &SimConfig,
    est: &EstimatorConfig,
) -> MonteCarloSummary {
    let stock: Vec<Vec<f64>> = trials.iter().map(|t| t.stocks.deltas()).collect();
    let trader: Vec<Vec<f64>> = trials.iter().map(|t| t.traders.deltas()).collect();
    MonteCarloSummary {
        sim: *sim,
        estimator: est.fingerprint(),
        rng: RNG_ALGORITHM.to_string(),
        stock: summarize_level(&stock),
        trader: summarize_level(&trader),
    }
}

/// Run the harness end to end. Fails when no trial fits a single stock.
pub fn run_monte_carlo(
    schedules: &[StockSchedule],
    sim: &SimConfig,
    est: &EstimatorConfig,
) -> Result<(Vec<TrialFits>, MonteCarloSummary)> {
    if schedules.is_empty() {
        return Err(Error::Data(
            "Monte Carlo needs at least one schedule".into(),
        ));
    }
    if sim.n_trials == 0 {
        return Err(Error::Config("Monte Carlo needs at least one trial".into()));
    }
    let trials = run_trials(schedules, sim, est);
    let summary = summarize(&trials, sim, est);
    if summary.stock.is_none() {
        return Err(Error::Numeric("no trial produced a stock-level fit".into()));
    }
    Ok((trials, summary))
}

fn trial_file(dir: &Path, trial: usize, level: &str) -> std::path::PathBuf {
    dir.join(format!("trial_{trial:04}_{level}.csv"))
}

pub fn write_trials(dir: &Path, trials: &[TrialFits]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (l, t) in trials.iter().enumerate() {
        write_fit_table(&trial_file(dir, l, "stock"), &t.stocks)?;
        write_fit_table(&trial_file(dir, l, "trader"), &t.traders)?;
    }
    Ok(())
}

/// Per-trial exponents, indexed by trial.
pub type TrialDeltas = Vec<Vec<f64>>;

/// Re-read per-trial tables written by `write_trials`.
pub fn read_trial_deltas(dir: &Path, n_trials: usize) -> Result<(TrialDeltas, TrialDeltas)> {
    let mut stock = Vec::with_capacity(n_trials);
    let mut trader = Vec::with_capacity(n_trials);
    for l in 0..n_trials {
        stock.push(
            read_fit_table(&trial_file(dir, l, "stock"))?
                .into_iter()
                .map(|r| r.delta)
                .collect(),
        );
        trader.push(
            read_fit_table(&trial_file(dir, l, "trader"))?
                .into_iter()
                .map(|r| r.delta)
                .collect(),
        );
    }
    Ok((stock, trader))
}

/// Flat `key = value` rendering, one field per line, in a fixed order.
pub fn render_summary(s: &MonteCarloSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "seed = {}", s.sim.seed);
    let _ = writeln!(out, "trials = {}", s.sim.n_trials);
    let _ = writeln!(out, "noise_scale = {}", s.sim.noise_scale);
    let _ = writeln!(out, "estimator = {}", s.estimator);
    let _ = writeln!(out, "rng = {}", s.rng);
    for (prefix, level) in [("stock", &s.stock), ("trader", &s.trader)] {
        match level {
            Some(l) => {
                let _ = writeln!(out, "{prefix}.mean_delta = {}", l.mean);
                let _ = writeln!(out, "{prefix}.mean_delta_se = {}", l.mean_se);
                let _ = writeln!(out, "{prefix}.sigma_delta = {}", l.sigma);
                let _ = writeln!(out, "{prefix}.sigma_delta_se = {}", l.sigma_se);
                let _ = writeln!(out, "{prefix}.bias = {}", l.bias);
                let _ = writeln!(out, "{prefix}.trials_used = {}", l.trial_means.len());
                let _ = writeln!(out, "{prefix}.trials_dropped = {}", l.dropped_trials);
                let means: Vec<String> = l.trial_means.iter().map(f64::to_string).collect();
                let _ = writeln!(out, "{prefix}.trial_means = {}", means.join(","));
            }
            None => {
                let _ = writeln!(out, "{prefix}.mean_delta = unavailable");
            }
        }
    }
    out
}

pub fn write_summary(path: &Path, s: &MonteCarloSummary) -> Result<()> {
    std::fs::write(path, render_summary(s)).map_err(|e| Error::io(path, e))
}

/// Parse a `key = value` file into a map.
pub fn read_key_values(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect())
}

/// A measured mean exponent together with the estimator it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaMean {
    pub level: Level,
    pub mean: f64,
    pub sem: f64,
    pub estimator: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corrected {
    pub mean: f64,
    pub se: f64,
    pub bias: f64,
}

/// Subtract the Monte Carlo bias; refuses when the estimator settings differ.
pub fn bias_correct(measured: &DeltaMean, mc: &MonteCarloSummary) -> Result<Corrected> {
    if measured.estimator != mc.estimator {
        return Err(Error::Config(format!(
            "estimator mismatch: measured with `{}`, simulated with `{}`",
            measured.estimator, mc.estimator
        )));
    }
    let level = match measured.level {
        Level::Stock => mc.stock.as_ref(),
        Level::Trader => mc.trader.as_ref(),
    }
    .ok_or_else(|| Error::Data("Monte Carlo summary has no fits at this level".into()))?;
    let se_mc = if level.mean_se.is_finite() {
        level.mean_se
    } else {
        0.0
    };
    Ok(Corrected {
        mean: measured.mean - level.bias,
        se: (measured.sem.powi(2) + se_mc.powi(2)).sqrt(),
        bias: level.bias,
    })
}
