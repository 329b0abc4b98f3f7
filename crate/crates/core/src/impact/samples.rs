use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metaorder::{DailyStats, Metaorder};
use crate::orderflow::DayStream;

/// Dimensionless peak impact of one metaorder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactSample {
    pub stock: String,
    pub trader: String,
    pub day: NaiveDate,
    pub r: u32,
    /// Q / V_D.
    pub q: f64,
    /// sign * (m(t_E + 1) - m(t_S)) / sigma_D.
    pub impact: f64,
    /// Liquidation horizon, seconds.
    pub horizon: f64,
}

#[derive(Debug, Default)]
pub struct SampleBuild {
    pub samples: Vec<ImpactSample>,
    /// Metaorders ending on the day's last tick (no post-trade midprice).
    pub dropped_last_tick: usize,
}

/// Peak impact for one day's metaorders. `midprice(t)` is the midprice just
/// before tick `t` (1-based) and may return `None` past the end of the day.
pub fn peak_impact(
    mo: &Metaorder,
    stats: &DailyStats,
    midprice: impl Fn(u32) -> Option<f64>,
) -> Option<(f64, f64)> {
    let before = midprice(mo.t_start)?;
    let after = midprice(mo.t_end + 1)?;
    let impact = mo.sign as f64 * (after - before) / stats.sigma_d;
    Some((mo.q as f64 / stats.v_d, impact))
}

pub fn compute_impact_samples(
    metaorders: &[Metaorder],
    stats: &DailyStats,
    ds: &DayStream,
) -> SampleBuild {
    let mid = |t: u32| {
        ds.ticks
            .get((t as usize).wrapping_sub(1))
            .map(|x| x.midprice)
    };
    let mut out = SampleBuild::default();
    for mo in metaorders {
        match peak_impact(mo, stats, mid) {
            Some((q, impact)) => out.samples.push(ImpactSample {
                stock: mo.stock.clone(),
                trader: mo.trader.clone(),
                day: mo.day,
                r: mo.r,
                q,
                impact,
                horizon: mo.horizon,
            }),
            None => out.dropped_last_tick += 1,
        }
    }
    out
}

/// Half-open liquidation-horizon window in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonWindow {
    pub lo_min: f64,
    pub hi_min: f64,
}

impl HorizonWindow {
    pub const fn new(lo_min: f64, hi_min: f64) -> Self {
        HorizonWindow { lo_min, hi_min }
    }

    pub fn contains(&self, seconds: f64) -> bool {
        seconds >= self.lo_min * 60.0 && seconds < self.hi_min * 60.0
    }
}

impl std::str::FromStr for HorizonWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("horizon window `{s}`: expected MIN_LO,MIN_HI"));
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let lo: f64 = a.trim().parse().map_err(|_| bad())?;
        let hi: f64 = b.trim().parse().map_err(|_| bad())?;
        if !(hi > lo) {
            return Err(bad());
        }
        Ok(HorizonWindow::new(lo, hi))
    }
}

/// The four liquidation-horizon buckets, in minutes.
pub const HORIZON_BUCKETS: [HorizonWindow; 4] = [
    HorizonWindow::new(1.0, 10.0),
    HorizonWindow::new(10.0, 30.0),
    HorizonWindow::new(30.0, 60.0),
    HorizonWindow::new(60.0, 300.0),
];

pub fn keep_sample(horizon: f64, min_horizon: f64, window: Option<HorizonWindow>) -> bool {
    horizon >= min_horizon && window.is_none_or(|w| w.contains(horizon))
}

pub fn filter_samples(
    samples: &[ImpactSample],
    min_horizon: f64,
    window: Option<HorizonWindow>,
) -> Vec<ImpactSample> {
    samples
        .iter()
        .filter(|s| keep_sample(s.horizon, min_horizon, window))
        .cloned()
        .collect()
}

pub const SAMPLE_HEADER: &[&str] = &["stock", "trader", "day", "r", "q", "impact", "horizon"];

pub fn write_samples(path: &Path, samples: &[ImpactSample]) -> Result<()> {
    let mut w = crate::io::csv_writer(path, SAMPLE_HEADER)?;
    for s in samples {
        w.serialize(s)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_samples(path: &Path) -> Result<Vec<ImpactSample>> {
    crate::io::read_table(path, SAMPLE_HEADER)
}
