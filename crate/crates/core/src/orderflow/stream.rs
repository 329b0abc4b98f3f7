use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::desks::DeskMap;
use super::events::{Action, OrderEvent};
use crate::error::{Error, Result};

pub const STREAM_HEADER: &[&str] = &[
    "day",
    "stock",
    "tick",
    "phys_time",
    "trader",
    "sign",
    "volume",
    "midprice",
];
pub const FLAGS_HEADER: &[&str] = &["day", "stock", "excluded", "reason"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    PriceLimit,
    CircuitBreaker,
    LiquiditySweep,
    ZeroVolatility,
    ZeroVolume,
    None,
}

impl ExclusionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            ExclusionReason::PriceLimit => "price_limit",
            ExclusionReason::CircuitBreaker => "circuit_breaker",
            ExclusionReason::LiquiditySweep => "liquidity_sweep",
            ExclusionReason::ZeroVolatility => "zero_volatility",
            ExclusionReason::ZeroVolume => "zero_volume",
            ExclusionReason::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayFlags {
    pub day: NaiveDate,
    pub stock: String,
    pub excluded: bool,
    pub reason: ExclusionReason,
}

/// Lookup of excluded (day, stock) pairs.
#[derive(Debug, Clone, Default)]
pub struct FlagTable {
    excluded: HashMap<(NaiveDate, String), ExclusionReason>,
}

impl FlagTable {
    pub fn from_flags(flags: impl IntoIterator<Item = DayFlags>) -> Self {
        let excluded = flags
            .into_iter()
            .filter(|f| f.excluded)
            .map(|f| ((f.day, f.stock), f.reason))
            .collect();
        FlagTable { excluded }
    }

    pub fn reason(&self, day: NaiveDate, stock: &str) -> Option<ExclusionReason> {
        self.excluded.get(&(day, stock.to_string())).copied()
    }

    pub fn len(&self) -> usize {
        self.excluded.len()
    }

    pub fn is_empty(&self) -> bool {
        self.excluded.is_empty()
    }
}

pub fn read_flags(path: &Path) -> Result<Vec<DayFlags>> {
    crate::io::read_table(path, FLAGS_HEADER)
}

pub fn write_flags(path: &Path, flags: &[DayFlags]) -> Result<()> {
    let mut w = crate::io::csv_writer(path, FLAGS_HEADER)?;
    for f in flags {
        w.serialize(f)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// One market order in row form, as in the reduced stream file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketOrderRecord {
    pub day: NaiveDate,
    pub stock: String,
    pub tick: u32,
    pub phys_time: f64,
    pub trader: String,
    pub sign: i8,
    pub volume: u64,
    /// Midprice just before this market order.
    pub midprice: f64,
}

/// Compact per-tick record inside a [`DayStream`]. `trader` indexes
/// `DayStream::traders`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tick {
    pub phys_time: f64,
    pub trader: u32,
    pub sign: i8,
    pub volume: u64,
    pub midprice: f64,
}

/// The market-order stream for one (day, stock). Tick `t` (1-based) is
/// `ticks[t - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DayStream {
    pub day: NaiveDate,
    pub stock: String,
    pub traders: Vec<String>,
    pub ticks: Vec<Tick>,
}

impl DayStream {
    pub fn new(day: NaiveDate, stock: impl Into<String>) -> Self {
        DayStream {
            day,
            stock: stock.into(),
            traders: Vec::new(),
            ticks: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.ticks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ticks.is_empty()
    }

    pub fn trader_index(&mut self, name: &str) -> u32 {
        match self.traders.iter().position(|t| t == name) {
            Some(i) => i as u32,
            None => {
                self.traders.push(name.to_string());
                (self.traders.len() - 1) as u32
            }
        }
    }

    pub fn records(&self) -> impl Iterator<Item = MarketOrderRecord> + '_ {
        self.ticks
            .iter()
            .enumerate()
            .map(move |(i, t)| MarketOrderRecord {
                day: self.day,
                stock: self.stock.clone(),
                tick: i as u32 + 1,
                phys_time: t.phys_time,
                trader: self.traders[t.trader as usize].clone(),
                sign: t.sign,
                volume: t.volume,
                midprice: t.midprice,
            })
    }

    /// Checks the record invariants: finite nondecreasing times, unit
    /// signs, positive volumes and midprices.
    pub fn validate(&self) -> std::result::Result<(), DropReason> {
        let mut prev = f64::NEG_INFINITY;
        for t in &self.ticks {
            if !(t.midprice.is_finite() && t.midprice > 0.0) {
                return Err(DropReason::MissingMidprice);
            }
            if !(t.phys_time >= prev) {
                return Err(DropReason::NonMonotoneTime);
            }
            if t.volume == 0 || (t.sign != 1 && t.sign != -1) {
                return Err(DropReason::BadRecord);
            }
            prev = t.phys_time;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DropReason {
    Flagged(ExclusionReason),
    MissingMidprice,
    NonMonotoneTime,
    NonConsecutiveTicks,
    BadRecord,
}

impl std::fmt::Display for DropReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DropReason::Flagged(r) => write!(f, "flagged:{}", r.as_str()),
            DropReason::MissingMidprice => f.write_str("missing_midprice"),
            DropReason::NonMonotoneTime => f.write_str("non_monotone_time"),
            DropReason::NonConsecutiveTicks => f.write_str("non_consecutive_ticks"),
            DropReason::BadRecord => f.write_str("bad_record"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DroppedDay {
    pub day: NaiveDate,
    pub stock: String,
    pub reason: DropReason,
}

#[derive(Debug, Default)]
pub struct StreamBuild {
    /// Sorted by (stock, day).
    pub days: Vec<DayStream>,
    pub dropped: Vec<DroppedDay>,
}

fn finish(
    groups: BTreeMap<(String, NaiveDate), DayStream>,
    mut dropped: Vec<DroppedDay>,
    flags: &FlagTable,
) -> StreamBuild {
    let mut days = Vec::with_capacity(groups.len());
    for ((stock, day), ds) in groups {
        if let Some(r) = flags.reason(day, &stock) {
            dropped.push(DroppedDay {
                day,
                stock,
                reason: DropReason::Flagged(r),
            });
            continue;
        }
        match ds.validate() {
            Ok(()) => days.push(ds),
            Err(reason) => dropped.push(DroppedDay { day, stock, reason }),
        }
    }
    dropped.sort_by(|a, b| (&a.stock, a.day).cmp(&(&b.stock, b.day)));
    dropped.dedup();
    StreamBuild { days, dropped }
}

/// Turn execute events into per-(day, stock) market-order streams. The
/// trader of each tick is the desk of the aggressing virtual server.
/// `desk_of` resolves (stock, server) to a desk id.
pub fn build_market_order_stream<'a, I, F>(events: I, desk_of: F, flags: &FlagTable) -> StreamBuild
where
    I: IntoIterator<Item = &'a OrderEvent>,
    F: Fn(&str, &str) -> Option<String>,
{
    let mut groups: BTreeMap<(String, NaiveDate), DayStream> = BTreeMap::new();
    for ev in events.into_iter().filter(|e| e.action == Action::Execute) {
        let key = (ev.stock.clone(), ev.day);
        let ds = groups
            .entry(key)
            .or_insert_with(|| DayStream::new(ev.day, ev.stock.clone()));
        let desk =
            desk_of(&ev.stock, &ev.virtual_server).unwrap_or_else(|| ev.virtual_server.clone());
        let trader = ds.trader_index(&desk);
        ds.ticks.push(Tick {
            phys_time: ev.phys_time,
            trader,
            sign: ev.side.sign(),
            volume: ev.volume,
            midprice: ev.midprice_before().unwrap_or(f64::NAN),
        });
    }
    // Missing-midprice days are reported by `validate` in `finish`.
    finish(groups, Vec::new(), flags)
}

/// Convenience wrapper when a single desk map covers all events.
pub fn build_stream_with_desks<'a, I>(events: I, desks: &DeskMap, flags: &FlagTable) -> StreamBuild
where
    I: IntoIterator<Item = &'a OrderEvent>,
{
    build_market_order_stream(events, |_, s| desks.desk_of(s).map(str::to_string), flags)
}

/// Read the reduced market-order stream. Ticks must be consecutive from 1
/// within each (day, stock); days violating that are dropped.
pub fn read_stream(path: &Path, flags: &FlagTable) -> Result<StreamBuild> {
    let mut rdr = crate::io::csv_reader(path, STREAM_HEADER)?;
    let mut groups: BTreeMap<(String, NaiveDate), DayStream> = BTreeMap::new();
    let mut broken: BTreeMap<(String, NaiveDate), DropReason> = BTreeMap::new();
    for row in rdr.deserialize::<MarketOrderRecord>() {
        let r = row?;
        let key = (r.stock.clone(), r.day);
        let ds = groups
            .entry(key.clone())
            .or_insert_with(|| DayStream::new(r.day, r.stock.clone()));
        if r.tick as usize != ds.ticks.len() + 1 {
            broken.entry(key).or_insert(DropReason::NonConsecutiveTicks);
        }
        let trader = ds.trader_index(&r.trader);
        ds.ticks.push(Tick {
            phys_time: r.phys_time,
            trader,
            sign: r.sign,
            volume: r.volume,
            midprice: r.midprice,
        });
    }
    let mut dropped = Vec::new();
    for ((stock, day), reason) in broken {
        groups.remove(&(stock.clone(), day));
        dropped.push(DroppedDay { day, stock, reason });
    }
    Ok(finish(groups, dropped, flags))
}

pub fn write_stream(path: &Path, days: &[DayStream]) -> Result<()> {
    let mut w = crate::io::csv_writer(path, STREAM_HEADER)?;
    for ds in days {
        for r in ds.records() {
            w.serialize(r)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
