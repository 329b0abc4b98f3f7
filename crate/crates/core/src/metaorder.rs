//! Daily normalizers and metaorder extraction.
//!
//! A metaorder is a maximal run of same-sign market orders placed by one
//! trader within one day. Runs are computed on each trader's own reduced
//! sequence, so other traders' orders in between never break a run.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orderflow::{DayStream, ExclusionReason};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DailyStats {
    pub day: NaiveDate,
    pub n: usize,
    /// max - min of the day's midprices.
    pub sigma_d: f64,
    /// Total transacted volume.
    pub v_d: f64,
}

impl DailyStats {
    pub fn exclusion(&self) -> Option<ExclusionReason> {
        if self.v_d <= 0.0 {
            Some(ExclusionReason::ZeroVolume)
        } else if self.sigma_d <= 0.0 {
            Some(ExclusionReason::ZeroVolatility)
        } else {
            None
        }
    }
}

/// `None` for an empty day.
pub fn compute_daily_stats(ds: &DayStream) -> Option<DailyStats> {
    if ds.ticks.is_empty() {
        return None;
    }
    let (mut lo, mut hi, mut vol) = (f64::INFINITY, f64::NEG_INFINITY, 0u64);
    for t in &ds.ticks {
        lo = lo.min(t.midprice);
        hi = hi.max(t.midprice);
        vol += t.volume;
    }
    Some(DailyStats {
        day: ds.day,
        n: ds.ticks.len(),
        sigma_d: hi - lo,
        v_d: vol as f64,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metaorder {
    pub day: NaiveDate,
    pub stock: String,
    pub trader: String,
    /// 1-based index among this trader's metaorders of the day.
    pub r: u32,
    pub sign: i8,
    /// Total volume, unsigned. The signed volume is `sign * q`.
    pub q: u64,
    /// Ticks (1-based) of the first and last child.
    pub t_start: u32,
    pub t_end: u32,
    /// Liquidation horizon in seconds.
    pub horizon: f64,
    /// Cumulative child volumes; the last entry equals `q`.
    pub child_cumvol: Vec<u64>,
}

impl Metaorder {
    pub fn len(&self) -> usize {
        self.child_cumvol.len()
    }

    pub fn is_empty(&self) -> bool {
        self.child_cumvol.is_empty()
    }

    pub fn signed_q(&self) -> i64 {
        self.sign as i64 * self.q as i64
    }

    pub fn child_volumes(&self) -> impl Iterator<Item = u64> + '_ {
        let mut prev = 0;
        self.child_cumvol.iter().map(move |&c| {
            let v = c - prev;
            prev = c;
            v
        })
    }
}

/// Per-tick position inside the extracted metaorders: which metaorder
/// (index into the returned list) and which child (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChildSlot {
    pub metaorder: usize,
    pub k: u32,
}

/// Segment one day's stream into metaorders, ordered by first tick.
pub fn extract_metaorders(ds: &DayStream) -> Vec<Metaorder> {
    extract_with_slots(ds).0
}

pub fn extract_with_slots(ds: &DayStream) -> (Vec<Metaorder>, Vec<ChildSlot>) {
    let mut out: Vec<Metaorder> = Vec::new();
    let mut slots = Vec::with_capacity(ds.ticks.len());
    // per trader: index of the open run and runs seen so far
    let mut open: Vec<Option<usize>> = vec![None; ds.traders.len()];
    let mut count: Vec<u32> = vec![0; ds.traders.len()];

    for (i, t) in ds.ticks.iter().enumerate() {
        let tick = i as u32 + 1;
        let who = t.trader as usize;
        let current = open[who].filter(|&m| out[m].sign == t.sign);
        let m = match current {
            Some(m) => {
                let mo = &mut out[m];
                let cum = mo.q + t.volume;
                mo.q = cum;
                mo.child_cumvol.push(cum);
                mo.t_end = tick;
                mo.horizon = t.phys_time - ds.ticks[mo.t_start as usize - 1].phys_time;
                m
            }
            None => {
                count[who] += 1;
                out.push(Metaorder {
                    day: ds.day,
                    stock: ds.stock.clone(),
                    trader: ds.traders[who].clone(),
                    r: count[who],
                    sign: t.sign,
                    q: t.volume,
                    t_start: tick,
                    t_end: tick,
                    horizon: 0.0,
                    child_cumvol: vec![t.volume],
                });
                open[who] = Some(out.len() - 1);
                out.len() - 1
            }
        };
        slots.push(ChildSlot {
            metaorder: m,
            k: out[m].child_cumvol.len() as u32,
        });
    }
    (out, slots)
}

/// Metaorder counts per stock and per (stock, trader).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StockCatalog {
    pub per_stock: BTreeMap<String, usize>,
    pub per_trader: BTreeMap<(String, String), usize>,
    /// A stock is liquid when its count is strictly above this.
    pub liquid_threshold: usize,
}

/// Paper-scale liquidity cut: stocks with at most this many metaorders are
/// excluded.
pub const DEFAULT_LIQUID_THRESHOLD: usize = 100_000;

impl StockCatalog {
    pub fn is_liquid(&self, stock: &str) -> bool {
        self.per_stock
            .get(stock)
            .is_some_and(|&m| m > self.liquid_threshold)
    }

    pub fn liquid_stocks(&self) -> impl Iterator<Item = &str> {
        self.per_stock
            .iter()
            .filter(|(_, &m)| m > self.liquid_threshold)
            .map(|(s, _)| s.as_str())
    }

    pub fn trader_count(&self, stock: &str, trader: &str) -> usize {
        self.per_trader
            .get(&(stock.to_string(), trader.to_string()))
            .copied()
            .unwrap_or(0)
    }
}

pub fn build_catalog<'a, I>(metaorders: I, liquid_threshold: usize) -> StockCatalog
where
    I: IntoIterator<Item = &'a Metaorder>,
{
    let mut cat = StockCatalog {
        liquid_threshold,
        ..Default::default()
    };
    for m in metaorders {
        *cat.per_stock.entry(m.stock.clone()).or_default() += 1;
        *cat.per_trader
            .entry((m.stock.clone(), m.trader.clone()))
            .or_default() += 1;
    }
    cat
}

/// Row form of the metaorder table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaorderRow {
    pub day: NaiveDate,
    pub stock: String,
    pub trader: String,
    pub r: u32,
    pub sign: i8,
    #[serde(rename = "Q")]
    pub q: i64,
    #[serde(rename = "L")]
    pub l: usize,
    pub t_start: u32,
    pub t_end: u32,
    #[serde(rename = "T_seconds")]
    pub t_seconds: f64,
}

impl From<&Metaorder> for MetaorderRow {
    fn from(m: &Metaorder) -> Self {
        MetaorderRow {
            day: m.day,
            stock: m.stock.clone(),
            trader: m.trader.clone(),
            r: m.r,
            sign: m.sign,
            q: m.signed_q(),
            l: m.len(),
            t_start: m.t_start,
            t_end: m.t_end,
            t_seconds: m.horizon,
        }
    }
}

pub const METAORDER_HEADER: &[&str] = &[
    "day",
    "stock",
    "trader",
    "r",
    "sign",
    "Q",
    "L",
    "t_start",
    "t_end",
    "T_seconds",
];

pub fn write_metaorders<'a>(
    path: &Path,
    metaorders: impl IntoIterator<Item = &'a Metaorder>,
) -> Result<()> {
    let mut w = crate::io::csv_writer(path, METAORDER_HEADER)?;
    for m in metaorders {
        w.serialize(MetaorderRow::from(m))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_metaorders(path: &Path) -> Result<Vec<MetaorderRow>> {
    crate::io::read_table(path, METAORDER_HEADER)
}

#[derive(Serialize)]
struct DailyStatsRow<'a> {
    day: NaiveDate,
    stock: &'a str,
    #[serde(rename = "sigma_D")]
    sigma_d: f64,
    #[serde(rename = "V_D")]
    v_d: f64,
    #[serde(rename = "N")]
    n: usize,
}

pub fn write_daily_stats<'a>(
    path: &Path,
    stats: impl IntoIterator<Item = (&'a str, &'a DailyStats)>,
) -> Result<()> {
    let mut w = crate::io::csv_writer(path, &["day", "stock", "sigma_D", "V_D", "N"])?;
    for (stock, s) in stats {
        w.serialize(DailyStatsRow {
            day: s.day,
            stock,
            sigma_d: s.sigma_d,
            v_d: s.v_d,
            n: s.n,
        })?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orderflow::Tick;

    fn day() -> NaiveDate {
        NaiveDate::from_ymd_opt(2017, 6, 1).unwrap()
    }

    fn stream(rows: &[(&str, i64, f64)]) -> DayStream {
        let mut ds = DayStream::new(day(), "S");
        for (k, &(who, v, m)) in rows.iter().enumerate() {
            let trader = ds.trader_index(who);
            ds.ticks.push(Tick {
                phys_time: k as f64 * 10.0,
                trader,
                sign: v.signum() as i8,
                volume: v.unsigned_abs(),
                midprice: m,
            });
        }
        ds
    }

    #[test]
    fn daily_stats_definitions() {
        let ds = stream(&[
            ("a", 10, 100.0),
            ("a", 20, 102.0),
            ("b", -30, 99.0),
            ("b", 40, 101.0),
        ]);
        let s = compute_daily_stats(&ds).unwrap();
        assert_eq!(s.sigma_d, 3.0);
        assert_eq!(s.v_d, 100.0);
        assert_eq!(s.n, 4);
        assert_eq!(s.exclusion(), None);

        let flat = stream(&[("a", 10, 100.0), ("a", -5, 100.0)]);
        assert_eq!(
            compute_daily_stats(&flat).unwrap().exclusion(),
            Some(ExclusionReason::ZeroVolatility)
        );
        assert!(compute_daily_stats(&DayStream::new(day(), "S")).is_none());
    }

    #[test]
    fn worked_metaorder_example() {
        let vols = [10, 10, 1, 5, -3, -2, -1, 100];
        let rows: Vec<_> = vols.iter().map(|&v| ("i", v, 100.0)).collect();
        let mos = extract_metaorders(&stream(&rows));
        let got: Vec<(i64, usize)> = mos.iter().map(|m| (m.signed_q(), m.len())).collect();
        assert_eq!(got, vec![(26, 4), (-6, 3), (100, 1)]);
        assert_eq!(mos[0].child_cumvol, vec![10, 20, 21, 26]);
        assert_eq!((mos[1].t_start, mos[1].t_end), (5, 7));
        assert_eq!(mos[1].horizon, 20.0);
        assert_eq!(mos[2].horizon, 0.0);
        assert_eq!(mos.iter().map(|m| m.r).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn other_traders_do_not_break_runs() {
        let ds = stream(&[
            ("a", 1, 1.0),
            ("b", -1, 1.0),
            ("a", 2, 1.0),
            ("b", -4, 1.0),
            ("a", -1, 1.0),
        ]);
        let (mos, slots) = extract_with_slots(&ds);
        assert_eq!(mos.len(), 3);
        assert_eq!(
            (mos[0].trader.as_str(), mos[0].q, mos[0].len()),
            ("a", 3, 2)
        );
        assert_eq!(
            (mos[1].trader.as_str(), mos[1].q, mos[1].len()),
            ("b", 5, 2)
        );
        assert_eq!(mos[2].sign, -1);
        assert_eq!(slots[2], ChildSlot { metaorder: 0, k: 2 });
        assert_eq!(slots[4], ChildSlot { metaorder: 2, k: 1 });
    }

    fn mo(stock: &str, trader: &str) -> Metaorder {
        Metaorder {
            day: day(),
            stock: stock.into(),
            trader: trader.into(),
            r: 1,
            sign: 1,
            q: 1,
            t_start: 1,
            t_end: 1,
            horizon: 0.0,
            child_cumvol: vec![1],
        }
    }

    #[test]
    fn liquidity_is_strict() {
        let mut cat = StockCatalog {
            liquid_threshold: DEFAULT_LIQUID_THRESHOLD,
            ..Default::default()
        };
        cat.per_stock.insert("A".into(), 100_000);
        cat.per_stock.insert("B".into(), 100_001);
        assert!(!cat.is_liquid("A"));
        assert!(cat.is_liquid("B"));
        assert_eq!(cat.liquid_stocks().collect::<Vec<_>>(), vec!["B"]);

        let list = [mo("A", "x"), mo("A", "y"), mo("A", "x"), mo("B", "x")];
        let cat = build_catalog(&list, 1);
        assert_eq!(cat.per_stock["A"], 3);
        assert_eq!(cat.trader_count("A", "x"), 2);
        assert!(cat.is_liquid("A"));
        assert!(!cat.is_liquid("B"));
    }

    #[test]
    fn metaorder_csv_round_trip() {
        let ds = stream(&[("a", 3, 1.0), ("a", 4, 1.0), ("a", -2, 1.0)]);
        let mos = extract_metaorders(&ds);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        write_metaorders(&p, &mos).unwrap();
        let header = std::fs::read_to_string(&p).unwrap();
        assert!(header.starts_with("day,stock,trader,r,sign,Q,L,t_start,t_end,T_seconds\n"));
        let rows = read_metaorders(&p).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[1].q, rows[1].l), (-2, 1));
    }
}
