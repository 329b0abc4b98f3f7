//! Metaorder execution schedules: who trades when, in which run, with how
//! much cumulative volume. Signs live outside the schedule so one schedule
//! can be re-signed for every trial without copying it.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::metaorder::{extract_with_slots, DailyStats};
use crate::orderflow::events::DAY_SECONDS;
use crate::orderflow::stream::DayStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledTick {
    pub phys_time: f64,
    /// Index into the day's metaorders.
    pub metaorder: u32,
    /// Cumulative volume of the metaorder up to and including this child.
    pub cumvol: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledMetaorder {
    /// Index into the stock's trader names.
    pub trader: u32,
    /// Run index within (trader, day), starting at 1.
    pub r: u32,
    /// Sign the schedule was recorded with; trials replace it.
    pub sign: i8,
    pub q: u64,
    pub len: u32,
    /// 1-based ticks of the first and last child.
    pub t_start: u32,
    pub t_end: u32,
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DaySchedule {
    pub day: NaiveDate,
    /// Calibrated daily volatility in price units.
    pub sigma_d: f64,
    /// Daily volume used to make child volumes dimensionless.
    pub v_d: f64,
    pub ticks: Vec<ScheduledTick>,
    pub metaorders: Vec<ScheduledMetaorder>,
}

impl DaySchedule {
    /// A day without usable calibration is skipped by the simulator.
    pub fn is_calibrated(&self) -> bool {
        self.sigma_d.is_finite() && self.sigma_d > 0.0 && self.v_d.is_finite() && self.v_d > 0.0
    }

    /// Check tick order, cumulative volumes and metaorder bookkeeping.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Data(format!("schedule {}: {msg}", self.day)));
        let mut last_cum = vec![0u64; self.metaorders.len()];
        let mut seen = vec![0u32; self.metaorders.len()];
        let mut prev_time = 0.0;
        for (i, t) in self.ticks.iter().enumerate() {
            let tick = i as u32 + 1;
            if !(0.0..=DAY_SECONDS).contains(&t.phys_time) || t.phys_time < prev_time {
                return bad(format!("tick {tick} has time {}", t.phys_time));
            }
            prev_time = t.phys_time;
            let m = t.metaorder as usize;
            let Some(mo) = self.metaorders.get(m) else {
                return bad(format!("tick {tick} points at metaorder {m}"));
            };
            if t.cumvol <= last_cum[m] {
                return bad(format!(
                    "metaorder {m} cumulative volume not increasing at tick {tick}"
                ));
            }
            if seen[m] == 0 && mo.t_start != tick {
                return bad(format!(
                    "metaorder {m} starts at tick {tick}, recorded {}",
                    mo.t_start
                ));
            }
            last_cum[m] = t.cumvol;
            seen[m] += 1;
            if seen[m] == mo.len && (mo.t_end != tick || t.cumvol != mo.q) {
                return bad(format!("metaorder {m} ends inconsistently at tick {tick}"));
            }
        }
        for (m, mo) in self.metaorders.iter().enumerate() {
            if seen[m] != mo.len || mo.len == 0 {
                return bad(format!(
                    "metaorder {m} has {} children, recorded {}",
                    seen[m], mo.len
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StockSchedule {
    pub stock: String,
    /// Square-root prefactor injected for this stock.
    pub c: f64,
    pub traders: Vec<String>,
    /// Days in date order.
    pub days: Vec<DaySchedule>,
}

impl StockSchedule {
    pub fn n_metaorders(&self) -> usize {
        self.days.iter().map(|d| d.metaorders.len()).sum()
    }

    pub fn trader_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.traders.len()];
        for d in &self.days {
            for m in &d.metaorders {
                counts[m.trader as usize] += 1;
            }
        }
        counts
    }

    /// Recorded signs, day by day.
    pub fn signs(&self) -> Vec<Vec<i8>> {
        self.days
            .iter()
            .map(|d| d.metaorders.iter().map(|m| m.sign).collect())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c >= 0.0) {
            return Err(Error::Data(format!(
                "stock {}: prefactor {} is invalid",
                self.stock, self.c
            )));
        }
        for w in self.days.windows(2) {
            if w[0].day >= w[1].day {
                return Err(Error::Data(format!(
                    "stock {}: days out of order",
                    self.stock
                )));
            }
        }
        for d in &self.days {
            d.validate()?;
            if d.metaorders
                .iter()
                .any(|m| m.trader as usize >= self.traders.len())
            {
                return Err(Error::Data(format!(
                    "stock {}: unknown trader index",
                    self.stock
                )));
            }
        }
        Ok(())
    }
}

/// Turn real streams into schedules. `stats` gives each day's volatility and
/// volume; `prefactors` the per-stock square-root prefactor. Stocks without a
/// prefactor are left out, days without stats are skipped.
pub fn schedules_from_streams(
    days: &[DayStream],
    stats: &BTreeMap<(String, NaiveDate), DailyStats>,
    prefactors: &BTreeMap<String, f64>,
) -> Vec<StockSchedule> {
    let mut out: BTreeMap<&str, StockSchedule> = BTreeMap::new();
    let mut trader_ids: BTreeMap<&str, BTreeMap<String, u32>> = BTreeMap::new();
    for ds in days {
        let Some(&c) = prefactors.get(&ds.stock) else {
            continue;
        };
        let Some(st) = stats.get(&(ds.stock.clone(), ds.day)) else {
            continue;
        };
        let (mos, slots) = extract_with_slots(ds);
        let sched = out
            .entry(ds.stock.as_str())
            .or_insert_with(|| StockSchedule {
                stock: ds.stock.clone(),
                c,
                traders: Vec::new(),
                days: Vec::new(),
            });
        let ids = trader_ids.entry(ds.stock.as_str()).or_default();
        let metaorders = mos
            .iter()
            .map(|m| {
                let next = ids.len() as u32;
                let trader = *ids.entry(m.trader.clone()).or_insert_with(|| {
                    sched.traders.push(m.trader.clone());
                    next
                });
                ScheduledMetaorder {
                    trader,
                    r: m.r,
                    sign: m.sign,
                    q: m.q,
                    len: m.len() as u32,
                    t_start: m.t_start,
                    t_end: m.t_end,
                    horizon: m.horizon,
                }
            })
            .collect();
        let ticks = ds
            .ticks
            .iter()
            .zip(&slots)
            .map(|(t, s)| ScheduledTick {
                phys_time: t.phys_time,
                metaorder: s.metaorder as u32,
                cumvol: mos[s.metaorder].child_cumvol[s.k as usize - 1],
            })
            .collect();
        sched.days.push(DaySchedule {
            day: ds.day,
            sigma_d: st.sigma_d,
            v_d: st.v_d,
            ticks,
            metaorders,
        });
    }
    let mut v: Vec<StockSchedule> = out.into_values().collect();
    for s in &mut v {
        s.days.sort_by_key(|d| d.day);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orderflow::stream::Tick;

    fn day() -> NaiveDate {
        NaiveDate::from_ymd_opt(2016, 3, 1).unwrap()
    }

    fn stream() -> DayStream {
        let mut ds = DayStream::new(day(), "S");
        let a = ds.trader_index("A");
        let b = ds.trader_index("B");
        // A: +10 +5 -3, B: -7 -1
        let rows = [(a, 1, 10), (b, -1, 7), (a, 1, 5), (b, -1, 1), (a, -1, 3)];
        for (i, (trader, sign, volume)) in rows.into_iter().enumerate() {
            ds.ticks.push(Tick {
                phys_time: 100.0 * i as f64,
                trader,
                sign,
                volume,
                midprice: 100.0,
            });
        }
        ds
    }

    #[test]
    fn real_stream_becomes_valid_schedule() {
        let mut stats = BTreeMap::new();
        stats.insert(
            ("S".to_string(), day()),
            DailyStats {
                day: day(),
                n: 5,
                sigma_d: 2.0,
                v_d: 26.0,
            },
        );
        let prefactors = BTreeMap::from([("S".to_string(), 0.7)]);
        let s = schedules_from_streams(&[stream()], &stats, &prefactors);
        assert_eq!(s.len(), 1);
        let s = &s[0];
        s.validate().unwrap();
        assert_eq!(s.n_metaorders(), 3);
        let d = &s.days[0];
        let cum: Vec<u64> = d.ticks.iter().map(|t| t.cumvol).collect();
        assert_eq!(cum, vec![10, 7, 15, 8, 3]);
        let lens: Vec<u32> = d.metaorders.iter().map(|m| m.len).collect();
        assert_eq!(lens.iter().sum::<u32>(), 5);
        assert_eq!(s.trader_counts().iter().sum::<usize>(), 3);
    }

    #[test]
    fn missing_prefactor_or_stats_skips() {
        let prefactors = BTreeMap::from([("S".to_string(), 0.7)]);
        assert!(schedules_from_streams(&[stream()], &BTreeMap::new(), &prefactors).is_empty());
    }

    #[test]
    fn validation_catches_broken_cumvol() {
        let d = DaySchedule {
            day: day(),
            sigma_d: 1.0,
            v_d: 10.0,
            ticks: vec![
                ScheduledTick {
                    phys_time: 1.0,
                    metaorder: 0,
                    cumvol: 4,
                },
                ScheduledTick {
                    phys_time: 2.0,
                    metaorder: 0,
                    cumvol: 4,
                },
            ],
            metaorders: vec![ScheduledMetaorder {
                trader: 0,
                r: 1,
                sign: 1,
                q: 4,
                len: 2,
                t_start: 1,
                t_end: 2,
                horizon: 1.0,
            }],
        };
        assert!(d.validate().is_err());
    }
}
