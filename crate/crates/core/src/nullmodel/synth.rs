//! Synthetic metaorder schedules with power-law sizes and lengths.
//!
//! Each day's metaorders run back to back in a random order, so a trader's
//! runs never interleave and tick-level run extraction recovers the schedule
//! exactly when signs alternate. Tick times are uniform over the continuous
//! sessions.

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Pareto, Zeta};
use serde::{Deserialize, Serialize};

use super::rng::{purpose, stream_rng};
use super::schedule::{DaySchedule, ScheduledMetaorder, ScheduledTick, StockSchedule};
use crate::error::{Error, Result};
use crate::impact::binning::Binning;
use crate::orderflow::events::{AFTERNOON_OPEN, DAY_SECONDS, MORNING_CLOSE};

/// Daily volume used by grid normalization. Large enough that rounding a
/// bin center to whole shares moves it by less than 1e-9 relative.
pub const GRID_VOLUME: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum VolumeLaw {
    /// Density proportional to `q^(-beta-1)` above `q_min` shares.
    Pareto { beta: f64, q_min: f64 },
    /// Uniform in `log q` over `[lo, hi)` shares.
    LogUniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum LengthLaw {
    /// `P(L) proportional to L^(-alpha-1)`, truncated at `max_len`.
    Zeta {
        alpha: f64,
        max_len: u32,
    },
    Fixed {
        len: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Normalization {
    /// V_D is the day's total traded volume.
    DailyTotal,
    /// `Q / unit` is snapped to the nearest bin center and V_D is
    /// `GRID_VOLUME`, so every dimensionless volume sits on a bin center.
    Grid { unit: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub stocks: usize,
    pub metaorders_per_stock: usize,
    pub metaorders_per_day: usize,
    pub traders: usize,
    pub volume: VolumeLaw,
    pub length: LengthLaw,
    pub normalization: Normalization,
    /// Prefactors are drawn uniformly from `[c_lo, c_hi]`.
    pub c_lo: f64,
    pub c_hi: f64,
    /// Daily volatilities are drawn uniformly from `[sigma_lo, sigma_hi]`.
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub start_day: NaiveDate,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            stocks: 5,
            metaorders_per_stock: 10_000,
            metaorders_per_day: 200,
            traders: 10,
            volume: VolumeLaw::Pareto {
                beta: 1.5,
                q_min: 100.0,
            },
            length: LengthLaw::Zeta {
                alpha: 1.5,
                max_len: 200,
            },
            normalization: Normalization::DailyTotal,
            c_lo: 0.5,
            c_hi: 1.5,
            sigma_lo: 5.0,
            sigma_hi: 20.0,
            start_day: NaiveDate::from_ymd_opt(2016, 1, 4).expect("valid date"),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(format!("synthetic schedule: {msg}")));
        if self.stocks == 0
            || self.metaorders_per_stock == 0
            || self.metaorders_per_day == 0
            || self.traders == 0
        {
            return bad("stocks, metaorders and traders must be positive");
        }
        if !(self.c_lo >= 0.0 && self.c_lo <= self.c_hi && self.c_hi.is_finite()) {
            return bad("need 0 <= c_lo <= c_hi");
        }
        if !(self.sigma_lo > 0.0 && self.sigma_lo <= self.sigma_hi && self.sigma_hi.is_finite()) {
            return bad("need 0 < sigma_lo <= sigma_hi");
        }
        match self.volume {
            VolumeLaw::Pareto { beta, q_min } if !(beta > 0.0 && q_min >= 1.0) => {
                return bad("Pareto volumes need beta > 0 and q_min >= 1")
            }
            VolumeLaw::LogUniform { lo, hi } if !(lo >= 1.0 && lo < hi && hi.is_finite()) => {
                return bad("log-uniform volumes need 1 <= lo < hi")
            }
            _ => {}
        }
        let max_len = match self.length {
            LengthLaw::Zeta { alpha, max_len } => {
                if !(alpha > 0.0) || max_len == 0 {
                    return bad("zeta lengths need alpha > 0 and max_len >= 1");
                }
                max_len
            }
            LengthLaw::Fixed { len } => {
                if len == 0 {
                    return bad("fixed length must be positive");
                }
                len
            }
        };
        // every child needs a tick of its own within the day's tick budget
        let ticks = max_len as u64 * self.metaorders_per_day as u64;
        if ticks > u32::MAX as u64 {
            return bad("metaorders_per_day * max length exceeds the tick range");
        }
        if let Normalization::Grid { unit } = self.normalization {
            if !(unit > 0.0 && unit.is_finite()) {
                return bad("grid unit must be positive");
            }
        }
        Ok(())
    }
}

/// Sign-alternating per trader and day, so run extraction on the rendered
/// stream reproduces the schedule.
pub fn synth_schedules(cfg: &SynthConfig, binning: Binning) -> Result<Vec<StockSchedule>> {
    cfg.validate()?;
    (0..cfg.stocks)
        .map(|s| synth_stock(cfg, binning, &format!("S{s:04}")))
        .collect()
}

fn synth_stock(cfg: &SynthConfig, binning: Binning, stock: &str) -> Result<StockSchedule> {
    let mut rng = stream_rng(cfg.seed, stock, 0, purpose::SCHEDULE);
    let c = cfg.c_lo + (cfg.c_hi - cfg.c_lo) * rng.random::<f64>();
    let traders = (0..cfg.traders).map(|i| format!("T{i:03}")).collect();
    let zeta = match cfg.length {
        LengthLaw::Zeta { alpha, .. } => {
            Some(Zeta::new(alpha + 1.0).map_err(|e| Error::Config(e.to_string()))?)
        }
        LengthLaw::Fixed { .. } => None,
    };
    let pareto = match cfg.volume {
        VolumeLaw::Pareto { beta, q_min } => {
            Some(Pareto::new(q_min, beta).map_err(|e| Error::Config(e.to_string()))?)
        }
        VolumeLaw::LogUniform { .. } => None,
    };

    let mut days = Vec::new();
    let mut date = cfg.start_day;
    let mut remaining = cfg.metaorders_per_stock;
    while remaining > 0 {
        while matches!(date.weekday(), Weekday::Sat | Weekday::Sun) {
            date += Duration::days(1);
        }
        let n = remaining.min(cfg.metaorders_per_day);
        remaining -= n;

        // sizes and lengths
        let mut shapes: Vec<(u64, u32)> = Vec::with_capacity(n);
        for _ in 0..n {
            let len = match (cfg.length, &zeta) {
                (LengthLaw::Fixed { len }, _) => len,
                (LengthLaw::Zeta { max_len, .. }, Some(z)) => loop {
                    let l = z.sample(&mut rng);
                    if l <= max_len as f64 {
                        break l as u32;
                    }
                },
                _ => unreachable!("zeta law built above"),
            };
            let mut attempts = 0u32;
            let q = loop {
                attempts += 1;
                if attempts > 10_000 {
                    return Err(Error::Config(
                        "grid normalization: volumes almost never land inside the bin range".into(),
                    ));
                }
                let raw = match (cfg.volume, &pareto) {
                    (VolumeLaw::Pareto { .. }, Some(p)) => p.sample(&mut rng),
                    (VolumeLaw::LogUniform { lo, hi }, _) => {
                        (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp()
                    }
                    _ => unreachable!("pareto law built above"),
                };
                match cfg.normalization {
                    Normalization::DailyTotal => break (raw.round() as u64).max(len as u64),
                    Normalization::Grid { unit } => {
                        if let Some(k) = nearest_center(binning, raw / unit) {
                            break (binning.center(k) * GRID_VOLUME).round() as u64;
                        }
                    }
                }
            };
            shapes.push((q, len));
        }
        let v_d = match cfg.normalization {
            Normalization::DailyTotal => shapes.iter().map(|s| s.0 as f64).sum(),
            Normalization::Grid { .. } => GRID_VOLUME,
        };
        let sigma_d = cfg.sigma_lo + (cfg.sigma_hi - cfg.sigma_lo) * rng.random::<f64>();

        // back-to-back layout in random order over sorted session times
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let n_ticks: usize = shapes.iter().map(|s| s.1 as usize).sum();
        let mut times: Vec<f64> = (0..n_ticks).map(|_| session_time(rng.random())).collect();
        times.sort_by(f64::total_cmp);

        let mut metaorders = Vec::with_capacity(n);
        let mut ticks = Vec::with_capacity(n_ticks);
        let mut runs = vec![0u32; cfg.traders];
        let mut last_sign: Vec<Option<i8>> = vec![None; cfg.traders];
        for &i in &order {
            let (q, len) = shapes[i];
            let trader = rng.random_range(0..cfg.traders);
            let sign = match last_sign[trader] {
                Some(s) => -s,
                None => {
                    if rng.random::<bool>() {
                        1
                    } else {
                        -1
                    }
                }
            };
            last_sign[trader] = Some(sign);
            runs[trader] += 1;
            let t_start = ticks.len() as u32 + 1;
            let idx = metaorders.len() as u32;
            for cum in split_volume(q, len, &mut rng) {
                ticks.push(ScheduledTick {
                    phys_time: times[ticks.len()],
                    metaorder: idx,
                    cumvol: cum,
                });
            }
            let t_end = ticks.len() as u32;
            metaorders.push(ScheduledMetaorder {
                trader: trader as u32,
                r: runs[trader],
                sign,
                q,
                len,
                t_start,
                t_end,
                horizon: times[t_end as usize - 1] - times[t_start as usize - 1],
            });
        }
        days.push(DaySchedule {
            day: date,
            sigma_d,
            v_d,
            ticks,
            metaorders,
        });
        date += Duration::days(1);
    }
    Ok(StockSchedule {
        stock: stock.to_string(),
        c,
        traders,
        days,
    })
}

fn nearest_center(binning: Binning, q: f64) -> Option<usize> {
    if !(q > 0.0) {
        return None;
    }
    let k = ((q.log10() - binning.first_exp) / binning.delta).round();
    (k >= 0.0 && k <= binning.k_max as f64).then_some(k as usize)
}

/// Map `u` in [0, 1) onto the continuous sessions, skipping the lunch gap.
fn session_time(u: f64) -> f64 {
    let open = MORNING_CLOSE + (DAY_SECONDS - AFTERNOON_OPEN);
    let x = u * open;
    if x < MORNING_CLOSE {
        x
    } else {
        x - MORNING_CLOSE + AFTERNOON_OPEN
    }
}

/// Cumulative volumes of `len` positive children summing to `q` (needs
/// `q >= len`), with random exponential weights.
fn split_volume<R: Rng>(q: u64, len: u32, rng: &mut R) -> Vec<u64> {
    let len = len as u64;
    assert!(q >= len, "volume {q} cannot be split into {len} children");
    let w: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    let mut out = Vec::with_capacity(len as usize);
    let mut acc = 0.0;
    let mut prev = 0u64;
    for (k, wk) in w.iter().enumerate() {
        let k = k as u64 + 1;
        acc += wk;
        let ideal = if k == len {
            q
        } else {
            (q as f64 * acc / total).round() as u64
        };
        // leave room for the remaining children, one share each
        let cum = ideal.max(prev + 1).min(q - (len - k));
        out.push(cum);
        prev = cum;
    }
    out
}
