//! Price paths with an exact square-root impact per child order plus a
//! Brownian term whose variance over a full day is `(noise_scale * sigma_D)^2`.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::rng::{purpose, stream_rng};
use super::schedule::{DaySchedule, StockSchedule};
use crate::orderflow::events::DAY_SECONDS;
use crate::orderflow::stream::{DayStream, Tick};

/// Starting midprice of every simulated day. Only price differences enter
/// the estimator, so the level is arbitrary.
pub const INITIAL_MIDPRICE: f64 = 1_000.0;

/// Permute metaorder signs across all traders and days of one stock.
pub fn shuffle_signs<R: Rng>(schedule: &StockSchedule, rng: &mut R) -> Vec<Vec<i8>> {
    let mut flat: Vec<i8> = schedule
        .days
        .iter()
        .flat_map(|d| d.metaorders.iter().map(|m| m.sign))
        .collect();
    flat.shuffle(rng);
    let mut it = flat.into_iter();
    schedule
        .days
        .iter()
        .map(|d| it.by_ref().take(d.metaorders.len()).collect())
        .collect()
}

/// Midprice just before each tick (length N) and the closing midprice after
/// the last tick.
#[derive(Debug, Clone, PartialEq)]
pub struct DayPath {
    pub before: Vec<f64>,
    pub close: f64,
}

impl DayPath {
    /// Midprice just after tick `t` (1-based); tick 0 is the open.
    pub fn after(&self, t: u32) -> f64 {
        match t as usize {
            0 => INITIAL_MIDPRICE,
            n if n == self.before.len() => self.close,
            n => self.before[n],
        }
    }
}

/// Simulate one day. `signs[m]` is the sign of metaorder `m`.
pub fn simulate_day<R: Rng>(
    day: &DaySchedule,
    signs: &[i8],
    c: f64,
    noise_scale: f64,
    rng: &mut R,
) -> DayPath {
    let mut prev_sqrt = vec![0.0f64; day.metaorders.len()];
    let mut before = Vec::with_capacity(day.ticks.len());
    let mut m = INITIAL_MIDPRICE;
    let mut prev_time = 0.0;
    let amp = c * day.sigma_d;
    for t in &day.ticks {
        before.push(m);
        let k = t.metaorder as usize;
        let s = (t.cumvol as f64 / day.v_d).sqrt();
        m += amp * signs[k] as f64 * (s - prev_sqrt[k]);
        prev_sqrt[k] = s;
        if noise_scale != 0.0 {
            let var = (t.phys_time - prev_time).max(0.0) / DAY_SECONDS;
            let z: f64 = rng.sample(StandardNormal);
            m += noise_scale * day.sigma_d * var.sqrt() * z;
        }
        prev_time = t.phys_time;
    }
    DayPath { before, close: m }
}

/// One simulated impact sample per metaorder whose last child is not the
/// day's final tick: `(metaorder index, Q / V_D, impact)`.
pub fn day_samples<'a>(
    day: &'a DaySchedule,
    signs: &'a [i8],
    path: &'a DayPath,
) -> impl Iterator<Item = (usize, f64, f64)> + 'a {
    let n = day.ticks.len() as u32;
    day.metaorders
        .iter()
        .enumerate()
        .filter(move |(_, m)| m.t_end < n)
        .map(move |(i, m)| {
            // m(t_E + 1) is the price just after t_E; m(t_S) the price after t_S - 1
            let dm = path.after(m.t_end) - path.after(m.t_start - 1);
            (i, m.q as f64 / day.v_d, signs[i] as f64 * dm / day.sigma_d)
        })
}

/// Render a simulated day as a market-order stream, e.g. to feed the
/// real-data pipeline.
pub fn to_day_stream(
    stock: &StockSchedule,
    day: &DaySchedule,
    signs: &[i8],
    path: &DayPath,
) -> DayStream {
    let mut ds = DayStream::new(day.day, stock.stock.clone());
    ds.traders = stock.traders.clone();
    let mut prev_cum = vec![0u64; day.metaorders.len()];
    ds.ticks = day
        .ticks
        .iter()
        .zip(&path.before)
        .map(|(t, &mid)| {
            let k = t.metaorder as usize;
            let volume = t.cumvol - prev_cum[k];
            prev_cum[k] = t.cumvol;
            Tick {
                phys_time: t.phys_time,
                trader: day.metaorders[k].trader,
                sign: signs[k],
                volume,
                midprice: mid,
            }
        })
        .collect();
    ds
}

/// Render every schedule as a market-order stream, each day simulated once
/// with the schedule's own signs. Used to build synthetic datasets.
pub fn render_streams(schedules: &[StockSchedule], seed: u64, noise_scale: f64) -> Vec<DayStream> {
    let mut out = Vec::new();
    for sched in schedules {
        let mut rng = stream_rng(seed, &sched.stock, 0, purpose::RENDER);
        for (day, signs) in sched.days.iter().zip(sched.signs()) {
            let path = simulate_day(day, &signs, sched.c, noise_scale, &mut rng);
            out.push(to_day_stream(sched, day, &signs, &path));
        }
    }
    out.sort_by(|a, b| (&a.stock, a.day).cmp(&(&b.stock, b.day)));
    out
}
