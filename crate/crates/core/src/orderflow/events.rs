use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const EVENT_HEADER: &[&str] = &[
    "day",
    "stock",
    "virtual_server",
    "order_id",
    "action",
    "side",
    "price",
    "volume",
    "phys_time",
];

/// Optional trailing columns carrying the book top just before an execution.
pub const QUOTE_COLUMNS: &[&str] = &["best_bid", "best_ask"];

/// End of the morning continuous session, seconds after 09:00.
pub const MORNING_CLOSE: f64 = 9_000.0;
/// Start of the afternoon continuous session.
pub const AFTERNOON_OPEN: f64 = 12_600.0;
/// Length of the trading day in the same clock, 09:00 to 15:00.
pub const DAY_SECONDS: f64 = 18_000.0;

pub fn in_continuous_session(t: f64) -> bool {
    (0.0..=MORNING_CLOSE).contains(&t) || (AFTERNOON_OPEN..=DAY_SECONDS).contains(&t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Submit,
    Modify,
    Cancel,
    Execute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    pub fn sign(self) -> i8 {
        match self {
            Side::Buy => 1,
            Side::Sell => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEvent {
    pub day: NaiveDate,
    pub stock: String,
    pub virtual_server: String,
    pub order_id: String,
    pub action: Action,
    pub side: Side,
    /// Price in integer ticks.
    pub price: i64,
    pub volume: u64,
    /// Seconds since 09:00:00.
    pub phys_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_bid: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_ask: Option<i64>,
}

impl OrderEvent {
    /// Midprice just before this event, when the book top is known.
    pub fn midprice_before(&self) -> Option<f64> {
        match (self.best_bid, self.best_ask) {
            (Some(b), Some(a)) => Some((a + b) as f64 / 2.0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventFormat {
    Csv,
    Ndjson,
}

impl std::str::FromStr for EventFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(EventFormat::Csv),
            "ndjson" | "jsonl" => Ok(EventFormat::Ndjson),
            other => Err(Error::Config(format!("unknown event format `{other}`"))),
        }
    }
}

/// Result of one ingestion pass. Events keep file order.
#[derive(Debug, Default)]
pub struct Ingested {
    pub events: Vec<OrderEvent>,
    pub rows: usize,
    pub malformed: usize,
    pub out_of_session: usize,
    /// First few malformed-row messages, for the log.
    pub warnings: Vec<String>,
}

const MAX_WARNINGS: usize = 20;

impl Ingested {
    fn warn(&mut self, line: usize, msg: String) {
        self.malformed += 1;
        if self.warnings.len() < MAX_WARNINGS {
            self.warnings.push(format!("row {line}: {msg}"));
        }
    }

    fn accept(&mut self, ev: OrderEvent) {
        if in_continuous_session(ev.phys_time) {
            self.events.push(ev);
        } else {
            self.out_of_session += 1;
        }
    }
}

pub fn ingest_events(path: &Path, format: EventFormat) -> Result<Ingested> {
    match format {
        EventFormat::Csv => ingest_csv(path),
        EventFormat::Ndjson => ingest_ndjson(path),
    }
}

fn ingest_csv(path: &Path) -> Result<Ingested> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(BufReader::new(file));
    let header = rdr.headers()?.clone();
    let found: Vec<&str> = header.iter().collect();
    let with_quotes = found.len() == EVENT_HEADER.len() + QUOTE_COLUMNS.len()
        && found[EVENT_HEADER.len()..] == *QUOTE_COLUMNS;
    if found[..found.len().min(EVENT_HEADER.len())] != *EVENT_HEADER
        || !(found.len() == EVENT_HEADER.len() || with_quotes)
    {
        return Err(Error::Schema {
            path: path.to_path_buf(),
            expected: EVENT_HEADER.join(","),
            found: found.join(","),
        });
    }

    let mut out = Ingested::default();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        out.rows += 1;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                out.warn(line, e.to_string());
                continue;
            }
        };
        match parse_event_row(&row, with_quotes) {
            Ok(ev) => out.accept(ev),
            Err(msg) => out.warn(line, msg),
        }
    }
    Ok(out)
}

fn parse_event_row(
    row: &csv::StringRecord,
    with_quotes: bool,
) -> std::result::Result<OrderEvent, String> {
    let want = if with_quotes { 11 } else { 9 };
    if row.len() != want {
        return Err(format!("expected {want} fields, found {}", row.len()));
    }
    let day = NaiveDate::parse_from_str(&row[0], "%Y-%m-%d").map_err(|e| format!("day: {e}"))?;
    let action = match &row[4] {
        "submit" => Action::Submit,
        "modify" => Action::Modify,
        "cancel" => Action::Cancel,
        "execute" => Action::Execute,
        other => return Err(format!("unknown action `{other}`")),
    };
    let side = match &row[5] {
        "buy" => Side::Buy,
        "sell" => Side::Sell,
        other => return Err(format!("unknown side `{other}`")),
    };
    let price: i64 = row[6].parse().map_err(|_| format!("price `{}`", &row[6]))?;
    let volume: i64 = row[7]
        .parse()
        .map_err(|_| format!("volume `{}`", &row[7]))?;
    let phys_time: f64 = row[8]
        .parse()
        .map_err(|_| format!("phys_time `{}`", &row[8]))?;
    let opt = |s: &str| -> std::result::Result<Option<i64>, String> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| format!("quote `{s}`"))
        }
    };
    let (best_bid, best_ask) = if with_quotes {
        (opt(&row[9])?, opt(&row[10])?)
    } else {
        (None, None)
    };
    let ev = OrderEvent {
        day,
        stock: row[1].to_string(),
        virtual_server: row[2].to_string(),
        order_id: row[3].to_string(),
        action,
        side,
        price,
        volume: u64::try_from(volume).map_err(|_| format!("negative volume {volume}"))?,
        phys_time,
        best_bid,
        best_ask,
    };
    validate(&ev)?;
    Ok(ev)
}

fn validate(ev: &OrderEvent) -> std::result::Result<(), String> {
    if !ev.phys_time.is_finite() {
        return Err("non-finite phys_time".into());
    }
    if matches!(ev.action, Action::Submit | Action::Execute) && ev.volume == 0 {
        return Err(format!("{:?} with zero volume", ev.action));
    }
    if ev.stock.is_empty() || ev.virtual_server.is_empty() || ev.order_id.is_empty() {
        return Err("empty identifier".into());
    }
    Ok(())
}

fn ingest_ndjson(path: &Path) -> Result<Ingested> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Ingested::default();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.rows += 1;
        match serde_json::from_str::<OrderEvent>(&line) {
            Ok(ev) => match validate(&ev) {
                Ok(()) => out.accept(ev),
                Err(msg) => out.warn(i + 1, msg),
            },
            Err(e) => out.warn(i + 1, e.to_string()),
        }
    }
    Ok(out)
}

pub fn write_events_csv(path: &Path, events: &[OrderEvent]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = EVENT_HEADER.to_vec();
    header.extend_from_slice(QUOTE_COLUMNS);
    w.write_record(&header)?;
    for ev in events {
        let opt = |v: Option<i64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            ev.day.format("%Y-%m-%d").to_string(),
            ev.stock.clone(),
            ev.virtual_server.clone(),
            ev.order_id.clone(),
            format!("{:?}", ev.action).to_lowercase(),
            format!("{:?}", ev.side).to_lowercase(),
            ev.price.to_string(),
            ev.volume.to_string(),
            ev.phys_time.to_string(),
            opt(ev.best_bid),
            opt(ev.best_ask),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
