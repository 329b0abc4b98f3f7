//! Date-range splits. A stock traded in two splits becomes two stocks,
//! named `label:stock`.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::impact::entities::EntityFits;
use crate::stats::Summary;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub label: String,
    /// Inclusive.
    pub start: NaiveDate,
    /// Inclusive.
    pub end: NaiveDate,
}

impl DatasetSplit {
    pub fn contains(&self, day: NaiveDate) -> bool {
        self.start <= day && day <= self.end
    }
}

/// The two periods either side of the 2015-09-24 matching-engine update.
pub fn default_splits() -> Vec<DatasetSplit> {
    let d = |y, m, dd| NaiveDate::from_ymd_opt(y, m, dd).expect("valid date");
    vec![
        DatasetSplit {
            label: "dataset1".into(),
            start: d(2012, 1, 4),
            end: d(2015, 9, 18),
        },
        DatasetSplit {
            label: "dataset2".into(),
            start: d(2015, 9, 24),
            end: d(2019, 11, 2),
        },
    ]
}

/// One split covering every date.
pub fn all_split() -> DatasetSplit {
    DatasetSplit {
        label: "all".into(),
        start: NaiveDate::MIN,
        end: NaiveDate::MAX,
    }
}

pub fn validate_splits(splits: &[DatasetSplit]) -> Result<()> {
    if splits.is_empty() {
        return Err(Error::Config("at least one split is required".into()));
    }
    for s in splits {
        if s.start > s.end {
            return Err(Error::Config(format!(
                "split `{}` starts after it ends",
                s.label
            )));
        }
        if s.label.is_empty() || s.label.contains(':') {
            return Err(Error::Config(format!(
                "split label `{}` must be nonempty without `:`",
                s.label
            )));
        }
    }
    for (i, a) in splits.iter().enumerate() {
        for b in &splits[i + 1..] {
            if a.label == b.label {
                return Err(Error::Config(format!(
                    "duplicate split label `{}`",
                    a.label
                )));
            }
            if a.start <= b.end && b.start <= a.end {
                return Err(Error::Config(format!(
                    "splits `{}` and `{}` overlap",
                    a.label, b.label
                )));
            }
        }
    }
    Ok(())
}

pub fn split_of(splits: &[DatasetSplit], day: NaiveDate) -> Option<&DatasetSplit> {
    splits.iter().find(|s| s.contains(day))
}

pub fn scoped_stock(label: &str, stock: &str) -> String {
    format!("{label}:{stock}")
}

/// Split label of a scoped stock or trader entity name.
pub fn label_of(entity: &str) -> Option<&str> {
    entity.split_once(':').map(|(l, _)| l)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSummary {
    pub label: String,
    pub n_entities: usize,
    /// `None` for an empty split.
    pub summary: Option<Summary>,
}

/// Per-split summaries of stock-level fits keyed by scoped stock name. An
/// empty split is reported with no summary rather than failing the others.
pub fn crossvalidate(fits: &EntityFits, splits: &[DatasetSplit]) -> Vec<SplitSummary> {
    let mut by_label: BTreeMap<&str, Vec<f64>> = splits
        .iter()
        .map(|s| (s.label.as_str(), Vec::new()))
        .collect();
    for (entity, f) in &fits.fits {
        if let Some(v) = label_of(entity).and_then(|l| by_label.get_mut(l)) {
            v.push(f.delta);
        }
    }
    splits
        .iter()
        .map(|s| {
            let deltas = &by_label[s.label.as_str()];
            SplitSummary {
                label: s.label.clone(),
                n_entities: deltas.len(),
                summary: Summary::of(deltas),
            }
        })
        .collect()
}
