use std::collections::BTreeMap;

use crate::impact::entities::{fit_groups, EntityFits, EstimatorConfig};
use crate::impact::samples::{HorizonWindow, ImpactSample};

/// Stocks need strictly more window samples than this.
pub const DEFAULT_WINDOW_MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone)]
pub struct WindowFits {
    pub window: HorizonWindow,
    pub fits: EntityFits,
    /// Stocks left out for having too few samples in the window.
    pub too_few: BTreeMap<String, usize>,
}

/// Stock-level fits restricted to each liquidation-horizon window.
pub fn horizon_robustness(
    samples: &[ImpactSample],
    est: &EstimatorConfig,
    windows: &[HorizonWindow],
    min_window_samples: usize,
) -> Vec<WindowFits> {
    windows
        .iter()
        .map(|&w| {
            let cfg = EstimatorConfig {
                window: Some(w),
                ..*est
            };
            let mut groups: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
            for s in samples.iter().filter(|s| cfg.keeps(s.horizon)) {
                groups
                    .entry(s.stock.as_str())
                    .or_default()
                    .push((s.q, s.impact));
            }
            let mut too_few = BTreeMap::new();
            let mut kept = Vec::new();
            for (stock, pts) in groups {
                if pts.len() > min_window_samples {
                    kept.push((stock.to_string(), pts));
                } else {
                    too_few.insert(stock.to_string(), pts.len());
                }
            }
            WindowFits {
                window: w,
                fits: fit_groups(kept, &cfg, 2),
                too_few,
            }
        })
        .collect()
}
