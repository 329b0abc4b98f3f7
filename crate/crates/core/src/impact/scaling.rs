//! Aggregate scaling curve: each entity's binned impact is rescaled by its
//! square-root prefactor, `phi(x) = I(Q) / c` with `x = sqrt(Q)`, and the
//! rescaled profiles are averaged bin by bin across entities.

use std::path::Path;

use serde::Serialize;

use super::binning::{BinnedImpact, Binning};
use super::fit::fit_sqrt_prefactor;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub x: f64,
    pub phi_avg: f64,
    pub count: usize,
    pub sem: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScalingCurve {
    pub points: Vec<ScalingPoint>,
    /// Entities without a usable one-parameter fit.
    pub skipped: Vec<String>,
    pub entities: usize,
}

impl ScalingCurve {
    /// Largest `|phi_avg(x) - x| / x` over the grid.
    pub fn max_relative_deviation(&self) -> f64 {
        self.points
            .iter()
            .map(|p| ((p.phi_avg - p.x) / p.x).abs())
            .fold(0.0, f64::max)
    }
}

pub fn aggregate_scaling<'a, I>(binning: Binning, entities: I, min_bin_count: usize) -> ScalingCurve
where
    I: IntoIterator<Item = (&'a str, &'a BinnedImpact)>,
{
    let n = binning.n_bins();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut curve = ScalingCurve::default();
    for (name, binned) in entities {
        let valid: Vec<(usize, f64, f64)> = binned.valid(min_bin_count).collect();
        let pts: Vec<(f64, f64)> = valid.iter().map(|&(_, x, y)| (x, y)).collect();
        match fit_sqrt_prefactor(&pts) {
            Some(c) => {
                curve.entities += 1;
                for (k, _, y) in valid {
                    values[k].push(y / c);
                }
            }
            None => curve.skipped.push(name.to_string()),
        }
    }
    curve.points = values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_empty())
        .map(|(k, v)| {
            let s = crate::stats::Summary::of(v).expect("nonempty");
            ScalingPoint {
                x: binning.center(k).sqrt(),
                phi_avg: s.mean,
                count: s.n,
                sem: s.sem,
            }
        })
        .collect();
    curve
}

pub fn write_scaling(path: &Path, curve: &ScalingCurve) -> Result<()> {
    let mut w = crate::io::csv_writer(path, &["x", "phi_avg", "count", "sem"])?;
    for p in &curve.points {
        w.serialize(p)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impact::binning::Bin;

    fn exact(c: f64, count: usize) -> BinnedImpact {
        let b = Binning::default();
        let bins = (0..b.n_bins())
            .map(|k| Bin {
                count,
                mean: c * b.center(k).sqrt(),
                sem: 0.0,
            })
            .collect();
        BinnedImpact::from_bins(b, bins)
    }

    #[test]
    fn three_exact_stocks_collapse() {
        let data = [exact(0.5, 200), exact(1.0, 200), exact(2.0, 200)];
        let names = ["a", "b", "c"];
        let curve = aggregate_scaling(
            Binning::default(),
            names.iter().copied().zip(data.iter()),
            100,
        );
        assert_eq!(curve.points.len(), 61);
        assert_eq!(curve.entities, 3);
        assert!(curve.max_relative_deviation() < 1e-12);
        assert!(curve.points.iter().all(|p| p.count == 3));
    }

    #[test]
    fn single_entity_is_its_own_profile() {
        let mut b = exact(1.3, 200);
        b.bins[7].mean *= 1.1;
        let curve = aggregate_scaling(Binning::default(), [("only", &b)], 100);
        let c =
            fit_sqrt_prefactor(&b.valid(100).map(|(_, x, y)| (x, y)).collect::<Vec<_>>()).unwrap();
        let p = curve.points[7];
        assert_eq!(p.phi_avg, b.bins[7].mean / c);
        assert_eq!(p.sem, 0.0);
    }

    #[test]
    fn entity_without_positive_profile_is_skipped() {
        let mut b = exact(1.0, 200);
        for bin in &mut b.bins {
            bin.mean = -bin.mean;
        }
        let curve = aggregate_scaling(Binning::default(), [("neg", &b)], 100);
        assert_eq!(curve.skipped, vec!["neg".to_string()]);
        assert!(curve.points.is_empty());
    }
}
