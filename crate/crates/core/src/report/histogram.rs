use std::path::Path;

use crate::error::{Error, Result};
use crate::stats::Summary;

/// Equal-width histogram with half-open bins `[lo + k w, lo + (k+1) w)`.
/// Values outside `[lo, hi)` are counted, not binned.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub counts: Vec<usize>,
    pub below: usize,
    pub above: usize,
    /// Non-finite values.
    pub invalid: usize,
    pub summary: Option<Summary>,
}

impl Histogram {
    pub fn n(&self) -> usize {
        self.in_range() + self.below + self.above + self.invalid
    }

    pub fn in_range(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.counts.len())
            .map(|k| self.lo + k as f64 * self.width)
            .collect()
    }

    /// Densities over the binned values; they integrate to one unless no
    /// value fell in range.
    pub fn densities(&self) -> Vec<f64> {
        let n = self.in_range();
        if n == 0 {
            return vec![0.0; self.counts.len()];
        }
        self.counts
            .iter()
            .map(|&c| c as f64 / (n as f64 * self.width))
            .collect()
    }
}

pub fn histogram(values: &[f64], lo: f64, hi: f64, width: f64) -> Result<Histogram> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::Config(format!(
            "histogram width must be positive, got {width}"
        )));
    }
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Config(format!(
            "histogram range [{lo}, {hi}) is empty"
        )));
    }
    // round to absorb ulp noise in (hi - lo) / width, e.g. 1 / 0.02
    let n_bins = (((hi - lo) / width) - 1e-9).ceil().max(1.0) as usize;
    let mut h = Histogram {
        lo,
        width,
        counts: vec![0; n_bins],
        below: 0,
        above: 0,
        invalid: 0,
        summary: None,
    };
    let mut finite = Vec::with_capacity(values.len());
    for &v in values {
        if !v.is_finite() {
            h.invalid += 1;
            continue;
        }
        finite.push(v);
        if v < lo {
            h.below += 1;
        } else if v >= hi {
            h.above += 1;
        } else {
            let k = (((v - lo) / width).floor() as usize).min(n_bins - 1);
            // guard the floor against rounding across an edge
            let k = if v < lo + k as f64 * width {
                k.saturating_sub(1)
            } else {
                k
            };
            let k = if k + 1 < n_bins && v >= lo + (k + 1) as f64 * width {
                k + 1
            } else {
                k
            };
            h.counts[k] += 1;
        }
    }
    h.summary = Summary::of(&finite);
    Ok(h)
}

pub fn write_histogram(path: &Path, h: &Histogram) -> Result<()> {
    let mut w = crate::io::csv_writer(path, &["lo", "hi", "count", "density"])?;
    let edges = h.edges();
    for (k, (c, d)) in h.counts.iter().zip(h.densities()).enumerate() {
        w.write_record([
            edges[k].to_string(),
            edges[k + 1].to_string(),
            c.to_string(),
            d.to_string(),
        ])?;
    }
    crate::io::finish(path, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacent_values_land_in_adjacent_bins() {
        let h = histogram(&[0.49, 0.51], 0.0, 1.0, 0.02).unwrap();
        assert_eq!(h.counts.len(), 50);
        assert_eq!(h.counts[24], 1);
        assert_eq!(h.counts[25], 1);
        assert_eq!(h.in_range(), 2);
    }

    #[test]
    fn empty_input() {
        let h = histogram(&[], 0.0, 1.0, 0.02).unwrap();
        assert_eq!(h.n(), 0);
        assert!(h.counts.iter().all(|&c| c == 0));
        assert!(h.summary.is_none());
    }

    #[test]
    fn edges_are_half_open_and_out_of_range_counted() {
        let h = histogram(&[0.0, 0.02, 1.0, -0.1, f64::NAN], 0.0, 1.0, 0.02).unwrap();
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[1], 1);
        assert_eq!((h.below, h.above, h.invalid), (1, 1, 1));
        assert_eq!(h.n(), 5);
    }

    #[test]
    fn bad_ranges() {
        assert!(histogram(&[1.0], 1.0, 1.0, 0.1).is_err());
        assert!(histogram(&[1.0], 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn densities_integrate_to_one() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let h = histogram(&v, 0.0, 1.0, 0.02).unwrap();
        let total: f64 = h.densities().iter().map(|d| d * h.width).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
