use serde::{Deserialize, Serialize};

/// Logarithmic binning of dimensionless volumes: centers
/// `10^(first_exp + k * delta)` for `k = 0..=k_max`, each bin covering
/// `[10^(-delta/2) * center, 10^(delta/2) * center)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Binning {
    pub first_exp: f64,
    pub delta: f64,
    pub k_max: usize,
}

impl Default for Binning {
    fn default() -> Self {
        Binning {
            first_exp: -3.0,
            delta: 0.05,
            k_max: 60,
        }
    }
}

impl Binning {
    pub fn n_bins(&self) -> usize {
        self.k_max + 1
    }

    pub fn center(&self, k: usize) -> f64 {
        10f64.powf(self.first_exp + k as f64 * self.delta)
    }

    /// Lower edge of bin `k`; the upper edge of bin `k` is `edge(k + 1)`.
    pub fn edge(&self, k: usize) -> f64 {
        10f64.powf(self.first_exp + (k as f64 - 0.5) * self.delta)
    }

    /// Bin index of `q`, or `None` outside `[edge(0), edge(k_max + 1))`.
    pub fn index(&self, q: f64) -> Option<usize> {
        if !(q > 0.0) || !q.is_finite() {
            return None;
        }
        let guess = ((q.log10() - self.first_exp) / self.delta + 0.5).floor();
        if guess < -1.0 || guess > self.n_bins() as f64 {
            return None;
        }
        // settle rounding at the edges against the same edge function
        let mut k = guess.max(0.0) as usize;
        while k > 0 && q < self.edge(k) {
            k -= 1;
        }
        while k <= self.k_max && q >= self.edge(k + 1) {
            k += 1;
        }
        (k <= self.k_max && q >= self.edge(k)).then_some(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Bin {
    pub count: usize,
    pub mean: f64,
    pub sem: f64,
}

/// Conditional mean of the impact in each volume bin.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedImpact {
    pub binning: Binning,
    pub bins: Vec<Bin>,
    /// Samples that fell outside the binned range.
    pub out_of_range: usize,
}

impl BinnedImpact {
    pub fn total_count(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }

    /// `(center, mean)` for bins with strictly more than `min_count` samples.
    pub fn valid(&self, min_count: usize) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.bins
            .iter()
            .enumerate()
            .filter(move |(_, b)| b.count > min_count)
            .map(|(k, b)| (k, self.binning.center(k), b.mean))
    }

    pub fn n_valid(&self, min_count: usize) -> usize {
        self.bins.iter().filter(|b| b.count > min_count).count()
    }

    /// Build directly from per-bin values; used for exact-model fixtures.
    pub fn from_bins(binning: Binning, bins: Vec<Bin>) -> Self {
        assert_eq!(bins.len(), binning.n_bins());
        BinnedImpact {
            binning,
            bins,
            out_of_range: 0,
        }
    }
}

/// Bin `(q, impact)` pairs. Sums run in input order.
pub fn bin_samples<I>(binning: Binning, samples: I) -> BinnedImpact
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let n = binning.n_bins();
    let mut count = vec![0usize; n];
    let mut sum = vec![0.0f64; n];
    let mut sum_sq = vec![0.0f64; n];
    let mut out_of_range = 0;
    for (q, i) in samples {
        match binning.index(q) {
            Some(k) => {
                count[k] += 1;
                sum[k] += i;
                sum_sq[k] += i * i;
            }
            None => out_of_range += 1,
        }
    }
    let bins = (0..n)
        .map(|k| {
            if count[k] == 0 {
                return Bin::default();
            }
            let c = count[k] as f64;
            let mean = sum[k] / c;
            let var = (sum_sq[k] / c - mean * mean).max(0.0);
            Bin {
                count: count[k],
                mean,
                sem: (var / c).sqrt(),
            }
        })
        .collect();
    BinnedImpact {
        binning,
        bins,
        out_of_range,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lowest_center_is_bin_zero() {
        let b = Binning::default();
        assert_eq!(b.index(1e-3), Some(0));
        assert_eq!(b.index(1.0), Some(60));
        assert_eq!(b.index(10f64.powf(0.026)), None);
        assert_eq!(b.index(10f64.powf(0.024)), Some(60));
        assert_eq!(b.index(10f64.powf(-3.026)), None);
        assert_eq!(b.index(0.0), None);
        assert_eq!(b.index(-1.0), None);
    }

    #[test]
    fn edges_are_half_open() {
        let b = Binning::default();
        for k in 0..=60 {
            assert_eq!(b.index(b.edge(k)), Some(k), "lower edge of {k}");
            assert_eq!(b.index(b.center(k)), Some(k));
        }
        assert_eq!(b.index(b.edge(61)), None);
    }

    #[test]
    fn means_counts_and_sem() {
        let b = Binning::default();
        let q = b.center(10);
        let out = bin_samples(b, [(q, 1.0), (q, 3.0), (5.0, 1.0)]);
        assert_eq!(out.bins[10].count, 2);
        assert_eq!(out.bins[10].mean, 2.0);
        assert!((out.bins[10].sem - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(out.out_of_range, 1);
    }

    proptest! {
        #[test]
        fn bins_partition_retained_samples(qs in prop::collection::vec(1e-4f64..2.0, 0..400)) {
            let b = Binning::default();
            let out = bin_samples(b, qs.iter().map(|&q| (q, 0.0)));
            // direct oracle: count samples per half-open edge interval
            let mut oracle = vec![0usize; b.n_bins()];
            let mut outside = 0;
            for &q in &qs {
                let hits: Vec<usize> = (0..b.n_bins()).filter(|&k| q >= b.edge(k) && q < b.edge(k + 1)).collect();
                prop_assert!(hits.len() <= 1);
                match hits.first() {
                    Some(&k) => oracle[k] += 1,
                    None => outside += 1,
                }
            }
            let counts: Vec<usize> = out.bins.iter().map(|x| x.count).collect();
            prop_assert_eq!(counts, oracle);
            prop_assert_eq!(out.out_of_range, outside);
            prop_assert_eq!(out.total_count() + out.out_of_range, qs.len());
        }
    }
}
