//! Power-law tail fits with KS-selected lower cutoff.
//!
//! Exponents are reported as density exponent minus one: a tail with density
//! proportional to `x^(-e-1)` reports `e`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::zeta::hurwitz_zeta;

/// Fewer tail samples than this make a fit unavailable.
pub const MIN_TAIL: usize = 10;
/// Cap on the number of x_min candidates for large samples.
pub const MAX_CANDIDATES: usize = 1_000;

const MAX_INDEX: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub exponent: f64,
    pub x_min: f64,
    pub n_tail: usize,
    pub ks: f64,
    pub variant: Variant,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TailError {
    #[error("all samples are equal")]
    Degenerate,
    #[error("tail has {0} samples, need at least {MIN_TAIL}")]
    TooFewTail(usize),
    #[error("invalid sample {0}")]
    InvalidSample(f64),
}

fn prepare(samples: &[f64], variant: Variant) -> Result<Vec<f64>, TailError> {
    for &x in samples {
        let ok = x.is_finite()
            && x > 0.0
            && (variant == Variant::Continuous || (x >= 1.0 && x.fract() == 0.0));
        if !ok {
            return Err(TailError::InvalidSample(x));
        }
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

/// Full fit: scan x_min candidates and keep the one with the smallest KS
/// distance between the empirical and fitted tail CDFs.
pub fn clauset_fit(samples: &[f64], variant: Variant) -> Result<TailFit, TailError> {
    let sorted = prepare(samples, variant)?;
    if sorted.len() < MIN_TAIL {
        return Err(TailError::TooFewTail(sorted.len()));
    }
    if sorted[0] == sorted[sorted.len() - 1] {
        return Err(TailError::Degenerate);
    }
    let ln: Vec<f64> = sorted.iter().map(|x| x.ln()).collect();
    // suffix sums of ln x for O(1) continuous MLEs
    let mut suffix = vec![0.0; ln.len() + 1];
    for i in (0..ln.len()).rev() {
        suffix[i] = suffix[i + 1] + ln[i];
    }

    let mut best: Option<TailFit> = None;
    for start in candidate_starts(&sorted) {
        let n_tail = sorted.len() - start;
        if n_tail < MIN_TAIL {
            break;
        }
        let tail = &sorted[start..];
        let fit = match variant {
            Variant::Continuous => {
                let x_min = sorted[start];
                let s = suffix[start] - n_tail as f64 * ln[start];
                if s <= 0.0 {
                    continue;
                }
                let index = 1.0 + n_tail as f64 / s;
                TailFit {
                    exponent: index - 1.0,
                    x_min,
                    n_tail,
                    ks: ks_continuous(&ln[start..], index),
                    variant,
                }
            }
            Variant::Discrete => {
                let mean_ln = (suffix[start]) / n_tail as f64;
                let index = discrete_mle(mean_ln, tail[0]);
                TailFit {
                    exponent: index - 1.0,
                    x_min: tail[0],
                    n_tail,
                    ks: ks_discrete(tail, index),
                    variant,
                }
            }
        };
        if best.is_none_or(|b| fit.ks < b.ks) {
            best = Some(fit);
        }
    }
    best.ok_or(TailError::TooFewTail(0))
}

/// Fit with a known cutoff.
pub fn fit_with_xmin(samples: &[f64], x_min: f64, variant: Variant) -> Result<TailFit, TailError> {
    let sorted = prepare(samples, variant)?;
    let start = sorted.partition_point(|&x| x < x_min);
    let tail = &sorted[start..];
    if tail.len() < MIN_TAIL {
        return Err(TailError::TooFewTail(tail.len()));
    }
    let n = tail.len() as f64;
    let ln: Vec<f64> = tail.iter().map(|x| x.ln()).collect();
    let sum_ln: f64 = ln.iter().sum();
    let index = match variant {
        Variant::Continuous => {
            let s = sum_ln - n * x_min.ln();
            if s <= 0.0 {
                return Err(TailError::Degenerate);
            }
            1.0 + n / s
        }
        Variant::Discrete => discrete_mle(sum_ln / n, x_min),
    };
    let ks = match variant {
        Variant::Continuous => ks_continuous_from(&ln, x_min.ln(), index),
        Variant::Discrete => ks_discrete_from(tail, x_min, index),
    };
    Ok(TailFit {
        exponent: index - 1.0,
        x_min,
        n_tail: tail.len(),
        ks,
        variant,
    })
}

/// Start indices of the candidate cutoffs: every distinct value, or
/// `MAX_CANDIDATES` quantile-spaced distinct values for large samples.
fn candidate_starts(sorted: &[f64]) -> Vec<usize> {
    let mut starts: Vec<usize> = Vec::new();
    let mut distinct = 0usize;
    for i in 0..sorted.len() {
        if i == 0 || sorted[i] != sorted[i - 1] {
            distinct += 1;
            if distinct <= MAX_CANDIDATES + 1 {
                starts.push(i);
            }
        }
    }
    if distinct <= MAX_CANDIDATES {
        return starts;
    }
    let n = sorted.len();
    let mut out: Vec<usize> = Vec::with_capacity(MAX_CANDIDATES);
    for j in 0..MAX_CANDIDATES {
        let mut i = j * n / MAX_CANDIDATES;
        // back up to the first occurrence of this value
        i = sorted.partition_point(|&x| x < sorted[i]);
        if out.last() != Some(&i) {
            out.push(i);
        }
    }
    out
}

fn ks_continuous(ln_tail: &[f64], index: f64) -> f64 {
    ks_continuous_from(ln_tail, ln_tail[0], index)
}

/// KS distance against `F(x) = 1 - (x / x_min)^(1 - index)` on a sorted tail
/// given in log space.
fn ks_continuous_from(ln_tail: &[f64], ln_min: f64, index: f64) -> f64 {
    let n = ln_tail.len() as f64;
    let e = index - 1.0;
    let mut d: f64 = 0.0;
    for (i, &l) in ln_tail.iter().enumerate() {
        let f = 1.0 - (-e * (l - ln_min)).exp();
        let hi = (i + 1) as f64 / n - f;
        let lo = f - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

fn ks_discrete(tail: &[f64], index: f64) -> f64 {
    ks_discrete_from(tail, tail[0], index)
}

/// KS distance between the empirical CDF of a sorted integer tail and the
/// zeta law `P(X >= x) = zeta(index, x) / zeta(index, x_min)`. Both CDFs are
/// compared at every observed value and just below it.
fn ks_discrete_from(tail: &[f64], x_min: f64, index: f64) -> f64 {
    let n = tail.len() as f64;
    let norm = hurwitz_zeta(index, x_min);
    let model_cdf = |x: f64| 1.0 - hurwitz_zeta(index, x + 1.0) / norm;
    let mut d: f64 = 0.0;
    let mut below = 0usize;
    let mut i = 0;
    while i < tail.len() {
        let v = tail[i];
        let mut j = i;
        while j < tail.len() && tail[j] == v {
            j += 1;
        }
        if v > x_min {
            d = d.max((below as f64 / n - model_cdf(v - 1.0)).abs());
        }
        d = d.max((j as f64 / n - model_cdf(v)).abs());
        below = j;
        i = j;
    }
    d
}

/// Maximize `-index * mean_ln - ln zeta(index, x_min)` over the index by
/// golden-section search; the log-likelihood is concave in the index.
fn discrete_mle(mean_ln: f64, x_min: f64) -> f64 {
    let ll = |a: f64| -a * mean_ln - hurwitz_zeta(a, x_min).ln();
    let (mut lo, mut hi) = (1.0 + 1e-9, MAX_INDEX);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (ll(x1), ll(x2));
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = ll(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = ll(x1);
        }
    }
    (lo + hi) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pareto(n: usize, exponent: f64, x_min: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| x_min * (1.0 - rng.random::<f64>()).powf(-1.0 / exponent))
            .collect()
    }

    #[test]
    fn all_equal_is_degenerate() {
        assert_eq!(
            clauset_fit(&[7.0; 50], Variant::Continuous),
            Err(TailError::Degenerate)
        );
        assert_eq!(
            clauset_fit(&[7.0; 50], Variant::Discrete),
            Err(TailError::Degenerate)
        );
    }

    #[test]
    fn short_or_invalid_samples() {
        assert_eq!(
            clauset_fit(&[1.0, 2.0], Variant::Continuous),
            Err(TailError::TooFewTail(2))
        );
        assert!(matches!(
            clauset_fit(&[1.5; 20], Variant::Discrete),
            Err(TailError::InvalidSample(_))
        ));
        assert!(matches!(
            clauset_fit(&[-1.0; 20], Variant::Continuous),
            Err(TailError::InvalidSample(_))
        ));
    }

    #[test]
    fn known_xmin_matches_closed_form() {
        let xs = pareto(10_000, 1.5, 1.0, 3);
        let fit = fit_with_xmin(&xs, 1.0, Variant::Continuous).unwrap();
        let closed = xs.len() as f64 / xs.iter().map(|x| x.ln()).sum::<f64>();
        assert!((fit.exponent - closed).abs() < 1e-12);
    }

    #[test]
    fn scale_invariance_of_continuous_fit() {
        let xs = pareto(5_000, 1.2, 1.0, 9);
        let a = clauset_fit(&xs, Variant::Continuous).unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| x * 250.0).collect();
        let b = clauset_fit(&scaled, Variant::Continuous).unwrap();
        assert!((a.exponent - b.exponent).abs() < 1e-9);
        assert!((b.x_min / a.x_min - 250.0).abs() < 1e-9);
        assert_eq!(a.n_tail, b.n_tail);
    }

    #[test]
    fn candidates_are_capped_and_start_at_first_occurrence() {
        let mut xs: Vec<f64> = (0..50_000).map(|i| (i / 2) as f64 + 1.0).collect();
        xs.sort_by(f64::total_cmp);
        let starts = candidate_starts(&xs);
        assert!(starts.len() <= MAX_CANDIDATES);
        assert!(starts.iter().all(|&i| i == 0 || xs[i] != xs[i - 1]));
        let small = [1.0, 1.0, 2.0, 3.0, 3.0];
        assert_eq!(candidate_starts(&small), vec![0, 2, 3]);
    }

    #[test]
    fn discrete_mle_solves_score_equation() {
        // at the MLE, mean ln x = -d/da ln zeta(a, x_min)
        let a = discrete_mle(0.9, 1.0);
        let h = 1e-5;
        let dlog = (hurwitz_zeta(a + h, 1.0).ln() - hurwitz_zeta(a - h, 1.0).ln()) / (2.0 * h);
        assert!((0.9 + dlog).abs() < 1e-6);
    }
}
