//! Relative least squares for `I(Q) = c * Q^delta` on binned means.
//!
//! The objective is `sum_k ((y_k - c x_k^delta) / (c x_k^delta))^2` over the
//! valid bins. It is minimized over `(ln c, delta)` with Nelder-Mead started
//! from a log-log OLS guess, then polished with Gauss-Newton.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::binning::BinnedImpact;

/// Bins need strictly more samples than this to enter the fit.
pub const DEFAULT_MIN_BIN_COUNT: usize = 100;

const NM_TOL: f64 = 1e-9;
const NM_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub delta: f64,
    pub c: f64,
    pub n_bin: usize,
    pub objective: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("only {0} valid bins, need at least 2")]
    TooFewBins(usize),
    #[error("no positive mean impact among the valid bins")]
    NonPositive,
}

/// Objective at `(c, delta)` for `(x, y)` points.
pub fn relative_objective(points: &[(f64, f64)], c: f64, delta: f64) -> f64 {
    points
        .iter()
        .map(|&(x, y)| {
            let m = c * x.powf(delta);
            let r = (y - m) / m;
            r * r
        })
        .sum()
}

fn objective_log(points: &[(f64, f64)], ln_c: f64, delta: f64) -> f64 {
    // y / (c x^d) - 1 with the exponent folded for stability
    points
        .iter()
        .map(|&(x, y)| {
            let r = y * (-ln_c - delta * x.ln()).exp() - 1.0;
            r * r
        })
        .sum()
}

pub fn fit_power_law(binned: &BinnedImpact, min_count: usize) -> Result<PowerFit, FitError> {
    let points: Vec<(f64, f64)> = binned.valid(min_count).map(|(_, x, y)| (x, y)).collect();
    fit_points(&points)
}

/// Fit on explicit `(x, y)` points, all of which are treated as valid.
pub fn fit_points(points: &[(f64, f64)]) -> Result<PowerFit, FitError> {
    let n_bin = points.len();
    if n_bin < 2 {
        return Err(FitError::TooFewBins(n_bin));
    }
    if points.iter().all(|&(_, y)| y <= 0.0) {
        return Err(FitError::NonPositive);
    }

    let start = ols_start(points);
    let f = |p: [f64; 2]| objective_log(points, p[0], p[1]);
    let (nm_best, nm_converged) = nelder_mead(f, start, [0.1, 0.05]);
    let (best, gn_converged) = gauss_newton(points, nm_best);

    let objective = f(best);
    Ok(PowerFit {
        delta: best[1],
        c: best[0].exp(),
        n_bin,
        objective,
        converged: (nm_converged || gn_converged) && objective.is_finite(),
    })
}

/// OLS of `ln y` on `ln x` over the positive means.
fn ols_start(points: &[(f64, f64)]) -> [f64; 2] {
    let pos: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, y)| y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if pos.len() < 2 {
        let y = pos.first().map_or(0.0, |p| p.1);
        let x = pos.first().map_or(0.0, |p| p.0);
        return [y - 0.5 * x, 0.5];
    }
    let n = pos.len() as f64;
    let mx = pos.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pos.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pos.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pos.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.5 };
    [my - slope * mx, slope]
}

fn nelder_mead<F: Fn([f64; 2]) -> f64>(f: F, start: [f64; 2], step: [f64; 2]) -> ([f64; 2], bool) {
    let mut simplex = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    let mut values = simplex.map(&f);

    for _ in 0..NM_MAX_ITER {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);

        let spread = (1..3)
            .map(|i| {
                (simplex[i][0] - simplex[0][0])
                    .abs()
                    .max((simplex[i][1] - simplex[0][1]).abs())
            })
            .fold(0.0, f64::max);
        if spread < NM_TOL {
            return (simplex[0], true);
        }

        let centroid = [
            (simplex[0][0] + simplex[1][0]) / 2.0,
            (simplex[0][1] + simplex[1][1]) / 2.0,
        ];
        let along = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };

        let reflected = along(-1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
            continue;
        }
        if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
            continue;
        }
        let contracted = if fr < values[2] {
            along(-0.5)
        } else {
            along(0.5)
        };
        let fc = f(contracted);
        if fc < values[2].min(fr) {
            simplex[2] = contracted;
            values[2] = fc;
            continue;
        }
        for i in 1..3 {
            simplex[i] = [
                simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
            ];
            values[i] = f(simplex[i]);
        }
    }
    let best = (0..3)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap();
    (simplex[best], false)
}

/// Gauss-Newton on the residuals `y / (c x^d) - 1`, accepting only steps that
/// lower the objective.
fn gauss_newton(points: &[(f64, f64)], start: [f64; 2]) -> ([f64; 2], bool) {
    let f = |p: [f64; 2]| objective_log(points, p[0], p[1]);
    let mut p = start;
    let mut fp = f(p);
    for _ in 0..100 {
        let (mut a11, mut a12, mut a22, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(x, y) in points {
            let lx = x.ln();
            let s = y * (-p[0] - p[1] * lx).exp();
            let r = s - 1.0;
            // d r / d ln c = -s, d r / d delta = -s ln x
            let (j1, j2) = (-s, -s * lx);
            a11 += j1 * j1;
            a12 += j1 * j2;
            a22 += j2 * j2;
            g1 += j1 * r;
            g2 += j2 * r;
        }
        let det = a11 * a22 - a12 * a12;
        if !(det.abs() > 0.0) || !det.is_finite() {
            return (p, false);
        }
        let d = [-(a22 * g1 - a12 * g2) / det, -(a11 * g2 - a12 * g1) / det];
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-6 {
            let q = [p[0] + t * d[0], p[1] + t * d[1]];
            let fq = f(q);
            if fq <= fp {
                moved = fq < fp;
                p = q;
                fp = fq;
                break;
            }
            t *= 0.5;
        }
        if !moved || d[0].abs().max(d[1].abs()) < 1e-14 {
            return (p, true);
        }
    }
    (p, true)
}

/// Closed-form relative least squares with the exponent fixed at 1/2:
/// minimizing `sum (a_k / c - 1)^2` with `a_k = y_k / sqrt(x_k)` gives
/// `c = sum a^2 / sum a`. `None` when `sum a <= 0` or no points.
pub fn fit_sqrt_prefactor(points: &[(f64, f64)]) -> Option<f64> {
    if points.is_empty() {
        return None;
    }
    let (mut s1, mut s2) = (0.0, 0.0);
    for &(x, y) in points {
        let a = y / x.sqrt();
        s1 += a;
        s2 += a * a;
    }
    (s1 > 0.0).then(|| s2 / s1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impact::binning::{Bin, Binning};

    fn exact_bins(c: f64, delta: f64, count: usize) -> BinnedImpact {
        let b = Binning::default();
        let bins = (0..b.n_bins())
            .map(|k| Bin {
                count,
                mean: c * b.center(k).powf(delta),
                sem: 0.0,
            })
            .collect();
        BinnedImpact::from_bins(b, bins)
    }

    #[test]
    fn recovers_exact_square_root() {
        let fit = fit_power_law(&exact_bins(0.8, 0.5, 200), DEFAULT_MIN_BIN_COUNT).unwrap();
        assert!((fit.c - 0.8).abs() < 1e-6, "{fit:?}");
        assert!((fit.delta - 0.5).abs() < 1e-6);
        assert_eq!(fit.n_bin, 61);
        assert!(fit.converged);
        assert!(fit.objective < 1e-20);
    }

    #[test]
    fn recovers_linear_regime() {
        let fit = fit_power_law(&exact_bins(1.0, 1.0, 200), DEFAULT_MIN_BIN_COUNT).unwrap();
        assert!((fit.delta - 1.0).abs() < 1e-6);
        assert!((fit.c - 1.0).abs() < 1e-6);
    }

    #[test]
    fn valid_bin_rule_is_strict() {
        let mut b = exact_bins(1.0, 0.5, 100);
        assert_eq!(fit_power_law(&b, 100), Err(FitError::TooFewBins(0)));
        b.bins[3].count = 101;
        assert_eq!(fit_power_law(&b, 100), Err(FitError::TooFewBins(1)));
        b.bins[9].count = 101;
        assert_eq!(fit_power_law(&b, 100).unwrap().n_bin, 2);
    }

    #[test]
    fn all_negative_means_are_unfittable() {
        let pts = [(0.01, -0.1), (0.1, -0.2), (1.0, 0.0)];
        assert_eq!(fit_points(&pts), Err(FitError::NonPositive));
    }

    #[test]
    fn mixed_sign_means_still_fit() {
        let pts = [(0.001, -0.01), (0.01, 0.1), (0.1, 0.3), (1.0, 1.0)];
        let fit = fit_points(&pts).unwrap();
        assert!(fit.c > 0.0 && fit.objective.is_finite());
        assert!(fit.objective <= relative_objective(&pts, 1.0, 0.5));
    }

    #[test]
    fn sqrt_prefactor_closed_form() {
        let pts: Vec<(f64, f64)> = [0.01, 0.04, 0.25]
            .iter()
            .map(|&x: &f64| (x, 1.7 * x.sqrt()))
            .collect();
        assert!((fit_sqrt_prefactor(&pts).unwrap() - 1.7).abs() < 1e-14);
        assert_eq!(fit_sqrt_prefactor(&[(0.01, -1.0)]), None);
    }
}
