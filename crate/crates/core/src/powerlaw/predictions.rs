//! Per-stock tail exponents and the scatter test of `delta = beta - 1`
//! (volume tail) and `delta = alpha - 1` (run-length tail).

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::clauset::{clauset_fit, TailError, TailFit, Variant};
use crate::error::{Error, Result};
use crate::metaorder::MetaorderRow;
use crate::stats::pearson;

#[derive(Debug, Clone, PartialEq)]
pub struct StockTails {
    /// Volume tail, continuous variant.
    pub beta: std::result::Result<TailFit, TailError>,
    /// Run-length tail, discrete variant.
    pub alpha: std::result::Result<TailFit, TailError>,
}

/// Fit beta on |Q| and alpha on L for every stock, pooling all traders.
pub fn fit_tails(rows: &[MetaorderRow]) -> BTreeMap<String, StockTails> {
    let mut by_stock: BTreeMap<&str, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        let e = by_stock.entry(r.stock.as_str()).or_default();
        e.0.push(r.q.unsigned_abs() as f64);
        e.1.push(r.l as f64);
    }
    let fits: Vec<_> = by_stock
        .into_par_iter()
        .map(|(stock, (q, l))| {
            (
                stock.to_string(),
                StockTails {
                    beta: clauset_fit(&q, Variant::Continuous),
                    alpha: clauset_fit(&l, Variant::Discrete),
                },
            )
        })
        .collect();
    fits.into_iter().collect()
}

#[derive(Serialize)]
struct TailRow<'a> {
    stock: &'a str,
    quantity: &'a str,
    exponent: f64,
    x_min: f64,
    n_tail: usize,
    ks: f64,
}

pub const TAIL_HEADER: &[&str] = &["stock", "quantity", "exponent", "x_min", "n_tail", "ks"];

pub fn write_tails(path: &Path, tails: &BTreeMap<String, StockTails>) -> Result<()> {
    let mut w = crate::io::csv_writer(path, TAIL_HEADER)?;
    for (stock, t) in tails {
        for (quantity, fit) in [("beta", &t.beta), ("alpha", &t.alpha)] {
            if let Ok(f) = fit {
                w.serialize(TailRow {
                    stock,
                    quantity,
                    exponent: f.exponent,
                    x_min: f.x_min,
                    n_tail: f.n_tail,
                    ks: f.ks,
                })?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct TailTableRow {
    pub stock: String,
    pub quantity: String,
    pub exponent: f64,
    pub x_min: f64,
    pub n_tail: usize,
    pub ks: f64,
}

pub fn read_tails(path: &Path) -> Result<Vec<TailTableRow>> {
    crate::io::read_table(path, TAIL_HEADER)
}

/// Inverse of [`write_tails`]; a quantity missing from the table reads back
/// as an empty tail.
pub fn read_tail_fits(path: &Path) -> Result<BTreeMap<String, StockTails>> {
    let mut out: BTreeMap<String, StockTails> = BTreeMap::new();
    for r in read_tails(path)? {
        let variant = match r.quantity.as_str() {
            "beta" => Variant::Continuous,
            "alpha" => Variant::Discrete,
            other => {
                return Err(Error::Data(format!(
                    "{}: unknown tail quantity `{other}`",
                    path.display()
                )))
            }
        };
        let fit = Ok(TailFit {
            exponent: r.exponent,
            x_min: r.x_min,
            n_tail: r.n_tail,
            ks: r.ks,
            variant,
        });
        let e = out.entry(r.stock).or_insert(StockTails {
            beta: Err(TailError::TooFewTail(0)),
            alpha: Err(TailError::TooFewTail(0)),
        });
        match variant {
            Variant::Continuous => e.beta = fit,
            Variant::Discrete => e.alpha = fit,
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionRow {
    pub stock: String,
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionTest {
    pub rows: Vec<PredictionRow>,
    /// Pearson r of (delta, beta - 1); `None` when a column is constant.
    pub r_beta: Option<f64>,
    /// Pearson r of (delta, alpha - 1).
    pub r_alpha: Option<f64>,
}

/// Needs at least three stocks with all three exponents.
pub fn test_predictions(rows: Vec<PredictionRow>) -> Result<PredictionTest> {
    if rows.len() < 3 {
        return Err(Error::Data(format!(
            "prediction test needs at least 3 stocks with delta, alpha and beta, got {}",
            rows.len()
        )));
    }
    let delta: Vec<f64> = rows.iter().map(|r| r.delta).collect();
    let beta_m1: Vec<f64> = rows.iter().map(|r| r.beta - 1.0).collect();
    let alpha_m1: Vec<f64> = rows.iter().map(|r| r.alpha - 1.0).collect();
    Ok(PredictionTest {
        r_beta: pearson(&delta, &beta_m1),
        r_alpha: pearson(&delta, &alpha_m1),
        rows,
    })
}

/// Join stock-level exponents with the tail fits.
pub fn join_rows<'a>(
    deltas: impl IntoIterator<Item = (&'a str, f64)>,
    tails: &BTreeMap<String, StockTails>,
) -> Vec<PredictionRow> {
    deltas
        .into_iter()
        .filter_map(|(stock, delta)| {
            let t = tails.get(stock)?;
            let (a, b) = (t.alpha.as_ref().ok()?, t.beta.as_ref().ok()?);
            Some(PredictionRow {
                stock: stock.to_string(),
                delta,
                alpha: a.exponent,
                beta: b.exponent,
            })
        })
        .collect()
}

/// Two-sided permutation p-value for the Pearson correlation: the fraction
/// of shuffles of `y` whose |r| reaches the observed |r|.
pub fn permutation_pvalue<R: Rng>(
    x: &[f64],
    y: &[f64],
    shuffles: usize,
    rng: &mut R,
) -> Option<f64> {
    let observed = pearson(x, y)?.abs();
    let mut yy = y.to_vec();
    let mut hits = 0usize;
    for _ in 0..shuffles {
        yy.shuffle(rng);
        if pearson(x, &yy).is_some_and(|r| r.abs() >= observed - 1e-15) {
            hits += 1;
        }
    }
    Some((hits + 1) as f64 / (shuffles + 1) as f64)
}

pub fn write_scatter(path: &Path, test: &PredictionTest) -> Result<()> {
    let mut w = crate::io::csv_writer(path, &["stock", "delta", "alpha_minus_1", "beta_minus_1"])?;
    for r in &test.rows {
        w.write_record([
            r.stock.clone(),
            r.delta.to_string(),
            (r.alpha - 1.0).to_string(),
            (r.beta - 1.0).to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn row(i: usize, delta: f64, alpha: f64, beta: f64) -> PredictionRow {
        PredictionRow {
            stock: format!("S{i}"),
            delta,
            alpha,
            beta,
        }
    }

    #[test]
    fn exact_relation_gives_unit_correlation() {
        let rows: Vec<_> = (0..10)
            .map(|i| {
                let beta = 1.2 + 0.07 * i as f64;
                row(i, beta - 1.0, 1.5 + ((i * 7) % 5) as f64 * 0.1, beta)
            })
            .collect();
        let t = test_predictions(rows).unwrap();
        assert!((t.r_beta.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_delta_is_undefined() {
        let rows: Vec<_> = (0..5)
            .map(|i| row(i, 0.5, 1.0 + i as f64, 2.0 - i as f64 * 0.1))
            .collect();
        let t = test_predictions(rows).unwrap();
        assert_eq!(t.r_beta, None);
        assert_eq!(t.r_alpha, None);
    }

    #[test]
    fn fewer_than_three_stocks_is_an_error() {
        assert!(test_predictions(vec![row(0, 0.5, 1.5, 1.5), row(1, 0.4, 1.4, 1.6)]).is_err());
    }

    #[test]
    fn independent_columns_are_not_significant() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let x: Vec<f64> = (0..500).map(|_| rng.random()).collect();
        let y: Vec<f64> = (0..500).map(|_| rng.random()).collect();
        let r = pearson(&x, &y).unwrap();
        assert!(r.abs() < 0.1);
        // permutation null: |r| this small is typical
        let p = permutation_pvalue(&x, &y, 10_000, &mut rng).unwrap();
        assert!(p > 0.01, "p = {p}");
        let y2: Vec<f64> = x
            .iter()
            .map(|v| 2.0 * v + 0.01 * rng.random::<f64>())
            .collect();
        assert!(permutation_pvalue(&x, &y2, 999, &mut rng).unwrap() <= 1e-3 + 1e-12);
    }
}
