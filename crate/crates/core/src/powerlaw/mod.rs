//! Tail exponents of metaorder volume and length, and the test of the
//! exponent-linking predictions against the measured impact exponents.

pub mod clauset;
pub mod predictions;
pub mod zeta;

pub use clauset::{clauset_fit, fit_with_xmin, TailError, TailFit, Variant};
pub use predictions::{
    fit_tails, join_rows, permutation_pvalue, test_predictions, PredictionRow, PredictionTest,
    StockTails,
};
pub use zeta::hurwitz_zeta;
