//! Null model with an exact square-root impact, and the Monte Carlo harness
//! measuring the estimator's finite-sample bias and spread.

pub mod montecarlo;
pub mod rng;
pub mod schedule;
pub mod simulate;
pub mod synth;

pub use montecarlo::{bias_correct, run_monte_carlo, DeltaMean, MonteCarloSummary, SimConfig};
pub use schedule::{schedules_from_streams, StockSchedule};
pub use synth::{synth_schedules, SynthConfig};
