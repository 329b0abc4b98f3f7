//! Peak-impact samples, logarithmic binning, relative least-squares fits at
//! stock and trader level, and the aggregate scaling curve.

pub mod binning;
pub mod entities;
pub mod fit;
pub mod samples;
pub mod scaling;

pub use binning::{bin_samples, Bin, BinnedImpact, Binning};
pub use entities::{
    fit_all_stocks, fit_all_traders, fit_group, fit_groups, EntityFits, EstimatorConfig, Level,
    Skip,
};
pub use fit::{fit_power_law, fit_sqrt_prefactor, relative_objective, FitError, PowerFit};
pub use samples::{
    compute_impact_samples, filter_samples, HorizonWindow, ImpactSample, HORIZON_BUCKETS,
};
pub use scaling::{aggregate_scaling, ScalingCurve, ScalingPoint};
