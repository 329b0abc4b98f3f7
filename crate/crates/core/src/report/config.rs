//! Pipeline configuration, read from TOML. Every threshold has a named
//! default so robustness variants are one-line edits.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::robustness::DEFAULT_WINDOW_MIN_SAMPLES;
use super::split::{default_splits, validate_splits, DatasetSplit};
use crate::error::{Error, Result};
use crate::impact::binning::Binning;
use crate::impact::entities::EstimatorConfig;
pub use crate::impact::fit::DEFAULT_MIN_BIN_COUNT;
use crate::impact::samples::{HorizonWindow, HORIZON_BUCKETS};
pub use crate::metaorder::DEFAULT_LIQUID_THRESHOLD;
use crate::nullmodel::{SimConfig, SynthConfig};
use crate::orderflow::EventFormat;

pub const DEFAULT_MIN_HORIZON_SEC: f64 = 60.0;
pub const DEFAULT_ACTIVE_MIN_METAORDERS: usize = 10_000;
pub const DEFAULT_ACTIVE_MIN_BINS: usize = 10;
pub const DEFAULT_BIN_FIRST_EXP: f64 = -3.0;
pub const DEFAULT_BIN_DELTA: f64 = 0.05;
pub const DEFAULT_BIN_K_MAX: usize = 60;
pub const DEFAULT_MC_TRIALS: usize = 100;
pub const DEFAULT_NOISE_SCALE: f64 = 1.0;
pub const DEFAULT_DELTA_HIST: [f64; 3] = [0.0, 1.0, 0.02];
pub const DEFAULT_C_HIST: [f64; 3] = [0.0, 5.0, 0.1];

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    /// Full order-event log.
    pub events: Option<PathBuf>,
    /// Reduced market-order stream; alternative to `events`.
    pub stream: Option<PathBuf>,
    pub format: Option<String>,
    pub flags: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorSection {
    pub min_horizon_sec: f64,
    pub liquid_threshold: usize,
    pub active_min_metaorders: usize,
    pub active_min_bins: usize,
    pub min_bin_count: usize,
    pub bin_first_exp: f64,
    pub bin_delta: f64,
    pub bin_k_max: usize,
}

impl Default for EstimatorSection {
    fn default() -> Self {
        EstimatorSection {
            min_horizon_sec: DEFAULT_MIN_HORIZON_SEC,
            liquid_threshold: DEFAULT_LIQUID_THRESHOLD,
            active_min_metaorders: DEFAULT_ACTIVE_MIN_METAORDERS,
            active_min_bins: DEFAULT_ACTIVE_MIN_BINS,
            min_bin_count: DEFAULT_MIN_BIN_COUNT,
            bin_first_exp: DEFAULT_BIN_FIRST_EXP,
            bin_delta: DEFAULT_BIN_DELTA,
            bin_k_max: DEFAULT_BIN_K_MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobustnessSection {
    /// `[lo, hi]` pairs in minutes, half-open.
    pub windows: Vec<[f64; 2]>,
    pub window_min_samples: usize,
}

impl Default for RobustnessSection {
    fn default() -> Self {
        RobustnessSection {
            windows: HORIZON_BUCKETS
                .iter()
                .map(|w| [w.lo_min, w.hi_min])
                .collect(),
            window_min_samples: DEFAULT_WINDOW_MIN_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloSection {
    pub enabled: bool,
    pub seed: u64,
    pub trials: usize,
    pub noise_scale: f64,
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        MonteCarloSection {
            enabled: true,
            seed: 0,
            trials: DEFAULT_MC_TRIALS,
            noise_scale: DEFAULT_NOISE_SCALE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSection {
    /// `[lo, hi, width]`.
    pub delta_hist: [f64; 3],
    pub c_hist: [f64; 3],
    /// Shuffles for the optional permutation p-value; 0 disables it.
    pub permutations: usize,
}

impl Default for ReportSection {
    fn default() -> Self {
        ReportSection {
            delta_hist: DEFAULT_DELTA_HIST,
            c_hist: DEFAULT_C_HIST,
            permutations: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: InputConfig,
    /// Empty means one split named `all` covering every date.
    pub splits: Vec<DatasetSplit>,
    pub estimator: EstimatorSection,
    pub robustness: RobustnessSection,
    pub montecarlo: MonteCarloSection,
    pub report: ReportSection,
    /// Generator settings for `simulate --schedule synth`.
    pub synth: SynthConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: InputConfig::default(),
            splits: default_splits(),
            estimator: EstimatorSection::default(),
            robustness: RobustnessSection::default(),
            montecarlo: MonteCarloSection::default(),
            report: ReportSection::default(),
            synth: SynthConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Load a config file; relative input paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut cfg.input.events,
            &mut cfg.input.stream,
            &mut cfg.input.flags,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn estimator(&self) -> EstimatorConfig {
        let e = &self.estimator;
        EstimatorConfig {
            min_horizon_sec: e.min_horizon_sec,
            window: None,
            binning: Binning {
                first_exp: e.bin_first_exp,
                delta: e.bin_delta,
                k_max: e.bin_k_max,
            },
            min_bin_count: e.min_bin_count,
            liquid_threshold: e.liquid_threshold,
            active_min_metaorders: e.active_min_metaorders,
            active_min_bins: e.active_min_bins,
        }
    }

    pub fn sim(&self) -> SimConfig {
        SimConfig {
            seed: self.montecarlo.seed,
            noise_scale: self.montecarlo.noise_scale,
            n_trials: self.montecarlo.trials,
        }
    }

    pub fn windows(&self) -> Vec<HorizonWindow> {
        self.robustness
            .windows
            .iter()
            .map(|w| HorizonWindow::new(w[0], w[1]))
            .collect()
    }

    pub fn event_format(&self) -> Result<EventFormat> {
        self.input.format.as_deref().unwrap_or("csv").parse()
    }

    /// Check everything that can be checked before touching data.
    pub fn validate(&self) -> Result<()> {
        match (&self.input.events, &self.input.stream) {
            (None, None) => {
                return Err(Error::Config(
                    "missing input path: set `input.events` or `input.stream`".into(),
                ))
            }
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "set only one of `input.events` and `input.stream`".into(),
                ))
            }
            _ => {}
        }
        self.event_format()?;
        if !self.splits.is_empty() {
            validate_splits(&self.splits)?;
        }
        let e = &self.estimator;
        if !(e.min_horizon_sec >= 0.0) {
            return Err(Error::Config(
                "`estimator.min_horizon_sec` must be >= 0".into(),
            ));
        }
        if !(e.bin_delta > 0.0) {
            return Err(Error::Config(
                "`estimator.bin_delta` must be positive".into(),
            ));
        }
        for w in &self.robustness.windows {
            if !(w[1] > w[0]) {
                return Err(Error::Config(format!(
                    "`robustness.windows` entry {w:?} is empty"
                )));
            }
        }
        if self.montecarlo.enabled && self.montecarlo.trials == 0 {
            return Err(Error::Config("`montecarlo.trials` must be positive".into()));
        }
        if !(self.montecarlo.noise_scale >= 0.0) {
            return Err(Error::Config(
                "`montecarlo.noise_scale` must be >= 0".into(),
            ));
        }
        for (name, h) in [
            ("report.delta_hist", self.report.delta_hist),
            ("report.c_hist", self.report.c_hist),
        ] {
            if !(h[1] > h[0] && h[2] > 0.0) {
                return Err(Error::Config(format!(
                    "`{name}` needs lo < hi and width > 0"
                )));
            }
        }
        self.synth.validate()?;
        Ok(())
    }

    /// SHA-256 of the resolved config, rendered back to TOML.
    pub fn hash(&self) -> Result<String> {
        let text = toml::to_string(self).map_err(|e| Error::Config(e.to_string()))?;
        Ok(hex::encode(Sha256::digest(text.as_bytes())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = PipelineConfig {
            input: InputConfig {
                stream: Some("s.csv".into()),
                ..InputConfig::default()
            },
            ..PipelineConfig::default()
        };
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(PipelineConfig::from_toml(&text).unwrap(), cfg);
        cfg.validate().unwrap();
        assert_eq!(cfg.estimator(), EstimatorConfig::default());
    }

    #[test]
    fn one_line_override() {
        let cfg = PipelineConfig::from_toml(
            "[input]\nstream = \"x.csv\"\n[estimator]\nmin_horizon_sec = 120\n",
        )
        .unwrap();
        assert_eq!(cfg.estimator().min_horizon_sec, 120.0);
        assert_eq!(cfg.estimator().liquid_threshold, DEFAULT_LIQUID_THRESHOLD);
    }

    #[test]
    fn missing_input_names_the_field() {
        let err = PipelineConfig::default().validate().unwrap_err();
        assert!(err.to_string().contains("input.events"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(PipelineConfig::from_toml("[estimator]\nmin_horizon = 60\n").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = PipelineConfig::default();
        let mut b = a.clone();
        b.montecarlo.seed = 9;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
        assert_eq!(a.hash().unwrap(), a.clone().hash().unwrap());
    }
}
