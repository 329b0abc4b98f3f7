#![allow(dead_code)]

use std::path::{Path, PathBuf};

use impact_core::impact::binning::Binning;
use impact_core::nullmodel::simulate::render_streams;
use impact_core::nullmodel::synth_schedules;
use impact_core::orderflow::stream::write_stream;
use impact_core::report::config::PipelineConfig;

pub fn fixture_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/synth5/config.toml")
}

/// Copy the five-stock fixture config into `dir` and render its stream
/// next to it. Returns the copied config path.
pub fn fixture_in(dir: &Path) -> PathBuf {
    let cfg_path = dir.join("config.toml");
    std::fs::copy(fixture_config(), &cfg_path).unwrap();
    let cfg = PipelineConfig::load(&cfg_path).unwrap();
    let schedules = synth_schedules(&cfg.synth, Binning::default()).unwrap();
    let days = render_streams(&schedules, cfg.synth.seed, cfg.montecarlo.noise_scale);
    write_stream(&dir.join("stream.csv"), &days).unwrap();
    cfg_path
}
