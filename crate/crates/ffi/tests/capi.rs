use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use impact_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { impact_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(impact_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn tail_fit_recovers_the_exponent_at_known_quantiles() {
    // deterministic Pareto(1, 1.5) quantiles
    let n = 20_000;
    let xs: Vec<f64> = (0..n)
        .map(|i| (1.0 - (i as f64 + 0.5) / n as f64).powf(-1.0 / 1.5))
        .collect();
    let mut fit = ImpactTailFit::default();
    let s = unsafe { impact_tail_fit(xs.as_ptr(), xs.len(), ImpactVariant::Continuous, &mut fit) };
    assert_eq!(s, ImpactStatus::Ok);
    assert!((fit.exponent - 1.5).abs() < 0.05, "{fit:?}");
}

#[test]
fn tail_fit_reports_bad_input() {
    let xs = [1.0, -2.0, 3.0];
    let mut fit = ImpactTailFit::default();
    let s = unsafe { impact_tail_fit(xs.as_ptr(), 3, ImpactVariant::Continuous, &mut fit) };
    assert_eq!(s, ImpactStatus::Data);
    assert!(!last_error().is_empty());
    let s = unsafe { impact_tail_fit(ptr::null(), 5, ImpactVariant::Discrete, &mut fit) };
    assert_eq!(s, ImpactStatus::NullPointer);
    assert_eq!(last_error(), "samples is null");
}

#[test]
fn exact_square_root_samples_fit_to_one_half() {
    let q: Vec<f64> = (0..4000)
        .map(|i| 10f64.powf(-3.0 + 2.5 * i as f64 / 4000.0))
        .collect();
    let impact: Vec<f64> = q.iter().map(|x| 0.8 * x.sqrt()).collect();
    let mut fit = ImpactPowerFit::default();
    let s = unsafe { impact_fit_samples(q.as_ptr(), impact.as_ptr(), q.len(), 10, &mut fit) };
    assert_eq!(s, ImpactStatus::Ok);
    // bin means of c*sqrt(q) sit slightly off c*sqrt(center)
    assert!(
        (fit.delta - 0.5).abs() < 1e-3 && (fit.c - 0.8).abs() < 1e-2,
        "{fit:?}"
    );
    let mut fit = ImpactPowerFit::default();
    let s = unsafe { impact_fit_samples(q.as_ptr(), impact.as_ptr(), 5, 10, &mut fit) };
    assert_eq!(s, ImpactStatus::Numeric);
}

#[test]
fn config_errors_map_to_status_codes() {
    let mut cfg = ptr::null_mut();
    let missing = CString::new("/nonexistent/impact.toml").unwrap();
    assert_eq!(
        unsafe { impact_config_load(missing.as_ptr(), &mut cfg) },
        ImpactStatus::Io
    );
    assert!(cfg.is_null());

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "[estimator]\nno_such_key = 1\n").unwrap();
    let p = CString::new(p.to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { impact_config_load(p.as_ptr(), &mut cfg) },
        ImpactStatus::Config
    );
    assert!(last_error().contains("no_such_key"));
    unsafe {
        impact_config_free(ptr::null_mut());
        impact_report_free(ptr::null_mut());
    }
}

#[test]
fn pipeline_through_handles() {
    use impact_core::impact::binning::Binning;
    use impact_core::nullmodel::simulate::render_streams;
    use impact_core::nullmodel::synth_schedules;
    use impact_core::orderflow::stream::write_stream;
    use impact_core::report::config::PipelineConfig;

    let fixture =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/synth5/config.toml");
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("config.toml");
    std::fs::copy(&fixture, &cfg_path).unwrap();
    let cfg = PipelineConfig::load(&cfg_path).unwrap();
    let schedules = synth_schedules(&cfg.synth, Binning::default()).unwrap();
    write_stream(
        &dir.path().join("stream.csv"),
        &render_streams(&schedules, cfg.synth.seed, 1.0),
    )
    .unwrap();

    let mut handle = ptr::null_mut();
    let c_cfg = CString::new(cfg_path.to_str().unwrap()).unwrap();
    let out = CString::new(dir.path().join("out").to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(
            impact_config_load(c_cfg.as_ptr(), &mut handle),
            ImpactStatus::Ok
        );
        assert_eq!(impact_config_set_seed(handle, 7), ImpactStatus::Ok);
        let mut report = ptr::null_mut();
        assert_eq!(
            impact_pipeline_run(handle, out.as_ptr(), &mut report),
            ImpactStatus::Ok
        );
        let mut s = ImpactLevelSummary::default();
        assert_eq!(
            impact_report_summary(report, ImpactLevel::Stock, &mut s),
            ImpactStatus::Ok
        );
        assert_eq!(s.n, 5);
        assert!(s.has_corrected && s.corrected_se > 0.0);
        assert!((s.corrected_delta - (s.mean_delta - s.bias)).abs() < 1e-12);
        assert_eq!(
            impact_report_summary(report, ImpactLevel::Trader, &mut s),
            ImpactStatus::Ok
        );
        assert_eq!(s.n, 20);
        impact_report_free(report);
        impact_config_free(handle);
    }
    assert!(dir.path().join("out/manifest.txt").exists());
}

#[test]
fn header_parses_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/impact.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "impact_tail_fit",
        "impact_pipeline_run",
        "impact_report_free",
        "impact_last_error",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler, skipping syntax check");
        return;
    };
    assert!(status.success());
}
