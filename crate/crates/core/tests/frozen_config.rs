use std::path::Path;

use oodselect_core::benchgen::RegimeSpec;
use oodselect_core::config::RunConfig;

fn configs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

#[test]
fn default_config_file_matches_defaults() {
    let cfg = RunConfig::load(&configs().join("default.json")).unwrap();
    assert_eq!(cfg, RunConfig::default());
    let text = std::fs::read_to_string(configs().join("default.json")).unwrap();
    assert_eq!(text, RunConfig::default().to_json());
}

#[test]
fn benchmark_spec_file_matches_defaults() {
    let text = std::fs::read_to_string(configs().join("benchmark_spec.json")).unwrap();
    let spec: RegimeSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(spec, RegimeSpec::default());
}
