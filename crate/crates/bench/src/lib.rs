//! Shared setup for the placement benchmarks.

use coverage_core::{Instance, Overrides, Scenario};

/// Loads a bundled scenario with `lambda` replaced.
pub fn instance(name: &str, lambda: f64) -> Instance {
    let path = format!("{}/../../scenarios/{name}.json", env!("CARGO_MANIFEST_DIR"));
    Scenario::load(path)
        .expect("bundled scenario parses")
        .with_overrides(&Overrides {
            lambda: Some(lambda),
            ..Overrides::default()
        })
        .build()
        .expect("bundled scenario is valid")
}
