#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use structured_bandit::simulation::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(config) = ExperimentConfig::from_json(text) else {
        return;
    };
    // Model files are never read: the fuzz directory has none.
    let _ = config.resolve(Path::new("/nonexistent"));
});
