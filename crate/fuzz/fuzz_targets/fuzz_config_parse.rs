#![no_main]

//! The config parser takes arbitrary user files; it must never panic, and
//! whatever it accepts must validate or reject cleanly as a sweep spec.

use libfuzzer_sys::fuzz_target;
use qbus_cli::config::{ConfigFile, SweepSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = ConfigFile::parse(text) {
        // Building a spec from any parsed config must not panic either.
        let _ = SweepSpec::from_config(&config);
    }
});
