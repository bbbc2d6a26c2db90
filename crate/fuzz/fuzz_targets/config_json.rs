#![no_main]

use dirac_pol::io::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_json_str(text) {
        let _ = cfg.validate();
        let _ = cfg.potential_spec();
        let _ = cfg.box_basis();
    }
});
