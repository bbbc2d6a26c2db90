#![no_main]

use dirac_pol::io::read_report_json;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(r) = read_report_json(text) {
            let _ = r.signs_hold();
        }
    }
});
