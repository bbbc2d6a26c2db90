#![no_main]

use dirac_pol::io::read_sweep_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = read_sweep_csv(text);
    }
});
