#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = riemann_dc::io::parse_generate_spec(data);
});
